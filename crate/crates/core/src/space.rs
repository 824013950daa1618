//! Truncated ambient space, ε/α sequences, the Riesz map `G`, and
//! biorthogonal basis pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::report::CheckReport;

/// Default cap on `cond(G)`. Past it, biorthogonality residuals are
/// dominated by round-off.
pub const CONDITION_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonKind {
    /// `ε_k = k`
    Linear,
    /// `ε_k = k²`
    Quadratic,
    /// `ε_k = k(k+1)`
    Kkplus1,
    Custom,
}

impl EpsilonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EpsilonKind::Linear => "linear",
            EpsilonKind::Quadratic => "quadratic",
            EpsilonKind::Kkplus1 => "kkplus1",
            EpsilonKind::Custom => "custom",
        }
    }
}

/// `0 = ε₀ < ε₁ < … < ε_N`, length `N + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSequence {
    values: Vec<f64>,
}

impl EpsilonSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidEpsilon(format!(
                "need at least two values, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidEpsilon(format!(
                "value {} at index {k} is negative or not finite",
                values[k]
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidEpsilon(format!(
                "first value must be 0, got {}",
                values[0]
            )));
        }
        if let Some(k) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidEpsilon(format!(
                "not strictly increasing at index {}: {} then {}",
                k + 1,
                values[k],
                values[k + 1]
            )));
        }
        Ok(Self { values })
    }

    /// Partial sums `ε_k = α₀ + … + α_{k−1}`.
    pub fn from_alphas(alpha: &AlphaSequence) -> Self {
        let mut values = Vec::with_capacity(alpha.len() + 1);
        let mut acc = 0.0;
        values.push(acc);
        for &a in alpha.values() {
            acc += a;
            values.push(acc);
        }
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The truncation dimension `N` (one less than the number of values).
    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

pub fn make_epsilon(kind: EpsilonKind, n: usize, custom: Option<&[f64]>) -> Result<EpsilonSequence> {
    if n < 2 {
        return Err(Error::InvalidEpsilon(format!("N must be at least 2, got {n}")));
    }
    let values = match kind {
        EpsilonKind::Linear => (0..=n).map(|k| k as f64).collect(),
        EpsilonKind::Quadratic => (0..=n).map(|k| (k * k) as f64).collect(),
        EpsilonKind::Kkplus1 => (0..=n).map(|k| (k * (k + 1)) as f64).collect(),
        EpsilonKind::Custom => {
            let list = custom.ok_or_else(|| {
                Error::InvalidEpsilon("custom kind requires an explicit list".into())
            })?;
            if list.len() != n + 1 {
                return Err(Error::InvalidEpsilon(format!(
                    "custom list has {} values, expected N + 1 = {}",
                    list.len(),
                    n + 1
                )));
            }
            list.to_vec()
        }
    };
    EpsilonSequence::new(values)
}

/// Strictly positive weights `α_k`, length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSequence {
    values: Vec<f64>,
}

impl AlphaSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidAlpha {
                    index,
                    reason: format!("value {v} is not a positive finite number"),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// `α_k = ε_{k+1} − ε_k`.
pub fn alphas_from_epsilon(eps: &EpsilonSequence) -> AlphaSequence {
    AlphaSequence {
        values: eps.values.windows(2).map(|w| w[1] - w[0]).collect(),
    }
}

/// Dimension `N` and guard band `g`; indices `0..=N-1-g` are guarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSpace {
    dim: usize,
    guard: usize,
}

impl TruncatedSpace {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim == 0 || guard >= dim {
            return Err(Error::InvalidSpace { dim, guard });
        }
        Ok(Self { dim, guard })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Highest guarded index, `N − 1 − g`.
    pub fn guarded_max(&self) -> usize {
        self.dim - 1 - self.guard
    }

    pub fn guarded(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.guarded_max()
    }
}

/// Hermitian, boundedly invertible `G` producing `φ_k = G e_k`, `ψ_k = G⁻¹ e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszMap {
    matrix: CMatrix,
    cond: f64,
}

impl RieszMap {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_cap(matrix, CONDITION_CAP)
    }

    pub fn with_cap(matrix: CMatrix, cap: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Riesz map must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = (&matrix - matrix.adjoint()).norm() / matrix.norm().max(f64::MIN_POSITIVE);
        if !(defect <= 1e-12) {
            return Err(Error::NotHermitian { defect });
        }
        let cond = linalg::condition_number(&matrix);
        if !(cond <= cap) {
            return Err(Error::Conditioning { cond, cap });
        }
        Ok(Self { matrix, cond })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: linalg::identity(n),
            cond: 1.0,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Hermitian positive-definite `G = U D U*` with `U` Haar-random unitary and
/// `D` log-spaced on `[cond^{-1/2}, cond^{1/2}]`, so `cond(G) = cond_target`.
pub fn random_riesz(n: usize, cond_target: f64, seed: u64) -> Result<RieszMap> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
    }
    if !(cond_target >= 1.0) || !cond_target.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cond_target must be a finite number >= 1, got {cond_target}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(n, &mut rng);
    let d: Vec<f64> = (0..n)
        .map(|k| cond_target.powf(k as f64 / (n - 1) as f64 - 0.5))
        .collect();
    let g = &u * linalg::diag_real(&d) * u.adjoint();
    RieszMap::new(linalg::hermitian_part(&g))
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // Phase-fix columns so the distribution is Haar, not QR-biased.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Columns of `phi` are `φ_k`, columns of `psi` are `ψ_k`; intended to satisfy
/// `⟨φ_i, ψ_j⟩ = δ_ij`, i.e. `Ψ*Φ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalPair {
    phi: CMatrix,
    psi: CMatrix,
}

impl BiorthogonalPair {
    /// Shape-checked constructor. Biorthogonality is *not* enforced here so
    /// that defective pairs can be fed to the checkers; use
    /// [`check_biorthogonality`] or [`validated`](Self::validated).
    pub fn new(phi: CMatrix, psi: CMatrix) -> Result<Self> {
        if !phi.is_square() || phi.shape() != psi.shape() {
            return Err(Error::DimensionMismatch(format!(
                "phi {:?} and psi {:?} must be equal square shapes",
                phi.shape(),
                psi.shape()
            )));
        }
        Ok(Self { phi, psi })
    }

    pub fn validated(phi: CMatrix, psi: CMatrix, tol: f64) -> Result<Self> {
        let pair = Self::new(phi, psi)?;
        let r = biorthogonality_residual(&pair);
        if !(r <= tol) {
            return Err(Error::HypothesisViolation(format!(
                "families are not biorthogonal: max |Ψ*Φ − I| = {r:.3e} > {tol:.1e}"
            )));
        }
        Ok(pair)
    }

    /// The orthonormal case `φ_k = ψ_k = e_k`.
    pub fn identity(n: usize) -> Self {
        Self {
            phi: linalg::identity(n),
            psi: linalg::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }

    pub fn psi(&self) -> &CMatrix {
        &self.psi
    }

    pub fn phi_k(&self, k: usize) -> CVector {
        self.phi.column(k).into_owned()
    }

    pub fn psi_k(&self, k: usize) -> CVector {
        self.psi.column(k).into_owned()
    }

    /// Vector with coordinates `c` in the φ family: `Σ c_k φ_k`.
    pub fn from_phi_coeffs(&self, c: &CVector) -> CVector {
        &self.phi * c
    }

    pub fn from_psi_coeffs(&self, d: &CVector) -> CVector {
        &self.psi * d
    }

    /// Coordinates of `v` in the φ family: `c_k = ⟨v, ψ_k⟩`.
    pub fn phi_coeffs(&self, v: &CVector) -> CVector {
        self.psi.adjoint() * v
    }

    /// Coordinates of `v` in the ψ family: `d_k = ⟨v, φ_k⟩`.
    pub fn psi_coeffs(&self, v: &CVector) -> CVector {
        self.phi.adjoint() * v
    }

    /// Replaces `ψ_k` (for building defective fixtures).
    pub fn with_psi_column(mut self, k: usize, v: &CVector) -> Result<Self> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.dim(),
            });
        }
        self.psi.set_column(k, v);
        Ok(self)
    }

    pub fn with_phi_column(mut self, k: usize, v: &CVector) -> Result<Self> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.dim(),
            });
        }
        self.phi.set_column(k, v);
        Ok(self)
    }
}

/// `φ_k = G e_k`, `ψ_k = G⁻¹ e_k`.
pub fn riesz_pair(g: &RieszMap) -> Result<BiorthogonalPair> {
    let gm = g.matrix();
    let cond = linalg::condition_number(gm);
    if !(cond <= CONDITION_CAP) {
        return Err(Error::Conditioning {
            cond,
            cap: CONDITION_CAP,
        });
    }
    let mut inv = linalg::invert(gm).map_err(|_| Error::Conditioning {
        cond,
        cap: CONDITION_CAP,
    })?;
    // One step of iterative refinement: X ← X + X (I − G X).
    let n = gm.nrows();
    let defect = linalg::identity(n) - gm * &inv;
    inv += &inv * defect;
    BiorthogonalPair::new(gm.clone(), inv)
}

fn biorthogonality_residual(pair: &BiorthogonalPair) -> f64 {
    let gram = pair.psi.adjoint() * &pair.phi;
    linalg::max_abs(&(gram - linalg::identity(pair.dim())))
}

/// Entrywise `max |Ψ*Φ − I|`.
pub fn check_biorthogonality(pair: &BiorthogonalPair, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("biorthogonality", tol);
    let gram = pair.psi.adjoint() * &pair.phi;
    let n = pair.dim();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let r = (gram[(i, j)] - target).norm();
            if r > worst.0 {
                worst = (r, i, j);
            }
        }
    }
    let (r, i, j) = worst;
    report.record_with_witness("gram_defect", r, || format!("<phi_{j}, psi_{i}>"));
    report.context.n = Some(n);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn epsilon_kinds() {
        let lin = make_epsilon(EpsilonKind::Linear, 4, None).unwrap();
        assert_eq!(lin.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        let quad = make_epsilon(EpsilonKind::Quadratic, 3, None).unwrap();
        assert_eq!(quad.values(), &[0.0, 1.0, 4.0, 9.0]);
        let kk = make_epsilon(EpsilonKind::Kkplus1, 3, None).unwrap();
        assert_eq!(kk.values(), &[0.0, 2.0, 6.0, 12.0]);
        let custom = make_epsilon(EpsilonKind::Custom, 2, Some(&[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(custom.values(), &[0.0, 1.0, 3.0]);
    }

    #[test]
    fn epsilon_rejections() {
        assert!(make_epsilon(EpsilonKind::Linear, 1, None).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 3, Some(&[0.0, 1.0, 1.0, 2.0])).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 2, Some(&[0.0, -1.0, 3.0])).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 2, Some(&[0.5, 1.0, 3.0])).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 2, Some(&[0.0, 1.0])).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 2, None).is_err());
        assert!(make_epsilon(EpsilonKind::Custom, 2, Some(&[0.0, 1.0, f64::NAN])).is_err());
    }

    #[test]
    fn alphas() {
        let lin = make_epsilon(EpsilonKind::Linear, 6, None).unwrap();
        assert!(alphas_from_epsilon(&lin).values().iter().all(|&a| a == 1.0));
        let quad = make_epsilon(EpsilonKind::Quadratic, 4, None).unwrap();
        assert_eq!(alphas_from_epsilon(&quad).values(), &[1.0, 3.0, 5.0, 7.0]);
        let custom = EpsilonSequence::new(vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(alphas_from_epsilon(&custom).values(), &[1.0, 2.0]);
        assert!(AlphaSequence::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn truncated_space_bounds() {
        assert!(TruncatedSpace::new(4, 4).is_err());
        let s = TruncatedSpace::new(8, 2).unwrap();
        assert_eq!(s.guarded_max(), 5);
        assert_eq!(s.guarded().count(), 6);
    }

    #[test]
    fn identity_riesz_pair_is_orthonormal() {
        let pair = riesz_pair(&RieszMap::identity(3)).unwrap();
        assert_eq!(pair.phi(), &linalg::identity(3));
        assert_eq!(pair.psi(), &linalg::identity(3));
        assert_eq!(check_biorthogonality(&pair, 0.0).worst(), 0.0);
    }

    #[test]
    fn diagonal_riesz_pair() {
        let g = RieszMap::new(linalg::diag_real(&[2.0, 0.5])).unwrap();
        let pair = riesz_pair(&g).unwrap();
        assert!((pair.phi_k(0)[0] - c(2.0)).norm() < 1e-15);
        assert!((pair.psi_k(0)[0] - c(0.5)).norm() < 1e-15);
        assert!((linalg::inner(&pair.phi_k(0), &pair.psi_k(0)) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn riesz_map_rejects_bad_inputs() {
        let mut m = linalg::identity(2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(RieszMap::new(m), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            RieszMap::new(linalg::diag_real(&[1.0, 1e-8])),
            Err(Error::Conditioning { .. })
        ));
        assert!(matches!(
            RieszMap::new(linalg::diag_real(&[1.0, 0.0])),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn random_riesz_contract() {
        let g = random_riesz(2, 1.0, 0).unwrap();
        assert!((g.cond() - 1.0).abs() < 1e-12);
        assert!((g.matrix() - linalg::identity(2)).norm() < 1e-13);

        let g = random_riesz(16, 100.0, 7).unwrap();
        let measured = linalg::condition_number(g.matrix());
        assert!((90.0..=110.0).contains(&measured), "cond {measured}");

        assert_eq!(random_riesz(16, 100.0, 7).unwrap(), g);
        assert_ne!(random_riesz(16, 100.0, 8).unwrap(), g);
        assert!(random_riesz(1, 10.0, 0).is_err());
        assert!(random_riesz(4, 0.5, 0).is_err());
    }

    #[test]
    fn corrupted_psi_is_detected() {
        let g = random_riesz(8, 10.0, 3).unwrap();
        let pair = riesz_pair(&g).unwrap();
        let delta = 1e-3;
        let bumped = pair.psi_k(0) + pair.psi_k(1) * c(delta);
        let bad = pair.with_psi_column(0, &bumped).unwrap();
        let report = check_biorthogonality(&bad, 1e-10);
        assert!(!report.passed);
        assert!(report.worst() >= delta * 0.999);
        assert!(report.witness.is_some());
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(BiorthogonalPair::new(linalg::identity(2), linalg::identity(3)).is_err());
    }
}
