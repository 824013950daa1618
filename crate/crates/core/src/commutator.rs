//! Weak commutator evaluation, the nonlinear weak commutation identity
//! `⟨Tξ, S†η⟩ − ⟨Sξ, T†η⟩ = ⟨ξ, Xη⟩`, its iterated form, and the μ-chain of
//! eigenvectors grown from a vacuum.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ladder::{number_operators, LadderSystem};
use crate::linalg::{self, c, CVector, ZERO};
use crate::report::CheckReport;
use crate::space::{alphas_from_epsilon, EpsilonSequence};

/// Seed for the random combinations mixed into the iterated-identity test set.
const ITERATED_SEED: u64 = 0x33;
const ITERATED_RANDOM_VECTORS: usize = 4;

/// `μ_k` and partial sums `M_k = μ_0 + … + μ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuChain {
    pub mu: Vec<Complex64>,
    pub partial_sums: Vec<Complex64>,
}

impl MuChain {
    pub fn new(mu: Vec<Complex64>) -> Self {
        let partial_sums = mu
            .iter()
            .scan(ZERO, |acc, &m| {
                *acc += m;
                Some(*acc)
            })
            .collect();
        Self { mu, partial_sums }
    }
}

/// `⟨Tξ, S*η⟩ − ⟨Sξ, T*η⟩`.
pub fn weak_commutator(sys: &LadderSystem, xi: &CVector, eta: &CVector) -> Result<Complex64> {
    sys.t.check_dim(xi)?;
    sys.t.check_dim(eta)?;
    let s_adj_eta = sys.s.matrix.adjoint() * eta;
    let t_adj_eta = sys.t.matrix.adjoint() * eta;
    Ok(linalg::inner(&sys.t.apply(xi), &s_adj_eta) - linalg::inner(&sys.s.apply(xi), &t_adj_eta))
}

/// `Σ_{l} (ε_{l+1} − ε_l) c_l d̄_l` over the common prefix of `c` and `d`.
pub fn f1_sum(eps: &EpsilonSequence, c: &[Complex64], d: &[Complex64]) -> Result<Complex64> {
    let m = c.len().min(d.len());
    if m > eps.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{m} coefficients exceed the truncation dimension {}",
            eps.dim()
        )));
    }
    let alpha = alphas_from_epsilon(eps);
    Ok((0..m).map(|l| c[l] * d[l].conj() * alpha.values()[l]).sum())
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize, support: usize) -> CVector {
    CVector::from_fn(n, |i, _| {
        if i <= support {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        } else {
            ZERO
        }
    })
}

fn guarded_pairs(sys: &LadderSystem) -> Vec<(usize, usize)> {
    let top = sys.space.guarded_max();
    let mut out = Vec::new();
    for i in 0..=top {
        for j in i.saturating_sub(1)..=(i + 1).min(top) {
            out.push((i, j));
        }
    }
    out
}

/// Evaluates the weak identity against `⟨ξ, Xη⟩` and the coefficient form
/// `Σ α_l c_l d̄_l` for basis pairs `(φ_i, ψ_j)`, `|i − j| ≤ 1`, followed by
/// `trials` seeded random pairs `ξ = Σ c_l φ_l`, `η = Σ d_l ψ_l` supported on
/// the guarded band. Residuals are divided by `1 + ‖ξ‖‖η‖‖X‖`. The top-mode
/// defect is recorded as a diagnostic only.
pub fn check_nonlinear_cr2(sys: &LadderSystem, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    if sys.space.guard() < 1 {
        return Err(Error::GuardTooSmall {
            guard: sys.space.guard(),
            required: 1,
        });
    }
    let n = sys.dim();
    let top = sys.space.guarded_max();
    let eps = sys.epsilon_or_partial_sums();
    let x_norm = sys.x.norm();
    let mut report = CheckReport::new("nonlinear_cr2", tol);
    report.context.n = Some(n);
    report.context.guard = Some(sys.space.guard());
    report.context.seed = Some(seed);

    let mut evaluate = |c: &CVector, d: &CVector, witness: &dyn Fn() -> String| -> Result<()> {
        let xi = sys.pair.from_phi_coeffs(c);
        let eta = sys.pair.from_psi_coeffs(d);
        let lhs = weak_commutator(sys, &xi, &eta)?;
        let scale = 1.0 + xi.norm() * eta.norm() * x_norm;
        let rhs = linalg::inner(&xi, &sys.x.apply(&eta));
        report.record_with_witness("weak_form", (lhs - rhs).norm() / scale, witness);
        let coeff = f1_sum(&eps, c.as_slice(), d.as_slice())?;
        report.record_with_witness("coefficient_form", (lhs - coeff).norm() / scale, witness);
        Ok(())
    };

    for (i, j) in guarded_pairs(sys) {
        let ci = linalg::basis_vector(n, i);
        let dj = linalg::basis_vector(n, j);
        evaluate(&ci, &dj, &|| format!("xi = phi_{i}, eta = psi_{j}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let cv = random_coeffs(&mut rng, n, top);
        let dv = random_coeffs(&mut rng, n, top);
        evaluate(&cv, &dv, &|| format!("random trial {trial} (seed {seed})"))?;
    }

    let xi = sys.pair.phi_k(n - 1);
    let eta = sys.pair.psi_k(n - 1);
    let loss = (weak_commutator(sys, &xi, &eta)? - linalg::inner(&xi, &sys.x.apply(&eta))).norm();
    report.diagnostic("top_mode_truncation_loss", loss);
    Ok(report)
}

/// The canonical identity `⟨Tξ, S†η⟩ − ⟨Sξ, T†η⟩ = ⟨ξ, η⟩`, i.e. the weak
/// commutator compared with the plain inner product instead of `⟨ξ, Xη⟩`.
/// Holds on the guarded band exactly when `X = I`.
pub fn check_canonical_cr2(sys: &LadderSystem, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    if sys.space.guard() < 1 {
        return Err(Error::GuardTooSmall {
            guard: sys.space.guard(),
            required: 1,
        });
    }
    let n = sys.dim();
    let top = sys.space.guarded_max();
    let mut report = CheckReport::new("canonical_cr2", tol);
    report.context.n = Some(n);
    report.context.guard = Some(sys.space.guard());
    report.context.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let xi = sys.pair.from_phi_coeffs(&random_coeffs(&mut rng, n, top));
        let eta = sys.pair.from_psi_coeffs(&random_coeffs(&mut rng, n, top));
        let lhs = weak_commutator(sys, &xi, &eta)?;
        let r = (lhs - linalg::inner(&xi, &eta)).norm() / (1.0 + xi.norm() * eta.norm());
        report.record_with_witness("identity_form", r, || format!("random trial {trial} (seed {seed})"));
    }
    Ok(report)
}

/// Checks `S Tᵏξ − Tᵏ Sξ = Σ_{l<k} T^{k−1−l} X* Tˡ ξ` for `k = 1..=k_max`
/// on the guarded basis vectors `φ_j` plus a few seeded random guarded
/// combinations. When `X = I` the right side is also compared with
/// `k T^{k−1}ξ`; when `[X*, T] = 0` with `k X* T^{k−1}ξ`.
pub fn iterated_identity_check(sys: &LadderSystem, k_max: usize, tol: f64) -> Result<CheckReport> {
    let required = k_max + 1;
    if sys.space.guard() < required {
        return Err(Error::GuardTooSmall {
            guard: sys.space.guard(),
            required,
        });
    }
    let n = sys.dim();
    let top = sys.space.guarded_max();
    let xa = sys.x_adjoint();
    let t = &sys.t;
    let s = &sys.s;

    let identity_x = linalg::spectral_norm(&(&sys.x.matrix - linalg::identity(n))) <= 1e-12;
    let commutator = &xa.matrix * &t.matrix - &t.matrix * &xa.matrix;
    let commuting = linalg::spectral_norm(&commutator) <= 1e-12 * (1.0 + xa.norm() * t.norm());

    let mut report = CheckReport::new("iterated_identity", tol);
    report.context.n = Some(n);
    report.context.guard = Some(sys.space.guard());

    let mut vectors: Vec<(String, CVector)> = (0..=top).map(|j| (format!("phi_{j}"), sys.pair.phi_k(j))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ITERATED_SEED);
    for r in 0..ITERATED_RANDOM_VECTORS {
        vectors.push((format!("random_{r}"), sys.pair.from_phi_coeffs(&random_coeffs(&mut rng, n, top))));
    }

    for (label, xi) in &vectors {
        // powers[l] = Tˡ ξ
        let mut powers = vec![xi.clone()];
        for l in 0..k_max {
            let next = t.apply(&powers[l]);
            powers.push(next);
        }
        let s_xi = s.apply(xi);
        let mut t_pow_s_xi = s_xi.clone();
        // xa_terms[l] = X* Tˡ ξ
        let xa_terms: Vec<CVector> = powers.iter().map(|p| xa.apply(p)).collect();
        for k in 1..=k_max {
            t_pow_s_xi = t.apply(&t_pow_s_xi);
            let s_tk = s.apply(&powers[k]);
            let lhs = &s_tk - &t_pow_s_xi;
            let mut rhs = CVector::zeros(n);
            for (l, xa_l) in xa_terms.iter().enumerate().take(k) {
                let mut term = xa_l.clone();
                for _ in 0..(k - 1 - l) {
                    term = t.apply(&term);
                }
                rhs += term;
            }
            let scale = 1.0 + s_tk.norm().max(t_pow_s_xi.norm()).max(rhs.norm());
            let witness = || format!("xi = {label}, k = {k}");
            report.record_with_witness("both_sides", (&lhs - &rhs).norm() / scale, witness);
            if identity_x {
                let special = &powers[k - 1] * c(k as f64);
                report.record_with_witness("identity_form", (&lhs - &special).norm() / scale, witness);
            }
            if commuting {
                let special = &xa_terms[k - 1] * c(k as f64);
                report.record_with_witness("commuting_form", (&lhs - &special).norm() / scale, witness);
            }
        }
    }
    Ok(report)
}

/// Grows `Tᵏφ_0` from the vacuum and reads off `μ_k` with
/// `X*(Tᵏφ_0) = μ_k Tᵏφ_0`. Fails with a hypothesis violation if `Sφ_0 ≠ 0`
/// or some `Tᵏφ_0` is not an eigenvector of `X*`. The eigenvector test is
/// relative, at `1e-8 · κ²` with `κ = ‖Φ‖‖Ψ‖`: round-off on high modes is
/// amplified by every application of a non-normal `T`.
pub fn mu_chain(sys: &LadderSystem, k_max: usize) -> Result<MuChain> {
    Ok(grow_chain(sys, k_max)?.0)
}

fn grow_chain(sys: &LadderSystem, k_max: usize) -> Result<(MuChain, Vec<CVector>)> {
    let kappa = linalg::spectral_norm(sys.pair.phi()) * linalg::spectral_norm(sys.pair.psi());
    let hypothesis_tol = 1e-8 * kappa * kappa;
    if k_max + 1 > sys.space.guarded_max() {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} needs guarded indices up to {}, band ends at {}",
            k_max + 1,
            sys.space.guarded_max()
        )));
    }
    let phi0 = sys.pair.phi_k(0);
    let vac = sys.s.apply(&phi0).norm() / (phi0.norm() * (1.0 + sys.s.norm()));
    if vac > hypothesis_tol {
        return Err(Error::HypothesisViolation(format!(
            "S does not annihilate phi_0 (relative {vac:.3e})"
        )));
    }
    let xa = sys.x_adjoint();
    let mut chain = vec![phi0];
    for k in 0..=k_max {
        let next = sys.t.apply(&chain[k]);
        chain.push(next);
    }
    let mut mu = Vec::with_capacity(k_max + 1);
    for (k, v) in chain.iter().take(k_max + 1).enumerate() {
        let xv = xa.apply(v);
        let m = linalg::inner(&xv, v) / v.norm_squared();
        let r = (&xv - v * m).norm() / (v.norm() * (1.0 + m.norm()));
        if r > hypothesis_tol {
            return Err(Error::HypothesisViolation(format!(
                "T^{k} phi_0 is not an eigenvector of X* (relative defect {r:.3e})"
            )));
        }
        mu.push(m);
    }
    Ok((MuChain::new(mu), chain))
}

/// For `k ≤ k_max`: `(S T)(Tᵏφ_0) = M_k Tᵏφ_0` and
/// `(T S)(T^{k+1}φ_0) = M_k T^{k+1}φ_0`, residuals relative to `‖v‖·max(1, |M_k|)`.
/// When the system carries an ε-sequence the telescoping `M_k = ε_{k+1}` is
/// checked too.
pub fn mu_chain_check(sys: &LadderSystem, k_max: usize, tol: f64) -> Result<CheckReport> {
    let (chain, vectors) = grow_chain(sys, k_max)?;
    let ops = number_operators(sys);
    let mut report = CheckReport::new("mu_chain", tol);
    report.context.n = Some(sys.dim());
    report.context.guard = Some(sys.space.guard());
    for k in 0..=k_max {
        let m = chain.partial_sums[k];
        let v = &vectors[k];
        let scale = m.norm().max(1.0);
        let r = (ops.right.apply(v) - v * m).norm() / (v.norm() * scale);
        report.record_with_witness("right_chain", r, || format!("k = {k}"));
        let w = &vectors[k + 1];
        let r = (ops.left.apply(w) - w * m).norm() / (w.norm() * scale);
        report.record_with_witness("left_chain", r, || format!("k = {k}"));
        if let Some(eps) = &sys.epsilon {
            let target = eps.get(k + 1);
            let r = (m - c(target)).norm() / target.max(1.0);
            report.record_with_witness("telescoping", r, || format!("k = {k}"));
        }
    }
    report.diagnostic("m_last", chain.partial_sums[k_max].re);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::pseudo_boson_ladders;
    use crate::space::{make_epsilon, BiorthogonalPair, EpsilonKind};

    fn boson(n: usize, guard: usize) -> LadderSystem {
        let eps = make_epsilon(EpsilonKind::Linear, n, None).unwrap();
        pseudo_boson_ladders(&eps, &BiorthogonalPair::identity(n), guard).unwrap()
    }

    #[test]
    fn weak_commutator_on_vacuum_is_alpha0() {
        let eps = make_epsilon(EpsilonKind::Quadratic, 6, None).unwrap();
        let sys = pseudo_boson_ladders(&eps, &BiorthogonalPair::identity(6), 1).unwrap();
        let w = weak_commutator(&sys, &sys.pair.phi_k(0), &sys.pair.psi_k(0)).unwrap();
        assert!((w - c(1.0)).norm() < 1e-14);
        let zero = CVector::zeros(6);
        assert_eq!(weak_commutator(&sys, &zero, &sys.pair.psi_k(0)).unwrap(), ZERO);
        assert!(weak_commutator(&sys, &CVector::zeros(5), &zero).is_err());
    }

    #[test]
    fn f1_hand_case() {
        let eps = EpsilonSequence::new(vec![0.0, 1.0, 3.0]).unwrap();
        let ones = [c(1.0), c(1.0)];
        assert_eq!(f1_sum(&eps, &ones, &ones).unwrap(), c(3.0));
        assert_eq!(f1_sum(&eps, &[ZERO, ZERO], &ones).unwrap(), ZERO);
        assert!(f1_sum(&eps, &[ZERO; 3], &[ZERO; 3]).is_err());
    }

    #[test]
    fn f1_linear_is_plain_inner_product() {
        let eps = make_epsilon(EpsilonKind::Linear, 4, None).unwrap();
        let cs = [Complex64::new(1.0, 2.0), c(-0.5), Complex64::new(0.0, 1.0)];
        let ds = [c(2.0), Complex64::new(1.0, -1.0), c(3.0)];
        let plain: Complex64 = cs.iter().zip(&ds).map(|(a, b)| a * b.conj()).sum();
        assert!((f1_sum(&eps, &cs, &ds).unwrap() - plain).norm() < 1e-15);
    }

    #[test]
    fn mu_chain_linear_partial_sums() {
        let sys = boson(12, 2);
        let chain = mu_chain(&sys, 5).unwrap();
        for (k, m) in chain.partial_sums.iter().enumerate() {
            assert!((m - c((k + 1) as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn iterated_identity_needs_guard() {
        let sys = boson(12, 2);
        assert!(matches!(
            iterated_identity_check(&sys, 2, 1e-10),
            Err(Error::GuardTooSmall { required: 3, .. })
        ));
    }

    #[test]
    fn iterated_identity_hand_value() {
        // a (a†)² e₀ − (a†)² a e₀ = 2 a† e₀
        let sys = boson(8, 3);
        let e0 = linalg::basis_vector(8, 0);
        let t2 = sys.t.apply(&sys.t.apply(&e0));
        let lhs = sys.s.apply(&t2);
        assert!((lhs - sys.t.apply(&e0) * c(2.0)).norm() < 1e-14);
        let report = iterated_identity_check(&sys, 2, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.residual("identity_form").is_some());
        assert!(report.residual("commuting_form").is_some());
    }

    #[test]
    fn mu_chain_rejects_missing_vacuum() {
        let sys = boson(10, 2);
        let t = sys.t.clone();
        let bad = sys.with_s(t).unwrap();
        assert!(matches!(mu_chain(&bad, 3), Err(Error::HypothesisViolation(_))));
    }
}
