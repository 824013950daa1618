//! Generalized ladder operators built from ε-sequences or from γ-data,
//! the number-like operators, γ-factorials, and the ladder-equivalence
//! checks.
//!
//! In φ-coordinates every operator here is a weighted shift: `T` raises
//! (`Tφ_n = γ_n φ_{n+1}`), `S` lowers (`Sφ_n = γ̃̄_{n−1} φ_{n−1}`). The
//! matrices are `Φ C Ψ*` with `C` the coefficient shift, so `T` loses its
//! action on the top vector `φ_{N−1}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, Operator, ZERO};
use crate::rankone::{adjoint_x, build_x};
use crate::report::CheckReport;
use crate::space::{alphas_from_epsilon, AlphaSequence, BiorthogonalPair, EpsilonSequence, TruncatedSpace};

/// Relative gap below which two α values count as equal.
pub const DISTINCT_ALPHA_GAP: f64 = 1e-9;

/// Ladder coefficients `γ_n`, `γ̃_n` for `n = 0..N`.
///
/// On an `N`-dimensional space entries `0..N-1` define the action of `T` and
/// `S`; the last entry never acts (the top raising step is truncated) but fixes
/// `α_{N−1} = γ_{N−1}γ̃̄_{N−1} − γ_{N−2}γ̃̄_{N−2}`, the same role `ε_N` plays for
/// [`pseudo_boson_ladders`].
#[derive(Debug, Clone, PartialEq)]
pub struct GammaData {
    pub gamma: Vec<Complex64>,
    pub gamma_tilde: Vec<Complex64>,
}

impl GammaData {
    pub fn new(gamma: Vec<Complex64>, gamma_tilde: Vec<Complex64>) -> Result<Self> {
        if gamma.len() != gamma_tilde.len() {
            return Err(Error::DimensionMismatch(format!(
                "gamma has {} entries, gamma_tilde has {}",
                gamma.len(),
                gamma_tilde.len()
            )));
        }
        if gamma
            .iter()
            .chain(&gamma_tilde)
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument("gamma data must be finite".into()));
        }
        Ok(Self { gamma, gamma_tilde })
    }

    pub fn from_real(gamma: &[f64], gamma_tilde: &[f64]) -> Result<Self> {
        Self::new(
            gamma.iter().map(|&v| c(v)).collect(),
            gamma_tilde.iter().map(|&v| c(v)).collect(),
        )
    }

    /// `γ_n = γ̃_n = √ε_{n+1}`, the pseudo-boson coefficients.
    pub fn pseudo_boson(eps: &EpsilonSequence) -> Self {
        let g: Vec<_> = eps.values()[1..].iter().map(|&e| c(e.sqrt())).collect();
        Self {
            gamma: g.clone(),
            gamma_tilde: g,
        }
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `β_n = γ̄_{n−1}`, `β_0 = 0`.
    pub fn beta(&self, n: usize) -> Complex64 {
        if n == 0 {
            ZERO
        } else {
            self.gamma[n - 1].conj()
        }
    }

    /// `β̃_n = conj(γ̃_{n−1})`, `β̃_0 = 0`.
    pub fn beta_tilde(&self, n: usize) -> Complex64 {
        if n == 0 {
            ZERO
        } else {
            self.gamma_tilde[n - 1].conj()
        }
    }

    /// `γ_n γ̃̄_n`, with the convention `γ_{−1} = γ̃_{−1} = 0` for `n = −1`.
    pub fn product(&self, n: Option<usize>) -> Complex64 {
        n.map_or(ZERO, |n| self.gamma[n] * self.gamma_tilde[n].conj())
    }

    /// `γ_n! = γ_0 γ_1 ⋯ γ_n`.
    pub fn gamma_factorial(&self, n: usize) -> Result<Complex64> {
        gamma_factorial(&self.gamma, n)
    }

    /// `γ̃_n! = γ̃_0 γ̃_1 ⋯ γ̃_n`.
    pub fn gamma_tilde_factorial(&self, n: usize) -> Result<Complex64> {
        gamma_factorial(&self.gamma_tilde, n)
    }
}

/// Product `values[0] ⋯ values[n]`.
pub fn gamma_factorial(values: &[Complex64], n: usize) -> Result<Complex64> {
    if n >= values.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: values.len(),
        });
    }
    Ok(values[..=n].iter().product())
}

/// `α_n = γ_n γ̃̄_n − γ_{n−1} γ̃̄_{n−1}`; each value must be real and positive.
pub fn alphas_from_gammas(g: &GammaData) -> Result<AlphaSequence> {
    let mut out = Vec::with_capacity(g.len());
    for n in 0..g.len() {
        let cur = g.product(Some(n));
        let prev = g.product(n.checked_sub(1));
        let a = cur - prev;
        let scale = 1.0 + cur.norm() + prev.norm();
        if a.im.abs() > 1e-12 * scale {
            return Err(Error::InvalidAlpha {
                index: n,
                reason: format!("alpha = {a} is not real"),
            });
        }
        if !(a.re > 0.0) {
            return Err(Error::InvalidAlpha {
                index: n,
                reason: format!("alpha = {} is not positive", a.re),
            });
        }
        out.push(a.re);
    }
    AlphaSequence::new(out)
}

/// The bundle `(S, T, X)` with its basis pair and coefficients.
#[derive(Debug, Clone)]
pub struct LadderSystem {
    pub s: Operator,
    pub t: Operator,
    pub x: Operator,
    pub pair: BiorthogonalPair,
    pub alpha: AlphaSequence,
    pub gammas: GammaData,
    pub space: TruncatedSpace,
    pub epsilon: Option<EpsilonSequence>,
}

impl LadderSystem {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `X* = Φ diag(α) Ψ*`.
    pub fn x_adjoint(&self) -> Operator {
        adjoint_x(&self.pair, &self.alpha).expect("alpha length fixed at construction")
    }

    /// Replaces `T` (defect injection and hand-built systems).
    pub fn with_t(mut self, t: Operator) -> Result<Self> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch("replacement T has wrong dimension".into()));
        }
        self.t = t;
        Ok(self)
    }

    pub fn with_s(mut self, s: Operator) -> Result<Self> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch("replacement S has wrong dimension".into()));
        }
        self.s = s;
        Ok(self)
    }

    /// Epsilon values, reconstructed from α by partial sums when the system
    /// was not built from an ε-sequence.
    pub fn epsilon_or_partial_sums(&self) -> EpsilonSequence {
        self.epsilon
            .clone()
            .unwrap_or_else(|| EpsilonSequence::from_alphas(&self.alpha))
    }
}

fn shift_operator(pair: &BiorthogonalPair, coeffs: &CMatrix, label: &str) -> Result<Operator> {
    Operator::new(label, pair.phi() * coeffs * pair.psi().adjoint())
}

/// `S = a`, `T = b` with `aφ_k = √ε_k φ_{k−1}` and `bφ_k = √ε_{k+1} φ_{k+1}`;
/// consequently `a*ψ_k = √ε_{k+1} ψ_{k+1}` and `b*ψ_k = √ε_k ψ_{k−1}`.
pub fn pseudo_boson_ladders(eps: &EpsilonSequence, pair: &BiorthogonalPair, guard: usize) -> Result<LadderSystem> {
    let n = pair.dim();
    if eps.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "epsilon covers dimension {}, pair has dimension {n}",
            eps.dim()
        )));
    }
    let space = TruncatedSpace::new(n, guard)?;
    let mut lower = CMatrix::zeros(n, n);
    let mut raise = CMatrix::zeros(n, n);
    for k in 1..n {
        lower[(k - 1, k)] = c(eps.get(k).sqrt());
        raise[(k, k - 1)] = c(eps.get(k).sqrt());
    }
    let alpha = alphas_from_epsilon(eps);
    Ok(LadderSystem {
        s: shift_operator(pair, &lower, "a")?,
        t: shift_operator(pair, &raise, "b")?,
        x: build_x(pair, &alpha)?,
        pair: pair.clone(),
        gammas: GammaData::pseudo_boson(eps),
        alpha,
        space,
        epsilon: Some(eps.clone()),
    })
}

/// `Tφ_n = γ_n φ_{n+1}`, `Sφ_n = γ̃̄_{n−1} φ_{n−1}`, `Sφ_0 = 0`, with `X`
/// weighted by [`alphas_from_gammas`].
pub fn ladders_from_gammas(g: &GammaData, pair: &BiorthogonalPair, guard: usize) -> Result<LadderSystem> {
    let n = pair.dim();
    if g.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "gamma data has {} entries, pair has dimension {n}",
            g.len()
        )));
    }
    let space = TruncatedSpace::new(n, guard)?;
    let alpha = alphas_from_gammas(g)?;
    let mut lower = CMatrix::zeros(n, n);
    let mut raise = CMatrix::zeros(n, n);
    for k in 1..n {
        raise[(k, k - 1)] = g.gamma[k - 1];
        lower[(k - 1, k)] = g.gamma_tilde[k - 1].conj();
    }
    Ok(LadderSystem {
        s: shift_operator(pair, &lower, "S")?,
        t: shift_operator(pair, &raise, "T")?,
        x: build_x(pair, &alpha)?,
        pair: pair.clone(),
        alpha,
        gammas: g.clone(),
        space,
        epsilon: None,
    })
}

/// `N_l = TS`, `N_r = ST`, `N_l^# = S*T*`, `N_r^# = T*S*`.
///
/// At finite dimension `S†* = S`, so the formal `T S†*` is the plain product.
#[derive(Debug, Clone)]
pub struct NumberOperators {
    pub left: Operator,
    pub right: Operator,
    pub left_sharp: Operator,
    pub right_sharp: Operator,
}

pub fn number_operators(sys: &LadderSystem) -> NumberOperators {
    let s_adj = sys.s.adjoint();
    let t_adj = sys.t.adjoint();
    NumberOperators {
        left: sys.t.compose(&sys.s),
        right: sys.s.compose(&sys.t),
        left_sharp: s_adj.compose(&t_adj),
        right_sharp: t_adj.compose(&s_adj),
    }
}

/// Eigen-relations of the number operators on the guarded band:
/// `N_lφ_n = γ_{n−1}γ̃̄_{n−1}φ_n`, `N_rφ_n = γ_nγ̃̄_nφ_n`,
/// `N_l^#ψ_n = γ̄_{n−1}γ̃_{n−1}ψ_n`, `N_r^#ψ_n = γ̄_nγ̃_nψ_n`.
/// Residuals are `‖·‖/(‖φ_n‖ max(1, |λ|))` (resp. `‖ψ_n‖`), `λ` the eigenvalue.
pub fn number_operator_check(sys: &LadderSystem, tol: f64) -> Result<CheckReport> {
    if sys.space.guard() < 1 {
        return Err(Error::GuardTooSmall {
            guard: sys.space.guard(),
            required: 1,
        });
    }
    let ops = number_operators(sys);
    let g = &sys.gammas;
    let mut report = CheckReport::new("number_operators", tol);
    report.context.n = Some(sys.dim());
    report.context.guard = Some(sys.space.guard());
    for n in sys.space.guarded() {
        let phi = sys.pair.phi_k(n);
        let psi = sys.pair.psi_k(n);
        let prev = g.product(n.checked_sub(1));
        let cur = g.product(Some(n));
        let rel = |v: CVector, w: &CVector, lambda: Complex64| v.norm() / (w.norm() * lambda.norm().max(1.0));

        let r = rel(ops.left.apply(&phi) - &phi * prev, &phi, prev);
        report.record_with_witness("n_left_phi", r, || format!("n = {n}"));
        let r = rel(ops.right.apply(&phi) - &phi * cur, &phi, cur);
        report.record_with_witness("n_right_phi", r, || format!("n = {n}"));
        let r = rel(ops.left_sharp.apply(&psi) - &psi * prev.conj(), &psi, prev);
        report.record_with_witness("n_left_sharp_psi", r, || format!("n = {n}"));
        let r = rel(ops.right_sharp.apply(&psi) - &psi * cur.conj(), &psi, cur);
        report.record_with_witness("n_right_sharp_psi", r, || format!("n = {n}"));
    }
    Ok(report)
}

/// Result of rebuilding a basis vector from the vacuum.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub vector: CVector,
    /// `‖vector − target‖ / ‖target‖`.
    pub residual: f64,
}

fn accumulated(values: &[Complex64], n: usize) -> Result<Complex64> {
    let mut acc = linalg::ONE;
    for (k, &v) in values[..n].iter().enumerate() {
        if v.norm() == 0.0 {
            return Err(Error::ZeroCoefficient(k));
        }
        acc *= v;
    }
    Ok(acc)
}

fn check_reconstruct_index(sys: &LadderSystem, n: usize) -> Result<()> {
    if n > sys.space.guarded_max() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: sys.space.guarded_max() + 1,
        });
    }
    Ok(())
}

/// `φ_n = Tⁿφ_0 / (γ_0 ⋯ γ_{n−1})`: the product of the γ's actually
/// accumulated along the ladder, i.e. `γ_{n−1}!` in factorial notation.
pub fn reconstruct_phi(sys: &LadderSystem, n: usize) -> Result<Reconstruction> {
    check_reconstruct_index(sys, n)?;
    let norm = accumulated(&sys.gammas.gamma, n)?;
    let mut v = sys.pair.phi_k(0);
    for _ in 0..n {
        v = sys.t.apply(&v);
    }
    let v = v / norm;
    let target = sys.pair.phi_k(n);
    let residual = (&v - &target).norm() / target.norm();
    Ok(Reconstruction { vector: v, residual })
}

/// `ψ_n = (S*)ⁿψ_0 / (γ̃_0 ⋯ γ̃_{n−1})`.
pub fn reconstruct_psi(sys: &LadderSystem, n: usize) -> Result<Reconstruction> {
    check_reconstruct_index(sys, n)?;
    let norm = accumulated(&sys.gammas.gamma_tilde, n)?;
    let s_adj = sys.s.adjoint();
    let mut v = sys.pair.psi_k(0);
    for _ in 0..n {
        v = s_adj.apply(&v);
    }
    let v = v / norm;
    let target = sys.pair.psi_k(n);
    let residual = (&v - &target).norm() / target.norm();
    Ok(Reconstruction { vector: v, residual })
}

/// Worst reconstruction residual over the guarded band, both families.
pub fn reconstruction_check(sys: &LadderSystem, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("reconstruct_basis", tol);
    report.context.n = Some(sys.dim());
    report.context.guard = Some(sys.space.guard());
    for n in sys.space.guarded() {
        let r = reconstruct_phi(sys, n)?.residual;
        report.record_with_witness("phi_from_vacuum", r, || format!("n = {n}"));
        let r = reconstruct_psi(sys, n)?.residual;
        report.record_with_witness("psi_from_vacuum", r, || format!("n = {n}"));
    }
    Ok(report)
}

/// Fails with a hypothesis violation when two α's are within
/// [`DISTINCT_ALPHA_GAP`] relative of each other.
pub fn require_distinct_alphas(alpha: &AlphaSequence) -> Result<()> {
    let mut sorted: Vec<(usize, f64)> = alpha.values().iter().copied().enumerate().collect();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let scale = alpha.max().max(f64::MIN_POSITIVE);
    for w in sorted.windows(2) {
        if (w[1].1 - w[0].1) < DISTINCT_ALPHA_GAP * scale {
            return Err(Error::HypothesisViolation(format!(
                "alpha_{} = {} and alpha_{} = {} are not distinct",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }
    Ok(())
}

fn rel(diff: &CVector, operands: &[f64]) -> f64 {
    diff.norm() / (1.0 + operands.iter().copied().fold(0.0, f64::max))
}

/// Checks on the guarded band the three mutually equivalent statements for
/// `T` (`X*Tφ_n = α_{n+1}Tφ_n`; `Tφ_n = γ_nφ_{n+1}`; `T*ψ_n = γ̄_{n−1}ψ_{n−1}`),
/// their mirror for `S` (`X S*ψ_n = α_{n+1}S*ψ_n`; `S*ψ_n = γ̃_nψ_{n+1}`;
/// `Sφ_n = γ̃̄_{n−1}φ_{n−1}`), the vacuum conditions, and the `S ↔ T`
/// biconditional: with `γ_n` read off `T`, the induced `γ̃̄_n = (α_0+…+α_n)/γ_n`
/// must reproduce the action of `S`, and vice versa.
///
/// The coefficients `γ_n`, `γ̃_n` are extracted from the operators, not taken
/// from `sys.gammas`. Residuals are `‖diff‖ / (1 + max operand norm)`.
pub fn ladder_equivalence_check(sys: &LadderSystem, tol: f64) -> Result<CheckReport> {
    require_distinct_alphas(&sys.alpha)?;
    if sys.space.guard() < 1 {
        return Err(Error::GuardTooSmall {
            guard: sys.space.guard(),
            required: 1,
        });
    }
    let pair = &sys.pair;
    let alpha = sys.alpha.values();
    let x = &sys.x;
    let xa = sys.x_adjoint();
    let s_adj = sys.s.adjoint();
    let t_adj = sys.t.adjoint();
    let top = sys.space.guarded_max();

    let mut report = CheckReport::new("ladder_equivalence", tol);
    report.context.n = Some(sys.dim());
    report.context.guard = Some(sys.space.guard());

    let phi0 = pair.phi_k(0);
    let psi0 = pair.psi_k(0);
    report.record("vacuum_s_phi0", rel(&sys.s.apply(&phi0), &[phi0.norm()]));
    report.record("vacuum_tadj_psi0", rel(&t_adj.apply(&psi0), &[psi0.norm()]));

    // γ_n from ⟨Tφ_n, ψ_{n+1}⟩, γ̃_n from ⟨S*ψ_n, φ_{n+1}⟩.
    let mut gamma = Vec::with_capacity(top + 1);
    let mut gamma_tilde = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let t_phi = sys.t.apply(&pair.phi_k(n));
        let s_psi = s_adj.apply(&pair.psi_k(n));
        gamma.push(linalg::inner(&t_phi, &pair.psi_k(n + 1)));
        gamma_tilde.push(linalg::inner(&s_psi, &pair.phi_k(n + 1)));
    }
    let prev = |v: &[Complex64], n: usize| if n == 0 { ZERO } else { v[n - 1] };

    for n in 0..=top {
        let phi = pair.phi_k(n);
        let psi = pair.psi_k(n);
        let phi_next = pair.phi_k(n + 1);
        let psi_next = pair.psi_k(n + 1);
        let a_next = c(alpha[n + 1]);

        let t_phi = sys.t.apply(&phi);
        let xa_t_phi = xa.apply(&t_phi);
        let d = &xa_t_phi - &t_phi * a_next;
        let r = rel(&d, &[xa_t_phi.norm(), alpha[n + 1] * t_phi.norm()]);
        report.record_with_witness("t_xstar_eigen", r, || format!("n = {n}"));

        let d = &t_phi - &phi_next * gamma[n];
        report.record_with_witness("t_raises_phi", rel(&d, &[t_phi.norm()]), || format!("n = {n}"));

        let t_adj_psi = t_adj.apply(&psi);
        let lower = if n == 0 { CVector::zeros(sys.dim()) } else { pair.psi_k(n - 1) };
        let d = &t_adj_psi - &lower * prev(&gamma, n).conj();
        report.record_with_witness("tadj_lowers_psi", rel(&d, &[t_adj_psi.norm()]), || format!("n = {n}"));

        let s_psi = s_adj.apply(&psi);
        let x_s_psi = x.apply(&s_psi);
        let d = &x_s_psi - &s_psi * a_next;
        let r = rel(&d, &[x_s_psi.norm(), alpha[n + 1] * s_psi.norm()]);
        report.record_with_witness("sadj_x_eigen", r, || format!("n = {n}"));

        let d = &s_psi - &psi_next * gamma_tilde[n];
        report.record_with_witness("sadj_raises_psi", rel(&d, &[s_psi.norm()]), || format!("n = {n}"));

        let s_phi = sys.s.apply(&phi);
        let lower = if n == 0 { CVector::zeros(sys.dim()) } else { pair.phi_k(n - 1) };
        let d = &s_phi - &lower * prev(&gamma_tilde, n).conj();
        report.record_with_witness("s_lowers_phi", rel(&d, &[s_phi.norm()]), || format!("n = {n}"));
    }

    // S ↔ T: γ_n γ̃̄_n = α_0 + … + α_n.
    let mut cumulative = 0.0;
    for n in 0..top {
        cumulative += alpha[n];
        let phi = pair.phi_k(n);
        let phi_next = pair.phi_k(n + 1);

        if gamma[n].norm() == 0.0 {
            return Err(Error::ZeroCoefficient(n));
        }
        let induced_tilde_conj = c(cumulative) / gamma[n];
        let s_phi_next = sys.s.apply(&phi_next);
        let d = &s_phi_next - &phi * induced_tilde_conj;
        report.record_with_witness("t_implies_s", rel(&d, &[s_phi_next.norm()]), || format!("n = {n}"));

        let tilde_conj = gamma_tilde[n].conj();
        if tilde_conj.norm() == 0.0 {
            return Err(Error::ZeroCoefficient(n));
        }
        let induced_gamma = c(cumulative) / tilde_conj;
        let t_phi = sys.t.apply(&phi);
        let d = &t_phi - &phi_next * induced_gamma;
        report.record_with_witness("s_implies_t", rel(&d, &[t_phi.norm()]), || format!("n = {n}"));
    }
    Ok(report)
}

/// `α_0 = γ_0γ̃̄_0` and `α_n = γ_nγ̃̄_n − Σ_{k<n} α_k`, together with the
/// two-term form `α_n = γ_nγ̃̄_n − γ_{n−1}γ̃̄_{n−1}`. Residuals are
/// `|diff| / max(1, |γ_nγ̃̄_n|)`.
pub fn alpha_recursion_check(g: &GammaData, alpha: &AlphaSequence, tol: f64) -> Result<CheckReport> {
    if g.len() != alpha.len() {
        return Err(Error::DimensionMismatch(format!(
            "gamma data has {} entries, alpha has {}",
            g.len(),
            alpha.len()
        )));
    }
    let mut report = CheckReport::new("alpha_recursion", tol);
    let a = alpha.values();
    let mut partial = 0.0;
    for (n, &a_n) in a.iter().enumerate().take(g.len()) {
        let cur = g.product(Some(n));
        let scale = cur.norm().max(1.0);
        let recursion = cur - c(partial);
        report.record_with_witness("partial_sum_form", (recursion - c(a_n)).norm() / scale, || {
            format!("n = {n}")
        });
        let two_term = cur - g.product(n.checked_sub(1));
        report.record_with_witness("difference_form", (two_term - c(a_n)).norm() / scale, || {
            format!("n = {n}")
        });
        partial += a_n;
    }
    Ok(report)
}
