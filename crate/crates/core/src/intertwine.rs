//! Intertwining operators `S_φ = Σ φ_k ⊗ φ̄_k`, `S_ψ = Σ ψ_k ⊗ ψ̄_k` and the
//! weak intertwining relations between the number-like operators.

use crate::error::{Error, Result};
use crate::ladder::{number_operators, LadderSystem};
use crate::linalg::{self, Operator};
use crate::report::CheckReport;
use crate::space::{BiorthogonalPair, RieszMap};

/// `S_φ = ΦΦ*` and `S_ψ = ΨΨ*`, Hermitized.
pub fn build_intertwiners(pair: &BiorthogonalPair) -> (Operator, Operator) {
    let s_phi = linalg::hermitian_part(&(pair.phi() * pair.phi().adjoint()));
    let s_psi = linalg::hermitian_part(&(pair.psi() * pair.psi().adjoint()));
    (
        Operator {
            matrix: s_phi,
            label: "S_phi".into(),
        },
        Operator {
            matrix: s_psi,
            label: "S_psi".into(),
        },
    )
}

/// Basis exchange `S_φψ_k = φ_k`, `S_ψφ_k = ψ_k`, the round trips
/// `S_φS_ψφ_k = φ_k`, `S_ψS_φψ_k = ψ_k`, and `‖S_φS_ψ − I‖₂`.
/// Residuals are relative to the target vector norm.
pub fn intertwiner_check(pair: &BiorthogonalPair, tol: f64) -> CheckReport {
    let (s_phi, s_psi) = build_intertwiners(pair);
    let n = pair.dim();
    let mut report = CheckReport::new("intertwiners", tol);
    report.context.n = Some(n);
    for k in 0..n {
        let phi = pair.phi_k(k);
        let psi = pair.psi_k(k);
        let r = (s_phi.apply(&psi) - &phi).norm() / phi.norm();
        report.record_with_witness("s_phi_maps_psi", r, || format!("k = {k}"));
        let r = (s_psi.apply(&phi) - &psi).norm() / psi.norm();
        report.record_with_witness("s_psi_maps_phi", r, || format!("k = {k}"));
        let r = (s_phi.apply(&s_psi.apply(&phi)) - &phi).norm() / phi.norm();
        report.record_with_witness("round_trip_phi", r, || format!("k = {k}"));
        let r = (s_psi.apply(&s_phi.apply(&psi)) - &psi).norm() / psi.norm();
        report.record_with_witness("round_trip_psi", r, || format!("k = {k}"));
    }
    report.record(
        "mutual_inverse",
        linalg::spectral_norm(&(&s_phi.matrix * &s_psi.matrix - linalg::identity(n))),
    );
    report
}

/// For a pair generated from `G`: `S_φ = G²` and `S_ψ = G⁻²`, each in
/// spectral norm relative to the target.
pub fn riesz_intertwiner_check(pair: &BiorthogonalPair, g: &RieszMap, tol: f64) -> Result<CheckReport> {
    if g.dim() != pair.dim() {
        return Err(Error::DimensionMismatch("Riesz map and pair differ in dimension".into()));
    }
    let (s_phi, s_psi) = build_intertwiners(pair);
    let g2 = g.matrix() * g.matrix();
    let g_inv = linalg::invert(g.matrix())?;
    let g_inv2 = &g_inv * &g_inv;
    let mut report = CheckReport::new("riesz_intertwiners", tol);
    report.context.n = Some(pair.dim());
    report.context.cond = Some(g.cond());
    report.record(
        "s_phi_vs_g_squared",
        linalg::spectral_norm(&(&s_phi.matrix - &g2)) / linalg::spectral_norm(&g2),
    );
    report.record(
        "s_psi_vs_g_inverse_squared",
        linalg::spectral_norm(&(&s_psi.matrix - &g_inv2)) / linalg::spectral_norm(&g_inv2),
    );
    Ok(report)
}

/// On the guarded band:
/// `N_l S_φ ψ_k = S_φ N_l^# ψ_k`, `N_r S_φ ψ_k = S_φ N_r^# ψ_k`,
/// `N_l^# S_ψ φ_k = S_ψ N_l φ_k`, `N_r^# S_ψ φ_k = S_ψ N_r φ_k`,
/// each normalized by `‖φ_k‖·max(1, |γ_kγ̃_k|)`.
pub fn weak_intertwining_check(sys: &LadderSystem, tol: f64) -> Result<CheckReport> {
    let (s_phi, s_psi) = build_intertwiners(&sys.pair);
    weak_intertwining_with(sys, &s_phi, &s_psi, tol)
}

/// As [`weak_intertwining_check`] with caller-supplied intertwiners.
pub fn weak_intertwining_with(sys: &LadderSystem, s_phi: &Operator, s_psi: &Operator, tol: f64) -> Result<CheckReport> {
    let ops = number_operators(sys);
    let mut report = CheckReport::new("weak_intertwining", tol);
    report.context.n = Some(sys.dim());
    report.context.guard = Some(sys.space.guard());
    for k in sys.space.guarded() {
        let phi = sys.pair.phi_k(k);
        let psi = sys.pair.psi_k(k);
        let scale = phi.norm() * sys.gammas.product(Some(k)).norm().max(1.0);

        let lhs = ops.left.apply(&s_phi.apply(&psi));
        let rhs = s_phi.apply(&ops.left_sharp.apply(&psi));
        report.record_with_witness("left_via_s_phi", (lhs - rhs).norm() / scale, || format!("k = {k}"));

        let lhs = ops.right.apply(&s_phi.apply(&psi));
        let rhs = s_phi.apply(&ops.right_sharp.apply(&psi));
        report.record_with_witness("right_via_s_phi", (lhs - rhs).norm() / scale, || format!("k = {k}"));

        let lhs = ops.left_sharp.apply(&s_psi.apply(&phi));
        let rhs = s_psi.apply(&ops.left.apply(&phi));
        report.record_with_witness("left_via_s_psi", (lhs - rhs).norm() / scale, || format!("k = {k}"));

        let lhs = ops.right_sharp.apply(&s_psi.apply(&phi));
        let rhs = s_psi.apply(&ops.right.apply(&phi));
        report.record_with_witness("right_via_s_psi", (lhs - rhs).norm() / scale, || format!("k = {k}"));
    }
    Ok(report)
}

/// Sorted real parts of the eigenvalues of `N_l` and `N_l^#` restricted to
/// the guarded band (`⟨N φ_n, ψ_n⟩` and `⟨N^# ψ_n, φ_n⟩`); returns the
/// largest pairwise gap, relative to `1 + |value|`.
pub fn eigenvalue_transport_gap(sys: &LadderSystem) -> f64 {
    let ops = number_operators(sys);
    let mut left = Vec::new();
    let mut sharp = Vec::new();
    for n in sys.space.guarded() {
        let phi = sys.pair.phi_k(n);
        let psi = sys.pair.psi_k(n);
        left.push(linalg::inner(&ops.left.apply(&phi), &psi).re);
        sharp.push(linalg::inner(&ops.left_sharp.apply(&psi), &phi).re);
    }
    left.sort_by(f64::total_cmp);
    sharp.sort_by(f64::total_cmp);
    left.iter()
        .zip(&sharp)
        .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
        .fold(0.0, f64::max)
}
