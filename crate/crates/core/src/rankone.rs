//! Rank-one family `R_k = ψ_k ⊗ φ̄_k`, the deformation operator `X`, its
//! adjoint, and its resolvent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Operator};
use crate::report::CheckReport;
use crate::space::{AlphaSequence, BiorthogonalPair};

/// Minimum distance between `λ` and the α set for [`resolvent_z`].
pub const RESOLVENT_MARGIN: f64 = 1e-6;

/// `R_k ξ = ⟨ξ, φ_k⟩ ψ_k`, i.e. the matrix `ψ_k φ_k*`.
pub fn rank_one(pair: &BiorthogonalPair, k: usize) -> Result<Operator> {
    let n = pair.dim();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    Operator::new(format!("R{k}"), pair.psi_k(k) * pair.phi_k(k).adjoint())
}

/// Checks idempotence, mutual annihilation, the adjoint form
/// `R_k* = φ_k ⊗ ψ̄_k`, the bound `‖R_k‖ ≤ ‖φ_k‖‖ψ_k‖`, and `Σ R_k = I`.
/// Residuals are absolute (Frobenius), except the norm bound which records
/// the relative excess `max(0, ‖R_k‖/(‖φ_k‖‖ψ_k‖) − 1)`.
pub fn verify_projection_family(pair: &BiorthogonalPair, tol: f64) -> CheckReport {
    let n = pair.dim();
    let mut report = CheckReport::new("projection_family", tol);
    report.context.n = Some(n);

    let phis: Vec<_> = (0..n).map(|k| pair.phi_k(k)).collect();
    let psis: Vec<_> = (0..n).map(|k| pair.psi_k(k)).collect();
    let rs: Vec<CMatrix> = (0..n).map(|k| &psis[k] * phis[k].adjoint()).collect();

    let mut sum = CMatrix::zeros(n, n);
    for k in 0..n {
        let r = &rs[k];
        sum += r;

        let idem = (r * r - r).norm();
        report.record_with_witness("idempotent", idem, || format!("R_{k}^2 != R_{k}"));

        let adjoint_form = &phis[k] * psis[k].adjoint();
        report.record("adjoint_form", (r.adjoint() - adjoint_form).norm());

        let bound = phis[k].norm() * psis[k].norm();
        let excess = if bound > 0.0 {
            (linalg::spectral_norm(r) / bound - 1.0).max(0.0)
        } else {
            linalg::spectral_norm(r)
        };
        report.record("norm_bound", excess);

        // R_k R_m = ψ_k (φ_k* ψ_m) φ_m*, so its Frobenius norm is
        // |⟨ψ_m, φ_k⟩| ‖ψ_k‖ ‖φ_m‖.
        for m in (0..n).filter(|&m| m != k) {
            let overlap = phis[k].dotc(&psis[m]).norm();
            let cross = overlap * psis[k].norm() * phis[m].norm();
            report.record_with_witness("mutual_annihilation", cross, || {
                format!("R_{k} R_{m} != 0")
            });
        }
    }
    report.record(
        "resolution_of_identity",
        (sum - linalg::identity(n)).norm(),
    );
    report
}

fn check_alpha_len(pair: &BiorthogonalPair, alpha: &AlphaSequence) -> Result<()> {
    if alpha.len() != pair.dim() {
        return Err(Error::DimensionMismatch(format!(
            "alpha has {} entries, pair has dimension {}",
            alpha.len(),
            pair.dim()
        )));
    }
    Ok(())
}

/// `X = Σ α_k R_k = Ψ diag(α) Φ*`.
pub fn build_x(pair: &BiorthogonalPair, alpha: &AlphaSequence) -> Result<Operator> {
    check_alpha_len(pair, alpha)?;
    let m = pair.psi() * linalg::diag_real(alpha.values()) * pair.phi().adjoint();
    Operator::new("X", m)
}

/// `X* = Σ α_n φ_n ⊗ ψ̄_n = Φ diag(α) Ψ*`, built from the families rather than
/// by transposing [`build_x`].
pub fn adjoint_x(pair: &BiorthogonalPair, alpha: &AlphaSequence) -> Result<Operator> {
    check_alpha_len(pair, alpha)?;
    let m = pair.phi() * linalg::diag_real(alpha.values()) * pair.psi().adjoint();
    Operator::new("X*", m)
}

/// Distance from `lambda` to the nearest `α_k`.
pub fn distance_to_alphas(alpha: &AlphaSequence, lambda: Complex64) -> f64 {
    alpha
        .values()
        .iter()
        .map(|&a| (linalg::c(a) - lambda).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `Z = Σ (α_k − λ)⁻¹ R_k`, the inverse of `X − λ`.
pub fn resolvent_z(pair: &BiorthogonalPair, alpha: &AlphaSequence, lambda: Complex64) -> Result<Operator> {
    resolvent_z_with_margin(pair, alpha, lambda, RESOLVENT_MARGIN)
}

pub fn resolvent_z_with_margin(
    pair: &BiorthogonalPair,
    alpha: &AlphaSequence,
    lambda: Complex64,
    margin: f64,
) -> Result<Operator> {
    check_alpha_len(pair, alpha)?;
    let distance = distance_to_alphas(alpha, lambda);
    if !(distance >= margin) {
        return Err(Error::ResolventSingularity {
            lambda,
            distance,
            margin,
        });
    }
    let weights = CMatrix::from_diagonal(&crate::CVector::from_iterator(
        alpha.len(),
        alpha.values().iter().map(|&a| (linalg::c(a) - lambda).inv()),
    ));
    Operator::new("Z", pair.psi() * weights * pair.phi().adjoint())
}

/// `‖(X − λ)Z − I‖₂` for each `λ`.
pub fn resolvent_check(
    pair: &BiorthogonalPair,
    alpha: &AlphaSequence,
    lambdas: &[Complex64],
    tol: f64,
) -> Result<CheckReport> {
    let x = build_x(pair, alpha)?;
    let n = pair.dim();
    let mut report = CheckReport::new("resolvent", tol);
    report.context.n = Some(n);
    for &lambda in lambdas {
        let z = resolvent_z(pair, alpha, lambda)?;
        let shifted = &x.matrix - linalg::identity(n) * lambda;
        let r = linalg::spectral_norm(&(shifted * &z.matrix - linalg::identity(n)));
        report.record_with_witness("inverse_defect", r, || format!("lambda = {lambda}"));
    }
    Ok(report)
}

/// Compares [`adjoint_x`] with the conjugate transpose of [`build_x`] and
/// checks both eigen-relations `Xψ_k = α_kψ_k`, `X*φ_k = α_kφ_k`.
/// Residuals are relative to `1 + max α`.
pub fn adjoint_check(pair: &BiorthogonalPair, alpha: &AlphaSequence, tol: f64) -> Result<CheckReport> {
    let x = build_x(pair, alpha)?;
    let xa = adjoint_x(pair, alpha)?;
    let scale = 1.0 + alpha.max();
    let mut report = CheckReport::new("adjoint_x", tol);
    report.context.n = Some(pair.dim());
    report.record(
        "adjoint_vs_transpose",
        linalg::spectral_norm(&(&xa.matrix - x.matrix.adjoint())) / scale,
    );
    for (k, &a) in alpha.values().iter().enumerate() {
        let psi = pair.psi_k(k);
        let phi = pair.phi_k(k);
        let r1 = (x.apply(&psi) - &psi * linalg::c(a)).norm() / (scale * psi.norm());
        report.record_with_witness("x_psi_eigen", r1, || format!("k = {k}"));
        let r2 = (xa.apply(&phi) - &phi * linalg::c(a)).norm() / (scale * phi.norm());
        report.record_with_witness("xstar_phi_eigen", r2, || format!("k = {k}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::space::{alphas_from_epsilon, make_epsilon, random_riesz, riesz_pair, EpsilonKind};

    fn quad_alpha(n: usize) -> AlphaSequence {
        alphas_from_epsilon(&make_epsilon(EpsilonKind::Quadratic, n, None).unwrap())
    }

    #[test]
    fn rank_one_identity_pair() {
        let r = rank_one(&BiorthogonalPair::identity(2), 0).unwrap();
        let mut expected = CMatrix::zeros(2, 2);
        expected[(0, 0)] = c(1.0);
        assert_eq!(r.matrix, expected);
        assert!(rank_one(&BiorthogonalPair::identity(2), 2).is_err());
    }

    #[test]
    fn rank_one_fixes_its_psi_and_obeys_bound() {
        let pair = riesz_pair(&random_riesz(32, 50.0, 1).unwrap()).unwrap();
        for k in [0, 5, 31] {
            let r = rank_one(&pair, k).unwrap();
            let psi = pair.psi_k(k);
            assert!((r.apply(&psi) - &psi).norm() < 1e-12 * psi.norm());
            assert!(r.norm() <= pair.phi_k(k).norm() * pair.psi_k(k).norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rank_one_is_oblique_when_families_differ() {
        let pair = riesz_pair(&random_riesz(6, 10.0, 2).unwrap()).unwrap();
        let r = rank_one(&pair, 1).unwrap();
        assert!(r.hermiticity_defect() > 1e-3);
        assert!((&r.matrix * &r.matrix - &r.matrix).norm() < 1e-12);
    }

    #[test]
    fn identity_family_is_exact() {
        let report = verify_projection_family(&BiorthogonalPair::identity(5), 0.0);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn non_biorthogonal_columns_break_idempotence() {
        let pair = BiorthogonalPair::identity(4);
        let bad_col = pair.psi_k(2) * c(1.1);
        let bad = pair.with_psi_column(2, &bad_col).unwrap();
        let report = verify_projection_family(&bad, 1e-10);
        assert!(!report.passed);
        assert!(report.residual("idempotent").unwrap() > 0.05);
    }

    #[test]
    fn x_on_identity_pair() {
        let alpha = AlphaSequence::new(vec![1.0; 4]).unwrap();
        let x = build_x(&BiorthogonalPair::identity(4), &alpha).unwrap();
        assert_eq!(x.matrix, linalg::identity(4));

        let x = build_x(&BiorthogonalPair::identity(4), &quad_alpha(4)).unwrap();
        assert_eq!(x.matrix, linalg::diag_real(&[1.0, 3.0, 5.0, 7.0]));

        let xa = adjoint_x(&BiorthogonalPair::identity(4), &quad_alpha(4)).unwrap();
        assert_eq!(xa.matrix, x.matrix);
    }

    #[test]
    fn x_length_mismatch() {
        let alpha = AlphaSequence::new(vec![1.0; 3]).unwrap();
        assert!(build_x(&BiorthogonalPair::identity(4), &alpha).is_err());
    }

    #[test]
    fn adjoint_matches_transpose_for_riesz_pair() {
        let pair = riesz_pair(&random_riesz(32, 30.0, 4).unwrap()).unwrap();
        let alpha = quad_alpha(32);
        let x = build_x(&pair, &alpha).unwrap();
        let xa = adjoint_x(&pair, &alpha).unwrap();
        assert!(linalg::spectral_norm(&(&xa.matrix - x.matrix.adjoint())) <= 1e-11);
        let report = adjoint_check(&pair, &alpha, 1e-12).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn resolvent_cases() {
        let alpha = AlphaSequence::new(vec![1.0; 3]).unwrap();
        let z = resolvent_z(&BiorthogonalPair::identity(3), &alpha, c(-1.0)).unwrap();
        assert!((z.matrix - linalg::identity(3) * c(0.5)).norm() < 1e-15);

        let alpha = quad_alpha(8);
        let report = resolvent_check(&BiorthogonalPair::identity(8), &alpha, &[c(0.0)], 1e-10).unwrap();
        assert!(report.passed);

        let err = resolvent_z(&BiorthogonalPair::identity(8), &alpha, c(alpha.values()[2])).unwrap_err();
        assert!(matches!(err, Error::ResolventSingularity { .. }));
    }
}
