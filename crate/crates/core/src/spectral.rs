//! Spectrum and norm of `X` and of its orthonormal-frame image `Y = G X G⁻¹`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c};
use crate::rankone::build_x;
use crate::report::CheckReport;
use crate::space::{AlphaSequence, BiorthogonalPair, RieszMap};

/// Eigenvalues of `X` sorted by real part (ties by imaginary part).
pub fn spectrum_of_x(pair: &BiorthogonalPair, alpha: &AlphaSequence) -> Result<Vec<Complex64>> {
    let x = build_x(pair, alpha)?;
    let mut ev = linalg::eigenvalues(&x.matrix)?;
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Largest `|λ_i − α_{π(i)}|` under the sorted pairing. All targets are
/// real, so pairing by sorted real part is the optimal assignment for the
/// bottleneck distance.
pub fn matching_distance(eigenvalues: &[Complex64], alpha: &AlphaSequence) -> Result<f64> {
    if eigenvalues.len() != alpha.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvalues against {} alphas",
            eigenvalues.len(),
            alpha.len()
        )));
    }
    let mut ev = eigenvalues.to_vec();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut targets = alpha.values().to_vec();
    targets.sort_by(f64::total_cmp);
    Ok(ev
        .iter()
        .zip(&targets)
        .map(|(l, &a)| (l - c(a)).norm())
        .fold(0.0, f64::max))
}

/// Eigenvalue multiset of `X` against `{α_k}`; the residual is the matching
/// distance divided by `max α`. The largest imaginary part is reported as a
/// diagnostic.
pub fn spectrum_check(pair: &BiorthogonalPair, alpha: &AlphaSequence, tol: f64) -> Result<CheckReport> {
    let ev = spectrum_of_x(pair, alpha)?;
    let mut report = CheckReport::new("spectrum", tol);
    report.context.n = Some(pair.dim());
    report.record("matching_distance", matching_distance(&ev, alpha)? / alpha.max());
    report.diagnostic(
        "max_imaginary_part",
        ev.iter().map(|l| l.im.abs()).fold(0.0, f64::max),
    );
    Ok(report)
}

/// `‖X‖₂ ≤ cond(G) · max α` and, in the orthonormal frame, `‖Y‖₂ = max α`
/// with `Y = G X G⁻¹`. Residuals are relative to `max α`; the bound residual
/// is the relative excess over the bound (zero when it holds).
pub fn norm_bound_check(pair: &BiorthogonalPair, alpha: &AlphaSequence, g: &RieszMap, tol: f64) -> Result<CheckReport> {
    if g.dim() != pair.dim() {
        return Err(Error::DimensionMismatch("Riesz map and pair differ in dimension".into()));
    }
    let x = build_x(pair, alpha)?;
    let amax = alpha.max();
    let x_norm = x.norm();
    let bound = g.cond() * amax;
    // G⁻¹ = Ψ for a pair generated from G.
    let y = g.matrix() * &x.matrix * pair.psi();
    let y_norm = linalg::spectral_norm(&y);

    let mut report = CheckReport::new("norm_bound", tol);
    report.context.n = Some(pair.dim());
    report.context.cond = Some(g.cond());
    report.record("x_bound_excess", ((x_norm - bound) / amax).max(0.0));
    report.record("y_norm_vs_max_alpha", (y_norm - amax).abs() / amax);
    report.diagnostic("x_norm", x_norm);
    report.diagnostic("x_bound", bound);
    report.diagnostic("y_norm", y_norm);
    Ok(report)
}
