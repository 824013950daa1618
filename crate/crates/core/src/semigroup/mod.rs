//! Exponential semigroups `V(α) = e^{αS}` and the relations built on them:
//! the quasi-strong commutation `V T − T V = αV`, the uncertainty-type
//! inequality, Weyl relations and their weak form, decay and drift probes.
//!
//! On a finite truncation the relations that need an unbounded partner only
//! hold approximately; everything here reports residuals, and the probes
//! report trajectories and verdicts rather than pass/fail.

mod expm;

pub use expm::{expm, THETA_13};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, Operator};
use crate::report::CheckReport;

/// Hermiticity defect accepted for the Weyl generators.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Allowed deviation of the drift slope from `−1`.
pub const DRIFT_SLOPE_TOL: f64 = 0.05;

/// Measured growth bound `‖V(α)‖ ≤ M e^{ωα}` on the probed grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    pub m: f64,
    pub omega: f64,
}

/// A generator with the grids it is probed on.
#[derive(Debug, Clone)]
pub struct SemigroupProbe {
    pub generator: Operator,
    /// Non-negative, ascending.
    pub alpha_grid: Vec<f64>,
    /// `(s, t)` pairs for Weyl-type checks.
    pub st_grid: Vec<(f64, f64)>,
    pub growth: Option<Growth>,
}

impl SemigroupProbe {
    pub fn new(generator: Operator, alpha_grid: Vec<f64>, st_grid: Vec<(f64, f64)>) -> Result<Self> {
        if alpha_grid.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidArgument("alpha grid must be finite and non-negative".into()));
        }
        if alpha_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("alpha grid must be ascending".into()));
        }
        if st_grid.iter().any(|(s, t)| !s.is_finite() || !t.is_finite()) {
            return Err(Error::InvalidArgument("(s, t) grid must be finite".into()));
        }
        Ok(Self {
            generator,
            alpha_grid,
            st_grid,
            growth: None,
        })
    }

    /// `V(α)` for every α on the grid.
    pub fn trajectory(&self) -> Result<Vec<CMatrix>> {
        self.alpha_grid.iter().map(|&a| expm(&self.generator.matrix, a)).collect()
    }

    /// Fills [`Self::growth`] from the grid and returns it.
    pub fn measure_growth(&mut self) -> Result<Growth> {
        let norms: Vec<f64> = self
            .trajectory()?
            .iter()
            .map(linalg::spectral_norm)
            .collect();
        let growth = growth_of(&self.alpha_grid, &norms);
        self.growth = Some(growth);
        Ok(growth)
    }

    /// Distinct `t` values of the `(s, t)` grid, in order of appearance.
    pub fn t_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &(_, t) in &self.st_grid {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }
}

/// Evenly spaced grid `[start, stop]` with `count` points.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Cartesian grid of `(s, t)` with `count` points per axis on `[-r, r]`.
pub fn square_grid(r: f64, count: usize) -> Vec<(f64, f64)> {
    let axis = linspace(-r, r, count);
    axis.iter()
        .flat_map(|&s| axis.iter().map(move |&t| (s, t)))
        .collect()
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len().min(y.len());
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = (0..n).map(|i| (x[i] - mx) * (y[i] - my)).sum();
    let sxx: f64 = (0..n).map(|i| (x[i] - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn growth_of(grid: &[f64], norms: &[f64]) -> Growth {
    let m = norms.iter().copied().fold(0.0, f64::max);
    let logs: Vec<f64> = norms.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let (omega, _) = linear_fit(grid, &logs);
    Growth { m, omega }
}

/// Truncated boson lowering operator, `a e_k = √k e_{k−1}`.
pub fn boson_lowering(n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = c((k as f64).sqrt());
    }
    a
}

/// Truncated position and momentum, `q = (a + a*)/√2`,
/// `p = (a − a*)/(i√2)`; `[p, q] = −i` away from the top mode.
pub fn position_momentum(n: usize) -> (Operator, Operator) {
    let a = boson_lowering(n);
    let ad = a.adjoint();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * c(r);
    let p = (&a - &ad) * Complex64::new(0.0, -r);
    (
        Operator {
            matrix: linalg::hermitian_part(&q),
            label: "q".into(),
        },
        Operator {
            matrix: linalg::hermitian_part(&p),
            label: "p".into(),
        },
    )
}

/// Normalized truncated coherent state `∝ Σ zᵏ/√k! e_k`.
pub fn coherent_state(n: usize, z: Complex64) -> CVector {
    let mut v = CVector::zeros(n);
    if n == 0 {
        return v;
    }
    v[0] = linalg::ONE;
    for k in 1..n {
        v[k] = v[k - 1] * z / (k as f64).sqrt();
    }
    let norm = v.norm();
    v / c(norm)
}

/// `e_0, …, e_{m−1}` in dimension `n`.
pub fn low_mode_vectors(n: usize, m: usize) -> Vec<CVector> {
    (0..m.min(n)).map(|k| linalg::basis_vector(n, k)).collect()
}

/// Low modes plus coherent states: low-energy vectors whose top-mode weight
/// shrinks quickly as the truncation grows.
pub fn default_probe_vectors(n: usize) -> Vec<CVector> {
    let mut out = low_mode_vectors(n, 4);
    for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.8, 0.8)] {
        out.push(coherent_state(n, z));
    }
    out
}

fn same_dim(a: &Operator, b: &Operator) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} has dim {} but {} has dim {}",
            a.label,
            a.dim(),
            b.label,
            b.dim()
        )));
    }
    Ok(a.dim())
}

fn check_vectors(n: usize, vectors: &[CVector]) -> Result<()> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("probe vectors must have length {n}")));
    }
    Ok(())
}

/// Quasi-strong relation `⟨V T ξ, η⟩ − ⟨V ξ, T* η⟩ = α⟨V ξ, η⟩` for all
/// ordered pairs of `vectors` and every α on the grid. The residual is
/// relative to `1 +` the largest of the three terms; per-α maxima are
/// diagnostics keyed `alpha=<value>`.
pub fn check_cr3(t: &Operator, probe: &SemigroupProbe, vectors: &[CVector], tol: f64) -> Result<CheckReport> {
    let s = &probe.generator;
    let n = same_dim(s, t)?;
    check_vectors(n, vectors)?;
    let t_vecs: Vec<CVector> = vectors.iter().map(|v| t.apply(v)).collect();
    let tadj = t.adjoint();
    let tadj_vecs: Vec<CVector> = vectors.iter().map(|v| tadj.apply(v)).collect();

    let mut report = CheckReport::new("cr3", tol);
    report.context.n = Some(n);
    for &alpha in &probe.alpha_grid {
        let v = expm(&s.matrix, alpha)?;
        let v_xi: Vec<CVector> = vectors.iter().map(|x| &v * x).collect();
        let v_t_xi: Vec<CVector> = t_vecs.iter().map(|x| &v * x).collect();
        let mut worst = 0.0f64;
        for (i, _) in vectors.iter().enumerate() {
            for (j, eta) in vectors.iter().enumerate() {
                let a = linalg::inner(&v_t_xi[i], eta);
                let b = linalg::inner(&v_xi[i], &tadj_vecs[j]);
                let g = c(alpha) * linalg::inner(&v_xi[i], eta);
                let scale = 1.0 + a.norm().max(b.norm()).max(g.norm());
                let r = (a - b - g).norm() / scale;
                worst = worst.max(r);
                report.record_with_witness("quasi_strong", r, || format!("alpha = {alpha}, xi = #{i}, eta = #{j}"));
            }
        }
        report.diagnostic(&format!("alpha={alpha}"), worst);
    }
    Ok(report)
}

fn require_hermitian(op: &Operator) -> Result<()> {
    let defect = op.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// `e^{itH} e^{−isT̄} = e^{−its} e^{−isT̄} e^{itH}` on `vectors` for every
/// `(s, t)` of the probe grid; residual `‖(L − R)ξ‖/‖ξ‖`.
pub fn check_weyl(h: &Operator, tbar: &Operator, probe: &SemigroupProbe, vectors: &[CVector], tol: f64) -> Result<CheckReport> {
    let n = same_dim(h, tbar)?;
    require_hermitian(h)?;
    require_hermitian(tbar)?;
    check_vectors(n, vectors)?;
    let ih = &h.matrix * Complex64::i();
    let itbar = &tbar.matrix * Complex64::i();

    let mut report = CheckReport::new("weyl", tol);
    report.context.n = Some(n);
    for &(s, t) in &probe.st_grid {
        let u = expm(&ih, t)?;
        let w = expm(&itbar, -s)?;
        let phase = Complex64::from_polar(1.0, -t * s);
        let diff = &u * &w - (&w * &u) * phase;
        for (i, xi) in vectors.iter().enumerate() {
            let r = (&diff * xi).norm() / xi.norm();
            report.record_with_witness("weyl", r, || format!("s = {s}, t = {t}, xi = #{i}"));
        }
    }
    Ok(report)
}

/// `⟨e^{−itH}ξ, Tη⟩ = ⟨(T + t)ξ, e^{itH}η⟩` for every `t` of the probe grid
/// and all pairs of `vectors`, normalized by `‖ξ‖‖η‖`. `T` need not be
/// symmetric; a symmetry defect surfaces as a residual at `t = 0`.
pub fn check_weak_weyl(h: &Operator, t_op: &Operator, probe: &SemigroupProbe, vectors: &[CVector], tol: f64) -> Result<CheckReport> {
    let n = same_dim(h, t_op)?;
    require_hermitian(h)?;
    check_vectors(n, vectors)?;
    let ih = &h.matrix * Complex64::i();
    let t_vecs: Vec<CVector> = vectors.iter().map(|v| t_op.apply(v)).collect();

    let mut report = CheckReport::new("weak_weyl", tol);
    report.context.n = Some(n);
    report.diagnostic("t_symmetry_defect", t_op.hermiticity_defect());
    for t in probe.t_values() {
        let back = expm(&ih, -t)?;
        let fwd = expm(&ih, t)?;
        let back_vecs: Vec<CVector> = vectors.iter().map(|v| &back * v).collect();
        let fwd_vecs: Vec<CVector> = vectors.iter().map(|v| &fwd * v).collect();
        for (i, xi) in vectors.iter().enumerate() {
            let shifted = &t_vecs[i] + xi * c(t);
            for (j, eta) in vectors.iter().enumerate() {
                let lhs = linalg::inner(&back_vecs[i], &t_vecs[j]);
                let rhs = linalg::inner(&shifted, &fwd_vecs[j]);
                let r = (lhs - rhs).norm() / (xi.norm() * eta.norm());
                report.record_with_witness("weak_weyl", r, || format!("t = {t}, xi = #{i}, eta = #{j}"));
            }
        }
    }
    Ok(report)
}

/// Uncertainty-type bound
/// `α|⟨Vξ, ξ⟩| ≤ 2 max(‖(T − z)ξ‖, ‖(T* − z̄)ξ‖) max(‖Vξ‖, ‖V*ξ‖) + |r|`
/// where `r` is the quasi-strong defect of the pair `(ξ, ξ)`. The residual
/// `excess` is the violation relative to `1 +` the right side and must
/// vanish; `cr3_over_gate` is the amount by which `|r|` exceeds `cr3_gate`.
pub fn up_inequality_check(
    t_op: &Operator,
    probe: &SemigroupProbe,
    zs: &[Complex64],
    vectors: &[CVector],
    cr3_gate: f64,
    tol: f64,
) -> Result<CheckReport> {
    let s = &probe.generator;
    let n = same_dim(s, t_op)?;
    check_vectors(n, vectors)?;
    let tadj = t_op.adjoint();

    let mut report = CheckReport::new("up_inequality", tol);
    report.context.n = Some(n);
    let mut tightness = 0.0f64;
    let mut defect = 0.0f64;
    for &alpha in &probe.alpha_grid {
        let v = expm(&s.matrix, alpha)?;
        let vadj = v.adjoint();
        for (i, xi) in vectors.iter().enumerate() {
            let v_xi = &v * xi;
            let t_xi = t_op.apply(xi);
            let tadj_xi = tadj.apply(xi);
            let vv = linalg::inner(&v_xi, xi);
            let r = linalg::inner(&(&v * &t_xi), xi) - linalg::inner(&v_xi, &tadj_xi) - c(alpha) * vv;
            let scale = 1.0 + (&v * &t_xi).norm() * xi.norm() + v_xi.norm() * tadj_xi.norm();
            defect = defect.max(r.norm() / scale);
            let v_part = v_xi.norm().max((&vadj * xi).norm());
            for &z in zs {
                let lhs = alpha * vv.norm();
                let spread = (&t_xi - xi * z).norm().max((&tadj_xi - xi * z.conj()).norm());
                let rhs = 2.0 * spread * v_part;
                let excess = (lhs - rhs - r.norm()).max(0.0) / (1.0 + rhs);
                report.record_with_witness("excess", excess, || format!("alpha = {alpha}, z = {z}, xi = #{i}"));
                if rhs > 0.0 {
                    tightness = tightness.max(lhs / rhs);
                }
            }
        }
    }
    report.record("cr3_over_gate", (defect - cr3_gate).max(0.0));
    report.diagnostic("cr3_defect", defect);
    report.diagnostic("tightness", tightness);
    Ok(report)
}

/// Outcome of [`decay_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Decays,
    NoDecay,
    /// `‖V(α)‖` keeps growing across the grid: no uniform bound is visible.
    NotApplicable,
}

/// `|⟨V(α)ξ, ξ⟩|` along the grid with the measured growth bound.
#[derive(Debug, Clone, Serialize)]
pub struct DecayTrajectory {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub norms: Vec<f64>,
    pub growth: Growth,
    pub uniformly_bounded: bool,
    pub threshold: f64,
    pub verdict: DecayVerdict,
}

impl DecayTrajectory {
    /// First grid point at which the value is at or below the threshold.
    pub fn first_below(&self) -> Option<f64> {
        self.alphas
            .iter()
            .zip(&self.values)
            .find(|(_, v)| **v <= self.threshold)
            .map(|(a, _)| *a)
    }
}

/// Tracks `|⟨V(α)ξ, ξ⟩|`. The verdict is `not_applicable` when the sup of
/// `‖V(α)‖` over the second half of the grid exceeds that over the first
/// half; otherwise `decays` iff the last value is at or below `threshold`.
pub fn decay_probe(probe: &SemigroupProbe, xi: &CVector, threshold: f64) -> Result<DecayTrajectory> {
    check_vectors(probe.generator.dim(), std::slice::from_ref(xi))?;
    if probe.alpha_grid.is_empty() {
        return Err(Error::InvalidArgument("decay probe needs a non-empty alpha grid".into()));
    }
    let mut values = Vec::with_capacity(probe.alpha_grid.len());
    let mut norms = Vec::with_capacity(probe.alpha_grid.len());
    for &alpha in &probe.alpha_grid {
        let v = expm(&probe.generator.matrix, alpha)?;
        values.push(linalg::inner(&(&v * xi), xi).norm());
        norms.push(linalg::spectral_norm(&v));
    }
    let growth = growth_of(&probe.alpha_grid, &norms);
    let half = norms.len().div_ceil(2);
    let first = norms[..half].iter().copied().fold(0.0, f64::max);
    let second = norms[half..].iter().copied().fold(0.0, f64::max);
    let uniformly_bounded = second <= first * (1.0 + 1e-9);
    let verdict = if !uniformly_bounded {
        DecayVerdict::NotApplicable
    } else if *values.last().expect("non-empty") <= threshold {
        DecayVerdict::Decays
    } else {
        DecayVerdict::NoDecay
    };
    Ok(DecayTrajectory {
        alphas: probe.alpha_grid.clone(),
        values,
        norms,
        growth,
        uniformly_bounded,
        threshold,
        verdict,
    })
}

/// `⟨e^{−isT̄}ξ, H e^{−isT̄}ξ⟩` along `s_grid`, with its least-squares slope.
#[derive(Debug, Clone, Serialize)]
pub struct DriftTrajectory {
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub slope_deviation: f64,
    /// Largest `s` such that every grid point up to it lies within
    /// `window_tol` of the line `⟨Hξ, ξ⟩ − s`.
    pub window: f64,
    /// Whether the slope is within [`DRIFT_SLOPE_TOL`] of `−1`.
    pub hypothesis_ok: bool,
}

/// Drift of the `H`-expectation under `e^{−isT̄}`. Expects unit `ξ`.
pub fn drift_probe(h: &Operator, tbar: &Operator, s_grid: &[f64], xi: &CVector, window_tol: f64) -> Result<DriftTrajectory> {
    let n = same_dim(h, tbar)?;
    require_hermitian(h)?;
    require_hermitian(tbar)?;
    check_vectors(n, std::slice::from_ref(xi))?;
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("drift probe needs a unit vector, got norm {}", xi.norm())));
    }
    if s_grid.len() < 2 {
        return Err(Error::InvalidArgument("drift probe needs at least two grid points".into()));
    }
    let itbar = &tbar.matrix * Complex64::i();
    let mut values = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let moved = expm(&itbar, -s)? * xi;
        values.push(linalg::inner(&moved, &h.apply(&moved)).re);
    }
    let base = linalg::inner(&h.apply(xi), xi).re;
    let (slope, _) = linear_fit(s_grid, &values);
    let mut order: Vec<usize> = (0..s_grid.len()).collect();
    order.sort_by(|&a, &b| s_grid[a].abs().total_cmp(&s_grid[b].abs()));
    let mut window = 0.0;
    for i in order {
        if (values[i] - (base - s_grid[i])).abs() > window_tol {
            break;
        }
        window = s_grid[i].abs();
    }
    let slope_deviation = (slope + 1.0).abs();
    Ok(DriftTrajectory {
        s: s_grid.to_vec(),
        values,
        slope,
        slope_deviation,
        window,
        hypothesis_ok: slope_deviation <= DRIFT_SLOPE_TOL,
    })
}

/// Worst Weyl residual of truncated `(p, q)` at dimension `n` over `st_grid`,
/// tested on the first `modes` basis vectors.
pub fn boson_weyl_residual(n: usize, st_grid: &[(f64, f64)], modes: usize) -> Result<f64> {
    let (q, p) = position_momentum(n);
    let probe = SemigroupProbe::new(p.clone(), vec![0.0], st_grid.to_vec())?;
    let report = check_weyl(&p, &q, &probe, &low_mode_vectors(n, modes), f64::INFINITY)?;
    Ok(report.worst())
}
