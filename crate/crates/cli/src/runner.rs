//! Builds the operator system described by a scenario and runs its checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use nlpb_core::commutator::{check_canonical_cr2, check_nonlinear_cr2, iterated_identity_check, mu_chain_check};
use nlpb_core::intertwine::{intertwiner_check, riesz_intertwiner_check, weak_intertwining_check};
use nlpb_core::ladder::{
    alpha_recursion_check, ladder_equivalence_check, number_operator_check, pseudo_boson_ladders, reconstruction_check,
    LadderSystem,
};
use nlpb_core::linalg::{self, c, Operator};
use nlpb_core::rankone::{adjoint_check, resolvent_check, verify_projection_family};
use nlpb_core::semigroup::{
    boson_weyl_residual, check_cr3, check_weak_weyl, check_weyl, decay_probe, default_probe_vectors, drift_probe,
    linspace, low_mode_vectors, position_momentum, square_grid, up_inequality_check, SemigroupProbe,
};
use nlpb_core::space::{check_biorthogonality, random_riesz, riesz_pair, BiorthogonalPair, RieszMap};
use nlpb_core::spectral::{norm_bound_check, spectrum_check};
use nlpb_core::CheckReport;

use crate::catalog::{self, CheckInfo, Param};
use crate::error::CliError;
use crate::scenario::{CheckEntry, PairSpec, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Number of low modes used by the Weyl-type probes.
const WEYL_MODES: usize = 4;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the scenario seed.
    pub seed: Option<u64>,
    /// Worker threads; `None` or `Some(1)` runs sequentially.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioFingerprint {
    pub name: String,
    pub n: usize,
    pub guard: usize,
    pub epsilon_kind: String,
    pub epsilon: Vec<f64>,
    pub pair: PairSpec,
    pub cond: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub module: String,
    pub probe: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub checks_ms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub seed: u64,
    pub fingerprint: ScenarioFingerprint,
    pub checks: Vec<CheckOutcome>,
    pub verdict: Verdict,
    /// Wall-clock data; the only non-deterministic part of the report.
    pub timing: Timing,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report without its timing block.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        strip_timing(&mut v);
        serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
    }
}

/// Removes the wall-clock block from a serialized report.
pub fn strip_timing(report: &mut Value) {
    if let Value::Object(map) = report {
        map.remove("timing");
    }
}

/// Everything the checks need, built once per run.
pub struct Context {
    pub scenario: Scenario,
    pub seed: u64,
    pub g: RieszMap,
    pub sys: LadderSystem,
}

impl Context {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<Self, CliError> {
        let eps = scenario.epsilon_sequence()?;
        let g = match &scenario.riesz {
            PairSpec::Identity(_) => RieszMap::identity(scenario.n),
            PairSpec::Riesz(r) => random_riesz(scenario.n, r.cond_target, r.seed).map_err(|e| CliError::invalid("riesz", e))?,
        };
        let pair = match &scenario.riesz {
            PairSpec::Identity(_) => BiorthogonalPair::identity(scenario.n),
            PairSpec::Riesz(_) => riesz_pair(&g).map_err(|e| CliError::invalid("riesz", e))?,
        };
        let sys = pseudo_boson_ladders(&eps, &pair, scenario.guard).map_err(|e| CliError::invalid("n/guard", e))?;
        Ok(Self {
            scenario: scenario.clone(),
            seed,
            g,
            sys,
        })
    }

    pub fn cond(&self) -> f64 {
        self.g.cond()
    }

    pub fn fingerprint(&self) -> ScenarioFingerprint {
        let eps = self.sys.epsilon_or_partial_sums();
        ScenarioFingerprint {
            name: self.scenario.name.clone(),
            n: self.scenario.n,
            guard: self.scenario.guard,
            epsilon_kind: self.scenario.epsilon.kind.as_str().into(),
            epsilon: eps.values().to_vec(),
            pair: self.scenario.riesz.clone(),
            cond: self.cond(),
        }
    }
}

/// Parses, validates and runs a scenario file with its own settings.
pub fn run_scenario(path: &Path) -> Result<RunReport, CliError> {
    let scenario = Scenario::from_path(path)?;
    run(&scenario, &RunOptions::default())
}

pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let seed = opts.seed.unwrap_or(scenario.seed);
    let ctx = Context::build(scenario, seed)?;
    let entries = scenario.entries();
    let timed = |e: &CheckEntry| {
        let t0 = Instant::now();
        let out = run_check(&ctx, e);
        (out, t0.elapsed().as_secs_f64() * 1e3)
    };
    let results: Vec<(CheckOutcome, f64)> = match opts.jobs {
        Some(j) if j > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Arguments(format!("cannot start {j} workers: {e}")))?;
            pool.install(|| entries.par_iter().map(timed).collect())
        }
        Some(0) => return Err(CliError::Arguments("--jobs must be at least 1".into())),
        _ => entries.iter().map(timed).collect(),
    };
    let (checks, checks_ms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let verdict = if checks.iter().all(|c| c.probe || c.passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(RunReport {
        version: VERSION.into(),
        seed,
        fingerprint: ctx.fingerprint(),
        checks,
        verdict,
        timing: Timing {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
            checks_ms,
        },
    })
}

/// Where the JSON report goes: `--out` wins, then the scenario's `output`
/// (relative to the scenario file), else nowhere.
pub fn output_path(scenario: &Scenario, scenario_path: &Path, cli_out: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = cli_out {
        return Some(p.to_path_buf());
    }
    scenario.output.as_ref().map(|o| {
        let o = Path::new(o);
        if o.is_absolute() {
            o.to_path_buf()
        } else {
            scenario_path.parent().unwrap_or(Path::new(".")).join(o)
        }
    })
}

fn run_check(ctx: &Context, entry: &CheckEntry) -> CheckOutcome {
    let info = catalog::lookup(&entry.id).expect("validated scenario");
    let probe = info.probe && !entry.exact.unwrap_or(false);
    let tol = entry.tolerance.unwrap_or_else(|| info.tolerance.at(ctx.cond()));
    let mut outcome = CheckOutcome {
        id: entry.id.clone(),
        module: info.module.into(),
        probe,
        passed: false,
        report: None,
        error: None,
        data: None,
    };
    match dispatch(ctx, entry, &info, tol) {
        Ok((mut report, data)) => {
            report.context.n = Some(ctx.scenario.n);
            report.context.guard = Some(ctx.scenario.guard);
            report.context.seed = Some(ctx.seed);
            report.context.epsilon_kind = Some(ctx.scenario.epsilon.kind.as_str().into());
            report.context.cond = Some(ctx.cond());
            outcome.passed = report.passed;
            outcome.report = Some(report);
            outcome.data = data;
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

type Dispatch = nlpb_core::Result<(CheckReport, Option<Value>)>;

fn usize_param(entry_value: Option<usize>, info: &CheckInfo, p: Param) -> usize {
    entry_value.unwrap_or_else(|| {
        info.default_of(p)
            .and_then(Value::as_u64)
            .expect("catalog default") as usize
    })
}

fn f64_param(entry_value: Option<f64>, info: &CheckInfo, p: Param) -> f64 {
    entry_value.unwrap_or_else(|| info.default_of(p).and_then(Value::as_f64).expect("catalog default"))
}

fn plain(r: CheckReport) -> Dispatch {
    Ok((r, None))
}

fn dispatch(ctx: &Context, e: &CheckEntry, info: &CheckInfo, tol: f64) -> Dispatch {
    let sys = &ctx.sys;
    let pair = &sys.pair;
    let n = sys.dim();
    match e.id.as_str() {
        "biorthogonality" => plain(check_biorthogonality(pair, tol)),
        "projection_family" => plain(verify_projection_family(pair, tol)),
        "x_adjoint" => plain(adjoint_check(pair, &sys.alpha, tol)?),
        "resolvent" => {
            let lambdas: Vec<Complex64> = match &e.lambdas {
                Some(l) => l.iter().map(|&x| c(x)).collect(),
                None => default_lambdas(sys.alpha.values()),
            };
            plain(resolvent_check(pair, &sys.alpha, &lambdas, tol)?)
        }
        "nonlinear_cr2" => plain(check_nonlinear_cr2(sys, usize_param(e.trials, info, Param::Trials), ctx.seed, tol)?),
        "canonical_cr2" => plain(check_canonical_cr2(sys, usize_param(e.trials, info, Param::Trials), ctx.seed, tol)?),
        "iterated_identity" => {
            let k = e.k_max.unwrap_or(5.min(sys.space.guard().saturating_sub(1)).max(1));
            plain(iterated_identity_check(sys, k, tol)?)
        }
        "mu_chain" => {
            let k = e.k_max.unwrap_or(8.min(sys.space.guarded_max().saturating_sub(1)));
            plain(mu_chain_check(sys, k, tol)?)
        }
        "ladder_equivalence" => plain(ladder_equivalence_check(sys, tol)?),
        "number_operators" => plain(number_operator_check(sys, tol)?),
        "reconstruction" => plain(reconstruction_check(sys, tol)?),
        "alpha_recursion" => plain(alpha_recursion_check(&sys.gammas, &sys.alpha, tol)?),
        "spectrum" => plain(spectrum_check(pair, &sys.alpha, tol)?),
        "norm_bound" => plain(norm_bound_check(pair, &sys.alpha, &ctx.g, tol)?),
        "intertwiners" => plain(intertwiner_check(pair, tol)),
        "riesz_intertwiners" => plain(riesz_intertwiner_check(pair, &ctx.g, tol)?),
        "weak_intertwining" => plain(weak_intertwining_check(sys, tol)?),
        "cr3" => {
            let grid = alpha_grid(e, info);
            let probe = SemigroupProbe::new(sys.s.clone(), grid, vec![])?;
            plain(check_cr3(&sys.t, &probe, &default_probe_vectors(n), tol)?)
        }
        "up_inequality" => {
            let grid = alpha_grid(e, info);
            let zs: Vec<Complex64> = match &e.zs {
                Some(z) => z.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                None => serde_json::from_value::<Vec<[f64; 2]>>(info.default_of(Param::Zs).cloned().expect("catalog default"))
                    .expect("catalog default")
                    .into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect(),
            };
            let gate = f64_param(e.threshold, info, Param::Threshold);
            let probe = SemigroupProbe::new(sys.s.clone(), grid, vec![])?;
            plain(up_inequality_check(&sys.t, &probe, &zs, &default_probe_vectors(n), gate, tol)?)
        }
        "weyl" => {
            let (q, p) = position_momentum(n);
            let r = f64_param(e.radius, info, Param::Radius);
            let st = square_grid(r, usize_param(e.grid_points, info, Param::GridPoints));
            let probe = SemigroupProbe::new(p.clone(), vec![], st.clone())?;
            let report = check_weyl(&p, &q, &probe, &low_mode_vectors(n, WEYL_MODES), tol)?;
            let base = usize_param(e.trend_base_n, info, Param::TrendBaseN);
            let data = if base >= WEYL_MODES && base < n {
                let base_residual = boson_weyl_residual(base, &st, WEYL_MODES)?;
                let residual = report.worst();
                Some(json!({
                    "residual": residual,
                    "base_n": base,
                    "base_residual": base_residual,
                    "ratio": residual / base_residual,
                }))
            } else {
                None
            };
            Ok((report, data))
        }
        "weak_weyl" => {
            let (q, p) = position_momentum(n);
            let r = f64_param(e.radius, info, Param::Radius);
            let ts = linspace(-r, r, usize_param(e.grid_points, info, Param::GridPoints));
            let probe = SemigroupProbe::new(p.clone(), vec![], ts.into_iter().map(|t| (0.0, t)).collect())?;
            plain(check_weak_weyl(&p, &q, &probe, &low_mode_vectors(n, WEYL_MODES), tol)?)
        }
        "decay" => {
            let neg_x = Operator::new("-X", -sys.x.matrix.clone())?;
            let probe = SemigroupProbe::new(neg_x, alpha_grid(e, info), vec![])?;
            let xi = (linalg::basis_vector(n, 0) + linalg::basis_vector(n, 1)) * c(std::f64::consts::FRAC_1_SQRT_2);
            let tr = decay_probe(&probe, &xi, tol)?;
            let mut report = CheckReport::new("decay", tol);
            report.record("final_value", *tr.values.last().expect("non-empty grid"));
            report.diagnostic("growth_m", tr.growth.m);
            report.diagnostic("growth_omega", tr.growth.omega);
            let data = json!({
                "verdict": tr.verdict,
                "first_below": tr.first_below(),
                "uniformly_bounded": tr.uniformly_bounded,
                "alphas": tr.alphas,
                "values": tr.values,
            });
            Ok((report, Some(data)))
        }
        "drift" => {
            let (q, p) = position_momentum(n);
            let r = f64_param(e.radius, info, Param::Radius);
            let s = linspace(-r, r, usize_param(e.grid_points, info, Param::GridPoints));
            let window_tol = f64_param(e.threshold, info, Param::Threshold);
            let tr = drift_probe(&p, &q, &s, &linalg::basis_vector(n, 0), window_tol)?;
            let mut report = CheckReport::new("drift", tol);
            report.record("slope_deviation", tr.slope_deviation);
            report.diagnostic("slope", tr.slope);
            report.diagnostic("window", tr.window);
            let data = json!({
                "slope": tr.slope,
                "window": tr.window,
                "hypothesis_ok": tr.hypothesis_ok,
                "s": tr.s,
                "values": tr.values,
            });
            Ok((report, Some(data)))
        }
        other => Err(nlpb_core::Error::InvalidArgument(format!("unknown check `{other}`"))),
    }
}

fn alpha_grid(e: &CheckEntry, info: &CheckInfo) -> Vec<f64> {
    let max = f64_param(e.alpha_max, info, Param::AlphaMax);
    linspace(0.0, max, usize_param(e.grid_points, info, Param::GridPoints))
}

/// `0`, `−1` and the midpoints between consecutive distinct α values.
pub fn default_lambdas(alpha: &[f64]) -> Vec<Complex64> {
    let mut sorted = alpha.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut out = vec![c(0.0), c(-1.0)];
    out.extend(sorted.windows(2).map(|w| c(0.5 * (w[0] + w[1]))));
    out
}

/// Aligned summary table.
pub fn render_table(report: &RunReport) -> String {
    let mut rows = vec![[
        "check".to_string(),
        "module".into(),
        "status".into(),
        "worst".into(),
        "tolerance".into(),
        "ms".into(),
    ]];
    for (c, ms) in report.checks.iter().zip(&report.timing.checks_ms) {
        let status = match (c.error.is_some(), c.passed, c.probe) {
            (true, _, false) => "ERROR",
            (true, _, true) => "probe:error",
            (false, true, false) => "PASS",
            (false, false, false) => "FAIL",
            (false, true, true) => "probe:ok",
            (false, false, true) => "probe:flag",
        };
        let (worst, tol) = match &c.report {
            Some(r) => (format!("{:.3e}", r.worst()), format!("{:.3e}", r.tolerance)),
            None => ("-".into(), "-".into()),
        };
        rows.push([c.id.clone(), c.module.clone(), status.into(), worst, tol, format!("{ms:.1}")]);
    }
    let widths: Vec<usize> = (0..6).map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    for c in &report.checks {
        if let Some(err) = &c.error {
            out.push_str(&format!("{}: {err}\n", c.id));
        } else if let Some(w) = c.report.as_ref().filter(|r| !r.passed).and_then(|r| r.witness.as_ref()) {
            out.push_str(&format!("{}: worst at {w}\n", c.id));
        }
    }
    out.push_str(&format!(
        "verdict: {}  ({} checks, {:.1} ms)\n",
        match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        },
        report.checks.len(),
        report.timing.total_ms
    ));
    out
}

/// Catalog as pretty JSON.
pub fn list_checks() -> String {
    serde_json::to_string_pretty(&catalog::catalog()).expect("catalog serializes") + "\n"
}
