//! Registry of the checks a scenario can request.

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    Tolerance,
    Trials,
    KMax,
    Lambdas,
    Zs,
    AlphaMax,
    GridPoints,
    Radius,
    Threshold,
    TrendBaseN,
    Exact,
}

impl Param {
    pub fn key(self) -> &'static str {
        match self {
            Param::Tolerance => "tolerance",
            Param::Trials => "trials",
            Param::KMax => "k_max",
            Param::Lambdas => "lambdas",
            Param::Zs => "zs",
            Param::AlphaMax => "alpha_max",
            Param::GridPoints => "grid_points",
            Param::Radius => "radius",
            Param::Threshold => "threshold",
            Param::TrendBaseN => "trend_base_n",
            Param::Exact => "exact",
        }
    }
}

/// Default tolerance `base · cond(G)^cond_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefaultTolerance {
    pub base: f64,
    pub cond_power: i32,
}

impl DefaultTolerance {
    pub fn at(self, cond: f64) -> f64 {
        self.base * cond.powi(self.cond_power)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub module: &'static str,
    /// The relation being checked.
    pub anchor: &'static str,
    /// Probes report data and never affect the exit code unless `exact`.
    pub probe: bool,
    pub tolerance: DefaultTolerance,
    /// Accepted overrides with their defaults (`null` when derived from the
    /// scenario).
    #[serde(serialize_with = "params_as_map")]
    pub params: Vec<(Param, Value)>,
}

impl CheckInfo {
    pub fn accepts(&self, p: Param) -> bool {
        p == Param::Tolerance || self.params.iter().any(|(q, _)| *q == p)
    }

    pub fn default_of(&self, p: Param) -> Option<&Value> {
        self.params.iter().find(|(q, _)| *q == p).map(|(_, v)| v)
    }
}

fn params_as_map<S: serde::Serializer>(params: &[(Param, Value)], ser: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = ser.serialize_map(Some(params.len()))?;
    for (p, v) in params {
        map.serialize_entry(p.key(), v)?;
    }
    map.end()
}

fn tol(base: f64, cond_power: i32) -> DefaultTolerance {
    DefaultTolerance { base, cond_power }
}

fn info(
    id: &'static str,
    module: &'static str,
    anchor: &'static str,
    tolerance: DefaultTolerance,
    params: Vec<(Param, Value)>,
) -> CheckInfo {
    CheckInfo {
        id,
        module,
        anchor,
        probe: false,
        tolerance,
        params,
    }
}

fn probe(id: &'static str, anchor: &'static str, tolerance: DefaultTolerance, mut params: Vec<(Param, Value)>) -> CheckInfo {
    params.push((Param::Exact, json!(false)));
    CheckInfo {
        id,
        module: "semigroup",
        anchor,
        probe: true,
        tolerance,
        params,
    }
}

/// All checks, in a stable order.
pub fn catalog() -> Vec<CheckInfo> {
    vec![
        info("biorthogonality", "space", "<phi_i, psi_j> = delta_ij", tol(1e-12, 1), vec![]),
        info(
            "projection_family",
            "rankone",
            "R_k = psi_k (x) conj(phi_k): R_k^2 = R_k, R_k* = phi_k (x) conj(psi_k), ||R_k|| = ||phi_k|| ||psi_k||, R_k R_m = 0, sum R_k = I",
            tol(1e-10, 1),
            vec![],
        ),
        info(
            "x_adjoint",
            "rankone",
            "X* = sum alpha_k phi_k (x) conj(psi_k); X psi_k = alpha_k psi_k; X* phi_k = alpha_k phi_k",
            tol(1e-10, 1),
            vec![],
        ),
        info(
            "resolvent",
            "rankone",
            "(X - lambda) Z = I with Z = sum (alpha_k - lambda)^-1 psi_k (x) conj(phi_k)",
            tol(1e-8, 1),
            vec![(Param::Lambdas, Value::Null)],
        ),
        info(
            "nonlinear_cr2",
            "commutator",
            "<T xi, S* eta> - <S xi, T* eta> = <xi, X eta>",
            tol(1e-10, 2),
            vec![(Param::Trials, json!(100))],
        ),
        info(
            "canonical_cr2",
            "commutator",
            "<T xi, S* eta> - <S xi, T* eta> = <xi, eta> (X = I)",
            tol(1e-12, 2),
            vec![(Param::Trials, json!(100))],
        ),
        info(
            "iterated_identity",
            "commutator",
            "S T^k xi - T^k S xi = sum_{l<k} T^(k-1-l) X* T^l xi",
            tol(1e-8, 2),
            vec![(Param::KMax, Value::Null)],
        ),
        info(
            "mu_chain",
            "commutator",
            "X* T^k phi_0 = mu_k T^k phi_0; S T (T^k phi_0) = M_k T^k phi_0; T S (T^(k+1) phi_0) = M_k T^(k+1) phi_0; M_k = eps_(k+1)",
            tol(1e-8, 2),
            vec![(Param::KMax, Value::Null)],
        ),
        info(
            "ladder_equivalence",
            "ladder",
            "T phi_n = gamma_n phi_(n+1) <=> X* (T phi_n) eigen-relation; S <-> T biconditional",
            tol(1e-10, 2),
            vec![],
        ),
        info(
            "number_operators",
            "ladder",
            "N_l phi_n = gamma_(n-1) conj(gamma~_(n-1)) phi_n, N_r phi_n = gamma_n conj(gamma~_n) phi_n and the # counterparts on psi_n",
            tol(1e-12, 2),
            vec![],
        ),
        info(
            "reconstruction",
            "ladder",
            "phi_n = T^n phi_0 / (gamma_0 ... gamma_(n-1)), psi_n likewise from S*",
            tol(1e-8, 2),
            vec![],
        ),
        info(
            "alpha_recursion",
            "ladder",
            "alpha_n = gamma_n conj(gamma~_n) - sum_{k<n} alpha_k",
            tol(1e-12, 0),
            vec![],
        ),
        info("spectrum", "spectral", "sigma(X) = {alpha_k}", tol(1e-8, 0), vec![]),
        info(
            "norm_bound",
            "spectral",
            "||X|| <= cond(G) max alpha; ||G X G^-1|| = max alpha",
            tol(1e-12, 0),
            vec![],
        ),
        info(
            "intertwiners",
            "intertwine",
            "S_phi psi_k = phi_k, S_psi phi_k = psi_k, S_phi S_psi = I",
            tol(1e-11, 2),
            vec![],
        ),
        info(
            "riesz_intertwiners",
            "intertwine",
            "S_phi = G^2, S_psi = G^-2",
            tol(1e-11, 1),
            vec![],
        ),
        info(
            "weak_intertwining",
            "intertwine",
            "N S_phi psi_k = S_phi N^# psi_k, N^# S_psi phi_k = S_psi N phi_k",
            tol(1e-9, 2),
            vec![],
        ),
        probe(
            "cr3",
            "e^(alpha S) T - T e^(alpha S) = alpha e^(alpha S)",
            tol(1e-8, 0),
            vec![(Param::AlphaMax, json!(2.0)), (Param::GridPoints, json!(5))],
        ),
        probe(
            "up_inequality",
            "alpha |<V xi, xi>| <= 2 max(||(T - z) xi||, ||(T* - conj z) xi||) max(||V xi||, ||V* xi||)",
            tol(1e-10, 0),
            vec![
                (Param::AlphaMax, json!(2.0)),
                (Param::GridPoints, json!(5)),
                (Param::Zs, json!([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])),
                (Param::Threshold, json!(1e-8)),
            ],
        ),
        probe(
            "weyl",
            "e^(itH) e^(-isT) = e^(-its) e^(-isT) e^(itH), H = p, T = q",
            tol(1e-6, 0),
            vec![
                (Param::Radius, json!(1.0)),
                (Param::GridPoints, json!(5)),
                (Param::TrendBaseN, json!(16)),
            ],
        ),
        probe(
            "weak_weyl",
            "<e^(-itH) xi, T eta> = <(T + t) xi, e^(itH) eta>, H = p, T = q",
            tol(1e-6, 0),
            vec![(Param::Radius, json!(1.0)), (Param::GridPoints, json!(5))],
        ),
        probe(
            "decay",
            "|<e^(-alpha X) xi, xi>| -> 0 for a uniformly bounded semigroup",
            tol(1e-6, 0),
            vec![(Param::AlphaMax, json!(30.0)), (Param::GridPoints, json!(31))],
        ),
        probe(
            "drift",
            "<e^(-isT) xi, H e^(-isT) xi> = <H xi, xi> - s, H = p, T = q",
            tol(0.05, 0),
            vec![
                (Param::Radius, json!(2.0)),
                (Param::GridPoints, json!(21)),
                (Param::Threshold, json!(1e-6)),
            ],
        ),
    ]
}

pub fn lookup(id: &str) -> Option<CheckInfo> {
    catalog().into_iter().find(|c| c.id == id)
}
