//! The desk-scale verification suite behind `verify-paper`.
//!
//! Each numbered criterion expands into one check per instance. Checks are
//! deterministic given the seed and mode; wall-clock timings are kept out of
//! the serialized report.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    lambda0_residual, linear_grid, mgf_chain_check, mgf_inequality_check, solve_lambda0, variance_bound_check,
};
use crate::curvature::{check_diameter_bound, check_lipschitz_contraction, ricci_lower_bound, LowerBoundOptions};
use crate::error::{Error, Result};
use crate::experiments::{estimate_pattern_tail, TailOptions};
use crate::geometrize::{build, paper_coupling, GeometrizedSpace, Model};
use crate::observables::{claimed_lipschitz_constant, verify_lipschitz, LipschitzMode, PatternSpec, SmallGraph};
use crate::scalar::{ratio, Rational, Scalar};
use crate::state_space::{
    random_lipschitz_function, stationary_distribution, SparseDistribution, StateFunction, StateGraph, WalkKernel,
};
use crate::transport::{coupling_cost, kantorovich_dual, validate_coupling, wasserstein};

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Gnp,
    Gnm,
    Hyper,
    Dout,
    Perm,
    Transport,
    Bounds,
}

impl Group {
    pub const ALL: [Group; 7] =
        [Group::Gnp, Group::Gnm, Group::Hyper, Group::Dout, Group::Perm, Group::Transport, Group::Bounds];

    pub fn name(self) -> &'static str {
        match self {
            Group::Gnp => "gnp",
            Group::Gnm => "gnm",
            Group::Hyper => "hyper",
            Group::Dout => "dout",
            Group::Perm => "perm",
            Group::Transport => "transport",
            Group::Bounds => "bounds",
        }
    }

    fn of(model: &Model) -> Group {
        match model {
            Model::Gnp { .. } => Group::Gnp,
            Model::GnM { .. } => Group::Gnm,
            Model::Hypergraph { .. } => Group::Hyper,
            Model::DOutRegular { .. } => Group::Dout,
            Model::PermInsertion { .. } | Model::PermTransposition { .. } => Group::Perm,
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown group '{s}' (expected one of gnp, gnm, hyper, dout, perm, transport, bounds)")))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    #[default]
    Rational,
    Float,
}

impl FromStr for ArithmeticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(ArithmeticMode::Rational),
            "float" => Ok(ArithmeticMode::Float),
            _ => Err(Error::Parse(format!("unknown mode '{s}' (expected rational or float)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub mode: ArithmeticMode,
    /// Restrict to these groups; `None` runs everything.
    pub only: Option<Vec<Group>>,
    /// Direct samples per envelope instance.
    pub samples: usize,
    pub cap: u128,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, mode: ArithmeticMode::default(), only: None, samples: 100_000, cap: crate::geometrize::enumeration_cap() }
    }

    fn selects(&self, group: Group) -> bool {
        self.only.as_ref().is_none_or(|gs| gs.contains(&group))
    }

    fn rng(&self, criterion: u8, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::from(criterion) << 32 | index as u64);
        rng
    }

    pub fn meta(&self) -> Value {
        json!({
            "tool": "ricci-conc",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "mode": self.mode,
            "only": self.only.as_ref().map(|gs| gs.iter().map(|g| g.name()).collect::<Vec<_>>()),
            "samples": self.samples,
            "cap": self.cap.to_string(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub id: String,
    pub group: Group,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn new(meta: Option<Value>, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let failed = checks.len() - passed;
        Self { meta, checks, passed, failed, all_passed: failed == 0 }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Plain-text pass/fail table, including timings.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(2).max(5);
        let mut out = format!("{:>3}  {:<width$}  {:<4}  {:>9}  {}\n", "#", "check", "ok", "time", "name");
        for c in &self.checks {
            out.push_str(&format!(
                "{:>3}  {:<width$}  {:<4}  {:>7}ms  {}\n",
                c.criterion,
                c.id,
                if c.passed { "pass" } else { "FAIL" },
                c.elapsed.as_millis(),
                c.name
            ));
        }
        out.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        out
    }
}

/// Instances whose curvature lemma is checked exactly, with the model group.
pub fn lemma_instances() -> Vec<Model> {
    vec![
        Model::Gnp { n: 3, p: ratio(3, 10) },
        Model::Gnp { n: 3, p: ratio(1, 2) },
        Model::GnM { n: 4, m: 2 },
        Model::GnM { n: 4, m: 3 },
        Model::Hypergraph { n: 4, k: 3, m: 2 },
        Model::DOutRegular { n: 3, d: 1 },
        Model::DOutRegular { n: 4, d: 1 },
        Model::PermInsertion { n: 3 },
        Model::PermInsertion { n: 4 },
    ]
}

fn lemma_group(criterion: u8) -> Option<Group> {
    match criterion {
        1 => Some(Group::Gnp),
        2 => Some(Group::Gnm),
        3 => Some(Group::Hyper),
        4 => Some(Group::Dout),
        5 => Some(Group::Perm),
        _ => None,
    }
}

/// Runs every criterion selected by the configuration.
pub fn run(config: &VerifyConfig) -> Vec<CheckResult> {
    CRITERIA.flat_map(|c| run_criterion(c, config)).collect()
}

type Outcome = Result<(bool, Value)>;

/// Runs one criterion; instances outside the configured groups are skipped.
pub fn run_criterion(criterion: u8, config: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut push = |id: String, group: Group, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if !config.selects(group) {
            return;
        }
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        out.push(CheckResult {
            criterion,
            id: format!("{criterion}:{id}"),
            group,
            name: name.to_string(),
            passed,
            detail,
            elapsed: start.elapsed(),
        });
    };
    let instances = lemma_instances();
    let mut per_instance = |name: &str, check: &dyn Fn(usize, &Model) -> Outcome| {
        for (i, model) in instances.iter().enumerate() {
            push(model.to_string(), Group::of(model), name, &mut || check(i, model));
        }
    };
    match criterion {
        1..=5 => {
            let group = lemma_group(criterion).expect("lemma criterion");
            for model in instances.iter().filter(|m| Group::of(m) == group) {
                push(model.to_string(), group, "curvature lemma (exact min edge curvature >= claimed bound)", &mut || {
                    let s = instance_curvature(model, config)?;
                    Ok((s.meets_claim, s.detail))
                });
            }
        }
        6 => per_instance("invariance of the claimed measure", &|_, model| invariance_check(model, config)),
        7 => per_instance("proof couplings valid with cost <= 1 - claimed bound", &|_, model| {
            coupling_check(model, config)
        }),
        8 => push("random-pairs".into(), Group::Transport, "strong duality (primal = dual)", &mut || {
            duality_check(config)
        }),
        9 => push("lambda0".into(), Group::Bounds, "tail bound constants (lambda0 values, residual, lambda0/4 > 1/7)", &mut || {
            constants_check()
        }),
        10 => per_instance("MGF lemma and variance bound on random 1-Lipschitz functions", &|i, model| {
            mgf_check(model, config, config.rng(10, i))
        }),
        11 => per_instance("Lipschitz contraction (Mf is (1 - kappa)-Lipschitz)", &|i, model| {
            contraction_check(model, config, config.rng(11, i))
        }),
        12 => {
            for (model, obs, c) in lipschitz_instances() {
                push(format!("{model}/{}", obs.id()), Group::of(&model), "observable Lipschitz constant (exhaustive)", &mut || {
                    lipschitz_check(&model, &obs, c, config)
                });
            }
        }
        13 => {
            for (model, obs) in envelope_instances() {
                push(format!("{model}/{}", obs.id()), Group::of(&model), "concentration envelope (upper CI <= 2exp(-t^2 kappa/7))", &mut || {
                    envelope_check(&model, &obs, config)
                });
            }
        }
        14 => per_instance("edge-to-pair reduction on sampled non-adjacent pairs", &|_, model| {
            let s = instance_curvature(model, config)?;
            Ok((s.pairs_ok, json!({ "pairs_checked": s.pairs_checked, "min_pair_kappa": s.min_pair_kappa, "min_edge_kappa": s.kappa_f64 })))
        }),
        15 => per_instance("diameter bound kappa <= 2/diam", &|_, model| {
            let s = instance_curvature(model, config)?;
            Ok((s.diameter_ok, s.diameter))
        }),
        _ => {}
    }
    out
}

struct CurvatureSummary {
    meets_claim: bool,
    kappa_f64: f64,
    detail: Value,
    pairs_ok: bool,
    pairs_checked: usize,
    min_pair_kappa: Option<f64>,
    diameter_ok: bool,
    diameter: Value,
}

fn instance_curvature(model: &Model, config: &VerifyConfig) -> Result<CurvatureSummary> {
    let space = build(model, config.cap)?;
    let claimed = model.claimed_kappa_lb().ok_or_else(|| Error::MissingKappa(model.to_string()))?;
    match config.mode {
        ArithmeticMode::Rational => summarize(&space, space.kernel(), &claimed, config.seed),
        ArithmeticMode::Float => summarize(&space, space.kernel_f64(), &claimed, config.seed),
    }
}

fn summarize<T: Scalar>(
    space: &GeometrizedSpace,
    kernel: &WalkKernel<T>,
    claimed: &Rational,
    seed: u64,
) -> Result<CurvatureSummary> {
    let g = space.graph();
    let options = LowerBoundOptions { sample_pairs: 100, seed, certificates: false };
    let (report, pairs_ok) = match ricci_lower_bound(g, kernel, options) {
        Ok(r) => (r, true),
        Err(Error::LemmaViolation { .. }) => {
            (ricci_lower_bound(g, kernel, LowerBoundOptions { sample_pairs: 0, ..options })?, false)
        }
        Err(e) => return Err(e),
    };
    let kappa = report.global_lb.clone();
    let claimed_t = T::from_rational(claimed);
    let meets_claim = !(claimed_t - kappa.clone()).is_significant();
    let (diameter_ok, diameter) = match check_diameter_bound(g, kernel, &kappa) {
        Ok(v) => (true, serde_json::to_value(v)?),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    let min_pair_kappa = report.min_pair_kappa.as_ref().map(Scalar::to_f64);
    let pairs_ok = pairs_ok && min_pair_kappa.is_none_or(|k| k >= kappa.to_f64() - 1e-9);
    Ok(CurvatureSummary {
        meets_claim,
        kappa_f64: kappa.to_f64(),
        detail: json!({
            "states": space.state_count(),
            "edges": g.edge_count(),
            "min_edge_kappa": kappa.to_json(),
            "claimed_kappa_lb": claimed.to_json(),
            "argmin_edge": [report.argmin.edge.0, report.argmin.edge.1],
        }),
        pairs_ok,
        pairs_checked: report.pairs_checked,
        min_pair_kappa,
        diameter_ok,
        diameter,
    })
}

fn invariance_check(model: &Model, config: &VerifyConfig) -> Result<(bool, Value)> {
    let space = build(model, config.cap)?;
    let claimed = space.claimed_nu_vector();
    let dense = |d: SparseDistribution<Rational>| {
        let mut v = vec![Rational::from_i64(0); space.state_count()];
        for (s, w) in d.entries() {
            v[*s] = w.clone();
        }
        v
    };
    match config.mode {
        ArithmeticMode::Rational => {
            let nu = dense(stationary_distribution(space.kernel())?);
            let mismatches = nu.iter().zip(&claimed).filter(|(a, b)| a != b).count();
            Ok((mismatches == 0, json!({ "states": nu.len(), "mismatched_states": mismatches })))
        }
        ArithmeticMode::Float => {
            let nu = stationary_distribution(space.kernel_f64())?;
            let mut v = vec![0.0; space.state_count()];
            for (s, w) in nu.entries() {
                v[*s] = *w;
            }
            let linf = v.iter().zip(&claimed).map(|(a, b)| (a - b.to_f64()).abs()).fold(0.0, f64::max);
            Ok((linf <= 1e-10, json!({ "states": v.len(), "linf_error": linf })))
        }
    }
}

fn coupling_check(model: &Model, config: &VerifyConfig) -> Result<(bool, Value)> {
    let space = build(model, config.cap)?;
    let claimed = model.claimed_kappa_lb().ok_or_else(|| Error::MissingKappa(model.to_string()))?;
    let edges = space.graph().edges();
    let mut worst_cost = Rational::from_i64(0);
    let mut failures = Vec::new();
    for &(x, y) in &edges {
        let a = paper_coupling(&space, x, y)?;
        let (valid, cost) = match config.mode {
            ArithmeticMode::Rational => {
                let ok = validate_coupling(&a, space.kernel().row(x), space.kernel().row(y));
                (ok.map_err(|v| v.to_string()), coupling_cost(&a, space.graph())?)
            }
            ArithmeticMode::Float => {
                let af = a.to_f64();
                let ok = validate_coupling(&af, space.kernel_f64().row(x), space.kernel_f64().row(y));
                (ok.map_err(|v| v.to_string()), coupling_cost(&a, space.graph())?)
            }
        };
        let too_costly = cost > Rational::from_i64(1) - claimed.clone();
        if let Err(reason) = valid {
            failures.push(json!({ "edge": [x, y], "reason": reason }));
        } else if too_costly {
            failures.push(json!({ "edge": [x, y], "reason": format!("cost {} exceeds 1 - claimed", cost.display()) }));
        }
        if cost > worst_cost {
            worst_cost = cost;
        }
    }
    Ok((
        failures.is_empty(),
        json!({
            "edges": edges.len(),
            "max_cost": worst_cost.to_json(),
            "allowed": (Rational::from_i64(1) - claimed).to_json(),
            "failures": failures,
        }),
    ))
}

/// A connected random graph on `n` states: a random tree plus sparse extra edges.
fn random_connected_graph<R: Rng>(n: usize, rng: &mut R) -> Result<StateGraph> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.08) {
                edges.push((a, b));
            }
        }
    }
    StateGraph::from_edges(n, edges)
}

fn random_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<(usize, i64)> {
    let size = rng.random_range(1..=n.min(6));
    let mut support: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.random_range(i..n);
        support.swap(i, j);
    }
    support[..size].iter().map(|&s| (s, rng.random_range(1..=20))).collect()
}

fn duality_check(config: &VerifyConfig) -> Result<(bool, Value)> {
    let mut rng = config.rng(8, 0);
    let mut worst_gap = 0.0f64;
    let mut worst_excess = 0.0f64;
    let mut exact_mismatches = 0usize;
    let trials = 100;
    for _ in 0..trials {
        let n = rng.random_range(2..=30);
        let g = random_connected_graph(n, &mut rng)?;
        let w1 = random_weights(n, &mut rng);
        let w2 = random_weights(n, &mut rng);
        match config.mode {
            ArithmeticMode::Rational => {
                let dist = |w: &[(usize, i64)]| {
                    let total: i64 = w.iter().map(|(_, x)| x).sum();
                    SparseDistribution::new(w.iter().map(|&(s, x)| (s, ratio(x, total))).collect())
                };
                let (m1, m2) = (dist(&w1)?, dist(&w2)?);
                let primal = wasserstein(&m1, &m2, &g)?.distance;
                let (dual, potential) = kantorovich_dual(&m1, &m2, &g)?;
                if primal != dual || potential.lipschitz_excess(&g) > Rational::from_i64(0) {
                    exact_mismatches += 1;
                }
                worst_gap = worst_gap.max((primal - dual).to_f64().abs());
            }
            ArithmeticMode::Float => {
                let dist = |w: &[(usize, i64)]| {
                    let total: i64 = w.iter().map(|(_, x)| x).sum();
                    SparseDistribution::new(w.iter().map(|&(s, x)| (s, x as f64 / total as f64)).collect())
                };
                let (m1, m2) = (dist(&w1)?, dist(&w2)?);
                let primal = wasserstein(&m1, &m2, &g)?.distance;
                let (dual, potential) = kantorovich_dual(&m1, &m2, &g)?;
                worst_gap = worst_gap.max((primal - dual).abs());
                worst_excess = worst_excess.max(potential.lipschitz_excess(&g));
            }
        }
    }
    let passed = worst_gap <= 1e-9 && worst_excess <= 1e-9 && exact_mismatches == 0;
    Ok((passed, json!({ "trials": trials, "max_gap": worst_gap, "max_lipschitz_excess": worst_excess })))
}

fn constants_check() -> Result<(bool, Value)> {
    let l1 = solve_lambda0(1.0)?;
    let l0 = solve_lambda0(0.0)?;
    let r1 = lambda0_residual(1.0, l1);
    let r0 = lambda0_residual(0.0, l0);
    let mut min_ratio = f64::INFINITY;
    let mut max_residual = r1.max(r0);
    for i in 1..=100 {
        let kappa = i as f64 / 100.0;
        let l = solve_lambda0(kappa)?;
        max_residual = max_residual.max(lambda0_residual(kappa, l));
        min_ratio = min_ratio.min(l / 4.0);
    }
    let passed = (l1 - 0.60108).abs() <= 1e-4
        && (l0 - 0.80290).abs() <= 1e-4
        && max_residual <= 1e-12
        && min_ratio > 1.0 / 7.0;
    Ok((passed, json!({ "lambda0_at_1": l1, "lambda0_at_0": l0, "max_residual": max_residual, "min_lambda0_over_4": min_ratio })))
}

fn mgf_check(model: &Model, config: &VerifyConfig, mut rng: ChaCha8Rng) -> Result<(bool, Value)> {
    let space = build(model, config.cap)?;
    let g = space.graph();
    let m = space.kernel_f64();
    let kappa = model.claimed_kappa_lb().ok_or_else(|| Error::MissingKappa(model.to_string()))?.to_f64();
    let nu: Vec<f64> = space.claimed_nu_vector().iter().map(Scalar::to_f64).collect();
    let lambdas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let (mut worst_ratio, mut worst_var, mut worst_chain) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..50 {
        let phi = StateFunction::new(random_lipschitz_function(g, 1.0, &mut rng));
        for &lambda in &lambdas {
            worst_ratio = worst_ratio.max(mgf_inequality_check(g, m, &phi, lambda, 1.0)?.worst_ratio);
            let chain = mgf_chain_check(g, &nu, &phi, lambda, kappa)?;
            worst_chain = worst_chain.max(chain.log_mgf - chain.series_exponent);
        }
        worst_var = worst_var.max(variance_bound_check(g, m, &phi, 1.0)?.max_second_moment);
    }
    Ok((
        true,
        json!({ "functions": 50, "lambdas": lambdas, "worst_mgf_ratio": worst_ratio, "max_second_moment": worst_var, "worst_chain_gap": worst_chain }),
    ))
}

fn contraction_check(model: &Model, config: &VerifyConfig, mut rng: ChaCha8Rng) -> Result<(bool, Value)> {
    let space = build(model, config.cap)?;
    let g = space.graph();
    let kappa = model.claimed_kappa_lb().ok_or_else(|| Error::MissingKappa(model.to_string()))?;
    let mut worst = 0.0f64;
    let mut bound = 0.0f64;
    for _ in 0..200 {
        let f = random_lipschitz_function(g, 1.0, &mut rng);
        let verdict = match config.mode {
            ArithmeticMode::Float => {
                check_lipschitz_contraction(g, space.kernel_f64(), &StateFunction::new(f), &1.0, &kappa.to_f64())?
            }
            ArithmeticMode::Rational => {
                // Shrink, then round to multiples of 2^-10: differences stay ≤ 1 exactly.
                let values = f
                    .iter()
                    .map(|v| Rational::from_i64((v * (1.0 - 2f64.powi(-9)) * 1024.0).round() as i64) / Rational::from_i64(1024))
                    .collect();
                check_lipschitz_contraction(g, space.kernel(), &StateFunction::new(values), &Rational::from_i64(1), &kappa)?
            }
        };
        worst = worst.max(verdict.max_difference);
        bound = verdict.bound;
    }
    Ok((true, json!({ "functions": 200, "max_difference": worst, "bound": bound })))
}

/// (model, observable, Lipschitz constant) triples checked exhaustively.
pub fn lipschitz_instances() -> Vec<(Model, PatternSpec, u128)> {
    vec![
        (Model::GnM { n: 5, m: 4 }, PatternSpec::Subgraph(SmallGraph::complete(3).expect("K3")), 5),
        (Model::DOutRegular { n: 4, d: 1 }, PatternSpec::DirectedTriangles, 1),
        (Model::PermInsertion { n: 5 }, PatternSpec::Permutation(vec![1, 0]), 4),
    ]
}

fn lipschitz_check(model: &Model, obs: &PatternSpec, c: u128, config: &VerifyConfig) -> Result<(bool, Value)> {
    let claimed = claimed_lipschitz_constant(obs, model)?;
    let report = verify_lipschitz(model, |x| obs.evaluate(x).map(|v| v as f64), c as f64, LipschitzMode::Exhaustive { cap: config.cap })?;
    Ok((claimed == c, json!({ "constant": c, "claimed": claimed.to_string(), "report": report })))
}

/// (model, observable) pairs for the Monte Carlo envelope.
pub fn envelope_instances() -> Vec<(Model, PatternSpec)> {
    vec![
        (Model::PermInsertion { n: 7 }, PatternSpec::Permutation(vec![1, 0])),
        (Model::GnM { n: 10, m: 20 }, PatternSpec::Subgraph(SmallGraph::complete(3).expect("K3"))),
    ]
}

fn envelope_check(model: &Model, obs: &PatternSpec, config: &VerifyConfig) -> Result<(bool, Value)> {
    let kappa = model.claimed_kappa_lb().ok_or_else(|| Error::MissingKappa(model.to_string()))?.to_f64();
    let grid = linear_grid(1.0, 2.0 / kappa, 10);
    let options = TailOptions { exact_kappa: None, exact_mean_cap: Some(config.cap) };
    let report = estimate_pattern_tail(model, obs, &grid, config.samples, config.seed, &options)?;
    Ok((report.envelope_satisfied, serde_json::to_value(&report)?))
}
