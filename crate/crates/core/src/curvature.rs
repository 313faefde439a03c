//! Ollivier-Ricci curvature κ(x, y) = 1 − W(m_x, m_y)/d(x, y).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::state_space::{apply_averaging, check_lipschitz, SparseDistribution, State, StateFunction, StateGraph, WalkKernel};
use crate::transport::{wasserstein, Coupling, DualPotential};

/// Tolerance for lemma-style comparisons between computed curvatures.
pub const LEMMA_TOLERANCE: f64 = 1e-9;

fn check_states(g: &StateGraph, xs: &[State]) -> Result<()> {
    for &x in xs {
        if x >= g.state_count() {
            return Err(Error::InvalidState { state: x, count: g.state_count() });
        }
    }
    Ok(())
}

/// κ on an edge: 1 − W(m_x, m_y).
pub fn ricci_edge<T: Scalar>(g: &StateGraph, m: &WalkKernel<T>, x: State, y: State) -> Result<T> {
    check_states(g, &[x, y])?;
    if x == y || !g.has_edge(x, y) {
        return Err(Error::NotAnEdge { x, y });
    }
    let w = wasserstein(m.row(x), m.row(y), g)?.distance;
    Ok(T::one() - w)
}

/// κ for an arbitrary pair of distinct states.
pub fn ricci_pair<T: Scalar>(g: &StateGraph, m: &WalkKernel<T>, x: State, y: State) -> Result<T> {
    check_states(g, &[x, y])?;
    if x == y {
        return Err(Error::NotDistinct(x));
    }
    let d = g.shortest_path_distance(x, y)?;
    let w = wasserstein(m.row(x), m.row(y), g)?.distance;
    Ok(T::one() - w / T::from_i64(d as i64))
}

/// Optimal transport plan and potential behind one edge curvature.
#[derive(Debug, Clone)]
pub struct EdgeCertificate<T = f64> {
    pub edge: (State, State),
    pub kappa: T,
    pub coupling: Coupling<T>,
    pub potential: Option<DualPotential<T>>,
}

impl<T: Scalar> EdgeCertificate<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "edge": [self.edge.0, self.edge.1],
            "kappa": self.kappa.to_json(),
            "coupling": self.coupling.to_json(),
            "potential": self.potential.as_ref().map(|p| p.to_json()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureReport<T = f64> {
    pub per_edge: Vec<((State, State), T)>,
    pub global_lb: T,
    pub argmin: EdgeCertificate<T>,
    pub certificates: Option<Vec<EdgeCertificate<T>>>,
    /// Number of non-adjacent pairs checked against `global_lb`.
    pub pairs_checked: usize,
    /// Smallest pair curvature seen among the checked pairs.
    pub min_pair_kappa: Option<T>,
    pub alpha: Option<T>,
}

impl<T: Scalar> CurvatureReport<T> {
    pub fn argmin_edge(&self) -> (State, State) {
        self.argmin.edge
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "edges": self.per_edge.iter().map(|((x, y), k)| json!([x, y, k.to_json()])).collect::<Vec<_>>(),
            "global_lb": self.global_lb.to_json(),
            "argmin_edge": [self.argmin.edge.0, self.argmin.edge.1],
            "argmin_certificate": self.argmin.to_json(),
            "pairs_checked": self.pairs_checked,
        });
        if let Some(alpha) = &self.alpha {
            out["alpha"] = alpha.to_json();
        }
        if let Some(certs) = &self.certificates {
            out["certificates"] = Value::Array(certs.iter().map(|c| c.to_json()).collect());
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LowerBoundOptions {
    /// Non-adjacent pairs sampled to validate the edge-reduction lemma.
    pub sample_pairs: usize,
    pub seed: u64,
    /// Keep the optimal coupling of every edge, not only the arg-min.
    pub certificates: bool,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        Self { sample_pairs: 100, seed: 0, certificates: false }
    }
}

/// Minimum edge curvature, certified at the arg-min edge, then validated on
/// sampled non-adjacent pairs (κ(x, y) ≥ min over edges).
pub fn ricci_lower_bound<T: Scalar>(
    g: &StateGraph,
    m: &WalkKernel<T>,
    options: LowerBoundOptions,
) -> Result<CurvatureReport<T>> {
    if m.state_count() != g.state_count() {
        return Err(Error::KernelShape { rows: m.state_count(), states: g.state_count() });
    }
    if !g.is_connected() {
        return Err(Error::GraphDisconnected);
    }
    let edges = g.edges();
    if edges.is_empty() {
        return Err(Error::BadParams("graph has no edges between distinct states".into()));
    }
    let certs: Vec<EdgeCertificate<T>> = edges
        .par_iter()
        .map(|&(x, y)| {
            let r = wasserstein(m.row(x), m.row(y), g)?;
            Ok(EdgeCertificate {
                edge: (x, y),
                kappa: T::one() - r.distance,
                coupling: r.optimal_coupling,
                potential: r.dual_potential,
            })
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, c) in certs.iter().enumerate() {
        if c.kappa < certs[best].kappa {
            best = i;
        }
    }
    let global_lb = certs[best].kappa.clone();
    let argmin = certs[best].clone();
    let per_edge = certs.iter().map(|c| (c.edge, c.kappa.clone())).collect();

    let pairs = sample_non_adjacent_pairs(g, options.sample_pairs, options.seed);
    let checked: Vec<(State, State, T)> = pairs
        .par_iter()
        .map(|&(x, y)| ricci_pair(g, m, x, y).map(|k| (x, y, k)))
        .collect::<Result<_>>()?;
    let slack = T::from_f64(LEMMA_TOLERANCE);
    for (x, y, k) in &checked {
        let shortfall = global_lb.clone() - k.clone();
        if shortfall > slack || (T::EXACT && shortfall > T::zero()) {
            return Err(Error::LemmaViolation { x: *x, y: *y, kappa: k.to_f64(), lower_bound: global_lb.to_f64() });
        }
    }
    let min_pair_kappa = checked
        .iter()
        .map(|(_, _, k)| k.clone())
        .fold(None, |acc: Option<T>, k| match acc {
            Some(a) if a <= k => Some(a),
            _ => Some(k),
        });

    Ok(CurvatureReport {
        per_edge,
        global_lb,
        argmin,
        certificates: options.certificates.then_some(certs),
        pairs_checked: checked.len(),
        min_pair_kappa,
        alpha: None,
    })
}

/// Up to `count` distinct non-adjacent pairs (x < y), drawn with a seeded RNG.
/// Small graphs are enumerated and subsampled so the result never loops.
pub fn sample_non_adjacent_pairs(g: &StateGraph, count: usize, seed: u64) -> Vec<(State, State)> {
    let n = g.state_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if count == 0 || n < 2 {
        return Vec::new();
    }
    let total_pairs = n * (n - 1) / 2;
    if total_pairs <= 4 * count + 64 {
        let all: Vec<(State, State)> = (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .filter(|&(x, y)| !g.has_edge(x, y))
            .collect();
        if all.len() <= count {
            return all;
        }
        let mut picked = rand::seq::index::sample(&mut rng, all.len(), count).into_vec();
        picked.sort_unstable();
        return picked.into_iter().map(|i| all[i]).collect();
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 100 * count {
        attempts += 1;
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        let key = (x.min(y), x.max(y));
        if x == y || g.has_edge(x, y) || !seen.insert(key) {
            continue;
        }
        out.push(key);
    }
    out
}

/// Row x of the α-lazy simple walk (open neighbors only; α = 1 gives δ_x).
fn lazy_row<T: Scalar>(g: &StateGraph, alpha: &T, x: State) -> Result<SparseDistribution<T>> {
    let nbrs = g.neighbors(x);
    if nbrs.is_empty() {
        return Err(Error::IsolatedState(x));
    }
    let step = (T::one() - alpha.clone()) / T::from_i64(nbrs.len() as i64);
    SparseDistribution::from_weights(
        std::iter::once((x, alpha.clone())).chain(nbrs.iter().map(|&v| (v, step.clone()))),
    )
}

fn check_alpha<T: Scalar>(alpha: &T, allow_one: bool) -> Result<()> {
    let ok = *alpha >= T::zero() && (*alpha < T::one() || (allow_one && *alpha == T::one()));
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("laziness {} outside [0,1)", alpha.display())))
    }
}

/// m_x^α(x) = α, m_x^α(v) = (1 − α)/deg(x) for each neighbor v.
pub fn lazy_kernel<T: Scalar>(g: &StateGraph, alpha: T) -> Result<WalkKernel<T>> {
    check_alpha(&alpha, false)?;
    let rows = (0..g.state_count()).map(|x| lazy_row(g, &alpha, x)).collect::<Result<Vec<_>>>()?;
    Ok(WalkKernel::new(rows))
}

/// κ_α(x, y) for the α-lazy simple walk. α = 1 is accepted and gives 0.
pub fn ricci_alpha<T: Scalar>(g: &StateGraph, alpha: T, x: State, y: State) -> Result<T> {
    check_alpha(&alpha, true)?;
    check_states(g, &[x, y])?;
    if x == y {
        return Err(Error::NotDistinct(x));
    }
    let d = g.shortest_path_distance(x, y)?;
    let mx = lazy_row(g, &alpha, x)?;
    let my = lazy_row(g, &alpha, y)?;
    let w = wasserstein(&mx, &my, g)?.distance;
    Ok(T::one() - w / T::from_i64(d as i64))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LlyEstimate {
    /// κ_α/(1 − α) at the largest grid point. An estimate, not the limit.
    pub estimate: f64,
    pub alpha: f64,
    /// (α, κ_α) over the grid.
    pub samples: Vec<(f64, f64)>,
    /// κ_α concave across the grid extended by (1, 0).
    pub concave: bool,
    /// κ_α/(1 − α) nondecreasing along the grid.
    pub ratio_nondecreasing: bool,
}

/// Ratio estimate of lim_{α→1} κ_α/(1 − α) with concavity validation.
pub fn lly_curvature_estimate(g: &StateGraph, x: State, y: State, alphas: &[f64]) -> Result<LlyEstimate> {
    if alphas.len() < 3 {
        return Err(Error::BadGrid("need at least three laziness values".into()));
    }
    if alphas.iter().any(|a| !(0.0..1.0).contains(a)) {
        return Err(Error::BadGrid("laziness values must lie in [0,1)".into()));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadGrid("laziness values must be strictly increasing".into()));
    }
    let top = *alphas.last().unwrap_or(&0.0);
    if top < 0.9 {
        return Err(Error::BadGrid(format!("largest laziness {top} is below 0.9")));
    }
    let samples: Vec<(f64, f64)> = alphas
        .par_iter()
        .map(|&a| ricci_alpha(g, a, x, y).map(|k| (a, k)))
        .collect::<Result<_>>()?;

    let mut points = samples.clone();
    points.push((1.0, 0.0));
    let concave = points.windows(3).all(|w| {
        let ((a0, k0), (a1, k1), (a2, k2)) = (w[0], w[1], w[2]);
        let chord = k0 + (k2 - k0) * (a1 - a0) / (a2 - a0);
        k1 >= chord - LEMMA_TOLERANCE
    });
    let ratios: Vec<f64> = samples.iter().map(|(a, k)| k / (1.0 - a)).collect();
    let ratio_nondecreasing = ratios.windows(2).all(|w| w[1] >= w[0] - LEMMA_TOLERANCE);
    let (alpha, last) = *samples.last().expect("grid is nonempty");
    Ok(LlyEstimate { estimate: last / (1.0 - alpha), alpha, samples, concave, ratio_nondecreasing })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DiameterVerdict {
    /// κ ≤ 0: the bound says nothing.
    NotApplicable,
    Holds {
        kappa_lb: f64,
        diameter: u32,
        bound: f64,
        /// (1 − α)·2/diam when every row has the same self-mass α.
        lazy_bound: Option<f64>,
    },
}

/// κ ≤ 2/diam, and κ ≤ (1 − α)·2/diam under uniform self-mass α.
pub fn check_diameter_bound<T: Scalar>(g: &StateGraph, m: &WalkKernel<T>, kappa_lb: &T) -> Result<DiameterVerdict> {
    if !kappa_lb.is_significant() {
        return Ok(DiameterVerdict::NotApplicable);
    }
    let diam = g.diameter()?;
    if diam == 0 {
        return Ok(DiameterVerdict::NotApplicable);
    }
    let two_over = T::from_i64(2) / T::from_i64(diam as i64);
    let exceeds = |bound: &T| (kappa_lb.clone() - bound.clone()).is_significant();
    if exceeds(&two_over) {
        return Err(Error::BoundViolation(format!(
            "curvature {} exceeds 2/diam = {}",
            kappa_lb.display(),
            two_over.display()
        )));
    }
    let lazy_bound = match m.uniform_self_mass() {
        Some(alpha) => {
            let bound = (T::one() - alpha.clone()) * two_over.clone();
            if exceeds(&bound) {
                return Err(Error::BoundViolation(format!(
                    "curvature {} exceeds (1-{})·2/diam = {}",
                    kappa_lb.display(),
                    alpha.display(),
                    bound.display()
                )));
            }
            Some(bound.to_f64())
        }
        None => None,
    };
    Ok(DiameterVerdict::Holds { kappa_lb: kappa_lb.to_f64(), diameter: diam, bound: two_over.to_f64(), lazy_bound })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ContractionVerdict {
    /// Largest |Mf(x) − Mf(y)| over edges.
    pub max_difference: f64,
    /// k(1 − κ).
    pub bound: f64,
}

/// If f is k-Lipschitz then Mf is k(1 − κ)-Lipschitz.
pub fn check_lipschitz_contraction<T: Scalar>(
    g: &StateGraph,
    m: &WalkKernel<T>,
    f: &StateFunction<T>,
    k: &T,
    kappa_lb: &T,
) -> Result<ContractionVerdict> {
    check_lipschitz(g, &f.values, k)?;
    let mf = apply_averaging(m, &f.values);
    let bound = k.clone() * (T::one() - kappa_lb.clone());
    let mut worst = T::zero();
    for (x, y) in g.edges() {
        let diff = (mf[x].clone() - mf[y].clone()).abs_val();
        if (diff.clone() - bound.clone()).is_significant() {
            return Err(Error::ContractionViolation { x, y, diff: diff.to_f64(), bound: bound.to_f64() });
        }
        if diff > worst {
            worst = diff;
        }
    }
    Ok(ContractionVerdict { max_difference: worst.to_f64(), bound: bound.to_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::state_space::test_graphs::*;
    use crate::state_space::random_lipschitz_function;
    use crate::transport::oracle::integer_dual;
    use proptest::prelude::*;
    use rand::Rng;

    /// κ on an edge via the brute-force integer dual.
    fn oracle_edge(g: &StateGraph, m: &WalkKernel<f64>, x: State, y: State) -> f64 {
        1.0 - integer_dual(m.row(x), m.row(y), g)
    }

    #[test]
    fn edge_examples() {
        let k3 = complete(3);
        let m = simple_walk(&k3);
        for (x, y) in k3.edges() {
            let k = ricci_edge(&k3, &m, x, y).unwrap();
            assert!((k - 0.5).abs() < 1e-12);
            assert!((k - oracle_edge(&k3, &m, x, y)).abs() < 1e-12);
        }
        let c4 = cycle(4);
        let m = simple_walk(&c4);
        for (x, y) in c4.edges() {
            assert!(ricci_edge(&c4, &m, x, y).unwrap().abs() < 1e-12);
            assert!(oracle_edge(&c4, &m, x, y).abs() < 1e-12);
        }
        let idle: WalkKernel<f64> = WalkKernel::identity(4);
        assert_eq!(ricci_edge(&c4, &idle, 0, 1).unwrap(), 0.0);
        assert!(matches!(ricci_edge(&c4, &m, 0, 2), Err(Error::NotAnEdge { .. })));
    }

    #[test]
    fn pair_examples() {
        let c4 = cycle(4);
        let m = simple_walk(&c4);
        assert!((ricci_pair(&c4, &m, 0, 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ricci_pair(&c4, &m, 0, 1).unwrap(), ricci_edge(&c4, &m, 0, 1).unwrap());
        assert!(matches!(ricci_pair(&c4, &m, 1, 1), Err(Error::NotDistinct(1))));
        let split = StateGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let walk = simple_walk(&split);
        assert!(matches!(ricci_pair(&split, &walk, 0, 2), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn lower_bound_reports() {
        let c4 = cycle(4);
        let report = ricci_lower_bound(&c4, &simple_walk(&c4), LowerBoundOptions::default()).unwrap();
        assert!(report.global_lb.abs() < 1e-12);
        assert_eq!(report.pairs_checked, 2);
        let json = report.to_json();
        assert_eq!(json["edges"].as_array().unwrap().len(), 4);

        let pet = petersen();
        let m: WalkKernel<Rational> = lazy_kernel(&pet, ratio(1, 2)).unwrap();
        let report = ricci_lower_bound(&pet, &m, LowerBoundOptions { certificates: true, ..Default::default() }).unwrap();
        let min = report.per_edge.iter().map(|(_, k)| k.clone()).min().unwrap();
        assert_eq!(report.global_lb, min);
        let certs = report.certificates.as_ref().unwrap();
        assert_eq!(certs.len(), 15);
        let (x, y) = report.argmin_edge();
        assert_eq!(
            crate::transport::validate_coupling(&report.argmin.coupling, m.row(x), m.row(y)),
            Ok(())
        );
    }

    #[test]
    fn lazy_kernels() {
        let k3 = complete(3);
        let m0: WalkKernel<f64> = lazy_kernel(&k3, 0.0).unwrap();
        assert_eq!(m0.row(0).entries(), simple_walk(&k3).row(0).entries());
        let edge = path(2);
        let half: WalkKernel<Rational> = lazy_kernel(&edge, ratio(1, 2)).unwrap();
        assert_eq!(half.row(0).entries(), &[(0, ratio(1, 2)), (1, ratio(1, 2))]);
        let pet = petersen();
        let m: WalkKernel<f64> = lazy_kernel(&pet, 0.3).unwrap();
        for row in m.rows() {
            let total: f64 = row.entries().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let isolated = StateGraph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(lazy_kernel(&isolated, 0.2), Err(Error::IsolatedState(2))));
        assert!(lazy_kernel(&k3, 1.0).is_err());
    }

    #[test]
    fn alpha_curvature() {
        let k3 = complete(3);
        let k0 = ricci_alpha(&k3, 0.0, 0, 1).unwrap();
        assert_eq!(k0, ricci_pair(&k3, &simple_walk(&k3), 0, 1).unwrap());
        let half = ricci_alpha(&k3, 0.5, 0, 1).unwrap();
        let m: WalkKernel<f64> = lazy_kernel(&k3, 0.5).unwrap();
        assert!((half - oracle_edge(&k3, &m, 0, 1)).abs() < 1e-12);
        assert!(half >= k0 / 2.0 - 1e-12);
        assert!(half <= (1.0 - 0.5) * 2.0 + 1e-12);
        // exact at α = ½: W = ¼
        assert_eq!(ricci_alpha::<Rational>(&k3, ratio(1, 2), 0, 1).unwrap(), ratio(3, 4));
        // α = 1 is the identity walk
        let c5 = cycle(5);
        for (x, y) in [(0, 1), (0, 2)] {
            assert_eq!(ricci_alpha::<Rational>(&c5, ratio(1, 1), x, y).unwrap(), ratio(0, 1));
        }
    }

    #[test]
    fn lly_estimates() {
        let k3 = complete(3);
        let est = lly_curvature_estimate(&k3, 0, 1, &[0.0, 0.5, 0.9, 0.99]).unwrap();
        assert!(est.concave && est.ratio_nondecreasing);
        assert!(est.estimate >= 0.5 - 1e-9);
        assert!((est.estimate - 1.5).abs() < 1e-9);
        let c4 = cycle(4);
        for (x, y) in c4.edges() {
            let est = lly_curvature_estimate(&c4, x, y, &[0.0, 0.25, 0.5, 0.75, 0.9]).unwrap();
            assert!(est.concave);
        }
        assert!(matches!(lly_curvature_estimate(&k3, 0, 1, &[0.0, 0.9]), Err(Error::BadGrid(_))));
        assert!(matches!(lly_curvature_estimate(&k3, 0, 1, &[0.0, 0.5, 0.8]), Err(Error::BadGrid(_))));
        assert!(matches!(lly_curvature_estimate(&k3, 0, 1, &[0.0, 0.9, 0.5]), Err(Error::BadGrid(_))));
    }

    #[test]
    fn diameter_bounds() {
        let k3 = complete(3);
        let m = simple_walk(&k3);
        match check_diameter_bound(&k3, &m, &0.5).unwrap() {
            DiameterVerdict::Holds { diameter, bound, lazy_bound, .. } => {
                assert_eq!(diameter, 1);
                assert_eq!(bound, 2.0);
                assert_eq!(lazy_bound, Some(2.0));
            }
            other => panic!("{other:?}"),
        }
        let c4 = cycle(4);
        assert_eq!(check_diameter_bound(&c4, &simple_walk(&c4), &0.0).unwrap(), DiameterVerdict::NotApplicable);
        let p5 = path(5);
        assert!(matches!(check_diameter_bound(&p5, &simple_walk(&p5), &0.9), Err(Error::BoundViolation(_))));
    }

    #[test]
    fn contraction() {
        let k3 = complete(3);
        let m = simple_walk(&k3);
        let f = StateFunction::new(vec![0.0, 1.0, 1.0]);
        let v = check_lipschitz_contraction(&k3, &m, &f, &1.0, &0.5).unwrap();
        assert!((v.max_difference - 0.5).abs() < 1e-12);
        assert_eq!(apply_averaging(&m, &f.values), vec![1.0, 0.5, 0.5]);
        let constant = StateFunction::constant(3, 2.0);
        assert_eq!(check_lipschitz_contraction(&k3, &m, &constant, &1.0, &0.5).unwrap().max_difference, 0.0);
        let steep = StateFunction::new(vec![0.0, 3.0, 1.0]);
        assert!(matches!(
            check_lipschitz_contraction(&k3, &m, &steep, &1.0, &0.5),
            Err(Error::InputNotLipschitz { .. })
        ));
        assert!(matches!(
            check_lipschitz_contraction(&k3, &m, &f, &1.0, &0.9),
            Err(Error::ContractionViolation { .. })
        ));
    }

    fn arb_connected(seed: u64) -> StateGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..10);
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
        for _ in 0..n {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            if a != b {
                edges.push((a, b));
            }
        }
        StateGraph::from_edges(n, edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn edge_curvature_symmetric_and_pairs_dominate(seed in 0u64..5000, alpha in 0.0f64..0.9) {
            let g = arb_connected(seed);
            let m = lazy_kernel(&g, alpha).unwrap();
            for (x, y) in g.edges() {
                let a = ricci_edge(&g, &m, x, y).unwrap();
                let b = ricci_edge(&g, &m, y, x).unwrap();
                prop_assert!((a - b).abs() <= 1e-12);
                prop_assert!(a <= 1.0 + 1e-12);
            }
            // LemmaViolation would surface as an error here
            let report = ricci_lower_bound(&g, &m, LowerBoundOptions { sample_pairs: 30, seed, certificates: false });
            prop_assert!(report.is_ok());
        }

        #[test]
        fn alpha_upper_bound_and_concavity(seed in 0u64..5000) {
            let g = arb_connected(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let x = rng.random_range(0..g.state_count());
            let y = (x + 1 + rng.random_range(0..g.state_count() - 1)) % g.state_count();
            let d = g.shortest_path_distance(x, y).unwrap() as f64;
            let grid = [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95];
            for a in grid {
                let k = ricci_alpha(&g, a, x, y).unwrap();
                prop_assert!(k <= (1.0 - a) * 2.0 / d + 1e-9);
            }
            let est = lly_curvature_estimate(&g, x, y, &grid).unwrap();
            prop_assert!(est.concave);
            prop_assert!(est.ratio_nondecreasing);
        }

        #[test]
        fn contraction_on_random_functions(seed in 0u64..5000) {
            let g = arb_connected(seed);
            let m = lazy_kernel(&g, 0.5).unwrap();
            let report = ricci_lower_bound(&g, &m, LowerBoundOptions { sample_pairs: 0, ..Default::default() }).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = StateFunction::new(random_lipschitz_function(&g, 1.0, &mut rng));
            prop_assert!(check_lipschitz_contraction(&g, &m, &f, &1.0, &report.global_lb).is_ok());
        }
    }
}
