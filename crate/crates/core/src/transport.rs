//! Exact Wasserstein-1 distance over the graph metric.
//!
//! The transportation LP between two finitely supported distributions is
//! solved as a min-cost flow on the bipartite support graph with successive
//! shortest paths. Costs are hop distances, so every path length is an
//! integer and the only rounding in float mode is in the masses. Each
//! solve returns an optimal coupling (primal certificate) and a 1-Lipschitz
//! potential built from the final node potentials (dual certificate).

use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{rational_from_json, Scalar};
use crate::state_space::{SparseDistribution, State, StateGraph, UNREACHABLE};

/// A joint measure with prescribed marginals, stored as positive `(x, y)` masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T = f64> {
    pairs: Vec<((State, State), T)>,
}

impl<T: Scalar> Coupling<T> {
    /// Sums repeated pairs and drops zero masses. Ordering is by `(x, y)`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = ((State, State), T)>) -> Self {
        let mut merged: BTreeMap<(State, State), T> = BTreeMap::new();
        for (key, w) in pairs {
            let slot = merged.entry(key).or_insert_with(T::zero);
            *slot = slot.clone() + w;
        }
        Self { pairs: merged.into_iter().filter(|(_, w)| !w.is_zero()).collect() }
    }

    /// The independent coupling m1 ⊗ m2.
    pub fn product(m1: &SparseDistribution<T>, m2: &SparseDistribution<T>) -> Self {
        Self::from_pairs(m1.entries().iter().flat_map(|(x, a)| {
            m2.entries().iter().map(move |(y, b)| ((*x, *y), a.clone() * b.clone()))
        }))
    }

    pub fn pairs(&self) -> &[((State, State), T)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_f64(&self) -> Coupling<f64> {
        Coupling { pairs: self.pairs.iter().map(|(k, w)| (*k, w.to_f64())).collect() }
    }

    /// `[[x, y, weight], ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.pairs
                .iter()
                .map(|((x, y), w)| Value::Array(vec![Value::from(*x), Value::from(*y), w.to_json()]))
                .collect(),
        )
    }

    /// Reads `[[x, y, weight], ...]` without validating marginals.
    pub fn from_json(value: &Value) -> Result<Self> {
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Parse("coupling must be an array of [x, y, weight] triples".into()))?;
        let mut pairs = Vec::with_capacity(rows.len());
        for row in rows {
            let triple = row
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse(format!("expected [x, y, weight], got {row}")))?;
            let state = |v: &Value| {
                v.as_u64().map(|s| s as usize).ok_or_else(|| Error::Parse(format!("bad state index {v}")))
            };
            pairs.push(((state(&triple[0])?, state(&triple[1])?), T::from_rational(&rational_from_json(&triple[2])?)));
        }
        // keep duplicates and non-positive entries visible to validate_coupling
        Ok(Self { pairs })
    }

    /// Builds a coupling without merging, for constructing deliberately broken inputs.
    pub fn from_raw(pairs: Vec<((State, State), T)>) -> Self {
        Self { pairs }
    }

    /// Moves `delta` of mass onto the first pair (test helper for perturbations).
    pub fn perturbed(&self, delta: T) -> Self {
        let mut pairs = self.pairs.clone();
        if let Some((_, w)) = pairs.first_mut() {
            *w = w.clone() + delta;
        }
        Self { pairs }
    }
}

/// First violated constraint of a candidate coupling.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum CouplingViolation {
    NonPositiveWeight { x: State, y: State, weight: f64 },
    FirstMarginal { state: State, residual: f64 },
    SecondMarginal { state: State, residual: f64 },
}

impl fmt::Display for CouplingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveWeight { x, y, weight } => write!(f, "weight {weight} at ({x},{y}) is not positive"),
            Self::FirstMarginal { state, residual } => {
                write!(f, "row sum at state {state} misses m1 by {residual:e}")
            }
            Self::SecondMarginal { state, residual } => {
                write!(f, "column sum at state {state} misses m2 by {residual:e}")
            }
        }
    }
}

/// Accepts iff A ≥ 0 with row sums m1 and column sums m2 (exactly, or within
/// `1e-12` per entry in float mode).
pub fn validate_coupling<T: Scalar>(
    a: &Coupling<T>,
    m1: &SparseDistribution<T>,
    m2: &SparseDistribution<T>,
) -> std::result::Result<(), CouplingViolation> {
    let mut rows: BTreeMap<State, T> = BTreeMap::new();
    let mut cols: BTreeMap<State, T> = BTreeMap::new();
    for ((x, y), w) in a.pairs() {
        if *w <= T::zero() {
            return Err(CouplingViolation::NonPositiveWeight { x: *x, y: *y, weight: w.to_f64() });
        }
        let r = rows.entry(*x).or_insert_with(T::zero);
        *r = r.clone() + w.clone();
        let c = cols.entry(*y).or_insert_with(T::zero);
        *c = c.clone() + w.clone();
    }
    let states = |m: &SparseDistribution<T>, sums: &BTreeMap<State, T>| {
        let mut all: Vec<State> = m.support().chain(sums.keys().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    for s in states(m1, &rows) {
        let residual = rows.get(&s).cloned().unwrap_or_else(T::zero) - m1.get(s);
        if !residual.is_negligible() {
            return Err(CouplingViolation::FirstMarginal { state: s, residual: residual.to_f64() });
        }
    }
    for s in states(m2, &cols) {
        let residual = cols.get(&s).cloned().unwrap_or_else(T::zero) - m2.get(s);
        if !residual.is_negligible() {
            return Err(CouplingViolation::SecondMarginal { state: s, residual: residual.to_f64() });
        }
    }
    Ok(())
}

/// Σ A(x, y)·d(x, y).
pub fn coupling_cost<T: Scalar>(a: &Coupling<T>, g: &StateGraph) -> Result<T> {
    let mut total = T::zero();
    let mut current: Option<(State, std::borrow::Cow<'_, [u32]>)> = None;
    for ((x, y), w) in a.pairs() {
        for s in [*x, *y] {
            if s >= g.state_count() {
                return Err(Error::InvalidState { state: s, count: g.state_count() });
            }
        }
        if current.as_ref().map(|(s, _)| *s) != Some(*x) {
            current = Some((*x, g.distances_from(*x)));
        }
        let d = current.as_ref().map(|(_, row)| row[*y]).unwrap_or(UNREACHABLE);
        if d == UNREACHABLE {
            return Err(Error::Disconnected { x: *x, y: *y });
        }
        total = total + w.clone() * T::from_i64(d as i64);
    }
    Ok(total)
}

/// A 1-Lipschitz potential f on the union of two supports with
/// Σ f·(m1 − m2) = W(m1, m2).
///
/// `anchors` holds the source-side dual variables u(x); `f` is their
/// c-transform f(z) = max_x (u(x) − d(z, x)), which is 1-Lipschitz on the
/// whole graph, so [`DualPotential::extend`] can evaluate it anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPotential<T = f64> {
    anchors: Vec<(State, T)>,
    values: Vec<(State, T)>,
}

impl<T: Scalar> DualPotential<T> {
    pub fn values(&self) -> &[(State, T)] {
        &self.values
    }

    pub fn get(&self, z: State) -> Option<T> {
        self.values.binary_search_by_key(&z, |(s, _)| *s).ok().map(|i| self.values[i].1.clone())
    }

    /// Σ f(z)·(m1(z) − m2(z)).
    pub fn objective(&self, m1: &SparseDistribution<T>, m2: &SparseDistribution<T>) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, (z, f)| acc + f.clone() * (m1.get(*z) - m2.get(*z)))
    }

    /// Evaluates the potential at any state of `g`.
    pub fn extend(&self, g: &StateGraph, z: State) -> T {
        let dist = g.distances_from(z);
        self.anchors
            .iter()
            .filter(|(x, _)| dist[*x] != UNREACHABLE)
            .map(|(x, u)| u.clone() - T::from_i64(dist[*x] as i64))
            .fold(None, |best: Option<T>, v| match best {
                Some(b) if b >= v => Some(b),
                _ => Some(v),
            })
            .unwrap_or_else(T::zero)
    }

    /// Largest |f(a) − f(b)| − d(a, b) over the stored points; ≤ 0 means 1-Lipschitz.
    pub fn lipschitz_excess(&self, g: &StateGraph) -> T {
        let mut worst = -T::one();
        for (i, (a, fa)) in self.values.iter().enumerate() {
            let dist = g.distances_from(*a);
            for (b, fb) in &self.values[i + 1..] {
                let d = dist[*b];
                if d == UNREACHABLE {
                    continue;
                }
                let excess = (fa.clone() - fb.clone()).abs_val() - T::from_i64(d as i64);
                if excess > worst {
                    worst = excess;
                }
            }
        }
        worst
    }

    pub fn to_f64(&self) -> DualPotential<f64> {
        DualPotential {
            anchors: self.anchors.iter().map(|(s, v)| (*s, v.to_f64())).collect(),
            values: self.values.iter().map(|(s, v)| (*s, v.to_f64())).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.values
                .iter()
                .map(|(s, v)| Value::Array(vec![Value::from(*s), v.to_json()]))
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct TransportResult<T = f64> {
    pub distance: T,
    pub optimal_coupling: Coupling<T>,
    pub dual_potential: Option<DualPotential<T>>,
}

/// Exact W₁(m1, m2) with an optimal coupling and a dual potential.
pub fn wasserstein<T: Scalar>(
    m1: &SparseDistribution<T>,
    m2: &SparseDistribution<T>,
    g: &StateGraph,
) -> Result<TransportResult<T>> {
    let solved = FlowSolver::new(m1, m2, g)?.solve()?;
    Ok(TransportResult {
        distance: solved.primal_value,
        optimal_coupling: solved.coupling,
        dual_potential: Some(solved.potential),
    })
}

/// The Kantorovich–Rubinstein dual: sup over 1-Lipschitz f of Σ f·(m1 − m2).
///
/// The returned value is evaluated from the potential itself, not copied
/// from the primal cost.
pub fn kantorovich_dual<T: Scalar>(
    m1: &SparseDistribution<T>,
    m2: &SparseDistribution<T>,
    g: &StateGraph,
) -> Result<(T, DualPotential<T>)> {
    let solved = FlowSolver::new(m1, m2, g)?.solve()?;
    let value = solved.potential.objective(m1, m2);
    Ok((value, solved.potential))
}

struct Solved<T> {
    primal_value: T,
    coupling: Coupling<T>,
    potential: DualPotential<T>,
}

/// Successive shortest paths on sources (support of m1) → sinks (support of m2).
struct FlowSolver<'a, T> {
    sources: Vec<(State, T)>,
    sinks: Vec<(State, T)>,
    /// BFS row from each source over all states.
    rows: Vec<std::borrow::Cow<'a, [u32]>>,
    cost: Vec<Vec<i64>>,
}

fn exhausted<T: Scalar>(x: &T) -> bool {
    if T::EXACT {
        x.is_zero() || *x < T::zero()
    } else {
        x.to_f64() <= 1e-15
    }
}

impl<'a, T: Scalar> FlowSolver<'a, T> {
    fn new(m1: &SparseDistribution<T>, m2: &SparseDistribution<T>, g: &'a StateGraph) -> Result<Self> {
        for s in m1.support().chain(m2.support()) {
            if s >= g.state_count() {
                return Err(Error::InvalidState { state: s, count: g.state_count() });
            }
        }
        let sources: Vec<(State, T)> = m1.entries().to_vec();
        let sinks: Vec<(State, T)> = m2.entries().to_vec();
        let rows: Vec<_> = sources.iter().map(|(x, _)| g.distances_from(*x)).collect();
        let mut cost = vec![vec![0i64; sinks.len()]; sources.len()];
        for (i, (x, _)) in sources.iter().enumerate() {
            for (j, (y, _)) in sinks.iter().enumerate() {
                let d = rows[i][*y];
                if d == UNREACHABLE {
                    return Err(Error::Disconnected { x: *x, y: *y });
                }
                cost[i][j] = d as i64;
            }
        }
        Ok(Self { sources, sinks, rows, cost })
    }

    fn solve(self) -> Result<Solved<T>> {
        let a = self.sources.len();
        let b = self.sinks.len();
        let mut supply: Vec<T> = self.sources.iter().map(|(_, w)| w.clone()).collect();
        let mut demand: Vec<T> = self.sinks.iter().map(|(_, w)| w.clone()).collect();
        let mut flow: Vec<Vec<T>> = vec![vec![T::zero(); b]; a];

        loop {
            if supply.iter().all(exhausted) || demand.iter().all(exhausted) {
                break;
            }
            let roots: Vec<usize> = (0..a).filter(|&i| !exhausted(&supply[i])).collect();
            let (dist, pred) = self.bellman_ford(&roots, &flow);
            let target = (0..b)
                .filter(|&j| !exhausted(&demand[j]))
                .filter_map(|j| dist[a + j].map(|d| (d, j)))
                .min();
            let Some((_, sink)) = target else {
                return Err(Error::InvalidDistribution("no augmenting path between supports".into()));
            };
            // walk back to a root, collecting the path and bottleneck
            let mut path = Vec::new();
            let mut node = a + sink;
            let mut bottleneck = demand[sink].clone();
            while let Some(prev) = pred[node] {
                if node < a {
                    // reverse arc sink(prev) -> source(node): bounded by current flow
                    let f = flow[node][prev - a].clone();
                    if f < bottleneck {
                        bottleneck = f;
                    }
                }
                path.push((prev, node));
                node = prev;
            }
            if supply[node] < bottleneck {
                bottleneck = supply[node].clone();
            }
            supply[node] = supply[node].clone() - bottleneck.clone();
            demand[sink] = demand[sink].clone() - bottleneck.clone();
            for (from, to) in path {
                if from < a {
                    flow[from][to - a] = flow[from][to - a].clone() + bottleneck.clone();
                } else {
                    flow[to][from - a] = flow[to][from - a].clone() - bottleneck.clone();
                }
            }
        }

        let mut primal = T::zero();
        let mut pairs = Vec::new();
        for i in 0..a {
            for j in 0..b {
                if !exhausted(&flow[i][j]) {
                    primal = primal + flow[i][j].clone() * T::from_i64(self.cost[i][j]);
                    pairs.push(((self.sources[i].0, self.sinks[j].0), flow[i][j].clone()));
                }
            }
        }
        let potential = self.potential(&flow);
        Ok(Solved { primal_value: primal, coupling: Coupling::from_pairs(pairs), potential })
    }

    /// Shortest residual distances from `roots`; nodes `0..a` are sources,
    /// `a..a+b` sinks. Ties keep the first (lowest-index) predecessor found.
    fn bellman_ford(&self, roots: &[usize], flow: &[Vec<T>]) -> (Vec<Option<i64>>, Vec<Option<usize>>) {
        let a = self.sources.len();
        let b = self.sinks.len();
        let mut dist: Vec<Option<i64>> = vec![None; a + b];
        let mut pred: Vec<Option<usize>> = vec![None; a + b];
        for &r in roots {
            dist[r] = Some(0);
        }
        for _ in 0..=(a + b) {
            let mut changed = false;
            for i in 0..a {
                let Some(di) = dist[i] else { continue };
                for j in 0..b {
                    let cand = di + self.cost[i][j];
                    if dist[a + j].is_none_or(|d| cand < d) {
                        dist[a + j] = Some(cand);
                        pred[a + j] = Some(i);
                        changed = true;
                    }
                }
            }
            for j in 0..b {
                let Some(dj) = dist[a + j] else { continue };
                for (i, row) in flow.iter().enumerate() {
                    if exhausted(&row[j]) {
                        continue;
                    }
                    let cand = dj - self.cost[i][j];
                    if dist[i].is_none_or(|d| cand < d) {
                        dist[i] = Some(cand);
                        pred[i] = Some(a + j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (dist, pred)
    }

    /// Node potentials with non-negative reduced costs on every residual
    /// arc, turned into the c-transform potential on the union of supports.
    fn potential(&self, flow: &[Vec<T>]) -> DualPotential<T> {
        let a = self.sources.len();
        let b = self.sinks.len();
        let mut pi = vec![0i64; a + b];
        for _ in 0..=(a + b) {
            let mut changed = false;
            for i in 0..a {
                for j in 0..b {
                    if pi[i] + self.cost[i][j] < pi[a + j] {
                        pi[a + j] = pi[i] + self.cost[i][j];
                        changed = true;
                    }
                    if !exhausted(&flow[i][j]) && pi[a + j] - self.cost[i][j] < pi[i] {
                        pi[i] = pi[a + j] - self.cost[i][j];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // u(x_i) = -π_i, v(y_j) = π_j satisfy u + v ≤ d with equality on the flow
        let anchors: Vec<(State, T)> =
            self.sources.iter().zip(&pi[..a]).map(|((x, _), p)| (*x, T::from_i64(-p))).collect();
        let mut points: Vec<State> = self.sources.iter().chain(&self.sinks).map(|(s, _)| *s).collect();
        points.sort_unstable();
        points.dedup();
        let values = points
            .into_iter()
            .map(|z| {
                let best = anchors
                    .iter()
                    .enumerate()
                    .map(|(i, (_, u))| u.clone() - T::from_i64(self.rows[i][z] as i64))
                    .fold(None, |best: Option<T>, v| match best {
                        Some(b) if b >= v => Some(b),
                        _ => Some(v),
                    })
                    .unwrap_or_else(T::zero);
                (z, best)
            })
            .collect();
        DualPotential { anchors, values }
    }
}


#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::state_space::test_graphs::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(entries: Vec<(State, f64)>) -> SparseDistribution<f64> {
        SparseDistribution::new(entries).unwrap()
    }

    pub(crate) fn random_connected_graph<R: Rng>(n: usize, extra: usize, rng: &mut R) -> StateGraph {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
        for _ in 0..extra {
            edges.push((rng.random_range(0..n), rng.random_range(0..n)));
        }
        StateGraph::from_edges(n, edges.into_iter().filter(|(a, b)| a != b)).unwrap()
    }

    pub(crate) fn random_distribution<R: Rng>(n: usize, max_support: usize, rng: &mut R) -> SparseDistribution<f64> {
        let k = rng.random_range(1..=max_support.min(n));
        let states = rand::seq::index::sample(rng, n, k).into_vec();
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let drift: f64 = 1.0 - weights.iter().sum::<f64>();
        weights[0] += drift;
        SparseDistribution::new(states.into_iter().zip(weights).collect()).unwrap()
    }

    #[test]
    fn coupling_validation() {
        let m1 = dist(vec![(0, 0.5), (1, 0.5)]);
        let m2 = dist(vec![(1, 0.25), (2, 0.75)]);
        let product = Coupling::product(&m1, &m2);
        assert_eq!(validate_coupling(&product, &m1, &m2), Ok(()));

        let delta: SparseDistribution<f64> = SparseDistribution::dirac(4);
        let diag = Coupling::from_pairs([((4, 4), 1.0)]);
        assert_eq!(validate_coupling(&diag, &delta, &delta), Ok(()));

        let broken = product.perturbed(1e-6);
        match validate_coupling(&broken, &m1, &m2) {
            Err(CouplingViolation::FirstMarginal { state: 0, residual }) => {
                assert!((residual - 1e-6).abs() < 1e-12)
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        let negative = Coupling::from_raw(vec![((0, 1), -0.1), ((0, 2), 0.6), ((1, 2), 0.5)]);
        assert!(matches!(
            validate_coupling(&negative, &m1, &m2),
            Err(CouplingViolation::NonPositiveWeight { x: 0, y: 1, .. })
        ));
    }

    #[test]
    fn coupling_costs() {
        let g = path(4);
        let m = dist(vec![(0, 0.3), (2, 0.7)]);
        let diag = Coupling::from_pairs(m.entries().iter().map(|(s, w)| ((*s, *s), *w)));
        assert_eq!(coupling_cost(&diag, &g).unwrap(), 0.0);
        let single = Coupling::from_pairs([((0, 3), 1.0)]);
        assert_eq!(coupling_cost(&single, &g).unwrap(), 3.0);
        let split = StateGraph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(
            coupling_cost(&Coupling::from_pairs([((0, 2), 1.0)]), &split),
            Err(Error::Disconnected { x: 0, y: 2 })
        ));
    }

    #[test]
    fn wasserstein_examples() {
        let g = cycle(6);
        let m = dist(vec![(0, 0.2), (3, 0.8)]);
        assert_eq!(wasserstein(&m, &m, &g).unwrap().distance, 0.0);
        let r = wasserstein(&dist(vec![(0, 1.0)]), &dist(vec![(3, 1.0)]), &g).unwrap();
        assert_eq!(r.distance, 3.0);

        // K3 simple walk at 0 and 1
        let k3 = complete(3);
        let m0 = dist(vec![(1, 0.5), (2, 0.5)]);
        let m1 = dist(vec![(0, 0.5), (2, 0.5)]);
        let oracle = integer_dual(&m0, &m1, &k3);
        assert!((oracle - 0.5).abs() < 1e-12);
        let r = wasserstein(&m0, &m1, &k3).unwrap();
        assert!((r.distance - 0.5).abs() < 1e-12);
        assert_eq!(validate_coupling(&r.optimal_coupling, &m0, &m1), Ok(()));
        assert!((coupling_cost(&r.optimal_coupling, &k3).unwrap() - r.distance).abs() < 1e-12);
    }

    #[test]
    fn dual_examples() {
        let g = path(5);
        let m = dist(vec![(1, 0.5), (3, 0.5)]);
        let (value, potential) = kantorovich_dual(&m, &m, &g).unwrap();
        assert_eq!(value, 0.0);
        assert!(potential.lipschitz_excess(&g) <= 0.0);

        let (value, potential) = kantorovich_dual(&dist(vec![(0, 1.0)]), &dist(vec![(4, 1.0)]), &g).unwrap();
        assert_eq!(value, 4.0);
        // f = d(·, y) up to an additive constant
        let f0 = potential.get(0).unwrap();
        let f4 = potential.get(4).unwrap();
        assert_eq!(f0 - f4, 4.0);
        assert_eq!(potential.extend(&g, 2) - f4, 2.0);
    }

    #[test]
    fn disconnected_supports() {
        let g = StateGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let r = wasserstein(&dist(vec![(0, 1.0)]), &dist(vec![(3, 1.0)]), &g);
        assert!(matches!(r, Err(Error::Disconnected { .. })));
    }

    #[test]
    fn rational_mode_has_zero_gap() {
        let g = cycle(5);
        let m1: SparseDistribution<Rational> =
            SparseDistribution::new(vec![(0, ratio(1, 3)), (1, ratio(1, 6)), (2, ratio(1, 2))]).unwrap();
        let m2: SparseDistribution<Rational> =
            SparseDistribution::new(vec![(3, ratio(2, 7)), (4, ratio(5, 7))]).unwrap();
        let r = wasserstein(&m1, &m2, &g).unwrap();
        let (dual, potential) = kantorovich_dual(&m1, &m2, &g).unwrap();
        assert_eq!(r.distance, dual);
        assert_eq!(validate_coupling(&r.optimal_coupling, &m1, &m2), Ok(()));
        assert_eq!(coupling_cost(&r.optimal_coupling, &g).unwrap(), r.distance);
        assert!(potential.lipschitz_excess(&g) <= Rational::from_integer(0.into()));
        let oracle = integer_dual(&m1.to_f64(), &m2.to_f64(), &g);
        assert!((r.distance.to_f64() - oracle).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip() {
        let c = Coupling::from_pairs([((0, 1), ratio(1, 3)), ((2, 2), ratio(2, 3))]);
        let back: Coupling<Rational> = Coupling::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn primal_dual_and_oracle_agree(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..9);
            let g = random_connected_graph(n, n, &mut rng);
            let m1 = random_distribution(n, 4, &mut rng);
            let m2 = random_distribution(n, 4, &mut rng);
            let r = wasserstein(&m1, &m2, &g).unwrap();
            let (dual, potential) = kantorovich_dual(&m1, &m2, &g).unwrap();
            prop_assert!((r.distance - dual).abs() <= 1e-9);
            prop_assert!(potential.lipschitz_excess(&g) <= 1e-12);
            prop_assert_eq!(validate_coupling(&r.optimal_coupling, &m1, &m2), Ok(()));
            prop_assert!((integer_dual(&m1, &m2, &g) - r.distance).abs() <= 1e-9);
            // any valid coupling upper-bounds W
            let other = corner_coupling(&m1, &m2, &mut rng);
            prop_assert_eq!(validate_coupling(&other, &m1, &m2), Ok(()));
            prop_assert!(coupling_cost(&other, &g).unwrap() >= r.distance - 1e-9);
            // trivial bound: the largest distance between supports
            let max_d = m1.support().flat_map(|x| {
                let row = g.distances_from(x).into_owned();
                m2.support().map(move |y| row[y]).collect::<Vec<_>>()
            }).max().unwrap() as f64;
            prop_assert!(r.distance <= max_d + 1e-12);
        }

        #[test]
        fn wasserstein_is_a_metric(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..15);
            let g = random_connected_graph(n, n / 2, &mut rng);
            let a = random_distribution(n, 5, &mut rng);
            let b = random_distribution(n, 5, &mut rng);
            let c = random_distribution(n, 5, &mut rng);
            let ab = wasserstein(&a, &b, &g).unwrap().distance;
            let ba = wasserstein(&b, &a, &g).unwrap().distance;
            let bc = wasserstein(&b, &c, &g).unwrap().distance;
            let ac = wasserstein(&a, &c, &g).unwrap().distance;
            prop_assert!((ab - ba).abs() <= 1e-9);
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }
}
