//! Finite state graphs, walk kernels and the operators built on them.
//!
//! States are dense indices `0..n`. The graph metric is the hop count of a
//! shortest path; loops are allowed and only matter for deciding whether a
//! kernel row may put mass on its own state.

use std::borrow::Cow;
use std::collections::VecDeque;

use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{rational_from_json, Scalar};

pub type State = usize;

/// Marker for "no path" in BFS distance rows.
pub const UNREACHABLE: u32 = u32::MAX;

/// Graphs with at most this many states may carry an all-pairs distance table.
pub const DISTANCE_TABLE_LIMIT: usize = 5000;

/// Above this size the stationary solve switches from dense elimination to power iteration.
pub const DENSE_SOLVE_LIMIT: usize = 5000;

#[derive(Debug, Clone, Default)]
pub struct StateGraph {
    adjacency: Vec<Vec<State>>,
    loops: Vec<bool>,
    labels: Option<Vec<String>>,
    distances: Option<Vec<Vec<u32>>>,
}

impl StateGraph {
    /// Builds a graph from undirected edges. `(x, x)` records a loop.
    pub fn from_edges<I>(state_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (State, State)>,
    {
        let mut adjacency = vec![Vec::new(); state_count];
        let mut loops = vec![false; state_count];
        for (x, y) in edges {
            for s in [x, y] {
                if s >= state_count {
                    return Err(Error::InvalidState { state: s, count: state_count });
                }
            }
            if x == y {
                loops[x] = true;
            } else {
                adjacency[x].push(y);
                adjacency[y].push(x);
            }
        }
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Self { adjacency, loops, labels: None, distances: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn label(&self, x: State) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[x].as_str()),
            None => Cow::Owned(x.to_string()),
        }
    }

    /// Precomputes all-pairs distances when the graph is small enough.
    pub fn with_distance_cache(mut self) -> Self {
        if self.state_count() <= DISTANCE_TABLE_LIMIT && self.distances.is_none() {
            let table = (0..self.state_count()).map(|x| self.bfs(x)).collect();
            self.distances = Some(table);
        }
        self
    }

    pub fn state_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Open neighbors Γ(x), excluding `x` itself even when it carries a loop.
    pub fn neighbors(&self, x: State) -> &[State] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: State) -> usize {
        self.adjacency[x].len()
    }

    pub fn has_loop(&self, x: State) -> bool {
        self.loops[x]
    }

    pub fn has_edge(&self, x: State, y: State) -> bool {
        if x == y {
            self.loops[x]
        } else {
            self.adjacency[x].binary_search(&y).is_ok()
        }
    }

    /// Membership in the closed neighborhood N(x) = Γ(x) ∪ {x}.
    pub fn in_closed_neighborhood(&self, x: State, y: State) -> bool {
        x == y || self.adjacency[x].binary_search(&y).is_ok()
    }

    /// Non-loop edges as `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> Vec<(State, State)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().filter(move |&&y| y > x).map(move |&y| (x, y)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn loop_count(&self) -> usize {
        self.loops.iter().filter(|&&l| l).count()
    }

    fn check_state(&self, x: State) -> Result<()> {
        if x < self.state_count() {
            Ok(())
        } else {
            Err(Error::InvalidState { state: x, count: self.state_count() })
        }
    }

    fn bfs(&self, source: State) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.state_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Distances from `x` to every state ([`UNREACHABLE`] where no path exists).
    pub fn distances_from(&self, x: State) -> Cow<'_, [u32]> {
        match &self.distances {
            Some(table) => Cow::Borrowed(&table[x]),
            None => Cow::Owned(self.bfs(x)),
        }
    }

    pub fn shortest_path_distance(&self, x: State, y: State) -> Result<u32> {
        self.check_state(x)?;
        self.check_state(y)?;
        if x == y {
            return Ok(0);
        }
        match self.distances_from(x)[y] {
            UNREACHABLE => Err(Error::Disconnected { x, y }),
            d => Ok(d),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.state_count() == 0 || self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn diameter(&self) -> Result<u32> {
        use rayon::prelude::*;
        if !self.is_connected() {
            return Err(Error::GraphDisconnected);
        }
        let diam = (0..self.state_count())
            .into_par_iter()
            .map(|x| self.distances_from(x).iter().copied().max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        Ok(diam)
    }

    /// Two-coloring test; loops make a graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        if self.loops.iter().any(|&l| l) {
            return false;
        }
        let mut color = vec![u8::MAX; self.state_count()];
        for start in 0..self.state_count() {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A finitely supported probability distribution over states.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDistribution<T = f64> {
    entries: Vec<(State, T)>,
}

impl<T: Scalar> SparseDistribution<T> {
    /// Validates positivity, distinct states and unit mass, then sorts by state.
    pub fn new(mut entries: Vec<(State, T)>) -> Result<Self> {
        entries.sort_by_key(|(s, _)| *s);
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidDistribution(format!("state {} listed twice", pair[0].0)));
            }
        }
        let mut total = T::zero();
        for (s, w) in &entries {
            if *w <= T::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "non-positive weight {} at state {s}",
                    w.display()
                )));
            }
            total = total + w.clone();
        }
        if !(total.clone() - T::one()).is_negligible() {
            return Err(Error::InvalidDistribution(format!("weights sum to {}", total.display())));
        }
        Ok(Self { entries })
    }

    /// Collapses duplicate states and drops zero weights before validating.
    pub fn from_weights(entries: impl IntoIterator<Item = (State, T)>) -> Result<Self> {
        let mut merged: Vec<(State, T)> = entries.into_iter().collect();
        merged.sort_by_key(|(s, _)| *s);
        let mut out: Vec<(State, T)> = Vec::with_capacity(merged.len());
        for (s, w) in merged {
            match out.last_mut() {
                Some((last, acc)) if *last == s => *acc = acc.clone() + w,
                _ => out.push((s, w)),
            }
        }
        out.retain(|(_, w)| !w.is_zero());
        Self::new(out)
    }

    pub fn dirac(x: State) -> Self {
        Self { entries: vec![(x, T::one())] }
    }

    pub fn entries(&self) -> &[(State, T)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = State> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: State) -> T {
        match self.entries.binary_search_by_key(&x, |(s, _)| *s) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn expectation(&self, f: &[T]) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, (s, w)| acc + w.clone() * f[*s].clone())
    }

    pub fn to_f64(&self) -> SparseDistribution<f64> {
        SparseDistribution { entries: self.entries.iter().map(|(s, w)| (*s, w.to_f64())).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|(s, w)| Value::Array(vec![Value::from(*s), w.to_json()]))
                .collect(),
        )
    }

    /// Reads the `[[state, weight], ...]` pair-array shape.
    pub fn from_json(value: &Value) -> Result<Self> {
        let pairs = value
            .as_array()
            .ok_or_else(|| Error::Parse("distribution must be an array of [state, weight] pairs".into()))?;
        let mut entries = Vec::with_capacity(pairs.len());
        for pair in pairs {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse(format!("expected [state, weight], got {pair}")))?;
            let state = pair[0]
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("bad state index {}", pair[0])))? as usize;
            let weight = T::from_rational(&rational_from_json(&pair[1])?);
            entries.push((state, weight));
        }
        Self::new(entries)
    }
}

/// One distribution per state: row `x` is the one-step law m_x.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkKernel<T = f64> {
    rows: Vec<SparseDistribution<T>>,
}

impl<T: Scalar> WalkKernel<T> {
    pub fn new(rows: Vec<SparseDistribution<T>>) -> Self {
        Self { rows }
    }

    /// The kernel that never moves: m_x = δ_x.
    pub fn identity(state_count: usize) -> Self {
        Self { rows: (0..state_count).map(SparseDistribution::dirac).collect() }
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: State) -> &SparseDistribution<T> {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[SparseDistribution<T>] {
        &self.rows
    }

    /// Checks that each row lives on the closed neighborhood of its state.
    pub fn check_support(&self, g: &StateGraph) -> Result<()> {
        if self.rows.len() != g.state_count() {
            return Err(Error::KernelShape { rows: self.rows.len(), states: g.state_count() });
        }
        for (x, row) in self.rows.iter().enumerate() {
            for y in row.support() {
                if y >= g.state_count() {
                    return Err(Error::InvalidState { state: y, count: g.state_count() });
                }
                if !g.in_closed_neighborhood(x, y) {
                    return Err(Error::KernelSupport { state: x, target: y });
                }
            }
        }
        Ok(())
    }

    /// Self-mass shared by every row, if there is one.
    pub fn uniform_self_mass(&self) -> Option<T> {
        let first = self.rows.first()?.get(0);
        self.rows
            .iter()
            .enumerate()
            .all(|(x, row)| row.get(x).approx_eq(&first))
            .then_some(first)
    }

    pub fn to_f64(&self) -> WalkKernel<f64> {
        WalkKernel { rows: self.rows.iter().map(SparseDistribution::to_f64).collect() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.rows.iter().map(SparseDistribution::to_json).collect())
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Parse("kernel must be an array of rows".into()))?;
        Ok(Self { rows: rows.iter().map(SparseDistribution::from_json).collect::<Result<_>>()? })
    }
}

/// A real function on states, optionally carrying a declared Lipschitz constant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunction<T = f64> {
    pub values: Vec<T>,
    pub lipschitz: Option<T>,
}

impl<T: Scalar> StateFunction<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values, lipschitz: None }
    }

    pub fn with_lipschitz(values: Vec<T>, c: T) -> Self {
        Self { values, lipschitz: Some(c) }
    }

    pub fn constant(state_count: usize, value: T) -> Self {
        Self::new(vec![value; state_count])
    }

    /// Largest |f(u) − f(v)| over edges, with a witness edge.
    pub fn max_edge_difference(&self, g: &StateGraph) -> (T, Option<(State, State)>) {
        let mut best = T::zero();
        let mut witness = None;
        for (x, y) in g.edges() {
            let diff = (self.values[x].clone() - self.values[y].clone()).abs_val();
            if diff > best {
                best = diff;
                witness = Some((x, y));
            }
        }
        (best, witness)
    }

    /// Checks |f(u) − f(v)| ≤ c on every edge, where `c` is the declared
    /// constant; returns the largest observed difference.
    pub fn verify_lipschitz(&self, g: &StateGraph) -> Result<T> {
        let c = self
            .lipschitz
            .clone()
            .ok_or_else(|| Error::BadParams("no Lipschitz constant declared".into()))?;
        check_lipschitz(g, &self.values, &c)
    }
}

pub(crate) fn check_lipschitz<T: Scalar>(g: &StateGraph, values: &[T], c: &T) -> Result<T> {
    let mut best = T::zero();
    for (x, y) in g.edges() {
        let diff = (values[x].clone() - values[y].clone()).abs_val();
        if diff.clone() - c.clone() > T::tolerance() {
            return Err(Error::InputNotLipschitz { x, y, diff: diff.to_f64(), c: c.to_f64() });
        }
        if diff > best {
            best = diff;
        }
    }
    Ok(best)
}

/// (Mf)(x) = Σ_y f(y)·m_x(y).
pub fn apply_averaging<T: Scalar>(m: &WalkKernel<T>, f: &[T]) -> Vec<T> {
    m.rows().iter().map(|row| row.expectation(f)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ErgodicityVerdict {
    pub ergodic: bool,
    pub strongly_connected: bool,
    pub aperiodic: bool,
    /// gcd of cycle lengths of the support digraph (0 when not strongly connected).
    pub period: u64,
    /// Graph is connected and non-bipartite and every row charges all open neighbors.
    pub connected_non_bipartite: bool,
    pub reason: String,
}

/// Strong connectivity and aperiodicity of the kernel's support digraph.
pub fn check_ergodic<T: Scalar>(g: &StateGraph, m: &WalkKernel<T>) -> ErgodicityVerdict {
    let n = m.state_count();
    let (strongly_connected, period) = support_structure(m);
    let aperiodic = strongly_connected && period == 1;
    let full_support = n == g.state_count()
        && m.rows()
            .iter()
            .enumerate()
            .all(|(x, row)| g.neighbors(x).iter().all(|&y| !row.get(y).is_zero()));
    let connected_non_bipartite = full_support && g.is_connected() && !g.is_bipartite();
    let reason = if !strongly_connected {
        "support digraph is not strongly connected".to_string()
    } else if !aperiodic {
        format!("walk is periodic with period {period}")
    } else {
        "strongly connected and aperiodic".to_string()
    };
    ErgodicityVerdict {
        ergodic: strongly_connected && aperiodic,
        strongly_connected,
        aperiodic,
        period,
        connected_non_bipartite,
        reason,
    }
}

fn support_structure<T: Scalar>(m: &WalkKernel<T>) -> (bool, u64) {
    let n = m.state_count();
    if n == 0 {
        return (false, 0);
    }
    let mut reverse: Vec<Vec<State>> = vec![Vec::new(); n];
    for (x, row) in m.rows().iter().enumerate() {
        for y in row.support() {
            reverse[y].push(x);
        }
    }
    let mut level = vec![u64::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for v in m.row(u).support() {
            if level[v] == u64::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut seen_back = vec![false; n];
    seen_back[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &v in &reverse[u] {
            if !seen_back[v] {
                seen_back[v] = true;
                queue.push_back(v);
            }
        }
    }
    let strongly = level.iter().all(|&l| l != u64::MAX) && seen_back.iter().all(|&s| s);
    if !strongly {
        return (false, 0);
    }
    let mut period = 0u64;
    for (u, row) in m.rows().iter().enumerate() {
        for v in row.support() {
            let diff = (level[u] + 1).abs_diff(level[v]);
            period = num_integer::gcd(period, diff);
        }
    }
    (true, period)
}

/// The unique invariant distribution ν = νP of an ergodic kernel.
///
/// Up to [`DENSE_SOLVE_LIMIT`] states this solves (Pᵀ − I)ν = 0 with the last
/// equation replaced by Σν = 1; larger chains use power iteration in `f64`.
pub fn stationary_distribution<T: Scalar>(m: &WalkKernel<T>) -> Result<SparseDistribution<T>> {
    let (strongly, period) = support_structure(m);
    if !strongly {
        return Err(Error::NotErgodic("support digraph is not strongly connected".into()));
    }
    if period != 1 {
        return Err(Error::NotErgodic(format!("walk is periodic with period {period}")));
    }
    let n = m.state_count();
    let values: Vec<T> = if n <= DENSE_SOLVE_LIMIT {
        dense_stationary(m)?
    } else {
        power_iteration(&m.to_f64(), 1e-13, 1_000_000)?.into_iter().map(T::from_f64).collect()
    };
    let mut entries: Vec<(State, T)> = Vec::with_capacity(n);
    let mut total = T::zero();
    for (s, v) in values.into_iter().enumerate() {
        if v < -T::from_f64(1e-9) {
            return Err(Error::NotErgodic(format!("solver produced negative mass at state {s}")));
        }
        if v > T::zero() {
            total = total.clone() + v.clone();
            entries.push((s, v));
        }
    }
    if !T::EXACT {
        entries.iter_mut().for_each(|(_, v)| *v = v.clone() / total.clone());
    }
    SparseDistribution::new(entries)
}

fn dense_stationary<T: Scalar>(m: &WalkKernel<T>) -> Result<Vec<T>> {
    let n = m.state_count();
    // a[i][j] = P[j][i] - δ_ij, last row replaced by ones
    let mut a: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    for (j, row) in m.rows().iter().enumerate() {
        for (i, w) in row.entries() {
            a[*i][j] = a[*i][j].clone() + w.clone();
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = row[i].clone() - T::one();
    }
    a[n - 1] = vec![T::one(); n];
    let mut b = vec![T::zero(); n];
    b[n - 1] = T::one();
    solve_dense(a, b).ok_or_else(|| Error::NotErgodic("singular stationary system".into()))
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| {
                a[r][col]
                    .abs_val()
                    .partial_cmp(&a[s][col].abs_val())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    // prefer the earlier row on ties
                    .then(s.cmp(&r))
            })?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = T::one() / a[col][col].clone();
        let pivot_row = a[col].clone();
        let pivot_b = b[col].clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() * inv.clone();
            for c in col..n {
                if !pivot_row[c].is_zero() {
                    a[r][c] = a[r][c].clone() - factor.clone() * pivot_row[c].clone();
                }
            }
            b[r] = b[r].clone() - factor * pivot_b.clone();
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in (r + 1)..n {
            if !a[r][c].is_zero() {
                acc = acc - a[r][c].clone() * x[c].clone();
            }
        }
        x[r] = acc / a[r][r].clone();
    }
    Some(x)
}

fn power_iteration(m: &WalkKernel<f64>, tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let n = m.state_count();
    let mut nu = vec![1.0 / n as f64; n];
    for _ in 0..max_iters {
        let mut next = vec![0.0; n];
        for (x, row) in m.rows().iter().enumerate() {
            for (y, w) in row.entries() {
                next[*y] += nu[x] * w;
            }
        }
        let delta = nu.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        nu = next;
        if delta <= tol {
            return Ok(nu);
        }
    }
    Err(Error::NotErgodic(format!("power iteration did not converge in {max_iters} steps")))
}

/// ‖νP − ν‖∞ in `f64`.
pub fn stationarity_residual<T: Scalar>(m: &WalkKernel<T>, nu: &[f64]) -> f64 {
    let mut next = vec![0.0; nu.len()];
    for (x, row) in m.rows().iter().enumerate() {
        for (y, w) in row.entries() {
            next[*y] += nu[x] * w.to_f64();
        }
    }
    next.iter().zip(nu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Exact check that a dense vector is invariant: νP = ν entrywise.
pub fn is_invariant<T: Scalar>(m: &WalkKernel<T>, nu: &[T]) -> bool {
    let mut next = vec![T::zero(); nu.len()];
    for (x, row) in m.rows().iter().enumerate() {
        for (y, w) in row.entries() {
            next[*y] = next[*y].clone() + nu[x].clone() * w.clone();
        }
    }
    next.iter().zip(nu).all(|(a, b)| a.approx_eq(b))
}

/// A random c-Lipschitz function: the minimum of a few random distance cones,
/// scaled by a random factor in [0, 1].
pub fn random_lipschitz_function<R: Rng + ?Sized>(g: &StateGraph, c: f64, rng: &mut R) -> Vec<f64> {
    let n = g.state_count();
    let anchors = rng.random_range(1..=n.clamp(1, 4));
    let mut values = vec![f64::INFINITY; n];
    for _ in 0..anchors {
        let anchor = rng.random_range(0..n);
        let offset: f64 = rng.random_range(-3.0..3.0);
        let dist = g.distances_from(anchor);
        for (v, &d) in values.iter_mut().zip(dist.iter()) {
            if d != UNREACHABLE {
                *v = v.min(offset + d as f64);
            }
        }
    }
    let scale: f64 = rng.random_range(0.0..=1.0) * c;
    values.iter().map(|v| if v.is_finite() { v * scale } else { 0.0 }).collect()
}

/// Parses `u v` lines (0-based, `#` comments). A `states N` line fixes the
/// state count, which otherwise is one more than the largest index seen.
pub fn parse_edge_list(text: &str) -> Result<StateGraph> {
    let mut edges = Vec::new();
    let mut declared: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: expected `u v`, got {raw:?}", lineno + 1));
        match tokens.as_slice() {
            ["states", n] => declared = Some(n.parse().map_err(|_| bad())?),
            [u, v] => edges.push((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?)),
            _ => return Err(bad()),
        }
    }
    let seen = edges.iter().map(|&(u, v): &(usize, usize)| u.max(v) + 1).max().unwrap_or(0);
    let count = declared.unwrap_or(seen);
    if count < seen {
        return Err(Error::Parse(format!("declared {count} states but edges reference {}", seen - 1)));
    }
    StateGraph::from_edges(count, edges)
}

pub fn write_edge_list(g: &StateGraph) -> String {
    let mut out = format!("states {}\n", g.state_count());
    for x in 0..g.state_count() {
        if g.has_loop(x) {
            out.push_str(&format!("{x} {x}\n"));
        }
    }
    for (x, y) in g.edges() {
        out.push_str(&format!("{x} {y}\n"));
    }
    out
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use super::*;

    pub fn path(n: usize) -> StateGraph {
        StateGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    pub fn cycle(n: usize) -> StateGraph {
        StateGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> StateGraph {
        StateGraph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn petersen() -> StateGraph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        StateGraph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    /// Simple random walk: uniform over open neighbors.
    pub fn simple_walk(g: &StateGraph) -> WalkKernel<f64> {
        WalkKernel::new(
            (0..g.state_count())
                .map(|x| {
                    let d = g.degree(x) as f64;
                    SparseDistribution::new(g.neighbors(x).iter().map(|&y| (y, 1.0 / d)).collect())
                        .unwrap()
                })
                .collect(),
        )
    }
}
