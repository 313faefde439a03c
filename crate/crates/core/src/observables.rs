//! Lipschitz observables on configurations: subgraph copies, directed
//! triangles, and permutation-pattern occurrences.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometrize::{Configuration, Model};
use crate::scalar::binomial;

/// Largest pattern graph handled (automorphisms are found by brute force).
pub const MAX_PATTERN_VERTICES: usize = 8;

/// A small undirected pattern graph; isolated vertices count toward v(F).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SmallGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices > MAX_PATTERN_VERTICES {
            return Err(Error::PatternTooLarge(format!(
                "pattern graph has {vertices} vertices (max {MAX_PATTERN_VERTICES})"
            )));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b || a >= vertices || b >= vertices {
                return Err(Error::BadParams(format!("invalid pattern edge {a}-{b}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self { vertices, edges: norm })
    }

    pub fn complete(k: usize) -> Result<Self> {
        Self::new(k, (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect())
    }

    pub fn cycle(k: usize) -> Result<Self> {
        Self::new(k, (0..k).map(|a| (a, (a + 1) % k)).collect())
    }

    pub fn path(k: usize) -> Result<Self> {
        Self::new(k, (1..k).map(|a| (a - 1, a)).collect())
    }

    fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.vertices];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// |Aut(F)| by brute force over all vertex permutations.
    pub fn automorphism_count(&self) -> u64 {
        let adj = self.adjacency();
        let k = self.vertices;
        let mut perm: Vec<usize> = (0..k).collect();
        let mut count = 0;
        loop {
            if self.edges.iter().all(|&(a, b)| adj[perm[a]] >> perm[b] & 1 == 1) {
                count += 1;
            }
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
            let j = (i + 1..k).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        count
    }
}

/// An observable the concentration machinery knows how to normalize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternSpec {
    /// Copies of F in an undirected graph.
    Subgraph(SmallGraph),
    /// Cyclic triangles in a digraph, once per orientation.
    DirectedTriangles,
    /// Occurrences of τ (0-based one-line notation) in a permutation.
    Permutation(Vec<u8>),
}

impl PatternSpec {
    /// Parses `pattern:21`, `pattern:1 3 2`, `subgraph:K3` (also `C4`, `P3`,
    /// `edge`, or an explicit list like `0-1,1-2`), and `directed-triangles`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if matches!(text, "directed-triangles" | "triangles:directed" | "dtri") {
            return Ok(PatternSpec::DirectedTriangles);
        }
        if let Some(rest) = text.strip_prefix("pattern:") {
            return Ok(PatternSpec::Permutation(parse_permutation(rest)?));
        }
        if let Some(rest) = text.strip_prefix("subgraph:") {
            return Ok(PatternSpec::Subgraph(parse_small_graph(rest)?));
        }
        Err(Error::Parse(format!(
            "unknown observable `{text}` (pattern:<perm>, subgraph:<F>, directed-triangles)"
        )))
    }

    pub fn id(&self) -> String {
        match self {
            PatternSpec::Subgraph(f) => {
                let e: Vec<String> = f.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                format!("subgraph:v{}:{}", f.vertices, e.join(","))
            }
            PatternSpec::DirectedTriangles => "directed-triangles".into(),
            PatternSpec::Permutation(t) => {
                let s: Vec<String> = t.iter().map(|v| (v + 1).to_string()).collect();
                format!("pattern:{}", s.join(" "))
            }
        }
    }

    /// Value of the observable on a configuration of the matching kind.
    pub fn evaluate(&self, c: &Configuration) -> Result<u64> {
        match (self, c) {
            (PatternSpec::Subgraph(f), Configuration::Graph { .. }) => {
                count_subgraph(&c.graph_adjacency().expect("graph configuration"), f)
            }
            (PatternSpec::DirectedTriangles, Configuration::Digraph { out, .. }) => Ok(count_directed_triangles(out)),
            (PatternSpec::Permutation(t), Configuration::Permutation(p)) => count_pattern(p, t),
            _ => Err(Error::IncompatiblePair(format!("observable {} cannot be evaluated on {c:?}", self.id()))),
        }
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// One-line permutation, 1-based: `132`, `1 3 2`, or `1,3,2`.
pub fn parse_permutation(text: &str) -> Result<Vec<u8>> {
    let text = text.trim();
    let tokens: Vec<&str> = if text.contains([' ', ',']) {
        text.split([' ', ',']).filter(|s| !s.is_empty()).collect()
    } else {
        text.split("").filter(|s| !s.is_empty()).collect()
    };
    let values: Vec<usize> = tokens
        .iter()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad permutation entry `{t}`"))))
        .collect::<Result<_>>()?;
    let k = values.len();
    let mut seen = vec![false; k];
    for &v in &values {
        if v == 0 || v > k || std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::Parse(format!("`{text}` is not a permutation of 1..{k}")));
        }
    }
    if k > 255 {
        return Err(Error::PatternTooLarge(format!("pattern of length {k}")));
    }
    Ok(values.into_iter().map(|v| (v - 1) as u8).collect())
}

/// `K3`, `C4`, `P3`, `edge`, or `0-1,1-2,...` (vertices = max index + 1).
pub fn parse_small_graph(text: &str) -> Result<SmallGraph> {
    let text = text.trim();
    if text == "edge" {
        return SmallGraph::complete(2);
    }
    let sized = |rest: &str| -> Result<usize> {
        rest.parse().map_err(|_| Error::Parse(format!("bad pattern graph `{text}`")))
    };
    if let Some(k) = text.strip_prefix('K') {
        return SmallGraph::complete(sized(k)?);
    }
    if let Some(k) = text.strip_prefix('C') {
        let k = sized(k)?;
        if k < 3 {
            return Err(Error::BadParams("cycles need at least 3 vertices".into()));
        }
        return SmallGraph::cycle(k);
    }
    if let Some(k) = text.strip_prefix('P') {
        return SmallGraph::path(sized(k)?);
    }
    let mut edges = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = part.split_once('-').ok_or_else(|| Error::Parse(format!("bad pattern edge `{part}`")))?;
        let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad pattern edge `{part}`")))?;
        let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad pattern edge `{part}`")))?;
        edges.push((a, b));
    }
    let vertices = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    SmallGraph::new(vertices, edges)
}

/// Unlabeled copies of F in G: injective edge-preserving maps / |Aut(F)|.
/// `g` is the adjacency bitmask of each vertex.
pub fn count_subgraph(g: &[u64], f: &SmallGraph) -> Result<u64> {
    if f.vertices > MAX_PATTERN_VERTICES {
        return Err(Error::PatternTooLarge(format!("pattern graph has {} vertices", f.vertices)));
    }
    if f.vertices > g.len() {
        return Ok(0);
    }
    let fadj = f.adjacency();
    // earlier-mapped neighbors of each pattern vertex
    let back: Vec<Vec<usize>> = (0..f.vertices).map(|v| (0..v).filter(|&u| fadj[v] >> u & 1 == 1).collect()).collect();
    fn extend(depth: usize, image: &mut Vec<usize>, used: u64, g: &[u64], back: &[Vec<usize>]) -> u64 {
        if depth == back.len() {
            return 1;
        }
        let mut total = 0;
        for v in 0..g.len() {
            if used >> v & 1 == 1 || !back[depth].iter().all(|&u| g[image[u]] >> v & 1 == 1) {
                continue;
            }
            image.push(v);
            total += extend(depth + 1, image, used | 1 << v, g, back);
            image.pop();
        }
        total
    }
    let maps = extend(0, &mut Vec::with_capacity(f.vertices), 0, g, &back);
    Ok(maps / f.automorphism_count())
}

/// Cyclic triangles u→v→w→u, counted once per orientation of each triple.
pub fn count_directed_triangles(out: &[u64]) -> u64 {
    let n = out.len();
    let arc = |a: usize, b: usize| out[a] >> b & 1 == 1;
    let mut count = 0;
    for u in 0..n {
        for v in u + 1..n {
            for w in v + 1..n {
                count += (arc(u, v) && arc(v, w) && arc(w, u)) as u64;
                count += (arc(u, w) && arc(w, v) && arc(v, u)) as u64;
            }
        }
    }
    count
}

/// Occurrences of τ in π: index subsequences order-isomorphic to τ.
pub fn count_pattern(pi: &[u8], tau: &[u8]) -> Result<u64> {
    let (n, k) = (pi.len(), tau.len());
    if k > n {
        return Err(Error::PatternTooLarge(format!("pattern of length {k} exceeds permutation length {n}")));
    }
    if k == 0 {
        return Ok(1);
    }
    // position of each rank within τ, so an occurrence means pi[idx[order[r]]] increases in r
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| tau[i]);
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0;
    loop {
        if order.windows(2).all(|w| pi[idx[w[0]]] < pi[idx[w[1]]]) {
            count += 1;
        }
        // next k-subset of positions
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(count)
}

/// Lipschitz constant claimed for the observable on the model's walk.
pub fn claimed_lipschitz_constant(obs: &PatternSpec, model: &Model) -> Result<u128> {
    match (obs, model) {
        (PatternSpec::Subgraph(f), Model::GnM { n, .. }) => {
            if f.vertices < 2 {
                return Err(Error::IncompatiblePair("subgraph pattern needs at least two vertices".into()));
            }
            Ok(binomial(*n as u64, f.vertices as u64 - 2))
        }
        (PatternSpec::DirectedTriangles, Model::DOutRegular { d, .. }) => Ok((*d * *d) as u128),
        (PatternSpec::Permutation(t), Model::PermInsertion { n }) => {
            if t.is_empty() || t.len() > *n {
                return Err(Error::PatternTooLarge(format!("pattern of length {} on n = {n}", t.len())));
            }
            Ok(binomial(*n as u64 - 1, t.len() as u64 - 1))
        }
        _ => Err(Error::IncompatiblePair(format!("no Lipschitz claim for {} on {model}", obs.id()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMode {
    /// Every edge of the enumerated space.
    Exhaustive { cap: u128 },
    /// `count` random (configuration, neighbor) pairs from the claimed measure.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub max_difference: f64,
    pub edges_checked: u64,
    pub constant: f64,
}

/// Checks |f(u) − f(v)| ≤ c over edges of the model's configuration graph.
/// Needs only a neighbor oracle, so the sampled mode works without enumeration.
pub fn verify_lipschitz<F>(model: &Model, f: F, c: f64, mode: LipschitzMode) -> Result<LipschitzReport>
where
    F: Fn(&Configuration) -> Result<f64> + Sync,
{
    let check_pair = |x: &Configuration, fx: f64, y: &Configuration| -> Result<f64> {
        let diff = (fx - f(y)?).abs();
        if diff > c + 1e-12 {
            return Err(Error::LipschitzViolation {
                x: x.to_json().to_string(),
                y: y.to_json().to_string(),
                diff,
                c,
            });
        }
        Ok(diff)
    };
    let (max_difference, edges_checked) = match mode {
        LipschitzMode::Exhaustive { cap } => {
            let configs = model.enumerate(cap)?;
            let per_state: Vec<(f64, u64)> = configs
                .par_iter()
                .map(|x| {
                    let fx = f(x)?;
                    let mut worst = 0.0f64;
                    let mut checked = 0;
                    for y in model.neighbors(x)?.iter().filter(|y| *y > x) {
                        worst = worst.max(check_pair(x, fx, y)?);
                        checked += 1;
                    }
                    Ok((worst, checked))
                })
                .collect::<Result<_>>()?;
            per_state.into_iter().fold((0.0f64, 0u64), |(w, n), (a, b)| (w.max(a), n + b))
        }
        LipschitzMode::Sampled { count, seed } => {
            const CHUNK: usize = 1024;
            let chunks = count.div_ceil(CHUNK);
            let per_chunk: Vec<(f64, u64)> = (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chunk as u64);
                    let len = CHUNK.min(count - chunk * CHUNK);
                    let mut worst = 0.0f64;
                    let mut checked = 0u64;
                    for _ in 0..len {
                        let x = model.sample(&mut rng);
                        let nbrs = model.neighbors(&x)?;
                        if nbrs.is_empty() {
                            continue;
                        }
                        let y = &nbrs[rng.random_range(0..nbrs.len())];
                        worst = worst.max(check_pair(&x, f(&x)?, y)?);
                        checked += 1;
                    }
                    Ok((worst, checked))
                })
                .collect::<Result<_>>()?;
            per_chunk.into_iter().fold((0.0f64, 0u64), |(w, n), (a, b)| (w.max(a), n + b))
        }
    };
    Ok(LipschitzReport { max_difference, edges_checked, constant: c })
}

/// The approximation E[X_{n,d}] ≈ 2·C(n,3)·(d/(n−1))³.
pub fn expected_directed_triangles(n: usize, d: usize) -> Result<f64> {
    if n < 3 || d == 0 || d + 2 > n {
        return Err(Error::BadParams(format!("need 1 <= d <= n - 2, got n = {n}, d = {d}")));
    }
    Ok(2.0 * binomial(n as u64, 3) as f64 * (d as f64 / (n - 1) as f64).powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn graph_adj(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
        let mut adj = vec![0u64; n];
        for &(a, b) in edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    fn complete_adj(n: usize) -> Vec<u64> {
        let all = (1u64 << n) - 1;
        (0..n).map(|v| all & !(1 << v)).collect()
    }

    /// Distinct (vertex image, edge image) sets over all injective maps.
    fn naive_subgraph(g: &[u64], f: &SmallGraph) -> u64 {
        let n = g.len();
        let k = f.vertices;
        let mut copies: BTreeSet<(u64, Vec<(usize, usize)>)> = BTreeSet::new();
        let mut map = vec![0usize; k];
        fn rec(
            i: usize,
            n: usize,
            map: &mut Vec<usize>,
            g: &[u64],
            f: &SmallGraph,
            copies: &mut BTreeSet<(u64, Vec<(usize, usize)>)>,
        ) {
            if i == map.len() {
                if f.edges.iter().all(|&(a, b)| g[map[a]] >> map[b] & 1 == 1) {
                    let verts = map.iter().fold(0u64, |m, &v| m | 1 << v);
                    let mut es: Vec<(usize, usize)> =
                        f.edges.iter().map(|&(a, b)| (map[a].min(map[b]), map[a].max(map[b]))).collect();
                    es.sort_unstable();
                    copies.insert((verts, es));
                }
                return;
            }
            for v in 0..n {
                if !map[..i].contains(&v) {
                    map[i] = v;
                    rec(i + 1, n, map, g, f, copies);
                }
            }
        }
        rec(0, n, &mut map, g, f, &mut copies);
        copies.len() as u64
    }

    fn naive_directed(out: &[u64]) -> u64 {
        let n = out.len();
        let arc = |a: usize, b: usize| out[a] >> b & 1 == 1;
        let mut c = 0;
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    if a != b && b != d && a != d && arc(a, b) && arc(b, d) && arc(d, a) {
                        c += 1;
                    }
                }
            }
        }
        c / 3
    }

    fn naive_pattern(pi: &[u8], tau: &[u8]) -> u64 {
        let (n, k) = (pi.len(), tau.len());
        let mut count = 0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let sub: Vec<u8> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pi[i]).collect();
            let iso = (0..k).all(|i| (0..k).all(|j| (sub[i] < sub[j]) == (tau[i] < tau[j])));
            count += iso as u64;
        }
        count
    }

    #[test]
    fn subgraph_examples() {
        let k3 = SmallGraph::complete(3).unwrap();
        assert_eq!(count_subgraph(&complete_adj(4), &k3).unwrap(), 4);
        let c5 = graph_adj(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(count_subgraph(&c5, &k3).unwrap(), 0);
        assert_eq!(count_subgraph(&complete_adj(4), &SmallGraph::cycle(4).unwrap()).unwrap(), 3);
        assert_eq!(SmallGraph::cycle(4).unwrap().automorphism_count(), 8);
        assert!(matches!(SmallGraph::complete(9), Err(Error::PatternTooLarge(_))));
    }

    #[test]
    fn directed_examples() {
        // cyclic K3: 0→1→2→0
        assert_eq!(count_directed_triangles(&[0b010, 0b100, 0b001]), 1);
        // transitive: 0→1, 0→2, 1→2
        assert_eq!(count_directed_triangles(&[0b110, 0b100, 0b000]), 0);
        assert_eq!(count_directed_triangles(&complete_adj(4)), 8);
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(count_pattern(&[0, 1, 2], &[0, 1]).unwrap(), 3);
        assert_eq!(count_pattern(&[0, 1, 2], &[1, 0]).unwrap(), 0);
        assert_eq!(count_pattern(&[1, 3, 0, 2], &[0, 2, 1]).unwrap(), 1);
        assert!(matches!(count_pattern(&[0, 1], &[0, 1, 2]), Err(Error::PatternTooLarge(_))));
        assert_eq!(parse_permutation("132").unwrap(), vec![0, 2, 1]);
        assert_eq!(parse_permutation("1 3 2").unwrap(), vec![0, 2, 1]);
        assert!(parse_permutation("1 1 2").is_err());
    }

    #[test]
    fn parsing_observables() {
        assert_eq!(PatternSpec::parse("pattern:21").unwrap(), PatternSpec::Permutation(vec![1, 0]));
        assert_eq!(PatternSpec::parse("subgraph:K3").unwrap(), PatternSpec::Subgraph(SmallGraph::complete(3).unwrap()));
        assert_eq!(
            PatternSpec::parse("subgraph:0-1,1-2,2-0").unwrap(),
            PatternSpec::Subgraph(SmallGraph::complete(3).unwrap())
        );
        assert_eq!(PatternSpec::parse("directed-triangles").unwrap(), PatternSpec::DirectedTriangles);
        assert!(PatternSpec::parse("betti").is_err());
    }

    #[test]
    fn claimed_constants() {
        let k3 = PatternSpec::Subgraph(SmallGraph::complete(3).unwrap());
        assert_eq!(claimed_lipschitz_constant(&k3, &Model::GnM { n: 10, m: 20 }).unwrap(), 10);
        assert_eq!(claimed_lipschitz_constant(&PatternSpec::DirectedTriangles, &Model::DOutRegular { n: 5, d: 2 }).unwrap(), 4);
        let inv = PatternSpec::Permutation(vec![1, 0]);
        assert_eq!(claimed_lipschitz_constant(&inv, &Model::PermInsertion { n: 7 }).unwrap(), 6);
        assert!(matches!(
            claimed_lipschitz_constant(&inv, &Model::PermTransposition { n: 7 }),
            Err(Error::IncompatiblePair(_))
        ));
    }

    #[test]
    fn lipschitz_claims_hold_exhaustively() {
        let cap = crate::geometrize::DEFAULT_CAP;
        let cases = [
            (PatternSpec::Subgraph(SmallGraph::complete(3).unwrap()), Model::GnM { n: 5, m: 4 }),
            (PatternSpec::Subgraph(SmallGraph::cycle(4).unwrap()), Model::GnM { n: 5, m: 5 }),
            (PatternSpec::Subgraph(SmallGraph::path(3).unwrap()), Model::GnM { n: 5, m: 3 }),
            (PatternSpec::DirectedTriangles, Model::DOutRegular { n: 4, d: 1 }),
            (PatternSpec::DirectedTriangles, Model::DOutRegular { n: 4, d: 2 }),
            (PatternSpec::Permutation(vec![1, 0]), Model::PermInsertion { n: 5 }),
            (PatternSpec::Permutation(vec![0, 2, 1]), Model::PermInsertion { n: 5 }),
        ];
        for (obs, model) in cases {
            let c = claimed_lipschitz_constant(&obs, &model).unwrap() as f64;
            let report =
                verify_lipschitz(&model, |x| obs.evaluate(x).map(|v| v as f64), c, LipschitzMode::Exhaustive { cap })
                    .unwrap();
            assert!(report.max_difference <= c, "{obs} on {model}");
            assert!(report.edges_checked > 0);
        }
        // too small a constant is caught with a witness
        let k3 = PatternSpec::Subgraph(SmallGraph::complete(3).unwrap());
        let r = verify_lipschitz(&Model::GnM { n: 5, m: 4 }, |x| k3.evaluate(x).map(|v| v as f64), 0.5, LipschitzMode::Exhaustive { cap });
        assert!(matches!(r, Err(Error::LipschitzViolation { .. })));
        let constant = verify_lipschitz(&Model::PermInsertion { n: 4 }, |_| Ok(1.0), 0.0, LipschitzMode::Exhaustive { cap }).unwrap();
        assert_eq!(constant.max_difference, 0.0);
    }

    #[test]
    fn sampled_lipschitz_is_seeded() {
        let model = Model::PermInsertion { n: 9 };
        let obs = PatternSpec::Permutation(vec![1, 0]);
        let run = || {
            verify_lipschitz(&model, |x| obs.evaluate(x).map(|v| v as f64), 8.0, LipschitzMode::Sampled { count: 3000, seed: 4 })
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert_eq!(a.edges_checked, 3000);
    }

    #[test]
    fn expected_triangles() {
        assert!((expected_directed_triangles(3, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(expected_directed_triangles(5, 0), Err(Error::BadParams(_))));
        let values: Vec<f64> = (1..=6).map(|d| expected_directed_triangles(8, d).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn counters_match_naive_enumerators() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let patterns = [
            SmallGraph::complete(3).unwrap(),
            SmallGraph::cycle(4).unwrap(),
            SmallGraph::path(3).unwrap(),
            SmallGraph::new(4, vec![(0, 1), (2, 3)]).unwrap(),
            SmallGraph::new(3, vec![(0, 1)]).unwrap(),
        ];
        for _ in 0..120 {
            let n = rng.random_range(3..7);
            let mut adj = vec![0u64; n];
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(0.5) {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
            }
            for f in &patterns {
                assert_eq!(count_subgraph(&adj, f).unwrap(), naive_subgraph(&adj, f));
            }
            let edges = adj.iter().map(|m| m.count_ones() as u64).sum::<u64>() / 2;
            assert_eq!(count_subgraph(&adj, &SmallGraph::complete(2).unwrap()).unwrap(), edges);

            let out: Vec<u64> = (0..n).map(|v| (0..n).filter(|&u| u != v && rng.random_bool(0.5)).fold(0, |m, u| m | 1 << u)).collect();
            assert_eq!(count_directed_triangles(&out), naive_directed(&out));
            let mut relabel: Vec<usize> = (0..n).collect();
            rand::seq::SliceRandom::shuffle(relabel.as_mut_slice(), &mut rng);
            let mut moved = vec![0u64; n];
            for v in 0..n {
                for u in 0..n {
                    if out[v] >> u & 1 == 1 {
                        moved[relabel[v]] |= 1 << relabel[u];
                    }
                }
            }
            assert_eq!(count_directed_triangles(&moved), count_directed_triangles(&out));

            let len = rng.random_range(3..9);
            let mut pi: Vec<u8> = (0..len as u8).collect();
            rand::seq::SliceRandom::shuffle(pi.as_mut_slice(), &mut rng);
            for tau in [vec![0u8, 1], vec![1, 0], vec![0, 2, 1], vec![2, 0, 1], vec![1, 3, 0, 2]] {
                if tau.len() <= len {
                    assert_eq!(count_pattern(&pi, &tau).unwrap(), naive_pattern(&pi, &tau));
                }
            }
            let pairs = (len * (len - 1) / 2) as u64;
            assert_eq!(count_pattern(&pi, &[0, 1]).unwrap() + count_pattern(&pi, &[1, 0]).unwrap(), pairs);
        }
    }
}
