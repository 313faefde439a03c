//! Explicit couplings between kernel rows of adjacent configurations.
//!
//! Each model gets the matching used to bound its curvature: configurations
//! reachable from both endpoints are matched to themselves, and the rest are
//! matched move-for-move so that matched pairs stay within distance one.

use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use super::{move_after, pair_index, Configuration, GeometrizedSpace, Model};
use crate::error::{Error, Result};
use crate::scalar::{rational_pow, ratio, Rational};
use crate::state_space::State;
use crate::transport::Coupling;

/// The proof coupling of rows `x` and `y` for an edge xy of the space.
pub fn paper_coupling(space: &GeometrizedSpace, x: State, y: State) -> Result<Coupling<Rational>> {
    let n_states = space.state_count();
    if x >= n_states || y >= n_states {
        return Err(Error::InvalidState { state: x.max(y), count: n_states });
    }
    if x == y || !space.graph().has_edge(x, y) {
        return Err(Error::NotAnEdge { x, y });
    }
    let c1 = space.configuration(x);
    let c2 = space.configuration(y);
    let pairs: Vec<(Configuration, Configuration, Rational)> = match &space.model {
        Model::Gnp { n, p } => gnp_pairs(*n, p, c1, c2)?,
        Model::GnM { .. } | Model::Hypergraph { .. } => swap_pairs(&space.model, c1, c2)?,
        Model::DOutRegular { .. } => dout_pairs(&space.model, c1, c2)?,
        Model::PermInsertion { .. } => insertion_pairs(space, c1, c2)?,
        Model::PermTransposition { .. } => {
            return Err(Error::UnsupportedModel(
                "the transposition walk has no explicit matching coupling".into(),
            ))
        }
    };
    let lookup = |c: &Configuration| {
        space
            .state_of(c)
            .ok_or_else(|| Error::BadParams(format!("coupling leaves the state space at {c:?}")))
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b, w) in pairs {
        out.push(((lookup(&a)?, lookup(&b)?), w));
    }
    Ok(Coupling::from_pairs(out))
}

/// Shared randomness: both chains pick the same vertex u and the same new
/// star at u. After resampling the star of the vertex where the graphs
/// differ, the two results coincide; otherwise they still differ only at
/// that vertex.
fn gnp_pairs(
    n: usize,
    p: &Rational,
    c1: &Configuration,
    c2: &Configuration,
) -> Result<Vec<(Configuration, Configuration, Rational)>> {
    let (Configuration::Graph { edges: e1, .. }, Configuration::Graph { edges: e2, .. }) = (c1, c2) else {
        return Err(Error::BadParams("expected graph configurations".into()));
    };
    let stars: Vec<(Vec<usize>, u64)> = (0..n)
        .map(|v| {
            let star: Vec<usize> = (0..n).filter(|&u| u != v).map(|u| pair_index(n, u.min(v), u.max(v))).collect();
            let mask = star.iter().fold(0u64, |m, &b| m | 1 << b);
            (star, mask)
        })
        .collect();
    let q = Rational::one() - p;
    let share = ratio(1, n as i64);
    let mut out = Vec::with_capacity(n << (n - 1));
    for (star, mask) in &stars {
        for s in 0u64..(1 << (n - 1)) {
            let chosen = s.count_ones() as usize;
            let set = (0..n - 1).filter(|i| s >> i & 1 == 1).fold(0u64, |m, i| m | 1 << star[i]);
            let w = share.clone() * rational_pow(p, chosen) * rational_pow(&q, n - 1 - chosen);
            let r1 = Configuration::Graph { n: n as u8, edges: (e1 & !mask) | set };
            let r2 = Configuration::Graph { n: n as u8, edges: (e2 & !mask) | set };
            out.push((r1, r2, w));
        }
    }
    Ok(out)
}

/// Items of a swap-model configuration (edges or hyperedges) and the universe size.
fn items(model: &Model, c: &Configuration) -> Result<(BTreeSet<usize>, usize)> {
    match (model, c) {
        (Model::GnM { n, .. }, Configuration::Graph { edges, .. }) => {
            Ok(((0..64).filter(|b| edges >> b & 1 == 1).collect(), n * (n - 1) / 2))
        }
        (Model::Hypergraph { n, k, .. }, Configuration::Hypergraph { edges, .. }) => Ok((
            edges.iter().map(|&e| e as usize).collect(),
            crate::scalar::binomial(*n as u64, *k as u64) as usize,
        )),
        _ => Err(Error::BadParams("expected a swap-model configuration".into())),
    }
}

fn from_items(model: &Model, set: &BTreeSet<usize>) -> Configuration {
    match model {
        Model::GnM { n, .. } => Configuration::Graph { n: *n as u8, edges: set.iter().fold(0u64, |m, &b| m | 1 << b) },
        Model::Hypergraph { n, k, .. } => Configuration::Hypergraph {
            n: *n as u8,
            k: *k as u8,
            edges: set.iter().map(|&e| e as u32).collect(),
        },
        _ => unreachable!("swap coupling on a non-swap model"),
    }
}

/// G2 = G1 − e1 + e2. A move (a out, b in) of G1 with a = e1 or b = e2 lands
/// in the closed neighborhood of G2 and is matched to itself, as is G1; any
/// other move is matched to the same move applied to G2.
fn swap_pairs(model: &Model, c1: &Configuration, c2: &Configuration) -> Result<Vec<(Configuration, Configuration, Rational)>> {
    let (g1, universe) = items(model, c1)?;
    let (g2, _) = items(model, c2)?;
    let removed: Vec<usize> = g1.difference(&g2).copied().collect();
    let added: Vec<usize> = g2.difference(&g1).copied().collect();
    let ([e1], [e2]) = (removed.as_slice(), added.as_slice()) else {
        return Err(Error::NotAnEdge { x: 0, y: 0 });
    };
    let m = g1.len();
    let w = Rational::new(1.into(), ((m * (universe - m)) as u128 + 1).into());
    let mut out = vec![(c1.clone(), c1.clone(), w.clone())];
    for &a in &g1 {
        for b in (0..universe).filter(|b| !g1.contains(b)) {
            let mut next1 = g1.clone();
            next1.remove(&a);
            next1.insert(b);
            let left = from_items(model, &next1);
            let right = if a == *e1 || b == *e2 {
                left.clone()
            } else {
                let mut next2 = g2.clone();
                next2.remove(&a);
                next2.insert(b);
                from_items(model, &next2)
            };
            out.push((left, right, w.clone()));
        }
    }
    Ok(out)
}

/// G1 and G2 differ only at vertex u. Moves at u (and G1 itself) are shared
/// with G2; a move at v ≠ u is matched to the same move applied to G2.
fn dout_pairs(model: &Model, c1: &Configuration, c2: &Configuration) -> Result<Vec<(Configuration, Configuration, Rational)>> {
    let (Model::DOutRegular { n, d }, Configuration::Digraph { out: o1, .. }, Configuration::Digraph { out: o2, .. }) =
        (model, c1, c2)
    else {
        return Err(Error::BadParams("expected digraph configurations".into()));
    };
    let differing: Vec<usize> = (0..*n).filter(|&v| o1[v] != o2[v]).collect();
    let [u] = differing.as_slice() else {
        return Err(Error::NotAnEdge { x: 0, y: 0 });
    };
    let choices = crate::scalar::binomial(*n as u64 - 1, *d as u64);
    let w = Rational::new(1.into(), (*n as u128 * (choices - 1) + 1).into());
    let mut out = vec![(c1.clone(), c1.clone(), w.clone())];
    for v in 0..*n {
        for choice in super::out_choices(*n, *d, v) {
            if choice == o1[v] {
                continue;
            }
            let mut next1 = o1.clone();
            next1[v] = choice;
            let left = Configuration::Digraph { n: *n as u8, out: next1 };
            let right = if v == *u {
                left.clone()
            } else {
                let mut next2 = o2.clone();
                next2[v] = choice;
                Configuration::Digraph { n: *n as u8, out: next2 }
            };
            out.push((left, right, w.clone()));
        }
    }
    Ok(out)
}

/// σ2 is σ1 with element i moved. The n reinsertions of i into σ1 \ i are
/// neighbors of both and are matched to themselves. Every other neighbor of
/// σ1 prefers the neighbor of σ2 reached by the same move; conflicts are
/// resolved by a maximum matching restricted to pairs at distance ≤ 1, and
/// anything still unmatched is paired in index order.
fn insertion_pairs(
    space: &GeometrizedSpace,
    c1: &Configuration,
    c2: &Configuration,
) -> Result<Vec<(Configuration, Configuration, Rational)>> {
    let (Configuration::Permutation(s1), Configuration::Permutation(s2)) = (c1, c2) else {
        return Err(Error::BadParams("expected permutations".into()));
    };
    let n = s1.len();
    let without = |p: &[u8], v: u8| p.iter().copied().filter(|&x| x != v).collect::<Vec<_>>();
    let moved = (0..n as u8)
        .find(|&i| without(s1, i) == without(s2, i))
        .ok_or(Error::NotAnEdge { x: 0, y: 0 })?;
    let base = without(s1, moved);
    let fixed: BTreeSet<Vec<u8>> = std::iter::once(None)
        .chain(base.iter().copied().map(Some))
        .map(|after| move_after(&base, moved, after))
        .collect();

    let w = Rational::new(1.into(), (((n - 1) * (n - 1)) as u128 + 1).into());
    let mut out: Vec<(Configuration, Configuration, Rational)> =
        fixed.iter().map(|p| (Configuration::Permutation(p.clone()), Configuration::Permutation(p.clone()), w.clone())).collect();

    // first move description producing each neighbor of σ1
    let mut left: Vec<Vec<u8>> = Vec::new();
    let mut preferred: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
    for i in 0..n as u8 {
        for j in std::iter::once(None).chain((0..n as u8).filter(|&j| j != i).map(Some)) {
            let l = move_after(s1, i, j);
            if l == *s1 || fixed.contains(&l) || preferred.contains_key(&l) {
                continue;
            }
            preferred.insert(l.clone(), move_after(s2, i, j));
            left.push(l);
        }
    }
    if !fixed.contains(s1) {
        left.push(s1.clone());
    }
    let mut right: Vec<Vec<u8>> = space
        .model
        .neighbors(c2)?
        .into_iter()
        .chain(std::iter::once(c2.clone()))
        .filter_map(|c| match c {
            Configuration::Permutation(p) if !fixed.contains(&p) => Some(p),
            _ => None,
        })
        .collect();
    right.sort();
    if left.len() != right.len() {
        return Err(Error::BadParams("neighborhood sizes differ".into()));
    }
    left.sort();

    let right_index: HashMap<&Vec<u8>, usize> = right.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let candidates: Vec<Vec<usize>> = left
        .iter()
        .map(|l| {
            let lc = Configuration::Permutation(l.clone());
            let mut close: BTreeSet<usize> = BTreeSet::new();
            if let Some(&r) = right_index.get(l) {
                close.insert(r);
            }
            for nb in space.model.neighbors(&lc).unwrap_or_default() {
                if let Configuration::Permutation(p) = nb {
                    if let Some(&r) = right_index.get(&p) {
                        close.insert(r);
                    }
                }
            }
            let first = preferred.get(l).and_then(|p| right_index.get(p)).copied().filter(|r| close.contains(r));
            first.into_iter().chain(close.into_iter().filter(|r| Some(*r) != first)).collect()
        })
        .collect();

    let matched = max_bipartite_matching(&candidates, right.len());
    let mut free_right: Vec<usize> = {
        let used: BTreeSet<usize> = matched.iter().flatten().copied().collect();
        (0..right.len()).filter(|r| !used.contains(r)).collect()
    };
    free_right.reverse();
    for (li, m) in matched.iter().enumerate() {
        let r = match m {
            Some(r) => *r,
            None => free_right.pop().expect("sizes agree"),
        };
        out.push((Configuration::Permutation(left[li].clone()), Configuration::Permutation(right[r].clone()), w.clone()));
    }
    Ok(out)
}

/// Kuhn's augmenting-path matching; candidate lists are tried in order.
fn max_bipartite_matching(candidates: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    fn augment(l: usize, cand: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &cand[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|o| augment(o, cand, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; right_count];
    for l in 0..candidates.len() {
        let mut seen = vec![false; right_count];
        augment(l, candidates, &mut seen, &mut owner);
    }
    let mut matched = vec![None; candidates.len()];
    for (r, o) in owner.iter().enumerate() {
        if let Some(l) = o {
            matched[*l] = Some(r);
        }
    }
    matched
}
