//! Random-configuration spaces realized as invariant distributions of walks.
//!
//! Each [`Model`] describes a family of configurations (graphs, hypergraphs,
//! out-regular digraphs, permutations), the walk that moves between them,
//! the invariant measure the walk is claimed to have, and the claimed
//! curvature lower bound. Models answer local queries (kernel rows,
//! neighbors, exact samples) without enumeration; [`build`] enumerates a
//! desk-scale instance into a [`GeometrizedSpace`] with a concrete
//! [`StateGraph`] and [`WalkKernel`].

mod coupling;

pub use coupling::paper_coupling;

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, parse_rational, ratio, rational_pow, Rational, Scalar};
use crate::state_space::{SparseDistribution, State, StateGraph, WalkKernel};

/// Default enumeration cap on state counts.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "RICCI_CONC_CAP";

/// The cap from `RICCI_CONC_CAP`, or [`DEFAULT_CAP`].
pub fn enumeration_cap() -> u128 {
    std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Model {
    /// G(n, p) with the resample-one-star walk.
    Gnp { n: usize, p: Rational },
    /// G(n, M) with edge/non-edge swaps.
    GnM { n: usize, m: usize },
    /// k-uniform hypergraphs with M hyperedges, swap walk.
    Hypergraph { n: usize, k: usize, m: usize },
    /// d-out-regular digraphs, one out-neighborhood changed per step.
    DOutRegular { n: usize, d: usize },
    /// Permutations with the insertion walk.
    PermInsertion { n: usize },
    /// Permutations with the random-transposition walk.
    PermTransposition { n: usize },
}

/// One configuration. Vertices and permutation values are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Configuration {
    /// Bit `pair_index(a, b)` set iff ab is an edge.
    Graph { n: u8, edges: u64 },
    /// Sorted indices of hyperedges among the k-subsets in lexicographic order.
    Hypergraph { n: u8, k: u8, edges: Vec<u32> },
    /// `out[v]` is the out-neighborhood of v as a bitmask.
    Digraph { n: u8, out: Vec<u64> },
    /// One-line notation.
    Permutation(Vec<u8>),
}

/// Index of the pair {a, b} (a < b) in lexicographic order over [n].
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All pairs of [n] in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// k-subsets of [n] in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Removes `value` and reinserts it right after `after`, or at the front.
pub fn move_after(perm: &[u8], value: u8, after: Option<u8>) -> Vec<u8> {
    let mut out: Vec<u8> = perm.iter().copied().filter(|&v| v != value).collect();
    let at = match after {
        None => 0,
        Some(a) => out.iter().position(|&v| v == a).map_or(0, |p| p + 1),
    };
    out.insert(at, value);
    out
}

/// Lehmer code: entry i counts later entries smaller than perm[i].
pub fn lehmer_code(perm: &[u8]) -> Vec<u64> {
    (0..perm.len()).map(|i| perm[i + 1..].iter().filter(|&&v| v < perm[i]).count() as u64).collect()
}

pub fn from_lehmer_code(code: &[u64]) -> Result<Vec<u8>> {
    let n = code.len();
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for (i, &c) in code.iter().enumerate() {
        if c as usize >= n - i {
            return Err(Error::Parse(format!("Lehmer digit {c} at position {i} too large")));
        }
        out.push(pool.remove(c as usize));
    }
    Ok(out)
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |b| mask >> b & 1 == 1)
}

fn combinations_of_mask(n_bits: usize, k: usize) -> Vec<u64> {
    k_subsets(n_bits, k).into_iter().map(|s| s.into_iter().fold(0u64, |m, b| m | 1 << b)).collect()
}

/// Out-neighborhood choices for vertex v: d-subsets of the other vertices,
/// in lexicographic order of their sorted member lists.
fn out_choices(n: usize, d: usize, v: usize) -> Vec<u64> {
    let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    k_subsets(n - 1, d).into_iter().map(|s| s.into_iter().fold(0u64, |m, i| m | 1 << others[i])).collect()
}

impl Model {
    /// Parses a model name plus `key=value` parameters (`n=4,M=2`).
    pub fn from_params(name: &str, params: &str) -> Result<Self> {
        let mut kv: HashMap<String, String> = HashMap::new();
        for part in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter `{part}` is not key=value")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let int = |key: &str| -> Result<usize> {
            let raw = kv
                .get(key)
                .or_else(|| kv.get(&key.to_lowercase()))
                .ok_or_else(|| Error::BadParams(format!("model `{name}` needs parameter {key}")))?;
            raw.parse().map_err(|_| Error::Parse(format!("parameter {key}={raw} is not an integer")))
        };
        let model = match name {
            "gnp" => {
                let raw = kv.get("p").ok_or_else(|| Error::BadParams("model `gnp` needs parameter p".into()))?;
                Model::Gnp { n: int("n")?, p: parse_rational(raw)? }
            }
            "gnm" => Model::GnM { n: int("n")?, m: int("M")? },
            "hyper" | "hypergraph" => Model::Hypergraph { n: int("n")?, k: int("k")?, m: int("M")? },
            "doutreg" | "dout" => Model::DOutRegular { n: int("n")?, d: int("d")? },
            "perm-ins" => Model::PermInsertion { n: int("n")? },
            "perm-trans" => Model::PermTransposition { n: int("n")? },
            other => {
                return Err(Error::BadParams(format!(
                    "unknown model `{other}` (gnp|gnm|hyper|doutreg|perm-ins|perm-trans)"
                )))
            }
        };
        model.validate()?;
        Ok(model)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Gnp { .. } => "gnp",
            Model::GnM { .. } => "gnm",
            Model::Hypergraph { .. } => "hyper",
            Model::DOutRegular { .. } => "doutreg",
            Model::PermInsertion { .. } => "perm-ins",
            Model::PermTransposition { .. } => "perm-trans",
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Model::Gnp { n, .. }
            | Model::GnM { n, .. }
            | Model::Hypergraph { n, .. }
            | Model::DOutRegular { n, .. }
            | Model::PermInsertion { n }
            | Model::PermTransposition { n } => n,
        }
    }

    pub fn params_json(&self) -> Value {
        match self {
            Model::Gnp { n, p } => json!({ "n": n, "p": p.to_json() }),
            Model::GnM { n, m } => json!({ "n": n, "M": m }),
            Model::Hypergraph { n, k, m } => json!({ "n": n, "k": k, "M": m }),
            Model::DOutRegular { n, d } => json!({ "n": n, "d": d }),
            Model::PermInsertion { n } | Model::PermTransposition { n } => json!({ "n": n }),
        }
    }

    /// Checks parameter ranges and representation limits.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadParams(msg));
        match self {
            Model::Gnp { n, p } => {
                if !(2..=11).contains(n) {
                    return bad(format!("gnp needs 2 <= n <= 11, got {n}"));
                }
                if *p <= Rational::zero() || *p >= Rational::one() {
                    return bad(format!("gnp needs 0 < p < 1, got {}", p.display()));
                }
                if u64::try_from(p.denom().clone()).is_err() {
                    return bad("p must have a denominator below 2^64".into());
                }
            }
            Model::GnM { n, m } => {
                if !(2..=11).contains(n) {
                    return bad(format!("gnm needs 2 <= n <= 11, got {n}"));
                }
                let pairs = n * (n - 1) / 2;
                if *m == 0 || *m >= pairs {
                    return bad(format!("gnm needs 1 <= M <= {}, got M = {m}", pairs.saturating_sub(1)));
                }
            }
            Model::Hypergraph { n, k, m } => {
                if *k < 2 || k > n || *n > 64 {
                    return bad(format!("hypergraph needs 2 <= k <= n <= 64, got n = {n}, k = {k}"));
                }
                let sets = binomial(*n as u64, *k as u64);
                if sets > u32::MAX as u128 {
                    return bad(format!("C({n},{k}) is too large"));
                }
                if *m == 0 || *m as u128 >= sets {
                    return bad(format!("hypergraph needs 1 <= M <= {}, got M = {m}", sets.saturating_sub(1)));
                }
            }
            Model::DOutRegular { n, d } => {
                if *n < 3 || *n > 64 || *d == 0 || *d + 2 > *n {
                    return bad(format!("d-out-regular needs 1 <= d <= n - 2 and n <= 64, got n = {n}, d = {d}"));
                }
            }
            Model::PermInsertion { n } | Model::PermTransposition { n } => {
                if !(2..=255).contains(n) {
                    return bad(format!("permutation models need 2 <= n <= 255, got {n}"));
                }
            }
        }
        Ok(())
    }

    /// Number of configurations (saturating at `u128::MAX`).
    pub fn state_count(&self) -> u128 {
        match *self {
            Model::Gnp { n, .. } => 1u128 << (n * (n - 1) / 2),
            Model::GnM { n, m } => binomial((n * (n - 1) / 2) as u64, m as u64),
            Model::Hypergraph { n, k, m } => {
                let sets = binomial(n as u64, k as u64);
                binomial(sets as u64, m as u64)
            }
            Model::DOutRegular { n, d } => crate::scalar::checked_pow(binomial(n as u64 - 1, d as u64), n as u32),
            Model::PermInsertion { n } | Model::PermTransposition { n } => factorial(n as u64),
        }
    }

    /// Closed-form claimed lower bound on curvature, if the model has one.
    pub fn claimed_kappa_lb(&self) -> Option<Rational> {
        let r = |a: u128, b: u128| Rational::new(a.into(), b.into());
        match *self {
            Model::Gnp { n, .. } => Some(r(1, n as u128)),
            Model::GnM { n, m } => {
                let big = (n * (n - 1) / 2) as u128;
                let m = m as u128;
                Some(r(big, m * (big - m) + 1))
            }
            Model::Hypergraph { n, k, m } => {
                let big = binomial(n as u64, k as u64);
                let m = m as u128;
                Some(r(big, m * (big - m) + 1))
            }
            Model::DOutRegular { n, d } => {
                let c = binomial(n as u64 - 1, d as u64);
                Some(r(c, n as u128 * (c - 1) + 1))
            }
            Model::PermInsertion { n } => {
                let n = n as u128;
                Some(r(n, (n - 1) * (n - 1) + 1))
            }
            Model::PermTransposition { .. } => None,
        }
    }

    /// Claimed invariant probability of a configuration.
    pub fn claimed_nu(&self, c: &Configuration) -> Rational {
        match (self, c) {
            (Model::Gnp { n, p }, Configuration::Graph { edges, .. }) => {
                let total = n * (n - 1) / 2;
                let e = edges.count_ones() as usize;
                rational_pow(p, e) * rational_pow(&(Rational::one() - p), total - e)
            }
            _ => Rational::new(1.into(), self.state_count().into()),
        }
    }

    fn check_config(&self, c: &Configuration) -> Result<()> {
        let n = self.n();
        let ok = match (self, c) {
            (Model::Gnp { .. }, Configuration::Graph { n: cn, edges }) => {
                *cn as usize == n && edges >> (n * (n - 1) / 2) == 0
            }
            (Model::GnM { m, .. }, Configuration::Graph { n: cn, edges }) => {
                *cn as usize == n && edges >> (n * (n - 1) / 2) == 0 && edges.count_ones() as usize == *m
            }
            (Model::Hypergraph { k, m, .. }, Configuration::Hypergraph { n: cn, k: ck, edges }) => {
                let sets = binomial(n as u64, *k as u64);
                *cn as usize == n
                    && *ck as usize == *k
                    && edges.len() == *m
                    && edges.windows(2).all(|w| w[0] < w[1])
                    && edges.iter().all(|&e| (e as u128) < sets)
            }
            (Model::DOutRegular { d, .. }, Configuration::Digraph { n: cn, out }) => {
                *cn as usize == n
                    && out.len() == n
                    && out.iter().enumerate().all(|(v, m)| {
                        m >> v & 1 == 0 && m.count_ones() as usize == *d && (n == 64 || m >> n == 0)
                    })
            }
            (Model::PermInsertion { .. } | Model::PermTransposition { .. }, Configuration::Permutation(p)) => {
                let mut seen = vec![false; n];
                p.len() == n
                    && p.iter().all(|&v| (v as usize) < n && !std::mem::replace(&mut seen[v as usize], true))
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadParams(format!("configuration {c:?} does not belong to model {}", self.name())))
        }
    }

    /// One kernel row: every reachable configuration with its exact probability,
    /// merged and sorted; the configuration itself appears when it has self-mass.
    pub fn kernel_row(&self, c: &Configuration) -> Result<Vec<(Configuration, Rational)>> {
        self.check_config(c)?;
        let mut row: Vec<(Configuration, Rational)> = match (self, c) {
            (Model::Gnp { n, p }, Configuration::Graph { edges, .. }) => {
                let n = *n;
                let q = Rational::one() - p;
                let share = ratio(1, n as i64);
                let mut out = Vec::with_capacity(n << (n - 1));
                for v in 0..n {
                    let star: Vec<usize> =
                        (0..n).filter(|&u| u != v).map(|u| pair_index(n, u.min(v), u.max(v))).collect();
                    let star_mask = star.iter().fold(0u64, |m, &b| m | 1 << b);
                    for s in 0u64..(1 << (n - 1)) {
                        let chosen = s.count_ones() as usize;
                        let set = bits(s).fold(0u64, |m, i| m | 1 << star[i]);
                        let w = share.clone() * rational_pow(p, chosen) * rational_pow(&q, n - 1 - chosen);
                        out.push((Configuration::Graph { n: n as u8, edges: (edges & !star_mask) | set }, w));
                    }
                }
                out
            }
            _ => {
                let nbrs = self.neighbors(c)?;
                let w = match self {
                    Model::PermTransposition { n } => ratio(2, (n * (n - 1)) as i64),
                    _ => Rational::new(1.into(), (nbrs.len() as u128 + 1).into()),
                };
                let mut out: Vec<(Configuration, Rational)> = nbrs.into_iter().map(|x| (x, w.clone())).collect();
                if !matches!(self, Model::PermTransposition { .. }) {
                    out.push((c.clone(), w));
                }
                out
            }
        };
        row.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Configuration, Rational)> = Vec::with_capacity(row.len());
        for (cfg, w) in row {
            match merged.last_mut() {
                Some((last, acc)) if *last == cfg => *acc = acc.clone() + w,
                _ => merged.push((cfg, w)),
            }
        }
        Ok(merged)
    }

    /// Adjacent configurations (excluding `c`), sorted.
    pub fn neighbors(&self, c: &Configuration) -> Result<Vec<Configuration>> {
        self.check_config(c)?;
        let mut out: Vec<Configuration> = match (self, c) {
            (Model::Gnp { .. }, _) => {
                return Ok(self.kernel_row(c)?.into_iter().map(|(x, _)| x).filter(|x| x != c).collect());
            }
            (Model::GnM { n, .. }, Configuration::Graph { edges, .. }) => {
                let total = n * (n - 1) / 2;
                let mut out = Vec::new();
                for a in bits(*edges) {
                    for b in (0..total).filter(|&b| edges >> b & 1 == 0) {
                        out.push(Configuration::Graph { n: *n as u8, edges: (edges & !(1 << a)) | 1 << b });
                    }
                }
                out
            }
            (Model::Hypergraph { n, k, .. }, Configuration::Hypergraph { edges, .. }) => {
                let sets = binomial(*n as u64, *k as u64) as u32;
                let mut out = Vec::new();
                for (i, _) in edges.iter().enumerate() {
                    for b in (0..sets).filter(|b| edges.binary_search(b).is_err()) {
                        let mut next = edges.clone();
                        next.remove(i);
                        let pos = next.binary_search(&b).unwrap_err();
                        next.insert(pos, b);
                        out.push(Configuration::Hypergraph { n: *n as u8, k: *k as u8, edges: next });
                    }
                }
                out
            }
            (Model::DOutRegular { n, d }, Configuration::Digraph { out: nbhd, .. }) => {
                let mut out = Vec::new();
                for v in 0..*n {
                    for choice in out_choices(*n, *d, v) {
                        if choice != nbhd[v] {
                            let mut next = nbhd.clone();
                            next[v] = choice;
                            out.push(Configuration::Digraph { n: *n as u8, out: next });
                        }
                    }
                }
                out
            }
            (Model::PermInsertion { n }, Configuration::Permutation(p)) => {
                let mut out = Vec::new();
                for i in 0..*n as u8 {
                    for j in std::iter::once(None).chain((0..*n as u8).filter(|&j| j != i).map(Some)) {
                        let next = move_after(p, i, j);
                        if next != *p {
                            out.push(Configuration::Permutation(next));
                        }
                    }
                }
                out
            }
            (Model::PermTransposition { n }, Configuration::Permutation(p)) => {
                let mut out = Vec::new();
                for a in 0..*n {
                    for b in a + 1..*n {
                        let mut next = p.clone();
                        next.swap(a, b);
                        out.push(Configuration::Permutation(next));
                    }
                }
                out
            }
            _ => unreachable!("check_config accepted a mismatched configuration"),
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Every configuration, in codec order (the order of [`Model::encode`]'s ranks).
    pub fn enumerate(&self, cap: u128) -> Result<Vec<Configuration>> {
        self.validate()?;
        let count = self.state_count();
        if count > cap {
            let states = if count == u128::MAX { "more than 2^128".to_string() } else { count.to_string() };
            return Err(Error::TooLarge { states, cap });
        }
        let n = self.n();
        Ok(match *self {
            Model::Gnp { .. } => {
                (0..1u64 << (n * (n - 1) / 2)).map(|e| Configuration::Graph { n: n as u8, edges: e }).collect()
            }
            Model::GnM { m, .. } => combinations_of_mask(n * (n - 1) / 2, m)
                .into_iter()
                .map(|e| Configuration::Graph { n: n as u8, edges: e })
                .collect(),
            Model::Hypergraph { k, m, .. } => {
                let sets = binomial(n as u64, k as u64) as usize;
                k_subsets(sets, m)
                    .into_iter()
                    .map(|s| Configuration::Hypergraph {
                        n: n as u8,
                        k: k as u8,
                        edges: s.into_iter().map(|e| e as u32).collect(),
                    })
                    .collect()
            }
            Model::DOutRegular { d, .. } => {
                let choices: Vec<Vec<u64>> = (0..n).map(|v| out_choices(n, d, v)).collect();
                let radix = choices[0].len();
                let mut out = Vec::with_capacity(count as usize);
                let mut digits = vec![0usize; n];
                loop {
                    out.push(Configuration::Digraph {
                        n: n as u8,
                        out: digits.iter().enumerate().map(|(v, &i)| choices[v][i]).collect(),
                    });
                    let mut pos = n;
                    loop {
                        if pos == 0 {
                            return Ok(out);
                        }
                        pos -= 1;
                        digits[pos] += 1;
                        if digits[pos] < radix {
                            break;
                        }
                        digits[pos] = 0;
                    }
                }
            }
            Model::PermInsertion { .. } | Model::PermTransposition { .. } => {
                let mut perm: Vec<u8> = (0..n as u8).collect();
                let mut out = Vec::with_capacity(count as usize);
                loop {
                    out.push(Configuration::Permutation(perm.clone()));
                    // next lexicographic permutation
                    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
                    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
                    perm.swap(i, j);
                    perm[i + 1..].reverse();
                }
                out
            }
        })
    }

    /// Canonical integer code: edge bitset (graphs), sorted hyperedge indices,
    /// per-vertex out-neighborhood choice indices, or the Lehmer code.
    pub fn encode(&self, c: &Configuration) -> Result<Vec<u64>> {
        self.check_config(c)?;
        Ok(match c {
            Configuration::Graph { edges, .. } => vec![*edges],
            Configuration::Hypergraph { edges, .. } => edges.iter().map(|&e| e as u64).collect(),
            Configuration::Digraph { out, .. } => {
                let Model::DOutRegular { n, d } = *self else { unreachable!() };
                out.iter()
                    .enumerate()
                    .map(|(v, m)| out_choices(n, d, v).iter().position(|c| c == m).unwrap_or(0) as u64)
                    .collect()
            }
            Configuration::Permutation(p) => lehmer_code(p),
        })
    }

    pub fn decode(&self, code: &[u64]) -> Result<Configuration> {
        let n = self.n();
        let c = match *self {
            Model::Gnp { .. } | Model::GnM { .. } => {
                let [edges] = code else {
                    return Err(Error::Parse("graph code is a single bitset".into()));
                };
                Configuration::Graph { n: n as u8, edges: *edges }
            }
            Model::Hypergraph { k, .. } => Configuration::Hypergraph {
                n: n as u8,
                k: k as u8,
                edges: code.iter().map(|&e| e as u32).collect(),
            },
            Model::DOutRegular { d, .. } => {
                if code.len() != n {
                    return Err(Error::Parse(format!("digraph code needs {n} entries")));
                }
                let out = code
                    .iter()
                    .enumerate()
                    .map(|(v, &i)| {
                        out_choices(n, d, v)
                            .get(i as usize)
                            .copied()
                            .ok_or_else(|| Error::Parse(format!("choice index {i} out of range at vertex {v}")))
                    })
                    .collect::<Result<_>>()?;
                Configuration::Digraph { n: n as u8, out }
            }
            Model::PermInsertion { .. } | Model::PermTransposition { .. } => {
                if code.len() != n {
                    return Err(Error::Parse(format!("Lehmer code needs {n} entries")));
                }
                Configuration::Permutation(from_lehmer_code(code)?)
            }
        };
        self.check_config(&c)?;
        Ok(c)
    }

    /// An exact draw from the claimed invariant measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let n = self.n();
        match self {
            Model::Gnp { p, .. } => {
                let num = u64::try_from(p.numer().clone()).expect("validated numerator");
                let den = u64::try_from(p.denom().clone()).expect("validated denominator");
                let total = n * (n - 1) / 2;
                let edges = (0..total).filter(|_| rng.random_range(0..den) < num).fold(0u64, |m, b| m | 1 << b);
                Configuration::Graph { n: n as u8, edges }
            }
            Model::GnM { m, .. } => {
                let total = n * (n - 1) / 2;
                let edges = rand::seq::index::sample(rng, total, *m).into_iter().fold(0u64, |acc, b| acc | 1 << b);
                Configuration::Graph { n: n as u8, edges }
            }
            Model::Hypergraph { k, m, .. } => {
                let sets = binomial(n as u64, *k as u64) as usize;
                let mut edges: Vec<u32> =
                    rand::seq::index::sample(rng, sets, *m).into_iter().map(|e| e as u32).collect();
                edges.sort_unstable();
                Configuration::Hypergraph { n: n as u8, k: *k as u8, edges }
            }
            Model::DOutRegular { d, .. } => {
                let out = (0..n)
                    .map(|v| {
                        rand::seq::index::sample(rng, n - 1, *d)
                            .into_iter()
                            .map(|i| if i >= v { i + 1 } else { i })
                            .fold(0u64, |acc, u| acc | 1 << u)
                    })
                    .collect();
                Configuration::Digraph { n: n as u8, out }
            }
            Model::PermInsertion { .. } | Model::PermTransposition { .. } => {
                let mut perm: Vec<u8> = (0..n as u8).collect();
                perm.shuffle(rng);
                Configuration::Permutation(perm)
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gnp { n, p } => write!(f, "gnp(n={n}, p={})", p.display()),
            Model::GnM { n, m } => write!(f, "gnm(n={n}, M={m})"),
            Model::Hypergraph { n, k, m } => write!(f, "hyper(n={n}, k={k}, M={m})"),
            Model::DOutRegular { n, d } => write!(f, "doutreg(n={n}, d={d})"),
            Model::PermInsertion { n } => write!(f, "perm-ins(n={n})"),
            Model::PermTransposition { n } => write!(f, "perm-trans(n={n})"),
        }
    }
}

impl Configuration {
    /// Human-readable form: edge lists, out-neighborhoods, or 1-based one-line notation.
    pub fn to_json(&self) -> Value {
        match self {
            Configuration::Graph { n, edges } => {
                let list: Vec<[usize; 2]> = pairs(*n as usize)
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| edges >> i & 1 == 1)
                    .map(|(_, (a, b))| [a, b])
                    .collect();
                json!({ "edges": list })
            }
            Configuration::Hypergraph { n, k, edges } => {
                let sets = k_subsets(*n as usize, *k as usize);
                json!({ "hyperedges": edges.iter().map(|&e| sets[e as usize].clone()).collect::<Vec<_>>() })
            }
            Configuration::Digraph { out, .. } => {
                json!({ "out": out.iter().map(|&m| bits(m).collect::<Vec<_>>()).collect::<Vec<_>>() })
            }
            Configuration::Permutation(p) => json!(p.iter().map(|&v| v as usize + 1).collect::<Vec<_>>()),
        }
    }

    /// Adjacency matrix of a graph configuration as per-vertex bitmasks.
    pub fn graph_adjacency(&self) -> Option<Vec<u64>> {
        let Configuration::Graph { n, edges } = self else { return None };
        let mut adj = vec![0u64; *n as usize];
        for (i, (a, b)) in pairs(*n as usize).into_iter().enumerate() {
            if edges >> i & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        Some(adj)
    }
}

/// An enumerated model: configurations, their graph, and the exact kernel.
#[derive(Debug, Clone)]
pub struct GeometrizedSpace {
    pub model: Model,
    configs: Vec<Configuration>,
    index: HashMap<Configuration, State>,
    graph: StateGraph,
    kernel: WalkKernel<Rational>,
    kernel_f64: WalkKernel<f64>,
}

/// Enumerates `model` under `cap` and assembles graph and kernel.
pub fn build(model: &Model, cap: u128) -> Result<GeometrizedSpace> {
    use rayon::prelude::*;
    let configs = model.enumerate(cap)?;
    let index: HashMap<Configuration, State> = configs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let rows: Vec<Vec<(State, Rational)>> = configs
        .par_iter()
        .map(|c| {
            model
                .kernel_row(c)?
                .into_iter()
                .map(|(x, w)| {
                    index
                        .get(&x)
                        .map(|&s| (s, w))
                        .ok_or_else(|| Error::BadParams(format!("kernel leaves the state space at {x:?}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    for (x, row) in rows.iter().enumerate() {
        for (y, _) in row {
            if *y >= x {
                edges.push((x, *y));
            }
        }
    }
    let graph = StateGraph::from_edges(configs.len(), edges)?.with_distance_cache();
    let kernel = WalkKernel::new(rows.into_iter().map(SparseDistribution::new).collect::<Result<_>>()?);
    kernel.check_support(&graph)?;
    let kernel_f64 = kernel.to_f64();
    Ok(GeometrizedSpace { model: model.clone(), configs, index, graph, kernel, kernel_f64 })
}

impl GeometrizedSpace {
    pub fn graph(&self) -> &StateGraph {
        &self.graph
    }

    pub fn kernel(&self) -> &WalkKernel<Rational> {
        &self.kernel
    }

    pub fn kernel_f64(&self) -> &WalkKernel<f64> {
        &self.kernel_f64
    }

    pub fn state_count(&self) -> usize {
        self.configs.len()
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn configuration(&self, s: State) -> &Configuration {
        &self.configs[s]
    }

    pub fn state_of(&self, c: &Configuration) -> Option<State> {
        self.index.get(c).copied()
    }

    pub fn claimed_kappa_lb(&self) -> Option<Rational> {
        self.model.claimed_kappa_lb()
    }

    pub fn claimed_nu(&self, s: State) -> Rational {
        self.model.claimed_nu(&self.configs[s])
    }

    /// Claimed invariant measure as a dense vector.
    pub fn claimed_nu_vector(&self) -> Vec<Rational> {
        self.configs.iter().map(|c| self.model.claimed_nu(c)).collect()
    }

    /// Exact draw from the claimed measure, returned as a state index.
    pub fn direct_sample(&self, seed: u64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = self.model.sample(&mut rng);
        self.index[&c]
    }

    /// Model, parameters and counts; with `explicit`, also the edge list and kernel.
    pub fn to_json(&self, explicit: bool) -> Value {
        let mut out = json!({
            "model": self.model.name(),
            "params": self.model.params_json(),
            "state_count": self.state_count(),
            "edge_count": self.graph.edge_count(),
            "loop_count": self.graph.loop_count(),
            "claimed_kappa_lb": self.claimed_kappa_lb().map(|k| k.to_json()),
        });
        if explicit {
            out["states"] = Value::Array(self.configs.iter().map(Configuration::to_json).collect());
            out["edges"] = Value::Array(
                self.graph.edges().into_iter().map(|(x, y)| json!([x, y])).collect(),
            );
            out["kernel"] = self.kernel.to_json();
        }
        out
    }
}

/// Model description for reports that never enumerate.
pub fn model_json(model: &Model) -> Value {
    json!({
        "model": model.name(),
        "params": model.params_json(),
        "state_count": model.state_count().to_string(),
        "claimed_kappa_lb": model.claimed_kappa_lb().map(|k| k.to_json()),
    })
}

#[cfg(test)]
mod tests;
