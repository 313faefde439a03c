//! Concentration bounds: the λ₀ constant, tail bounds in three constant
//! regimes, and pointwise checks of the moment-generating-function estimates
//! that drive them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state_space::{apply_averaging, check_lipschitz, State, StateFunction, StateGraph, WalkKernel};

/// Upper bound on bisection steps for λ₀.
pub const LAMBDA0_ITERATIONS: usize = 200;

/// Relative slack allowed in the MGF inequality checks.
pub const MGF_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Unique positive root of x·e^{2x} = 2(2 − κ), by bisection on [0, 1].
pub fn solve_lambda0(kappa: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::OutOfRange(format!("kappa {kappa} outside [0,1]")));
    }
    let target = 2.0 * (2.0 - kappa);
    let h = |x: f64| x * (2.0 * x).exp() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..LAMBDA0_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if h(lo).abs() <= h(hi).abs() { lo } else { hi })
}

/// |λ₀e^{2λ₀} − 2(2 − κ)|.
pub fn lambda0_residual(kappa: f64, lambda0: f64) -> f64 {
    (lambda0 * (2.0 * lambda0).exp() - 2.0 * (2.0 - kappa)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// exp(−t²κλ₀(κ)/4)
    Exact,
    /// exp(−t²κ/7)
    Seven,
    /// exp(−t²κ/5), the small-κ regime
    Five,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 3] = [BoundVariant::Exact, BoundVariant::Seven, BoundVariant::Five];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Seven => "seven",
            Self::Five => "five",
        }
    }
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "seven" | "7" => Ok(Self::Seven),
            "five" | "5" => Ok(Self::Five),
            other => Err(Error::Parse(format!("unknown bound variant `{other}` (exact|seven|five)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundSpec {
    pub kappa: f64,
    pub t: f64,
    pub variant: BoundVariant,
    pub two_sided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub value: f64,
    /// λ₀(κ), present for the exact variant.
    pub lambda0: Option<f64>,
    /// t < 1, where the theorem does not apply; the formula is still evaluated.
    pub outside_theorem_hypothesis: bool,
    /// t > 2/κ, beyond the diameter bound, so the probability is 0.
    pub beyond_diameter: bool,
}

/// Evaluates the bound for one (κ, t, variant) triple.
pub fn tail_bound(spec: &TailBoundSpec) -> Result<TailBound> {
    let TailBoundSpec { kappa, t, variant, two_sided } = *spec;
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::OutOfRange(format!("kappa {kappa} outside (0,1]")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("deviation t = {t} must be finite and nonnegative")));
    }
    let lambda0 = match variant {
        BoundVariant::Exact => Some(solve_lambda0(kappa)?),
        _ => None,
    };
    let outside_theorem_hypothesis = t < 1.0;
    let beyond_diameter = t > 2.0 / kappa;
    let value = if beyond_diameter {
        0.0
    } else {
        let exponent = match variant {
            BoundVariant::Exact => t * t * kappa * lambda0.unwrap_or_default() / 4.0,
            BoundVariant::Seven => t * t * kappa / 7.0,
            BoundVariant::Five => t * t * kappa / 5.0,
        };
        let one = (-exponent).exp();
        if two_sided {
            (2.0 * one).min(1.0)
        } else {
            one
        }
    };
    Ok(TailBound { value, lambda0, outside_theorem_hypothesis, beyond_diameter })
}

/// `steps + 1` evenly spaced points from `a` to `b` inclusive.
pub fn linear_grid(a: f64, b: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![a];
    }
    (0..=steps)
        .map(|i| if i == steps { b } else { a + (b - a) * i as f64 / steps as f64 })
        .collect()
}

/// Parses `a:b:steps`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Parse(format!("grid `{text}` must look like start:end:steps"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(bad());
    }
    Ok(linear_grid(a, b, steps))
}

/// (t, bound) rows as CSV with a header.
pub fn sweep_csv(kappa: f64, grid: &[f64], variant: BoundVariant, two_sided: bool) -> Result<String> {
    let mut out = String::from("t,bound\n");
    for &t in grid {
        let b = tail_bound(&TailBoundSpec { kappa, t, variant, two_sided })?;
        out.push_str(&format!("{t},{}\n", b.value));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityVerdict {
    /// Largest lhs/rhs over checked states (≤ 1 when the inequality holds).
    pub worst_ratio: f64,
    pub worst_state: Option<State>,
}

/// (M e^{λφ})(x) ≤ exp(λ·Mφ(x) + ½λ²α²e^{2λα}) at every state, for an
/// α-Lipschitz φ. Both sides are shifted by φ(x) to avoid overflow.
pub fn mgf_inequality_check(
    g: &StateGraph,
    m: &WalkKernel<f64>,
    phi: &StateFunction<f64>,
    lambda: f64,
    alpha: f64,
) -> Result<InequalityVerdict> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!("lambda {lambda} must be positive")));
    }
    check_lipschitz(g, &phi.values, &alpha)?;
    let mphi = apply_averaging(m, &phi.values);
    let penalty = 0.5 * lambda * lambda * alpha * alpha * (2.0 * lambda * alpha).exp();
    let mut verdict = InequalityVerdict { worst_ratio: 0.0, worst_state: None };
    for (x, row) in m.rows().iter().enumerate() {
        let base = phi.values[x];
        let lhs: f64 = row.entries().iter().map(|(y, w)| w * (lambda * (phi.values[*y] - base)).exp()).sum();
        let rhs = (lambda * (mphi[x] - base) + penalty).exp();
        let ratio = lhs / rhs;
        if ratio > 1.0 + MGF_RELATIVE_TOLERANCE {
            return Err(Error::InequalityViolation(format!(
                "MGF estimate fails at state {x}: {lhs} > {rhs} (lambda {lambda})"
            )));
        }
        if ratio > verdict.worst_ratio {
            verdict = InequalityVerdict { worst_ratio: ratio, worst_state: Some(x) };
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceVerdict {
    pub max_variance: f64,
    /// Largest E_{m_x}[(f − f(x))²].
    pub max_second_moment: f64,
    pub bound: f64,
}

/// Var_{m_x} f ≤ E_{m_x}[(f − f(x))²] ≤ α² for every x.
pub fn variance_bound_check(
    g: &StateGraph,
    m: &WalkKernel<f64>,
    f: &StateFunction<f64>,
    alpha: f64,
) -> Result<VarianceVerdict> {
    check_lipschitz(g, &f.values, &alpha)?;
    let tol = 1e-12;
    let bound = alpha * alpha;
    let mut verdict = VarianceVerdict { max_variance: 0.0, max_second_moment: 0.0, bound };
    for (x, row) in m.rows().iter().enumerate() {
        let mean = row.expectation(&f.values);
        let variance: f64 = row.entries().iter().map(|(y, w)| w * (f.values[*y] - mean).powi(2)).sum();
        let second: f64 = row.entries().iter().map(|(y, w)| w * (f.values[*y] - f.values[x]).powi(2)).sum();
        if variance > second + tol || second > bound + tol {
            return Err(Error::InequalityViolation(format!(
                "variance chain fails at state {x}: var {variance}, second moment {second}, bound {bound}"
            )));
        }
        verdict.max_variance = verdict.max_variance.max(variance);
        verdict.max_second_moment = verdict.max_second_moment.max(second);
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfChainVerdict {
    /// log E_ν e^{λ(f − E_ν f)}.
    pub log_mgf: f64,
    /// Σ_j ½λ²(1−κ)^{2j} e^{2λ(1−κ)^j}, the exponent from iterating the one-step estimate.
    pub series_exponent: f64,
    /// λ²e^{2λ}/(2κ(2−κ)).
    pub closed_exponent: f64,
}

/// Checks E_ν e^{λf} ≤ exp(λE_ν f + λ²e^{2λ}/(2κ(2−κ))) for a 1-Lipschitz f
/// under the invariant distribution `nu` (dense, indexed by state).
pub fn mgf_chain_check(
    g: &StateGraph,
    nu: &[f64],
    f: &StateFunction<f64>,
    lambda: f64,
    kappa: f64,
) -> Result<MgfChainVerdict> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::OutOfRange(format!("kappa {kappa} outside (0,1]")));
    }
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!("lambda {lambda} must be positive")));
    }
    check_lipschitz(g, &f.values, &1.0)?;
    let mean: f64 = nu.iter().zip(&f.values).map(|(p, v)| p * v).sum();
    let log_mgf = nu
        .iter()
        .zip(&f.values)
        .map(|(p, v)| p * (lambda * (v - mean)).exp())
        .sum::<f64>()
        .ln();
    let mut series_exponent = 0.0;
    let mut a = 1.0f64;
    for _ in 0..100_000 {
        let term = 0.5 * lambda * lambda * a * a * (2.0 * lambda * a).exp();
        series_exponent += term;
        a *= 1.0 - kappa;
        if term < 1e-18 || a == 0.0 {
            break;
        }
    }
    let closed_exponent = lambda * lambda * (2.0 * lambda).exp() / (2.0 * kappa * (2.0 - kappa));
    let tol = 1e-9;
    if log_mgf > series_exponent + tol || series_exponent > closed_exponent + tol {
        return Err(Error::InequalityViolation(format!(
            "MGF chain fails: log E e^(lambda(f-Ef)) = {log_mgf}, series {series_exponent}, closed form {closed_exponent}"
        )));
    }
    Ok(MgfChainVerdict { log_mgf, series_exponent, closed_exponent })
}
