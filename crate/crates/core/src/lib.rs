//! Exact Ollivier-Ricci curvature of Markov chains on finite graphs, the
//! configuration-space walks used to geometrize classical random models, and
//! the curvature-based concentration bound ν(f − E_ν f ≥ t) ≤ exp(−t²κ/7),
//! checked both analytically and by Monte Carlo.
//!
//! Module map:
//!
//! - [`state_space`]: graphs, kernels, stationary distributions, averaging operator
//! - [`transport`]: exact Wasserstein-1 with primal and dual certificates
//! - [`curvature`]: κ(x, y), lazy walks, global lower bounds, structural checks
//! - [`bounds`]: λ₀, tail bounds, the MGF and variance lemmas
//! - [`geometrize`]: the configuration spaces and their proof couplings
//! - [`observables`]: subgraph, directed-triangle and pattern counts
//! - [`experiments`]: Monte Carlo tails against the bounds
//! - [`verify`]: the desk-scale check suite behind `verify-paper`

pub mod bounds;
pub mod curvature;
pub mod error;
pub mod experiments;
pub mod geometrize;
pub mod observables;
pub mod scalar;
pub mod state_space;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
