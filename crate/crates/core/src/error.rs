use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("states {x} and {y} are not connected")]
    Disconnected { x: usize, y: usize },
    #[error("graph is not connected")]
    GraphDisconnected,
    #[error("state {state} out of range (state count {count})")]
    InvalidState { state: usize, count: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("kernel row {state} puts mass on {target}, which is outside its closed neighborhood")]
    KernelSupport { state: usize, target: usize },
    #[error("kernel has {rows} rows but the graph has {states} states")]
    KernelShape { rows: usize, states: usize },
    #[error("walk is not ergodic: {0}")]
    NotErgodic(String),
    #[error("{x}-{y} is not an edge")]
    NotAnEdge { x: usize, y: usize },
    #[error("curvature needs two distinct states, got {0} twice")]
    NotDistinct(usize),
    #[error("pair ({x},{y}) has curvature {kappa} below the edge minimum {lower_bound}")]
    LemmaViolation { x: usize, y: usize, kappa: f64, lower_bound: f64 },
    #[error("state {0} has no neighbors")]
    IsolatedState(usize),
    #[error("bad laziness grid: {0}")]
    BadGrid(String),
    #[error("diameter bound violated: {0}")]
    BoundViolation(String),
    #[error("input is not {c}-Lipschitz: |f({x}) - f({y})| = {diff}")]
    InputNotLipschitz { x: usize, y: usize, diff: f64, c: f64 },
    #[error("Mf is not {bound}-Lipschitz: |Mf({x}) - Mf({y})| = {diff}")]
    ContractionViolation { x: usize, y: usize, diff: f64, bound: f64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("inequality violated: {0}")]
    InequalityViolation(String),
    #[error("space has {states} states, above the enumeration cap {cap}")]
    TooLarge { states: String, cap: u128 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("pattern too large: {0}")]
    PatternTooLarge(String),
    #[error("observable and space are incompatible: {0}")]
    IncompatiblePair(String),
    #[error("Lipschitz bound {c} violated on edge ({x},{y}): difference {diff}")]
    LipschitzViolation { x: String, y: String, diff: f64, c: f64 },
    #[error("no positive curvature bound available: {0}")]
    MissingKappa(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
