use thiserror::Error;

/// Errors reported by graph construction, scheduling, dynamics, and verifiers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("process count must be at least 2, got {n}")]
    ProcessCount { n: usize },
    #[error("edge ({0}, {1}) has an endpoint outside 0..{n}", .edge.0, .edge.1)]
    EdgeEndpoint { edge: (usize, usize), n: usize },
    #[error("graphs have mismatched process counts ({left} vs {right})")]
    MismatchedProcessCount { left: usize, right: usize },
    #[error("exact broadcasting-set search is capped at n <= {max}, got n = {n}")]
    SearchTooLarge { n: usize, max: usize },
    #[error("k = {k} is out of range for n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("adversary kind requires k to be declared")]
    MissingK,
    #[error("adversary requires n >= k + 1 = {min}, got n = {n}")]
    TooFewProcesses { n: usize, min: usize },
    #[error("graph {index} in the adversary family violates the declared {k}-property")]
    FamilyPropertyViolation { index: usize, k: usize },
    #[error("adversary family must contain at least one graph")]
    EmptyFamily,
    #[error("round index must be at least 1")]
    RoundIndex,
    #[error("relay length must be at least 1")]
    RelayRounds,
    #[error("weight alpha = {alpha} is infeasible for maximum in-degree {max_in_degree}")]
    InfeasibleAlpha { alpha: f64, max_in_degree: usize },
    #[error("custom weight table must be {n}x{n}")]
    BadWeightTable { n: usize },
    #[error("weight matrix row {row} sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("weight matrix entry ({row}, {col}) = {value} is not supported by an in-edge")]
    UnsupportedWeight { row: usize, col: usize, value: f64 },
    #[error("state vectors must have matching shapes")]
    ShapeMismatch,
    #[error("state contains a non-finite coordinate at process {process}")]
    NonFiniteState { process: usize },
    #[error("broadcasting set must be non-empty")]
    EmptyBroadcastSet,
    #[error("decomposition weight alpha must be positive")]
    AlphaNotPositive,
    #[error("alpha = {alpha} exceeds the broadcast mass {w_m} of the row")]
    AlphaExceedsBroadcastMass { alpha: f64, w_m: f64 },
    #[error("execution must have at least one round")]
    ZeroRounds,
    #[error("half-space normal must be non-zero")]
    ZeroNormal,
    #[error("point lies inside the open half-space; the distance formula requires z outside")]
    PointInsideHalfSpace,
    #[error("projection matrix must be square, symmetric, and idempotent")]
    InvalidProjection,
    #[error("radius samples must cover [0, h] with ascending coordinates")]
    BadRadiusDomain,
    #[error("radius samples fail the discrete concavity test near xi = {xi}")]
    NonConcaveSamples { xi: f64 },
    #[error("quantile alpha must lie strictly between 0 and 1")]
    BadQuantile,
    #[error("round {round} has an empty designated broadcasting set")]
    RoundWithoutBroadcastSet { round: usize },
    #[error("trace has {have} rounds but the bound requires round {needed}")]
    TraceTooShort { needed: usize, have: usize },
    #[error("window {window} exceeds trace length {rounds}")]
    WindowTooLong { window: usize, rounds: usize },
}
