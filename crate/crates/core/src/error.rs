use thiserror::Error;

/// Graph axiom violated while building a [`WeightedGraph`](crate::WeightedGraph).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("(b1) violated: loop edge at vertex {vertex}")]
    Loop { vertex: usize },
    #[error("(b2) violated: edge ({u}, {v}) listed more than once")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge weight of ({u}, {v}) must be a finite nonnegative number, got {weight}")]
    EdgeWeight { u: usize, v: usize, weight: f64 },
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("measure positivity violated at vertex {vertex}: m = {value}")]
    MeasurePositivity { vertex: usize, value: f64 },
    #[error("killing term must be finite and nonnegative at vertex {vertex}: c = {value}")]
    KillingSign { vertex: usize, value: f64 },
    #[error("graph must have at least one vertex")]
    Empty,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant error: {0}")]
    Invariant(#[from] InvariantError),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),
    #[error("scalar function has a nonzero imaginary part at vertex {vertex}")]
    ComplexInput { vertex: usize },
    #[error("pairing weight is negative at vertex {vertex}: g = {value}")]
    NegativeG { vertex: usize, value: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("bundle failed validation: {0}")]
    BundleInvalid(String),
    #[error("eigensolver failed to converge")]
    EigSolverFailure,
    #[error("semigroup time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("alpha = {alpha} is not in the resolvent set (lower bound {lower_bound})")]
    AlphaInSpectrum { alpha: f64, lower_bound: f64 },
    #[error("alpha = {alpha} too small for the Laplace integral (need > {required})")]
    AlphaTooSmall { alpha: f64, required: f64 },
    #[error("projection is not idempotent (defect {defect:e})")]
    ProjectionNotIdempotent { defect: f64 },
    #[error("pseudo-metric is infinite on edge ({u}, {v})")]
    InfiniteEdgeDistance { u: usize, v: usize },
    #[error("cutoff sequence is not admissible at k = {k}, vertex {vertex}")]
    MonotonicityViolated { k: usize, vertex: usize },
    #[error("exhaustion is not nested at step {step}")]
    NotNested { step: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
