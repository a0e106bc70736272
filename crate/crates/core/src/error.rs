use thiserror::Error;

/// Errors shared across all operator modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order {0} outside (0, 2]")]
    InvalidOrder(f64),
    #[error("fractional order {0} must be strictly below 2 for this operation")]
    OrderNotBelowTwo(f64),
    #[error("grid dimension {0} not supported (expected 1 or 2)")]
    InvalidDimension(usize),
    #[error("points per axis {0} invalid: need an even count >= 8")]
    InvalidGridSize(usize),
    #[error("field has {got} values but the grid has {expected} nodes")]
    NodeCountMismatch { got: usize, expected: usize },
    #[error("field contains a non-finite value at node {0}")]
    NonFiniteValue(usize),
    #[error("Riesz transform axis {axis} invalid on a {dimension}-dimensional grid")]
    InvalidRieszAxis { axis: usize, dimension: usize },
    #[error("truncation radius {0} invalid: need at least 1 periodic image")]
    InvalidTruncationRadius(usize),
    #[error("requested {requested} modes but the discretization has {available} nodes")]
    TooManyModes { requested: usize, available: usize },
    #[error("mode index {index} out of range (decomposition holds {modes} modes)")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("mass matrix is not positive definite (entry {index} = {value})")]
    MassNotPositiveDefinite { index: usize, value: f64 },
    #[error("stiffness matrix is not symmetric (|S - S^T| max {0:.3e})")]
    StiffnessNotSymmetric(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),
    #[error("manifold parameter out of the documented range: {0}")]
    ManifoldParameter(String),
    #[error("negative time {0} not allowed")]
    NegativeTime(f64),
    #[error("times must be ascending (times[{0}] decreases)")]
    TimesNotAscending(usize),
    #[error("subordination tolerance {target:.3e} unachievable with {nodes} nodes (achieved residual {achieved:.3e})")]
    ToleranceUnachievable {
        target: f64,
        achieved: f64,
        nodes: usize,
    },
    #[error("lambda grid too coarse: {got} points, need at least {need}")]
    GridTooCoarse { got: usize, need: usize },
    #[error("lambda grid must be uniform (spacing deviates at index {0})")]
    GridNotUniform(usize),
    #[error("measure residual tolerance {0:.3e} too loose (need <= 1e-6)")]
    MeasureToleranceTooLoose(f64),
    #[error("convexity certificate fails: {0}")]
    NotConvex(String),
    #[error("convexity certificate range [{lo}, {hi}] does not cover field range [{field_lo}, {field_hi}]")]
    CertificateRangeExceeded {
        lo: f64,
        hi: f64,
        field_lo: f64,
        field_hi: f64,
    },
    #[error("kernel positivity certificate missing or stale for (alpha, t) = ({alpha}, {t})")]
    PositivityCertificationMissing { alpha: f64, t: f64 },
    #[error("forward-difference ratio {0:.3} outside [1.8, 2.2]: no first-order convergence")]
    NonConvergentDifference(f64),
    #[error("boundary data has {got} values but the domain has {expected} boundary nodes")]
    BoundaryCountMismatch { got: usize, expected: usize },
    #[error("operation not defined on this domain variant: {0}")]
    WrongDomain(String),
    #[error("power 2m = {0} exceeds the exactly representable spectral band")]
    PowerBandExceeded(u32),
    #[error("exponent p = {0} must be a positive even integer")]
    OddExponent(u32),
    #[error("aliasing precondition unmet: band {band} times factor {factor} exceeds resolvable {resolvable}")]
    AliasingPrecondition {
        band: usize,
        factor: usize,
        resolvable: usize,
    },
    #[error("CFL violation: dt = {dt:.3e} exceeds h / (2 max|u|) = {limit:.3e} (max|u| = {max_u:.3e})")]
    CflViolation { dt: f64, limit: f64, max_u: f64 },
    #[error("state became non-finite during time stepping at step {0}")]
    NonFiniteState(usize),
    #[error("need at least {need} snapshots, got {got}")]
    TooFewSnapshots { got: usize, need: usize },
    #[error("time step h = {0:.3e} outside [1e-6, 1e-2]")]
    InvalidDifferenceStep(f64),
    #[error("m = {0} out of range (need m >= 1)")]
    InvalidPower(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
