use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its type invariant.
    #[error("{field} {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("length mismatch for `{field}`: expected {expected}, got {got}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("closed form available only for {supported}, got N = {n}")]
    UnsupportedOrder { n: usize, supported: &'static str },

    #[error("non-uniform tail coupling; closed-form rates need d_1 = ... = d_(N-1)")]
    NonUniformTail,

    #[error("singular linear system (zero pivot at row {row})")]
    Singular { row: usize },

    #[error("oracle size cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("stationary state is not unique (kernel dimension > 1)")]
    NonUniqueKernel,

    #[error("steady state failed {check} check: {detail}")]
    BadState { check: &'static str, detail: String },

    #[error("dimension mismatch: operator is {op}x{op}, state is {state}x{state}")]
    DimensionMismatch { op: usize, state: usize },

    #[error(
        "spectrum under-resolved: feature at {center:.6} has width {width:.3e} < 5 grid steps \
         ({step:.3e}); try at least {suggested_count} points"
    )]
    UnderResolved {
        center: f64,
        width: f64,
        step: f64,
        suggested_count: usize,
    },

    #[error("no transparency window within one grid step of zero detuning")]
    NoCentralWindow,

    #[error("empty scan range")]
    EmptyRange,

    #[error("backend `{backend}` cannot evaluate these parameters: {reason}")]
    Backend {
        backend: &'static str,
        reason: String,
    },

    #[error("grid point {index} (detuning {detuning}): {source}")]
    AtGridPoint {
        index: usize,
        detuning: f64,
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing required key `{0}`")]
    MissingKey(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors raised while solving, as opposed to bad input.
    pub fn is_solver_error(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::NonUniqueKernel
            | Error::BadState { .. }
            | Error::UnderResolved { .. }
            | Error::NoCentralWindow
            | Error::CapExceeded { .. } => true,
            Error::AtGridPoint { source, .. } => source.is_solver_error(),
            _ => false,
        }
    }
}
