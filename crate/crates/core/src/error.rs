use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("jet coordinate `{name}` has order {order}, exceeding the context maximum {max}")]
    JetOrderExceeded { name: String, order: usize, max: usize },

    #[error("total derivative of an expression containing `{0}` would leave the jet context")]
    OrderOverflow(String),

    #[error("unbound symbol `{0}` in numeric evaluation")]
    UnboundSymbol(String),

    #[error("domain violation: {generator} evaluated at {value}")]
    Domain { generator: String, value: f64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("could not find admissible sample points for {0}")]
    NoAdmissiblePoints(String),

    /// Symbolic residue is nonzero but every numeric sample vanishes.
    #[error("zero test inconclusive: residue `{0}` vanishes at all samples (possible simplifier incompleteness)")]
    Inconclusive(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular Hessian: determinant `{0}` vanishes")]
    SingularHessian(String),

    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error("trajectory left the admissible domain at x = {x}: {msg}")]
    Trajectory { x: f64, msg: String },

    #[error("problem file: {0}")]
    ProblemFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
