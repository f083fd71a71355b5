use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ring spec: {0}")]
    InvalidRing(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("exponent {exponent} exceeds the configured bound {bound}")]
    ExponentOverflow { exponent: i64, bound: u32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("negative exponent on non-invertible generator `{0}`")]
    NotInvertible(String),
    #[error("coefficient {0} is not an integer but the ring has base Z")]
    NonIntegral(String),
    #[error("series variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("constant term violation: {0}")]
    ConstantTerm(String),
    #[error("operation needs a rational base ring: {0}")]
    NeedsRationalBase(String),
    #[error("reversion needs linear coefficient 1, found {0}")]
    LinearCoefficient(String),
    #[error("insufficient truncation order: need {needed}, have {have}")]
    InsufficientOrder { needed: u32, have: u32 },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("cannot classify over this base: {0}")]
    CannotClassify(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    #[error("invalid fibration: {0}")]
    Fibration(String),
    #[error("form is not closed: |d a| = {residual:e} > {tol:e}")]
    NotClosed { residual: f64, tol: f64 },
    #[error("invalid bundle data: {0}")]
    InvalidBundle(String),
    #[error("coefficient window too small: {0}")]
    WindowTooSmall(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
