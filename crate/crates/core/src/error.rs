use crate::hilbert::RegisterId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("register {0} is not part of the layout")]
    UnknownRegister(RegisterId),
    #[error("register {0} is not a coin register")]
    NotACoin(RegisterId),
    #[error("register {register} cannot be shifted as {expected}")]
    ShiftKindMismatch { register: RegisterId, expected: &'static str },
    #[error("states live on different register layouts")]
    LayoutMismatch,
    #[error("basis index {0:?} is out of range for the layout")]
    IndexOutOfRange(Vec<i32>),
    #[error("line shift moved register {register} to position {position}, outside window ±{window}")]
    WindowOverflow { register: RegisterId, position: i32, window: i32 },
    #[error("amplitudes ({0}, {1}) are not normalized")]
    NotNormalized(f64, f64),
    #[error("walk has {steps} steps, cannot run {upto}")]
    StepOutOfRange { upto: usize, steps: usize },
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("no basis vector labelled {0:?}")]
    UnknownLabel(String),
    #[error("outcome {label:?} is impossible (probability {probability:e})")]
    ImpossibleOutcome { label: String, probability: f64 },
    #[error("state has weight {0:e} outside the span of the measurement basis")]
    ResidualSupport(f64),
    #[error("outcome does not match the protocol: {0}")]
    InvalidOutcome(String),
    #[error("no Pauli correction restores the target for {0}")]
    NoValidCorrection(String),
    #[error("{count} correction classes restore the target for {outcome}")]
    AmbiguousCorrection { outcome: String, count: usize },
    #[error("{0}")]
    Io(String),
    #[error("table data, line {line}: {message}")]
    Parse { line: usize, message: String },
}
