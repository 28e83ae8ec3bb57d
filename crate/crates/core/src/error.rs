use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("issuance cap reached: {cap} coins already minted")]
    IssuanceCap { cap: u64 },

    #[error("label {0} is outside the orbit image")]
    UndefinedLabel(u64),

    #[error("bank gate budget exceeded: {x} X / {z} Z corrections against a budget of {max_x} / {max_z}")]
    BudgetViolation { x: u64, z: u64, max_x: u64, max_z: u64 },

    #[error("protocol aborted at step `{0}`")]
    ProtocolAbort(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
