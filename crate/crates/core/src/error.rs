use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right} bits")]
    Length { left: usize, right: usize },

    #[error("attacker returned {got} bits for a {expected}-bit instance")]
    AttackerProtocol { expected: usize, got: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("no preimage in the {slen}-bit space for digest position {position}")]
    PreimageNotFound { position: usize, slen: usize },

    #[error("uncorrectable codeword")]
    DecodeFailure,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sampler failure: {0}")]
    Sampler(String),

    #[error("{vars} variables exceed the solver cap of {cap}")]
    CapExceeded { vars: usize, cap: usize },
}
