use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus must be prime (got {0})")]
    NotPrime(u64),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("residue 0 is not allowed here ({0})")]
    ContainsZero(&'static str),

    #[error("resource cap exceeded: {what} = {value} > {cap}")]
    ResourceCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("invalid interval: offset {offset}, length {len}, modulus {modulus}")]
    InvalidInterval { offset: u64, len: u64, modulus: u64 },

    #[error("{0}")]
    Domain(String),

    #[error("set is not closed under multiplication mod {0}")]
    NotSubgroup(u64),

    #[error("product chain did not stabilize within {0} steps")]
    Unstabilized(usize),

    #[error("degenerate generator set: A = {{1}} modulo {0}")]
    Degenerate(u64),

    #[error("{target} is not representable modulo {modulus} at this cutoff (power-residue index {ell:?})")]
    NotRepresentable {
        target: u64,
        modulus: u64,
        ell: Option<u64>,
    },

    #[error("witness coordinate {index} = {value} is outside its interval")]
    WitnessOutside { index: usize, value: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
