use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Fuss-Catalan table has no entry for p = {0}")]
    MissingTableEntry(usize),
    #[error("series cannot be reverted: {0}")]
    InvalidSeries(&'static str),
    #[error("position {position} is out of range for a path of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("path is not in canonical restricted-growth form")]
    NonCanonicalPath,
    #[error("search budget exceeded: 2mp = {needed} > {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("part {index} is not a regular path")]
    InvalidPart { index: usize },
    #[error("certificate violation: {0}")]
    CertificateViolation(String),
    #[error("unknown ensemble family `{0}`")]
    UnknownFamily(String),
    #[error("matrix is not Hermitian (relative deviation {0:e})")]
    NonHermitian(f64),
    #[error("trace has imaginary part {imag:e} (limit {limit:e})")]
    ImaginaryTrace { imag: f64, limit: f64 },
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("no root on the physical branch at z = {re} + {im}i")]
    BranchAmbiguity { re: f64, im: f64 },
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
