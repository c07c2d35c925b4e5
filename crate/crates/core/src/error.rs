use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("step `{0}`: defining polynomial is not monic")]
    NotMonic(String),
    #[error("step `{0}`: polynomial declared eisenstein is not Eisenstein")]
    NotEisenstein(String),
    #[error("step `{0}`: polynomial declared unramified does not reduce to an irreducible residue polynomial")]
    NotIrreducibleResidue(String),
    #[error("step `{0}`: degree must be at least 2")]
    DegreeTooSmall(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("division by an element indistinguishable from zero at its precision")]
    DivisionByIndistinguishableZero,
    #[error("element has no exact source to extend precision from")]
    CannotExtend,
    #[error("not Galois: found {found} automorphisms for an extension of degree {degree}")]
    NotGalois { found: usize, degree: usize },
    #[error("no monogenic (Eisenstein) presentation available for {0}")]
    NotMonogenicPresentation(String),
    #[error("generator search failed for fixed field")]
    GeneratorSearchFailed,
    #[error("extension is not totally ramified")]
    NotTotallyRamified,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("character is not realized by any nonzero element")]
    EmptyEigenspace,
    #[error("not a Kummer extension: {0}")]
    NotKummer(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Attach the offending label to an error message.
    pub fn at(self, label: &str) -> Error {
        match self {
            Error::Schema(m) => Error::Schema(format!("{label}: {m}")),
            Error::Invalid(m) => Error::Invalid(format!("{label}: {m}")),
            Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{label}: {msg}") },
            other => other,
        }
    }
}
