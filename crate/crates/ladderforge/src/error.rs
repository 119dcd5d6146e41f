use crate::fock::FockCutoff;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cutoff mismatch: {0:?} vs {1:?}")]
    CutoffMismatch(FockCutoff, FockCutoff),
    #[error("entry ({row},{col}) outside dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },
    #[error("interior degree {degree} too large for cutoff {cutoff:?}")]
    DegreeTooLarge { degree: usize, cutoff: FockCutoff },
    #[error("cannot normalize a state with norm below 1e-14")]
    ZeroNorm,
    #[error("cutoff too small: {0}")]
    CutoffOverflow(String),
    #[error("squeeze parameter outside the unit disk: {0}")]
    SqueezeDomain(String),
    #[error("branch is not normalizable: {0}")]
    NotNormalizable(String),
    #[error("no displacement reduction: {0}")]
    NoDisplacementReduction(String),
    #[error("no ladder operator exists for these parameters")]
    NoLadderExists,
    #[error("p={0} and q={1} are not coprime")]
    NotCoprime(u32, u32),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Domain refusals map to exit code 2 in the CLI; everything else is a hard error.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::SqueezeDomain(_)
                | Error::NotNormalizable(_)
                | Error::NoDisplacementReduction(_)
                | Error::NoLadderExists
                | Error::NotCoprime(..)
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
