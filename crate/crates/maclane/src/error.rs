use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("not a key polynomial over the given valuation")]
    NotAKeyPolynomial,
    #[error("radius must exceed the value of the centre")]
    RadiusNotAboveCentreValue,
    #[error("value is not in the value group")]
    AlphaNotInValueGroup,
    #[error("residual polynomial X has no key lift")]
    HEqualsX,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("residue field extension budget exceeded (needed degree {needed}, budget {budget})")]
    ResidueModeOverflow { needed: usize, budget: usize },
    #[error("chain range is empty (a <= b)")]
    DegenerateRange,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// True for failures caused by the input rather than by a broken invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::InternalInconsistency(_) | Error::InexactDivision)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::InternalInconsistency(format!($($arg)+)).into());
        }
    };
}
pub(crate) use ensure;
