use thiserror::Error;

/// Errors raised across the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resource budget exceeded: {what} needs {needed} but the cell budget is {budget}")]
    Budget {
        what: String,
        needed: String,
        budget: u64,
    },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// 1 verification failure, 2 usage/parse, 3 resource budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 1,
            Error::Usage(_) | Error::Parse(_) | Error::Io(_) => 2,
            Error::Budget { .. } => 3,
        }
    }
}

/// Upper bound on the number of cells (or enumerated tuples, or DP states)
/// any single materialization may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub cells: u64,
}

impl Budget {
    pub const DEFAULT_CELLS: u64 = 1 << 26;

    pub fn new(cells: u64) -> Self {
        Budget { cells }
    }

    pub fn unlimited() -> Self {
        Budget { cells: u64::MAX }
    }

    /// Fails when `needed` exceeds the budget. `needed` is anything displayable
    /// and comparable, usually a `u128` or a `BigUint` count.
    pub fn check<N>(&self, what: &str, needed: &N) -> Result<()>
    where
        N: std::fmt::Display + PartialOrd<N> + From<u64>,
    {
        if *needed > N::from(self.cells) {
            return Err(Error::Budget {
                what: what.to_string(),
                needed: needed.to_string(),
                budget: self.cells,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_CELLS)
    }
}
