//! Exact arithmetic for finite abelian p-groups with degree-k filtrations,
//! Host-Kra cube calculus on them, polynomial maps in Taylor form, and a
//! desk-scale analytic layer (Gowers norms, non-classical polynomial phases,
//! correlation search) on `F_p^n`.
//!
//! Everything is exact except the analytic layer, which uses `f64` complex
//! arithmetic with explicit tolerances. All values are immutable after
//! construction and safe to share between threads.

pub mod cube;
pub mod filtration;
pub mod fp;
pub mod gowers;
pub mod group;
pub mod homogeneity;
pub mod poly;
pub mod report;
pub mod textform;
pub mod verify;

use thiserror::Error;

/// Error type shared by every module.
///
/// `Precondition` is an input the caller should not have passed; `Mismatch`
/// is a structural error (values from different groups); `CapExceeded` means
/// an exhaustive operation refused to degrade to sampling.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("group mismatch: {0}")]
    Mismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cap exceeded: {what} = {got}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: u128,
        cap: u128,
    },
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }

    /// Exit code contract used by the CLI: domain errors exit 1, input
    /// (parse/usage) errors exit 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            _ => 1,
        }
    }
}
