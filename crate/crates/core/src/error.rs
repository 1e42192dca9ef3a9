use thiserror::Error;

use crate::cps::ValidationReport;
use crate::foundations::Event;

/// Everything that can go wrong in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("state space supports at most {max} states, got {got}")]
    SpaceTooLarge { got: usize, max: usize },
    #[error("duplicate or empty state label {0:?}")]
    BadLabel(String),
    #[error("event references state index {index} outside a space of {size} states")]
    OutOfRange { index: usize, size: usize },
    #[error("conditioning events must be nonempty")]
    EmptyMember,
    #[error("no member of the family contains state {0}")]
    NotCovering(usize),
    #[error("event {0:?} is not a member of the conditioning family")]
    NotMember(Event),
    #[error("operands live on different state spaces")]
    SpaceMismatch,
    #[error("family structure invalid: {0}")]
    Structure(String),
    #[error("not a valid conditional probability space: {0}")]
    InvalidCps(ValidationReport),
    #[error("direct reflection check enumerates 2^{size} events; cap is {cap} states (force to override)")]
    TooLarge { size: usize, cap: usize },
    #[error("reflection atom characterization requires a 1-closed space; {0:?} has probability 1 but is not conditioning")]
    NotOneClosed(Event),
    #[error("dimensional ordering failed: {0}")]
    VerifyFailed(String),
    #[error("dominance relation is not a total preorder: {0}")]
    InternalOrder(String),
    #[error("extension pipeline invariant broken: {0}")]
    Extension(String),
    #[error("illegal extended-value operation: {0}")]
    ExtArithmetic(&'static str),
    #[error("generator configuration invalid: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
