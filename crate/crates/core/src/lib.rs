//! Exact finite conditional probability spaces and the agreement machinery
//! built on them: certainty and knowledge operators, common-certainty fixed
//! points, the three agreement hypotheses, dimensionally ordered
//! representations, and 1-augmentation.

pub mod error;
pub mod foundations;

pub use error::{Error, Result};
pub mod agreement;
pub mod assumptions;
pub mod augmentation;
pub mod cli;
pub mod corpus;
pub mod cps;
pub mod epistemic;
pub mod fixtures;
pub mod renyi;
