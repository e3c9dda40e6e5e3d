//! Local weak observability of dynamics on k-uniform hypergraphs and
//! minimum observable node (MON) sets.

pub mod cli;
pub mod correlation;
pub mod error;
pub mod hypergraph;
pub mod linalg;
pub mod mon;
pub mod observability;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
