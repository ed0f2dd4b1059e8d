pub mod error;
mod jacobi;
pub mod linalg;
pub mod partitions;
pub mod oracles;
pub mod pure;
pub mod states;
mod worklist;

pub use error::{Error, Result};
