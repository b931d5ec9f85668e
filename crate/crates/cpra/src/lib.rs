pub mod container;
pub mod diversity;
pub mod error;
pub mod instances;
pub mod objectives;
pub mod relaxation;

pub use error::{CpraError, Result};
