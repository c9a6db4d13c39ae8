pub mod bounds;
pub mod budget;
pub mod cli;
pub mod constructions;
pub mod designs;
pub mod error;
pub mod gf2;
pub mod hamming;
pub mod recovery;
pub mod searchlab;

pub use budget::Budget;
pub use error::{Error, Result};
