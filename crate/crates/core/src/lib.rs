pub mod circuit;
pub mod error;
pub mod exec;
pub mod operators;
pub mod pulse;
pub mod dynamics;
pub mod emission;
pub mod units;

pub use error::{Error, Result};
