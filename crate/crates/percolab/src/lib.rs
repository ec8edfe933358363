pub mod certify;
pub mod error;
pub mod explore;
pub mod generators;
pub mod graph;
pub mod percolate;
pub mod rng;
pub mod sprinkle;
pub mod theory;

pub use error::{Error, Result};
