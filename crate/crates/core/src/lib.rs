pub mod construction;
pub mod covering;
pub mod error;
pub mod primes;
pub mod rng;
pub mod statistics;

pub use error::{Error, Result};
