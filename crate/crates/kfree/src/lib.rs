//! Exact counting, range scanning, gap statistics, and oscillation bounds
//! for k-free integers.

pub mod arith;
pub mod counting;
pub mod error;
pub mod hp;
pub mod zeta;

pub use error::{Error, Result};
