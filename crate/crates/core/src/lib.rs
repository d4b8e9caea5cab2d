//! Simulator for two-party quantum communication protocols with exact cost
//! accounting, plus a small numerical toolbox for the matching lower bounds.

pub mod amplamp;
pub mod boolfn;
pub mod error;
pub mod harness;
pub mod lowerbound;
pub mod oracles;
pub mod params;
pub mod query;
pub mod runtime;
pub mod search;
pub mod statevector;
pub mod symmetric;
pub mod verify;

pub use error::{Error, Result};
