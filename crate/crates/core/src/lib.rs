//! Throughput analysis for wireless networks that mix full-duplex and
//! half-duplex links under slotted ALOHA, with a Monte Carlo simulator of
//! the underlying marked Poisson network used to validate every formula.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod harness;
pub mod mcsim;
pub mod numerics;

pub use error::{Error, Result};
