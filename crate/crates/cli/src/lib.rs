//! Library side of the command-line harness: strategy vocabulary, structure
//! files, the simulation driver and the Bayes-factor curve, kept callable so
//! the integration tests drive them directly.

pub mod bfcurve;
pub mod simulate;
pub mod strategy;
pub mod structures;
