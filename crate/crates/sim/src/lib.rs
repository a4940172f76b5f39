//! Monte Carlo engine, experiment recipes, CSV output and self-checks for the
//! wireless-powered relay model in `wprelay-core`.

pub mod config;
mod error;
pub mod montecarlo;
pub mod output;
pub mod recipes;
pub mod verify;

pub use error::SimError;
