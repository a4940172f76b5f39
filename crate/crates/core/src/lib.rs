//! Energy beamforming, time-split optimization and performance analysis for a
//! three-node wireless-powered cooperative link: a multi-antenna hybrid access
//! point (H-AP) charges a single-antenna user and a single-antenna
//! amplify-and-forward relay, which then cooperate to deliver the user's data
//! back to the H-AP (harvest-then-cooperate).
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerical
//! code. Simulation drivers, file formats and the command line live in the
//! `wprelay` crate.
//!
//! Module map:
//!
//! * [`channel`]: scenario parameters, Rayleigh sampling, projection scalars.
//! * [`sysmodel`]: end-to-end SNR, throughput and the min-form upper bound.
//! * [`beamform`]: exact 2-D search, closed-form, large-N and MRT designs.
//! * [`timesplit`]: Lambert-W time split and golden-section fallback.
//! * [`specfun`]: gamma family, incomplete gamma, Bessel K, quadrature.
//! * [`analysis`]: outage and throughput analysis of MRT-toward-user.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod beamform;
pub mod channel;
mod error;
pub mod search;
pub mod specfun;
pub mod sysmodel;
pub mod timesplit;

pub use error::{Error, Result};

pub use num_complex::Complex64;
