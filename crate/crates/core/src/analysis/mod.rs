//! Performance analysis of the MRT-toward-user design `w = h1* / ||h1||`.
//!
//! Under that beamformer the end-to-end SNR splits into three branch SNRs,
//!
//! * `gamma_us = a1 y^2` with `y = ||h1||^2 ~ Gamma(N, 1)`,
//! * `gamma_ur = b1 y mu` with `mu = |h3|^2 ~ Exp(1)`,
//! * `gamma_rs = c1 z` with `z = nu ||h2||^4` and `nu ~ Beta(1, N - 1)`,
//!
//! combined as `gamma_us + gamma_ur gamma_rs / (gamma_ur + gamma_rs + 1)`.
//! This module gives their distributions and moments, the exact and
//! high-SNR outage probability, and a closed-form lower bound on the
//! average throughput.

mod bound;
mod distributions;
mod outage;

pub use bound::{throughput_lower_bound, throughput_lower_bound_with, BranchConstants, M4Rule};
pub use distributions::{
    branch_cdfs, branch_moments, z_cdf, z_survival, BranchCdfs, BranchMoments,
};
pub use outage::{outage_exact, outage_exact_with, outage_high_snr};

use crate::channel::{dot_h, norm_sqr, ChannelState, SystemParams};
use crate::{Error, Result};

/// `a1`, `b1`, `c1` at a given time split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients {
    pub n_antennas: usize,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
}

impl BranchCoefficients {
    pub fn new(params: &SystemParams, tau: f64) -> Result<Self> {
        let scale = params.snr_scale(tau)?;
        let [pl1, pl2, pl3] = params.path_loss();
        Ok(Self {
            n_antennas: params.n_antennas(),
            a1: scale / (pl1 * pl1),
            b1: scale / (pl1 * pl3),
            c1: scale / (pl2 * pl2),
        })
    }
}

/// Branch SNRs of one realization under MRT toward the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSnrs {
    pub us: f64,
    pub ur: f64,
    pub rs: f64,
}

impl BranchSnrs {
    pub fn total(&self) -> f64 {
        self.us + crate::sysmodel::relay_snr(self.ur, self.rs)
    }
}

pub fn mrt_branch_snrs(coeffs: &BranchCoefficients, ch: &ChannelState) -> Result<BranchSnrs> {
    ch.check_len(coeffs.n_antennas)?;
    let y = norm_sqr(&ch.h1);
    if y == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    // |h2^T h1*|^2 / ||h1||^2 * ||h2||^2 = nu ||h2||^4
    let z = dot_h(&ch.h1, &ch.h2).norm_sqr() / y * norm_sqr(&ch.h2);
    Ok(BranchSnrs {
        us: coeffs.a1 * y * y,
        ur: coeffs.b1 * y * ch.h3.norm_sqr(),
        rs: coeffs.c1 * z,
    })
}

fn require_two_antennas(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::NeedsTwoAntennas(n))
    } else {
        Ok(())
    }
}

/// `C(n, k)` as a float.
fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, j| acc * j as f64)
}

/// Clamp to `[0, 1]` when the excursion is within `slack`.
fn clamp_probability(p: f64, slack: f64) -> f64 {
    if (-slack..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + slack {
        1.0
    } else {
        p
    }
}
