//! End-to-end SNR and throughput of the harvest-then-cooperate link.
//!
//! The user and relay spend what they harvest during `tau` on transmitting
//! in the two halves of `1 - tau`. The H-AP combines the direct and relayed
//! copies by MRC, so the end-to-end SNR is the direct-branch SNR plus the
//! usual amplify-and-forward term `g1 g2 / (g1 + g2 + 1)`.
//!
//! Everything is evaluated through the transmit powers, which makes the
//! circuit-power variant a clamp on those powers and nothing more.

use core::f64::consts::LN_2;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::channel::{check_tau, dot_t, norm_sqr, ChannelState, SystemParams};
use crate::{Error, Result};

const UNIT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBreakdown {
    pub gamma_direct: f64,
    pub gamma_relay: f64,
    /// `gamma_direct + gamma_relay`.
    pub gamma_total: f64,
    /// `A0 g1 + min(C0 g1, D0 g2)`; ignores circuit power.
    pub gamma_upper: f64,
}

/// Channel energies and beam gains of one realization under a fixed
/// beamformer: `||h1||^2`, `||h2||^2`, `|h3|^2`, `g1 = |h1^T w|^2` and
/// `g2 = |h2^T w|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub h3_sq: f64,
    pub g1: f64,
    pub g2: f64,
}

impl LinkGains {
    /// Gains of `ch` under `w`, which must have unit norm to within 1e-9.
    pub fn new(params: &SystemParams, ch: &ChannelState, w: &[Complex64]) -> Result<Self> {
        ch.check_len(params.n_antennas())?;
        if w.len() != ch.n_antennas() {
            return Err(Error::DimensionMismatch {
                expected: ch.n_antennas(),
                found: w.len(),
            });
        }
        if (norm_sqr(w).sqrt() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidParam {
                name: "w",
                reason: "beamformer must have unit norm",
            });
        }
        Ok(Self {
            h1_sq: norm_sqr(&ch.h1),
            h2_sq: norm_sqr(&ch.h2),
            h3_sq: ch.h3.norm_sqr(),
            g1: dot_t(&ch.h1, w).norm_sqr(),
            g2: dot_t(&ch.h2, w).norm_sqr(),
        })
    }
}

/// Transmit powers normalized by the noise power, `(P_u / N0, P_r / N0)`.
fn normalized_powers(params: &SystemParams, gains: &LinkGains, tau: f64) -> Result<(f64, f64)> {
    let scale = params.snr_scale(tau)?;
    let [pl1, pl2, _] = params.path_loss();
    let pc = params.pc_watts() / params.noise_watts();
    let pu = (scale * gains.g1 / pl1 - pc).max(0.0);
    let pr = (scale * gains.g2 / pl2 - pc).max(0.0);
    Ok((pu, pr))
}

/// SNR breakdown from precomputed gains.
pub fn snr_from_gains(params: &SystemParams, gains: &LinkGains, tau: f64) -> Result<SnrBreakdown> {
    let (pu, pr) = normalized_powers(params, gains, tau)?;
    let [pl1, pl2, pl3] = params.path_loss();

    let gamma_direct = pu * gains.h1_sq / pl1;
    let g_ur = pu * gains.h3_sq / pl3;
    let g_rs = pr * gains.h2_sq / pl2;
    let gamma_relay = relay_snr(g_ur, g_rs);

    let scale = params.snr_scale(tau)?;
    let a0 = scale * gains.h1_sq / (pl1 * pl1);
    let c0 = scale * gains.h3_sq / (pl1 * pl3);
    let d0 = scale * gains.h2_sq / (pl2 * pl2);
    let gamma_upper = a0 * gains.g1 + (c0 * gains.g1).min(d0 * gains.g2);

    Ok(SnrBreakdown {
        gamma_direct,
        gamma_relay,
        gamma_total: gamma_direct + gamma_relay,
        gamma_upper,
    })
}

/// Two-hop amplify-and-forward SNR `x y / (x + y + 1)`.
pub fn relay_snr(x: f64, y: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    x * y / (x + y + 1.0)
}

/// `(1 - tau)/2 * log2(1 + gamma)`.
pub fn rate(tau: f64, gamma: f64) -> f64 {
    0.5 * (1.0 - tau) * gamma.ln_1p() / LN_2
}

pub fn snr_exact(
    params: &SystemParams,
    ch: &ChannelState,
    w: &[Complex64],
    tau: f64,
) -> Result<SnrBreakdown> {
    check_tau(tau)?;
    let gains = LinkGains::new(params, ch, w)?;
    snr_from_gains(params, &gains, tau)
}

/// Achievable throughput in bits/s/Hz.
pub fn throughput(
    params: &SystemParams,
    ch: &ChannelState,
    w: &[Complex64],
    tau: f64,
) -> Result<f64> {
    Ok(rate(tau, snr_exact(params, ch, w, tau)?.gamma_total))
}

/// Min-form upper bound on the end-to-end SNR.
pub fn snr_upper(
    params: &SystemParams,
    ch: &ChannelState,
    w: &[Complex64],
    tau: f64,
) -> Result<f64> {
    Ok(snr_exact(params, ch, w, tau)?.gamma_upper)
}

/// `(P_u, P_r)` in watts after subtracting the circuit power.
pub fn transmit_powers(
    params: &SystemParams,
    ch: &ChannelState,
    w: &[Complex64],
    tau: f64,
) -> Result<(f64, f64)> {
    check_tau(tau)?;
    let gains = LinkGains::new(params, ch, w)?;
    let (pu, pr) = normalized_powers(params, &gains, tau)?;
    Ok((pu * params.noise_watts(), pr * params.noise_watts()))
}
