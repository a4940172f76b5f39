//! Scenario parameters, Rayleigh channel sampling and the projection geometry
//! that every beamforming solver works in.
//!
//! All decibel quantities are converted to linear scale once, when a
//! [`Scenario`] is turned into [`SystemParams`]. Everything downstream is
//! linear.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Rounding slack accepted on `||h2||^2 - b^2` before it is treated as an error.
const RADICAND_GUARD: f64 = 1e-12;

/// Noise floor in dBm for a given density (dBm/Hz) and bandwidth (Hz).
pub fn noise_dbm(density_dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    density_dbm_per_hz + 10.0 * bandwidth_hz.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Raw, decibel-scale description of a deployment.
///
/// This is the form read from config files and swept by experiments; call
/// [`Scenario::build`] to validate it and obtain [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub n_antennas: usize,
    /// H-AP to user distance in meters.
    pub d1: f64,
    /// H-AP to relay distance in meters.
    pub d2: f64,
    /// User to relay distance in meters.
    pub d3: f64,
    pub alpha: f64,
    pub eta: f64,
    pub ps_dbm: f64,
    pub noise_dbm: f64,
    pub gamma_th_db: f64,
    /// Circuit power drawn from the harvested energy; `None` means zero.
    pub pc_dbm: Option<f64>,
}

impl Default for Scenario {
    /// 5 GHz carrier, 20 MHz bandwidth, -174 dBm/Hz noise density,
    /// eta = 0.5, alpha = 2.5, N = 10, d1 = 20 m, d2 = d3 = 15 m,
    /// Ps = 30 dBm and a 0 dB outage threshold.
    fn default() -> Self {
        Self {
            n_antennas: 10,
            d1: 20.0,
            d2: 15.0,
            d3: 15.0,
            alpha: 2.5,
            eta: 0.5,
            ps_dbm: 30.0,
            noise_dbm: noise_dbm(-174.0, 20e6),
            gamma_th_db: 0.0,
            pc_dbm: None,
        }
    }
}

impl Scenario {
    pub fn build(self) -> Result<SystemParams> {
        SystemParams::new(self)
    }
}

/// Validated scenario with every linear-scale constant precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    scenario: Scenario,
    rho: f64,
    ps_watts: f64,
    noise_watts: f64,
    gamma_th: f64,
    pc_watts: f64,
    path_loss: [f64; 3],
}

impl SystemParams {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let Scenario {
            n_antennas,
            d1,
            d2,
            d3,
            alpha,
            eta,
            ps_dbm,
            noise_dbm,
            gamma_th_db,
            pc_dbm,
        } = scenario;
        if n_antennas == 0 {
            return Err(invalid("n_antennas", "must be at least 1"));
        }
        for (name, d) in [("d1", d1), ("d2", d2), ("d3", d3)] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid(name, "distance must be positive and finite"));
            }
        }
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return Err(invalid("alpha", "path-loss exponent must be >= 2"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("eta", "conversion efficiency must lie in (0, 1]"));
        }
        for (name, v) in [
            ("ps_dbm", ps_dbm),
            ("noise_dbm", noise_dbm),
            ("gamma_th_db", gamma_th_db),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        let pc_watts = match pc_dbm {
            None => 0.0,
            Some(v) if v.is_finite() => dbm_to_watts(v),
            Some(_) => return Err(invalid("pc_dbm", "must be finite")),
        };
        Ok(Self {
            scenario,
            rho: db_to_linear(ps_dbm - noise_dbm),
            ps_watts: dbm_to_watts(ps_dbm),
            noise_watts: dbm_to_watts(noise_dbm),
            gamma_th: db_to_linear(gamma_th_db),
            pc_watts,
            path_loss: [d1.powf(alpha), d2.powf(alpha), d3.powf(alpha)],
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn n_antennas(&self) -> usize {
        self.scenario.n_antennas
    }

    pub fn eta(&self) -> f64 {
        self.scenario.eta
    }

    /// Transmit SNR `Ps / N0`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn ps_watts(&self) -> f64 {
        self.ps_watts
    }

    pub fn noise_watts(&self) -> f64 {
        self.noise_watts
    }

    /// Linear outage threshold.
    pub fn gamma_th(&self) -> f64 {
        self.gamma_th
    }

    pub fn pc_watts(&self) -> f64 {
        self.pc_watts
    }

    /// `d1^alpha`, `d2^alpha`, `d3^alpha`.
    pub fn path_loss(&self) -> [f64; 3] {
        self.path_loss
    }

    /// `2 eta rho tau / (1 - tau)`: common SNR scale of every branch.
    pub fn snr_scale(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        Ok(2.0 * self.scenario.eta * self.rho * tau / (1.0 - tau))
    }
}

fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParam { name, reason }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::TauOutOfRange(tau))
    }
}

/// One block-fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// User to H-AP, length N.
    pub h1: Vec<Complex64>,
    /// Relay to H-AP, length N.
    pub h2: Vec<Complex64>,
    /// User to relay.
    pub h3: Complex64,
}

impl ChannelState {
    pub fn new(h1: Vec<Complex64>, h2: Vec<Complex64>, h3: Complex64) -> Result<Self> {
        if h1.len() != h2.len() {
            return Err(Error::DimensionMismatch {
                expected: h1.len(),
                found: h2.len(),
            });
        }
        let finite = h1
            .iter()
            .chain(&h2)
            .chain(core::iter::once(&h3))
            .all(|z| z.is_finite());
        if !finite {
            return Err(invalid("channel", "entries must be finite"));
        }
        Ok(Self { h1, h2, h3 })
    }

    pub fn n_antennas(&self) -> usize {
        self.h1.len()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        for v in [&self.h1, &self.h2] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }
}

/// Draws a `CN(0, 1)` scalar: independent real and imaginary parts with
/// variance 1/2 each.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Samples `h1`, `h2` (in that order, entry by entry) and then `h3`.
pub fn sample_channel<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelState {
    let n = params.n_antennas();
    let h1 = (0..n).map(|_| sample_cn(rng)).collect();
    let h2 = (0..n).map(|_| sample_cn(rng)).collect();
    let h3 = sample_cn(rng);
    ChannelState { h1, h2, h3 }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// `h^T w` (plain transpose, no conjugation).
pub fn dot_t(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(x, y)| x * y).sum()
}

/// `h^H w`.
pub fn dot_h(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(x, y)| x.conj() * y).sum()
}

/// Projection scalars of `h2` on `h1` and the SNR coefficients built from
/// them.
///
/// `a`, `b`, `c` and the `cap_*` coefficients do not depend on the time
/// split; `a0..d0` and `a1..c1` are evaluated at `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDecomposition {
    /// `||h1||`.
    pub a: f64,
    /// `||Pi_{h1} h2||`.
    pub b: f64,
    /// `||Pi_{h1}^perp h2||`.
    pub c: f64,
    /// `||h1||^2 / d1^{2 alpha}`.
    pub cap_a: f64,
    /// `|h3|^2 / (d1^alpha d3^alpha)`.
    pub cap_c: f64,
    /// `||h2||^2 / d2^{2 alpha}`.
    pub cap_d: f64,
    pub tau: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    /// MRT-toward-user branch coefficients.
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
}

pub fn decompose(
    params: &SystemParams,
    ch: &ChannelState,
    tau: f64,
) -> Result<ChannelDecomposition> {
    let scale = params.snr_scale(tau)?;
    ch.check_len(params.n_antennas())?;

    let h1_sq = norm_sqr(&ch.h1);
    if h1_sq == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    let a = h1_sq.sqrt();
    let b = dot_h(&ch.h1, &ch.h2).norm() / a;
    let h2_sq = norm_sqr(&ch.h2);
    let c = perpendicular_norm(h2_sq, b)?;
    let h3_sq = ch.h3.norm_sqr();

    let [pl1, pl2, pl3] = params.path_loss();
    let eta = params.eta();
    let rho = params.rho();

    let cap_a = h1_sq / (pl1 * pl1);
    let cap_c = h3_sq / (pl1 * pl3);
    let cap_d = h2_sq / (pl2 * pl2);
    let b0 = 4.0 * eta * eta * tau * tau * rho * rho * h3_sq * h2_sq
        / ((1.0 - tau) * (1.0 - tau) * pl1 * pl2 * pl2 * pl3);

    Ok(ChannelDecomposition {
        a,
        b,
        c,
        cap_a,
        cap_c,
        cap_d,
        tau,
        a0: scale * cap_a,
        b0,
        c0: scale * cap_c,
        d0: scale * cap_d,
        a1: scale / (pl1 * pl1),
        b1: scale / (pl1 * pl3),
        c1: scale / (pl2 * pl2),
    })
}

fn perpendicular_norm(h2_sq: f64, b: f64) -> Result<f64> {
    let radicand = h2_sq - b * b;
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_GUARD * h2_sq.max(f64::MIN_POSITIVE) {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand(radicand))
    }
}

/// Unit vectors spanning the optimal-beamformer family: `u_par` along
/// `Pi_{h1*} h2*` and `u_perp` along `Pi_{h1*}^perp h2*`. `u_perp` is `None`
/// when `h2` has no component outside `span(h1)` (including `N = 1`).
pub(crate) struct BeamBasis {
    pub u_par: Vec<Complex64>,
    pub u_perp: Option<Vec<Complex64>>,
}

pub(crate) fn beam_basis(ch: &ChannelState) -> Result<BeamBasis> {
    let h1_sq = norm_sqr(&ch.h1);
    if h1_sq == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    let a = h1_sq.sqrt();
    // h1^T h2* = conj(h1^H h2)
    let inner = dot_h(&ch.h1, &ch.h2).conj();
    let h2_sq = norm_sqr(&ch.h2);

    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let u_par: Vec<Complex64> = ch.h1.iter().map(|h| h.conj() * phase / a).collect();

    // Pi_{h1*} h2* = h1* (h1^T h2*) / ||h1||^2
    let perp: Vec<Complex64> = ch
        .h1
        .iter()
        .zip(&ch.h2)
        .map(|(x, y)| y.conj() - x.conj() * inner / h1_sq)
        .collect();
    let c = norm_sqr(&perp).sqrt();
    let u_perp = if c > RADICAND_GUARD.sqrt() * h2_sq.sqrt() && c > 0.0 {
        Some(perp.into_iter().map(|z| z / c).collect())
    } else {
        None
    };
    Ok(BeamBasis { u_par, u_perp })
}

/// `w = x u_par + sqrt(1 - x^2) u_perp`, normalized to unit length.
///
/// When `h2` lies in `span(h1)` only the parallel direction exists and `x_bar`
/// is ignored.
pub fn build_beamformer(ch: &ChannelState, x_bar: f64) -> Result<Vec<Complex64>> {
    if !(0.0..=1.0).contains(&x_bar) {
        return Err(invalid("x_bar", "must lie in [0, 1]"));
    }
    let basis = beam_basis(ch)?;
    let w = match basis.u_perp {
        None => basis.u_par,
        Some(u_perp) => {
            let y = (1.0 - x_bar * x_bar).max(0.0).sqrt();
            basis
                .u_par
                .iter()
                .zip(&u_perp)
                .map(|(p, q)| p * x_bar + q * y)
                .collect()
        }
    };
    Ok(normalize(w))
}

pub(crate) fn normalize(mut w: Vec<Complex64>) -> Vec<Complex64> {
    let n = norm_sqr(&w).sqrt();
    if n > 0.0 {
        w.iter_mut().for_each(|z| *z /= n);
    }
    w
}
