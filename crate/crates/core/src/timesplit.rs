//! Harvesting time split.
//!
//! Once the beamformer is fixed, the throughput bound becomes
//! `R(tau) = (1 - tau)/2 * log2(1 + kappa * tau / (1 - tau))` with
//! `kappa = 2 eta rho gamma_max`, whose maximizer has a closed form through
//! the principal branch of the Lambert W function. A golden-section search
//! serves both as an oracle for the closed form and as the optimizer for
//! objectives that have no closed form.

use core::f64::consts::E;
#[allow(unused_imports)]
use num_traits::Float;

use crate::search::golden_max;
use crate::{Error, Result};

/// Interior margin kept away from `tau = 0` and `tau = 1` by the search.
pub const TAU_MARGIN: f64 = 1e-9;

const INV_E: f64 = 1.0 / E;

/// Principal branch `W0(x)` for `x >= -1/e`, solving `w e^w = x`.
///
/// The starting point comes from the branch-point expansion near `-1/e`, a
/// log-based guess for large `x` and Winitzki's approximation in between;
/// Halley iteration then converges in a handful of steps.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E - 4.0 * f64::EPSILON {
        return Err(Error::Domain {
            function: "lambert_w0",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x <= -INV_E {
        return Ok(-1.0);
    }

    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() < 0.1 {
        x * (1.0 - x * (1.0 - 1.5 * x))
    } else if x > E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else {
        let l = (1.0 + x).ln();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    };

    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 || f == 0.0 {
            break;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSplitMethod {
    LambertW,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSplitResult {
    pub tau: f64,
    /// `2 eta rho gamma_max`; `None` when an arbitrary objective was searched.
    pub kappa: Option<f64>,
    pub method: TimeSplitMethod,
    /// Objective value at `tau`.
    pub objective: f64,
}

/// `(1 - tau)/2 * log2(1 + kappa tau / (1 - tau))`.
pub fn upper_bound_rate(kappa: f64, tau: f64) -> f64 {
    0.5 * (1.0 - tau) * (kappa * tau / (1.0 - tau)).ln_1p() / core::f64::consts::LN_2
}

/// Closed-form maximizer of [`upper_bound_rate`] over `tau`.
pub fn optimal_tau(kappa: f64) -> Result<TimeSplitResult> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParam {
            name: "kappa",
            reason: "must be positive and finite",
        });
    }
    let w = lambert_w0((kappa - 1.0) / E)?;
    let ew1 = (w + 1.0).exp();
    let tau = (ew1 - 1.0) / (kappa - 1.0 + ew1);
    let tau = tau.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    Ok(TimeSplitResult {
        tau,
        kappa: Some(kappa),
        method: TimeSplitMethod::LambertW,
        objective: upper_bound_rate(kappa, tau),
    })
}

/// Golden-section maximum of `objective` on `[TAU_MARGIN, 1 - TAU_MARGIN]`
/// to bracket width `tol`.
///
/// Non-unimodal objectives yield a local maximum.
pub fn search_tau<F: FnMut(f64) -> f64>(objective: F, tol: f64) -> Result<TimeSplitResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam {
            name: "tol",
            reason: "must be positive",
        });
    }
    let (tau, value) = golden_max(objective, TAU_MARGIN, 1.0 - TAU_MARGIN, tol);
    Ok(TimeSplitResult {
        tau,
        kappa: None,
        method: TimeSplitMethod::Search,
        objective: value,
    })
}
