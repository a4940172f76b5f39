//! Closed-form lower bound on the average throughput.
//!
//! Since `log2(1 + e^u + e^v)` is convex, replacing each branch SNR by the
//! exponential of its mean log gives a lower bound, and Jensen's inequality
//! on `E[ln(1 + gamma_ur + gamma_rs)]` keeps it one:
//!
//! `C_low = (1 - tau)/2 log2(1 + e^{m1} + e^{m2 + m3 - ln(1 + m4 + m5)})`.

use super::{binomial, factorial, require_two_antennas, BranchCoefficients};
use crate::channel::SystemParams;
use crate::specfun::{digamma, EULER_GAMMA};
use crate::sysmodel::rate;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Choice of `m4`, the mean of `gamma_ur` inside the Jensen term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum M4Rule {
    /// `E[gamma_ur] = b1 N`, the first moment of `b1 y mu`.
    FirstMoment,
    /// `b1 N (N - 1) / 2`, which equals the first moment only at `N = 3`.
    AsPrinted,
    /// Any fixed value; used to check that a wrong constant is caught.
    Fixed(f64),
}

impl M4Rule {
    pub fn value(self, coeffs: &BranchCoefficients) -> f64 {
        let n = coeffs.n_antennas as f64;
        match self {
            Self::FirstMoment => coeffs.b1 * n,
            Self::AsPrinted => coeffs.b1 * n * (n - 1.0) / 2.0,
            Self::Fixed(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchConstants {
    pub coeffs: BranchCoefficients,
    /// `E[ln gamma_us] = ln a1 + 2 psi(N)`.
    pub m1: f64,
    /// `E[ln gamma_ur] = ln b1 + psi(1) + psi(N)`.
    pub m2: f64,
    /// `E[ln gamma_rs] = ln c1 + psi(1) + psi(N)`.
    pub m3: f64,
    pub m4: f64,
    /// `E[gamma_rs] = c1 (N + 1)`.
    pub m5: f64,
}

impl BranchConstants {
    pub fn new(params: &SystemParams, tau: f64, m4: M4Rule) -> Result<Self> {
        require_two_antennas(params.n_antennas())?;
        let coeffs = BranchCoefficients::new(params, tau)?;
        let psi_n = digamma(coeffs.n_antennas as f64)?;
        let psi_1 = -EULER_GAMMA;
        Ok(Self {
            coeffs,
            m1: coeffs.a1.ln() + 2.0 * psi_n,
            m2: coeffs.b1.ln() + psi_1 + psi_n,
            m3: coeffs.c1.ln() + psi_1 + psi_n,
            m4: m4.value(&coeffs),
            m5: coeffs.c1 * (coeffs.n_antennas as f64 + 1.0),
        })
    }

    /// The same constants written as the finite harmonic and alternating
    /// sums they reduce to. The alternating sums lose accuracy as `N` grows.
    pub fn from_finite_sums(params: &SystemParams, tau: f64) -> Result<Self> {
        require_two_antennas(params.n_antennas())?;
        let coeffs = BranchCoefficients::new(params, tau)?;
        let n = coeffs.n_antennas;
        let psi_1 = -EULER_GAMMA;
        let harmonic: f64 = (1..n).map(|m| 1.0 / m as f64).sum();

        let mut nu_log = 0.0;
        for i in 0..=n - 2 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            nu_log += sign * binomial(n - 2, i) / ((i + 1) as f64).powi(2);
        }
        let mut m5 = 0.0;
        for m in 0..n {
            for i in 0..=n - 2 {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                m5 += sign * binomial(n - 2, i) * factorial(m + 1)
                    / factorial(m)
                    / (2.0 * i as f64 + 4.0);
            }
        }
        Ok(Self {
            coeffs,
            m1: coeffs.a1.ln() + 2.0 * psi_1 + 2.0 * harmonic,
            m2: coeffs.b1.ln() + 2.0 * psi_1 + harmonic,
            m3: coeffs.c1.ln() + 2.0 * psi_1 + 2.0 * harmonic - (n as f64 - 1.0) * nu_log,
            m4: M4Rule::AsPrinted.value(&coeffs),
            m5: 4.0 * coeffs.c1 * (n as f64 - 1.0) * m5,
        })
    }

    /// `(1 - tau)/2 log2(1 + e^{m1} + e^{m2 + m3 - ln(1 + m4 + m5)})`.
    pub fn bound(&self, tau: f64) -> f64 {
        let relay = (self.m2 + self.m3 - (1.0 + self.m4 + self.m5).ln()).exp();
        rate(tau, self.m1.exp() + relay)
    }
}

pub fn throughput_lower_bound(params: &SystemParams, tau: f64) -> Result<f64> {
    throughput_lower_bound_with(params, tau, M4Rule::FirstMoment)
}

pub fn throughput_lower_bound_with(params: &SystemParams, tau: f64, m4: M4Rule) -> Result<f64> {
    Ok(BranchConstants::new(params, tau, m4)?.bound(tau))
}
