//! Distributions and moments of the three branch SNRs.

use super::{binomial, factorial, require_two_antennas, BranchCoefficients};
use crate::channel::SystemParams;
use crate::specfun::{bessel_k01, gamma_fn, ln_gamma, regularized_lower, upper_gamma_int_orders};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Beyond this `sqrt(x)` every term of the `z` survival sum underflows.
const SURVIVAL_CUTOFF: f64 = 745.0;

/// `P(z > x)` for `z = nu ||h2||^4`:
///
/// `2 (N - 1) sum_{m<N} sum_{i<=N-2} C(N-2, i) (-1)^i / m! x^(i+1) Gamma(m - 2i - 2, sqrt(x))`.
pub fn z_survival(n: usize, x: f64) -> Result<f64> {
    require_two_antennas(n)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            function: "z_survival",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let t = x.sqrt();
    if t > SURVIVAL_CUTOFF {
        return Ok(0.0);
    }
    let lo = -(2 * n as i32 - 2);
    let hi = (n as i32 - 3).max(lo);
    let table = upper_gamma_int_orders(lo, hi, t)?;
    let ln_x = x.ln();

    let mut sum = 0.0;
    for m in 0..n {
        let inv_fact = 1.0 / factorial(m);
        for i in 0..=n - 2 {
            let order = m as i32 - 2 * i as i32 - 2;
            let g = table[(order - lo) as usize];
            if g == 0.0 {
                continue;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            // x^(i+1) Gamma(.) through logs so huge x cannot overflow
            let term = if g > 0.0 {
                ((i as f64 + 1.0) * ln_x + g.ln()).exp()
            } else {
                g * x.powi(i as i32 + 1)
            };
            sum += sign * binomial(n - 2, i) * inv_fact * term;
        }
    }
    Ok((2.0 * (n as f64 - 1.0) * sum).clamp(0.0, 1.0))
}

/// Below this CDF value `1 - survival` has too few significant digits and
/// the direct sum is used instead.
const SMALL_CDF: f64 = 1e-3;

/// `P(z <= x)`.
pub fn z_cdf(n: usize, x: f64) -> Result<f64> {
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let p = 1.0 - z_survival(n, x)?;
    if p >= SMALL_CDF || x == 0.0 {
        return Ok(p);
    }
    z_cdf_direct(n, x)
}

/// `P(r <= sqrt(x)) + sum_{i=1}^{N-1} C(N-1, i) (-1)^(i+1) x^i Gamma(N - 2i, sqrt(x)) / Gamma(N)`
/// with `r = ||h2||^2 ~ Gamma(N)`. The terms shrink fast for small `x`, so
/// the left tail keeps its relative accuracy.
fn z_cdf_direct(n: usize, x: f64) -> Result<f64> {
    let t = x.sqrt();
    let nf = n as f64;
    let lo = 2 - n as i32;
    let hi = n as i32 - 2;
    let table = upper_gamma_int_orders(lo, hi, t)?;
    let ln_x = x.ln();
    let ln_gn = ln_gamma(nf)?;
    let mut sum = regularized_lower(nf, t)?;
    for i in 1..n {
        let g = table[(n as i32 - 2 * i as i32 - lo) as usize];
        if g <= 0.0 {
            continue;
        }
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binomial(n - 1, i) * (i as f64 * ln_x + g.ln() - ln_gn).exp();
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// CDFs of the three branch SNRs at a fixed time split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCdfs {
    pub coeffs: BranchCoefficients,
}

fn check_arg(x: f64, function: &'static str) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        Err(Error::Domain { function, value: x })
    } else {
        Ok(())
    }
}

impl BranchCdfs {
    /// `P(gamma_us <= x) = P(N, sqrt(x / a1))`.
    pub fn us(&self, x: f64) -> Result<f64> {
        check_arg(x, "cdf_us")?;
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        regularized_lower(self.coeffs.n_antennas as f64, (x / self.coeffs.a1).sqrt())
    }

    /// `P(gamma_ur <= x) = 1 - sum_{m<N} (2/m!) u^((m+1)/2) K_{|m-1|}(2 sqrt(u))`
    /// with `u = x / b1`.
    pub fn ur(&self, x: f64) -> Result<f64> {
        check_arg(x, "cdf_ur")?;
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        let n = self.coeffs.n_antennas;
        let u = x / self.coeffs.b1;
        let arg = 2.0 * u.sqrt();
        let (k0, k1) = bessel_k01(arg)?;
        // K_0 .. K_{N-2} by upward recurrence
        let mut ks = alloc::vec![k0, k1];
        for j in 1..n.saturating_sub(2) {
            let next = ks[j - 1] + 2.0 * j as f64 / arg * ks[j];
            ks.push(next);
        }
        let ln_u = u.ln();
        let mut sum = 0.0;
        for m in 0..n {
            let k = ks[if m == 0 { 1 } else { m - 1 }];
            if k == 0.0 {
                continue;
            }
            sum += (core::f64::consts::LN_2 - factorial(m).ln()
                + 0.5 * (m as f64 + 1.0) * ln_u
                + k.ln())
            .exp();
        }
        Ok((1.0 - sum).clamp(0.0, 1.0))
    }

    /// `P(gamma_rs <= x) = P(z <= x / c1)`.
    pub fn rs(&self, x: f64) -> Result<f64> {
        check_arg(x, "cdf_rs")?;
        z_cdf(self.coeffs.n_antennas, x / self.coeffs.c1)
    }
}

/// Branch CDFs at time split `tau`. Needs `N >= 2` for the relay branch.
pub fn branch_cdfs(params: &SystemParams, tau: f64) -> Result<BranchCdfs> {
    require_two_antennas(params.n_antennas())?;
    Ok(BranchCdfs {
        coeffs: BranchCoefficients::new(params, tau)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchMoments {
    pub us: f64,
    pub ur: f64,
    pub rs: f64,
}

/// `n`-th moments `E[gamma_us^n]`, `E[gamma_ur^n]`, `E[gamma_rs^n]` as finite
/// sums over the antenna count.
pub fn branch_moments(params: &SystemParams, tau: f64, order: f64) -> Result<BranchMoments> {
    require_two_antennas(params.n_antennas())?;
    if !(order > 0.0 && order.is_finite()) {
        return Err(Error::InvalidParam {
            name: "order",
            reason: "moment order must be positive and finite",
        });
    }
    let c = BranchCoefficients::new(params, tau)?;
    let nn = c.n_antennas;
    let k = order;

    // E[gamma_us^k] = 2k sum_m Gamma(2k + m) / m! a1^k
    let mut us = 0.0;
    for m in 0..nn {
        us += gamma_fn(2.0 * k + m as f64)? / factorial(m);
    }
    let us = 2.0 * k * us * c.a1.powf(k);

    // E[gamma_ur^k] = k b1^k sum_m Gamma(m + k) Gamma(k + 1) / m!
    let gk1 = gamma_fn(k + 1.0)?;
    let mut ur = 0.0;
    for m in 0..nn {
        ur += gamma_fn(m as f64 + k)? * gk1 / factorial(m);
    }
    let ur = k * c.b1.powf(k) * ur;

    // E[gamma_rs^k] = 4k (N-1) sum_m 1/m! sum_i C(N-2, i) (-1)^i c1^k Gamma(m + 2k) / (2k + 2i + 2)
    let mut inner = 0.0;
    for i in 0..=nn - 2 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        inner += sign * binomial(nn - 2, i) / (2.0 * k + 2.0 * i as f64 + 2.0);
    }
    let mut outer = 0.0;
    for m in 0..nn {
        outer += gamma_fn(m as f64 + 2.0 * k)? / factorial(m);
    }
    let rs = 4.0 * k * (nn as f64 - 1.0) * outer * inner * c.c1.powf(k);

    Ok(BranchMoments { us, ur, rs })
}
