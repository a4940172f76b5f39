//! Outage probability `P(gamma < gamma_th)` under MRT toward the user.

use super::distributions::z_cdf;
use super::{clamp_probability, require_two_antennas, BranchCoefficients};
use crate::channel::{check_tau, SystemParams};
use crate::specfun::{
    gamma_fn, integrate_semi_infinite, integrate_with_error, ln_gamma, QuadratureSpec,
};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

const PROBABILITY_SLACK: f64 = 1e-9;
const Z_CDF_NOISE: f64 = 1e-15;

/// Outer-integral tolerances used by [`outage_exact`]. Purely relative, so
/// deep-tail probabilities keep their significant digits.
pub const OUTAGE_QUADRATURE: QuadratureSpec = QuadratureSpec {
    rel_tol: 1e-8,
    abs_tol: 1e-300,
    max_subdivisions: 2000,
};

/// Exact outage probability with the default tolerances.
pub fn outage_exact(params: &SystemParams, tau: f64) -> Result<f64> {
    outage_exact_with(params, tau, &OUTAGE_QUADRATURE)
}

/// Exact outage probability as a double integral.
///
/// Conditioned on `y = ||h1||^2 < y0 = sqrt(gamma_th / a1)` the slack left
/// for the relay is `g = gamma_th - a1 y^2`. With `X = b1 y mu` the link is
/// in outage whenever `X <= g`, and otherwise when
/// `c1 z < g (X + 1) / (X - g)`. Writing `mu = g / (b1 y) + u`,
///
/// `P_out = int_0^y0 f_Y(y) [1 - e^{-mu0} + e^{-mu0} int_0^inf F_z(g/c1 + g(g+1)/(c1 b1 y u)) e^{-u} du] dy`.
///
/// The inner integral starts exactly where the threshold on `z` has its
/// pole, so no further splitting of the range is needed.
pub fn outage_exact_with(params: &SystemParams, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    let n = params.n_antennas();
    require_two_antennas(n)?;
    let c = BranchCoefficients::new(params, tau)?;
    let gth = params.gamma_th();
    let nf = n as f64;
    let ln_gn = ln_gamma(nf)?;

    // Gamma(N) mass beyond this point is far below double precision
    let y_cap = nf + 40.0 * nf.sqrt() + 60.0;
    let y0 = (gth / c.a1).sqrt();
    let y_hi = y0.min(y_cap);
    if !(y_hi > 0.0) {
        return Ok(0.0);
    }

    let inner_rel = (0.01 * spec.rel_tol).max(1e-12);
    let mut failure: Option<Error> = None;

    let integrand = |y: f64| -> f64 {
        if failure.is_some() || !(y > 0.0) {
            return 0.0;
        }
        let g = gth - c.a1 * y * y;
        if g <= 0.0 {
            return 0.0;
        }
        let pdf = ((nf - 1.0) * y.ln() - y - ln_gn).exp();
        if pdf == 0.0 {
            return 0.0;
        }
        let mu0 = g / (c.b1 * y);
        let head = -(-mu0).exp_m1();
        let weight = (-mu0).exp();
        let mut tail = 0.0;
        if weight > 0.0 {
            // the tail only has to be resolved relative to the whole bracket,
            // and F_z itself carries about 1e-15 absolute noise
            let inner_spec = QuadratureSpec {
                rel_tol: inner_rel,
                abs_tol: inner_rel * head / weight + Z_CDF_NOISE,
                max_subdivisions: spec.max_subdivisions,
            };
            let base = g / c.c1;
            let slope = g * (g + 1.0) / (c.c1 * c.b1 * y);
            let inner = integrate_semi_infinite(
                |u| {
                    let x = if u > 0.0 {
                        base + slope / u
                    } else {
                        f64::INFINITY
                    };
                    z_cdf(n, x).unwrap_or(f64::NAN) * (-u).exp()
                },
                0.0,
                &inner_spec,
            );
            match inner {
                Ok(v) => tail = v,
                Err(e) => {
                    failure = Some(e);
                    return 0.0;
                }
            }
        }
        pdf * (head + weight * tail)
    };

    let result = integrate_with_error(integrand, 0.0, y_hi, spec);
    if let Some(e) = failure {
        return Err(e);
    }
    let (value, _) = result?;
    Ok(clamp_probability(value, PROBABILITY_SLACK))
}

/// High-SNR approximation
/// `2 d3^a / (d1^a Gamma(N) (N+1)(N-1)) [(1 - tau) d1^(2a) gamma_th / (2 eta tau rho)]^((N+1)/2)`.
///
/// The exponent `(N + 1)/2` is the diversity order; the relay-to-H-AP
/// distance does not appear.
pub fn outage_high_snr(params: &SystemParams, tau: f64) -> Result<f64> {
    let n = params.n_antennas();
    require_two_antennas(n)?;
    check_tau(tau)?;
    let [pl1, _, pl3] = params.path_loss();
    let nf = n as f64;
    let base =
        (1.0 - tau) * pl1 * pl1 * params.gamma_th() / (2.0 * params.eta() * tau * params.rho());
    let lead = 2.0 * pl3 / (pl1 * gamma_fn(nf)? * (nf + 1.0) * (nf - 1.0));
    Ok(lead * base.powf(0.5 * (nf + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Scenario;
    use crate::specfun::regularized_lower;

    fn params(n: usize, ps_dbm: f64, gamma_th_db: f64) -> SystemParams {
        Scenario {
            n_antennas: n,
            ps_dbm,
            gamma_th_db,
            ..Scenario::default()
        }
        .build()
        .unwrap()
    }

    #[test]
    fn vanishing_threshold_gives_no_outage() {
        let p = params(3, -20.0, -200.0);
        assert!(outage_exact(&p, 0.5).unwrap() < 1e-12);
    }

    #[test]
    fn no_power_gives_certain_outage() {
        let p = params(3, -100.0, 0.0);
        let v = outage_exact(&p, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn bounded_by_direct_link_and_both_links() {
        // outage needs a1 y^2 < gamma_th, and is implied by a1 y^2 + b1 y mu < gamma_th
        for &ps in &[-35.0, -25.0, -15.0] {
            let p = params(2, ps, 0.0);
            let c = BranchCoefficients::new(&p, 0.5).unwrap();
            let y0 = (p.gamma_th() / c.a1).sqrt();
            let upper = regularized_lower(2.0, y0).unwrap();
            let v = outage_exact(&p, 0.5).unwrap();
            assert!(v <= upper && v > 0.0, "{v} vs {upper}");
        }
    }

    #[test]
    fn nonincreasing_in_power_and_antennas() {
        let mut last = 1.0;
        for k in 0..8 {
            let v = outage_exact(&params(3, -40.0 + 5.0 * k as f64, 0.0), 0.5).unwrap();
            assert!(v <= last, "{v} > {last}");
            last = v;
        }
        let mut last = 1.0;
        for n in 2..7 {
            let v = outage_exact(&params(n, -25.0, 0.0), 0.5).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn high_snr_power_law_and_distance_independence() {
        let p = params(3, 30.0, 0.0);
        let doubled = Scenario {
            ps_dbm: 30.0 + 10.0 * 2f64.log10(),
            ..*p.scenario()
        }
        .build()
        .unwrap();
        let ratio = outage_high_snr(&doubled, 0.4).unwrap() / outage_high_snr(&p, 0.4).unwrap();
        assert!((ratio - 2f64.powf(-2.0)).abs() < 1e-12);

        let far = Scenario {
            d2: 80.0,
            ..*p.scenario()
        }
        .build()
        .unwrap();
        assert_eq!(
            outage_high_snr(&far, 0.4).unwrap(),
            outage_high_snr(&p, 0.4).unwrap()
        );
        assert!(matches!(
            outage_high_snr(&params(1, 30.0, 0.0), 0.4),
            Err(Error::NeedsTwoAntennas(1))
        ));
    }

    #[test]
    fn approximation_meets_exact_at_high_snr() {
        let p = params(2, 50.0, 0.0);
        let exact = outage_exact(&p, 0.5).unwrap();
        let approx = outage_high_snr(&p, 0.5).unwrap();
        assert!(
            (exact.log10() - approx.log10()).abs() < 0.15,
            "{exact} vs {approx}"
        );
    }

    #[test]
    fn rejects_single_antenna() {
        assert!(matches!(
            outage_exact(&params(1, 0.0, 0.0), 0.5),
            Err(Error::NeedsTwoAntennas(1))
        ));
    }
}
