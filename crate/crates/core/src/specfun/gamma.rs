use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(xm1: f64) -> f64 {
    let mut acc = LANCZOS[0];
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        acc += p / (xm1 + i as f64);
    }
    acc
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Gamma function. Non-positive integers are poles and are rejected.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::Domain {
            function: "gamma",
            value: x,
        });
    }
    if x < 0.5 {
        // reflection
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    if x == x.floor() {
        // exact product; the Lanczos power loses digits for large x
        return Ok((2..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    // split the power so t^(x - 1/2) does not overflow before e^-t scales it
    let half = t.powf((xm1 + 0.5) / 2.0);
    Ok(SQRT_2PI * half * (-t).exp() * half * lanczos_sum(xm1))
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::Domain {
            function: "ln_gamma",
            value: x,
        });
    }
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return Ok((PI / s).ln() - ln_gamma(1.0 - x)?);
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (xm1 + 0.5) * t.ln() - t + lanczos_sum(xm1).ln())
}

/// Digamma `psi(x)` for `x > 0`: recurrence up to `x >= 10`, then the
/// asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "digamma",
            value: x,
        });
    }
    let mut acc = 0.0;
    let mut x = x;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli terms B_2k / (2k)
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    Ok(acc + x.ln() - 0.5 / x - series)
}
