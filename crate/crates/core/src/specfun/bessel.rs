//! Modified Bessel functions of the second kind, integer order.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::EULER_GAMMA;
use crate::{Error, Result};

const EPS: f64 = 1e-17;
const MAX_ITER: usize = 1_000;

/// Power series for `K0` and `K1`, used for `x <= 2`.
fn k01_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    // I0, I1 and the digamma-weighted sums of the K series
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let (mut i0, mut i1) = (0.0, 0.0);
    let (mut s0, mut s1) = (0.0, 0.0);
    for k in 0..MAX_ITER {
        let kf = k as f64;
        if k > 0 {
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += psi_k1 * t0;
        s1 += (psi_k1 + psi_k2) * t1;
        if t0 < EPS * i0 && t1 < EPS * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -ln_half * i0 + s0;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction (Temme's CF2) for order zero; returns
/// `(K0, K1)`. Used for `x > 2`.
fn k01_cf2(x: f64) -> (f64, f64) {
    let a1 = -0.25; // v^2 - 1/4 at v = 0
    let mut a = a1;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = -a;
    let mut c = -a;
    let mut s = 1.0 + q * delta;
    for k in 2..MAX_ITER {
        let kf = k as f64;
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (b + a * d);
        delta *= b * d - 1.0;
        f += delta;

        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        let ds = q * delta;
        s += ds;
        if ds.abs() < s.abs() * f64::EPSILON / 2.0 {
            break;
        }
    }
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (a1 * f + 0.5 + x) / x;
    (k0, k1)
}

/// `(K0(x), K1(x))` for `x > 0`.
pub fn bessel_k01(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "bessel_k",
            value: x,
        });
    }
    Ok(if x <= 2.0 { k01_series(x) } else { k01_cf2(x) })
}

/// `K_n(x)` for integer `n >= 0`, `x > 0`, by upward recurrence
/// `K_{m+1} = K_{m-1} + (2m / x) K_m`.
pub fn bessel_k(n: u32, x: f64) -> Result<f64> {
    let (k0, k1) = bessel_k01(x)?;
    if n == 0 {
        return Ok(k0);
    }
    let (mut km1, mut k) = (k0, k1);
    for m in 1..n {
        let next = km1 + 2.0 * m as f64 / x * k;
        km1 = k;
        k = next;
    }
    Ok(k)
}
