//! Special functions and quadrature needed by the analytic layer.
//!
//! Everything here is pure and allocation-free except the adaptive
//! integrator, which keeps its interval list on the heap.

mod bessel;
mod gamma;
mod incgamma;
mod quad;

pub use bessel::{bessel_k, bessel_k01};
pub use gamma::{digamma, gamma_fn, ln_gamma, EULER_GAMMA};
pub use incgamma::{
    exp_integral_e1, regularized_lower, regularized_upper, upper_gamma_int_orders,
    upper_incomplete_gamma,
};
pub use quad::{integrate, integrate_semi_infinite, integrate_with_error, QuadratureSpec};
