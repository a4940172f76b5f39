//! Energy beamformer designs.
//!
//! Every design lives in the one-parameter family
//! `w(x) = x u_par + sqrt(1 - x^2) u_perp` spanned by the projections of
//! `h2*` onto `h1*` and its orthogonal complement, so `g1 = a^2 x^2` and
//! `g2 = (b x + c sqrt(1 - x^2))^2`. The strategies differ only in how they
//! pick `x` and `tau`:
//!
//! * `exact`: grid search over `(x, tau)` on the exact throughput followed by
//!   golden-section refinement.
//! * `suboptimal`: maximize the min-form SNR bound over `x` in closed form,
//!   then take the Lambert-W time split.
//! * `large-n`: the closed form obtained when `h1` and `h2` are treated as
//!   orthogonal.
//! * `mrt-user`: all energy toward the user.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::channel::{
    build_beamformer, decompose, norm_sqr, normalize, ChannelDecomposition, ChannelState,
    SystemParams,
};
use crate::search::golden_max;
use crate::sysmodel::{rate, snr_from_gains, LinkGains};
use crate::timesplit::{optimal_tau, search_tau, TAU_MARGIN};
use crate::{Error, Result};

/// Relative width of the band around `K = 0` treated as the zero scenario.
pub const K_ZERO_BAND: f64 = 1e-9;

/// Time split at which the `tau`-free coefficients are read off; any value in
/// `(0, 1)` gives the same `A`, `C`, `D`.
const REFERENCE_TAU: f64 = 0.5;

const REFINE_TOL: f64 = 1e-6;
const MRT_TAU_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    ExactSearch,
    Suboptimal,
    LargeN,
    MrtUser,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Self::ExactSearch,
        Self::Suboptimal,
        Self::LargeN,
        Self::MrtUser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ExactSearch => "exact",
            Self::Suboptimal => "suboptimal",
            Self::LargeN => "large-n",
            Self::MrtUser => "mrt-user",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or(Error::InvalidParam {
                name: "strategy",
                reason: "expected one of exact, suboptimal, large-n, mrt-user",
            })
    }
}

/// Sign of `K = A a^2 + D (b^2 - c^2)`, which decides the shape of the
/// relay-limited branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KScenario {
    KZero,
    KPos,
    KNeg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XbarSolution {
    pub x_bar: f64,
    /// `min(f1, f3)` evaluated at `x_bar`.
    pub gamma_max: f64,
    /// The branch formula's own value, kept as a cross-check.
    pub formula_gamma: f64,
    /// `None` when `c = 0` and no search was needed.
    pub scenario: Option<KScenario>,
    pub case_index: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerDesign {
    pub strategy: Strategy,
    pub x_bar: f64,
    pub w: Vec<Complex64>,
    pub gamma_max: f64,
    pub tau: f64,
    pub scenario: Option<KScenario>,
    pub case_index: Option<u8>,
}

/// Grid resolution of the exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchGrid {
    pub n_x: usize,
    pub n_tau: usize,
}

impl SearchGrid {
    pub const MIN: usize = 64;
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            n_x: 256,
            n_tau: 256,
        }
    }
}

/// `f1(x) = (A + C) a^2 x^2`: the user-limited branch.
pub fn f1(d: &ChannelDecomposition, x: f64) -> f64 {
    (d.cap_a + d.cap_c) * d.a * d.a * x * x
}

/// `f3(x) = A a^2 x^2 + D (b x + c sqrt(1 - x^2))^2`: the relay-limited
/// branch.
pub fn f3(d: &ChannelDecomposition, x: f64) -> f64 {
    let y = (1.0 - x * x).max(0.0).sqrt();
    let g2 = d.b * x + d.c * y;
    d.cap_a * d.a * d.a * x * x + d.cap_d * g2 * g2
}

/// `min(f1, f3)`, the `tau`-free part of the SNR bound.
pub fn bound_objective(d: &ChannelDecomposition, x: f64) -> f64 {
    f1(d, x).min(f3(d, x))
}

/// Maximizer of [`bound_objective`] over `x in [0, 1]`.
///
/// With `K = A a^2 + D (b^2 - c^2)` the relay branch peaks at
/// `x^2 = 1/2 + K / (2 sqrt(K^2 + 4 (D b c)^2))`. The optimum is `x = 1` when
/// the user branch stays below `f3(1)`, the peak of `f3` when the user branch
/// is already above it there, and the crossing `f1 = f3` otherwise.
pub fn solve_suboptimal_xbar(d: &ChannelDecomposition) -> XbarSolution {
    let (a, b, c) = (d.a, d.b, d.c);
    let (cap_a, cap_c, cap_d) = (d.cap_a, d.cap_c, d.cap_d);
    let user = (cap_a + cap_c) * a * a;

    if !(c > 0.0) || !(cap_d > 0.0) {
        let formula = user.min(cap_a * a * a + cap_d * b * b);
        return XbarSolution {
            x_bar: 1.0,
            gamma_max: bound_objective(d, 1.0),
            formula_gamma: formula,
            scenario: None,
            case_index: None,
        };
    }

    let dbc = cap_d * b * c;
    let k = cap_a * a * a + cap_d * (b * b - c * c);
    let scenario = if k.abs() <= K_ZERO_BAND * dbc {
        KScenario::KZero
    } else if k > 0.0 {
        KScenario::KPos
    } else {
        KScenario::KNeg
    };

    let r = k.hypot(2.0 * dbc);
    // K + r and x_hat^2 written without cancellation when K < 0
    let k_plus_r = if k >= 0.0 {
        k + r
    } else {
        4.0 * dbc * dbc / (r - k)
    };
    let x_hat_sq = if r > 0.0 { k_plus_r / (2.0 * r) } else { 1.0 };
    let f3_peak = 0.5 * k_plus_r + cap_d * c * c;
    let f3_at_one = cap_a * a * a + cap_d * b * b;

    let (x_sq, formula, case) = if user <= f3_at_one {
        (1.0, user, 1)
    } else if user * x_hat_sq >= f3_peak {
        (x_hat_sq, f3_peak, 3)
    } else {
        let gap = a * cap_c.sqrt() - b * cap_d.sqrt();
        let x_sq = cap_d * c * c / (gap * gap + cap_d * c * c);
        (x_sq, user * x_sq, 2)
    };
    let x_bar = x_sq.clamp(0.0, 1.0).sqrt();
    XbarSolution {
        x_bar,
        gamma_max: bound_objective(d, x_bar),
        formula_gamma: formula,
        scenario: Some(scenario),
        case_index: Some(case),
    }
}

fn gains_at(d: &ChannelDecomposition, h1_sq: f64, h2_sq: f64, h3_sq: f64, x: f64) -> LinkGains {
    let y = (1.0 - x * x).max(0.0).sqrt();
    let g2 = d.b * x + d.c * y;
    LinkGains {
        h1_sq,
        h2_sq,
        h3_sq,
        g1: d.a * d.a * x * x,
        g2: g2 * g2,
    }
}

/// Exact throughput of the family member `x` at time split `tau`.
struct FamilyObjective<'a> {
    params: &'a SystemParams,
    decomp: ChannelDecomposition,
    norms: (f64, f64, f64),
}

impl<'a> FamilyObjective<'a> {
    fn new(params: &'a SystemParams, ch: &ChannelState) -> Result<Self> {
        let decomp = decompose(params, ch, REFERENCE_TAU)?;
        let norms = (norm_sqr(&ch.h1), norm_sqr(&ch.h2), ch.h3.norm_sqr());
        Ok(Self {
            params,
            decomp,
            norms,
        })
    }

    fn eval(&self, x: f64, tau: f64) -> f64 {
        let (n1, n2, n3) = self.norms;
        let gains = gains_at(&self.decomp, n1, n2, n3, x);
        match snr_from_gains(self.params, &gains, tau) {
            Ok(s) => rate(tau, s.gamma_total),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn gamma(&self, x: f64, tau: f64) -> f64 {
        let (n1, n2, n3) = self.norms;
        let gains = gains_at(&self.decomp, n1, n2, n3, x);
        snr_from_gains(self.params, &gains, tau).map_or(0.0, |s| s.gamma_total)
    }
}

/// Two-dimensional search of the exact throughput over `(x, tau)`.
///
/// The grid is `x_i = i / (n_x - 1)` by `tau_j = (j + 1/2) / n_tau`, scanned
/// in index order with strict improvement so ties go to the smaller `x`.
/// The best cell is then refined by alternating golden-section passes in
/// each coordinate, keeping a step only when it improves the objective.
pub fn solve_exact(
    params: &SystemParams,
    ch: &ChannelState,
    grid: SearchGrid,
) -> Result<BeamformerDesign> {
    if grid.n_x < SearchGrid::MIN || grid.n_tau < SearchGrid::MIN {
        return Err(Error::InvalidParam {
            name: "grid",
            reason: "each grid dimension needs at least 64 points",
        });
    }
    let obj = FamilyObjective::new(params, ch)?;
    let single_direction = !(obj.decomp.c > 0.0);

    let xs: Vec<f64> = if single_direction {
        alloc::vec![1.0]
    } else {
        (0..grid.n_x)
            .map(|i| i as f64 / (grid.n_x - 1) as f64)
            .collect()
    };
    let mut best = (1.0, 0.5, f64::NEG_INFINITY);
    for &x in &xs {
        for j in 0..grid.n_tau {
            let tau = (j as f64 + 0.5) / grid.n_tau as f64;
            let v = obj.eval(x, tau);
            if v > best.2 {
                best = (x, tau, v);
            }
        }
    }

    let (mut x, mut tau, mut value) = best;
    let dx = if single_direction {
        0.0
    } else {
        1.0 / (grid.n_x - 1) as f64
    };
    let dt = 1.0 / grid.n_tau as f64;
    for _ in 0..8 {
        let before = value;
        if dx > 0.0 {
            let (xn, vn) = golden_max(
                |xx| obj.eval(xx, tau),
                (x - dx).max(0.0),
                (x + dx).min(1.0),
                REFINE_TOL,
            );
            if vn > value {
                x = xn;
                value = vn;
            }
        }
        let lo = (tau - dt).max(TAU_MARGIN);
        let hi = (tau + dt).min(1.0 - TAU_MARGIN);
        let (tn, vn) = golden_max(|t| obj.eval(x, t), lo, hi, REFINE_TOL);
        if vn > value {
            tau = tn;
            value = vn;
        }
        if value - before <= 1e-12 * value.abs() {
            break;
        }
    }

    Ok(BeamformerDesign {
        strategy: Strategy::ExactSearch,
        x_bar: x,
        w: build_beamformer(ch, x)?,
        gamma_max: obj.gamma(x, tau),
        tau,
        scenario: None,
        case_index: None,
    })
}

fn kappa(params: &SystemParams, gamma_max: f64) -> Result<f64> {
    let k = 2.0 * params.eta() * params.rho() * gamma_max;
    if k > 0.0 && k.is_finite() {
        Ok(k)
    } else {
        Err(Error::DegenerateChannel)
    }
}

/// Closed-form beamformer followed by the Lambert-W time split.
pub fn solve_suboptimal(params: &SystemParams, ch: &ChannelState) -> Result<BeamformerDesign> {
    let d = decompose(params, ch, REFERENCE_TAU)?;
    let sol = solve_suboptimal_xbar(&d);
    let split = optimal_tau(kappa(params, sol.gamma_max)?)?;
    Ok(BeamformerDesign {
        strategy: Strategy::Suboptimal,
        x_bar: sol.x_bar,
        w: build_beamformer(ch, sol.x_bar)?,
        gamma_max: sol.gamma_max,
        tau: split.tau,
        scenario: sol.scenario,
        case_index: sol.case_index,
    })
}

/// Design that treats `h1` and `h2` as orthogonal, which they become as the
/// antenna count grows.
///
/// If the direct link alone already beats the relay branch
/// (`A ||h1||^2 >= D ||h2||^2`) all energy goes to the user; otherwise `x` is
/// set where the user and relay branches meet.
pub fn solve_large_n(params: &SystemParams, ch: &ChannelState) -> Result<BeamformerDesign> {
    let d = decompose(params, ch, REFERENCE_TAU)?;
    let h1_sq = d.a * d.a;
    let h2_sq = norm_sqr(&ch.h2);
    let direct = d.cap_a * h1_sq;
    let relay = d.cap_d * h2_sq;

    let (x_bar, gamma_max) = if direct >= relay || h2_sq == 0.0 {
        (1.0, direct)
    } else {
        let user = d.cap_c * h1_sq;
        let x_sq = relay / (user + relay);
        (
            x_sq.sqrt(),
            (d.cap_a + d.cap_c) * h1_sq * relay / (user + relay),
        )
    };

    let y = (1.0 - x_bar * x_bar).max(0.0).sqrt();
    let n1 = d.a;
    let n2 = h2_sq.sqrt();
    let w: Vec<Complex64> = if y == 0.0 {
        ch.h1.iter().map(|h| h.conj() / n1).collect()
    } else {
        ch.h1
            .iter()
            .zip(&ch.h2)
            .map(|(p, q)| p.conj() * (x_bar / n1) + q.conj() * (y / n2))
            .collect()
    };
    let split = optimal_tau(kappa(params, gamma_max)?)?;
    Ok(BeamformerDesign {
        strategy: Strategy::LargeN,
        x_bar,
        w: normalize(w),
        gamma_max,
        tau: split.tau,
        scenario: None,
        case_index: None,
    })
}

/// `w = h1* / ||h1||`. With `tau = None` the time split maximizes the exact
/// throughput by golden-section search.
pub fn solve_mrt_user(
    params: &SystemParams,
    ch: &ChannelState,
    tau: Option<f64>,
) -> Result<BeamformerDesign> {
    let obj = FamilyObjective::new(params, ch)?;
    let d = obj.decomp;
    let tau = match tau {
        Some(t) => {
            crate::channel::check_tau(t)?;
            t
        }
        None => search_tau(|t| obj.eval(1.0, t), MRT_TAU_TOL)?.tau,
    };
    let a = d.a;
    let w = ch.h1.iter().map(|h| h.conj() / a).collect();
    Ok(BeamformerDesign {
        strategy: Strategy::MrtUser,
        x_bar: 1.0,
        w,
        gamma_max: bound_objective(&d, 1.0),
        tau,
        scenario: None,
        case_index: None,
    })
}

/// Dispatches to the solver for `strategy`. `mrt_tau` fixes the time split
/// of the MRT design; other strategies choose their own.
pub fn solve(
    strategy: Strategy,
    params: &SystemParams,
    ch: &ChannelState,
    grid: SearchGrid,
    mrt_tau: Option<f64>,
) -> Result<BeamformerDesign> {
    match strategy {
        Strategy::ExactSearch => solve_exact(params, ch, grid),
        Strategy::Suboptimal => solve_suboptimal(params, ch),
        Strategy::LargeN => solve_large_n(params, ch),
        Strategy::MrtUser => solve_mrt_user(params, ch, mrt_tau),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dot_t, sample_channel, Scenario};
    use crate::sysmodel::throughput;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize, ps_dbm: f64) -> SystemParams {
        Scenario {
            n_antennas: n,
            ps_dbm,
            ..Scenario::default()
        }
        .build()
        .unwrap()
    }

    fn decomp(a: f64, b: f64, c: f64, cap_a: f64, cap_c: f64, cap_d: f64) -> ChannelDecomposition {
        ChannelDecomposition {
            a,
            b,
            c,
            cap_a,
            cap_c,
            cap_d,
            tau: 0.5,
            a0: 0.0,
            b0: 0.0,
            c0: 0.0,
            d0: 0.0,
            a1: 0.0,
            b1: 0.0,
            c1: 0.0,
        }
    }

    /// Uniform grid argmax of `min(f1, f3)`, then a ternary search over the
    /// two neighbouring cells so a kink between grid points is resolved.
    fn grid_max(d: &ChannelDecomposition, n: usize) -> f64 {
        let h = 1.0 / (n - 1) as f64;
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for i in 0..n {
            let v = bound_objective(d, i as f64 * h);
            if v > best {
                best_i = i;
                best = v;
            }
        }
        let mut lo = (best_i as f64 - 1.0).max(0.0) * h;
        let mut hi = ((best_i + 1) as f64 * h).min(1.0);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if bound_objective(d, m1) < bound_objective(d, m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best.max(bound_objective(d, 0.5 * (lo + hi)))
    }

    fn design_rate(p: &SystemParams, ch: &ChannelState, d: &BeamformerDesign) -> f64 {
        throughput(p, ch, &d.w, d.tau).unwrap()
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("mrt".parse::<Strategy>().is_err());
    }

    #[test]
    fn zero_scenario_first_branch() {
        // b = c = 1 so K = A a^2; pick A = 0 for K = 0, then (A + C) a^2 <= D c^2
        let d = decomp(1.0, 1.0, 1.0, 0.0, 0.5, 1.0);
        let s = solve_suboptimal_xbar(&d);
        assert_eq!(s.scenario, Some(KScenario::KZero));
        assert_eq!(s.case_index, Some(1));
        assert_eq!(s.x_bar, 1.0);
        assert!((s.gamma_max - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_scenario_third_branch() {
        // K = A a^2 + D (b^2 - c^2) = 0 with a = 1, b = 0.5, c = 1, D = 1, A = 0.75
        let (b, c, cap_d) = (0.5, 1.0, 1.0);
        let cap_a = cap_d * (c * c - b * b);
        let cap_c = 10.0; // (A + C) a^2 well above 2 (bc + c^2) D
        let d = decomp(1.0, b, c, cap_a, cap_c, cap_d);
        let s = solve_suboptimal_xbar(&d);
        assert_eq!(s.scenario, Some(KScenario::KZero));
        assert_eq!(s.case_index, Some(3));
        assert!((s.x_bar - 0.5f64.sqrt()).abs() < 1e-12);
        let want = (b * c + c * c) * cap_d;
        assert!((s.gamma_max - want).abs() < 1e-12 * want);
        assert!((s.formula_gamma - want).abs() < 1e-12 * want);
    }

    #[test]
    fn middle_branch_is_the_crossing() {
        let d = decomp(1.2, 0.4, 0.9, 0.3, 0.6, 0.8);
        let s = solve_suboptimal_xbar(&d);
        assert_eq!(s.case_index, Some(2));
        assert!((f1(&d, s.x_bar) - f3(&d, s.x_bar)).abs() < 1e-12);
        assert!(((s.gamma_max - s.formula_gamma) / s.gamma_max).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = [0usize; 3];
        for _ in 0..2000 {
            let a: f64 = rng.random_range(0.1..4.0);
            let b: f64 = rng.random_range(0.0..3.0);
            let c: f64 = rng.random_range(0.01..3.0);
            let d = decomp(
                a,
                b,
                c,
                rng.random_range(0.01..2.0),
                rng.random_range(0.01..2.0),
                rng.random_range(0.01..2.0),
            );
            let s = solve_suboptimal_xbar(&d);
            let g = grid_max(&d, 100_001);
            assert!(s.gamma_max >= g * (1.0 - 1e-12));
            assert!(
                (s.gamma_max - g) / s.gamma_max <= 1e-5,
                "{d:?}: {} vs {g}",
                s.gamma_max
            );
            assert!(((s.gamma_max - s.formula_gamma) / s.gamma_max).abs() < 1e-9);
            seen[s.case_index.unwrap() as usize - 1] += 1;
        }
        assert!(seen.iter().all(|&k| k > 0), "{seen:?}");
    }

    #[test]
    fn relay_peak_is_stationary() {
        let d = decomp(1.0, 0.7, 1.3, 0.4, 5.0, 0.9);
        let k = d.cap_a * d.a * d.a + d.cap_d * (d.b * d.b - d.c * d.c);
        let dbc = d.cap_d * d.b * d.c;
        let x_hat = (0.5 + k / (2.0 * k.hypot(2.0 * dbc))).sqrt();
        let h = 1e-6;
        let deriv = (f3(&d, x_hat + h) - f3(&d, x_hat - h)) / (2.0 * h);
        assert!(deriv.abs() < 1e-8, "{deriv}");
    }

    #[test]
    fn branch_formulas_meet_at_boundaries() {
        // boundary between branches 1 and 2: (A + C) a^2 = A a^2 + D b^2
        let (a, b, c, cap_a, cap_d) = (1.0, 0.8, 0.6, 0.5, 1.0);
        let cap_c = cap_d * b * b / (a * a);
        let d = decomp(a, b, c, cap_a, cap_c, cap_d);
        let user = (cap_a + cap_c) * a * a;
        let gap = a * cap_c.sqrt() - b * cap_d.sqrt();
        let crossing = user * cap_d * c * c / (gap * gap + cap_d * c * c);
        assert!(((user - crossing) / user).abs() < 1e-6);
        assert!(((solve_suboptimal_xbar(&d).gamma_max - user) / user).abs() < 1e-6);

        // boundary between branches 2 and 3: (A + C) a^2 x_hat^2 = f3(x_hat)
        let (a, b, c, cap_a, cap_d) = (1.0, 0.8, 0.6, 0.5, 1.0);
        let k = cap_a * a * a + cap_d * (b * b - c * c);
        let dbc = cap_d * b * c;
        let r = k.hypot(2.0 * dbc);
        let x_hat_sq = 0.5 + k / (2.0 * r);
        let peak = 0.5 * (k + r) + cap_d * c * c;
        let cap_c = peak / (x_hat_sq * a * a) - cap_a;
        let d = decomp(a, b, c, cap_a, cap_c, cap_d);
        let user = (cap_a + cap_c) * a * a;
        let gap = a * cap_c.sqrt() - b * cap_d.sqrt();
        let crossing = user * cap_d * c * c / (gap * gap + cap_d * c * c);
        assert!(((peak - crossing) / peak).abs() < 1e-6);
        assert!(((solve_suboptimal_xbar(&d).gamma_max - peak) / peak).abs() < 1e-6);
    }

    #[test]
    fn collinear_channels_force_full_user_share() {
        let p = params(3, 30.0);
        let h1 = vec![c(0.5, 0.1), c(-0.2, 0.7), c(0.3, 0.3)];
        let h2: Vec<Complex64> = h1.iter().map(|z| z * c(0.0, 1.5)).collect();
        let ch = ChannelState::new(h1, h2, c(0.4, -0.8)).unwrap();
        let e = solve_exact(&p, &ch, SearchGrid::default()).unwrap();
        assert_eq!(e.x_bar, 1.0);
        let s = solve_suboptimal(&p, &ch).unwrap();
        assert_eq!(s.x_bar, 1.0);
        assert!(s.tau > 0.0 && s.tau < 1.0);
        let g1 = dot_t(&ch.h1, &s.w).norm_sqr();
        assert!((g1 - norm_sqr(&ch.h1)).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_runs_every_strategy() {
        let p = params(1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = sample_channel(&p, &mut rng);
        for s in Strategy::ALL {
            let d = solve(s, &p, &ch, SearchGrid::default(), None).unwrap();
            assert!(d.tau > 0.0 && d.tau < 1.0);
            assert!((norm_sqr(&d.w) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_dominates_suboptimal_and_mrt() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &(n, ps) in &[(2, 20.0), (4, 0.0), (10, -10.0)] {
            let p = params(n, ps);
            for _ in 0..30 {
                let ch = sample_channel(&p, &mut rng);
                let e = design_rate(
                    &p,
                    &ch,
                    &solve_exact(&p, &ch, SearchGrid::default()).unwrap(),
                );
                let s = design_rate(&p, &ch, &solve_suboptimal(&p, &ch).unwrap());
                let m = design_rate(&p, &ch, &solve_mrt_user(&p, &ch, None).unwrap());
                assert!(e >= s - 1e-4, "exact {e} suboptimal {s}");
                assert!(e >= m - 1e-4, "exact {e} mrt {m}");
            }
        }
    }

    #[test]
    fn exact_matches_dense_brute_force() {
        let p = params(2, 30.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let ch = sample_channel(&p, &mut rng);
        let e = solve_exact(&p, &ch, SearchGrid::default()).unwrap();
        let obj = FamilyObjective::new(&p, &ch).unwrap();
        let got = obj.eval(e.x_bar, e.tau);

        // 1024 x 1024 scan, then a fine local scan around its best cell
        let n = 1024;
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 0..n {
            let x = i as f64 / (n - 1) as f64;
            for j in 0..n {
                let t = (j as f64 + 0.5) / n as f64;
                let v = obj.eval(x, t);
                if v > best.2 {
                    best = (x, t, v);
                }
            }
        }
        let (bx, bt, mut bv) = best;
        for i in 0..=200 {
            let x = (bx - 1.0 / n as f64 + i as f64 * 1e-5).clamp(0.0, 1.0);
            for j in 0..=200 {
                let t = (bt - 1.0 / n as f64 + j as f64 * 1e-5).clamp(1e-9, 1.0 - 1e-9);
                bv = bv.max(obj.eval(x, t));
            }
        }
        assert!(((got - bv) / bv).abs() < 1e-4, "{got} vs {bv}");
    }

    #[test]
    fn large_n_orthogonal_meets_at_intersection() {
        let p = params(2, 30.0);
        let h1 = vec![c(0.3, 0.0), c(0.0, 0.0)];
        let h2 = vec![c(0.0, 0.0), c(1.5, 0.0)];
        let ch = ChannelState::new(h1, h2, c(1.0, 0.0)).unwrap();
        let d = solve_large_n(&p, &ch).unwrap();
        let dec = decompose(&p, &ch, 0.5).unwrap();
        assert!(dec.cap_a * 0.09 < dec.cap_d * 2.25);
        let x = d.x_bar;
        let user = f1(&dec, x);
        let relay = f3(&dec, x);
        assert!(((user - relay) / user).abs() < 1e-12);
        assert!(((d.gamma_max - user) / user).abs() < 1e-12);
        assert!((norm_sqr(&d.w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_n_strong_direct_link_is_mrt() {
        let p = Scenario {
            n_antennas: 3,
            d1: 5.0,
            d2: 40.0,
            ..Scenario::default()
        }
        .build()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = sample_channel(&p, &mut rng);
        let l = solve_large_n(&p, &ch).unwrap();
        let m = solve_mrt_user(&p, &ch, Some(0.5)).unwrap();
        assert_eq!(l.x_bar, 1.0);
        for (x, y) in l.w.iter().zip(&m.w) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn large_n_close_to_exact_at_64_antennas() {
        let p = params(64, 30.0);
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        for _ in 0..5 {
            let ch = sample_channel(&p, &mut rng);
            let e = design_rate(
                &p,
                &ch,
                &solve_exact(&p, &ch, SearchGrid::default()).unwrap(),
            );
            let l = design_rate(&p, &ch, &solve_large_n(&p, &ch).unwrap());
            assert!(l >= 0.98 * e, "large-n {l} exact {e}");
        }
    }

    #[test]
    fn mrt_identity_and_fixed_tau() {
        let p = params(6, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ch = sample_channel(&p, &mut rng);
        let d = solve_mrt_user(&p, &ch, Some(0.25)).unwrap();
        assert_eq!(d.tau, 0.25);
        let g1 = dot_t(&ch.h1, &d.w).norm_sqr();
        assert!((g1 - norm_sqr(&ch.h1)).abs() < 1e-12);
        assert!(solve_mrt_user(&p, &ch, Some(1.0)).is_err());
    }

    #[test]
    fn small_grid_rejected() {
        let p = params(2, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ch = sample_channel(&p, &mut rng);
        assert!(solve_exact(
            &p,
            &ch,
            SearchGrid {
                n_x: 32,
                n_tau: 256
            }
        )
        .is_err());
    }
}
