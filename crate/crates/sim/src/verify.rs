//! Cross-check suite: closed forms against brute force, analytic results
//! against simulation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use wprelay_core::analysis::{
    branch_cdfs, branch_moments, outage_exact, outage_high_snr, throughput_lower_bound_with,
    BranchCoefficients, BranchSnrs, M4Rule,
};
use wprelay_core::beamform::{
    bound_objective, solve_exact, solve_suboptimal, solve_suboptimal_xbar, SearchGrid,
};
use wprelay_core::channel::{
    decompose, sample_channel, ChannelDecomposition, Scenario, SystemParams,
};
use wprelay_core::sysmodel::throughput;
use wprelay_core::timesplit::{optimal_tau, search_tau, upper_bound_rate};

use crate::error::SimError;
use crate::montecarlo::{mean_and_std_err, trial_rng, Engine, Scheme, TauMode};
use wprelay_core::beamform::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(SimError::Config(format!(
                "level must be quick or full, got `{s}`"
            ))),
        }
    }
}

impl Level {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Self::Quick => quick,
            Self::Full => full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    /// Measured deviation, in the units of `tolerance`.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One tab-separated line per check:
    /// `status name deviation tolerance detail`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("status\tcheck\tdeviation\ttolerance\tdetail\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{}\t{}\t{:e}\t{:e}\t{}\n",
                c.status, c.name, c.deviation, c.tolerance, c.detail
            ));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub level: Level,
    /// Replace the fourth bound constant by a thousand times its value.
    pub corrupt_m4: bool,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            level: Level::Quick,
            corrupt_m4: false,
            seed: 7,
            workers: None,
        }
    }
}

const TAU: f64 = 0.5;

fn result(name: &'static str, deviation: f64, tolerance: f64, detail: String) -> CheckResult {
    let status = if deviation <= tolerance {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult {
        name,
        status,
        deviation,
        tolerance,
        detail,
    }
}

fn skipped(name: &'static str, detail: &str) -> CheckResult {
    CheckResult {
        name,
        status: Status::Skip,
        deviation: 0.0,
        tolerance: 0.0,
        detail: detail.to_string(),
    }
}

/// Runs every check on `scenario`. Analytic checks need two or more antennas
/// and are skipped otherwise.
pub fn verify(scenario: &Scenario, opts: &VerifyOptions) -> Result<VerifyReport, SimError> {
    let params = scenario.build()?;
    let engine = Engine::new(opts.workers)?;
    let lvl = opts.level;
    let mut checks = vec![
        closed_form_vs_grid(&params, lvl.pick(300, 3000), opts.seed),
        lambert_vs_search(),
        exact_dominates_suboptimal(&params, lvl.pick(20, 200), opts.seed)?,
    ];
    const NEEDS_TWO: &str = "analytic results need at least two antennas";
    if params.n_antennas() < 2 {
        for name in [
            "outage_vs_monte_carlo",
            "diversity_slope",
            "throughput_bound",
            "branch_cdfs",
            "branch_moments",
        ] {
            checks.push(skipped(name, NEEDS_TWO));
        }
        return Ok(VerifyReport { checks });
    }
    checks.push(outage_vs_monte_carlo(
        &engine,
        scenario,
        lvl.pick(200_000, 1_000_000),
        opts.seed,
    )?);
    checks.push(diversity_slope(scenario)?);
    checks.push(throughput_bound(
        &engine,
        &params,
        opts,
        lvl.pick((20_000, 200_000), (100_000, 1_000_000)),
    )?);
    let samples =
        engine.sample_branch_snrs(&params, TAU, lvl.pick(100_000, 1_000_000), opts.seed)?;
    checks.push(branch_cdf_check(&params, &samples)?);
    checks.push(branch_moment_check(&params, &samples)?);
    Ok(VerifyReport { checks })
}

/// Largest value of `min(f1, f3)` on a uniform grid of `n` points, refined
/// by ternary search between the neighbours of the best grid point. The
/// objective has kinks where the branches cross, which a grid alone only
/// resolves to `O(1/n)`.
pub fn grid_peak(d: &ChannelDecomposition, n: usize) -> f64 {
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

/// Random decompositions with the user-branch weight rescaled over four
/// decades so that both signs of the branch discriminant occur.
fn closed_form_vs_grid(params: &SystemParams, n: u64, seed: u64) -> CheckResult {
    let worst = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let ch = sample_channel(params, &mut rng);
            let Ok(mut d) = decompose(params, &ch, TAU) else {
                return 0.0;
            };
            let u = ((t as f64 + 0.5) / n as f64) * 4.0 - 2.0;
            d.cap_a *= 10f64.powf(u);
            let want = grid_peak(&d, 10_000);
            let got = solve_suboptimal_xbar(&d).gamma_max;
            ((got - want) / want).abs()
        })
        .reduce(|| 0.0, f64::max);
    result(
        "closed_form_vs_grid",
        worst,
        1e-5,
        format!("{n} instances, worst relative error"),
    )
}

fn lambert_vs_search() -> CheckResult {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let kappa = 10f64.powf(-3.0 + 11.0 * i as f64 / 99.0);
        let dev = match (
            optimal_tau(kappa),
            search_tau(|t| upper_bound_rate(kappa, t), 1e-10),
        ) {
            (Ok(a), Ok(b)) => (a.tau - b.tau).abs(),
            _ => f64::INFINITY,
        };
        worst = worst.max(dev);
    }
    result(
        "lambert_vs_search",
        worst,
        1e-6,
        "100 log-spaced kappa in [1e-3, 1e8]".into(),
    )
}

fn exact_dominates_suboptimal(
    params: &SystemParams,
    n: u64,
    seed: u64,
) -> Result<CheckResult, SimError> {
    let shortfalls: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|t| -> Result<f64, SimError> {
            let ch = sample_channel(params, &mut trial_rng(seed ^ 0x5eed, t));
            let ex = solve_exact(params, &ch, SearchGrid::default())?;
            let sub = solve_suboptimal(params, &ch)?;
            Ok(throughput(params, &ch, &sub.w, sub.tau)? - throughput(params, &ch, &ex.w, ex.tau)?)
        })
        .collect::<Result<_, _>>()?;
    let worst = shortfalls
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(result(
        "exact_dominates_suboptimal",
        worst,
        1e-4,
        format!("{n} channels, largest suboptimal excess in bits/s/Hz"),
    ))
}

/// Scenario moved to the power at which the high-SNR outage is `target`.
fn at_outage_level(scenario: &Scenario, target: f64) -> Result<Scenario, SimError> {
    let params = scenario.build()?;
    let p = outage_high_snr(&params, TAU)?;
    let n = params.n_antennas() as f64;
    Ok(Scenario {
        ps_dbm: scenario.ps_dbm + 20.0 / (n + 1.0) * (p / target).log10(),
        ..*scenario
    })
}

fn outage_vs_monte_carlo(
    engine: &Engine,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<CheckResult, SimError> {
    let s = at_outage_level(scenario, 1e-2)?;
    let params = s.build()?;
    let exact = outage_exact(&params, TAU)?;
    let mc = engine
        .run(
            &params,
            Scheme::Relay(Strategy::MrtUser),
            TauMode::Fixed(TAU),
            trials,
            seed,
        )?
        .outage;
    let z = (exact - mc.value).abs() / mc.std_err;
    Ok(result(
        "outage_vs_monte_carlo",
        z,
        3.0,
        format!(
            "Ps {:.2} dBm: exact {exact:.6e}, Monte Carlo {:.6e} over {} trials; deviation in standard errors",
            s.ps_dbm, mc.value, mc.n_trials
        ),
    ))
}

/// Log-log slope of the exact outage over one decade of SNR where the
/// high-SNR form sits near `1e-4`, for two and three antennas.
fn diversity_slope(scenario: &Scenario) -> Result<CheckResult, SimError> {
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for n in [2usize, 3] {
        let lo = at_outage_level(
            &Scenario {
                n_antennas: n,
                ..*scenario
            },
            1e-4,
        )?;
        let hi = Scenario {
            ps_dbm: lo.ps_dbm + 10.0,
            ..lo
        };
        let p_lo = outage_exact(&lo.build()?, TAU)?;
        let p_hi = outage_exact(&hi.build()?, TAU)?;
        let slope = (p_hi / p_lo).log10();
        let want = -(n as f64 + 1.0) / 2.0;
        worst = worst.max(((slope - want) / want).abs());
        detail.push(format!("N={n} slope {slope:.4} vs {want}"));
    }
    Ok(result("diversity_slope", worst, 0.1, detail.join(", ")))
}

fn throughput_bound(
    engine: &Engine,
    params: &SystemParams,
    opts: &VerifyOptions,
    (rate_trials, moment_trials): (u64, u64),
) -> Result<CheckResult, SimError> {
    let coeffs = BranchCoefficients::new(params, TAU)?;
    let m4 = if opts.corrupt_m4 {
        M4Rule::Fixed(1000.0 * M4Rule::FirstMoment.value(&coeffs))
    } else {
        M4Rule::FirstMoment
    };
    let m4_value = m4.value(&coeffs);
    let bound = throughput_lower_bound_with(params, TAU, m4)?;
    let mc = engine
        .run(
            params,
            Scheme::Relay(Strategy::MrtUser),
            TauMode::Fixed(TAU),
            rate_trials,
            opts.seed,
        )?
        .throughput;
    let ur: Vec<f64> = engine
        .sample_branch_snrs(params, TAU, moment_trials, opts.seed ^ 0xface)?
        .iter()
        .map(|b| b.ur)
        .collect();
    let (mean_ur, se_ur) = mean_and_std_err(&ur);
    let z = (m4_value - mean_ur).abs() / se_ur;
    // a bound above the simulated mean fails regardless of the moment match
    let deviation = if bound <= mc.value { z } else { f64::INFINITY };
    Ok(result(
        "throughput_bound",
        deviation,
        3.0,
        format!(
            "bound {bound:.6} vs Monte Carlo {:.6}; m4 {m4_value:.6e} vs simulated mean {mean_ur:.6e} (deviation in standard errors)",
            mc.value
        ),
    ))
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
pub fn ks_statistic<F>(mut sample: Vec<f64>, cdf: F) -> Result<f64, SimError>
where
    F: Fn(f64) -> wprelay_core::Result<f64> + Sync,
{
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let d = sample
        .par_iter()
        .enumerate()
        .map(|(i, &x)| -> Result<f64, SimError> {
            let f = cdf(x)?;
            Ok((f - i as f64 / n).max((i + 1) as f64 / n - f))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(d)
}

fn branch_cdf_check(
    params: &SystemParams,
    samples: &[BranchSnrs],
) -> Result<CheckResult, SimError> {
    let cdfs = branch_cdfs(params, TAU)?;
    let pick = |f: fn(&BranchSnrs) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    let ks = [
        ks_statistic(pick(|b| b.us), |x| cdfs.us(x))?,
        ks_statistic(pick(|b| b.ur), |x| cdfs.ur(x))?,
        ks_statistic(pick(|b| b.rs), |x| cdfs.rs(x))?,
    ];
    let n = samples.len() as f64;
    // 0.1% critical value of the one-sample KS test, floored at 0.005
    let tol = (1.95 / n.sqrt()).max(0.005);
    Ok(result(
        "branch_cdfs",
        ks.iter().copied().fold(0.0, f64::max),
        tol,
        format!(
            "KS us {:.5}, ur {:.5}, rs {:.5} over {} samples",
            ks[0],
            ks[1],
            ks[2],
            samples.len()
        ),
    ))
}

fn branch_moment_check(
    params: &SystemParams,
    samples: &[BranchSnrs],
) -> Result<CheckResult, SimError> {
    let m = branch_moments(params, TAU, 1.0)?;
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (name, want, f) in [
        (
            "us",
            m.us,
            (|b: &BranchSnrs| b.us) as fn(&BranchSnrs) -> f64,
        ),
        ("ur", m.ur, |b| b.ur),
        ("rs", m.rs, |b| b.rs),
    ] {
        let xs: Vec<f64> = samples.iter().map(f).collect();
        let (mean, se) = mean_and_std_err(&xs);
        let z = (want - mean).abs() / se;
        worst = worst.max(z);
        detail.push(format!("{name} {z:.2}"));
    }
    Ok(result(
        "branch_moments",
        worst,
        3.0,
        format!(
            "first moments, deviation in standard errors: {}",
            detail.join(", ")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_parsing() {
        assert_eq!("quick".parse::<Level>().unwrap(), Level::Quick);
        assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
        assert!("fast".parse::<Level>().is_err());
    }

    #[test]
    fn ks_of_exact_uniform_sample_is_one_over_n() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 1.0) / 100.0).collect();
        let d = ks_statistic(xs, |x| Ok(x.clamp(0.0, 1.0))).unwrap();
        assert!((d - 0.01).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_skips_analytic_checks() {
        let s = Scenario {
            n_antennas: 1,
            ..Scenario::default()
        };
        let r = verify(&s, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.get("outage_vs_monte_carlo").unwrap().status, Status::Skip);
        assert_eq!(r.get("lambert_vs_search").unwrap().status, Status::Pass);
        assert_eq!(r.get("closed_form_vs_grid").unwrap().status, Status::Pass);
    }

    #[test]
    fn report_text_has_one_line_per_check() {
        let r = VerifyReport {
            checks: vec![lambert_vs_search(), skipped("x", "why")],
        };
        let text = r.to_text();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().starts_with("skip\tx\t"));
    }
}
