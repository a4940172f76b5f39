//! Named figure-reproduction experiments plus a config-driven `custom` sweep.
//!
//! Every recipe starts from the default scenario, applies its own geometry
//! and then any scenario keys set explicitly in the config file.

use std::fmt::Write as _;
use std::path::PathBuf;

use wprelay_core::analysis::{outage_exact, outage_high_snr, throughput_lower_bound};
use wprelay_core::beamform::{solve_suboptimal, Strategy};
use wprelay_core::channel::{sample_channel, Scenario};

use crate::config::{Config, PsRange};
use crate::error::SimError;
use crate::montecarlo::{
    Axis, AxisParam, Engine, Metric, PerformanceEstimate, ScenarioField, Scheme, SweepCell, TauMode,
};
use crate::output::Table;

pub const RECIPES: [&str; 11] = [
    "fig4", "fig5a", "fig5b", "fig6", "fig7a", "fig7b", "fig8a", "fig8b", "fig9a", "fig9b",
    "custom",
];

pub const DEFAULT_SEED: u64 = 1;

/// Everything needed to run one recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub config: Config,
    /// Overrides the config file and the recipe default.
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Where the CSV goes; `None` keeps it in memory only.
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            config: Config::default(),
            trials: None,
            seed: None,
            workers: None,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !RECIPES.contains(&self.name.as_str()) {
            return Err(SimError::UnknownRecipe(self.name.clone()));
        }
        if self.name == "custom" {
            custom_axis(&self.config)?;
            schemes_from(&self.config)?;
        }
        if let Some(t) = self.config.tau {
            if !(t > 0.0 && t < 1.0) {
                return Err(SimError::Config(format!("tau must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.seed.or(self.config.seed).unwrap_or(DEFAULT_SEED)
    }

    fn trials(&self, default: u64) -> u64 {
        self.trials.or(self.config.trials).unwrap_or(default)
    }
}

/// One pass/fail line of a recipe summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub recipe: String,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: {} rows\n", self.recipe, self.table.rows.len());
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        s
    }
}

/// Validates `spec`, runs it and writes the CSV if `spec.out` is set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, SimError> {
    spec.validate()?;
    let workers = spec.workers.or(spec.config.workers);
    let engine = Engine::new(workers)?;
    let report = run_with_engine(spec, &engine)?;
    if let Some(path) = &spec.out {
        report.table.write_file(path)?;
    }
    Ok(report)
}

/// Runs `spec` on an existing engine without writing anything.
pub fn run_with_engine(
    spec: &ExperimentSpec,
    engine: &Engine,
) -> Result<ExperimentReport, SimError> {
    spec.validate()?;
    let mut cx = Ctx {
        engine,
        spec,
        seed: spec.seed(),
        table: Table::new("ps_dbm"),
        checks: Vec::new(),
    };
    match spec.name.as_str() {
        "fig4" => fig4(&mut cx)?,
        "fig5a" => fig5a(&mut cx)?,
        "fig5b" => fig5b(&mut cx)?,
        "fig6" => fig6(&mut cx)?,
        "fig7a" => fig7(&mut cx, false)?,
        "fig7b" => fig7(&mut cx, true)?,
        "fig8a" => fig8(&mut cx, Metric::Throughput)?,
        "fig8b" => fig8(&mut cx, Metric::Outage)?,
        "fig9a" => fig9a(&mut cx)?,
        "fig9b" => fig9b(&mut cx)?,
        "custom" => custom(&mut cx)?,
        other => return Err(SimError::UnknownRecipe(other.to_string())),
    }
    Ok(ExperimentReport {
        recipe: spec.name.clone(),
        table: cx.table,
        checks: cx.checks,
    })
}

struct Ctx<'a> {
    engine: &'a Engine,
    spec: &'a ExperimentSpec,
    seed: u64,
    table: Table,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn scenario(&self, base: Scenario) -> Scenario {
        self.spec.config.overlay(base)
    }

    fn ps_values(&self, start: f64, stop: f64, step: f64) -> Vec<f64> {
        self.spec
            .config
            .ps_range
            .unwrap_or(PsRange { start, stop, step })
            .values()
    }

    fn explicit(&self, key: &str) -> bool {
        self.spec.config.explicit.contains(&key)
    }

    /// The recipe's series values for `key`, or the configured one alone.
    fn series(&self, key: &str, default: &[f64], configured: f64) -> Vec<f64> {
        if self.explicit(key) {
            vec![configured]
        } else {
            default.to_vec()
        }
    }

    fn tau_mode(&self, default: TauMode) -> TauMode {
        self.spec.config.tau.map(TauMode::Fixed).unwrap_or(default)
    }

    fn sweep(
        &self,
        template: &Scenario,
        axis: &Axis,
        schemes: &[Scheme],
        tau_mode: TauMode,
        trials: u64,
    ) -> Result<Vec<SweepCell>, SimError> {
        self.engine
            .sweep(template, axis, schemes, tau_mode, trials, self.seed)
    }
}

/// `a >= b` up to three combined standard errors.
fn at_least(a: &PerformanceEstimate, b: &PerformanceEstimate) -> bool {
    a.value >= b.value - 3.0 * a.std_err.hypot(b.std_err)
}

fn find(cells: &[SweepCell], v: f64, scheme: Scheme) -> &crate::montecarlo::Estimates {
    &cells
        .iter()
        .find(|c| c.axis_value == v && c.scheme == scheme)
        .expect("sweep covers every cell")
        .estimates
}

fn ps_axis(values: Vec<f64>) -> Axis {
    Axis::new(AxisParam::Field(ScenarioField::PsDbm), values)
}

fn fig4(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario {
        d1: 20.0,
        d2: 20.0,
        d3: 2.0,
        ..Scenario::default()
    });
    let trials = cx.spec.trials(2000);
    let axis = ps_axis(cx.ps_values(20.0, 50.0, 5.0));
    let schemes = Strategy::ALL.map(Scheme::Relay);
    for n in cx.series("n_antennas", &[2.0, 10.0], base.n_antennas as f64) {
        let n = n as usize;
        let template = Scenario {
            n_antennas: n,
            ..base
        };
        let cells = cx.sweep(&template, &axis, &schemes, TauMode::Optimized, trials)?;
        for c in &cells {
            cx.table.push_estimate(
                c.axis_value,
                format!("{}|N={n}", c.scheme),
                &c.estimates.throughput,
            );
        }
        let mut ordered = true;
        let mut worst_ratio = f64::INFINITY;
        for &v in &axis.values {
            let get = |s| &find(&cells, v, Scheme::Relay(s)).throughput;
            let (ex, sub, ln, mrt) = (
                get(Strategy::ExactSearch),
                get(Strategy::Suboptimal),
                get(Strategy::LargeN),
                get(Strategy::MrtUser),
            );
            let floor = if ln.value < mrt.value { ln } else { mrt };
            ordered &= at_least(ex, sub) && at_least(sub, floor);
            worst_ratio = worst_ratio.min(sub.value / ex.value);
        }
        cx.check(
            format!("N={n} exact >= suboptimal >= min(large-n, mrt-user)"),
            ordered,
            "within 3 combined standard errors at every Ps",
        );
        cx.check(
            format!("N={n} suboptimal near optimal"),
            worst_ratio >= 0.97,
            format!("worst suboptimal/exact ratio {worst_ratio:.5}, need >= 0.97"),
        );
    }
    Ok(())
}

const RELAY_SPAN: f64 = 12.0;

fn fig5a(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario {
        n_antennas: 20,
        ps_dbm: 40.0,
        ..Scenario::default()
    });
    let trials = cx.spec.trials(100_000);
    cx.table = Table::new("d2");
    let d2s: Vec<f64> = (1..12).map(f64::from).collect();
    let axis = Axis::new(AxisParam::RelayPosition { span: RELAY_SPAN }, d2s.clone());
    let scheme = Scheme::Relay(Strategy::Suboptimal);
    let mut peaks = Vec::new();
    for d1 in cx.series("d1", &[8.0, 10.0, 12.0], base.d1) {
        let template = Scenario { d1, ..base };
        let cells = cx.sweep(
            &template,
            &axis,
            &[scheme],
            cx.tau_mode(TauMode::Optimized),
            trials,
        )?;
        let label = format!("{scheme}|d1={d1}");
        for c in &cells {
            cx.table
                .push_estimate(c.axis_value, label.clone(), &c.estimates.throughput);
        }
        let curve: Vec<f64> = cells.iter().map(|c| c.estimates.throughput.value).collect();
        let (best_i, best) = argmax(&curve);
        cx.check(
            format!("d1={d1} interior optimal relay position"),
            best_i > 0 && best_i + 1 < curve.len(),
            format!(
                "best d2 = {} of [{}, {}]",
                d2s[best_i],
                d2s[0],
                d2s[d2s.len() - 1]
            ),
        );
        peaks.push((d1, best));
    }
    if peaks.len() > 1 {
        cx.check(
            "peak throughput falls as d1 grows",
            peaks.windows(2).all(|w| w[1].1 < w[0].1),
            format!("{peaks:?}"),
        );
    }
    Ok(())
}

fn argmax(xs: &[f64]) -> (usize, f64) {
    xs.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, x)| {
            if x > best.1 {
                (i, x)
            } else {
                best
            }
        })
}

fn fig5b(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario {
        n_antennas: 20,
        ..Scenario::default()
    });
    let trials = cx.spec.trials(10_000);
    let ps = cx.ps_values(20.0, 50.0, 5.0);
    let step = 0.5;
    let d2s: Vec<f64> = (1..24).map(|i| i as f64 * step).collect();
    let axis = Axis::new(AxisParam::RelayPosition { span: RELAY_SPAN }, d2s.clone());
    let scheme = Scheme::Relay(Strategy::Suboptimal);
    let mut optima = Vec::new();
    for d1 in cx.series("d1", &[8.0, 10.0], base.d1) {
        let label = format!("{scheme}|d1={d1}");
        let mut best_d2 = Vec::new();
        for &p in &ps {
            let template = Scenario {
                d1,
                ps_dbm: p,
                ..base
            };
            let cells = cx.sweep(
                &template,
                &axis,
                &[scheme],
                cx.tau_mode(TauMode::Optimized),
                trials,
            )?;
            let curve: Vec<f64> = cells.iter().map(|c| c.estimates.throughput.value).collect();
            let d2 = d2s[argmax(&curve).0];
            cx.table
                .push_mean(p, label.clone(), "optimal_d2", d2, 0.0, trials, cx.seed);
            best_d2.push(d2);
        }
        cx.check(
            format!("d1={d1} optimal d2 does not fall as Ps grows"),
            best_d2.windows(2).all(|w| w[1] >= w[0] - step),
            format!("{best_d2:?} (one grid step of slack)"),
        );
        optima.push(best_d2);
    }
    if optima.len() == 2 {
        cx.check(
            "farther user moves the optimal relay toward it",
            optima[1]
                .iter()
                .zip(&optima[0])
                .all(|(far, near)| far >= near),
            format!("d1=10 {:?} vs d1=8 {:?}", optima[1], optima[0]),
        );
    }
    Ok(())
}

fn fig6(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario::default());
    let trials = cx.spec.trials(1000);
    let axis = ps_axis(cx.ps_values(20.0, 50.0, 5.0));
    let schemes = [
        Scheme::Relay(Strategy::ExactSearch),
        Scheme::Relay(Strategy::Suboptimal),
    ];
    let pcs: Vec<Option<f64>> = if cx.explicit("pc_dbm") {
        vec![None, base.pc_dbm]
    } else {
        vec![None, Some(-10.0), Some(0.0)]
    };
    let mut runs = Vec::new();
    for pc in &pcs {
        let template = Scenario {
            pc_dbm: *pc,
            ..base
        };
        let cells = cx.sweep(
            &template,
            &axis,
            &schemes,
            cx.tau_mode(TauMode::Optimized),
            trials,
        )?;
        let tag = pc.map_or("none".to_string(), |p| format!("{p}dBm"));
        for c in &cells {
            cx.table.push_estimate(
                c.axis_value,
                format!("{}|Pc={tag}", c.scheme),
                &c.estimates.throughput,
            );
        }
        runs.push((tag, cells));
    }
    let exact = Scheme::Relay(Strategy::ExactSearch);
    let (lo, hi) = (axis.values[0], axis.values[axis.values.len() - 1]);
    let free = &runs[0].1;
    let mut prev_gap = 0.0;
    for (tag, cells) in &runs[1..] {
        let costs = axis.values.iter().all(|&v| {
            at_least(
                &find(free, v, exact).throughput,
                &find(cells, v, exact).throughput,
            )
        });
        cx.check(
            format!("Pc={tag} never helps"),
            costs,
            "exact-search throughput with circuit power <= without, within 3 standard errors",
        );
        let gap = |v| {
            let f = find(free, v, exact).throughput.value;
            (f - find(cells, v, exact).throughput.value) / f
        };
        let (g_lo, g_hi) = (gap(lo), gap(hi));
        cx.check(
            format!("Pc={tag} gap shrinks with Ps"),
            g_hi < g_lo,
            format!("relative loss {g_lo:.4} at {lo} dBm, {g_hi:.4} at {hi} dBm"),
        );
        cx.check(
            format!("Pc={tag} larger circuit power costs more at low Ps"),
            g_lo >= prev_gap,
            format!("relative loss {g_lo:.4} vs {prev_gap:.4} for the previous Pc"),
        );
        prev_gap = g_lo;
    }
    Ok(())
}

/// Mean optimal time split of the suboptimal design at each Ps.
fn mean_tau_curve(
    cx: &mut Ctx,
    template: &Scenario,
    ps: &[f64],
    trials: u64,
    label: &str,
) -> Result<Vec<f64>, SimError> {
    let mut curve = Vec::new();
    for &p in ps {
        let params = Scenario {
            ps_dbm: p,
            ..*template
        }
        .build()?;
        let m = cx.engine.average(trials, cx.seed, |rng| {
            let ch = sample_channel(&params, rng);
            solve_suboptimal(&params, &ch).map(|d| d.tau)
        })?;
        cx.table.push_mean(
            p,
            label,
            "optimal_tau",
            m.value,
            m.std_err,
            m.n_trials,
            cx.seed,
        );
        curve.push(m.value);
    }
    Ok(curve)
}

fn fig7(cx: &mut Ctx, by_distance: bool) -> Result<(), SimError> {
    let base = cx.scenario(Scenario::default());
    let trials = cx.spec.trials(100_000);
    let ps = cx.ps_values(20.0, 50.0, 5.0);
    let (key, values) = if by_distance {
        ("d1", cx.series("d1", &[10.0, 15.0, 20.0], base.d1))
    } else {
        (
            "N",
            cx.series("n_antennas", &[2.0, 10.0, 20.0], base.n_antennas as f64),
        )
    };
    let mut curves = Vec::new();
    for v in values {
        let template = if by_distance {
            Scenario { d1: v, ..base }
        } else {
            Scenario {
                n_antennas: v as usize,
                ..base
            }
        };
        let curve = mean_tau_curve(cx, &template, &ps, trials, &format!("suboptimal|{key}={v}"))?;
        cx.check(
            format!("{key}={v} optimal tau falls as Ps grows"),
            curve.windows(2).all(|w| w[1] < w[0]),
            format!("{curve:.4?}"),
        );
        curves.push((v, curve));
    }
    for w in curves.windows(2) {
        let ((v0, c0), (v1, c1)) = (&w[0], &w[1]);
        let ok = if by_distance {
            c1.iter().zip(c0).all(|(a, b)| a > b)
        } else {
            c1.iter().zip(c0).all(|(a, b)| a < b)
        };
        let trend = if by_distance { "rises" } else { "falls" };
        cx.check(
            format!("optimal tau {trend} from {key}={v0} to {key}={v1}"),
            ok,
            "at every Ps",
        );
    }
    Ok(())
}

/// Both schemes of the relay-benefit comparison.
fn fig8(cx: &mut Ctx, metric: Metric) -> Result<(), SimError> {
    let base = cx.scenario(Scenario {
        d1: 30.0,
        d2: 16.0,
        d3: 16.0,
        alpha: 3.0,
        ..Scenario::default()
    });
    let default_trials = match metric {
        Metric::Throughput => 100_000,
        Metric::Outage => 1_000_000,
    };
    let trials = cx.spec.trials(default_trials);
    let axis = ps_axis(cx.ps_values(-50.0, 20.0, 5.0));
    let relay = Scheme::Relay(Strategy::MrtUser);
    let direct = Scheme::NoRelay;
    let cells = cx.sweep(
        &base,
        &axis,
        &[relay, direct],
        cx.tau_mode(TauMode::Fixed(0.5)),
        trials,
    )?;
    for c in &cells {
        cx.table
            .push_estimate(c.axis_value, c.scheme.name(), c.estimates.get(metric));
    }
    let (lo, hi) = (axis.values[0], axis.values[axis.values.len() - 1]);
    match metric {
        Metric::Outage => {
            let ok = axis.values.iter().all(|&v| {
                find(&cells, v, relay).outage.value <= find(&cells, v, direct).outage.value
            });
            cx.check("relay never worsens outage", ok, "at every Ps");
        }
        Metric::Throughput => {
            let r = |v| &find(&cells, v, relay).throughput;
            let d = |v| &find(&cells, v, direct).throughput;
            let low_wins = r(lo).value > d(lo).value && at_least(r(lo), d(lo));
            let high_loses = d(hi).value > r(hi).value && at_least(d(hi), r(hi));
            cx.check(
                "relay helps at low Ps",
                low_wins,
                format!("{} vs {} at {lo} dBm", r(lo).value, d(lo).value),
            );
            cx.check(
                "relay hurts at high Ps",
                high_loses,
                format!("{} vs {} at {hi} dBm", r(hi).value, d(hi).value),
            );
        }
    }
    Ok(())
}

/// Outage of the MRT design: Monte Carlo against the exact and high-SNR
/// expressions.
fn fig9a(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario::default());
    let trials = cx.spec.trials(1_000_000);
    let tau = cx.spec.config.tau.unwrap_or(0.5);
    let axis = ps_axis(cx.ps_values(-40.0, -10.0, 5.0));
    let scheme = Scheme::Relay(Strategy::MrtUser);
    let mut exact_by_n: Vec<Vec<f64>> = Vec::new();
    for n in cx.series("n_antennas", &[2.0, 3.0], base.n_antennas as f64) {
        let n = n as usize;
        let template = Scenario {
            n_antennas: n,
            ..base
        };
        let cells = cx.sweep(&template, &axis, &[scheme], TauMode::Fixed(tau), trials)?;
        let mut agree = true;
        let mut worst_z = 0.0f64;
        let mut exact_curve = Vec::new();
        let mut approx_at_top = (0.0, 0.0);
        for c in &cells {
            let params = Scenario {
                ps_dbm: c.axis_value,
                ..template
            }
            .build()?;
            let exact = outage_exact(&params, tau)?;
            let approx = outage_high_snr(&params, tau)?;
            let mc = &c.estimates.outage;
            cx.table
                .push_estimate(c.axis_value, format!("monte-carlo|N={n}"), mc);
            cx.table
                .push_analytic(c.axis_value, format!("exact|N={n}"), "outage_exact", exact);
            cx.table.push_analytic(
                c.axis_value,
                format!("high-snr|N={n}"),
                "outage_high_snr",
                approx,
            );
            // too few outage events for a normal approximation
            if mc.value * mc.n_trials as f64 >= 20.0 {
                let z = (exact - mc.value).abs() / mc.std_err;
                worst_z = worst_z.max(z);
                agree &= z <= 3.0;
            }
            exact_curve.push(exact);
            approx_at_top = (exact, approx);
        }
        cx.check(
            format!("N={n} exact outage matches Monte Carlo"),
            agree,
            format!("worst deviation {worst_z:.2} standard errors"),
        );
        let (e, a) = approx_at_top;
        let log_gap = (a.log10() - e.log10()).abs();
        cx.check(
            format!("N={n} high-SNR approximation at top Ps"),
            log_gap <= 0.15,
            format!("|log10 ratio| = {log_gap:.3}"),
        );
        exact_by_n.push(exact_curve);
    }
    if exact_by_n.len() == 2 {
        cx.check(
            "more antennas lower outage",
            exact_by_n[1]
                .iter()
                .zip(&exact_by_n[0])
                .all(|(a, b)| a <= b),
            "exact outage at every Ps",
        );
    }
    Ok(())
}

/// Throughput of the MRT design against the analytic lower bound.
fn fig9b(cx: &mut Ctx) -> Result<(), SimError> {
    let base = cx.scenario(Scenario::default());
    let trials = cx.spec.trials(100_000);
    let tau = cx.spec.config.tau.unwrap_or(0.5);
    let axis = ps_axis(cx.ps_values(20.0, 50.0, 5.0));
    let scheme = Scheme::Relay(Strategy::MrtUser);
    for n in cx.series("n_antennas", &[5.0, 10.0], base.n_antennas as f64) {
        let n = n as usize;
        let template = Scenario {
            n_antennas: n,
            ..base
        };
        let cells = cx.sweep(&template, &axis, &[scheme], TauMode::Fixed(tau), trials)?;
        let mut below = true;
        let mut top_gap = 0.0;
        for c in &cells {
            let params = Scenario {
                ps_dbm: c.axis_value,
                ..template
            }
            .build()?;
            let bound = throughput_lower_bound(&params, tau)?;
            let mc = &c.estimates.throughput;
            cx.table
                .push_estimate(c.axis_value, format!("monte-carlo|N={n}"), mc);
            cx.table.push_analytic(
                c.axis_value,
                format!("lower-bound|N={n}"),
                "throughput_bound",
                bound,
            );
            below &= bound <= mc.value;
            top_gap = (mc.value - bound) / mc.value;
        }
        cx.check(
            format!("N={n} bound stays below Monte Carlo"),
            below,
            "at every Ps",
        );
        cx.check(
            format!("N={n} bound gap at top Ps"),
            n < 10 || top_gap <= 0.15,
            format!("relative gap {top_gap:.4}"),
        );
    }
    Ok(())
}

fn custom_axis(cfg: &Config) -> Result<Axis, SimError> {
    let name = cfg
        .axis
        .as_deref()
        .ok_or_else(|| SimError::Experiment("custom needs `axis` in the config".into()))?;
    let values = cfg.axis_values.clone().unwrap_or_default();
    Axis::parse(name, values)
}

fn schemes_from(cfg: &Config) -> Result<Vec<Scheme>, SimError> {
    match &cfg.strategies {
        None => Ok(vec![Scheme::Relay(Strategy::Suboptimal)]),
        Some(list) if list.is_empty() => Err(SimError::Experiment("strategies is empty".into())),
        Some(list) => list.iter().map(|s| s.parse()).collect(),
    }
}

fn custom(cx: &mut Ctx) -> Result<(), SimError> {
    let axis = custom_axis(&cx.spec.config)?;
    let schemes = schemes_from(&cx.spec.config)?;
    let trials = cx.spec.trials(10_000);
    cx.table = Table::new(axis.name());
    let cells = cx.sweep(
        &cx.spec.config.scenario,
        &axis,
        &schemes,
        cx.tau_mode(TauMode::Optimized),
        trials,
    )?;
    for c in &cells {
        for m in [Metric::Throughput, Metric::Outage] {
            cx.table
                .push_estimate(c.axis_value, c.scheme.name(), c.estimates.get(m));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(
            ExperimentSpec::new("fig10").validate(),
            Err(SimError::UnknownRecipe(_))
        ));
        let mut s = ExperimentSpec::new("custom");
        assert!(s.validate().is_err());
        s.config = Config::parse("axis = \"d1\"\naxis_values = []").unwrap();
        assert!(s.validate().is_err());
        s.config =
            Config::parse("axis = \"d1\"\naxis_values = [5.0]\nstrategies = [\"greedy\"]").unwrap();
        assert!(s.validate().is_err());
        s.config = Config::parse(
            "axis = \"d1\"\naxis_values = [5.0]\nstrategies = [\"mrt-user\", \"no-relay\"]",
        )
        .unwrap();
        assert!(s.validate().is_ok());
        for name in RECIPES.iter().filter(|&&n| n != "custom") {
            assert!(ExperimentSpec::new(*name).validate().is_ok());
        }
    }

    #[test]
    fn custom_sweep_rows() {
        let mut s = ExperimentSpec::new("custom");
        s.config = Config::parse(
            "n_antennas = 3\naxis = \"n_antennas\"\naxis_values = [2.0, 4.0]\nstrategies = [\"suboptimal\", \"no-relay\"]\ntrials = 200",
        )
        .unwrap();
        let engine = Engine::new(Some(2)).unwrap();
        let r = run_with_engine(&s, &engine).unwrap();
        assert_eq!(r.table.axis, "n_antennas");
        assert_eq!(r.table.rows.len(), 2 * 2 * 2);
        assert!(r
            .table
            .rows
            .iter()
            .all(|row| row.n_trials == 200 && row.seed == DEFAULT_SEED));
    }

    #[test]
    fn trial_and_seed_precedence() {
        let mut s = ExperimentSpec::new("fig4");
        s.config = Config::parse("trials = 300\nseed = 5").unwrap();
        assert_eq!((s.trials(10), s.seed()), (300, 5));
        s.trials = Some(200);
        s.seed = Some(6);
        assert_eq!((s.trials(10), s.seed()), (200, 6));
        assert_eq!(
            (
                ExperimentSpec::new("fig4").trials(10),
                ExperimentSpec::new("x").seed()
            ),
            (10, DEFAULT_SEED)
        );
    }

    #[test]
    fn small_fig8_shows_relay_benefit() {
        let mut s = ExperimentSpec::new("fig8b");
        s.trials = Some(2000);
        let engine = Engine::new(None).unwrap();
        let r = run_with_engine(&s, &engine).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        assert!(r.table.rows.iter().all(|row| row.metric == "outage"));
    }
}
