//! Monte Carlo estimation of outage probability and average throughput.
//!
//! Trial `t` draws its channel from ChaCha stream `t` under the master seed,
//! so a trial's outcome does not depend on which worker ran it. Trials are
//! tallied serially inside fixed-size chunks and the chunk tallies are merged
//! in a fixed pairwise tree, which makes every estimate bit-identical at any
//! worker count.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use wprelay_core::analysis::{mrt_branch_snrs, BranchCoefficients, BranchSnrs};
use wprelay_core::beamform::{solve, SearchGrid, Strategy};
use wprelay_core::channel::{norm_sqr, sample_channel, Scenario, SystemParams};
use wprelay_core::sysmodel::{rate, snr_exact};
use wprelay_core::timesplit::optimal_tau;

use crate::config::scenario_to_string;
use crate::error::SimError;

pub const MIN_TRIALS: u64 = 100;
pub const CHUNK_TRIALS: u64 = 4096;
/// Largest tolerated fraction of failed trials.
pub const MAX_ERROR_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Outage,
    Throughput,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Self::Outage => "outage",
            Self::Throughput => "throughput",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauMode {
    Fixed(f64),
    /// Each design picks its own time split per channel.
    Optimized,
}

/// What a trial transmits with: one of the relaying designs, or the
/// point-to-point harvest-then-transmit link that ignores the relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Relay(Strategy),
    NoRelay,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Relay(s) => s.name(),
            Self::NoRelay => "no-relay",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        if s == "no-relay" {
            return Ok(Self::NoRelay);
        }
        s.parse::<Strategy>()
            .map(Self::Relay)
            .map_err(|_| SimError::Experiment(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceEstimate {
    pub metric: Metric,
    pub value: f64,
    pub std_err: f64,
    /// Trials that contributed, i.e. excluding failed ones.
    pub n_trials: u64,
    pub n_errors: u64,
    pub master_seed: u64,
    pub scheme: Scheme,
    pub params_digest: String,
}

/// Both metrics from one set of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub throughput: PerformanceEstimate,
    pub outage: PerformanceEstimate,
}

impl Estimates {
    pub fn get(&self, metric: Metric) -> &PerformanceEstimate {
        match metric {
            Metric::Outage => &self.outage,
            Metric::Throughput => &self.throughput,
        }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Self {
            n,
            mean: a.mean + d * (b.n as f64 / n as f64),
            m2: a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64 / n as f64),
        }
    }

    fn std_err(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    rate: Moments,
    outages: u64,
    errors: u64,
}

impl Tally {
    fn merge(a: Self, b: Self) -> Self {
        Self {
            rate: Moments::merge(a.rate, b.rate),
            outages: a.outages + b.outages,
            errors: a.errors + b.errors,
        }
    }
}

fn pairwise<T: Copy + Default>(items: &[T], merge: fn(T, T) -> T) -> T {
    match items.len() {
        0 => T::default(),
        1 => items[0],
        n => merge(
            pairwise(&items[..n / 2], merge),
            pairwise(&items[n / 2..], merge),
        ),
    }
}

/// RNG for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// First 16 hex digits of the SHA-256 of the scenario's config text.
pub fn params_digest(params: &SystemParams) -> String {
    let hash = Sha256::digest(scenario_to_string(params.scenario()).as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Rate and end-to-end SNR of one channel draw.
fn trial_outcome(
    params: &SystemParams,
    scheme: Scheme,
    tau_mode: TauMode,
    grid: SearchGrid,
    rng: &mut ChaCha8Rng,
) -> wprelay_core::Result<(f64, f64)> {
    let ch = sample_channel(params, rng);
    match scheme {
        Scheme::Relay(strategy) => {
            let fixed = match tau_mode {
                TauMode::Fixed(t) => Some(t),
                TauMode::Optimized => None,
            };
            let design = solve(strategy, params, &ch, grid, fixed)?;
            let tau = fixed.unwrap_or(design.tau);
            let gamma = snr_exact(params, &ch, &design.w, tau)?.gamma_total;
            Ok((rate(tau, gamma), gamma))
        }
        Scheme::NoRelay => {
            // MRT toward the user over the whole (1 - tau) information phase
            let y = norm_sqr(&ch.h1);
            let pl1 = params.path_loss()[0];
            let kappa = params.eta() * params.rho() * y * y / (pl1 * pl1);
            let tau = match tau_mode {
                TauMode::Fixed(t) => t,
                TauMode::Optimized if kappa > 0.0 => optimal_tau(kappa)?.tau,
                TauMode::Optimized => 0.5,
            };
            let gamma = kappa * tau / (1.0 - tau);
            Ok((2.0 * rate(tau, gamma), gamma))
        }
    }
}

pub struct Engine {
    pool: rayon::ThreadPool,
    grid: SearchGrid,
}

impl Engine {
    /// `workers = None` uses one thread per core.
    pub fn new(workers: Option<usize>) -> Result<Self, SimError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            if w == 0 {
                return Err(SimError::Experiment("workers must be at least 1".into()));
            }
            builder = builder.num_threads(w);
        }
        Ok(Self {
            pool: builder.build()?,
            grid: SearchGrid::default(),
        })
    }

    pub fn with_grid(mut self, grid: SearchGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(trial, rng)` for every trial, in trial order.
    pub fn map_trials<T, F>(&self, n_trials: u64, master_seed: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
    {
        self.pool.install(|| {
            (0..n_trials)
                .into_par_iter()
                .map(|t| f(t, &mut trial_rng(master_seed, t)))
                .collect()
        })
    }

    /// Chunked, order-independent reduction of `f` over the trials. `f`
    /// returns the per-trial value and whether the trial is an outage.
    fn reduce<F>(&self, n_trials: u64, master_seed: u64, f: F) -> Tally
    where
        F: Fn(&mut ChaCha8Rng) -> wprelay_core::Result<(f64, bool)> + Sync,
    {
        let n_chunks = n_trials.div_ceil(CHUNK_TRIALS);
        let chunks: Vec<Tally> = self.pool.install(|| {
            (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let mut tally = Tally::default();
                    for t in c * CHUNK_TRIALS..((c + 1) * CHUNK_TRIALS).min(n_trials) {
                        match f(&mut trial_rng(master_seed, t)) {
                            Ok((x, outage)) => {
                                tally.rate.push(x);
                                tally.outages += u64::from(outage);
                            }
                            Err(_) => tally.errors += 1,
                        }
                    }
                    tally
                })
                .collect()
        });
        pairwise(&chunks, Tally::merge)
    }

    fn check_errors(tally: &Tally, n_trials: u64) -> Result<(), SimError> {
        if tally.errors as f64 > MAX_ERROR_FRACTION * n_trials as f64 {
            return Err(SimError::TooManyErrors {
                errors: tally.errors,
                trials: n_trials,
            });
        }
        Ok(())
    }

    /// Mean of `f` over the trials, with the same seeding, error accounting
    /// and worker-count independence as [`Engine::run`].
    pub fn average<F>(&self, n_trials: u64, master_seed: u64, f: F) -> Result<TrialMean, SimError>
    where
        F: Fn(&mut ChaCha8Rng) -> wprelay_core::Result<f64> + Sync,
    {
        if n_trials < MIN_TRIALS {
            return Err(SimError::TooFewTrials {
                min: MIN_TRIALS,
                got: n_trials,
            });
        }
        let tally = self.reduce(n_trials, master_seed, |rng| f(rng).map(|x| (x, false)));
        Self::check_errors(&tally, n_trials)?;
        Ok(TrialMean {
            value: tally.rate.mean,
            std_err: tally.rate.std_err(),
            n_trials: tally.rate.n,
            n_errors: tally.errors,
        })
    }

    /// Throughput and outage of `scheme` over `n_trials` channel draws.
    pub fn run(
        &self,
        params: &SystemParams,
        scheme: Scheme,
        tau_mode: TauMode,
        n_trials: u64,
        master_seed: u64,
    ) -> Result<Estimates, SimError> {
        if n_trials < MIN_TRIALS {
            return Err(SimError::TooFewTrials {
                min: MIN_TRIALS,
                got: n_trials,
            });
        }
        if let TauMode::Fixed(t) = tau_mode {
            params.snr_scale(t)?;
        }
        let gamma_th = params.gamma_th();
        let grid = self.grid;
        let tally = self.reduce(n_trials, master_seed, |rng| {
            trial_outcome(params, scheme, tau_mode, grid, rng)
                .map(|(r, gamma)| (r, gamma < gamma_th))
        });
        Self::check_errors(&tally, n_trials)?;
        let n = tally.rate.n;
        let p = tally.outages as f64 / n as f64;
        let digest = params_digest(params);
        let make = |metric, value, std_err| PerformanceEstimate {
            metric,
            value,
            std_err,
            n_trials: n,
            n_errors: tally.errors,
            master_seed,
            scheme,
            params_digest: digest.clone(),
        };
        Ok(Estimates {
            throughput: make(Metric::Throughput, tally.rate.mean, tally.rate.std_err()),
            outage: make(Metric::Outage, p, (p * (1.0 - p) / n as f64).sqrt()),
        })
    }

    pub fn estimate(
        &self,
        params: &SystemParams,
        strategy: Strategy,
        tau_mode: TauMode,
        metric: Metric,
        n_trials: u64,
        master_seed: u64,
    ) -> Result<PerformanceEstimate, SimError> {
        let all = self.run(
            params,
            Scheme::Relay(strategy),
            tau_mode,
            n_trials,
            master_seed,
        )?;
        Ok(all.get(metric).clone())
    }

    /// Harvest-then-transmit without the relay: SNR
    /// `eta tau rho ||h1||^4 / ((1 - tau) d1^(2 alpha))` with MRT, and
    /// throughput `(1 - tau) log2(1 + SNR)`. Circuit power is not modelled.
    pub fn baseline_no_relay(
        &self,
        params: &SystemParams,
        tau_mode: TauMode,
        n_trials: u64,
        master_seed: u64,
    ) -> Result<Estimates, SimError> {
        self.run(params, Scheme::NoRelay, tau_mode, n_trials, master_seed)
    }

    /// Every `(value, scheme)` cell of the sweep in axis-major order. All
    /// cells share the master seed, so schemes are compared on the same
    /// channel draws.
    pub fn sweep(
        &self,
        template: &Scenario,
        axis: &Axis,
        schemes: &[Scheme],
        tau_mode: TauMode,
        n_trials: u64,
        master_seed: u64,
    ) -> Result<Vec<SweepCell>, SimError> {
        axis.validate()?;
        let mut cells = Vec::with_capacity(axis.values.len() * schemes.len());
        for &v in &axis.values {
            let (scenario, mode) = axis.apply(template, tau_mode, v);
            let params = scenario.build()?;
            for &scheme in schemes {
                let estimates = self.run(&params, scheme, mode, n_trials, master_seed)?;
                cells.push(SweepCell {
                    axis_value: v,
                    scheme,
                    estimates,
                });
            }
        }
        Ok(cells)
    }

    /// Branch SNRs of the MRT-toward-user design, one per trial.
    pub fn sample_branch_snrs(
        &self,
        params: &SystemParams,
        tau: f64,
        n_trials: u64,
        master_seed: u64,
    ) -> Result<Vec<BranchSnrs>, SimError> {
        let coeffs = BranchCoefficients::new(params, tau)?;
        let draws = self.map_trials(n_trials, master_seed, |_, rng| {
            mrt_branch_snrs(&coeffs, &sample_channel(params, rng))
        });
        draws
            .into_iter()
            .map(|r| r.map_err(SimError::from))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMean {
    pub value: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub n_errors: u64,
}

/// Mean and standard error of `xs`.
pub fn mean_and_std_err(xs: &[f64]) -> (f64, f64) {
    let mut m = Moments::default();
    for &x in xs {
        m.push(x);
    }
    (m.mean, m.std_err())
}

/// A [`Scenario`] field that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioField {
    NAntennas,
    D1,
    D2,
    D3,
    Alpha,
    Eta,
    PsDbm,
    NoiseDbm,
    GammaThDb,
    PcDbm,
}

impl ScenarioField {
    pub const ALL: [Self; 10] = [
        Self::NAntennas,
        Self::D1,
        Self::D2,
        Self::D3,
        Self::Alpha,
        Self::Eta,
        Self::PsDbm,
        Self::NoiseDbm,
        Self::GammaThDb,
        Self::PcDbm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NAntennas => "n_antennas",
            Self::D1 => "d1",
            Self::D2 => "d2",
            Self::D3 => "d3",
            Self::Alpha => "alpha",
            Self::Eta => "eta",
            Self::PsDbm => "ps_dbm",
            Self::NoiseDbm => "noise_dbm",
            Self::GammaThDb => "gamma_th_db",
            Self::PcDbm => "pc_dbm",
        }
    }

    pub fn set(self, s: &mut Scenario, v: f64) {
        match self {
            Self::NAntennas => s.n_antennas = v as usize,
            Self::D1 => s.d1 = v,
            Self::D2 => s.d2 = v,
            Self::D3 => s.d3 = v,
            Self::Alpha => s.alpha = v,
            Self::Eta => s.eta = v,
            Self::PsDbm => s.ps_dbm = v,
            Self::NoiseDbm => s.noise_dbm = v,
            Self::GammaThDb => s.gamma_th_db = v,
            Self::PcDbm => s.pc_dbm = Some(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisParam {
    Field(ScenarioField),
    /// Fixed time split.
    Tau,
    /// Relay on the user-to-H-AP segment: sets `d2` and `d3 = span - d2`.
    RelayPosition {
        span: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: AxisParam, values: Vec<f64>) -> Self {
        Self { param, values }
    }

    /// Parses a field name or `tau`.
    pub fn parse(name: &str, values: Vec<f64>) -> Result<Self, SimError> {
        let param = if name == "tau" {
            AxisParam::Tau
        } else {
            let field = ScenarioField::ALL
                .into_iter()
                .find(|f| f.name() == name)
                .ok_or_else(|| {
                    SimError::Experiment(format!("`{name}` is not a sweepable parameter"))
                })?;
            AxisParam::Field(field)
        };
        let axis = Self { param, values };
        axis.validate()?;
        Ok(axis)
    }

    pub fn name(&self) -> &'static str {
        match self.param {
            AxisParam::Field(f) => f.name(),
            AxisParam::Tau => "tau",
            AxisParam::RelayPosition { .. } => "d2",
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.values.is_empty() {
            return Err(SimError::Experiment("axis has no values".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Experiment("axis values must be finite".into()));
        }
        Ok(())
    }

    pub fn apply(&self, base: &Scenario, tau_mode: TauMode, v: f64) -> (Scenario, TauMode) {
        let mut s = *base;
        match self.param {
            AxisParam::Field(f) => {
                f.set(&mut s, v);
                (s, tau_mode)
            }
            AxisParam::Tau => (s, TauMode::Fixed(v)),
            AxisParam::RelayPosition { span } => {
                s.d2 = v;
                s.d3 = span - v;
                (s, tau_mode)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub axis_value: f64,
    pub scheme: Scheme,
    pub estimates: Estimates,
}
