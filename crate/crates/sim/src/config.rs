//! Flat `key = value` configuration files.
//!
//! Scenario keys are the [`Scenario`] field names; anything left out keeps
//! its default. The remaining keys tune experiment runs and are overridden by
//! command-line flags.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use wprelay_core::channel::Scenario;

use crate::error::SimError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_antennas: Option<usize>,
    d1: Option<f64>,
    d2: Option<f64>,
    d3: Option<f64>,
    alpha: Option<f64>,
    eta: Option<f64>,
    ps_dbm: Option<f64>,
    noise_dbm: Option<f64>,
    gamma_th_db: Option<f64>,
    pc_dbm: Option<f64>,

    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    ps_start: Option<f64>,
    ps_stop: Option<f64>,
    ps_step: Option<f64>,
    axis: Option<String>,
    axis_values: Option<Vec<f64>>,
    strategies: Option<Vec<String>>,
    tau: Option<f64>,
}

/// Power sweep `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl PsRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9)
            .floor()
            .max(0.0) as usize
            + 1;
        (0..n).map(|i| self.start + self.step * i as f64).collect()
    }
}

/// Everything a config file can set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    /// Which scenario keys were given explicitly. Recipes apply their own
    /// geometry first and then these.
    pub explicit: Vec<&'static str>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub ps_range: Option<PsRange>,
    pub axis: Option<String>,
    pub axis_values: Option<Vec<f64>>,
    pub strategies: Option<Vec<String>>,
    pub tau: Option<f64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        let mut cfg = Config::default();
        let s = &mut cfg.scenario;
        let mut explicit = Vec::new();
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = raw.$field {
                    s.$field = v;
                    explicit.push(stringify!($field));
                }
            )*};
        }
        take!(
            n_antennas,
            d1,
            d2,
            d3,
            alpha,
            eta,
            ps_dbm,
            noise_dbm,
            gamma_th_db
        );
        if let Some(v) = raw.pc_dbm {
            s.pc_dbm = Some(v);
            explicit.push("pc_dbm");
        }
        cfg.explicit = explicit;

        cfg.ps_range = match (raw.ps_start, raw.ps_stop, raw.ps_step) {
            (None, None, None) => None,
            (Some(start), Some(stop), Some(step)) if step > 0.0 && stop >= start => Some(PsRange { start, stop, step }),
            _ => {
                return Err(SimError::Config(
                    "ps_start, ps_stop and ps_step go together, with ps_step > 0 and ps_stop >= ps_start".into(),
                ))
            }
        };
        cfg.trials = raw.trials;
        cfg.seed = raw.seed;
        cfg.workers = raw.workers;
        cfg.axis = raw.axis;
        cfg.axis_values = raw.axis_values;
        cfg.strategies = raw.strategies;
        cfg.tau = raw.tau;
        cfg.scenario
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    /// Copies the explicitly configured scenario keys onto `base`.
    pub fn overlay(&self, mut base: Scenario) -> Scenario {
        let s = &self.scenario;
        for key in &self.explicit {
            match *key {
                "n_antennas" => base.n_antennas = s.n_antennas,
                "d1" => base.d1 = s.d1,
                "d2" => base.d2 = s.d2,
                "d3" => base.d3 = s.d3,
                "alpha" => base.alpha = s.alpha,
                "eta" => base.eta = s.eta,
                "ps_dbm" => base.ps_dbm = s.ps_dbm,
                "noise_dbm" => base.noise_dbm = s.noise_dbm,
                "gamma_th_db" => base.gamma_th_db = s.gamma_th_db,
                "pc_dbm" => base.pc_dbm = s.pc_dbm,
                _ => unreachable!("unknown scenario key {key}"),
            }
        }
        base
    }
}

/// Writes `scenario` in the format [`Config::parse`] reads.
pub fn scenario_to_string(scenario: &Scenario) -> String {
    let mut out = String::new();
    let s = scenario;
    let _ = writeln!(out, "n_antennas = {}", s.n_antennas);
    for (k, v) in [
        ("d1", s.d1),
        ("d2", s.d2),
        ("d3", s.d3),
        ("alpha", s.alpha),
        ("eta", s.eta),
        ("ps_dbm", s.ps_dbm),
        ("noise_dbm", s.noise_dbm),
        ("gamma_th_db", s.gamma_th_db),
    ] {
        let _ = writeln!(out, "{k} = {v:?}");
    }
    if let Some(pc) = s.pc_dbm {
        let _ = writeln!(out, "pc_dbm = {pc:?}");
    }
    out
}
