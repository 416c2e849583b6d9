//! Flat `key = value` configuration shared by every subcommand.
//!
//! Lines starting with `#` are comments. Simulator keys carry a `sim.`
//! prefix. Command-line flags are applied on top of the file with the same
//! keys, so a config file plus `--set key=value` overrides fully describes a
//! run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{FixedOffset, NaiveDate};
use shedad_core::dtw::DEFAULT_BAND_RADIUS;
use shedad_core::knn::AdaptiveKnnParams;
use shedad_core::merge::DEFAULT_KAPPA_MIN;

use crate::error::{Error, Result};
use crate::sim::{FaultPlan, NetworkSpec, NoiseSpec};

/// Edge weights fed to the SNN similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnnWeights {
    /// DTW distances divided by the median merged-graph edge weight.
    Median,
    /// DTW distances as they are.
    Raw,
}

impl SnnWeights {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Median => "median",
            Self::Raw => "raw",
        }
    }
}

impl std::str::FromStr for SnnWeights {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "median" => Ok(Self::Median),
            "raw" => Ok(Self::Raw),
            _ => Err("expected `median` or `raw`".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Number of random days used for the DTW graphs.
    pub r: usize,
    pub seed: u64,
    pub band_radius: usize,
    pub k_b: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub thresholds_as_quantiles: bool,
    pub kappa_min: f64,
    pub snn_weights: SnnWeights,
    pub n_clusters: usize,
    pub singleton_threshold: usize,
    /// Comparison group size minus one; defaults to `k_b`.
    pub comparison_k: Option<usize>,
    pub flag_threshold: f64,
    pub timezone: FixedOffset,
    /// Worker threads for DTW and scoring; 0 uses every available core.
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let knn = AdaptiveKnnParams::default();
        Self {
            input: None,
            out: None,
            r: 7,
            seed: 0,
            band_radius: DEFAULT_BAND_RADIUS,
            k_b: knn.k_b,
            theta_min: knn.theta_min,
            theta_max: knn.theta_max,
            thresholds_as_quantiles: knn.thresholds_as_quantiles,
            kappa_min: DEFAULT_KAPPA_MIN,
            snn_weights: SnnWeights::Median,
            n_clusters: 30,
            singleton_threshold: 1,
            comparison_k: None,
            flag_threshold: 0.0,
            timezone: FixedOffset::east_opt(0).unwrap(),
            workers: 0,
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn knn_params(&self) -> AdaptiveKnnParams {
        AdaptiveKnnParams {
            k_b: self.k_b,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
            thresholds_as_quantiles: self.thresholds_as_quantiles,
        }
    }

    pub fn comparison_k(&self) -> usize {
        self.comparison_k.unwrap_or(self.k_b)
    }
}

/// Simulator settings. Every physical default is a modelling assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub network: NetworkSpec,
    pub noise: NoiseSpec,
    pub faults: FaultPlan,
    pub start: NaiveDate,
    pub days: usize,
    /// Explicit fault list (JSON array of fault specs); replaces random
    /// fault placement when set.
    pub faults_file: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            network: NetworkSpec::default(),
            noise: NoiseSpec::default(),
            faults: FaultPlan::default(),
            start: NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            days: 31,
            faults_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Config {
    pub run: RunConfig,
    pub sim: SimConfig,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Usage(format!("invalid value for `{key}`: {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Usage(format!("invalid value for `{key}`: {value:?} (expected true or false)"))),
    }
}

fn parse_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn path_str(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

pub fn parse_timezone(value: &str) -> Option<FixedOffset> {
    if value == "UTC" || value == "Z" {
        return FixedOffset::east_opt(0);
    }
    let (sign, rest) = match value.as_bytes().first()? {
        b'+' => (1, &value[1..]),
        b'-' => (-1, &value[1..]),
        _ => return None,
    };
    let (h, m) = rest.split_once(':')?;
    let (h, m): (i32, i32) = (h.parse().ok()?, m.parse().ok()?);
    if h > 23 || m > 59 {
        return None;
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Usage(format!("expected key=value, got {pair:?}")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let r = &mut self.run;
        let s = &mut self.sim;
        match key {
            "input" => r.input = parse_path(value),
            "out" => r.out = parse_path(value),
            "r" => r.r = parse(key, value)?,
            "seed" => r.seed = parse(key, value)?,
            "band_radius" => r.band_radius = parse(key, value)?,
            "k_b" => r.k_b = parse(key, value)?,
            "theta_min" => r.theta_min = parse(key, value)?,
            "theta_max" => r.theta_max = parse(key, value)?,
            "thresholds_as_quantiles" => r.thresholds_as_quantiles = parse_bool(key, value)?,
            "kappa_min" => r.kappa_min = parse(key, value)?,
            "snn_weights" => r.snn_weights = parse(key, value)?,
            "n_clusters" => r.n_clusters = parse(key, value)?,
            "singleton_threshold" => r.singleton_threshold = parse(key, value)?,
            "comparison_k" => r.comparison_k = if value.is_empty() { None } else { Some(parse(key, value)?) },
            "flag_threshold" => r.flag_threshold = parse(key, value)?,
            "timezone" => {
                r.timezone = parse_timezone(value)
                    .ok_or_else(|| Error::Usage(format!("invalid timezone {value:?}; use a fixed offset like +01:00")))?
            }
            "workers" => r.workers = parse(key, value)?,
            "cache_dir" => r.cache_dir = parse_path(value),
            "sim.n_substations" => s.network.n_substations = parse(key, value)?,
            "sim.days" => s.days = parse(key, value)?,
            "sim.start" => s.start = parse(key, value)?,
            "sim.branch_factor" => s.network.branch_factor = parse(key, value)?,
            "sim.street_continuation" => s.network.street_continuation = parse(key, value)?,
            "sim.street_size_min" => s.network.street_size.0 = parse(key, value)?,
            "sim.street_size_max" => s.network.street_size.1 = parse(key, value)?,
            "sim.main_length_min" => s.network.main_length_m.0 = parse(key, value)?,
            "sim.main_length_max" => s.network.main_length_m.1 = parse(key, value)?,
            "sim.service_length_min" => s.network.service_length_m.0 = parse(key, value)?,
            "sim.service_length_max" => s.network.service_length_m.1 = parse(key, value)?,
            "sim.flow_min" => s.network.flow_m3h.0 = parse(key, value)?,
            "sim.flow_max" => s.network.flow_m3h.1 = parse(key, value)?,
            "sim.delta_t_min" => s.network.delta_t_base.0 = parse(key, value)?,
            "sim.delta_t_max" => s.network.delta_t_base.1 = parse(key, value)?,
            "sim.loss_coefficient" => s.network.loss_coefficient = parse(key, value)?,
            "sim.delay_coefficient" => s.network.delay_coefficient = parse(key, value)?,
            "sim.reference_velocity" => s.network.reference_velocity = parse(key, value)?,
            "sim.noise_sigma" => s.noise.sigma = parse(key, value)?,
            "sim.spike_rate" => s.noise.spike_rate = parse(key, value)?,
            "sim.spike_magnitude" => s.noise.spike_magnitude = parse(key, value)?,
            "sim.resolution" => s.noise.resolution = parse(key, value)?,
            "sim.supply_faults" => s.faults.supply = parse(key, value)?,
            "sim.performance_faults" => s.faults.performance = parse(key, value)?,
            "sim.low_delta_t_fraction" => s.faults.low_delta_t_fraction = parse(key, value)?,
            "sim.faults_file" => s.faults_file = parse_path(value),
            _ => return Err(Error::Usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let r = &self.run;
        let s = &self.sim;
        let n = &s.network;
        vec![
            ("input", path_str(&r.input)),
            ("out", path_str(&r.out)),
            ("r", r.r.to_string()),
            ("seed", r.seed.to_string()),
            ("band_radius", r.band_radius.to_string()),
            ("k_b", r.k_b.to_string()),
            ("theta_min", r.theta_min.to_string()),
            ("theta_max", r.theta_max.to_string()),
            ("thresholds_as_quantiles", r.thresholds_as_quantiles.to_string()),
            ("kappa_min", r.kappa_min.to_string()),
            ("snn_weights", r.snn_weights.as_str().to_string()),
            ("n_clusters", r.n_clusters.to_string()),
            ("singleton_threshold", r.singleton_threshold.to_string()),
            ("comparison_k", r.comparison_k.map(|k| k.to_string()).unwrap_or_default()),
            ("flag_threshold", r.flag_threshold.to_string()),
            ("timezone", r.timezone.to_string()),
            ("workers", r.workers.to_string()),
            ("cache_dir", path_str(&r.cache_dir)),
            ("sim.n_substations", n.n_substations.to_string()),
            ("sim.days", s.days.to_string()),
            ("sim.start", s.start.to_string()),
            ("sim.branch_factor", n.branch_factor.to_string()),
            ("sim.street_continuation", n.street_continuation.to_string()),
            ("sim.street_size_min", n.street_size.0.to_string()),
            ("sim.street_size_max", n.street_size.1.to_string()),
            ("sim.main_length_min", n.main_length_m.0.to_string()),
            ("sim.main_length_max", n.main_length_m.1.to_string()),
            ("sim.service_length_min", n.service_length_m.0.to_string()),
            ("sim.service_length_max", n.service_length_m.1.to_string()),
            ("sim.flow_min", n.flow_m3h.0.to_string()),
            ("sim.flow_max", n.flow_m3h.1.to_string()),
            ("sim.delta_t_min", n.delta_t_base.0.to_string()),
            ("sim.delta_t_max", n.delta_t_base.1.to_string()),
            ("sim.loss_coefficient", n.loss_coefficient.to_string()),
            ("sim.delay_coefficient", n.delay_coefficient.to_string()),
            ("sim.reference_velocity", n.reference_velocity.to_string()),
            ("sim.noise_sigma", s.noise.sigma.to_string()),
            ("sim.spike_rate", s.noise.spike_rate.to_string()),
            ("sim.spike_magnitude", s.noise.spike_magnitude.to_string()),
            ("sim.resolution", s.noise.resolution.to_string()),
            ("sim.supply_faults", s.faults.supply.to_string()),
            ("sim.performance_faults", s.faults.performance.to_string()),
            ("sim.low_delta_t_fraction", s.faults.low_delta_t_fraction.to_string()),
            ("sim.faults_file", path_str(&s.faults_file)),
        ]
    }

    /// Run parameters that influence results, for embedding in outputs.
    /// Paths, worker count and cache location are left out so that outputs
    /// do not depend on where or how fast a run happened.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        self.entries()
            .into_iter()
            .filter(|(k, _)| !k.starts_with("sim.") && !matches!(*k, "input" | "out" | "workers" | "cache_dir"))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        let bad = |m: &str| Err(Error::Usage(m.to_string()));
        if r.r < 2 {
            return bad("r must be at least 2: merging needs two daily graphs");
        }
        if r.k_b < 1 {
            return bad("k_b must be at least 1");
        }
        if r.n_clusters < 1 {
            return bad("n_clusters must be at least 1");
        }
        if !(r.kappa_min.is_finite() && r.kappa_min <= 1.0) {
            return bad("kappa_min must be a finite value at most 1");
        }
        if r.comparison_k == Some(0) {
            return bad("comparison_k must be at least 1");
        }
        if !(0.0..=1.0).contains(&r.flag_threshold) {
            return bad("flag_threshold must lie in [0, 1]");
        }
        self.run.knn_params().validate().map_err(|e| Error::Usage(e.to_string()))?;
        let n = &self.sim.network;
        for (name, (lo, hi)) in [
            ("main_length", n.main_length_m),
            ("service_length", n.service_length_m),
            ("flow", n.flow_m3h),
            ("delta_t", n.delta_t_base),
        ] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::Usage(format!("sim.{name}_min must be positive and at most sim.{name}_max")));
            }
        }
        if !(0.0..=1.0).contains(&n.street_continuation) {
            return bad("sim.street_continuation must lie in [0, 1]");
        }
        if n.street_size.0 < 1 || n.street_size.0 > n.street_size.1 {
            return bad("sim.street_size_min must be at least 1 and at most sim.street_size_max");
        }
        if self.sim.days < 1 {
            return bad("sim.days must be at least 1");
        }
        if !(self.sim.noise.sigma >= 0.0) || !(0.0..=1.0).contains(&self.sim.noise.spike_rate) {
            return bad("sim.noise_sigma must be nonnegative and sim.spike_rate within [0, 1]");
        }
        if !(self.sim.faults.low_delta_t_fraction > 0.0 && self.sim.faults.low_delta_t_fraction < 1.0) {
            return bad("sim.low_delta_t_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}
