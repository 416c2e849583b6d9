//! Synthetic district-heating networks with injected faults.
//!
//! A network is a random tree of substations rooted at the plant. Node 0 is
//! the substation co-located with the heat source and sees the source profile
//! with no delay or loss. Every other substation sees the source profile
//! shifted by the transport delay along its path and lowered by the
//! cumulative heat loss, plus measurement noise.
//!
//! Model assumptions (none of these are field-calibrated):
//!
//! * substations are grouped into streets of short service pipes; each
//!   street hangs off an existing substation through one long main, and the
//!   street index is the substation's `branch`;
//! * transport delay per pipe is `delay_coefficient * km * v_ref / v`, where
//!   `v` is the velocity implied by the downstream flow and a standard pipe
//!   diameter; the cumulative delay is rounded to whole samples;
//! * heat loss is `loss_coefficient` degrees per km of path;
//! * noise is Gaussian (default sigma 0.3 °C) plus rare single-sample spikes,
//!   and readings are quantised to meter resolution.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Timelike, Utc};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use shedad_core::rng::SplitMix64;
use shedad_core::series::{SubstationSeries, SAMPLES_PER_DAY, STEP_SECONDS};

use crate::error::{Error, Result};

/// Standard inner diameters (m) used to size pipes.
const PIPE_DIAMETERS: [f64; 16] = [
    0.025, 0.032, 0.040, 0.050, 0.065, 0.080, 0.100, 0.125, 0.150, 0.200, 0.250, 0.300, 0.350, 0.400, 0.450,
    0.500,
];

/// Design velocity used when sizing pipes (m/s).
const DESIGN_VELOCITY: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n_substations: usize,
    pub seed: u64,
    /// Maximum children per node; 1 yields a path.
    pub branch_factor: usize,
    /// Probability that a substation extends its street from the previous
    /// substation rather than from a random one on the same street.
    pub street_continuation: f64,
    /// Range of substations per street (the plant's own street included).
    pub street_size: (usize, usize),
    pub main_length_m: (f64, f64),
    pub service_length_m: (f64, f64),
    pub flow_m3h: (f64, f64),
    /// Range of per-substation base ΔT (°C).
    pub delta_t_base: (f64, f64),
    /// °C lost per km of supply path.
    pub loss_coefficient: f64,
    /// Samples of delay per km at `reference_velocity`.
    pub delay_coefficient: f64,
    pub reference_velocity: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            n_substations: 248,
            seed: 0,
            branch_factor: 3,
            street_continuation: 0.7,
            street_size: (12, 20),
            main_length_m: (500.0, 2500.0),
            service_length_m: (5.0, 20.0),
            flow_m3h: (0.5, 3.0),
            delta_t_base: (27.0, 33.0),
            loss_coefficient: 2.0,
            // 1 km at 1 m/s is 1000 s, i.e. 10/3 five-minute samples.
            delay_coefficient: 10.0 / 3.0,
            reference_velocity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipe {
    pub from: usize,
    pub to: usize,
    pub length_m: f64,
    pub diameter_m: f64,
    pub main: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub ids: Vec<String>,
    pub parent: Vec<Option<usize>>,
    /// Pipe feeding each non-root node, in node order (`pipes[i - 1].to == i`).
    pub pipes: Vec<Pipe>,
    pub flow_m3h: Vec<f64>,
    pub delta_t_base: Vec<f64>,
    pub coords: Vec<(f64, f64)>,
    pub branch: Vec<usize>,
    pub depth: Vec<usize>,
    pub path_length_m: Vec<f64>,
    /// Cumulative transport delay in whole samples.
    pub delay_samples: Vec<usize>,
    /// Cumulative heat loss in °C.
    pub loss: Vec<f64>,
}

impl Network {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Node indices from the root down to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut x = node;
        while let Some(p) = self.parent[x] {
            path.push(p);
            x = p;
        }
        path.reverse();
        path
    }
}

pub fn substation_id(index: usize) -> String {
    format!("S{index:04}")
}

fn uniform(rng: &mut SplitMix64, range: (f64, f64)) -> f64 {
    range.0 + (range.1 - range.0) * rng.unit_f64()
}

pub fn generate_network(spec: &NetworkSpec) -> Result<Network> {
    let n = spec.n_substations;
    if n < 2 {
        return Err(Error::Usage(format!("a network needs at least 2 substations, got {n}")));
    }
    if spec.branch_factor < 1 {
        return Err(Error::Usage("branch_factor must be at least 1".into()));
    }
    let positive = [
        spec.main_length_m.0,
        spec.service_length_m.0,
        spec.flow_m3h.0,
        spec.delta_t_base.0,
        spec.reference_velocity,
    ];
    if positive.iter().any(|&v| !(v > 0.0)) || spec.loss_coefficient < 0.0 || spec.delay_coefficient < 0.0 {
        return Err(Error::Usage("pipe lengths, flows, ΔT and velocity must be positive".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);

    if spec.street_size.0 < 1 || spec.street_size.0 > spec.street_size.1 {
        return Err(Error::Usage("street sizes must satisfy 1 <= min <= max".into()));
    }
    // A remainder too short to form a street of its own joins the last one.
    let street_len = |rng: &mut SplitMix64, remaining: usize| {
        let len = spec.street_size.0 + rng.below((spec.street_size.1 - spec.street_size.0 + 1) as u64) as usize;
        if remaining < len + spec.street_size.0 { remaining } else { len }
    };

    let mut parent = vec![None; n];
    let mut children = vec![0usize; n];
    let mut main = vec![false; n];
    let mut length = vec![0.0; n];
    let mut street: Vec<usize> = vec![0];
    let mut target = street_len(&mut rng, n);
    for i in 1..n {
        let eligible = |nodes: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
            nodes.filter(|&j| children[j] < spec.branch_factor).collect()
        };
        let starts_street = street.len() >= target;
        let mut pool = if starts_street {
            Vec::new()
        } else if children[i - 1] < spec.branch_factor && rng.unit_f64() < spec.street_continuation {
            vec![i - 1]
        } else {
            eligible(&mut street.iter().copied())
        };
        if pool.is_empty() {
            pool = eligible(&mut (0..i));
        }
        let p = pool[rng.below(pool.len() as u64) as usize];
        // A street that cannot grow locally continues through a main.
        let is_main = starts_street || !street.contains(&p);
        if is_main {
            street.clear();
            target = street_len(&mut rng, n - i);
        }
        street.push(i);
        parent[i] = Some(p);
        children[p] += 1;
        main[i] = is_main;
        length[i] = if is_main { uniform(&mut rng, spec.main_length_m) } else { uniform(&mut rng, spec.service_length_m) };
    }

    let flow_m3h: Vec<f64> = (0..n).map(|_| uniform(&mut rng, spec.flow_m3h)).collect();
    let delta_t_base: Vec<f64> = (0..n).map(|_| uniform(&mut rng, spec.delta_t_base)).collect();

    // Parents always precede children, so reverse order accumulates subtrees.
    let mut downstream = flow_m3h.clone();
    for i in (1..n).rev() {
        let p = parent[i].unwrap();
        downstream[p] += downstream[i];
    }

    let mut pipes = Vec::with_capacity(n - 1);
    let mut depth = vec![0usize; n];
    let mut branch = vec![0usize; n];
    let mut path_length_m = vec![0.0; n];
    let mut delay = vec![0.0f64; n];
    let mut heading = vec![0.0f64; n];
    let mut coords = vec![(0.0, 0.0); n];
    let mut next_branch = 1;
    for i in 1..n {
        let p = parent[i].unwrap();
        let q = downstream[i] / 3600.0;
        let needed = (4.0 * q / (PI * DESIGN_VELOCITY)).sqrt();
        let diameter = PIPE_DIAMETERS
            .iter()
            .copied()
            .find(|&d| d >= needed)
            .unwrap_or(PIPE_DIAMETERS[PIPE_DIAMETERS.len() - 1]);
        let velocity = q / (PI * diameter * diameter / 4.0);
        let km = length[i] / 1000.0;

        depth[i] = depth[p] + 1;
        branch[i] = if main[i] {
            next_branch += 1;
            next_branch - 1
        } else {
            branch[p]
        };
        path_length_m[i] = path_length_m[p] + length[i];
        delay[i] = delay[p] + spec.delay_coefficient * km * spec.reference_velocity / velocity;

        let turn = if p == 0 { 2.0 * PI * rng.unit_f64() } else { (rng.unit_f64() - 0.5) * 1.2 };
        heading[i] = heading[p] + turn;
        coords[i] = (coords[p].0 + length[i] * heading[i].cos(), coords[p].1 + length[i] * heading[i].sin());
        pipes.push(Pipe { from: p, to: i, length_m: length[i], diameter_m: diameter, main: main[i] });
    }

    Ok(Network {
        ids: (0..n).map(substation_id).collect(),
        parent,
        pipes,
        flow_m3h,
        delta_t_base,
        coords,
        branch,
        depth,
        loss: path_length_m.iter().map(|m| spec.loss_coefficient * m / 1000.0).collect(),
        path_length_m,
        delay_samples: delay.iter().map(|d| d.round() as usize).collect(),
    })
}

/// Simulation window on the five-minute grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: DateTime<Utc>,
    pub samples: usize,
}

impl Window {
    pub fn days(start: DateTime<Utc>, days: usize) -> Self {
        Self { start, samples: days * SAMPLES_PER_DAY }
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.start + Duration::seconds(self.samples as i64 * STEP_SECONDS as i64)
    }

    pub fn timestamp(&self, index: usize) -> DateTime<Utc> {
        self.start + Duration::seconds(index as i64 * STEP_SECONDS as i64)
    }
}

/// Plant supply temperature with `lead` extra samples before the window so
/// that delayed substations have history to draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceProfile {
    pub lead: usize,
    pub supply: Vec<f64>,
    pub outdoor: Vec<f64>,
}

impl SourceProfile {
    /// Source temperature seen `delay` samples late at window index `t`.
    pub fn delayed(&self, t: usize, delay: usize) -> f64 {
        let idx = (self.lead + t).saturating_sub(delay);
        self.supply[idx]
    }

    pub fn constant(supply: f64, outdoor: f64, window: &Window, lead: usize) -> Self {
        Self { lead, supply: vec![supply; lead + window.samples], outdoor: vec![outdoor; window.samples] }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Outdoor temperature (a sinusoidal weather driver) and the plant's supply
/// temperature (heating curve, morning boost and random setpoint changes).
pub fn source_profile(window: &Window, lead: usize, seed: u64) -> SourceProfile {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_50C0_u64);
    let total = lead + window.samples;
    let days = total.div_ceil(SAMPLES_PER_DAY) + 1;
    let phase = 2.0 * PI * rng.unit_f64();
    let daily_mean: Vec<f64> =
        (0..=days).map(|d| 1.0 + 6.0 * (2.0 * PI * d as f64 / 13.0 + phase).sin() + 3.0 * (rng.unit_f64() - 0.5)).collect();

    let first = window.start - Duration::seconds(lead as i64 * STEP_SECONDS as i64);
    let start_hour = first.hour() as f64 + first.minute() as f64 / 60.0;
    let hours_at = |i: usize| start_hour + i as f64 * STEP_SECONDS as f64 / 3600.0;

    let outdoor_all: Vec<f64> = (0..total)
        .map(|i| {
            let h = hours_at(i);
            let day = (h / 24.0).floor() as usize;
            let frac = (h / 24.0).fract();
            let mean = daily_mean[day] + (daily_mean[day + 1] - daily_mean[day]) * frac;
            (mean + 3.5 * (2.0 * PI * (h - 9.0) / 24.0).sin()).clamp(-9.0, 11.0)
        })
        .collect();

    let mut supply: Vec<f64> = (0..total)
        .map(|i| {
            let hod = hours_at(i) % 24.0;
            let curve = (78.0 + 1.1 * (10.0 - outdoor_all[i])).clamp(70.0, 110.0);
            let boost = 4.0 * (smoothstep((hod - 5.0) / 0.5) - smoothstep((hod - 8.0) / 0.5));
            curve + boost
        })
        .collect();

    // Setpoint changes: a few per day, each held for one to four hours.
    let events = 3 * days;
    for _ in 0..events {
        let at = rng.below(total as u64) as usize;
        let len = 12 + rng.below(37) as usize;
        let sign = if rng.unit_f64() < 0.5 { -1.0 } else { 1.0 };
        let amp = sign * (1.5 + 2.5 * rng.unit_f64());
        for (k, v) in supply.iter_mut().enumerate().skip(at).take(len) {
            let edge = ((k - at).min(at + len - 1 - k) as f64 / 3.0).min(1.0);
            *v += amp * edge;
        }
    }

    SourceProfile { lead, supply, outdoor: outdoor_all[lead..].to_vec() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// Single-sample supply readings at `magnitude` °C, on average one per
    /// hour at times fixed by the substation id.
    Spike,
    /// Supply stuck at `magnitude` °C.
    Flatline,
    /// Supply and return sensors swapped.
    ReturnExceedsSupply,
    /// Return reads the supply temperature.
    DeltaTZero,
    /// Supply and return oscillate with amplitude `magnitude` °C; period
    /// (30 to 60 min) and phase are fixed by the substation id.
    Oscillation,
    /// No flow between 22:00 and 06:00 UTC; supply and return sag by
    /// `magnitude` °C.
    DaytimeOnlyDemand,
    /// Return raised so that ΔT shrinks by the fraction `magnitude`.
    LowDeltaT,
}

impl FaultKind {
    pub const SUPPLY: [FaultKind; 6] = [
        FaultKind::Spike,
        FaultKind::Flatline,
        FaultKind::ReturnExceedsSupply,
        FaultKind::DeltaTZero,
        FaultKind::Oscillation,
        FaultKind::DaytimeOnlyDemand,
    ];

    pub fn is_performance(self) -> bool {
        self == FaultKind::LowDeltaT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub substation_id: String,
    pub fault_kind: FaultKind,
    pub start: DateTime<Utc>,
    /// Minutes.
    pub duration: u64,
    pub magnitude: f64,
}

impl FaultSpec {
    /// Window sample indices covered by this fault.
    fn sample_range(&self, window: &Window) -> std::ops::Range<usize> {
        let offset = (self.start - window.start).num_seconds().max(0) as usize;
        let first = offset.div_ceil(STEP_SECONDS as usize);
        let end_secs = offset + self.duration as usize * 60;
        let last = end_secs.div_ceil(STEP_SECONDS as usize).min(window.samples);
        first..last
    }
}

/// Checks faults against the network and window before anything is simulated.
pub fn validate_faults(network: &Network, window: &Window, faults: &[FaultSpec]) -> Result<()> {
    let mut supply = BTreeSet::new();
    let mut performance = BTreeSet::new();
    for f in faults {
        if network.index_of(&f.substation_id).is_none() {
            return Err(Error::Data(format!("fault references unknown substation `{}`", f.substation_id)));
        }
        if !(f.magnitude > 0.0) || !f.magnitude.is_finite() {
            return Err(Error::Data(format!("fault on `{}` needs a positive magnitude", f.substation_id)));
        }
        if f.fault_kind == FaultKind::LowDeltaT && f.magnitude >= 1.0 {
            return Err(Error::Data(format!(
                "low_delta_t fault on `{}` takes a fraction below 1, got {}",
                f.substation_id, f.magnitude
            )));
        }
        let end = f.start + Duration::minutes(f.duration as i64);
        if f.duration == 0 || f.start < window.start || end > window.end() {
            return Err(Error::Data(format!(
                "fault on `{}` ({} + {} min) lies outside the simulation window {} .. {}",
                f.substation_id,
                f.start,
                f.duration,
                window.start,
                window.end()
            )));
        }
        if f.fault_kind.is_performance() {
            performance.insert(f.substation_id.clone());
        } else {
            supply.insert(f.substation_id.clone());
        }
    }
    if let Some(both) = supply.intersection(&performance).next() {
        return Err(Error::Data(format!("substation `{both}` carries both supply and performance faults")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    /// Per-sample probability of a measurement spike.
    pub spike_rate: f64,
    pub spike_magnitude: f64,
    /// Meter resolution in °C; 0 disables quantisation.
    pub resolution: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { sigma: 0.3, spike_rate: 1e-4, spike_magnitude: 5.0, resolution: 0.01 }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { sigma: 0.0, spike_rate: 0.0, spike_magnitude: 0.0, resolution: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstationTruth {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub branch: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub substations: Vec<SubstationTruth>,
    pub supply_anomalies: Vec<String>,
    pub performance_anomalies: Vec<String>,
    pub faults: Vec<FaultSpec>,
}

impl GroundTruth {
    pub fn supply_set(&self) -> BTreeSet<String> {
        self.supply_anomalies.iter().cloned().collect()
    }

    pub fn performance_set(&self) -> BTreeSet<String> {
        self.performance_anomalies.iter().cloned().collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }
}

fn demand(outdoor: f64, hour_of_day: f64) -> f64 {
    let base = ((15.0 - outdoor) / 25.0).clamp(0.0, 1.0);
    let shape = if (6.0..9.0).contains(&hour_of_day) {
        1.3
    } else if (17.0..21.0).contains(&hour_of_day) {
        1.2
    } else if !(6.0..22.0).contains(&hour_of_day) {
        0.8
    } else {
        1.0
    };
    (base * shape).clamp(0.0, 1.0)
}

fn quantise(v: f64, resolution: f64) -> f64 {
    if resolution > 0.0 {
        (v / resolution).round() * resolution
    } else {
        v
    }
}

/// Simulates every substation over `window`. Deterministic in
/// `(network, source, faults, window, noise, seed)`.
pub fn simulate(
    network: &Network,
    source: &SourceProfile,
    faults: &[FaultSpec],
    window: &Window,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<(Vec<SubstationSeries>, GroundTruth)> {
    validate_faults(network, window, faults)?;
    if source.outdoor.len() != window.samples || source.supply.len() != source.lead + window.samples {
        return Err(Error::Usage("source profile does not cover the simulation window".into()));
    }
    let normal = if noise.sigma > 0.0 {
        Some(Normal::new(0.0, noise.sigma).map_err(|e| Error::Usage(e.to_string()))?)
    } else {
        None
    };
    let start_hour = window.start.hour() as f64 + window.start.minute() as f64 / 60.0;
    let hod = |t: usize| (start_hour + t as f64 * STEP_SECONDS as f64 / 3600.0) % 24.0;
    let demand_at: Vec<f64> = (0..window.samples).map(|t| demand(source.outdoor[t], hod(t))).collect();

    let mut series = Vec::with_capacity(network.len());
    for i in 0..network.len() {
        let mut rng = SplitMix64::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (i as u64 + 1));
        let jitter = |rng: &mut SplitMix64| match &normal {
            Some(n) => n.sample(rng),
            None => 0.0,
        };
        let delay = network.delay_samples[i].min(source.lead);
        let mut supply = Vec::with_capacity(window.samples);
        let mut ret = Vec::with_capacity(window.samples);
        let mut flow = Vec::with_capacity(window.samples);
        for t in 0..window.samples {
            let clean = source.delayed(t, delay) - network.loss[i];
            let dt = network.delta_t_base[i] * (0.8 + 0.4 * demand_at[t]);
            let mut s = clean + jitter(&mut rng);
            if noise.spike_rate > 0.0 && rng.random_bool(noise.spike_rate.min(1.0)) {
                s += noise.spike_magnitude;
            }
            supply.push(s);
            ret.push(clean - dt + jitter(&mut rng));
            flow.push((network.flow_m3h[i] * (0.3 + 0.9 * demand_at[t]) + 0.01 * jitter(&mut rng)).max(0.0));
        }
        for f in faults.iter().filter(|f| f.substation_id == network.ids[i]) {
            apply_fault(f, window, &hod, &mut supply, &mut ret, &mut flow);
        }
        let q = |v: Vec<f64>, r: f64| v.into_iter().map(|x| quantise(x, r)).collect::<Vec<_>>();
        let flow_resolution = if noise.resolution > 0.0 { 0.001 } else { 0.0 };
        series.push(SubstationSeries::new(
            network.ids[i].clone(),
            window.start.timestamp(),
            q(supply, noise.resolution),
            q(ret, noise.resolution),
            q(flow, flow_resolution),
            q(source.outdoor.clone(), noise.resolution),
        )?);
    }

    let mut supply_ids = BTreeSet::new();
    let mut perf_ids = BTreeSet::new();
    for f in faults {
        if f.fault_kind.is_performance() {
            perf_ids.insert(f.substation_id.clone());
        } else {
            supply_ids.insert(f.substation_id.clone());
        }
    }
    let truth = GroundTruth {
        substations: (0..network.len())
            .map(|i| SubstationTruth {
                id: network.ids[i].clone(),
                x: network.coords[i].0,
                y: network.coords[i].1,
                branch: network.branch[i],
            })
            .collect(),
        supply_anomalies: supply_ids.into_iter().collect(),
        performance_anomalies: perf_ids.into_iter().collect(),
        faults: faults.to_vec(),
    };
    Ok((series, truth))
}

fn apply_fault(
    f: &FaultSpec,
    window: &Window,
    hour_of_day: &dyn Fn(usize) -> f64,
    supply: &mut [f64],
    ret: &mut [f64],
    flow: &mut [f64],
) {
    let range = f.sample_range(window);
    let first = range.start;
    let m = f.magnitude;
    // Timing details differ per substation so that two faults of the same
    // kind do not produce identical profiles.
    let mut timing = SplitMix64::new(id_hash(&f.substation_id));
    let period = 6.0 + timing.below(7) as f64;
    let phase = 2.0 * PI * timing.unit_f64();
    for t in range {
        match f.fault_kind {
            FaultKind::Spike => {
                if t == first || timing.below(12) == 0 {
                    supply[t] = m;
                }
            }
            FaultKind::Flatline => supply[t] = m,
            FaultKind::ReturnExceedsSupply => std::mem::swap(&mut supply[t], &mut ret[t]),
            FaultKind::DeltaTZero => ret[t] = supply[t],
            FaultKind::Oscillation => {
                let wave = m * (2.0 * PI * (t - first) as f64 / period + phase).sin();
                supply[t] += wave;
                ret[t] += wave;
            }
            FaultKind::DaytimeOnlyDemand => {
                let h = hour_of_day(t);
                if !(6.0..22.0).contains(&h) {
                    flow[t] = 0.0;
                    supply[t] -= m;
                    ret[t] -= m;
                }
            }
            FaultKind::LowDeltaT => ret[t] += m * (supply[t] - ret[t]),
        }
    }
}

/// FNV-1a over the id bytes.
fn id_hash(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Magnitude range drawn from when faults are planned at random.
pub fn magnitude_range(kind: FaultKind) -> (f64, f64) {
    match kind {
        FaultKind::Spike => (120.0, 150.0),
        FaultKind::Flatline => (45.0, 70.0),
        FaultKind::ReturnExceedsSupply | FaultKind::DeltaTZero => (1.0, 1.0),
        FaultKind::Oscillation => (3.0, 8.0),
        FaultKind::DaytimeOnlyDemand => (8.0, 20.0),
        FaultKind::LowDeltaT => (0.4, 0.4),
    }
}

/// How many faults of each class to inject at random.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultPlan {
    pub supply: usize,
    pub performance: usize,
    /// Supply fault kinds, assigned round-robin.
    pub supply_kinds: Vec<FaultKind>,
    pub low_delta_t_fraction: f64,
}

impl Default for FaultPlan {
    fn default() -> Self {
        Self { supply: 16, performance: 14, supply_kinds: FaultKind::SUPPLY.to_vec(), low_delta_t_fraction: 0.4 }
    }
}

/// Picks distinct substations and gives each a whole-window fault.
pub fn plan_faults(network: &Network, window: &Window, plan: &FaultPlan, seed: u64) -> Result<Vec<FaultSpec>> {
    let total = plan.supply + plan.performance;
    if total > network.len() {
        return Err(Error::Usage(format!(
            "cannot place {total} faults on {} substations",
            network.len()
        )));
    }
    if plan.supply > 0 && plan.supply_kinds.is_empty() {
        return Err(Error::Usage("no supply fault kinds to choose from".into()));
    }
    let picks = shedad_core::rng::sample_indices(network.len(), total, seed ^ 0xFA17_u64)
        .expect("total checked against network size");
    let minutes = window.samples as u64 * STEP_SECONDS as u64 / 60;
    let mut rng = SplitMix64::new(seed ^ 0x3A6_u64);
    let mut faults = Vec::with_capacity(total);
    for (n, &idx) in picks.iter().enumerate() {
        let (kind, magnitude) = if n < plan.supply {
            let kind = plan.supply_kinds[n % plan.supply_kinds.len()];
            (kind, uniform(&mut rng, magnitude_range(kind)))
        } else {
            (FaultKind::LowDeltaT, plan.low_delta_t_fraction)
        };
        faults.push(FaultSpec {
            substation_id: network.ids[idx].clone(),
            fault_kind: kind,
            start: window.start,
            duration: minutes,
            magnitude,
        });
    }
    faults.sort_by(|a, b| a.substation_id.cmp(&b.substation_id));
    Ok(faults)
}

pub const DATA_FILE: &str = "data.csv";
pub const TRUTH_FILE: &str = "ground_truth.json";

pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Writes the measurement CSV (ingest schema, no coordinates) to `writer`.
pub fn write_data_csv<W: Write>(series: &[SubstationSeries], preamble: &[String], writer: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    for line in preamble {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "timestamp,substation_id,supply_temp,return_temp,flow,outdoor_temp")?;
    for s in series {
        let start = DateTime::<Utc>::from_timestamp(s.start, 0).unwrap_or_default();
        for t in 0..s.len() {
            let ts = start + Duration::seconds(t as i64 * s.step as i64);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                format_timestamp(ts),
                s.id,
                s.supply[t],
                s.return_temp[t],
                s.flow[t],
                s.outdoor[t]
            )?;
        }
    }
    w.flush()
}

/// Writes `data.csv` and `ground_truth.json` into `out_dir`.
pub fn emit_csv(
    series: &[SubstationSeries],
    truth: &GroundTruth,
    out_dir: &Path,
    preamble: &[String],
    force: bool,
) -> Result<Vec<PathBuf>> {
    if series.is_empty() {
        return Err(Error::Usage("nothing to emit: no series".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let data = out_dir.join(DATA_FILE);
    let gt = out_dir.join(TRUTH_FILE);
    crate::formats::ensure_writable(&data, force)?;
    crate::formats::ensure_writable(&gt, force)?;
    let file = fs::File::create(&data).map_err(|e| Error::io(&data, e))?;
    write_data_csv(series, preamble, file).map_err(|e| Error::io(&data, e))?;
    crate::formats::write_json(&gt, truth)?;
    Ok(vec![data, gt])
}
