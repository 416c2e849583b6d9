//! Meter CSV ingest, validation onto the five-minute grid, daily
//! segmentation and seeded day sampling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};
use shedad_core::rng::sample_indices;
use shedad_core::series::{SubstationSeries, SAMPLES_PER_DAY, STEP_SECONDS};

use crate::error::{Error, Result};

pub const SUPPLY_RANGE: (f64, f64) = (-50.0, 200.0);

/// Names of the input columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub timestamp: String,
    pub substation_id: String,
    pub supply_temp: String,
    pub return_temp: String,
    pub flow: String,
    pub outdoor_temp: String,
    pub x: String,
    pub y: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            substation_id: "substation_id".into(),
            supply_temp: "supply_temp".into(),
            return_temp: "return_temp".into(),
            flow: "flow".into(),
            outdoor_temp: "outdoor_temp".into(),
            x: "x".into(),
            y: "y".into(),
        }
    }
}

/// One row of meter data. Empty cells read as NaN and are treated as missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawReading {
    pub timestamp: DateTime<Utc>,
    pub supply_temp: f64,
    pub return_temp: f64,
    pub flow: f64,
    pub outdoor_temp: f64,
    pub x: Option<f64>,
    pub y: Option<f64>,
}

/// Readings grouped by substation id, each group sorted by timestamp.
pub type Readings = BTreeMap<String, Vec<RawReading>>;

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc())
}

pub fn load_csv(path: &Path, columns: &ColumnMap) -> Result<Readings> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, columns).map_err(|e| match e {
        Error::Csv { source, .. } => Error::Csv { path: path.to_path_buf(), source },
        other => other,
    })
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
}

pub fn read_csv<R: Read>(reader: R, columns: &ColumnMap) -> Result<Readings> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let csv_err = |source| Error::Csv { path: "<input>".into(), source };
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.is_empty() {
        return Err(Error::Schema("input is empty: no header row".into()));
    }
    let ts_col = column(&headers, &columns.timestamp)?;
    let id_col = column(&headers, &columns.substation_id)?;
    let value_cols = [
        column(&headers, &columns.supply_temp)?,
        column(&headers, &columns.return_temp)?,
        column(&headers, &columns.flow)?,
        column(&headers, &columns.outdoor_temp)?,
    ];
    let x_col = column(&headers, &columns.x).ok();
    let y_col = column(&headers, &columns.y).ok();
    let names = [&columns.supply_temp, &columns.return_temp, &columns.flow, &columns.outdoor_temp];

    let mut out: Readings = BTreeMap::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(source) => {
                let line = source.position().map_or(0, |p| p.line());
                return Err(Error::Parse { line, message: source.to_string() });
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let number = |i: usize, name: &str| -> Result<f64> {
            let s = field(i);
            if s.is_empty() {
                return Ok(f64::NAN);
            }
            s.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("`{name}` is not a number: {s:?}") })
        };
        let ts = field(ts_col);
        let timestamp = parse_timestamp(ts)
            .ok_or_else(|| Error::Parse { line, message: format!("unreadable timestamp {ts:?}") })?;
        let id = field(id_col);
        if id.is_empty() {
            return Err(Error::Parse { line, message: "empty substation id".into() });
        }
        let mut values = [0.0; 4];
        for (k, &c) in value_cols.iter().enumerate() {
            values[k] = number(c, names[k])?;
        }
        let optional = |c: Option<usize>, name: &str| -> Result<Option<f64>> {
            match c {
                Some(c) if !field(c).is_empty() => number(c, name).map(Some),
                _ => Ok(None),
            }
        };
        let reading = RawReading {
            timestamp,
            supply_temp: values[0],
            return_temp: values[1],
            flow: values[2],
            outdoor_temp: values[3],
            x: optional(x_col, &columns.x)?,
            y: optional(y_col, &columns.y)?,
        };
        match out.get_mut(id) {
            Some(v) => v.push(reading),
            None => {
                out.insert(id.to_string(), vec![reading]);
            }
        }
    }
    for (id, rows) in out.iter_mut() {
        rows.sort_by_key(|r| r.timestamp);
        if let Some(w) = rows.windows(2).find(|w| w[0].timestamp == w[1].timestamp) {
            return Err(Error::Data(format!("duplicate reading for substation `{id}` at {}", w[0].timestamp)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub substation_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aligned {
    pub series: Vec<SubstationSeries>,
    pub excluded: Vec<Exclusion>,
    pub start: DateTime<Utc>,
    pub samples: usize,
}

fn defect(rows: &[RawReading], start: i64, samples: usize) -> Option<String> {
    let step = STEP_SECONDS as i64;
    if let Some(r) = rows.iter().find(|r| r.timestamp.timestamp() % step != 0) {
        return Some(format!("timestamp {} is off the five-minute grid", r.timestamp));
    }
    if rows.len() < samples {
        let present: BTreeSet<i64> = rows.iter().map(|r| r.timestamp.timestamp()).collect();
        let missing = (0..samples as i64).map(|k| start + k * step).filter(|t| !present.contains(t)).count();
        let first = (0..samples as i64).map(|k| start + k * step).find(|t| !present.contains(t)).unwrap_or(start);
        let first = DateTime::<Utc>::from_timestamp(first, 0).unwrap_or_default();
        return Some(format!("{missing} missing sample(s), first at {first}"));
    }
    for r in rows {
        let what = if r.supply_temp.is_nan() {
            "supply_temp"
        } else if r.return_temp.is_nan() {
            "return_temp"
        } else if r.flow.is_nan() {
            "flow"
        } else if r.outdoor_temp.is_nan() {
            "outdoor_temp"
        } else {
            ""
        };
        if !what.is_empty() {
            return Some(format!("missing {what} at {}", r.timestamp));
        }
        for (name, v) in [("supply_temp", r.supply_temp), ("return_temp", r.return_temp)] {
            if !(SUPPLY_RANGE.0..=SUPPLY_RANGE.1).contains(&v) {
                return Some(format!("{name} {v} outside [{}, {}] at {}", SUPPLY_RANGE.0, SUPPLY_RANGE.1, r.timestamp));
            }
        }
        if r.flow < 0.0 || !r.flow.is_finite() || !r.outdoor_temp.is_finite() {
            return Some(format!("invalid flow or outdoor value at {}", r.timestamp));
        }
    }
    None
}

/// Aligns every substation onto the common window spanning the earliest to
/// the latest timestamp in the input. A substation with any missing or
/// invalid sample in any channel is excluded for the whole window.
pub fn validate_and_align(readings: &Readings) -> Result<Aligned> {
    let bounds = readings.values().flat_map(|rows| [rows.first(), rows.last()]).flatten().map(|r| r.timestamp);
    let (Some(start), Some(end)) = (bounds.clone().min(), bounds.max()) else {
        return Ok(Aligned { series: Vec::new(), excluded: Vec::new(), start: DateTime::<Utc>::UNIX_EPOCH, samples: 0 });
    };
    let step = STEP_SECONDS as i64;
    let samples = ((end - start).num_seconds() / step + 1) as usize;
    let mut series = Vec::new();
    let mut excluded = Vec::new();
    for (id, rows) in readings {
        if let Some(reason) = defect(rows, start.timestamp(), samples) {
            excluded.push(Exclusion { substation_id: id.clone(), reason });
            continue;
        }
        let take = |f: fn(&RawReading) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        series.push(SubstationSeries::new(
            id.clone(),
            start.timestamp(),
            take(|r| r.supply_temp),
            take(|r| r.return_temp),
            take(|r| r.flow),
            take(|r| r.outdoor_temp),
        )?);
    }
    if series.is_empty() {
        return Err(Error::Data(format!("all {} substations were excluded", excluded.len())));
    }
    Ok(Aligned { series, excluded, start, samples })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyProfile {
    pub substation_id: String,
    pub date: NaiveDate,
    pub supply: Vec<f64>,
}

/// Splits a series into complete local calendar days; partial days at either
/// end are dropped.
pub fn segment_days(series: &SubstationSeries, offset: FixedOffset) -> Vec<DailyProfile> {
    let Some(start) = DateTime::<Utc>::from_timestamp(series.start, 0) else {
        return Vec::new();
    };
    let local = start.with_timezone(&offset);
    let since_midnight = local.num_seconds_from_midnight() as usize;
    let step = series.step as usize;
    let first = if since_midnight == 0 { 0 } else { (86_400 - since_midnight).div_ceil(step) };
    if since_midnight % step != 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut at = first;
    while at + SAMPLES_PER_DAY <= series.len() {
        let date = (start + chrono::Duration::seconds((at * step) as i64)).with_timezone(&offset).date_naive();
        out.push(DailyProfile {
            substation_id: series.id.clone(),
            date,
            supply: series.supply[at..at + SAMPLES_PER_DAY].to_vec(),
        });
        at += SAMPLES_PER_DAY;
    }
    out
}

/// Draws `r` distinct dates without replacement; returned in ascending order.
pub fn sample_days(dates: &[NaiveDate], r: usize, seed: u64) -> Result<Vec<NaiveDate>> {
    let unique: Vec<NaiveDate> = dates.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let picks = sample_indices(unique.len(), r, seed).ok_or_else(|| {
        Error::Usage(format!("cannot sample {r} days from {} available complete days", unique.len()))
    })?;
    let mut out: Vec<NaiveDate> = picks.into_iter().map(|i| unique[i]).collect();
    out.sort();
    Ok(out)
}
