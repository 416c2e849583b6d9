//! Parallel distance-matrix construction, CSV dumps and the on-disk DTW
//! cache.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use shedad_core::dtw::{dtw_distance, euclidean_distance};
use shedad_core::matrix::upper_len;
use shedad_core::{DistanceMatrix, SubstationSeries};

use crate::error::{Error, Result};
use crate::ingest::DailyProfile;

/// Evaluates `f(i, j)` for every `i < j` across the current rayon pool.
/// Output order, and therefore the matrix, does not depend on the pool size.
pub fn parallel_matrix<F>(ids: Vec<String>, f: F) -> Result<DistanceMatrix>
where
    F: Fn(usize, usize) -> shedad_core::Result<f64> + Sync,
{
    let n = ids.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| f(i, j)).collect::<shedad_core::Result<Vec<f64>>>())
        .collect::<shedad_core::Result<_>>()?;
    let mut upper = Vec::with_capacity(upper_len(n));
    rows.into_iter().for_each(|r| upper.extend(r));
    Ok(DistanceMatrix::from_upper_triangle(ids, upper)?)
}

pub fn euclidean_matrix(series: &[SubstationSeries]) -> Result<DistanceMatrix> {
    let ids = series.iter().map(|s| s.id.clone()).collect();
    parallel_matrix(ids, |i, j| euclidean_distance(&series[i].supply, &series[j].supply))
}

/// Profiles for one date in `ids` order.
pub fn profiles_for<'a>(
    index: &HashMap<(&str, NaiveDate), &'a [f64]>,
    ids: &[String],
    date: NaiveDate,
) -> Result<Vec<&'a [f64]>> {
    ids.iter()
        .map(|id| {
            index
                .get(&(id.as_str(), date))
                .copied()
                .ok_or_else(|| Error::Data(format!("substation `{id}` has no complete profile for {date}")))
        })
        .collect()
}

/// SHA-256 over ids and profile bits, used as the cache key.
pub fn profile_digest(ids: &[String], profiles: &[&[f64]]) -> String {
    let mut h = Sha256::new();
    for (id, p) in ids.iter().zip(profiles) {
        h.update((id.len() as u64).to_le_bytes());
        h.update(id.as_bytes());
        for v in p.iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

const CACHE_MAGIC: &[u8; 8] = b"SHDTW001";

pub fn cache_path(dir: &Path, date: NaiveDate, band_radius: usize, digest: &str) -> PathBuf {
    dir.join(format!("dtw-{date}-r{band_radius}-{}.bin", &digest[..16]))
}

/// Reads a cached matrix; a missing, truncated or mismatching file is a miss.
pub fn read_cache(path: &Path, ids: &[String], digest: &str) -> Option<DistanceMatrix> {
    let bytes = fs::read(path).ok()?;
    let n = ids.len();
    let header = CACHE_MAGIC.len() + 32 + 8;
    if bytes.len() != header + 8 * upper_len(n) || &bytes[..8] != CACHE_MAGIC {
        return None;
    }
    if hex::encode(&bytes[8..40]) != digest || u64::from_le_bytes(bytes[40..48].try_into().ok()?) != n as u64 {
        return None;
    }
    let upper = bytes[header..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    DistanceMatrix::from_upper_triangle(ids.to_vec(), upper).ok()
}

pub fn write_cache(path: &Path, matrix: &DistanceMatrix, digest: &str) -> Result<()> {
    let mut buf = Vec::with_capacity(48 + 8 * upper_len(matrix.len()));
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&hex::decode(digest).map_err(|e| Error::Internal(e.to_string()))?);
    buf.extend_from_slice(&(matrix.len() as u64).to_le_bytes());
    for v in matrix.upper_triangle() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// One DTW matrix per selected date, in `dates` order. With `cache_dir`
/// set, matrices are read from and written to the binary cache.
pub fn daily_distance_matrices(
    ids: &[String],
    profiles: &[DailyProfile],
    dates: &[NaiveDate],
    band_radius: usize,
    cache_dir: Option<&Path>,
) -> Result<Vec<DistanceMatrix>> {
    let index: HashMap<(&str, NaiveDate), &[f64]> =
        profiles.iter().map(|p| ((p.substation_id.as_str(), p.date), p.supply.as_slice())).collect();
    let mut out = Vec::with_capacity(dates.len());
    for &date in dates {
        let day = profiles_for(&index, ids, date)?;
        let cached = cache_dir.map(|dir| {
            let digest = profile_digest(ids, &day);
            (cache_path(dir, date, band_radius, &digest), digest)
        });
        if let Some((path, digest)) = &cached {
            if let Some(m) = read_cache(path, ids, digest) {
                log::debug!("dtw cache hit for {date}");
                out.push(m);
                continue;
            }
        }
        let m = parallel_matrix(ids.to_vec(), |i, j| dtw_distance(day[i], day[j], band_radius))?;
        if let Some((path, digest)) = &cached {
            write_cache(path, &m, digest)?;
        }
        out.push(m);
    }
    Ok(out)
}

/// Matrix as CSV with an id header row and an id first column.
pub fn write_matrix_csv(path: &Path, matrix: &DistanceMatrix) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(w, "id").map_err(io)?;
    for id in matrix.ids() {
        write!(w, ",{id}").map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    for (i, id) in matrix.ids().iter().enumerate() {
        write!(w, "{id}").map_err(io)?;
        for v in matrix.row(i) {
            write!(w, ",{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}
