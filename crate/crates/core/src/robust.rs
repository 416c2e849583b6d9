//! Order statistics and the modified z-score.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `0.6745`, the 0.75 quantile of the standard normal; scales MAD to sigma.
pub const MAD_SCALE: f64 = 0.6745;

/// `sqrt(pi / 2)`; scales the mean absolute deviation to sigma when MAD is 0.
pub const MEAN_AD_SCALE: f64 = 1.253_314_137_315_500_3;

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median; the mean of the two middle values for even lengths. `NaN` when
/// empty.
pub fn median(values: &[f64]) -> f64 {
    let v = sorted(values);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Median absolute deviation about the median (unscaled).
pub fn mad(values: &[f64]) -> f64 {
    let m = median(values);
    let dev: Vec<f64> = values.iter().map(|x| (x - m).abs()).collect();
    median(&dev)
}

/// Linear-interpolation quantile (type 7) of `values`, `q` in `[0, 1]`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let v = sorted(values);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Modified z-scores `0.6745 * (x - median) / MAD`.
///
/// When MAD is zero the denominator falls back to `1.2533 * meanAD`, where
/// meanAD is the mean absolute deviation about the median. When that is also
/// zero every score is zero.
pub fn modified_z_scores(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::TooFewValues { needed: 2, got: values.len() });
    }
    let m = median(values);
    let mad = mad(values);
    if mad > 0.0 {
        return Ok(values.iter().map(|x| MAD_SCALE * (x - m) / mad).collect());
    }
    let mean_ad = values.iter().map(|x| (x - m).abs()).sum::<f64>() / values.len() as f64;
    if mean_ad > 0.0 {
        let scale = MEAN_AD_SCALE * mean_ad;
        return Ok(values.iter().map(|x| (x - m) / scale).collect());
    }
    Ok(alloc::vec![0.0; values.len()])
}
