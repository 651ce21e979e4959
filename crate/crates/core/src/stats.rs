//! Descriptive statistics over plain value slices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Resolution used to bin continuous values when computing the mode.
pub const MODE_RESOLUTION: f64 = 0.01;

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Population variance.
pub fn variance(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64)
}

pub fn std_dev(xs: &[f64]) -> Option<f64> {
    variance(xs).map(f64::sqrt)
}

/// Third standardized moment; zero when the spread is zero.
pub fn skewness(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    let s = std_dev(xs)?;
    if s <= f64::EPSILON * m.abs().max(1.0) {
        return Some(0.0);
    }
    let n = xs.len() as f64;
    Some(xs.iter().map(|x| ((x - m) / s).powi(3)).sum::<f64>() / n)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Linear-interpolation percentile, `q` in `[0, 1]`.
pub fn percentile(xs: &[f64], q: f64) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Population covariance of two equal-length series.
pub fn covariance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let (ma, mb) = (mean(a)?, mean(b)?);
    Some(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub skew: f64,
    pub median: f64,
    /// Every bin centre reaching the maximal frequency, ascending.
    pub mode: Vec<f64>,
    pub max: f64,
    pub min: f64,
}

/// Summary statistics of a share or capital distribution.
pub fn distribution_stats(values: &[f64]) -> Result<DistributionStats> {
    if values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *bins.entry((v / MODE_RESOLUTION).round() as i64).or_default() += 1;
    }
    let top = bins.values().copied().max().unwrap_or(0);
    let mode = bins
        .iter()
        .filter(|(_, &n)| n == top)
        .map(|(&b, _)| b as f64 * MODE_RESOLUTION)
        .collect();
    Ok(DistributionStats {
        count: values.len(),
        mean: mean(values).unwrap(),
        variance: variance(values).unwrap(),
        skew: skewness(values).unwrap(),
        median: median(values).unwrap(),
        mode,
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
