//! Per-replication dumps and plot-ready distribution summaries.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::report::fmt_f64;
use crate::simulate::mc::McResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    /// Standard normal quantile at `(r − ½)/S`.
    pub theoretical: f64,
    /// `r`-th smallest standardized `β̂`.
    pub empirical: f64,
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// `(v − mean)/sd` with the `S − 1` denominator.
pub fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InvalidInput("need at least two values to standardize".into()));
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::InvalidInput("values have zero spread".into()));
    }
    Ok(values.iter().map(|v| (v - m) / sd).collect())
}

/// Equal-width bins spanning `[min, max]`; the maximum lands in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 || values.is_empty() {
        return Err(Error::InvalidInput("histogram needs values and at least one bin".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("histogram values must be finite".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            lo: lo + k as f64 * width,
            hi: if k + 1 == bins && hi > lo { hi } else { lo + (k + 1) as f64 * width },
            count,
        })
        .collect())
}

/// Normal QQ pairs of the standardized sample.
pub fn qq_pairs(values: &[f64]) -> Result<Vec<QqPoint>> {
    let mut z = standardize(values)?;
    z.sort_by(f64::total_cmp);
    let s = z.len() as f64;
    let normal = std_normal();
    Ok(z
        .into_iter()
        .enumerate()
        .map(|(r, empirical)| QqPoint {
            theoretical: normal.inverse_cdf((r as f64 + 0.5) / s),
            empirical,
        })
        .collect())
}

/// Largest `|empirical − theoretical|` over the QQ pairs.
pub fn max_qq_gap(points: &[QqPoint]) -> f64 {
    points
        .iter()
        .map(|p| (p.empirical - p.theoretical).abs())
        .fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov distance of the standardized sample to `N(0, 1)`.
pub fn ks_distance_normal(values: &[f64]) -> Result<f64> {
    let mut z = standardize(values)?;
    z.sort_by(f64::total_cmp);
    let s = z.len() as f64;
    let normal = std_normal();
    let mut d: f64 = 0.0;
    for (r, v) in z.iter().enumerate() {
        let f = normal.cdf(*v);
        d = d.max((r as f64 + 1.0) / s - f).max(f - r as f64 / s);
    }
    Ok(d)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialize(e.to_string())
}

fn opt_str(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("")
}

/// One row per replication, failures included.
pub fn write_reps_csv<W: Write>(result: &McResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "rep", "rep_seed", "beta_hat", "avar_delta2", "avar_Delta2", "t_delta2", "t_Delta2", "failure",
        "variance_failure",
    ])
    .map_err(csv_err)?;
    for r in &result.per_rep {
        w.write_record([
            r.rep.to_string(),
            r.rep_seed.to_string(),
            fmt_f64(r.beta_hat),
            fmt_f64(r.avar_delta),
            fmt_f64(r.avar_pair),
            fmt_f64(r.t_delta),
            fmt_f64(r.t_pair),
            opt_str(&r.failure).to_string(),
            opt_str(&r.variance_failure).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Serialize(e.to_string()))
}

pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lo", "hi", "count"]).map_err(csv_err)?;
    for b in bins {
        w.write_record([fmt_f64(b.lo), fmt_f64(b.hi), b.count.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Serialize(e.to_string()))
}

pub fn write_qq_csv<W: Write>(points: &[QqPoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["theoretical", "empirical"]).map_err(csv_err)?;
    for p in points {
        w.write_record([fmt_f64(p.theoretical), fmt_f64(p.empirical)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Serialize(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn qq_shape() {
        let v = normals(1000, 1);
        let qq = qq_pairs(&v).unwrap();
        assert_eq!(qq.len(), 1000);
        assert!(qq.windows(2).all(|w| w[0].theoretical < w[1].theoretical));
        assert!(qq.windows(2).all(|w| w[0].empirical <= w[1].empirical));
    }

    #[test]
    fn standardized_moments() {
        let v: Vec<f64> = normals(500, 2).iter().map(|x| 3.0 + 2.0 * x).collect();
        let z = standardize(&v).unwrap();
        let m = z.iter().sum::<f64>() / 500.0;
        let var = z.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 499.0;
        assert!(m.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_counts_everything() {
        let v = normals(1000, 3);
        let h = histogram(&v, 40).unwrap();
        assert_eq!(h.len(), 40);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 1000);
        assert!(h.windows(2).all(|w| w[0].hi == w[1].lo));
        let flat = histogram(&[2.0, 2.0, 2.0], 4).unwrap();
        assert_eq!(flat[0].count, 3);
    }

    #[test]
    fn ks_separates_shapes() {
        let normal = normals(2000, 4);
        let skewed: Vec<f64> = normal.iter().map(|x| x.exp()).collect();
        let d_normal = ks_distance_normal(&normal).unwrap();
        let d_skewed = ks_distance_normal(&skewed).unwrap();
        assert!(d_normal < 0.04);
        assert!(d_skewed > d_normal * 2.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(standardize(&[1.0]).is_err());
        assert!(standardize(&[1.0, 1.0]).is_err());
        assert!(histogram(&[], 10).is_err());
        assert!(histogram(&[1.0], 0).is_err());
    }
}
