//! Replication-parallel Monte Carlo with a fixed-order reduction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::FitPath;
use crate::simulate::design::{generate_with_noise, Design};
use crate::simulate::rng::derive;
use crate::estimator::{fit, residual_matrix};
use crate::variance::{avar_and_tstats, delta2_hat, pair_delta2_hat, s_bar_all, AvarMode};

/// Two-sided 5% normal critical value.
pub const Z_975: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub design: Design,
    pub n_nodes: usize,
    pub n_reps: usize,
    pub seed: u64,
    pub beta1: f64,
    pub avar_mode: AvarMode,
    pub path: FitPath,
    /// Error standard deviation; 1 in every table design.
    pub sigma_u: f64,
}

impl McConfig {
    /// Unit noise, `β₁ = 0`, both variance estimators, size-dependent path.
    pub fn new(design: Design, n_nodes: usize, n_reps: usize, seed: u64) -> Self {
        Self {
            design,
            n_nodes,
            n_reps,
            seed,
            beta1: 0.0,
            avar_mode: AvarMode::Both,
            path: FitPath::default_for(n_nodes),
            sigma_u: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 4 {
            return Err(Error::DegenerateSize { n: self.n_nodes });
        }
        if self.n_reps == 0 {
            return Err(Error::InvalidInput("n_reps must be at least 1".into()));
        }
        if !self.beta1.is_finite() || !self.sigma_u.is_finite() || self.sigma_u < 0.0 {
            return Err(Error::InvalidInput(format!(
                "beta1 = {}, sigma_u = {}",
                self.beta1, self.sigma_u
            )));
        }
        Ok(())
    }
}

/// One replication.
///
/// A failed fit leaves every estimate NaN and sets `failure`; the row is
/// counted but excluded from the summary. A degenerate variance keeps
/// `beta_hat`, leaves the variance columns NaN and sets `variance_failure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    pub rep_seed: u64,
    pub beta_hat: f64,
    pub avar_delta: f64,
    pub avar_pair: f64,
    pub t_delta: f64,
    pub t_pair: f64,
    pub failure: Option<String>,
    pub variance_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTableRow {
    pub design: Design,
    pub s: usize,
    pub n: usize,
    pub bias: f64,
    pub var_beta: f64,
    pub mean_avar_delta: f64,
    pub mean_avar_pair: f64,
    pub size_delta: f64,
    pub size_pair: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub config: McConfig,
    pub per_rep: Vec<RepRecord>,
    pub summary: McTableRow,
}

impl McResult {
    /// `β̂` of every successful replication, in replication order.
    pub fn betas(&self) -> Vec<f64> {
        self.per_rep
            .iter()
            .filter(|r| r.failure.is_none())
            .map(|r| r.beta_hat)
            .collect()
    }
}

pub fn run_rep(config: &McConfig, rep: usize) -> RepRecord {
    let rep_seed = derive(config.seed, rep as u64);
    let mut record = RepRecord {
        rep,
        rep_seed,
        beta_hat: f64::NAN,
        avar_delta: f64::NAN,
        avar_pair: f64::NAN,
        t_delta: f64::NAN,
        t_pair: f64::NAN,
        failure: None,
        variance_failure: None,
    };
    let fitted = generate_with_noise(config.design, config.n_nodes, config.beta1, config.sigma_u, rep_seed)
        .and_then(|data| fit(&data, config.path).map(|f| (data, f)));
    let (data, fitted) = match fitted {
        Ok(v) => v,
        Err(e) => {
            record.failure = Some(e.to_string());
            return record;
        }
    };
    record.beta_hat = fitted.beta_hat;
    let resid = residual_matrix(&data, fitted.beta_hat);
    let avar = s_bar_all(data.x(), &resid, config.path).and_then(|s| {
        avar_and_tstats(
            &fitted,
            delta2_hat(&s.s_bar),
            pair_delta2_hat(&s.s_bar2),
            config.beta1,
            config.avar_mode,
        )
    });
    match avar {
        Ok(a) => {
            record.avar_delta = a.avar_delta;
            record.avar_pair = a.avar_pair;
            record.t_delta = a.t_delta;
            record.t_pair = a.t_pair;
        }
        Err(e) => record.variance_failure = Some(e.to_string()),
    }
    record
}

/// Runs every replication on the current rayon pool.
///
/// Records are collected in replication order and summarised sequentially,
/// so the result does not depend on the number of workers.
pub fn run_mc(config: &McConfig) -> Result<McResult> {
    config.validate()?;
    let per_rep: Vec<RepRecord> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| run_rep(config, rep))
        .collect();
    let summary = summarize(config, &per_rep);
    Ok(McResult {
        config: config.clone(),
        per_rep,
        summary,
    })
}

/// [`run_mc`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_mc_with_threads(config: &McConfig, threads: usize) -> Result<McResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_mc(config))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn rejection_rate(t: &[f64]) -> f64 {
    t.iter().filter(|v| v.abs() > Z_975).count() as f64 / t.len() as f64
}

/// Table summary over successful replications.
pub fn summarize(config: &McConfig, per_rep: &[RepRecord]) -> McTableRow {
    let ok: Vec<&RepRecord> = per_rep.iter().filter(|r| r.failure.is_none()).collect();
    let failures = per_rep.len() - ok.len();
    let col = |f: fn(&RepRecord) -> f64| -> Vec<f64> { ok.iter().map(|r| f(r)).collect() };
    let betas = col(|r| r.beta_hat);
    let (bias, var_beta) = if betas.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let m = mean(&betas);
        let var = if betas.len() > 1 {
            betas.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (betas.len() - 1) as f64
        } else {
            f64::NAN
        };
        (m - config.beta1, var)
    };
    // variance columns average over the replications where they exist
    let finite = |v: Vec<f64>| -> Vec<f64> { v.into_iter().filter(|x| !x.is_nan()).collect() };
    let avg = |v: Vec<f64>| {
        let v = finite(v);
        if v.is_empty() { f64::NAN } else { mean(&v) }
    };
    let size = |v: Vec<f64>| {
        let v = finite(v);
        if v.is_empty() { f64::NAN } else { rejection_rate(&v) }
    };
    McTableRow {
        design: config.design,
        s: config.n_reps,
        n: config.n_nodes,
        bias,
        var_beta,
        mean_avar_delta: avg(col(|r| r.avar_delta)),
        mean_avar_pair: avg(col(|r| r.avar_pair)),
        size_delta: size(col(|r| r.t_delta)),
        size_pair: size(col(|r| r.t_pair)),
        failures,
    }
}
