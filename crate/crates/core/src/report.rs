//! Table, fit and batch-grid files.
//!
//! CSV numbers are written with 17 significant digits so that every `f64`
//! reads back bit for bit.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{FitPath, FitResult};
use crate::simulate::design::Design;
use crate::simulate::mc::{run_mc, McConfig, McResult, McTableRow};
use crate::simulate::rng::derive;
use crate::variance::{AvarMode, AvarResult};

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TABLE_HEADER: [&str; 10] = [
    "design",
    "S",
    "N",
    "bias",
    "var_beta",
    "mean_avar_delta2",
    "mean_avar_Delta2",
    "size_delta2",
    "size_Delta2",
    "failures",
];

pub fn write_table_csv<W: Write>(rows: &[McTableRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(TABLE_HEADER).map_err(err)?;
    for r in rows {
        w.write_record([
            r.design.to_string(),
            r.s.to_string(),
            r.n.to_string(),
            fmt_f64(r.bias),
            fmt_f64(r.var_beta),
            fmt_f64(r.mean_avar_delta),
            fmt_f64(r.mean_avar_pair),
            fmt_f64(r.size_delta),
            fmt_f64(r.size_pair),
            r.failures.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Serialize(e.to_string()))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    f(&mut buf)?;
    buf.flush().map_err(io)
}

fn default_avar() -> AvarMode {
    AvarMode::Both
}

/// A `(design, S, N)` grid for table regeneration, read from JSON:
///
/// ```json
/// {"designs": ["d1", "d3"], "reps": [1000], "nodes": [10, 20, 30], "seed": 42}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableGrid {
    pub designs: Vec<Design>,
    pub reps: Vec<usize>,
    pub nodes: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub beta1: f64,
    #[serde(default = "default_avar")]
    pub avar: AvarMode,
    /// Forces one path for every cell; otherwise chosen by size.
    #[serde(default)]
    pub path: Option<FitPath>,
}

impl TableGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        let grid: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("grid: {e}")))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.designs.is_empty() || self.reps.is_empty() || self.nodes.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one design, rep count and size".into()));
        }
        for cell in self.cells() {
            cell.validate()?;
        }
        Ok(())
    }

    /// One configuration per cell, designs outermost, then `S`, then `N`.
    pub fn cells(&self) -> Vec<McConfig> {
        let mut out = Vec::new();
        for &design in &self.designs {
            for &s in &self.reps {
                for &n in &self.nodes {
                    let mut cfg = McConfig::new(design, n, s, cell_seed(self.seed, design, s, n));
                    cfg.beta1 = self.beta1;
                    cfg.avar_mode = self.avar;
                    if let Some(p) = self.path {
                        cfg.path = p;
                    }
                    out.push(cfg);
                }
            }
        }
        out
    }
}

/// Seed of one grid cell; independent of which other cells are in the grid.
pub fn cell_seed(seed: u64, design: Design, reps: usize, n_nodes: usize) -> u64 {
    let d = Design::ALL.iter().position(|x| *x == design).unwrap_or(0) as u64;
    derive(derive(derive(seed, d), reps as u64), n_nodes as u64)
}

/// Runs every grid cell in order and returns one table row per cell.
pub fn emit_tables(grid: &TableGrid) -> Result<Vec<McResult>> {
    grid.validate()?;
    grid.cells().iter().map(run_mc).collect()
}

/// Contents of `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub n_nodes: usize,
    pub path: FitPath,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    pub score_hat: f64,
    pub beta_null: f64,
    pub avar: AvarMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2_hat: Option<f64>,
    #[serde(rename = "Delta2_hat", skip_serializing_if = "Option::is_none")]
    pub pair_delta2_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avar_delta2: Option<f64>,
    #[serde(rename = "avar_Delta2", skip_serializing_if = "Option::is_none")]
    pub avar_pair: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_delta2: Option<f64>,
    #[serde(rename = "t_Delta2", skip_serializing_if = "Option::is_none")]
    pub t_pair: Option<f64>,
}

impl FitReport {
    pub fn new(fit: &FitResult, avar: &AvarResult, mode: AvarMode, beta_null: f64) -> Self {
        let d = mode.wants_directed();
        let p = mode.wants_pair();
        let keep = |want: bool, v: f64| want.then_some(v);
        Self {
            n_nodes: fit.n_nodes,
            path: fit.path,
            beta_hat: fit.beta_hat,
            gamma_hat: fit.gamma_hat,
            score_hat: fit.score_hat,
            beta_null,
            avar: mode,
            delta2_hat: keep(d, avar.delta2_hat),
            pair_delta2_hat: keep(p, avar.pair_delta2_hat),
            avar_delta2: keep(d, avar.avar_delta),
            avar_pair: keep(p, avar.avar_pair),
            t_delta2: keep(d, avar.t_delta),
            t_pair: keep(p, avar.t_pair),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn grid_cells() {
        let g = TableGrid::from_json(r#"{"designs":["d1"],"reps":[1000],"nodes":[10,20],"seed":1}"#).unwrap();
        let cells = g.cells();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[1].n_nodes, 20);
        assert_eq!(cells[0].avar_mode, AvarMode::Both);
        assert_ne!(cells[0].seed, cells[1].seed);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TableGrid::from_json(r#"{"designs":["d9"],"reps":[1],"nodes":[5],"seed":1}"#).is_err());
        assert!(TableGrid::from_json(r#"{"designs":["d1"],"reps":[1],"nodes":[3],"seed":1}"#).is_err());
        assert!(TableGrid::from_json(r#"{"designs":[],"reps":[1],"nodes":[5],"seed":1}"#).is_err());
        assert!(TableGrid::from_json(r#"{"designs":["d1"],"reps":[1],"nodes":[5],"seed":1,"x":2}"#).is_err());
    }

    #[test]
    fn table_layout() {
        let g = TableGrid::from_json(r#"{"designs":["d3"],"reps":[5],"nodes":[6,7],"seed":3}"#).unwrap();
        let rows: Vec<_> = emit_tables(&g).unwrap().into_iter().map(|r| r.summary).collect();
        let mut buf = Vec::new();
        write_table_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], TABLE_HEADER.join(","));
        assert!(lines[1].starts_with("d3,5,6,"));
    }
}
