//! Complete directed dyadic datasets and their CSV representation.
//!
//! Outcomes and covariates are dense `N×N` matrices; diagonal cells exist
//! but are never read. On disk a dataset is a CSV with header `i,j,y,x`,
//! 1-based node indices and exactly one row per ordered dyad `i≠j`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IngestError, Result};

/// Ground truth behind a simulated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTruth {
    /// Sender attribute `A_i`.
    pub a: Vec<f64>,
    /// Receiver attribute `B_j`.
    pub b: Vec<f64>,
    /// Sender fixed effect `θ_i`.
    pub theta: Vec<f64>,
    /// Receiver fixed effect `ξ_j`.
    pub xi: Vec<f64>,
    /// Idiosyncratic errors `U_ij`.
    pub u: Array2<f64>,
    pub beta1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDataset {
    n_nodes: usize,
    y: Array2<f64>,
    x: Array2<f64>,
    latent: Option<LatentTruth>,
}

fn check_square(name: &str, m: &Array2<f64>, n: usize) -> Result<()> {
    if m.dim() != (n, n) {
        return Err(Error::InvalidInput(format!(
            "{name} has shape {:?}, expected ({n}, {n})",
            m.dim()
        )));
    }
    for ((i, j), v) in m.indexed_iter() {
        if i != j && !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{name}[{i}][{j}] is not finite"
            )));
        }
    }
    Ok(())
}

impl DyadicDataset {
    pub fn new(y: Array2<f64>, x: Array2<f64>) -> Result<Self> {
        let n = y.nrows();
        if n < 4 {
            return Err(Error::DegenerateSize { n });
        }
        check_square("y", &y, n)?;
        check_square("x", &x, n)?;
        Ok(Self {
            n_nodes: n,
            y,
            x,
            latent: None,
        })
    }

    /// Attaches latent truth after checking `y = β x + θ_i + ξ_j + u`.
    pub fn with_latent(self, latent: LatentTruth) -> Result<Self> {
        let n = self.n_nodes;
        for (name, v) in [
            ("a", &latent.a),
            ("b", &latent.b),
            ("theta", &latent.theta),
            ("xi", &latent.xi),
        ] {
            if v.len() != n {
                return Err(Error::InvalidInput(format!(
                    "latent {name} has length {}, expected {n}",
                    v.len()
                )));
            }
        }
        check_square("u", &latent.u, n)?;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let rebuilt = latent.beta1 * self.x[[i, j]]
                    + latent.theta[i]
                    + latent.xi[j]
                    + latent.u[[i, j]];
                let y = self.y[[i, j]];
                if (rebuilt - y).abs() > 1e-12 * y.abs().max(1.0) {
                    return Err(Error::InvalidInput(format!(
                        "latent truth does not reproduce y[{i}][{j}]"
                    )));
                }
            }
        }
        Ok(Self {
            latent: Some(latent),
            ..self
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn latent(&self) -> Option<&LatentTruth> {
        self.latent.as_ref()
    }

    /// Writes the dataset as `i,j,y,x` rows (1-based, row-major over dyads).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let ser = |e: csv::Error| Error::Serialize(e.to_string());
        w.write_record(["i", "j", "y", "x"]).map_err(ser)?;
        for i in 0..self.n_nodes {
            for j in 0..self.n_nodes {
                if i == j {
                    continue;
                }
                w.write_record([
                    (i + 1).to_string(),
                    (j + 1).to_string(),
                    crate::report::fmt_f64(self.y[[i, j]]),
                    crate::report::fmt_f64(self.x[[i, j]]),
                ])
                .map_err(ser)?;
            }
        }
        w.flush().map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv_file(path: &Path) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file, path)
    }

    /// Parses an `i,j,y,x` table. `origin` is only used in messages.
    pub fn read_csv<R: Read>(reader: R, origin: &Path) -> Result<Self, IngestError> {
        let csv_err = |source| IngestError::Csv {
            path: origin.to_path_buf(),
            source,
        };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(csv_err)?.clone();
        if header.iter().collect::<Vec<_>>() != ["i", "j", "y", "x"] {
            return Err(IngestError::Header {
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }

        let mut cells: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        let mut n = 0usize;
        for (idx, record) in rdr.deserialize::<DyadRow>().enumerate() {
            let row = idx + 2; // header is line 1
            let DyadRow { i, j, y, x } = record.map_err(csv_err)?;
            if i == 0 || j == 0 {
                return Err(IngestError::ZeroIndex { row, i, j });
            }
            if i == j {
                return Err(IngestError::SelfLink { row, i });
            }
            if !y.is_finite() || !x.is_finite() {
                return Err(IngestError::NonFinite { row, i, j });
            }
            if cells.insert((i, j), (y, x)).is_some() {
                return Err(IngestError::Duplicate { i, j });
            }
            n = n.max(i).max(j);
        }
        if n < 4 {
            return Err(IngestError::TooFewNodes { n });
        }
        let expected = n * (n - 1);
        let mut y = Array2::zeros((n, n));
        let mut x = Array2::zeros((n, n));
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let Some(&(yv, xv)) = cells.get(&(i, j)) else {
                    return Err(IngestError::Missing { i, j, expected });
                };
                y[[i - 1, j - 1]] = yv;
                x[[i - 1, j - 1]] = xv;
            }
        }
        Ok(Self {
            n_nodes: n,
            y,
            x,
            latent: None,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DyadRow {
    i: usize,
    j: usize,
    y: f64,
    x: f64,
}
