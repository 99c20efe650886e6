//! Pairwise-differences estimation for linear models of complete directed
//! networks with sender and receiver fixed effects.
//!
//! ```text
//! Y_ij = β X_ij + θ_i + ξ_j + U_ij,   i ≠ j
//! ```
//!
//! Differencing over four distinct nodes removes `θ` and `ξ`:
//! `ṽ_ijkl = (v_ij − v_ik) − (v_lj − v_lk)`. The estimator regresses `ỹ` on
//! `x̃` over all ordered tetrads, and its variance comes from two estimated
//! projections of the tetrad score onto single dyads.
//!
//! * [`estimator::fit`] gives `β̂` and the Hessian `Γ̂`.
//! * [`variance::fit_with_variance`] adds both variance estimates and
//!   t-statistics.
//! * [`simulate`] has four data-generating designs and a reproducible
//!   Monte Carlo runner.
//! * [`oracles`] checks the variance theory numerically.
//!
//! ```
//! use dyadic_pd::estimator::FitPath;
//! use dyadic_pd::simulate::{generate, Design};
//! use dyadic_pd::variance::{fit_with_variance, AvarMode};
//!
//! let data = generate(Design::D3, 12, 0.5, 7).unwrap();
//! let (fit, avar) = fit_with_variance(&data, FitPath::Naive, AvarMode::Both, 0.0).unwrap();
//! assert!(fit.gamma_hat > 0.0 && avar.avar_delta > 0.0);
//! ```

pub mod cli;
pub mod combinatorics;
pub mod data;
pub mod differencing;
pub mod error;
pub mod estimator;
pub mod oracles;
pub mod report;
pub mod simulate;
pub mod variance;

pub use data::{DyadicDataset, LatentTruth};
pub use error::{Error, IngestError, Result};
pub use estimator::{fit, FitPath, FitResult};
pub use variance::{AvarMode, AvarResult};
