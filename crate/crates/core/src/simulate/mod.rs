//! Data-generating designs and the Monte Carlo runner.

pub mod design;
pub mod export;
pub mod mc;
pub mod rng;

pub use design::{generate, generate_with_noise, Design};
pub use mc::{run_mc, run_mc_with_threads, McConfig, McResult, McTableRow, RepRecord};
pub use rng::derive;
