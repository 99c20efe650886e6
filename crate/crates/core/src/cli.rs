//! The `dyadpd` command line: `estimate`, `simulate` and `verify`.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 on a runtime
//! error. Options are checked before any computation starts.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::DyadicDataset;
use crate::error::{Error, IngestError, Result};
use crate::estimator::FitPath;
use crate::oracles::{
    closed_form_delta2, estimate_delta_q, hoeffding_check, projection_variance_check, Estimate,
};
use crate::report::{emit_tables, write_file, write_table_csv, FitReport, TableGrid};
use crate::simulate::design::{generate, Design};
use crate::simulate::export::{histogram, qq_pairs, write_histogram_csv, write_qq_csv, write_reps_csv};
use crate::simulate::mc::{run_mc, McConfig};
use crate::variance::{fit_with_variance, AvarMode};

#[derive(Debug, Parser)]
#[command(name = "dyadpd", version, about = "Pairwise-differences estimation for directed dyadic data")]
pub struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one dataset read from an `i,j,y,x` CSV.
    Estimate(EstimateArgs),
    /// Monte Carlo replications of a simulation design.
    Simulate(SimulateArgs),
    /// Numerical checks of the variance theory.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub path: Option<FitPath>,
    /// Where to write the fit as JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub avar: AvarMode,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_null: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, required_unless_present = "batch", conflicts_with = "batch")]
    pub design: Option<Design>,
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    pub reps: Option<usize>,
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with = "batch")]
    pub beta1: f64,
    #[arg(long, value_enum, default_value = "both", conflicts_with = "batch")]
    pub avar: AvarMode,
    #[arg(long, value_enum, conflicts_with = "batch")]
    pub path: Option<FitPath>,
    /// Summary table CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON grid of designs, replication counts and sizes.
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Per-replication estimates.
    #[arg(long, conflicts_with = "batch")]
    pub dump_reps: Option<PathBuf>,
    /// Histogram of the standardized estimates.
    #[arg(long, conflicts_with = "batch")]
    pub hist: Option<PathBuf>,
    /// Normal QQ pairs of the standardized estimates.
    #[arg(long, conflicts_with = "batch")]
    pub qq: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// The dataset of replication 0 as an `i,j,y,x` CSV.
    #[arg(long, conflicts_with = "batch")]
    pub dump_dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Deltaq,
    Hoeffding,
    Projection,
    #[value(name = "delta2-closed")]
    Delta2Closed,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub check: Check,
    #[arg(long, value_enum, default_value = "d1")]
    pub design: Design,
    #[arg(long, default_value_t = 50_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Network size for the projection check.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}

fn check_parent(path: &Path) -> std::result::Result<(), clap::Error> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(usage(format!("output directory {} does not exist", parent.display())));
    }
    Ok(())
}

fn validate(cli: &Cli) -> std::result::Result<(), clap::Error> {
    match &cli.command {
        Command::Estimate(a) => {
            if let Some(out) = &a.out {
                check_parent(out)?;
            }
            if !a.beta_null.is_finite() {
                return Err(usage("--beta-null must be finite"));
            }
        }
        Command::Simulate(a) => {
            check_parent(&a.out)?;
            for p in [&a.dump_reps, &a.hist, &a.qq, &a.dump_dataset].into_iter().flatten() {
                check_parent(p)?;
            }
            if a.bins == 0 {
                return Err(usage("--bins must be at least 1"));
            }
            if a.batch.is_none() {
                if a.n.is_some_and(|n| n < 4) {
                    return Err(usage("--n must be at least 4"));
                }
                if a.reps == Some(0) {
                    return Err(usage("--reps must be at least 1"));
                }
                if (a.hist.is_some() || a.qq.is_some()) && a.reps.is_some_and(|r| r < 2) {
                    return Err(usage("--hist and --qq need at least 2 replications"));
                }
                if !a.beta1.is_finite() {
                    return Err(usage("--beta1 must be finite"));
                }
            }
        }
        Command::Verify(a) => {
            if let Some(out) = &a.out {
                check_parent(out)?;
            }
            if a.draws < crate::oracles::deltaq::MIN_DRAWS {
                return Err(usage(format!(
                    "--draws must be at least {}",
                    crate::oracles::deltaq::MIN_DRAWS
                )));
            }
            if a.n < 4 {
                return Err(usage("--n must be at least 4"));
            }
        }
    }
    Ok(())
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv).and_then(|c| validate(&c).map(|_| c)) {
        Ok(c) => c,
        Err(e) => return report_clap_error(e),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn report_clap_error(e: clap::Error) -> i32 {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            e.exit_code()
        }
        _ => {
            let rendered = e.render().to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("{line}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, |w| {
            w.write_all(text.as_bytes())
                .and_then(|_| w.write_all(b"\n"))
                .map_err(|source| Error::Io { path: p.to_path_buf(), source })
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn estimate(a: &EstimateArgs) -> Result<()> {
    let data = DyadicDataset::read_csv_file(&a.input).map_err(|e| match e {
        IngestError::Io { .. } | IngestError::Csv { .. } => Error::Ingest(e),
        other => Error::InvalidInput(format!("{}: {other}", a.input.display())),
    })?;
    let path = a.path.unwrap_or(FitPath::default_for(data.n_nodes()));
    let (fit, avar) = fit_with_variance(&data, path, a.avar, a.beta_null)?;
    let report = FitReport::new(&fit, &avar, a.avar, a.beta_null);
    write_text(a.out.as_deref(), &report.to_json()?)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    if let Some(batch) = &a.batch {
        let text = std::fs::read_to_string(batch).map_err(|source| Error::Io { path: batch.clone(), source })?;
        let grid = TableGrid::from_json(&text)?;
        let rows: Vec<_> = emit_tables(&grid)?.into_iter().map(|r| r.summary).collect();
        return write_file(&a.out, |w| write_table_csv(&rows, w));
    }
    let (design, n, reps, seed) = (
        a.design.expect("required by clap"),
        a.n.expect("required by clap"),
        a.reps.expect("required by clap"),
        a.seed.expect("required by clap"),
    );
    let mut cfg = McConfig::new(design, n, reps, seed);
    cfg.beta1 = a.beta1;
    cfg.avar_mode = a.avar;
    if let Some(p) = a.path {
        cfg.path = p;
    }
    cfg.validate()?;
    if let Some(p) = &a.dump_dataset {
        let data = generate(design, n, a.beta1, crate::simulate::rng::derive(seed, 0))?;
        data.write_csv_file(p)?;
    }
    let result = run_mc(&cfg)?;
    write_file(&a.out, |w| write_table_csv(std::slice::from_ref(&result.summary), w))?;
    if let Some(p) = &a.dump_reps {
        write_file(p, |w| write_reps_csv(&result, w))?;
    }
    let betas = result.betas();
    if let Some(p) = &a.hist {
        let z = crate::simulate::export::standardize(&betas)?;
        let bins = histogram(&z, a.bins)?;
        write_file(p, |w| write_histogram_csv(&bins, w))?;
    }
    if let Some(p) = &a.qq {
        let pts = qq_pairs(&betas)?;
        write_file(p, |w| write_qq_csv(&pts, w))?;
    }
    Ok(())
}

/// One named comparison in a verify report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub estimate: Estimate,
    pub target: Estimate,
    pub z: f64,
    pub tolerance_se: f64,
    pub pass: bool,
}

impl CheckLine {
    fn new(name: &str, estimate: Estimate, target: Estimate) -> Self {
        let z = if target.se == 0.0 { estimate.z_against(target.value) } else { estimate.z_between(&target) };
        Self { name: name.into(), estimate, target, z, tolerance_se: 4.0, pass: z.abs() <= 4.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub design: Design,
    pub draws: usize,
    pub seed: u64,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<serde_json::Value>,
}

fn exact(v: f64) -> Estimate {
    Estimate { value: v, se: 0.0 }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Serialize(e.to_string()))
}

/// Runs the selected checks; the seed of each part is derived from `seed`.
pub fn run_verify(a: &VerifyArgs) -> Result<VerifyReport> {
    use crate::oracles::sub_seed;
    let wants = |c: Check| a.check == c || a.check == Check::All;
    let mut checks = Vec::new();
    let mut sections = Vec::new();
    let mut dq = None;
    if wants(Check::Deltaq) || wants(Check::Delta2Closed) {
        let r = estimate_delta_q(a.design, a.draws, sub_seed(a.seed, 10))?;
        if wants(Check::Deltaq) {
            checks.push(CheckLine::new("Delta_0 = 0", r.delta_q[0], exact(0.0)));
            checks.push(CheckLine::new("Delta_1 = 0", r.delta_q[1], exact(0.0)));
            checks.push(CheckLine::new("Delta_2 - 2 delta_2 = 0", r.pair_gap, exact(0.0)));
            checks.push(CheckLine::new("Delta_2 position-free", r.delta2_alternate, r.delta_q[2]));
        }
        sections.push(to_value(&r)?);
        dq = Some(r);
    }
    if wants(Check::Delta2Closed) {
        let cf = closed_form_delta2(a.design, 1.0, a.draws.max(1_000_000), sub_seed(a.seed, 11))?;
        let r = dq.as_ref().expect("computed above");
        checks.push(CheckLine::new("closed form = Delta_2", cf.delta2, r.delta_q[2]));
        checks.push(CheckLine::new("closed form = 2 delta_2", cf.delta2, r.delta2_small.scaled(2.0)));
        sections.push(to_value(&cf)?);
    }
    if wants(Check::Hoeffding) {
        let h = hoeffding_check(a.design, 5, a.draws, sub_seed(a.seed, 12))?;
        checks.push(CheckLine::new("Var(U_5) = (Delta_4 + 4 Delta_3)/5", h.direct, h.formula));
        sections.push(to_value(&h)?);
    }
    if wants(Check::Projection) {
        let p = projection_variance_check(a.design, a.n, a.draws, sub_seed(a.seed, 13), 1.0)?;
        checks.push(CheckLine::new("Var(first projection) = 144 delta_2", p.var_hajek1, p.target_delta));
        checks.push(CheckLine::new("Var(second projection) = 72 Delta_2", p.var_hajek2, p.target_pair));
        checks.push(CheckLine::new("Cov(U_N, first) = Var(first)", p.orthogonality_gap, exact(0.0)));
        sections.push(to_value(&p)?);
    }
    Ok(VerifyReport { design: a.design, draws: a.draws, seed: a.seed, checks, sections })
}

fn verify(a: &VerifyArgs) -> Result<()> {
    let report = run_verify(a)?;
    for c in &report.checks {
        eprintln!("{} {:<40} z = {:+.2}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.z);
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Serialize(e.to_string()))?;
    write_text(a.out.as_deref(), &json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        run(std::iter::once("dyadpd").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(code(&["simulate", "--design", "d9", "--n", "10", "--reps", "1", "--seed", "1", "--out", "t.csv"]), 2);
        assert_eq!(code(&["simulate", "--design", "d1", "--n", "3", "--reps", "1", "--seed", "1", "--out", "t.csv"]), 2);
        assert_eq!(code(&["estimate"]), 2);
        assert_eq!(code(&["bogus"]), 2);
        assert_eq!(code(&["verify", "--draws", "10"]), 2);
        assert_eq!(code(&["estimate", "--input", "x.csv", "--out", "/no/such/dir/fit.json"]), 2);
    }

    #[test]
    fn missing_input_exits_one() {
        assert_eq!(code(&["estimate", "--input", "/definitely/missing.csv"]), 1);
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
