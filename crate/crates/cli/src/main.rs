//! Batch front end for the magneumann toolkit.
//!
//! Exit codes: 0 success, 1 failed verdict or computation, 2 usage or
//! configuration error.

mod commands;
mod config;
mod csvio;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use config::RunConfig;

pub const THREADS_ENV: &str = "MAGNEUMANN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "magneumann", version, about = "Spectral computations for magnetic Neumann operators")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Where to write the CSV result.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Worker threads (default: config, then $MAGNEUMANN_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest de Gennes eigenvalue mu1(xi) at one point or on a grid.
    Mu1(Mu1Args),
    /// Minimum of the second de Gennes eigenvalue over a xi grid.
    Mu2Gap(GridArgs),
    /// The de Gennes constant Theta0 and its minimizer xi*.
    Theta0(Theta0Args),
    /// Edge moment m(c) = integral of [c - mu1]+.
    Moment(MomentArgs),
    /// Boundary energy coefficient of a curve in a constant field.
    CoefEnergy(CurveArgs),
    /// Counting coefficient of a curve in a constant field.
    CoefCounting(CurveArgs),
    /// Exact sum of negative parts on the model cylinder against its bound.
    CylinderEnergy(CylinderArgs),
    /// Disk (or disk exterior) eigenvalues below a threshold.
    DiskSpectrum(DiskArgs),
    /// h-sweep of the boundary energy asymptotics on a disk.
    VerifyThm1(SweepArgs),
    /// h-sweep of the boundary + bulk asymptotics with shift a h^{3/2}.
    VerifyThm2(SweepArgs),
    /// h-sweep of the eigenvalue counting asymptotics.
    VerifyCounting(SweepArgs),
    /// Landau and half-plane projector identities.
    VerifyProjectors(ProjectorArgs),
    /// Seeded random checks of the finite-dimensional variational principles.
    PropVariational(VariationalArgs),
    /// Re-read emitted CSV files and print a report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Mu1Args {
    /// Single evaluation point.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Plain second-order value instead of the extrapolated one.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// First grid point.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_min: Option<f64>,
    /// Last grid point.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_max: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    pub xi_step: Option<f64>,
    /// Finite-difference nodes of the 1D solves (default 2000).
    #[arg(long)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Theta0Args {
    /// Bracket width of the golden-section search in xi (default 1e-8).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Finite-difference nodes (default 2000, extrapolated against twice that).
    #[arg(long)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    /// Level c in (0, 1].
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Circle of this radius.
    #[arg(long)]
    pub circle: Option<f64>,
    /// Ellipse with these semi-axes, e.g. `--ellipse 2,1`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub ellipse: Option<Vec<f64>>,
    /// Closed curve as "x y" lines.
    #[arg(long, value_name = "PATH")]
    pub curve_file: Option<PathBuf>,
    /// Boundary samples for --circle and --ellipse.
    #[arg(long)]
    pub points: Option<usize>,
    /// Infimum of the field over the closed domain.
    #[arg(long)]
    pub b: Option<f64>,
    /// Field value on the boundary (defaults to b).
    #[arg(long)]
    pub boundary_b: Option<f64>,
    /// Spectral level for the counting coefficient.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CylinderArgs {
    /// Field strength (default 1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Circumference.
    #[arg(long = "S")]
    pub s: Option<f64>,
    /// Height in units of h^{1/2}.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Level 1+lambda in units of hb, 0 < lambda < 1.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Semiclassical parameter.
    #[arg(long)]
    pub h: Option<f64>,
    /// Override the 1D grid size.
    #[arg(long)]
    pub n_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DiskArgs {
    /// Disk radius (default 1).
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Field strength (default 1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Semiclassical parameter.
    #[arg(long)]
    pub h: Option<f64>,
    /// Threshold in units of bh (default 1).
    #[arg(long)]
    pub threshold_frac: Option<f64>,
    /// Exterior of the disk instead of the interior.
    #[arg(long)]
    pub exterior: bool,
    /// Dirichlet truncation radius of the exterior problem (default R + 12 sqrt(h/b)).
    #[arg(long)]
    pub r_out: Option<f64>,
    /// Extra angular momenta kept beyond the certified range.
    #[arg(long)]
    pub m_margin: Option<i64>,
    /// Radial grid size.
    #[arg(long)]
    pub n_radial: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Disk radius (default 1).
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Field strength (default 1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Decreasing list, e.g. `--h-list 0.02,0.01,0.005`.
    #[arg(long, value_delimiter = ',')]
    pub h_list: Option<Vec<f64>>,
    /// Exterior of the disk (verify-thm1 and verify-counting only).
    #[arg(long)]
    pub exterior: bool,
    /// Extra angular momenta kept beyond the certified range.
    #[arg(long)]
    pub m_margin: Option<i64>,
    /// Shift coefficient of verify-thm2 (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Level lambda/b of verify-counting (default 0.8).
    #[arg(long)]
    pub lambda_frac: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProjectorArgs {
    /// Semiclassical parameter (default 1).
    #[arg(long)]
    pub h: Option<f64>,
    /// Field strength (default 1).
    #[arg(long)]
    pub b: Option<f64>,
    /// Cutoff of the xi integral (default 8).
    #[arg(long)]
    pub xi_cut: Option<f64>,
    /// Highest band in the resolution of identity (default 12).
    #[arg(long)]
    pub j_max: Option<usize>,
    /// Finite-difference spacing of the intertwining checks.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Seed of the random sample points.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VariationalArgs {
    /// Number of random cases (default 1000).
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// CSV files written by this tool.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Fail unless every file re-serializes byte for byte.
    #[arg(long)]
    pub check: bool,
}

/// Configuration problems map to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn subcommand_name(args: &[String]) -> Option<String> {
    let cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    args.iter().skip(1).find(|a| names.contains(a)).cloned()
}

fn print_flag_table(name: Option<&str>) {
    let mut cmd = Cli::command();
    cmd.build();
    let help = match name.and_then(|n| cmd.find_subcommand_mut(n)) {
        Some(sub) => sub.render_help(),
        None => cmd.render_help(),
    };
    eprintln!("\n{help}");
}

fn thread_count(flag: Option<usize>, config: &RunConfig) -> Result<Option<usize>, UsageError> {
    if let Some(n) = flag.or(config.threads) {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| UsageError(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            print_flag_table(subcommand_name(&args).as_deref());
            return ExitCode::from(2);
        }
    };
    let usage = |msg: String| {
        eprintln!("error: {msg}");
        print_flag_table(subcommand_name(&args).as_deref());
        ExitCode::from(2)
    };
    let config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(msg) => return usage(msg),
        },
        None => RunConfig::default(),
    };
    match thread_count(cli.threads, &config) {
        Ok(Some(0)) => return usage("thread count must be positive".into()),
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(e) => return usage(e.0),
    }
    match commands::run(&cli, &config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let is_usage = e.downcast_ref::<UsageError>().is_some()
                || matches!(e.downcast_ref::<magneumann::Error>(), Some(magneumann::Error::Config(_)));
            if is_usage {
                usage(format!("{e:#}"))
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}
