//! `subdiff` command-line driver.
//!
//! Exit status: 0 on success, 2 on usage errors (bad flags or parameter
//! values), 1 when a computation fails. Thread count follows
//! `RAYON_NUM_THREADS`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod figures;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subdiff::{Hurst, PhysicalParams};

#[derive(Parser, Debug)]
#[command(
    name = "subdiff",
    version,
    about = "Fractional Langevin subdiffusion: simulate, evaluate, fit and recover"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw an exact stationary path and write it as trace CSV.
    Simulate(SimulateArgs),
    /// Tabulate an analytic covariance, MSD or spectral density.
    Analytic(AnalyticArgs),
    /// Ensemble mean squared displacement of simulated paths with its slope.
    Msd(MsdArgs),
    /// Integrate a particle coupled to an explicit oscillator bath.
    Heatbath(HeatbathArgs),
    /// Map a displacement trace to a fluorescence-lifetime trace.
    Lifetime(LifetimeArgs),
    /// Fit the overdamped lifetime autocorrelation model.
    Fit(FitArgs),
    /// Recover the Laplace-domain memory kernel from a displacement covariance.
    RecoverKernel(RecoverArgs),
    /// Boltzmann-invert a trace into a potential.
    Potential(PotentialArgs),
    /// Run a named synthetic-data recipe and write plot-ready CSV.
    Figure(FigureArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Physics {
    /// Particle mass.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Friction coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    /// Thermal energy k_B T.
    #[arg(long, default_value_t = 1.0)]
    pub kbt: f64,
    /// Harmonic potential strength (omit for a free particle).
    #[arg(long)]
    pub psi: Option<f64>,
}

impl Physics {
    pub fn params(&self) -> Result<PhysicalParams, Failure> {
        let p = match self.psi {
            Some(psi) => PhysicalParams::harmonic(self.m, self.zeta, self.kbt, psi),
            None => PhysicalParams::free(self.m, self.zeta, self.kbt),
        };
        p.map_err(|e| Failure::Usage(e.to_string()))
    }
}

pub fn hurst(h: f64) -> Result<Hurst, Failure> {
    Hurst::subdiffusive(h).map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeArg {
    Free,
    Harmonic,
    Overdamped,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Hurst exponent, 1/2 < h < 1.
    #[arg(long)]
    pub h: f64,
    #[command(flatten)]
    pub physics: Physics,
    /// Number of samples.
    #[arg(long)]
    pub n: usize,
    /// Sampling step.
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub seed: u64,
    /// Ensemble member to draw.
    #[arg(long, default_value_t = 0)]
    pub path_index: u64,
    /// Integrate the free-particle velocity to a displacement.
    #[arg(long)]
    pub displacement: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveArg {
    FreeVelocity,
    FreeMsd,
    MsdAsymptote,
    HarmonicXx,
    HarmonicVv,
    HarmonicVx,
    Overdamped,
    OverdampedLaplace,
    FreeVelocitySpectrum,
    HarmonicSpectrum,
    OverdampedSpectrum,
    Kernel,
}

#[derive(Args, Debug)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub curve: CurveArg,
    #[arg(long)]
    pub h: f64,
    #[command(flatten)]
    pub physics: Physics,
    /// First grid point (lag, frequency or Laplace variable).
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Last grid point.
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Logarithmic spacing (requires a positive start).
    #[arg(long)]
    pub log: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MsdArgs {
    /// `free` integrates the velocity; `overdamped` and `harmonic` use x(t) - x(0).
    #[arg(long, value_enum, default_value = "free")]
    pub regime: RegimeArg,
    #[arg(long)]
    pub h: f64,
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub dt: f64,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long)]
    pub seed: u64,
    /// Regression window in time units, `LO HI`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub window: Option<Vec<f64>>,
    /// Average squared increments over start times as well as paths.
    #[arg(long)]
    pub time_averaged: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct HeatbathArgs {
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 5000)]
    pub n_osc: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub omega_max: f64,
    /// Bath particle mass.
    #[arg(long, default_value_t = 1.0)]
    pub m_b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kbt: f64,
    /// Friction the bath kernel is calibrated to.
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 0.0)]
    pub psi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Integration step; defaults to 0.1 / omega_max.
    #[arg(long)]
    pub step: Option<f64>,
    /// Record every this many steps.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Trajectories to integrate.
    #[arg(long, default_value_t = 1)]
    pub members: usize,
    /// Initial conditions drawn for the fluctuation-dissipation check.
    #[arg(long, default_value_t = 1000)]
    pub fd_members: usize,
    #[arg(long)]
    pub seed: u64,
    /// Particle trajectory of the first member.
    #[arg(long)]
    pub out: PathBuf,
    /// Fluctuation-dissipation report.
    #[arg(long)]
    pub fd_report: Option<PathBuf>,
    /// Ensemble MSD of the integrated members.
    #[arg(long)]
    pub msd_out: Option<PathBuf>,
    /// Bath kernel J(t) against zeta K(t).
    #[arg(long)]
    pub kernel_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LifetimeArgs {
    /// Displacement trace CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub k0: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x_eq: f64,
    /// Lifetime trace CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the empirical lifetime autocovariance up to this lag index.
    #[arg(long, requires = "corr_out")]
    pub max_lag: Option<usize>,
    #[arg(long, requires = "max_lag")]
    pub corr_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Autocovariance CSV (`lag,value`, lag 0 first).
    #[arg(long, conflicts_with = "trace", required_unless_present = "trace")]
    pub input: Option<PathBuf>,
    /// Lifetime trace CSV; its autocovariance is computed first.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Largest lag index taken from a trace.
    #[arg(long, default_value_t = 200)]
    pub max_lag: usize,
    /// Only lags up to this time enter the objective.
    #[arg(long)]
    pub fit_until: Option<f64>,
    /// Hold the amplitude beta^2 k_B T/(m psi) fixed.
    #[arg(long, conflicts_with = "amplitude_from_moments")]
    pub amplitude: Option<f64>,
    /// Fix the amplitude from the trace moments, log(1 + Var/mean^2).
    #[arg(long, requires = "trace")]
    pub amplitude_from_moments: bool,
    /// Key=value result file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fitted model curve on the input lags.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    /// Displacement autocovariance CSV (`lag,value`).
    #[arg(long, conflicts_with = "trace", required_unless_present = "trace")]
    pub input: Option<PathBuf>,
    /// Displacement trace CSV; its autocovariance is computed first.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub max_lag: usize,
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, default_value_t = 20)]
    pub points_per_decade: usize,
    /// Also write the covariance transform.
    #[arg(long)]
    pub transform_out: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PotentialArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Histogram bins (Freedman-Diaconis when omitted).
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub kbt: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig4,
    Fig6b,
    Fig7a,
    Fig7b,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, default_value_t = 0.75)]
    pub h: f64,
    #[arg(long)]
    pub seed: u64,
    /// Samples in the synthetic trace.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(subdiff::Error),
}

impl From<subdiff::Error> for Failure {
    fn from(e: subdiff::Error) -> Self {
        Failure::Compute(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Analytic(a) => commands::analytic(a),
        Command::Msd(a) => commands::msd(a),
        Command::Heatbath(a) => commands::heatbath(a),
        Command::Lifetime(a) => commands::lifetime(a),
        Command::Fit(a) => commands::fit(a),
        Command::RecoverKernel(a) => commands::recover_kernel_cmd(a),
        Command::Potential(a) => commands::potential(a),
        Command::Figure(a) => figures::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
