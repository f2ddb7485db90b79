//! Command-line front end: runs the chirped two-level-system experiments and
//! writes CSV.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use chirp_tls::analysis::{self, bloch_siegert_scan, compare, lz_sweep, run_backends};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<chirp_tls::Error> for CliError {
    fn from(e: chirp_tls::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "chirp-tls",
    version,
    about = "Chirped two-level system simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a chirp with every selected backend and write the stroboscopic traces.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Compare exact sweeps through resonance with the Landau-Zener formula.
    LzSweep {
        #[command(flatten)]
        common: Common,
        /// Chirp rates in GHz/ns.
        #[arg(long, value_delimiter = ',', conflicts_with = "alpha_ratios")]
        alphas: Option<Vec<f64>>,
        /// Chirp rates as 2α/(uη)².
        #[arg(long, value_delimiter = ',')]
        alpha_ratios: Option<Vec<f64>>,
        /// Window half-width in units of uη (at least 20).
        #[arg(long)]
        window: Option<f64>,
    },
    /// Locate the harmonic-drive resonance of each backend.
    BlochSiegert {
        #[command(flatten)]
        common: Common,
        /// Explicit drive frequencies in GHz.
        #[arg(long, value_delimiter = ',')]
        omega0s: Option<Vec<f64>>,
        /// Scan half-width in units of uη.
        #[arg(long)]
        span: Option<f64>,
        /// Number of scan points
        #[arg(long)]
        points: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Start from a named parameter set.
    #[arg(long, value_parser = ["fig3", "shalibo"])]
    preset: Option<String>,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,
    /// Static splitting Δ₀ in GHz.
    #[arg(long, allow_hyphen_values = true)]
    delta0: Option<f64>,
    /// Static bias ε₀ in GHz.
    #[arg(long, allow_hyphen_values = true)]
    epsilon0: Option<f64>,
    /// Initial drive frequency in GHz.
    #[arg(long)]
    omega0: Option<f64>,
    /// Chirp rate in GHz/ns.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Drive amplitude in GHz.
    #[arg(long)]
    eta: Option<f64>,
    /// Number of drive periods (overrides --omega-end)
    #[arg(long)]
    n_periods: Option<usize>,
    /// Final drive frequency in GHz.
    #[arg(long)]
    omega_end: Option<f64>,
    /// Relative integrator tolerance
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute integrator tolerance
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Largest integrator step in ns.
    #[arg(long)]
    max_step: Option<f64>,
    /// First integrator step in ns.
    #[arg(long)]
    initial_step: Option<f64>,
    /// Comma-separated subset of exact,rwa,magnus1,magnus2.
    #[arg(long, value_delimiter = ',')]
    backends: Option<Vec<String>>,
    /// Initial Bloch vector as x,y,z.
    #[arg(long, value_delimiter = ',', num_args = 3, allow_hyphen_values = true)]
    initial_state: Option<Vec<f64>>,
}

impl Common {
    fn overrides(&self) -> Result<RunConfig, CliError> {
        let initial_state =
            match &self.initial_state {
                Some(v) => Some(<[f64; 3]>::try_from(v.as_slice()).map_err(|_| {
                    CliError::Config("`initial_state` needs three components".into())
                })?),
                None => None,
            };
        Ok(RunConfig {
            delta0_ghz: self.delta0,
            epsilon0_ghz: self.epsilon0,
            omega0_ghz: self.omega0,
            alpha_ghz_per_ns: self.alpha,
            eta_ghz: self.eta,
            n_periods: self.n_periods,
            omega_end_ghz: self.omega_end,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step_ns: self.max_step,
            initial_step_ns: self.initial_step,
            backends: self.backends.clone(),
            initial_state,
            output_path: self.out.as_ref().map(|p| p.display().to_string()),
            ..Default::default()
        })
    }

    /// Preset, then file, then command line.
    fn resolve(&self, extra: RunConfig) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            cfg = cfg.overlay(RunConfig::from_file(path)?);
        }
        Ok(cfg
            .overlay(self.overrides()?)
            .overlay(extra)
            .with_defaults())
    }
}

fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let tls = cfg.tls()?;
    let drive = cfg.drive()?;
    let integrator = cfg.integrator()?;
    let methods = cfg.backends()?;
    let r0 = cfg.initial_state()?;
    for w in drive.validity(&tls).warnings() {
        eprintln!("warning: {w}");
    }
    let grid = drive.build_grid()?;
    let traces = run_backends(&tls, &grid, &r0, &integrator, &methods)?;

    let mut out = output::open(cfg)?;
    output::write_header(
        &mut out,
        "simulate",
        cfg,
        &[format!("n_periods = {}", drive.n_periods)],
    )?;
    output::write_traces(&mut out, &tls, &drive, &traces)?;
    out.finish()?;

    eprintln!(
        "{} periods, t_N = {:.6} ns",
        drive.n_periods,
        grid.times()[drive.n_periods]
    );
    for (i, a) in traces.iter().enumerate() {
        for b in &traces[i + 1..] {
            let rep = compare(a, b)?;
            eprintln!(
                "{:>8} vs {:<8} max |dP_x| = {:.3e}  mean |dP_x| = {:.3e}",
                a.method, b.method, rep.max_abs_px_error, rep.mean_abs_px_error
            );
        }
    }
    Ok(())
}

fn lz(cfg: &RunConfig) -> Result<(), CliError> {
    let tls = cfg.tls()?;
    let eta = cfg.eta()?;
    let alphas = cfg.lz_alphas(&tls)?;
    let window = cfg.lz_window.unwrap_or(analysis::LZ_DEFAULT_WINDOW);
    let points = lz_sweep(&tls, eta, &alphas, &cfg.integrator()?, window)?;

    let mut out = output::open(cfg)?;
    output::write_header(&mut out, "lz-sweep", cfg, &[])?;
    output::write_lz(&mut out, &points)?;
    out.finish()?;
    let worst = points.iter().map(|p| p.abs_err()).fold(0.0, f64::max);
    eprintln!(
        "{} chirp rates, max |P_exact - P_formula| = {worst:.3e}",
        points.len()
    );
    Ok(())
}

fn bloch_siegert(cfg: &RunConfig) -> Result<(), CliError> {
    let tls = cfg.tls()?;
    let eta = cfg.eta()?;
    let grid = cfg.scan_grid(&tls)?;
    let methods = cfg.backends()?;
    let scan = bloch_siegert_scan(&tls, eta, &grid, &methods, &cfg.integrator()?)?;
    let predicted = analysis::predicted_bloch_siegert_shift(&tls, eta);

    let mut out = output::open(cfg)?;
    output::write_header(&mut out, "bloch-siegert", cfg, &[])?;
    output::write_peaks(&mut out, &tls, predicted, &scan)?;
    out.finish()?;
    for (m, peak) in &scan.peaks {
        eprintln!(
            "{m:>8} peak at {peak:.9} rad/ns, shift / (3(u eta)^2/(4 Delta)) = {:.4}",
            (tls.splitting() - peak) / predicted
        );
    }
    Ok(())
}

type Handler = fn(&RunConfig) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, extra, cmd): (&Common, RunConfig, Handler) = match &cli.command {
        Command::Simulate { common } => (common, RunConfig::default(), simulate),
        Command::LzSweep {
            common,
            alphas,
            alpha_ratios,
            window,
        } => (
            common,
            RunConfig {
                alphas_ghz_per_ns: alphas.clone(),
                alpha_ratios: alpha_ratios.clone(),
                lz_window: *window,
                ..Default::default()
            },
            lz,
        ),
        Command::BlochSiegert {
            common,
            omega0s,
            span,
            points,
        } => (
            common,
            RunConfig {
                omega0s_ghz: omega0s.clone(),
                scan_span: *span,
                scan_points: *points,
                ..Default::default()
            },
            bloch_siegert,
        ),
    };
    let cfg = common.resolve(extra)?;
    if common.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    cmd(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
