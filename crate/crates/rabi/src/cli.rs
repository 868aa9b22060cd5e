//! Command-line front end. Exit codes: 0 on success, 2 for unusable
//! arguments or configuration, 3 when a computation or a write fails.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rabi_core::model::ModelParams;
use rabi_core::spectrum::spectrum_table;

use crate::config::{Command, ConvergenceConfig, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    bounds_table, constant_a_slices, convergence_study, correlation_contour, dynamics_comparison, splitting_scan,
    CellStatus, DynamicsOptions, Grid, HorizonRule, SweepResult, SweepSpec, DETERMINISM_NOTE,
};
use crate::output::{Manifest, OutputDir};
use crate::report;
use crate::sweep::{resolve_workers, Runner};

#[derive(Debug, Parser)]
#[command(
    name = "rabi",
    version,
    about = "Full versus rotating-wave dynamics of the quantum and semiclassical Rabi models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// JSON configuration merged over the flags; its values win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Skip SVG rendering.
    #[arg(long, global = true)]
    pub no_plots: bool,
    /// Skip JSON summaries (the manifest is always written).
    #[arg(long, global = true)]
    pub no_json: bool,
    /// Worker threads; RABI_WORKERS overrides.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// No per-cell progress on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Highest angular frequency entering the spectral correlation.
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Full and RWA energy spectra against the coupling.
    Spectrum(SpectrumArgs),
    /// Splitting points of the RWA doublets and their inverse-square-root fits.
    Splitting(SplittingArgs),
    /// Full and RWA populations of the quantum and semiclassical models.
    Evolve(DynamicsArgs),
    /// Populations plus every distance, bound and spectrum.
    Metrics(DynamicsArgs),
    /// Spectral correlation over a (lambda, alpha) grid.
    Contour(SweepArgs),
    /// Spectral correlation along lines of constant A = lambda alpha.
    Slices(SweepArgs),
    /// Convergence of the quantum to the semiclassical dynamics at fixed A.
    Converge(ConvergeArgs),
    /// Semiclassical propagator difference against its bound.
    Bounds(BoundsArgs),
    /// The full reproduction set on reduced sweep grids.
    Figures,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Coupling grid: a,b,c or lin:start:stop:count or log:start:stop:count.
    #[arg(long)]
    pub lambdas: Option<Grid>,
    /// Number of lowest levels, over both parity sectors.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Photon-number truncation.
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SplittingArgs {
    /// Splitting threshold in units of omega0.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Highest level index.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// First level of the free-exponent fit.
    #[arg(long)]
    pub fit_from: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Simulated span: 3rev, 20rabi or a time such as 200.
    #[arg(long)]
    pub horizon: Option<HorizonRule>,
    /// Span of the propagator comparison.
    #[arg(long)]
    pub propagator_horizon: Option<f64>,
    /// Write the quantum joint states to snapshots_full.bin and snapshots_rwa.bin.
    #[arg(long)]
    pub dump_snapshots: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Coupling grid: a,b,c or lin:start:stop:count or log:start:stop:count.
    #[arg(long)]
    pub lambdas: Option<Grid>,
    /// Field-amplitude grid of the contour.
    #[arg(long)]
    pub alphas: Option<Grid>,
    /// Drive amplitudes A of the slices and iso-lines.
    #[arg(long = "A", value_delimiter = ',')]
    pub amplitudes: Option<Vec<f64>>,
    #[arg(long)]
    pub horizon: Option<HorizonRule>,
    /// Also correlate the semiclassical pair of every contour cell.
    #[arg(long)]
    pub semiclassical: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Drive amplitudes A = lambda alpha.
    #[arg(long = "A", value_delimiter = ',')]
    pub amplitudes: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// Horizon in Rabi periods.
    #[arg(long)]
    pub periods: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "A")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_sweep(spec: &mut SweepSpec, a: SweepArgs) {
    set(&mut spec.lambdas, a.lambdas);
    set(&mut spec.alphas, a.alphas);
    set(&mut spec.amplitudes, a.amplitudes);
    set(&mut spec.horizon, a.horizon);
    spec.semiclassical |= a.semiclassical;
}

/// Builds the run configuration: defaults, then flags, then the `--config`
/// file. The subcommand always comes from the command line.
pub fn build_config(cli: Cli) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    set(&mut c.output_dir, cli.out);
    c.formats.svg &= !cli.no_plots;
    c.formats.json &= !cli.no_json;
    if cli.workers.is_some() {
        c.workers = cli.workers;
    }
    c.progress &= !cli.quiet;
    set(&mut c.correlation_cutoff, cli.cutoff);
    let command = match cli.command {
        Cmd::Spectrum(a) => {
            set(&mut c.spectrum.lambdas, a.lambdas);
            set(&mut c.spectrum.levels, a.levels);
            set(&mut c.spectrum.n_max, a.n_max);
            Command::Spectrum
        }
        Cmd::Splitting(a) => {
            set(&mut c.splitting.delta, a.delta);
            set(&mut c.splitting.n_max, a.n_max);
            set(&mut c.splitting.fit_from, a.fit_from);
            Command::Splitting
        }
        Cmd::Evolve(a) => {
            apply_dynamics(&mut c, a);
            Command::Evolve
        }
        Cmd::Metrics(a) => {
            apply_dynamics(&mut c, a);
            Command::Metrics
        }
        Cmd::Contour(a) => {
            apply_sweep(&mut c.contour, a);
            Command::Contour
        }
        Cmd::Slices(a) => {
            apply_sweep(&mut c.slices, a);
            Command::Slices
        }
        Cmd::Converge(a) => {
            set(&mut c.convergence.amplitudes, a.amplitudes);
            set(&mut c.convergence.lambdas, a.lambdas);
            set(&mut c.convergence.periods, a.periods);
            Command::Converge
        }
        Cmd::Bounds(a) => {
            set(&mut c.bounds.amplitude, a.amplitude);
            set(&mut c.bounds.t_max, a.t_max);
            Command::Bounds
        }
        Cmd::Figures => Command::Figures,
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        c = c.merge_json(&text)?;
    }
    c.subcommand = command;
    Ok(c)
}

fn apply_dynamics(c: &mut RunConfig, a: DynamicsArgs) {
    set(&mut c.dynamics.lambda, a.lambda);
    set(&mut c.dynamics.alpha, a.alpha);
    set(&mut c.dynamics.horizon, a.horizon);
    set(&mut c.dynamics.propagator_horizon, a.propagator_horizon);
    c.dynamics.dump_snapshots |= a.dump_snapshots;
}

/// Failures and warnings collected while a run writes its outputs.
#[derive(Debug, Default)]
struct Log {
    failures: Vec<String>,
    cells: usize,
}

impl Log {
    fn fail(&mut self, what: String) {
        eprintln!("failed: {what}");
        self.failures.push(what);
    }

    fn warn(&self, what: &str) {
        eprintln!("warning: {what}");
    }
}

fn run_spectrum(c: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let lambdas = c.spectrum.lambdas.values()?;
    let table = spectrum_table(&ModelParams::resonant(0.0)?, &lambdas, c.spectrum.levels, c.spectrum.n_max)?;
    report::spectrum(out, &table, c.spectrum.levels, c.spectrum.n_max)
}

fn run_splitting(c: &RunConfig, runner: &Runner, out: &mut OutputDir, log: &mut Log) -> Result<()> {
    let s = &c.splitting;
    let scan = splitting_scan(s.n_max, s.delta, s.fit_from, runner)?;
    log.cells += scan.rows.len();
    for r in scan.failures() {
        log.fail(format!("splitting n = {} {}: {}", r.n, r.branch.symbol(), r.error.as_deref().unwrap_or("")));
    }
    report::splitting(out, &scan)
}

fn run_dynamics(c: &RunConfig, out: &mut OutputDir, log: &mut Log, metrics: bool) -> Result<()> {
    let d = &c.dynamics;
    let opts = DynamicsOptions {
        horizon: d.horizon,
        correlation_cutoff: c.correlation_cutoff,
        propagator_horizon: d.propagator_horizon,
        snapshots: metrics || d.dump_snapshots,
        ..DynamicsOptions::default()
    };
    let cmp = dynamics_comparison(d.lambda, d.alpha, &opts)?;
    if cmp.horizon.capped {
        log.warn(&format!("horizon capped at t = {} (requested {})", cmp.horizon.t_end, cmp.horizon.requested));
    }
    for v in &cmp.violations {
        log.warn(v);
    }
    report::dynamics(out, &cmp, d.horizon, metrics)?;
    if d.dump_snapshots {
        for (name, tr) in [("snapshots_full.bin", &cmp.quantum_full), ("snapshots_rwa.bin", &cmp.quantum_rwa)] {
            if let Some(s) = &tr.snapshots {
                out.snapshots(name, s)?;
            }
        }
    }
    Ok(())
}

fn report_cells(res: &SweepResult, log: &mut Log) {
    log.cells += res.rows.len();
    for r in &res.rows {
        let at = format!("lambda = {}, alpha = {}", r.lambda, r.alpha);
        match &r.status {
            CellStatus::Failed(e) => log.fail(format!("cell {at}: {e}")),
            CellStatus::HorizonCapped => log.warn(&format!("cell {at}: horizon capped at t = {}", r.t_end)),
            CellStatus::Ok => {}
        }
        for v in &r.violations {
            log.warn(&format!("cell {at}: {v}"));
        }
    }
}

fn with_cutoff(spec: &SweepSpec, cutoff: f64) -> SweepSpec {
    SweepSpec { correlation_cutoff: cutoff, ..spec.clone() }
}

fn run_contour(spec: &SweepSpec, runner: &Runner, out: &mut OutputDir, log: &mut Log) -> Result<()> {
    let res = correlation_contour(spec, runner)?;
    report_cells(&res, log);
    report::contour(out, &res)
}

fn run_slices(spec: &SweepSpec, runner: &Runner, out: &mut OutputDir, log: &mut Log) -> Result<()> {
    let res = constant_a_slices(spec, runner)?;
    report_cells(&res, log);
    report::slices(out, &res)
}

fn run_convergence(
    conv: &ConvergenceConfig,
    cutoff: f64,
    runner: &Runner,
    out: &mut OutputDir,
    log: &mut Log,
) -> Result<()> {
    if conv.amplitudes.is_empty() {
        return Err(Error::Config("convergence needs at least one amplitude".into()));
    }
    let mut studies = Vec::new();
    for &a in &conv.amplitudes {
        let s = convergence_study(a, &conv.lambdas, conv.periods, cutoff, runner)?;
        log.cells += s.rows.len();
        for r in &s.rows {
            if let Some(e) = &r.error {
                log.fail(format!("convergence A = {a}, lambda = {}: {e}", r.lambda));
            }
        }
        for run in &s.runs {
            for v in &run.violations {
                log.warn(&format!("convergence A = {a}, lambda = {}: {v}", run.lambda));
            }
        }
        studies.push(s);
    }
    report::convergence(out, &studies)
}

fn run_bounds(c: &RunConfig, out: &mut OutputDir, log: &mut Log) -> Result<()> {
    let b = bounds_table(c.bounds.amplitude, c.bounds.t_max)?;
    if !b.holds() {
        log.warn("propagator bound broken");
    }
    report::bounds(out, &b)
}

fn execute(c: &RunConfig, command: Command, runner: &Runner, out: &mut OutputDir, log: &mut Log) -> Result<()> {
    let cutoff = c.correlation_cutoff;
    match command {
        Command::Spectrum => run_spectrum(c, out),
        Command::Splitting => run_splitting(c, runner, out, log),
        Command::Evolve => run_dynamics(c, out, log, false),
        Command::Metrics => run_dynamics(c, out, log, true),
        Command::Contour => run_contour(&with_cutoff(&c.contour, cutoff), runner, out, log),
        Command::Slices => run_slices(&with_cutoff(&c.slices, cutoff), runner, out, log),
        Command::Converge => run_convergence(&c.convergence, cutoff, runner, out, log),
        Command::Bounds => run_bounds(c, out, log),
        Command::Figures => {
            let f = &c.figures;
            let steps: [(&str, &dyn Fn(&mut OutputDir, &mut Log) -> Result<()>); 7] = [
                ("fig01_spectrum", &|o, _| run_spectrum(c, o)),
                ("fig02_splitting", &|o, l| run_splitting(c, runner, o, l)),
                ("fig03_06_dynamics", &|o, l| run_dynamics(c, o, l, true)),
                ("fig05_bounds", &|o, l| run_bounds(c, o, l)),
                ("fig07_contour", &|o, l| run_contour(&with_cutoff(&f.contour, cutoff), runner, o, l)),
                ("fig08_slices", &|o, l| run_slices(&with_cutoff(&f.slices, cutoff), runner, o, l)),
                ("fig09_10_convergence", &|o, l| run_convergence(&f.convergence, cutoff, runner, o, l)),
            ];
            for (dir, step) in steps {
                if c.progress {
                    eprintln!("[figures] {dir}");
                }
                out.set_scope(Some(dir));
                let r = step(out, log);
                out.set_scope(None);
                r?;
            }
            Ok(())
        }
    }
}

/// Runs a parsed configuration and writes its outputs and manifest.
pub fn run_config(c: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let workers = resolve_workers(c.workers)?;
    let runner = Runner::new(workers, c.progress);
    let mut out = OutputDir::create(&c.output_dir, c.formats)?;
    let mut log = Log::default();
    let result = execute(c, c.subcommand, &runner, &mut out, &mut log);
    let manifest = Manifest {
        tool: "rabi",
        version: env!("CARGO_PKG_VERSION"),
        core_version: rabi_core::VERSION,
        subcommand: c.subcommand.name().to_string(),
        config: serde_json::to_value(c).expect("config serialises"),
        config_hash: c.hash(),
        workers,
        wall_time_s: started.elapsed().as_secs_f64(),
        determinism: DETERMINISM_NOTE,
        failures: log.failures.clone(),
        files: Vec::new(),
    };
    out.manifest(&manifest)?;
    result?;
    if !log.failures.is_empty() {
        return Err(Error::Cells { failed: log.failures.len(), total: log.cells });
    }
    Ok(())
}

/// Parses `argv` (program name first), runs it and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = build_config(cli).and_then(|c| run_config(&c));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
