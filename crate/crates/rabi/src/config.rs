//! Run configuration. Every field has a default; a JSON file given with
//! `--config` is merged over the command-line values.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config, Result};
use crate::experiments::{Grid, HorizonRule, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Splitting,
    #[default]
    Evolve,
    Metrics,
    Contour,
    Slices,
    Converge,
    Bounds,
    Figures,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Splitting => "splitting",
            Command::Evolve => "evolve",
            Command::Metrics => "metrics",
            Command::Contour => "contour",
            Command::Slices => "slices",
            Command::Converge => "converge",
            Command::Bounds => "bounds",
            Command::Figures => "figures",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self { csv: true, json: true, svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub lambdas: Grid,
    /// Lowest levels in total, split over the two parity sectors.
    pub levels: usize,
    pub n_max: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { lambdas: Grid::Linear { start: 0.005, stop: 0.8, count: 160 }, levels: 24, n_max: 120 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingConfig {
    pub delta: f64,
    /// Highest level index scanned.
    pub n_max: usize,
    /// First level of the free-exponent fit.
    pub fit_from: usize,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        Self { delta: 0.05, n_max: 60, fit_from: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub horizon: HorizonRule,
    /// Span of the semiclassical propagator comparison.
    pub propagator_horizon: f64,
    /// Write the joint states of the quantum runs to `snapshots_*.bin`.
    pub dump_snapshots: bool,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        let alpha = 10f64.sqrt();
        Self {
            lambda: 0.2 / alpha,
            alpha,
            horizon: HorizonRule::Revivals(3.0),
            propagator_horizon: 200.0,
            dump_snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub amplitudes: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Horizon in Rabi periods.
    pub periods: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { amplitudes: vec![0.2], lambdas: vec![1e-1, 1e-2, 1e-3, 1e-4], periods: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub amplitude: f64,
    pub t_max: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { amplitude: 0.2, t_max: 200.0 }
    }
}

/// Grids of the `figures` run, coarser than the single-figure defaults so
/// that the whole set finishes in minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiguresConfig {
    pub contour: SweepSpec,
    pub slices: SweepSpec,
    pub convergence: ConvergenceConfig,
}

impl Default for FiguresConfig {
    fn default() -> Self {
        Self {
            contour: SweepSpec {
                lambdas: Grid::Log { start: 1e-2, stop: 0.3, count: 8 },
                alphas: Grid::Linear { start: 1.0, stop: 30.0, count: 8 },
                ..SweepSpec::default()
            },
            slices: SweepSpec { lambdas: Grid::Log { start: 1e-2, stop: 5e-2, count: 6 }, ..SweepSpec::default() },
            convergence: ConvergenceConfig { amplitudes: vec![0.05, 0.1, 0.2, 0.3], ..ConvergenceConfig::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Command,
    pub output_dir: PathBuf,
    pub formats: Formats,
    /// `None` uses every available core; `RABI_WORKERS` overrides both.
    pub workers: Option<usize>,
    /// Per-cell progress on stderr.
    pub progress: bool,
    pub correlation_cutoff: f64,
    pub spectrum: SpectrumConfig,
    pub splitting: SplittingConfig,
    pub dynamics: DynamicsConfig,
    pub bounds: BoundsConfig,
    pub contour: SweepSpec,
    pub slices: SweepSpec,
    pub convergence: ConvergenceConfig,
    pub figures: FiguresConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: Command::default(),
            output_dir: PathBuf::from("out"),
            formats: Formats::default(),
            workers: None,
            progress: true,
            correlation_cutoff: rabi_core::metrics::DEFAULT_CORRELATION_CUTOFF,
            spectrum: SpectrumConfig::default(),
            splitting: SplittingConfig::default(),
            dynamics: DynamicsConfig::default(),
            bounds: BoundsConfig::default(),
            contour: SweepSpec::default(),
            // alpha = A / lambda stays within the contour's [1, 30] for every default A
            slices: SweepSpec { lambdas: Grid::Log { start: 1e-2, stop: 5e-2, count: 10 }, ..SweepSpec::default() },
            convergence: ConvergenceConfig::default(),
            figures: FiguresConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config(format!("config: {e}")))
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Overlays a partial JSON document on this config. Objects merge key by
    /// key; any other value replaces the current one.
    pub fn merge_json(&self, text: &str) -> Result<Self> {
        let overlay: serde_json::Value = serde_json::from_str(text).map_err(|e| config(format!("config: {e}")))?;
        if !overlay.is_object() {
            return Err(config("config file must hold a JSON object"));
        }
        let mut base = serde_json::to_value(self).expect("config serialises");
        merge(&mut base, overlay);
        serde_json::from_value(base).map_err(|e| config(format!("config: {e}")))
    }
}

fn merge(base: &mut serde_json::Value, overlay: serde_json::Value) {
    match (base, overlay) {
        // a single-key object is an enum variant; switching variants replaces it
        (serde_json::Value::Object(b), serde_json::Value::Object(o))
            if b.len() == 1 && o.len() == 1 && b.keys().ne(o.keys()) =>
        {
            *b = o;
        }
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
