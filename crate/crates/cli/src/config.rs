use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use dunklkit::dunkl_core::MultiplicityConfig;
use dunklkit::numerics::QuadratureSpec;
use dunklkit::transform::{Grid, GridSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Composite,
    Uniform,
}

/// Options shared by every command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Multiplicity κ ≥ 0.
    #[arg(long, global = true, default_value_t = 0.5, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Dimension; only rank one is supported.
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,
    /// Half-width of the spatial grid.
    #[arg(long = "grid-L", global = true, default_value_t = 12.0)]
    pub grid_l: f64,
    /// Gauss nodes per panel (composite) or total nodes (uniform).
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long = "grid-kind", global = true, value_enum, default_value_t = GridKind::Composite)]
    pub grid_kind: GridKind,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Number of family refinements for norm commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub refine: u32,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Output directory; not part of the config hash.
    #[arg(long, global = true, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Format of the value table; the JSON report is always written.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(CliError::Config(format!("κ must be a finite number >= 0, got {}", self.kappa)));
        }
        if self.dim != 1 {
            return Err(CliError::Config(format!("only dim = 1 is supported, got {}", self.dim)));
        }
        if !(self.grid_l > 0.0) || !self.grid_l.is_finite() {
            return Err(CliError::Config(format!("grid-L must be positive, got {}", self.grid_l)));
        }
        if let Some(n) = self.grid_n {
            if n < 2 {
                return Err(CliError::Config("grid-n must be at least 2".into()));
            }
        }
        if !(self.tol > 0.0) || self.tol >= 1.0 {
            return Err(CliError::Config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        Ok(())
    }

    pub fn multiplicity(&self) -> Result<MultiplicityConfig<f64>, CliError> {
        MultiplicityConfig::rank_one(self.kappa).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn spec(&self) -> QuadratureSpec<f64> {
        QuadratureSpec::new(self.tol, self.tol).with_max_evals(2_000_000)
    }

    pub fn grid_spec(&self, extent: f64) -> GridSpec {
        match self.grid_kind {
            GridKind::Composite => {
                let s = GridSpec::composite(extent);
                match self.grid_n {
                    Some(n) => s.with_nodes_per_panel(n),
                    None => s,
                }
            }
            GridKind::Uniform => GridSpec::uniform(extent, self.grid_n.unwrap_or(1025)),
        }
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid_spec(self.grid_l)).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// SHA-256 of the canonical JSON of the command name, shared options and
/// command options.
pub fn config_hash<T: Serialize>(command: &str, run: &RunConfig, params: &T) -> String {
    let doc = serde_json::json!({ "command": command, "run": run, "params": params });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}
