use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use dunklkit::dunkl_core::MultiplicityConfig;
use dunklkit::{Parity, RealFunction};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Gaussian,
    Bump,
    OddGaussian,
    PoissonP,
    ChiInterval,
    Sign,
    LogAbs,
    Constant,
    CustomCsv,
}

/// Input function selection.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FunctionArgs {
    #[arg(long = "fn", value_enum, default_value_t = Builtin::Gaussian)]
    pub function: Builtin,
    /// Height of the Poisson kernel for `poisson-p`.
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
    /// Interval for `chi-interval`, centre and radius for `bump`.
    #[arg(long, default_value_t = -1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Value for `constant`.
    #[arg(long, default_value_t = 1.0)]
    pub value: f64,
    /// Two-column x,f file for `custom-csv`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl FunctionArgs {
    pub fn build(&self, cfg: &MultiplicityConfig<f64>) -> Result<RealFunction, CliError> {
        Ok(match self.function {
            Builtin::Gaussian => RealFunction::gaussian(),
            Builtin::Bump => {
                if !(self.b > 0.0) {
                    return Err(CliError::Config("bump needs radius --b > 0".into()));
                }
                RealFunction::bump(self.a, self.b)
            }
            Builtin::OddGaussian => RealFunction::odd_gaussian(),
            Builtin::PoissonP => {
                if !(self.x0 > 0.0) {
                    return Err(CliError::Config(format!("--x0 must be positive, got {}", self.x0)));
                }
                RealFunction::poisson(self.x0, cfg)
            }
            Builtin::ChiInterval => {
                if !(self.a < self.b) {
                    return Err(CliError::Config(format!("empty interval [{}, {}]", self.a, self.b)));
                }
                RealFunction::indicator(self.a, self.b)
            }
            Builtin::Sign => RealFunction::sign(),
            Builtin::LogAbs => RealFunction::log_abs(),
            Builtin::Constant => RealFunction::constant(self.value),
            Builtin::CustomCsv => {
                let p = self.csv.as_ref().ok_or_else(|| CliError::Config("custom-csv needs --csv FILE".into()))?;
                custom_csv(p)?
            }
        })
    }
}

/// Piecewise-linear function through the rows of a two-column file, zero
/// outside the first and last abscissa. Lines starting with `#` and a
/// non-numeric header are skipped.
pub fn custom_csv(path: &Path) -> Result<RealFunction, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<(f64, f64)> = match cols.as_slice() {
            [x, y, ..] => x.parse().ok().zip(y.parse().ok()),
            _ => None,
        };
        match parsed {
            Some(p) => pts.push(p),
            None if pts.is_empty() => continue,
            None => return Err(CliError::Config(format!("{}:{}: expected two numbers", path.display(), i + 1))),
        }
    }
    if pts.len() < 2 {
        return Err(CliError::Config(format!("{}: need at least two rows", path.display())));
    }
    if pts.windows(2).any(|w| !(w[1].0 > w[0].0)) || pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(CliError::Config(format!("{}: abscissae must be finite and strictly increasing", path.display())));
    }
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    let sup = pts.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom").to_string();
    let data = pts.clone();
    let f = RealFunction::new(&name, move |x| {
        if x < lo || x > hi {
            return 0.0;
        }
        let j = data.partition_point(|p| p.0 <= x).clamp(1, data.len() - 1);
        let (a, b) = (data[j - 1], data[j]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    });
    Ok(f.with_support(lo, hi).with_breakpoints(&[lo, hi]).with_sup_bound(sup).with_parity(Parity::None))
}
