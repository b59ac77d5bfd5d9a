use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use dunklkit::numerics::adaptive_integrate;
use dunklkit::parallel::try_par_map;
use dunklkit::poisson::{conjugate_poisson_integral, kappa_gradient_poisson, poisson_integral, UpperHalfPlanePoint};
use dunklkit::riesz::{phi0_example, regularized_riesz_pv, riesz_extrapolated, truncated_riesz};
use dunklkit::spaces::{
    bmc_field, bmc_from_field, bmo_norm, bmo_orbit_norm, carleson_norm, carleson_norm_field, duality_pairing_lhs, duality_pairing_rhs,
    frequency_clean, BallFamily, BmcInput, DensityField, DualityOptions, FieldOptions, NormReport, Profile,
};
use dunklkit::transform::{
    forward_transform, forward_transform_fn, inverse_transform, Grid, GridSpec, SampledFunction, TransformOptions,
};
use dunklkit::{Parity, RealFunction};

use crate::builtins::{Builtin, FunctionArgs};
use crate::config::RunConfig;
use crate::output::{Emitter, Table};
use crate::verify::{run_all, VerifyOptions};
use crate::CliError;

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Dunkl transform of a builtin function with Plancherel and round-trip residuals.
    Transform(TransformArgs),
    /// Riesz transform (principal value, truncated or regularized) on a set of points.
    Riesz(RieszArgs),
    /// Poisson integral and its conjugate in the upper half plane.
    Poisson(PoissonArgs),
    /// BMO or orbit-BMO norm over a dyadic ball family.
    Bmo(NormArgs),
    /// Carleson norm of |∇u_f|² x0 over a dyadic ball family.
    Carleson(NormArgs),
    /// BMC seminorm over a dyadic ball family.
    Bmc(NormArgs),
    /// Both sides of the H¹-BMC pairing for a frequency-cleaned f.
    Duality(DualityArgs),
    /// φ₀ = R χ_[-1,1] near the endpoint with its lower bound.
    Phi0(Phi0Args),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transform(_) => "transform",
            Command::Riesz(_) => "riesz",
            Command::Poisson(_) => "poisson",
            Command::Bmo(_) => "bmo",
            Command::Carleson(_) => "carleson",
            Command::Bmc(_) => "bmc",
            Command::Duality(_) => "duality",
            Command::Phi0(_) => "phi0",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    pub f: FunctionArgs,
    /// Frequency cut-off; defaults to 24, or 40/x0 for poisson-p if larger.
    #[arg(long)]
    pub xi_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PointArgs {
    /// Evaluation points; overrides the uniform grid below.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xs: Vec<f64>,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 25)]
    pub n: usize,
}

impl PointArgs {
    fn points(&self) -> Result<Vec<f64>, CliError> {
        if !self.xs.is_empty() {
            return Ok(self.xs.clone());
        }
        if self.n < 2 || !(self.x_min < self.x_max) {
            return Err(CliError::Config("need n >= 2 and x-min < x-max".into()));
        }
        let h = (self.x_max - self.x_min) / (self.n - 1) as f64;
        Ok((0..self.n).map(|i| self.x_min + h * i as f64).collect())
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RieszArgs {
    #[command(flatten)]
    pub f: FunctionArgs,
    #[command(flatten)]
    pub points: PointArgs,
    /// Truncation radius; omit for the principal value.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Regularized transform, for bounded f that is not integrable.
    #[arg(long)]
    pub regularized: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PoissonArgs {
    #[command(flatten)]
    pub f: FunctionArgs,
    #[command(flatten)]
    pub points: PointArgs,
    /// Heights x0 > 0.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
    pub heights: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NormArgs {
    #[command(flatten)]
    pub f: FunctionArgs,
    /// Use R̃f of the selected function as the input.
    #[arg(long)]
    pub riesz: bool,
    /// Orbit-BMO instead of BMO (bmo only).
    #[arg(long)]
    pub orbit: bool,
    /// Direct tent quadrature instead of the cached density field (carleson only; slow).
    #[arg(long)]
    pub direct: bool,
    /// Dyadic family: centres in [-L, L], level, radii 2^k for k_min ≤ k ≤ k_max.
    #[arg(long, default_value_t = 2.0)]
    pub family_l: f64,
    #[arg(long, default_value_t = 3)]
    pub level: u32,
    #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
    pub k_min: i32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub k_max: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Phi {
    Sign,
    Lorentzian,
    Arctan,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DualityArgs {
    /// The bounded function paired with f; f gets the same parity.
    #[arg(long, value_enum, default_value_t = Phi::Sign)]
    pub phi: Phi,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Phi0Args {
    #[arg(long, value_delimiter = ',', default_value = "1.1,1.01,1.001")]
    pub xs: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Fast subset.
    #[arg(long)]
    pub quick: bool,
}

/// Result of a command: what was written and a short human summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// Set by `verify` when a criterion failed.
    pub failures: usize,
}

pub fn run(cmd: &Command, run: &RunConfig) -> Result<Outcome, CliError> {
    run.validate()?;
    let mut em = Emitter::new(cmd.name(), run, cmd);
    match cmd {
        Command::Transform(a) => transform(a, run, &mut em),
        Command::Riesz(a) => riesz(a, run, &mut em),
        Command::Poisson(a) => poisson(a, run, &mut em),
        Command::Bmo(a) => bmo(a, run, &mut em),
        Command::Carleson(a) => carleson(a, run, &mut em),
        Command::Bmc(a) => bmc(a, run, &mut em),
        Command::Duality(a) => duality(a, run, &mut em),
        Command::Phi0(a) => phi0(a, run, &mut em),
        Command::Verify(a) => verify(a, run, &mut em),
    }
}

fn done(files: Vec<PathBuf>, summary: Vec<String>) -> Outcome {
    Outcome { files, summary, failures: 0 }
}

fn transform(a: &TransformArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let poisson = a.f.function == Builtin::PoissonP;
    let xi_max = a.xi_max.unwrap_or(if poisson { (40.0 / a.f.x0).max(24.0) } else { 24.0 });
    let xi = Arc::new(Grid::new(GridSpec::composite(xi_max)).map_err(CliError::from)?);
    em.grid(xi.id());
    let mut results = json!({});
    let (ff, norm) = if poisson {
        // algebraic decay: pointwise quadrature instead of the sampled grid
        let ff = forward_transform_fn(&f, &xi, &cfg, &spec)?;
        let k2 = 2.0 * cfg.kappa();
        let sq = adaptive_integrate(|x: f64| f.eval(x).powi(2) * x.abs().powf(k2), 0.0, f64::INFINITY, &spec)?;
        let norm = (2.0 * cfg.c_kappa() * sq.value).sqrt();
        let err = ff
            .values
            .iter()
            .zip(xi.nodes())
            .map(|(v, &s)| (v - (-a.f.x0 * s.abs()).exp()).norm())
            .fold(0.0, f64::max);
        results["max_abs_error_vs_exp"] = json!(err);
        (ff, norm)
    } else {
        let grid = Arc::new(run.grid()?);
        em.grid(grid.id());
        let s = SampledFunction::from_real(grid.clone(), &cfg, &f)?;
        let opts = TransformOptions { quad: spec.clone(), ..Default::default() };
        let ff = forward_transform(&s, &xi, &opts)?;
        let back = inverse_transform(&ff, &grid, &TransformOptions { tail_tol: f64::INFINITY, ..opts })?;
        let n = s.l2_norm();
        let diff = back.values.iter().zip(&s.values).map(|(a, b)| a - b).collect();
        let err = SampledFunction::new(grid.clone(), diff, Parity::None, cfg.clone())?.l2_norm();
        results["round_trip_l2_error"] = json!(err / n);
        (ff, n)
    };
    let plancherel = (ff.l2_norm() - norm).abs() / norm;
    results["plancherel_residual"] = json!(plancherel);
    results["l2_norm"] = json!(norm);
    results["spectrum_tail_estimate"] = json!(ff.tail_estimate());
    let mut t = Table::new(&["xi", "re", "im"]);
    for (v, &s) in ff.values.iter().zip(xi.nodes()) {
        t.push(vec![s, v.re, v.im]);
    }
    let mut summary = vec![format!("Plancherel residual {:.3e}", plancherel)];
    if let Some(e) = results.get("max_abs_error_vs_exp") {
        summary.push(format!("max|F P - exp(-x0|xi|)| {:.3e}", e.as_f64().unwrap_or(f64::NAN)));
    }
    if let Some(e) = results.get("round_trip_l2_error") {
        summary.push(format!("round-trip relative L2 error {:.3e}", e.as_f64().unwrap_or(f64::NAN)));
    }
    Ok(done(em.emit(&t, results)?, summary))
}

fn riesz(a: &RieszArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let xs = a.points.points()?;
    if let Some(e) = a.eps {
        if !(e > 0.0) {
            return Err(CliError::Config(format!("--eps must be positive, got {}", e)));
        }
    }
    let rows = try_par_map(&xs, |&x| -> Result<(f64, f64), CliError> {
        let r = match (a.eps, a.regularized) {
            (Some(e), _) => truncated_riesz(&f, e, x, &cfg, &spec).map(|v| (v, 0.0)),
            (None, true) => regularized_riesz_pv(&f, x, &cfg, &spec).map(|v| (v, 0.0)),
            (None, false) => riesz_extrapolated(&f, x, &cfg, &spec).map(|r| (r.value, r.error_estimate)),
        };
        match r {
            Ok(v) => Ok(v),
            // the principal value does not exist at a jump of f
            Err(dunklkit::Error::Domain(_)) if a.eps.is_none() && f.breakpoints.iter().any(|b| b.abs() == x.abs()) => {
                Ok((f64::NAN, f64::NAN))
            }
            Err(e) => Err(e.into()),
        }
    })?;
    let skipped = rows.iter().filter(|r| r.0.is_nan()).count();
    let mut t = Table::new(&["x", "value", "error_estimate"]);
    for (&x, r) in xs.iter().zip(&rows) {
        t.push(vec![x, r.0, r.1]);
    }
    let mode = match (a.eps, a.regularized) {
        (Some(_), _) => "truncated",
        (None, true) => "regularized",
        (None, false) => "principal value",
    };
    let max = rows.iter().filter(|r| !r.0.is_nan()).map(|r| r.0.abs()).fold(0.0, f64::max);
    let results = json!({ "mode": mode, "points": xs.len(), "singular_points": skipped, "max_abs_value": max });
    let mut summary = vec![format!("{} at {} points, max |value| {:.6}", mode, xs.len(), max)];
    if skipped > 0 {
        summary.push(format!("{} points on a jump of f written as NaN", skipped));
    }
    Ok(done(em.emit(&t, results)?, summary))
}

fn poisson(a: &PoissonArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let xs = a.points.points()?;
    let mut pts = Vec::new();
    for &h in &a.heights {
        for &x in &xs {
            pts.push(UpperHalfPlanePoint::new(h, x)?);
        }
    }
    let vals = try_par_map(&pts, |&p| -> Result<(f64, f64), CliError> {
        Ok((poisson_integral(&f, p, &cfg, &spec)?, conjugate_poisson_integral(&f, p, &cfg, &spec)?))
    })?;
    let mut t = Table::new(&["x0", "x", "u", "conjugate"]);
    for (p, v) in pts.iter().zip(&vals) {
        t.push(vec![p.x0, p.x, v.0, v.1]);
    }
    let results = json!({ "points": pts.len() });
    Ok(done(em.emit(&t, results)?, vec![format!("{} points", pts.len())]))
}

/// Families for refinement levels 0..=refine.
fn families(a: &NormArgs, run: &RunConfig) -> Result<Vec<BallFamily>, CliError> {
    let mut fams = vec![BallFamily::dyadic(a.family_l, a.level, a.k_min, a.k_max)?];
    for _ in 0..run.refine {
        let next = fams.last().unwrap().refined();
        fams.push(next);
    }
    Ok(fams)
}

fn norm_table(fams: &[BallFamily], reps: &[NormReport]) -> Table {
    let mut t = Table::new(&["level", "balls", "value", "quadrature_error", "worst_center", "worst_radius"]);
    for (i, (fam, r)) in fams.iter().zip(reps).enumerate() {
        let w = r.worst();
        t.push(vec![
            i as f64,
            fam.len() as f64,
            r.value,
            r.quadrature_error,
            w.map(|b| b.center).unwrap_or(f64::NAN),
            w.map(|b| b.radius).unwrap_or(f64::NAN),
        ]);
    }
    t
}

fn norm_summary(name: &str, reps: &[NormReport]) -> Vec<String> {
    reps.iter().enumerate().map(|(i, r)| format!("{} refinement {}: {:.6} (quadrature error {:.1e})", name, i, r.value, r.quadrature_error)).collect()
}

fn bmo(a: &NormArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let fams = families(a, run)?;
    let half = fams.iter().map(|b| b.extent()).fold(0.0, f64::max);
    let profile = if a.riesz {
        let sing = f.symmetric_breakpoints();
        Profile::tabulate(&format!("R~{}", f.name), half, 1201, &sing, |x| regularized_riesz_pv(&f, x, &cfg, &spec))?
    } else {
        Profile::from_function(&f, half)
    };
    let reps: Vec<NormReport> = fams
        .iter()
        .map(|fam| if a.orbit { bmo_orbit_norm(&profile, fam, &cfg) } else { bmo_norm(&profile, fam, &cfg) })
        .collect::<Result<_, _>>()?;
    let t = norm_table(&fams, &reps);
    let name = if a.orbit { "orbit-BMO" } else { "BMO" };
    let summary = norm_summary(name, &reps);
    Ok(done(em.emit(&t, json!({ "norm": name, "reports": reps }))?, summary))
}

fn carleson(a: &NormArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let fams = families(a, run)?;
    let sing = f.symmetric_breakpoints();
    let density = |x0: f64, x: f64| -> dunklkit::Result<f64> {
        let p = UpperHalfPlanePoint::new(x0, x)?;
        Ok(x0 * kappa_gradient_poisson(&f, p, &cfg, &spec)?.norm_sqr())
    };
    let reps: Vec<NormReport> = if a.direct {
        let nu = |x0: f64, x: f64| density(x0, x).unwrap_or(f64::NAN);
        fams.iter().map(|fam| carleson_norm(nu, fam, &sing, &cfg)).collect::<Result<_, _>>()?
    } else {
        let mut opts = FieldOptions::for_family(fams.last().unwrap());
        opts.half_width = fams.iter().map(|b| b.extent()).fold(0.0, f64::max);
        let field = DensityField::build(density, &opts, &sing, cfg.kappa())?;
        fams.iter().map(|fam| carleson_norm_field(&field, fam, &cfg)).collect::<Result<_, _>>()?
    };
    if reps.iter().any(|r| !r.value.is_finite()) {
        return Err(CliError::Numeric("gradient of the Poisson integral failed inside a tent".into()));
    }
    let t = norm_table(&fams, &reps);
    let summary = norm_summary("Carleson", &reps);
    let method = if a.direct { "tent quadrature" } else { "density field" };
    Ok(done(em.emit(&t, json!({ "measure": "x0 |grad u_f|^2", "method": method, "reports": reps }))?, summary))
}

fn bmc(a: &NormArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let f = a.f.build(&cfg)?;
    let fams = families(a, run)?;
    let input = if a.riesz { BmcInput::RegularizedRiesz(f) } else { BmcInput::Function(f) };
    let finest = fams.last().unwrap();
    let mut opts = FieldOptions::for_family(finest);
    opts.half_width = fams.iter().map(|b| b.extent()).fold(0.0, f64::max);
    let field = bmc_field(&input, &opts, &cfg, &spec)?;
    let reps: Vec<NormReport> = fams.iter().map(|fam| bmc_from_field(&field, fam, &cfg)).collect::<Result<_, _>>()?;
    let t = norm_table(&fams, &reps);
    let summary = norm_summary("BMC", &reps);
    Ok(done(em.emit(&t, json!({ "field": opts, "reports": reps }))?, summary))
}

fn duality(a: &DualityArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let k = cfg.kappa();
    let spec = run.spec();
    let kernel_spec = dunklkit::numerics::QuadratureSpec::new(run.tol.max(1e-6), run.tol.max(1e-6)).with_max_evals(2_000_000);
    let (phi, odd) = match a.phi {
        Phi::Sign => (RealFunction::sign(), true),
        Phi::Lorentzian => (RealFunction::new("lorentzian", |x: f64| 1.0 / (1.0 + x * x)).with_parity(Parity::Even).with_sup_bound(1.0), false),
        Phi::Arctan => (RealFunction::new("arctan", |x: f64| x.atan()).with_parity(Parity::Odd).with_sup_bound(PI / 2.0), true),
    };
    let f0 = if odd {
        RealFunction::new("odd", move |x: f64| x * (x * x - 3.0 - 2.0 * k) * (-x * x / 2.0).exp()).with_parity(Parity::Odd)
    } else {
        RealFunction::new("even", move |x: f64| (1.0 + 2.0 * k - x * x) * (-x * x / 2.0).exp()).with_parity(Parity::Even)
    };
    let opts = DualityOptions::default();
    let f = frequency_clean(&f0, &cfg, &opts, &spec)?;
    let lhs = duality_pairing_lhs(&f, &phi, &cfg, &spec)?;
    let rhs = duality_pairing_rhs(&f, &phi, &cfg, &opts, &kernel_spec)?;
    let rel = (lhs - rhs).abs() / lhs.abs();
    let mut t = Table::new(&["lhs", "rhs", "relative_residual"]);
    t.push(vec![lhs, rhs, rel]);
    let results = json!({ "f": f0.name, "phi": phi.name, "lhs": lhs, "rhs": rhs, "relative_residual": rel, "options": opts });
    Ok(done(em.emit(&t, results)?, vec![format!("lhs {:.10}, rhs {:.10}, relative residual {:.2e}", lhs, rhs, rel)]))
}

fn phi0(a: &Phi0Args, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let cfg = run.multiplicity()?;
    let spec = run.spec();
    let vals = a.xs.iter().map(|&x| phi0_example(x, &cfg, &spec)).collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["x", "phi0", "lower_bound"]);
    for p in &vals {
        t.push(vec![p.x, p.value, p.lower_bound]);
    }
    let above = vals.iter().all(|p| p.value >= p.lower_bound);
    let results = json!({ "values": vals, "bound_holds": above });
    let summary = vals.iter().map(|p| format!("phi0({}) = {:.8} >= {:.8}", p.x, p.value, p.lower_bound)).collect();
    Ok(done(em.emit(&t, results)?, summary))
}

fn verify(a: &VerifyArgs, run: &RunConfig, em: &mut Emitter) -> Result<Outcome, CliError> {
    let opts = VerifyOptions { quick: a.quick, seed: run.seed };
    let outcomes = run_all(&opts, |o| println!("{}", o.line()));
    let mut t = Table::new(&["criterion", "passed", "seconds"]);
    for o in &outcomes {
        t.push(vec![o.id as f64, if o.passed { 1.0 } else { 0.0 }, o.seconds]);
    }
    let failures = outcomes.iter().filter(|o| !o.passed).count();
    let results = json!({ "quick": a.quick, "seed": run.seed, "criteria": outcomes, "failures": failures });
    let files = em.emit(&t, results)?;
    let summary = vec![format!("{} of {} criteria passed", outcomes.len() - failures, outcomes.len())];
    Ok(Outcome { files, summary, failures })
}
