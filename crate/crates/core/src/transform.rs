//! Dunkl transform, generalized translation and convolution in rank one.
//!
//! Functions are carried either analytically ([`RealFunction`]) or sampled on a
//! symmetric [`Grid`] ([`SampledFunction`]). Sampled transforms use the grid's
//! quadrature weights; analytic transforms integrate to infinity with an
//! accelerated oscillatory tail.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dunkl_core::{intertwining_integral, kernel_i_1d, MultiplicityConfig};
use crate::functions::{Parity, RealFunction};
use crate::numerics::{adaptive_integrate, gauss_kronrod, gauss_legendre, integrate_oscillatory, QuadratureSpec};
use crate::parallel::{par_map, try_par_map};
use crate::{Error, Result};

pub const FORMAT_TAG: &str = "dunklkit,v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    /// Gauss-Legendre panels, graded geometrically toward 0, widening past the core.
    Composite,
    /// Equispaced nodes with trapezoid weights.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub extent: f64,
    pub nodes_per_panel: usize,
    pub core_width: f64,
    pub core_extent: f64,
    pub grading_levels: usize,
    pub breaks: Vec<f64>,
    /// Number of nodes for the uniform kind.
    pub uniform_n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            kind: GridKind::Composite,
            extent: 64.0,
            nodes_per_panel: 16,
            core_width: 0.25,
            core_extent: 8.0,
            grading_levels: 12,
            breaks: Vec::new(),
            uniform_n: 1025,
        }
    }
}

impl GridSpec {
    pub fn composite(extent: f64) -> Self {
        GridSpec { extent, ..Default::default() }
    }

    pub fn uniform(extent: f64, n: usize) -> Self {
        GridSpec { kind: GridKind::Uniform, extent, uniform_n: n, ..Default::default() }
    }

    pub fn with_breaks(mut self, b: &[f64]) -> Self {
        self.breaks.extend_from_slice(b);
        self
    }

    pub fn with_nodes_per_panel(mut self, m: usize) -> Self {
        self.nodes_per_panel = m;
        self
    }

    pub fn with_core(mut self, width: f64, extent: f64) -> Self {
        self.core_width = width;
        self.core_extent = extent;
        self
    }

    /// Finer version: panels halved (composite) or nodes doubled (uniform).
    pub fn refined(&self) -> Self {
        let mut s = self.clone();
        match s.kind {
            GridKind::Composite => s.core_width *= 0.5,
            GridKind::Uniform => s.uniform_n = 2 * s.uniform_n - 1,
        }
        s
    }

    pub fn id(&self) -> String {
        match self.kind {
            GridKind::Composite => format!(
                "composite-L{}-m{}-h{}-c{}-g{}-b{}",
                self.extent,
                self.nodes_per_panel,
                self.core_width,
                self.core_extent,
                self.grading_levels,
                self.breaks.len()
            ),
            GridKind::Uniform => format!("uniform-L{}-n{}", self.extent, self.uniform_n),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    start: usize,
    len: usize,
}

/// Symmetric quadrature grid on [-L, L]: `nodes[n-1-i] == -nodes[i]`.
#[derive(Debug, Clone)]
pub struct Grid {
    spec: GridSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: Vec<Panel>,
    bary: Vec<f64>,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if !(spec.extent > 0.0) || !spec.extent.is_finite() {
            return Err(Error::Domain(format!("grid extent {} must be positive", spec.extent)));
        }
        match spec.kind {
            GridKind::Composite => Self::build_composite(spec),
            GridKind::Uniform => Self::build_uniform(spec),
        }
    }

    pub fn composite(extent: f64) -> Self {
        Self::new(GridSpec::composite(extent)).expect("valid default grid")
    }

    pub fn uniform(extent: f64, n: usize) -> Result<Self> {
        Self::new(GridSpec::uniform(extent, n))
    }

    fn build_composite(spec: GridSpec) -> Result<Self> {
        let m = spec.nodes_per_panel;
        if m < 2 || !(spec.core_width > 0.0) {
            return Err(Error::Domain("composite grid needs >= 2 nodes per panel and a positive core width".into()));
        }
        let l = spec.extent;
        let h = spec.core_width.min(l);
        let mut cuts = vec![0.0];
        for k in (1..=spec.grading_levels).rev() {
            cuts.push(h * 0.5f64.powi(k as i32));
        }
        let mut x = h;
        let core = spec.core_extent.min(l);
        while x < core - 1e-12 * core {
            cuts.push(x);
            x += h;
        }
        cuts.push(core);
        let mut w = 2.0 * h;
        let mut x = core;
        while x < l {
            x = (x + w).min(l);
            cuts.push(x);
            w *= 2.0;
        }
        for &b in &spec.breaks {
            let b = b.abs();
            if b > 0.0 && b < l {
                cuts.push(b);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1e-300));
        let (t, lam) = gauss_legendre::<f64>(m);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&i, &j| t[i].partial_cmp(&t[j]).unwrap());
        let t: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
        let lam: Vec<f64> = idx.iter().map(|&i| lam[i]).collect();
        let bw: Vec<f64> = (0..m)
            .map(|j| {
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * ((1.0 - t[j] * t[j]) * lam[j]).sqrt()
            })
            .collect();

        let pos: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        let mut all: Vec<(f64, f64)> = pos.iter().rev().map(|&(a, b)| (-b, -a)).collect();
        all.extend(pos.iter().copied());
        let mut nodes = Vec::with_capacity(all.len() * m);
        let mut weights = Vec::with_capacity(all.len() * m);
        let mut panels = Vec::with_capacity(all.len());
        for (a, b) in all {
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            panels.push(Panel { a, b, start: nodes.len(), len: m });
            for j in 0..m {
                nodes.push(c + r * t[j]);
                weights.push(r * lam[j]);
            }
        }
        // enforce exact mirror symmetry
        let n = nodes.len();
        for i in 0..n / 2 {
            nodes[n - 1 - i] = -nodes[i];
            weights[n - 1 - i] = weights[i];
        }
        Ok(Grid { spec, nodes, weights, panels, bary: bw })
    }

    fn build_uniform(spec: GridSpec) -> Result<Self> {
        let n = spec.uniform_n;
        if n < 3 {
            return Err(Error::Domain("uniform grid needs at least 3 nodes".into()));
        }
        let l = spec.extent;
        let h = 2.0 * l / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| -l + h * i as f64).collect();
        for i in 0..n / 2 {
            nodes[n - 1 - i] = -nodes[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Grid { spec, nodes, weights, panels: Vec::new(), bary: Vec::new() })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn extent(&self) -> f64 {
        self.spec.extent
    }
    pub fn id(&self) -> String {
        self.spec.id()
    }

    /// Index of the mirror node -x_i.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.nodes.len() - 1 - i
    }

    /// Indices of nodes with x > 0.
    pub fn positive_range(&self) -> std::ops::Range<usize> {
        let n = self.nodes.len();
        n.div_ceil(2)..n
    }

    /// Index of a node at exactly 0, if any.
    pub fn zero_node(&self) -> Option<usize> {
        let n = self.nodes.len();
        if n % 2 == 1 && self.nodes[n / 2] == 0.0 {
            Some(n / 2)
        } else {
            None
        }
    }

    /// Interpolate sampled values at `x` (barycentric per panel, linear on uniform grids).
    /// Returns 0 outside [-L, L].
    pub fn interpolate<V>(&self, values: &[V], x: f64) -> V
    where
        V: Copy + Default + std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V>,
    {
        let l = self.spec.extent;
        if !(x.abs() <= l) {
            return V::default();
        }
        match self.spec.kind {
            GridKind::Uniform => {
                let n = self.nodes.len();
                let h = 2.0 * l / (n - 1) as f64;
                let s = (x + l) / h;
                let i = (s.floor() as usize).min(n - 2);
                let f = s - i as f64;
                values[i] * (1.0 - f) + values[i + 1] * f
            }
            GridKind::Composite => {
                let k = self.panels.partition_point(|p| p.b < x).min(self.panels.len() - 1);
                let p = self.panels[k];
                let t = (2.0 * x - p.a - p.b) / (p.b - p.a);
                let mut num = V::default();
                let mut den = 0.0;
                for j in 0..p.len {
                    let tj = (2.0 * self.nodes[p.start + j] - p.a - p.b) / (p.b - p.a);
                    let d = t - tj;
                    if d == 0.0 {
                        return values[p.start + j];
                    }
                    let c = self.bary[j] / d;
                    num = num + values[p.start + j] * c;
                    den += c;
                }
                num * (1.0 / den)
            }
        }
    }
}

/// A function sampled on a symmetric grid, together with its multiplicity.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub parity: Parity,
    pub cfg: MultiplicityConfig<f64>,
}

impl SampledFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>, parity: Parity, cfg: MultiplicityConfig<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        check_rank_one(&cfg)?;
        Ok(SampledFunction { grid, values, parity, cfg })
    }

    pub fn from_real(grid: Arc<Grid>, cfg: &MultiplicityConfig<f64>, f: &RealFunction) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| Complex64::new(f.eval(x), 0.0)).collect();
        Self::new(grid, values, f.parity, cfg.clone())
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(
        grid: Arc<Grid>,
        cfg: &MultiplicityConfig<f64>,
        parity: Parity,
        f: F,
    ) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values, parity, cfg.clone())
    }

    pub fn kappa(&self) -> f64 {
        self.cfg.kappa()
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.grid.interpolate(&self.values, x)
    }

    /// ∫ f dω (no normalising constant).
    pub fn integral(&self) -> Complex64 {
        let k2 = 2.0 * self.kappa();
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((&x, &w), &v)| v * (w * pow_abs(x, k2)))
            .sum()
    }

    /// ‖f‖ in L²(c_κ dω).
    pub fn l2_norm(&self) -> f64 {
        let k2 = 2.0 * self.kappa();
        let s: f64 = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((&x, &w), v)| w * pow_abs(x, k2) * v.norm_sqr())
            .sum();
        (self.cfg.c_kappa() * s).sqrt()
    }

    /// Pointwise map with access to the node.
    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, parity: Parity, f: F) -> Self {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        SampledFunction { grid: self.grid.clone(), values, parity, cfg: self.cfg.clone() }
    }

    /// Pointwise product; both must live on the same grid.
    pub fn product(&self, other: &SampledFunction) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.spec() != other.grid.spec() {
            return Err(Error::Domain("product of functions on different grids".into()));
        }
        let parity = match (self.parity, other.parity) {
            (Parity::Even, p) | (p, Parity::Even) => p,
            (Parity::Odd, Parity::Odd) => Parity::Even,
            _ => Parity::None,
        };
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(SampledFunction { grid: self.grid.clone(), values, parity, cfg: self.cfg.clone() })
    }

    /// Max |f - g| over the nodes of `self` (g interpolated if on another grid).
    pub fn max_abs_diff(&self, other: &SampledFunction) -> f64 {
        let same = self.grid.spec() == other.grid.spec();
        self.grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let g = if same { other.values[i] } else { other.eval(x) };
                (self.values[i] - g).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Crude bound on the part of ∫|f| dω lying beyond the grid, from the edge values.
    pub fn tail_estimate(&self) -> f64 {
        let n = self.values.len();
        let k = 3.min(n / 2);
        let edge = self.values[..k].iter().chain(&self.values[n - k..]).map(|v| v.norm()).fold(0.0, f64::max);
        let l = self.grid.extent();
        edge * l.powf(2.0 * self.kappa() + 1.0)
    }
}

fn check_rank_one(cfg: &MultiplicityConfig<f64>) -> Result<()> {
    if !cfg.is_rank_one() {
        return Err(Error::Domain("sampled transforms are implemented for rank one".into()));
    }
    Ok(())
}

#[inline]
pub fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.abs().powf(p)
    }
}

#[derive(Debug, Clone)]
pub struct TransformOptions {
    /// Inputs whose estimated tail beyond the grid exceeds this are rejected.
    pub tail_tol: f64,
    pub quad: QuadratureSpec<f64>,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { tail_tol: 1e-6, quad: QuadratureSpec::new(1e-12, 1e-10) }
    }
}

/// out(y) = c_κ Σ_i w_i |x_i|^{2κ} f(x_i) E(i s y, x_i), s = ±1.
fn apply_kernel(f: &SampledFunction, out: &Arc<Grid>, sign: f64) -> Vec<Complex64> {
    let grid = &f.grid;
    let kappa = f.kappa();
    let k2 = 2.0 * kappa;
    let c = f.cfg.c_kappa();
    let pos: Vec<usize> = grid.positive_range().collect();
    let pw: Vec<(f64, f64)> = pos.iter().map(|&i| (grid.nodes()[i], grid.weights()[i] * pow_abs(grid.nodes()[i], k2))).collect();
    let fe: Vec<(Complex64, Complex64)> = pos
        .iter()
        .map(|&i| {
            let (p, m) = (f.values[i], f.values[grid.mirror(i)]);
            ((p + m) * 0.5, (p - m) * 0.5)
        })
        .collect();
    let zero = grid.zero_node().map(|i| f.values[i] * (grid.weights()[i] * pow_abs(0.0, k2)));

    let out_pos: Vec<usize> = out.positive_range().collect();
    let pairs: Vec<(Complex64, Complex64)> = par_map(&out_pos, |&j| {
        let y = out.nodes()[j];
        let mut se = Complex64::new(0.0, 0.0);
        let mut so = Complex64::new(0.0, 0.0);
        for (k, &(x, w)) in pw.iter().enumerate() {
            let e = kernel_i_1d(x * y, kappa);
            se += fe[k].0 * (w * e.re);
            so += fe[k].1 * (w * e.im);
        }
        // E(isy, x) = A + i s B over the pair (x, -x)
        let i = Complex64::new(0.0, 1.0);
        let z0 = zero.unwrap_or_default();
        let plus = (se * 2.0 + z0 + i * so * (2.0 * sign)) * c;
        let minus = (se * 2.0 + z0 - i * so * (2.0 * sign)) * c;
        (plus, minus)
    });
    let mut values = vec![Complex64::new(0.0, 0.0); out.len()];
    for (k, &j) in out_pos.iter().enumerate() {
        values[j] = pairs[k].0;
        values[out.mirror(j)] = pairs[k].1;
    }
    if let Some(j) = out.zero_node() {
        let s: Complex64 = fe.iter().zip(&pw).map(|(e, &(_, w))| e.0 * w).sum::<Complex64>() * 2.0;
        values[j] = (s + zero.unwrap_or_default()) * c;
    }
    values
}

/// F_κ f on the grid `xi_grid`: c_κ ∫ f(x) E(-iξ, x) dω(x).
pub fn forward_transform(f: &SampledFunction, xi_grid: &Arc<Grid>, opts: &TransformOptions) -> Result<SampledFunction> {
    let tail = f.tail_estimate();
    if tail > opts.tail_tol {
        return Err(Error::TailBoundExceeded { bound: tail, tol: opts.tail_tol });
    }
    let values = apply_kernel(f, xi_grid, -1.0);
    SampledFunction::new(xi_grid.clone(), values, f.parity, f.cfg.clone())
}

/// F_κ^{-1} g on `x_grid`: c_κ ∫ g(ξ) E(iξ, x) dω(ξ).
pub fn inverse_transform(g: &SampledFunction, x_grid: &Arc<Grid>, opts: &TransformOptions) -> Result<SampledFunction> {
    let tail = g.tail_estimate();
    if tail > opts.tail_tol {
        return Err(Error::TailBoundExceeded { bound: tail, tol: opts.tail_tol });
    }
    let values = apply_kernel(g, x_grid, 1.0);
    SampledFunction::new(x_grid.clone(), values, g.parity, g.cfg.clone())
}

/// F_κ^{-1} g at a single point.
pub fn inverse_transform_at(g: &SampledFunction, x: f64) -> Complex64 {
    let grid = &g.grid;
    let kappa = g.kappa();
    let k2 = 2.0 * kappa;
    let mut s = Complex64::new(0.0, 0.0);
    for (i, &xi) in grid.nodes().iter().enumerate() {
        let w = grid.weights()[i] * pow_abs(xi, k2);
        s += g.values[i] * kernel_i_1d(xi * x, kappa) * w;
    }
    s * g.cfg.c_kappa()
}

/// F_κ f(ξ) for an analytic f, integrating over the whole line.
///
/// Bounded supports are integrated exactly over the support; otherwise the
/// integral runs to a cut-off and the oscillatory tail is accelerated.
pub fn transform_point(f: &RealFunction, xi: f64, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<Complex64> {
    check_rank_one(cfg)?;
    let kappa = cfg.kappa();
    let k2 = 2.0 * kappa;
    let c = cfg.c_kappa();
    let even = |x: f64| {
        let fe = f.even_part(x);
        if fe == 0.0 {
            0.0
        } else {
            fe * pow_abs(x, k2) * kernel_i_1d(xi * x, kappa).re
        }
    };
    let odd = |x: f64| {
        let fo = f.odd_part(x);
        if fo == 0.0 {
            0.0
        } else {
            fo * pow_abs(x, k2) * kernel_i_1d(xi * x, kappa).im
        }
    };
    let want_even = f.parity != Parity::Odd;
    let want_odd = f.parity != Parity::Even;
    let mut breaks: Vec<f64> = f.symmetric_breakpoints().into_iter().filter(|&b| b > 0.0).collect();
    let finite_end = match f.support_radius() {
        Some(r) => r,
        None => breaks.last().copied().unwrap_or(0.0).max(0.0) + 16.0,
    };
    // panel length resolving the oscillation
    let step = if xi.abs() > 0.0 { (4.0 * std::f64::consts::PI / xi.abs()).min(2.0) } else { 2.0 };
    let mut x = step;
    while x < finite_end {
        breaks.push(x);
        x += step;
    }
    breaks.push(finite_end);
    breaks.retain(|&b| b <= finite_end);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let n = breaks.len() as f64 + 1.0;
    let integrate = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        let mut s = 0.0;
        let mut a = 0.0;
        for &b in &breaks {
            if b > a {
                s += gauss_kronrod(g, a, b, spec.abs_tol / n, spec.rel_tol, spec.max_evals)?.value;
            }
            a = b;
        }
        if f.support.is_none() {
            let tail = if xi != 0.0 {
                integrate_oscillatory(g, finite_end, std::f64::consts::PI / xi.abs(), spec)?
            } else {
                adaptive_integrate(g, finite_end, f64::INFINITY, spec)?
            };
            s += tail.value;
        }
        Ok(s)
    };
    let ie = if want_even { integrate(&even)? } else { 0.0 };
    let io = if want_odd { integrate(&odd)? } else { 0.0 };
    Ok(Complex64::new(2.0 * c * ie, -2.0 * c * io))
}

/// F_κ f sampled on `xi_grid`, each node computed by [`transform_point`].
pub fn forward_transform_fn(
    f: &RealFunction,
    xi_grid: &Arc<Grid>,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<SampledFunction> {
    let pos: Vec<usize> = xi_grid.positive_range().collect();
    let vals = try_par_map(&pos, |&j| transform_point(f, xi_grid.nodes()[j], cfg, spec))?;
    let mut values = vec![Complex64::new(0.0, 0.0); xi_grid.len()];
    for (k, &j) in pos.iter().enumerate() {
        values[j] = vals[k];
        // F f(-ξ): even part is even in ξ, odd part odd
        values[xi_grid.mirror(j)] = Complex64::new(vals[k].re, -vals[k].im);
    }
    if let Some(j) = xi_grid.zero_node() {
        values[j] = transform_point(f, 0.0, cfg, spec)?;
    }
    SampledFunction::new(xi_grid.clone(), values, f.parity, cfg.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TranslationRoute {
    /// F(τ_x f) = E(iξ, x) F f
    Spectral,
    /// Integral of the radial profile against μ_x; needs an even input.
    Radial,
}

/// τ_x f sampled on f's grid.
pub fn translate(
    f: &SampledFunction,
    x: f64,
    route: TranslationRoute,
    xi_grid: &Arc<Grid>,
    opts: &TransformOptions,
) -> Result<SampledFunction> {
    match route {
        TranslationRoute::Spectral => {
            let ff = forward_transform(f, xi_grid, opts)?;
            let kappa = f.kappa();
            let shifted = ff.map(Parity::None, |xi, v| v * kernel_i_1d(xi * x, kappa));
            let mut out = apply_kernel(&shifted, &f.grid, 1.0);
            if f.is_real(1e-14) {
                for v in &mut out {
                    v.im = 0.0;
                }
            }
            SampledFunction::new(f.grid.clone(), out, Parity::None, f.cfg.clone())
        }
        TranslationRoute::Radial => {
            if f.parity != Parity::Even {
                return Err(Error::MethodUnavailable("radial translation needs an even input".into()));
            }
            let profile = |r: f64| f.eval(r);
            let cfg = f.cfg.clone();
            let spec = opts.quad.clone();
            let nodes: Vec<f64> = f.nodes().to_vec();
            let vals = try_par_map(&nodes, |&t| radial_translate_at(&profile, x, t, &cfg, &spec))?;
            SampledFunction::new(f.grid.clone(), vals, Parity::None, f.cfg.clone())
        }
    }
}

/// (τ_x f)(t) = ∫ f₀(√(x² + t² + 2tξ)) dμ_x(ξ) for a radial f(y) = f₀(|y|).
pub fn radial_translate_at<F: Fn(f64) -> Complex64>(
    profile: &F,
    x: f64,
    t: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<Complex64> {
    let arg = |xi: f64| (x * x + t * t + 2.0 * t * xi).max(0.0).sqrt();
    let re = intertwining_integral(|xi| profile(arg(xi)).re, x, cfg, spec)?;
    let im = intertwining_integral(|xi| profile(arg(xi)).im, x, cfg, spec)?;
    Ok(Complex64::new(re, im))
}

/// f *_κ g = F^{-1}(F f · F g), sampled on `out`.
pub fn convolve(
    f: &SampledFunction,
    g: &SampledFunction,
    xi_grid: &Arc<Grid>,
    out: &Arc<Grid>,
    opts: &TransformOptions,
) -> Result<SampledFunction> {
    let ff = forward_transform(f, xi_grid, opts)?;
    let fg = forward_transform(g, xi_grid, opts)?;
    let prod = ff.product(&fg)?;
    inverse_transform(&prod, out, opts)
}

/// Convolution of two analytic functions through their accurately computed spectra.
pub fn convolve_functions(
    f: &RealFunction,
    g: &RealFunction,
    cfg: &MultiplicityConfig<f64>,
    xi_grid: &Arc<Grid>,
    out: &Arc<Grid>,
    opts: &TransformOptions,
) -> Result<SampledFunction> {
    let ff = forward_transform_fn(f, xi_grid, cfg, &opts.quad)?;
    let fg = forward_transform_fn(g, xi_grid, cfg, &opts.quad)?;
    let prod = ff.product(&fg)?;
    inverse_transform(&prod, out, opts)
}

/// Anything whose generalized translate can be evaluated pointwise.
pub trait Translatable {
    /// (τ_x f)(t)
    fn translate_at(&self, x: f64, t: f64) -> Result<f64>;
}

/// Spherical mean ((τ_x f)(r) + (τ_x f)(-r)) / 2.
pub fn spherical_mean<F: Translatable + ?Sized>(f: &F, x: f64, r: f64) -> Result<f64> {
    Ok(0.5 * (f.translate_at(x, r)? + f.translate_at(x, -r)?))
}

/// Polynomial Σ a_n y^n, translated exactly through the kernel's Taylor coefficients.
#[derive(Debug, Clone)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
    pub kappa: f64,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>, kappa: f64) -> Self {
        Polynomial { coeffs, kappa }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * y + a)
    }

    /// b_n with E(x, y) = Σ (xy)^n / b_n.
    fn b(&self, n: usize) -> Vec<f64> {
        let mut b = vec![1.0; n + 1];
        for k in 1..=n {
            let f = if k % 2 == 1 { k as f64 + 2.0 * self.kappa } else { k as f64 };
            b[k] = b[k - 1] * f;
        }
        b
    }

    /// D_κ applied to the polynomial.
    pub fn dunkl_derivative(&self) -> Polynomial {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n.saturating_sub(1).max(1)];
        for (k, &a) in self.coeffs.iter().enumerate().skip(1) {
            let f = if k % 2 == 1 { k as f64 + 2.0 * self.kappa } else { k as f64 };
            out[k - 1] += a * f;
        }
        Polynomial::new(out, self.kappa)
    }
}

impl Translatable for Polynomial {
    fn translate_at(&self, x: f64, t: f64) -> Result<f64> {
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(0.0);
        }
        let b = self.b(n - 1);
        let mut s = 0.0;
        for (d, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let mut term = 0.0;
            for k in 0..=d {
                term += x.powi(k as i32) * t.powi((d - k) as i32) / (b[k] * b[d - k]);
            }
            s += a * b[d] * term;
        }
        Ok(s)
    }
}

/// Radial function translated by the intertwining route.
pub struct RadialTranslation<'a> {
    pub profile: &'a RealFunction,
    pub cfg: MultiplicityConfig<f64>,
    pub spec: QuadratureSpec<f64>,
}

impl Translatable for RadialTranslation<'_> {
    fn translate_at(&self, x: f64, t: f64) -> Result<f64> {
        let p = |r: f64| Complex64::new(self.profile.eval(r), 0.0);
        Ok(radial_translate_at(&p, x, t, &self.cfg, &self.spec)?.re)
    }
}

/// Translation through a precomputed spectrum F f.
pub struct SpectralTranslation {
    pub spectrum: SampledFunction,
}

impl Translatable for SpectralTranslation {
    fn translate_at(&self, x: f64, t: f64) -> Result<f64> {
        let kappa = self.spectrum.kappa();
        let g = self.spectrum.map(Parity::None, |xi, v| v * kernel_i_1d(xi * x, kappa));
        Ok(inverse_transform_at(&g, t).re)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub kappa: f64,
    pub parity: Parity,
    pub grid: GridSpec,
    pub nodes: usize,
}

impl SampledFunction {
    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            format: FORMAT_TAG.into(),
            kappa: self.kappa(),
            parity: self.parity,
            grid: self.grid.spec().clone(),
            nodes: self.grid.len(),
        }
    }

    /// CSV `x,re,im` preceded by `#` metadata lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let side = serde_json::to_string(&self.sidecar()).expect("serializable");
        let _ = writeln!(s, "# {}", FORMAT_TAG);
        let _ = writeln!(s, "# meta={}", side);
        let _ = writeln!(s, "x,re,im");
        for (x, v) in self.grid.nodes().iter().zip(&self.values) {
            let _ = writeln!(s, "{:e},{:e},{:e}", x, v.re, v.im);
        }
        s
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::fs::File::create(path.as_ref())?;
        file.write_all(self.to_csv().as_bytes())?;
        let side = path.as_ref().with_extension("json");
        std::fs::write(side, serde_json::to_string_pretty(&self.sidecar()).expect("serializable"))?;
        Ok(())
    }

    pub fn from_csv_reader<R: BufRead>(r: R) -> Result<Self> {
        let mut meta: Option<Sidecar> = None;
        let mut tagged = false;
        let mut values = Vec::new();
        let mut xs = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if rest == FORMAT_TAG {
                    tagged = true;
                } else if let Some(m) = rest.strip_prefix("meta=") {
                    meta = Some(serde_json::from_str(m).map_err(|e| Error::Parse(e.to_string()))?);
                }
                continue;
            }
            if line.starts_with("x,") {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("expected x,re,im: {}", line)));
            }
            let p = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{}: {}", s, e)));
            xs.push(p(parts[0])?);
            values.push(Complex64::new(p(parts[1])?, p(parts[2])?));
        }
        if !tagged {
            return Err(Error::Parse(format!("missing '{}' tag", FORMAT_TAG)));
        }
        let meta = meta.ok_or_else(|| Error::Parse("missing meta line".into()))?;
        let grid = Arc::new(Grid::new(meta.grid.clone())?);
        if grid.len() != xs.len() || grid.nodes().iter().zip(&xs).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0)) {
            return Err(Error::Parse("nodes do not match the declared grid".into()));
        }
        SampledFunction::new(grid, values, meta.parity, MultiplicityConfig::rank_one(meta.kappa)?)
    }

    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: f64) -> MultiplicityConfig<f64> {
        MultiplicityConfig::rank_one(k).unwrap()
    }

    #[test]
    fn grid_symmetry_and_weights() {
        let g = Grid::composite(20.0);
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[g.mirror(i)]);
        }
        let total: f64 = g.weights().iter().sum();
        assert!((total - 40.0).abs() < 1e-12);
        // ∫ x^{2κ} over [0,20] with κ = 0.3 (graded panels at 0)
        let k2 = 0.6;
        let s: f64 = g.positive_range().map(|i| g.weights()[i] * g.nodes()[i].powf(k2)).sum();
        let exact = 20f64.powf(k2 + 1.0) / (k2 + 1.0);
        assert!((s - exact).abs() / exact < 1e-10, "{}", s - exact);
        let u = Grid::uniform(5.0, 101).unwrap();
        assert_eq!(u.zero_node(), Some(50));
    }

    #[test]
    fn interpolation() {
        let g = Grid::composite(10.0);
        let v: Vec<f64> = g.nodes().iter().map(|x| (x * 0.7).sin()).collect();
        for &x in &[-9.3, -0.001, 0.0, 0.37, 5.55] {
            assert!((g.interpolate(&v, x) - (x * 0.7).sin()).abs() < 1e-12);
        }
        assert_eq!(g.interpolate(&v, 11.0), 0.0);
    }

    #[test]
    fn gaussian_is_self_dual() {
        // F_κ e^{-x²/2} = e^{-ξ²/2} for every κ
        for &k in &[0.0, 0.5, 1.5] {
            let grid = Arc::new(Grid::composite(12.0));
            let f = SampledFunction::from_real(grid.clone(), &cfg(k), &RealFunction::gaussian()).unwrap();
            let ff = forward_transform(&f, &grid, &TransformOptions::default()).unwrap();
            for (i, &xi) in grid.nodes().iter().enumerate() {
                let e = (-0.5 * xi * xi).exp();
                assert!((ff.values[i] - e).norm() < 1e-12, "k={} xi={} {}", k, xi, ff.values[i]);
            }
        }
    }

    #[test]
    fn odd_gaussian_transform() {
        // F_κ (x e^{-x²/2}) = -i ξ e^{-ξ²/2}
        let k = 0.7;
        let grid = Arc::new(Grid::composite(12.0));
        let f = SampledFunction::from_real(grid.clone(), &cfg(k), &RealFunction::odd_gaussian()).unwrap();
        let ff = forward_transform(&f, &grid, &TransformOptions::default()).unwrap();
        for (i, &xi) in grid.nodes().iter().enumerate().step_by(37) {
            let e = Complex64::new(0.0, -xi * (-0.5 * xi * xi).exp());
            assert!((ff.values[i] - e).norm() < 1e-12);
        }
    }

    #[test]
    fn classical_exponential_pair() {
        // κ = 0: F e^{-|x|} = √(2/π)/(1+ξ²)
        let c = cfg(0.0);
        let f = RealFunction::new("exp-abs", |x: f64| (-x.abs()).exp())
            .with_parity(Parity::Even)
            .with_breakpoints(&[0.0]);
        let spec = QuadratureSpec::new(1e-13, 1e-11);
        for &xi in &[0.0, 0.3, 1.0, 4.0] {
            let v = transform_point(&f, xi, &c, &spec).unwrap();
            let e = (2.0 / std::f64::consts::PI).sqrt() / (1.0 + xi * xi);
            assert!((v.re - e).abs() < 1e-10 && v.im.abs() < 1e-14, "{} {}", v, e);
        }
    }

    #[test]
    fn poisson_transform_is_exponential() {
        let spec = QuadratureSpec::new(1e-11, 1e-10);
        for &k in &[0.0, 0.5, 1.3] {
            let p = RealFunction::poisson(1.0, &cfg(k));
            for &xi in &[0.0, 0.2, 1.0, 3.0] {
                let v = transform_point(&p, xi, &cfg(k), &spec).unwrap();
                assert!((v.re - (-xi).exp()).abs() < 1e-8, "k={} xi={} {}", k, xi, v);
            }
        }
    }

    #[test]
    fn round_trip_and_plancherel() {
        for &k in &[0.0, 0.5, 1.5] {
            let c = cfg(k);
            let grid = Arc::new(Grid::composite(12.0));
            let f = RealFunction::shifted_gaussian(0.8, 0.9);
            let s = SampledFunction::from_real(grid.clone(), &c, &f).unwrap();
            let opts = TransformOptions::default();
            let ff = forward_transform(&s, &grid, &opts).unwrap();
            assert!((ff.l2_norm() - s.l2_norm()).abs() / s.l2_norm() < 1e-10);
            let back = inverse_transform(&ff, &grid, &opts).unwrap();
            assert!(back.max_abs_diff(&s) < 1e-10);
        }
    }

    #[test]
    fn tail_bound_rejected() {
        let c = cfg(0.5);
        let grid = Arc::new(Grid::composite(16.0));
        let s = SampledFunction::from_real(grid.clone(), &c, &RealFunction::poisson(1.0, &c)).unwrap();
        assert!(matches!(
            forward_transform(&s, &grid, &TransformOptions::default()),
            Err(Error::TailBoundExceeded { .. })
        ));
    }

    #[test]
    fn translation_routes_agree() {
        let k = 0.8;
        let c = cfg(k);
        let grid = Arc::new(Grid::new(GridSpec::composite(12.0).with_core(0.5, 8.0)).unwrap());
        let f = SampledFunction::from_real(grid.clone(), &c, &RealFunction::gaussian()).unwrap();
        let opts = TransformOptions { quad: QuadratureSpec::new(1e-12, 1e-10), ..Default::default() };
        let x = 0.9;
        let sp = translate(&f, x, TranslationRoute::Spectral, &grid, &opts).unwrap();
        let radial = RadialTranslation { profile: &RealFunction::gaussian(), cfg: c.clone(), spec: opts.quad.clone() };
        for &t in &[-2.0, -0.9, -0.1, 0.4, 1.7] {
            let a = sp.eval(t).re;
            let b = radial.translate_at(x, t).unwrap();
            assert!((a - b).abs() < 1e-9, "t={} {} {}", t, a, b);
        }
        // mass is preserved
        assert!((sp.integral() - f.integral()).norm() < 1e-9);
        let odd = SampledFunction::from_real(grid.clone(), &c, &RealFunction::odd_gaussian()).unwrap();
        assert!(matches!(
            translate(&odd, x, TranslationRoute::Radial, &grid, &opts),
            Err(Error::MethodUnavailable(_))
        ));
    }

    #[test]
    fn polynomial_translation_and_mean_value() {
        let k = 1.3;
        // harmonic: 1 and y (D² kills both)
        let p = Polynomial::new(vec![2.0, -3.0], k);
        assert!(p.dunkl_derivative().dunkl_derivative().coeffs.iter().all(|&a| a == 0.0));
        for &(x, r) in &[(0.4, 1.1), (-2.0, 0.3)] {
            assert!((spherical_mean(&p, x, r).unwrap() - p.eval(x)).abs() < 1e-14);
        }
        // y²: τ_x(y²)(t) = x² + t² + 2xt/(2κ+1)... mean exceeds value
        let q = Polynomial::new(vec![0.0, 0.0, 1.0], k);
        let m = spherical_mean(&q, 0.5, 1.0).unwrap();
        assert!(m > q.eval(0.5));
        // κ = 0 reduces to ordinary translation
        let q0 = Polynomial::new(vec![1.0, 2.0, -1.0, 0.5], 0.0);
        assert!((q0.translate_at(0.7, -1.2).unwrap() - q0.eval(-0.5)).abs() < 1e-13);
        // symmetry τ_x f(t) = τ_t f(x)
        let q3 = Polynomial::new(vec![0.3, 1.0, -2.0, 0.7, 0.1], k);
        assert!((q3.translate_at(0.7, -1.2).unwrap() - q3.translate_at(-1.2, 0.7).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn convolution_of_gaussians() {
        // F(e^{-x²/2}) = e^{-ξ²/2}, so the self-convolution has spectrum e^{-ξ²},
        // i.e. is 2^{-κ-1/2} e^{-x²/4}
        let k = 0.6;
        let c = cfg(k);
        let grid = Arc::new(Grid::composite(14.0));
        let f = SampledFunction::from_real(grid.clone(), &c, &RealFunction::gaussian()).unwrap();
        let out = convolve(&f, &f, &grid, &grid, &TransformOptions::default()).unwrap();
        let scale = 2f64.powf(-k - 0.5);
        for (i, &x) in grid.nodes().iter().enumerate().step_by(41) {
            assert!((out.values[i].re - scale * (-x * x / 4.0).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_round_trip() {
        let grid = Arc::new(Grid::composite(6.0));
        let f = SampledFunction::from_real(grid, &cfg(0.4), &RealFunction::odd_gaussian()).unwrap();
        let text = f.to_csv();
        let g = SampledFunction::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(g.parity, Parity::Odd);
        assert!(g.max_abs_diff(&f) == 0.0);
        assert!(SampledFunction::from_csv_reader("x,re,im\n0,1,0\n".as_bytes()).is_err());
    }
}
