//! Heat, Poisson and conjugate Poisson kernels on the upper half-plane
//! ℝ²₊ = {(x0, x) : x0 > 0} and the integrals they define.

use serde::{Deserialize, Serialize};

use crate::dunkl_core::{ball_measure, dunkl_kernel_scaled_1d, intertwining_integral, orbit_distance, MultiplicityConfig};
use crate::functions::RealFunction;
use crate::numerics::{adaptive_integrate, gauss_2f1_with_complement, gauss_kronrod, QuadratureSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPlanePoint {
    pub x0: f64,
    pub x: f64,
}

impl UpperHalfPlanePoint {
    pub fn new(x0: f64, x: f64) -> Result<Self> {
        if !(x0 > 0.0) || !x0.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("({}, {}) is not in the upper half-plane", x0, x)));
        }
        Ok(UpperHalfPlanePoint { x0, x })
    }
}

/// (∂_{x0} u, D_x u)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaGradient {
    pub d0: f64,
    pub dx: f64,
}

impl KappaGradient {
    pub fn norm_sqr(&self) -> f64 {
        self.d0 * self.d0 + self.dx * self.dx
    }
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
    pub fn dot(&self, o: &KappaGradient) -> f64 {
        self.d0 * o.d0 + self.dx * o.dx
    }
}

/// Which hypergeometric representation produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelBranch {
    /// x t > 0
    SameSign,
    /// x t < 0
    OppositeSign,
    /// x t = 0, where the hypergeometric factor is 1
    Axis,
}

/// Common factor g with P = x0 g and Q = (x - t) g, plus ∂ ln g.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelCore {
    pub g: f64,
    pub dlog0: f64,
    pub dlogx: f64,
    pub branch: KernelBranch,
}

/// Closed form of the radial intertwining integral of the Poisson kernel.
///
/// With A = x0² + (x-t)², B = x0² + (x+t)²:
/// xt ≥ 0: g = m A⁻¹ B^{-κ} ₂F₁(κ, κ; 2κ+1; 4xt/B),
/// xt < 0: g = m A^{-κ-1} ₂F₁(κ+1, κ; 2κ+1; -4xt/A).
pub(crate) fn kernel_core(x0: f64, x: f64, t: f64, kappa: f64, m: f64, derivs: bool) -> Result<KernelCore> {
    let sc = x0.max(x.abs()).max(t.abs());
    if sc == f64::INFINITY {
        return Ok(KernelCore { g: 0.0, dlog0: 0.0, dlogx: 0.0, branch: KernelBranch::SameSign });
    }
    if sc > 1e150 || (sc < 1e-150 && sc > 0.0) {
        // g is homogeneous of degree -2κ-2
        let mut c = kernel_core(x0 / sc, x / sc, t / sc, kappa, m, derivs)?;
        c.g *= sc.powf(-2.0 * kappa - 2.0);
        c.dlog0 /= sc;
        c.dlogx /= sc;
        return Ok(c);
    }
    let d = x - t;
    let s = x + t;
    let a = x0 * x0 + d * d;
    let b = x0 * x0 + s * s;
    if a == 0.0 {
        return Err(Error::SingularPoint { x, t });
    }
    let xt = x * t;
    let c = 2.0 * kappa + 1.0;
    if kappa == 0.0 {
        return Ok(KernelCore {
            g: m / a,
            dlog0: -2.0 * x0 / a,
            dlogx: -2.0 * d / a,
            branch: if xt == 0.0 { KernelBranch::Axis } else if xt > 0.0 { KernelBranch::SameSign } else { KernelBranch::OppositeSign },
        });
    }
    if xt >= 0.0 {
        let w = 4.0 * xt / b;
        let omw = a / b;
        let f = if xt == 0.0 { 1.0 } else { gauss_2f1_with_complement(kappa, kappa, c, w, omw)? };
        let g = m / (a * b.powf(kappa)) * f;
        let (mut dlog0, mut dlogx) = (0.0, 0.0);
        if derivs {
            let fp = if xt == 0.0 {
                kappa * kappa / c
            } else {
                kappa * kappa / c * gauss_2f1_with_complement(kappa + 1.0, kappa + 1.0, c + 1.0, w, omw)?
            };
            let r = fp / f;
            dlog0 = -2.0 * x0 / a - 2.0 * kappa * x0 / b - r * w * 2.0 * x0 / b;
            dlogx = -2.0 * d / a - 2.0 * kappa * s / b + r * (4.0 * t / b) * (1.0 - 2.0 * x * s / b);
        }
        let branch = if xt == 0.0 { KernelBranch::Axis } else { KernelBranch::SameSign };
        Ok(KernelCore { g, dlog0, dlogx, branch })
    } else {
        let z = -4.0 * xt / a;
        let omz = b / a;
        let f = gauss_2f1_with_complement(kappa + 1.0, kappa, c, z, omz)?;
        let g = m / a.powf(kappa + 1.0) * f;
        let (mut dlog0, mut dlogx) = (0.0, 0.0);
        if derivs {
            let fp = (kappa + 1.0) * kappa / c * gauss_2f1_with_complement(kappa + 2.0, kappa + 1.0, c + 1.0, z, omz)?;
            let r = fp / f;
            dlog0 = -(kappa + 1.0) * 2.0 * x0 / a - r * z * 2.0 * x0 / a;
            dlogx = -(kappa + 1.0) * 2.0 * d / a - r * (4.0 * t / a) * (1.0 - 2.0 * x * d / a);
        }
        Ok(KernelCore { g, dlog0, dlogx, branch: KernelBranch::OppositeSign })
    }
}

/// Kernel value with its partial derivatives in x0 and x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub value: f64,
    pub d0: f64,
    pub dx: f64,
}

fn rank_one_params(cfg: &MultiplicityConfig<f64>) -> Result<(f64, f64)> {
    if !cfg.is_rank_one() {
        return Err(Error::Domain("kernels are implemented for rank one".into()));
    }
    Ok((cfg.kappa(), cfg.m_kappa()))
}

/// P(x0, x, t) = τ_x P_{x0}(-t).
pub fn poisson_kernel(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, m) = rank_one_params(cfg)?;
    Ok(x0 * kernel_core(x0, x, t, k, m, false)?.g)
}

/// P with ∂_{x0} P and ∂_x P.
pub fn poisson_kernel_jet(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<KernelJet> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, m) = rank_one_params(cfg)?;
    let c = kernel_core(x0, x, t, k, m, true)?;
    let p = x0 * c.g;
    Ok(KernelJet { value: p, d0: c.g + p * c.dlog0, dx: p * c.dlogx })
}

/// Q(x0, x, t) = ((x - t)/x0) P(x0, x, t).
pub fn conjugate_kernel(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, m) = rank_one_params(cfg)?;
    Ok((x - t) * kernel_core(x0, x, t, k, m, false)?.g)
}

/// Q with ∂_{x0} Q and ∂_x Q.
pub fn conjugate_kernel_jet(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<KernelJet> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, m) = rank_one_params(cfg)?;
    let c = kernel_core(x0, x, t, k, m, true)?;
    let q = (x - t) * c.g;
    Ok(KernelJet { value: q, d0: q * c.dlog0, dx: c.g + q * c.dlogx })
}

/// D_x applied to a kernel in its x argument, from its jet at x and value at -x.
fn dunkl_dx(jet: &KernelJet, mirrored: f64, x: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        jet.dx
    } else if x.abs() < 1e-9 {
        // (k(x) - k(-x))/x → 2 ∂_x k(0)
        (1.0 + 2.0 * kappa) * jet.dx
    } else {
        jet.dx + kappa * (jet.value - mirrored) / x
    }
}

/// (∂_{x0} P, D_x P) at (x0, x) for fixed t.
pub fn poisson_kernel_gradient(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<KappaGradient> {
    let j = poisson_kernel_jet(x0, x, t, cfg)?;
    let mir = if x.abs() < 1e-9 { 0.0 } else { poisson_kernel(x0, -x, t, cfg)? };
    Ok(KappaGradient { d0: j.d0, dx: dunkl_dx(&j, mir, x, cfg.kappa()) })
}

/// (∂_{x0} Q, D_x Q) at (x0, x) for fixed t.
pub fn conjugate_kernel_gradient(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<KappaGradient> {
    let j = conjugate_kernel_jet(x0, x, t, cfg)?;
    let mir = if x.abs() < 1e-9 { 0.0 } else { conjugate_kernel(x0, -x, t, cfg)? };
    Ok(KappaGradient { d0: j.d0, dx: dunkl_dx(&j, mir, x, cfg.kappa()) })
}

/// P by numerically integrating the Poisson profile against μ_x (reference route).
pub fn poisson_kernel_radial(
    x0: f64,
    x: f64,
    t: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, m) = rank_one_params(cfg)?;
    intertwining_integral(
        |xi: f64| m * x0 / (x0 * x0 + x * x + t * t - 2.0 * t * xi).max(0.0).powf(k + 1.0),
        x,
        cfg,
        spec,
    )
}

/// Heat kernel h_v(x, t) = (2v)^{-κ-1/2} e^{-(x²+t²)/4v} E_κ(x/√(2v), t/√(2v)).
pub fn heat_kernel(v: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("heat time {} must be positive", v)));
    }
    let (k, _) = rank_one_params(cfg)?;
    Ok(heat_scaled(v, x, t, k, 0.0))
}

/// e^{-a/4v} h_v(x, t), combined in one exponential.
fn heat_scaled(v: f64, x: f64, t: f64, kappa: f64, a: f64) -> f64 {
    let d = x.abs() - t.abs();
    let e = -(kappa + 0.5) * (2.0 * v).ln() - (d * d + a) / (4.0 * v);
    if e < -745.0 {
        return 0.0;
    }
    e.exp() * dunkl_kernel_scaled_1d(x * t / (2.0 * v), kappa)
}

/// ∫₀^∞ e^{-a/4v} h_v(x,t) v^{-3/2} dv, integrated in ln v.
fn subordination_integral(a: f64, x: f64, t: f64, kappa: f64) -> Result<f64> {
    let vs = 0.25 * (a + (x - t) * (x - t));
    if !(vs > 0.0) {
        return Err(Error::SingularPoint { x, t });
    }
    let spec = QuadratureSpec::new(1e-300, 1e-13).with_max_evals(400_000);
    let r = adaptive_integrate(
        |y: f64| {
            let v = vs * y.exp();
            if !(v > 0.0 && v.is_finite()) {
                return 0.0;
            }
            heat_scaled(v, x, t, kappa, a) / v.sqrt()
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &spec,
    )?;
    Ok(r.value)
}

/// P = x0/(2√π) ∫ e^{-x0²/4v} h_v v^{-3/2} dv.
pub fn poisson_kernel_subordinated(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, _) = rank_one_params(cfg)?;
    Ok(x0 / (2.0 * std::f64::consts::PI.sqrt()) * subordination_integral(x0 * x0, x, t, k)?)
}

/// Q = (x - t)/(2√π) ∫ e^{-x0²/4v} h_v v^{-3/2} dv.
pub fn conjugate_kernel_subordinated(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    UpperHalfPlanePoint::new(x0, x)?;
    let (k, _) = rank_one_params(cfg)?;
    Ok((x - t) / (2.0 * std::f64::consts::PI.sqrt()) * subordination_integral(x0 * x0, x, t, k)?)
}

/// The x0 → 0 limit of the conjugate subordination integral.
pub(crate) fn riesz_subordinated(x: f64, t: f64, kappa: f64) -> Result<f64> {
    Ok((x - t) / (2.0 * std::f64::consts::PI.sqrt()) * subordination_integral(0.0, x, t, kappa)?)
}

/// ∫ g(t) |t|^{2κ} dt over the line (or f's support), cut at the given points.
pub(crate) fn integrate_against<G: Fn(f64) -> f64>(
    g: G,
    f: &RealFunction,
    extra_cuts: &[f64],
    kappa: f64,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let k2 = 2.0 * kappa;
    let h = |t: f64| {
        let v = f.eval(t);
        if v == 0.0 {
            0.0
        } else {
            let w = if k2 == 0.0 { 1.0 } else { t.abs().powf(k2) };
            let r = v * g(t) * w;
            // far tail of the mapped infinite interval: weights overflow, kernels underflow
            if !r.is_finite() && t.abs() > 1e200 {
                0.0
            } else {
                r
            }
        }
    };
    let (lo, hi) = f.support.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut cuts: Vec<f64> = f.breakpoints.clone();
    cuts.push(0.0);
    cuts.extend_from_slice(extra_cuts);
    cuts.retain(|c| c.is_finite() && *c >= lo && *c <= hi);
    if lo.is_finite() {
        cuts.push(lo);
    }
    if hi.is_finite() {
        cuts.push(hi);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let n = cuts.len() as f64 + 1.0;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += gauss_kronrod(&h, w[0], w[1], spec.abs_tol / n, spec.rel_tol, spec.max_evals)?.value;
        }
    }
    let tail_spec = QuadratureSpec { abs_tol: spec.abs_tol / n, ..spec.clone() };
    if lo == f64::NEG_INFINITY {
        total += adaptive_integrate(&h, f64::NEG_INFINITY, cuts[0], &tail_spec)?.value;
    }
    if hi == f64::INFINITY {
        total += adaptive_integrate(&h, *cuts.last().unwrap(), f64::INFINITY, &tail_spec)?.value;
    }
    Ok(total)
}

/// Cut points resolving a kernel peak of width x0 at ±x.
pub(crate) fn kernel_cuts(x0: f64, x: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(12);
    for &p in &[x, -x] {
        c.push(p);
        for &s in &[1.0, 10.0] {
            c.push(p + s * x0);
            c.push(p - s * x0);
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonRatios {
    /// P / lower expression.
    pub lower: f64,
    /// upper expression / P.
    pub upper: f64,
}

/// P against the two sides of its size estimate, with d the orbit distance:
/// lower x0 / (|B(x, x0+|x-t|)| (x0+|x-t|)), upper x0 (x0+d) / (|B(x, x0+d)| (x0² + |x-t|²)).
pub fn poisson_size_ratios(x0: f64, x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<PoissonRatios> {
    let p = poisson_kernel(x0, x, t, cfg)?;
    let r = (x - t).abs();
    let d = orbit_distance(x, t);
    let lo = x0 / (ball_measure(x, x0 + r, cfg)? * (x0 + r));
    let up = x0 * (x0 + d) / (ball_measure(x, x0 + d, cfg)? * (x0 * x0 + r * r));
    Ok(PoissonRatios { lower: p / lo, upper: up / p })
}

/// u_f(x0, x) = c_κ ∫ f(t) P(x0, x, t) dω(t).
pub fn poisson_integral(
    f: &RealFunction,
    p: UpperHalfPlanePoint,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = rank_one_params(cfg)?;
    let UpperHalfPlanePoint { x0, x } = p;
    let v = integrate_against(
        |t| x0 * kernel_core(x0, x, t, k, m, false).map(|c| c.g).unwrap_or(f64::NAN),
        f,
        &kernel_cuts(x0, x),
        k,
        spec,
    )?;
    Ok(cfg.c_kappa() * v)
}

/// u_f(x0, ·) on a slice of x values.
pub fn poisson_slice(
    f: &RealFunction,
    x0: f64,
    xs: &[f64],
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<Vec<f64>> {
    crate::parallel::try_par_map(xs, |&x| poisson_integral(f, UpperHalfPlanePoint::new(x0, x)?, cfg, spec))
}

/// v_f(x0, x) = c_κ ∫ f(t) Q(x0, x, t) dω(t).
pub fn conjugate_poisson_integral(
    f: &RealFunction,
    p: UpperHalfPlanePoint,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = rank_one_params(cfg)?;
    let UpperHalfPlanePoint { x0, x } = p;
    let v = integrate_against(
        |t| (x - t) * kernel_core(x0, x, t, k, m, false).map(|c| c.g).unwrap_or(f64::NAN),
        f,
        &kernel_cuts(x0, x),
        k,
        spec,
    )?;
    Ok(cfg.c_kappa() * v)
}

fn gradient_integral<K: Fn(f64) -> Result<KappaGradient>>(
    kernel: K,
    f: &RealFunction,
    p: UpperHalfPlanePoint,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<KappaGradient> {
    let k = cfg.kappa();
    let cuts = kernel_cuts(p.x0, p.x);
    let d0 = integrate_against(|t| kernel(t).map(|g| g.d0).unwrap_or(f64::NAN), f, &cuts, k, spec)?;
    let dx = integrate_against(|t| kernel(t).map(|g| g.dx).unwrap_or(f64::NAN), f, &cuts, k, spec)?;
    let c = cfg.c_kappa();
    Ok(KappaGradient { d0: c * d0, dx: c * dx })
}

/// ∇_κ u_f = (∂_{x0} u_f, D_x u_f), differentiating the kernel under the integral.
pub fn kappa_gradient_poisson(
    f: &RealFunction,
    p: UpperHalfPlanePoint,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<KappaGradient> {
    rank_one_params(cfg)?;
    gradient_integral(|t| poisson_kernel_gradient(p.x0, p.x, t, cfg), f, p, cfg, spec)
}

/// ∇_κ of the conjugate Poisson integral. For bounded f this converges even
/// when the conjugate integral itself does not.
pub fn kappa_gradient_conjugate(
    f: &RealFunction,
    p: UpperHalfPlanePoint,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<KappaGradient> {
    rank_one_params(cfg)?;
    gradient_integral(|t| conjugate_kernel_gradient(p.x0, p.x, t, cfg), f, p, cfg, spec)
}

/// Geometric heights from `lo` to `hi`.
pub fn log_heights(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// sup over the given heights of |u_f(x0, x)|.
pub fn perp_maximal(
    f: &RealFunction,
    x: f64,
    heights: &[f64],
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let mut best = 0.0f64;
    for &h in heights {
        best = best.max(poisson_integral(f, UpperHalfPlanePoint::new(h, x)?, cfg, spec)?.abs());
    }
    Ok(best)
}

/// sup of |u_f(x0, y)| over |y - x| < a x0, sampled at the given heights and
/// `per_height` equispaced y.
pub fn cone_maximal(
    f: &RealFunction,
    x: f64,
    aperture: f64,
    heights: &[f64],
    per_height: usize,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let per = per_height.max(1);
    let mut best = 0.0f64;
    for &h in heights {
        for j in 0..per {
            let s = if per == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (per - 1) as f64 };
            let y = x + 0.999 * aperture * h * s;
            best = best.max(poisson_integral(f, UpperHalfPlanePoint::new(h, y)?, cfg, spec)?.abs());
        }
    }
    Ok(best)
}
