//! Rank-one κ-Riesz (κ-Hilbert) kernel and the truncated, regularized and
//! maximal transforms built from it.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dunkl_core::{ball_measure, orbit_distance, MultiplicityConfig};
use crate::functions::{Parity, RealFunction};
use crate::numerics::{gauss_kronrod, gauss_legendre, QuadratureSpec};
use crate::poisson::{integrate_against, kernel_core, riesz_subordinated, KernelBranch};
use crate::transform::{forward_transform, Grid, SampledFunction, TransformOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszKernelEval {
    pub value: f64,
    pub branch: KernelBranch,
    /// Set when the orbit distance is tiny relative to |x| + |t|, so the value
    /// is dominated by the singular part.
    pub singular: bool,
}

fn params(cfg: &MultiplicityConfig<f64>) -> Result<(f64, f64)> {
    if !cfg.is_rank_one() {
        return Err(Error::Domain("the Riesz kernel is implemented for rank one".into()));
    }
    Ok((cfg.kappa(), cfg.m_kappa()))
}

/// K(x, t), NaN on the singular set.
#[inline]
pub(crate) fn k_fast(x: f64, t: f64, kappa: f64, m: f64) -> f64 {
    if x.abs() == t.abs() {
        return f64::NAN;
    }
    let sc = x.abs().max(t.abs());
    if sc == f64::INFINITY {
        return 0.0;
    }
    if sc > 1e50 || sc < 1e-50 {
        // K is homogeneous of degree -2κ-1
        return k_fast(x / sc, t / sc, kappa, m) * sc.powf(-2.0 * kappa - 1.0);
    }
    match kernel_core(0.0, x, t, kappa, m, false) {
        Ok(c) => (x - t) * c.g,
        Err(_) => f64::NAN,
    }
}

/// K(x, t) - K(x, t') for |x| well outside [t, t'] as ∫ ∂_s K(x, s) ds, which
/// avoids the cancellation of the direct difference far from the pole.
fn k_difference(x: f64, t: f64, tp: f64, kappa: f64, m: f64) -> f64 {
    let r = t.abs().max(tp.abs());
    if x.abs() <= 4.0 * r {
        return k_fast(x, t, kappa, m) - k_fast(x, tp, kappa, m);
    }
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (nodes, weights) = GL.get_or_init(|| gauss_legendre::<f64>(10));
    let (c, h) = (0.5 * (t + tp), 0.5 * (t - tp));
    let mut sum = 0.0;
    for (u, w) in nodes.iter().zip(weights) {
        let s = c + h * u;
        // g is symmetric in its two space arguments, so dlogx of (s, x) is ∂_s log g
        let dk = match kernel_core(0.0, s, x, kappa, m, true) {
            Ok(core) => core.g * ((x - s) * core.dlogx - 1.0),
            Err(_) => f64::NAN,
        };
        sum += w * dk;
    }
    sum * h
}

/// K(x, t) from the hypergeometric closed forms; on xt = 0 the factor is 1 and
/// K(0, t) = -m_κ sgn(t) |t|^{-2κ-1}.
pub fn riesz_kernel(x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<RieszKernelEval> {
    let (k, m) = params(cfg)?;
    let d = orbit_distance(x, t);
    if !(d > 0.0) {
        return Err(Error::SingularPoint { x, t });
    }
    let sc = x.abs().max(t.abs());
    if sc == f64::INFINITY {
        return Ok(RieszKernelEval { value: 0.0, branch: KernelBranch::SameSign, singular: false });
    }
    let (xs, ts, lam) = if sc > 1e50 || sc < 1e-50 { (x / sc, t / sc, sc.powf(-2.0 * k - 1.0)) } else { (x, t, 1.0) };
    let c = kernel_core(0.0, xs, ts, k, m, false)?;
    let value = (xs - ts) * c.g * lam;
    debug_assert!({
        let back = (ts - xs) * kernel_core(0.0, ts, xs, k, m, false)?.g * lam;
        !value.is_finite() || (value + back).abs() <= 1e-12 * value.abs()
    });
    Ok(RieszKernelEval { value, branch: c.branch, singular: d < 1e-8 * (x.abs() + t.abs()) })
}

/// K(x, t) = ((x - t)/2√π) ∫₀^∞ h_v(x, t) v^{-3/2} dv.
pub fn riesz_kernel_subordinated(x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    let (k, _) = params(cfg)?;
    if !(orbit_distance(x, t) > 0.0) {
        return Err(Error::SingularPoint { x, t });
    }
    riesz_subordinated(x, t, k)
}

/// K¹(0, t) = K(0, t) 1{|t| > 1}.
#[inline]
fn k1_origin(t: f64, kappa: f64, m: f64) -> f64 {
    if t.abs() > 1.0 {
        -m * t.signum() * t.abs().powf(-2.0 * kappa - 1.0)
    } else {
        0.0
    }
}

fn truncation_cuts(x: f64, eps: f64) -> Vec<f64> {
    let mut c = vec![x, -x];
    for &r in &[x.abs() + eps, x.abs() - eps, x.abs() + 2.0 * eps] {
        if r > 0.0 {
            c.push(r);
            c.push(-r);
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeRatios {
    /// |K| / lower expression, bounded below by c₁.
    pub lower: f64,
    /// upper expression / |K|, bounded below by 1/c₂.
    pub upper: f64,
}

/// The kernel against both sides of its size estimate: lower expression
/// 1/|B(x,|x-t|)|, upper expression d/(|B(x,d)| |x-t|) with d the orbit distance.
pub fn riesz_size_ratios(x: f64, t: f64, cfg: &MultiplicityConfig<f64>) -> Result<SizeRatios> {
    let k = riesz_kernel(x, t, cfg)?.value.abs();
    let d = orbit_distance(x, t);
    let r = (x - t).abs();
    let lo = 1.0 / ball_measure(x, r, cfg)?;
    let up = d / (ball_measure(x, d, cfg)? * r);
    Ok(SizeRatios { lower: k / lo, upper: up / k })
}

/// |K(x,t) - K(x,t')| |x-t| |B(x,d)| / |t-t'|, defined for d(x,t) ≥ 2|t-t'|.
pub fn riesz_smoothness_ratio(x: f64, t: f64, tp: f64, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
    let d = orbit_distance(x, t);
    let h = (t - tp).abs();
    if !(h > 0.0) || d < 2.0 * h {
        return Err(Error::Domain(format!("need 0 < 2|t-t'| <= d(x,t), got |t-t'| = {}, d = {}", h, d)));
    }
    let dk = (riesz_kernel(x, t, cfg)?.value - riesz_kernel(x, tp, cfg)?.value).abs();
    Ok(dk * (x - t).abs() * ball_measure(x, d, cfg)? / h)
}

/// R^ε f(x) = c_κ ∫_{d(x,t) > ε} f(t) K(x, t) dω(t).
pub fn truncated_riesz(
    f: &RealFunction,
    eps: f64,
    x: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = params(cfg)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("truncation radius {} must be positive", eps)));
    }
    let v = integrate_against(
        |t| if orbit_distance(x, t) > eps { k_fast(x, t, k, m) } else { 0.0 },
        f,
        &truncation_cuts(x, eps),
        k,
        spec,
    )?;
    Ok(cfg.c_kappa() * v)
}

/// R̃^ε f(x) = c_κ ∫ f(t)(K^ε(x, t) - K¹(0, t)) dω(t), finite for bounded f.
pub fn regularized_truncated_riesz(
    f: &RealFunction,
    eps: f64,
    x: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = params(cfg)?;
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("truncation radius {} must be positive", eps)));
    }
    let mut cuts = truncation_cuts(x, eps);
    cuts.extend_from_slice(&[1.0, -1.0]);
    let v = integrate_against(
        |t| {
            let ke = if orbit_distance(x, t) > eps { k_fast(x, t, k, m) } else { 0.0 };
            ke - k1_origin(t, k, m)
        },
        f,
        &cuts,
        k,
        spec,
    )?;
    Ok(cfg.c_kappa() * v)
}

/// Principal value c_κ PV∫ f(t) kern(t) dω(t) around the singularity at x:
/// a symmetric collar of half-width δ is folded onto [0, δ].
fn principal_value<G: Fn(f64) -> f64>(
    f: &RealFunction,
    x: f64,
    kern: G,
    cuts: &[f64],
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let k = cfg.kappa();
    let mut delta: f64 = if x == 0.0 { 1.0 } else { 0.5 * x.abs() };
    for &b in f.breakpoints.iter().chain(cuts) {
        let dist = (b - x).abs();
        if dist > 0.0 {
            delta = delta.min(0.5 * dist);
        } else if f.breakpoints.contains(&b) {
            return Err(Error::Domain(format!("principal value at a breakpoint of f ({})", x)));
        }
    }
    let k2 = 2.0 * k;
    let h = |t: f64| {
        let v = f.eval(t);
        if v == 0.0 {
            0.0
        } else {
            v * kern(t) * if k2 == 0.0 { 1.0 } else { t.abs().powf(k2) }
        }
    };
    let fold = gauss_kronrod(|s: f64| h(x + s) + h(x - s), 0.0, delta, spec.abs_tol * 0.5, spec.rel_tol, spec.max_evals)?;
    let mut all_cuts = cuts.to_vec();
    all_cuts.extend_from_slice(&[x - delta, x + delta, x, -x]);
    let rest = integrate_against(
        |t| if (t - x).abs() >= delta { kern(t) } else { 0.0 },
        f,
        &all_cuts,
        k,
        spec,
    )?;
    Ok(cfg.c_kappa() * (fold.value + rest))
}

/// Rf(x) as the ε → 0 limit, computed directly as a principal value.
/// f must be smooth near x; the logarithmic singularity at -x is integrable.
pub fn riesz_pv(f: &RealFunction, x: f64, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<f64> {
    let (k, m) = params(cfg)?;
    principal_value(f, x, |t| k_fast(x, t, k, m), &[], cfg, spec)
}

/// R̃f(x) = lim R̃^ε f(x) for bounded f.
pub fn regularized_riesz_pv(
    f: &RealFunction,
    x: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = params(cfg)?;
    principal_value(f, x, |t| k_fast(x, t, k, m) - k1_origin(t, k, m), &[1.0, -1.0], cfg, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error_estimate: f64,
}

/// Default radii for the ε → 0 extrapolation.
pub const EPS_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Fit v(ε) ≈ a + bε + cε ln ε + dε² and return a.
pub fn richardson_eps(eps: &[f64], values: &[f64]) -> Extrapolation {
    richardson_basis(eps, values, |e| [1.0, e, e * e.ln(), e * e])
}

/// Same fit for an expansion in odd powers, a + bε + cε³ + dε⁵.
pub fn richardson_odd(eps: &[f64], values: &[f64]) -> Extrapolation {
    richardson_basis(eps, values, |e| [1.0, e, e.powi(3), e.powi(5)])
}

fn richardson_basis<B: Fn(f64) -> [f64; 4]>(eps: &[f64], values: &[f64], basis: B) -> Extrapolation {
    let n = eps.len().min(4);
    let full = solve(eps[..n].iter().map(|&e| basis(e)[..n].to_vec()).collect(), values[..n].to_vec());
    let m = n - 1;
    let off = eps.len() - m;
    let part = solve(
        eps[off..].iter().map(|&e| basis(e)[..m].to_vec()).collect(),
        values[off..].to_vec(),
    );
    Extrapolation { value: full[0], error_estimate: (full[0] - part[0]).abs() }
}

/// lim_{ε→0} R^ε f(x) by Richardson extrapolation over [`EPS_LADDER`].
///
/// At x = 0 the excluded set is symmetric and the expansion has only odd
/// powers. For 0 < |x| < 0.5 the ladder is scaled by 2|x| so the two excluded
/// intervals stay disjoint.
pub fn riesz_extrapolated(
    f: &RealFunction,
    x: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<Extrapolation> {
    let scale = if x == 0.0 { 1.0 } else { (2.0 * x.abs()).min(1.0) };
    let ladder: Vec<f64> = EPS_LADDER.iter().map(|e| e * scale).collect();
    let vals: Result<Vec<f64>> = ladder.iter().map(|&e| truncated_riesz(f, e, x, cfg, spec)).collect();
    let vals = vals?;
    Ok(if x == 0.0 { richardson_odd(&ladder, &vals) } else { richardson_eps(&ladder, &vals) })
}

/// Rf = F^{-1}(-i sgn(ξ) F f), sampled on f's grid.
pub fn riesz_transform_l2(f: &SampledFunction, xi_grid: &Arc<Grid>, opts: &TransformOptions) -> Result<SampledFunction> {
    let ff = forward_transform(f, xi_grid, opts)?;
    let parity = match f.parity {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
        Parity::None => Parity::None,
    };
    let g = ff.map(parity, |xi, v| v * Complex64::new(0.0, -xi.signum()));
    // multiplier is odd: inverse without the tail check (the spectrum decays like F f)
    crate::transform::inverse_transform(&g, &f.grid, &TransformOptions { tail_tol: f64::INFINITY, ..opts.clone() })
}

/// sup over the ε grid of |R^ε f(x)|.
pub fn maximal_riesz(
    f: &RealFunction,
    x: f64,
    eps_grid: &[f64],
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let mut best = 0.0f64;
    for &e in eps_grid {
        best = best.max(truncated_riesz(f, e, x, cfg, spec)?.abs());
    }
    Ok(best)
}

/// ∫_{d(x,t) > 2|t-t'|} |K^ε(x, t) - K^ε(x, t')| dω(x); ε = 0 means no truncation.
pub fn hormander_integral(
    t: f64,
    tp: f64,
    eps: f64,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let (k, m) = params(cfg)?;
    let delta = (t - tp).abs();
    if !(delta > 0.0) {
        return Err(Error::Domain("t and t' must differ".into()));
    }
    if eps < 0.0 {
        return Err(Error::Domain("ε must be nonnegative".into()));
    }
    let ke = |x: f64, s: f64| if eps == 0.0 || orbit_distance(x, s) > eps { k_fast(x, s, k, m) } else { 0.0 };
    let mut cuts = vec![t, -t, tp, -tp];
    for &r in &[t.abs() + 2.0 * delta, t.abs() - 2.0 * delta] {
        if r > 0.0 {
            cuts.extend_from_slice(&[r, -r]);
        }
    }
    if eps > 0.0 {
        for &c in &[t.abs(), tp.abs()] {
            for &r in &[c + eps, c - eps] {
                if r > 0.0 {
                    cuts.extend_from_slice(&[r, -r]);
                }
            }
        }
    }
    // the difference changes sign a few radii out; keep such kinks in finite panels
    let r = t.abs() + tp.abs() + 2.0 * delta + eps;
    for j in 1..=8 {
        let c = r * 2f64.powi(j);
        cuts.extend_from_slice(&[c, -c]);
    }
    let one = RealFunction::constant(1.0);
    integrate_against(
        |x| {
            if orbit_distance(x, t) <= 2.0 * delta {
                0.0
            } else if eps == 0.0 || (orbit_distance(x, t) > eps && orbit_distance(x, tp) > eps) {
                k_difference(x, t, tp, k, m).abs()
            } else {
                (ke(x, t) - ke(x, tp)).abs()
            }
        },
        &one,
        &cuts,
        k,
        spec,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi0 {
    pub x: f64,
    pub value: f64,
    pub lower_bound: f64,
}

/// φ₀ = R χ_{[-1,1]} at x > 1, with the explicit lower bound
/// c_κ m_κ 2^{-2κ} (x+1)^{-2κ} ln((x - 1/2)/(x - 1)).
pub fn phi0_example(x: f64, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<Phi0> {
    let (k, m) = params(cfg)?;
    if !(x > 1.0) {
        return Err(Error::Domain(format!("phi0 is evaluated for x > 1, got {}", x)));
    }
    let chi = RealFunction::indicator(-1.0, 1.0);
    let gap = x - 1.0;
    let cuts: Vec<f64> = [1.0, 10.0, 100.0].iter().map(|s| 1.0 - s * gap).filter(|&c| c > -1.0).collect();
    let v = integrate_against(|t| k_fast(x, t, k, m), &chi, &cuts, k, spec)?;
    let c = cfg.c_kappa();
    let lower = c * m * 2f64.powf(-2.0 * k) * (x + 1.0).powf(-2.0 * k) * ((x - 0.5) / gap).ln();
    Ok(Phi0 { x, value: c * v, lower_bound: lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{conjugate_poisson_integral, UpperHalfPlanePoint};
    use std::f64::consts::PI;

    fn cfg(k: f64) -> MultiplicityConfig<f64> {
        MultiplicityConfig::rank_one(k).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::new(1e-12, 1e-11).with_max_evals(2_000_000)
    }

    #[test]
    fn far_difference_matches_direct() {
        for &k in &[0.0, 0.5, 1.3] {
            let m = cfg(k).m_kappa();
            for &(x, t, tp) in &[(5.0, 1.0, 1.1), (-7.0, 0.4, -0.3), (9.0, -2.0, -2.2)] {
                let direct = k_fast(x, t, k, m) - k_fast(x, tp, k, m);
                let d = k_difference(x, t, tp, k, m);
                // the direct difference carries roundoff on the scale of K itself
                let tol = 1e-12 * direct.abs() + 1e-14 * k_fast(x, t, k, m).abs();
                assert!((d - direct).abs() <= tol, "{} {} {}", k, d, direct);
            }
            // far out the direct difference is pure roundoff; the integral form keeps decaying like δ x^{-2κ-2}
            let far = k_difference(1e9, 1.0, 1.1, k, m).abs() * 1e9f64.powf(2.0 * k + 2.0);
            let near = k_difference(1e3, 1.0, 1.1, k, m).abs() * 1e3f64.powf(2.0 * k + 2.0);
            assert!((far / near - 1.0).abs() < 5e-3, "{} {}", far, near);
        }
    }

    #[test]
    fn hilbert_kernel_at_kappa_zero() {
        let c = cfg(0.0);
        let k = riesz_kernel(2.0, 1.0, &c).unwrap();
        assert!((k.value - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((c.c_kappa() * k.value - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn branches_match_subordination() {
        let c = cfg(0.7);
        for &(x, t) in &[(1.5, 0.5), (1.5, -0.5), (0.0, 0.8), (-0.3, 0.0), (2.0, -0.1)] {
            let a = riesz_kernel(x, t, &c).unwrap();
            let b = riesz_kernel_subordinated(x, t, &c).unwrap();
            assert!((a.value - b).abs() < 1e-10 * b.abs(), "({}, {}) {} {}", x, t, a.value, b);
        }
        assert_eq!(riesz_kernel(1.5, 0.5, &c).unwrap().branch, KernelBranch::SameSign);
        assert_eq!(riesz_kernel(1.5, -0.5, &c).unwrap().branch, KernelBranch::OppositeSign);
        assert!(matches!(riesz_kernel(1.0, -1.0, &c), Err(Error::SingularPoint { .. })));
        let c1 = cfg(1.0);
        assert_eq!(riesz_kernel(1.2, 0.3, &c1).unwrap().value, -riesz_kernel(0.3, 1.2, &c1).unwrap().value);
    }

    #[test]
    fn truncated_hilbert_of_indicator() {
        let v = truncated_riesz(&RealFunction::indicator(-1.0, 1.0), 0.1, 2.0, &cfg(0.0), &spec()).unwrap();
        assert!((v - 3f64.ln() / PI).abs() < 1e-10);
        let g = RealFunction::new("g", |t: f64| (-t * t).exp()).with_parity(Parity::Even);
        assert!(truncated_riesz(&g, 0.1, 0.0, &cfg(0.9), &spec()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn regularized_constant_vanishes_at_origin() {
        let v = regularized_truncated_riesz(&RealFunction::constant(1.0), 1.0, 0.0, &cfg(0.6), &spec()).unwrap();
        assert!(v.abs() < 1e-10, "{}", v);
        // for compact f the two truncations differ by a constant
        let f = RealFunction::bump(0.3, 1.0);
        let c = cfg(0.6);
        let a: Vec<f64> = [-0.5, 0.7, 2.0]
            .iter()
            .map(|&x| regularized_truncated_riesz(&f, 0.1, x, &c, &spec()).unwrap() - truncated_riesz(&f, 0.1, x, &c, &spec()).unwrap())
            .collect();
        assert!((a[0] - a[1]).abs() < 1e-10 && (a[1] - a[2]).abs() < 1e-10);
    }

    #[test]
    fn pv_extrapolation_and_spectral_agree() {
        let k = 0.8;
        let c = cfg(k);
        let f = RealFunction::shifted_gaussian(0.4, 0.8);
        let grid = Arc::new(Grid::composite(12.0));
        let s = SampledFunction::from_real(grid.clone(), &c, &f).unwrap();
        let rs = riesz_transform_l2(&s, &grid, &TransformOptions::default()).unwrap();
        for &x in &[-1.3, 0.0, 0.5, 2.2] {
            let pv = riesz_pv(&f, x, &c, &spec()).unwrap();
            let ex = riesz_extrapolated(&f, x, &c, &spec()).unwrap();
            let sp = rs.eval(x).re;
            assert!((pv - sp).abs() < 1e-8, "x={} pv={} sp={}", x, pv, sp);
            assert!((ex.value - sp).abs() < 1e-4, "x={} ex={} sp={}", x, ex.value, sp);
        }
    }

    #[test]
    fn riesz_of_poisson_is_conjugate_poisson() {
        let c = cfg(1.1);
        let p = RealFunction::poisson(0.7, &c);
        for &x in &[-0.8, 0.4, 1.9] {
            let r = riesz_pv(&p, x, &c, &spec()).unwrap();
            let q = crate::functions::RealFunction::conjugate_poisson(0.7, &c).eval(x);
            assert!((r - q).abs() < 1e-8, "{} {}", r, q);
        }
        // and equals the conjugate Poisson integral of a delta-like limit: Q f(x0, x) → R f as x0 → 0
        let f = RealFunction::odd_gaussian();
        let qf = conjugate_poisson_integral(&f, UpperHalfPlanePoint::new(1e-4, 0.6).unwrap(), &c, &spec()).unwrap();
        let rf = riesz_pv(&f, 0.6, &c, &spec()).unwrap();
        assert!((qf - rf).abs() < 1e-3);
    }

    #[test]
    fn phi0_bound_and_growth() {
        for &k in &[0.0, 0.5, 1.0] {
            let c = cfg(k);
            let vals: Vec<Phi0> = [1.1, 1.01, 1.001].iter().map(|&x| phi0_example(x, &c, &spec()).unwrap()).collect();
            for v in &vals {
                assert!(v.value >= v.lower_bound);
                if k == 0.0 {
                    let e = ((v.x + 1.0) / (v.x - 1.0)).ln() / PI;
                    assert!((v.value - e).abs() < 1e-9);
                }
            }
            assert!(vals[2].value > vals[1].value && vals[1].value > vals[0].value);
        }
        assert!(phi0_example(0.5, &cfg(0.5), &spec()).is_err());
    }

    #[test]
    fn hormander_finite() {
        let c = cfg(0.8);
        let a = hormander_integral(1.0, 1.2, 0.0, &c, &spec()).unwrap();
        let b = hormander_integral(1.0, 1.2, 0.0, &c, &QuadratureSpec::new(1e-13, 1e-12).with_max_evals(4_000_000)).unwrap();
        assert!(a.is_finite() && a > 0.0);
        assert!((a - b).abs() < 1e-3 * a);
        let e = hormander_integral(1.0, 1.2, 0.5, &c, &spec()).unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn richardson_recovers_model() {
        let f = |e: f64| 1.5 - 0.3 * e + 0.7 * e * e.ln() + 2.0 * e * e;
        let v: Vec<f64> = EPS_LADDER.iter().map(|&e| f(e)).collect();
        let r = richardson_eps(&EPS_LADDER, &v);
        assert!((r.value - 1.5).abs() < 1e-12);
    }
}
