//! Estimators for BMO, orbit BMO, Carleson measures and BMC; (1,2)-atoms,
//! H¹ norms and the H¹–BMC duality pairing.
//!
//! Measures here are dω(x) = |x|^{2κ} dx without the c_κ factor, so that
//! |B_1(0)| = 1 at κ = 1/2. Operators (u_f, R f) keep their c_κ.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dunkl_core::{ball_measure, interval_measure, MultiplicityConfig};
use crate::functions::{Parity, RealFunction};
use crate::numerics::{gauss_kronrod, gauss_legendre, QuadratureSpec};
use crate::parallel::{par_map, try_par_map};
use crate::poisson::{integrate_against, kappa_gradient_conjugate, kappa_gradient_poisson, KappaGradient, UpperHalfPlanePoint};
use crate::riesz::riesz_pv;
use crate::transform::{forward_transform_fn, inverse_transform, inverse_transform_at, pow_abs, Grid, GridSpec, SampledFunction, TransformOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: f64,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::Domain(format!("invalid ball ({}, {})", center, radius)));
        }
        Ok(Ball { center, radius })
    }

    pub fn measure(&self, cfg: &MultiplicityConfig<f64>) -> Result<f64> {
        ball_measure(self.center, self.radius, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicRule {
    pub half_width: f64,
    pub level: u32,
    pub k_min: i32,
    pub k_max: i32,
}

/// Finite family of balls over which sup-type norms are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
    pub id: String,
    pub rule: Option<DyadicRule>,
}

impl BallFamily {
    /// Centers j 2^{-level} in [-L, L], radii 2^k for k_min ≤ k ≤ k_max.
    pub fn dyadic(half_width: f64, level: u32, k_min: i32, k_max: i32) -> Result<Self> {
        if !(half_width > 0.0) || k_min > k_max {
            return Err(Error::Domain("empty ball family".into()));
        }
        let step = 0.5f64.powi(level as i32);
        let jmax = (half_width / step + 1e-9).floor() as i64;
        let mut balls = Vec::new();
        for k in k_min..=k_max {
            let r = 2f64.powi(k);
            for j in -jmax..=jmax {
                balls.push(Ball { center: j as f64 * step, radius: r });
            }
        }
        let rule = DyadicRule { half_width, level, k_min, k_max };
        Ok(BallFamily { balls, id: format!("dyadic-L{}-m{}-k{}..{}", half_width, level, k_min, k_max), rule: Some(rule) })
    }

    pub fn custom(balls: Vec<Ball>, id: &str) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::Domain("empty ball family".into()));
        }
        for b in &balls {
            Ball::new(b.center, b.radius)?;
        }
        Ok(BallFamily { balls, id: id.to_string(), rule: None })
    }

    /// A superset: dyadic families get one more center level and one smaller
    /// radius; custom families get the half-radius ball at every center.
    pub fn refined(&self) -> Self {
        match self.rule {
            Some(r) => BallFamily::dyadic(r.half_width, r.level + 1, r.k_min - 1, r.k_max).unwrap(),
            None => {
                let mut balls = self.balls.clone();
                balls.extend(self.balls.iter().map(|b| Ball { center: b.center, radius: 0.5 * b.radius }));
                BallFamily { balls, id: format!("{}+half", self.id), rule: None }
            }
        }
    }

    /// max |c| + r
    pub fn extent(&self) -> f64 {
        self.balls.iter().map(|b| b.center.abs() + b.radius).fold(0.0, f64::max)
    }

    pub fn max_radius(&self) -> f64 {
        self.balls.iter().map(|b| b.radius).fold(0.0, f64::max)
    }

    pub fn min_radius(&self) -> f64 {
        self.balls.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallValue {
    pub center: f64,
    pub radius: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub family: String,
    /// The largest per-ball values, worst first.
    pub per_ball: Vec<BallValue>,
    pub quadrature_error: f64,
}

const REPORTED_BALLS: usize = 16;

impl NormReport {
    fn from_values(mut values: Vec<BallValue>, family: &str, quadrature_error: f64) -> Self {
        values.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
        values.truncate(REPORTED_BALLS);
        NormReport {
            value: values.first().map(|b| b.value.max(0.0)).unwrap_or(0.0),
            family: family.to_string(),
            per_ball: values,
            quadrature_error,
        }
    }

    pub fn worst(&self) -> Option<BallValue> {
        self.per_ball.first().copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A function on [-L, L] that can be sampled cheaply.
#[derive(Clone)]
pub struct Profile {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub half_width: f64,
    /// Points (closed under x ↦ -x) where the function is not smooth.
    pub singular: Vec<f64>,
    pub name: String,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile").field("name", &self.name).field("half_width", &self.half_width).finish()
    }
}

fn symmetric(points: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = points.iter().flat_map(|&b| [b, -b]).filter(|b| b.is_finite()).collect();
    v.push(0.0);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

impl Profile {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: &str, half_width: f64, singular: &[f64], f: F) -> Self {
        Profile { f: Arc::new(f), half_width, singular: symmetric(singular), name: name.to_string() }
    }

    pub fn from_function(f: &RealFunction, half_width: f64) -> Self {
        let g = f.clone();
        Profile::new(&f.name, half_width, &f.breakpoints, move |x| g.eval(x))
    }

    /// Samples `f` at n equispaced nodes of [-L, L] and interpolates linearly.
    /// Where `f` fails (a singular point), the node takes the mean of two
    /// values a quarter step away on either side.
    pub fn tabulate<F: Fn(f64) -> Result<f64> + Sync>(
        name: &str,
        half_width: f64,
        n: usize,
        singular: &[f64],
        f: F,
    ) -> Result<Self> {
        if n < 2 || !(half_width > 0.0) {
            return Err(Error::Domain("tabulation needs n ≥ 2 nodes on a nonempty interval".into()));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| -half_width + i as f64 * h).collect();
        let vals = try_par_map(&xs, |&x| f(x).or_else(|_| Ok::<f64, Error>(0.5 * (f(x - 0.25 * h)? + f(x + 0.25 * h)?))))?;
        let vals = Arc::new(vals);
        Ok(Profile::new(name, half_width, singular, move |x| {
            let u = ((x + half_width) / h).clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n - 2);
            let s = u - i as f64;
            vals[i] * (1.0 - s) + vals[i + 1] * s
        }))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Gauss-Legendre panels graded geometrically toward both ends of each piece.
#[derive(Debug, Clone)]
struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    fractions: Vec<f64>,
}

impl Rule {
    fn new(n: usize, levels: usize) -> Self {
        Rule::graded(n, 0.25, levels)
    }

    fn graded(n: usize, ratio: f64, levels: usize) -> Self {
        let (nodes, weights) = gauss_legendre::<f64>(n);
        let mut fractions = vec![0.0];
        for j in (1..=levels).rev() {
            fractions.push(0.5 * ratio.powi(j as i32));
        }
        fractions.push(0.5);
        for j in 1..=levels {
            fractions.push(1.0 - 0.5 * ratio.powi(j as i32));
        }
        fractions.push(1.0);
        Rule { nodes, weights, fractions }
    }

    /// Nodes and dω-weights on [a, b], split at the cuts inside.
    fn interval(&self, a: f64, b: f64, cuts: &[f64], kappa: f64, xs: &mut Vec<f64>, ws: &mut Vec<f64>) {
        let mut pts = vec![a];
        pts.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
        pts.push(b);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let k2 = 2.0 * kappa;
        for piece in pts.windows(2) {
            let (p, q) = (piece[0], piece[1]);
            if q <= p {
                continue;
            }
            for fr in self.fractions.windows(2) {
                let (lo, hi) = (p + (q - p) * fr[0], p + (q - p) * fr[1]);
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (t, w) in self.nodes.iter().zip(&self.weights) {
                    let x = mid + half * t;
                    xs.push(x);
                    ws.push(w * half * pow_abs(x, k2));
                }
            }
        }
    }
}

fn oscillation(vals: &[f64], ws: &[f64]) -> f64 {
    let m: f64 = ws.iter().sum();
    let avg = vals.iter().zip(ws).map(|(v, w)| v * w).sum::<f64>() / m;
    vals.iter().zip(ws).map(|(v, w)| (v - avg).abs() * w).sum::<f64>() / m
}

fn check_family(half_width: f64, family: &BallFamily) -> Result<()> {
    let e = family.extent();
    if e > half_width * (1.0 + 1e-12) {
        return Err(Error::FamilyOutsideGrid(e));
    }
    Ok(())
}

fn ball_oscillation(f: &Profile, b: &Ball, orbit: bool, kappa: f64, rule: &Rule) -> f64 {
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    if orbit && b.center.abs() < b.radius {
        let r = b.center.abs() + b.radius;
        rule.interval(-r, r, &f.singular, kappa, &mut xs, &mut ws);
    } else {
        rule.interval(b.center - b.radius, b.center + b.radius, &f.singular, kappa, &mut xs, &mut ws);
        if orbit {
            rule.interval(-b.center - b.radius, -b.center + b.radius, &f.singular, kappa, &mut xs, &mut ws);
        }
    }
    let vals: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    oscillation(&vals, &ws)
}

fn oscillation_norm(f: &Profile, family: &BallFamily, orbit: bool, cfg: &MultiplicityConfig<f64>) -> Result<NormReport> {
    check_family(f.half_width, family)?;
    let k = cfg.kappa();
    let rule = Rule::new(8, 5);
    let values: Vec<BallValue> = par_map(&family.balls, |b| BallValue {
        center: b.center,
        radius: b.radius,
        value: ball_oscillation(f, b, orbit, k, &rule),
    });
    let worst = values.iter().copied().fold(None, |acc: Option<BallValue>, v| match acc {
        Some(a) if a.value >= v.value => Some(a),
        _ => Some(v),
    });
    let qerr = worst
        .map(|w| (ball_oscillation(f, &Ball { center: w.center, radius: w.radius }, orbit, k, &Rule::new(16, 8)) - w.value).abs())
        .unwrap_or(0.0);
    let tag = if orbit { "orbit" } else { "ball" };
    Ok(NormReport::from_values(values, &format!("{}:{}", tag, family.id), qerr))
}

/// sup over the family of |B|^{-1} ∫_B |f - f_B| dω.
pub fn bmo_norm(f: &Profile, family: &BallFamily, cfg: &MultiplicityConfig<f64>) -> Result<NormReport> {
    oscillation_norm(f, family, false, cfg)
}

/// As [`bmo_norm`] with each ball B replaced by its orbit B ∪ (-B).
pub fn bmo_orbit_norm(f: &Profile, family: &BallFamily, cfg: &MultiplicityConfig<f64>) -> Result<NormReport> {
    oscillation_norm(f, family, true, cfg)
}

/// Orbit mean oscillation on balls of shrinking radius centred at `point`.
pub fn orbit_growth_curve(f: &Profile, point: f64, radii: &[f64], cfg: &MultiplicityConfig<f64>) -> Result<Vec<(f64, f64)>> {
    let rule = Rule::new(8, 5);
    radii
        .iter()
        .map(|&r| {
            let b = Ball::new(point, r)?;
            if point.abs() + r > f.half_width {
                return Err(Error::FamilyOutsideGrid(point.abs() + r));
            }
            Ok((r, ball_oscillation(f, &b, true, cfg.kappa(), &rule)))
        })
        .collect()
}

/// (λ, |{x ∈ B : |f - f_B| > λ}| / |B|) for each λ.
pub fn john_nirenberg_profile(f: &Profile, ball: Ball, lambdas: &[f64], cfg: &MultiplicityConfig<f64>) -> Vec<(f64, f64)> {
    let rule = Rule::graded(8, 0.8, 60);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    rule.interval(ball.center - ball.radius, ball.center + ball.radius, &f.singular, cfg.kappa(), &mut xs, &mut ws);
    let vals: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    let m: f64 = ws.iter().sum();
    let avg = vals.iter().zip(&ws).map(|(v, w)| v * w).sum::<f64>() / m;
    lambdas
        .iter()
        .map(|&l| {
            let s: f64 = vals.iter().zip(&ws).filter(|(v, _)| (*v - avg).abs() > l).map(|(_, w)| w).sum();
            (l, s / m)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares fit of ln(ratio) = intercept + slope λ over points with λ ≥ λ_min and ratio > 0.
pub fn exponential_decay_fit(profile: &[(f64, f64)], lambda_min: f64) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = profile.iter().filter(|(l, r)| *l >= lambda_min && *r > 0.0).map(|&(l, r)| (l, r.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(DecayFit { slope, intercept: my - slope * mx, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TentNode {
    pub x0: f64,
    pub x: f64,
    pub weight: f64,
}

/// T(B) = {(x0, x) : |x - x'| ≤ r - x0} discretized by graded Gauss rules in x0
/// and, at each height, in x. Weights include |x|^{2κ}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tent {
    pub ball: Ball,
    pub nodes: Vec<TentNode>,
}

impl Tent {
    pub fn new(ball: Ball, n: usize, singular: &[f64], kappa: f64) -> Self {
        let hr = Rule::new(n, 6);
        let xr = Rule::new(n, 3);
        let (mut ss, mut sw) = (Vec::new(), Vec::new());
        // heights graded toward x0 = 0 only: reuse the lower half of the rule
        let fr: Vec<f64> = hr.fractions.iter().copied().filter(|&f| f <= 0.5).map(|f| 2.0 * f).collect();
        for w in fr.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (t, wt) in hr.nodes.iter().zip(&hr.weights) {
                ss.push(mid + half * t);
                sw.push(wt * half);
            }
        }
        let mut nodes = Vec::new();
        for (s, w0) in ss.iter().zip(&sw) {
            let x0 = ball.radius * s;
            let hw = ball.radius - x0;
            let (mut xs, mut ws) = (Vec::new(), Vec::new());
            xr.interval(ball.center - hw, ball.center + hw, singular, kappa, &mut xs, &mut ws);
            for (x, w) in xs.into_iter().zip(ws) {
                nodes.push(TentNode { x0, x, weight: w * w0 * ball.radius });
            }
        }
        Tent { ball, nodes }
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, nu: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * nu(n.x0, n.x)).sum()
    }
}

/// sup over the family of |B|^{-1} ∬_{T(B)} ν(x0, x) dω(x) dx0 by direct tent quadrature.
pub fn carleson_norm<F: Fn(f64, f64) -> f64 + Sync>(
    nu: F,
    family: &BallFamily,
    singular: &[f64],
    cfg: &MultiplicityConfig<f64>,
) -> Result<NormReport> {
    let k = cfg.kappa();
    let sing = symmetric(singular);
    let tent_value = |b: &Ball, n: usize| -> Result<f64> { Ok(Tent::new(*b, n, &sing, k).integrate(&nu) / b.measure(cfg)?) };
    let values = try_par_map(&family.balls, |b| {
        Ok::<_, Error>(BallValue { center: b.center, radius: b.radius, value: tent_value(b, 8)? })
    })?;
    let mut rep = NormReport::from_values(values, &format!("tent:{}", family.id), 0.0);
    if let Some(w) = rep.worst() {
        rep.quadrature_error = (tent_value(&Ball { center: w.center, radius: w.radius }, 16)? - w.value).abs();
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldOptions {
    pub half_width: f64,
    pub min_height: f64,
    pub max_height: f64,
    /// Gauss nodes in x0 per octave.
    pub per_octave: usize,
    /// Gauss nodes per x panel.
    pub gl: usize,
}

impl FieldOptions {
    /// Covers the family and its first refinement.
    pub fn for_family(family: &BallFamily) -> Self {
        FieldOptions {
            half_width: family.extent(),
            min_height: family.min_radius() / 64.0,
            max_height: family.max_radius(),
            per_octave: 3,
            gl: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FieldRow {
    breaks: Vec<f64>,
    /// ∫ from the left edge to each break.
    cum: Vec<f64>,
    /// ν |x|^{2κ} at the Gauss nodes of each panel, panel-major.
    nodal: Vec<f64>,
}

/// ∫_{-1}^{σ} of the polynomial through the Gauss nodes (t_i, v_i).
fn partial_gauss(t: &[f64], w: &[f64], v: &[f64], sigma: f64) -> f64 {
    let half = 0.5 * (sigma + 1.0);
    let mut sum = 0.0;
    for (q, wq) in t.iter().zip(w) {
        let s = -1.0 + half * (q + 1.0);
        sum += wq * lagrange(t, v, s);
    }
    half * sum
}

fn lagrange(t: &[f64], v: &[f64], s: f64) -> f64 {
    let mut out = 0.0;
    for i in 0..t.len() {
        let mut l = 1.0;
        for j in 0..t.len() {
            if i != j {
                l *= (s - t[j]) / (t[i] - t[j]);
            }
        }
        out += v[i] * l;
    }
    out
}

/// A density on (0, h_max] × [-L, L] for tent integrals over many balls.
///
/// Heights are Gauss nodes on octave panels in h; each row stores the
/// density at Gauss nodes of x panels. Partial panels in either direction use
/// the interpolating polynomial, so no new evaluations are needed per ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityField {
    pub heights: Vec<f64>,
    /// Boundaries of the height panels.
    pub height_breaks: Vec<f64>,
    rows: Vec<FieldRow>,
    x_rule: (Vec<f64>, Vec<f64>),
    h_rule: (Vec<f64>, Vec<f64>),
    pub half_width: f64,
    pub id: String,
}

fn row_breaks(h: f64, w: f64, singular: &[f64]) -> Vec<f64> {
    let base = (0.5 * h).clamp(0.25, 1.0);
    let n = (2.0 * w / base).ceil().max(1.0) as usize;
    let mut b: Vec<f64> = (0..=n).map(|i| -w + 2.0 * w * i as f64 / n as f64).collect();
    for &s in singular {
        if s.abs() >= w {
            continue;
        }
        b.push(s);
        let mut d = 0.5 * h;
        while d < base {
            b.push(s - d);
            b.push(s + d);
            d *= 2.0;
        }
    }
    b.retain(|x| x.abs() <= w);
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    b
}

impl DensityField {
    pub fn build<F: Fn(f64, f64) -> Result<f64> + Sync>(
        density: F,
        opts: &FieldOptions,
        singular: &[f64],
        kappa: f64,
    ) -> Result<Self> {
        if !(opts.min_height > 0.0 && opts.max_height > opts.min_height && opts.half_width > 0.0)
            || opts.per_octave == 0
            || opts.gl == 0
        {
            return Err(Error::Domain("invalid field options".into()));
        }
        let sing = symmetric(singular);
        // octave panels ending exactly at max_height, so dyadic radii sit on panel edges
        let octaves = (opts.max_height / opts.min_height).log2().ceil().max(1.0) as i32;
        let height_breaks: Vec<f64> = (0..=octaves).rev().map(|j| opts.max_height * 0.5f64.powi(j)).collect();
        let (hx, hw) = gauss_legendre::<f64>(opts.per_octave);
        let mut heights = Vec::new();
        for p in height_breaks.windows(2) {
            for t in &hx {
                heights.push(0.5 * (p[0] + p[1]) + 0.5 * (p[1] - p[0]) * t);
            }
        }
        let (gx, gw) = gauss_legendre::<f64>(opts.gl);
        let k2 = 2.0 * kappa;
        let mut tasks = Vec::new();
        let mut layout = Vec::new();
        for &h in &heights {
            let b = row_breaks(h, opts.half_width, &sing);
            for p in b.windows(2) {
                let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
                for t in &gx {
                    let x = mid + half * t;
                    tasks.push((h, x, pow_abs(x, k2)));
                }
            }
            layout.push(b);
        }
        let vals = try_par_map(&tasks, |&(h, x, w)| Ok::<_, Error>(w * density(h, x)?))?;
        let mut rows = Vec::with_capacity(layout.len());
        let mut it = vals.into_iter();
        for b in layout {
            let nodal: Vec<f64> = it.by_ref().take((b.len() - 1) * opts.gl).collect();
            let mut cum = vec![0.0];
            for (p, w) in b.windows(2).zip(nodal.chunks(opts.gl)) {
                let s: f64 = w.iter().zip(&gw).map(|(v, g)| v * g).sum::<f64>() * 0.5 * (p[1] - p[0]);
                cum.push(cum.last().unwrap() + s);
            }
            rows.push(FieldRow { breaks: b, cum, nodal });
        }
        let id = format!(
            "field-L{}-h{:.3e}..{}-o{}-g{}",
            opts.half_width, height_breaks[0], opts.max_height, opts.per_octave, opts.gl
        );
        Ok(DensityField {
            heights,
            height_breaks,
            rows,
            x_rule: (gx, gw),
            h_rule: (hx, hw),
            half_width: opts.half_width,
            id,
        })
    }

    fn cum_at(&self, row: &FieldRow, x: f64) -> f64 {
        let b = &row.breaks;
        let x = x.clamp(b[0], *b.last().unwrap());
        let i = match b.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => return row.cum[i],
            Err(i) => i.max(1).min(b.len() - 1),
        };
        let (a, c) = (b[i - 1], b[i]);
        let (t, w) = &self.x_rule;
        let v = &row.nodal[(i - 1) * t.len()..i * t.len()];
        let sigma = 2.0 * (x - a) / (c - a) - 1.0;
        row.cum[i - 1] + 0.5 * (c - a) * partial_gauss(t, w, v, sigma)
    }

    /// ∬_{T(B)} ν dω dx0.
    pub fn tent_integral(&self, ball: &Ball) -> Result<f64> {
        let top = *self.height_breaks.last().unwrap();
        if ball.center.abs() + ball.radius > self.half_width * (1.0 + 1e-12) || ball.radius > top * (1.0 + 1e-12) {
            return Err(Error::FamilyOutsideGrid(ball.center.abs() + ball.radius));
        }
        let (c, r) = (ball.center, ball.radius.min(top));
        // width integral at row j; past h = r it continues smoothly as minus the reversed integral
        let inner = |j: usize| {
            let h = self.heights[j];
            self.cum_at(&self.rows[j], c + r - h) - self.cum_at(&self.rows[j], c - r + h)
        };
        let (t, w) = &self.h_rule;
        let m = t.len();
        let h0 = self.height_breaks[0];
        if r <= h0 {
            // ν ∝ x0 near the boundary and the tent width shrinks linearly
            let full = self.cum_at(&self.rows[0], c + r) - self.cum_at(&self.rows[0], c - r);
            return Ok(full * r * r / (6.0 * self.heights[0]));
        }
        // below the first panel: inner(h) ≈ αh + βh² through the two lowest nodes
        let mut total = if m >= 2 {
            let (h1, h2) = (self.heights[0], self.heights[1]);
            let (q1, q2) = (inner(0) / h1, inner(1) / h2);
            let beta = (q2 - q1) / (h2 - h1);
            let alpha = q1 - beta * h1;
            alpha * h0 * h0 / 2.0 + beta * h0 * h0 * h0 / 3.0
        } else {
            0.5 * h0 * inner(0) * h0 / self.heights[0]
        };
        for (p, pair) in self.height_breaks.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            if a >= r {
                break;
            }
            let vals: Vec<f64> = (0..m).map(|q| inner(p * m + q)).collect();
            if b <= r * (1.0 + 1e-12) {
                total += 0.5 * (b - a) * vals.iter().zip(w.iter()).map(|(v, w)| v * w).sum::<f64>();
            } else {
                let sigma = 2.0 * (r - a) / (b - a) - 1.0;
                total += 0.5 * (b - a) * partial_gauss(t, w, &vals, sigma);
            }
        }
        Ok(total)
    }
}

/// sup over the family of |B|^{-1} ∬_{T(B)} ν from a precomputed field.
pub fn carleson_norm_field(field: &DensityField, family: &BallFamily, cfg: &MultiplicityConfig<f64>) -> Result<NormReport> {
    let values = family
        .balls
        .iter()
        .map(|b| Ok(BallValue { center: b.center, radius: b.radius, value: field.tent_integral(b)? / b.measure(cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport::from_values(values, &format!("{}:{}", field.id, family.id), 0.0))
}

/// φ whose Poisson extension feeds the BMC seminorm.
#[derive(Debug, Clone)]
pub enum BmcInput {
    /// φ itself, which must satisfy the growth condition.
    Function(RealFunction),
    /// φ = R̃ψ for bounded ψ; ∇u_φ is computed from ψ and the conjugate kernel.
    RegularizedRiesz(RealFunction),
}

/// ∫ |φ(x)| (1 + |x|)^{-2κ-2} dω(x), after checking that the tail decays.
pub fn growth_integral(phi: &RealFunction, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<f64> {
    let k = cfg.kappa();
    let p = 2.0 * k + 2.0;
    const TAIL_TOL: f64 = 1e-2;
    // R |φ(±R)| (1+R)^{-2κ-2} R^{2κ} bounds the tail beyond R up to a constant
    let tail = |r: f64| {
        let w = r * (1.0 + r).powf(-p) * r.powf(2.0 * k);
        (phi.eval(r).abs() * w).max(phi.eval(-r).abs() * w)
    };
    let (t4, t6, t8) = (tail(1e4), tail(1e6), tail(1e8));
    if !(t4.is_finite() && t6.is_finite() && t8.is_finite()) || t8 > TAIL_TOL || t8 > 1.001 * t6 + 1e-300 {
        let bound = if t8.is_finite() { t8 } else { f64::INFINITY };
        return Err(Error::TailBoundExceeded { bound, tol: TAIL_TOL });
    }
    let g = phi.clone();
    let abs = RealFunction::new("abs", move |x| g.eval(x).abs()).with_breakpoints(&phi.breakpoints);
    let mut abs = abs;
    abs.support = phi.support;
    integrate_against(|x: f64| (1.0 + x.abs()).powf(-p), &abs, &[], k, spec)
}

/// x0 |∇u_φ(x0, x)|² on a field covering `opts`.
pub fn bmc_field(
    input: &BmcInput,
    opts: &FieldOptions,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<DensityField> {
    let (f, conj) = match input {
        BmcInput::Function(phi) => {
            growth_integral(phi, cfg, spec).map_err(|e| Error::GrowthConditionFailed(e.to_string()))?;
            (phi, false)
        }
        BmcInput::RegularizedRiesz(psi) => {
            if psi.sup_bound.is_none() {
                return Err(Error::GrowthConditionFailed(format!("{} has no sup bound", psi.name)));
            }
            (psi, true)
        }
    };
    let grad = |x0: f64, x: f64| -> Result<KappaGradient> {
        let p = UpperHalfPlanePoint::new(x0, x)?;
        if conj {
            kappa_gradient_conjugate(f, p, cfg, spec)
        } else {
            kappa_gradient_poisson(f, p, cfg, spec)
        }
    };
    DensityField::build(|x0, x| Ok(x0 * grad(x0, x)?.norm_sqr()), opts, &f.breakpoints, cfg.kappa())
}

/// ‖φ‖_{*,C} = (sup_B |B|^{-1} ∬_{T(B)} x0 |∇u_φ|² dω dx0)^{1/2} from a field.
pub fn bmc_from_field(field: &DensityField, family: &BallFamily, cfg: &MultiplicityConfig<f64>) -> Result<NormReport> {
    let mut rep = carleson_norm_field(field, family, cfg)?;
    rep.value = rep.value.max(0.0).sqrt();
    for b in rep.per_ball.iter_mut() {
        b.value = b.value.max(0.0).sqrt();
    }
    rep.family = format!("bmc:{}", rep.family);
    Ok(rep)
}

pub fn bmc_seminorm(
    input: &BmcInput,
    family: &BallFamily,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<NormReport> {
    let field = bmc_field(input, &FieldOptions::for_family(family), cfg, spec)?;
    bmc_from_field(&field, family, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomShape {
    HaarLike,
    SmoothOdd,
}

/// (1,2)-atom: supported in `ball`, ‖a‖₂ ≤ |B|^{-1/2}, ∫ a dω = 0.
#[derive(Debug, Clone)]
pub struct Atom12 {
    pub ball: Ball,
    pub shape: AtomShape,
    pub function: RealFunction,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

fn tight() -> QuadratureSpec<f64> {
    QuadratureSpec::new(1e-14, 1e-13).with_max_evals(1_000_000)
}

fn weighted_integral(f: &RealFunction, kappa: f64) -> Result<f64> {
    integrate_against(|_| 1.0, f, &[], kappa, &tight())
}

pub fn make_atom(center: f64, radius: f64, shape: AtomShape, cfg: &MultiplicityConfig<f64>) -> Result<Atom12> {
    let ball = Ball::new(center, radius).map_err(|e| Error::InvalidAtom(e.to_string()))?;
    let k = cfg.kappa();
    let (c, r) = (center, radius);
    let mb = ball.measure(cfg)?;
    let function = match shape {
        AtomShape::HaarLike => {
            let m1 = interval_measure(c - r, c, k);
            let m2 = interval_measure(c, c + r, k);
            if !(m1 > 0.0 && m2 > 0.0) {
                return Err(Error::InvalidAtom("degenerate half ball".into()));
            }
            let s = 1.0 / (mb * (m1 * m2).sqrt());
            let (alpha, beta) = (s * m2, s * m1);
            RealFunction::new("haar-atom", move |x| if x < c { alpha } else { -beta })
                .with_support(c - r, c + r)
                .with_breakpoints(&[c])
                .with_sup_bound(alpha.max(beta))
        }
        AtomShape::SmoothOdd => {
            let bump = RealFunction::bump(c, r);
            let b2 = bump.clone();
            let g = RealFunction::new("odd-bump", move |x| (x - c) / r * b2.eval(x)).with_support(c - r, c + r);
            let lam = weighted_integral(&g, k)? / weighted_integral(&bump, k)?;
            let h = RealFunction::combine(1.0, &g, -lam, &bump);
            let h2 = h.clone();
            let sq = RealFunction::new("sq", move |x| h2.eval(x).powi(2)).with_support(c - r, c + r);
            let norm = weighted_integral(&sq, k)?.sqrt();
            if !(norm > 0.0) {
                return Err(Error::InvalidAtom("zero atom".into()));
            }
            let scale = 1.0 / (norm * mb.sqrt());
            let bound = h.sup_bound.map(|s| s * scale).unwrap_or(f64::INFINITY);
            let mut a = h.scale(scale).with_sup_bound(bound);
            a.name = "smooth-atom".into();
            a.support = Some((c - r, c + r));
            a
        }
    };
    let xs: Vec<f64> = (0..=200).map(|i| c - r + 2.0 * r * i as f64 / 200.0).collect();
    let values = xs.iter().map(|&x| function.eval(x)).collect();
    Ok(Atom12 { ball, shape, function: function.with_parity(Parity::None), xs, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomCheck {
    pub support_ok: bool,
    /// ‖a‖₂ |B|^{1/2}, at most 1 for an atom.
    pub size: f64,
    pub mean: f64,
}

impl AtomCheck {
    pub fn valid(&self) -> bool {
        self.support_ok && self.size <= 1.0 + 1e-9 && self.mean.abs() <= 1e-10
    }
}

pub fn atom_diagnostics(a: &Atom12, cfg: &MultiplicityConfig<f64>) -> Result<AtomCheck> {
    let k = cfg.kappa();
    let (c, r) = (a.ball.center, a.ball.radius);
    let inside = a.function.support.map(|(lo, hi)| lo >= c - r - 1e-12 && hi <= c + r + 1e-12).unwrap_or(false);
    let outside_zero = (1..=100).all(|i| {
        let d = r * (1.0 + i as f64 / 100.0);
        a.function.eval(c - d) == 0.0 && a.function.eval(c + d) == 0.0
    });
    let f = a.function.clone();
    let mut sq = RealFunction::new("sq", move |x| f.eval(x).powi(2)).with_breakpoints(&a.function.breakpoints);
    sq.support = a.function.support;
    let size = (weighted_integral(&sq, k)? * a.ball.measure(cfg)?).sqrt();
    let mean = weighted_integral(&a.function, k)?;
    Ok(AtomCheck { support_ok: inside && outside_zero, size, mean })
}

pub fn validate_atom(a: &Atom12, cfg: &MultiplicityConfig<f64>) -> Result<bool> {
    Ok(atom_diagnostics(a, cfg)?.valid())
}

/// Center uniform in [-3, 3], radius log-uniform in [0.05, 2], random shape.
pub fn random_atom<R: Rng>(rng: &mut R, cfg: &MultiplicityConfig<f64>) -> Result<Atom12> {
    let c = rng.gen_range(-3.0..3.0);
    let r = (rng.gen_range(0.05f64.ln()..2f64.ln())).exp();
    let shape = if rng.gen_bool(0.5) { AtomShape::HaarLike } else { AtomShape::SmoothOdd };
    make_atom(c, r, shape, cfg)
}

/// ∫ |R f| dω by the principal-value route. Beyond the support, |Rf| is
/// integrated on doubling panels and the last tail is closed with the decay
/// rate read off the final panel.
pub fn riesz_l1_norm(f: &RealFunction, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<f64> {
    let k2 = 2.0 * cfg.kappa();
    let inner = QuadratureSpec::new(spec.abs_tol * 1e-3, spec.rel_tol * 1e-3).with_max_evals(spec.max_evals);
    let g = |x: f64| riesz_pv(f, x, cfg, &inner).map(|v| v.abs() * pow_abs(x, k2)).unwrap_or(f64::NAN);
    let mut cuts = f.symmetric_breakpoints();
    let r0 = match f.support {
        Some((a, b)) => {
            cuts.extend_from_slice(&[a, b, -a, -b]);
            a.abs().max(b.abs())
        }
        None => 8.0,
    };
    let r0 = 2.0 * r0.max(1.0);
    cuts.push(0.0);
    cuts.push(r0);
    cuts.push(-r0);
    cuts.retain(|c| c.abs() <= r0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let piece = |a: f64, b: f64| -> Result<f64> { Ok(gauss_kronrod(g, a, b, spec.abs_tol, spec.rel_tol, spec.max_evals)?.value) };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += piece(w[0], w[1])?;
    }
    for side in [1.0, -1.0] {
        let mut a = r0;
        let mut prev = f64::INFINITY;
        for _ in 0..60 {
            let (lo, hi) = if side > 0.0 { (a, 2.0 * a) } else { (-2.0 * a, -a) };
            let p = piece(lo, hi)?;
            total += p;
            if p < spec.abs_tol * 1e-2 || (p < spec.rel_tol * 1e-2 * total && p < prev) {
                // a panel [a, 2a] of a power law a^{-s}: the rest is p / (2^{s-1} - 1)
                let ratio = p / prev;
                if ratio.is_finite() && ratio < 1.0 {
                    total += p * ratio / (1.0 - ratio);
                }
                break;
            }
            prev = p;
            a *= 2.0;
        }
    }
    Ok(total)
}

/// ‖f‖_{H¹} = ‖f‖₁ + ‖R f‖₁; f must have ∫ f dω = 0.
pub fn h1_norm(f: &RealFunction, cfg: &MultiplicityConfig<f64>, spec: &QuadratureSpec<f64>) -> Result<NormReport> {
    let k = cfg.kappa();
    let g = f.clone();
    let mut abs = RealFunction::new("abs", move |x| g.eval(x).abs()).with_breakpoints(&f.breakpoints);
    abs.support = f.support;
    let l1 = integrate_against(|_| 1.0, &abs, &[], k, spec)?;
    let mean = integrate_against(|_| 1.0, f, &[], k, spec)?;
    if mean.abs() > 1e-8 * l1.max(f64::MIN_POSITIVE) {
        return Err(Error::MeanNotZero(mean));
    }
    let rl1 = riesz_l1_norm(f, cfg, spec)?;
    Ok(NormReport {
        value: l1 + rl1,
        family: format!("h1-spatial:{}", f.name),
        per_ball: vec![],
        quadrature_error: spec.rel_tol * (l1 + rl1) + spec.abs_tol,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityOptions {
    pub xi_extent: f64,
    /// Frequencies kept by the smooth annulus cutoff.
    pub annulus: (f64, f64),
    pub x_extent: f64,
    pub min_height: f64,
    pub max_height: f64,
    pub height_panels: usize,
    /// Gauss nodes per height panel.
    pub height_gl: usize,
    /// Gauss nodes per x panel.
    pub gl: usize,
}

impl Default for DualityOptions {
    fn default() -> Self {
        DualityOptions {
            xi_extent: 8.0,
            annulus: (0.0, 8.0),
            x_extent: 16.0,
            min_height: 1e-4,
            max_height: 200.0,
            height_panels: 6,
            height_gl: 6,
            gl: 6,
        }
    }
}

/// C^∞ step from 0 (t ≤ 0) to 1 (t ≥ 1).
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Smooth cutoff equal to 1 on [2 lo, 0.75 hi] and 0 outside (lo, hi).
/// lo = 0 keeps all low frequencies.
pub fn annulus_cutoff(r: f64, lo: f64, hi: f64) -> f64 {
    let r = r.abs();
    let low = if lo > 0.0 { smooth_step((r - lo) / lo) } else { 1.0 };
    low * smooth_step((hi - r) / (0.25 * hi))
}

/// f with F f supported in the annulus, kept both as spectrum and samples.
#[derive(Debug, Clone)]
pub struct CleanedFunction {
    pub spectrum: SampledFunction,
    pub space: SampledFunction,
    pub x_extent: f64,
}

impl CleanedFunction {
    pub fn eval(&self, x: f64) -> f64 {
        self.space.eval(x).re
    }

    /// (∂_{x0} u_f, D_x u_f) from the multipliers -|ξ| e^{-x0|ξ|} and iξ e^{-x0|ξ|}.
    fn gradient_spectra(&self, x0: f64) -> (SampledFunction, SampledFunction) {
        let p = self.spectrum.parity;
        let d0 = self.spectrum.map(p, |xi, v| v * (-xi.abs() * (-x0 * xi.abs()).exp()));
        let flip = match p {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        };
        let dx = self.spectrum.map(flip, |xi, v| v * Complex64::new(0.0, xi * (-x0 * xi.abs()).exp()));
        (d0, dx)
    }

    pub fn poisson_gradient(&self, x0: f64, x: f64) -> KappaGradient {
        let (d0, dx) = self.gradient_spectra(x0);
        KappaGradient { d0: inverse_transform_at(&d0, x).re, dx: inverse_transform_at(&dx, x).re }
    }
}

pub fn frequency_clean(
    f0: &RealFunction,
    cfg: &MultiplicityConfig<f64>,
    opts: &DualityOptions,
    spec: &QuadratureSpec<f64>,
) -> Result<CleanedFunction> {
    let xi_grid = Arc::new(Grid::new(GridSpec::composite(opts.xi_extent).with_nodes_per_panel(16).with_core(0.5, opts.xi_extent))?);
    let raw = forward_transform_fn(f0, &xi_grid, cfg, spec)?;
    let (lo, hi) = opts.annulus;
    let spectrum = raw.map(raw.parity, |xi, v| v * annulus_cutoff(xi, lo, hi));
    let kept = spectrum.l2_norm();
    let total = raw.l2_norm();
    if !(kept > 1e-3 * total) {
        return Err(Error::FrequencyProjectionFailed(format!("{} has no mass in the annulus", f0.name)));
    }
    let x_grid = Arc::new(Grid::composite(opts.x_extent));
    let topts = TransformOptions { tail_tol: f64::INFINITY, ..Default::default() };
    let space = inverse_transform(&spectrum, &x_grid, &topts)?;
    let tail = space.tail_estimate();
    if tail > 1e-6 * kept {
        return Err(Error::FrequencyProjectionFailed(format!("cleaned function not localized (tail {:.2e})", tail)));
    }
    Ok(CleanedFunction { spectrum, space, x_extent: opts.x_extent })
}

/// ∫ f φ dω.
pub fn duality_pairing_lhs(
    f: &CleanedFunction,
    phi: &RealFunction,
    cfg: &MultiplicityConfig<f64>,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let l = f.x_extent;
    let (lo, hi) = phi.support.map(|(a, b)| (a.max(-l), b.min(l))).unwrap_or((-l, l));
    if lo >= hi {
        return Ok(0.0);
    }
    let mut restricted = phi.clone().with_breakpoints(&[lo, hi]);
    restricted.support = Some((lo, hi));
    integrate_against(|x| f.eval(x), &restricted, &[], cfg.kappa(), spec)
}

/// 2 ∬ x0 ⟨∇u_f, ∇u_φ⟩ dω dx0, with u_f spectral and u_φ from kernel integrals.
pub fn duality_pairing_rhs(
    f: &CleanedFunction,
    phi: &RealFunction,
    cfg: &MultiplicityConfig<f64>,
    opts: &DualityOptions,
    spec: &QuadratureSpec<f64>,
) -> Result<f64> {
    let k2 = 2.0 * cfg.kappa();
    let (gx, gw) = gauss_legendre::<f64>(opts.gl);
    let (hx, hw) = gauss_legendre::<f64>(opts.height_gl);
    let (la, lb) = (opts.min_height.ln(), opts.max_height.ln());
    let np = opts.height_panels.max(1);
    let mut heights = Vec::new();
    for p in 0..np {
        let a = la + (lb - la) * p as f64 / np as f64;
        let b = la + (lb - la) * (p + 1) as f64 / np as f64;
        for (t, w) in hx.iter().zip(&hw) {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * t;
            let h = s.exp();
            heights.push((h, w * 0.5 * (b - a) * h));
        }
    }
    let sing = symmetric(&phi.breakpoints);
    let scale = f.space.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut total = 0.0;
    for &(h, wh) in &heights {
        let (d0s, dxs) = f.gradient_spectra(h);
        let w = 0.5 * opts.x_extent + 8.0 * h;
        let base = (0.5 * h).max(0.5);
        let n = (2.0 * w / base).ceil() as usize;
        let mut b: Vec<f64> = (0..=n).map(|i| -w + 2.0 * w * i as f64 / n as f64).collect();
        for &s in &sing {
            let mut d = 0.25 * h;
            b.push(s);
            while d < base {
                b.push(s - d);
                b.push(s + d);
                d *= 4.0;
            }
        }
        b.retain(|x| x.abs() <= w);
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        let mut nodes = Vec::new();
        for p in b.windows(2) {
            let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for (t, wt) in gx.iter().zip(&gw) {
                let x = mid + half * t;
                nodes.push((x, wt * half * pow_abs(x, k2)));
            }
        }
        let parts = try_par_map(&nodes, |&(x, wx)| {
            let gf = KappaGradient { d0: inverse_transform_at(&d0s, x).re, dx: inverse_transform_at(&dxs, x).re };
            if gf.norm() <= 1e-13 * scale {
                return Ok::<f64, Error>(0.0);
            }
            let gp = kappa_gradient_poisson(phi, UpperHalfPlanePoint::new(h, x)?, cfg, spec)?;
            Ok(wx * gf.dot(&gp))
        })?;
        total += wh * h * parts.iter().sum::<f64>();
    }
    Ok(2.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: f64) -> MultiplicityConfig<f64> {
        MultiplicityConfig::rank_one(k).unwrap()
    }

    #[test]
    fn dyadic_family_refines_to_superset() {
        let f = BallFamily::dyadic(2.0, 1, -1, 1).unwrap();
        let g = f.refined();
        assert!(f.balls.iter().all(|b| g.balls.contains(b)));
        assert_eq!(f.extent(), 4.0);
    }

    #[test]
    fn constant_and_constant_shift() {
        let c = cfg(0.7);
        let fam = BallFamily::dyadic(2.0, 1, -2, 0).unwrap();
        let one = Profile::new("one", 3.0, &[], |_| 3.0);
        assert!(bmo_norm(&one, &fam, &c).unwrap().value < 1e-14);
        let g = Profile::new("tanh", 3.0, &[], |x: f64| x.tanh());
        let g2 = Profile::new("tanh+5", 3.0, &[], |x: f64| x.tanh() + 5.0);
        let a = bmo_norm(&g, &fam, &c).unwrap().value;
        let b = bmo_norm(&g2, &fam, &c).unwrap().value;
        assert!((a - b).abs() < 1e-12);
        assert!(matches!(bmo_norm(&g, &BallFamily::dyadic(4.0, 0, 0, 0).unwrap(), &c), Err(Error::FamilyOutsideGrid(_))));
    }

    #[test]
    fn sign_oscillation_closed_form() {
        // ball (0, r) at κ = 0: mean 0, oscillation 1; off-centre ball (r/2, r): 3/4 mass +1
        let c = cfg(0.0);
        let s = Profile::new("sign", 4.0, &[0.0], |x: f64| x.signum());
        let fam = BallFamily::custom(vec![Ball::new(0.5, 1.0).unwrap()], "one").unwrap();
        let v = bmo_norm(&s, &fam, &c).unwrap().value;
        // f_B = 1/2, oscillation = (3/4)(1/2) + (1/4)(3/2) = 3/4
        assert!((v - 0.75).abs() < 1e-12, "{}", v);
        // orbit of (0.5, 1) is (-1.5, 1.5): sign has mean 0 there
        let o = bmo_orbit_norm(&s, &fam, &c).unwrap().value;
        assert!((o - 1.0).abs() < 1e-12);
    }

    #[test]
    fn john_nirenberg_log() {
        let c = cfg(0.0);
        let f = Profile::new("log", 2.0, &[0.0], |x: f64| x.abs().ln());
        let lam: Vec<f64> = (0..30).map(|i| 0.25 * i as f64).collect();
        let prof = john_nirenberg_profile(&f, Ball::new(0.0, 1.0).unwrap(), &lam, &c);
        // f_B = -1, ratio = e^{-1-λ} for λ > 1
        for &(l, r) in prof.iter().filter(|p| p.0 > 1.0 && p.0 < 5.0) {
            assert!((r / (-1.0 - l).exp() - 1.0).abs() < 2e-2, "{} {}", l, r);
        }
        let fit = exponential_decay_fit(&prof, 1.1).unwrap();
        assert!(fit.r2 > 0.95 && (fit.slope + 1.0).abs() < 0.1);
    }

    #[test]
    fn tent_nodes_inside() {
        let t = Tent::new(Ball::new(0.3, 0.8).unwrap(), 6, &[0.0], 0.5);
        assert!(t.nodes.iter().all(|n| n.x0 > 0.0 && n.x0 <= 0.8 && (n.x - 0.3).abs() <= 0.8 - n.x0 + 1e-15));
        // ∬_T x0 dx dx0 at κ = 0 is r³/3 ... with |x|^{2κ} weight 1
        let t0 = Tent::new(Ball::new(0.3, 0.8).unwrap(), 8, &[], 0.0);
        let v = t0.integrate(|x0, _| x0);
        assert!((v - 2.0 * 0.8f64.powi(3) / 6.0).abs() < 1e-12, "{}", v);
    }

    #[test]
    fn field_matches_tent() {
        let c = cfg(0.5);
        let fam = BallFamily::dyadic(1.0, 1, -2, 0).unwrap();
        let nu = |x0: f64, x: f64| x0 / (x0 * x0 + x * x).sqrt().max(1e-300) * (-x * x).exp();
        let direct = carleson_norm(nu, &fam, &[0.0], &c).unwrap();
        let field = DensityField::build(|a, b| Ok(nu(a, b)), &FieldOptions::for_family(&fam), &[0.0], 0.5).unwrap();
        let via = carleson_norm_field(&field, &fam, &c).unwrap();
        assert!((direct.value - via.value).abs() < 1e-3 * direct.value, "{} {}", direct.value, via.value);
    }

    #[test]
    fn field_tent_of_linear_density() {
        // ∬_T x0 dx dx0 = r³/3 at κ = 0, for radii on and off the octave edges
        let opts = FieldOptions { half_width: 2.0, min_height: 1.0 / 256.0, max_height: 1.0, per_octave: 3, gl: 4 };
        let field = DensityField::build(|a, _| Ok(a), &opts, &[], 0.0).unwrap();
        for &(c, r) in &[(0.0, 1.0), (0.3, 0.5), (-0.7, 0.37), (1.0, 0.01)] {
            let v = field.tent_integral(&Ball::new(c, r).unwrap()).unwrap();
            let e = r * r * r / 3.0;
            assert!((v - e).abs() < 1e-10 * e, "{} {} {}", r, v, e);
        }
    }

    #[test]
    fn growth_condition() {
        let c = cfg(0.5);
        let s = QuadratureSpec::new(1e-10, 1e-9).with_max_evals(1_000_000);
        let one = growth_integral(&RealFunction::constant(1.0), &c, &s).unwrap();
        // 2 ∫_0^∞ x (1+x)^{-3} dx = 1
        assert!((one - 1.0).abs() < 1e-8);
        let sq = RealFunction::new("sqrt", |x: f64| (1.0 + x.abs()).sqrt()).with_parity(Parity::Even);
        assert!(growth_integral(&sq, &c, &s).unwrap().is_finite());
        let ex = RealFunction::new("exp", |x: f64| x.abs().exp());
        assert!(matches!(growth_integral(&ex, &c, &s), Err(Error::TailBoundExceeded { .. })));
        assert!(matches!(
            bmc_seminorm(&BmcInput::Function(ex), &BallFamily::dyadic(1.0, 0, 0, 0).unwrap(), &c, &s),
            Err(Error::GrowthConditionFailed(_))
        ));
    }

    #[test]
    fn atoms() {
        let c = cfg(0.5);
        let a = make_atom(0.0, 1.0, AtomShape::HaarLike, &c).unwrap();
        let d = atom_diagnostics(&a, &c).unwrap();
        assert!(d.valid(), "{:?}", d);
        // |B_1(0)| = 1 at κ = 1/2, so a = ±1
        assert!((a.function.eval(-0.5) - 1.0).abs() < 1e-14 && (a.function.eval(0.5) + 1.0).abs() < 1e-14);
        for (x, r) in [(0.3, 0.5), (-2.0, 1.5), (1.0, 0.05)] {
            for shape in [AtomShape::HaarLike, AtomShape::SmoothOdd] {
                let a = make_atom(x, r, shape, &cfg(1.3)).unwrap();
                let d = atom_diagnostics(&a, &cfg(1.3)).unwrap();
                assert!(d.valid() && (d.size - 1.0).abs() < 1e-9, "{:?} {:?}", shape, d);
            }
        }
        assert!(matches!(make_atom(0.0, -1.0, AtomShape::HaarLike, &c), Err(Error::InvalidAtom(_))));
    }

    #[test]
    fn h1_rejects_nonzero_mean() {
        let c = cfg(0.5);
        let s = QuadratureSpec::new(1e-8, 1e-7).with_max_evals(1_000_000);
        assert!(matches!(h1_norm(&RealFunction::gaussian(), &c, &s), Err(Error::MeanNotZero(_))));
    }

    #[test]
    fn annulus_shape() {
        assert_eq!(annulus_cutoff(0.05, 0.1, 8.0), 0.0);
        assert_eq!(annulus_cutoff(1.0, 0.1, 8.0), 1.0);
        assert_eq!(annulus_cutoff(-3.0, 0.1, 8.0), 1.0);
        assert_eq!(annulus_cutoff(8.5, 0.1, 8.0), 0.0);
        let v = annulus_cutoff(7.0, 0.1, 8.0);
        assert!(v > 0.0 && v < 1.0);
    }
}
