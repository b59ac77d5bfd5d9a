//! Multiplicity configuration, weights, measures, the Dunkl kernel, the
//! rank-one intertwining measure and the Dunkl derivative.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bessel_j_normalized, ln_gamma, normalized_i_scaled, tanh_sinh, QuadratureSpec, Real};

/// Multiplicity κ per ℤ₂ factor. A single entry is the rank-one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityConfig<T> {
    kappa: Vec<T>,
}

impl<T: Real> MultiplicityConfig<T> {
    pub fn rank_one(kappa: T) -> Result<Self> {
        Self::product(vec![kappa])
    }

    pub fn product(kappa: Vec<T>) -> Result<Self> {
        if kappa.is_empty() {
            return Err(Error::Domain("need at least one factor".into()));
        }
        if kappa.iter().any(|k| !(*k >= T::zero()) || !k.is_finite()) {
            return Err(Error::Domain("multiplicities must be finite and >= 0".into()));
        }
        Ok(MultiplicityConfig { kappa })
    }

    pub fn dim(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_rank_one(&self) -> bool {
        self.kappa.len() == 1
    }

    /// Rank-one κ (the first factor for products).
    pub fn kappa(&self) -> T {
        self.kappa[0]
    }

    pub fn kappas(&self) -> &[T] {
        &self.kappa
    }

    /// |κ| = Σ κ_j.
    pub fn total_kappa(&self) -> T {
        self.kappa.iter().fold(T::zero(), |a, &k| a + k)
    }

    /// Homogeneous dimension N = 2|κ| + d.
    pub fn homogeneous_dim(&self) -> T {
        T::lit(2.0) * self.total_kappa() + T::from_usize(self.dim()).unwrap()
    }

    /// c_κ with c_κ^{-1} = ∫ e^{-|x|²/2} dω_κ.
    pub fn c_kappa(&self) -> T {
        self.kappa
            .iter()
            .map(|&k| {
                let lg = ln_gamma(k + T::lit(0.5)).unwrap();
                (-(k + T::lit(0.5)) * T::LN_2() - lg).exp()
            })
            .fold(T::one(), |a, b| a * b)
    }

    /// c_{d,κ} = 2^{|κ|+d/2} π^{-1/2} Γ(|κ|+(d+1)/2).
    pub fn c_d_kappa(&self) -> T {
        let k = self.total_kappa();
        let d = T::from_usize(self.dim()).unwrap();
        let lg = ln_gamma(k + (d + T::one()) * T::lit(0.5)).unwrap();
        ((k + d * T::lit(0.5)) * T::LN_2() - T::lit(0.5) * T::PI().ln() + lg).exp()
    }

    /// m_κ = 2^{κ+1/2} Γ(κ+1)/√π (rank one; equals c_{1,κ}).
    pub fn m_kappa(&self) -> T {
        let k = self.kappa();
        let lg = ln_gamma(k + T::one()).unwrap();
        ((k + T::lit(0.5)) * T::LN_2() + lg - T::lit(0.5) * T::PI().ln()).exp()
    }
}

/// A point together with its orbit under coordinate sign flips.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitPoint<T> {
    pub coords: Vec<T>,
}

impl<T: Real> OrbitPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        OrbitPoint { coords }
    }

    /// Distinct images under ℤ₂^d (at most 2^d of them).
    pub fn orbit(&self) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = vec![Vec::new()];
        for &c in &self.coords {
            let mut next = Vec::with_capacity(out.len() * 2);
            for p in &out {
                let mut a = p.clone();
                a.push(c);
                next.push(a);
                if c != T::zero() {
                    let mut b = p.clone();
                    b.push(-c);
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }
}

/// W_κ(x) = Π |x_j|^{2κ_j}.
pub fn weight<T: Real>(x: &[T], cfg: &MultiplicityConfig<T>) -> T {
    assert_eq!(x.len(), cfg.dim(), "point dimension does not match configuration");
    x.iter()
        .zip(cfg.kappas())
        .map(|(&xj, &k)| weight_1d(xj, k))
        .fold(T::one(), |a, b| a * b)
}

/// |x|^{2κ}, with 0^0 = 1.
#[inline]
pub fn weight_1d<T: Real>(x: T, kappa: T) -> T {
    if kappa == T::zero() {
        T::one()
    } else {
        x.abs().powf(kappa + kappa)
    }
}

/// |B_r(c)|_κ = ∫_{c-r}^{c+r} |x|^{2κ} dx (rank one).
pub fn ball_measure<T: Real>(center: T, radius: T, cfg: &MultiplicityConfig<T>) -> Result<T> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::Domain(format!("ball radius must be positive, got {}", radius)));
    }
    Ok(centered_measure(center, radius, cfg.kappa()).max(T::zero()))
}

/// ∫_a^b |x|^{2κ} dx for a ≤ b.
pub fn interval_measure<T: Real>(a: T, b: T, kappa: T) -> T {
    let half = T::lit(0.5);
    centered_measure((a + b) * half, (b - a) * half, kappa)
}

fn centered_measure<T: Real>(c: T, r: T, kappa: T) -> T {
    let n = kappa + kappa + T::one();
    let c = c.abs();
    if r <= c * T::lit(0.5) {
        // one-signed and narrow: stable difference of powers
        let rho = r / c;
        let la = rho.ln_1p();
        let lb = (-rho).ln_1p();
        c.powf(n) * (n * lb).exp() * (n * (la - lb)).exp_m1() / n
    } else if r <= c {
        ((c + r).powf(n) - (c - r).powf(n)) / n
    } else {
        ((c + r).powf(n) + (r - c).powf(n)) / n
    }
}

/// d(x, t) = min(|x - t|, |x + t|).
#[inline]
pub fn orbit_distance<T: Real>(x: T, t: T) -> T {
    (x.abs() - t.abs()).abs()
}

/// Orbit distance for ℤ₂^d: min over sign flips of |t - σ(x)|.
pub fn orbit_distance_nd<T: Real>(x: &[T], t: &[T]) -> T {
    assert_eq!(x.len(), t.len());
    x.iter()
        .zip(t)
        .map(|(&a, &b)| {
            let d = a.abs() - b.abs();
            d * d
        })
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

/// Representing measure μ_x of the rank-one intertwining operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntertwiningMeasure<T> {
    /// κ = 0 or x = 0: point mass.
    Atomic { at: T },
    /// Absolutely continuous on (-|x|, |x|).
    Density { x: T, kappa: T },
}

impl<T: Real> IntertwiningMeasure<T> {
    pub fn new(x: T, cfg: &MultiplicityConfig<T>) -> Self {
        let kappa = cfg.kappa();
        if kappa == T::zero() || x == T::zero() {
            IntertwiningMeasure::Atomic { at: x }
        } else {
            IntertwiningMeasure::Density { x, kappa }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, IntertwiningMeasure::Atomic { .. })
    }
}

fn jacobi_constant<T: Real>(kappa: T) -> T {
    let lg1 = ln_gamma(kappa + T::lit(0.5)).unwrap();
    let lg2 = ln_gamma(kappa).unwrap();
    (lg1 - lg2 - T::lit(0.5) * T::PI().ln()).exp()
}

/// Density of μ_x against dξ on (-|x|, |x|), κ > 0.
pub fn intertwining_density<T: Real>(x: T, xi: T, cfg: &MultiplicityConfig<T>) -> Result<T> {
    let kappa = cfg.kappa();
    if kappa == T::zero() {
        return Err(Error::Domain("kappa = 0: the measure is the point mass at x".into()));
    }
    if x == T::zero() {
        return Err(Error::Domain("x = 0: the measure is the point mass at 0".into()));
    }
    if !(xi.abs() < x.abs()) {
        return Err(Error::Domain(format!("xi = {} outside the open support (-{}, {})", xi, x.abs(), x.abs())));
    }
    let s = xi / x;
    let c = jacobi_constant(kappa);
    Ok(c * (T::one() + s) * (T::one() - s * s).powf(kappa - T::one()) / x.abs())
}

/// ∫ g dμ_x. The two halves are integrated in the distance to the endpoints
/// ±x so the Jacobi singularities sit at 0.
pub fn intertwining_integral<T: Real, G: FnMut(T) -> T>(
    mut g: G,
    x: T,
    cfg: &MultiplicityConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    match IntertwiningMeasure::new(x, cfg) {
        IntertwiningMeasure::Atomic { at } => Ok(g(at)),
        IntertwiningMeasure::Density { x, kappa } => {
            let c = jacobi_constant(kappa);
            let km1 = kappa - T::one();
            let two = T::lit(2.0);
            // s = 1 - u near s = 1
            let near_plus = tanh_sinh(
                |u: T| u.powf(km1) * (two - u).powf(kappa) * g(x * (T::one() - u)),
                T::zero(),
                T::one(),
                spec.abs_tol,
                spec.rel_tol,
                12,
            )?;
            // s = v - 1 near s = -1
            let near_minus = tanh_sinh(
                |v: T| v.powf(kappa) * (two - v).powf(km1) * g(x * (v - T::one())),
                T::zero(),
                T::one(),
                spec.abs_tol,
                spec.rel_tol,
                12,
            )?;
            Ok(c * (near_plus.value + near_minus.value))
        }
    }
}

/// Dunkl kernel E_κ(x, y) from the Bessel representation
/// i_{κ-1/2}(xy) + xy/(2κ+1) i_{κ+1/2}(xy).
pub fn dunkl_kernel<T: Real>(x: T, y: T, cfg: &MultiplicityConfig<T>) -> T {
    let z = x * y;
    dunkl_kernel_scaled_1d(z, cfg.kappa()) * z.abs().exp()
}

/// e^{-|xy|} E_κ(x, y), finite for large arguments.
pub fn dunkl_kernel_scaled<T: Real>(x: T, y: T, cfg: &MultiplicityConfig<T>) -> T {
    dunkl_kernel_scaled_1d(x * y, cfg.kappa())
}

pub(crate) fn dunkl_kernel_scaled_1d<T: Real>(z: T, kappa: T) -> T {
    if kappa == T::zero() {
        return (z - z.abs()).exp();
    }
    let half = T::lit(0.5);
    let a = normalized_i_scaled(kappa - half, z);
    let b = normalized_i_scaled(kappa + half, z);
    a + z / (kappa + kappa + T::one()) * b
}

/// E_κ(x, y) = ∫ e^{ξ y} dμ_x(ξ) by quadrature (reference route).
pub fn dunkl_kernel_intertwining<T: Real>(
    x: T,
    y: T,
    cfg: &MultiplicityConfig<T>,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    intertwining_integral(|xi| (xi * y).exp(), x, cfg, spec)
}

/// Product kernel for ℤ₂^d.
pub fn dunkl_kernel_nd<T: Real>(x: &[T], y: &[T], cfg: &MultiplicityConfig<T>) -> T {
    assert_eq!(x.len(), cfg.dim());
    assert_eq!(y.len(), cfg.dim());
    let mut p = T::one();
    for j in 0..x.len() {
        let z = x[j] * y[j];
        p = p * dunkl_kernel_scaled_1d(z, cfg.kappas()[j]) * z.abs().exp();
    }
    p
}

/// E_κ(x, iξ) = j_{κ-1/2}(xξ) + i xξ/(2κ+1) j_{κ+1/2}(xξ); checks |E| ≤ 1.
pub fn dunkl_kernel_i<T: Real>(x: T, xi: T, cfg: &MultiplicityConfig<T>) -> Result<Complex<T>> {
    let e = kernel_i_1d(x * xi, cfg.kappa());
    if e.norm() > T::one() + T::lit(1e-9) {
        return Err(Error::Domain(format!("|E(x, i xi)| = {} exceeds 1 at x={}, xi={}", e.norm(), x, xi)));
    }
    Ok(e)
}

pub(crate) fn kernel_i_1d<T: Real>(z: T, kappa: T) -> Complex<T> {
    if kappa == T::zero() {
        return Complex::new(z.cos(), z.sin());
    }
    let (ja, jb) = bessel_j_normalized(kappa - T::lit(0.5), z);
    Complex::new(ja, z / (kappa + kappa + T::one()) * jb)
}

/// Product kernel E_κ(x, iξ) for ℤ₂^d.
pub fn dunkl_kernel_i_nd<T: Real>(x: &[T], xi: &[T], cfg: &MultiplicityConfig<T>) -> Complex<T> {
    let mut p = Complex::new(T::one(), T::zero());
    for j in 0..x.len() {
        p = p * kernel_i_1d(x[j] * xi[j], cfg.kappas()[j]);
    }
    p
}

fn five_point<T: Real, F: Fn(T) -> T>(f: &F, x: T, h: T) -> T {
    let two = T::lit(2.0);
    (f(x - two * h) - T::lit(8.0) * f(x - h) + T::lit(8.0) * f(x + h) - f(x + two * h)) / (T::lit(12.0) * h)
}

/// First derivative by a 5-point central difference, step chosen from the scale of x.
pub fn central_derivative<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<T> {
    let scale = T::one().max(x.abs());
    let h = T::lit(1e-3) * scale;
    if x + h == x {
        return Err(Error::StepUnderflow(x.as_f64()));
    }
    let d1 = five_point(f, x, h);
    let d2 = five_point(f, x, h * T::lit(0.5));
    // Richardson on the h^4 term
    Ok(d2 + (d2 - d1) / T::lit(15.0))
}

/// Df(x) = f'(x) + κ (f(x) - f(-x))/x. Near 0 the difference quotient is
/// replaced by its symmetric-difference limit.
pub fn dunkl_derivative<T: Real, F: Fn(T) -> T>(f: F, x: T, cfg: &MultiplicityConfig<T>) -> Result<T> {
    let fp = central_derivative(&f, x)?;
    Ok(fp + reflection_term(&f, x, cfg.kappa()))
}

/// Same as [`dunkl_derivative`] with an analytic derivative.
pub fn dunkl_derivative_with<T: Real, F: Fn(T) -> T, G: Fn(T) -> T>(
    f: F,
    fprime: G,
    x: T,
    cfg: &MultiplicityConfig<T>,
) -> T {
    fprime(x) + reflection_term(&f, x, cfg.kappa())
}

fn reflection_term<T: Real, F: Fn(T) -> T>(f: &F, x: T, kappa: T) -> T {
    if kappa == T::zero() {
        return T::zero();
    }
    if x.abs() < T::lit(1e-6) {
        let h = T::lit(1e-3);
        let q = |h: T| (f(h) - f(-h)) / h;
        let q1 = q(h);
        let q2 = q(h * T::lit(0.5));
        kappa * (q2 + (q2 - q1) / T::lit(3.0))
    } else {
        kappa * (f(x) - f(-x)) / x
    }
}
