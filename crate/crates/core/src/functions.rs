//! Analytic real functions on the line with the metadata the quadrature
//! routines need (breakpoints, support, parity).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dunkl_core::MultiplicityConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    None,
}

type Fun = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct RealFunction {
    f: Fun,
    /// Points where the function is not smooth.
    pub breakpoints: Vec<f64>,
    /// Closed interval outside of which the function vanishes.
    pub support: Option<(f64, f64)>,
    pub parity: Parity,
    /// Known bound on |f|, if any.
    pub sup_bound: Option<f64>,
    pub name: String,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .field("support", &self.support)
            .field("parity", &self.parity)
            .finish()
    }
}

impl RealFunction {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: &str, f: F) -> Self {
        RealFunction {
            f: Arc::new(f),
            breakpoints: Vec::new(),
            support: None,
            parity: Parity::None,
            sup_bound: None,
            name: name.to_string(),
        }
    }

    pub fn with_breakpoints(mut self, b: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(b);
        self.breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        self.breakpoints.dedup();
        self
    }

    pub fn with_support(mut self, a: f64, b: f64) -> Self {
        self.support = Some((a, b));
        self.with_breakpoints(&[a, b])
    }

    pub fn with_parity(mut self, p: Parity) -> Self {
        self.parity = p;
        self
    }

    pub fn with_sup_bound(mut self, s: f64) -> Self {
        self.sup_bound = Some(s);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if let Some((a, b)) = self.support {
            if x < a || x > b {
                return 0.0;
            }
        }
        (self.f)(x)
    }

    pub fn even_part(&self, x: f64) -> f64 {
        match self.parity {
            Parity::Even => self.eval(x),
            Parity::Odd => 0.0,
            Parity::None => 0.5 * (self.eval(x) + self.eval(-x)),
        }
    }

    pub fn odd_part(&self, x: f64) -> f64 {
        match self.parity {
            Parity::Even => 0.0,
            Parity::Odd => self.eval(x),
            Parity::None => 0.5 * (self.eval(x) - self.eval(-x)),
        }
    }

    /// Breakpoints with their mirror images (needed once even/odd parts are taken).
    pub fn symmetric_breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.breakpoints.iter().flat_map(|&b| [b, -b]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// Largest |x| in the support, if bounded.
    pub fn support_radius(&self) -> Option<f64> {
        self.support.map(|(a, b)| a.abs().max(b.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        let g = self.f.clone();
        let mut out = self.clone();
        out.f = Arc::new(move |x| c * g(x));
        out.sup_bound = self.sup_bound.map(|s| s * c.abs());
        out.name = format!("{}*{}", c, self.name);
        out
    }

    /// Linear combination a f + b g.
    pub fn combine(a: f64, f: &RealFunction, b: f64, g: &RealFunction) -> Self {
        let (ff, gg) = (f.clone(), g.clone());
        let parity = if f.parity == g.parity { f.parity } else { Parity::None };
        let support = match (f.support, g.support) {
            (Some((a1, b1)), Some((a2, b2))) => Some((a1.min(a2), b1.max(b2))),
            _ => None,
        };
        let mut out = RealFunction::new(&format!("{}*{}+{}*{}", a, f.name, b, g.name), move |x| {
            a * ff.eval(x) + b * gg.eval(x)
        })
        .with_breakpoints(&f.breakpoints)
        .with_breakpoints(&g.breakpoints)
        .with_parity(parity);
        out.support = support;
        if let (Some(s1), Some(s2)) = (f.sup_bound, g.sup_bound) {
            out.sup_bound = Some(a.abs() * s1 + b.abs() * s2);
        }
        out
    }

    /// e^{-x²/2}
    pub fn gaussian() -> Self {
        RealFunction::new("gaussian", |x| (-0.5 * x * x).exp()).with_parity(Parity::Even).with_sup_bound(1.0)
    }

    /// e^{-x²/(2s²)} centred at c.
    pub fn shifted_gaussian(c: f64, s: f64) -> Self {
        let p = if c == 0.0 { Parity::Even } else { Parity::None };
        RealFunction::new(&format!("gaussian({},{})", c, s), move |x| (-0.5 * ((x - c) / s).powi(2)).exp())
            .with_parity(p)
            .with_sup_bound(1.0)
    }

    /// Smooth bump exp(1 - 1/(1 - ((x-c)/r)²)) supported on [c-r, c+r], peak 1.
    pub fn bump(c: f64, r: f64) -> Self {
        let p = if c == 0.0 { Parity::Even } else { Parity::None };
        RealFunction::new(&format!("bump({},{})", c, r), move |x| {
            let u = (x - c) / r;
            let q = 1.0 - u * u;
            if q <= 0.0 {
                0.0
            } else {
                (1.0 - 1.0 / q).exp()
            }
        })
        .with_support(c - r, c + r)
        .with_parity(p)
        .with_sup_bound(1.0)
    }

    /// x e^{-x²/2}
    pub fn odd_gaussian() -> Self {
        RealFunction::new("odd-gaussian", |x| x * (-0.5 * x * x).exp())
            .with_parity(Parity::Odd)
            .with_sup_bound((-0.5f64).exp())
    }

    /// Indicator of [a, b].
    pub fn indicator(a: f64, b: f64) -> Self {
        let p = if a == -b { Parity::Even } else { Parity::None };
        RealFunction::new(&format!("chi[{},{}]", a, b), move |x| if x >= a && x <= b { 1.0 } else { 0.0 })
            .with_support(a, b)
            .with_parity(p)
            .with_sup_bound(1.0)
    }

    pub fn sign() -> Self {
        RealFunction::new("sign", |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 })
            .with_breakpoints(&[0.0])
            .with_parity(Parity::Odd)
            .with_sup_bound(1.0)
    }

    pub fn constant(c: f64) -> Self {
        RealFunction::new(&format!("const({})", c), move |_| c).with_parity(Parity::Even).with_sup_bound(c.abs())
    }

    /// ln|x| (unbounded at 0).
    pub fn log_abs() -> Self {
        RealFunction::new("log-abs", |x: f64| x.abs().ln()).with_breakpoints(&[0.0]).with_parity(Parity::Even)
    }

    /// P_{x0}(x) = c_{1,κ} x0/(x0² + x²)^{κ+1}.
    pub fn poisson(x0: f64, cfg: &MultiplicityConfig<f64>) -> Self {
        let m = cfg.m_kappa();
        let k = cfg.kappa();
        RealFunction::new(&format!("poisson({})", x0), move |x| m * x0 / (x0 * x0 + x * x).powf(k + 1.0))
            .with_parity(Parity::Even)
            .with_sup_bound(m * x0.powf(-2.0 * k - 1.0))
    }

    /// Q_{x0}(x) = c_{1,κ} x/(x0² + x²)^{κ+1}.
    pub fn conjugate_poisson(x0: f64, cfg: &MultiplicityConfig<f64>) -> Self {
        let m = cfg.m_kappa();
        let k = cfg.kappa();
        RealFunction::new(&format!("conj-poisson({})", x0), move |x| m * x / (x0 * x0 + x * x).powf(k + 1.0))
            .with_parity(Parity::Odd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_and_support() {
        let f = RealFunction::shifted_gaussian(1.0, 1.0);
        let x = 0.7;
        assert!((f.even_part(x) + f.odd_part(x) - f.eval(x)).abs() < 1e-15);
        let b = RealFunction::bump(0.0, 2.0);
        assert_eq!(b.eval(2.5), 0.0);
        assert_eq!(b.eval(0.0), 1.0);
        assert_eq!(b.support_radius(), Some(2.0));
        let s = RealFunction::sign();
        assert_eq!(s.even_part(3.0), 0.0);
        let c = RealFunction::combine(2.0, &RealFunction::indicator(-1.0, 1.0), -1.0, &RealFunction::constant(1.0));
        assert_eq!(c.eval(0.0), 1.0);
        assert_eq!(c.eval(3.0), -1.0);
        assert_eq!(c.sup_bound, Some(3.0));
    }
}
