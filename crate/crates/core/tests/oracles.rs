//! Library values against independently computed references.

use std::f64::consts::PI;

use dunklkit::dunkl_core::{ball_measure, dunkl_kernel, dunkl_kernel_i, MultiplicityConfig};
use dunklkit::numerics::{gamma, gauss_2f1, QuadratureSpec};
use dunklkit::poisson::{conjugate_kernel, heat_kernel, poisson_kernel};
use dunklkit::riesz::{phi0_example, riesz_kernel, riesz_size_ratios, truncated_riesz};
use dunklkit::spaces::{bmo_norm, BallFamily, Profile};
use dunklkit::transform::transform_point;
use dunklkit::RealFunction;

fn cfg(k: f64) -> MultiplicityConfig<f64> {
    MultiplicityConfig::rank_one(k).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Plain power series of ₂F₁, |z| < 1.
fn hyp_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for n in 0..10_000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Σ (xy)^n / b_n with b_{2m} = 4^m m! (κ+½)_m, b_{2m+1} = b_{2m} 2(κ+½+m).
fn dunkl_series(z: f64, k: f64) -> f64 {
    let (mut sum, mut b, mut zn) = (0.0, 1.0, 1.0);
    for n in 0..400 {
        sum += zn / b;
        let m = (n / 2) as f64;
        b *= if n % 2 == 0 { 2.0 * (k + 0.5 + m) } else { 2.0 * (m + 1.0) };
        zn *= z;
        if n > 4 && (zn / b).abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn c_kappa(k: f64) -> f64 {
    1.0 / (2f64.powf(k + 0.5) * libm_gamma(k + 0.5))
}

/// Γ on a half-integer or integer grid.
fn libm_gamma(x: f64) -> f64 {
    let (mut v, mut y) = (1.0, x);
    while y > 1.0 + 1e-9 {
        y -= 1.0;
        v *= y;
    }
    if (y - 0.5).abs() < 1e-12 {
        v * PI.sqrt()
    } else {
        assert!((y - 1.0).abs() < 1e-12);
        v
    }
}

#[test]
fn hypergeometric_against_series() {
    for &(a, b, c) in &[(0.5, 0.5, 2.0), (1.5, 0.5, 3.0), (2.0, 1.0, 3.0), (0.3, 1.7, 2.6)] {
        for &z in &[0.0, 0.1, 0.45, 0.7, 0.9] {
            let v = gauss_2f1(a, b, c, z).unwrap();
            assert!(rel(v, hyp_series(a, b, c, z)) < 1e-12, "{} {} {} {}", a, b, c, z);
        }
    }
}

#[test]
fn hypergeometric_closed_forms() {
    for &z in &[0.05, 0.3, 0.9, 0.999, 0.999999] {
        let v = gauss_2f1(1.0, 1.0, 2.0, z).unwrap();
        assert!(rel(v, -(-z).ln_1p() / z) < 1e-11, "{}", z);
        let s: f64 = z.sqrt();
        let v = gauss_2f1(0.5, 0.5, 1.5, z).unwrap();
        assert!(rel(v, s.asin() / s) < 1e-11, "{}", z);
    }
    // near 1, against Gauss's summation with a=1/2, b=1/2, c=2: Γ(2)Γ(1)/Γ(3/2)² = 4/π
    assert!(rel(gauss_2f1(0.5, 0.5, 2.0, 1.0 - 1e-12).unwrap(), 4.0 / PI) < 1e-5);
}

#[test]
fn dunkl_kernel_against_series() {
    for &k in &[0.0, 0.25, 0.5, 1.0, 2.5] {
        let c = cfg(k);
        for &(x, y) in &[(0.3, 0.7), (-1.2, 2.0), (3.0, -2.5), (0.0, 5.0)] {
            // the series alternates for xy < 0, so compare on the scale of e^{|xy|}
            let s = dunkl_series(x * y, k);
            assert!((dunkl_kernel(x, y, &c) - s).abs() < 1e-13 * (x * y).abs().exp(), "κ={} x={} y={}", k, x, y);
        }
    }
    // E_0(x, y) = e^{xy}
    assert!(rel(dunkl_kernel(1.3, -0.4, &cfg(0.0)), (-0.52f64).exp()) < 1e-14);
}

#[test]
fn oscillatory_dunkl_kernel() {
    // κ = 1: E(x, iξ) = sin z / z + i (sin z - z cos z) / z², z = xξ
    let c = cfg(1.0);
    for &z in &[0.1, 1.0, 4.0, 17.0, 60.0] {
        let e = dunkl_kernel_i(z, 1.0, &c).unwrap();
        assert!((e.re - z.sin() / z).abs() < 1e-13, "{}", z);
        assert!((e.im - (z.sin() - z * z.cos()) / (z * z)).abs() < 1e-13, "{}", z);
    }
    let e = dunkl_kernel_i(2.0, 0.3, &cfg(0.0)).unwrap();
    assert!((e.re - 0.6f64.cos()).abs() < 1e-15 && (e.im - 0.6f64.sin()).abs() < 1e-15);
}

#[test]
fn normalizing_constant() {
    for &k in &[0.0, 0.5, 1.0, 1.5] {
        assert!(rel(cfg(k).c_kappa(), c_kappa(k)) < 1e-13);
    }
    assert!(rel(gamma(4.5), 11.631728396567448) < 1e-13);
}

/// Composite Simpson over [0, b].
fn simpson<F: Fn(f64) -> f64>(f: F, b: f64, n: usize) -> f64 {
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn kernels_against_spectral_integrals() {
    // P = c ∫ e^{-x0|ξ|} E(ix,ξ) E(-it,ξ) |ξ|^{2κ} dξ and Q with the extra -i sgn ξ, at κ = 1
    let k = 1.0;
    let c = cfg(k);
    let e = |z: f64| -> (f64, f64) {
        if z.abs() < 1e-4 {
            (1.0 - z * z / 6.0, z / 3.0)
        } else {
            (z.sin() / z, (z.sin() - z * z.cos()) / (z * z))
        }
    };
    let ck = c_kappa(k);
    for &(x0, x, t) in &[(1.0, 0.5, -0.3), (1.0, 2.0, 1.5), (1.5, -1.0, 2.0), (0.8, 0.0, 1.0)] {
        let pv = simpson(
            |s| {
                let (a, b) = (e(x * s), e(t * s));
                2.0 * ck * (-x0 * s).exp() * (a.0 * b.0 + a.1 * b.1) * s * s
            },
            50.0 / x0,
            40_000,
        );
        let qv = simpson(
            |s| {
                let (a, b) = (e(x * s), e(t * s));
                2.0 * ck * (-x0 * s).exp() * (a.1 * b.0 - a.0 * b.1) * s * s
            },
            50.0 / x0,
            40_000,
        );
        let p = poisson_kernel(x0, x, t, &c).unwrap();
        let q = conjugate_kernel(x0, x, t, &c).unwrap();
        assert!(rel(p, pv) < 1e-9, "P {} {} {}: {} vs {}", x0, x, t, p, pv);
        assert!((q - qv).abs() < 1e-9 * p.abs(), "Q {} {} {}: {} vs {}", x0, x, t, q, qv);
    }
}

#[test]
fn classical_kernels_at_kappa_zero() {
    let c = cfg(0.0);
    let ck = c.c_kappa();
    for &(x0, x, t) in &[(1.0, 0.5, -0.3), (0.1, 2.0, 1.5), (3.0, -1.0, 2.0)] {
        let d = x0 * x0 + (x - t) * (x - t);
        assert!(rel(ck * poisson_kernel(x0, x, t, &c).unwrap(), x0 / (PI * d)) < 1e-13);
        assert!(rel(ck * conjugate_kernel(x0, x, t, &c).unwrap(), (x - t) / (PI * d)) < 1e-13);
        assert!(rel(ck * riesz_kernel(x, t, &c).unwrap().value, 1.0 / (PI * (x - t))) < 1e-13);
        let v = x0;
        let h = ck * heat_kernel(v, x, t, &c).unwrap();
        let g = (-(x - t).powi(2) / (4.0 * v)).exp() / (4.0 * PI * v).sqrt();
        assert!(rel(h, g) < 1e-12, "{} {}", h, g);
    }
}

#[test]
fn truncated_hilbert_transform() {
    let c = cfg(0.0);
    let spec = QuadratureSpec::new(1e-13, 1e-12);
    let v = truncated_riesz(&RealFunction::indicator(-1.0, 1.0), 0.1, 2.0, &c, &spec).unwrap();
    assert!((v - 3f64.ln() / PI).abs() < 1e-11, "{}", v);
    // inside the support the orbit truncation removes holes around both 0.5 and -0.5
    let v = truncated_riesz(&RealFunction::indicator(-1.0, 1.0), 0.05, 0.5, &c, &spec).unwrap();
    let e = (3f64.ln() - (1.05f64 / 0.95).ln()) / PI;
    assert!((v - e).abs() < 1e-11, "{} {}", v, e);
}

#[test]
fn gaussian_is_transform_eigenfunction() {
    let spec = QuadratureSpec::new(1e-13, 1e-12);
    for &k in &[0.0, 0.5, 1.7] {
        let c = cfg(k);
        for &xi in &[0.0, 0.7, 2.5] {
            let v = transform_point(&RealFunction::gaussian(), xi, &c, &spec).unwrap();
            assert!((v.re - (-xi * xi / 2.0).exp()).abs() < 1e-10 && v.im.abs() < 1e-12, "κ={} ξ={}", k, xi);
        }
    }
}

#[test]
fn ball_measure_closed_form() {
    // |B(0, r)| = 2 r^{2κ+1}/(2κ+1); at κ = 1, |B(c, r)| = ∫ t² dt
    assert!(rel(ball_measure(0.0, 2.0, &cfg(0.5)).unwrap(), 4.0) < 1e-14);
    let cube = |t: f64| t * t * t / 3.0;
    assert!(rel(ball_measure(1.0, 0.5, &cfg(1.0)).unwrap(), cube(1.5) - cube(0.5)) < 1e-13);
    assert!(rel(ball_measure(0.5, 2.0, &cfg(1.0)).unwrap(), cube(2.5) - cube(-1.5)) < 1e-13);
}

#[test]
fn phi0_lower_bound() {
    let spec = QuadratureSpec::new(1e-12, 1e-10);
    for &k in &[0.0, 0.5, 1.0, 2.0] {
        let c = cfg(k);
        let mut prev = f64::NEG_INFINITY;
        for &x in &[1.5, 1.1, 1.01, 1.001, 1.0001] {
            let p = phi0_example(x, &c, &spec).unwrap();
            assert!(p.value >= p.lower_bound, "κ={} x={}: {} < {}", k, x, p.value, p.lower_bound);
            assert!(p.value > prev);
            prev = p.value;
        }
    }
    // κ = 0: (1/π) ln((x+1)/(x-1))
    let p = phi0_example(1.01, &cfg(0.0), &spec).unwrap();
    assert!(rel(p.value, (2.01f64 / 0.01).ln() / PI) < 1e-10);
}

/// (1/|I|) ∫_I |log|x| - mean| dx from the antiderivative x ln|x| - x.
fn log_oscillation(a: f64, b: f64) -> f64 {
    let big_f = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() - x };
    let m = (big_f(b) - big_f(a)) / (b - a);
    let e = m.exp();
    let mut cuts = vec![a, b, 0.0, e, -e];
    cuts.retain(|c| *c >= a && *c <= b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut s = 0.0;
    for w in cuts.windows(2) {
        let sign = if (0.5 * (w[0] + w[1])).abs().ln() >= m { 1.0 } else { -1.0 };
        s += sign * ((big_f(w[1]) - big_f(w[0])) - m * (w[1] - w[0]));
    }
    s / (b - a)
}

#[test]
fn bmo_of_log_at_kappa_zero() {
    let fam = BallFamily::dyadic(2.0, 3, -3, 0).unwrap();
    let oracle = fam.balls.iter().map(|b| log_oscillation(b.center - b.radius, b.center + b.radius)).fold(0.0, f64::max);
    let prof = Profile::from_function(&RealFunction::log_abs(), fam.extent());
    let rep = bmo_norm(&prof, &fam, &cfg(0.0)).unwrap();
    assert!(rel(rep.value, oracle) < 1e-3, "{} vs {}", rep.value, oracle);
}

#[test]
fn upper_size_ratio_degrades_near_reflection() {
    // near t = -x the kernel grows like log(1/|x+t|) while the upper expression stays bounded
    let c = cfg(0.5);
    let ratios: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8].iter().map(|h| riesz_size_ratios(1.0, -1.0 + h, &c).unwrap().upper).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{:?}", ratios);
    let slope: Vec<f64> = ratios.windows(2).map(|w| 1.0 / w[1] - 1.0 / w[0]).collect();
    // equal increments of 1/ratio per decade pair: logarithmic growth
    assert!(slope.windows(2).all(|w| rel(w[1], w[0]) < 0.05), "{:?}", slope);
}
