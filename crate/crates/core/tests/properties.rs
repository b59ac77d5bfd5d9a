use proptest::prelude::*;

use dunklkit::dunkl_core::{ball_measure, dunkl_kernel, dunkl_kernel_i, orbit_distance, MultiplicityConfig};
use dunklkit::numerics::gauss_2f1;
use dunklkit::poisson::{conjugate_kernel, poisson_kernel, poisson_size_ratios};
use dunklkit::riesz::{riesz_kernel, riesz_size_ratios};
use dunklkit::spaces::{bmo_norm, BallFamily, Profile};

fn cfg(k: f64) -> MultiplicityConfig<f64> {
    MultiplicityConfig::rank_one(k).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn kappa() -> impl Strategy<Value = f64> {
    0.0..3.0f64
}

/// A pair (x, t) kept off the diagonal and off the reflection t = -x.
fn pair() -> impl Strategy<Value = (f64, f64)> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_filter("away from d = 0", |(x, t)| orbit_distance(*x, *t) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn riesz_kernel_antisymmetric(k in kappa(), (x, t) in pair()) {
        let c = cfg(k);
        let a = riesz_kernel(x, t, &c).unwrap().value;
        let b = riesz_kernel(t, x, &c).unwrap().value;
        prop_assert!(close(a, -b, 1e-10), "{} {}", a, b);
        let r = riesz_kernel(-x, -t, &c).unwrap().value;
        prop_assert!(close(a, -r, 1e-10));
    }

    #[test]
    fn riesz_kernel_homogeneous(k in kappa(), (x, t) in pair(), lam in 0.1..10.0f64) {
        let c = cfg(k);
        let a = riesz_kernel(lam * x, lam * t, &c).unwrap().value;
        let b = lam.powf(-2.0 * k - 1.0) * riesz_kernel(x, t, &c).unwrap().value;
        prop_assert!(close(a, b, 1e-9), "{} {}", a, b);
    }

    #[test]
    fn poisson_kernel_symmetries(k in kappa(), x0 in 0.01..5.0f64, x in -5.0..5.0f64, t in -5.0..5.0f64, lam in 0.1..10.0f64) {
        let c = cfg(k);
        let p = poisson_kernel(x0, x, t, &c).unwrap();
        prop_assert!(p > 0.0);
        prop_assert!(close(p, poisson_kernel(x0, t, x, &c).unwrap(), 1e-10));
        prop_assert!(close(p, poisson_kernel(x0, -x, -t, &c).unwrap(), 1e-10));
        let s = poisson_kernel(lam * x0, lam * x, lam * t, &c).unwrap();
        prop_assert!(close(s, lam.powf(-2.0 * k - 1.0) * p, 1e-9));
        let q = conjugate_kernel(x0, x, t, &c).unwrap();
        prop_assert!(close(q, -conjugate_kernel(x0, -x, -t, &c).unwrap(), 1e-10));
        prop_assert!(close(q, -conjugate_kernel(x0, t, x, &c).unwrap(), 1e-10));
    }

    #[test]
    fn hypergeometric_euler_transformation(a in 0.05..3.0f64, b in 0.05..3.0f64, dc in 0.1..3.0f64, z in 0.0..0.95f64) {
        let c = a.max(b) + dc;
        let lhs = gauss_2f1(a, b, c, z).unwrap();
        let rhs = (1.0 - z).powf(c - a - b) * gauss_2f1(c - a, c - b, c, z).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{} {}", lhs, rhs);
    }

    #[test]
    fn dunkl_kernel_symmetries(k in kappa(), x in -4.0..4.0f64, y in -4.0..4.0f64, lam in 0.2..2.0f64) {
        let c = cfg(k);
        let e = dunkl_kernel(x, y, &c);
        prop_assert!(e > 0.0);
        prop_assert!(close(e, dunkl_kernel(y, x, &c), 1e-12));
        prop_assert!(close(dunkl_kernel(lam * x, y, &c), dunkl_kernel(x, lam * y, &c), 1e-12));
        let ei = dunkl_kernel_i(x, 10.0 * y, &c).unwrap();
        prop_assert!(ei.norm() <= 1.0 + 1e-12);
        let em = dunkl_kernel_i(-x, 10.0 * y, &c).unwrap();
        prop_assert!((ei.re - em.re).abs() < 1e-12 && (ei.im + em.im).abs() < 1e-12);
    }

    #[test]
    fn ball_measure_scaling(k in kappa(), center in -5.0..5.0f64, r in 0.01..5.0f64, lam in 0.1..10.0f64) {
        let c = cfg(k);
        let a = ball_measure(lam * center, lam * r, &c).unwrap();
        let b = lam.powf(2.0 * k + 1.0) * ball_measure(center, r, &c).unwrap();
        prop_assert!(close(a, b, 1e-10));
        prop_assert!(close(ball_measure(-center, r, &c).unwrap(), ball_measure(center, r, &c).unwrap(), 1e-12));
        prop_assert!(ball_measure(center, 2.0 * r, &c).unwrap() > ball_measure(center, r, &c).unwrap());
    }

    #[test]
    fn orbit_distance_bounds(x in -10.0..10.0f64, t in -10.0..10.0f64) {
        let d = orbit_distance(x, t);
        prop_assert!(d >= 0.0 && d <= (x - t).abs() && d <= (x + t).abs());
        prop_assert!(d == (x - t).abs() || d == (x + t).abs());
    }

    #[test]
    fn size_ratios_positive_finite(k in kappa(), (x, t) in pair(), x0 in 0.01..3.0f64) {
        let c = cfg(k);
        let r = riesz_size_ratios(x, t, &c).unwrap();
        prop_assert!(r.lower > 0.0 && r.lower.is_finite() && r.upper > 0.0 && r.upper.is_finite());
        let p = poisson_size_ratios(x0, x, t, &c).unwrap();
        prop_assert!(p.lower > 0.0 && p.lower.is_finite() && p.upper > 0.0 && p.upper.is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bmo_affine_invariance(k in 0.0..2.0f64, a in -3.0..3.0f64, b in -3.0..3.0f64, s in 0.3..2.0f64) {
        prop_assume!(a.abs() > 0.05);
        let c = cfg(k);
        let fam = BallFamily::dyadic(1.0, 1, -1, 0).unwrap();
        let f = Profile::new("g", fam.extent(), &[], move |x| (-(x - 0.2) * (x - 0.2) / s).exp());
        let g = Profile::new("ag+b", fam.extent(), &[], move |x| a * (-(x - 0.2) * (x - 0.2) / s).exp() + b);
        let nf = bmo_norm(&f, &fam, &c).unwrap().value;
        let ng = bmo_norm(&g, &fam, &c).unwrap().value;
        prop_assert!(close(ng, a.abs() * nf, 1e-6), "{} {}", ng, a.abs() * nf);
    }
}
