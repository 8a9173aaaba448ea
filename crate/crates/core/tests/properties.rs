//! Property tests for the invariants of each layer.

use std::f64::consts::PI;

use nlfourier::approx::{best_approx_error, verify_lebesgue_lp_bound, Prepared, VerifyOptions};
use nlfourier::bernstein::{bernstein_constant, differentiate, random_polynomial, verify_bernstein, bernstein_grid};
use nlfourier::corpus;
use nlfourier::kernels;
use nlfourier::numerics::{
    lp_norm, lp_norm_with, modulus_smoothness, quad_periodic, sup_norm, warp_signal, GridSpec,
    Signal,
};
use nlfourier::transform::{
    analyze, average_partial_sums, cesaro_mean, partial_sum, required_points, synthesize,
    CoeffVector, KernelQuadrature, NlPolynomial, Operator, Representation,
};
use nlfourier::{Complex64, PhaseParam};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn param() -> impl Strategy<Value = PhaseParam> {
    (0.0f64..0.95, -PI..PI).prop_map(|(r, t)| PhaseParam::new(r, t).unwrap())
}

fn moderate_param() -> impl Strategy<Value = PhaseParam> {
    (0.0f64..0.7, -PI..PI).prop_map(|(r, t)| PhaseParam::new(r, t).unwrap())
}

fn coeffs(max_n: usize) -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
    (0..=max_n).prop_flat_map(|n| (Just(n), prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * n + 1)))
}

fn poly(a: PhaseParam, c: &[(f64, f64)]) -> NlPolynomial {
    let v = c.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    NlPolynomial::new(CoeffVector::new(a, v).unwrap())
}

fn smooth_signal(i: usize, a: PhaseParam) -> Signal {
    let names = ["analytic-exp-cos", "cos-warped:k=2", "random-trig:deg=3", "random-trig:deg=5"];
    corpus::builtin(names[i % names.len()], a, 7).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_is_increasing(a in param(), t1 in -10.0f64..10.0, d in 1e-6f64..(2.0 * PI - 1e-6)) {
        prop_assert!(a.theta(t1) < a.theta(t1 + d));
    }

    #[test]
    fn phase_lift_is_periodic(a in param(), t in -PI..PI, k in -5i32..=5) {
        let shift = 2.0 * PI * k as f64;
        prop_assert!((a.theta(t + shift) - (a.theta(t) + shift)).abs() < 1e-12);
    }

    #[test]
    fn phase_derivative_is_poisson_weight(a in param(), t in -PI..PI) {
        let h = 1e-5;
        let fd = (a.theta(t + h) - a.theta(t - h)) / (2.0 * h);
        let w = a.poisson_weight(t);
        // third derivative of θ is at most of order distortion^3
        let c = a.distortion().powi(3);
        prop_assert!((fd - w).abs() <= c * h * h + 1e-9 * w);
    }

    #[test]
    fn phase_inverse_round_trip(a in param(), t in -PI..PI) {
        prop_assert!((a.theta_inv(a.theta(t)) - t).abs() < 1e-10);
    }

    #[test]
    fn poisson_weight_has_unit_mean(a in param()) {
        let g = GridSpec::pow2(required_points(&a, 0));
        let m = quad_periodic(|t| Complex64::new(a.poisson_weight(t), 0.0), &g).unwrap();
        prop_assert!((m.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernels_even_and_fejer_nonnegative(n in 0usize..300, t in -PI..PI) {
        prop_assert_eq!(kernels::dirichlet(n, -t), kernels::dirichlet(n, t));
        prop_assert_eq!(kernels::fejer(n, -t), kernels::fejer(n, t));
        prop_assert!(kernels::fejer(n, t) >= 0.0);
    }

    #[test]
    fn kernels_reproduce_constants(n in 0usize..200) {
        let g = GridSpec::pow2(4 * n + 64);
        let d = quad_periodic(|t| Complex64::new(2.0 * kernels::dirichlet(n, t), 0.0), &g).unwrap();
        let f = quad_periodic(|t| Complex64::new(2.0 * kernels::fejer(n, t), 0.0), &g).unwrap();
        prop_assert!((d.re - 1.0).abs() < 1e-10);
        prop_assert!((f.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_exact_on_band_limited((_n, c) in coeffs(20), shift in -PI..PI) {
        let g = GridSpec::new(64).unwrap().with_offset(shift);
        let z = PhaseParam::zero();
        let t = poly(z, &c);
        let q = quad_periodic(|x| t.eval(x), &g).unwrap();
        prop_assert!((q - t.coeffs().get(0)).norm() < 1e-13);
    }

    #[test]
    fn norms_increase_with_p(i in 0usize..4, a in moderate_param()) {
        let f = smooth_signal(i, a);
        let g = GridSpec::new(2048).unwrap();
        let ns: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 6.0, f64::INFINITY]
            .iter()
            .map(|&p| lp_norm(&f, p, &g).unwrap())
            .collect();
        for w in ns.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn warp_preserves_sup_norm(i in 0usize..4, a in param()) {
        let f = smooth_signal(i, a);
        let big = warp_signal(&f, &a);
        let g = GridSpec::pow2(8 * required_points(&a, 8));
        let nf = sup_norm(&f, &g).unwrap().value;
        let nb = sup_norm(&big, &g).unwrap().value;
        prop_assert!((nf - nb).abs() < 1e-10 * (1.0 + nf));
    }

    #[test]
    fn modulus_sandwich_on_generators(i in 0usize..6, a in param(), t in 0.01f64..PI) {
        let names = ["square", "sawtooth", "abs-sin", "holder:alpha=0.75", "analytic-exp-cos", "random-trig:deg=5"];
        let f = corpus::builtin(names[i], a, 3).unwrap();
        let big = warp_signal(&f, &a);
        let g = GridSpec::new(1024).unwrap();
        let wf = modulus_smoothness(&f, t, f64::INFINITY, &g, 32).unwrap();
        let wb = modulus_smoothness(&big, t, f64::INFINITY, &g, 32).unwrap();
        let r = a.modulus();
        prop_assert!((1.0 - r) / 2.0 * wf <= wb * (1.0 + 1e-9));
        prop_assert!(wb <= 2.0 / (1.0 - r) * wf * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partial_sum_is_idempotent(i in 0usize..4, a in moderate_param(), n in 1usize..12) {
        let f = smooth_signal(i, a);
        let g = GridSpec::new(4096).unwrap();
        let s = partial_sum(&f, &a, n, Representation::Coefficient, &g).unwrap();
        let c1 = analyze(&s, &a, n, &g).unwrap();
        let c0 = analyze(&f, &a, n, &g).unwrap();
        prop_assert!(c1.max_abs_diff(&c0) < 1e-9);
        let ss = partial_sum(&s, &a, n, Representation::Coefficient, &g).unwrap();
        for j in 0..16 {
            let x = -PI + j as f64 * 0.39;
            prop_assert!((ss.eval(x) - s.eval(x)).norm() < 1e-9);
        }
    }

    #[test]
    fn analysis_is_linear(a in moderate_param(), wa in -2.0f64..2.0, wb in -2.0f64..2.0, n in 0usize..16) {
        let f = corpus::analytic_exp_cos();
        let h = corpus::abs_sin();
        let g = GridSpec::new(2048).unwrap();
        let (ca, cb) = (Complex64::new(wa, 0.0), Complex64::new(0.0, wb));
        let comb = Signal::linear_combination(ca, &f, cb, &h);
        let lhs = analyze(&comb, &a, n, &g).unwrap();
        let rhs = analyze(&f, &a, n, &g).unwrap().scaled(ca).added(&analyze(&h, &a, n, &g).unwrap().scaled(cb));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn cesaro_average_is_triangular((n, c) in coeffs(16), a in param()) {
        let cv = poly(a, &c).coeffs().clone();
        let avg = average_partial_sums(&cv, n);
        let tri = cv.fejer_weighted(n);
        prop_assert!(avg.max_abs_diff(&tri) < 1e-14);
        for k in -(n as i64)..=n as i64 {
            let w = 1.0 - k.unsigned_abs() as f64 / (n as f64 + 1.0);
            prop_assert!((tri.get(k) - cv.get(k) * w).norm() <= 1e-15 * (1.0 + cv.get(k).norm()));
        }
    }

    #[test]
    fn frame_bounds_hold((n, c) in coeffs(10), a in param()) {
        let t = poly(a, &c);
        let (lo, hi) = a.riesz_bounds();
        let g = GridSpec::pow2(4 * required_points(&a, n));
        let norm = lp_norm_with(|x| synthesize(&t, x), 2.0, &g).unwrap();
        let c2 = t.coeffs().l2_norm();
        prop_assert!(lo * c2 <= norm * (1.0 + 1e-9));
        prop_assert!(norm <= hi * c2 * (1.0 + 1e-9));
    }

    #[test]
    fn representations_agree(i in 0usize..4, a in moderate_param(), n in 0usize..20, x in -PI..PI) {
        let f = smooth_signal(i, a);
        let g = GridSpec::pow2(2 * required_points(&a, 32).max(1024));
        let kq = KernelQuadrature::new(&f, &a, &g).unwrap();
        for op in [Operator::PartialSum, Operator::Cesaro] {
            let s = match op {
                Operator::PartialSum => partial_sum(&f, &a, n, Representation::Coefficient, &g).unwrap(),
                Operator::Cesaro => cesaro_mean(&f, &a, n, Representation::Coefficient, &g).unwrap(),
            };
            let v = s.eval(x);
            for rep in [Representation::KernelWarped, Representation::KernelDirect, Representation::KernelHalfRange] {
                prop_assert!((kq.evaluate(op, rep, n, x).unwrap() - v).norm() < 1e-8);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn best_error_nonincreasing_in_n(i in 0usize..3, a in moderate_param(), p in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY])) {
        let names = ["abs-sin", "holder:alpha=0.75", "analytic-exp-cos"];
        let f = corpus::builtin(names[i], a, 1).unwrap();
        let g = GridSpec::new(4096).unwrap();
        let mut prev = f64::INFINITY;
        for n in [1usize, 2, 4, 8] {
            let e = best_approx_error(&f, &a, n, p, &g).unwrap().error;
            prop_assert!(e <= prev * (1.0 + 1e-6) + 1e-12, "n={} {} > {}", n, e, prev);
            prev = e;
        }
    }

    #[test]
    fn sup_best_approximation_is_warp_invariant(a in moderate_param(), n in 1usize..10) {
        let f = corpus::abs_sin();
        let g = GridSpec::new(4096).unwrap();
        let warped = best_approx_error(&f, &a, n, f64::INFINITY, &g).unwrap();
        let classical = best_approx_error(&warp_signal(&f, &a), &PhaseParam::zero(), n, f64::INFINITY, &g).unwrap();
        prop_assert!((warped.error - classical.error).abs() <= 1e-7 * classical.error);
    }

    #[test]
    fn operator_ratios_stay_below_lp_constant(i in 0usize..16, a in param(), p in 1.1f64..6.0) {
        let f = corpus::corpus(a, 5).swap_remove(i);
        let prep = Prepared::new(&f, &a, &GridSpec::pow2(8 * required_points(&a, 64))).unwrap();
        for n in [2usize, 8, 32] {
            let r = verify_lebesgue_lp_bound(&prep, n, p, &VerifyOptions::default()).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn derivative_matches_closed_form((_n, c) in coeffs(8), a in moderate_param()) {
        let t = poly(a, &c);
        let d = differentiate(&t);
        let g = GridSpec::new(64).unwrap();
        for x in g.nodes() {
            let closed: Complex64 = t.coeffs().iter()
                .map(|(k, ck)| Complex64::new(0.0, k as f64) * ck * Complex64::from_polar(1.0, k as f64 * a.theta(x)))
                .sum::<Complex64>() * a.poisson_weight(x);
            prop_assert!((d.eval(x) - closed).norm() < 1e-10 * (1.0 + closed.norm()));
        }
    }

    #[test]
    fn bernstein_pass_is_scale_invariant(seed in 0u64..1000, a in param(), n in 1usize..24, lambda in 0.01f64..100.0, p in 1.0f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_polynomial(a, n, &mut rng);
        let scaled = NlPolynomial::new(t.coeffs().scaled(Complex64::new(-lambda, 0.3)));
        let g = bernstein_grid(&a, n);
        let r1 = verify_bernstein(&t, p, &g).unwrap();
        let r2 = verify_bernstein(&scaled, p, &g).unwrap();
        prop_assert_eq!(r1.pass, r2.pass);
        prop_assert!((r1.ratio - r2.ratio).abs() < 1e-10 * r1.ratio);
        prop_assert!(r1.pass);
        if a.is_zero() {
            prop_assert!(r1.ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn bernstein_constant_increases(n in 1usize..100, r in 0.0f64..0.9, p in 1.0f64..8.0) {
        let a = PhaseParam::real(r).unwrap();
        let b = PhaseParam::real(r + 0.05).unwrap();
        prop_assert!(bernstein_constant(&a, n + 1, p) > bernstein_constant(&a, n, p));
        prop_assert!(bernstein_constant(&b, n, p) > bernstein_constant(&a, n, p));
    }
}
