use num_complex::Complex64;
use proptest::prelude::*;
use regvar::haar::{
    character_eval, fourier_of_pullback, fourier_popa, haar_integrate, haar_interval_measure,
    mellin_popa, popa_convolution, pullback_f_rho, Interval,
};
use regvar::popa::{circle, from_log_scale, to_log_scale};
use regvar::{PopaParam, PopaPoint, QuadratureSpec};
use statrs::function::gamma::gamma;

fn param() -> impl Strategy<Value = PopaParam> {
    prop_oneof![
        Just(PopaParam::Zero),
        Just(PopaParam::Infinity),
        (1e-3f64..50.0).prop_map(PopaParam::Finite),
    ]
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// `exp(-1 / (1 - w^2))` on `|w| < 1`.
fn bump(w: f64) -> f64 {
    if w.abs() < 1.0 {
        (-1.0 / (1.0 - w * w)).exp()
    } else {
        0.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn measure_is_translation_invariant(
        p in param(),
        w_lo in -2.0f64..4.0,
        width in 1e-2f64..3.0,
        w_g in -2.0f64..4.0,
    ) {
        let lo = from_log_scale(p, w_lo).unwrap();
        let hi = from_log_scale(p, w_lo + width).unwrap();
        prop_assume!(lo < hi);
        let iv = Interval::new(lo, hi, p).unwrap();
        let g = PopaPoint::new(p, from_log_scale(p, w_g).unwrap()).unwrap();
        let moved = iv.translate(&g).unwrap();
        let (a, b) = (haar_interval_measure(&iv), haar_interval_measure(&moved));
        prop_assert!(rel_close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn characters_are_multiplicative(
        p in param(),
        gamma in -20.0f64..20.0,
        wu in -4.0f64..4.0,
        wv in -4.0f64..4.0,
    ) {
        let u = PopaPoint::new(p, from_log_scale(p, wu).unwrap()).unwrap();
        let v = PopaPoint::new(p, from_log_scale(p, wv).unwrap()).unwrap();
        let uv = circle(&u, &v).unwrap().value();
        let l = character_eval(p, gamma, uv).unwrap();
        let r = character_eval(p, gamma, u.value()).unwrap() * character_eval(p, gamma, v.value()).unwrap();
        prop_assert!((l - r).norm() <= 1e-12 * (1.0 + gamma.abs() * (wu.abs() + wv.abs())));
    }
}

#[test]
fn measure_limits_at_extreme_rho() {
    let (a, b) = (0.2, 1.7);
    let small = haar_interval_measure(&Interval::new(a, b, PopaParam::Finite(1e-6)).unwrap());
    assert!(rel_close(small, b - a, 1e-4), "{small}");
    let big = haar_interval_measure(&Interval::new(a, b, PopaParam::Finite(1e6)).unwrap());
    let log_ratio = (b / a).ln();
    assert!(rel_close(big, log_ratio, 1e-4), "{big} vs {log_ratio}");
    let inf = haar_interval_measure(&Interval::new(a, b, PopaParam::Infinity).unwrap());
    assert!(rel_close(big, inf, 1e-4));
}

#[test]
fn measure_matches_density_quadrature() {
    let q = QuadratureSpec::default();
    for p in [PopaParam::Zero, PopaParam::Finite(0.5), PopaParam::Finite(7.0), PopaParam::Infinity] {
        let iv = Interval::new(0.3, 2.9, p).unwrap();
        let exact = haar_interval_measure(&iv);
        // density (1 + rho) / (1 + rho t) integrated against Lebesgue measure
        let density = |t: f64| match p {
            PopaParam::Zero => 1.0,
            PopaParam::Finite(r) => (1.0 + r) / (1.0 + r * t),
            PopaParam::Infinity => 1.0 / t,
        };
        let steps = 200_000;
        let h = (2.9 - 0.3) / steps as f64;
        let simpson: f64 = (0..=steps)
            .map(|k| {
                let w = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                w * density(0.3 + h * k as f64)
            })
            .sum::<f64>()
            * h
            / 3.0;
        assert!(rel_close(exact, simpson, 1e-10), "{p}: {exact} vs {simpson}");
        let via_quad = haar_integrate(|_| 1.0, &iv, &q).unwrap();
        assert!(via_quad.converged && rel_close(via_quad.value, exact, 1e-12));
    }
}

#[test]
fn transform_transport_matches_ordinary_fourier() {
    let q = QuadratureSpec::default();
    for rho in [0.5, 1.0, 3.0] {
        let p = PopaParam::Finite(rho);
        let f = |t: f64| bump(to_log_scale(p, t).unwrap() - 0.3) * (1.0 + t.abs()).ln();
        let fr = pullback_f_rho(f, p).unwrap();
        let on_line = |w: f64| fr(w.exp());
        for gamma in [0.0, 0.7, 3.0, 11.0] {
            let a = fourier_popa(f, p, gamma, &q).unwrap();
            let b = fourier_popa(on_line, PopaParam::Zero, gamma, &q).unwrap();
            assert!(a.converged && b.converged);
            assert!((a.value - b.value).norm() < 1e-9, "rho {rho} gamma {gamma}");
        }
    }
}

#[test]
fn indicator_pullback_fourier() {
    let q = QuadratureSpec::default();
    let ind = |x: f64| if (1.0..=std::f64::consts::E).contains(&x) { 1.0 } else { 0.0 };
    for gamma in [0.0, 1.0, 2.0, 5.0] {
        let r = fourier_of_pullback(ind, gamma, &q).unwrap();
        let expected = if gamma == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -gamma).exp()) / Complex64::new(0.0, gamma)
        };
        assert!((r.value - expected).norm() < 1e-6, "gamma {gamma}: {}", r.value);
    }
}

#[test]
fn mellin_gamma_values() {
    let q = QuadratureSpec::default();
    let p = PopaParam::Finite(1.0);
    // f with pullback t e^{-t}: f(u) = (rho / (1 + rho)) (1 + rho u) e^{-(1 + rho u)}
    let f = |u: f64| 0.5 * (1.0 + u) * (-(1.0 + u)).exp();
    for z in [0.0, -1.0, -2.0, 0.5] {
        let r = mellin_popa(f, p, Complex64::new(z, 0.0), &q).unwrap();
        let expected = gamma(1.0 - z);
        assert!((r.value.re - expected).abs() < 1e-5 && r.value.im.abs() < 1e-12, "z {z}: {}", r.value);
    }
}

#[test]
fn convolution_theorem_for_bumps() {
    let q = QuadratureSpec::with_tol(1e-9);
    for p in [PopaParam::Zero, PopaParam::Finite(2.0), PopaParam::Infinity] {
        let f = move |t: f64| bump(to_log_scale(p, t).unwrap() * 1.5 - 0.2);
        let g = move |t: f64| bump(to_log_scale(p, t).unwrap() * 0.8 + 0.4) * 2.0;
        let conv = |x: f64| {
            let pt = PopaPoint::new(p, x).unwrap();
            popa_convolution(f, g, &pt, &q).unwrap().value
        };
        let qq = QuadratureSpec { truncation: 4.0, ..q };
        for gamma in [0.0, 1.3, 4.0] {
            let lhs = fourier_popa(conv, p, gamma, &qq).unwrap();
            let rhs = fourier_popa(f, p, gamma, &q).unwrap().value * fourier_popa(g, p, gamma, &q).unwrap().value;
            assert!((lhs.value - rhs).norm() <= 10.0 * 1e-9 * (1.0 + rhs.norm()), "{p} gamma {gamma}: {} vs {rhs}", lhs.value);
        }
    }
}
