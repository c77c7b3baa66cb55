use proptest::prelude::*;
use regvar::kernels::{
    bg_residual, cj_residual, goldie_g_integral, goldie_g_integral_quadrature, kernel_eval,
    kernel_inverse, prop6_k_from_g, GoldieAux,
};
use regvar::popa::{circle, eta, from_log_scale};
use regvar::{KernelParams, PopaParam, PopaPoint, QuadratureSpec};

const CELLS: [PopaParam; 3] = [PopaParam::Zero, PopaParam::Finite(1.0), PopaParam::Infinity];

fn cell() -> impl Strategy<Value = (PopaParam, PopaParam)> {
    let side = || {
        prop_oneof![
            Just(PopaParam::Zero),
            Just(PopaParam::Infinity),
            (0.05f64..20.0).prop_map(PopaParam::Finite),
        ]
    };
    (side(), side())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn kernels_are_additive(
        (rho, sigma) in cell(),
        kappa in -3.0f64..3.0,
        wx in -3.0f64..3.0,
        wy in -3.0f64..3.0,
    ) {
        let kp = KernelParams::new(rho, sigma, kappa).unwrap();
        let x = PopaPoint::new(rho, from_log_scale(rho, wx).unwrap()).unwrap();
        let y = PopaPoint::new(rho, from_log_scale(rho, wy).unwrap()).unwrap();
        let lhs = kernel_eval(&kp, circle(&x, &y).unwrap().value()).unwrap();
        let kx = PopaPoint::new(sigma, kernel_eval(&kp, x.value()).unwrap()).unwrap();
        let ky = PopaPoint::new(sigma, kernel_eval(&kp, y.value()).unwrap()).unwrap();
        let rhs = circle(&kx, &ky).unwrap().value();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn kernels_are_monotone(
        (rho, sigma) in cell(),
        kappa in -3.0f64..3.0,
        wx in -3.0f64..3.0,
        dw in 1e-3f64..2.0,
    ) {
        let kp = KernelParams::new(rho, sigma, kappa).unwrap();
        let a = kernel_eval(&kp, from_log_scale(rho, wx).unwrap()).unwrap();
        let b = kernel_eval(&kp, from_log_scale(rho, wx + dw).unwrap()).unwrap();
        if kappa > 0.0 {
            prop_assert!(a < b);
        } else if kappa < 0.0 {
            prop_assert!(a > b);
        }
    }

    #[test]
    fn inverse_round_trips(
        (rho, sigma) in cell(),
        kappa in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
        wx in -3.0f64..3.0,
    ) {
        let kp = KernelParams::new(rho, sigma, kappa).unwrap();
        let t = from_log_scale(rho, wx).unwrap();
        let back = kernel_inverse(&kp, kernel_eval(&kp, t).unwrap()).unwrap();
        prop_assert!(close(back, t, 1e-10));
    }
}

#[test]
fn zero_kappa_is_constant_identity() {
    for rho in CELLS {
        for sigma in CELLS {
            let kp = KernelParams::new(rho, sigma, 0.0).unwrap();
            for w in [-2.0, 0.0, 1.5] {
                let t = from_log_scale(rho, w).unwrap();
                assert_eq!(kernel_eval(&kp, t).unwrap(), sigma.identity());
            }
        }
    }
}

#[test]
fn prop6_pipeline_on_grid() {
    for rho_v in [0.5, 1.0, 4.0] {
        let rho = PopaParam::Finite(rho_v);
        for gamma in [-1.5, 0.5, 2.0] {
            let g = move |t: f64| eta(rho, t).unwrap().powf(gamma);
            let k = prop6_k_from_g(g, 1.7).unwrap();
            let grid: Vec<f64> = (0..20).map(|i| from_log_scale(rho, -1.5 + 0.15 * i as f64).unwrap()).collect();
            for &u in &grid {
                for &v in &grid {
                    let bg = bg_residual(&k, g, rho, u, v).unwrap();
                    let cj = cj_residual(g, rho, u, v).unwrap();
                    let scale = 1.0 + k(circle_value(rho, u, v)).abs();
                    assert!(bg.abs() <= 1e-10 * scale, "bg {bg} at ({u}, {v})");
                    assert!(cj.abs() <= 1e-10 * (1.0 + g(circle_value(rho, u, v))), "cj {cj}");
                }
            }
        }
    }
}

fn circle_value(rho: PopaParam, u: f64, v: f64) -> f64 {
    circle(&PopaPoint::new(rho, u).unwrap(), &PopaPoint::new(rho, v).unwrap())
        .unwrap()
        .value()
}

#[test]
fn exponential_column_scales_to_linear() {
    // eta_sigma^{-1}(e^{sigma kappa t}) -> kappa t as sigma -> 0
    let sigma = 1e-6;
    let kp = KernelParams::new(PopaParam::Zero, PopaParam::Finite(sigma), sigma * 2.5).unwrap();
    for t in [-3.0, -0.5, 0.2, 1.0, 4.0] {
        let v = kernel_eval(&kp, t).unwrap();
        assert!((v - 2.5 * t).abs() <= 1e-4 * (2.5 * t).abs(), "{v}");
    }
}

#[test]
fn goldie_integral_closed_form_matches_quadrature() {
    let q = QuadratureSpec::default();
    for rho in [0.5, 1.0, 3.0] {
        for gamma in [-1.0, 0.5, 2.0, 0.0] {
            let aux = GoldieAux::new(PopaParam::Finite(rho), gamma).unwrap();
            for u in [0.1, 1.0, 10.0, -0.05] {
                let closed = goldie_g_integral(&aux, u).unwrap();
                let quad = goldie_g_integral_quadrature(&aux, u, &q).unwrap();
                assert!(quad.converged);
                assert!((closed - quad.value).abs() <= 1e-9 * (1.0 + closed.abs()), "{closed} vs {}", quad.value);
            }
        }
    }
}
