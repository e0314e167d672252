use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::phase::PhaseSpec;
use crate::symbol::SymbolSpec;

/// Airy function from its Maclaurin series, with the leading asymptotic forms for `|z| > 8`.
fn airy_ai(z: f64) -> f64 {
    if z > 8.0 {
        let zeta = 2.0 / 3.0 * z.powf(1.5);
        return (-zeta).exp() / (2.0 * PI.sqrt() * z.powf(0.25)) * (1.0 - 5.0 / (72.0 * zeta));
    }
    if z < -8.0 {
        let w = -z;
        let zeta = 2.0 / 3.0 * w.powf(1.5);
        return ((zeta + PI / 4.0).sin() - 5.0 / (72.0 * zeta) * (zeta + PI / 4.0).cos()) / (PI.sqrt() * w.powf(0.25));
    }
    let ai0 = 0.355_028_053_887_817_2;
    let dai0 = 0.258_819_403_792_806_8;
    let z3 = z * z * z;
    let (mut f, mut g) = (1.0, z);
    let (mut tf, mut tg) = (1.0, z);
    for k in 1..200 {
        let k = k as f64;
        tf *= z3 / ((3.0 * k - 1.0) * (3.0 * k));
        tg *= z3 / ((3.0 * k) * (3.0 * k + 1.0));
        f += tf;
        g += tg;
        if tf.abs() + tg.abs() < 1e-18 {
            break;
        }
    }
    ai0 * f - dai0 * g
}

fn schrodinger(n: usize) -> (PhaseSpec<f64>, SymbolSpec<f64>) {
    (PhaseSpec::<f64>::pure_power(n, 2.0).unwrap(), SymbolSpec::<f64>::constant_one(n).unwrap())
}

fn fresnel_modulus(n: usize, t: f64) -> f64 {
    (PI / t.abs()).powf(n as f64 / 2.0)
}

#[test]
fn airy_oracle_sanity() {
    assert!((airy_ai(0.0) - 0.355_028_053_887_817_2).abs() < 1e-15);
    // first zero of Ai
    assert!(airy_ai(-2.338_107_410_459_767).abs() < 1e-12);
    assert!((airy_ai(1.0) - 0.135_292_416_312_881_4).abs() < 1e-13);
}

#[test]
fn adaptive_fresnel_examples() {
    let (a, psi) = schrodinger(1);
    let v = eval_adaptive_1d(&a, &psi, 1.0, 0.0, 1e-10).unwrap();
    let want = Complex::from_polar(PI.sqrt(), PI / 4.0);
    assert!((v.value - want).norm() < 1e-9, "{}", v.value);
    assert!(v.est_error < 1e-6);
    let v = eval_adaptive_1d(&a, &psi, 4.0, 0.0, 1e-10).unwrap();
    assert!((v.modulus() - (PI / 4.0).sqrt()).abs() < 1e-9);
}

#[test]
fn adaptive_airy_at_origin() {
    let a = PhaseSpec::<f64>::monomial_odd(3).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(1).unwrap();
    let v = eval_adaptive_1d(&a, &psi, 1.0, 0.0, 1e-10).unwrap();
    let want = 2.0 * PI * 3f64.powf(-1.0 / 3.0) * 0.355_028_053_9;
    assert!((v.value.re - want).abs() < 1e-8, "{}", v.value);
    assert!(v.value.im.abs() < 1e-9);
}

#[test]
fn adaptive_matches_airy_closed_form() {
    let a = PhaseSpec::<f64>::monomial_odd(3).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let t = 10f64.powf(rng.gen_range(-1.0..2.0));
        let x = rng.gen_range(-5.0..5.0) * t.cbrt();
        let v = eval_adaptive_1d(&a, &psi, t, x, 1e-10).unwrap();
        let scale = (3.0 * t).powf(-1.0 / 3.0);
        let want = 2.0 * PI * scale * airy_ai(x * scale);
        let rel = (v.value - want).norm() / want.abs().max(1e-3 * 2.0 * PI * scale);
        assert!(rel < 1e-4, "t={t} x={x}: {} vs {want}", v.value);
    }
}

#[test]
fn schrodinger_modulus_all_methods() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let (a, psi) = schrodinger(n);
        for _ in 0..6 {
            let t = 10f64.powf(rng.gen_range(-2.0..2.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let want = fresnel_modulus(n, t);
            let quad = if n == 1 {
                eval_adaptive_1d(&a, &psi, t, x[0], 1e-10).unwrap()
            } else {
                eval_hankel(&a, &psi, t, &x, 1e-10).unwrap()
            };
            assert!((quad.modulus() / want - 1.0).abs() < 1e-6, "n={n} t={t} x={x:?}: {}", quad.modulus());
            let opts = LatticeOptions::default();
            let plan = plan_lattice(&a, &psi, t, &x, &opts).unwrap();
            let lat = eval_lattice(&a, &psi, t, &x, plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
            assert!((lat.modulus() / want - 1.0).abs() < 1e-3, "lattice n={n} t={t}: {}", lat.modulus());
        }
    }
}

#[test]
fn lattice_examples() {
    let opts = LatticeOptions::default();
    let (a, psi) = schrodinger(1);
    let plan = plan_lattice(&a, &psi, 1.0, &[0.0], &opts).unwrap();
    let v = eval_lattice(&a, &psi, 1.0, &[0.0], plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
    assert!((v.value - Complex::from_polar(PI.sqrt(), PI / 4.0)).norm() < 1e-3 * PI.sqrt());
    assert_eq!(v.method, Method::Lattice);
    let (a, psi) = schrodinger(2);
    let plan = plan_lattice(&a, &psi, 1.0, &[0.7, -1.3], &opts).unwrap();
    let v = eval_lattice(&a, &psi, 1.0, &[0.7, -1.3], plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
    assert!((v.modulus() - PI).abs() < 1e-3 * PI);
}

#[test]
fn lattice_rejects_coarse_spacing() {
    let (a, psi) = schrodinger(1);
    let err = eval_lattice(&a, &psi, 1.0, &[0.0], 0.01, 20.0, 1.0, &LatticeOptions::default()).unwrap_err();
    match err {
        crate::Error::ResolutionRejected { max_spacing, .. } => assert!((max_spacing - PI / 40.0).abs() < 1e-12),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn lattice_budget_is_enforced() {
    let a = PhaseSpec::<f64>::power_sum(2, &[(1.0, 2.0), (1.0, 4.0)]).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(2).unwrap();
    let opts = LatticeOptions {
        point_budget: 1000,
        extrapolate: true,
    };
    let err = eval_lattice(&a, &psi, 1.0, &[0.0, 0.0], 0.1, 15.0, 5e-5, &opts).unwrap_err();
    assert!(matches!(err, crate::Error::Budget { budget: 1000, .. }));
    assert!(matches!(plan_lattice(&a, &psi, 1e-2, &[0.0, 0.0], &opts), Err(crate::Error::Budget { .. })));
}

#[test]
fn lattice_full_sweep_matches_tensor_sweep() {
    // a radial weight with b = 0 is identically one but is not a monomial, forcing the full sweep
    let a = PhaseSpec::<f64>::pure_power(2, 2.0).unwrap();
    let radial_one = SymbolSpec::<f64>::bessel_weight(2, 0.0).unwrap();
    let one = SymbolSpec::<f64>::constant_one(2).unwrap();
    let opts = LatticeOptions { extrapolate: false, ..LatticeOptions::default() };
    let x = [0.4, -0.2];
    let full = eval_lattice(&a, &radial_one, 2.0, &x, 0.5, 6.8, 0.05, &opts).unwrap();
    let tensor = eval_lattice(&a, &one, 2.0, &x, 0.5, 6.8, 0.05, &opts).unwrap();
    assert!((full.value - tensor.value).norm() < 1e-9 * full.modulus());
    assert!(full.grid.nodes > tensor.grid.nodes);
}

#[test]
fn lattice_epsilon_stability() {
    let (a, psi) = schrodinger(1);
    let opts = LatticeOptions::default();
    let single = LatticeOptions { extrapolate: false, ..opts };
    for t in [0.05, 0.7, 9.0] {
        let plan = plan_lattice(&a, &psi, t, &[0.3], &opts).unwrap();
        let at = |eps: f64, cutoff: f64| {
            let h = plan.spacing * max_spacing_ratio(&a, t, 0.3, plan.cutoff, cutoff);
            eval_lattice(&a, &psi, t, &[0.3], eps, cutoff, h, &single).unwrap().value
        };
        let i_eps = at(plan.epsilon, plan.cutoff);
        let i_quarter = at(plan.epsilon / 4.0, 2.0 * plan.cutoff);
        let full = eval_lattice(&a, &psi, t, &[0.3], plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
        let correction = (full.value - i_quarter).norm();
        assert!((i_eps - i_quarter).norm() < 5.0 * correction, "t={t}");
    }
}

fn max_spacing_ratio(a: &PhaseSpec<f64>, t: f64, x: f64, from: f64, to: f64) -> f64 {
    (t.abs() * a.gradient_bound(from) + x.abs()) / (t.abs() * a.gradient_bound(to) + x.abs())
}

#[test]
fn hankel_examples() {
    let (a, psi) = schrodinger(2);
    let v = eval_hankel(&a, &psi, 1.0, &[0.0, 0.0], 1e-10).unwrap();
    assert!((v.modulus() - PI).abs() < 1e-8);
    let (a, psi) = schrodinger(3);
    let v = eval_hankel(&a, &psi, 1.0, &[2.0, 0.0, 0.0], 1e-10).unwrap();
    assert!((v.modulus() - PI.powf(1.5)).abs() < 1e-7 * PI.powf(1.5));
    // the free kernel is exactly (π/it)^{n/2} e^{-i|x|²/4t}
    let exact = (Complex::new(PI, 0.0) / Complex::new(0.0, -1.0)).powf(1.5) * Complex::from_polar(1.0, -1.0);
    assert!((v.value - exact).norm() < 1e-7 * exact.norm(), "{} vs {exact}", v.value);
}

#[test]
fn hankel_rejects_bad_input() {
    let a = PhaseSpec::<f64>::pure_power(1, 2.0).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(1).unwrap();
    assert!(eval_hankel(&a, &psi, 1.0, &[0.0], 1e-10).is_err());
    let a = PhaseSpec::<f64>::pure_power(16, 2.0).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(16).unwrap();
    assert!(matches!(eval_hankel(&a, &psi, 1.0, &[0.0; 16], 1e-10), Err(crate::Error::UnsupportedOrder(_))));
}

#[test]
fn zero_time_is_rejected() {
    let (a, psi) = schrodinger(1);
    assert!(eval_adaptive_1d(&a, &psi, 0.0, 1.0, 1e-10).is_err());
}

#[test]
fn quartic_cross_method_small_time() {
    let a = PhaseSpec::<f64>::power_sum(1, &[(1.0, 2.0), (1.0, 4.0)]).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(1).unwrap();
    let quad = eval_adaptive_1d(&a, &psi, 1e-2, 0.0, 1e-10).unwrap();
    let opts = LatticeOptions::default();
    let plan = plan_lattice(&a, &psi, 1e-2, &[0.0], &opts).unwrap();
    let lat = eval_lattice(&a, &psi, 1e-2, &[0.0], plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
    assert!((quad.modulus() / lat.modulus() - 1.0).abs() < 0.1);
    assert!((quad.value - lat.value).norm() <= quad.est_error + lat.est_error);
}

#[test]
fn quartic_hankel_agrees_with_lattice_2d() {
    let a = PhaseSpec::<f64>::power_sum(2, &[(1.0, 2.0), (1.0, 4.0)]).unwrap();
    let psi = SymbolSpec::<f64>::constant_one(2).unwrap();
    let opts = LatticeOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let t = 10f64.powf(rng.gen_range(-0.5..1.0));
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let h = eval_hankel(&a, &psi, t, &x, 1e-10).unwrap();
        let plan = plan_lattice(&a, &psi, t, &x, &opts).unwrap();
        let l = eval_lattice(&a, &psi, t, &x, plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
        assert!((h.value - l.value).norm() <= h.est_error + l.est_error, "t={t} x={x:?}: {} vs {} ± {}", h.value, l.value, l.est_error);
    }
}

#[test]
fn weighted_hankel_agrees_with_lattice() {
    // growing weight (1 + |ξ|²)^{1/2}
    let a = PhaseSpec::<f64>::pure_power(2, 2.0).unwrap();
    let psi = SymbolSpec::<f64>::bessel_weight(2, 1.0).unwrap();
    let h = eval_hankel(&a, &psi, 1.0, &[0.5, 0.0], 1e-10).unwrap();
    let opts = LatticeOptions::default();
    let plan = plan_lattice(&a, &psi, 1.0, &[0.5, 0.0], &opts).unwrap();
    let l = eval_lattice(&a, &psi, 1.0, &[0.5, 0.0], plan.epsilon, plan.cutoff, plan.spacing, &opts).unwrap();
    assert!((h.value - l.value).norm() <= h.est_error + l.est_error + 1e-3 * h.modulus());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry_adaptive(lt in -1.5f64..1.5, x in -3.0f64..3.0) {
        let t = 10f64.powf(lt);
        let a = PhaseSpec::<f64>::power_sum(1, &[(1.0, 2.0), (0.5, 3.0)]).unwrap();
        let psi = SymbolSpec::<f64>::bessel_weight(1, 0.5).unwrap();
        let plus = eval_adaptive_1d(&a, &psi, t, x, 1e-10).unwrap();
        let minus = eval_adaptive_1d(&a, &psi, -t, -x, 1e-10).unwrap();
        prop_assert!((plus.value - minus.value.conj()).norm() <= plus.est_error + minus.est_error);
    }

    #[test]
    fn conjugate_symmetry_hankel(lt in -1.0f64..1.5, x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
        let t = 10f64.powf(lt);
        let a = PhaseSpec::<f64>::power_sum(3, &[(1.0, 2.0), (1.0, 3.0)]).unwrap();
        let psi = SymbolSpec::<f64>::constant_one(3).unwrap();
        let plus = eval_hankel(&a, &psi, t, &[x0, x1, 0.0], 1e-10).unwrap();
        let minus = eval_hankel(&a, &psi, -t, &[-x0, -x1, 0.0], 1e-10).unwrap();
        prop_assert!((plus.value - minus.value.conj()).norm() <= plus.est_error + minus.est_error);
    }

    #[test]
    fn adaptive_schrodinger_modulus(lt in -2.0f64..2.0, x in -10.0f64..10.0) {
        let t = 10f64.powf(lt);
        let (a, psi) = schrodinger(1);
        let v = eval_adaptive_1d(&a, &psi, t, x, 1e-10).unwrap();
        prop_assert!((v.modulus() / fresnel_modulus(1, t) - 1.0).abs() < 1e-6);
    }
}
