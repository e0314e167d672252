use num_complex::Complex;
use proptest::prelude::*;

use super::*;
use crate::oscint::eval_adaptive_1d;
use crate::phase::PhaseSpec;
use crate::symbol::SymbolSpec;

fn schrodinger(n: usize) -> PhaseSpec<f64> {
    PhaseSpec::pure_power(n, 2.0).unwrap()
}

fn l2_distance(a: &GridField<f64>, b: &GridField<f64>) -> f64 {
    let diff: Vec<Complex<f64>> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    GridField::new(a.dimension(), a.points_per_axis(), a.half_width(), diff).unwrap().lp_norm(2.0).unwrap()
}

fn bumpy(n: usize, points: usize) -> GridField<f64> {
    GridField::from_fn(n, points, 8.0, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex::new((-r2).exp() * (1.0 + x[0]), (-(r2 / 2.0)).exp() * x[n - 1].sin())
    })
    .unwrap()
}

#[test]
fn grid_layout() {
    let g = GridField::<f64>::zeros(1, 8, 2.0).unwrap();
    assert_eq!(g.spacing(), 0.5);
    assert_eq!(g.coordinate(0), -2.0);
    assert_eq!(g.coordinate(4), 0.0);
    let k: Vec<f64> = (0..8).map(|j| g.wavenumber(j)).collect();
    let unit = std::f64::consts::PI / 2.0;
    assert_eq!(k, vec![0.0, unit, 2.0 * unit, 3.0 * unit, -4.0 * unit, -3.0 * unit, -2.0 * unit, -unit]);
    assert!(GridField::<f64>::zeros(1, 12, 1.0).is_err());
    assert!(GridField::<f64>::new(2, 4, 1.0, vec![Complex::new(0.0, 0.0); 15]).is_err());
}

#[test]
fn parseval() {
    for n in 1..=3 {
        let u = bumpy(n, 16);
        let spec = u.spectrum();
        let lhs: f64 = u.values().iter().map(|v| v.norm_sqr()).sum();
        let rhs: f64 = spec.iter().map(|v| v.norm_sqr()).sum::<f64>() / spec.len() as f64;
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
        let back = u.from_spectrum(spec).unwrap();
        assert!(l2_distance(&u, &back) < 1e-13 * u.lp_norm(2.0).unwrap());
    }
}

#[test]
fn norms_of_gaussian() {
    let g = GridField::<f64>::gaussian(1, 1024, 32.0, 1.0, None).unwrap();
    assert!((g.lp_norm(1.0).unwrap() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert_eq!(g.lp_norm(f64::INFINITY).unwrap(), 1.0);
    assert!((g.lp_norm(2.0).unwrap() - std::f64::consts::PI.sqrt().sqrt()).abs() < 1e-12);
    assert!(g.lp_norm(0.5).is_err());
}

#[test]
fn zero_time_is_identity() {
    let u = bumpy(2, 16);
    let out = evolve(&schrodinger(2), None, &u, 0.0).unwrap();
    assert_eq!(out, u);
}

#[test]
fn free_gaussian_evolution() {
    // e^{it∂²}e^{-x²/2} = (1 - 2it)^{-1/2} e^{-x²/(2(1 - 2it))}
    let u0 = GridField::gaussian(1, 1024, 32.0, 1.0, None).unwrap();
    let t = 1.0;
    let out = evolve(&schrodinger(1), None, &u0, t).unwrap();
    let denom = Complex::new(1.0, -2.0 * t);
    let mut worst = 0.0f64;
    for (j, v) in out.values().iter().enumerate() {
        let x = out.coordinate(j);
        let exact = denom.powf(-0.5) * (-(x * x) / (2.0 * denom)).exp();
        worst = worst.max((v - exact).norm());
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn unitary_ratio_for_l2() {
    let probes = standard_probes::<f64>(1, 256, 16.0, 5).unwrap();
    let phase = PhaseSpec::power_sum(1, &[(1.0, 2.0), (1.0, 4.0)]).unwrap();
    for t in [0.1, 1.0, 7.0] {
        let r = operator_ratio(&phase, None, 2.0, 2.0, t, &probes).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-10);
        assert!(r.lower_bound);
    }
}

#[test]
fn schrodinger_dispersive_ratio_halves_per_quadrupling() {
    let probes = standard_probes::<f64>(1, 1024, 32.0, 1).unwrap();
    let phase = schrodinger(1);
    for t in [0.5, 1.0, 2.0, 4.0] {
        let a = operator_ratio(&phase, None, 1.0, f64::INFINITY, t, &probes).unwrap();
        let b = operator_ratio(&phase, None, 1.0, f64::INFINITY, 2.0 * t, &probes).unwrap();
        let q = a.ratio / b.ratio;
        assert!((q / 2f64.sqrt() - 1.0).abs() < 0.1, "t={t}: {q} ({} / {})", a.probe, b.probe);
        assert!(!a.aliased && !b.aliased);
    }
}

#[test]
fn point_mass_reproduces_kernel() {
    // the discrete kernel is the frequency-truncated integral summed over periodic images; the
    // truncation at |k| = K leaves endpoint terms of size about 1/(2π |2tK - |y||) for each image
    // offset y = x + 2Lm, which is small as long as no image lies inside the band |y| < 2tK
    let (points, half_width) = (1024, 32.0);
    let delta = GridField::<f64>::point_mass(1, points, half_width).unwrap();
    let phase = schrodinger(1);
    let one = SymbolSpec::constant_one(1).unwrap();
    let cutoff = std::f64::consts::PI / delta.spacing();
    let two_pi = 2.0 * std::f64::consts::PI;
    for t in [0.25, 0.5] {
        let out = evolve(&phase, None, &delta, t).unwrap();
        for j in (points / 2 - 64..points / 2 + 64).step_by(16) {
            let x = out.coordinate(j);
            let kernel = eval_adaptive_1d(&phase, &one, t, x, 1e-10).unwrap();
            let expect = kernel.value / two_pi;
            let truncation: f64 = (-3i32..=3)
                .map(|m| {
                    let y = (x + 2.0 * half_width * m as f64).abs();
                    let reach = 2.0 * t * cutoff;
                    1.0 / (two_pi * (reach - y).abs()) + 1.0 / (two_pi * (reach + y))
                })
                .sum();
            let err = (out.values()[j] - expect).norm();
            assert!(err <= truncation + kernel.est_error, "t={t} x={x}: {err} vs {truncation}");
        }
    }
}

#[test]
fn adjoint_ratios_agree_within_probe_spread() {
    let probes = standard_probes::<f64>(1, 512, 16.0, 2).unwrap();
    let phase = PhaseSpec::power_sum(1, &[(1.0, 2.0), (1.0, 3.0)]).unwrap();
    let (p, q) = (1.25f64, 4.0f64);
    let conj = |e: f64| e / (e - 1.0);
    let t = 1.5;
    let spread = |pp: f64, qq: f64| {
        let v: Vec<f64> = probes
            .iter()
            .map(|pr| {
                let out = evolve(&phase, None, &pr.field, t).unwrap();
                (out.lp_norm(qq).unwrap() / pr.field.lp_norm(pp).unwrap()).ln()
            })
            .collect();
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
    };
    let a = operator_ratio(&phase, None, p, q, t, &probes).unwrap().ratio;
    let b = operator_ratio(&phase, None, conj(q), conj(p), t, &probes).unwrap().ratio;
    assert!((a.ln() - b.ln()).abs() <= spread(p, q).max(spread(conj(q), conj(p))));
}

#[test]
fn strichartz_l2_is_flat() {
    let u0 = GridField::gaussian(1, 256, 16.0, 1.0, None).unwrap();
    let phase = PhaseSpec::pure_power(1, 4.0).unwrap();
    let q = 6.0;
    let r = strichartz_norm(&phase, 0.0, &u0, 2.0, q, 2.0, 32).unwrap();
    let l2 = u0.lp_norm(2.0).unwrap();
    assert!((r.norm / (l2 * 4f64.powf(1.0 / q)) - 1.0).abs() < 1e-10);
    assert!((r.doubled / (l2 * 8f64.powf(1.0 / q)) - 1.0).abs() < 1e-10);
}

#[test]
fn resolvent_probe_properties() {
    let (n, points, l) = (1, 256, 16.0);
    let probes = standard_probes::<f64>(n, points, l, 9).unwrap();
    let zero = GridField::<f64>::zeros(n, points, l).unwrap();
    let r = resolvent_smallness(0.75, &zero, 2.0, 4.0, 1.0, &probes).unwrap();
    assert_eq!(r.ratio, 0.0);
    assert!(r.below_threshold);
    assert_eq!(r.holder_exponent, 4.0);
    let v = GridField::gaussian(n, points, l, 2.0, None).unwrap();
    let one = resolvent_smallness(0.75, &v, 2.0, 4.0, 1.0, &probes).unwrap();
    let two = resolvent_smallness(0.75, &v.scale(2.0), 2.0, 4.0, 1.0, &probes).unwrap();
    assert!((two.ratio / one.ratio - 2.0).abs() < 1e-12);
    let mut previous = f64::INFINITY;
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let r = resolvent_smallness(0.75, &v, 2.0, 4.0, lambda, &probes).unwrap();
        assert!(r.ratio <= previous * (1.0 + 1e-12));
        previous = r.ratio;
    }
    assert!(resolvent_smallness(0.75, &v, 4.0, 2.0, 1.0, &probes).is_err());
}

#[test]
fn probe_family_is_seeded() {
    let a = standard_probes::<f64>(2, 32, 8.0, 3).unwrap();
    let b = standard_probes::<f64>(2, 32, 8.0, 3).unwrap();
    assert_eq!(a.len(), 2 * PROBE_WIDTHS + 1);
    assert!(a.iter().zip(&b).all(|(x, y)| x.field == y.field && x.label == y.label));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn unitarity(t in -50.0f64..50.0, n in 1usize..=3) {
        let u = bumpy(n, 16);
        let phase = PhaseSpec::power_sum(n, &[(1.0, 2.0), (0.3, 3.0)]).unwrap();
        let out = evolve(&phase, None, &u, t).unwrap();
        let before = u.lp_norm(2.0).unwrap();
        prop_assert!((out.lp_norm(2.0).unwrap() / before - 1.0).abs() < 1e-12);
    }

    #[test]
    fn group_law(t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, n in 1usize..=2) {
        let u = bumpy(n, 32);
        let phase = PhaseSpec::power_sum(n, &[(1.0, 2.0), (1.0, 4.0)]).unwrap();
        let two_step = evolve(&phase, None, &evolve(&phase, None, &u, t1).unwrap(), t2).unwrap();
        let one_step = evolve(&phase, None, &u, t1 + t2).unwrap();
        prop_assert!(l2_distance(&two_step, &one_step) < 1e-10 * u.lp_norm(2.0).unwrap());
    }
}
