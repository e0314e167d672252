use num_complex::Complex;

use super::bessel::{bessel_j, check_order, hankel_pq};
use super::engine::{Limits, Outcome, Problem};
use super::{check_point, check_time, oscillation_radius, GridMeta, KernelSample, Method};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::{norm, Real};
use crate::symbol::SymbolSpec;

/// Argument `s|x|` beyond which the Bessel factor is replaced by its two Hankel branches.
fn split_argument<T: Real>(order: T) -> T {
    T::lit(14.0) + T::lit(2.0) * order * order
}

/// `I(t,x)` for radial phase and symbol in `n ≥ 2` through the one-dimensional Hankel integral
/// `(2π)^{n/2}|x|^{1-n/2} ∫_0^∞ e^{ita(s)} ψ(s) s^{n/2} J_{n/2-1}(s|x|) ds`.
///
/// At `x = 0` the sphere-area form `ω_{n-1} ∫_0^∞ e^{ita(s)} ψ(s) s^{n-1} ds` is used.
pub fn eval_hankel<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    tolerance: T,
) -> Result<KernelSample<T>> {
    let n = phase.dimension();
    if n < 2 {
        return Err(Error::InvalidSpec("Hankel reduction needs n >= 2".into()));
    }
    if !phase.is_radial() || !symbol.is_radial() || symbol.dimension() != n {
        return Err(Error::InvalidSpec("Hankel reduction needs a radial phase and symbol".into()));
    }
    check_time(t)?;
    check_point(x, n)?;
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tolerance}")));
    }
    let order = T::lit(n as f64 / 2.0 - 1.0);
    check_order(order)?;

    let profile = |s: T| phase.radial(s).expect("radial phase");
    let psi = |s: T| symbol.radial(s).expect("radial symbol");
    let r = norm(x);
    let rho = oscillation_radius(t, |s| profile(s)[0].abs());
    // radius of the stationary point of t·a(s) - r·s
    let critical = if r > T::zero() {
        oscillation_radius(t / r, |s| profile(s)[1].abs())
    } else {
        T::zero()
    };
    let scale = rho.max(critical);
    let limits = Limits {
        tolerance: tolerance.as_f64(),
        ..Limits::default()
    };
    let phi = |s: T| {
        let [a, d1, d2] = profile(s);
        [t * a, t * d1, t * d2]
    };
    let half_n = T::lit(n as f64 / 2.0);

    let (out, prefactor) = if r == T::zero() {
        let amp = |s: T| Complex::new(psi(s) * s.powi(n as i32 - 1), T::zero());
        let out = Problem {
            amp: &amp,
            phase: &phi,
            amp_rate: T::zero(),
            start: T::zero(),
            end: None,
            scale,
            reference: T::zero(),
            split_tail: None,
        }
        .solve(&limits)?;
        let sphere = T::lit(2.0) * T::PI().powf(half_n) / gamma(half_n);
        (out, sphere)
    } else {
        let amp = |s: T| Complex::new(psi(s) * s.powf(half_n) * bessel_j(order, s * r).unwrap_or(T::nan()), T::zero());
        let phase_shift = order * T::FRAC_PI_2() + T::FRAC_PI_4();
        let split = |from: T, reference: T| -> Result<Outcome<T>> {
            let mut total: Option<Outcome<T>> = None;
            for sign in [T::one(), -T::one()] {
                let branch_amp = |s: T| {
                    let z = s * r;
                    let (p, q) = hankel_pq(order, z);
                    let weight = psi(s) * s.powf(half_n) * (T::lit(2.0) / (T::PI() * z)).sqrt() / T::lit(2.0);
                    Complex::new(p, sign * q) * Complex::from_polar(weight, -sign * phase_shift)
                };
                let branch_phase = |s: T| {
                    let [a, d1, d2] = phi(s);
                    [a + sign * r * s, d1 + sign * r, d2]
                };
                let out = Problem {
                    amp: &branch_amp,
                    phase: &branch_phase,
                    amp_rate: T::zero(),
                    start: from,
                    end: None,
                    scale,
                    reference,
            split_tail: None,
                }
                .solve(&limits)?;
                match total.as_mut() {
                    None => total = Some(out),
                    Some(acc) => {
                        acc.value = acc.value + out.value;
                        acc.node_delta = acc.node_delta + out.node_delta;
                        acc.tail_bound = acc.tail_bound + out.tail_bound;
                        acc.mass = acc.mass + out.mass;
                        acc.pieces += out.pieces;
                        acc.nodes += out.nodes;
                        acc.cutoff = acc.cutoff.max(out.cutoff);
                    }
                }
            }
            Ok(total.expect("two branches"))
        };
        let out = Problem {
            amp: &amp,
            phase: &phi,
            amp_rate: r,
            start: T::zero(),
            end: None,
            scale,
            reference: T::zero(),
            split_tail: Some((&split, split_argument(order) / r)),
        }
        .solve(&limits)?;
        let pref = (T::lit(2.0) * T::PI()).powf(half_n) * r.powf(T::one() - half_n);
        (out, pref)
    };
    Ok(KernelSample {
        t,
        x: x.to_vec(),
        value: out.value * prefactor,
        method: Method::Hankel,
        epsilon: T::zero(),
        est_error: out.error_estimate() * prefactor,
        grid: GridMeta {
            cutoff: out.cutoff,
            spacing: None,
            nodes: out.nodes as u64,
        },
    })
}

/// `Γ(k/2)` for positive integers `k`.
fn gamma<T: Real>(half: T) -> T {
    let twice = (half * T::lit(2.0)).round().to_i64().expect("small order");
    let mut value = if twice % 2 == 0 { T::one() } else { T::PI().sqrt() };
    let mut k = if twice % 2 == 0 { 2 } else { 1 };
    while k < twice {
        value = value * T::lit(k as f64 / 2.0);
        k += 2;
    }
    value
}
