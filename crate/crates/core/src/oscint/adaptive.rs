use num_complex::Complex;

use super::engine::{Limits, Problem};
use super::{check_time, oscillation_radius, GridMeta, KernelSample, Method};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::Real;
use crate::symbol::SymbolSpec;

/// `I(t,x)` for `n = 1`, as the sum of the two half-line integrals over `ξ > 0` and `ξ < 0`.
pub fn eval_adaptive_1d<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: T,
    tolerance: T,
) -> Result<KernelSample<T>> {
    if phase.dimension() != 1 || symbol.dimension() != 1 {
        return Err(Error::InvalidSpec("adaptive quadrature needs a one-dimensional problem".into()));
    }
    check_time(t)?;
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tolerance}")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidSpec("x must be finite".into()));
    }
    let line = |xi: T| phase.line(xi).unwrap_or([T::nan(); 3]);
    let scale = oscillation_radius(t, |s| line(s)[0].abs().max(line(-s)[0].abs()));
    let limits = Limits {
        tolerance: tolerance.as_f64(),
        ..Limits::default()
    };

    let mut value = Complex::new(T::zero(), T::zero());
    let mut error = T::zero();
    let mut nodes = 0u64;
    let mut cutoff = T::zero();
    for sigma in [T::one(), -T::one()] {
        let amp = |s: T| Complex::new(symbol.eval(&[sigma * s]).unwrap_or(T::nan()), T::zero());
        let phi = |s: T| {
            let [a, d1, d2] = line(sigma * s);
            [t * a + x * sigma * s, sigma * (t * d1 + x), t * d2]
        };
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
        value = value + out.value;
        error = error + out.error_estimate();
        nodes += out.nodes as u64;
        cutoff = cutoff.max(out.cutoff);
    }
    Ok(KernelSample {
        t,
        x: vec![x],
        value,
        method: Method::Adaptive1d,
        epsilon: T::zero(),
        est_error: error,
        grid: GridMeta {
            cutoff,
            spacing: None,
            nodes,
        },
    })
}
