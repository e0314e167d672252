//! Numerical evaluation of `I(t,x) = ∫ e^{i(t a(ξ) + x·ξ)} ψ(ξ) dξ`.
//!
//! Three methods are available: a Gaussian-regularised lattice sum for any dimension
//! ([`eval_lattice`]), oscillation-splitting quadrature on the line ([`eval_adaptive_1d`]) and
//! the radial Hankel reduction for radial data in `n ≥ 2` ([`eval_hankel`]). [`eval_auto`]
//! picks the most accurate applicable one.

mod adaptive;
pub mod bessel;
pub mod engine;
mod hankel;
mod lattice;
pub mod quadrature;

use std::fmt;

use num_complex::Complex;

pub use adaptive::eval_adaptive_1d;
pub use bessel::{bessel_j, hankel_pq};
pub use hankel::eval_hankel;
pub use lattice::{eval_lattice, plan_lattice, LatticeOptions, LatticePlan, DEFAULT_POINT_BUDGET};

use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::Real;
use crate::symbol::SymbolSpec;

/// Default relative tolerance of the quadrature methods.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lattice,
    Adaptive1d,
    Hankel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lattice => "lattice",
            Method::Adaptive1d => "adaptive1d",
            Method::Hankel => "hankel",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Resolution data behind a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta<T> {
    /// Lattice half-width `Ξ`, or the point where quadrature stopped.
    pub cutoff: T,
    /// Lattice spacing `h`; `None` for quadrature.
    pub spacing: Option<T>,
    /// Lattice points or quadrature nodes used.
    pub nodes: u64,
}

/// One numerically evaluated value of `I(t,x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample<T> {
    pub t: T,
    pub x: Vec<T>,
    pub value: Complex<T>,
    pub method: Method,
    /// Gaussian regulariser of the finest pass; zero for the quadrature methods.
    pub epsilon: T,
    pub est_error: T,
    pub grid: GridMeta<T>,
}

impl<T: Real> KernelSample<T> {
    pub fn modulus(&self) -> T {
        self.value.norm()
    }

    pub fn x_norm(&self) -> T {
        crate::scalar::norm(&self.x)
    }
}

pub(crate) fn check_time<T: Real>(t: T) -> Result<()> {
    if t == T::zero() || !t.is_finite() {
        return Err(Error::InvalidSpec(format!("time must be finite and nonzero, got {t}")));
    }
    Ok(())
}

pub(crate) fn check_point<T: Real>(x: &[T], dimension: usize) -> Result<()> {
    if x.len() != dimension {
        return Err(Error::InvalidSpec(format!(
            "x has dimension {}, problem has {dimension}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("x must be finite".into()));
    }
    Ok(())
}

/// Radius `ρ` with `|t|·g(ρ) = 1`, where `g` is increasing; the frequency at which the
/// phase starts to oscillate.
pub(crate) fn oscillation_radius<T: Real>(t: T, g: impl Fn(T) -> T) -> T {
    let target = T::one() / t.abs();
    let (mut lo, mut hi) = (T::lit(-30.0), T::lit(30.0));
    if g(T::lit(30.0).exp()) < target {
        return T::lit(30.0).exp();
    }
    if g(T::lit(-30.0).exp()) > target {
        return T::lit(-30.0).exp();
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if g(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo + hi) / T::lit(2.0)).exp()
}

/// Evaluates with Hankel reduction when the data are radial and `n ≥ 2`, adaptive quadrature
/// for `n = 1`, and an automatically planned lattice otherwise.
pub fn eval_auto<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    tolerance: T,
    lattice: &LatticeOptions,
) -> Result<KernelSample<T>> {
    let n = phase.dimension();
    if n == 1 {
        eval_adaptive_1d(phase, symbol, t, x[0], tolerance)
    } else if phase.is_radial() && symbol.is_radial() && bessel::check_order(T::lit(n as f64 / 2.0 - 1.0)).is_ok() {
        eval_hankel(phase, symbol, t, x, tolerance)
    } else {
        let plan = plan_lattice(phase, symbol, t, x, lattice)?;
        eval_lattice(phase, symbol, t, x, plan.epsilon, plan.cutoff, plan.spacing, lattice)
    }
}

#[cfg(test)]
mod tests;
