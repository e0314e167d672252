use num_complex::Complex;
use rayon::prelude::*;

use super::{check_point, check_time, oscillation_radius, GridMeta, KernelSample, Method};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::{norm, CompensatedSum, Real};
use crate::symbol::SymbolSpec;

/// Default cap on evaluated lattice points per pass.
pub const DEFAULT_POINT_BUDGET: u64 = 1 << 26;
/// `e^{-ε Ξ²}` at the cutoff is `e^{-CUTOFF_WIDTH²}`, about `1e-10`.
const CUTOFF_WIDTH: f64 = 4.8;
/// Fraction of the largest admissible spacing used by the planner.
const SPACING_SAFETY: f64 = 0.9;
/// Regularisation strengths `δ = ε·s²` tried by the planner, mildest first.
const DELTA_SCHEDULE: [f64; 12] = [0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    pub point_budget: u64,
    /// Also evaluate at `ε/4` and extrapolate linearly to `ε = 0`.
    pub extrapolate: bool,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self {
            point_budget: DEFAULT_POINT_BUDGET,
            extrapolate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePlan<T> {
    pub epsilon: T,
    pub cutoff: T,
    pub spacing: T,
    /// `ε·s²`, with `s` the larger of the oscillation radius and the stationary radius.
    pub delta: T,
}

/// Largest spacing with phase increment below `π` per cell on `[-Ξ,Ξ]^n`.
fn max_spacing<T: Real>(phase: &PhaseSpec<T>, t: T, x: &[T], cutoff: T) -> T {
    let corner = cutoff * T::lit(phase.dimension() as f64).sqrt();
    T::PI() / (t.abs() * phase.gradient_bound(corner) + norm(x))
}

fn uses_tensor_path<T: Real>(phase: &PhaseSpec<T>, symbol: &SymbolSpec<T>) -> bool {
    phase.dimension() == 1 || (phase.is_quadratic() && symbol.monomial_powers().is_some())
}

/// Points per axis of the fine (`h/2`) lattice.
fn fine_axis_points<T: Real>(cutoff: T, spacing: T) -> u64 {
    let m = (cutoff / spacing).floor().to_u64().unwrap_or(u64::MAX / 8);
    4 * m + 1
}

fn pass_cost<T: Real>(n: usize, tensor: bool, cutoff: T, spacing: T) -> u64 {
    let axis = fine_axis_points(cutoff, spacing);
    if tensor {
        axis.saturating_mul(n as u64)
    } else {
        (0..n).fold(1u64, |acc, _| acc.saturating_mul(axis))
    }
}

/// Chooses `ε`, `Ξ` and `h` for [`eval_lattice`]: `ε = δ/s²` with `s² = ρ² + ξ*²` (oscillation
/// radius `ρ`, stationary radius `ξ*`), `Ξ = 4.8/√ε` and `h` at 90% of the admissible spacing.
/// `δ` is raised along a fixed schedule until both passes fit the point budget.
pub fn plan_lattice<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    options: &LatticeOptions,
) -> Result<LatticePlan<T>> {
    check_time(t)?;
    check_point(x, phase.dimension())?;
    let n = phase.dimension();
    let grad = |s: T| phase.gradient_bound(s);
    let value = |s: T| grad(s) * s;
    let rho = oscillation_radius(t, value);
    let r = norm(x);
    let stationary = if r > T::zero() { oscillation_radius(t / r, grad) } else { T::zero() };
    let s2 = rho * rho + stationary * stationary;
    let tensor = uses_tensor_path(phase, symbol);
    let mut last_cost = 0;
    for delta in DELTA_SCHEDULE {
        let delta = T::lit(delta);
        let epsilon = delta / s2;
        let cutoff = T::lit(CUTOFF_WIDTH) / epsilon.sqrt();
        let spacing = T::lit(SPACING_SAFETY) * max_spacing(phase, t, x, cutoff);
        let mut cost = pass_cost(n, tensor, cutoff, spacing);
        if options.extrapolate {
            let outer = T::lit(2.0) * cutoff;
            let spacing2 = T::lit(SPACING_SAFETY) * max_spacing(phase, t, x, outer);
            cost = cost.max(pass_cost(n, tensor, outer, spacing2));
        }
        if cost <= options.point_budget {
            return Ok(LatticePlan { epsilon, cutoff, spacing, delta });
        }
        last_cost = cost;
    }
    Err(Error::Budget {
        points: last_cost,
        budget: options.point_budget,
    })
}

struct Pass<T> {
    coarse: Complex<T>,
    fine: Complex<T>,
    points: u64,
}

/// Trapezoidal lattice sum of `e^{i(ta+x·ξ)} ψ_ε` over `[-Ξ,Ξ]^n` at spacing `h`, with the
/// `h/2` lattice used for the resolution estimate. With extrapolation enabled, a second pass at
/// `ε/4` (cutoff `2Ξ`, spacing shrunk to stay resolved) gives the value `(4I(ε/4) - I(ε))/3`;
/// `est_error` is then the two resolution deltas plus `|I(ε/4) - I(ε)|`.
#[allow(clippy::too_many_arguments)]
pub fn eval_lattice<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    epsilon: T,
    cutoff: T,
    spacing: T,
    options: &LatticeOptions,
) -> Result<KernelSample<T>> {
    let n = phase.dimension();
    if symbol.dimension() != n {
        return Err(Error::InvalidSpec("phase and symbol dimensions differ".into()));
    }
    check_time(t)?;
    check_point(x, n)?;
    if !(epsilon > T::zero()) || !(cutoff > T::zero()) || !(spacing > T::zero()) {
        return Err(Error::InvalidSpec("epsilon, cutoff and spacing must be positive".into()));
    }
    let h_max = max_spacing(phase, t, x, cutoff);
    if spacing >= h_max {
        return Err(Error::ResolutionRejected {
            spacing: spacing.as_f64(),
            max_spacing: h_max.as_f64(),
        });
    }
    let tensor = uses_tensor_path(phase, symbol);
    let mut passes = vec![(epsilon, cutoff, spacing)];
    if options.extrapolate {
        let outer = T::lit(2.0) * cutoff;
        let ratio = max_spacing(phase, t, x, outer) / h_max;
        passes.push((epsilon / T::lit(4.0), outer, spacing * ratio));
    }
    for &(_, c, h) in &passes {
        let points = pass_cost(n, tensor, c, h);
        if points > options.point_budget {
            return Err(Error::Budget {
                points,
                budget: options.point_budget,
            });
        }
    }
    let mut results = Vec::with_capacity(passes.len());
    for &(eps, c, h) in &passes {
        results.push(if tensor {
            tensor_pass(phase, symbol, t, x, eps, c, h)?
        } else {
            full_pass(phase, symbol, t, x, eps, c, h)?
        });
    }
    let resolution: T = results.iter().map(|p| (p.fine - p.coarse).norm()).fold(T::zero(), |a, b| a + b);
    let points: u64 = results.iter().map(|p| p.points).sum();
    let (value, est_error, final_cutoff, final_spacing) = match results.as_slice() {
        [single] => (single.fine, resolution, cutoff, spacing),
        [first, second] => {
            let change = second.fine - first.fine;
            let correction = change / T::lit(3.0);
            // the remaining bias is bounded by the whole change, not just the correction applied
            (second.fine + correction, resolution + change.norm(), passes[1].1, passes[1].2)
        }
        _ => unreachable!("one or two passes"),
    };
    Ok(KernelSample {
        t,
        x: x.to_vec(),
        value,
        method: Method::Lattice,
        epsilon,
        est_error,
        grid: GridMeta {
            cutoff: final_cutoff,
            spacing: Some(final_spacing),
            nodes: points,
        },
    })
}

/// Sums for a factorised integrand: `n = 1`, or a multiple of `|ξ|²` with a monomial symbol.
fn tensor_pass<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    eps: T,
    cutoff: T,
    h: T,
) -> Result<Pass<T>> {
    let n = phase.dimension();
    let axis = fine_axis_points(cutoff, h);
    let half = (axis as i64 - 1) / 2;
    let step = h / T::lit(2.0);
    let mut coarse = Complex::new(T::one(), T::zero());
    let mut fine = Complex::new(T::one(), T::zero());
    let powers = symbol.monomial_powers();
    for k in 0..n {
        let term = |j: i64| -> Result<Complex<T>> {
            let xi = T::from_i64(j).expect("index") * step;
            let (a, psi) = if n == 1 {
                (phase.line(xi)?[0], symbol.eval(&[xi])?)
            } else {
                let c = phase.radial(T::one()).expect("quadratic phase")[0];
                let alpha = powers.as_ref().expect("monomial symbol")[k];
                (c * xi * xi, xi.powi(alpha as i32))
            };
            let arg = t * a + x[k] * xi;
            Ok(Complex::from_polar(psi * (-eps * xi * xi).exp(), arg))
        };
        let (c_sum, f_sum) = axis_sums(half, &term)?;
        coarse = coarse * c_sum * h;
        fine = fine * f_sum * step;
    }
    Ok(Pass {
        coarse,
        fine,
        points: axis * n as u64,
    })
}

fn axis_sums<T: Real>(half: i64, term: &(dyn Fn(i64) -> Result<Complex<T>> + Sync)) -> Result<(Complex<T>, Complex<T>)> {
    let mut coarse = CompensatedSum::new();
    let mut fine = CompensatedSum::new();
    for j in -half..=half {
        let v = term(j)?;
        fine.add(v);
        if j % 2 == 0 {
            coarse.add(v);
        }
    }
    Ok((coarse.value(), fine.value()))
}

/// Full `n`-dimensional sweep; slices along the first axis are combined in index order.
///
/// Radial data are even in every coordinate, so only the nonnegative orthant is visited and
/// `e^{ix·ξ}` summed over the reflections becomes `Π_k 2cos(x_k ξ_k)` (a factor 1 on axis zeros).
fn full_pass<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t: T,
    x: &[T],
    eps: T,
    cutoff: T,
    h: T,
) -> Result<Pass<T>> {
    let n = phase.dimension();
    let axis = fine_axis_points(cutoff, h);
    let half = (axis as i64 - 1) / 2;
    let step = h / T::lit(2.0);
    let coord = |j: i64| T::from_i64(j).expect("index") * step;
    let radial = phase.is_radial() && symbol.is_radial();
    let low = if radial { 0 } else { -half };
    // per-axis reflection weights for the radial sweep
    let weights: Vec<Vec<T>> = if radial {
        x.iter()
            .map(|&xk| {
                (0..=half)
                    .map(|j| if j == 0 { T::one() } else { T::lit(2.0) * (xk * coord(j)).cos() })
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };
    let slice = |j0: i64| -> Result<(Complex<T>, Complex<T>)> {
        let mut idx = vec![low; n];
        idx[0] = j0;
        let mut xi = vec![T::zero(); n];
        let mut coarse = CompensatedSum::new();
        let mut fine = CompensatedSum::new();
        loop {
            for (v, &j) in xi.iter_mut().zip(&idx) {
                *v = coord(j);
            }
            let r2 = xi.iter().fold(T::zero(), |acc, &v| acc + v * v);
            let value = if radial {
                let s = r2.sqrt();
                let a = phase.radial(s).expect("radial phase")[0];
                let psi = symbol.radial(s).expect("radial symbol");
                let w = idx.iter().enumerate().fold(T::one(), |acc, (k, &j)| acc * weights[k][j as usize]);
                Complex::from_polar(psi * w * (-eps * r2).exp(), t * a)
            } else {
                let a = phase.eval(&xi)?;
                let psi = symbol.eval(&xi)?;
                let dot = xi.iter().zip(x).fold(T::zero(), |acc, (&u, &v)| acc + u * v);
                Complex::from_polar(psi * (-eps * r2).exp(), t * a + dot)
            };
            if !(value.re.is_finite() && value.im.is_finite()) {
                return Err(Error::Domain {
                    what: "lattice integrand",
                    point: xi.iter().map(|v| v.as_f64()).collect(),
                });
            }
            fine.add(value);
            if idx.iter().all(|j| j % 2 == 0) {
                coarse.add(value);
            }
            // odometer over axes 1..n
            let mut k = n;
            loop {
                if k == 1 {
                    return Ok((coarse.value(), fine.value()));
                }
                k -= 1;
                if idx[k] < half {
                    idx[k] += 1;
                    break;
                }
                idx[k] = low;
            }
        }
    };
    let slices: Vec<Result<(Complex<T>, Complex<T>)>> = (low..=half).into_par_iter().map(slice).collect();
    let mut coarse = CompensatedSum::new();
    let mut fine = CompensatedSum::new();
    for slice in slices {
        let (c, f) = slice?;
        coarse.add(c);
        fine.add(f);
    }
    let visited = (half - low + 1) as u64;
    Ok(Pass {
        coarse: coarse.value() * h.powi(n as i32),
        fine: fine.value() * step.powi(n as i32),
        points: (0..n).fold(1u64, |acc, _| acc * visited),
    })
}
