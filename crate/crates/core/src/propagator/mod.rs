//! Spectral evolution `u(t) = e^{ita(D)} ψ(D) u₀` on a periodic box, with discrete `L^p`
//! norms, empirical `L^p → L^q` operator ratios, Strichartz space-time norms and a resolvent
//! smallness probe.

mod field;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use field::GridField;

use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::{CompensatedReal, Real};
use crate::symbol::SymbolSpec;

pub const DEFAULT_HALF_WIDTH: f64 = 32.0;
/// Uniform time steps per unit time for Strichartz norms.
pub const DEFAULT_STEPS_PER_UNIT: usize = 256;
/// Evolved fields with more than this share of `Σ|u|²` in the outer frame are flagged.
pub const ALIASING_THRESHOLD: f64 = 1e-6;
/// Relative change of a Strichartz norm under doubling of `T` above which it is unstable.
pub const STRICHARTZ_INSTABILITY: f64 = 0.2;
/// Number of Gaussian widths in the standard probe family.
pub const PROBE_WIDTHS: usize = 8;

/// Default points per axis: `2^10`, `2^8`, `2^6` in one, two, three dimensions.
pub fn default_points_per_axis(dimension: usize) -> usize {
    match dimension {
        1 => 1 << 10,
        2 => 1 << 8,
        _ => 1 << 6,
    }
}

/// Spectral multiplier `e^{ita(k)} ψ(k)`; at `k = 0` the phase and symbol take their
/// continuous limits, or 0 when undefined.
fn multiplier<T: Real>(phase: &PhaseSpec<T>, symbol: Option<&SymbolSpec<T>>, t: T, k: &[T]) -> Complex<T> {
    let origin = k.iter().all(|&v| v == T::zero());
    let a = match phase.eval(k) {
        Ok(a) => a,
        Err(_) => {
            if origin {
                log::info!("phase undefined at the zero mode; using 0");
            }
            T::zero()
        }
    };
    let psi = match symbol {
        None => T::one(),
        Some(s) => match s.eval(k) {
            Ok(v) => v,
            Err(_) => {
                log::info!("symbol undefined at wavevector {k:?}; using 0");
                T::zero()
            }
        },
    };
    Complex::from_polar(psi, t * a)
}

fn check_dimensions<T: Real>(phase: &PhaseSpec<T>, symbol: Option<&SymbolSpec<T>>, field: &GridField<T>) -> Result<()> {
    if phase.dimension() != field.dimension() || symbol.is_some_and(|s| s.dimension() != field.dimension()) {
        return Err(Error::InvalidSpec("phase, symbol and grid dimensions differ".into()));
    }
    Ok(())
}

/// `F^{-1}[e^{ita(k)} ψ(k) F u₀]`; `t = 0` without a symbol returns `u₀` unchanged.
pub fn evolve<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: Option<&SymbolSpec<T>>,
    u0: &GridField<T>,
    t: T,
) -> Result<GridField<T>> {
    check_dimensions(phase, symbol, u0)?;
    if t == T::zero() && symbol.is_none() {
        return Ok(u0.clone());
    }
    u0.apply_multiplier(|k| multiplier(phase, symbol, t, k))
}

#[derive(Debug, Clone)]
pub struct Probe<T> {
    pub label: String,
    pub field: GridField<T>,
}

/// Gaussians at [`PROBE_WIDTHS`] geometric widths from `4h` to `L/4`, the same Gaussians
/// modulated by seeded random frequencies, and a point mass.
pub fn standard_probes<T: Real>(dimension: usize, points_per_axis: usize, half_width: T, seed: u64) -> Result<Vec<Probe<T>>> {
    let probe_grid = GridField::<T>::zeros(dimension, points_per_axis, half_width)?;
    let lo = T::lit(4.0) * probe_grid.spacing();
    let hi = half_width / T::lit(4.0);
    let widths: Vec<T> = (0..PROBE_WIDTHS)
        .map(|i| lo * (hi / lo).powf(T::lit(i as f64 / (PROBE_WIDTHS - 1) as f64)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nyquist = T::PI() / probe_grid.spacing();
    let mut probes = Vec::with_capacity(2 * PROBE_WIDTHS + 1);
    for &w in &widths {
        probes.push(Probe {
            label: format!("gaussian(w={})", w.as_f64()),
            field: GridField::gaussian(dimension, points_per_axis, half_width, w, None)?,
        });
    }
    for &w in &widths {
        // keep the modulated spectrum well inside the resolved band
        let k: Vec<T> = (0..dimension)
            .map(|_| T::lit(rng.gen_range(-0.25..0.25)) * nyquist)
            .collect();
        probes.push(Probe {
            label: format!("modulated(w={}, k={:?})", w.as_f64(), k.iter().map(|v| v.as_f64()).collect::<Vec<_>>()),
            field: GridField::gaussian(dimension, points_per_axis, half_width, w, Some(&k))?,
        });
    }
    probes.push(Probe {
        label: "point_mass".into(),
        field: GridField::point_mass(dimension, points_per_axis, half_width)?,
    });
    Ok(probes)
}

/// Empirical `‖W(t)u‖_q / ‖u‖_p`, maximised over probes. This is a lower bound on the operator
/// norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport<T> {
    pub ratio: T,
    pub probe: String,
    /// Probes whose evolution put more than [`ALIASING_THRESHOLD`] of its mass in the outer frame.
    pub aliased_probes: usize,
    /// True when every probe was aliased, so `ratio` comes from an aliased evolution.
    pub aliased: bool,
    pub lower_bound: bool,
}

/// Evaluates `‖W_b(t)u‖_q/‖u‖_p` over the probes. Aliased probes are excluded from the maximum
/// unless all of them are aliased.
pub fn operator_ratio<T: Real>(
    phase: &PhaseSpec<T>,
    symbol: Option<&SymbolSpec<T>>,
    p: T,
    q: T,
    t: T,
    probes: &[Probe<T>],
) -> Result<RatioReport<T>> {
    field::check_exponent(p)?;
    field::check_exponent(q)?;
    if probes.is_empty() {
        return Err(Error::InvalidSpec("probe set is empty".into()));
    }
    let measured: Vec<Result<(T, bool)>> = probes
        .par_iter()
        .map(|probe| {
            let out = evolve(phase, symbol, &probe.field, t)?;
            let ratio = out.lp_norm(q)? / probe.field.lp_norm(p)?;
            Ok((ratio, out.frame_fraction() > T::lit(ALIASING_THRESHOLD)))
        })
        .collect();
    let measured = measured.into_iter().collect::<Result<Vec<_>>>()?;
    let aliased_probes = measured.iter().filter(|m| m.1).count();
    let all_aliased = aliased_probes == measured.len();
    let mut best: Option<(T, usize)> = None;
    for (i, &(ratio, aliased)) in measured.iter().enumerate() {
        if (all_aliased || !aliased) && best.map_or(true, |(b, _)| ratio > b) {
            best = Some((ratio, i));
        }
    }
    let (ratio, index) = best.expect("nonempty probe set");
    Ok(RatioReport {
        ratio,
        probe: probes[index].label.clone(),
        aliased_probes,
        aliased: all_aliased,
        lower_bound: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzReport<T> {
    /// Mixed norm over `[-T, T]`.
    pub norm: T,
    /// Mixed norm over `[-2T, 2T]`.
    pub doubled: T,
    /// `|doubled - norm| / norm`.
    pub delta: T,
    pub unstable: bool,
    pub time_steps: usize,
}

/// `(∫_{-T}^{T} ‖⟨D⟩^{b/2} W(t)u₀‖_p^q dt)^{1/q}` by the trapezoidal rule on a uniform grid of
/// `steps_per_unit` steps per unit time, together with the same norm over `[-2T, 2T]`.
/// `q = ∞` takes the maximum over the time grid.
pub fn strichartz_norm<T: Real>(
    phase: &PhaseSpec<T>,
    b: T,
    u0: &GridField<T>,
    p: T,
    q: T,
    window: T,
    steps_per_unit: usize,
) -> Result<StrichartzReport<T>> {
    field::check_exponent(p)?;
    field::check_exponent(q)?;
    if phase.dimension() != u0.dimension() {
        return Err(Error::InvalidSpec("phase and grid dimensions differ".into()));
    }
    if !(window > T::zero()) || steps_per_unit == 0 {
        return Err(Error::InvalidSpec("time window and steps per unit must be positive".into()));
    }
    let weight = if b == T::zero() {
        None
    } else {
        Some(SymbolSpec::bessel_weight(u0.dimension(), b / T::lit(2.0))?)
    };
    let half_steps = (window * T::from_usize(steps_per_unit).expect("steps")).ceil().to_usize().expect("steps");
    let dt = window / T::from_usize(half_steps).expect("steps");
    let spectrum = u0.spectrum();
    let mut wavevector = vec![T::zero(); u0.dimension()];
    let spatial: Vec<Complex<T>> = (0..spectrum.len())
        .map(|flat| {
            u0.wavevector_into(flat, &mut wavevector);
            multiplier(phase, weight.as_ref(), T::zero(), &wavevector)
        })
        .collect();
    let phases: Vec<T> = (0..spectrum.len())
        .map(|flat| {
            u0.wavevector_into(flat, &mut wavevector);
            phase.eval(&wavevector).unwrap_or(T::zero())
        })
        .collect();
    // ‖u(t_k)‖_p for t_k = k·dt, k in [-2N, 2N]
    let norms: Vec<Result<T>> = (-2 * half_steps as i64..=2 * half_steps as i64)
        .into_par_iter()
        .map(|k| {
            let t = T::from_i64(k).expect("step") * dt;
            let evolved: Vec<Complex<T>> = spectrum
                .iter()
                .zip(&spatial)
                .zip(&phases)
                .map(|((s, w), a)| s * w * Complex::from_polar(T::one(), t * *a))
                .collect();
            u0.from_spectrum(evolved)?.lp_norm(p)
        })
        .collect();
    let norms = norms.into_iter().collect::<Result<Vec<T>>>()?;
    let centre = 2 * half_steps;
    let mixed = |steps: usize| -> T {
        let slice = &norms[centre - steps..=centre + steps];
        if q.is_infinite() {
            return slice.iter().copied().fold(T::zero(), T::max);
        }
        let mut sum = CompensatedReal::new();
        for (i, v) in slice.iter().enumerate() {
            let w = if i == 0 || i == slice.len() - 1 { T::lit(0.5) } else { T::one() };
            sum.add(w * v.powf(q));
        }
        (sum.value() * dt).powf(T::one() / q)
    };
    let norm = mixed(half_steps);
    let doubled = mixed(2 * half_steps);
    let delta = (doubled - norm).abs() / norm;
    Ok(StrichartzReport {
        norm,
        doubled,
        delta,
        unstable: delta > T::lit(STRICHARTZ_INSTABILITY),
        time_steps: 4 * half_steps + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventReport<T> {
    /// `max ‖V (λ - A)^{-1} u‖_p / ‖u‖_p` over the probes, with `A = i(-Δ)^α`.
    pub ratio: T,
    /// Hölder exponent `r` with `1/r = 1/p - 1/q`.
    pub holder_exponent: T,
    /// `‖V‖_r`.
    pub potential_norm: T,
    /// `max ‖(λ - A)^{-1} u‖_q / ‖u‖_p`.
    pub resolvent_ratio: T,
    /// Smallness threshold `1/2` of the perturbation argument.
    pub threshold: T,
    pub below_threshold: bool,
}

/// Estimates `‖V(λ - i(-Δ)^α)^{-1}‖_{L^p → L^p}` from below over the probes, using the
/// multiplier `(λ - i|ξ|^{2α})^{-1}` (with `|ξ|^{2α} = 0` at the zero mode).
pub fn resolvent_smallness<T: Real>(
    alpha: T,
    potential: &GridField<T>,
    p: T,
    q: T,
    lambda_re: T,
    probes: &[Probe<T>],
) -> Result<ResolventReport<T>> {
    field::check_exponent(p)?;
    field::check_exponent(q)?;
    if !(lambda_re > T::zero()) {
        return Err(Error::InvalidSpec(format!("lambda must have positive real part, got {lambda_re}")));
    }
    if !(alpha > T::zero()) {
        return Err(Error::InvalidSpec(format!("alpha must be positive, got {alpha}")));
    }
    if probes.is_empty() {
        return Err(Error::InvalidSpec("probe set is empty".into()));
    }
    let inv_r = T::one() / p - T::one() / q;
    if inv_r < T::zero() {
        return Err(Error::ParameterRange {
            parameter: "q",
            value: q.to_string(),
            interval: format!("[{p}, inf]"),
        });
    }
    let holder_exponent = if inv_r == T::zero() { T::infinity() } else { T::one() / inv_r };
    let measured: Vec<Result<(T, T)>> = probes
        .par_iter()
        .map(|probe| {
            probe.field.check_same_grid(potential)?;
            let resolved = probe.field.apply_multiplier(|k| {
                let s2 = k.iter().fold(T::zero(), |acc, &v| acc + v * v);
                let power = if s2 == T::zero() { T::zero() } else { s2.powf(alpha) };
                Complex::new(T::one(), T::zero()) / Complex::new(lambda_re, -power)
            })?;
            let input = probe.field.lp_norm(p)?;
            let perturbed = potential.multiply(&resolved)?.lp_norm(p)?;
            Ok((perturbed / input, resolved.lp_norm(q)? / input))
        })
        .collect();
    let measured = measured.into_iter().collect::<Result<Vec<_>>>()?;
    let ratio = measured.iter().map(|m| m.0).fold(T::zero(), T::max);
    let resolvent_ratio = measured.iter().map(|m| m.1).fold(T::zero(), T::max);
    let threshold = T::lit(0.5);
    Ok(ResolventReport {
        ratio,
        holder_exponent,
        potential_norm: potential.lp_norm(holder_exponent)?,
        resolvent_ratio,
        threshold,
        below_threshold: ratio < threshold,
    })
}

#[cfg(test)]
mod tests;
