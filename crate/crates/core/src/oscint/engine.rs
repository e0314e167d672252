//! Oscillation-splitting quadrature for `∫_a^b A(s) e^{iΦ(s)} ds` on a half-line.
//!
//! The range is cut at the real stationary points of `Φ`, then into pieces over which the
//! phase advances by at most `2π`; each piece gets Gauss–Legendre rules of two orders. An
//! unbounded range is closed by a two-term integration-by-parts expansion once its remainder
//! estimate is below tolerance.

use num_complex::Complex;

use super::quadrature::{high_rule, low_rule};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// Grid density of the stationary-point scan.
pub const SCAN_POINTS_PER_DECADE: usize = 512;
/// Scan window `[1e-6, 1e6]`.
pub const SCAN_LOW: f64 = 1e-6;
pub const SCAN_HIGH: f64 = 1e6;
/// Geometric grading levels toward a start point at the origin.
const GRADING_LEVELS: usize = 60;
/// Factor by which the tail cut moves out while the expansion is not yet accurate.
const TAIL_GROWTH: f64 = 1.25;
/// Fraction of the summed piece magnitudes that serves as the tolerance reference when the
/// integral itself nearly cancels.
const MASS_REFERENCE: f64 = 1e-6;

type AmpFn<'a, T> = dyn Fn(T) -> Complex<T> + Sync + 'a;
type PhaseFn<'a, T> = dyn Fn(T) -> [T; 3] + Sync + 'a;
type TailFn<'a, T> = dyn Fn(T, T) -> Result<Outcome<T>> + Sync + 'a;

pub struct Problem<'a, T: Real> {
    /// Amplitude `A(s)`.
    pub amp: &'a AmpFn<'a, T>,
    /// `[Φ, Φ', Φ'']`.
    pub phase: &'a PhaseFn<'a, T>,
    /// Oscillation rate carried by the amplitude itself, added when sizing pieces.
    pub amp_rate: T,
    pub start: T,
    pub end: Option<T>,
    /// Characteristic length, used for width caps and the first tail cut.
    pub scale: T,
    /// Magnitude the tail tolerance is measured against when the integral itself is smaller,
    /// e.g. when this problem is one part of a larger sum.
    pub reference: T,
    /// Replacement for the tail `[S, ∞)`, called with `S` and the current reference magnitude
    /// once `S` reaches the given point and integration by parts is not yet accurate.
    pub split_tail: Option<(&'a TailFn<'a, T>, T)>,
}

#[derive(Debug, Clone)]
pub struct Outcome<T> {
    pub value: Complex<T>,
    /// Sum over pieces of `|I_20 - I_12|`.
    pub node_delta: T,
    /// Bound on the discarded tail.
    pub tail_bound: T,
    /// Sum of piece magnitudes, a scale for rounding error.
    pub mass: T,
    pub pieces: usize,
    pub nodes: usize,
    /// Where the quadrature stopped (`end` or the tail cut).
    pub cutoff: T,
    pub stationary: Vec<T>,
}

impl<T: Real> Outcome<T> {
    pub fn error_estimate(&self) -> T {
        self.node_delta + self.tail_bound + self.mass * T::epsilon() * T::lit(64.0)
    }

    fn absorb(&mut self, other: &Outcome<T>) {
        self.value = self.value + other.value;
        self.node_delta = self.node_delta + other.node_delta;
        self.tail_bound = self.tail_bound + other.tail_bound;
        self.mass = self.mass + other.mass;
        self.pieces += other.pieces;
        self.nodes += other.nodes;
        self.cutoff = self.cutoff.max(other.cutoff);
        self.stationary.extend(other.stationary.iter().copied());
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub tolerance: f64,
    pub max_pieces: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_pieces: 400_000,
        }
    }
}

struct Accumulator<T: Real> {
    sum: CompensatedSum<T>,
    delta: T,
    mass: T,
    pieces: usize,
    nodes: usize,
}

impl<'a, T: Real> Problem<'a, T> {
    fn gauge(&self, s: T) -> T {
        let [_, d1, d2] = (self.phase)(s);
        let g = d1.abs() + d2.abs().sqrt() + self.amp_rate;
        if g.is_finite() {
            g
        } else {
            T::max_value()
        }
    }

    /// Real roots of `Φ'` in the scan window, refined by bisection.
    pub fn stationary_points(&self) -> Vec<T> {
        let lo = self.start.max(T::lit(SCAN_LOW));
        let hi = self.end.map_or(T::lit(SCAN_HIGH), |e| e.min(T::lit(SCAN_HIGH)));
        if !(hi > lo) {
            return Vec::new();
        }
        let decades = (hi / lo).log10().as_f64();
        let count = ((decades * SCAN_POINTS_PER_DECADE as f64).ceil() as usize).max(2);
        let ratio = (hi / lo).powf(T::one() / T::from_usize(count).expect("count"));
        let dphi = |s: T| (self.phase)(s)[1];
        let mut roots = Vec::new();
        let mut s0 = lo;
        let mut f0 = dphi(s0);
        for k in 1..=count {
            let s1 = if k == count { hi } else { s0 * ratio };
            let f1 = dphi(s1);
            if f1 == T::zero() {
                roots.push(s1);
            } else if f0 != T::zero() && (f0 < T::zero()) != (f1 < T::zero()) {
                roots.push(bisect(&dphi, s0, s1, f0));
            }
            s0 = s1;
            f0 = f1;
        }
        roots.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * T::lit(16.0) * b.abs());
        roots
    }

    fn integrate_piece(&self, a: T, b: T, acc: &mut Accumulator<T>) {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let rule = |(x, w): &(Vec<f64>, Vec<f64>)| {
            let mut s = CompensatedSum::new();
            for (xi, wi) in x.iter().zip(w) {
                let u = mid + half * T::lit(*xi);
                let [phi, _, _] = (self.phase)(u);
                let amp = (self.amp)(u);
                s.add(amp * Complex::new(phi.cos(), phi.sin()) * T::lit(*wi));
            }
            s.value() * half
        };
        let hi = rule(high_rule());
        let lo = rule(low_rule());
        acc.sum.add(hi);
        acc.delta = acc.delta + (hi - lo).norm();
        acc.mass = acc.mass + hi.norm();
        acc.pieces += 1;
        acc.nodes += high_rule().0.len() + low_rule().0.len();
    }

    /// Pieces of phase increment at most `2π` covering `[a, b]`.
    fn integrate_range(&self, a: T, b: T, acc: &mut Accumulator<T>, limits: &Limits) -> Result<()> {
        let pi = T::PI();
        let step = T::lit(2.0) * pi;
        let mut s = a;
        if a == T::zero() {
            // geometric grading toward the origin
            let mut g = b.min(self.scale * T::lit(0.25));
            while g * self.gauge(g) > pi && g > T::min_positive_value() {
                g = g / T::lit(2.0);
            }
            let mut right = g;
            for _ in 0..GRADING_LEVELS {
                let left = right / T::lit(2.0);
                self.integrate_piece(left, right, acc);
                right = left;
            }
            self.integrate_piece(T::zero(), right, acc);
            s = g;
        }
        while s < b {
            let g1 = self.gauge(s);
            let mut w = step / g1;
            let probe = (s + w).min(b);
            let g2 = self.gauge(probe);
            if g2 > g1 {
                w = step / g2;
            }
            w = w.min(T::lit(0.5) * (s + self.scale));
            if s + w >= b || (b - s - w) < T::lit(1e-3) * w {
                w = b - s;
            }
            if !(w > T::zero()) {
                return Err(Error::NonConvergence {
                    method: "adaptive quadrature",
                    reached: s.as_f64(),
                    pieces: acc.pieces,
                    tail_bound: f64::INFINITY,
                });
            }
            self.integrate_piece(s, s + w, acc);
            s = s + w;
            if acc.pieces > limits.max_pieces {
                return Err(Error::NonConvergence {
                    method: "adaptive quadrature",
                    reached: s.as_f64(),
                    pieces: acc.pieces,
                    tail_bound: f64::INFINITY,
                });
            }
        }
        Ok(())
    }

    /// Two-term integration by parts for `∫_S^∞`; returns the tail value, its remainder bound
    /// and whether the expansion is in its asymptotic regime.
    fn tail(&self, s: T) -> (Complex<T>, T, bool) {
        let i = Complex::new(T::zero(), T::one());
        let f = |u: T| (self.amp)(u) / (i * (self.phase)(u)[1]);
        let h = s * T::lit(1e-4);
        let [phi, d1, _] = (self.phase)(s);
        let term1 = f(s);
        let df = (f(s + h) - f(s - h)) / (T::lit(2.0) * h);
        let term2 = df / (i * d1);
        let value = Complex::new(phi.cos(), phi.sin()) * (term2 - term1);
        // an oscillating amplitude can make F' vanish at S; its rate bounds the typical size
        let (a1, a2) = (term1.norm(), term2.norm().max(term1.norm() * self.amp_rate / d1.abs()));
        let asymptotic = a1.is_finite() && a2.is_finite() && (a2 * T::lit(4.0) <= a1 || a1 == T::zero() && a2 == T::zero());
        let bound = if a1 == T::zero() {
            a2
        } else {
            T::lit(4.0) * a2 * a2 / a1 + a2 * T::lit(1e-6)
        };
        (value, bound, asymptotic)
    }

    pub fn solve(&self, limits: &Limits) -> Result<Outcome<T>> {
        let tol = T::lit(limits.tolerance);
        let stationary = self.stationary_points();
        let mut acc = Accumulator {
            sum: CompensatedSum::new(),
            delta: T::zero(),
            mass: T::zero(),
            pieces: 0,
            nodes: 0,
        };
        let mut cuts = vec![self.start];
        cuts.extend(stationary.iter().copied().filter(|&s| s > self.start));
        if let Some(end) = self.end {
            cuts.retain(|&c| c < end);
            cuts.push(end);
        } else {
            // the tail expansion is tried first at twice the last stationary point, or at the
            // start when nothing oscillates slowly beyond it
            let s_max = stationary.last().copied().unwrap_or(T::zero());
            let first_cut = (T::lit(2.0) * s_max).max(T::lit(4.0) * self.scale);
            if first_cut > self.start {
                cuts.push(first_cut);
            }
        }
        for pair in cuts.windows(2) {
            if pair[1] > pair[0] {
                self.integrate_range(pair[0], pair[1], &mut acc, limits)?;
            }
        }
        let mut cutoff = *cuts.last().expect("nonempty");
        let mut tail_bound = T::zero();
        let mut extra: Option<Outcome<T>> = None;
        if self.end.is_none() {
            let horizon = cutoff.max(self.scale) * T::lit(1e9);
            loop {
                let (tail, bound, asymptotic) = self.tail(cutoff);
                let reference = (acc.sum.value() + tail)
                    .norm()
                    .max(acc.mass * T::lit(MASS_REFERENCE))
                    .max(self.reference);
                if asymptotic && bound <= tol * reference {
                    acc.sum.add(tail);
                    tail_bound = bound;
                    break;
                }
                if let Some((split, from)) = self.split_tail {
                    if cutoff >= from {
                        extra = Some(split(cutoff, reference)?);
                        break;
                    }
                }
                if cutoff > horizon || acc.pieces > limits.max_pieces {
                    return Err(Error::NonConvergence {
                        method: "adaptive quadrature",
                        reached: cutoff.as_f64(),
                        pieces: acc.pieces,
                        tail_bound: bound.as_f64(),
                    });
                }
                let mut next = cutoff * T::lit(TAIL_GROWTH);
                if let Some((_, from)) = self.split_tail {
                    if cutoff < from {
                        next = next.min(from);
                    }
                }
                self.integrate_range(cutoff, next, &mut acc, limits)?;
                cutoff = next;
            }
        }
        let mut out = Outcome {
            value: acc.sum.value(),
            node_delta: acc.delta,
            tail_bound,
            mass: acc.mass,
            pieces: acc.pieces,
            nodes: acc.nodes,
            cutoff,
            stationary,
        };
        if let Some(extra) = extra {
            out.absorb(&extra);
        }
        if !(out.value.re.is_finite() && out.value.im.is_finite()) {
            return Err(Error::Domain {
                what: "oscillatory integrand",
                point: vec![out.cutoff.as_f64()],
            });
        }
        Ok(out)
    }
}

fn bisect<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T, mut fa: T) -> T {
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == T::zero() {
            return m;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) / T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(amp: &AmpFn<'_, f64>, phase: &PhaseFn<'_, f64>, start: f64, end: Option<f64>) -> Outcome<f64> {
        Problem {
            amp,
            phase,
            amp_rate: 0.0,
            start,
            end,
            scale: 1.0,
            reference: 0.0,
            split_tail: None,
        }
        .solve(&Limits::default())
        .unwrap()
    }

    #[test]
    fn half_line_fresnel() {
        // ∫_0^∞ e^{is²} ds = (√π/2) e^{iπ/4}
        let out = solve(&|_| Complex::new(1.0, 0.0), &|s| [s * s, 2.0 * s, 2.0], 0.0, None);
        let want = Complex::from_polar(std::f64::consts::PI.sqrt() / 2.0, std::f64::consts::FRAC_PI_4);
        assert!((out.value - want).norm() < 1e-10, "{} vs {}", out.value, want);
        assert!(out.error_estimate() < 1e-6);
    }

    #[test]
    fn finds_stationary_point() {
        // Φ = s² - 6s has its stationary point at 3
        let out = solve(&|_| Complex::new(1.0, 0.0), &|s| [s * s - 6.0 * s, 2.0 * s - 6.0, 2.0], 0.0, None);
        assert_eq!(out.stationary.len(), 1);
        assert!((out.stationary[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn finite_range_non_oscillatory() {
        let out = solve(&|s| Complex::new(s.exp(), 0.0), &|_| [0.0, 0.0, 0.0], 0.0, Some(2.0));
        assert!((out.value.re - (2f64.exp() - 1.0)).abs() < 1e-13);
        assert_eq!(out.value.im, 0.0);
    }

    #[test]
    fn nonconvergence_is_reported() {
        // amplitude growing like e^s defeats integration by parts
        let problem = Problem {
            amp: &|s: f64| Complex::new(s.exp(), 0.0),
            phase: &|s: f64| [s, 1.0, 0.0],
            amp_rate: 0.0,
            start: 0.0,
            end: None,
            scale: 1.0,
            reference: 0.0,
            split_tail: None,
        };
        let err = problem.solve(&Limits { tolerance: 1e-10, max_pieces: 2_000 }).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
