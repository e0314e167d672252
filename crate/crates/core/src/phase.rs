//! Phase functions `a(ξ)` and their ellipticity / non-degeneracy audit.
//!
//! Built-in kinds are radial power sums `Σ A_j |ξ|^{m_j}`, pure powers `|ξ|^m` and the
//! one-dimensional odd monomial `ξ^k`. Anything else enters as a [`CustomPhase`] carrying
//! caller-supplied gradient and Hessian closures.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

/// Default inner regime radius `r0`.
pub const DEFAULT_R0: f64 = 0.5;
/// Default outer regime radius `R0`.
pub const DEFAULT_R_OUTER: f64 = 2.0;

type ValueFn<T> = dyn Fn(&[T]) -> T + Send + Sync;
type VectorFn<T> = dyn Fn(&[T]) -> Vec<T> + Send + Sync;

/// Caller-defined phase. The Hessian closure returns the `n × n` matrix in row-major order.
#[derive(Clone)]
pub struct CustomPhase<T: Real> {
    pub value: Arc<ValueFn<T>>,
    pub gradient: Arc<VectorFn<T>>,
    pub hessian: Arc<VectorFn<T>>,
}

impl<T: Real> fmt::Debug for CustomPhase<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomPhase")
    }
}

/// One term `coefficient · |ξ|^exponent` of a power sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm<T> {
    pub coefficient: T,
    pub exponent: T,
}

#[derive(Debug, Clone)]
pub enum PhaseKind<T: Real> {
    /// `Σ A_j |ξ|^{m_j}`, terms sorted by exponent.
    PowerSum(Vec<PowerTerm<T>>),
    /// `|ξ|^m`.
    PurePower(T),
    /// `ξ^k` with odd `k ≥ 3`, one dimension only.
    MonomialOdd(u32),
    Custom(CustomPhase<T>),
}

/// Constants of the two-sided gradient and Hessian-determinant bounds.
///
/// `d2_lower`/`d2_upper` bound `|∇a|/|ξ|^{m1-1}` on the inner ball `B1`, `d1_lower`/`d1_upper`
/// bound `|∇a|/|ξ|^{m2-1}` on the outer region `B2`. `c1`/`c2` are the gradient constants of the
/// outer region used by the single-regime lemmas, and `c1_hess`/`c2_hess` bound
/// `|det Ha|/|ξ|^{n(m-2)}`. Constants are `None` until known analytically or audited.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EllipticityConstants<T> {
    pub c1: Option<T>,
    pub c2: Option<T>,
    pub c1_hess: Option<T>,
    pub c2_hess: Option<T>,
    pub d1_lower: Option<T>,
    pub d1_upper: Option<T>,
    pub d2_lower: Option<T>,
    pub d2_upper: Option<T>,
}

#[derive(Debug, Clone)]
pub struct PhaseSpec<T: Real> {
    dimension: usize,
    kind: PhaseKind<T>,
    m1: T,
    m2: T,
    r0: T,
    r_outer: T,
    ellipticity: EllipticityConstants<T>,
}

impl<T: Real> PhaseSpec<T> {
    /// Power sum `Σ A_j |ξ|^{m_j}`. Leading and trailing coefficients must be positive, interior
    /// ones nonnegative, and every exponent must exceed one.
    pub fn power_sum(dimension: usize, terms: &[(T, T)]) -> Result<Self> {
        Self::power_sum_with_radii(dimension, terms, T::lit(DEFAULT_R0), T::lit(DEFAULT_R_OUTER))
    }

    pub fn power_sum_with_radii(dimension: usize, terms: &[(T, T)], r0: T, r_outer: T) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("power sum needs at least one term".into()));
        }
        let mut sorted: Vec<PowerTerm<T>> = terms
            .iter()
            .map(|&(coefficient, exponent)| PowerTerm { coefficient, exponent })
            .collect();
        sorted.sort_by(|a, b| a.exponent.partial_cmp(&b.exponent).expect("finite exponents"));
        for term in &sorted {
            if !(term.exponent > T::one()) || !term.exponent.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "power sum exponents must exceed 1, got {}",
                    term.exponent
                )));
            }
            if term.coefficient < T::zero() || !term.coefficient.is_finite() {
                return Err(Error::InvalidSpec("power sum coefficients must be nonnegative".into()));
            }
        }
        let first = sorted[0];
        let last = sorted[sorted.len() - 1];
        if !(first.coefficient > T::zero() && last.coefficient > T::zero()) {
            return Err(Error::InvalidSpec(
                "leading and trailing power sum coefficients must be positive".into(),
            ));
        }
        let spec = Self::build(dimension, PhaseKind::PowerSum(sorted), first.exponent, last.exponent, r0, r_outer)?;
        Ok(spec)
    }

    /// Pure power `|ξ|^m`, `m > 1`.
    pub fn pure_power(dimension: usize, m: T) -> Result<Self> {
        if !(m > T::one()) || !m.is_finite() {
            return Err(Error::InvalidSpec(format!("pure power exponent must exceed 1, got {m}")));
        }
        Self::build(dimension, PhaseKind::PurePower(m), m, m, T::lit(DEFAULT_R0), T::lit(DEFAULT_R_OUTER))
    }

    /// One-dimensional odd monomial `ξ^k`, `k ≥ 3` odd.
    pub fn monomial_odd(degree: u32) -> Result<Self> {
        if degree < 3 || degree % 2 == 0 {
            return Err(Error::InvalidSpec(format!("monomial degree must be odd and >= 3, got {degree}")));
        }
        let m = T::from_u32(degree).expect("small integer");
        Self::build(1, PhaseKind::MonomialOdd(degree), m, m, T::lit(DEFAULT_R0), T::lit(DEFAULT_R_OUTER))
    }

    /// Caller-defined phase with declared growth orders. Ellipticity constants stay unknown
    /// until [`PhaseSpec::verify_ellipticity`] is run.
    pub fn custom(dimension: usize, phase: CustomPhase<T>, m1: T, m2: T) -> Result<Self> {
        Self::build(dimension, PhaseKind::Custom(phase), m1, m2, T::lit(DEFAULT_R0), T::lit(DEFAULT_R_OUTER))
    }

    fn build(dimension: usize, kind: PhaseKind<T>, m1: T, m2: T, r0: T, r_outer: T) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if !(m1 > T::one() && m2 >= m1) {
            return Err(Error::InvalidSpec(format!("need m2 >= m1 > 1, got m1 = {m1}, m2 = {m2}")));
        }
        if !(r0 > T::zero() && r_outer > r0) {
            return Err(Error::InvalidSpec(format!("need R0 > r0 > 0, got r0 = {r0}, R0 = {r_outer}")));
        }
        let mut spec = Self {
            dimension,
            kind,
            m1,
            m2,
            r0,
            r_outer,
            ellipticity: EllipticityConstants::default(),
        };
        spec.ellipticity = spec.analytic_constants();
        spec.check_compatibility()?;
        Ok(spec)
    }

    /// Constants known in closed form: exact for pure powers and monomials, the calculus bounds
    /// for power sums.
    fn analytic_constants(&self) -> EllipticityConstants<T> {
        let n = T::from_usize(self.dimension).expect("dimension");
        match &self.kind {
            PhaseKind::PurePower(_) | PhaseKind::PowerSum(_) if self.is_single_power().is_some() => {
                let (coef, m) = self.is_single_power().expect("checked");
                let g = coef * m;
                // det H = f''·(f'/s)^{n-1} = A m (m-1) (A m)^{n-1} s^{n(m-2)}
                let h = g.powf(n) * (m - T::one());
                EllipticityConstants {
                    c1: Some(g),
                    c2: Some(g),
                    c1_hess: Some(h),
                    c2_hess: Some(h),
                    d1_lower: Some(g),
                    d1_upper: Some(g),
                    d2_lower: Some(g),
                    d2_upper: Some(g),
                }
            }
            PhaseKind::PurePower(_) => unreachable!("pure powers are single powers"),
            PhaseKind::PowerSum(terms) => {
                let first = terms[0];
                let last = terms[terms.len() - 1];
                let inner_upper = terms.iter().skip(1).fold(first.coefficient * first.exponent, |acc, t| {
                    acc + t.coefficient * t.exponent * self.r_outer.powf(t.exponent - first.exponent)
                });
                let outer_upper = terms.iter().take(terms.len() - 1).fold(last.coefficient * last.exponent, |acc, t| {
                    acc + t.coefficient * t.exponent * self.r0.powf(t.exponent - last.exponent)
                });
                EllipticityConstants {
                    c1: Some(last.coefficient * last.exponent),
                    c2: Some(outer_upper),
                    c1_hess: None,
                    c2_hess: None,
                    d1_lower: Some(last.coefficient * last.exponent),
                    d1_upper: Some(outer_upper),
                    d2_lower: Some(first.coefficient * first.exponent),
                    d2_upper: Some(inner_upper),
                }
            }
            PhaseKind::MonomialOdd(k) => {
                let k = T::from_u32(*k).expect("degree");
                let h = k * (k - T::one());
                EllipticityConstants {
                    c1: Some(k),
                    c2: Some(k),
                    c1_hess: Some(h),
                    c2_hess: Some(h),
                    d1_lower: Some(k),
                    d1_upper: Some(k),
                    d2_lower: Some(k),
                    d2_upper: Some(k),
                }
            }
            PhaseKind::Custom(_) => EllipticityConstants::default(),
        }
    }

    /// `Some((A, m))` when the phase is a single power `A|ξ|^m`.
    fn is_single_power(&self) -> Option<(T, T)> {
        match &self.kind {
            PhaseKind::PurePower(m) => Some((T::one(), *m)),
            PhaseKind::PowerSum(terms) => {
                let live: Vec<_> = terms.iter().filter(|t| t.coefficient > T::zero()).collect();
                (live.len() == 1).then(|| (live[0].coefficient, live[0].exponent))
            }
            _ => None,
        }
    }

    /// `d1 r0^{m2-1} <= d2 R0^{m1-1}` whenever the constants are known.
    fn check_compatibility(&self) -> Result<()> {
        if let (Some(d1), Some(d2)) = (self.ellipticity.d1_lower, self.ellipticity.d2_upper) {
            let lhs = d1 * self.r0.powf(self.m2 - T::one());
            let rhs = d2 * self.r_outer.powf(self.m1 - T::one());
            if lhs > rhs * (T::one() + T::lit(1e-12)) {
                return Err(Error::Hypothesis(format!(
                    "compatibility d1 r0^(m2-1) <= d2 R0^(m1-1) fails: {lhs} > {rhs}"
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &PhaseKind<T> {
        &self.kind
    }

    pub fn m1(&self) -> T {
        self.m1
    }

    pub fn m2(&self) -> T {
        self.m2
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn r_outer(&self) -> T {
        self.r_outer
    }

    pub fn ellipticity(&self) -> &EllipticityConstants<T> {
        &self.ellipticity
    }

    pub fn with_radii(mut self, r0: T, r_outer: T) -> Result<Self> {
        if !(r0 > T::zero() && r_outer > r0) {
            return Err(Error::InvalidSpec(format!("need R0 > r0 > 0, got r0 = {r0}, R0 = {r_outer}")));
        }
        self.r0 = r0;
        self.r_outer = r_outer;
        let known = self.ellipticity;
        self.ellipticity = self.analytic_constants();
        if matches!(self.kind, PhaseKind::Custom(_)) {
            self.ellipticity = known;
        }
        self.check_compatibility()?;
        Ok(self)
    }

    /// Replaces the ellipticity constants (typically with audited ones).
    pub fn with_ellipticity(mut self, constants: EllipticityConstants<T>) -> Result<Self> {
        self.ellipticity = constants;
        self.check_compatibility()?;
        Ok(self)
    }

    /// True for phases of the form `f(|ξ|)`.
    pub fn is_radial(&self) -> bool {
        matches!(self.kind, PhaseKind::PowerSum(_) | PhaseKind::PurePower(_))
    }

    /// True when every term is a multiple of `|ξ|^2`, i.e. the phase factorises over axes.
    pub fn is_quadratic(&self) -> bool {
        matches!(self.is_single_power(), Some((_, m)) if m == T::lit(2.0))
    }

    /// Radial profile `(f(s), f'(s), f''(s))` for radial kinds, `s ≥ 0`.
    pub fn radial(&self, s: T) -> Option<[T; 3]> {
        let power = |a: T, m: T| -> [T; 3] {
            if s == T::zero() {
                let two = T::lit(2.0);
                let d2 = if m == two { a * two } else if m < two { T::infinity() } else { T::zero() };
                return [T::zero(), T::zero(), d2];
            }
            let sm2 = s.powf(m - T::lit(2.0));
            [a * sm2 * s * s, a * m * sm2 * s, a * m * (m - T::one()) * sm2]
        };
        match &self.kind {
            PhaseKind::PurePower(m) => Some(power(T::one(), *m)),
            PhaseKind::PowerSum(terms) => Some(terms.iter().fold([T::zero(); 3], |acc, t| {
                let v = power(t.coefficient, t.exponent);
                [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
            })),
            _ => None,
        }
    }

    /// `(a, a', a'')` along the real line; one-dimensional phases only.
    pub fn line(&self, xi: T) -> Result<[T; 3]> {
        debug_assert_eq!(self.dimension, 1);
        match &self.kind {
            PhaseKind::MonomialOdd(k) => {
                let k_t = T::from_u32(*k).expect("degree");
                let p2 = xi.powi(*k as i32 - 2);
                Ok([p2 * xi * xi, k_t * p2 * xi, k_t * (k_t - T::one()) * p2])
            }
            PhaseKind::Custom(c) => {
                let p = [xi];
                Ok([(c.value)(&p), (c.gradient)(&p)[0], (c.hessian)(&p)[0]])
            }
            _ => {
                let s = xi.abs();
                let [f, d1, d2] = self.radial(s).expect("radial kind");
                let sign = if xi < T::zero() { -T::one() } else { T::one() };
                Ok([f, sign * d1, d2])
            }
        }
    }

    /// Evaluates `a(ξ)`.
    pub fn eval(&self, xi: &[T]) -> Result<T> {
        self.check_dim(xi)?;
        let value = match &self.kind {
            PhaseKind::Custom(c) => (c.value)(xi),
            PhaseKind::MonomialOdd(k) => xi[0].powi(*k as i32),
            _ => self.radial(norm(xi)).expect("radial kind")[0],
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Domain { what: "phase", point: to_f64_vec(xi) })
        }
    }

    /// Gradient `∇a(ξ)`; undefined at the origin.
    pub fn grad(&self, xi: &[T]) -> Result<Vec<T>> {
        self.check_dim(xi)?;
        self.check_nonzero(xi, "phase gradient")?;
        let g = match &self.kind {
            PhaseKind::Custom(c) => (c.gradient)(xi),
            PhaseKind::MonomialOdd(_) => vec![self.line(xi[0])?[1]],
            _ => {
                let s = norm(xi);
                let d1 = self.radial(s).expect("radial kind")[1];
                xi.iter().map(|&x| d1 * x / s).collect()
            }
        };
        if g.len() != self.dimension || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain { what: "phase gradient", point: to_f64_vec(xi) });
        }
        Ok(g)
    }

    /// Hessian matrix, row-major.
    pub fn hessian(&self, xi: &[T]) -> Result<Vec<T>> {
        self.check_dim(xi)?;
        self.check_nonzero(xi, "phase Hessian")?;
        let n = self.dimension;
        let h = match &self.kind {
            PhaseKind::Custom(c) => (c.hessian)(xi),
            PhaseKind::MonomialOdd(_) => vec![self.line(xi[0])?[2]],
            _ => {
                // H = f'/s · I + (f'' - f'/s) · ξξᵀ/s²
                let s = norm(xi);
                let [_, d1, d2] = self.radial(s).expect("radial kind");
                let tangential = d1 / s;
                let mut h = vec![T::zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        let outer = (d2 - tangential) * xi[i] * xi[j] / (s * s);
                        h[i * n + j] = outer + if i == j { tangential } else { T::zero() };
                    }
                }
                h
            }
        };
        if h.len() != n * n {
            return Err(Error::InvalidSpec("custom Hessian has wrong size".into()));
        }
        Ok(h)
    }

    /// `det Ha(ξ)`. Radial kinds use `f''·(f'/s)^{n-1}` directly.
    pub fn hessian_det(&self, xi: &[T]) -> Result<T> {
        self.check_dim(xi)?;
        self.check_nonzero(xi, "phase Hessian")?;
        let det = match &self.kind {
            PhaseKind::PowerSum(_) | PhaseKind::PurePower(_) => {
                let s = norm(xi);
                let [_, d1, d2] = self.radial(s).expect("radial kind");
                d2 * (d1 / s).powi(self.dimension as i32 - 1)
            }
            _ => determinant(self.hessian(xi)?, self.dimension),
        };
        if det.is_finite() {
            Ok(det)
        } else {
            Err(Error::Domain { what: "phase Hessian", point: to_f64_vec(xi) })
        }
    }

    /// Upper bound of `|∇a|` on the ball of radius `radius`.
    pub fn gradient_bound(&self, radius: T) -> T {
        match &self.kind {
            PhaseKind::PowerSum(_) | PhaseKind::PurePower(_) => self.radial(radius).expect("radial")[1],
            PhaseKind::MonomialOdd(_) => self.line(radius).map(|v| v[1].abs()).unwrap_or(T::infinity()),
            PhaseKind::Custom(_) => {
                let c2 = self.ellipticity.c2.or(self.ellipticity.d1_upper).unwrap_or(T::one());
                c2 * radius.powf(self.m2 - T::one())
            }
        }
    }

    fn check_dim(&self, xi: &[T]) -> Result<()> {
        if xi.len() != self.dimension {
            return Err(Error::InvalidSpec(format!(
                "point has dimension {}, phase has {}",
                xi.len(),
                self.dimension
            )));
        }
        Ok(())
    }

    fn check_nonzero(&self, xi: &[T], what: &'static str) -> Result<()> {
        if xi.iter().all(|&x| x == T::zero()) {
            return Err(Error::Domain { what, point: to_f64_vec(xi) });
        }
        Ok(())
    }

    /// Samples the gradient and Hessian-determinant ratios over log-spaced shells of the inner
    /// ball `B1` (against `m1`) and outer region `B2` (against `m2`).
    ///
    /// Failure is reported in the returned value, never as an error.
    pub fn verify_ellipticity(&self, shell_samples: usize) -> Result<EllipticityReport<T>> {
        if shell_samples < 16 {
            return Err(Error::InvalidSpec(format!("shell_samples must be >= 16, got {shell_samples}")));
        }
        let directions = sphere_directions::<T>(self.dimension, shell_samples);
        let inner_radii = log_radii(self.r_outer * T::lit(1e-6), self.r_outer * T::lit(0.999), shell_samples);
        let outer_radii = log_radii(self.r0 * T::lit(1.001), self.r0 * T::lit(1e6), shell_samples);
        let inner = self.sample_region(&inner_radii, &directions, self.m1, Region::Inner)?;
        let outer = self.sample_region(&outer_radii, &directions, self.m2, Region::Outer)?;

        let violation = [&inner, &outer]
            .into_iter()
            .flat_map(|r| [r.gradient.check(self.dimension), r.hessian.check(self.dimension)])
            .flatten()
            .next();
        let constants = EllipticityConstants {
            c1: Some(outer.gradient.min),
            c2: Some(outer.gradient.max),
            c1_hess: Some(inner.hessian.min.min(outer.hessian.min)),
            c2_hess: Some(inner.hessian.max.max(outer.hessian.max)),
            d1_lower: Some(outer.gradient.min),
            d1_upper: Some(outer.gradient.max),
            d2_lower: Some(inner.gradient.min),
            d2_upper: Some(inner.gradient.max),
        };
        Ok(EllipticityReport {
            holds: violation.is_none(),
            inner,
            outer,
            constants,
            violation,
        })
    }

    /// Runs the audit and returns the phase updated with the empirical constants.
    pub fn audited(self, shell_samples: usize) -> Result<(Self, EllipticityReport<T>)> {
        let report = self.verify_ellipticity(shell_samples)?;
        let spec = self.with_ellipticity(report.constants)?;
        Ok((spec, report))
    }

    fn sample_region(&self, radii: &[T], directions: &[Vec<T>], m: T, region: Region) -> Result<RegionAudit<T>> {
        let n = T::from_usize(self.dimension).expect("dimension");
        let mut gradient = RatioStats::new(region, RatioKind::Gradient);
        let mut hessian = RatioStats::new(region, RatioKind::HessianDet);
        for &r in radii {
            for dir in directions {
                let xi: Vec<T> = dir.iter().map(|&d| d * r).collect();
                let g = norm(&self.grad(&xi)?);
                gradient.push(g / r.powf(m - T::one()), &xi);
                let h = self.hessian_det(&xi)?.abs();
                hessian.push(h / r.powf(n * (m - T::lit(2.0))), &xi);
            }
        }
        Ok(RegionAudit { gradient, hessian })
    }

    /// Validated JSON form; custom phases cannot be serialised.
    pub fn to_config(&self) -> Result<PhaseConfig> {
        let radii = Radii {
            r0: Some(self.r0.as_f64()),
            r_outer: Some(self.r_outer.as_f64()),
        };
        Ok(match &self.kind {
            PhaseKind::PowerSum(terms) => PhaseConfig::PowerSum {
                terms: terms.iter().map(|t| [t.coefficient.as_f64(), t.exponent.as_f64()]).collect(),
                dimension: self.dimension,
                radii,
            },
            PhaseKind::PurePower(m) => PhaseConfig::PurePower {
                exponent: m.as_f64(),
                dimension: self.dimension,
                radii,
            },
            PhaseKind::MonomialOdd(k) => PhaseConfig::MonomialOdd1d { degree: *k },
            PhaseKind::Custom(_) => {
                return Err(Error::Config("custom phases have no JSON form".into()));
            }
        })
    }

    pub fn from_config(config: &PhaseConfig) -> Result<Self> {
        let with = |spec: Self, radii: &Radii| -> Result<Self> {
            match (radii.r0, radii.r_outer) {
                (None, None) => Ok(spec),
                (r0, r_outer) => spec.with_radii(
                    T::lit(r0.unwrap_or(DEFAULT_R0)),
                    T::lit(r_outer.unwrap_or(DEFAULT_R_OUTER)),
                ),
            }
        };
        match config {
            PhaseConfig::PowerSum { terms, dimension, radii } => {
                let terms: Vec<(T, T)> = terms.iter().map(|&[a, m]| (T::lit(a), T::lit(m))).collect();
                with(Self::power_sum(*dimension, &terms)?, radii)
            }
            PhaseConfig::PurePower { exponent, dimension, radii } => {
                with(Self::pure_power(*dimension, T::lit(*exponent))?, radii)
            }
            PhaseConfig::MonomialOdd1d { degree } => Self::monomial_odd(*degree),
        }
    }
}

/// JSON form of a phase, e.g. `{"kind":"power_sum","terms":[[1.0,4.0],[1.0,2.0]],"dimension":1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseConfig {
    PowerSum {
        terms: Vec<[f64; 2]>,
        dimension: usize,
        #[serde(flatten)]
        radii: Radii,
    },
    PurePower {
        exponent: f64,
        dimension: usize,
        #[serde(flatten)]
        radii: Radii,
    },
    #[serde(rename = "monomial_odd_1d")]
    MonomialOdd1d { degree: u32 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, rename = "R0", skip_serializing_if = "Option::is_none")]
    pub r_outer: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `B1 = {0 < |ξ| < R0}`.
    Inner,
    /// `B2 = {|ξ| > r0}`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    Gradient,
    HessianDet,
}

/// Largest tolerated max/min spread of the sampled gradient ratio over twelve decades of radii.
/// The Hessian-determinant ratio is a product of `n` such factors and gets the `n`-th power.
const MAX_RATIO_SPREAD: f64 = 1e4;

#[derive(Debug, Clone)]
pub struct RatioStats<T> {
    pub region: Region,
    pub kind: RatioKind,
    pub min: T,
    pub max: T,
    pub argmin: Vec<T>,
    pub argmax: Vec<T>,
}

impl<T: Real> RatioStats<T> {
    fn new(region: Region, kind: RatioKind) -> Self {
        Self {
            region,
            kind,
            min: T::infinity(),
            max: T::zero(),
            argmin: Vec::new(),
            argmax: Vec::new(),
        }
    }

    fn push(&mut self, ratio: T, xi: &[T]) {
        let ratio = if ratio.is_nan() { T::infinity() } else { ratio };
        if ratio < self.min || self.argmin.is_empty() {
            self.min = ratio;
            self.argmin = xi.to_vec();
        }
        if ratio > self.max || self.argmax.is_empty() {
            self.max = ratio;
            self.argmax = xi.to_vec();
        }
    }

    fn check(&self, dimension: usize) -> Option<Violation<T>> {
        let spread = self.max / self.min;
        let limit = match self.kind {
            RatioKind::Gradient => T::lit(MAX_RATIO_SPREAD),
            RatioKind::HessianDet => T::lit(MAX_RATIO_SPREAD).powi(dimension as i32),
        };
        let degenerate_low = !(self.min > T::zero());
        let degenerate_high = !self.max.is_finite();
        if !(degenerate_low || degenerate_high || spread > limit) {
            return None;
        }
        // blame whichever extreme sits further from the bulk
        let blame_min = degenerate_low || (!degenerate_high && self.min.ln().abs() >= self.max.ln().abs());
        let (xi, ratio) = if blame_min {
            (self.argmin.clone(), self.min)
        } else {
            (self.argmax.clone(), self.max)
        };
        Some(Violation {
            region: self.region,
            kind: self.kind,
            xi,
            ratio,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RegionAudit<T> {
    pub gradient: RatioStats<T>,
    pub hessian: RatioStats<T>,
}

/// A sampled point where a ratio degenerates.
#[derive(Debug, Clone)]
pub struct Violation<T> {
    pub region: Region,
    pub kind: RatioKind,
    pub xi: Vec<T>,
    pub ratio: T,
}

#[derive(Debug, Clone)]
pub struct EllipticityReport<T> {
    pub holds: bool,
    pub inner: RegionAudit<T>,
    pub outer: RegionAudit<T>,
    pub constants: EllipticityConstants<T>,
    pub violation: Option<Violation<T>>,
}

fn log_radii<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    crate::scalar::log_space(lo.as_f64(), hi.as_f64(), count)
        .into_iter()
        .map(T::lit)
        .collect()
}

/// Deterministic unit directions: coordinate axes, the diagonal cone and seeded random points.
fn sphere_directions<T: Real>(n: usize, count: usize) -> Vec<Vec<T>> {
    if n == 1 {
        return vec![vec![T::one()], vec![-T::one()]];
    }
    let mut dirs = Vec::with_capacity(count + n + 1);
    for axis in 0..n {
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        dirs.push(e);
    }
    dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e111);
    while dirs.len() < count + n + 1 {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                // Box–Muller
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let len = norm(&v);
        if len > 1e-8 {
            dirs.push(v.iter().map(|x| x / len).collect());
        }
    }
    dirs.into_iter()
        .map(|d| d.into_iter().map(T::lit).collect())
        .collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Real>(mut a: Vec<T>, n: usize) -> T {
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).expect("finite"))
            .expect("nonempty");
        if a[pivot * n + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            for k in col..n {
                a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
            }
        }
    }
    det
}

fn to_f64_vec<T: Real>(xi: &[T]) -> Vec<f64> {
    xi.iter().map(|x| x.as_f64()).collect()
}
