//! Power-law fits of measured decay and envelope domination checks.
//!
//! Exponents are signed log-log slopes: a kernel decaying like `|t|^{-1/4}` has predicted
//! exponent `-1/4`. Fits run on `f64` regardless of the sample scalar.

use serde_json::{json, Value};

use crate::envelope::DecayEnvelope;
use crate::error::{Error, Result};
use crate::oscint::KernelSample;
use crate::scalar::{log_space, ExactScalar, Real};

/// Default tolerance on fitted exponents.
pub const DEFAULT_TOLERANCE: f64 = 0.05;
/// Minimum number of points entering a regression.
pub const MIN_POINTS: usize = 8;
/// Minimum span of the swept variable, in decades.
pub const MIN_DECADES: f64 = 2.0;
/// Minimum span of an operator-norm time curve, in decades.
pub const MIN_CURVE_DECADES: f64 = 1.0;
/// Below this `R²` a spatial fit is reported as oscillation dominated.
pub const MIN_R_SQUARED: f64 = 0.9;
/// Log-scale spread below which data count as flat (perfectly fitted).
pub const FLAT_SPREAD: f64 = 1e-6;
/// Samples per envelope piece required by [`check_domination`].
pub const MIN_PIECE_POINTS: usize = 16;
/// `C_fit` may change by less than this factor under refinement.
pub const STABILITY_FACTOR: f64 = 2.0;
/// Samples whose error estimate exceeds this fraction of `|I|` are flagged.
pub const ERROR_FLAG_FRACTION: f64 = 0.1;
/// Default widening of the refined domination grid on each side.
pub const DEFAULT_EXTENSION: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Which variable a fit regresses against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptVariable {
    /// `|t|`.
    Time,
    /// `1 + |t|^{-1/m}|x|`.
    ScaledSpace,
}

/// Outcome of a log-log fit against a predicted exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport<E> {
    pub regime: String,
    pub variable: SweptVariable,
    pub predicted: E,
    pub fitted: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Range of `|t|`, or of `|t|^{-1/m}|x|` for spatial fits.
    pub fit_window: (f64, f64),
    pub n_points: usize,
    pub r_squared: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl<E: ExactScalar> ExponentReport<E> {
    /// Re-judges the same fit at another tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        let mut out = self.clone();
        out.tolerance = tolerance;
        out.verdict = judge(self.fitted, self.stderr, self.predicted.to_float(), tolerance);
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "regime": self.regime,
            "variable": match self.variable {
                SweptVariable::Time => "|t|",
                SweptVariable::ScaledSpace => "1+|t|^(-1/m)|x|",
            },
            "predicted_exponent": {"exact": self.predicted.render(), "value": self.predicted.to_float()},
            "fitted_exponent": self.fitted,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "fit_window": [self.fit_window.0, self.fit_window.1],
            "n_points": self.n_points,
            "r_squared": self.r_squared,
            "tolerance": self.tolerance,
            "verdict": self.verdict.as_str(),
        })
    }
}

fn judge(fitted: f64, stderr: f64, predicted: f64, tolerance: f64) -> Verdict {
    if (fitted - predicted).abs() <= tolerance && stderr <= tolerance / 2.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)`; needs at least three points with distinct `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::InsufficientPoints { found: n.min(y.len()), required: 3 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientSpan { span: 0.0, required: MIN_DECADES });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr = (ss_res / (nf - 2.0) / sxx).sqrt();
    // Data flat to quadrature accuracy carry no trend to explain.
    let r_squared = if (syy / nf).sqrt() <= FLAT_SPREAD || ss_res <= 1e-24 * nf {
        1.0
    } else {
        1.0 - ss_res / syy
    };
    Ok(LineFit { slope, intercept, stderr, r_squared })
}

fn check_window(vars: &[f64]) -> Result<(f64, f64)> {
    check_window_span(vars, MIN_DECADES)
}

fn check_window_span(vars: &[f64], required: f64) -> Result<(f64, f64)> {
    if vars.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints { found: vars.len(), required: MIN_POINTS });
    }
    let lo = vars.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vars.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // a hair of slack so that log-spaced endpoints of exactly `required` decades pass
    let span = (hi / lo).log10();
    if !(span >= required - 1e-9) {
        return Err(Error::InsufficientSpan { span: if span.is_finite() { span } else { 0.0 }, required });
    }
    Ok((lo, hi))
}

fn usable<T: Real>(s: &KernelSample<T>) -> Result<f64> {
    let v = s.modulus().to_f64().unwrap_or(f64::NAN);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "sample at t = {} has modulus {v}; a log-log fit needs positive values",
            s.t
        )));
    }
    Ok(v)
}

/// Fits `log|I|` against `log|t|` on the raw samples. The caller keeps the samples inside one
/// regime (for instance `x = 0` for the inner regime).
pub fn fit_time_decay<T: Real, E: ExactScalar>(
    samples: &[KernelSample<T>],
    regime: &str,
    predicted: E,
    tolerance: f64,
) -> Result<ExponentReport<E>> {
    let times: Vec<f64> = samples.iter().map(|s| s.t.to_f64().unwrap_or(f64::NAN).abs()).collect();
    check_window(&times)?;
    let values = samples.iter().map(usable).collect::<Result<Vec<_>>>()?;
    fit_power_law(&times, &values, regime, predicted, tolerance)
}

/// Fits `log value` against `log |t|` for any positive time curve, such as measured operator
/// norms. Needs [`MIN_CURVE_DECADES`] of `|t|`.
pub fn fit_power_law<E: ExactScalar>(
    times: &[f64],
    values: &[f64],
    regime: &str,
    predicted: E,
    tolerance: f64,
) -> Result<ExponentReport<E>> {
    if times.len() != values.len() {
        return Err(Error::InvalidSpec("times and values differ in length".into()));
    }
    let vars: Vec<f64> = times.iter().map(|t| t.abs()).collect();
    let window = check_window_span(&vars, MIN_CURVE_DECADES)?;
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidSpec(format!("a log-log fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = vars.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = least_squares(&lx, &ly)?;
    Ok(ExponentReport {
        regime: regime.to_string(),
        variable: SweptVariable::Time,
        verdict: judge(fit.slope, fit.stderr, predicted.to_float(), tolerance),
        predicted,
        fitted: fit.slope,
        stderr: fit.stderr,
        intercept: fit.intercept,
        fit_window: window,
        n_points: vars.len(),
        r_squared: fit.r_squared,
        tolerance,
    })
}

/// Upper envelope of an oscillating sequence ordered by the swept variable: each value is
/// replaced by the largest value at or beyond its position. Never below the input.
pub fn decreasing_envelope(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].max(out[i + 1]);
    }
    out
}

/// Interior indices where the sequence has a local maximum.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Fits the envelope of local maxima of `|I|` against `1 + |t|^{-1/m}|x|` at fixed `t`.
///
/// Samples are sorted by `|x|`. When at least [`MIN_POINTS`] interior maxima exist the fit
/// uses them (valued by the decreasing envelope); otherwise the data are not oscillating and
/// every point enters through the envelope. A fit with `R² <` [`MIN_R_SQUARED`] is an
/// [`Error::OscillationDominated`].
pub fn fit_space_decay<T: Real, E: ExactScalar>(
    samples: &[KernelSample<T>],
    regime: &str,
    m: &E,
    predicted: E,
    tolerance: f64,
) -> Result<ExponentReport<E>> {
    if samples.is_empty() {
        return Err(Error::InsufficientPoints { found: 0, required: MIN_POINTS });
    }
    let t = samples[0].t.to_f64().unwrap_or(f64::NAN);
    if samples.iter().any(|s| s.t.to_f64() != Some(t)) {
        return Err(Error::InvalidSpec("spatial fit needs samples at a single time".into()));
    }
    let m = m.to_float();
    if !(m > 0.0) {
        return Err(Error::InvalidSpec(format!("order m = {m} must be positive")));
    }
    let scale = t.abs().powf(-1.0 / m);
    let mut rows: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| Ok((1.0 + scale * s.x_norm().to_f64().unwrap_or(f64::NAN), usable(s)?)))
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vars: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let raw: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let scaled: Vec<f64> = vars.iter().map(|v| v - 1.0).collect();
    let window = check_window(&scaled)?;
    let envelope = decreasing_envelope(&raw);
    let maxima = local_maxima(&raw);
    let chosen: Vec<usize> = if maxima.len() >= MIN_POINTS {
        maxima
    } else {
        (0..rows.len()).collect()
    };
    let lx: Vec<f64> = chosen.iter().map(|&i| vars[i].ln()).collect();
    let ly: Vec<f64> = chosen.iter().map(|&i| envelope[i].ln()).collect();
    let fit = least_squares(&lx, &ly)?;
    if fit.r_squared < MIN_R_SQUARED {
        return Err(Error::OscillationDominated { r_squared: fit.r_squared });
    }
    Ok(ExponentReport {
        regime: regime.to_string(),
        variable: SweptVariable::ScaledSpace,
        verdict: judge(fit.slope, fit.stderr, predicted.to_float(), tolerance),
        predicted,
        fitted: fit.slope,
        stderr: fit.stderr,
        intercept: fit.intercept,
        fit_window: window,
        n_points: chosen.len(),
        r_squared: fit.r_squared,
        tolerance,
    })
}

/// Log-spaced `(t, x)` grid with `x = s·direction`, `s` log-spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationGrid {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub t_points: usize,
    pub x_points: usize,
    /// Unit direction of `x`.
    pub direction: Vec<f64>,
}

impl DominationGrid {
    pub fn new(dimension: usize, t_range: (f64, f64), x_range: (f64, f64), points: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        let mut direction = vec![0.0; dimension];
        direction[0] = 1.0;
        let grid = Self {
            t_range,
            x_range,
            t_points: points,
            x_points: points,
            direction,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo > 0.0 && hi > lo && hi.is_finite();
        if !ok(self.t_range) || !ok(self.x_range) {
            return Err(Error::InvalidSpec("grid ranges need 0 < lo < hi < ∞".into()));
        }
        if self.t_points < 2 || self.x_points < 2 {
            return Err(Error::InvalidSpec("grid needs at least two points per axis".into()));
        }
        let len = crate::scalar::norm(&self.direction);
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec("grid direction must be a unit vector".into()));
        }
        Ok(())
    }

    /// Grid points in row-major `(t, x)` order.
    pub fn points(&self) -> Vec<(f64, Vec<f64>)> {
        let ts = log_space(self.t_range.0, self.t_range.1, self.t_points);
        let xs = log_space(self.x_range.0, self.x_range.1, self.x_points);
        ts.iter()
            .flat_map(|&t| {
                xs.iter()
                    .map(move |&s| (t, self.direction.iter().map(|d| d * s).collect()))
            })
            .collect::<Vec<_>>()
    }

    /// Twice the log density of `self` over both ranges widened by `extension` on each side.
    pub fn refined(&self, extension: f64) -> Self {
        let axis = |(lo, hi): (f64, f64), n: usize| {
            let base = (hi / lo).ln();
            let wide = base + 2.0 * extension.ln();
            let count = (2.0 * (n - 1) as f64 * wide / base).ceil() as usize + 1;
            ((lo / extension, hi * extension), count)
        };
        let (t_range, t_points) = axis(self.t_range, self.t_points);
        let (x_range, x_points) = axis(self.x_range, self.x_points);
        Self {
            t_range,
            x_range,
            t_points,
            x_points,
            direction: self.direction.clone(),
        }
    }
}

/// Supremum of `|I|/E` over a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationFit {
    pub c_fit: f64,
    /// `(t, |x|)` where the supremum is attained.
    pub argmax: (f64, f64),
    /// Per envelope piece: regime name, sample count and the piece's own supremum.
    pub pieces: Vec<(String, usize, f64)>,
    /// Samples with `est_error > 0.1 |I|`.
    pub flagged: usize,
    /// Samples outside every regime (not counted in `c_fit`).
    pub uncovered: usize,
}

/// `C_fit = max |I(t,x)|/E(t,x)` over the samples.
pub fn domination_constant<T: Real, E: ExactScalar>(samples: &[KernelSample<T>], envelope: &DecayEnvelope<E>) -> DominationFit {
    let mut pieces: Vec<(String, usize, f64)> = envelope
        .pieces
        .iter()
        .map(|p| (p.regime.name.to_string(), 0, 0.0))
        .collect();
    let mut fit = DominationFit {
        c_fit: 0.0,
        argmax: (f64::NAN, f64::NAN),
        pieces: Vec::new(),
        flagged: 0,
        uncovered: 0,
    };
    for s in samples {
        let t = s.t.to_f64().unwrap_or(f64::NAN);
        let x = s.x_norm().to_f64().unwrap_or(f64::NAN);
        let value = s.modulus().to_f64().unwrap_or(f64::NAN);
        if s.est_error.to_f64().unwrap_or(f64::INFINITY) > ERROR_FLAG_FRACTION * value {
            fit.flagged += 1;
        }
        let Some(k) = envelope.piece_index(t, x) else {
            fit.uncovered += 1;
            continue;
        };
        let ratio = value / envelope.pieces[k].rate.eval(t, x);
        pieces[k].1 += 1;
        pieces[k].2 = pieces[k].2.max(ratio);
        if ratio > fit.c_fit {
            fit.c_fit = ratio;
            fit.argmax = (t, x);
        }
    }
    fit.pieces = pieces;
    fit
}

/// Result of [`check_domination`].
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport<T> {
    pub base: DominationFit,
    pub refined: DominationFit,
    pub c_fit: f64,
    /// `max(C_ref/C_base, C_base/C_ref)`.
    pub change: f64,
    pub stable: bool,
    pub samples: Vec<KernelSample<T>>,
    pub refined_samples: Vec<KernelSample<T>>,
}

impl<T: Real> DominationReport<T> {
    pub fn to_json(&self) -> Value {
        let fit = |f: &DominationFit| {
            json!({
                "c_fit": f.c_fit,
                "argmax": {"t": f.argmax.0, "x": f.argmax.1},
                "pieces": f.pieces.iter().map(|(name, count, c)| json!({
                    "regime": name, "samples": count, "c_fit": c,
                })).collect::<Vec<_>>(),
                "flagged": f.flagged,
                "uncovered": f.uncovered,
            })
        };
        json!({
            "c_fit": self.c_fit,
            "change": self.change,
            "stable": self.stable,
            "stability_factor": STABILITY_FACTOR,
            "base": fit(&self.base),
            "refined": fit(&self.refined),
        })
    }
}

/// Evaluates the kernel on `grid` and on its refinement, and compares the fitted constants.
///
/// Every envelope piece must receive at least [`MIN_PIECE_POINTS`] base samples. `stable` is
/// set when the refined constant differs from the base one by less than [`STABILITY_FACTOR`].
pub fn check_domination<T, E, F>(
    grid: &DominationGrid,
    envelope: &DecayEnvelope<E>,
    extension: f64,
    mut evaluate: F,
) -> Result<DominationReport<T>>
where
    T: Real,
    E: ExactScalar,
    F: FnMut(f64, &[f64]) -> Result<KernelSample<T>>,
{
    grid.validate()?;
    if !(extension >= 1.0) {
        return Err(Error::InvalidSpec(format!("grid extension {extension} must be at least 1")));
    }
    let mut run = |g: &DominationGrid| {
        g.points()
            .into_iter()
            .map(|(t, x)| evaluate(t, &x))
            .collect::<Result<Vec<_>>>()
    };
    let samples = run(grid)?;
    let base = domination_constant(&samples, envelope);
    if let Some((name, count, _)) = base.pieces.iter().find(|p| p.1 < MIN_PIECE_POINTS) {
        log::warn!("envelope piece {name} holds {count} grid samples");
        return Err(Error::InsufficientPoints { found: *count, required: MIN_PIECE_POINTS });
    }
    let refined_samples = run(&grid.refined(extension))?;
    let refined = domination_constant(&refined_samples, envelope);
    let change = (refined.c_fit / base.c_fit).max(base.c_fit / refined.c_fit);
    Ok(DominationReport {
        c_fit: base.c_fit,
        stable: change < STABILITY_FACTOR,
        change,
        base,
        refined,
        samples,
        refined_samples,
    })
}
