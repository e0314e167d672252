//! JSON experiment description and its fail-fast validation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::envelope::{lp_lq_rate, theorem31_envelope, DecayEnvelope, LebesgueRegion, StrichartzPairs};
use crate::error::{Error, Result};
use crate::fitcheck::{DominationGrid, DEFAULT_EXTENSION, DEFAULT_TOLERANCE};
use crate::phase::{PhaseConfig, PhaseSpec};
use crate::scalar::{ExactScalar, Rational};
use crate::symbol::{SymbolConfig, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PointwiseDecay,
    EnvelopeDomination,
    LpLqRatio,
    Strichartz,
    RegionReport,
    EllipticityAudit,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PointwiseDecay => "pointwise_decay",
            Self::EnvelopeDomination => "envelope_domination",
            Self::LpLqRatio => "lp_lq_ratio",
            Self::Strichartz => "strichartz",
            Self::RegionReport => "region_report",
            Self::EllipticityAudit => "ellipticity_audit",
        }
    }
}

/// A number, or a string holding an exact value (`"-1/4"`, `"3"`, `"inf"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    Number(f64),
    Text(String),
}

impl ExactValue {
    pub fn to_rational(&self, what: &str) -> Result<Rational> {
        let bad = || Error::Config(format!("{what}: {self:?} is not an exact finite value"));
        match self {
            Self::Number(v) => Rational::from_float(*v).filter(|_| v.is_finite()).ok_or_else(bad),
            Self::Text(s) => parse_rational(s).ok_or_else(bad),
        }
    }

    /// Reciprocal of a Lebesgue exponent, with `"inf"` mapped to zero.
    pub fn reciprocal(&self, what: &str) -> Result<Rational> {
        if let Self::Text(s) = self {
            if matches!(s.trim(), "inf" | "infinity" | "∞") {
                return Ok(Rational::from_int(0));
            }
        }
        let v = self.to_rational(what)?;
        if v < Rational::from_int(1) {
            return Err(Error::Config(format!("{what} = {} must be at least 1", v.render())));
        }
        Ok(Rational::from_int(1) / v)
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().ok()?;
        let den: i128 = den.trim().parse().ok()?;
        return (den != 0).then(|| Rational::new(num, den));
    }
    let v: f64 = s.parse().ok()?;
    if !v.is_finite() {
        return None;
    }
    Rational::from_float(v)
}

/// Time sweep at fixed `|x|` or at fixed speed `|x|/|t|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFit {
    /// `small_time`, `large_time_inner` or `large_time_outer`.
    pub regime: String,
    pub t_range: [f64; 2],
    pub points: usize,
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default)]
    pub speed: Option<f64>,
    /// Overrides the exponent derived from the envelope.
    #[serde(default)]
    pub predicted: Option<ExactValue>,
}

/// Spatial sweep at fixed `t` over `|t|^{-1/m}|x|` in `scaled_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFit {
    pub t: f64,
    pub scaled_range: [f64; 2],
    pub points: usize,
    #[serde(default)]
    pub predicted: Option<ExactValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPlan {
    pub t_range: [f64; 2],
    pub x_range: [f64; 2],
    pub points: usize,
    #[serde(default = "default_extension")]
    pub extension: f64,
}

fn default_extension() -> f64 {
    DEFAULT_EXTENSION
}

/// Time window of an operator-norm fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioWindow {
    pub t_range: [f64; 2],
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMethod {
    /// `sup_x |I(t,x)|/(2π)^n`, only for `p = 1`, `q = ∞`.
    #[default]
    Kernel,
    /// Maximum over the standard probe family on the periodic grid.
    Probes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpLqPlan {
    pub p: ExactValue,
    pub q: ExactValue,
    #[serde(default)]
    pub method: RatioMethod,
    pub windows: Vec<RatioWindow>,
    /// Kernel method: `sup_x` is taken over `x = z|t|^{1/m}`, `z` uniform in `[0, z_max]`.
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_z_points")]
    pub z_points: usize,
}

fn default_z_max() -> f64 {
    4.0
}

fn default_z_points() -> usize {
    33
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzPlan {
    /// Spatial exponent; its partner comes from the scaling relation. Defaults to the middle
    /// admissible pair.
    #[serde(default)]
    pub p: Option<ExactValue>,
    /// Non-admissible `(p, q)` expected to be unstable.
    #[serde(default)]
    pub control: Option<[ExactValue; 2]>,
    pub window: f64,
    #[serde(default = "default_width")]
    pub gaussian_width: f64,
}

fn default_width() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPlan {
    #[serde(default)]
    pub time_fits: Vec<TimeFit>,
    #[serde(default)]
    pub space_fits: Vec<SpaceFit>,
    #[serde(default)]
    pub grid: Option<GridPlan>,
    #[serde(default)]
    pub lp_lq: Option<LpLqPlan>,
    #[serde(default)]
    pub strichartz: Option<StrichartzPlan>,
    /// Region report: `(p, q)` pairs to classify.
    #[serde(default)]
    pub pairs: Vec<[ExactValue; 2]>,
    /// Ellipticity audit: samples per shell.
    #[serde(default)]
    pub shell_samples: Option<usize>,
}

impl SamplingPlan {
    fn is_empty(&self) -> bool {
        self.time_fits.is_empty()
            && self.space_fits.is_empty()
            && self.grid.is_none()
            && self.lp_lq.is_none()
            && self.strichartz.is_none()
            && self.pairs.is_empty()
            && self.shell_samples.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of fitted exponents.
    #[serde(default = "default_exponent_tolerance")]
    pub exponent: f64,
    /// Relative tolerance handed to the quadrature methods.
    #[serde(default = "default_quadrature_tolerance")]
    pub quadrature: f64,
}

fn default_exponent_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_quadrature_tolerance() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exponent: default_exponent_tolerance(),
            quadrature: default_quadrature_tolerance(),
        }
    }
}

/// Envelope and region parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default = "one")]
    pub t0: ExactValue,
    /// Speed threshold `N`.
    #[serde(default = "one")]
    pub speed: ExactValue,
    /// Critical-line loss `ε`.
    #[serde(default = "default_epsilon")]
    pub epsilon: ExactValue,
}

fn one() -> ExactValue {
    ExactValue::Number(1.0)
}

fn default_epsilon() -> ExactValue {
    ExactValue::Text("1/1000".into())
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            t0: one(),
            speed: one(),
            epsilon: default_epsilon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub dir: Option<String>,
}

fn constant_one() -> SymbolConfig {
    SymbolConfig::ConstantOne
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub phase: PhaseConfig,
    #[serde(default = "constant_one")]
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub sampling: SamplingPlan,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub seed: u64,
}

/// Objects built during validation and reused by the runner.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub phase: PhaseSpec<f64>,
    pub symbol: SymbolSpec<f64>,
    pub envelope: Option<DecayEnvelope<Rational>>,
    pub region: Option<LebesgueRegion<Rational>>,
    pub pairs: Option<StrichartzPairs<Rational>>,
}

/// Regime windows keep this factor away from `t0` on either side.
pub const REGIME_MARGIN: f64 = 4.0;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_range(what: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(config_err(format!("{what}: need 0 < lo < hi < ∞, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_points(what: &str, points: usize, min: usize) -> Result<()> {
    if points < min {
        return Err(config_err(format!("{what}: at least {min} points required, got {points}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every parameter and builds the phase, symbol, envelope and region the experiment
    /// needs. Nothing is evaluated numerically.
    pub fn validate(&self) -> Result<Prepared> {
        if self.name.trim().is_empty() {
            return Err(config_err("name must not be empty"));
        }
        if self.sampling.is_empty() {
            return Err(config_err("sampling plan is empty"));
        }
        let tol = &self.tolerances;
        if !(tol.exponent > 0.0) || !(tol.quadrature > 0.0 && tol.quadrature < 1.0) {
            return Err(config_err("tolerances must be positive, quadrature below 1"));
        }
        let phase = PhaseSpec::<f64>::from_config(&self.phase)?;
        let n = phase.dimension();
        let symbol = SymbolSpec::<f64>::from_config(&self.symbol, n)?;
        let mut prepared = Prepared {
            phase,
            symbol,
            envelope: None,
            region: None,
            pairs: None,
        };
        let plan = &self.sampling;
        match self.kind {
            ExperimentKind::PointwiseDecay => {
                if plan.time_fits.is_empty() && plan.space_fits.is_empty() {
                    return Err(config_err("pointwise_decay needs time_fits or space_fits"));
                }
                let env = self.envelope(&prepared)?;
                let t0 = env.t0.to_float();
                for (i, fit) in plan.time_fits.iter().enumerate() {
                    let what = format!("time_fits[{i}]");
                    check_range(&what, fit.t_range)?;
                    check_points(&what, fit.points, crate::fitcheck::MIN_POINTS)?;
                    match (fit.x, fit.speed) {
                        (Some(x), None) if x >= 0.0 && x.is_finite() => {}
                        (None, Some(s)) if s > env.speed_threshold.to_float() && s.is_finite() => {}
                        _ => {
                            return Err(config_err(format!(
                                "{what}: give either x >= 0 or speed above N = {}",
                                env.speed_threshold.render()
                            )))
                        }
                    }
                    let [lo, hi] = fit.t_range;
                    match fit.regime.as_str() {
                        "small_time" if hi * REGIME_MARGIN <= t0 => {}
                        "large_time_inner" | "large_time_outer" if lo >= REGIME_MARGIN * t0 => {}
                        "small_time" | "large_time_inner" | "large_time_outer" => {
                            return Err(config_err(format!(
                                "{what}: t_range must stay a factor {REGIME_MARGIN} away from t0 = {t0}"
                            )))
                        }
                        other => return Err(config_err(format!("{what}: unknown regime {other:?}"))),
                    }
                    if fit.regime == "large_time_inner" && fit.speed.is_some() {
                        return Err(config_err(format!("{what}: the inner regime is sampled at fixed x")));
                    }
                    match &fit.predicted {
                        Some(p) => {
                            p.to_rational(&what)?;
                        }
                        None if fit.x.is_some_and(|x| x > 0.0) => {
                            return Err(config_err(format!(
                                "{what}: a fixed x > 0 has no derived exponent; give predicted"
                            )))
                        }
                        None => {}
                    }
                }
                for (i, fit) in plan.space_fits.iter().enumerate() {
                    let what = format!("space_fits[{i}]");
                    check_range(&what, fit.scaled_range)?;
                    check_points(&what, fit.points, crate::fitcheck::MIN_POINTS)?;
                    if !(fit.t > 0.0 && fit.t.is_finite()) {
                        return Err(config_err(format!("{what}: t must be positive")));
                    }
                    if let Some(p) = &fit.predicted {
                        p.to_rational(&what)?;
                    }
                }
                prepared.envelope = Some(env);
            }
            ExperimentKind::EnvelopeDomination => {
                let grid = plan
                    .grid
                    .as_ref()
                    .ok_or_else(|| config_err("envelope_domination needs sampling.grid"))?;
                check_range("grid.t_range", grid.t_range)?;
                check_range("grid.x_range", grid.x_range)?;
                check_points("grid", grid.points, 2)?;
                if !(grid.extension >= 1.0 && grid.extension.is_finite()) {
                    return Err(config_err("grid.extension must be at least 1"));
                }
                self.domination_grid(n)?;
                prepared.envelope = Some(self.envelope(&prepared)?);
            }
            ExperimentKind::LpLqRatio => {
                let lp = plan
                    .lp_lq
                    .as_ref()
                    .ok_or_else(|| config_err("lp_lq_ratio needs sampling.lp_lq"))?;
                let inv_p = lp.p.reciprocal("p")?;
                let inv_q = lp.q.reciprocal("q")?;
                if lp.windows.is_empty() {
                    return Err(config_err("lp_lq.windows is empty"));
                }
                let region = self.region(&prepared)?;
                if !region.contains(&inv_p, &inv_q) {
                    return Err(Error::RegionMembership {
                        inv_p: inv_p.render(),
                        inv_q: inv_q.render(),
                    });
                }
                for (i, w) in lp.windows.iter().enumerate() {
                    let what = format!("lp_lq.windows[{i}]");
                    check_range(&what, w.t_range)?;
                    check_points(&what, w.points, crate::fitcheck::MIN_POINTS)?;
                    let [lo, hi] = w.t_range;
                    if (hi / lo).log10() < crate::fitcheck::MIN_CURVE_DECADES - 1e-9 {
                        return Err(config_err(format!("{what}: at least one decade of t is required")));
                    }
                    if lo < 1.0 && hi >= 1.0 {
                        let small = lp_lq_rate(&region, &inv_p, &inv_q, lo)?.exponent;
                        let large = lp_lq_rate(&region, &inv_p, &inv_q, hi)?.exponent;
                        if (small.to_float() - large.to_float()).abs() > tol.exponent {
                            return Err(config_err(format!(
                                "{what} straddles |t| = 1 where the predicted exponent changes"
                            )));
                        }
                    }
                }
                if lp.method == RatioMethod::Kernel
                    && (inv_p != Rational::from_int(1) || inv_q != Rational::from_int(0))
                {
                    return Err(config_err("the kernel method measures p = 1, q = inf only"));
                }
                if !(lp.z_max > 0.0) || lp.z_points < 2 {
                    return Err(config_err("lp_lq.z_max must be positive and z_points at least 2"));
                }
                prepared.region = Some(region);
            }
            ExperimentKind::Strichartz => {
                let st = plan
                    .strichartz
                    .as_ref()
                    .ok_or_else(|| config_err("strichartz needs sampling.strichartz"))?;
                if !(st.window > 0.0 && st.window.is_finite()) || !(st.gaussian_width > 0.0) {
                    return Err(config_err("strichartz window and gaussian_width must be positive"));
                }
                let region = self.region(&prepared)?;
                let pairs = region.strichartz_pairs()?;
                if let Some(p) = &st.p {
                    pairs.inv_q(&p.reciprocal("strichartz.p")?)?;
                }
                if let Some([p, q]) = &st.control {
                    p.reciprocal("control p")?;
                    q.reciprocal("control q")?;
                }
                prepared.region = Some(region);
                prepared.pairs = Some(pairs);
            }
            ExperimentKind::RegionReport => {
                let region = self.region(&prepared)?;
                for (i, [p, q]) in plan.pairs.iter().enumerate() {
                    p.reciprocal(&format!("pairs[{i}].p"))?;
                    q.reciprocal(&format!("pairs[{i}].q"))?;
                }
                prepared.pairs = region.strichartz_pairs().ok();
                prepared.region = Some(region);
            }
            ExperimentKind::EllipticityAudit => {
                let samples = plan.shell_samples.unwrap_or(64);
                check_points("shell_samples", samples, 16)?;
            }
        }
        Ok(prepared)
    }

    fn envelope(&self, prepared: &Prepared) -> Result<DecayEnvelope<Rational>> {
        let t0 = self.parameters.t0.to_rational("parameters.t0")?;
        let speed = self.parameters.speed.to_rational("parameters.speed")?;
        theorem31_envelope(&prepared.phase, &prepared.symbol, t0, speed)
    }

    fn region(&self, prepared: &Prepared) -> Result<LebesgueRegion<Rational>> {
        let epsilon = self.parameters.epsilon.to_rational("parameters.epsilon")?;
        LebesgueRegion::from_specs(&prepared.phase, &prepared.symbol, epsilon)
    }

    pub fn domination_grid(&self, dimension: usize) -> Result<DominationGrid> {
        let grid = self
            .sampling
            .grid
            .as_ref()
            .ok_or_else(|| config_err("sampling.grid is missing"))?;
        DominationGrid::new(
            dimension,
            (grid.t_range[0], grid.t_range[1]),
            (grid.x_range[0], grid.x_range[1]),
            grid.points,
        )
    }
}
