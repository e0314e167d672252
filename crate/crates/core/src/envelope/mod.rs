//! Exponent algebra for the predicted decay envelopes and admissible Lebesgue regions.
//!
//! Everything here is generic over an [`ExactScalar`]; with [`Rational`](crate::Rational)
//! all exponents are exact and reproducible. Envelopes are "up to a constant": the prefactor
//! `C` is never predicted, only fitted downstream.

pub(crate) mod frac;
mod region;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::{ExactScalar, Real};
use crate::symbol::SymbolSpec;

pub use frac::{frac_schrodinger_region, r_set, FracSchrodingerRegion, RInterval};
pub use region::{
    lp_lq_rate, proposition34_envelope, LebesgueRegion, PInterval, RateRegime, RateValue, StrichartzPairs,
};

/// Default slack subtracted on the critical line of the large-time `L^p–L^q` exponent.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// Finite stand-in for the arbitrarily fast `|t|^{-K}` decay piece.
pub const DEFAULT_RAPID_EXPONENT: i64 = 8;

/// `μ_b = (n(m-2) - 2b) / (2(m-1))`.
pub fn mu<E: ExactScalar>(n: E, m: E, b: E) -> Result<E> {
    if m <= E::one() {
        return Err(Error::ParameterRange {
            parameter: "m",
            value: m.render(),
            interval: "(1, ∞)".into(),
        });
    }
    let two = E::from_int(2);
    Ok((n * (m.clone() - two.clone()) - two.clone() * b) / (two * (m - E::one())))
}

/// Growth orders of a phase/symbol pair converted to the exact scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Orders<E> {
    pub n: E,
    pub m1: E,
    pub m2: E,
    pub b1: E,
    pub b2: E,
}

impl<E: ExactScalar> Orders<E> {
    pub fn new(n: usize, m1: E, m2: E, b1: E, b2: E) -> Result<Self> {
        let n = E::from_int(n as i64);
        if !(m1 > E::one()) || m2 < m1 {
            return Err(Error::InvalidSpec(format!(
                "need m2 >= m1 > 1, got m1 = {}, m2 = {}",
                m1.render(),
                m2.render()
            )));
        }
        if b2 < b1 {
            return Err(Error::InvalidSpec("need b2 >= b1".into()));
        }
        Ok(Self { n, m1, m2, b1, b2 })
    }

    pub fn from_specs<T: Real>(phase: &PhaseSpec<T>, symbol: &SymbolSpec<T>) -> Result<Self> {
        if phase.dimension() != symbol.dimension() {
            return Err(Error::InvalidSpec(format!(
                "phase dimension {} differs from symbol dimension {}",
                phase.dimension(),
                symbol.dimension()
            )));
        }
        Self::new(
            phase.dimension(),
            exact(phase.m1().as_f64(), "m1")?,
            exact(phase.m2().as_f64(), "m2")?,
            exact(symbol.b1().as_f64(), "b1")?,
            exact(symbol.b2().as_f64(), "b2")?,
        )
    }
}

pub(crate) fn exact<E: ExactScalar>(x: f64, what: &'static str) -> Result<E> {
    E::from_float(x).ok_or_else(|| Error::ParameterRange {
        parameter: what,
        value: x.to_string(),
        interval: "finite".into(),
    })
}

/// One condition of a regime predicate over `(t, |x|)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition<E> {
    /// `|t| < v`.
    TimeBelow(E),
    /// `|t| >= v`.
    TimeAtLeast(E),
    /// `|x|/|t| > v`.
    SpeedAbove(E),
    /// `|x|/|t| <= v`.
    SpeedAtMost(E),
    /// `|t|^{-1/m}|x| > tau`.
    ScaledAbove { tau: E, m: E },
    /// `|t|^{-1/m}|x| <= tau`.
    ScaledAtMost { tau: E, m: E },
}

impl<E: ExactScalar> Condition<E> {
    pub fn holds(&self, t: f64, x: f64) -> bool {
        let t = t.abs();
        let x = x.abs();
        match self {
            Self::TimeBelow(v) => t < v.to_float(),
            Self::TimeAtLeast(v) => t >= v.to_float(),
            Self::SpeedAbove(v) => x / t > v.to_float(),
            Self::SpeedAtMost(v) => x / t <= v.to_float(),
            Self::ScaledAbove { tau, m } => x * t.powf(-1.0 / m.to_float()) > tau.to_float(),
            Self::ScaledAtMost { tau, m } => x * t.powf(-1.0 / m.to_float()) <= tau.to_float(),
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::TimeBelow(v) => format!("|t| < {}", v.render()),
            Self::TimeAtLeast(v) => format!("|t| >= {}", v.render()),
            Self::SpeedAbove(v) => format!("|x|/|t| > {}", v.render()),
            Self::SpeedAtMost(v) => format!("|x|/|t| <= {}", v.render()),
            Self::ScaledAbove { tau, m } => format!("|t|^(-1/{})|x| > {}", m.render(), tau.render()),
            Self::ScaledAtMost { tau, m } => format!("|t|^(-1/{})|x| <= {}", m.render(), tau.render()),
        }
    }
}

/// Named regime: a union of conjunctions of [`Condition`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct Regime<E> {
    pub name: &'static str,
    pub clauses: Vec<Vec<Condition<E>>>,
}

impl<E: ExactScalar> Regime<E> {
    pub fn holds(&self, t: f64, x: f64) -> bool {
        t != 0.0 && self.clauses.iter().any(|c| c.iter().all(|cond| cond.holds(t, x)))
    }
}

/// Rate function `E(t,x)` of a single piece. Exponents are decay exponents: a positive
/// `t_exp` means `|t|^{-t_exp}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate<E> {
    /// `|t|^{-t_exp}(1+|t|^{-1/m}|x|)^{-x_exp}`.
    Scaled { t_exp: E, x_exp: E, m: E },
    /// `|t|^{-t_exp}|x|^{-x_exp}`.
    Product { t_exp: E, x_exp: E },
    /// `(1+|x|)^{-x_exp}`.
    Spatial { x_exp: E },
    /// `(1+|t|^{1/m})^{-t_exp}`.
    Temporal { t_exp: E, m: E },
    /// `|t|^{-t_exp}` standing in for arbitrarily fast decay.
    Rapid { t_exp: E },
    /// `|t|^{-t_exp}`, independent of `x`.
    Power { t_exp: E },
}

impl<E: ExactScalar> Rate<E> {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let t = t.abs();
        let x = x.abs();
        match self {
            Self::Scaled { t_exp, x_exp, m } => {
                t.powf(-t_exp.to_float()) * (1.0 + t.powf(-1.0 / m.to_float()) * x).powf(-x_exp.to_float())
            }
            Self::Product { t_exp, x_exp } => t.powf(-t_exp.to_float()) * x.powf(-x_exp.to_float()),
            Self::Spatial { x_exp } => (1.0 + x).powf(-x_exp.to_float()),
            Self::Temporal { t_exp, m } => (1.0 + t.powf(1.0 / m.to_float())).powf(-t_exp.to_float()),
            Self::Rapid { t_exp } | Self::Power { t_exp } => t.powf(-t_exp.to_float()),
        }
    }

    pub fn t_exponent(&self) -> Option<&E> {
        match self {
            Self::Scaled { t_exp, .. }
            | Self::Product { t_exp, .. }
            | Self::Temporal { t_exp, .. }
            | Self::Rapid { t_exp }
            | Self::Power { t_exp } => Some(t_exp),
            Self::Spatial { .. } => None,
        }
    }

    pub fn x_exponent(&self) -> Option<&E> {
        match self {
            Self::Scaled { x_exp, .. } | Self::Product { x_exp, .. } | Self::Spatial { x_exp } => Some(x_exp),
            _ => None,
        }
    }

    pub fn m(&self) -> Option<&E> {
        match self {
            Self::Scaled { m, .. } | Self::Temporal { m, .. } => Some(m),
            _ => None,
        }
    }

    fn form(&self) -> &'static str {
        match self {
            Self::Scaled { .. } => "scaled",
            Self::Product { .. } => "product",
            Self::Spatial { .. } => "spatial",
            Self::Temporal { .. } => "temporal",
            Self::Rapid { .. } => "rapid",
            Self::Power { .. } => "power",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePiece<E> {
    pub regime: Regime<E>,
    pub rate: Rate<E>,
}

/// Exponents derived while building an envelope; only the relevant ones are set.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedExponents<E> {
    pub mu_b: Option<E>,
    pub nu1: Option<E>,
    pub nu2: Option<E>,
    pub upsilon1: Option<E>,
    pub upsilon2: Option<E>,
}

impl<E> Default for DerivedExponents<E> {
    fn default() -> Self {
        Self {
            mu_b: None,
            nu1: None,
            nu2: None,
            upsilon1: None,
            upsilon2: None,
        }
    }
}

/// Piecewise space-time majorant `E(t,x)`. The first piece whose regime holds applies.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEnvelope<E> {
    pub pieces: Vec<EnvelopePiece<E>>,
    pub t0: E,
    pub speed_threshold: E,
    pub tau0: E,
    pub exponents: DerivedExponents<E>,
}

impl<E: ExactScalar> DecayEnvelope<E> {
    pub fn piece_index(&self, t: f64, x: f64) -> Option<usize> {
        self.pieces.iter().position(|p| p.regime.holds(t, x))
    }

    /// `E(t,|x|)`, or `None` at `t = 0` or outside every regime.
    pub fn evaluate(&self, t: f64, x: f64) -> Option<f64> {
        self.piece_index(t, x).map(|i| self.pieces[i].rate.eval(t, x))
    }

    pub fn to_json(&self) -> Value {
        let num = |e: &E| json!({"exact": e.render(), "value": e.to_float()});
        let opt = |e: &Option<E>| e.as_ref().map(num).unwrap_or(Value::Null);
        let pieces: Vec<Value> = self
            .pieces
            .iter()
            .map(|p| {
                let conditions: Vec<Vec<String>> = p
                    .regime
                    .clauses
                    .iter()
                    .map(|c| c.iter().map(Condition::describe).collect())
                    .collect();
                json!({
                    "predicate": p.regime.name,
                    "conditions": conditions,
                    "form": p.rate.form(),
                    "t_exponent": p.rate.t_exponent().map(num).unwrap_or(Value::Null),
                    "x_exponent": p.rate.x_exponent().map(num).unwrap_or(Value::Null),
                    "m": p.rate.m().map(num).unwrap_or(Value::Null),
                })
            })
            .collect();
        json!({
            "pieces": pieces,
            "t0": num(&self.t0),
            "N": num(&self.speed_threshold),
            "tau0": num(&self.tau0),
            "mu_b": opt(&self.exponents.mu_b),
            "nu1": opt(&self.exponents.nu1),
            "nu2": opt(&self.exponents.nu2),
            "upsilon1": opt(&self.exponents.upsilon1),
            "upsilon2": opt(&self.exponents.upsilon2),
        })
    }
}

fn check_half_dimension<E: ExactScalar>(n: &E, b: &E, what: &'static str) -> Result<()> {
    if *b < -n.clone() / E::from_int(2) {
        return Err(Error::ParameterRange {
            parameter: what,
            value: b.render(),
            interval: "[-n/2, ∞)".into(),
        });
    }
    Ok(())
}

fn check_dimension<E: ExactScalar>(n: &E, b: &E, what: &'static str) -> Result<()> {
    if *b <= -n.clone() {
        return Err(Error::ParameterRange {
            parameter: what,
            value: b.render(),
            interval: "(-n, ∞)".into(),
        });
    }
    Ok(())
}

fn positive<E: ExactScalar>(v: &E, what: &'static str) -> Result<()> {
    if *v <= E::zero() {
        return Err(Error::ParameterRange {
            parameter: what,
            value: v.render(),
            interval: "(0, ∞)".into(),
        });
    }
    Ok(())
}

/// Two-regime envelope of the full-space integral from the orders alone.
///
/// Small times, and large times with `|x|/|t| > N`, follow the high-frequency rate
/// `|t|^{-(n+b2)/m2}(1+|t|^{-1/m2}|x|)^{-ν2}`; large times with `|x|/|t| <= N` follow the
/// low-frequency rate with `(m1, b1, ν1)`.
pub fn two_regime_envelope<E: ExactScalar>(orders: &Orders<E>, t0: E, speed_threshold: E) -> Result<DecayEnvelope<E>> {
    let Orders { n, m1, m2, b1, b2 } = orders.clone();
    positive(&t0, "t0")?;
    positive(&speed_threshold, "N")?;
    check_half_dimension(&n, &b1, "b1").map_err(|e| Error::Hypothesis(e.to_string()))?;
    let nu1 = mu(n.clone(), m1.clone(), b1.clone())?;
    let nu2 = mu(n.clone(), m2.clone(), b2.clone())?;
    let outer = Rate::Scaled {
        t_exp: (n.clone() + b2) / m2.clone(),
        x_exp: nu2.clone(),
        m: m2,
    };
    let inner = Rate::Scaled {
        t_exp: (n + b1) / m1.clone(),
        x_exp: nu1.clone(),
        m: m1,
    };
    Ok(DecayEnvelope {
        pieces: vec![
            EnvelopePiece {
                regime: Regime {
                    name: "small_time_or_fast",
                    clauses: vec![
                        vec![Condition::TimeBelow(t0.clone())],
                        vec![Condition::TimeAtLeast(t0.clone()), Condition::SpeedAbove(speed_threshold.clone())],
                    ],
                },
                rate: outer,
            },
            EnvelopePiece {
                regime: Regime {
                    name: "large_time_slow",
                    clauses: vec![vec![
                        Condition::TimeAtLeast(t0.clone()),
                        Condition::SpeedAtMost(speed_threshold.clone()),
                    ]],
                },
                rate: inner,
            },
        ],
        t0,
        speed_threshold,
        tau0: E::one(),
        exponents: DerivedExponents {
            nu1: Some(nu1),
            nu2: Some(nu2),
            ..DerivedExponents::default()
        },
    })
}

/// Two-regime envelope of a phase/symbol pair; requires the phase's gradient constants to be
/// known (analytically or from an audit) so the compatibility condition can be checked.
pub fn theorem31_envelope<T: Real, E: ExactScalar>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t0: E,
    speed_threshold: E,
) -> Result<DecayEnvelope<E>> {
    let e = phase.ellipticity();
    if e.d1_lower.is_none() || e.d2_upper.is_none() {
        return Err(Error::Hypothesis(
            "gradient bounds of the phase are unknown; run the ellipticity audit first".into(),
        ));
    }
    two_regime_envelope(&Orders::from_specs(phase, symbol)?, t0, speed_threshold)
}

/// Envelope for a symbol supported away from the origin, from the orders.
///
/// `speed_boundary` is `(2/3) c1 r0^{m-1}`; `rapid` is the stand-in exponent of the
/// arbitrarily fast piece.
pub fn outer_lemma_envelope<E: ExactScalar>(
    n: E,
    m: E,
    b: E,
    t0: E,
    speed_boundary: E,
    rapid: E,
) -> Result<DecayEnvelope<E>> {
    positive(&t0, "t0")?;
    positive(&speed_boundary, "speed boundary")?;
    check_half_dimension(&n, &b, "b")?;
    let mu_b = mu(n.clone(), m.clone(), b.clone())?;
    let two = E::from_int(2);
    Ok(DecayEnvelope {
        pieces: vec![
            EnvelopePiece {
                regime: Regime {
                    name: "small_time",
                    clauses: vec![vec![Condition::TimeBelow(t0.clone())]],
                },
                rate: Rate::Scaled {
                    t_exp: (n.clone() + b) / m.clone(),
                    x_exp: mu_b.clone(),
                    m,
                },
            },
            EnvelopePiece {
                regime: Regime {
                    name: "large_time_fast",
                    clauses: vec![vec![
                        Condition::TimeAtLeast(t0.clone()),
                        Condition::SpeedAbove(speed_boundary.clone()),
                    ]],
                },
                rate: Rate::Product {
                    t_exp: n / two - mu_b.clone(),
                    x_exp: mu_b.clone(),
                },
            },
            EnvelopePiece {
                regime: Regime {
                    name: "large_time_slow_rapid",
                    clauses: vec![vec![
                        Condition::TimeAtLeast(t0.clone()),
                        Condition::SpeedAtMost(speed_boundary.clone()),
                    ]],
                },
                rate: Rate::Rapid { t_exp: rapid },
            },
        ],
        t0,
        speed_threshold: speed_boundary,
        tau0: E::one(),
        exponents: DerivedExponents {
            mu_b: Some(mu_b),
            ..DerivedExponents::default()
        },
    })
}

/// Envelope for a symbol supported near the origin, from the orders.
///
/// `speed_boundary` is `2 c2 r0^{m-1}` with `r0` the radius of the inner ball.
pub fn inner_lemma_envelope<E: ExactScalar>(n: E, m: E, b: E, tau0: E, speed_boundary: E) -> Result<DecayEnvelope<E>> {
    positive(&tau0, "tau0")?;
    positive(&speed_boundary, "speed boundary")?;
    check_dimension(&n, &b, "b")?;
    check_half_dimension(&n, &b, "b")?;
    let mu_b = mu(n.clone(), m.clone(), b.clone())?;
    let two = E::from_int(2);
    Ok(DecayEnvelope {
        pieces: vec![
            EnvelopePiece {
                regime: Regime {
                    name: "far_fast",
                    clauses: vec![vec![
                        Condition::ScaledAbove { tau: tau0.clone(), m: m.clone() },
                        Condition::SpeedAbove(speed_boundary.clone()),
                    ]],
                },
                rate: Rate::Spatial { x_exp: n.clone() + b.clone() },
            },
            EnvelopePiece {
                regime: Regime {
                    name: "far_slow",
                    clauses: vec![vec![
                        Condition::ScaledAbove { tau: tau0.clone(), m: m.clone() },
                        Condition::SpeedAtMost(speed_boundary.clone()),
                    ]],
                },
                rate: Rate::Product {
                    t_exp: n.clone() / two - mu_b.clone(),
                    x_exp: mu_b.clone(),
                },
            },
            EnvelopePiece {
                regime: Regime {
                    name: "near",
                    clauses: vec![vec![Condition::ScaledAtMost { tau: tau0.clone(), m: m.clone() }]],
                },
                rate: Rate::Temporal { t_exp: n + b, m },
            },
        ],
        t0: E::one(),
        speed_threshold: speed_boundary,
        tau0,
        exponents: DerivedExponents {
            mu_b: Some(mu_b),
            ..DerivedExponents::default()
        },
    })
}

/// Outer-region envelope of a phase/symbol pair, using `(m2, b2)` and the lower outer
/// gradient constant `c1`.
pub fn lemma1_envelope<T: Real, E: ExactScalar>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    t0: E,
) -> Result<DecayEnvelope<E>> {
    let orders = Orders::<E>::from_specs(phase, symbol)?;
    let c1 = phase
        .ellipticity()
        .d1_lower
        .ok_or_else(|| Error::Hypothesis("outer gradient constant c1 is unknown".into()))?;
    let boundary = 2.0 / 3.0 * c1.as_f64() * phase.r0().as_f64().powf(phase.m2().as_f64() - 1.0);
    outer_lemma_envelope(
        orders.n,
        orders.m2,
        orders.b2,
        t0,
        exact(boundary, "speed boundary")?,
        E::from_int(DEFAULT_RAPID_EXPONENT),
    )
}

/// Inner-region envelope of a phase/symbol pair, using `(m1, b1)`, the upper inner gradient
/// constant `c2` and the inner radius `R0`.
pub fn lemma2_envelope<T: Real, E: ExactScalar>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    tau0: E,
) -> Result<DecayEnvelope<E>> {
    let orders = Orders::<E>::from_specs(phase, symbol)?;
    let c2 = phase
        .ellipticity()
        .d2_upper
        .ok_or_else(|| Error::Hypothesis("inner gradient constant c2 is unknown".into()))?;
    let boundary = 2.0 * c2.as_f64() * phase.r_outer().as_f64().powf(phase.m1().as_f64() - 1.0);
    inner_lemma_envelope(orders.n, orders.m1, orders.b1, tau0, exact(boundary, "speed boundary")?)
}
