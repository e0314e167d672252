//! Admissible `(1/p, 1/q)` quadrangle, the `L^p–L^q` decay exponents and Strichartz pairs.
//!
//! Points are handled in reciprocal coordinates `(P, Q) = (1/p, 1/q)` so that `p = 1` and
//! `q = ∞` are ordinary values.

use serde_json::{json, Value};

use super::{exact, mu, positive, DecayEnvelope, DerivedExponents, EnvelopePiece, Orders, Rate, Regime, Condition};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scalar::{ExactScalar, Real};
use crate::symbol::SymbolSpec;

/// Closed quadrangle `ABCD` with `A = (1/p0, 1/p0')`, `B = (1, 1/p1')`, `C = (1, 0)` and
/// `D = (1/p1, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueRegion<E> {
    pub n: E,
    pub m1: E,
    pub m2: E,
    pub b: E,
    pub epsilon: E,
    pub inv_p0: E,
    pub inv_p1: E,
    pub upsilon1: E,
    pub upsilon2: E,
    pub a: (E, E),
    pub b_vertex: (E, E),
    pub c: (E, E),
    pub d: (E, E),
}

impl<E: ExactScalar> LebesgueRegion<E> {
    /// Requires `2 <= m1 <= m2`, `b ∈ [0, n(m1-2)/2]` and `ε > 0`.
    pub fn new(n: usize, m1: E, m2: E, b: E, epsilon: E) -> Result<Self> {
        let n_e = E::from_int(n as i64);
        let two = E::from_int(2);
        if n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if m1 < two || m2 < m1 {
            return Err(Error::ParameterRange {
                parameter: "m1",
                value: m1.render(),
                interval: "[2, m2]".into(),
            });
        }
        let b_max = n_e.clone() * (m1.clone() - two.clone()) / two.clone();
        if b < E::zero() || b > b_max {
            return Err(Error::ParameterRange {
                parameter: "b",
                value: b.render(),
                interval: format!("[0, {}]", b_max.render()),
            });
        }
        positive(&epsilon, "epsilon")?;
        let inv_p0 = if m2 == two {
            E::one() / two.clone()
        } else {
            let k = n_e.clone() * (m2.clone() - two.clone());
            (k.clone() + two.clone() * b.clone()) / (two.clone() * k)
        };
        let upsilon1 = mu(n_e.clone(), m1.clone(), b.clone())?;
        let upsilon2 = mu(n_e.clone(), m2.clone(), b.clone())?;
        let inv_p1 = (n_e.clone() - upsilon2.clone()) / n_e.clone();
        let one = E::one();
        Ok(Self {
            a: (inv_p0.clone(), one.clone() - inv_p0.clone()),
            b_vertex: (one.clone(), upsilon2.clone() / n_e.clone()),
            c: (one.clone(), E::zero()),
            d: (inv_p1.clone(), E::zero()),
            n: n_e,
            m1,
            m2,
            b,
            epsilon,
            inv_p0,
            inv_p1,
            upsilon1,
            upsilon2,
        })
    }

    /// Region for a phase and a Bessel-weight style symbol, with `b = b2`.
    pub fn from_specs<T: Real>(phase: &PhaseSpec<T>, symbol: &SymbolSpec<T>, epsilon: E) -> Result<Self> {
        let orders = Orders::<E>::from_specs(phase, symbol)?;
        Self::new(phase.dimension(), orders.m1, orders.m2, orders.b2, epsilon)
    }

    /// True when the quadrangle collapses to the duality segment from `A` to `C`.
    pub fn is_degenerate(&self) -> bool {
        self.b_vertex == self.c && self.d == self.c
    }

    /// Membership of `(1/p, 1/q)` in the closed quadrangle, by exact orientation tests on the
    /// triangles `ABC` and `ACD`.
    pub fn contains(&self, inv_p: &E, inv_q: &E) -> bool {
        let zero = E::zero();
        let one = E::one();
        if *inv_p < zero || *inv_p > one || *inv_q < zero || *inv_q > one {
            return false;
        }
        let pt = (inv_p.clone(), inv_q.clone());
        in_triangle(&pt, &self.a, &self.b_vertex, &self.c) || in_triangle(&pt, &self.a, &self.c, &self.d)
    }

    /// True at the Lorentz/Hardy-replaced endpoints `B` and `D` (when they differ from `C`).
    pub fn is_endpoint(&self, inv_p: &E, inv_q: &E) -> bool {
        let pt = (inv_p.clone(), inv_q.clone());
        (pt == self.b_vertex || pt == self.d) && pt != self.c
    }

    /// `σ(q, n)` on the edge `p = 1`; returns the exponent and whether `ε` was subtracted.
    pub fn sigma(&self, inv_q: &E) -> (E, bool) {
        let n = self.n.clone();
        let threshold = self.upsilon1.clone() / n.clone();
        let half = n.clone() / E::from_int(2);
        if *inv_q > threshold {
            (half - n * inv_q.clone(), false)
        } else if *inv_q < threshold {
            let m1 = self.m1.clone();
            ((n / m1.clone()) * (E::one() - inv_q.clone()) + self.b.clone() / m1, false)
        } else {
            (half - n * inv_q.clone() - self.epsilon.clone(), true)
        }
    }

    /// `τ(p, q, ε)` for a point of triangle `ABC`; returns the exponent and whether `ε` was
    /// subtracted.
    fn tau_in_abc(&self, inv_p: &E, inv_q: &E) -> (E, bool) {
        let one = E::one();
        let n = self.n.clone();
        let m1 = self.m1.clone();
        let base = (n.clone() / m1.clone()) * (inv_p.clone() - inv_q.clone()) + self.b.clone() / m1.clone();
        let denom = one.clone() - self.inv_p0.clone();
        if denom == E::zero() {
            // A coincides with C, so the point lies on the edge p = 1
            return self.sigma(inv_q);
        }
        // θ = 1 - p0'/p' and 1/s = (1/q - 1/p')/θ
        let theta = one.clone() - (one.clone() - inv_p.clone()) / denom;
        if theta == E::zero() {
            return (base, false);
        }
        let inv_s = (inv_q.clone() - (one.clone() - inv_p.clone())) / theta.clone();
        let threshold = self.upsilon1.clone() / n.clone();
        if inv_s > threshold {
            let loss = theta * (one - E::one() / m1) * (n * inv_s - self.upsilon1.clone());
            (base - loss, false)
        } else if inv_s < threshold {
            (base, false)
        } else {
            (base - self.epsilon.clone(), true)
        }
    }

    /// Large-time exponent `τ(p,q,ε)`, with triangle `ACD` handled by duality.
    pub fn tau(&self, inv_p: &E, inv_q: &E) -> Result<(E, bool)> {
        if !self.contains(inv_p, inv_q) {
            return Err(membership_error(inv_p, inv_q));
        }
        let one = E::one();
        let pt = (inv_p.clone(), inv_q.clone());
        if in_triangle(&pt, &self.a, &self.b_vertex, &self.c) {
            Ok(self.tau_in_abc(inv_p, inv_q))
        } else {
            let dual_p = one.clone() - inv_q.clone();
            let dual_q = one - inv_p.clone();
            Ok(self.tau_in_abc(&dual_p, &dual_q))
        }
    }

    /// Small-time exponent `(n/m2)(1/p - 1/q) + b/m2`.
    pub fn small_time_exponent(&self, inv_p: &E, inv_q: &E) -> E {
        (self.n.clone() / self.m2.clone()) * (inv_p.clone() - inv_q.clone()) + self.b.clone() / self.m2.clone()
    }

    /// Strichartz pairs for the time-weighted estimate.
    pub fn strichartz_pairs(&self) -> Result<StrichartzPairs<E>> {
        strichartz_pairs(self.n.clone(), self.m2.clone(), self.b.clone(), self.inv_p0.clone())
    }

    pub fn to_json(&self) -> Value {
        let num = |e: &E| json!({"exact": e.render(), "value": e.to_float()});
        let pt = |p: &(E, E)| json!([num(&p.0), num(&p.1)]);
        json!({
            "A": pt(&self.a),
            "B": pt(&self.b_vertex),
            "C": pt(&self.c),
            "D": pt(&self.d),
            "inv_p0": num(&self.inv_p0),
            "inv_p1": num(&self.inv_p1),
            "upsilon1": num(&self.upsilon1),
            "upsilon2": num(&self.upsilon2),
            "epsilon": num(&self.epsilon),
            "degenerate": self.is_degenerate(),
            "endpoints_note": "B and D are endpoint pairs: not numerically probed",
        })
    }
}

fn membership_error<E: ExactScalar>(inv_p: &E, inv_q: &E) -> Error {
    Error::RegionMembership {
        inv_p: inv_p.render(),
        inv_q: inv_q.render(),
    }
}

fn orient<E: ExactScalar>(a: &(E, E), b: &(E, E), c: &(E, E)) -> E {
    (b.0.clone() - a.0.clone()) * (c.1.clone() - a.1.clone())
        - (b.1.clone() - a.1.clone()) * (c.0.clone() - a.0.clone())
}

fn between<E: ExactScalar>(v: &E, a: &E, b: &E) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= v && v <= hi
}

fn on_segment<E: ExactScalar>(p: &(E, E), a: &(E, E), b: &(E, E)) -> bool {
    orient(a, b, p) == E::zero() && between(&p.0, &a.0, &b.0) && between(&p.1, &a.1, &b.1)
}

/// Closed triangle membership that also handles triangles collapsed to a segment or point.
fn in_triangle<E: ExactScalar>(p: &(E, E), a: &(E, E), b: &(E, E), c: &(E, E)) -> bool {
    let area = orient(a, b, c);
    if area == E::zero() {
        return on_segment(p, a, b) || on_segment(p, b, c) || on_segment(p, a, c);
    }
    let zero = E::zero();
    let d1 = orient(a, b, p);
    let d2 = orient(b, c, p);
    let d3 = orient(c, a, p);
    if area > zero {
        d1 >= zero && d2 >= zero && d3 >= zero
    } else {
        d1 <= zero && d2 <= zero && d3 <= zero
    }
}

/// Which time regime a predicted `L^p–L^q` exponent belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateRegime {
    SmallTime,
    LargeTime,
}

/// Predicted operator-norm decay exponent: `‖W_b(t)‖ <= C|t|^{-exponent}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateValue<E> {
    pub exponent: E,
    pub regime: RateRegime,
    /// `ε` was subtracted on the critical line.
    pub critical: bool,
    /// The pair is an endpoint with Lorentz/Hardy replacements; not numerically probed.
    pub endpoint: bool,
}

/// Predicted decay exponent of `W_b(t)` from `L^p` to `L^q` at time `t`.
pub fn lp_lq_rate<E: ExactScalar>(region: &LebesgueRegion<E>, inv_p: &E, inv_q: &E, t: f64) -> Result<RateValue<E>> {
    if !region.contains(inv_p, inv_q) {
        return Err(membership_error(inv_p, inv_q));
    }
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain { what: "time", point: vec![t] });
    }
    let endpoint = region.is_endpoint(inv_p, inv_q);
    if t.abs() < 1.0 {
        Ok(RateValue {
            exponent: region.small_time_exponent(inv_p, inv_q),
            regime: RateRegime::SmallTime,
            critical: false,
            endpoint,
        })
    } else {
        let (exponent, critical) = region.tau(inv_p, inv_q)?;
        Ok(RateValue {
            exponent,
            regime: RateRegime::LargeTime,
            critical,
            endpoint,
        })
    }
}

/// Admissible `p` interval in reciprocal form: `1/p ∈ (inv_p_open, inv_p_closed]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PInterval<E> {
    /// Reciprocal of the closed endpoint `p0'`.
    pub inv_p_closed: E,
    /// Reciprocal of the open endpoint `2n/(n - m2 + b)`; zero when that endpoint is `∞`.
    pub inv_p_open: E,
}

/// Strichartz-admissible `p` and the scaling map `p ↦ q`,
/// `2/q = (n/m2)(1 - 2/p) + b/m2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzPairs<E> {
    pub n: E,
    pub m2: E,
    pub b: E,
    pub interval: PInterval<E>,
}

fn strichartz_pairs<E: ExactScalar>(n: E, m2: E, b: E, inv_p0: E) -> Result<StrichartzPairs<E>> {
    let two = E::from_int(2);
    let inv_p_closed = E::one() - inv_p0;
    let gap = n.clone() - m2.clone() + b.clone();
    // a nonpositive n - m2 + b sends the upper endpoint to ∞, itself excluded
    let inv_p_open = if gap > E::zero() { gap / (two * n.clone()) } else { E::zero() };
    if inv_p_closed <= inv_p_open {
        return Err(Error::EmptyInterval(format!(
            "Strichartz range: 1/p0' = {} does not exceed the open endpoint {}",
            inv_p_closed.render(),
            inv_p_open.render()
        )));
    }
    Ok(StrichartzPairs {
        n,
        m2,
        b,
        interval: PInterval { inv_p_closed, inv_p_open },
    })
}

impl<E: ExactScalar> StrichartzPairs<E> {
    pub fn admits(&self, inv_p: &E) -> bool {
        *inv_p > self.interval.inv_p_open && *inv_p <= self.interval.inv_p_closed
    }

    /// `1/q` paired with `1/p`, or an error if `p` is outside the admissible interval.
    pub fn inv_q(&self, inv_p: &E) -> Result<E> {
        if !self.admits(inv_p) {
            return Err(Error::ParameterRange {
                parameter: "1/p",
                value: inv_p.render(),
                interval: format!(
                    "({}, {}]",
                    self.interval.inv_p_open.render(),
                    self.interval.inv_p_closed.render()
                ),
            });
        }
        Ok(self.scaling(inv_p))
    }

    /// The scaling relation itself, without the admissibility check.
    pub fn scaling(&self, inv_p: &E) -> E {
        let two = E::from_int(2);
        let m2 = self.m2.clone();
        (self.n.clone() / (two.clone() * m2.clone())) * (E::one() - two.clone() * inv_p.clone())
            + self.b.clone() / (two * m2)
    }

    /// `count` admissible pairs `(1/p, 1/q)` evenly spaced in `1/p`, closed end included.
    pub fn sample(&self, count: usize) -> Vec<(E, E)> {
        let lo = &self.interval.inv_p_open;
        let hi = &self.interval.inv_p_closed;
        let count_e = E::from_int(count as i64);
        (0..count)
            .map(|k| {
                let inv_p = hi.clone() - (hi.clone() - lo.clone()) * E::from_int(k as i64) / count_e.clone();
                let inv_q = self.scaling(&inv_p);
                (inv_p, inv_q)
            })
            .collect()
    }
}

/// Envelope for the single-regime operator bound: decay `(n/m)(1/p-1/q) + b/m` for `|t| < 1`
/// and growth `n|1/q + 1/p - 1|` for `|t| >= 1` (encoded as a negative decay exponent).
///
/// The exponents are reported for any `(1/p, 1/q)`; the bound itself is only claimed on the
/// quadrangle built with `m1 = m2 = m`.
pub fn proposition34_envelope<T: Real, E: ExactScalar>(
    phase: &PhaseSpec<T>,
    symbol: &SymbolSpec<T>,
    inv_p: &E,
    inv_q: &E,
) -> Result<DecayEnvelope<E>> {
    let m: E = exact(phase.m2().as_f64(), "m")?;
    let b: E = exact(symbol.b2().as_f64(), "b")?;
    let n = phase.dimension();
    let upsilon = mu(E::from_int(n as i64), m.clone(), b.clone())?;
    let n_e = E::from_int(n as i64);
    let decay = (n_e.clone() / m.clone()) * (inv_p.clone() - inv_q.clone()) + b / m;
    let growth = n_e * (inv_q.clone() + inv_p.clone() - E::one()).abs();
    let one = E::one();
    Ok(DecayEnvelope {
        pieces: vec![
            EnvelopePiece {
                regime: Regime {
                    name: "small_time",
                    clauses: vec![vec![Condition::TimeBelow(one.clone())]],
                },
                rate: Rate::Power { t_exp: decay },
            },
            EnvelopePiece {
                regime: Regime {
                    name: "large_time_growth",
                    clauses: vec![vec![Condition::TimeAtLeast(one.clone())]],
                },
                rate: Rate::Power { t_exp: -growth },
            },
        ],
        t0: one.clone(),
        speed_threshold: one.clone(),
        tau0: one,
        exponents: DerivedExponents {
            upsilon2: Some(upsilon),
            ..DerivedExponents::default()
        },
    })
}
