//! Admissible potential integrability for the fractional Schrödinger operator
//! `(-Δ)^α + V` on `L^p`.

use serde_json::{json, Value};

use super::positive;
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Interval of admissible `r` with explicit open/closed ends; `None` stands for `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct RInterval<E> {
    pub lower: Option<E>,
    pub lower_closed: bool,
    pub upper: Option<E>,
    pub upper_closed: bool,
}

impl<E: ExactScalar> RInterval<E> {
    /// `r = None` means `r = +∞`.
    pub fn contains(&self, r: Option<&E>) -> bool {
        let above_lower = match (&self.lower, r) {
            (None, None) => self.lower_closed,
            (None, Some(_)) => false,
            (Some(_), None) => true,
            (Some(lo), Some(r)) => {
                if self.lower_closed {
                    r >= lo
                } else {
                    r > lo
                }
            }
        };
        let below_upper = match (&self.upper, r) {
            (None, None) => self.upper_closed,
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (Some(hi), Some(r)) => {
                if self.upper_closed {
                    r <= hi
                } else {
                    r < hi
                }
            }
        };
        above_lower && below_upper
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lower, &self.upper) {
            (None, None) => !(self.lower_closed && self.upper_closed),
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (Some(lo), Some(hi)) => lo > hi || (lo == hi && !(self.lower_closed && self.upper_closed)),
        }
    }

    /// Intersection of two intervals.
    pub fn intersect(&self, other: &Self) -> Self {
        // larger lower end wins; on ties the open end wins
        let (lower, lower_closed) = match (&self.lower, &other.lower) {
            (None, _) | (_, None) => {
                if self.lower.is_none() && other.lower.is_none() {
                    (None, self.lower_closed && other.lower_closed)
                } else if self.lower.is_none() {
                    (None, self.lower_closed)
                } else {
                    (None, other.lower_closed)
                }
            }
            (Some(a), Some(b)) => {
                if a > b {
                    (Some(a.clone()), self.lower_closed)
                } else if b > a {
                    (Some(b.clone()), other.lower_closed)
                } else {
                    (Some(a.clone()), self.lower_closed && other.lower_closed)
                }
            }
        };
        let (upper, upper_closed) = match (&self.upper, &other.upper) {
            (None, None) => (None, self.upper_closed && other.upper_closed),
            (None, Some(b)) => (Some(b.clone()), other.upper_closed),
            (Some(a), None) => (Some(a.clone()), self.upper_closed),
            (Some(a), Some(b)) => {
                if a < b {
                    (Some(a.clone()), self.upper_closed)
                } else if b < a {
                    (Some(b.clone()), other.upper_closed)
                } else {
                    (Some(a.clone()), self.upper_closed && other.upper_closed)
                }
            }
        };
        Self {
            lower,
            lower_closed,
            upper,
            upper_closed,
        }
    }

    pub fn render(&self) -> String {
        let end = |e: &Option<E>| e.as_ref().map(|v| v.render()).unwrap_or_else(|| "+inf".into());
        if self.is_empty() {
            return "empty".into();
        }
        if self.lower.is_none() {
            return "{+inf}".into();
        }
        format!(
            "{}{}, {}{}",
            if self.lower_closed { '[' } else { '(' },
            end(&self.lower),
            end(&self.upper),
            if self.upper_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FracSchrodingerRegion<E> {
    pub n: E,
    pub alpha: E,
    pub p: E,
    /// `(n/(2α), +∞] ∩ R_{p,α}`.
    pub admissible_r: RInterval<E>,
    /// `n|1/2 - 1/p| + 1/p`; the integrated-semigroup order must exceed it.
    pub beta_threshold: E,
}

impl<E: ExactScalar> FracSchrodingerRegion<E> {
    pub fn to_json(&self) -> Value {
        let num = |e: &E| json!({"exact": e.render(), "value": e.to_float()});
        json!({
            "alpha": num(&self.alpha),
            "p": num(&self.p),
            "admissible_r": self.admissible_r.render(),
            "beta_threshold": num(&self.beta_threshold),
            "growth_rate": "exists, not computed",
        })
    }
}

/// `R_{p,α}` piecewise in `p`:
/// `[p, (2α-1)p/(α(2-p)))` for `1 < p < (2α-1)/α`,
/// `(p/(α(2-p)), (2α-1)p/(α(2-p)))` for `(2α-1)/α <= p < 2`, and `{+∞}` at `p = 2`.
pub fn r_set<E: ExactScalar>(alpha: &E, p: &E) -> RInterval<E> {
    let one = E::one();
    let two = E::from_int(2);
    if *p == two {
        return RInterval {
            lower: None,
            lower_closed: true,
            upper: None,
            upper_closed: true,
        };
    }
    let denom = alpha.clone() * (two.clone() - p.clone());
    let upper = (two * alpha.clone() - one.clone()) * p.clone() / denom.clone();
    let switch = (E::from_int(2) * alpha.clone() - one) / alpha.clone();
    if *p < switch {
        RInterval {
            lower: Some(p.clone()),
            lower_closed: true,
            upper: Some(upper),
            upper_closed: false,
        }
    } else {
        RInterval {
            lower: Some(p.clone() / denom),
            lower_closed: false,
            upper: Some(upper),
            upper_closed: false,
        }
    }
}

/// Requires `α > 1` and `1 < p <= 2`.
pub fn frac_schrodinger_region<E: ExactScalar>(n: usize, alpha: E, p: E) -> Result<FracSchrodingerRegion<E>> {
    let one = E::one();
    let two = E::from_int(2);
    if alpha <= one {
        return Err(Error::ParameterRange {
            parameter: "alpha",
            value: alpha.render(),
            interval: "(1, ∞)".into(),
        });
    }
    if p <= one || p > two {
        return Err(Error::ParameterRange {
            parameter: "p",
            value: p.render(),
            interval: "(1, 2]".into(),
        });
    }
    let n_e = E::from_int(n as i64);
    positive(&n_e, "n")?;
    let integrability = RInterval {
        lower: Some(n_e.clone() / (two.clone() * alpha.clone())),
        lower_closed: false,
        upper: None,
        upper_closed: true,
    };
    let admissible_r = integrability.intersect(&r_set(&alpha, &p));
    let inv_p = one / p.clone();
    let beta_threshold = n_e.clone() * (one_half::<E>() - inv_p.clone()).abs() + inv_p;
    Ok(FracSchrodingerRegion {
        n: n_e,
        alpha,
        p,
        admissible_r,
        beta_threshold,
    })
}

fn one_half<E: ExactScalar>() -> E {
    E::one() / E::from_int(2)
}
