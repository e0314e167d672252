//! Smoothing symbols `ψ(ξ)` with growth orders `b1` near the origin and `b2` at infinity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

type SymbolFn<T> = dyn Fn(&[T]) -> T + Send + Sync;

#[derive(Clone)]
pub enum SymbolKind<T: Real> {
    /// `⟨ξ⟩^b = (1+|ξ|²)^{b/2}`.
    BesselWeight { b: T },
    /// `ξ^α` for a multi-index `α`.
    Monomial { alpha: Vec<u32> },
    /// `|ξ|^b`.
    PurePower { b: T },
    ConstantOne,
    /// Caller-supplied symbol; `radial`, when present, is its profile in `|ξ|`.
    Custom {
        value: Arc<SymbolFn<T>>,
        radial: Option<Arc<dyn Fn(T) -> T + Send + Sync>>,
    },
}

impl<T: Real> fmt::Debug for SymbolKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BesselWeight { b } => write!(f, "BesselWeight {{ b: {b} }}"),
            Self::Monomial { alpha } => write!(f, "Monomial {{ alpha: {alpha:?} }}"),
            Self::PurePower { b } => write!(f, "PurePower {{ b: {b} }}"),
            Self::ConstantOne => f.write_str("ConstantOne"),
            Self::Custom { radial, .. } => write!(f, "Custom {{ radial: {} }}", radial.is_some()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymbolSpec<T: Real> {
    dimension: usize,
    kind: SymbolKind<T>,
    b1: T,
    b2: T,
}

impl<T: Real> SymbolSpec<T> {
    pub fn bessel_weight(dimension: usize, b: T) -> Result<Self> {
        Self::build(dimension, SymbolKind::BesselWeight { b }, T::zero(), b)
    }

    pub fn monomial(alpha: &[u32]) -> Result<Self> {
        let order = T::from_u32(alpha.iter().sum()).expect("small order");
        Self::build(alpha.len(), SymbolKind::Monomial { alpha: alpha.to_vec() }, order, order)
    }

    pub fn pure_power(dimension: usize, b: T) -> Result<Self> {
        Self::build(dimension, SymbolKind::PurePower { b }, b, b)
    }

    pub fn constant_one(dimension: usize) -> Result<Self> {
        Self::build(dimension, SymbolKind::ConstantOne, T::zero(), T::zero())
    }

    /// Custom symbol with caller-asserted growth orders.
    pub fn custom(
        dimension: usize,
        value: Arc<SymbolFn<T>>,
        radial: Option<Arc<dyn Fn(T) -> T + Send + Sync>>,
        b1: T,
        b2: T,
    ) -> Result<Self> {
        Self::build(dimension, SymbolKind::Custom { value, radial }, b1, b2)
    }

    fn build(dimension: usize, kind: SymbolKind<T>, b1: T, b2: T) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        let half_n = T::from_usize(dimension).expect("dimension") / T::lit(2.0);
        if !b1.is_finite() || !b2.is_finite() || b1 < -half_n {
            return Err(Error::InvalidSpec(format!("growth order b1 = {b1} must be >= -n/2 = -{half_n}")));
        }
        if b2 < b1 {
            return Err(Error::InvalidSpec(format!("growth orders need b2 >= b1, got b1 = {b1}, b2 = {b2}")));
        }
        Ok(Self { dimension, kind, b1, b2 })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &SymbolKind<T> {
        &self.kind
    }

    pub fn b1(&self) -> T {
        self.b1
    }

    pub fn b2(&self) -> T {
        self.b2
    }

    pub fn is_radial(&self) -> bool {
        match &self.kind {
            SymbolKind::BesselWeight { .. } | SymbolKind::PurePower { .. } | SymbolKind::ConstantOne => true,
            SymbolKind::Monomial { alpha } => alpha.iter().all(|&a| a == 0),
            SymbolKind::Custom { radial, .. } => radial.is_some(),
        }
    }

    /// Per-axis monomial powers when `ψ` factorises as `Π ξ_k^{α_k}`.
    pub fn monomial_powers(&self) -> Option<Vec<u32>> {
        match &self.kind {
            SymbolKind::ConstantOne => Some(vec![0; self.dimension]),
            SymbolKind::Monomial { alpha } => Some(alpha.clone()),
            _ => None,
        }
    }

    /// Radial profile `ψ(s)` with `s = |ξ|`, for radial symbols.
    pub fn radial(&self, s: T) -> Option<T> {
        match &self.kind {
            SymbolKind::BesselWeight { b } => Some((T::one() + s * s).powf(*b / T::lit(2.0))),
            SymbolKind::PurePower { b } => Some(if *b == T::zero() { T::one() } else { s.powf(*b) }),
            SymbolKind::ConstantOne => Some(T::one()),
            SymbolKind::Monomial { alpha } if alpha.iter().all(|&a| a == 0) => Some(T::one()),
            SymbolKind::Custom { radial: Some(f), .. } => Some(f(s)),
            _ => None,
        }
    }

    /// Evaluates `ψ(ξ)`.
    pub fn eval(&self, xi: &[T]) -> Result<T> {
        if xi.len() != self.dimension {
            return Err(Error::InvalidSpec(format!(
                "point has dimension {}, symbol has {}",
                xi.len(),
                self.dimension
            )));
        }
        let value = match &self.kind {
            SymbolKind::Monomial { alpha } => xi
                .iter()
                .zip(alpha)
                .fold(T::one(), |acc, (&x, &a)| acc * x.powi(a as i32)),
            SymbolKind::Custom { value, .. } => value(xi),
            SymbolKind::PurePower { b } if *b < T::zero() && xi.iter().all(|&x| x == T::zero()) => {
                return Err(Error::Domain { what: "symbol", point: xi.iter().map(|x| x.as_f64()).collect() });
            }
            _ => self.radial(norm(xi)).expect("radial kind"),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Domain { what: "symbol", point: xi.iter().map(|x| x.as_f64()).collect() })
        }
    }

    /// `ψ_ε(ξ) = e^{-ε|ξ|²} ψ(ξ)`.
    pub fn regularize(&self, epsilon: T) -> Result<RegularizedSymbol<'_, T>> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidSpec(format!("regularisation epsilon must be positive, got {epsilon}")));
        }
        Ok(RegularizedSymbol { symbol: self, epsilon })
    }

    pub fn to_config(&self) -> Result<SymbolConfig> {
        Ok(match &self.kind {
            SymbolKind::BesselWeight { b } => SymbolConfig::BesselWeight { b: b.as_f64() },
            SymbolKind::Monomial { alpha } => SymbolConfig::Monomial { alpha: alpha.clone() },
            SymbolKind::PurePower { b } => SymbolConfig::PurePower { b: b.as_f64() },
            SymbolKind::ConstantOne => SymbolConfig::ConstantOne,
            SymbolKind::Custom { .. } => return Err(Error::Config("custom symbols have no JSON form".into())),
        })
    }

    /// Builds a symbol in `dimension` variables; monomials must match it.
    pub fn from_config(config: &SymbolConfig, dimension: usize) -> Result<Self> {
        match config {
            SymbolConfig::BesselWeight { b } => Self::bessel_weight(dimension, T::lit(*b)),
            SymbolConfig::Monomial { alpha } => {
                if alpha.len() != dimension {
                    return Err(Error::Config(format!(
                        "monomial multi-index has {} entries, dimension is {dimension}",
                        alpha.len()
                    )));
                }
                Self::monomial(alpha)
            }
            SymbolConfig::PurePower { b } => Self::pure_power(dimension, T::lit(*b)),
            SymbolConfig::ConstantOne => Self::constant_one(dimension),
        }
    }
}

/// `ψ` multiplied by the Gaussian damping `e^{-ε|ξ|²}`.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedSymbol<'a, T: Real> {
    symbol: &'a SymbolSpec<T>,
    epsilon: T,
}

impl<T: Real> RegularizedSymbol<'_, T> {
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn eval(&self, xi: &[T]) -> Result<T> {
        let s2 = xi.iter().fold(T::zero(), |acc, &x| acc + x * x);
        Ok((-self.epsilon * s2).exp() * self.symbol.eval(xi)?)
    }
}

/// JSON form, e.g. `{"kind":"bessel_weight","b":1.0}` or `{"kind":"monomial","alpha":[1,0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolConfig {
    BesselWeight { b: f64 },
    Monomial { alpha: Vec<u32> },
    PurePower { b: f64 },
    ConstantOne,
}
