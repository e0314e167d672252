//! Numerical laboratory for decay estimates of oscillatory integrals
//! `I(t,x) = ∫ e^{i(t a(ξ) + x·ξ)} ψ(ξ) dξ`.
//!
//! The crate models the admissible phases `a` and symbols `ψ`, computes the predicted
//! space-time decay envelopes and admissible Lebesgue exponents, evaluates the integrals
//! numerically and checks measured decay against the predictions.

pub mod cli;
pub mod envelope;
pub mod error;
pub mod fitcheck;
pub mod oscint;
pub mod phase;
pub mod propagator;
pub mod scalar;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, Rational, Real};

/// Double-precision phase.
pub type Phase = phase::PhaseSpec<f64>;
/// Double-precision symbol.
pub type Symbol = symbol::SymbolSpec<f64>;
