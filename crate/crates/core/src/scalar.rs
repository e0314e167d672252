//! Scalar abstractions shared by every module.
//!
//! Floating-point numerics are written against [`Real`] (implemented for `f32` and `f64`);
//! exponent algebra is written against [`ExactScalar`], whose canonical instance is the
//! exact [`Rational`] type. `f64` also implements [`ExactScalar`] so the same formulas can be
//! evaluated in floating point when exactness is not needed.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Floating-point scalar used by the quadrature, FFT and fitting code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Display
    + Debug
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; every literal used in this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational number used for all exponent arithmetic.
pub type Rational = Ratio<i128>;

/// Field-like scalar in which the exponent algebra is carried out.
pub trait ExactScalar:
    Clone + PartialOrd + Debug + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("integer representable")
    }

    /// Best-effort conversion of a float; for [`Rational`] this finds a small-denominator
    /// fraction (so `2.5` becomes `5/2`).
    fn from_float(x: f64) -> Option<Self> {
        Self::from_f64(x)
    }

    fn to_float(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Display form used in reports: `p/q` for rationals, shortest decimal for floats.
    fn render(&self) -> String;
}

impl ExactScalar for Rational {
    fn render(&self) -> String {
        if self.is_integer() {
            format!("{}", self.numer())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl ExactScalar for f64 {
    fn render(&self) -> String {
        format!("{self}")
    }
}

impl ExactScalar for f32 {
    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Builds a rational from numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num as i128, den as i128)
}

/// Neumaier-compensated accumulator for complex sums.
///
/// Addition order is fixed by the caller, so results are bit-reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T: Real> {
    sum: Complex<T>,
    carry: Complex<T>,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: Complex::new(T::zero(), T::zero()),
            carry: Complex::new(T::zero(), T::zero()),
        }
    }

    #[inline]
    pub fn add(&mut self, value: Complex<T>) {
        let (re, cre) = neumaier_step(self.sum.re, self.carry.re, value.re);
        let (im, cim) = neumaier_step(self.sum.im, self.carry.im, value.im);
        self.sum = Complex::new(re, im);
        self.carry = Complex::new(cre, cim);
    }

    pub fn value(&self) -> Complex<T> {
        self.sum + self.carry
    }
}

/// Neumaier-compensated accumulator for real sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedReal<T: Real> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedReal<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let (s, c) = neumaier_step(self.sum, self.carry, value);
        self.sum = s;
        self.carry = c;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier_step<T: Real>(sum: T, carry: T, value: T) -> (T, T) {
    let t = sum + value;
    let c = if sum.abs() >= value.abs() {
        (sum - t) + value
    } else {
        (value - t) + sum
    };
    (t, carry + c)
}

/// Euclidean norm of a slice.
pub fn norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc.hypot(x))
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > 0.0, "log_space needs positive bounds");
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k == 0 {
                        lo
                    } else if k == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
