//! Bessel functions `J_ν` of integer and half-integer order `-1/2 <= ν <= 6`.
//!
//! Small arguments use the ascending series. Beyond [`SERIES_LIMIT`] the two lowest orders come
//! from the large-argument expansion (integer) or closed forms (half-integer), and higher orders
//! from upward recurrence, which is stable there since `z > ν`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest argument evaluated by the ascending series.
pub const SERIES_LIMIT: f64 = 14.0;
/// Largest supported order.
pub const MAX_ORDER: f64 = 6.0;

/// Validates that `2ν` is an integer in `[-1, 12]`.
pub fn check_order<T: Real>(order: T) -> Result<i32> {
    let twice = order.as_f64() * 2.0;
    if twice.fract() != 0.0 || !(-1.0..=2.0 * MAX_ORDER).contains(&twice) {
        return Err(Error::UnsupportedOrder(order.as_f64()));
    }
    Ok(twice as i32)
}

/// `J_ν(z)` for `z >= 0`.
pub fn bessel_j<T: Real>(order: T, z: T) -> Result<T> {
    let twice = check_order(order)?;
    if z < T::zero() || !z.is_finite() {
        return Err(Error::Domain { what: "Bessel argument", point: vec![z.as_f64()] });
    }
    if z == T::zero() {
        return match twice {
            0 => Ok(T::one()),
            -1 => Err(Error::Domain { what: "J_{-1/2}", point: vec![0.0] }),
            _ => Ok(T::zero()),
        };
    }
    if z <= T::lit(SERIES_LIMIT) {
        return Ok(series(order, z));
    }
    let (mut prev, mut cur, mut nu) = if twice % 2 == 0 {
        (asymptotic(T::zero(), z), asymptotic(T::one(), z), T::one())
    } else {
        let scale = (T::lit(2.0) / (T::PI() * z)).sqrt();
        (scale * z.cos(), scale * z.sin(), T::lit(0.5))
    };
    if twice == 0 || twice == -1 {
        return Ok(prev);
    }
    while nu < order {
        let next = T::lit(2.0) * nu / z * cur - prev;
        prev = cur;
        cur = next;
        nu = nu + T::one();
    }
    Ok(cur)
}

/// Ascending series `Σ (-1)^k (z/2)^{2k+ν} / (k! Γ(k+ν+1))`.
fn series<T: Real>(order: T, z: T) -> T {
    let half = z / T::lit(2.0);
    let mut term = half.powf(order) / gamma_shifted(order);
    let mut sum = term;
    let q = -half * half;
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * q / (k * (k + order));
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(1e-2) * sum.abs() && k > half {
            break;
        }
        if k > T::lit(500.0) {
            break;
        }
    }
    sum
}

/// `Γ(ν+1)` for integer or half-integer `ν >= -1/2`.
fn gamma_shifted<T: Real>(order: T) -> T {
    let target = order + T::one();
    let (mut x, mut g) = if (order.as_f64() * 2.0) as i64 % 2 == 0 {
        (T::one(), T::one())
    } else {
        (T::lit(0.5), T::PI().sqrt())
    };
    while x < target {
        g = g * x;
        x = x + T::one();
    }
    g
}

/// Coefficients `(P, Q)` of the large-argument expansion
/// `J_ν(z) ≈ √(2/(πz)) (P cos ω - Q sin ω)`, `ω = z - νπ/2 - π/4`, summed up to the
/// smallest term.
pub fn hankel_pq<T: Real>(order: T, z: T) -> (T, T) {
    let mu = T::lit(4.0) * order * order;
    let eight_z = T::lit(8.0) * z;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        let kk = T::from_usize(k).expect("small");
        let odd = T::lit(2.0) * kk - T::one();
        let next = term * (mu - odd * odd) / (kk * eight_z);
        if next.abs() >= last && k > 2 {
            break;
        }
        last = next.abs();
        term = next;
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 0 {
            p = p + sign * term;
        } else {
            q = q + sign * term;
        }
        if term.abs() < T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    (p, q)
}

fn asymptotic<T: Real>(order: T, z: T) -> T {
    let (p, q) = hankel_pq(order, z);
    let omega = z - order * T::FRAC_PI_2() - T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * z)).sqrt() * (p * omega.cos() - q * omega.sin())
}
