//! Scalar abstractions shared by every engine.
//!
//! [`Field`] covers the arithmetic needed by the exact recurrences and is
//! implemented for `f64`, [`Mpf`] and [`BigRational`]. [`Real`] adds the
//! transcendental functions and is implemented for `f64` and [`Mpf`].

pub mod complex;
pub mod mpf;
pub mod quad;
pub mod special;
pub mod sum;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use complex::Cx;
pub use mpf::Mpf;

pub trait Field:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    fn from_i64(v: i64) -> Self;
    /// Exact for rationals; rounds to the working precision otherwise.
    fn from_f64(v: f64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn to_f64(&self) -> f64;

    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }
    fn from_big_ratio(v: &BigRational) -> Self {
        Self::from_bigint(v.numer()) / Self::from_bigint(v.denom())
    }
    fn is_zero_value(&self) -> bool {
        self.to_f64() == 0.0
    }
    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

pub trait Real: Field + PartialOrd {
    /// Mantissa bits of the current working precision.
    fn precision_bits() -> u32;
    fn pi() -> Self;
    fn euler_gamma() -> Self;
    fn ln2() -> Self;
    fn ln(&self) -> Self;
    fn ln_1p(&self) -> Self;
    fn exp(&self) -> Self;
    fn exp_m1(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn gamma(&self) -> Self;
    fn ln_gamma(&self) -> Self;
    fn digamma(&self) -> Self;
    fn zeta(&self) -> Self;
    fn is_finite_value(&self) -> bool {
        self.to_f64().is_finite()
    }
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
    fn epsilon() -> f64 {
        2f64.powi(1 - Self::precision_bits() as i32)
    }
    /// Step used by central differences at this precision.
    fn diff_step() -> f64 {
        if Self::precision_bits() <= 64 {
            1e-4
        } else {
            1e-6
        }
    }
}

impl Field for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_big_ratio(v: &BigRational) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }
}

impl Real for f64 {
    fn precision_bits() -> u32 {
        53
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn euler_gamma() -> Self {
        0.577_215_664_901_532_9
    }
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn exp_m1(&self) -> Self {
        f64::exp_m1(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn gamma(&self) -> Self {
        statrs::function::gamma::gamma(*self)
    }
    fn ln_gamma(&self) -> Self {
        statrs::function::gamma::ln_gamma(*self)
    }
    fn digamma(&self) -> Self {
        statrs::function::gamma::digamma(*self)
    }
    fn zeta(&self) -> Self {
        special::zeta_em(self)
    }
}

impl Field for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn from_big_ratio(v: &BigRational) -> Self {
        v.clone()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Binomial coefficient as an exact integer.
pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

pub fn binomial<F: Field>(n: u64, k: u64) -> F {
    F::from_bigint(&binomial_big(n, k))
}

pub fn factorial_big(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Rising factorial x(x+1)...(x+k-1).
pub fn rising<F: Field>(x: &F, k: u64) -> F {
    let mut acc = F::one();
    for i in 0..k {
        acc *= x.clone() + F::from_i64(i as i64);
    }
    acc
}

/// Exact harmonic number of order r.
pub fn harmonic_exact(n: u64, r: u32) -> BigRational {
    let mut acc = <BigRational as Zero>::zero();
    for j in 1..=n {
        acc += BigRational::new(BigInt::one(), BigInt::from(j).pow(r));
    }
    acc
}

pub fn harmonic<F: Field>(n: u64, r: u32) -> F {
    F::from_big_ratio(&harmonic_exact(n, r))
}

/// Multinomial coefficient k!/(k_1!...k_p!) for small orders.
pub fn multinomial(parts: &[usize]) -> f64 {
    let total: usize = parts.iter().sum();
    let mut acc = 1.0f64;
    let mut run = 0usize;
    for &p in parts {
        for i in 1..=p {
            run += 1;
            acc = acc * run as f64 / i as f64;
        }
    }
    debug_assert_eq!(run, total);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_and_rising() {
        assert_eq!(binomial_big(6, 2), BigInt::from(15));
        assert_eq!(binomial_big(3, 5), BigInt::from(0));
        assert_eq!(rising(&3.0f64, 4), 3.0 * 4.0 * 5.0 * 6.0);
        assert_eq!(factorial_big(5), BigInt::from(120));
    }

    #[test]
    fn harmonic_small() {
        let h3: BigRational = harmonic_exact(3, 1);
        assert_eq!(h3, BigRational::new(BigInt::from(11), BigInt::from(6)));
        let h2: f64 = harmonic(2, 2);
        assert!((h2 - 1.25).abs() < 1e-15);
    }

    #[test]
    fn multinomial_matches_factorials() {
        assert_eq!(multinomial(&[1, 1, 0]), 2.0);
        assert_eq!(multinomial(&[2, 1, 1]), 12.0);
    }

    #[test]
    fn gamma_negative_arguments() {
        let g = Real::gamma(&-0.5f64);
        assert!((g + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn powi_rational() {
        let x = BigRational::from_ratio(2, 3);
        assert_eq!(x.powi(3), BigRational::from_ratio(8, 27));
    }
}
