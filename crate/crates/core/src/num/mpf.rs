//! Multiple-precision real backed by MPFR.
//!
//! Values are created at the thread's working precision, which defaults to
//! 128 bits and can be overridden with the `SST_PRECISION` environment
//! variable or scoped with [`with_precision`].

use std::cell::Cell;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_bigint::BigInt;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::{Field, Real};

pub const DEFAULT_PRECISION: u32 = 128;

thread_local! {
    static PREC: Cell<u32> = const { Cell::new(0) };
}

fn env_precision() -> u32 {
    static ENV: OnceLock<u32> = OnceLock::new();
    *ENV.get_or_init(|| {
        std::env::var("SST_PRECISION")
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .filter(|&p| p >= 64)
            .unwrap_or(DEFAULT_PRECISION)
    })
}

pub fn precision() -> u32 {
    let p = PREC.with(|c| c.get());
    if p == 0 {
        env_precision()
    } else {
        p
    }
}

pub fn set_precision(bits: u32) {
    PREC.with(|c| c.set(bits.max(64)));
}

/// Runs `f` with a temporary working precision on this thread.
pub fn with_precision<T>(bits: u32, f: impl FnOnce() -> T) -> T {
    let old = PREC.with(|c| c.get());
    PREC.with(|c| c.set(bits.max(64)));
    let out = f();
    PREC.with(|c| c.set(old));
    out
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mpf(pub Float);

impl Mpf {
    pub fn new(v: f64) -> Self {
        Mpf(Float::with_val(precision(), v))
    }
    pub fn inner(&self) -> &Float {
        &self.0
    }
    pub fn parse(s: &str) -> Self {
        let p = Float::parse(s).expect("valid float literal");
        Mpf(Float::with_val(precision(), p))
    }
    pub fn to_string_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

impl fmt::Debug for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(30)))
    }
}

impl fmt::Display for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident, $tra:ident, $ma:ident, $op:tt) => {
        impl $tr for Mpf {
            type Output = Mpf;
            fn $m(self, rhs: Mpf) -> Mpf {
                let p = self.0.prec().max(rhs.0.prec());
                Mpf(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tra for Mpf {
            fn $ma(&mut self, rhs: Mpf) {
                let p = self.0.prec().max(rhs.0.prec());
                self.0 = Float::with_val(p, &self.0 $op &rhs.0);
            }
        }
    };
}

bin_op!(Add, add, AddAssign, add_assign, +);
bin_op!(Sub, sub, SubAssign, sub_assign, -);
bin_op!(Mul, mul, MulAssign, mul_assign, *);
bin_op!(Div, div, DivAssign, div_assign, /);

impl Neg for Mpf {
    type Output = Mpf;
    fn neg(self) -> Mpf {
        Mpf(-self.0)
    }
}

impl Field for Mpf {
    fn from_i64(v: i64) -> Self {
        Mpf(Float::with_val(precision(), v))
    }
    fn from_f64(v: f64) -> Self {
        Mpf(Float::with_val(precision(), v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        let s = v.to_string();
        let i = rug::Integer::from_str_radix(&s, 10).expect("integer literal");
        Mpf(Float::with_val(precision(), i))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        let r = rug::Rational::from((p, q));
        Mpf(Float::with_val(precision(), r))
    }
    fn is_zero_value(&self) -> bool {
        self.0.is_zero()
    }
}

impl Real for Mpf {
    fn precision_bits() -> u32 {
        precision()
    }
    fn pi() -> Self {
        Mpf(Float::with_val(precision(), Constant::Pi))
    }
    fn euler_gamma() -> Self {
        Mpf(Float::with_val(precision(), Constant::Euler))
    }
    fn ln2() -> Self {
        Mpf(Float::with_val(precision(), Constant::Log2))
    }
    fn ln(&self) -> Self {
        Mpf(self.0.clone().ln())
    }
    fn ln_1p(&self) -> Self {
        Mpf(self.0.clone().ln_1p())
    }
    fn exp(&self) -> Self {
        Mpf(self.0.clone().exp())
    }
    fn exp_m1(&self) -> Self {
        Mpf(self.0.clone().exp_m1())
    }
    fn sqrt(&self) -> Self {
        Mpf(self.0.clone().sqrt())
    }
    fn abs(&self) -> Self {
        Mpf(self.0.clone().abs())
    }
    fn powf(&self, e: &Self) -> Self {
        Mpf(self.0.clone().pow(&e.0))
    }
    fn gamma(&self) -> Self {
        Mpf(self.0.clone().gamma())
    }
    fn ln_gamma(&self) -> Self {
        Mpf(self.0.clone().ln_abs_gamma().0)
    }
    fn digamma(&self) -> Self {
        Mpf(self.0.clone().digamma())
    }
    fn zeta(&self) -> Self {
        Mpf(self.0.clone().zeta())
    }
    fn is_finite_value(&self) -> bool {
        self.0.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scoped_precision() {
        let a = with_precision(200, || Mpf::from_i64(2).sqrt());
        assert_eq!(a.0.prec(), 200);
        let s = a.to_string_digits(40);
        assert!(s.starts_with("1.4142135623730950488016887242096980785"), "{s}");
    }

    #[test]
    fn arithmetic_and_constants() {
        let x = Mpf::from_ratio(1, 3) * Mpf::from_i64(3);
        assert!((x.to_f64() - 1.0).abs() < 1e-30);
        let g = Mpf::from_f64(0.5).gamma();
        assert!((g.to_f64() - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((Mpf::euler_gamma().to_f64() - 0.5772156649015329).abs() < 1e-16);
    }

    #[test]
    fn bigint_roundtrip() {
        let b = BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let m = Mpf::from_bigint(&b);
        assert!((m.to_f64() / 1.2345678901234568e29 - 1.0).abs() < 1e-15);
    }
}
