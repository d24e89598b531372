//! Minimal complex arithmetic over any [`Real`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{Field, Real};

#[derive(Clone, PartialEq)]
pub struct Cx<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Cx<R> {
    pub fn new(re: R, im: R) -> Self {
        Cx { re, im }
    }
    pub fn real(re: R) -> Self {
        Cx { re, im: R::zero() }
    }
    pub fn zero() -> Self {
        Cx::real(R::zero())
    }
    pub fn one() -> Self {
        Cx::real(R::one())
    }
    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx::new(R::from_f64(re), R::from_f64(im))
    }
    pub fn conj(&self) -> Self {
        Cx::new(self.re.clone(), -self.im.clone())
    }
    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    pub fn abs(&self) -> R {
        self.norm_sqr().sqrt()
    }
    pub fn scale(&self, s: &R) -> Self {
        Cx::new(self.re.clone() * s.clone(), self.im.clone() * s.clone())
    }
    pub fn add_real(&self, s: &R) -> Self {
        Cx::new(self.re.clone() + s.clone(), self.im.clone())
    }
    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Cx::new(self.re.clone() / d.clone(), -self.im.clone() / d)
    }
    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Cx::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<R: Real> Add for Cx<R> {
    type Output = Cx<R>;
    fn add(self, o: Cx<R>) -> Cx<R> {
        Cx::new(self.re + o.re, self.im + o.im)
    }
}

impl<R: Real> Sub for Cx<R> {
    type Output = Cx<R>;
    fn sub(self, o: Cx<R>) -> Cx<R> {
        Cx::new(self.re - o.re, self.im - o.im)
    }
}

impl<R: Real> Mul for Cx<R> {
    type Output = Cx<R>;
    fn mul(self, o: Cx<R>) -> Cx<R> {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        Cx::new(re, im)
    }
}

impl<R: Real> Div for Cx<R> {
    type Output = Cx<R>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Cx<R>) -> Cx<R> {
        self * o.recip()
    }
}

impl<R: Real> Neg for Cx<R> {
    type Output = Cx<R>;
    fn neg(self) -> Cx<R> {
        Cx::new(-self.re, -self.im)
    }
}

impl<R: Field> fmt::Debug for Cx<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.re.to_f64(), self.im.to_f64());
        write!(f, "({re:e} {im:+e}i)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = Cx::<f64>::from_f64(1.0, 2.0);
        let b = Cx::<f64>::from_f64(-3.0, 0.5);
        let q = (a.clone() * b.clone()) / b;
        assert!((q.re - 1.0).abs() < 1e-15 && (q.im - 2.0).abs() < 1e-15);
        let i = Cx::<f64>::from_f64(0.0, 1.0);
        let m = i.powi(2);
        assert!((m.re + 1.0).abs() < 1e-15 && m.im.abs() < 1e-15);
    }
}
