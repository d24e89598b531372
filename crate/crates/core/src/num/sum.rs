//! Compensated summation and tail-corrected infinite series.

use serde::Serialize;

use super::quad::integrate_to_infinity;
use super::special::derivative;
use super::Real;

/// Neumaier compensated accumulator.
#[derive(Clone, Debug)]
pub struct Neumaier<R> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for Neumaier<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> Neumaier<R> {
    pub fn new() -> Self {
        Neumaier {
            sum: R::zero(),
            comp: R::zero(),
        }
    }
    pub fn add(&mut self, x: R) {
        let t = self.sum.clone() + x.clone();
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum.clone() - t.clone()) + x;
        } else {
            self.comp += (x - t.clone()) + self.sum.clone();
        }
        self.sum = t;
    }
    pub fn value(&self) -> R {
        self.sum.clone() + self.comp.clone()
    }
}

pub fn neumaier_sum<R: Real>(it: impl IntoIterator<Item = R>) -> R {
    let mut acc = Neumaier::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub partial: f64,
    pub tail: f64,
    pub bound: f64,
    pub terms: u64,
}

/// Sums `term(k)` for k in `start..=n` and adds the midpoint Euler-Maclaurin
/// estimate of the remaining tail computed from the smooth extension `cont`.
/// The bound is the first omitted correction plus the quadrature error.
pub fn series_with_tail<R: Real>(
    term: impl Fn(u64) -> R,
    cont: impl Fn(&R) -> R,
    start: u64,
    n: u64,
) -> (R, R, f64) {
    let partial = neumaier_sum((start..=n).map(&term));
    let a = R::from_f64(n as f64 + 0.5);
    let tol = (R::epsilon() * 16.0).max(1e-40);
    let q = integrate_to_infinity(&cont, &a, tol);
    let d1 = derivative(&cont, &a, 1);
    let d3 = derivative(&cont, &a, 3);
    let tail = q.value + d1 / R::from_i64(24);
    let next = (d3 * R::from_ratio(7, 5760)).abs().to_f64();
    let bound = next + q.error;
    (partial.clone() + tail.clone(), tail, bound)
}

pub fn series_summary<R: Real>(
    term: impl Fn(u64) -> R,
    cont: impl Fn(&R) -> R,
    start: u64,
    n: u64,
) -> SeriesValue {
    let (v, tail, bound) = series_with_tail(term, cont, start, n);
    SeriesValue {
        value: v.to_f64(),
        partial: (v.clone() - tail.clone()).to_f64(),
        tail: tail.to_f64(),
        bound,
        terms: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Mpf;
    use crate::num::Field;

    #[test]
    fn compensation_helps() {
        let xs = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(xs), 2.0);
    }

    #[test]
    fn zeta_two_via_tail() {
        let (v, _, bound) = series_with_tail(
            |k| 1.0 / (k as f64 * k as f64),
            |x: &f64| 1.0 / (x * x),
            1,
            200,
        );
        let exact = std::f64::consts::PI.powi(2) / 6.0;
        assert!((v - exact).abs() < 1e-12, "{}", v - exact);
        assert!(bound < 1e-11);
    }

    #[test]
    fn log_series_mpf() {
        let (v, _, bound) = series_with_tail(
            |k| {
                let x = Mpf::from_i64(k as i64);
                x.ln() / (x.clone() * x)
            },
            |x: &Mpf| x.ln() / (x.clone() * x.clone()),
            1,
            2000,
        );
        let zeta_prime_2 = -0.937_548_254_315_843_8f64;
        assert!((v.to_f64() + zeta_prime_2).abs() < 1e-15);
        assert!(bound < 1e-15);
    }
}
