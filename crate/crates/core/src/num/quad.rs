//! Double-exponential (tanh-sinh) quadrature.
//!
//! Integrands receive both `x` and `1 - x` so that endpoint singularities at
//! either end can be evaluated without cancellation.

use super::Real;

#[derive(Clone, Debug)]
pub struct QuadResult<R> {
    pub value: R,
    pub error: f64,
    pub evaluations: usize,
}

fn node<R: Real>(t: &R) -> (R, R, R) {
    let e = t.exp();
    let einv = R::one() / e.clone();
    let sinh = (e.clone() - einv.clone()) / R::from_i64(2);
    let cosh = (e + einv) / R::from_i64(2);
    let u = R::pi() * sinh;
    let x = R::one() / (R::one() + (-u.clone()).exp());
    let y = R::one() / (R::one() + u.exp());
    let w = R::pi() * cosh * x.clone() * y.clone();
    (x, y, w)
}

/// Integrates `f(x, 1-x)` over (0, 1) to relative tolerance `tol`.
pub fn tanh_sinh<R: Real>(f: impl Fn(&R, &R) -> R, tol: f64) -> QuadResult<R> {
    let u_max = (3.0 * R::precision_bits() as f64 * std::f64::consts::LN_2).max(700.0);
    let u_max = if R::precision_bits() <= 64 { 700.0 } else { u_max };
    let t_max = (u_max / std::f64::consts::PI).asinh();
    let max_level = if R::precision_bits() <= 64 { 12 } else { 16 };
    let mut evals = 0usize;
    let mut eval = |t: f64| -> R {
        let (x, y, w) = node(&R::from_f64(t));
        if x.is_zero_value() || y.is_zero_value() {
            return R::zero();
        }
        evals += 1;
        let v = f(&x, &y);
        if v.is_finite_value() {
            v * w
        } else {
            R::zero()
        }
    };
    let mut h = 0.5f64;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut est = sum.clone() * R::from_f64(h);
    let mut err = f64::INFINITY;
    for _ in 1..max_level {
        h /= 2.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum.clone() * R::from_f64(h);
        err = (next.clone() - est.clone()).abs().to_f64();
        est = next;
        if err <= tol * est.abs().to_f64().max(1e-300) {
            break;
        }
    }
    QuadResult {
        value: est,
        error: err,
        evaluations: evals,
    }
}

/// Integrates f over [a, b].
pub fn integrate<R: Real>(f: impl Fn(&R) -> R, a: &R, b: &R, tol: f64) -> QuadResult<R> {
    let len = b.clone() - a.clone();
    let r = tanh_sinh(|x: &R, _| f(&(a.clone() + len.clone() * x.clone())), tol);
    QuadResult {
        value: r.value * len.clone(),
        error: r.error * len.abs().to_f64(),
        evaluations: r.evaluations,
    }
}

/// Integrates f over [a, infinity) via x = a/u.
pub fn integrate_to_infinity<R: Real>(f: impl Fn(&R) -> R, a: &R, tol: f64) -> QuadResult<R> {
    tanh_sinh(
        |u: &R, _| {
            let x = a.clone() / u.clone();
            f(&x) * a.clone() / (u.clone() * u.clone())
        },
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{Field, Mpf};

    #[test]
    fn beta_integral_with_singularities() {
        let r = tanh_sinh(|x: &f64, y: &f64| f64::powf(*x, -0.7) * f64::powf(*y, -0.4), 1e-13);
        let exact = Real::gamma(&0.3) * Real::gamma(&0.6) / Real::gamma(&0.9);
        assert!((r.value - exact).abs() < 1e-11 * exact, "{} {}", r.value, exact);
    }

    #[test]
    fn log_integrand() {
        let r = tanh_sinh(|x: &f64, y: &f64| x * x.ln() + y * y.ln(), 1e-14);
        assert!((r.value + 0.5).abs() < 1e-13);
    }

    #[test]
    fn mpf_precision() {
        let r = tanh_sinh(|x: &Mpf, _| x.sqrt(), 1e-30);
        let err = (r.value - Mpf::from_ratio(2, 3)).abs().to_f64();
        assert!(err < 1e-30, "{err}");
    }

    #[test]
    fn infinite_range() {
        let r = integrate_to_infinity(|x: &f64| 1.0 / (x * x), &4.0, 1e-14);
        assert!((r.value - 0.25).abs() < 1e-14);
        let s = integrate(|x: &f64| x.exp(), &1.0, &2.0, 1e-14);
        assert!((s.value - (2f64.exp() - 1f64.exp())).abs() < 1e-13);
    }
}
