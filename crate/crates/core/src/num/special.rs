//! Special functions and constants not provided by the scalar backends.

use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{binomial_big, Field, Real};

/// Bernoulli numbers B_0..=B_n with B_1 = -1/2.
pub fn bernoulli_table(n: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![<BigRational as Field>::one()]));
    let mut b = cache.lock().expect("bernoulli cache");
    while b.len() <= n {
        let m = b.len() as u64;
        let mut acc = <BigRational as Field>::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binomial_big(m + 1, k as u64)) * bk;
        }
        let next = -acc / BigRational::from_integer(BigInt::from(m + 1));
        b.push(next);
    }
    b[..=n].to_vec()
}

fn em_terms<R: Real>() -> (u64, usize) {
    let bits = R::precision_bits() as u64;
    (12 + bits / 4, 6 + bits as usize / 6)
}

/// Riemann zeta by Euler-Maclaurin summation; valid for real s != 1.
pub fn zeta_em<R: Real>(s: &R) -> R {
    let (n, p) = em_terms::<R>();
    let n = n.max((s.to_f64().abs() as u64) + 10);
    let bern = bernoulli_table(2 * p);
    let mut acc = R::zero();
    for k in 1..n {
        acc += R::from_i64(k as i64).powf(&-s.clone());
    }
    let nr = R::from_i64(n as i64);
    let n_s = nr.powf(&-s.clone());
    acc += nr.clone() * n_s.clone() / (s.clone() - R::one());
    acc += n_s.clone() / R::from_i64(2);
    let mut rise = s.clone();
    let mut pow = n_s / nr.clone();
    let mut fact = R::from_i64(2);
    for j in 1..=p {
        let b = R::from_big_ratio(&bern[2 * j]);
        acc += b * rise.clone() * pow.clone() / fact.clone();
        let a = (2 * j) as i64;
        rise *= (s.clone() + R::from_i64(a - 1)) * (s.clone() + R::from_i64(a));
        pow = pow / (nr.clone() * nr.clone());
        fact *= R::from_i64((a + 1) * (a + 2));
    }
    acc
}

/// First Stieltjes constant.
pub fn stieltjes1<R: Real>() -> R {
    let (n, p) = em_terms::<R>();
    let bern = bernoulli_table(2 * p);
    let f = |k: u64| {
        let x = R::from_i64(k as i64);
        x.ln() / x
    };
    let mut acc = R::zero();
    for k in 1..=n {
        acc += f(k);
    }
    let nr = R::from_i64(n as i64);
    let ln_n = nr.ln();
    acc -= ln_n.clone() * ln_n.clone() / R::from_i64(2);
    acc -= f(n) / R::from_i64(2);
    let mut fact_m = R::one();
    let mut h_m = R::one();
    let mut fact_2j = R::from_i64(2);
    let mut pow = nr.clone() * nr.clone();
    for j in 1..=p {
        let m = 2 * j - 1;
        let deriv = fact_m.clone() * (ln_n.clone() - h_m.clone()) / pow.clone();
        let b = R::from_big_ratio(&bern[2 * j]);
        acc -= b * (-deriv) / fact_2j.clone();
        fact_m *= R::from_i64((m + 1) as i64) * R::from_i64((m + 2) as i64);
        h_m += R::one() / R::from_i64((m + 1) as i64) + R::one() / R::from_i64((m + 2) as i64);
        pow *= nr.clone() * nr.clone();
        fact_2j *= R::from_i64(((2 * j + 1) * (2 * j + 2)) as i64);
    }
    acc
}

/// k-th derivative of f at x by central differences with one Richardson step.
pub fn derivative<R: Real>(f: impl Fn(&R) -> R, x: &R, order: u32) -> R {
    if order == 0 {
        return f(x);
    }
    let h = R::from_f64(R::diff_step() * (1.0 + x.to_f64().abs()).min(8.0));
    let d = |h: &R| {
        let mut acc = R::zero();
        for i in 0..=order {
            let shift = R::from_f64(order as f64 / 2.0 - i as f64) * h.clone();
            let c = R::from_bigint(&binomial_big(order as u64, i as u64));
            let t = c * f(&(x.clone() + shift));
            if i % 2 == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc / h.powi(order)
    };
    let d1 = d(&h);
    let d2 = d(&(h / R::from_i64(2)));
    (R::from_i64(4) * d2 - d1) / R::from_i64(3)
}

/// Scaled Catalan numbers beta_j / 4^j for j in 0..=n.
pub fn catalan_scaled<F: Field>(n: usize) -> Vec<F> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = F::one();
    out.push(v.clone());
    for j in 0..n {
        v = v * F::from_ratio(2 * j as i64 + 1, 2 * (j as i64 + 2));
        out.push(v.clone());
    }
    out
}

/// Asymptotic expansion coefficients of sqrt(pi) n^{3/2} beta_n / 4^n in powers of 1/n.
pub const CATALAN_ASYMPTOTIC: [(i64, i64); 5] = [
    (1, 1),
    (-9, 8),
    (145, 128),
    (-1155, 1024),
    (36939, 32768),
];

pub fn catalan_scaled_asymptotic<R: Real>(x: &R) -> R {
    let inv = R::one() / x.clone();
    let mut acc = R::zero();
    let mut p = R::one();
    for &(a, b) in CATALAN_ASYMPTOTIC.iter() {
        acc += R::from_ratio(a, b) * p.clone();
        p *= inv.clone();
    }
    acc / (x.clone() * x.sqrt() * R::pi().sqrt())
}

/// Asymptotic harmonic number for real argument.
pub fn harmonic_asymptotic<R: Real>(x: &R) -> R {
    let inv = R::one() / x.clone();
    x.ln() + R::euler_gamma() + inv.clone() / R::from_i64(2) - inv.powi(2) / R::from_i64(12)
        + inv.powi(4) / R::from_i64(120)
        - inv.powi(6) / R::from_i64(252)
}

/// Asymptotic second-order harmonic number for real argument.
pub fn harmonic2_asymptotic<R: Real>(x: &R) -> R {
    let inv = R::one() / x.clone();
    R::pi() * R::pi() / R::from_i64(6) - inv.clone() + inv.powi(2) / R::from_i64(2)
        - inv.powi(3) / R::from_i64(6)
        + inv.powi(5) / R::from_i64(30)
        - inv.powi(7) / R::from_i64(42)
}
