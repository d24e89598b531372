//! The indicial polynomial `psi_m(l) = l (l+1) ... (l+m-2) - m!`.
//!
//! Roots are found by Aberth-Ehrlich iteration with the known real roots
//! (2, and -m for odd m) held fixed, polished at the working precision.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Result, SstError};
use crate::num::{factorial_big, harmonic, mpf, Cx, Field, Mpf, Real};

pub const MAX_M: usize = 64;

#[derive(Clone, Debug)]
pub struct IndicialData<R: Field> {
    pub m: usize,
    pub roots: Vec<Cx<R>>,
    pub psi_prime: Vec<Cx<R>>,
    pub alpha: Option<f64>,
    /// Pairs of non-conjugate roots whose real parts agree to working precision.
    pub near_ties: Vec<(usize, usize)>,
    pub max_residual: f64,
}

pub fn factorial<R: Field>(m: usize) -> R {
    R::from_bigint(&factorial_big(m as u64))
}

pub fn psi_eval<R: Real>(m: usize, l: &Cx<R>) -> Cx<R> {
    let mut p = Cx::one();
    for k in 0..m - 1 {
        p = p * l.add_real(&R::from_i64(k as i64));
    }
    p.add_real(&-factorial::<R>(m))
}

/// psi and psi' at `l` by the product form.
pub fn psi_and_derivative<R: Real>(m: usize, l: &Cx<R>) -> (Cx<R>, Cx<R>) {
    let mut p = Cx::one();
    let mut dp = Cx::zero();
    for k in 0..m - 1 {
        let f = l.add_real(&R::from_i64(k as i64));
        dp = dp * f.clone() + p.clone();
        p = p * f;
    }
    (p.add_real(&-factorial::<R>(m)), dp)
}

fn known_roots(m: usize) -> Vec<i64> {
    if m % 2 == 1 {
        vec![2, -(m as i64)]
    } else {
        vec![2]
    }
}

fn aberth<R: Real>(m: usize, fixed: &[Cx<R>], start: Vec<Cx<R>>, tol: f64, max_iter: usize) -> Option<Vec<Cx<R>>> {
    let mut z = start;
    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for i in 0..z.len() {
            let (p, dp) = psi_and_derivative(m, &z[i]);
            if p.abs().to_f64() == 0.0 {
                continue;
            }
            let ratio = dp / p;
            let mut s = Cx::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s + (z[i].clone() - zj.clone()).recip();
                }
            }
            for f in fixed {
                s = s + (z[i].clone() - f.clone()).recip();
            }
            let w = (ratio - s).recip();
            let step = w.abs().to_f64() / (1.0 + z[i].abs().to_f64());
            max_step = max_step.max(step);
            z[i] = z[i].clone() - w;
        }
        if !max_step.is_finite() {
            return None;
        }
        if max_step < tol {
            return Some(z);
        }
    }
    None
}

fn sort_roots<R: Real>(roots: &mut [Cx<R>]) {
    roots.sort_by(|a, b| {
        let (ar, ai) = a.to_f64();
        let (br, bi) = b.to_f64();
        br.partial_cmp(&ar)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(bi.partial_cmp(&ai).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Roots and derivative values at the precision of `R`.
pub fn psi_roots_in<R: Real>(m: usize) -> Result<IndicialData<R>> {
    if !(2..=MAX_M).contains(&m) {
        return Err(SstError::InvalidParameter(format!("m must lie in [2, {MAX_M}], got {m}")));
    }
    let fixed: Vec<Cx<R>> = known_roots(m).into_iter().map(|r| Cx::real(R::from_i64(r))).collect();
    let free = m - 1 - fixed.len();
    let mut roots = fixed.clone();
    if free > 0 {
        let fixed64: Vec<Cx<f64>> = known_roots(m).into_iter().map(|r| Cx::real(r as f64)).collect();
        let center = -(m as f64 - 2.0) / 2.0;
        let radius = m as f64 / 2.0 + 1.0;
        let start: Vec<Cx<f64>> = (0..free)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / free as f64 + 0.4;
                Cx::from_f64(center + radius * th.cos(), radius * th.sin())
            })
            .collect();
        let approx = aberth(m, &fixed64, start, 1e-13, 2000)
            .ok_or_else(|| SstError::Numerical(format!("root iteration did not converge for m = {m}")))?;
        let start: Vec<Cx<R>> = approx
            .iter()
            .map(|z| Cx::new(R::from_f64(z.re), R::from_f64(z.im)))
            .collect();
        let tol = R::epsilon() * 64.0;
        let polished = aberth(m, &fixed, start, tol, 200)
            .ok_or_else(|| SstError::Numerical(format!("root polishing did not converge for m = {m}")))?;
        let mut polished = polished;
        let n = polished.len();
        for i in 0..n {
            if polished[i].im.to_f64() <= 0.0 {
                continue;
            }
            let target = polished[i].conj();
            let j = (0..n)
                .filter(|&j| polished[j].im.to_f64() < 0.0)
                .min_by(|&a, &b| {
                    let da = (polished[a].clone() - target.clone()).abs().to_f64();
                    let db = (polished[b].clone() - target.clone()).abs().to_f64();
                    da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| SstError::Numerical(format!("unpaired complex root for m = {m}")))?;
            polished[j] = target;
        }
        roots.extend(polished);
    }
    sort_roots(&mut roots);
    let psi_prime: Vec<Cx<R>> = (0..roots.len())
        .map(|j| {
            let mut p = Cx::one();
            for (k, r) in roots.iter().enumerate() {
                if k != j {
                    p = p * (roots[j].clone() - r.clone());
                }
            }
            p
        })
        .collect();
    let mfact = factorial::<f64>(m);
    let max_residual = roots
        .iter()
        .map(|r| psi_eval(m, r).abs().to_f64() / mfact)
        .fold(0.0, f64::max);
    let alpha = (m > 2).then(|| roots[1].re.to_f64());
    let mut near_ties = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let same_re = (roots[i].re.clone() - roots[j].re.clone()).abs().to_f64() < 1e-20f64.max(R::epsilon() * 1e3);
            let conj = (roots[i].im.clone() + roots[j].im.clone()).abs().to_f64() < 1e-20f64.max(R::epsilon() * 1e3);
            if same_re && !conj {
                near_ties.push((i, j));
            }
        }
    }
    Ok(IndicialData {
        m,
        roots,
        psi_prime,
        alpha,
        near_ties,
        max_residual,
    })
}

/// Roots at the current multiple-precision setting, escalating precision on failure.
pub fn psi_roots(m: usize) -> Result<IndicialData<Mpf>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), IndicialData<Mpf>>>> = OnceLock::new();
    let prec = mpf::precision();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().expect("root cache").get(&(m, prec)) {
        return Ok(d.clone());
    }
    let data = match psi_roots_in::<Mpf>(m) {
        Ok(d) => d,
        Err(SstError::Numerical(_)) => {
            let hi = mpf::with_precision(prec * 2, || psi_roots_in::<Mpf>(m))?;
            IndicialData {
                roots: hi.roots.iter().map(|z| round_cx(z)).collect(),
                psi_prime: hi.psi_prime.iter().map(|z| round_cx(z)).collect(),
                ..hi
            }
        }
        Err(e) => return Err(e),
    };
    cache.lock().expect("root cache").insert((m, prec), data.clone());
    Ok(data)
}

fn round_cx(z: &Cx<Mpf>) -> Cx<Mpf> {
    let p = mpf::precision();
    Cx::new(
        Mpf(rug::Float::with_val(p, &z.re.0)),
        Mpf(rug::Float::with_val(p, &z.im.0)),
    )
}

pub fn alpha_of(m: usize) -> Result<f64> {
    let d = psi_roots(m)?;
    d.alpha
        .ok_or_else(|| SstError::InvalidParameter("alpha is undefined for m = 2".into()))
}

fn rising_cx<R: Real>(l: &Cx<R>, k: usize) -> Cx<R> {
    let mut p = Cx::one();
    for i in 0..k {
        p = p * l.add_real(&R::from_i64(i as i64));
    }
    p
}

/// Coefficients c_j of the homogeneous solution for initial values `b`.
pub fn ett_coefficients<R: Real>(data: &IndicialData<R>, b: &[R]) -> Result<Vec<Cx<R>>> {
    let m = data.m;
    if b.len() != m - 1 {
        return Err(SstError::InvalidParameter(format!("expected {} initial values", m - 1)));
    }
    let mfact = factorial::<R>(m);
    Ok(data
        .roots
        .iter()
        .zip(&data.psi_prime)
        .map(|(l, dp)| {
            let mut s = Cx::zero();
            let mut kf = R::one();
            for (k, bk) in b.iter().enumerate() {
                if k > 0 {
                    kf *= R::from_i64(k as i64);
                }
                s = s + rising_cx(l, k + 1).recip().scale(&(bk.clone() * kf.clone()));
            }
            (s / dp.clone()).scale(&mfact)
        })
        .collect())
}

/// c_1 by the harmonic-number formula.
pub fn c1_closed_form<R: Real>(m: usize, b: &[R]) -> R {
    let h: R = harmonic(m as u64, 1);
    let mut s = R::zero();
    for (j, bj) in b.iter().enumerate() {
        s += bj.clone() / R::from_i64(((j + 1) * (j + 2)) as i64);
    }
    s / (h - R::one())
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub name: String,
    pub parameter: Option<i64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub m: usize,
    pub entries: Vec<IdentityResidual>,
    pub skipped: Vec<String>,
    pub max_residual: f64,
}

/// Exact psi(-r) and psi'(-r) as integers.
fn psi_at_negative_integer(m: usize, r: i64) -> (BigInt, BigInt) {
    let mut p = BigInt::from(1);
    let mut dp = BigInt::from(0);
    for k in 0..m as i64 - 1 {
        let f = BigInt::from(k - r);
        dp = dp * &f + &p;
        p *= f;
    }
    (p - factorial_big(m as u64), dp)
}

fn cx_residual<R: Real>(lhs_terms: &[Cx<R>], rhs: Cx<R>) -> f64 {
    let mut sum = Cx::zero();
    let mut scale = 0.0f64;
    for t in lhs_terms {
        scale += t.abs().to_f64();
        sum = sum + t.clone();
    }
    let (a, b) = (sum.clone() - rhs.clone()).to_f64();
    let diff = (a * a + b * b).sqrt();
    let s = scale.max(rhs.abs().to_f64());
    if s == 0.0 {
        0.0
    } else {
        diff / s
    }
}

/// Relative residuals of the partial-fraction identities at the computed roots.
pub fn identity_residuals<R: Real>(data: &IndicialData<R>, probe: &Cx<R>) -> IdentityReport {
    let m = data.m;
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let inv: Vec<Cx<R>> = data.psi_prime.iter().map(|d| d.recip()).collect();

    let b1: Vec<Cx<R>> = data
        .roots
        .iter()
        .zip(&inv)
        .map(|(l, ip)| (probe.clone() - l.clone()).recip() * ip.clone())
        .collect();
    entries.push(IdentityResidual {
        name: "partial_fractions".into(),
        parameter: None,
        residual: cx_residual(&b1, psi_eval(m, probe).recip()),
    });

    let mut rs: Vec<i64> = vec![-1];
    rs.extend(0..=(m as i64 - 2));
    rs.extend((m as i64 - 1)..=(m as i64 + 3));
    for r in rs {
        let (p, dp) = psi_at_negative_integer(m, r);
        if p == BigInt::from(0) {
            skipped.push(format!("squared_partial_fractions r={r}: -r is a root"));
            continue;
        }
        let rhs = R::from_big_ratio(&BigRational::new(dp, p.clone() * p));
        let terms: Vec<Cx<R>> = data
            .roots
            .iter()
            .zip(&inv)
            .map(|(l, ip)| {
                let d = l.add_real(&R::from_i64(r));
                (d.clone() * d).recip() * ip.clone()
            })
            .collect();
        entries.push(IdentityResidual {
            name: "squared_partial_fractions".into(),
            parameter: Some(r),
            residual: cx_residual(&terms, Cx::real(rhs)),
        });
    }

    for k in 0..m.saturating_sub(2) {
        let terms: Vec<Cx<R>> = data
            .roots
            .iter()
            .zip(&inv)
            .map(|(l, ip)| l.powi(k as u32) * ip.clone())
            .collect();
        entries.push(IdentityResidual {
            name: "power_sums".into(),
            parameter: Some(k as i64),
            residual: cx_residual(&terms, Cx::zero()),
        });
    }

    let h1: R = harmonic(m as u64, 1);
    let h2: R = harmonic(m as u64, 2);
    let h3: R = harmonic(m as u64, 3);
    let (a, b, c) = (h1 - R::one(), h2 - R::one(), h3 - R::one());
    let mfact = factorial::<R>(m);
    let two_rhs = (R::one() - b.clone() / (a.clone() * a.clone())) / (R::from_i64(2) * mfact.clone());
    if m > 2 {
        let terms: Vec<Cx<R>> = data.roots[1..]
            .iter()
            .zip(&inv[1..])
            .map(|(l, ip)| l.add_real(&R::from_i64(-2)).recip() * ip.clone())
            .collect();
        entries.push(IdentityResidual {
            name: "shifted_at_two".into(),
            parameter: None,
            residual: cx_residual(&terms, Cx::real(two_rhs.clone())),
        });
    }
    if m % 2 == 1 {
        let mr = R::from_i64(m as i64);
        let others: Vec<usize> = (0..data.roots.len())
            .filter(|&j| (data.roots[j].re.to_f64() + m as f64).abs() > 1e-6 || data.roots[j].im.to_f64().abs() > 1e-6)
            .collect();
        let t3: Vec<Cx<R>> = others
            .iter()
            .map(|&j| data.roots[j].add_real(&mr).recip() * inv[j].clone())
            .collect();
        entries.push(IdentityResidual {
            name: "shifted_at_minus_m".into(),
            parameter: None,
            residual: cx_residual(&t3, Cx::real(two_rhs)),
        });
        let t4: Vec<Cx<R>> = others
            .iter()
            .map(|&j| {
                let d = data.roots[j].add_real(&mr);
                (d.clone() * d).recip() * inv[j].clone()
            })
            .collect();
        let rhs4 = (a.clone() / R::from_i64(12) - c / (R::from_i64(3) * a.clone() * a.clone())
            + b.clone() * b / (R::from_i64(4) * a.clone() * a.clone() * a))
            / mfact;
        entries.push(IdentityResidual {
            name: "squared_shifted_at_minus_m".into(),
            parameter: None,
            residual: cx_residual(&t4, Cx::real(rhs4)),
        });
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    IdentityReport {
        m,
        entries,
        skipped,
        max_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::mpf::with_precision;

    #[test]
    fn psi_examples() {
        assert!(psi_eval(2, &Cx::<f64>::from_f64(2.0, 0.0)).abs() == 0.0);
        assert!(psi_eval(3, &Cx::<f64>::from_f64(-3.0, 0.0)).abs() == 0.0);
        let v = psi_eval(4, &Cx::<f64>::zero());
        assert_eq!(v.re, -24.0);
    }

    #[test]
    fn small_root_sets() {
        let d = psi_roots(2).unwrap();
        assert_eq!(d.roots.len(), 1);
        assert_eq!(d.roots[0].re.to_f64(), 2.0);
        assert!(d.alpha.is_none());
        let d = psi_roots(3).unwrap();
        assert_eq!(d.roots[1].re.to_f64(), -3.0);
        assert_eq!(d.alpha, Some(-3.0));
        let d = psi_roots(4).unwrap();
        let s23 = 23f64.sqrt() / 2.0;
        assert!((d.roots[1].re.to_f64() + 2.5).abs() < 1e-30);
        assert!((d.roots[1].im.to_f64() - s23).abs() < 1e-15);
        assert!((d.roots[2].im.to_f64() + s23).abs() < 1e-15);
    }

    #[test]
    fn alpha_boundary() {
        assert!(alpha_of(26).unwrap() < 1.5);
        assert!(alpha_of(27).unwrap() >= 1.5);
    }

    #[test]
    fn derivative_at_two() {
        for m in 2..=20 {
            let d = psi_roots(m).unwrap();
            let h: f64 = harmonic(m as u64, 1);
            let expect = factorial::<f64>(m) * (h - 1.0);
            assert!((d.psi_prime[0].re.to_f64() / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_valid_up_to_64() {
        for m in 2..=MAX_M {
            let d = psi_roots(m).unwrap();
            assert_eq!(d.roots.len(), m - 1);
            assert!(d.max_residual < 1e-9, "m={m} residual {}", d.max_residual);
            for w in d.roots.windows(2) {
                assert!(w[0].re.to_f64() >= w[1].re.to_f64() - 1e-12);
            }
            assert!(d.near_ties.is_empty());
        }
    }

    #[test]
    fn c1_matches_closed_form() {
        let d = psi_roots(3).unwrap();
        let b = vec![Mpf::from_i64(0), Mpf::from_i64(1)];
        let c = ett_coefficients(&d, &b).unwrap();
        assert!((c[0].re.to_f64() - 0.2).abs() < 1e-30);
        for m in 2..=8 {
            let d = psi_roots(m).unwrap();
            let b: Vec<Mpf> = (0..m - 1).map(|j| Mpf::from_i64((j * j) as i64 + 1)).collect();
            let c = ett_coefficients(&d, &b).unwrap();
            let c1 = c1_closed_form(m, &b);
            assert!((c[0].re.clone() - c1).abs().to_f64() < 1e-25);
        }
        let d = psi_roots(2).unwrap();
        let c = ett_coefficients(&d, &[Mpf::from_f64(0.7)]).unwrap();
        assert!((c[0].re.to_f64() - 0.7).abs() < 1e-30);
    }

    #[test]
    fn identities_hold() {
        with_precision(200, || {
            for m in 2..=15 {
                let d = psi_roots(m).unwrap();
                let rep = identity_residuals(&d, &Cx::from_f64(0.3, 0.2));
                assert!(rep.max_residual < 1e-40, "m={m} {:?}", rep);
            }
        });
    }

    #[test]
    fn probe_zero_for_m3() {
        let d = psi_roots(3).unwrap();
        let rep = identity_residuals(&d, &Cx::zero());
        assert!(rep.entries[0].residual < 1e-10);
    }

    #[test]
    fn squared_identity_closed_forms() {
        let m = 7usize;
        let mf = factorial_big(m as u64);
        let h = |n: u64| crate::num::harmonic_exact(n, 1);
        let (p, dp) = psi_at_negative_integer(m, -1);
        let lhs = BigRational::new(dp, p.clone() * p);
        let m1f = factorial_big(m as u64 - 1);
        let expect = h(m as u64 - 1)
            / BigRational::from_integer(m1f * BigInt::from((m - 1) * (m - 1)));
        assert_eq!(lhs, expect);
        for r in 0..=(m as i64 - 2) {
            let (p, dp) = psi_at_negative_integer(m, r);
            let num = factorial_big(r as u64) * factorial_big(m as u64 - 2 - r as u64);
            let sign = if r % 2 == 0 { 1 } else { -1 };
            let denom = p.clone() * p.clone();
            assert_eq!(BigRational::new(dp, denom.clone()), BigRational::new(num * sign, denom));
            assert_eq!(p, -mf.clone());
        }
    }

    #[test]
    fn fault_injection_is_detected() {
        with_precision(200, || {
            let mut d = psi_roots(5).unwrap();
            d.psi_prime[1] = d.psi_prime[1].scale(&Mpf::from_f64(1.001));
            let rep = identity_residuals(&d, &Cx::from_f64(0.3, 0.2));
            assert!(rep.max_residual > 1e-6);
        });
    }
}
