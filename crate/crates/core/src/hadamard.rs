//! Singular expansions near z = 1, polylogarithms, and Hadamard products.
//!
//! An expansion is a finite sum of `c (1-z)^a L(z)^p` with
//! `L(z) = ln(1/(1-z))`, plus a remainder `O(|1-z|^A |log|^B)`.
//! Everything is verified numerically on Taylor coefficients, never on
//! the complex plane.

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Result, SstError};
use crate::num::special::{derivative, stieltjes1};
use crate::num::{binomial, mpf, Field, Mpf, Real};

pub const MAX_POLYLOG_R: u32 = 4;
pub const MAX_POLYLOG_DEPTH: usize = 12;
/// Largest window for which log-power coefficients are built by convolution.
pub const MAX_CONVOLUTION_N: usize = 20_000;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SaTerm {
    pub coeff: f64,
    /// Exponent of (1-z).
    pub a: f64,
    /// Power of L(z).
    pub p: u32,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Remainder {
    /// Exponent A; infinite when the expansion is exact.
    pub a: f64,
    /// Power B of |log(1-z)|.
    pub log_power: f64,
    /// `O(|log log (1-z)^{-1}|)` form.
    pub loglog: bool,
}

impl Remainder {
    pub fn exact() -> Self {
        Remainder { a: f64::INFINITY, log_power: 0.0, loglog: false }
    }
    pub fn power(a: f64) -> Self {
        Remainder { a, log_power: 0.0, loglog: false }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SingularExpansion {
    pub terms: Vec<SaTerm>,
    pub remainder: Remainder,
    /// Set when an additive constant is not determined by the expansion.
    pub free_constant: bool,
}

const MERGE_TOL: f64 = 1e-12;

impl SingularExpansion {
    pub fn new(terms: Vec<SaTerm>, remainder: Remainder) -> Self {
        let mut e = SingularExpansion { terms, remainder, free_constant: false };
        e.normalize();
        e
    }

    /// Merges equal (a, p) pairs, drops terms beyond the remainder, sorts.
    fn normalize(&mut self) {
        let mut out: Vec<SaTerm> = Vec::new();
        for t in self.terms.drain(..) {
            if !(t.a < self.remainder.a) || t.coeff == 0.0 {
                continue;
            }
            match out.iter_mut().find(|u| (u.a - t.a).abs() < MERGE_TOL && u.p == t.p) {
                Some(u) => u.coeff += t.coeff,
                None => out.push(t),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        out.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap().then(y.p.cmp(&x.p)));
        self.terms = out;
    }

    /// Evaluates the retained terms at real z in (0, 1).
    pub fn eval(&self, z: f64) -> f64 {
        let w = 1.0 - z;
        let l = -w.ln();
        self.terms.iter().map(|t| t.coeff * w.powf(t.a) * l.powi(t.p as i32)).sum()
    }

    pub fn coefficient(&self, a: f64, p: u32) -> f64 {
        self.terms
            .iter()
            .find(|t| (t.a - a).abs() < MERGE_TOL && t.p == p)
            .map_or(0.0, |t| t.coeff)
    }
}

/// Term-by-term k-th derivative in z.
pub fn differentiate_expansion(e: &SingularExpansion, k: u32) -> SingularExpansion {
    let mut cur = e.clone();
    for _ in 0..k {
        let mut terms = Vec::new();
        for t in &cur.terms {
            terms.push(SaTerm { coeff: -t.a * t.coeff, a: t.a - 1.0, p: t.p });
            if t.p > 0 {
                terms.push(SaTerm { coeff: t.p as f64 * t.coeff, a: t.a - 1.0, p: t.p - 1 });
            }
        }
        let r = &cur.remainder;
        cur = SingularExpansion::new(
            terms,
            Remainder { a: r.a - 1.0, log_power: r.log_power, loglog: false },
        );
    }
    cur
}

/// Antiderivative from 0 to z.
pub fn integrate_expansion(e: &SingularExpansion) -> SingularExpansion {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    for t in &e.terms {
        if (t.a + 1.0).abs() < MERGE_TOL {
            terms.push(SaTerm { coeff: t.coeff / (t.p as f64 + 1.0), a: 0.0, p: t.p + 1 });
            continue;
        }
        let s = t.a + 1.0;
        let mut d = -1.0 / s;
        for i in 0..=t.p {
            if i > 0 {
                d *= (t.p - i + 1) as f64 / s;
            }
            terms.push(SaTerm { coeff: t.coeff * d, a: s, p: t.p - i });
        }
        constant -= t.coeff * d;
    }
    terms.push(SaTerm { coeff: constant, a: 0.0, p: 0 });
    let r = &e.remainder;
    let (remainder, free) = if r.a.is_infinite() {
        (Remainder::exact(), false)
    } else if r.a < -1.0 {
        (Remainder { a: r.a + 1.0, log_power: r.log_power, loglog: false }, false)
    } else if r.a == -1.0 {
        if r.log_power == -1.0 {
            (Remainder { a: 0.0, log_power: 0.0, loglog: true }, false)
        } else {
            (Remainder { a: 0.0, log_power: r.log_power + 1.0, loglog: false }, false)
        }
    } else {
        (Remainder { a: r.a + 1.0, log_power: r.log_power, loglog: false }, true)
    };
    let mut out = SingularExpansion::new(terms, remainder);
    out.free_constant = e.free_constant || free;
    out
}

/// Truncated power series in w = 1 - z over the working scalar.
fn series_pow<R: Real>(s: &[R], beta: &R) -> Vec<R> {
    let n = s.len();
    let mut p = vec![R::zero(); n];
    p[0] = R::one();
    for k in 1..n {
        let mut acc = R::zero();
        for j in 1..=k {
            let c = (beta.clone() + R::one()) * R::from_i64(j as i64) - R::from_i64(k as i64);
            acc += c * s[j].clone() * p[k - j].clone();
        }
        p[k] = acc / R::from_i64(k as i64);
    }
    p
}

fn series_log<R: Real>(s: &[R]) -> Vec<R> {
    let n = s.len();
    let mut g = vec![R::zero(); n];
    for k in 1..n {
        let mut acc = s[k].clone() * R::from_i64(k as i64);
        for j in 1..k {
            acc -= R::from_i64(j as i64) * g[j].clone() * s[k - j].clone();
        }
        g[k] = acc / R::from_i64(k as i64);
    }
    g
}

fn series_mul<R: Field>(a: &[R], b: &[R]) -> Vec<R> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            let mut acc = R::zero();
            for j in 0..=k {
                acc += a[j].clone() * b[k - j].clone();
            }
            acc
        })
        .collect()
}

fn is_positive_integer(x: f64) -> bool {
    x > 0.0 && x.fract() == 0.0
}

/// Singular expansion of `Li_{alpha,r}(z) = sum (ln n)^r n^{-alpha} z^n`,
/// keeping powers of (1-z) below `depth` beyond the leading exponent.
pub fn polylog_expansion(alpha: f64, r: u32, depth: usize) -> Result<SingularExpansion> {
    if r > MAX_POLYLOG_R || depth > MAX_POLYLOG_DEPTH || depth == 0 {
        return Err(SstError::InvalidParameter(format!(
            "need r <= {MAX_POLYLOG_R} and 1 <= depth <= {MAX_POLYLOG_DEPTH}"
        )));
    }
    if alpha == 1.0 && r == 0 {
        return Ok(SingularExpansion::new(vec![SaTerm { coeff: 1.0, a: 0.0, p: 1 }], Remainder::exact()));
    }
    if is_positive_integer(alpha) && r > 1 {
        return Err(SstError::Unsupported(format!(
            "log-weighted polylogarithm at integer alpha = {alpha} is not implemented"
        )));
    }
    let bits = mpf::precision().max(192);
    Ok(mpf::with_precision(bits, || polylog_in_mpf(alpha, r, depth)))
}

fn polylog_in_mpf(alpha: f64, r: u32, depth: usize) -> SingularExpansion {
    let n = depth + 1;
    // t = -ln z = w S(w)
    let s: Vec<Mpf> = (0..n).map(|l| Mpf::from_ratio(1, l as i64 + 1)).collect();
    let ln_s = series_log(&s);
    let a = Mpf::from_f64(alpha);
    let sign_r = if r % 2 == 0 { 1.0 } else { -1.0 };
    let mut terms = Vec::new();
    let integer = is_positive_integer(alpha);
    let s_int = alpha as i64;

    // singular part
    let s_pow = series_pow(&s, &(a.clone() - Mpf::one()));
    if integer {
        let k = (s_int - 1) as usize;
        let mut fact = Mpf::one();
        for i in 1..=k {
            fact *= Mpf::from_i64(i as i64);
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let h: Mpf = crate::num::harmonic(k as u64, 1);
        // (-1)^k t^k / k! * (c0 + c1 ln t + c2 ln^2 t), ln t = -L + ln S
        let (c0, c1, c2) = if r == 0 {
            (h, -Mpf::one(), Mpf::zero())
        } else {
            let h2: Mpf = crate::num::harmonic(k as u64, 2);
            let psi = h - Mpf::euler_gamma();
            let pi2 = Mpf::pi() * Mpf::pi();
            let q = pi2.clone() / Mpf::from_i64(3) + psi.clone() * psi.clone() - (pi2 / Mpf::from_i64(6) - h2);
            (q / Mpf::from_i64(2) + stieltjes1::<Mpf>(), -psi, Mpf::from_ratio(1, 2))
        };
        let c = Mpf::from_f64(sign) / fact;
        let ls = series_mul(&s_pow, &ln_s);
        let ls2 = series_mul(&ls, &ln_s);
        for l in 0..n {
            let a_l = (k + l) as f64;
            let p0 = c0.clone() * s_pow[l].clone() + c1.clone() * ls[l].clone() + c2.clone() * ls2[l].clone();
            let p1 = -(c1.clone() * s_pow[l].clone()) - Mpf::from_i64(2) * c2.clone() * ls[l].clone();
            let p2 = c2.clone() * s_pow[l].clone();
            for (p, v) in [(0, p0), (1, p1), (2, p2)] {
                if !v.is_zero_value() {
                    terms.push(SaTerm { coeff: (v * c.clone()).to_f64(), a: a_l, p });
                }
            }
        }
    } else {
        let gk: Vec<Mpf> = (0..=r)
            .map(|k| derivative(|x: &Mpf| (Mpf::one() - x.clone()).gamma(), &a, k))
            .collect();
        let mut ln_pows = vec![{
            let mut one = vec![Mpf::zero(); n];
            one[0] = Mpf::one();
            one
        }];
        for q in 1..=r as usize {
            ln_pows.push(series_mul(&ln_pows[q - 1], &ln_s));
        }
        for k in 0..=r {
            let q = r - k;
            let ck = Mpf::from_f64(sign_r) * binomial::<Mpf>(r as u64, k as u64) * gk[k as usize].clone();
            for i in 0..=q {
                let sign_i = if i % 2 == 0 { 1.0 } else { -1.0 };
                let series = series_mul(&s_pow, &ln_pows[(q - i) as usize]);
                let ci = ck.clone() * binomial::<Mpf>(q as u64, i as u64) * Mpf::from_f64(sign_i);
                for (l, v) in series.iter().enumerate().take(depth) {
                    terms.push(SaTerm { coeff: (ci.clone() * v.clone()).to_f64(), a: alpha - 1.0 + l as f64, p: i });
                }
            }
        }
    }

    // regular part: sum_j zeta^{(r)}(alpha - j) (-t)^j / j!
    let mut t_pow = {
        let mut one = vec![Mpf::zero(); n];
        one[0] = Mpf::one();
        one
    };
    let w_s: Vec<Mpf> = (0..n).map(|l| if l == 0 { Mpf::zero() } else { s[l - 1].clone() }).collect();
    let mut jfact = Mpf::one();
    for j in 0..depth {
        if j > 0 {
            t_pow = series_mul(&t_pow, &w_s);
            jfact *= Mpf::from_i64(j as i64);
        }
        if integer && j as i64 == s_int - 1 {
            continue;
        }
        let z = if integer && r == 0 {
            Mpf::from_i64(s_int - j as i64).zeta()
        } else {
            let shift = Mpf::from_i64(j as i64);
            derivative(|x: &Mpf| (x.clone() - shift.clone()).zeta(), &a, r) * Mpf::from_f64(sign_r)
        };
        let sign_j = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = z * Mpf::from_f64(sign_j) / jfact.clone();
        for (l, v) in t_pow.iter().enumerate().take(depth) {
            if !v.is_zero_value() {
                terms.push(SaTerm { coeff: (c.clone() * v.clone()).to_f64(), a: l as f64, p: 0 });
            }
        }
    }
    let a_rem = (alpha - 1.0 + depth as f64).min(depth as f64);
    SingularExpansion::new(
        terms,
        Remainder { a: a_rem, log_power: r as f64 + if integer { 1.0 } else { 0.0 }, loglog: false },
    )
}

/// Connection coefficients (lambda_k, mu_k), k <= K, of (1-z)^{-alpha} ⊙ (1-z)^{-beta}.
pub fn hadamard_power_coeffs(alpha: f64, beta: f64, k_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("alpha + beta", alpha + beta)] {
        if v.fract() == 0.0 {
            return Err(SstError::InvalidParameter(format!(
                "{name} = {v} is an integer; only an O-form bound applies"
            )));
        }
    }
    let bits = mpf::precision().max(128);
    Ok(mpf::with_precision(bits, || {
        let a = Mpf::from_f64(alpha);
        let b = Mpf::from_f64(beta);
        let one = Mpf::one();
        let l0 = (one.clone() - a.clone() - b.clone()).gamma()
            / ((one.clone() - a.clone()).gamma() * (one.clone() - b.clone()).gamma());
        let m0 = (a.clone() + b.clone() - one.clone()).gamma() / (a.gamma() * b.gamma());
        let (mut lam, mut mu) = (vec![l0.clone()], vec![m0.clone()]);
        for k in 0..k_max {
            let kk = Mpf::from_i64(k as i64);
            let next_l = lam[k].clone() * (a.clone() + kk.clone()) * (b.clone() + kk.clone())
                / (a.clone() + b.clone() + kk.clone());
            let next_m = mu[k].clone() * (one.clone() - a.clone() + kk.clone()) * (one.clone() - b.clone() + kk.clone())
                / (Mpf::from_i64(2) - a.clone() - b.clone() + kk);
            lam.push(next_l);
            mu.push(next_m);
        }
        (lam.iter().map(Field::to_f64).collect(), mu.iter().map(Field::to_f64).collect())
    }))
}

/// The connection formula truncated after `k_max + 1` terms of each family.
pub fn hadamard_power_expansion(alpha: f64, beta: f64, k_max: usize) -> Result<SingularExpansion> {
    let (lam, mu) = hadamard_power_coeffs(alpha, beta, k_max)?;
    let mut terms = Vec::new();
    let mut fact = 1.0;
    for k in 0..=k_max {
        if k > 0 {
            fact *= k as f64;
        }
        terms.push(SaTerm { coeff: lam[k] / fact, a: k as f64, p: 0 });
        terms.push(SaTerm { coeff: mu[k] / fact, a: 1.0 - alpha - beta + k as f64, p: 0 });
    }
    let next = (k_max + 1) as f64;
    Ok(SingularExpansion::new(terms, Remainder::power(next.min(1.0 - alpha - beta + next))))
}

/// Taylor coefficients f_0..f_N with a provenance label.
#[derive(Clone, Debug)]
pub struct SeriesWindow<F> {
    pub coeffs: Vec<F>,
    pub provenance: String,
}

pub const MIN_WINDOW: usize = 16;

impl<F: Field> SeriesWindow<F> {
    pub fn new(coeffs: Vec<F>, provenance: impl Into<String>) -> Result<Self> {
        if coeffs.len() < MIN_WINDOW + 1 {
            return Err(SstError::InvalidParameter(format!("series windows need N >= {MIN_WINDOW}")));
        }
        Ok(SeriesWindow { coeffs, provenance: provenance.into() })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// (1-z)^{-lambda}.
    pub fn power(lambda: &F, n: usize) -> Self {
        let mut c = Vec::with_capacity(n + 1);
        let mut v = F::one();
        c.push(v.clone());
        for k in 1..=n {
            v = v * (lambda.clone() + F::from_i64(k as i64 - 1)) / F::from_i64(k as i64);
            c.push(v.clone());
        }
        SeriesWindow { coeffs: c, provenance: "power".into() }
    }

    /// L(z) = ln(1/(1-z)).
    pub fn log(n: usize) -> Self {
        let c = (0..=n)
            .map(|k| if k == 0 { F::zero() } else { F::from_ratio(1, k as i64) })
            .collect();
        SeriesWindow { coeffs: c, provenance: "log".into() }
    }

    /// Li_{s,0} for a nonnegative integer s.
    pub fn polylog_integer(s: u32, n: usize) -> Self {
        let c = (0..=n)
            .map(|k| if k == 0 { F::zero() } else { F::one() / F::from_i64(k as i64).powi(s) })
            .collect();
        SeriesWindow { coeffs: c, provenance: format!("polylog:{s}") }
    }

    pub fn mul(&self, other: &Self) -> Self {
        SeriesWindow {
            coeffs: series_mul(&self.coeffs, &other.coeffs),
            provenance: format!("({})*({})", self.provenance, other.provenance),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SeriesWindow {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
            provenance: format!("({})+({})", self.provenance, other.provenance),
        }
    }

    /// Multiplication by 1/(1-z).
    pub fn partial_sums(&self) -> Self {
        let mut acc = F::zero();
        SeriesWindow {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    acc += c.clone();
                    acc.clone()
                })
                .collect(),
            provenance: format!("sums({})", self.provenance),
        }
    }
}

/// Termwise product.
pub fn hadamard_series<F: Field>(f: &SeriesWindow<F>, g: &SeriesWindow<F>) -> SeriesWindow<F> {
    SeriesWindow {
        coeffs: f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a.clone() * b.clone()).collect(),
        provenance: format!("({})⊙({})", f.provenance, g.provenance),
    }
}

/// Exact [z^n] (1-z)^a L^p for n in 0..=n_max at the working precision.
pub fn term_coefficients(a: f64, p: u32, n_max: usize) -> Result<Vec<Mpf>> {
    let lambda = Mpf::from_f64(-a);
    let nonpositive_integer = a.fract() == 0.0 && a >= 0.0;
    if p == 0 {
        return Ok(SeriesWindow::power(&lambda, n_max).coeffs);
    }
    if nonpositive_integer {
        if n_max > MAX_CONVOLUTION_N {
            return Err(SstError::Capacity(format!(
                "log-power coefficients at integer exponent limited to n <= {MAX_CONVOLUTION_N}"
            )));
        }
        let mut s = SeriesWindow::power(&lambda, n_max);
        let l = SeriesWindow::<Mpf>::log(n_max);
        for _ in 0..p {
            s = s.mul(&l);
        }
        return Ok(s.coeffs);
    }
    // d^p/dlambda^p of rising(lambda, n)/n! via complete Bell polynomials
    let pu = p as usize;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut base = Mpf::one();
    let mut sums = vec![Mpf::zero(); pu + 1];
    out.push(Mpf::zero());
    for n in 1..=n_max {
        let x = lambda.clone() + Mpf::from_i64(n as i64 - 1);
        base = base * x.clone() / Mpf::from_i64(n as i64);
        let inv = Mpf::one() / x;
        let mut pw = inv.clone();
        for s in sums.iter_mut().skip(1) {
            *s += pw.clone();
            pw *= inv.clone();
        }
        // g^{(k)} = (-1)^{k-1} (k-1)! sum 1/(lambda+j)^k
        let mut g = vec![Mpf::zero(); pu + 1];
        let mut fact = Mpf::one();
        for k in 1..=pu {
            if k > 1 {
                fact *= Mpf::from_i64(k as i64 - 1);
            }
            let sign = if k % 2 == 1 { Mpf::one() } else { -Mpf::one() };
            g[k] = sign * fact.clone() * sums[k].clone();
        }
        let mut bell = vec![Mpf::one()];
        for k in 0..pu {
            let mut acc = Mpf::zero();
            for i in 0..=k {
                acc += binomial::<Mpf>(k as u64, i as u64) * bell[k - i].clone() * g[i + 1].clone();
            }
            bell.push(acc);
        }
        out.push(base.clone() * bell[pu].clone());
    }
    Ok(out)
}

/// Coefficients predicted by the retained terms of an expansion.
pub fn predicted_coefficients(e: &SingularExpansion, n_max: usize) -> Result<Vec<Mpf>> {
    let mut acc = vec![Mpf::zero(); n_max + 1];
    for t in &e.terms {
        let c = Mpf::from_f64(t.coeff);
        for (a, v) in acc.iter_mut().zip(term_coefficients(t.a, t.p, n_max)?) {
            *a += c.clone() * v;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    /// Slope required by the check.
    pub threshold: f64,
    /// Slope implied by coefficient transfer of the remainder, n^{-A-1}.
    pub transfer_slope: f64,
    pub pass: bool,
}

/// Log-log regression of |actual - predicted| over `n_grid`.
pub fn verify_expansion(e: &SingularExpansion, s: &SeriesWindow<Mpf>, n_grid: &[usize]) -> Result<DecayReport> {
    let n_max = n_grid.iter().copied().max().unwrap_or(0);
    if n_max >= s.len() {
        return Err(SstError::Range(format!("grid reaches {n_max} but the window has {} terms", s.len())));
    }
    let pred = predicted_coefficients(e, n_max)?;
    let points: Vec<(usize, f64)> = n_grid
        .iter()
        .map(|&n| (n, (s.coeffs[n].clone() - pred[n].clone()).abs().to_f64()))
        .collect();
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, d)| *n > 0 && *d > 0.0)
        .map(|(n, d)| ((*n as f64).ln(), d.ln()))
        .collect();
    let slope = if fit.len() < 2 {
        f64::NEG_INFINITY
    } else {
        let k = fit.len() as f64;
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / k;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let a = e.remainder.a;
    let threshold = -(a - 1.0) + 0.15;
    Ok(DecayReport {
        points,
        slope,
        threshold,
        transfer_slope: -(a + 1.0),
        pass: slope <= threshold,
    })
}

/// Both sides of H_n^2 = [z^n] ((1-z)^{-1} L^2 + (1-z)^{-1} Li_{2,0}) in exact arithmetic.
pub fn harmonic_square_identity(n_max: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let n = n_max.max(MIN_WINDOW);
    let l = SeriesWindow::<BigRational>::log(n);
    let rhs = l.mul(&l).add(&SeriesWindow::polylog_integer(2, n)).partial_sums();
    let h = l.partial_sums();
    let lhs = hadamard_series(&h, &h);
    (
        lhs.coeffs.into_iter().take(n_max + 1).collect(),
        rhs.coeffs.into_iter().take(n_max + 1).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Field;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn li1_is_log() {
        let e = polylog_expansion(1.0, 0, 5).unwrap();
        assert_eq!(e.terms, vec![SaTerm { coeff: 1.0, a: 0.0, p: 1 }]);
        assert!(e.remainder.a.is_infinite());
    }

    #[test]
    fn li2_leading_terms() {
        let e = polylog_expansion(2.0, 0, 4).unwrap();
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(close(e.coefficient(0.0, 0), z2, 1e-14));
        assert!(close(e.coefficient(1.0, 1), -1.0, 1e-14));
        assert!(close(e.coefficient(1.0, 0), -1.0, 1e-14));
    }

    #[test]
    fn li_three_halves_leading_terms() {
        let e = polylog_expansion(1.5, 0, 4).unwrap();
        let g = <f64 as Real>::gamma(&-0.5);
        let z = <f64 as Real>::zeta(&1.5);
        assert!(close(e.coefficient(0.5, 0), g, 1e-13));
        assert!(close(e.coefficient(0.0, 0), z, 1e-13));
        let zz = 0.999;
        let exact: f64 = (1..200_000).map(|k| zz.powi(k) / (k as f64).powf(1.5)).sum();
        assert!((e.eval(zz) - exact).abs() < 1e-9, "{} {}", e.eval(zz), exact);
    }

    #[test]
    fn log_weighted_polylog_matches_series() {
        let e = polylog_expansion(0.5, 1, 6).unwrap();
        let zz = 0.99f64;
        let exact: f64 = (1..20_000).map(|k| zz.powi(k) * (k as f64).ln() / (k as f64).sqrt()).sum();
        assert!((e.eval(zz) - exact).abs() < 1e-9 * exact.abs(), "{} {}", e.eval(zz), exact);
    }

    #[test]
    fn polylog_coefficient_decay() {
        let e = polylog_expansion(1.5, 0, 3).unwrap();
        let n = 4000;
        let coeffs: Vec<Mpf> = (0..=n)
            .map(|k| if k == 0 { Mpf::zero() } else { Mpf::from_i64(k as i64).powf(&Mpf::from_f64(-1.5)) })
            .collect();
        let s = SeriesWindow::new(coeffs, "li").unwrap();
        let r = verify_expansion(&e, &s, &[500, 1000, 2000, 4000]).unwrap();
        assert!(r.pass && r.slope < r.transfer_slope + 0.3, "{r:?}");
    }

    #[test]
    fn integer_polylog_high_log_power_unsupported() {
        assert!(matches!(polylog_expansion(2.0, 2, 3), Err(SstError::Unsupported(_))));
    }

    #[test]
    fn integer_log_weighted_polylogs() {
        let e = polylog_expansion(1.0, 1, 6).unwrap();
        let g = 0.577_215_664_901_532_9f64;
        assert!(close(e.coefficient(0.0, 2), 0.5, 1e-14));
        assert!(close(e.coefficient(0.0, 1), -g, 1e-14));
        let zz = 0.99f64;
        for (alpha, e) in [(1.0, e), (2.0, polylog_expansion(2.0, 1, 6).unwrap())] {
            let exact: f64 = (1..40_000).map(|k| zz.powi(k) * (k as f64).ln() / (k as f64).powf(alpha)).sum();
            assert!((e.eval(zz) - exact).abs() < 1e-9 * exact.abs(), "{alpha}: {} {}", e.eval(zz), exact);
        }
    }

    #[test]
    fn derivative_rules() {
        let sqrt = SingularExpansion::new(vec![SaTerm { coeff: 1.0, a: 0.5, p: 0 }], Remainder::power(2.0));
        let d = differentiate_expansion(&sqrt, 1);
        assert_eq!(d.terms, vec![SaTerm { coeff: -0.5, a: -0.5, p: 0 }]);
        assert_eq!(d.remainder.a, 1.0);
        let wl = SingularExpansion::new(vec![SaTerm { coeff: 1.0, a: 1.0, p: 1 }], Remainder::exact());
        let d = differentiate_expansion(&wl, 1);
        assert!(close(d.coefficient(0.0, 1), -1.0, 0.0));
        assert!(close(d.coefficient(0.0, 0), 1.0, 0.0));
    }

    #[test]
    fn integral_rules() {
        let e = SingularExpansion::new(vec![SaTerm { coeff: 1.0, a: -2.0, p: 0 }], Remainder::exact());
        let i = integrate_expansion(&e);
        assert!(close(i.coefficient(-1.0, 0), 1.0, 0.0) && close(i.coefficient(0.0, 0), -1.0, 0.0));
        let e = SingularExpansion::new(vec![SaTerm { coeff: 1.0, a: 1.0, p: 1 }], Remainder::exact());
        let i = integrate_expansion(&e);
        assert!(close(i.coefficient(2.0, 1), -0.5, 1e-15));
        assert!(close(i.coefficient(2.0, 0), -0.25, 1e-15));
        assert!(close(i.coefficient(0.0, 0), 0.25, 1e-15));
        let o = SingularExpansion::new(vec![], Remainder::power(-1.0));
        let i = integrate_expansion(&o);
        assert_eq!(i.remainder.a, 0.0);
        assert_eq!(i.remainder.log_power, 1.0);
        let o = SingularExpansion::new(vec![], Remainder { a: -1.0, log_power: -1.0, loglog: false });
        assert!(integrate_expansion(&o).remainder.loglog);
    }

    #[test]
    fn differentiate_then_integrate_roundtrip() {
        let e = SingularExpansion::new(
            vec![
                SaTerm { coeff: 2.0, a: 0.5, p: 1 },
                SaTerm { coeff: -1.5, a: 1.5, p: 2 },
                SaTerm { coeff: 0.7, a: 2.0, p: 0 },
            ],
            Remainder::exact(),
        );
        let back = integrate_expansion(&differentiate_expansion(&e, 1));
        for t in &e.terms {
            assert!(close(back.coefficient(t.a, t.p), t.coeff, 1e-12), "{t:?}");
        }
    }

    #[test]
    fn connection_coefficients() {
        let (lam, mu) = hadamard_power_coeffs(1.0 / 3.0, 1.0 / 3.0, 8).unwrap();
        let g = |x: f64| <f64 as Real>::gamma(&x);
        assert!(close(lam[0], g(1.0 / 3.0) / (g(2.0 / 3.0) * g(2.0 / 3.0)), 1e-14));
        let (lam2, _) = hadamard_power_coeffs(0.2, 0.45, 8).unwrap();
        let (lam3, _) = hadamard_power_coeffs(0.45, 0.2, 8).unwrap();
        for k in 0..=8 {
            assert!(close(lam2[k], lam3[k], 1e-15));
        }
        assert!(mu[0].is_finite());
        assert!(hadamard_power_coeffs(1.0, 0.3, 2).is_err());
        assert!(hadamard_power_coeffs(0.5, 0.5, 2).is_err());
    }

    #[test]
    fn leading_term_of_product_coefficients() {
        let (a, b) = (0.4, 0.9);
        let n = 10_000usize;
        let f = SeriesWindow::power(&Mpf::from_f64(a), n);
        let g = SeriesWindow::power(&Mpf::from_f64(b), n);
        let fg = hadamard_series(&f, &g);
        let (_, mu) = hadamard_power_coeffs(a, b, 1).unwrap();
        let nn = n as f64;
        let predicted = mu[0] * nn.powf(a + b - 2.0) / <f64 as Real>::gamma(&(a + b - 1.0));
        let rel = (fg.coeffs[n].to_f64() - predicted).abs() / predicted.abs();
        assert!(rel <= 5.0 / nn, "{rel}");
        let e = hadamard_power_expansion(a, b, 1).unwrap();
        let p = predicted_coefficients(&e, n).unwrap();
        let rel2 = ((fg.coeffs[n].clone() - p[n].clone()) / fg.coeffs[n].clone()).abs().to_f64();
        assert!(rel2 <= 5.0 / nn, "{rel2}");
    }

    #[test]
    fn product_remainder_decay() {
        let (a, b) = (1.0 / 3.0, 1.0 / 3.0);
        let n = 20_000;
        let fg = hadamard_series(
            &SeriesWindow::power(&Mpf::from_f64(a), n),
            &SeriesWindow::power(&Mpf::from_f64(b), n),
        );
        let e = hadamard_power_expansion(a, b, 1).unwrap();
        let r = verify_expansion(&e, &fg, &[1000, 2000, 5000, 10_000, 20_000]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.slope + 10.0 / 3.0).abs() < 0.2, "{}", r.slope);
    }

    #[test]
    fn series_algebra() {
        let n = 40;
        let f = SeriesWindow::<BigRational>::power(&BigRational::from_ratio(1, 3), n);
        let id = SeriesWindow::<BigRational>::power(&BigRational::one(), n);
        assert_eq!(hadamard_series(&f, &id).coeffs, f.coeffs);
        let zero = SeriesWindow { coeffs: vec![BigRational::zero(); n + 1], provenance: "0".into() };
        assert!(hadamard_series(&f, &zero).coeffs.iter().all(|c| c.is_zero_value()));
        let h = SeriesWindow::<BigRational>::log(n).partial_sums();
        let sq = hadamard_series(&h, &h);
        let h3 = crate::num::harmonic_exact(3, 1);
        assert_eq!(sq.coeffs[3], h3.clone() * h3);
    }

    #[test]
    fn harmonic_square_identity_exact() {
        let (l, r) = harmonic_square_identity(200);
        assert_eq!(l, r);
        assert_eq!(l[2], BigRational::from_ratio(9, 4));
    }

    #[test]
    fn log_power_coefficients_agree() {
        let n = 300;
        let via_bell = term_coefficients(-0.3, 2, n).unwrap();
        let mut s = SeriesWindow::power(&Mpf::from_f64(0.3), n);
        let l = SeriesWindow::<Mpf>::log(n);
        s = s.mul(&l).mul(&l);
        for k in [1usize, 2, 17, 300] {
            let d = (via_bell[k].clone() - s.coeffs[k].clone()).abs().to_f64();
            assert!(d < 1e-25, "{k} {d}");
        }
    }
}
