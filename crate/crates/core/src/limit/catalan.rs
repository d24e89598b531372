//! Limit laws under the Catalan (uniform binary tree) model for tolls `n^alpha`
//! and for the shape functional (toll `ln n`).

use serde::Serialize;

use super::{normal_moments, LimitKind, LimitMomentSeq};
use crate::error::{Result, SstError};
use crate::exact::{catalan_moments, Centering};
use crate::num::quad::tanh_sinh;
use crate::num::special::{catalan_scaled_asymptotic, CATALAN_ASYMPTOTIC};
use crate::num::sum::series_with_tail;
use crate::num::{binomial, mpf, Field, Mpf, Real};
use crate::toll::{TollFamily, TollSpec};

pub const MK_MAX_K: usize = 12;

fn work_bits() -> u32 {
    mpf::precision().max(192)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(SstError::InvalidParameter(format!("need alpha > 0, got {alpha}")));
    }
    Ok(())
}

fn check_not_half(alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if alpha == 0.5 {
        return Err(SstError::Domain("alpha = 1/2 is a pole of C_1".into()));
    }
    Ok(())
}

fn gamma_ratio(a: &Mpf, b: &Mpf) -> Mpf {
    (a.ln_gamma() - b.ln_gamma()).exp()
}

fn ck_mpf(alpha: &Mpf, k_max: usize) -> Vec<Mpf> {
    let half = Mpf::from_ratio(1, 2);
    let mut c = vec![Mpf::zero(); k_max + 1];
    if k_max == 0 {
        return c;
    }
    c[1] = (alpha.clone() - half.clone()).gamma() / Mpf::pi().sqrt();
    for k in 2..=k_max {
        let kf = Mpf::from_i64(k as i64);
        let mut acc = Mpf::zero();
        for j in 1..k {
            acc += binomial::<Mpf>(k as u64, j as u64) * c[j].clone() * c[k - j].clone();
        }
        let top = kf.clone() * alpha.clone() + kf.clone() * half.clone() - Mpf::one();
        let bottom = (kf.clone() - Mpf::one()) * alpha.clone() + kf.clone() * half.clone() - Mpf::one();
        c[k] = acc / Mpf::from_i64(4) + kf * c[k - 1].clone() * gamma_ratio(&top, &bottom);
    }
    c
}

/// `C_k` for `1 <= k <= k_max`; index 0 is unused and zero.
pub fn catalan_ck_raw(alpha: f64, k_max: usize) -> Result<Vec<Mpf>> {
    check_not_half(alpha)?;
    Ok(mpf::with_precision(work_bits(), || ck_mpf(&Mpf::from_f64(alpha), k_max)))
}

/// Moments `E Y^k = C_k sqrt(pi) / Gamma(k (alpha + 1/2) - 1/2)` of the
/// limit of `X_n / n^{alpha + 1/2}`, with the `C_k` as constants.
pub fn catalan_ck(alpha: f64, k_max: usize) -> Result<LimitMomentSeq> {
    check_not_half(alpha)?;
    let (values, constants) = mpf::with_precision(work_bits(), || {
        let a = Mpf::from_f64(alpha);
        let c = ck_mpf(&a, k_max);
        let sp = Mpf::pi().sqrt();
        let mut values = vec![1.0];
        for (k, ck) in c.iter().enumerate().skip(1) {
            let kf = Mpf::from_i64(k as i64);
            let arg = kf * (a.clone() + Mpf::from_ratio(1, 2)) - Mpf::from_ratio(1, 2);
            values.push((ck.clone() * sp.clone() / arg.gamma()).to_f64());
        }
        (values, c.iter().map(|v| v.to_f64()).collect::<Vec<_>>())
    });
    Ok(LimitMomentSeq {
        kind: LimitKind::Ck,
        params: vec![("alpha".into(), alpha)],
        values,
        constants,
        quadrature_error: None,
        residual: None,
    })
}

/// `8 ln 2 / pi - pi / 2`.
pub fn sigma2_half() -> f64 {
    8.0 * std::f64::consts::LN_2 / std::f64::consts::PI - std::f64::consts::FRAC_PI_2
}

/// Limit variance `C_2 sqrt(pi) / Gamma(2 alpha + 1/2) - C_1^2 pi / Gamma(alpha)^2`,
/// extended continuously to `alpha = 1/2`.
pub fn sigma2_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.5 {
        return Ok(sigma2_half());
    }
    Ok(mpf::with_precision(work_bits(), || {
        let a = Mpf::from_f64(alpha);
        let c = ck_mpf(&a, 2);
        let half = Mpf::from_ratio(1, 2);
        let first = c[2].clone() * Mpf::pi().sqrt() / (Mpf::from_i64(2) * a.clone() + half.clone()).gamma();
        let ratio = (a.clone() - half).gamma() / a.gamma();
        (first - ratio.clone() * ratio).to_f64()
    }))
}

/// Maximizer and maximum of `sigma2_alpha`, by a grid scan on
/// `[0.05, 10]` followed by golden-section search in the bracketing cell.
pub fn sigma2_max() -> Result<(f64, f64)> {
    let grid: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64).collect();
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &a) in grid.iter().enumerate() {
        let v = sigma2_alpha(a)?;
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let mut lo = if best == 0 { 1e-3 } else { grid[best - 1] };
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = sigma2_alpha(x1)?;
    let mut f2 = sigma2_alpha(x2)?;
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = sigma2_alpha(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = sigma2_alpha(x1)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, sigma2_alpha(x)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct AiryWienerReport {
    /// `Omega_k = C_k(1) / 2`.
    pub omega: Vec<f64>,
    /// `a_{0,l} = 2^{2l-1} C_l(2)`.
    pub a0: Vec<f64>,
    pub airy_residual: f64,
    pub wiener_residual: f64,
}

/// Checks that `Omega_k = C_k(1)/2` satisfies
/// `2 Omega_k = sum_{j=1}^{k-1} C(k,j) Omega_j Omega_{k-j} + k(3k-4) Omega_{k-1}` and
/// `a_{0,l} = 2^{2l-1} C_l(2)` satisfies
/// `a_{0,l} = 1/2 sum_{j=1}^{l-1} C(l,j) a_{0,j} a_{0,l-j} + l(5l-4)(5l-6) a_{0,l-1}`.
pub fn airy_wiener_check(k_max: usize) -> Result<AiryWienerReport> {
    if k_max < 2 {
        return Err(SstError::InvalidParameter("need k_max >= 2".into()));
    }
    Ok(mpf::with_precision(work_bits(), || {
        let c1 = ck_mpf(&Mpf::one(), k_max);
        let c2 = ck_mpf(&Mpf::from_i64(2), k_max);
        let mut omega = vec![Mpf::zero(); k_max + 1];
        let mut a0 = vec![Mpf::zero(); k_max + 1];
        for k in 1..=k_max {
            omega[k] = c1[k].clone() / Mpf::from_i64(2);
            a0[k] = c2[k].clone() * Mpf::from_i64(2).powi(2 * k as u32 - 1);
        }
        let mut airy = 0.0f64;
        let mut wiener = 0.0f64;
        for k in 2..=k_max {
            let kf = k as i64;
            let mut s_o = Mpf::zero();
            let mut s_a = Mpf::zero();
            for j in 1..k {
                let b = binomial::<Mpf>(k as u64, j as u64);
                s_o += b.clone() * omega[j].clone() * omega[k - j].clone();
                s_a += b * a0[j].clone() * a0[k - j].clone();
            }
            let rhs_o = s_o + Mpf::from_i64(kf * (3 * kf - 4)) * omega[k - 1].clone();
            let lhs_o = Mpf::from_i64(2) * omega[k].clone();
            airy = airy.max(((lhs_o.clone() - rhs_o) / lhs_o).abs().to_f64());
            let rhs_a = s_a / Mpf::from_i64(2) + Mpf::from_i64(kf * (5 * kf - 4) * (5 * kf - 6)) * a0[k - 1].clone();
            wiener = wiener.max(((a0[k].clone() - rhs_a) / a0[k].clone()).abs().to_f64());
        }
        AiryWienerReport {
            omega: omega.iter().map(|v| v.to_f64()).collect(),
            a0: a0.iter().map(|v| v.to_f64()).collect(),
            airy_residual: airy,
            wiener_residual: wiener,
        }
    }))
}

/// Integrand of `J_{k1,k2,k3}` evaluated in log form to avoid overflow near
/// the endpoints.
fn j_integrand<R: Real>(x: &R, y: &R, e1: &R, e2: &R, k3: u32, ap: &R, half: bool) -> R {
    let small_x = x <= y;
    let (lx, ly) = if small_x { (x.ln(), (-x.clone()).ln_1p()) } else { ((-y.clone()).ln_1p(), y.ln()) };
    let bracket = if half {
        x.clone() * lx.clone() + y.clone() * ly.clone()
    } else if small_x {
        x.powf(ap) + (ap.clone() * ly.clone()).exp_m1()
    } else {
        y.powf(ap) + (ap.clone() * lx.clone()).exp_m1()
    };
    let mut log = e1.clone() * lx + e2.clone() * ly;
    let mut sign = R::one();
    if k3 > 0 {
        if bracket.is_zero_value() {
            return R::zero();
        }
        if bracket < R::zero() && k3 % 2 == 1 {
            sign = -R::one();
        }
        log += R::from_i64(k3 as i64) * bracket.abs().ln();
    }
    sign * log.exp()
}

fn mk_generic<R: Real>(alpha: f64, k_max: usize, tol: f64) -> Result<(Vec<R>, f64)> {
    let half = alpha == 0.5;
    let a = R::from_f64(alpha);
    let h = R::from_ratio(1, 2);
    let ap = a.clone() + h.clone();
    let sp = R::pi().sqrt();
    let kappa = if half { R::one() / sp.clone() } else { (a.clone() - h.clone()).gamma() / a.gamma() };
    let mut fact = vec![R::one()];
    for k in 1..=k_max {
        fact.push(fact[k - 1].clone() * R::from_i64(k as i64));
    }
    let mut m = vec![R::one(), R::zero()];
    let mut err = 0.0f64;
    let c3 = R::from_ratio(3, 2);
    for k in 2..=k_max {
        let kf = R::from_i64(k as i64);
        let mut acc = R::zero();
        for k1 in 0..k {
            for k2 in 0..=k - k1 {
                let k3 = k - k1 - k2;
                if k2 == k || k1 == 1 || k2 == 1 || k1 > k2 {
                    continue;
                }
                let e1 = R::from_i64(k1 as i64) * ap.clone() - c3.clone();
                let e2 = R::from_i64(k2 as i64) * ap.clone() - c3.clone();
                let lead = if half || alpha > 0.5 { R::one() } else { ap.clone() };
                let near = |e: &R| {
                    if k3 > 0 {
                        e.clone() + R::from_i64(k3 as i64) * lead.clone()
                    } else {
                        e.clone()
                    }
                };
                assert!(
                    near(&e1) > -R::one() && near(&e2) > -R::one(),
                    "non-integrable J at k = {k}: ({k1}, {k2}, {k3})"
                );
                let j = if k3 == 0 {
                    let (p, q) = (e1.clone() + R::one(), e2.clone() + R::one());
                    (p.ln_gamma() + q.ln_gamma() - (p + q).ln_gamma()).exp()
                } else {
                    let r = tanh_sinh(|x: &R, y: &R| j_integrand(x, y, &e1, &e2, k3 as u32, &ap, half), tol * 1e-2);
                    err = err.max(r.error / r.value.abs().to_f64().max(1e-300));
                    r.value
                };
                let mult = fact[k].clone() / (fact[k1].clone() * fact[k2].clone() * fact[k3].clone());
                let sym = if k1 == k2 { R::one() } else { R::from_i64(2) };
                acc += sym * mult * m[k1].clone() * m[k2].clone() * kappa.powi(k3 as u32) * j;
            }
        }
        acc += R::from_i64(4) * sp.clone() * kf.clone() * m[k - 1].clone();
        let pref = if half {
            (kf.clone() - R::one()).gamma() / (kf.clone() - h.clone()).gamma()
        } else {
            let x = kf.clone() * ap.clone();
            ((x.clone() - R::one()).ln_gamma() - (x - h.clone()).ln_gamma()).exp()
        };
        m.push(pref * acc / (R::from_i64(4) * sp.clone()));
    }
    m.truncate(k_max + 1);
    Ok((m, err))
}

/// Moments `m_k` of the centered Catalan limit law for toll `n^alpha`,
/// with `J` integrals by tanh-sinh quadrature. Uses `f64` for `tol >= 1e-12`
/// and multiple precision otherwise.
pub fn mk_moments(alpha: f64, k_max: usize, tol: f64) -> Result<LimitMomentSeq> {
    check_alpha(alpha)?;
    if k_max > MK_MAX_K {
        return Err(SstError::InvalidParameter(format!("need k_max <= {MK_MAX_K}")));
    }
    if !(tol > 0.0) {
        return Err(SstError::InvalidParameter("tolerance must be positive".into()));
    }
    let (values, err) = if tol >= 1e-12 {
        mk_generic::<f64>(alpha, k_max, tol)?
    } else {
        let bits = ((-tol.log2()) as u32 + 64).max(work_bits());
        mpf::with_precision(bits, || {
            mk_generic::<Mpf>(alpha, k_max, tol).map(|(v, e)| (v.iter().map(|x| x.to_f64()).collect(), e))
        })?
    };
    if err > tol {
        return Err(SstError::Numerical(format!("quadrature error {err:e} exceeds tolerance {tol:e}")));
    }
    Ok(LimitMomentSeq {
        kind: LimitKind::Mk,
        params: vec![("alpha".into(), alpha)],
        constants: values.clone(),
        values,
        quadrature_error: Some(err),
        residual: None,
    })
}

/// `8 (1 - ln 2)`.
pub fn shape_sigma2() -> f64 {
    8.0 * (1.0 - std::f64::consts::LN_2)
}

/// Shape-functional constants `C_{2k,0}`, `k <= k_max`, by the quadratic
/// recurrence and by the closed form; `values` are the normal moments
/// `C_{2k,0} sqrt(pi) / Gamma(k - 1/2)` and `residual` is the largest relative
/// disagreement among the three routes.
pub fn shape_ck0(k_max: usize) -> Result<LimitMomentSeq> {
    if k_max == 0 {
        return Err(SstError::InvalidParameter("need k_max >= 1".into()));
    }
    let (consts, values, residual) = mpf::with_precision(work_bits(), || {
        let s2 = Mpf::from_i64(8) * (Mpf::one() - Mpf::ln2());
        let mut rec = vec![Mpf::zero(); k_max + 1];
        rec[1] = s2.clone();
        for l in 2..=k_max {
            let mut acc = Mpf::zero();
            for j in 1..l {
                acc += binomial::<Mpf>(2 * l as u64, 2 * j as u64) * rec[j].clone() * rec[l - j].clone();
            }
            rec[l] = acc / Mpf::from_i64(4);
        }
        let fact = |n: usize| -> Mpf { (1..=n).fold(Mpf::one(), |a, i| a * Mpf::from_i64(i as i64)) };
        let two = Mpf::from_i64(2);
        let mut consts = vec![0.0; 2 * k_max + 1];
        let mut residual = 0.0f64;
        for k in 1..=k_max {
            let closed = fact(2 * k) * fact(2 * k - 2) * s2.powi(k as u32)
                / (two.powi(k as u32) * two.powi(2 * k as u32 - 2) * fact(k) * fact(k - 1));
            residual = residual.max(((closed.clone() - rec[k].clone()) / closed).abs().to_f64());
            let gauss = fact(2 * k) / (two.powi(k as u32) * fact(k)) * s2.powi(k as u32);
            let via = rec[k].clone() * Mpf::pi().sqrt() / (Mpf::from_i64(k as i64) - Mpf::from_ratio(1, 2)).gamma();
            residual = residual.max(((via - gauss.clone()) / gauss).abs().to_f64());
            consts[2 * k] = rec[k].to_f64();
        }
        (consts, normal_moments(s2.to_f64(), 2 * k_max), residual)
    });
    Ok(LimitMomentSeq {
        kind: LimitKind::ShapeCk0,
        params: vec![("sigma2".into(), shape_sigma2())],
        values,
        constants: consts,
        quadrature_error: None,
        residual: Some(residual),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalanShapeConstants {
    /// `C_0 = sum_n ln n beta_n / 4^n`.
    pub c0: f64,
    pub c0_bound: f64,
    /// Coefficient of `n^{1/2}` in the mean, `-2 sqrt(pi)`.
    pub mean_coeff: f64,
    /// Coefficient of `n ln n` in the variance, `8 (1 - ln 2)`.
    pub var_slope: f64,
    pub terms: u64,
}

/// Shape-functional constants under the Catalan model. The tail of `C_0`
/// beyond `n_terms` uses the asymptotic expansion of `beta_n / 4^n` with an
/// Euler-Maclaurin correction; the bound adds the first omitted asymptotic term.
pub fn catalan_shape_constants(n_terms: u64) -> Result<CatalanShapeConstants> {
    if n_terms < 100 {
        return Err(SstError::InvalidParameter("need at least 100 terms".into()));
    }
    let (c0, bound) = mpf::with_precision(work_bits(), || {
        let beta = crate::num::special::catalan_scaled::<Mpf>(n_terms as usize);
        let (v, _, em) = series_with_tail(
            |n| beta[n as usize].clone() * Mpf::from_i64(n as i64).ln(),
            |x: &Mpf| catalan_scaled_asymptotic(x) * x.ln(),
            1,
            n_terms,
        );
        let (a, b) = CATALAN_ASYMPTOTIC[CATALAN_ASYMPTOTIC.len() - 1];
        let k = (CATALAN_ASYMPTOTIC.len() - 1) as f64;
        let n = n_terms as f64;
        let expo = k + 0.5;
        let omitted = (a as f64 / b as f64).abs() * (n.ln() + 1.0 / expo) / (expo * n.powf(expo) * std::f64::consts::PI.sqrt());
        (v.to_f64(), em + omitted)
    });
    Ok(CatalanShapeConstants {
        c0,
        c0_bound: bound,
        mean_coeff: -2.0 * std::f64::consts::PI.sqrt(),
        var_slope: shape_sigma2(),
        terms: n_terms,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VarianceFit {
    /// Coefficient of `n ln n` in the two-term fit.
    pub a: f64,
    /// Coefficient of `n` in the two-term fit.
    pub b: f64,
    /// Coefficients of `n ln n` and `n` when `n^{1/2} ln n` and `n^{1/2}`
    /// are included in the fit.
    pub a_extended: f64,
    pub b_extended: f64,
    pub n_lo: usize,
    pub n_hi: usize,
}

/// Least squares over the first `p` basis functions by normal equations.
fn least_squares(rows: &[([f64; 4], f64)], p: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (x, y) in rows {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += x[i] * x[j];
            }
            b[i] += x[i] * y;
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            let f = a[j][i] / a[i][i];
            for k in i..p {
                a[j][k] -= f * a[i][k];
            }
            b[j] -= f * b[i];
        }
    }
    let mut out = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|k| a[i][k] * out[k]).sum();
        out[i] = (b[i] - s) / a[i][i];
    }
    out
}

/// Least-squares fit `Var_n = A n ln n + B n` over `n_lo..=n_hi` of the exact
/// Catalan variances for toll `ln n`, plus the fit that also includes the
/// `n^{1/2} ln n` and `n^{1/2}` correction terms.
pub fn catalan_variance_fit(n_lo: usize, n_hi: usize) -> Result<VarianceFit> {
    if n_lo < 2 || n_hi < n_lo + 4 {
        return Err(SstError::InvalidParameter("need 2 <= n_lo and n_hi >= n_lo + 4".into()));
    }
    let c0 = catalan_shape_constants(20_000)?.c0;
    let spec = TollSpec::new(2, TollFamily::Log)?;
    let t = catalan_moments::<f64>(&spec, 2, n_hi, Centering::Linear(c0))?;
    let rows: Vec<([f64; 4], f64)> = (n_lo..=n_hi)
        .map(|n| {
            let x = n as f64;
            let r = x.sqrt().recip();
            ([x.ln(), 1.0, r * x.ln(), r], t.variance(n) / x)
        })
        .collect();
    let two = least_squares(&rows, 2);
    let four = least_squares(&rows, 4);
    Ok(VarianceFit {
        a: two[0],
        b: two[1],
        a_extended: four[0],
        b_extended: four[1],
        n_lo,
        n_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn ck_small_values() {
        let c = catalan_ck(1.0, 3).unwrap();
        assert!(close(c.constants[1], 1.0, 1e-15));
        assert!(close(c.constants[2], 2.5, 1e-15));
        assert!(close(c.values[1], std::f64::consts::PI.sqrt(), 1e-15));
        assert!(catalan_ck(0.5, 3).is_err());
    }

    #[test]
    fn sigma2_landscape() {
        let lim = sigma2_half();
        assert!(close(sigma2_alpha(0.499).unwrap(), lim, 1e-2));
        assert!(close(sigma2_alpha(0.501).unwrap(), lim, 1e-2));
        assert!(close(sigma2_alpha(0.5 + 1e-7).unwrap(), lim, 1e-5));
        for i in 1..=200 {
            assert!(sigma2_alpha(0.05 * i as f64).unwrap() > 0.0, "alpha = {}", 0.05 * i as f64);
        }
        let (x, v) = sigma2_max().unwrap();
        assert!((x - 0.682607).abs() < 1e-3, "{x}");
        assert!((v - 0.198946).abs() < 1e-3, "{v}");
    }

    #[test]
    fn sigma2_limits_in_alpha() {
        let small = sigma2_alpha(0.01).unwrap() / 0.01;
        assert!(close(small, 4.0 * (1.0 - std::f64::consts::LN_2), 2e-2), "{small}");
        let big = sigma2_alpha(50.0).unwrap() * 50.0;
        assert!(close(big, 2f64.sqrt() - 1.0, 0.1), "{big}");
    }

    #[test]
    fn large_alpha_moments_approach_sqrt_factorial() {
        let alpha = 200.0f64;
        let c = catalan_ck(alpha, 4).unwrap();
        for k in 1..=4 {
            let scaled = alpha.powf(k as f64 / 2.0) * c.values[k];
            let target = crate::indicial::factorial::<f64>(k).sqrt();
            assert!(close(scaled, target, 0.05), "k={k} {scaled} {target}");
        }
    }

    #[test]
    fn airy_and_wiener() {
        let r = airy_wiener_check(10).unwrap();
        assert_eq!(r.omega[1], 0.5);
        assert!(close(r.a0[1], 1.0, 1e-15));
        assert!(close(r.a0[2], 49.0, 1e-14));
        assert!(r.airy_residual < 1e-10 && r.wiener_residual < 1e-10, "{r:?}");
    }

    #[test]
    fn two_route_variance() {
        for alpha in [0.3, 0.75, 2.0] {
            let m = mk_moments(alpha, 2, 1e-12).unwrap();
            assert_eq!(m.values[1], 0.0);
            let s = sigma2_alpha(alpha).unwrap();
            assert!((m.values[2] - s).abs() < 1e-8, "alpha={alpha} {} {s}", m.values[2]);
        }
        let m = mk_moments(0.5, 2, 1e-12).unwrap();
        assert!((m.values[2] - sigma2_half()).abs() < 1e-8, "{}", m.values[2]);
    }

    #[test]
    fn mk_higher_moments_consistent_with_ck() {
        let alpha = 1.5;
        let m = mk_moments(alpha, 4, 1e-11).unwrap();
        let c = catalan_ck(alpha, 4).unwrap().values;
        let mu = c[1];
        let central3 = c[3] - 3.0 * c[2] * mu + 2.0 * mu.powi(3);
        let central4 = c[4] - 4.0 * c[3] * mu + 6.0 * c[2] * mu * mu - 3.0 * mu.powi(4);
        assert!(close(m.values[3], central3, 1e-7), "{} {}", m.values[3], central3);
        assert!(close(m.values[4], central4, 1e-7), "{} {}", m.values[4], central4);
        assert!(m.hankel_min_pivot(3) > 0.0);
    }

    #[test]
    fn shape_constants() {
        let s = shape_ck0(10).unwrap();
        assert!(close(s.constants[2], shape_sigma2(), 1e-15));
        assert!(s.residual.unwrap() < 1e-12);
        assert!(close(s.values[4], 3.0 * shape_sigma2().powi(2), 1e-14));
    }

    #[test]
    fn catalan_c0_and_mean() {
        let c = catalan_shape_constants(20_000).unwrap();
        assert!(c.c0_bound < 1e-10, "{}", c.c0_bound);
        let c_small = catalan_shape_constants(2_000).unwrap();
        assert!((c.c0 - c_small.c0).abs() < 1e-10);
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let mean = crate::exact::catalan_mean::<f64>(&spec, 4000).unwrap();
        let off = |n: usize| mean[n] - c.c0 * (n as f64 + 1.0) - c.mean_coeff * (n as f64).sqrt();
        assert!((off(4000) - off(1000)).abs() < 0.05, "{} {}", off(4000), off(1000));
    }

    #[test]
    fn catalan_variance_slope_fit() {
        let f = catalan_variance_fit(2000, 5000).unwrap();
        assert!((f.a_extended / shape_sigma2() - 1.0).abs() < 0.01, "{f:?}");
        assert!(f.a < f.a_extended);
    }

    #[test]
    fn mk_sequences_are_moment_sequences() {
        for alpha in [0.3, 0.5, 1.0] {
            let m = mk_moments(alpha, 8, 1e-10).unwrap();
            assert!(m.hankel_min_pivot(4) > 0.0, "alpha={alpha} {:?}", m.values);
            assert!(m.values[2] > 0.0 && m.values[4] > 0.0 && m.values[6] > 0.0);
        }
    }
}
