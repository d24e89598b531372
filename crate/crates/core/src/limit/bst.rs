//! Shape-functional constants for random binary search trees (toll `ln n`,
//! random permutation model with m = 2).

use serde::Serialize;

use crate::error::{Result, SstError};
use crate::exact::conv::self_convolution_fft;
use crate::exact::rpm_moments_from_input;
use crate::num::special::{harmonic2_asymptotic, harmonic_asymptotic};
use crate::num::sum::{neumaier_sum, series_with_tail};
use crate::num::{mpf, Field, Mpf, Real};
use crate::toll::{TollFamily, TollSpec};
use crate::transfer::{weighted_toll_sum, DEFAULT_TERMS};

/// Default truncation of the series defining `V`.
pub const DEFAULT_V_TERMS: usize = 1 << 18;

#[derive(Clone, Debug, Serialize)]
pub struct BstShapeConstants {
    /// `K(2) = 2 sum ln k / ((k+1)(k+2))`, the mean slope `C_1`.
    pub k2: f64,
    pub k2_bound: f64,
    /// `V = sum_{k>=1} r_k(2) / ((k+1)(k+2))`.
    pub v: f64,
    pub v_bound: f64,
    /// Variance slope `C_1^2 + 2 V`.
    pub variance_constant: f64,
    /// Constant term of the variance, `-(4 - pi^2/3)`.
    pub variance_offset: f64,
    /// `V_1 = 2 gamma`, `V_2 = 4 - gamma^2 - pi^2/2`: coefficients of the
    /// asymptotic `r_k ~ -(H_k^2 - H_k^(2)) + V_1 H_k + V_2`.
    pub v1: f64,
    pub v2: f64,
    pub terms: usize,
}

fn c1_mpf() -> Result<(Mpf, f64)> {
    let spec = TollSpec::new(2, TollFamily::Log)?;
    let (k1, bound) = weighted_toll_sum::<Mpf>(&spec, DEFAULT_TERMS)?;
    Ok((Mpf::from_i64(2) * k1, 2.0 * bound))
}

/// Centered means `mu_n - C_1 (n + 1)` for `n <= n_max`, by the recurrence
/// `x_n = ln n + (2/n) sum_{j<n} x_j`, `x_0 = -C_1`.
fn centered_means(c1: &Mpf, n_max: usize) -> Vec<Mpf> {
    let mut x = Vec::with_capacity(n_max + 1);
    x.push(-c1.clone());
    let mut s = -c1.clone();
    for n in 1..=n_max {
        let nf = Mpf::from_i64(n as i64);
        let v = nf.ln() + Mpf::from_i64(2) * s.clone() / nf;
        s += v.clone();
        x.push(v);
    }
    x
}

fn r_asymptotic<R: Real>(x: &R, v1: &R, v2: &R) -> R {
    let h = harmonic_asymptotic(x);
    let h2 = harmonic2_asymptotic(x);
    -(h.clone() * h.clone() - h2) + v1.clone() * h + v2.clone()
}

/// Mean and variance constants of the binary search tree shape functional.
///
/// `r_k(2) = (ln k)^2 + 4 ln k (1/k) sum_{j<k} x_j + (2/k) sum_{j<k} x_j x_{k-1-j}`
/// with `x` the centered means. The series for `V` is summed to `n_terms`;
/// the remainder uses the asymptotic form of `r_k` with an Euler-Maclaurin
/// tail, and the bound combines the quadrature bound with an `O(ln k / k)`
/// deviation envelope calibrated on the last half of the summed range.
pub fn bst_shape_constants(n_terms: usize) -> Result<BstShapeConstants> {
    if n_terms < 1000 {
        return Err(SstError::InvalidParameter("need at least 1000 terms".into()));
    }
    let bits = mpf::precision().max(160);
    mpf::with_precision(bits, || {
        let (c1, k2_bound) = c1_mpf()?;
        let x = centered_means(&c1, n_terms);
        let xf: Vec<f64> = x.iter().map(|v| v.to_f64()).collect();
        let conv = self_convolution_fft(&xf, n_terms);
        let mut prefix = 0.0f64;
        let mut r = vec![0.0f64; n_terms + 1];
        for k in 1..=n_terms {
            prefix += xf[k - 1];
            let kf = k as f64;
            let l = kf.ln();
            r[k] = l * l + 4.0 * l * prefix / kf + 2.0 * conv[k - 1] / kf;
        }
        let g = Mpf::euler_gamma();
        let pi2 = Mpf::pi() * Mpf::pi();
        let v1 = Mpf::from_i64(2) * g.clone();
        let v2 = Mpf::from_i64(4) - g.clone() * g - pi2.clone() / Mpf::from_i64(2);
        let (v1f, v2f) = (v1.to_f64(), v2.to_f64());
        let partial = neumaier_sum((1..=n_terms).map(|k| r[k] / ((k + 1) as f64 * (k + 2) as f64)));
        let (_, tail, em_bound) = series_with_tail(
            |_| Mpf::zero(),
            |y: &Mpf| r_asymptotic(y, &v1, &v2) / ((y.clone() + Mpf::one()) * (y.clone() + Mpf::from_i64(2))),
            n_terms as u64 + 1,
            n_terms as u64,
        );
        let mut envelope = 0.0f64;
        for (k, rk) in r.iter().enumerate().skip(n_terms / 2) {
            let kf = k as f64;
            let dev = rk - r_asymptotic(&kf, &v1f, &v2f);
            envelope = envelope.max(dev.abs() * kf / kf.ln());
        }
        let nf = n_terms as f64;
        let tail_dev = envelope * (2.0 * nf.ln() + 1.0) / (4.0 * nf * nf);
        let v = partial + tail.to_f64();
        let c1f = c1.to_f64();
        Ok(BstShapeConstants {
            k2: c1f,
            k2_bound,
            v,
            v_bound: em_bound + tail_dev,
            variance_constant: c1f * c1f + 2.0 * v,
            variance_offset: -(4.0 - (pi2 / Mpf::from_i64(3)).to_f64()),
            v1: v1f,
            v2: v2f,
            terms: n_terms,
        })
    })
}

/// `-2n (mu_n - [K(2)(n+1) - ln n - 2])` for each `n` in `ns`; tends to 1.
pub fn bst_mean_residuals(ns: &[usize]) -> Result<Vec<f64>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let bits = mpf::precision().max(160);
    mpf::with_precision(bits, || {
        let (c1, _) = c1_mpf()?;
        let x = centered_means(&c1, n_max);
        Ok(ns
            .iter()
            .map(|&n| {
                let nf = Mpf::from_i64(n as i64);
                (Mpf::from_i64(-2) * nf.clone() * (x[n].clone() + nf.ln() + Mpf::from_i64(2))).to_f64()
            })
            .collect())
    })
}

/// Exact `sigma_n^2 - (C_1^2 + 2V)(n+1)` at size `n`.
pub fn bst_variance_residual(n: usize, constants: &BstShapeConstants) -> Result<f64> {
    let c1 = constants.k2;
    let mut input: Vec<f64> = (0..=n).map(|j| if j == 0 { 0.0 } else { (j as f64).ln() }).collect();
    input[0] -= c1;
    let mom = rpm_moments_from_input(2, &input, 2);
    let var = mom[2][n] - mom[1][n] * mom[1][n];
    Ok(var - constants.variance_constant * (n as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_second_order_term() {
        let r = bst_mean_residuals(&[2000, 3500, 5000]).unwrap();
        for v in r {
            assert!((0.9..=1.1).contains(&v), "{v}");
        }
    }

    #[test]
    fn variance_constant_term() {
        let c = bst_shape_constants(DEFAULT_V_TERMS).unwrap();
        assert!(c.v_bound <= 1e-8, "{}", c.v_bound);
        assert!((c.v1 - 1.154_431_329_803_065_8).abs() < 1e-15);
        let d = bst_variance_residual(5000, &c).unwrap();
        assert!((d - c.variance_offset).abs() < 0.02, "{d} {}", c.variance_offset);
    }

    #[test]
    fn agrees_with_general_clt_route() {
        let c = bst_shape_constants(1 << 14).unwrap();
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let g = crate::limit::rpm_clt_constants(&spec, 1 << 14).unwrap();
        assert!((c.k2 - g.mu).abs() < 1e-12);
        assert!((c.variance_constant - g.sigma2).abs() < 1e-5, "{} {}", c.variance_constant, g.sigma2);
    }
}
