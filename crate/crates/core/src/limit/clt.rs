//! Normal-limit constants for small tolls under the random permutation model.

use serde::Serialize;

use super::{normal_moments, LimitKind, LimitMomentSeq};
use crate::error::{Result, SstError};
use crate::exact::conv::self_convolution_fft;
use crate::exact::rpm_mean_from_input;
use crate::indicial::factorial;
use crate::num::sum::neumaier_sum;
use crate::num::{harmonic, rising, Field, Mpf, Real};
use crate::toll::TollSpec;
use crate::transfer::{weighted_toll_sum, ATT_SMALL_MAX_M, DEFAULT_TERMS};

#[derive(Clone, Debug, Serialize)]
pub struct CltConstants {
    pub m: usize,
    pub mu: f64,
    pub mu_bound: f64,
    pub sigma2: f64,
    /// Estimated error of the tail correction added to `sigma2`.
    pub tail_bound: f64,
    pub r_truncation: usize,
    /// `r_n` for `n <= r_truncation`.
    #[serde(skip)]
    pub r: Vec<f64>,
}

/// `out[n] = sum_{j < n} C(n-1-j, r) x_j` for `n < x.len() + 1`, by Pascal updates.
fn binomial_weighted(x: &[f64], r: usize) -> Vec<f64> {
    let mut s = vec![0.0; r + 1];
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(0.0);
    for v in x {
        for i in (1..=r).rev() {
            s[i] += s[i - 1];
        }
        s[0] += v;
        out.push(s[r]);
    }
    out
}

fn binom_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Mean and variance constants of `(X_n - mu n) / sqrt(n) -> N(0, sigma2)`.
///
/// `r_n = E[(t_n + sum_i mu_{J_i} - mu_n)^2]` over the uniform subtree-size
/// composition is obtained from the first and second binomially weighted
/// sums of the linearly centered means, and `sigma2 = K_1[r] / (H_m - 1)`
/// with a constant-tail correction `r_N / (N + 1)`.
pub fn rpm_clt_constants(spec: &TollSpec, n_trunc: usize) -> Result<CltConstants> {
    let m = spec.m;
    if m > ATT_SMALL_MAX_M {
        return Err(SstError::InvalidParameter(format!(
            "normal limit constants need m <= {ATT_SMALL_MAX_M}"
        )));
    }
    if n_trunc < 4 * m {
        return Err(SstError::InvalidParameter("truncation too small".into()));
    }
    let h1: f64 = harmonic::<f64>(m as u64, 1) - 1.0;
    let (k1, mu_bound) = crate::num::mpf::with_precision(160, || weighted_toll_sum::<Mpf>(spec, DEFAULT_TERMS))?;
    let mu_mpf = k1 / Mpf::from_f64(h1);
    let mu = mu_mpf.to_f64();
    if !mu.is_finite() {
        return Err(SstError::InvalidParameter("toll is not small: K_1 diverges".into()));
    }
    let mut input = spec.input_sequence::<f64>(n_trunc)?;
    let tolls = input.clone();
    for (j, v) in input.iter_mut().enumerate().take(m - 1) {
        *v -= mu * (j as f64 + 1.0);
    }
    let mt = rpm_mean_from_input(m, &input);
    let sq: Vec<f64> = mt.iter().map(|v| v * v).collect();
    let marg = binomial_weighted(&sq, m - 2);
    let pair = if m == 2 {
        self_convolution_fft(&mt, n_trunc + 1)
    } else {
        let conv = self_convolution_fft(&mt, n_trunc + 1);
        binomial_weighted(&conv, m - 3)
    };
    let mf = m as f64;
    let mut r = vec![0.0; n_trunc + 1];
    for n in m - 1..=n_trunc {
        let total = binom_f64(n, m - 1);
        let e_sq = mf * marg[n] / total;
        let e_cross = if m == 2 { pair[n - 1] / n as f64 } else { pair[n - 1] / total };
        let d = mt[n] - tolls[n];
        r[n] = e_sq + mf * (mf - 1.0) * e_cross - d * d;
    }
    let partial = neumaier_sum((0..=n_trunc).map(|j| r[j] / ((j + 1) as f64 * (j + 2) as f64)));
    let tail = r[n_trunc] / (n_trunc as f64 + 1.0);
    let spread = (n_trunc / 2..=n_trunc).map(|j| (r[j] - r[n_trunc]).abs()).fold(0.0, f64::max);
    Ok(CltConstants {
        m,
        mu,
        mu_bound,
        sigma2: (partial + tail) / h1,
        tail_bound: spread / (n_trunc as f64 + 1.0) / h1,
        r_truncation: n_trunc,
        r,
    })
}

/// Moments of the normal limit for a small toll.
pub fn clt_moments(spec: &TollSpec, n_trunc: usize, k_max: usize) -> Result<LimitMomentSeq> {
    let c = rpm_clt_constants(spec, n_trunc)?;
    Ok(LimitMomentSeq {
        kind: LimitKind::Clt,
        params: vec![("m".into(), c.m as f64), ("mu".into(), c.mu), ("sigma2".into(), c.sigma2)],
        values: normal_moments(c.sigma2, k_max),
        constants: vec![c.mu, c.sigma2],
        quadrature_error: Some(c.tail_bound),
        residual: None,
    })
}

/// Limiting variance for the borderline toll with generating function `(1-z)^{-1/2}`.
pub fn borderline_sigma2(m: usize) -> Result<f64> {
    if !(2..=ATT_SMALL_MAX_M).contains(&m) {
        return Err(SstError::InvalidParameter(format!("need 2 <= m <= {ATT_SMALL_MAX_M}")));
    }
    Ok(crate::num::mpf::with_precision(160, || {
        let r: Mpf = rising(&Mpf::from_ratio(3, 2), m as u64 - 1);
        let f: Mpf = factorial(m);
        let h1: Mpf = harmonic::<Mpf>(m as u64, 1) - Mpf::one();
        let quarter = Mpf::pi() * Mpf::from_i64(m as i64 - 1) / Mpf::from_i64(4) + Mpf::one();
        let num = r.clone() * r.clone() * quarter - f.clone() * f.clone();
        let den = h1 * (f.clone() - r.clone()) * (f - r);
        (num / den).to_f64()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toll::TollFamily;

    #[test]
    fn borderline_binary_value() {
        let v = borderline_sigma2(2).unwrap();
        assert!((v - (4.5 * std::f64::consts::PI - 14.0)).abs() < 1e-13);
        for m in 2..=26 {
            assert!(borderline_sigma2(m).unwrap() > 0.0);
        }
        assert!(borderline_sigma2(27).is_err());
    }

    #[test]
    fn weighted_sums_match_direct() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let w = binomial_weighted(&x, 2);
        for n in [0usize, 1, 5, 29] {
            let d: f64 = (0..n).map(|j| binom_f64(n - 1 - j, 2) * x[j]).sum();
            assert!((w[n] - d).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_toll_has_no_variance() {
        for m in 2..=5 {
            let c = rpm_clt_constants(&TollSpec::degenerate(m, 1.5), 400).unwrap();
            assert!((c.mu - 1.5).abs() < 1e-12);
            assert!(c.sigma2.abs() < 1e-10, "m={m} {}", c.sigma2);
        }
    }

    #[test]
    fn space_requirement_mean() {
        let c = rpm_clt_constants(&TollSpec::space_requirement(3), 200).unwrap();
        assert!((c.mu - 0.6).abs() < 1e-12);
    }

    #[test]
    fn variance_matches_exact_growth() {
        use crate::exact::{rpm_moments, Centering};
        let spec = TollSpec::new(3, TollFamily::Log).unwrap();
        let c = rpm_clt_constants(&spec, 4000).unwrap();
        assert!(c.sigma2 > 0.0 && c.tail_bound < 1e-4);
        let t = rpm_moments::<f64>(&spec, 2, 4000, Centering::Mean).unwrap();
        let slope = (t.variance(4000) - t.variance(2000)) / 2000.0;
        assert!((slope - c.sigma2).abs() < 1e-3 * c.sigma2, "{slope} {}", c.sigma2);
    }
}
