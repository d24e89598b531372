//! Exact moment recurrences under the random permutation and Catalan models.

pub mod brute;
pub mod catalan;
pub mod conv;
pub mod rpm;

use serde::Serialize;

use crate::num::{binomial, Field};
use crate::toll::TollSpec;

pub use catalan::{catalan_mean, catalan_moments, catalan_moments_from_input};
pub use rpm::{rpm_mean, rpm_mean_from_input, rpm_moments, rpm_moments_from_input};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Model {
    Rpm { m: usize },
    Catalan,
}

/// How moments are centered before being raised to powers.
#[derive(Clone, Debug)]
pub enum Centering<F> {
    None,
    /// Subtract the exact mean of each size.
    Mean,
    /// Subtract an arbitrary sequence, applied by binomial transform.
    Sequence(Vec<F>),
    /// Subtract `c (n + 1)` by running the centered recurrence directly.
    Linear(F),
}

#[derive(Clone, Debug)]
pub struct MomentTable<F> {
    pub model: Model,
    pub spec: TollSpec,
    pub k_max: usize,
    pub n_max: usize,
    /// `values[k][n]`, unscaled.
    pub values: Vec<Vec<F>>,
    /// Catalan only: `scaled[k][n] = beta_n / 4^n * values[k][n]`.
    pub scaled: Option<Vec<Vec<F>>>,
    pub centering: Option<Vec<F>>,
}

impl<F: Field> MomentTable<F> {
    pub fn moment(&self, n: usize, k: usize) -> &F {
        &self.values[k][n]
    }

    /// Variance of size `n`, valid for uncentered and centered tables.
    pub fn variance(&self, n: usize) -> F {
        let m1 = self.values[1][n].clone();
        self.values[2][n].clone() - m1.clone() * m1
    }
}

/// Moments of `X - c` from moments of `X`, one centering value per size.
pub fn center_moments<F: Field>(raw: &[Vec<F>], c: &[F]) -> Vec<Vec<F>> {
    let k_max = raw.len() - 1;
    let n_len = raw[0].len();
    let mut out = vec![vec![F::zero(); n_len]; k_max + 1];
    for n in 0..n_len {
        let neg = -c[n].clone();
        for k in 0..=k_max {
            let mut acc = F::zero();
            let mut pw = F::one();
            for i in (0..=k).rev() {
                acc += binomial::<F>(k as u64, i as u64) * raw[i][n].clone() * pw.clone();
                pw *= neg.clone();
            }
            out[k][n] = acc;
        }
    }
    out
}

/// Initial values shifted by `-c (j + 1)`.
pub(crate) fn linear_shift<F: Field>(input: &mut [F], m: usize, c: &F) {
    for (j, v) in input.iter_mut().enumerate().take(m - 1) {
        *v -= c.clone() * F::from_i64(j as i64 + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn centering_second_moment() {
        let raw = vec![
            vec![BigRational::from_i64(1)],
            vec![BigRational::from_i64(3)],
            vec![BigRational::from_i64(11)],
        ];
        let c = center_moments(&raw, &[BigRational::from_i64(3)]);
        assert_eq!(c[1][0], BigRational::from_i64(0));
        assert_eq!(c[2][0], BigRational::from_i64(2));
    }
}
