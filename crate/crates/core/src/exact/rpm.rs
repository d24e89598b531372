//! Random permutation model recurrences for m-ary search trees.

use super::conv::poly_seq_power;
use super::{center_moments, linear_shift, Centering, Model, MomentTable};
use crate::error::{Result, SstError};
use crate::num::{binomial, Field};
use crate::toll::{TollScalar, TollSpec};

/// Solves `a_n = b_n + m / C(n, m-1) * sum_j C(n-1-j, m-2) a_j` for `n >= m-1`,
/// with `a_j = b_j` below, in O(n m) using Pascal updates of weighted prefix sums.
pub fn rpm_mean_from_input<F: Field>(m: usize, input: &[F]) -> Vec<F> {
    let mut a = Vec::with_capacity(input.len());
    let mut s = vec![F::zero(); m - 1];
    let mf = F::from_i64(m as i64);
    for (n, b) in input.iter().enumerate() {
        let v = if n + 1 < m {
            b.clone()
        } else {
            b.clone() + mf.clone() * s[m - 2].clone() / binomial::<F>(n as u64, m as u64 - 1)
        };
        for r in (1..m - 1).rev() {
            let prev = s[r - 1].clone();
            s[r] += prev;
        }
        s[0] += v.clone();
        a.push(v);
    }
    a
}

pub fn rpm_mean<F: TollScalar>(spec: &TollSpec, n_max: usize) -> Result<Vec<F>> {
    Ok(rpm_mean_from_input(spec.m, &spec.input_sequence::<F>(n_max)?))
}

/// Raw moments `values[k][n]` for `k <= k_max` from the input sequence.
pub fn rpm_moments_from_input<F: Field>(m: usize, input: &[F], k_max: usize) -> Vec<Vec<F>> {
    let len = input.len();
    let mut values: Vec<Vec<F>> = vec![vec![F::one(); len]];
    let mut fact = vec![F::one()];
    for k in 1..=k_max {
        fact.push(fact[k - 1].clone() * F::from_i64(k as i64));
    }
    for k in 1..=k_max {
        let g: Vec<Vec<F>> = (0..k)
            .map(|q| values[q].iter().map(|v| v.clone() / fact[q].clone()).collect())
            .collect();
        let p = poly_seq_power(&g, m, k, len.saturating_sub(m - 1).max(1));
        let mut r = Vec::with_capacity(len);
        for (n, b) in input.iter().enumerate() {
            if n + 1 < m {
                r.push(b.powi(k as u32));
                continue;
            }
            let idx = n + 1 - m;
            let mut acc = F::zero();
            let mut tp = F::one();
            for k3 in 0..=k {
                acc += tp.clone() / fact[k3].clone() * p[k - k3][idx].clone();
                tp *= b.clone();
            }
            r.push(acc * fact[k].clone() / binomial::<F>(n as u64, m as u64 - 1));
        }
        values.push(rpm_mean_from_input(m, &r));
    }
    values
}

pub fn rpm_moments<F: TollScalar>(
    spec: &TollSpec,
    k_max: usize,
    n_max: usize,
    centering: Centering<F>,
) -> Result<MomentTable<F>> {
    if k_max == 0 {
        return Err(SstError::InvalidParameter("k_max must be >= 1".into()));
    }
    let mut input = spec.input_sequence::<F>(n_max)?;
    let (values, center) = match centering {
        Centering::None => (rpm_moments_from_input(spec.m, &input, k_max), None),
        Centering::Mean => {
            let raw = rpm_moments_from_input(spec.m, &input, k_max);
            let c = raw[1].clone();
            (center_moments(&raw, &c), Some(c))
        }
        Centering::Sequence(c) => {
            if c.len() <= n_max {
                return Err(SstError::InvalidParameter("centering sequence too short".into()));
            }
            let raw = rpm_moments_from_input(spec.m, &input, k_max);
            (center_moments(&raw, &c), Some(c))
        }
        Centering::Linear(c) => {
            linear_shift(&mut input, spec.m, &c);
            let seq = (0..=n_max).map(|n| c.clone() * F::from_i64(n as i64 + 1)).collect();
            (rpm_moments_from_input(spec.m, &input, k_max), Some(seq))
        }
    };
    Ok(MomentTable {
        model: Model::Rpm { m: spec.m },
        spec: spec.clone(),
        k_max,
        n_max,
        values,
        scaled: None,
        centering: center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toll::TollFamily;
    use num_rational::BigRational;

    #[test]
    fn log_toll_small_n() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let a: Vec<f64> = rpm_mean(&spec, 3).unwrap();
        let expect = 3f64.ln() + 2.0 / 3.0 * 2f64.ln();
        assert!((a[3] - expect).abs() < 1e-14);
    }

    #[test]
    fn node_count_is_key_count() {
        let spec = TollSpec::degenerate(2, 1.0);
        let a: Vec<BigRational> = rpm_mean(&spec, 40).unwrap();
        for (n, v) in a.iter().enumerate() {
            assert_eq!(*v, BigRational::from_i64(n as i64));
        }
    }

    #[test]
    fn degenerate_has_zero_variance() {
        for m in 2..=5 {
            let spec = TollSpec::degenerate(m, 2.0);
            let t: MomentTable<BigRational> = rpm_moments(&spec, 3, 25, Centering::None).unwrap();
            for n in 0..=25 {
                let tn = BigRational::from_i64(2 * n as i64);
                assert_eq!(t.values[1][n], tn);
                assert_eq!(t.values[2][n], tn.clone() * tn.clone());
                assert_eq!(t.values[3][n], tn.clone() * tn.clone() * tn);
            }
        }
    }

    #[test]
    fn centered_routes_agree() {
        let spec = TollSpec::new(3, TollFamily::Power(1.0)).unwrap();
        let c = 0.37f64;
        let seq: Vec<f64> = (0..=60).map(|n| c * (n as f64 + 1.0)).collect();
        let a = rpm_moments(&spec, 3, 60, Centering::Sequence(seq)).unwrap();
        let b = rpm_moments(&spec, 3, 60, Centering::Linear(c)).unwrap();
        for k in 0..=3 {
            for n in 0..=60 {
                let (x, y) = (a.values[k][n], b.values[k][n]);
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "k={k} n={n} {x} {y}");
            }
        }
    }

    #[test]
    fn mean_centering_gives_zero_first_moment() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let t = rpm_moments::<f64>(&spec, 2, 50, Centering::Mean).unwrap();
        for n in 0..=50 {
            assert!(t.values[1][n].abs() < 1e-12);
            assert!(t.values[2][n] >= -1e-12);
        }
    }
}
