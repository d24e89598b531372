//! Uniform (Catalan) model recurrences for binary search trees.
//!
//! Sweeps run on the scaled moments `beta_n / 4^n * mu_n(k)`.

use super::conv::poly_seq_power;
use super::{center_moments, linear_shift, Centering, Model, MomentTable};
use crate::error::{Result, SstError};
use crate::num::special::catalan_scaled;
use crate::num::Field;
use crate::toll::{TollScalar, TollSpec};

/// Returns `(values, scaled)` indexed `[k][n]` from `b_0, t_1, t_2, ...`.
pub fn catalan_moments_from_input<F: Field>(input: &[F], k_max: usize) -> (Vec<Vec<F>>, Vec<Vec<F>>) {
    let len = input.len();
    let beta = catalan_scaled::<F>(len.saturating_sub(1));
    let mut scaled: Vec<Vec<F>> = vec![beta.clone()];
    let mut fact = vec![F::one()];
    for k in 1..=k_max {
        fact.push(fact[k - 1].clone() * F::from_i64(k as i64));
    }
    let quarter = F::from_ratio(1, 4);
    let half = F::from_ratio(1, 2);
    for k in 1..=k_max {
        let g: Vec<Vec<F>> = (0..k)
            .map(|q| scaled[q].iter().map(|v| v.clone() / fact[q].clone()).collect())
            .collect();
        let p = poly_seq_power(&g, 2, k, len.saturating_sub(1).max(1));
        let mut mu: Vec<F> = Vec::with_capacity(len);
        for (n, t) in input.iter().enumerate() {
            if n == 0 {
                mu.push(t.powi(k as u32));
                continue;
            }
            let mut r = F::zero();
            let mut tp = F::one();
            for k3 in 0..=k {
                r += tp.clone() / fact[k3].clone() * p[k - k3][n - 1].clone();
                tp *= t.clone();
            }
            r = r * fact[k].clone() * quarter.clone();
            let mut h = F::zero();
            for (i, m) in mu.iter().enumerate() {
                h += beta[n - 1 - i].clone() * m.clone();
            }
            mu.push(half.clone() * h + r);
        }
        scaled.push(mu);
    }
    let values = scaled
        .iter()
        .map(|row| row.iter().zip(&beta).map(|(v, b)| v.clone() / b.clone()).collect())
        .collect();
    (values, scaled)
}

fn check_binary(spec: &TollSpec) -> Result<()> {
    if spec.m != 2 {
        return Err(SstError::Unsupported(format!(
            "the Catalan model is defined for m = 2 only, got m = {}",
            spec.m
        )));
    }
    Ok(())
}

pub fn catalan_mean<F: TollScalar>(spec: &TollSpec, n_max: usize) -> Result<Vec<F>> {
    check_binary(spec)?;
    let input = spec.input_sequence::<F>(n_max)?;
    Ok(catalan_moments_from_input(&input, 1).0.swap_remove(1))
}

pub fn catalan_moments<F: TollScalar>(
    spec: &TollSpec,
    k_max: usize,
    n_max: usize,
    centering: Centering<F>,
) -> Result<MomentTable<F>> {
    check_binary(spec)?;
    if k_max == 0 {
        return Err(SstError::InvalidParameter("k_max must be >= 1".into()));
    }
    let mut input = spec.input_sequence::<F>(n_max)?;
    let beta = catalan_scaled::<F>(n_max);
    let rescale = |v: &[Vec<F>]| -> Vec<Vec<F>> {
        v.iter()
            .map(|row| row.iter().zip(&beta).map(|(x, b)| x.clone() * b.clone()).collect())
            .collect()
    };
    let (values, scaled, center) = match centering {
        Centering::None => {
            let (v, s) = catalan_moments_from_input(&input, k_max);
            (v, s, None)
        }
        Centering::Mean => {
            let (raw, _) = catalan_moments_from_input(&input, k_max);
            let c = raw[1].clone();
            let v = center_moments(&raw, &c);
            let s = rescale(&v);
            (v, s, Some(c))
        }
        Centering::Sequence(c) => {
            if c.len() <= n_max {
                return Err(SstError::InvalidParameter("centering sequence too short".into()));
            }
            let (raw, _) = catalan_moments_from_input(&input, k_max);
            let v = center_moments(&raw, &c);
            let s = rescale(&v);
            (v, s, Some(c))
        }
        Centering::Linear(c) => {
            linear_shift(&mut input, 2, &c);
            let seq = (0..=n_max).map(|n| c.clone() * F::from_i64(n as i64 + 1)).collect();
            let (v, s) = catalan_moments_from_input(&input, k_max);
            (v, s, Some(seq))
        }
    };
    Ok(MomentTable {
        model: Model::Catalan,
        spec: spec.clone(),
        k_max,
        n_max,
        values,
        scaled: Some(scaled),
        centering: center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toll::TollFamily;
    use num_rational::BigRational;

    #[test]
    fn three_keys_identity_toll() {
        let spec = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let t: MomentTable<BigRational> = catalan_moments(&spec, 2, 3, Centering::None).unwrap();
        assert_eq!(t.values[1][3], BigRational::from_ratio(29, 5));
        assert_eq!(t.values[2][3], BigRational::from_ratio(169, 5));
        let s = t.scaled.as_ref().unwrap();
        assert_eq!(s[0][3], BigRational::from_ratio(5, 64));
    }

    #[test]
    fn rejects_other_arity() {
        let spec = TollSpec::new(3, TollFamily::Log).unwrap();
        assert!(matches!(
            catalan_moments::<f64>(&spec, 1, 5, Centering::None),
            Err(SstError::Unsupported(_))
        ));
    }

    #[test]
    fn linear_centering_matches_binomial_transform() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let c = 0.5f64;
        let seq: Vec<f64> = (0..=40).map(|n| c * (n as f64 + 1.0)).collect();
        let a = catalan_moments(&spec, 3, 40, Centering::Sequence(seq)).unwrap();
        let b = catalan_moments(&spec, 3, 40, Centering::Linear(c)).unwrap();
        for k in 0..=3 {
            for n in 0..=40 {
                let (x, y) = (a.values[k][n], b.values[k][n]);
                assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "k={k} n={n}");
            }
        }
    }
}
