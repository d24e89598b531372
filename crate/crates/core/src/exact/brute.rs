//! Brute-force enumeration oracles for small trees.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Result, SstError};
use crate::num::{factorial_big, Field};
use crate::toll::{TollScalar, TollSpec};

pub const RPM_MAX_N: usize = 9;
pub const CATALAN_MAX_N: usize = 13;

/// Visits every permutation of `0..n` (lexicographic order).
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Splits an insertion sequence into the root keys and the m subtree sequences.
fn split_insertion(seq: &[usize], m: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut root: Vec<usize> = seq[..m - 1].to_vec();
    root.sort_unstable();
    let mut groups = vec![Vec::new(); m];
    for &x in &seq[m - 1..] {
        let idx = root.iter().filter(|&&r| r < x).count();
        groups[idx].push(x);
    }
    (root, groups)
}

fn eval_insertion<F: Field>(seq: &[usize], m: usize, values: &[F]) -> F {
    if seq.len() + 1 < m {
        return values[seq.len()].clone();
    }
    let (_, groups) = split_insertion(seq, m);
    let mut acc = values[seq.len()].clone();
    for g in &groups {
        acc += eval_insertion(g, m, values);
    }
    acc
}

fn shape_of(seq: &[usize], m: usize) -> String {
    if seq.len() + 1 < m {
        let mut keys = seq.to_vec();
        keys.sort_unstable();
        return format!("{keys:?}");
    }
    let (root, groups) = split_insertion(seq, m);
    let children: Vec<String> = groups.iter().map(|g| shape_of(g, m)).collect();
    format!("{root:?}({})", children.join(","))
}

/// Distinct m-ary search trees on `n` keys with their probabilities under random insertion.
pub fn rpm_tree_distribution(m: usize, n: usize) -> Result<Vec<(String, BigRational)>> {
    if n > RPM_MAX_N {
        return Err(SstError::Capacity(format!("permutation enumeration limited to n <= {RPM_MAX_N}")));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for_each_permutation(n, |p| *counts.entry(shape_of(p, m)).or_default() += 1);
    let total = BigInt::from(factorial_big(n as u64));
    Ok(counts
        .into_iter()
        .map(|(s, c)| (s, BigRational::new(BigInt::from(c), total.clone())))
        .collect())
}

/// Moments `E X_n^k` for `k <= k_max` by enumerating all n! insertion orders.
pub fn rpm_moments_bruteforce<F: TollScalar>(spec: &TollSpec, n: usize, k_max: usize) -> Result<Vec<F>> {
    if n > RPM_MAX_N {
        return Err(SstError::Capacity(format!("permutation enumeration limited to n <= {RPM_MAX_N}")));
    }
    let values = spec.input_sequence::<F>(n)?;
    let mut sums = vec![F::zero(); k_max + 1];
    for_each_permutation(n, |p| {
        let x = eval_insertion(p, spec.m, &values);
        let mut pw = F::one();
        for s in sums.iter_mut() {
            *s += pw.clone();
            pw *= x.clone();
        }
    });
    let count = F::from_bigint(&factorial_big(n as u64));
    Ok(sums.into_iter().map(|s| s / count.clone()).collect())
}

/// All functional values over the binary trees of each size `0..=n_max`.
fn catalan_values<F: Field>(values: &[F], n_max: usize) -> Vec<Vec<F>> {
    let mut all: Vec<Vec<F>> = vec![vec![values[0].clone()]];
    for n in 1..=n_max {
        let mut cur = Vec::new();
        for l in 1..=n {
            for a in &all[l - 1] {
                for b in &all[n - l] {
                    cur.push(a.clone() + b.clone() + values[n].clone());
                }
            }
        }
        all.push(cur);
    }
    all
}

/// Moments `[k][n]` under the uniform model by enumerating every binary tree.
pub fn catalan_bruteforce<F: TollScalar>(spec: &TollSpec, n_max: usize, k_max: usize) -> Result<Vec<Vec<F>>> {
    if spec.m != 2 {
        return Err(SstError::Unsupported("the Catalan model is defined for m = 2 only".into()));
    }
    if n_max > CATALAN_MAX_N {
        return Err(SstError::Capacity(format!("tree enumeration limited to n <= {CATALAN_MAX_N}")));
    }
    let values = spec.input_sequence::<F>(n_max)?;
    let all = catalan_values(&values, n_max);
    let mut out = vec![Vec::with_capacity(n_max + 1); k_max + 1];
    for trees in &all {
        let mut sums = vec![F::zero(); k_max + 1];
        for x in trees {
            let mut pw = F::one();
            for s in sums.iter_mut() {
                *s += pw.clone();
                pw *= x.clone();
            }
        }
        let count = F::from_i64(trees.len() as i64);
        for (k, s) in sums.into_iter().enumerate() {
            out[k].push(s / count.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toll::TollFamily;

    #[test]
    fn ternary_four_keys_has_six_trees() {
        let d = rpm_tree_distribution(3, 4).unwrap();
        assert_eq!(d.len(), 6);
        for (_, p) in &d {
            assert_eq!(*p, BigRational::from_ratio(1, 6));
        }
    }

    #[test]
    fn binary_three_keys_balanced_tree() {
        let d = rpm_tree_distribution(2, 3).unwrap();
        assert_eq!(d.len(), 5);
        let two_sixths = d.iter().filter(|(_, p)| *p == BigRational::from_ratio(2, 6)).count();
        assert_eq!(two_sixths, 1);
    }

    #[test]
    fn empty_tree_moment() {
        let spec = TollSpec::with_initial(2, TollFamily::Log, vec![1.5]).unwrap();
        let mom: Vec<BigRational> = rpm_moments_bruteforce(&spec, 0, 3).unwrap();
        assert_eq!(mom[3], BigRational::from_ratio(27, 8));
    }

    #[test]
    fn catalan_three_keys() {
        let spec = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let mom: Vec<Vec<BigRational>> = catalan_bruteforce(&spec, 3, 2).unwrap();
        assert_eq!(mom[1][3], BigRational::from_ratio(29, 5));
        assert_eq!(mom[2][3], BigRational::from_ratio(169, 5));
        assert_eq!(mom[1][1], BigRational::from_i64(1));
    }

    #[test]
    fn capacity_errors() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        assert!(matches!(
            rpm_moments_bruteforce::<f64>(&spec, 12, 1),
            Err(SstError::Capacity(_))
        ));
    }
}
