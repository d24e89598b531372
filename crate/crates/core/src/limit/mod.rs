//! Limit-law moment sequences and asymptotic constants.
//!
//! Covers the normal-limit constants of the random permutation model, the
//! moments of the non-normal fixed points `Y_beta`, the Catalan-model
//! families `C_k`, `m_k` and `C_{2k,0}`, and the binary search tree and
//! Catalan shape-functional constants.

pub mod bst;
pub mod catalan;
pub mod clt;
pub mod ybeta;

use serde::Serialize;

pub use bst::{bst_mean_residuals, bst_shape_constants, bst_variance_residual, BstShapeConstants};
pub use catalan::{
    airy_wiener_check, catalan_ck, catalan_ck_raw, catalan_shape_constants, catalan_variance_fit, mk_moments,
    shape_ck0, sigma2_alpha, sigma2_max, AiryWienerReport, CatalanShapeConstants, VarianceFit,
};
pub use clt::{borderline_sigma2, clt_moments, rpm_clt_constants, CltConstants};
pub use ybeta::{y_beta_moments, YBetaSampler};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LimitKind {
    Ck,
    Gk,
    Mk,
    ShapeCk0,
    Clt,
}

impl std::fmt::Display for LimitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LimitKind::Ck => "ck",
            LimitKind::Gk => "gk",
            LimitKind::Mk => "mk",
            LimitKind::ShapeCk0 => "shape",
            LimitKind::Clt => "clt",
        };
        f.write_str(s)
    }
}

/// Moments `values[k]` of a limit law together with the constants that
/// define them (`constants[k]`, same indexing; unused slots are zero).
#[derive(Clone, Debug, Serialize)]
pub struct LimitMomentSeq {
    pub kind: LimitKind,
    pub params: Vec<(String, f64)>,
    pub values: Vec<f64>,
    pub constants: Vec<f64>,
    pub quadrature_error: Option<f64>,
    /// Largest relative disagreement between independent routes, when computed.
    pub residual: Option<f64>,
}

impl LimitMomentSeq {
    /// `values[2] - values[1]^2`.
    pub fn variance(&self) -> f64 {
        self.values[2] - self.values[1] * self.values[1]
    }

    /// Smallest normalized Cholesky pivot over Hankel matrices `[values[i+j]]`
    /// of sizes up to `order` that fit in the sequence.
    pub fn hankel_min_pivot(&self, order: usize) -> f64 {
        hankel_min_pivot(&self.values, order)
    }
}

/// Smallest pivot of the Cholesky factorization of the diagonally scaled
/// Hankel matrix of each size `s <= order` with `2s - 2 < values.len()`.
/// Non-negative (up to rounding) for a moment sequence of a genuine law.
pub fn hankel_min_pivot(values: &[f64], order: usize) -> f64 {
    let mut min = f64::INFINITY;
    for s in 1..=order {
        if 2 * s - 2 >= values.len() {
            break;
        }
        let d: Vec<f64> = (0..s).map(|i| values[2 * i].abs().sqrt().max(f64::MIN_POSITIVE)).collect();
        let mut a: Vec<Vec<f64>> = (0..s)
            .map(|i| (0..s).map(|j| values[i + j] / (d[i] * d[j])).collect())
            .collect();
        for k in 0..s {
            let p = a[k][k];
            min = min.min(p);
            if p <= 0.0 {
                break;
            }
            for i in k + 1..s {
                let f = a[i][k] / p;
                for j in k + 1..s {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    min
}

/// Moments of N(0, sigma2) for k <= k_max.
pub fn normal_moments(sigma2: f64, k_max: usize) -> Vec<f64> {
    let mut v = vec![0.0; k_max + 1];
    v[0] = 1.0;
    for k in (2..=k_max).step_by(2) {
        v[k] = v[k - 2] * (k as f64 - 1.0) * sigma2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_hankel_is_psd() {
        let v = normal_moments(2.0, 8);
        assert_eq!(v[4], 12.0);
        assert!(hankel_min_pivot(&v, 4) > 0.0);
    }

    #[test]
    fn non_moment_sequence_detected() {
        assert!(hankel_min_pivot(&[1.0, 2.0, 1.0], 2) < 0.0);
    }
}
