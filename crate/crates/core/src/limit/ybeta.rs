//! Moments and sampling of the fixed point `Y = sum_j S_j^beta Y_j + 1`,
//! with `(S_1, ..., S_m)` uniform spacings and `Y_j` independent copies.

use rand::Rng;

use super::{LimitKind, LimitMomentSeq};
use crate::error::{Result, SstError};
use crate::indicial::factorial;
use crate::num::{mpf, Field, Mpf, Real};

fn check(m: usize, beta: f64) -> Result<()> {
    if m < 2 || m > crate::indicial::MAX_M {
        return Err(SstError::InvalidParameter(format!("branching factor m = {m} out of range")));
    }
    if !(beta > 0.5) || !beta.is_finite() {
        return Err(SstError::InvalidParameter(format!("need beta > 1/2, got {beta}")));
    }
    if beta == 1.0 {
        return Err(SstError::InvalidParameter("beta = 1 is a pole of the moment recurrence".into()));
    }
    Ok(())
}

/// `g_k = E Y^k` for `k <= k_max`.
///
/// Expanding the fixed point with Dirichlet moments
/// `E prod S_i^{a_i} = (m-1)! prod Gamma(a_i + 1) / Gamma(sum a_i + m)` gives
/// `g_k (1 - m! Gamma(k beta + 1) / Gamma(k beta + m))
///   = k! (m-1)! sum_s H_s / ((k-s)! Gamma(s beta + m))`,
/// where `H` is the m-fold convolution power of `h_j = g_j Gamma(j beta + 1) / j!`
/// with `h_k` set to zero.
pub fn y_beta_moments(m: usize, beta: f64, k_max: usize) -> Result<LimitMomentSeq> {
    check(m, beta)?;
    let bits = mpf::precision().max(128);
    let g = mpf::with_precision(bits, || y_beta_moments_mpf(m, beta, k_max));
    let values: Vec<f64> = g.iter().map(|v| v.to_f64()).collect();
    Ok(LimitMomentSeq {
        kind: LimitKind::Gk,
        params: vec![("m".into(), m as f64), ("beta".into(), beta)],
        constants: values.clone(),
        values,
        quadrature_error: None,
        residual: None,
    })
}

pub fn y_beta_moments_mpf(m: usize, beta: f64, k_max: usize) -> Vec<Mpf> {
    let b = Mpf::from_f64(beta);
    let fm1: Mpf = factorial(m - 1);
    let fm = fm1.clone() * Mpf::from_i64(m as i64);
    let mut fact = vec![Mpf::one()];
    for k in 1..=k_max {
        fact.push(fact[k - 1].clone() * Mpf::from_i64(k as i64));
    }
    let gam = |s: usize, shift: i64| (Mpf::from_i64(s as i64) * b.clone() + Mpf::from_i64(shift)).gamma();
    let mut g = vec![Mpf::one()];
    let mut h = vec![Mpf::one()];
    for k in 1..=k_max {
        let mut hk = h.clone();
        hk.push(Mpf::zero());
        let mut pw = vec![Mpf::zero(); k + 1];
        pw[0] = Mpf::one();
        for _ in 0..m {
            let mut next = vec![Mpf::zero(); k + 1];
            for (i, a) in pw.iter().enumerate() {
                if a.is_zero_value() {
                    continue;
                }
                for j in 0..=k - i {
                    next[i + j] += a.clone() * hk[j].clone();
                }
            }
            pw = next;
        }
        let mut acc = Mpf::zero();
        for (s, hs) in pw.iter().enumerate() {
            acc += hs.clone() / (fact[k - s].clone() * gam(s, m as i64));
        }
        let denom = Mpf::one() - fm.clone() * gam(k, 1) / gam(k, m as i64);
        let gk = fm1.clone() * fact[k].clone() * acc / denom;
        h.push(gk.clone() * gam(k, 1) / fact[k].clone());
        g.push(gk);
    }
    g
}

/// Truncated recursive sampler for `Y`.
///
/// Subtrees deeper than `depth`, or whose accumulated weight falls below
/// `threshold`, are replaced by the mean `g_1`. Replacement keeps the mean
/// exact and removes at most `variance_bias_bound()` of the variance.
#[derive(Clone, Debug)]
pub struct YBetaSampler {
    pub m: usize,
    pub beta: f64,
    pub depth: usize,
    pub threshold: f64,
    pub g1: f64,
    pub g2: f64,
}

pub const DEFAULT_THRESHOLD: f64 = 1e-6;

impl YBetaSampler {
    pub fn new(m: usize, beta: f64, depth: usize) -> Result<Self> {
        let g = y_beta_moments(m, beta, 2)?;
        Ok(YBetaSampler {
            m,
            beta,
            depth,
            threshold: DEFAULT_THRESHOLD,
            g1: g.values[1],
            g2: g.values[2],
        })
    }

    /// `E sum_j S_j^{p beta}`.
    fn contraction(&self, p: f64) -> f64 {
        let m = self.m as f64;
        let a = p * self.beta;
        let fm: f64 = factorial(self.m);
        (fm.ln() + <f64 as Real>::ln_gamma(&(a + 1.0)) - <f64 as Real>::ln_gamma(&(a + m))).exp()
    }

    /// Upper estimate of the variance removed by truncation and pruning.
    pub fn variance_bias_bound(&self) -> f64 {
        let var = (self.g2 - self.g1 * self.g1).abs();
        let rho = self.contraction(2.0);
        let kappa = self.contraction(1.0).max(1.0);
        (rho.powi(self.depth as i32) + self.threshold * kappa.powi(self.depth as i32)) * var
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![(1.0f64, self.depth)];
        let mut cuts = vec![0.0f64; self.m + 1];
        while let Some((w, d)) = stack.pop() {
            if d == 0 || w < self.threshold {
                total += w * self.g1;
                continue;
            }
            total += w;
            cuts[0] = 0.0;
            cuts[self.m] = 1.0;
            for c in cuts.iter_mut().take(self.m).skip(1) {
                *c = rng.random::<f64>();
            }
            cuts[1..self.m].sort_by(|a, b| a.total_cmp(b));
            for j in 0..self.m {
                let s = cuts[j + 1] - cuts[j];
                stack.push((w * s.powf(self.beta), d - 1));
            }
        }
        total
    }
}
