//! Exact and asymptotic transfer from tolls to mean values under the
//! random permutation model.
//!
//! [`ett_extract`] reproduces `a_n` from the roots of the indicial
//! polynomial; [`att_predict`] returns closed-form leading terms for the
//! supported toll classes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SstError};
use crate::indicial::{ett_coefficients, factorial, psi_roots, IndicialData};
use crate::num::{binomial, harmonic, mpf, rising, Cx, Field, Mpf, Real};
use crate::num::sum::series_with_tail;
use crate::toll::{TollFamily, TollScalar, TollSpec};

/// Largest m for which the small-toll refinement is offered.
pub const ATT_SMALL_MAX_M: usize = 26;

/// Default truncation for toll-weighted sums.
pub const DEFAULT_TERMS: u64 = 20_000;

struct RootTrace<R> {
    values: Vec<Cx<R>>,
    weight: R,
}

/// Homogeneous and particular contributions of one root, for n in 0..len.
fn root_trace<R: Real>(l: &Cx<R>, dp: &Cx<R>, c: &Cx<R>, bhat: &[R], mfact: &R) -> Vec<Cx<R>> {
    let inv = dp.recip().scale(mfact);
    let mut h = Cx::<R>::one();
    let mut w = Cx::<R>::zero();
    let mut out = Vec::with_capacity(bhat.len());
    out.push(c.clone());
    for n in 1..bhat.len() {
        let nr = R::from_i64(n as i64);
        h = h * l.add_real(&R::from_i64(n as i64 - 1)).scale(&(R::one() / nr.clone()));
        let factor = l.add_real(&(nr.clone() - R::one())).scale(&(R::one() / nr.clone()));
        w = w * factor + Cx::real(bhat[n - 1].clone() / nr);
        out.push(h.clone() * c.clone() + w.clone() * inv.clone());
    }
    out
}

fn traces<R: Real>(data: &IndicialData<R>, input: &[R], paired: bool) -> Result<Vec<RootTrace<R>>> {
    let m = data.m;
    if input.len() < m - 1 {
        return Err(SstError::InvalidParameter(format!("need at least {} input values", m - 1)));
    }
    let c = ett_coefficients(data, &input[..m - 1])?;
    let bhat: Vec<R> = input
        .iter()
        .enumerate()
        .map(|(n, b)| if n + 1 < m { R::zero() } else { b.clone() })
        .collect();
    let mfact = factorial::<R>(m);
    let idx: Vec<usize> = (0..m - 1)
        .filter(|&j| !paired || data.roots[j].im >= R::zero())
        .collect();
    let prec = mpf::precision();
    Ok(idx
        .par_iter()
        .map(|&j| {
            mpf::with_precision(prec, || {
                let l = &data.roots[j];
                let weight = if paired && !l.im.is_zero_value() {
                    R::from_i64(2)
                } else {
                    R::one()
                };
                RootTrace {
                    values: root_trace(l, &data.psi_prime[j], &c[j], &bhat, &mfact),
                    weight,
                }
            })
        })
        .collect())
}

/// `a_0..a_{len-1}` from the input sequence (initial values then tolls).
pub fn ett_extract_from_input<R: Real>(data: &IndicialData<R>, input: &[R]) -> Result<Vec<R>> {
    let m = data.m;
    let tr = traces(data, input, true)?;
    Ok((0..input.len())
        .map(|n| {
            let mut acc = if n + 1 < m { R::zero() } else { input[n].clone() };
            for t in &tr {
                acc += t.values[n].re.clone() * t.weight.clone();
            }
            acc
        })
        .collect())
}

/// Exact means `a_0..=a_{n_max}` via the roots of the indicial polynomial.
pub fn ett_extract(spec: &TollSpec, n_max: usize) -> Result<Vec<Mpf>> {
    let data = psi_roots(spec.m)?;
    ett_extract_from_input(&data, &spec.input_sequence::<Mpf>(n_max)?)
}

/// Largest ratio |Im| / |Re| of the unpaired sum over all roots.
pub fn ett_imaginary_residual(spec: &TollSpec, n_max: usize) -> Result<f64> {
    let data = psi_roots(spec.m)?;
    let input = spec.input_sequence::<Mpf>(n_max)?;
    let tr = traces(&data, &input, false)?;
    let mut worst = 0.0f64;
    for n in 0..input.len() {
        let mut s = Cx::<Mpf>::zero();
        let mut scale = 0.0f64;
        for t in &tr {
            scale += t.values[n].abs().to_f64();
            s = s + t.values[n].clone();
        }
        if scale > 0.0 {
            worst = worst.max(s.im.abs().to_f64() / scale);
        }
    }
    Ok(worst)
}

/// `sum_j b_j / ((j+1)(j+2))` over the whole input sequence with a tail estimate.
pub fn weighted_toll_sum<R: Real + TollScalar>(spec: &TollSpec, n_terms: u64) -> Result<(R, f64)> {
    let n_terms = n_terms.max(spec.m as u64 + 8);
    let input = spec.input_sequence::<R>(n_terms as usize)?;
    spec.continuation(&R::from_i64(n_terms as i64))?;
    let weight = |j: u64| R::from_i64(((j + 1) * (j + 2)) as i64);
    let (v, _, bound) = series_with_tail(
        |j| input[j as usize].clone() / weight(j),
        |x: &R| {
            let t = spec.continuation(x).unwrap_or_else(|_| R::zero());
            t / ((x.clone() + R::one()) * (x.clone() + R::from_i64(2)))
        },
        0,
        n_terms,
    );
    Ok((v, bound))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub power: f64,
    pub log_power: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticPrediction {
    /// a_n ~ sum of coefficient * n^power * (ln n)^log_power, fastest first.
    pub terms: Vec<Term>,
    pub regime: String,
    pub constants: Vec<(String, f64)>,
    /// Truncation bound on the summed constants, when one was computed.
    pub bound: Option<f64>,
}

impl AsymptoticPrediction {
    pub fn evaluate(&self, n: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * n.powf(t.power) * n.ln().powi(t.log_power as i32))
            .sum()
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn sorted(mut self) -> Self {
        self.terms.retain(|t| t.coefficient != 0.0);
        self.terms.sort_by(|a, b| {
            b.power
                .partial_cmp(&a.power)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.log_power.cmp(&a.log_power))
        });
        self
    }
}

/// Caller-asserted toll classes with closed-form leading asymptotics.
#[derive(Clone, Debug)]
pub enum TollClass {
    /// b_n = o(sqrt n): a_n ~ K1/(H_m - 1) n.
    Small(TollSpec),
    /// b_n = k2 (n+1) + h_n with h given by `remainder`.
    LinearPlusSmall { k2: f64, remainder: TollSpec },
    /// b_n ~ k4 n^v (ln n)^log_power with v > 1.
    Power { m: usize, k4: f64, v: f64, log_power: u32 },
    /// Toll n^beta with beta < 1 and alpha < 1 + beta.
    SublinearPower(TollSpec),
    /// b_n ~ n (ln n)^q.
    LinearLog { m: usize, q: u32 },
}

fn harmonic_excess(m: usize) -> (f64, f64) {
    let h: f64 = harmonic(m as u64, 1);
    let h2: f64 = harmonic(m as u64, 2);
    (h - 1.0, h2 - 1.0)
}

/// 1 / (1 - m! Gamma(v+1) / Gamma(v+m)).
pub fn power_factor(m: usize, v: f64) -> f64 {
    let r: f64 = rising(&(v + 1.0), m as u64 - 1);
    let mf: f64 = factorial(m);
    1.0 / (1.0 - mf / r)
}

fn k1_of(spec: &TollSpec) -> Result<(f64, f64)> {
    let (v, bound) = weighted_toll_sum::<Mpf>(spec, DEFAULT_TERMS)?;
    Ok((v.to_f64(), bound))
}

pub fn att_predict(class: &TollClass) -> Result<AsymptoticPrediction> {
    let refuse = |msg: String| Err(SstError::Classification(msg));
    let p = match class {
        TollClass::Small(spec) => {
            if spec.m > ATT_SMALL_MAX_M {
                return refuse(format!(
                    "small-toll refinement requires m <= {ATT_SMALL_MAX_M}, got {}",
                    spec.m
                ));
            }
            if let TollFamily::Power(a) = spec.family {
                if a >= 0.5 {
                    return refuse(format!("toll n^{a} is not o(sqrt n); use the sublinear-power class"));
                }
            }
            let (k1, bound) = k1_of(spec)?;
            let (h1, _) = harmonic_excess(spec.m);
            AsymptoticPrediction {
                terms: vec![Term { coefficient: k1 / h1, power: 1.0, log_power: 0 }],
                regime: "small".into(),
                constants: vec![("K1".into(), k1), ("mu".into(), k1 / h1)],
                bound: Some(bound),
            }
        }
        TollClass::LinearPlusSmall { k2, remainder } => {
            if remainder.m > ATT_SMALL_MAX_M {
                return refuse(format!("linear-toll refinement requires m <= {ATT_SMALL_MAX_M}"));
            }
            let (hsum, bound) = k1_of(remainder)?;
            let (h1, h2) = harmonic_excess(remainder.m);
            let k3 = hsum + k2 * (h1 / 2.0 - 1.0 + h2 / (2.0 * h1));
            let gamma = <f64 as Real>::euler_gamma();
            AsymptoticPrediction {
                terms: vec![
                    Term { coefficient: k2 / h1, power: 1.0, log_power: 1 },
                    Term { coefficient: (k2 * gamma + k3) / h1, power: 1.0, log_power: 0 },
                ],
                regime: "linear".into(),
                constants: vec![("K2".into(), *k2), ("K3".into(), k3)],
                bound: Some(bound),
            }
        }
        TollClass::Power { m, k4, v, log_power } => {
            if !(*v > 1.0) {
                return refuse(format!("power class needs v > 1, got {v}"));
            }
            let f = power_factor(*m, *v);
            AsymptoticPrediction {
                terms: vec![Term { coefficient: k4 * f, power: *v, log_power: *log_power }],
                regime: "power".into(),
                constants: vec![("K4".into(), *k4), ("factor".into(), f)],
                bound: None,
            }
        }
        TollClass::SublinearPower(spec) => {
            let TollFamily::Power(beta) = spec.family else {
                return refuse("sublinear-power class needs a power toll".into());
            };
            if beta >= 1.0 {
                return refuse(format!("sublinear-power class needs beta < 1, got {beta}"));
            }
            if spec.m > 2 {
                let alpha = crate::indicial::alpha_of(spec.m)?;
                if alpha >= 1.0 + beta {
                    return refuse(format!("alpha = {alpha} is not below 1 + beta = {}", 1.0 + beta));
                }
            }
            let (k1, bound) = k1_of(spec)?;
            let (h1, _) = harmonic_excess(spec.m);
            let f = power_factor(spec.m, beta);
            AsymptoticPrediction {
                terms: vec![
                    Term { coefficient: k1 / h1, power: 1.0, log_power: 0 },
                    Term { coefficient: f, power: beta, log_power: 0 },
                ],
                regime: "sublinear-power".into(),
                constants: vec![("K1".into(), k1), ("factor".into(), f)],
                bound: Some(bound),
            }
        }
        TollClass::LinearLog { m, q } => {
            let (h1, _) = harmonic_excess(*m);
            let c = 1.0 / ((*q as f64 + 1.0) * h1);
            AsymptoticPrediction {
                terms: vec![Term { coefficient: c, power: 1.0, log_power: q + 1 }],
                regime: "linear-log".into(),
                constants: vec![],
                bound: None,
            }
        }
    };
    Ok(p.sorted())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseEstimate {
    /// Extrapolated lim a_n / n.
    pub k: f64,
    /// Recovered input b_n.
    pub recovered: Vec<f64>,
    /// Partial sums of b_j / ((j+1)(j+2)) divided by H_m - 1.
    pub partial_sums: Vec<f64>,
}

/// Inverts the mean recurrence and estimates the linear growth constant.
pub fn converse_estimate(m: usize, a: &[f64]) -> Result<ConverseEstimate> {
    if m < 2 {
        return Err(SstError::InvalidParameter("m must be >= 2".into()));
    }
    if a.len() < 4 {
        return Err(SstError::InvalidParameter("need at least four values".into()));
    }
    let mut s = vec![0.0f64; m - 1];
    let mut recovered = Vec::with_capacity(a.len());
    for (n, &an) in a.iter().enumerate() {
        let b = if n + 1 < m {
            an
        } else {
            an - m as f64 * s[m - 2] / binomial::<f64>(n as u64, m as u64 - 1)
        };
        for r in (1..m - 1).rev() {
            s[r] += s[r - 1];
        }
        s[0] += an;
        recovered.push(b);
    }
    let (h1, _) = harmonic_excess(m);
    let mut acc = crate::num::sum::Neumaier::<f64>::new();
    let partial_sums = recovered
        .iter()
        .enumerate()
        .map(|(j, b)| {
            acc.add(b / ((j + 1) as f64 * (j + 2) as f64));
            acc.value() / h1
        })
        .collect();
    let n = a.len() - 1;
    let half = n / 2;
    let r = |i: usize| a[i] / i as f64;
    let k = (n as f64 * r(n) - half as f64 * r(half)) / (n - half) as f64;
    Ok(ConverseEstimate { k, recovered, partial_sums })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rpm_mean;

    fn max_rel(a: &[Mpf], b: &[Mpf]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = (x.clone() - y.clone()).abs().to_f64();
                let s = y.abs().to_f64().max(1e-300);
                if d == 0.0 {
                    0.0
                } else {
                    d / s
                }
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn ett_matches_recurrence_log_toll() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let e = ett_extract(&spec, 500).unwrap();
        let r = rpm_mean::<Mpf>(&spec, 500).unwrap();
        assert!(max_rel(&e, &r) < 1e-25);
    }

    #[test]
    fn ett_matches_recurrence_linear_toll() {
        let vals: Vec<f64> = (2..=300).map(|n| n as f64 + 1.0).collect();
        let spec = TollSpec::with_initial(3, TollFamily::Explicit(vals), vec![1.0, 2.0]).unwrap();
        let e = ett_extract(&spec, 300).unwrap();
        let r = rpm_mean::<Mpf>(&spec, 300).unwrap();
        assert!(max_rel(&e, &r) < 1e-20);
    }

    #[test]
    fn ett_zero_input() {
        let spec = TollSpec::new(5, TollFamily::Constant(0.0)).unwrap();
        let e = ett_extract(&spec, 50).unwrap();
        assert!(e.iter().all(|x| x.to_f64() == 0.0));
    }

    #[test]
    fn ett_conjugate_parts_cancel() {
        let spec = TollSpec::with_initial(6, TollFamily::Log, vec![0.5, 1.0, 0.0, 2.0, 1.0]).unwrap();
        assert!(ett_imaginary_residual(&spec, 200).unwrap() < 1e-9);
    }

    #[test]
    fn space_requirement_constant() {
        for m in 2..=6 {
            let p = att_predict(&TollClass::Small(TollSpec::space_requirement(m))).unwrap();
            assert!((p.constant("K1").unwrap() - 0.5).abs() < 1e-12, "m={m}");
            let (h1, _) = harmonic_excess(m);
            assert!((p.terms[0].coefficient - 0.5 / h1).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_generating_function_factor() {
        assert!((power_factor(2, 2.0) - 3.0).abs() < 1e-14);
        let p = att_predict(&TollClass::Power { m: 2, k4: 1.0, v: 2.0, log_power: 0 }).unwrap();
        assert!((p.terms[0].coefficient - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_toll_prediction_is_zero() {
        let spec = TollSpec::new(3, TollFamily::Constant(0.0)).unwrap();
        let p = att_predict(&TollClass::Small(spec)).unwrap();
        assert!(p.terms.is_empty());
        assert_eq!(p.evaluate(1000.0), 0.0);
    }

    #[test]
    fn linear_class_tracks_recurrence() {
        let n = 100_000usize;
        let input: Vec<f64> = (0..=n).map(|j| j as f64 + 1.0).collect();
        for m in [2usize, 3] {
            let a = crate::exact::rpm_mean_from_input(m, &input);
            let rem = TollSpec::new(m, TollFamily::Constant(0.0)).unwrap();
            let p = att_predict(&TollClass::LinearPlusSmall { k2: 1.0, remainder: rem }).unwrap();
            let rel = (a[n] - p.evaluate(n as f64)).abs() / n as f64;
            assert!(rel < 1e-3, "m={m} rel={rel}");
        }
    }

    #[test]
    fn sublinear_power_sign() {
        let spec = TollSpec::new(2, TollFamily::Power(0.5)).unwrap();
        let p = att_predict(&TollClass::SublinearPower(spec.clone())).unwrap();
        assert!((p.terms[1].coefficient + 3.0).abs() < 1e-12);
        let n = 100_000usize;
        let a = rpm_mean::<f64>(&spec, n).unwrap();
        let second = (a[n] - p.terms[0].coefficient * n as f64) / (n as f64).sqrt();
        assert!((second + 3.0).abs() < 0.05, "{second}");
    }

    #[test]
    fn refuses_large_m_and_bad_classes() {
        let big = TollSpec::space_requirement(27);
        assert!(matches!(att_predict(&TollClass::Small(big)), Err(SstError::Classification(_))));
        let fast = TollSpec::new(2, TollFamily::Power(0.7)).unwrap();
        assert!(att_predict(&TollClass::Small(fast)).is_err());
        assert!(att_predict(&TollClass::Power { m: 2, k4: 1.0, v: 0.5, log_power: 0 }).is_err());
    }

    #[test]
    fn converse_recovers_space_requirement() {
        let a: Vec<f64> = (0..=2000).map(|n| n as f64).collect();
        let c = converse_estimate(2, &a).unwrap();
        assert!((c.k - 1.0).abs() < 1e-12);
        assert!((c.recovered[5] - 1.0).abs() < 1e-12);
        assert!((c.partial_sums.last().unwrap() - 1.0).abs() < 1e-3);
        let z = converse_estimate(3, &vec![0.0; 100]).unwrap();
        assert_eq!(z.k, 0.0);
    }

    #[test]
    fn converse_log_toll_near_prediction() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let a = rpm_mean::<f64>(&spec, 100_000).unwrap();
        let c = converse_estimate(2, &a).unwrap();
        let p = att_predict(&TollClass::Small(spec)).unwrap();
        let mu = p.constant("mu").unwrap();
        assert!((c.k - mu).abs() < 0.01 * mu, "{} {}", c.k, mu);
    }
}
