//! Monte Carlo samplers for additive functionals driven by subtree-size
//! splitting, with empirical moment reports.

use std::collections::HashMap;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SstError};
use crate::exact::Model;
use crate::num::special::catalan_scaled;
use crate::toll::TollSpec;

/// Random permutation model sampler: the `m - 1` root keys have uniformly
/// random ranks, so the subtree sizes are a uniform composition of
/// `size - (m - 1)` into `m` parts.
#[derive(Clone, Debug)]
pub struct RpmSampler {
    pub m: usize,
    pub n: usize,
    input: Vec<f64>,
}

impl RpmSampler {
    pub fn new(spec: &TollSpec, n: usize) -> Result<Self> {
        Ok(RpmSampler {
            m: spec.m,
            n,
            input: spec.input_sequence::<f64>(n)?,
        })
    }

    /// Sizes of the `m` subtrees of a root holding `size >= m - 1` keys.
    pub fn split<G: Rng + ?Sized>(&self, size: usize, rng: &mut G, out: &mut Vec<usize>) {
        out.clear();
        let m = self.m;
        if m == 2 {
            let r = rng.random_range(0..size);
            out.push(r);
            out.push(size - 1 - r);
            return;
        }
        let mut ranks = sample_indices(rng, size, m - 1).into_vec();
        ranks.sort_unstable();
        let mut prev = 0usize;
        for r in ranks {
            out.push(r - prev);
            prev = r + 1;
        }
        out.push(size - prev);
    }

    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![self.n];
        let mut parts = Vec::with_capacity(self.m);
        while let Some(s) = stack.pop() {
            total += self.input[s];
            if s + 1 < self.m {
                continue;
            }
            self.split(s, rng, &mut parts);
            stack.extend(parts.iter().copied().filter(|&p| p > 0 || self.input[0] != 0.0));
        }
        total
    }
}

/// Catalan model sampler: the root has rank `l` with probability
/// `beta_{l-1} beta_{s-l} / beta_s`. Per-size CDFs are built on demand and
/// memoized; ranks are drawn by bisection.
#[derive(Clone, Debug)]
pub struct CatalanSampler {
    pub n: usize,
    input: Vec<f64>,
    beta: Vec<f64>,
    cdfs: HashMap<usize, Vec<f64>>,
}

impl CatalanSampler {
    pub fn new(spec: &TollSpec, n: usize) -> Result<Self> {
        if spec.m != 2 {
            return Err(SstError::Unsupported("the Catalan model is binary (m = 2)".into()));
        }
        Ok(CatalanSampler {
            n,
            input: spec.input_sequence::<f64>(n)?,
            beta: catalan_scaled::<f64>(n),
            cdfs: HashMap::new(),
        })
    }

    /// Exact probabilities of root ranks `1..=s`.
    pub fn split_probabilities(&self, s: usize) -> Vec<f64> {
        (1..=s)
            .map(|l| self.beta[l - 1] * self.beta[s - l] / (4.0 * self.beta[s]))
            .collect()
    }

    /// Root rank in `1..=s`.
    pub fn root_rank<G: Rng + ?Sized>(&mut self, s: usize, rng: &mut G) -> usize {
        if s == 1 {
            return 1;
        }
        if !self.cdfs.contains_key(&s) {
            let mut acc = 0.0;
            let cdf: Vec<f64> = self
                .split_probabilities(s)
                .into_iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            self.cdfs.insert(s, cdf);
        }
        let cdf = &self.cdfs[&s];
        let u = rng.random::<f64>() * cdf[s - 1];
        cdf.partition_point(|&c| c <= u).min(s - 1) + 1
    }

    pub fn sample<G: Rng + ?Sized>(&mut self, rng: &mut G) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![self.n];
        while let Some(s) = stack.pop() {
            total += self.input[s];
            if s == 0 {
                continue;
            }
            let l = self.root_rank(s, rng);
            stack.push(l - 1);
            stack.push(s - l);
        }
        total
    }
}

/// Per-worker random stream: ChaCha8 seeded with `seed`, stream `worker`.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Splits `count` draws over `workers` independent streams and concatenates
/// the results in worker order, so the output depends only on
/// `(seed, workers)`.
pub fn parallel_draws<S, F>(count: usize, seed: u64, workers: usize, make: impl Fn() -> S + Sync, draw: F) -> Vec<f64>
where
    F: Fn(&mut S, &mut ChaCha8Rng) -> f64 + Sync,
{
    let workers = workers.max(1);
    let chunks: Vec<Vec<f64>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = count / workers + usize::from(w < count % workers);
            let mut rng = worker_rng(seed, w);
            let mut state = make();
            (0..share).map(|_| draw(&mut state, &mut rng)).collect()
        })
        .collect();
    chunks.concat()
}

pub fn simulate(model: Model, spec: &TollSpec, n: usize, samples: usize, seed: u64, workers: usize) -> Result<Vec<f64>> {
    match model {
        Model::Rpm { m } => {
            if m != spec.m {
                return Err(SstError::InvalidParameter("model arity differs from toll arity".into()));
            }
            let s = RpmSampler::new(spec, n)?;
            Ok(parallel_draws(samples, seed, workers, || (), |_, rng| s.sample(rng)))
        }
        Model::Catalan => {
            let s = CatalanSampler::new(spec, n)?;
            Ok(parallel_draws(samples, seed, workers, || s.clone(), |st, rng| st.sample(rng)))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetCheck {
    pub name: String,
    pub target: f64,
    pub estimate: f64,
    pub se: f64,
    /// `|estimate - target| / se`.
    pub sigmas: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub n: usize,
    pub model: String,
    pub spec: Option<TollSpec>,
    pub sample_count: usize,
    pub seed: Option<u64>,
    /// Raw moments `E X^k`, k = 1..=4.
    pub moments: Vec<Estimate>,
    pub mean: Estimate,
    pub variance: Estimate,
    pub skewness: f64,
    pub skewness_z: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_z: f64,
    pub batches: usize,
    pub targets: Vec<TargetCheck>,
}

struct Stats {
    mean: f64,
    var: f64,
    skew: f64,
    kurt: f64,
    raw: [f64; 4],
}

fn stats(x: &[f64]) -> Stats {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    let mut raw = [0.0; 4];
    for &v in x {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        let mut p = 1.0;
        for r in raw.iter_mut() {
            p *= v;
            *r += p;
        }
    }
    for r in raw.iter_mut() {
        *r /= n;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let (skew, kurt) = if m2 > 0.0 { (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0) } else { (0.0, 0.0) };
    Stats {
        mean,
        var: if x.len() > 1 { m2 * n / (n - 1.0) } else { 0.0 },
        skew,
        kurt,
        raw,
    }
}

fn batch_se(values: &[f64]) -> f64 {
    let b = values.len() as f64;
    if b < 2.0 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / b;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

pub const DEFAULT_BATCHES: usize = 50;

/// Moments with batch-means standard errors, skewness and kurtosis z-scores,
/// and optional sigma distances to targets named `mean`, `variance` or `m1`..`m4`.
pub fn empirical_report(
    samples: &[f64],
    n: usize,
    model: &str,
    spec: Option<&TollSpec>,
    seed: Option<u64>,
    targets: &[(String, f64)],
) -> Result<SampleReport> {
    if samples.len() < 4 {
        return Err(SstError::InvalidParameter("need at least 4 samples".into()));
    }
    let all = stats(samples);
    let batches = DEFAULT_BATCHES.min(samples.len() / 2);
    let size = samples.len() / batches;
    let per: Vec<Stats> = (0..batches).map(|b| stats(&samples[b * size..(b + 1) * size])).collect();
    let col = |f: &dyn Fn(&Stats) -> f64| batch_se(&per.iter().map(f).collect::<Vec<_>>());
    let moments: Vec<Estimate> = (0..4)
        .map(|k| Estimate {
            value: all.raw[k],
            se: col(&|s: &Stats| s.raw[k]),
        })
        .collect();
    let mean = Estimate {
        value: all.mean,
        se: col(&|s: &Stats| s.mean),
    };
    let variance = Estimate {
        value: all.var,
        se: col(&|s: &Stats| s.var),
    };
    let count = samples.len() as f64;
    let mut checks = Vec::new();
    for (name, target) in targets {
        let est = match name.as_str() {
            "mean" => &mean,
            "variance" => &variance,
            "m1" => &moments[0],
            "m2" => &moments[1],
            "m3" => &moments[2],
            "m4" => &moments[3],
            other => return Err(SstError::InvalidParameter(format!("unknown target '{other}'"))),
        };
        let diff = (est.value - target).abs();
        checks.push(TargetCheck {
            name: name.clone(),
            target: *target,
            estimate: est.value,
            se: est.se,
            sigmas: if est.se > 0.0 { diff / est.se } else if diff == 0.0 { 0.0 } else { f64::INFINITY },
        });
    }
    Ok(SampleReport {
        n,
        model: model.to_string(),
        spec: spec.cloned(),
        sample_count: samples.len(),
        seed,
        moments,
        mean,
        variance,
        skewness: all.skew,
        skewness_z: all.skew / (6.0 / count).sqrt(),
        excess_kurtosis: all.kurt,
        kurtosis_z: all.kurt / (24.0 / count).sqrt(),
        batches,
        targets: checks,
    })
}

/// Pearson chi-square statistic and its upper-tail p-value.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (o, p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        stat += (*o as f64 - e).powi(2) / e;
    }
    let df = (observed.len() - 1).max(1) as f64;
    let p = 1.0 - ChiSquared::new(df).expect("positive df").cdf(stat);
    (stat, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toll::TollFamily;

    #[test]
    fn small_sizes_are_deterministic() {
        let spec = TollSpec::with_initial(4, TollFamily::Constant(1.0), vec![0.0, 1.5, 2.5]).unwrap();
        let mut rng = worker_rng(1, 0);
        for n in 0..3 {
            let s = RpmSampler::new(&spec, n).unwrap();
            assert_eq!(s.sample(&mut rng), spec.initial[n]);
        }
        let c = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let mut cs = CatalanSampler::new(&c, 1).unwrap();
        assert_eq!(cs.sample(&mut rng), 1.0);
    }

    #[test]
    fn degenerate_toll_is_exact() {
        for m in 2..=5 {
            let spec = TollSpec::degenerate(m, 2.0);
            let s = RpmSampler::new(&spec, 300).unwrap();
            let mut rng = worker_rng(3, 1);
            for _ in 0..50 {
                assert!((s.sample(&mut rng) - 600.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn composition_marginal_chi_square() {
        let (m, n) = (3usize, 10usize);
        let spec = TollSpec::new(m, TollFamily::Constant(1.0)).unwrap();
        let s = RpmSampler::new(&spec, n).unwrap();
        let mut rng = worker_rng(11, 0);
        let mut counts = vec![0u64; n - m + 2];
        let mut parts = Vec::new();
        for _ in 0..1_000_000 {
            s.split(n, &mut rng, &mut parts);
            assert_eq!(parts.iter().sum::<usize>(), n - (m - 1));
            counts[parts[0]] += 1;
        }
        let total = (n * (n - 1) / 2) as f64;
        let probs: Vec<f64> = (0..counts.len()).map(|j| (n - 1 - j) as f64 / total).collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (_, p) = chi_square(&counts, &probs);
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn catalan_split_law() {
        let spec = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let mut s = CatalanSampler::new(&spec, 6).unwrap();
        let p3 = s.split_probabilities(3);
        for (a, b) in p3.iter().zip([0.4, 0.2, 0.4]) {
            assert!((a - b).abs() < 1e-15);
        }
        let probs = s.split_probabilities(6);
        let mut counts = vec![0u64; 6];
        let mut rng = worker_rng(5, 0);
        for _ in 0..200_000 {
            counts[s.root_rank(6, &mut rng) - 1] += 1;
        }
        let (_, p) = chi_square(&counts, &probs);
        assert!(p > 0.001, "p = {p}");
    }

    #[test]
    fn constant_samples_report() {
        let r = empirical_report(&[2.0; 100], 1, "test", None, None, &[("mean".into(), 2.0)]).unwrap();
        assert_eq!(r.variance.value, 0.0);
        assert_eq!(r.variance.se, 0.0);
        assert_eq!(r.targets[0].sigmas, 0.0);
    }

    #[test]
    fn normal_synthetic_skewness() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = worker_rng(9, 0);
        let x: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = empirical_report(&x, 0, "normal", None, Some(9), &[]).unwrap();
        assert!(r.skewness_z.abs() < 4.0 && r.kurtosis_z.abs() < 4.0, "{} {}", r.skewness_z, r.kurtosis_z);
        assert!((r.variance.value - 1.0).abs() < 5.0 * r.variance.se);
    }

    #[test]
    fn deterministic_given_seed_and_workers() {
        let spec = TollSpec::new(2, TollFamily::Log).unwrap();
        let a = simulate(Model::Catalan, &spec, 50, 1000, 42, 3).unwrap();
        let b = simulate(Model::Catalan, &spec, 50, 1000, 42, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate(Model::Rpm { m: 2 }, &spec, 50, 1000, 42, 3).unwrap();
        let d = simulate(Model::Rpm { m: 2 }, &spec, 50, 1000, 42, 3).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.len(), 1000);
    }

    #[test]
    fn rpm_mean_closure() {
        let spec = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let x = simulate(Model::Rpm { m: 2 }, &spec, 200, 20_000, 1, 4).unwrap();
        let exact: Vec<f64> = crate::exact::rpm_mean(&spec, 200).unwrap();
        let r = empirical_report(&x, 200, "rpm", Some(&spec), Some(1), &[("mean".into(), exact[200])]).unwrap();
        assert!(r.targets[0].sigmas < 4.0, "{:?}", r.targets[0]);
    }
}
