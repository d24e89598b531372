//! Property-based invariants across the exact engine, transfer, limit laws
//! and samplers.

use num_rational::BigRational;
use proptest::prelude::*;

use sst_core::exact::brute::catalan_bruteforce;
use sst_core::exact::{catalan_moments, rpm_mean, rpm_moments, Centering};
use sst_core::limit::{hankel_min_pivot, normal_moments, sigma2_alpha, y_beta_moments};
use sst_core::montecarlo::{worker_rng, CatalanSampler, RpmSampler};
use sst_core::num::{Field, Mpf};
use sst_core::toll::{TollFamily, TollSpec};
use sst_core::transfer::ett_extract;

fn explicit(m: usize, vals: Vec<f64>, init: Vec<f64>) -> TollSpec {
    TollSpec::with_initial(m, TollFamily::Explicit(vals), init).unwrap()
}

fn toll_strategy(n_max: usize) -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(move |m| {
        (
            Just(m),
            prop::collection::vec(0i32..20, n_max + 2 - m),
            prop::collection::vec(0i32..20, m - 1),
        )
            .prop_map(|(m, v, i)| (m, v.into_iter().map(f64::from).collect(), i.into_iter().map(f64::from).collect()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn float_recurrence_matches_rational((m, vals, init) in toll_strategy(30)) {
        let spec = explicit(m, vals, init);
        let q = rpm_moments::<BigRational>(&spec, 2, 30, Centering::None).unwrap();
        let f = rpm_moments::<f64>(&spec, 2, 30, Centering::None).unwrap();
        for k in 1..=2 {
            for n in 0..=30 {
                let exact = q.values[k][n].to_f64();
                prop_assert!((f.values[k][n] - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mean_is_linear_in_the_toll((m, vals, init) in toll_strategy(40), c in -3.0f64..3.0) {
        let spec = explicit(m, vals, init);
        let a = rpm_mean::<f64>(&spec, 40).unwrap();
        let b = rpm_mean::<f64>(&spec.scaled(c).unwrap(), 40).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((c * x - y).abs() <= 1e-11 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn variance_is_nonnegative_and_shift_invariant((m, vals, init) in toll_strategy(60), shift in -5.0f64..5.0) {
        let spec = explicit(m, vals, init);
        let raw = rpm_moments::<f64>(&spec, 2, 60, Centering::None).unwrap();
        let lin = rpm_moments::<f64>(&spec, 2, 60, Centering::Linear(shift)).unwrap();
        for n in 0..=60 {
            let v = raw.variance(n);
            prop_assert!(v >= -1e-9 * (1.0 + raw.values[2][n].abs()));
            prop_assert!((lin.variance(n) - v).abs() <= 1e-8 * (1.0 + raw.values[2][n].abs()));
        }
    }

    #[test]
    fn root_expansion_matches_recurrence((m, vals, init) in toll_strategy(120)) {
        let spec = explicit(m, vals, init);
        let e = ett_extract(&spec, 120).unwrap();
        let r = rpm_mean::<Mpf>(&spec, 120).unwrap();
        for (x, y) in e.iter().zip(&r) {
            let (x, y) = (x.to_f64(), y.to_f64());
            prop_assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn catalan_matches_enumeration(vals in prop::collection::vec(-5i32..5, 10), b0 in -3i32..3) {
        let spec = explicit(2, vals.into_iter().map(f64::from).collect(), vec![f64::from(b0)]);
        let table = catalan_moments::<f64>(&spec, 2, 9, Centering::None).unwrap();
        let brute = catalan_bruteforce::<f64>(&spec, 9, 2).unwrap();
        for k in 1..=2 {
            for n in 0..=9 {
                prop_assert!((table.values[k][n] - brute[k][n]).abs() <= 1e-10 * brute[k][n].abs().max(1.0));
            }
        }
    }

    #[test]
    fn rpm_splits_are_compositions(m in 2usize..8, extra in 0usize..40, seed in any::<u64>()) {
        let spec = TollSpec::new(m, TollFamily::Constant(1.0)).unwrap();
        let n = m - 1 + extra;
        let s = RpmSampler::new(&spec, n).unwrap();
        let mut rng = worker_rng(seed, 0);
        let mut parts = Vec::new();
        s.split(n, &mut rng, &mut parts);
        prop_assert_eq!(parts.len(), m);
        prop_assert_eq!(parts.iter().sum::<usize>(), extra);
    }

    #[test]
    fn node_count_is_deterministic(m in 2usize..6, n in 0usize..200, seed in any::<u64>()) {
        let spec = TollSpec::space_requirement(m);
        let exact = rpm_mean::<f64>(&spec, n).unwrap()[n];
        let s = RpmSampler::new(&spec, n).unwrap();
        let mut rng = worker_rng(seed, 3);
        let x = s.sample(&mut rng);
        if m == 2 {
            prop_assert_eq!(x, n as f64);
        } else {
            prop_assert!(x >= (n as f64 / (m - 1) as f64).ceil() - 1e-9 && x <= n as f64);
            prop_assert!(exact >= (n as f64 / (m - 1) as f64) - 1e-9);
        }
    }

    #[test]
    fn catalan_split_law_is_a_distribution(s in 1usize..300) {
        let spec = TollSpec::new(2, TollFamily::Power(1.0)).unwrap();
        let c = CatalanSampler::new(&spec, s).unwrap();
        let p = c.split_probabilities(s);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for l in 0..s {
            prop_assert!((p[l] - p[s - 1 - l]).abs() <= 1e-15);
        }
    }

    #[test]
    fn normal_moments_are_positive_definite(s2 in 0.01f64..10.0) {
        prop_assert!(hankel_min_pivot(&normal_moments(s2, 10), 5) > 0.0);
    }

    #[test]
    fn limit_variance_positive(alpha in 0.02f64..10.0) {
        prop_assume!((alpha - 0.5).abs() > 1e-9);
        prop_assert!(sigma2_alpha(alpha).unwrap() > 0.0);
    }

    #[test]
    fn fixed_point_mean_closed_form(m in 2usize..6, beta in 1.05f64..4.0) {
        let g = y_beta_moments(m, beta, 1).unwrap().values[1];
        let fm: f64 = (1..=m).map(|i| i as f64).product();
        let r: f64 = (1..m).map(|i| beta + 1.0 + (i - 1) as f64).product();
        let expect = -r / (fm - r);
        prop_assert!((g - expect).abs() <= 1e-10 * expect.abs());
    }
}

#[test]
fn sampler_mean_matches_exact_catalan_mean() {
    let spec = TollSpec::new(2, TollFamily::Log).unwrap();
    let n = 300;
    let exact = catalan_moments::<f64>(&spec, 2, n, Centering::None).unwrap();
    let x = sst_core::montecarlo::simulate(sst_core::exact::Model::Catalan, &spec, n, 40_000, 17, 4).unwrap();
    let rep = sst_core::montecarlo::empirical_report(
        &x,
        n,
        "catalan",
        Some(&spec),
        Some(17),
        &[("mean".into(), exact.values[1][n]), ("variance".into(), exact.variance(n))],
    )
    .unwrap();
    for t in &rep.targets {
        assert!(t.sigmas < 4.0, "{t:?}");
    }
}
