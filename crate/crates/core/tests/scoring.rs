use proptest::prelude::*;
use runtime_utility::quality::{expected_quality_p, QualitySample};
use runtime_utility::scoring::{
    classical_analytic, classical_scores, hoeffding_half_width, rank, score_analytic, score_empirical, score_quality,
    RuntimeSample, DEFAULT_QUAD_TOL,
};
use runtime_utility::{
    CaptimeDistribution, Error, ExtendedTime, Family, QualityUtilityFunction, QualityWeight, RuntimeDistribution,
    UtilityFunction,
};

fn secs(t: f64) -> ExtendedTime {
    ExtendedTime::secs(t)
}

fn pareto() -> UtilityFunction {
    UtilityFunction::new(Family::Pareto { kappa0: 1.0, alpha: 1.0 }).unwrap()
}

fn families() -> Vec<Family> {
    vec![
        Family::Step,
        Family::LinearMoney {
            revenue: 10.0,
            cost_fixed: 0.0,
            cost_rate: 1.0,
        },
        Family::Uniform { kappa0: 10.0 },
        Family::Exponential { kappa0: 2.0 },
        Family::Pareto { kappa0: 1.0, alpha: 1.0 },
        Family::LogLaplace { kappa0: 2.0, alpha: 1.5 },
        Family::GeneralizedLogLaplace {
            kappa0: 1.0,
            alpha: 2.0,
            beta: 1.0,
        },
        Family::LogNormal { kappa0: 3.0, sigma: 0.8 },
        Family::PiecewiseLinear {
            kappa0: 10.0,
            kappa1: 2.0,
            delta: 0.3,
        },
    ]
}

fn atoms() -> impl Strategy<Value = Vec<(ExtendedTime, f64)>> {
    prop::collection::vec((prop_oneof![9 => (0.0f64..30.0).prop_map(Some), 1 => Just(None)], 0.01f64..1.0), 1..8)
        .prop_map(|v| {
            let total: f64 = v.iter().map(|x| x.1).sum();
            v.into_iter()
                .map(|(t, w)| (t.map_or(ExtendedTime::INFINITY, secs), w / total))
                .collect()
        })
}

#[test]
fn heavy_tail_pair() {
    let u = pareto();
    let k = CaptimeDistribution::Dirac {
        kappa: ExtendedTime::INFINITY,
    };
    let a = RuntimeDistribution::discrete(vec![(secs(1.0), 0.99), (secs(864000.0), 0.01)]).unwrap();
    let b = RuntimeDistribution::dirac(864000.0).unwrap();
    let sa = score_analytic(&a, &k, &u, DEFAULT_QUAD_TOL).unwrap();
    let sb = score_analytic(&b, &k, &u, DEFAULT_QUAD_TOL).unwrap();
    assert!(sa.score >= 0.99);
    assert!(sb.score <= 1.0 / 864000.0 + 1e-18);
    let groups = rank([("B", sb), ("A", sa)]).unwrap();
    assert_eq!(groups[0].members[0].0, "A");
    assert_eq!(groups.len(), 2);

    let one = score_analytic(&RuntimeDistribution::dirac(1.0).unwrap(), &k, &u, DEFAULT_QUAD_TOL).unwrap();
    assert!((one.score - 1.0).abs() < 1e-12);
    for f in families() {
        let u = UtilityFunction::new(f).unwrap();
        let never = RuntimeDistribution::dirac(f64::INFINITY).unwrap();
        let s = score_analytic(&never, &CaptimeDistribution::dirac(5.0).unwrap(), &u, DEFAULT_QUAD_TOL).unwrap();
        assert_eq!(s.score, 0.0);
    }
}

#[test]
fn continuous_runtime_against_closed_form() {
    // E[exp(-t/2)] for t ~ Exp(1) is 2/3
    let u = UtilityFunction::new(Family::Exponential { kappa0: 2.0 }).unwrap();
    let a = RuntimeDistribution::Exponential { rate: 1.0 };
    let k = CaptimeDistribution::Dirac {
        kappa: ExtendedTime::INFINITY,
    };
    let s = score_analytic(&a, &k, &u, DEFAULT_QUAD_TOL).unwrap();
    assert!((s.score - 2.0 / 3.0).abs() <= DEFAULT_QUAD_TOL);
    // step utility at κ = 3: P(t < 3) = 1 - e^-3
    let step = UtilityFunction::new(Family::Step).unwrap();
    let s = score_analytic(&a, &CaptimeDistribution::dirac(3.0).unwrap(), &step, DEFAULT_QUAD_TOL).unwrap();
    assert!((s.score - (1.0 - (-3.0f64).exp())).abs() <= DEFAULT_QUAD_TOL);
}

#[test]
fn uniform_samples_and_hoeffding() {
    let u = UtilityFunction::new(Family::Uniform { kappa0: 10.0 }).unwrap();
    let samples = vec![RuntimeSample::capped(secs(5.0), secs(20.0)); 100];
    let r = score_empirical(&samples, &u, 0.95).unwrap();
    assert_eq!(r.score, 0.5);
    assert!((hoeffding_half_width(666, 0.95) - (40f64.ln() / 1332.0).sqrt()).abs() < 1e-15);
    assert!((hoeffding_half_width(666, 0.95) - 0.0526).abs() < 5e-5);
    assert!(matches!(score_empirical(&[], &u, 0.95), Err(Error::EmptyInput)));
}

#[test]
fn st_petersburg_classical() {
    let a = RuntimeDistribution::StPetersburg;
    let c = classical_analytic(&a, secs(64.0), 2.0, DEFAULT_QUAD_TOL).unwrap();
    assert!((c.capped_mean - 7.0).abs() < 1e-12);
    assert!((c.par - 9.0).abs() < 1e-12);
    let done = classical_scores(&[secs(1.0); 5], secs(10.0), 10.0).unwrap();
    assert_eq!(
        (done.mean, done.capped_mean, done.par, done.fraction_solved),
        (1.0, 1.0, 1.0, 1.0)
    );
}

#[test]
fn identical_algorithms_tie() {
    let u = UtilityFunction::new(Family::Exponential { kappa0: 1.0 }).unwrap();
    let k = CaptimeDistribution::dirac(5.0).unwrap();
    let a = RuntimeDistribution::LogNormal { mu: 0.0, sigma: 1.0 };
    let r = score_analytic(&a, &k, &u, DEFAULT_QUAD_TOL).unwrap();
    let groups = rank([("x", r.clone()), ("y", r.clone())]).unwrap();
    assert_eq!(groups.len(), 1);
    let other = score_analytic(&a, &k, &pareto(), DEFAULT_QUAD_TOL).unwrap();
    assert!(matches!(rank([("x", r), ("z", other)]), Err(Error::IncomparableReports(_))));
}

fn quality_utility() -> QualityUtilityFunction {
    QualityUtilityFunction::new(
        UtilityFunction::new(Family::Exponential { kappa0: 2.0 }).unwrap(),
        0.0,
        10.0,
        QualityWeight::Power { exponent: 2.0 },
    )
    .unwrap()
}

#[test]
fn quality_scores() {
    let uq = quality_utility();
    let k = secs(5.0);
    let runtimes = [0.5, 1.0, 4.0, 2.0];
    let best: Vec<_> = runtimes.iter().map(|&t| QualitySample::capped(secs(t), 10.0, k, 0.0)).collect();
    let plain: Vec<_> = runtimes.iter().map(|&t| RuntimeSample::capped(secs(t), k)).collect();
    let s = score_quality(&best, &uq, 0.95).unwrap();
    let base = score_empirical(&plain, &uq.base, 0.95).unwrap();
    assert!((s.score - base.score).abs() < 1e-15);
    let late = [QualitySample::capped(secs(7.0), 10.0, k, 0.0)];
    assert_eq!(score_quality(&late, &uq, 0.95).unwrap().score, 0.0);
    let worst: Vec<_> = runtimes.iter().map(|&t| QualitySample::capped(secs(t), 0.0, k, 0.0)).collect();
    assert_eq!(score_quality(&worst, &uq, 0.95).unwrap().score, 0.0);

    // brute force over (t, q, probability) atoms against two captimes
    let atoms = vec![(secs(0.5), 4.0, 0.25), (secs(3.0), 10.0, 0.5), (secs(9.0), 7.0, 0.25)];
    let kd = CaptimeDistribution::Discrete {
        points: vec![(secs(2.0), 0.5), (secs(10.0), 0.5)],
    };
    let mut oracle = 0.0;
    for &(t, q, pt) in &atoms {
        for (kappa, pk) in [(2.0, 0.5), (10.0, 0.5)] {
            if t.seconds() < kappa {
                oracle += pt * pk * (q / 10.0f64).powi(2) * (-t.seconds() / 2.0).exp();
            }
        }
    }
    let got = expected_quality_p(&atoms, &kd, &uq).unwrap();
    assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
}

proptest! {
    #[test]
    fn analytic_matches_finite_sum(a in atoms(), kappa in 0.1f64..40.0, fi in 0usize..9) {
        let u = UtilityFunction::new(families()[fi].clone()).unwrap();
        let k = secs(kappa);
        let oracle: f64 = a.iter().map(|(t, w)| w * u.evaluate(*t, k)).sum();
        let dist = RuntimeDistribution::discrete(a).unwrap();
        let r = score_analytic(&dist, &CaptimeDistribution::Dirac { kappa: k }, &u, DEFAULT_QUAD_TOL).unwrap();
        prop_assert!((r.score - oracle).abs() <= 1e-12, "{} vs {}", r.score, oracle);
        prop_assert!(r.score >= 0.0 && r.score <= 1.0 + 1e-12);
    }

    #[test]
    fn ranking_is_affine_invariant(
        algs in prop::collection::vec(atoms(), 2..6),
        fi in 0usize..9,
        kappa in 0.5f64..40.0,
        c1 in 0.01f64..100.0,
        c0 in -100.0f64..100.0,
    ) {
        let k = CaptimeDistribution::dirac(kappa).unwrap();
        let order = |u: &UtilityFunction| -> Vec<Vec<String>> {
            let reports = algs.iter().enumerate().map(|(i, a)| {
                let d = RuntimeDistribution::discrete(a.clone()).unwrap();
                (format!("a{i}"), score_analytic(&d, &k, u, DEFAULT_QUAD_TOL).unwrap())
            });
            rank(reports)
                .unwrap()
                .into_iter()
                .map(|g| {
                    let mut names: Vec<String> = g.members.into_iter().map(|m| m.0).collect();
                    names.sort();
                    names
                })
                .collect()
        };
        let f = families()[fi].clone();
        let plain = order(&UtilityFunction::new(f.clone()).unwrap());
        let scaled = order(&UtilityFunction::affine(f, c1, c0).unwrap());
        prop_assert_eq!(plain, scaled);
    }

    #[test]
    fn faster_samples_never_score_lower(
        runtimes in prop::collection::vec(0.0f64..20.0, 1..40),
        which in any::<prop::sample::Index>(),
        shrink in 0.0f64..1.0,
        fi in 0usize..9,
        captime in 0.5f64..20.0,
    ) {
        let u = UtilityFunction::new(families()[fi].clone()).unwrap();
        let k = secs(captime);
        let samples: Vec<_> = runtimes.iter().map(|&t| RuntimeSample::capped(secs(t), k)).collect();
        let before = score_empirical(&samples, &u, 0.95).unwrap();
        let mut faster = samples.clone();
        let i = which.index(faster.len());
        faster[i] = RuntimeSample::capped(secs(runtimes[i] * shrink), k);
        let after = score_empirical(&faster, &u, 0.95).unwrap();
        prop_assert!(after.score >= before.score);
        let ci = before.ci.unwrap();
        prop_assert!(ci.low <= before.score && before.score <= ci.high);
        prop_assert!(before.total_compute <= samples.len() as f64 * captime * (1.0 + 1e-12));
    }

    #[test]
    fn capped_mean_grows_with_captime(
        runtimes in prop::collection::vec(prop_oneof![9 => 0.0f64..50.0, 1 => Just(f64::INFINITY)], 1..40),
        k1 in 0.1f64..60.0,
        k2 in 0.1f64..60.0,
        c in 1.0f64..20.0,
    ) {
        let ts: Vec<_> = runtimes.iter().map(|&t| ExtendedTime::new(t).unwrap()).collect();
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let a = classical_scores(&ts, secs(lo), c).unwrap();
        let b = classical_scores(&ts, secs(hi), c).unwrap();
        prop_assert!(a.capped_mean <= b.capped_mean + 1e-12);
        prop_assert_eq!(a.fraction_solved + a.censoring_rate, 1.0);
        prop_assert_eq!(b.fraction_solved + b.censoring_rate, 1.0);
        if a.censoring_rate > 0.0 {
            prop_assert_eq!(a.mean, f64::INFINITY);
        }
    }
}

#[test]
fn par_can_fall_as_captime_grows() {
    let a = RuntimeDistribution::discrete(vec![(secs(1.0), 0.5), (secs(10.0), 0.5)]).unwrap();
    let at9 = classical_analytic(&a, secs(9.0), 2.0, DEFAULT_QUAD_TOL).unwrap();
    let at11 = classical_analytic(&a, secs(11.0), 2.0, DEFAULT_QUAD_TOL).unwrap();
    assert!(at11.par < at9.par);
    assert!(at11.capped_mean >= at9.capped_mean);
}
