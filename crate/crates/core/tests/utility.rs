use proptest::prelude::*;
use runtime_utility::axioms::positive_until;
use runtime_utility::{CaptimeDistribution, ExtendedTime, Family, QualityUtilityFunction, QualityWeight, UtilityFunction};

fn families() -> Vec<Family> {
    vec![
        Family::Step,
        Family::LinearMoney {
            revenue: 10.0,
            cost_fixed: 1.0,
            cost_rate: 2.0,
        },
        Family::Uniform { kappa0: 10.0 },
        Family::Exponential { kappa0: 1.0 },
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

fn invertible() -> Vec<UtilityFunction> {
    families()
        .into_iter()
        .filter(|f| !f.uses_captime())
        .map(|f| UtilityFunction::new(f).unwrap())
        .collect()
}

fn secs(t: f64) -> ExtendedTime {
    ExtendedTime::secs(t)
}

/// Largest `t` with `u(t) >= v`, by bisection on the evaluated utility.
fn bisect_inverse(u: &UtilityFunction, v: f64) -> f64 {
    let at = |t: f64| u.evaluate(secs(t), ExtendedTime::INFINITY);
    let mut hi = 1.0;
    while at(hi) >= v {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid) >= v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn inverse_agrees_with_bisection() {
    for u in invertible() {
        for i in 1..100 {
            let v = i as f64 / 100.0;
            let exact = u.inverse(v).unwrap().seconds();
            let probe = bisect_inverse(&u, v);
            assert!(
                (exact - probe).abs() <= 1e-9 * probe.max(1.0),
                "{:?} at {v}: {exact} vs {probe}",
                u.family
            );
        }
    }
}

#[test]
fn inverse_undoes_evaluate_where_decreasing() {
    for u in invertible() {
        for i in 1..200 {
            let t = 0.05 * i as f64;
            let v = u.evaluate(secs(t), ExtendedTime::INFINITY);
            if v <= 0.0 || v >= 1.0 || u.flat_region(v) {
                continue;
            }
            let back = u.inverse(v).unwrap().seconds();
            assert!((back - t).abs() <= 1e-9 * t.max(1.0), "{:?} at {t}: {back}", u.family);
        }
    }
}

#[test]
fn symmetric_generalized_log_laplace_is_log_laplace() {
    let (kappa0, alpha) = (2.5, 1.7);
    let gll = UtilityFunction::new(Family::GeneralizedLogLaplace {
        kappa0,
        alpha,
        beta: alpha,
    })
    .unwrap();
    let ll = UtilityFunction::new(Family::LogLaplace { kappa0, alpha }).unwrap();
    for i in 0..1000 {
        let t = secs(10f64.powf(-3.0 + 6.0 * i as f64 / 999.0));
        let (a, b) = (gll.evaluate(t, ExtendedTime::INFINITY), ll.evaluate(t, ExtendedTime::INFINITY));
        assert!((a - b).abs() <= 1e-12, "at {t}: {a} vs {b}");
    }
}

#[test]
fn two_tail_continuity_needs_the_balanced_split() {
    let (kappa0, alpha, beta) = (1.0, 2.0, 1.0);
    let balanced = alpha / (alpha + beta);
    for (mass_below, continuous) in [(balanced, true), (0.5, false), (0.9, false)] {
        let u = UtilityFunction::new(Family::SurvivalOf {
            captime: CaptimeDistribution::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            },
        })
        .unwrap();
        assert_eq!(u.check_continuity().is_ok(), continuous, "split {mass_below}");
    }
    let gll = UtilityFunction::new(Family::GeneralizedLogLaplace { kappa0, alpha, beta }).unwrap();
    assert!(gll.check_continuity().is_ok());
    let one = UtilityFunction::new(Family::GeneralizedLogLaplace {
        kappa0: 1.0,
        alpha: 1.0,
        beta: 1.0,
    })
    .unwrap();
    let left = one.evaluate(secs(1.0 - 1e-12), ExtendedTime::INFINITY);
    let right = one.evaluate(secs(1.0 + 1e-12), ExtendedTime::INFINITY);
    assert!((left - 0.5).abs() < 1e-11 && (right - 0.5).abs() < 1e-11);
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(families())
}

fn sorted_times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..50.0, 2..30).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #[test]
    fn utility_is_nonincreasing(f in family(), a in 0.0f64..100.0, b in 0.0f64..100.0, kappa in 0.1f64..100.0) {
        let u = UtilityFunction::new(f).unwrap();
        let (t, t2) = if a <= b { (a, b) } else { (b, a) };
        let k = secs(kappa);
        prop_assert!(u.evaluate(secs(t), k) >= u.evaluate(secs(t2), k));
        prop_assert_eq!(u.evaluate(ExtendedTime::INFINITY, k), 0.0);
    }

    #[test]
    fn affine_utilities_stay_in_range(f in family(), c1 in 0.1f64..10.0, c0 in -5.0f64..5.0, t in 0.0f64..100.0, kappa in 0.1f64..100.0) {
        let u = UtilityFunction::affine(f, c1, c0).unwrap();
        let v = u.evaluate(secs(t), secs(kappa));
        prop_assert!(v >= c0 - 1e-12 && v <= c0 + c1 + 1e-12);
        prop_assert!((u.evaluate(ExtendedTime::INFINITY, secs(kappa)) - c0).abs() <= 1e-12);
    }

    #[test]
    fn p_has_the_representation_shape(f in family(), times in sorted_times(), kappa in 0.1f64..50.0) {
        let u = UtilityFunction::new(f.clone()).unwrap();
        let k = secs(kappa);
        prop_assert_eq!(u.p(ExtendedTime::ZERO, k), 1.0);
        prop_assert_eq!(u.p(k, k), 0.0);
        let positive = positive_until(&f);
        let mut last = 1.0;
        for &t in &times {
            let p = u.p(secs(t), k);
            prop_assert!(p <= last);
            last = p;
            if t < kappa && secs(t) < positive {
                prop_assert!(p > 0.0, "p({t}, {kappa}) = {p}");
            }
            if t >= kappa {
                prop_assert_eq!(p, 0.0);
            } else {
                prop_assert_eq!(p, u.evaluate_normalized(secs(t), k));
            }
        }
    }

    #[test]
    fn quality_utility_factors(
        f in family(),
        times in sorted_times(),
        qs in prop::collection::vec(0.0f64..=1.0, 2..10),
        exponent in 0.2f64..5.0,
        kappa in 0.1f64..50.0,
    ) {
        let mut qs = qs;
        qs.sort_by(f64::total_cmp);
        for weight in [QualityWeight::Linear, QualityWeight::Power { exponent }] {
            let uq = QualityUtilityFunction::new(UtilityFunction::new(f.clone()).unwrap(), 0.0, 1.0, weight).unwrap();
            let k = secs(kappa);
            for &q in &qs {
                let mut last = f64::INFINITY;
                for &t in &times {
                    let v = uq.evaluate_quality(secs(t), q, k).unwrap();
                    prop_assert!(v <= last);
                    last = v;
                    prop_assert!((v - uq.weight(q).unwrap() * uq.base.p(secs(t), k)).abs() <= 1e-15);
                }
            }
            for &t in &times {
                let mut last = -1.0;
                for &q in &qs {
                    let v = uq.evaluate_quality(secs(t), q, k).unwrap();
                    prop_assert!(v >= last);
                    last = v;
                }
                prop_assert_eq!(uq.evaluate_quality(secs(t), 0.0, k).unwrap(), 0.0);
            }
            prop_assert_eq!(uq.evaluate_quality(ExtendedTime::ZERO, 1.0, k).unwrap(), 1.0);
            prop_assert!(uq.evaluate_quality(ExtendedTime::ZERO, 1.5, k).is_err());
        }
    }
}

#[test]
fn quality_midpoint_under_step() {
    let uq = QualityUtilityFunction::new(UtilityFunction::new(Family::Step).unwrap(), 0.0, 1.0, QualityWeight::Linear).unwrap();
    assert_eq!(uq.evaluate_quality(secs(1.0), 0.5, secs(2.0)).unwrap(), 0.5);
}
