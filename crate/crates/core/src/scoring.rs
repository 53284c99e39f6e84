//! Scores, classical baselines and ranking.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::quadrature::Decomposition;
use crate::quality::QualitySample;
use crate::{CaptimeDistribution, Error, ExtendedTime, QualityUtilityFunction, Result, RuntimeDistribution, UtilityFunction};

pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
/// Analytic scores closer than this (times `c1`) are tied.
pub const ANALYTIC_TIE: f64 = 1e-12;

/// One capped observation: either the runtime, or the captime when the run
/// was cut off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeSample {
    pub observed: ExtendedTime,
    pub censored: bool,
    pub captime_used: ExtendedTime,
}

impl RuntimeSample {
    /// Caps a raw runtime at `captime`.
    pub fn capped(runtime: ExtendedTime, captime: ExtendedTime) -> Self {
        if runtime >= captime {
            RuntimeSample {
                observed: captime,
                censored: true,
                captime_used: captime,
            }
        } else {
            RuntimeSample {
                observed: runtime,
                censored: false,
                captime_used: captime,
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.censored && self.observed != self.captime_used {
            return Err(Error::bad("censored samples must record the captime as runtime"));
        }
        if !self.censored && self.observed >= self.captime_used {
            return Err(Error::bad("completed samples must finish before the captime"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMethod {
    Analytic,
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub score: f64,
    pub method: ScoreMethod,
    pub ci: Option<ConfidenceInterval>,
    pub n_samples: usize,
    /// Seconds of compute consumed by the samples; zero for analytic scores.
    pub total_compute: f64,
    /// Utility scale `c1`, used to make tie detection affine-invariant.
    pub scale: f64,
    /// Identifies the utility and captime model; only equal models compare.
    pub model: String,
}

fn model_of(u: &UtilityFunction, captime: Option<String>) -> String {
    match captime {
        Some(k) if u.family.uses_captime() => format!("{u:?} | {k}"),
        _ => format!("{u:?}"),
    }
}

fn to_time(x: f64) -> ExtendedTime {
    ExtendedTime::new(x).unwrap_or(ExtendedTime::INFINITY)
}

/// `E[u(t, κ)]` for `t ~ a`, `κ ~ k`, by quadrature.
///
/// Families derived from a captime prior ignore `k`.
pub fn score_analytic(
    a: &RuntimeDistribution,
    k: &CaptimeDistribution,
    u: &UtilityFunction,
    quad_tol: f64,
) -> Result<ScoreReport> {
    a.validate()?;
    k.validate()?;
    u.validate()?;
    let s = expected_p(&a.decompose(), k, u, quad_tol)?;
    Ok(ScoreReport {
        score: u.c1 * s + u.c0,
        method: ScoreMethod::Analytic,
        ci: None,
        n_samples: 0,
        total_compute: 0.0,
        scale: u.c1,
        model: model_of(u, Some(format!("{k:?}"))),
    })
}

/// Expected normalized utility.
pub(crate) fn expected_p(a: &Decomposition, k: &CaptimeDistribution, u: &UtilityFunction, tol: f64) -> Result<f64> {
    let un = u.normalized();
    let mut bps = a.breakpoints();
    bps.extend(k.breakpoints());
    match &u.family {
        crate::Family::Step => {
            let g = |t: f64| k.survival(to_time(t));
            a.expect(&g, &bps, tol)
        }
        crate::Family::LinearMoney { .. } => {
            let kd = k.decompose();
            let a_bps = a.breakpoints();
            let inner = |kappa: f64| -> Result<f64> {
                let kap = to_time(kappa);
                let mut pts = a_bps.clone();
                if kap.is_finite() {
                    pts.push(kappa);
                }
                a.expect(&|t| un.p(to_time(t), kap), &pts, tol / 2.0)
            };
            // quadrature needs a plain closure; errors are carried out of it
            let err = std::cell::RefCell::new(None);
            let g = |kappa: f64| match inner(kappa) {
                Ok(v) => v,
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    0.0
                }
            };
            let v = kd.expect(&g, &a.breakpoints(), tol / 2.0)?;
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        _ => {
            bps.extend(un.breakpoints(ExtendedTime::INFINITY));
            let g = |t: f64| un.evaluate_normalized(to_time(t), ExtendedTime::INFINITY);
            a.expect(&g, &bps, tol)
        }
    }
}

/// Half-width of the two-sided Hoeffding interval for a mean of `n` values in `[0, 1]`.
pub fn hoeffding_half_width(n: usize, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

fn common_captime<'a>(mut captimes: impl Iterator<Item = &'a ExtendedTime>) -> Result<ExtendedTime> {
    let first = *captimes.next().ok_or(Error::EmptyInput)?;
    for c in captimes {
        if *c != first {
            return Err(Error::MixedCaptimes {
                first: first.seconds(),
                other: c.seconds(),
            });
        }
    }
    Ok(first)
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::bad(format!("confidence must lie in (0, 1), got {confidence}")))
    }
}

fn empirical_report(values: &[f64], u: &UtilityFunction, confidence: f64, compute: f64, model: String) -> ScoreReport {
    let n = values.len();
    let mean_p = values.iter().sum::<f64>() / n as f64;
    let half = hoeffding_half_width(n, confidence);
    let score = u.c1 * mean_p + u.c0;
    ScoreReport {
        score,
        method: ScoreMethod::Empirical,
        ci: Some(ConfidenceInterval {
            low: u.c1 * (mean_p - half).max(0.0) + u.c0,
            high: u.c1 * (mean_p + half).min(1.0) + u.c0,
            confidence,
        }),
        n_samples: n,
        total_compute: compute,
        scale: u.c1,
        model,
    }
}

/// Capped sample mean utility with a Hoeffding interval.
///
/// Censored samples are worth `u(captime)`.
pub fn score_empirical(samples: &[RuntimeSample], u: &UtilityFunction, confidence: f64) -> Result<ScoreReport> {
    u.validate()?;
    check_confidence(confidence)?;
    let captime = common_captime(samples.iter().map(|s| &s.captime_used))?;
    let mut values = Vec::with_capacity(samples.len());
    let mut compute = 0.0;
    for s in samples {
        s.validate()?;
        values.push(u.evaluate_normalized(s.observed, s.captime_used));
        compute += s.observed.seconds();
    }
    Ok(empirical_report(
        &values,
        u,
        confidence,
        compute,
        model_of(u, Some(format!("{captime}"))),
    ))
}

/// Expected `w(q)·p(t, κ)` over observed runtime/quality pairs.
pub fn score_quality(samples: &[QualitySample], uq: &QualityUtilityFunction, confidence: f64) -> Result<ScoreReport> {
    uq.validate()?;
    check_confidence(confidence)?;
    let captime = common_captime(samples.iter().map(|s| &s.captime_used))?;
    let mut values = Vec::with_capacity(samples.len());
    let mut compute = 0.0;
    for s in samples {
        s.validate(uq)?;
        let v = if s.censored {
            0.0
        } else {
            uq.evaluate_quality(s.runtime, s.quality, s.captime_used)?
        };
        values.push(v);
        compute += s.runtime.seconds();
    }
    Ok(empirical_report(
        &values,
        &uq.base,
        confidence,
        compute,
        format!("{:?} | {captime}", uq),
    ))
}

/// Baselines from the benchmarking literature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalScores {
    /// Uncapped mean; infinite when any run was capped.
    pub mean: f64,
    pub capped_mean: f64,
    /// Penalized average runtime with capped runs counted as `par_factor·κ`.
    pub par: f64,
    pub par_factor: f64,
    pub fraction_solved: f64,
    pub censoring_rate: f64,
    pub n: usize,
}

fn check_par_factor(c: f64) -> Result<()> {
    if c >= 1.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::bad(format!("par factor must be at least 1, got {c}")))
    }
}

/// Classical scores of raw (or already capped) runtimes under `captime`.
/// A run counts as capped when its runtime is not below the captime.
pub fn classical_scores(runtimes: &[ExtendedTime], captime: ExtendedTime, par_factor: f64) -> Result<ClassicalScores> {
    check_par_factor(par_factor)?;
    if runtimes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = captime.seconds();
    let mut capped = 0usize;
    let (mut sum_solved, mut sum_all) = (0.0, 0.0);
    for t in runtimes {
        if *t >= captime {
            capped += 1;
        } else {
            sum_solved += t.seconds();
        }
        sum_all += t.seconds();
    }
    let n = runtimes.len();
    let solved = n - capped;
    let nf = n as f64;
    let penalty = |c: f64| if capped == 0 { 0.0 } else { c * k * capped as f64 };
    Ok(ClassicalScores {
        mean: if capped > 0 { f64::INFINITY } else { sum_all / nf },
        capped_mean: (sum_solved + penalty(1.0)) / nf,
        par: (sum_solved + penalty(par_factor)) / nf,
        par_factor,
        fraction_solved: solved as f64 / nf,
        censoring_rate: capped as f64 / nf,
        n,
    })
}

/// Classical scores of a run log's samples, which must share one captime.
pub fn classical_scores_of_samples(samples: &[RuntimeSample], par_factor: f64) -> Result<ClassicalScores> {
    let captime = common_captime(samples.iter().map(|s| &s.captime_used))?;
    let runtimes: Vec<_> = samples.iter().map(|s| s.observed).collect();
    classical_scores(&runtimes, captime, par_factor)
}

/// Expected classical scores of a distribution at a fixed captime.
///
/// Point masses are summed exactly, so for purely atomic distributions such as
/// the St. Petersburg law the result is exact up to floating point.
pub fn classical_analytic(
    a: &RuntimeDistribution,
    captime: ExtendedTime,
    par_factor: f64,
    quad_tol: f64,
) -> Result<ClassicalScores> {
    check_par_factor(par_factor)?;
    a.validate()?;
    let d = a.decompose();
    let mut below = 0.0;
    let mut partial = 0.0;
    let mut mean = 0.0;
    let mut sorted = d.atoms.clone();
    sorted.sort_by(|x, y| x.0.cmp(&y.0));
    for (t, w) in &sorted {
        if *t < captime {
            below += w;
            partial += w * t.seconds();
        }
        mean += w * t.seconds();
    }
    let k = captime.seconds();
    for (w, law) in &d.parts {
        let f = if captime.is_finite() { law.cdf(k) } else { 1.0 };
        below += w * f;
        let bps = if captime.is_finite() { vec![k] } else { Vec::new() };
        partial += w * crate::quadrature::expect_law(law, &|t| if t < k { t } else { 0.0 }, &bps, quad_tol)?;
        mean += w * law.mean();
    }
    if d.dropped > 0.0 {
        mean = f64::INFINITY;
    }
    let above = (1.0 - below).max(0.0);
    let tail = |c: f64| if above == 0.0 { 0.0 } else { c * k * above };
    Ok(ClassicalScores {
        mean: if a.mass_at_infinity() > 0.0 { f64::INFINITY } else { mean },
        capped_mean: partial + tail(1.0),
        par: partial + tail(par_factor),
        par_factor,
        fraction_solved: below,
        censoring_rate: above,
        n: 0,
    })
}

/// Algorithms sharing a rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TieGroup {
    /// 1-based position of the group.
    pub rank: usize,
    pub members: Vec<(String, ScoreReport)>,
}

fn tied(a: &ScoreReport, b: &ScoreReport) -> bool {
    match (&a.ci, &b.ci) {
        (Some(x), Some(y)) => x.low <= y.high && y.low <= x.high,
        _ => (a.score - b.score).abs() <= ANALYTIC_TIE * a.scale.max(b.scale),
    }
}

/// Orders reports by descending score and groups ties.
///
/// Two reports tie when their confidence intervals overlap, or, without
/// intervals, when the scores agree to [`ANALYTIC_TIE`]. Each group is
/// anchored at its best member. Equal scores are ordered by name.
pub fn rank<I, S>(reports: I) -> Result<Vec<TieGroup>>
where
    I: IntoIterator<Item = (S, ScoreReport)>,
    S: Into<String>,
{
    let mut all: Vec<(String, ScoreReport)> = reports.into_iter().map(|(n, r)| (n.into(), r)).collect();
    if let Some((_, first)) = all.first() {
        if let Some((name, r)) = all.iter().find(|(_, r)| r.model != first.model) {
            return Err(Error::IncomparableReports(format!(
                "{name} uses `{}`, expected `{}`",
                r.model, first.model
            )));
        }
    }
    all.sort_by(|(na, a), (nb, b)| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| na.cmp(nb))
    });
    let mut groups: Vec<TieGroup> = Vec::new();
    for entry in all {
        match groups.last_mut() {
            Some(g) if tied(&g.members[0].1, &entry.1) => g.members.push(entry),
            _ => {
                let rank = groups.iter().map(|g| g.members.len()).sum::<usize>() + 1;
                groups.push(TieGroup {
                    rank,
                    members: vec![entry],
                });
            }
        }
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Family;

    fn t(x: f64) -> ExtendedTime {
        ExtendedTime::secs(x)
    }

    #[test]
    fn never_solving_scores_zero() {
        let a = RuntimeDistribution::Dirac {
            t: ExtendedTime::INFINITY,
        };
        let u = UtilityFunction::new(Family::Exponential { kappa0: 1.0 }).unwrap();
        let k = CaptimeDistribution::dirac(1.0).unwrap();
        assert_eq!(score_analytic(&a, &k, &u, 1e-9).unwrap().score, 0.0);
    }

    #[test]
    fn hoeffding_width() {
        let h = hoeffding_half_width(666, 0.95);
        assert!((h - (40f64.ln() / 1332.0).sqrt()).abs() < 1e-15);
        assert!((h - 0.0526).abs() < 1e-4);
    }

    #[test]
    fn mixed_captimes_rejected() {
        let u = UtilityFunction::new(Family::Step).unwrap();
        let s = [RuntimeSample::capped(t(1.0), t(2.0)), RuntimeSample::capped(t(1.0), t(3.0))];
        assert!(matches!(score_empirical(&s, &u, 0.95), Err(Error::MixedCaptimes { .. })));
        assert!(matches!(score_empirical(&[], &u, 0.95), Err(Error::EmptyInput)));
    }

    #[test]
    fn all_censored_step_is_zero() {
        let u = UtilityFunction::new(Family::Step).unwrap();
        let s = vec![RuntimeSample::capped(ExtendedTime::INFINITY, t(5.0)); 10];
        let r = score_empirical(&s, &u, 0.95).unwrap();
        assert_eq!(r.score, 0.0);
        assert_eq!(r.total_compute, 50.0);
    }

    #[test]
    fn classical_all_complete() {
        let c = classical_scores(&[t(1.0); 4], t(10.0), 10.0).unwrap();
        assert_eq!((c.mean, c.capped_mean, c.par, c.fraction_solved), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn rank_orders_and_groups() {
        let mk = |s: f64| ScoreReport {
            score: s,
            method: ScoreMethod::Analytic,
            ci: None,
            n_samples: 0,
            total_compute: 0.0,
            scale: 1.0,
            model: "m".into(),
        };
        let g = rank(vec![("b", mk(0.5)), ("a", mk(0.5)), ("c", mk(0.9))]).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].members[0].0, "c");
        assert_eq!(g[1].rank, 2);
        assert_eq!(g[1].members.iter().map(|m| m.0.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        let mut other = mk(0.1);
        other.model = "n".into();
        assert!(matches!(
            rank(vec![("a", mk(0.5)), ("z", other)]),
            Err(Error::IncomparableReports(_))
        ));
    }
}
