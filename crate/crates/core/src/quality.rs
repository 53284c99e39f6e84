//! Runtime/quality pairs.
//!
//! Algorithms now produce a solution of some quality `q ∈ [q0, q1]` along with
//! their runtime. A default solution of quality `q0` is always available, so a
//! run that misses the captime is worth the same as doing nothing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{CheckReport, FLOAT_TOL};
use crate::{CaptimeDistribution, Error, ExtendedTime, QualityUtilityFunction, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualitySample {
    pub runtime: ExtendedTime,
    pub quality: f64,
    pub censored: bool,
    pub captime_used: ExtendedTime,
}

impl QualitySample {
    /// Caps a run at `captime`; a capped run falls back to quality `q0`.
    pub fn capped(runtime: ExtendedTime, quality: f64, captime: ExtendedTime, q0: f64) -> Self {
        if runtime >= captime {
            QualitySample {
                runtime: captime,
                quality: q0,
                censored: true,
                captime_used: captime,
            }
        } else {
            QualitySample {
                runtime,
                quality,
                censored: false,
                captime_used: captime,
            }
        }
    }

    pub fn validate(&self, uq: &QualityUtilityFunction) -> Result<()> {
        uq.weight(self.quality)?;
        if self.censored {
            if self.quality != uq.q0 {
                return Err(Error::bad("censored runs must report the default quality q0"));
            }
            if self.runtime != self.captime_used {
                return Err(Error::bad("censored runs must record the captime as runtime"));
            }
        } else if self.runtime >= self.captime_used {
            return Err(Error::bad("completed runs must finish before the captime"));
        }
        Ok(())
    }
}

/// Discrete distribution over `(runtime, quality)` pairs.
pub type QualityAtoms = Vec<(ExtendedTime, f64, f64)>;

fn captime_atoms(k: &CaptimeDistribution) -> Result<Vec<(ExtendedTime, f64)>> {
    match k {
        CaptimeDistribution::Dirac { kappa } => Ok(vec![(*kappa, 1.0)]),
        CaptimeDistribution::Discrete { points } => Ok(points.clone()),
        _ => Err(Error::bad("captime must be discrete")),
    }
}

/// `E[w(q)·p(t, κ)]` for `(t, q, prob)` atoms and a discrete captime.
pub fn expected_quality_p(atoms: &[(ExtendedTime, f64, f64)], k: &CaptimeDistribution, uq: &QualityUtilityFunction) -> Result<f64> {
    let kp = captime_atoms(k)?;
    let mut s = 0.0;
    for &(t, q, pt) in atoms {
        for &(kappa, pk) in &kp {
            s += pt * pk * uq.evaluate_quality(t, q, kappa)?;
        }
    }
    Ok(s)
}

/// Discrete instance for the quality extension.
#[derive(Clone, Debug)]
pub struct QualityInstance {
    pub algorithms: Vec<QualityAtoms>,
    pub captime: CaptimeDistribution,
    pub utility: QualityUtilityFunction,
}

#[derive(Clone, Debug, Serialize)]
pub struct QualityShapeReport {
    pub report: CheckReport,
    /// `E[w(q)·p(t, κ)]` per algorithm.
    pub scores: Vec<f64>,
}

/// Checks the shape of `p(t, q, κ)` at every atom and the affine invariance of
/// the induced ranking:
///
/// 1. `p(0, q1, κ) = 1`;
/// 2. nonincreasing in `t`;
/// 3. nondecreasing in `q`;
/// 4. positive for `t < κ` and `q > q0` wherever the base utility is positive;
/// 5. `p(κ, q, κ) = 0`.
pub fn check_quality_shape<R: Rng + ?Sized>(inst: &QualityInstance, rng: &mut R) -> Result<QualityShapeReport> {
    let uq = &inst.utility;
    uq.validate()?;
    let kp = captime_atoms(&inst.captime)?;
    let mut report = CheckReport::default();
    let scores: Vec<f64> = inst
        .algorithms
        .iter()
        .map(|a| expected_quality_p(a, &inst.captime, uq))
        .collect::<Result<_>>()?;

    let mut times: Vec<ExtendedTime> = inst
        .algorithms
        .iter()
        .flatten()
        .map(|a| a.0)
        .chain(kp.iter().map(|k| k.0))
        .chain([ExtendedTime::ZERO])
        .collect();
    times.sort();
    times.dedup();
    let mut qualities: Vec<f64> = inst.algorithms.iter().flatten().map(|a| a.1).chain([uq.q0, uq.q1]).collect();
    qualities.sort_by(f64::total_cmp);
    qualities.dedup();
    let positive = crate::axioms::positive_until(&uq.base.family);

    for &(kappa, _) in &kp {
        let p = |t: ExtendedTime, q: f64| uq.evaluate_quality(t, q, kappa);
        report.check(p(ExtendedTime::ZERO, uq.q1)? == 1.0, || format!("p(0, q1, {kappa}) != 1"));
        for &q in &qualities {
            for w in times.windows(2) {
                let (a, b) = (p(w[0], q)?, p(w[1], q)?);
                report.check(a >= b, || format!("p increases in t between {} and {} (q={q})", w[0], w[1]));
            }
            report.check(p(kappa, q)? == 0.0, || format!("p({kappa}, {q}, {kappa}) != 0"));
        }
        for &t in &times {
            for w in qualities.windows(2) {
                let (a, b) = (p(t, w[0])?, p(t, w[1])?);
                report.check(a <= b, || format!("p decreases in q between {} and {} (t={t})", w[0], w[1]));
            }
            if t < kappa && t < positive {
                for &q in qualities.iter().filter(|q| **q > uq.q0) {
                    report.check(p(t, q)? > 0.0, || format!("p({t}, {q}, {kappa}) is not positive"));
                }
            }
        }
    }

    for _ in 0..20 {
        let c1 = 10f64.powf(rng.random_range(-2.0..2.0));
        let c0 = rng.random_range(-100.0..100.0);
        let shifted: Vec<f64> = inst
            .algorithms
            .iter()
            .map(|a| {
                let mut s = 0.0;
                for &(t, q, pt) in a {
                    for &(kappa, pk) in &kp {
                        s += pt * pk * (c1 * uq.evaluate_quality(t, q, kappa).unwrap_or(f64::NAN) + c0);
                    }
                }
                s
            })
            .collect();
        let tol = FLOAT_TOL * (c1 + c0.abs());
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                let (d, e) = (scores[i] - scores[j], shifted[i] - shifted[j]);
                let flipped = (d > FLOAT_TOL && e < -tol) || (d < -FLOAT_TOL && e > tol);
                report.check(!flipped, || format!("c1={c1}, c0={c0}: order of {i} and {j} differs"));
            }
        }
    }
    Ok(QualityShapeReport { report, scores })
}
