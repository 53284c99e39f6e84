//! Sample and captime budgets for ε-accurate score estimation.
//!
//! With `m = ⌈ln(2/δ)/2 · ((2-ε)/ε)²⌉` runs capped at `u⁻¹(ε/2)`, the capped
//! sample mean utility is within `ε` of the true score with probability at
//! least `1 - δ`, for a total compute of at most `m · u⁻¹(ε/2)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scoring::{score_empirical, RuntimeSample};
use crate::{Error, ExtendedTime, Result, RuntimeDistribution, ScoreReport, UtilityFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub delta: f64,
    pub m: u64,
    pub captime: ExtendedTime,
    pub worst_case_compute: f64,
    /// `u⁻¹(2ε)`; absent when `ε >= 1/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound_captime: Option<ExtendedTime>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `⌈ln(2/δ)/2 · ((2-ε)/ε)²⌉`.
pub fn sample_count(epsilon: f64, delta: f64) -> Result<u64> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let m = (2.0 / delta).ln() / 2.0 * ((2.0 - epsilon) / epsilon).powi(2);
    Ok(m.ceil() as u64)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::bad(format!("{name} must lie in (0, 1), got {v}")))
    }
}

pub fn plan(u: &UtilityFunction, epsilon: f64, delta: f64) -> Result<SamplePlan> {
    let m = sample_count(epsilon, delta)?;
    u.validate()?;
    let captime = u.inverse(epsilon / 2.0)?;
    let mut warnings = Vec::new();
    if u.flat_region(epsilon / 2.0) {
        warnings.push(format!("utility is flat at {}; captime is the right end of the flat region", epsilon / 2.0));
    }
    let lower_bound_captime = if epsilon < 0.5 {
        Some(u.inverse(2.0 * epsilon)?)
    } else {
        warnings.push(format!(
            "epsilon {epsilon} >= 1/2: u⁻¹(2ε) is undefined, lower bound captime omitted"
        ));
        None
    };
    Ok(SamplePlan {
        epsilon,
        delta,
        m,
        captime,
        worst_case_compute: m as f64 * captime.seconds(),
        lower_bound_captime,
        warnings,
    })
}

/// Result of one capped run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    pub elapsed: f64,
    pub completed: bool,
}

/// Something that can run the algorithm once under a time budget.
pub trait RunOracle {
    /// Runs once, stopping at `captime`.
    fn run(&mut self, captime: ExtendedTime) -> std::result::Result<RunOutcome, String>;
}

/// Runs simulated by sampling a runtime distribution.
pub struct DistributionOracle<'a, R: Rng> {
    pub distribution: &'a RuntimeDistribution,
    pub rng: &'a mut R,
}

impl<R: Rng> RunOracle for DistributionOracle<'_, R> {
    fn run(&mut self, captime: ExtendedTime) -> std::result::Result<RunOutcome, String> {
        let t = self.distribution.sample(self.rng);
        Ok(if t < captime {
            RunOutcome {
                elapsed: t.seconds(),
                completed: true,
            }
        } else {
            RunOutcome {
                elapsed: captime.seconds(),
                completed: false,
            }
        })
    }
}

impl<F> RunOracle for F
where
    F: FnMut(ExtendedTime) -> std::result::Result<RunOutcome, String>,
{
    fn run(&mut self, captime: ExtendedTime) -> std::result::Result<RunOutcome, String> {
        self(captime)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub report: ScoreReport,
    pub samples: Vec<RuntimeSample>,
    /// Set when the source failed part way; the report covers the runs made.
    pub failure: Option<String>,
}

/// Draws `plan.m` capped runs and returns the capped sample mean utility with
/// a Hoeffding interval at confidence `1 - δ`.
pub fn estimate(source: &mut dyn RunOracle, plan: &SamplePlan, u: &UtilityFunction) -> Result<Estimate> {
    let mut samples = Vec::with_capacity(plan.m as usize);
    let mut failure = None;
    for _ in 0..plan.m {
        match source.run(plan.captime) {
            Ok(out) => {
                let t = ExtendedTime::new(out.elapsed.max(0.0)).unwrap_or(ExtendedTime::INFINITY);
                let t = if out.completed { t } else { plan.captime };
                samples.push(RuntimeSample::capped(t, plan.captime));
            }
            Err(message) => {
                failure = Some(message);
                break;
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::SourceFailure {
            completed: 0,
            message: failure.unwrap_or_else(|| "no runs".into()),
        });
    }
    let report = score_empirical(&samples, u, 1.0 - plan.delta)?;
    Ok(Estimate {
        report,
        samples,
        failure,
    })
}

/// [`estimate`] against a runtime distribution.
pub fn estimate_distribution<R: Rng>(
    distribution: &RuntimeDistribution,
    plan: &SamplePlan,
    u: &UtilityFunction,
    rng: &mut R,
) -> Result<Estimate> {
    let mut oracle = DistributionOracle { distribution, rng };
    estimate(&mut oracle, plan, u)
}

/// A runtime distribution on which capping too early is always misleading.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialInstance {
    /// `Dirac(runtime)` with `u(runtime) < ε`.
    pub distribution: RuntimeDistribution,
    pub runtime: ExtendedTime,
    /// Captime with `u(bad_captime) > 2ε`, below `u⁻¹(2ε)`.
    pub bad_captime: ExtendedTime,
}

/// Builds a deterministic algorithm whose every run is capped at
/// `bad_captime`, so the capped mean utility `u(bad_captime) > 2ε` is more than
/// `ε` above the true score `u(runtime) < ε` for any number of samples.
pub fn adversarial_instance(u: &UtilityFunction, epsilon: f64) -> Result<AdversarialInstance> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::NoSuchInstance(format!("needs 0 < ε < 1/2, got {epsilon}")));
    }
    let to_none = |e: Error| Error::NoSuchInstance(e.to_string());
    let un = u.normalized();
    let runtime = un.inverse(epsilon / 2.0).map_err(to_none)?;
    let bad_captime = un.inverse(0.5 + epsilon).map_err(to_none)?;
    let inf = ExtendedTime::INFINITY;
    let (ur, ub) = (un.evaluate(runtime, inf), un.evaluate(bad_captime, inf));
    if runtime.is_infinite() || !(ur < epsilon) {
        return Err(Error::NoSuchInstance(format!("no runtime with utility below {epsilon}")));
    }
    if !(ub > 2.0 * epsilon && bad_captime < runtime) {
        return Err(Error::NoSuchInstance(format!(
            "no captime with utility above {} before the runtime",
            2.0 * epsilon
        )));
    }
    Ok(AdversarialInstance {
        distribution: RuntimeDistribution::Dirac { t: runtime },
        runtime,
        bad_captime,
    })
}
