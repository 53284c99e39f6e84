//! Utility families and the fundamental `p` function.
//!
//! Every utility is `u(t, κ) = c1·p(t, κ) + c0` with `c1 > 0`. Two families
//! depend on the captime argument directly: the step utility and the linear
//! money utility. The others are derived from a captime prior `K` and equal its
//! survival function `P(K > t)`; for those the explicit `κ` argument is
//! ignored because the uncertainty about the deadline is already folded in.

use serde::{Deserialize, Serialize};

use crate::runtime_dist::CaptimeDistribution;
use crate::{Error, ExtendedTime, Result};

/// Shape of `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `1` for `t < κ`, `0` otherwise.
    Step,
    /// Share of the money on the table collected when finishing at `t`, with
    /// reward `revenue` and cost `cost_fixed + cost_rate·t`.
    LinearMoney {
        revenue: f64,
        cost_fixed: f64,
        cost_rate: f64,
    },
    /// Survival function of an arbitrary captime distribution.
    SurvivalOf { captime: CaptimeDistribution },
    Uniform { kappa0: f64 },
    Exponential { kappa0: f64 },
    Pareto { kappa0: f64, alpha: f64 },
    LogLaplace { kappa0: f64, alpha: f64 },
    GeneralizedLogLaplace { kappa0: f64, alpha: f64, beta: f64 },
    LogNormal { kappa0: f64, sigma: f64 },
    PiecewiseLinear { kappa0: f64, kappa1: f64, delta: f64 },
}

impl Family {
    /// The captime prior whose survival function this family is, if any.
    pub fn captime(&self) -> Option<CaptimeDistribution> {
        use CaptimeDistribution as K;
        Some(match self.clone() {
            Family::Step | Family::LinearMoney { .. } => return None,
            Family::SurvivalOf { captime } => captime,
            Family::Uniform { kappa0 } => K::Uniform { kappa0 },
            Family::Exponential { kappa0 } => K::Exponential { kappa0 },
            Family::Pareto { kappa0, alpha } => K::Pareto { kappa0, alpha },
            Family::LogLaplace { kappa0, alpha } => K::LogLaplace { kappa0, alpha },
            Family::GeneralizedLogLaplace { kappa0, alpha, beta } => K::GeneralizedLogLaplace { kappa0, alpha, beta },
            Family::LogNormal { kappa0, sigma } => K::LogNormal { kappa0, sigma },
            Family::PiecewiseLinear { kappa0, kappa1, delta } => K::PiecewiseTail { kappa0, kappa1, delta },
        })
    }

    /// True when the value depends on the captime argument.
    pub fn uses_captime(&self) -> bool {
        matches!(self, Family::Step | Family::LinearMoney { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Step => Ok(()),
            Family::LinearMoney {
                revenue,
                cost_fixed,
                cost_rate,
            } => {
                if !(revenue.is_finite() && *revenue > 0.0) {
                    return Err(Error::bad("revenue must be positive"));
                }
                if !cost_fixed.is_finite() {
                    return Err(Error::bad("cost_fixed must be finite"));
                }
                if !(cost_rate.is_finite() && *cost_rate >= 0.0) {
                    return Err(Error::bad("cost_rate must be nonnegative"));
                }
                Ok(())
            }
            _ => self.captime().expect("embedded family").validate(),
        }
    }
}

/// `u(t, κ) = c1·p(t, κ) + c0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityFunction {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default)]
    pub c0: f64,
}

fn one() -> f64 {
    1.0
}

impl UtilityFunction {
    /// Normalized utility (`c1 = 1`, `c0 = 0`).
    pub fn new(family: Family) -> Result<Self> {
        Self::affine(family, 1.0, 0.0)
    }

    pub fn affine(family: Family, c1: f64, c0: f64) -> Result<Self> {
        let u = UtilityFunction { family, c1, c0 };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::bad(format!("c1 must be positive, got {}", self.c1)));
        }
        if !self.c0.is_finite() {
            return Err(Error::bad("c0 must be finite"));
        }
        self.family.validate()
    }

    /// Same family with `c1 = 1`, `c0 = 0`.
    pub fn normalized(&self) -> UtilityFunction {
        UtilityFunction {
            family: self.family.clone(),
            c1: 1.0,
            c0: 0.0,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.c1 == 1.0 && self.c0 == 0.0
    }

    /// Normalized value in `[0, 1]`.
    pub fn evaluate_normalized(&self, t: ExtendedTime, kappa: ExtendedTime) -> f64 {
        if t.is_infinite() {
            return 0.0;
        }
        match &self.family {
            Family::Step => (t < kappa) as u8 as f64,
            Family::LinearMoney {
                revenue, cost_rate, ..
            } => {
                if t >= kappa {
                    0.0
                } else if kappa.is_infinite() {
                    1.0
                } else {
                    let k = kappa.seconds();
                    (revenue + cost_rate * (k - t.seconds())) / (revenue + cost_rate * k)
                }
            }
            f => f.captime().expect("embedded family").survival(t),
        }
    }

    pub fn evaluate(&self, t: ExtendedTime, kappa: ExtendedTime) -> f64 {
        self.c1 * self.evaluate_normalized(t, kappa) + self.c0
    }

    /// `p(t, κ)`: the normalized utility for `t < κ` and `0` from `κ` on.
    pub fn p(&self, t: ExtendedTime, kappa: ExtendedTime) -> f64 {
        if t >= kappa {
            0.0
        } else {
            self.evaluate_normalized(t, kappa)
        }
    }

    pub fn p_function(&self) -> impl Fn(ExtendedTime, ExtendedTime) -> f64 + '_ {
        move |t, kappa| self.p(t, kappa)
    }

    /// Largest `t` with normalized `u(t) >= v`, for `0 < v <= 1`.
    pub fn inverse(&self, v: f64) -> Result<ExtendedTime> {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::bad(format!("inverse needs 0 < v <= 1, got {v}")));
        }
        match &self.family {
            Family::Step => Err(Error::NotInvertible("the step utility is constant below the captime".into())),
            Family::LinearMoney { .. } => Err(Error::NotInvertible(
                "the linear money utility depends on the captime".into(),
            )),
            f => Ok(f.captime().expect("embedded family").upper_quantile(1.0 - v)),
        }
    }

    /// True when `u` equals `v` on an interval of positive length ending at
    /// `inverse(v)`, so that the inverse is not unique.
    pub fn flat_region(&self, v: f64) -> bool {
        match self.family.captime() {
            Some(k) if v > 0.0 && v <= 1.0 => {
                let hi = k.upper_quantile(1.0 - v);
                let lo = k.lower_quantile(1.0 - v);
                hi > lo
            }
            _ => false,
        }
    }

    /// Points in `t` where `u(·, κ)` has a jump or kink.
    pub fn breakpoints(&self, kappa: ExtendedTime) -> Vec<f64> {
        let mut pts = match self.family.captime() {
            Some(k) => k.breakpoints(),
            None => Vec::new(),
        };
        if self.family.uses_captime() && kappa.is_finite() {
            pts.push(kappa.seconds());
        }
        pts
    }

    /// Checks that the captime density, and so the slope of `u`, is
    /// continuous at the split point of a two-tailed log-power prior.
    pub fn check_continuity(&self) -> Result<()> {
        let k = match self.family.captime() {
            Some(k) => k,
            None => return Ok(()),
        };
        if let CaptimeDistribution::TwoTailLog {
            kappa0,
            alpha,
            beta,
            mass_below,
        } = k
        {
            let (left, right) = two_tail_density_limits(kappa0, alpha, beta, mass_below);
            if (left - right).abs() > 1e-12 * left.abs().max(right.abs()).max(1.0) {
                return Err(Error::bad(format!(
                    "density jumps at kappa0 ({left} vs {right}); continuity needs mass_below = {}",
                    alpha / (alpha + beta)
                )));
            }
        }
        Ok(())
    }
}

/// Left and right limits of a two-tailed log-power density at `kappa0`.
pub fn two_tail_density_limits(kappa0: f64, alpha: f64, beta: f64, mass_below: f64) -> (f64, f64) {
    (mass_below * beta / kappa0, (1.0 - mass_below) * alpha / kappa0)
}

/// Increasing map from `[q0, q1]` onto `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "weight", rename_all = "snake_case")]
pub enum QualityWeight {
    Linear,
    /// `((q - q0) / (q1 - q0))^exponent`.
    Power { exponent: f64 },
}

/// Utility over runtime/quality pairs, `u(t, q, κ) = w(q)·p(t, κ)`.
///
/// Runs that miss the captime fall back to the default quality `q0`, which is
/// worth nothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityUtilityFunction {
    pub base: UtilityFunction,
    pub q0: f64,
    pub q1: f64,
    pub weight: QualityWeight,
}

impl QualityUtilityFunction {
    pub fn new(base: UtilityFunction, q0: f64, q1: f64, weight: QualityWeight) -> Result<Self> {
        let uq = QualityUtilityFunction { base, q0, q1, weight };
        uq.validate()?;
        Ok(uq)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.q0.is_finite() && self.q1.is_finite() && self.q1 > self.q0) {
            return Err(Error::bad("quality range needs finite q0 < q1"));
        }
        if let QualityWeight::Power { exponent } = self.weight {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(Error::bad("quality exponent must be positive"));
            }
        }
        Ok(())
    }

    pub fn weight(&self, q: f64) -> Result<f64> {
        if !(q >= self.q0 && q <= self.q1) {
            return Err(Error::QualityOutOfRange {
                q,
                q0: self.q0,
                q1: self.q1,
            });
        }
        let x = (q - self.q0) / (self.q1 - self.q0);
        Ok(match self.weight {
            QualityWeight::Linear => x,
            QualityWeight::Power { exponent } => x.powf(exponent),
        })
    }

    pub fn evaluate_quality(&self, t: ExtendedTime, q: f64, kappa: ExtendedTime) -> Result<f64> {
        Ok(self.weight(q)? * self.base.p(t, kappa))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(x: f64) -> ExtendedTime {
        ExtendedTime::secs(x)
    }

    fn u(f: Family) -> UtilityFunction {
        UtilityFunction::new(f).unwrap()
    }

    #[test]
    fn family_values() {
        let inf = ExtendedTime::INFINITY;
        assert_eq!(u(Family::Exponential { kappa0: 1.0 }).evaluate(t(0.0), inf), 1.0);
        assert_eq!(u(Family::Uniform { kappa0: 10.0 }).evaluate(t(5.0), inf), 0.5);
        assert_eq!(u(Family::Pareto { kappa0: 1.0, alpha: 1.0 }).evaluate(t(2.0), inf), 0.5);
        let gll = u(Family::GeneralizedLogLaplace {
            kappa0: 1.0,
            alpha: 1.0,
            beta: 1.0,
        });
        assert!((gll.evaluate(t(1.0), inf) - 0.5).abs() < 1e-15);
        let money = u(Family::LinearMoney {
            revenue: 10.0,
            cost_fixed: 0.0,
            cost_rate: 1.0,
        });
        assert!((money.evaluate(t(2.0), t(5.0)) - 13.0 / 15.0).abs() < 1e-15);
        assert_eq!(money.evaluate(t(0.0), t(5.0)), 1.0);
    }

    #[test]
    fn infinite_runtime_is_worth_c0() {
        let e = UtilityFunction::affine(Family::Exponential { kappa0: 1.0 }, 2.0, 3.0).unwrap();
        assert_eq!(e.evaluate(ExtendedTime::INFINITY, t(1.0)), 3.0);
    }

    #[test]
    fn step_is_strict_at_captime() {
        let s = u(Family::Step);
        assert_eq!(s.evaluate(t(0.999), t(1.0)), 1.0);
        assert_eq!(s.evaluate(t(1.0), t(1.0)), 0.0);
    }

    #[test]
    fn inverses() {
        let e = u(Family::Exponential { kappa0: 1.0 });
        assert!((e.inverse(0.05).unwrap().seconds() + 0.05f64.ln()).abs() < 1e-12);
        assert!((u(Family::Uniform { kappa0: 10.0 }).inverse(0.5).unwrap().seconds() - 5.0).abs() < 1e-12);
        let p = u(Family::Pareto { kappa0: 1.0, alpha: 2.0 });
        assert!((p.inverse(0.25).unwrap().seconds() - 2.0).abs() < 1e-12);
        assert!(matches!(u(Family::Step).inverse(0.5), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn pareto_head_is_flat() {
        let p = u(Family::Pareto { kappa0: 3.0, alpha: 2.0 });
        assert_eq!(p.inverse(1.0).unwrap().seconds(), 3.0);
        assert!(p.flat_region(1.0));
        assert!(!p.flat_region(0.5));
        let ll = u(Family::LogLaplace { kappa0: 3.0, alpha: 2.0 });
        assert_eq!(ll.inverse(1.0).unwrap().seconds(), 0.0);
        assert!(!ll.flat_region(1.0));
    }

    #[test]
    fn p_truncates_at_captime() {
        let e = u(Family::Exponential { kappa0: 1.0 });
        assert!((e.p(t(0.5), t(2.0)) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(e.p(t(2.0), t(2.0)), 0.0);
        assert_eq!(e.p(t(3.0), t(2.0)), 0.0);
    }

    #[test]
    fn continuity_check() {
        let ok = u(Family::SurvivalOf {
            captime: CaptimeDistribution::TwoTailLog {
                kappa0: 1.0,
                alpha: 2.0,
                beta: 1.0,
                mass_below: 2.0 / 3.0,
            },
        });
        assert!(ok.check_continuity().is_ok());
        let bad = u(Family::SurvivalOf {
            captime: CaptimeDistribution::TwoTailLog {
                kappa0: 1.0,
                alpha: 2.0,
                beta: 1.0,
                mass_below: 0.5,
            },
        });
        assert!(bad.check_continuity().is_err());
    }

    #[test]
    fn quality_product() {
        let uq = QualityUtilityFunction::new(u(Family::Step), 0.0, 1.0, QualityWeight::Linear).unwrap();
        assert_eq!(uq.evaluate_quality(t(1.0), 0.5, t(2.0)).unwrap(), 0.5);
        assert_eq!(uq.evaluate_quality(t(0.0), 1.0, t(2.0)).unwrap(), 1.0);
        assert_eq!(uq.evaluate_quality(t(0.0), 0.0, t(2.0)).unwrap(), 0.0);
        assert!(matches!(
            uq.evaluate_quality(t(0.0), 1.5, t(2.0)),
            Err(Error::QualityOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(UtilityFunction::new(Family::Pareto { kappa0: 0.0, alpha: 1.0 }).is_err());
        assert!(UtilityFunction::affine(Family::Step, 0.0, 0.0).is_err());
        assert!(UtilityFunction::new(Family::LinearMoney {
            revenue: 0.0,
            cost_fixed: 0.0,
            cost_rate: 1.0
        })
        .is_err());
    }
}
