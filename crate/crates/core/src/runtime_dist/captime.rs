use rand::Rng;
use serde::{Deserialize, Serialize};

use super::law::Law;
use super::{check_weights, positive};
use crate::quadrature::Decomposition;
use crate::{Error, ExtendedTime, Result};

/// Distribution `K` of the captime `κ`.
///
/// Besides point masses this covers every maximum-entropy family used to
/// model an uncertain deadline, plus a piecewise-constant density on a grid
/// (the output of the numerical maxent solver).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CaptimeDistribution {
    Dirac { kappa: ExtendedTime },
    Discrete { points: Vec<(ExtendedTime, f64)> },
    /// Uniform on `[0, kappa0]`.
    Uniform { kappa0: f64 },
    /// Exponential with mean `kappa0`.
    Exponential { kappa0: f64 },
    Pareto { kappa0: f64, alpha: f64 },
    LogLaplace { kappa0: f64, alpha: f64 },
    GeneralizedLogLaplace { kappa0: f64, alpha: f64, beta: f64 },
    /// Two-tailed log-power law with an arbitrary split of mass at `kappa0`.
    /// Its density is continuous at `kappa0` only when
    /// `mass_below = alpha / (alpha + beta)`, which is the generalized
    /// log-Laplace case.
    TwoTailLog {
        kappa0: f64,
        alpha: f64,
        beta: f64,
        mass_below: f64,
    },
    /// `log κ ~ Normal(log kappa0, sigma²)`.
    LogNormal { kappa0: f64, sigma: f64 },
    /// Uniform density `delta / kappa1` on `[0, kappa1]`, then
    /// `(1 - delta) / (kappa0 - kappa1)` on `(kappa1, kappa0]`.
    PiecewiseTail { kappa0: f64, kappa1: f64, delta: f64 },
    /// Piecewise-constant density; `density[i]` applies on `[edges[i], edges[i+1])`.
    GridEmpirical { edges: Vec<f64>, density: Vec<f64> },
}

impl CaptimeDistribution {
    pub fn dirac(kappa: f64) -> Result<Self> {
        let k = ExtendedTime::new(kappa)?;
        let d = CaptimeDistribution::Dirac { kappa: k };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        use CaptimeDistribution::*;
        match self {
            Dirac { kappa } => {
                if kappa.seconds() > 0.0 {
                    Ok(())
                } else {
                    Err(Error::bad("captime must be positive"))
                }
            }
            Discrete { points } => {
                if points.iter().any(|(k, _)| k.seconds() <= 0.0) {
                    return Err(Error::bad("captime atoms must be positive"));
                }
                check_weights(points.iter().map(|(_, p)| p), "captime distribution")
            }
            Uniform { kappa0 } | Exponential { kappa0 } => positive("kappa0", *kappa0),
            Pareto { kappa0, alpha } | LogLaplace { kappa0, alpha } => {
                positive("kappa0", *kappa0)?;
                positive("alpha", *alpha)
            }
            GeneralizedLogLaplace { kappa0, alpha, beta } => {
                positive("kappa0", *kappa0)?;
                positive("alpha", *alpha)?;
                positive("beta", *beta)
            }
            TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            } => {
                positive("kappa0", *kappa0)?;
                positive("alpha", *alpha)?;
                positive("beta", *beta)?;
                if *mass_below > 0.0 && *mass_below < 1.0 {
                    Ok(())
                } else {
                    Err(Error::bad("mass_below must lie in (0, 1)"))
                }
            }
            LogNormal { kappa0, sigma } => {
                positive("kappa0", *kappa0)?;
                positive("sigma", *sigma)
            }
            PiecewiseTail { kappa0, kappa1, delta } => {
                positive("kappa0", *kappa0)?;
                positive("kappa1", *kappa1)?;
                if kappa1 >= kappa0 {
                    return Err(Error::bad("piecewise tail needs 0 < kappa1 < kappa0"));
                }
                if !(0.0..=1.0).contains(delta) {
                    return Err(Error::bad("delta must lie in [0, 1]"));
                }
                Ok(())
            }
            GridEmpirical { edges, density } => {
                if edges.len() != density.len() + 1 || density.is_empty() {
                    return Err(Error::bad("grid needs len(edges) = len(density) + 1"));
                }
                if edges.windows(2).any(|w| !(w[1] > w[0])) || edges[0] < 0.0 {
                    return Err(Error::bad("grid edges must be nonnegative and strictly increasing"));
                }
                if density.iter().any(|d| !(*d >= 0.0)) {
                    return Err(Error::bad("densities must be nonnegative"));
                }
                let total: f64 = density
                    .iter()
                    .zip(edges.windows(2))
                    .map(|(d, w)| d * (w[1] - w[0]))
                    .sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::bad(format!("grid density integrates to {total}")));
                }
                Ok(())
            }
        }
    }

    pub(crate) fn law(&self) -> Option<Law> {
        use CaptimeDistribution::*;
        Some(match *self {
            Uniform { kappa0 } => Law::Uniform { lo: 0.0, hi: kappa0 },
            Exponential { kappa0 } => Law::Exponential { rate: 1.0 / kappa0 },
            Pareto { kappa0, alpha } => Law::Pareto { xmin: kappa0, alpha },
            LogLaplace { kappa0, alpha } => Law::TwoTailLog {
                kappa0,
                alpha,
                beta: alpha,
                mass_below: 0.5,
            },
            GeneralizedLogLaplace { kappa0, alpha, beta } => Law::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below: alpha / (alpha + beta),
            },
            TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            } => Law::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            },
            LogNormal { kappa0, sigma } => Law::LogNormal { mu: kappa0.ln(), sigma },
            PiecewiseTail { kappa0, kappa1, delta } => Law::Piecewise {
                edges: vec![0.0, kappa1, kappa0],
                masses: vec![delta, 1.0 - delta],
            },
            GridEmpirical {
                ref edges,
                ref density,
            } => Law::Piecewise {
                edges: edges.clone(),
                masses: density
                    .iter()
                    .zip(edges.windows(2))
                    .map(|(d, w)| d * (w[1] - w[0]))
                    .collect(),
            },
            Dirac { .. } | Discrete { .. } => return None,
        })
    }

    pub(crate) fn decompose(&self) -> Decomposition {
        match self {
            CaptimeDistribution::Dirac { kappa } => Decomposition::atom(*kappa),
            CaptimeDistribution::Discrete { points } => Decomposition {
                atoms: points.clone(),
                ..Default::default()
            },
            _ => Decomposition::law(self.law().expect("continuous captime")),
        }
    }

    /// `F_K(κ) = P(K <= κ)`.
    pub fn cdf(&self, kappa: ExtendedTime) -> f64 {
        if kappa.is_infinite() {
            return 1.0;
        }
        match self {
            CaptimeDistribution::Dirac { kappa: at } => (*at <= kappa) as u8 as f64,
            CaptimeDistribution::Discrete { points } => points
                .iter()
                .filter(|(k, _)| *k <= kappa)
                .map(|(_, w)| w)
                .sum::<f64>()
                .min(1.0),
            _ => self.law().expect("continuous captime").cdf(kappa.seconds()),
        }
    }

    /// `P(K > t)`: the probability that a run finishing at `t` beats the captime.
    pub fn survival(&self, t: ExtendedTime) -> f64 {
        if t.is_infinite() {
            return 0.0;
        }
        match self {
            CaptimeDistribution::Dirac { .. } | CaptimeDistribution::Discrete { .. } => 1.0 - self.cdf(t),
            _ => self.law().expect("continuous captime").sf(t.seconds()),
        }
    }

    /// `sup { t : F_K(t) <= p }` for `p` in `[0, 1)`.
    pub fn upper_quantile(&self, p: f64) -> ExtendedTime {
        match self {
            CaptimeDistribution::Dirac { kappa } => *kappa,
            CaptimeDistribution::Discrete { points } => {
                let mut sorted = points.clone();
                sorted.sort_by(|a, b| a.0.cmp(&b.0));
                let mut acc = 0.0;
                for (k, w) in sorted {
                    acc += w;
                    if acc > p {
                        return k;
                    }
                }
                ExtendedTime::INFINITY
            }
            _ => {
                let law = self.law().expect("continuous captime");
                ExtendedTime::new(law.upper_quantile(p)).unwrap_or(ExtendedTime::INFINITY)
            }
        }
    }

    /// `inf { t : F_K(t) >= p }`.
    pub fn lower_quantile(&self, p: f64) -> ExtendedTime {
        if p <= 0.0 {
            return ExtendedTime::ZERO;
        }
        match self {
            CaptimeDistribution::Dirac { kappa } => *kappa,
            CaptimeDistribution::Discrete { points } => {
                let mut sorted = points.clone();
                sorted.sort_by(|a, b| a.0.cmp(&b.0));
                let mut acc = 0.0;
                for (k, w) in sorted {
                    acc += w;
                    if acc >= p {
                        return k;
                    }
                }
                ExtendedTime::INFINITY
            }
            _ => {
                let law = self.law().expect("continuous captime");
                if p >= 1.0 {
                    return ExtendedTime::new(law.support().1).unwrap_or(ExtendedTime::INFINITY);
                }
                ExtendedTime::new(law.quantile(p)).unwrap_or(ExtendedTime::INFINITY)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtendedTime {
        match self {
            CaptimeDistribution::Dirac { kappa } => *kappa,
            CaptimeDistribution::Discrete { points } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (k, w) in points {
                    acc += w;
                    if u < acc {
                        return *k;
                    }
                }
                points[points.len() - 1].0
            }
            _ => {
                let law = self.law().expect("continuous captime");
                ExtendedTime::new(law.sample(rng)).unwrap_or(ExtendedTime::INFINITY)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            CaptimeDistribution::Dirac { kappa } => kappa.seconds(),
            CaptimeDistribution::Discrete { points } => points.iter().map(|(k, w)| w * k.seconds()).sum(),
            _ => self.law().expect("continuous captime").mean(),
        }
    }

    /// Density at `kappa`; zero for atomic distributions.
    pub fn pdf(&self, kappa: f64) -> f64 {
        self.law().map_or(0.0, |l| l.pdf(kappa))
    }

    /// Points where `F_K` has an atom, a kink, or a jump in density.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.decompose().breakpoints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cdf_is_linear() {
        let k = CaptimeDistribution::Uniform { kappa0: 10.0 };
        assert_eq!(k.cdf(ExtendedTime::secs(5.0)), 0.5);
        assert_eq!(k.cdf(ExtendedTime::secs(12.0)), 1.0);
    }

    #[test]
    fn piecewise_tail_matches_closed_form() {
        let k = CaptimeDistribution::PiecewiseTail {
            kappa0: 10.0,
            kappa1: 2.0,
            delta: 0.1,
        };
        let f = |t: f64| {
            if t <= 2.0 {
                0.1 * t / 2.0
            } else {
                0.1 + 0.9 * (t - 2.0) / 8.0
            }
        };
        for t in [0.5, 2.0, 3.0, 9.0] {
            assert!((k.cdf(ExtendedTime::secs(t)) - f(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn log_laplace_splits_mass_evenly() {
        let k = CaptimeDistribution::LogLaplace { kappa0: 3.0, alpha: 2.0 };
        assert!((k.cdf(ExtendedTime::secs(3.0)) - 0.5).abs() < 1e-15);
        let g = CaptimeDistribution::GeneralizedLogLaplace {
            kappa0: 1.0,
            alpha: 2.0,
            beta: 1.0,
        };
        assert!((g.cdf(ExtendedTime::secs(1.0)) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(CaptimeDistribution::dirac(0.0).is_err());
        let bad = CaptimeDistribution::PiecewiseTail {
            kappa0: 1.0,
            kappa1: 2.0,
            delta: 0.1,
        };
        assert!(bad.validate().is_err());
        assert!(CaptimeDistribution::Pareto { kappa0: 1.0, alpha: -1.0 }.validate().is_err());
    }

    #[test]
    fn upper_quantile_of_atoms() {
        let k = CaptimeDistribution::Discrete {
            points: vec![(ExtendedTime::secs(1.0), 0.5), (ExtendedTime::secs(4.0), 0.5)],
        };
        assert_eq!(k.upper_quantile(0.2).seconds(), 1.0);
        assert_eq!(k.upper_quantile(0.5).seconds(), 4.0);
    }
}
