//! The compounding operation `[M(t, κ) | t ~ A, κ ~ K]` on a finite grid.

use std::collections::BTreeMap;

use super::{CaptimeDistribution, RuntimeDistribution};
use crate::quadrature::Decomposition;
use crate::{Error, ExtendedTime, Result};

/// Largest probability mass that may be dropped when truncating to the grid.
pub const TAIL_BOUND: f64 = 1e-9;

/// Grid used to discretize continuous parts before compounding.
///
/// Mass of a continuous part on `(x[i-1], x[i]]` is placed on `x[i]`, so the
/// discretized CDF agrees with the original at every grid point. Mass below
/// the first point goes to the first point; mass above the last point is
/// dropped and must stay below [`TAIL_BOUND`].
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    points: Vec<f64>,
}

impl Discretization {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::bad("grid points must be finite and nonnegative"));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        if points.is_empty() {
            return Err(Error::bad("grid needs at least one point"));
        }
        Ok(Discretization { points })
    }

    /// `n` log-spaced points on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(Error::bad("log grid needs 0 < lo < hi and n >= 2"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let pts = (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect();
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

impl Default for Discretization {
    /// 2048 log-spaced points spanning `[1e-6, 1e6]` seconds.
    fn default() -> Self {
        Self::log_spaced(1e-6, 1e6, 2048).expect("valid default grid")
    }
}

/// Result of [`compound`]: a discrete distribution plus the mass lost to truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Compounded {
    pub distribution: RuntimeDistribution,
    pub truncated_mass: f64,
}

struct Atoms {
    atoms: Vec<(ExtendedTime, f64)>,
    truncated: f64,
}

fn discretize(d: Decomposition, grid: &Discretization) -> Atoms {
    let mut atoms = d.atoms;
    let mut truncated = d.dropped;
    let pts = grid.points();
    for (w, law) in d.parts {
        let mut prev = 0.0;
        for &x in pts {
            let f = law.cdf(x);
            let m = w * (f - prev);
            if m > 0.0 {
                atoms.push((ExtendedTime::secs(x), m));
            }
            prev = f;
        }
        truncated += w * law.sf(pts[pts.len() - 1]);
    }
    Atoms { atoms, truncated }
}

/// Builds `[M(t, κ) | t ~ a, κ ~ k]`.
///
/// Atoms of `a` and `k` are kept exactly; continuous parts are discretized on
/// `grid`. Each `M(t, κ)` is discretized the same way. The output is
/// renormalized after truncation; the dropped mass is reported and must not
/// exceed [`TAIL_BOUND`], otherwise `NonDiscretizable` is returned.
pub fn compound<M>(
    map: M,
    a: &RuntimeDistribution,
    k: &CaptimeDistribution,
    grid: &Discretization,
) -> Result<Compounded>
where
    M: Fn(ExtendedTime, ExtendedTime) -> Result<RuntimeDistribution>,
{
    let ta = discretize(a.decompose(), grid);
    let tk = discretize(k.decompose(), grid);
    let mut truncated = ta.truncated + tk.truncated;
    if truncated > TAIL_BOUND {
        return Err(Error::NonDiscretizable(format!(
            "{truncated:e} of the mass lies beyond the grid"
        )));
    }

    let mut out: BTreeMap<ExtendedTime, f64> = BTreeMap::new();
    for &(t, pt) in &ta.atoms {
        for &(kappa, pk) in &tk.atoms {
            let inner = discretize(map(t, kappa)?.decompose(), grid);
            let w = pt * pk;
            truncated += w * inner.truncated;
            for (x, px) in inner.atoms {
                *out.entry(x).or_insert(0.0) += w * px;
            }
        }
    }
    if truncated > TAIL_BOUND {
        return Err(Error::NonDiscretizable(format!(
            "{truncated:e} of the compound mass lies beyond the grid"
        )));
    }

    let total: f64 = out.values().sum();
    if (total + truncated - 1.0).abs() > TAIL_BOUND {
        return Err(Error::NonDiscretizable(format!(
            "compound mass {total} does not balance (truncated {truncated:e})"
        )));
    }
    let points: Vec<_> = out
        .into_iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(x, p)| (x, p / total))
        .collect();
    let distribution = if points.len() == 1 {
        RuntimeDistribution::Dirac { t: points[0].0 }
    } else {
        RuntimeDistribution::DiscreteEmpirical { points }
    };
    Ok(Compounded {
        distribution,
        truncated_mass: truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime_dist::mix;

    fn t(x: f64) -> ExtendedTime {
        ExtendedTime::secs(x)
    }

    #[test]
    fn constant_map_gives_constant() {
        let a = RuntimeDistribution::dirac(1.0).unwrap();
        let k = CaptimeDistribution::dirac(10.0).unwrap();
        let c = compound(|_, _| RuntimeDistribution::dirac(7.0), &a, &k, &Discretization::default()).unwrap();
        assert_eq!(c.distribution, RuntimeDistribution::dirac(7.0).unwrap());
    }

    #[test]
    fn identity_map_on_discrete_input() {
        let a = RuntimeDistribution::discrete(vec![(t(0.5), 0.25), (t(3.0), 0.5), (ExtendedTime::INFINITY, 0.25)])
            .unwrap();
        let k = CaptimeDistribution::Discrete {
            points: vec![(t(1.0), 0.5), (t(2.0), 0.5)],
        };
        let c = compound(|t, _| Ok(RuntimeDistribution::Dirac { t }), &a, &k, &Discretization::default()).unwrap();
        for x in [0.0, 0.5, 1.0, 3.0, 10.0] {
            assert!((c.distribution.cdf(t(x)) - a.cdf(t(x))).abs() < 1e-12);
        }
        assert!((c.distribution.mass_at_infinity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn identity_map_on_continuous_input_agrees_at_grid_points() {
        let a = RuntimeDistribution::LogNormal { mu: 0.0, sigma: 1.0 };
        let k = CaptimeDistribution::dirac(2.0).unwrap();
        let grid = Discretization::default();
        let c = compound(|t, _| Ok(RuntimeDistribution::Dirac { t }), &a, &k, &grid).unwrap();
        assert!(c.truncated_mass < TAIL_BOUND);
        let sup = grid
            .points()
            .iter()
            .map(|&x| (c.distribution.cdf(t(x)) - a.cdf(t(x))).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-9, "sup distance {sup}");
    }

    #[test]
    fn step_mixture_map() {
        // p(1, 2) = 1 under the step utility, so every run becomes instant
        let a = RuntimeDistribution::dirac(1.0).unwrap();
        let k = CaptimeDistribution::dirac(2.0).unwrap();
        let zero = RuntimeDistribution::dirac(0.0).unwrap();
        let inf = RuntimeDistribution::Dirac { t: ExtendedTime::INFINITY };
        let c = compound(
            |t, kappa| mix(if t < kappa { 1.0 } else { 0.0 }, &zero, &inf),
            &a,
            &k,
            &Discretization::default(),
        )
        .unwrap();
        assert_eq!(c.distribution, zero);
    }

    #[test]
    fn heavy_tail_is_not_discretizable() {
        let a = RuntimeDistribution::Pareto { xmin: 1.0, alpha: 0.5 };
        let k = CaptimeDistribution::dirac(2.0).unwrap();
        let r = compound(|t, _| Ok(RuntimeDistribution::Dirac { t }), &a, &k, &Discretization::default());
        assert!(matches!(r, Err(Error::NonDiscretizable(_))));
    }
}
