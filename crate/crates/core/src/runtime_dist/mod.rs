//! Runtime and captime distributions.
//!
//! Runtime distributions live on `[0, ∞]` and may put mass on `∞` (runs that
//! never terminate); their CDF then tends to something below 1 on the finite
//! half line and reaches 1 only at `INFINITY`. All CDFs are right-continuous,
//! `F(t) = P(X <= t)`, including at atoms.

mod captime;
mod compound;
pub(crate) mod law;

use std::io::Read;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use captime::CaptimeDistribution;
pub use compound::{compound, Compounded, Discretization};

use crate::quadrature::Decomposition;
use crate::{Error, ExtendedTime, Result};
use law::Law;

/// Tolerance on the total weight of discrete and mixture distributions.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Largest St. Petersburg exponent enumerated explicitly; the remaining mass
/// is `2^-57`.
const ST_PETERSBURG_ATOMS: i32 = 57;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RuntimeDistribution {
    Dirac { t: ExtendedTime },
    DiscreteEmpirical { points: Vec<(ExtendedTime, f64)> },
    /// `P(t = 2^k) = 2^-k` for `k >= 1`.
    StPetersburg,
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Weibull { shape: f64, scale: f64 },
    Pareto { xmin: f64, alpha: f64 },
    Mixture { components: Vec<(f64, RuntimeDistribution)> },
}

fn check_weights<'a>(weights: impl Iterator<Item = &'a f64>, what: &str) -> Result<()> {
    let mut total = 0.0;
    let mut any = false;
    for &w in weights {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::bad(format!("{what} weights must be strictly positive, got {w}")));
        }
        total += w;
        any = true;
    }
    if !any {
        return Err(Error::bad(format!("{what} needs at least one point")));
    }
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::bad(format!("{what} weights sum to {total}, not 1")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::bad(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RuntimeDistribution {
    pub fn dirac(t: f64) -> Result<Self> {
        Ok(RuntimeDistribution::Dirac { t: ExtendedTime::new(t)? })
    }

    pub fn discrete(points: Vec<(ExtendedTime, f64)>) -> Result<Self> {
        let d = RuntimeDistribution::DiscreteEmpirical { points };
        d.validate()?;
        Ok(d)
    }

    pub fn mixture(components: Vec<(f64, RuntimeDistribution)>) -> Result<Self> {
        let d = RuntimeDistribution::Mixture { components };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RuntimeDistribution::Dirac { .. } | RuntimeDistribution::StPetersburg => Ok(()),
            RuntimeDistribution::DiscreteEmpirical { points } => {
                check_weights(points.iter().map(|(_, p)| p), "discrete distribution")
            }
            RuntimeDistribution::Exponential { rate } => positive("rate", *rate),
            RuntimeDistribution::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::bad("mu must be finite"));
                }
                positive("sigma", *sigma)
            }
            RuntimeDistribution::Weibull { shape, scale } => {
                positive("shape", *shape)?;
                positive("scale", *scale)
            }
            RuntimeDistribution::Pareto { xmin, alpha } => {
                positive("xmin", *xmin)?;
                positive("alpha", *alpha)
            }
            RuntimeDistribution::Mixture { components } => {
                check_weights(components.iter().map(|(w, _)| w), "mixture")?;
                components.iter().try_for_each(|(_, c)| c.validate())
            }
        }
    }

    pub(crate) fn law(&self) -> Option<Law> {
        Some(match *self {
            RuntimeDistribution::Exponential { rate } => Law::Exponential { rate },
            RuntimeDistribution::LogNormal { mu, sigma } => Law::LogNormal { mu, sigma },
            RuntimeDistribution::Weibull { shape, scale } => Law::Weibull { shape, scale },
            RuntimeDistribution::Pareto { xmin, alpha } => Law::Pareto { xmin, alpha },
            _ => return None,
        })
    }

    /// `P(X <= t)`; `cdf(INFINITY) = 1`.
    pub fn cdf(&self, t: ExtendedTime) -> f64 {
        if t.is_infinite() {
            return 1.0;
        }
        let x = t.seconds();
        match self {
            RuntimeDistribution::Dirac { t: at } => {
                if *at <= t {
                    1.0
                } else {
                    0.0
                }
            }
            RuntimeDistribution::DiscreteEmpirical { points } => {
                let s: f64 = points.iter().filter(|(p, _)| *p <= t).map(|(_, w)| w).sum();
                s.min(1.0)
            }
            RuntimeDistribution::StPetersburg => st_petersburg_cdf(x),
            RuntimeDistribution::Mixture { components } => {
                let s: f64 = components.iter().map(|(w, c)| w * c.cdf(t)).sum();
                s.min(1.0)
            }
            _ => self.law().map_or(0.0, |l| l.cdf(x)),
        }
    }

    /// `P(X < t)`, the left limit of the CDF.
    pub fn cdf_below(&self, t: ExtendedTime) -> f64 {
        match self {
            RuntimeDistribution::Dirac { t: at } => {
                if *at < t {
                    1.0
                } else {
                    0.0
                }
            }
            RuntimeDistribution::DiscreteEmpirical { points } => {
                let s: f64 = points.iter().filter(|(p, _)| *p < t).map(|(_, w)| w).sum();
                s.min(1.0)
            }
            RuntimeDistribution::StPetersburg => {
                if t.is_infinite() {
                    1.0
                } else {
                    let x = t.seconds();
                    let below = st_petersburg_cdf(x);
                    // remove the atom at x itself, if x is a power of two
                    match power_of_two_exponent(x) {
                        Some(k) if k >= 1 => below - 2f64.powi(-k),
                        _ => below,
                    }
                }
            }
            RuntimeDistribution::Mixture { components } => {
                let s: f64 = components.iter().map(|(w, c)| w * c.cdf_below(t)).sum();
                s.min(1.0)
            }
            _ => {
                if t.is_infinite() {
                    1.0
                } else {
                    self.law().map_or(0.0, |l| l.cdf(t.seconds()))
                }
            }
        }
    }

    /// Probability of never terminating.
    pub fn mass_at_infinity(&self) -> f64 {
        1.0 - self.cdf_below(ExtendedTime::INFINITY)
    }

    /// Expected runtime; `INFINITY` when the mean diverges or mass sits at infinity.
    pub fn mean(&self) -> f64 {
        match self {
            RuntimeDistribution::Dirac { t } => t.seconds(),
            RuntimeDistribution::DiscreteEmpirical { points } => {
                points.iter().map(|(t, w)| w * t.seconds()).sum()
            }
            RuntimeDistribution::StPetersburg => f64::INFINITY,
            RuntimeDistribution::Mixture { components } => {
                components.iter().map(|(w, c)| w * c.mean()).sum()
            }
            _ => self.law().map_or(f64::NAN, |l| l.mean()),
        }
    }

    /// Draws one runtime. Deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtendedTime {
        match self {
            RuntimeDistribution::Dirac { t } => *t,
            RuntimeDistribution::DiscreteEmpirical { points } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (t, w) in points {
                    acc += w;
                    if u < acc {
                        return *t;
                    }
                }
                points[points.len() - 1].0
            }
            RuntimeDistribution::StPetersburg => {
                let mut k = 1i32;
                loop {
                    let bits: u64 = rng.random();
                    if bits == 0 {
                        k += 64;
                        continue;
                    }
                    k += bits.trailing_zeros() as i32;
                    break;
                }
                ExtendedTime::secs(2f64.powi(k))
            }
            RuntimeDistribution::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, c) in components {
                    acc += w;
                    if u < acc {
                        return c.sample(rng);
                    }
                }
                components[components.len() - 1].1.sample(rng)
            }
            _ => {
                let law = self.law().expect("continuous variant");
                ExtendedTime::new(law.sample(rng)).unwrap_or(ExtendedTime::INFINITY)
            }
        }
    }

    pub(crate) fn decompose(&self) -> Decomposition {
        match self {
            RuntimeDistribution::Dirac { t } => Decomposition::atom(*t),
            RuntimeDistribution::DiscreteEmpirical { points } => Decomposition {
                atoms: points.clone(),
                ..Default::default()
            },
            RuntimeDistribution::StPetersburg => {
                let atoms: Vec<_> = (1..=ST_PETERSBURG_ATOMS)
                    .map(|k| (ExtendedTime::secs(2f64.powi(k)), 2f64.powi(-k)))
                    .collect();
                Decomposition {
                    atoms,
                    parts: Vec::new(),
                    dropped: 2f64.powi(-ST_PETERSBURG_ATOMS),
                }
            }
            RuntimeDistribution::Mixture { components } => {
                let mut d = Decomposition::default();
                for (w, c) in components {
                    d.merge(c.decompose().scaled(*w));
                }
                d
            }
            _ => Decomposition::law(self.law().expect("continuous variant")),
        }
    }

    /// Point masses of a purely atomic distribution, merged and sorted.
    /// `None` if any mass is continuous or left out of the enumeration.
    pub fn atoms(&self) -> Option<Vec<(ExtendedTime, f64)>> {
        let d = self.decompose();
        if !d.parts.is_empty() || d.dropped > 0.0 {
            return None;
        }
        let mut merged: std::collections::BTreeMap<ExtendedTime, f64> = Default::default();
        for (t, w) in d.atoms {
            *merged.entry(t).or_insert(0.0) += w;
        }
        Some(merged.into_iter().collect())
    }

    /// Reads a discrete distribution from CSV with header
    /// `runtime_seconds,probability`; `inf` marks non-terminating mass.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| parse_err(1, e))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["runtime_seconds", "probability"] {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `runtime_seconds,probability`".into(),
            });
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| parse_err(line, e))?;
            let t: ExtendedTime = rec[0].parse().map_err(|e: Error| parse_err(line, e))?;
            let p: f64 = rec[1].parse().map_err(|e| parse_err(line, e))?;
            points.push((t, p));
        }
        Self::discrete(points)
    }
}

pub(crate) fn parse_err(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// `[p : a, (1 - p) : b]`, the distribution that runs `a` with probability `p`.
pub fn mix(p: f64, a: &RuntimeDistribution, b: &RuntimeDistribution) -> Result<RuntimeDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::bad(format!("mixing weight {p} outside [0, 1]")));
    }
    let mut components = Vec::with_capacity(2);
    if p > 0.0 {
        components.push((p, a.clone()));
    }
    if p < 1.0 {
        components.push((1.0 - p, b.clone()));
    }
    Ok(RuntimeDistribution::Mixture { components })
}

fn st_petersburg_cdf(x: f64) -> f64 {
    if x < 2.0 {
        return 0.0;
    }
    let k = floor_log2(x);
    1.0 - 2f64.powi(-k)
}

/// Largest `k` with `2^k <= x`, for `x >= 1`.
fn floor_log2(x: f64) -> i32 {
    let mut k = x.log2().floor() as i32;
    while 2f64.powi(k + 1) <= x {
        k += 1;
    }
    while 2f64.powi(k) > x {
        k -= 1;
    }
    k
}

fn power_of_two_exponent(x: f64) -> Option<i32> {
    if x < 1.0 || !x.is_finite() {
        return None;
    }
    let k = floor_log2(x);
    (2f64.powi(k) == x).then_some(k)
}
