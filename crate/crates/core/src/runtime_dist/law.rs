//! Absolutely continuous laws shared by runtime and captime distributions.

use rand::Rng;
use statrs::function::erf::{erfc, erfc_inv};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Law {
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Weibull { shape: f64, scale: f64 },
    Pareto { xmin: f64, alpha: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Power law below `kappa0` with `mass_below` of the mass, Pareto tail above.
    TwoTailLog {
        kappa0: f64,
        alpha: f64,
        beta: f64,
        mass_below: f64,
    },
    /// Piecewise-constant density; `masses[i]` lives on `[edges[i], edges[i+1])`.
    Piecewise { edges: Vec<f64>, masses: Vec<f64> },
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

impl Law {
    pub fn support(&self) -> (f64, f64) {
        match self {
            Law::Exponential { .. } | Law::Weibull { .. } => (0.0, f64::INFINITY),
            Law::LogNormal { .. } | Law::TwoTailLog { .. } => (0.0, f64::INFINITY),
            Law::Pareto { xmin, .. } => (*xmin, f64::INFINITY),
            Law::Uniform { lo, hi } => (*lo, *hi),
            Law::Piecewise { edges, .. } => (edges[0], edges[edges.len() - 1]),
        }
    }

    /// Points where the density is discontinuous or not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Law::Pareto { xmin, .. } => vec![*xmin],
            Law::Uniform { lo, hi } => vec![*lo, *hi],
            Law::TwoTailLog { kappa0, .. } => vec![*kappa0],
            Law::Piecewise { edges, .. } => edges.clone(),
            _ => Vec::new(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x.is_infinite() {
            return 0.0;
        }
        match self {
            Law::Exponential { rate } => rate * (-rate * x).exp(),
            Law::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (x.ln() - mu) / sigma;
                (-0.5 * z * z).exp() / (x * sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Law::Weibull { shape, scale } => {
                if x <= 0.0 {
                    return if *shape == 1.0 { 1.0 / scale } else { 0.0 };
                }
                let r = x / scale;
                shape / scale * r.powf(shape - 1.0) * (-r.powf(*shape)).exp()
            }
            Law::Pareto { xmin, alpha } => {
                if x < *xmin {
                    0.0
                } else {
                    alpha / xmin * (xmin / x).powf(alpha + 1.0)
                }
            }
            Law::Uniform { lo, hi } => {
                if x < *lo || x >= *hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            Law::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            } => {
                if x < *kappa0 {
                    mass_below * beta / kappa0 * (x / kappa0).powf(beta - 1.0)
                } else {
                    (1.0 - mass_below) * alpha / kappa0 * (kappa0 / x).powf(alpha + 1.0)
                }
            }
            Law::Piecewise { edges, masses } => match cell_of(edges, x) {
                Some(i) => masses[i] / (edges[i + 1] - edges[i]),
                None => 0.0,
            },
        }
    }

    /// `P(X <= x)`. All laws are atomless, so this is also `P(X < x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return 1.0;
        }
        match self {
            Law::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_sf(-(x.ln() - mu) / sigma)
                }
            }
            Law::TwoTailLog {
                kappa0,
                beta,
                mass_below,
                ..
            } if x < *kappa0 => {
                if x <= 0.0 {
                    0.0
                } else {
                    mass_below * (x / kappa0).powf(*beta)
                }
            }
            Law::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Law::Piecewise { edges, masses } => {
                if x <= edges[0] {
                    return 0.0;
                }
                let mut acc = 0.0;
                for i in 0..masses.len() {
                    if x >= edges[i + 1] {
                        acc += masses[i];
                    } else {
                        acc += masses[i] * (x - edges[i]) / (edges[i + 1] - edges[i]);
                        break;
                    }
                }
                acc.min(1.0)
            }
            _ => 1.0 - self.sf(x),
        }
    }

    /// `P(X > x)`, computed directly where that is more accurate than `1 - cdf`.
    pub fn sf(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        if x < 0.0 {
            return 1.0;
        }
        match self {
            Law::Exponential { rate } => (-rate * x).exp(),
            Law::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    std_normal_sf((x.ln() - mu) / sigma)
                }
            }
            Law::Weibull { shape, scale } => (-(x / scale).powf(*shape)).exp(),
            Law::Pareto { xmin, alpha } => {
                if x <= *xmin {
                    1.0
                } else {
                    (xmin / x).powf(*alpha)
                }
            }
            Law::TwoTailLog {
                kappa0,
                alpha,
                mass_below,
                ..
            } if x >= *kappa0 => (1.0 - mass_below) * (kappa0 / x).powf(*alpha),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Smallest `x` with `cdf(x) >= p`, for `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Law::Exponential { rate } => -(-p).ln_1p() / rate,
            Law::LogNormal { mu, sigma } => (mu + sigma * std_normal_quantile(p)).exp(),
            Law::Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            Law::Pareto { xmin, alpha } => xmin * (1.0 - p).powf(-1.0 / alpha),
            Law::Uniform { lo, hi } => lo + p * (hi - lo),
            Law::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            } => {
                if p <= *mass_below {
                    kappa0 * (p / mass_below).powf(1.0 / beta)
                } else {
                    kappa0 * ((1.0 - mass_below) / (1.0 - p)).powf(1.0 / alpha)
                }
            }
            Law::Piecewise { edges, masses } => {
                let mut acc = 0.0;
                for i in 0..masses.len() {
                    if masses[i] > 0.0 && acc + masses[i] >= p {
                        let frac = ((p - acc) / masses[i]).clamp(0.0, 1.0);
                        return edges[i] + frac * (edges[i + 1] - edges[i]);
                    }
                    acc += masses[i];
                }
                edges[edges.len() - 1]
            }
        }
    }

    /// `sup { x : cdf(x) <= p }`; differs from [`Law::quantile`] only across
    /// zero-density stretches inside the support.
    pub fn upper_quantile(&self, p: f64) -> f64 {
        match self {
            Law::Piecewise { edges, masses } => {
                let mut acc = 0.0;
                for i in 0..masses.len() {
                    if masses[i] > 0.0 && acc + masses[i] > p {
                        let frac = ((p - acc) / masses[i]).clamp(0.0, 1.0);
                        return edges[i] + frac * (edges[i + 1] - edges[i]);
                    }
                    acc += masses[i];
                }
                edges[edges.len() - 1]
            }
            _ if p <= 0.0 => self.support().0,
            _ => self.quantile(p),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Law::Exponential { rate } => 1.0 / rate,
            Law::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Law::Weibull { shape, scale } => scale * statrs::function::gamma::gamma(1.0 + 1.0 / shape),
            Law::Pareto { xmin, alpha } => {
                if *alpha <= 1.0 {
                    f64::INFINITY
                } else {
                    alpha * xmin / (alpha - 1.0)
                }
            }
            Law::Uniform { lo, hi } => 0.5 * (lo + hi),
            Law::TwoTailLog {
                kappa0,
                alpha,
                beta,
                mass_below,
            } => {
                if *alpha <= 1.0 {
                    f64::INFINITY
                } else {
                    mass_below * kappa0 * beta / (beta + 1.0)
                        + (1.0 - mass_below) * kappa0 * alpha / (alpha - 1.0)
                }
            }
            Law::Piecewise { edges, masses } => masses
                .iter()
                .enumerate()
                .map(|(i, m)| m * 0.5 * (edges[i] + edges[i + 1]))
                .sum(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // (0, 1]: keeps the quantile finite at both ends for the usual laws
        let u = 1.0 - rng.random::<f64>();
        let u = u.min(1.0 - f64::EPSILON / 2.0);
        self.quantile(u)
    }
}

fn cell_of(edges: &[f64], x: f64) -> Option<usize> {
    if x < edges[0] || x >= edges[edges.len() - 1] {
        return None;
    }
    let i = edges.partition_point(|e| *e <= x);
    Some(i - 1)
}
