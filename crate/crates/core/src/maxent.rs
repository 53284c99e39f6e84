//! Maximum-entropy captime priors.
//!
//! A prior is approximated by a piecewise-constant density on a grid. Each
//! constraint is an expectation `E[g(κ)] = c` of a feature `g`, evaluated as
//! its exact average over each cell, so the constraints hold exactly for the
//! piecewise-constant density. Maximizing the discretized entropy
//! `-Σ m_i ln(m_i / w_i)` subject to them gives cell masses
//! `m_i ∝ w_i exp(-λ·g_i)`; the multipliers `λ` minimize the convex dual
//! `ln Z(λ) + λ·c`, which is done by damped Newton steps.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{CaptimeDistribution, Error, ExtendedTime, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_CELLS: usize = 2048;
pub const MIN_CELLS: usize = 512;
/// Closed-form probability left outside the grid of an unbounded problem.
pub const TRUNCATION_MASS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraint {
    /// Total mass 1; always imposed, listing it is optional.
    Normalize,
    /// Mass only on `[lo, hi]`.
    BoundedSupport { lo: f64, hi: f64 },
    /// `E[κ] = mean`.
    Mean { mean: f64 },
    /// Mass only above `kappa0`, with `E[ln(κ/κ0)] = 1/alpha`.
    LogMeanAbove { kappa0: f64, alpha: f64 },
    /// `P(κ < κ0) = p`, `E[ln(κ0/κ) | κ < κ0] = 1/beta`,
    /// `E[ln(κ/κ0) | κ >= κ0] = 1/alpha`.
    TwoTailLog { kappa0: f64, alpha: f64, beta: f64, p: f64 },
    /// `E[ln(κ/κ0)] = 0` and `E[ln(κ/κ0)²] = sigma²`.
    CenteredLogSecondMoment { kappa0: f64, sigma: f64 },
    /// `P(κ < κ1) = delta`.
    TailProbability { kappa1: f64, delta: f64 },
    /// The density is continuous at `kappa0`.
    ContinuityAt { kappa0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyProblem {
    /// Strictly increasing cell edges.
    pub edges: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Support of the closed form cut off to build the grid, if any.
    pub truncation: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEntSolution {
    /// Piecewise-constant density on the problem grid.
    pub distribution: CaptimeDistribution,
    pub masses: Vec<f64>,
    /// Discretized entropy `-Σ m ln(m / w)` in nats.
    pub entropy: f64,
    /// `E[g] - c` for each moment feature.
    pub residuals: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub iterations: usize,
    pub truncation: Option<(f64, f64)>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::bad(format!("{name} must be positive and finite, got {v}")))
    }
}

fn validate(c: &Constraint) -> Result<()> {
    match *c {
        Constraint::Normalize => Ok(()),
        Constraint::BoundedSupport { lo, hi } => {
            if lo >= 0.0 && hi > lo && hi.is_finite() {
                Ok(())
            } else {
                Err(Error::bad("bounded support needs 0 <= lo < hi < ∞"))
            }
        }
        Constraint::Mean { mean } => positive("mean", mean),
        Constraint::LogMeanAbove { kappa0, alpha } => {
            positive("kappa0", kappa0)?;
            positive("alpha", alpha)
        }
        Constraint::TwoTailLog { kappa0, alpha, beta, p } => {
            positive("kappa0", kappa0)?;
            positive("alpha", alpha)?;
            positive("beta", beta)?;
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::bad("p must lie in (0, 1)"))
            }
        }
        Constraint::CenteredLogSecondMoment { kappa0, sigma } => {
            positive("kappa0", kappa0)?;
            positive("sigma", sigma)
        }
        Constraint::TailProbability { kappa1, delta } => {
            positive("kappa1", kappa1)?;
            if (0.0..=1.0).contains(&delta) {
                Ok(())
            } else {
                Err(Error::bad("delta must lie in [0, 1]"))
            }
        }
        Constraint::ContinuityAt { kappa0 } => positive("kappa0", kappa0),
    }
}

fn describe(cs: &[Constraint]) -> String {
    let names: Vec<&str> = cs
        .iter()
        .map(|c| match c {
            Constraint::Normalize => "normalize",
            Constraint::BoundedSupport { .. } => "bounded_support",
            Constraint::Mean { .. } => "mean",
            Constraint::LogMeanAbove { .. } => "log_mean_above",
            Constraint::TwoTailLog { .. } => "two_tail_log",
            Constraint::CenteredLogSecondMoment { .. } => "centered_log_second_moment",
            Constraint::TailProbability { .. } => "tail_probability",
            Constraint::ContinuityAt { .. } => "continuity_at",
        })
        .collect();
    format!("{{{}}}", names.join(", "))
}

/// The known derivations, keyed by their constraint sets.
enum Derivation {
    Uniform { lo: f64, hi: f64 },
    Exponential { mean: f64 },
    Pareto { kappa0: f64, alpha: f64 },
    TwoTail { kappa0: f64, alpha: f64, beta: f64, p: f64, continuous: bool },
    LogNormal { kappa0: f64, sigma: f64 },
    Piecewise { kappa0: f64, kappa1: f64, delta: f64 },
}

fn classify(constraints: &[Constraint]) -> Result<Derivation> {
    for c in constraints {
        validate(c)?;
    }
    let cs: Vec<&Constraint> = constraints.iter().filter(|c| **c != Constraint::Normalize).collect();
    let unknown = || Error::UnknownConstraintSet(describe(constraints));
    use Constraint::*;
    Ok(match cs.as_slice() {
        [BoundedSupport { lo, hi }] => Derivation::Uniform { lo: *lo, hi: *hi },
        [Mean { mean }] => Derivation::Exponential { mean: *mean },
        [LogMeanAbove { kappa0, alpha }] => Derivation::Pareto {
            kappa0: *kappa0,
            alpha: *alpha,
        },
        [TwoTailLog { kappa0, alpha, beta, p }] => Derivation::TwoTail {
            kappa0: *kappa0,
            alpha: *alpha,
            beta: *beta,
            p: *p,
            continuous: false,
        },
        [TwoTailLog { kappa0, alpha, beta, p }, ContinuityAt { kappa0: at }]
        | [ContinuityAt { kappa0: at }, TwoTailLog { kappa0, alpha, beta, p }] => {
            if at != kappa0 {
                return Err(Error::bad("continuity must be imposed at the split point kappa0"));
            }
            Derivation::TwoTail {
                kappa0: *kappa0,
                alpha: *alpha,
                beta: *beta,
                p: *p,
                continuous: true,
            }
        }
        [CenteredLogSecondMoment { kappa0, sigma }] => Derivation::LogNormal {
            kappa0: *kappa0,
            sigma: *sigma,
        },
        [BoundedSupport { lo, hi }, TailProbability { kappa1, delta }]
        | [TailProbability { kappa1, delta }, BoundedSupport { lo, hi }] => {
            if *lo != 0.0 || !(kappa1 < hi) {
                return Err(unknown());
            }
            Derivation::Piecewise {
                kappa0: *hi,
                kappa1: *kappa1,
                delta: *delta,
            }
        }
        _ => return Err(unknown()),
    })
}

fn continuity_split(alpha: f64, beta: f64) -> f64 {
    alpha / (alpha + beta)
}

/// The exact maximum-entropy distribution for a known constraint set.
pub fn closed_form(constraints: &[Constraint]) -> Result<CaptimeDistribution> {
    Ok(match classify(constraints)? {
        Derivation::Uniform { lo, hi } => {
            if lo == 0.0 {
                CaptimeDistribution::Uniform { kappa0: hi }
            } else {
                CaptimeDistribution::GridEmpirical {
                    edges: vec![lo, hi],
                    density: vec![1.0 / (hi - lo)],
                }
            }
        }
        Derivation::Exponential { mean } => CaptimeDistribution::Exponential { kappa0: mean },
        Derivation::Pareto { kappa0, alpha } => CaptimeDistribution::Pareto { kappa0, alpha },
        Derivation::TwoTail {
            kappa0,
            alpha,
            beta,
            p,
            continuous,
        } => {
            let split = continuity_split(alpha, beta);
            if continuous && (p - split).abs() > 1e-12 {
                return Err(Error::Infeasible(format!(
                    "a density continuous at kappa0 puts mass {split} below it, not {p}"
                )));
            }
            if continuous || (p - split).abs() <= 1e-12 {
                if alpha == beta {
                    CaptimeDistribution::LogLaplace { kappa0, alpha }
                } else {
                    CaptimeDistribution::GeneralizedLogLaplace { kappa0, alpha, beta }
                }
            } else {
                CaptimeDistribution::TwoTailLog {
                    kappa0,
                    alpha,
                    beta,
                    mass_below: p,
                }
            }
        }
        Derivation::LogNormal { kappa0, sigma } => CaptimeDistribution::LogNormal { kappa0, sigma },
        Derivation::Piecewise { kappa0, kappa1, delta } => CaptimeDistribution::PiecewiseTail { kappa0, kappa1, delta },
    })
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect();
    v[0] = lo;
    v[n] = hi;
    v
}

/// Two grids glued at `mid`, with cells split in proportion to `share`.
fn split_grid(lo: f64, mid: f64, hi: f64, n: usize, share: f64, grid: fn(f64, f64, usize) -> Vec<f64>) -> Vec<f64> {
    let n1 = ((n as f64 * share).round() as usize).clamp(1, n - 1);
    let mut e = grid(lo, mid, n1);
    e.pop();
    e.extend(grid(mid, hi, n - n1));
    e
}

impl EntropyProblem {
    pub fn new(edges: Vec<f64>, constraints: Vec<Constraint>) -> Result<Self> {
        let p = EntropyProblem {
            edges,
            constraints,
            truncation: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// A problem on a grid fitted to the closed form: exact for bounded
    /// support, otherwise cut where the closed form leaves less than
    /// [`TRUNCATION_MASS`] outside.
    pub fn with_grid(constraints: Vec<Constraint>, cells: usize) -> Result<Self> {
        if cells < MIN_CELLS {
            return Err(Error::bad(format!("at least {MIN_CELLS} cells required")));
        }
        let tail = TRUNCATION_MASS / 2.0;
        let (edges, truncation) = match classify(&constraints)? {
            Derivation::Uniform { lo, hi } => (linear(lo, hi, cells), None),
            Derivation::Exponential { mean } => {
                let hi = -mean * TRUNCATION_MASS.ln();
                (linear(0.0, hi, cells), Some((0.0, hi)))
            }
            Derivation::Pareto { kappa0, alpha } => {
                let hi = kappa0 * TRUNCATION_MASS.powf(-1.0 / alpha);
                (logspace(kappa0, hi, cells), Some((kappa0, hi)))
            }
            Derivation::TwoTail {
                kappa0, alpha, beta, p, ..
            } => {
                let lo = kappa0 * (tail / p).powf(1.0 / beta);
                let hi = kappa0 * ((1.0 - p) / tail).powf(1.0 / alpha);
                let share = (kappa0 / lo).ln() / (hi / lo).ln();
                (split_grid(lo, kappa0, hi, cells, share, logspace), Some((lo, hi)))
            }
            Derivation::LogNormal { kappa0, sigma } => {
                let z = -crate::runtime_dist::law::std_normal_quantile(tail);
                let (lo, hi) = (kappa0 * (-z * sigma).exp(), kappa0 * (z * sigma).exp());
                (logspace(lo, hi, cells), Some((lo, hi)))
            }
            Derivation::Piecewise { kappa0, kappa1, .. } => {
                (split_grid(0.0, kappa1, kappa0, cells, kappa1 / kappa0, linear), None)
            }
        };
        let mut p = Self::new(edges, constraints)?;
        p.truncation = truncation;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.edges;
        if e.len() < MIN_CELLS + 1 {
            return Err(Error::bad(format!("grid needs at least {MIN_CELLS} cells")));
        }
        if e[0] < 0.0 || !e[e.len() - 1].is_finite() || e.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::bad("grid edges must be finite, nonnegative and strictly increasing"));
        }
        for c in &self.constraints {
            validate(c)?;
        }
        Ok(())
    }

    fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Cell average of `ln(x / k)` over `[a, b]`.
fn avg_log(a: f64, b: f64, k: f64) -> f64 {
    let prim = |x: f64| if x <= 0.0 { 0.0 } else { x * ((x / k).ln() - 1.0) };
    (prim(b) - prim(a)) / (b - a)
}

/// Cell average of `ln(x / k)²` over `[a, b]`.
fn avg_log2(a: f64, b: f64, k: f64) -> f64 {
    let prim = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            let l = (x / k).ln();
            x * (l * l - 2.0 * l + 2.0)
        }
    };
    (prim(b) - prim(a)) / (b - a)
}

/// Cell-averaged features, targets and the set of cells allowed to carry mass.
struct Features {
    rows: Vec<Vec<f64>>,
    targets: Vec<f64>,
    active: Vec<bool>,
}

fn build_features(problem: &EntropyProblem) -> Result<Features> {
    let e = &problem.edges;
    let n = e.len() - 1;
    let cells: Vec<(f64, f64)> = e.windows(2).map(|w| (w[0], w[1])).collect();
    let mut active = vec![true; n];
    let mut cols: Vec<(Vec<f64>, f64)> = Vec::new();
    let restrict = |keep: &dyn Fn(f64, f64) -> bool, active: &mut Vec<bool>| {
        for (i, &(a, b)) in cells.iter().enumerate() {
            if !keep(a, b) {
                active[i] = false;
            }
        }
    };
    // an indicator constraint at 0 or 1 becomes a support restriction
    let indicator = |at: f64, target: f64, active: &mut Vec<bool>, cols: &mut Vec<(Vec<f64>, f64)>| {
        let col: Vec<f64> = cells.iter().map(|&(a, b)| cell_fraction_below(a, b, at)).collect();
        if target == 0.0 {
            for (i, v) in col.iter().enumerate() {
                if *v > 0.0 {
                    active[i] = false;
                }
            }
        } else if target == 1.0 {
            for (i, v) in col.iter().enumerate() {
                if *v < 1.0 {
                    active[i] = false;
                }
            }
        } else {
            cols.push((col, target));
        }
    };
    for c in &problem.constraints {
        match *c {
            Constraint::Normalize | Constraint::ContinuityAt { .. } => {}
            Constraint::BoundedSupport { lo, hi } => {
                if e[0] > lo || e[n] < hi {
                    return Err(Error::bad("grid does not cover the bounded support"));
                }
                restrict(&|a, b| a >= lo - 1e-12 * hi && b <= hi * (1.0 + 1e-12), &mut active);
            }
            Constraint::Mean { mean } => {
                cols.push((cells.iter().map(|&(a, b)| 0.5 * (a + b) / mean).collect(), 1.0));
            }
            Constraint::LogMeanAbove { kappa0, alpha } => {
                restrict(&|a, _| a >= kappa0 * (1.0 - 1e-12), &mut active);
                cols.push((cells.iter().map(|&(a, b)| avg_log(a, b, kappa0)).collect(), 1.0 / alpha));
            }
            Constraint::TwoTailLog { kappa0, alpha, beta, p } => {
                if !e.iter().any(|x| (x - kappa0).abs() <= 1e-12 * kappa0) {
                    return Err(Error::bad("grid must have an edge at kappa0"));
                }
                let below: Vec<f64> = cells.iter().map(|&(_, b)| (b <= kappa0 * (1.0 + 1e-12)) as u8 as f64).collect();
                let lb: Vec<f64> = cells
                    .iter()
                    .zip(&below)
                    .map(|(&(a, b), s)| -s * avg_log(a, b, kappa0))
                    .collect();
                let la: Vec<f64> = cells
                    .iter()
                    .zip(&below)
                    .map(|(&(a, b), s)| (1.0 - s) * avg_log(a, b, kappa0))
                    .collect();
                cols.push((below, p));
                cols.push((lb, p / beta));
                cols.push((la, (1.0 - p) / alpha));
            }
            Constraint::CenteredLogSecondMoment { kappa0, sigma } => {
                cols.push((cells.iter().map(|&(a, b)| avg_log(a, b, kappa0)).collect(), 0.0));
                cols.push((
                    cells.iter().map(|&(a, b)| avg_log2(a, b, kappa0) / (sigma * sigma)).collect(),
                    1.0,
                ));
            }
            Constraint::TailProbability { kappa1, delta } => {
                indicator(kappa1, delta, &mut active, &mut cols);
            }
        }
    }
    if !active.iter().any(|a| *a) {
        return Err(Error::Infeasible("no grid cell satisfies the support constraints".into()));
    }
    let rows = (0..n).map(|i| cols.iter().map(|(c, _)| c[i]).collect()).collect();
    let targets = cols.iter().map(|(_, t)| *t).collect();
    Ok(Features { rows, targets, active })
}

/// Fraction of `[a, b]` lying below `x`.
fn cell_fraction_below(a: f64, b: f64, x: f64) -> f64 {
    ((x - a) / (b - a)).clamp(0.0, 1.0)
}

struct Dual<'a> {
    f: &'a Features,
    log_w: Vec<f64>,
}

impl Dual<'_> {
    /// Cell masses and the dual value at `lambda`.
    fn masses(&self, lambda: &[f64]) -> (Vec<f64>, f64) {
        let s: Vec<f64> = self
            .f
            .rows
            .iter()
            .zip(&self.log_w)
            .map(|(g, lw)| lw - g.iter().zip(lambda).map(|(g, l)| g * l).sum::<f64>())
            .collect();
        let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = s.iter().map(|v| (v - max).exp()).sum();
        let lse = max + z.ln();
        let m = s.iter().map(|v| (v - lse).exp()).collect();
        let dual = lse + lambda.iter().zip(&self.f.targets).map(|(l, c)| l * c).sum::<f64>();
        (m, dual)
    }

    fn moments(&self, m: &[f64]) -> Vec<f64> {
        let k = self.f.targets.len();
        let mut mu = vec![0.0; k];
        for (row, mi) in self.f.rows.iter().zip(m) {
            for j in 0..k {
                mu[j] += mi * row[j];
            }
        }
        mu
    }
}

/// Maximizes the discretized entropy subject to the problem's constraints.
pub fn solve(problem: &EntropyProblem, tol: f64) -> Result<MaxEntSolution> {
    problem.validate()?;
    let derivation = classify(&problem.constraints).ok();
    if let Some(Derivation::TwoTail {
        alpha,
        beta,
        p,
        continuous: true,
        ..
    }) = derivation
    {
        let split = continuity_split(alpha, beta);
        if (p - split).abs() > 1e-12 {
            return Err(Error::Infeasible(format!(
                "a density continuous at kappa0 puts mass {split} below it, not {p}"
            )));
        }
    }
    if problem
        .constraints
        .iter()
        .any(|c| matches!(c, Constraint::ContinuityAt { .. }))
        && !matches!(derivation, Some(Derivation::TwoTail { .. }))
    {
        return Err(Error::bad("continuity is only defined for the two-tailed log constraints"));
    }

    let full = build_features(problem)?;
    let widths = problem.widths();
    let idx: Vec<usize> = (0..widths.len()).filter(|i| full.active[*i]).collect();
    let f = Features {
        rows: idx.iter().map(|i| full.rows[*i].clone()).collect(),
        targets: full.targets.clone(),
        active: vec![true; idx.len()],
    };
    let k = f.targets.len();

    // each target must lie strictly inside the range of its feature
    for j in 0..k {
        let (lo, hi) = f
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[j]), hi.max(r[j])));
        let c = f.targets[j];
        if !(c > lo && c < hi) {
            return Err(Error::Infeasible(format!(
                "target {c} of constraint feature {j} lies outside ({lo}, {hi}) on the grid"
            )));
        }
    }

    let dual = Dual {
        f: &f,
        log_w: idx.iter().map(|i| widths[*i].ln()).collect(),
    };
    let mut lambda = vec![0.0; k];
    let (mut m, mut d) = dual.masses(&lambda);
    let mut iterations = 0;
    let mut residuals = residuals_of(&dual, &m);
    while max_abs(&residuals) > tol {
        if iterations >= MAX_ITERATIONS {
            return Err(Error::NotConverged {
                iterations,
                max_residual: max_abs(&residuals),
            });
        }
        iterations += 1;
        let mu = dual.moments(&m);
        let mut h = DMatrix::<f64>::zeros(k, k);
        for (row, mi) in f.rows.iter().zip(&m) {
            for a in 0..k {
                for b in 0..k {
                    h[(a, b)] += mi * (row[a] - mu[a]) * (row[b] - mu[b]);
                }
            }
        }
        for a in 0..k {
            h[(a, a)] += 1e-300_f64.max(1e-15 * h[(a, a)]);
        }
        // gradient of the dual is c - E[g] = -residual
        let grad = DVector::from_iterator(k, residuals.iter().map(|r| -r));
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => -&grad,
        };
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = lambda.iter().zip(step.iter()).map(|(l, s)| l + t * s).collect();
            let (mt, dt) = dual.masses(&trial);
            if dt.is_finite() && dt <= d + 1e-4 * t * slope {
                lambda = trial;
                m = mt;
                d = dt;
                break true;
            }
            t *= 0.5;
            if t < 1e-16 {
                break false;
            }
        };
        residuals = residuals_of(&dual, &m);
        if !accepted || lambda.iter().any(|l| !l.is_finite() || l.abs() > 1e12) {
            if max_abs(&residuals) <= tol {
                break;
            }
            return Err(Error::Infeasible(format!(
                "multipliers diverge (max residual {:e})",
                max_abs(&residuals)
            )));
        }
    }

    let mut masses = vec![0.0; widths.len()];
    for (j, i) in idx.iter().enumerate() {
        masses[*i] = m[j];
    }
    let density: Vec<f64> = masses.iter().zip(&widths).map(|(m, w)| m / w).collect();
    Ok(MaxEntSolution {
        distribution: CaptimeDistribution::GridEmpirical {
            edges: problem.edges.clone(),
            density,
        },
        entropy: discrete_entropy(&masses, &problem.edges),
        masses,
        residuals,
        multipliers: lambda,
        iterations,
        truncation: problem.truncation,
    })
}

fn residuals_of(dual: &Dual<'_>, m: &[f64]) -> Vec<f64> {
    dual.moments(m)
        .iter()
        .zip(&dual.f.targets)
        .map(|(mu, c)| mu - c)
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Cell masses of `k` on a grid, renormalized to the grid.
pub fn discretize(k: &CaptimeDistribution, edges: &[f64]) -> Vec<f64> {
    let cdf = |x: f64| k.cdf(ExtendedTime::secs(x));
    let mut m: Vec<f64> = edges.windows(2).map(|w| (cdf(w[1]) - cdf(w[0])).max(0.0)).collect();
    let total: f64 = m.iter().sum();
    if total > 0.0 {
        for v in &mut m {
            *v /= total;
        }
    }
    m
}

/// `-Σ m_i ln(m_i / w_i)`: the differential entropy of the piecewise-constant density.
pub fn discrete_entropy(masses: &[f64], edges: &[f64]) -> f64 {
    masses
        .iter()
        .zip(edges.windows(2))
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, w)| -m * (m / (w[1] - w[0])).ln())
        .sum()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// (kappa, density) pairs at cell midpoints, for plotting.
pub fn density_curve(solution: &MaxEntSolution) -> Vec<(f64, f64)> {
    match &solution.distribution {
        CaptimeDistribution::GridEmpirical { edges, density } => edges
            .windows(2)
            .zip(density)
            .map(|(w, d)| (0.5 * (w[0] + w[1]), *d))
            .collect(),
        _ => Vec::new(),
    }
}
