//! Expectations of bounded functions under mixed atomic/continuous laws.
//!
//! Continuous parts are integrated on the log-time axis with composite
//! Gauss-Legendre rules, split at every known breakpoint of the density and
//! of the integrand. The number of cells is doubled until two successive
//! estimates agree to the requested tolerance.

use std::sync::OnceLock;

use crate::runtime_dist::law::Law;
use crate::{Error, ExtendedTime, Result};

/// Probability left out at each end of a continuous part.
const TAIL: f64 = 1e-15;
const START_CELLS: usize = 16;
const MAX_CELLS: usize = 1 << 14;
const GL_ORDER: usize = 8;

/// A distribution split into point masses and weighted continuous laws.
#[derive(Clone, Debug, Default)]
pub(crate) struct Decomposition {
    pub atoms: Vec<(ExtendedTime, f64)>,
    pub parts: Vec<(f64, Law)>,
    /// Mass dropped while enumerating infinite atom sets.
    pub dropped: f64,
}

impl Decomposition {
    pub fn atom(t: ExtendedTime) -> Self {
        Decomposition {
            atoms: vec![(t, 1.0)],
            ..Default::default()
        }
    }

    pub fn law(law: Law) -> Self {
        Decomposition {
            parts: vec![(1.0, law)],
            ..Default::default()
        }
    }

    pub fn scaled(mut self, w: f64) -> Self {
        for a in &mut self.atoms {
            a.1 *= w;
        }
        for p in &mut self.parts {
            p.0 *= w;
        }
        self.dropped *= w;
        self
    }

    pub fn merge(&mut self, other: Decomposition) {
        self.atoms.extend(other.atoms);
        self.parts.extend(other.parts);
        self.dropped += other.dropped;
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .atoms
            .iter()
            .map(|(t, _)| t.seconds())
            .filter(|t| t.is_finite())
            .collect();
        for (_, law) in &self.parts {
            pts.extend(law.breakpoints());
        }
        pts
    }

    /// `E[g(X)]`. `g` must be bounded; it receives `f64::INFINITY` for mass there.
    pub fn expect(&self, g: &dyn Fn(f64) -> f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
        let mut total: f64 = self.atoms.iter().map(|(t, w)| w * g(t.seconds())).sum();
        let n = self.parts.len().max(1) as f64;
        for (w, law) in &self.parts {
            total += w * expect_law(law, g, breakpoints, tol / n)?;
        }
        Ok(total)
    }
}

fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static NODES: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    let (mut p0, mut p1) = (1.0, z);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                    break;
                }
            }
        }
        (x, w)
    })
}

fn integrate_log_segment(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let (la, lb) = (a.ln(), b.ln());
    let h = (lb - la) / cells as f64;
    let mut sum = 0.0;
    for c in 0..cells {
        let mid = la + (c as f64 + 0.5) * h;
        let mut cell = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let s = (mid + 0.5 * h * x).exp();
            cell += w * f(s) * s;
        }
        sum += 0.5 * h * cell;
    }
    sum
}

/// `E[g(X)]` for a single continuous law.
pub(crate) fn expect_law(law: &Law, g: &dyn Fn(f64) -> f64, breakpoints: &[f64], tol: f64) -> Result<f64> {
    let (s_lo, s_hi) = law.support();
    let mut lo = law.quantile(TAIL).max(s_lo);
    let mut hi = law.quantile(1.0 - TAIL).min(s_hi).min(1e300);
    if lo <= 0.0 {
        lo = f64::MIN_POSITIVE;
    }
    if !(hi > lo) {
        hi = lo * (1.0 + 1e-12);
    }

    let mut pts: Vec<f64> = vec![lo, hi];
    pts.extend(law.breakpoints().into_iter().chain(breakpoints.iter().copied()));
    pts.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());

    let integrand = |x: f64| g(x) * law.pdf(x);
    let tails = law.cdf(lo) * g(lo) + law.sf(hi) * g(hi);

    let mut total = tails;
    for seg in pts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let mut cells = START_CELLS;
        let mut prev = integrate_log_segment(&integrand, a, b, cells);
        loop {
            cells *= 2;
            let next = integrate_log_segment(&integrand, a, b, cells);
            if (next - prev).abs() <= tol {
                total += next;
                break;
            }
            if cells >= MAX_CELLS {
                return Err(Error::QuadratureNotConverged(format!(
                    "segment [{a:e}, {b:e}]: last change {:e} > {tol:e}",
                    (next - prev).abs()
                )));
            }
            prev = next;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for x^14
        let m: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn total_mass_is_one() {
        let laws = [
            Law::Exponential { rate: 0.5 },
            Law::LogNormal { mu: 0.0, sigma: 2.0 },
            Law::Pareto { xmin: 1.0, alpha: 0.5 },
            Law::Uniform { lo: 0.0, hi: 10.0 },
        ];
        for law in laws {
            let m = expect_law(&law, &|_| 1.0, &[], 1e-12).unwrap();
            assert!((m - 1.0).abs() < 1e-10, "{law:?}: {m}");
        }
    }

    #[test]
    fn exponential_moment_generating_function() {
        // E[exp(-X)] for X ~ Exp(rate 2) is 2/3
        let law = Law::Exponential { rate: 2.0 };
        let v = expect_law(&law, &|x| (-x).exp(), &[], 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn discontinuous_integrand_at_breakpoint() {
        // P(X < 1) for Uniform(0, 4): indicator with a declared breakpoint
        let law = Law::Uniform { lo: 0.0, hi: 4.0 };
        let v = expect_law(&law, &|x| if x < 1.0 { 1.0 } else { 0.0 }, &[1.0], 1e-12).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
    }
}
