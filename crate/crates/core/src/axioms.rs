//! Brute-force checks of the representation theorem on small discrete instances.
//!
//! Expected utilities here are plain finite sums over runtime and captime
//! atoms of `p(t, κ)`, so the checks do not depend on the quadrature used by
//! [`crate::scoring`]. When the utility is piecewise rational (step, linear
//! money, uniform and piecewise-linear families) every quantity is also
//! computed in exact rational arithmetic; finite `f64` values are dyadic
//! rationals, so nothing is lost converting inputs.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::runtime_dist::{compound, mix, Discretization};
use crate::{CaptimeDistribution, Error, ExtendedTime, Family, Result, RuntimeDistribution, UtilityFunction};

/// Largest denominator accepted for atom probabilities.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
/// Tolerance for floating-point checks.
pub const FLOAT_TOL: f64 = 1e-12;
const MAX_ALGORITHM_ATOMS: usize = 8;
const MAX_CAPTIME_ATOMS: usize = 4;
const AFFINE_TRIALS: usize = 20;

/// Tally of checks made and a description of each failed one.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
    }
}

type Atoms = Vec<(ExtendedTime, BigRational)>;

/// Algorithms and a captime distribution with finitely many rational atoms.
#[derive(Clone, Debug)]
pub struct DiscreteInstance {
    pub algorithms: Vec<RuntimeDistribution>,
    pub captime: CaptimeDistribution,
    pub utility: UtilityFunction,
    exact_algorithms: Vec<Atoms>,
    exact_captime: Atoms,
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation with denominator at most `max_den`.
fn approximate(x: f64, max_den: u64) -> (u64, u64) {
    let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as u64;
        let k2 = ai.saturating_mul(k1).saturating_add(k0);
        if k2 > max_den {
            break;
        }
        let h2 = ai * h1 + h0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac < 1e-18 {
            break;
        }
        v = 1.0 / frac;
    }
    (h1, k1)
}

fn exact_weights(points: &[(ExtendedTime, f64)], what: &str) -> Result<Atoms> {
    let mut out = Vec::with_capacity(points.len());
    for &(t, p) in points {
        let (num, den) = approximate(p, MAX_DENOMINATOR);
        if den == 0 || (num as f64 / den as f64 - p).abs() > 4.0 * f64::EPSILON * p {
            return Err(Error::bad(format!(
                "{what} probability {p} is not a fraction with denominator <= {MAX_DENOMINATOR}"
            )));
        }
        out.push((t, BigRational::new(BigInt::from(num), BigInt::from(den))));
    }
    let total: BigRational = out.iter().map(|(_, w)| w.clone()).sum();
    if total != BigRational::one() {
        return Err(Error::bad(format!("{what} probabilities do not sum to exactly 1")));
    }
    Ok(out)
}

fn captime_points(k: &CaptimeDistribution) -> Result<Vec<(ExtendedTime, f64)>> {
    match k {
        CaptimeDistribution::Dirac { kappa } => Ok(vec![(*kappa, 1.0)]),
        CaptimeDistribution::Discrete { points } => Ok(points.clone()),
        _ => Err(Error::bad("instance captimes must be discrete")),
    }
}

impl DiscreteInstance {
    pub fn new(algorithms: Vec<RuntimeDistribution>, captime: CaptimeDistribution, utility: UtilityFunction) -> Result<Self> {
        utility.validate()?;
        captime.validate()?;
        let kp = captime_points(&captime)?;
        if kp.len() > MAX_CAPTIME_ATOMS {
            return Err(Error::bad(format!("at most {MAX_CAPTIME_ATOMS} captime atoms")));
        }
        let exact_captime = exact_weights(&kp, "captime")?;
        let mut exact_algorithms = Vec::with_capacity(algorithms.len());
        for a in &algorithms {
            a.validate()?;
            let pts = a.atoms().ok_or_else(|| Error::bad("instance algorithms must be discrete"))?;
            if pts.len() > MAX_ALGORITHM_ATOMS {
                return Err(Error::bad(format!("at most {MAX_ALGORITHM_ATOMS} atoms per algorithm")));
            }
            exact_algorithms.push(exact_weights(&pts, "runtime")?);
        }
        Ok(DiscreteInstance {
            algorithms,
            captime,
            utility,
            exact_algorithms,
            exact_captime,
        })
    }

    /// Builds an instance from integer weights, which are normalized exactly.
    pub fn from_weights(
        algorithms: Vec<Vec<(ExtendedTime, u64)>>,
        captime: Vec<(ExtendedTime, u64)>,
        utility: UtilityFunction,
    ) -> Result<Self> {
        fn normalize(pts: &[(ExtendedTime, u64)]) -> Result<(Vec<(ExtendedTime, f64)>, Atoms)> {
            let total: u64 = pts.iter().map(|p| p.1).sum();
            if total == 0 || total > MAX_DENOMINATOR || pts.iter().any(|p| p.1 == 0) {
                return Err(Error::bad("weights must be positive with total at most 10^6"));
            }
            let exact: Atoms = pts
                .iter()
                .map(|&(t, w)| (t, BigRational::new(BigInt::from(w), BigInt::from(total))))
                .collect();
            let float = exact.iter().map(|(t, w)| (*t, to_f64(w))).collect();
            Ok((float, exact))
        }
        utility.validate()?;
        let (kf, kx) = normalize(&captime)?;
        if kx.len() > MAX_CAPTIME_ATOMS {
            return Err(Error::bad(format!("at most {MAX_CAPTIME_ATOMS} captime atoms")));
        }
        let captime = CaptimeDistribution::Discrete { points: kf };
        captime.validate_loose()?;
        let mut dists = Vec::new();
        let mut exact = Vec::new();
        for a in &algorithms {
            if a.len() > MAX_ALGORITHM_ATOMS {
                return Err(Error::bad(format!("at most {MAX_ALGORITHM_ATOMS} atoms per algorithm")));
            }
            let (f, x) = normalize(a)?;
            dists.push(RuntimeDistribution::DiscreteEmpirical { points: f });
            exact.push(x);
        }
        Ok(DiscreteInstance {
            algorithms: dists,
            captime,
            utility,
            exact_algorithms: exact,
            exact_captime: kx,
        })
    }

    /// A random instance with `n_algorithms` algorithms.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, utility: UtilityFunction, n_algorithms: usize) -> Self {
        let time = |rng: &mut R| -> ExtendedTime {
            if rng.random_bool(0.1) {
                ExtendedTime::INFINITY
            } else {
                // multiples of 1/8 up to 12 seconds
                ExtendedTime::secs(rng.random_range(0..=96) as f64 / 8.0)
            }
        };
        let algorithms = (0..n_algorithms)
            .map(|_| {
                let n = rng.random_range(1..=MAX_ALGORITHM_ATOMS);
                (0..n).map(|_| (time(rng), rng.random_range(1..=1000))).collect()
            })
            .collect();
        let nk = rng.random_range(1..=MAX_CAPTIME_ATOMS);
        let captime = (0..nk)
            .map(|_| (ExtendedTime::secs(rng.random_range(1..=80) as f64 / 8.0), rng.random_range(1..=1000)))
            .collect();
        Self::from_weights(algorithms, captime, utility).expect("generated instance is valid")
    }

    /// `E[p(t, κ)]` for each algorithm, as a finite sum.
    pub fn expected_p(&self) -> Vec<f64> {
        self.algorithms
            .iter()
            .map(|a| expected_p_discrete(a, &self.captime, &self.utility).expect("discrete instance"))
            .collect()
    }

    /// Exact `E[p(t, κ)]` when the utility is piecewise rational.
    pub fn expected_p_exact(&self) -> Option<Vec<BigRational>> {
        self.exact_algorithms
            .iter()
            .map(|a| exact_expectation(a, &self.exact_captime, &self.utility))
            .collect()
    }
}

impl CaptimeDistribution {
    /// Validation that tolerates rounding in weights normalized from integers.
    fn validate_loose(&self) -> Result<()> {
        match self {
            CaptimeDistribution::Discrete { points } => {
                if points.iter().any(|(k, _)| k.seconds() <= 0.0) {
                    return Err(Error::bad("captime atoms must be positive"));
                }
                let s: f64 = points.iter().map(|p| p.1).sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::bad("captime weights must sum to 1"));
                }
                Ok(())
            }
            _ => self.validate(),
        }
    }
}

/// `E[p(t, κ)]` over the atoms of a discrete runtime and captime distribution.
pub fn expected_p_discrete(a: &RuntimeDistribution, k: &CaptimeDistribution, u: &UtilityFunction) -> Result<f64> {
    let atoms = a.atoms().ok_or_else(|| Error::bad("runtime distribution must be discrete"))?;
    let kp = captime_points(k)?;
    let mut s = 0.0;
    for (t, pt) in &atoms {
        for (kappa, pk) in &kp {
            s += pt * pk * u.p(*t, *kappa);
        }
    }
    Ok(s)
}

/// Exact `p(t, κ)` for piecewise-rational families.
pub fn p_exact(u: &UtilityFunction, t: ExtendedTime, kappa: ExtendedTime) -> Option<BigRational> {
    if !matches!(
        u.family,
        Family::Step | Family::LinearMoney { .. } | Family::Uniform { .. } | Family::PiecewiseLinear { .. }
    ) {
        return None;
    }
    if t >= kappa || t.is_infinite() {
        return Some(BigRational::zero());
    }
    let x = rational(t.seconds());
    let one = BigRational::one();
    Some(match &u.family {
        Family::Step => one,
        Family::LinearMoney {
            revenue, cost_rate, ..
        } => {
            if kappa.is_infinite() {
                one
            } else {
                let (r, c, k) = (rational(*revenue), rational(*cost_rate), rational(kappa.seconds()));
                (&r + &c * (&k - &x)) / (&r + &c * &k)
            }
        }
        Family::Uniform { kappa0 } => {
            let k0 = rational(*kappa0);
            if x < k0 {
                one - x / k0
            } else {
                BigRational::zero()
            }
        }
        Family::PiecewiseLinear { kappa0, kappa1, delta } => {
            let (k0, k1, d) = (rational(*kappa0), rational(*kappa1), rational(*delta));
            if x <= k1 {
                one - d * x / k1
            } else if x < k0 {
                (one - d) * (&k0 - x) / (k0 - k1)
            } else {
                BigRational::zero()
            }
        }
        _ => return None,
    })
}

fn exact_expectation(a: &Atoms, k: &Atoms, u: &UtilityFunction) -> Option<BigRational> {
    let mut s = BigRational::zero();
    for (t, pt) in a {
        for (kappa, pk) in k {
            s += pt * pk * p_exact(u, *t, *kappa)?;
        }
    }
    Some(s)
}

/// Sup of the region where a family's `p` is strictly positive for `t < κ`.
pub fn positive_until(f: &Family) -> ExtendedTime {
    match f {
        Family::Uniform { kappa0 } | Family::PiecewiseLinear { kappa0, .. } => ExtendedTime::secs(*kappa0),
        Family::SurvivalOf { captime } => captime.lower_quantile(1.0),
        _ => ExtendedTime::INFINITY,
    }
}

/// Outcome of [`check_representation`].
#[derive(Clone, Debug, Serialize)]
pub struct RepresentationReport {
    pub report: CheckReport,
    /// `E[p]` per algorithm.
    pub scores: Vec<f64>,
    /// Whether the exact rational path was used.
    pub exact: bool,
    /// Largest `|E[u_X] - E[u_A]|` over the algorithms (floating-point path).
    pub max_residual: f64,
}

fn order_agrees(report: &mut CheckReport, base: &[f64], other: &[f64], tol_base: f64, tol_other: f64, label: &str) {
    for i in 0..base.len() {
        for j in 0..base.len() {
            let (d, e) = (base[i] - base[j], other[i] - other[j]);
            let flipped = (d > tol_base && e < -tol_other) || (d < -tol_base && e > tol_other);
            report.check(!flipped, || format!("{label}: order of algorithms {i} and {j} differs"));
        }
    }
}

/// Checks the construction and consequences of the representation theorem.
///
/// 1. Replacing each run by `[p(t, κ) : δ0, 1 - p(t, κ) : δ∞]` (the synthetic
///    algorithm `X`) leaves the expected utility unchanged.
/// 2. Orderings by `E[p]` and by `E[c1·p + c0]` agree for random `c1 > 0`, `c0`.
/// 3. `p` has the required shape at every atom: `p(0, κ) = 1`, nonincreasing in
///    `t` (eagerness), positive before `κ` where the family is (relevance),
///    `p(κ, κ) = 0`, and the score order is transitive.
pub fn check_representation<R: Rng + ?Sized>(inst: &DiscreteInstance, rng: &mut R) -> RepresentationReport {
    let mut report = CheckReport::default();
    let u = &inst.utility;
    let scores = inst.expected_p();
    let exact = inst.expected_p_exact();
    let kp = captime_points(&inst.captime).expect("discrete captime");
    let zero = RuntimeDistribution::Dirac { t: ExtendedTime::ZERO };
    let never = RuntimeDistribution::Dirac {
        t: ExtendedTime::INFINITY,
    };

    // (1) the synthetic algorithm X, on the floating-point grid
    let mut max_residual: f64 = 0.0;
    for (i, a) in inst.algorithms.iter().enumerate() {
        let x = compound(
            |t, kappa| mix(u.p(t, kappa), &zero, &never),
            a,
            &inst.captime,
            &Discretization::default(),
        );
        match x {
            Ok(x) => {
                let eu = expected_p_discrete(&x.distribution, &inst.captime, u).expect("discrete compound");
                let r = (eu - scores[i]).abs();
                max_residual = max_residual.max(r);
                report.check(r <= FLOAT_TOL, || format!("algorithm {i}: E[u_X] - E[u_A] = {r:e}"));
            }
            Err(e) => report.check(false, || format!("algorithm {i}: compound failed: {e}")),
        }
    }
    // ... and exactly
    if let Some(ex) = &exact {
        for (i, a) in inst.exact_algorithms.iter().enumerate() {
            let mut at_zero = BigRational::zero();
            let mut at_inf = BigRational::zero();
            for (t, pt) in a {
                for (kappa, pk) in &inst.exact_captime {
                    let p = p_exact(u, *t, *kappa).expect("rational family");
                    let w = pt * pk;
                    at_inf += &w * (BigRational::one() - &p);
                    at_zero += w * p;
                }
            }
            report.check(&at_zero + &at_inf == BigRational::one(), || {
                format!("algorithm {i}: synthetic algorithm mass is not 1")
            });
            let mut eu = BigRational::zero();
            for (kappa, pk) in &inst.exact_captime {
                eu += &at_zero * pk * p_exact(u, ExtendedTime::ZERO, *kappa).expect("rational family");
                eu += &at_inf * pk * p_exact(u, ExtendedTime::INFINITY, *kappa).expect("rational family");
            }
            report.check(eu == ex[i], || format!("algorithm {i}: exact E[u_X] != E[u_A]"));
            let drift = (to_f64(&ex[i]) - scores[i]).abs();
            report.check(drift <= FLOAT_TOL, || {
                format!("algorithm {i}: float and exact scores differ by {drift:e}")
            });
        }
    }

    // (2) affine invariance
    for _ in 0..AFFINE_TRIALS {
        let c1 = 10f64.powf(rng.random_range(-2.0..2.0));
        let c0 = rng.random_range(-100.0..100.0);
        let affine = UtilityFunction {
            c1,
            c0,
            ..u.clone()
        };
        let shifted: Vec<f64> = inst
            .algorithms
            .iter()
            .map(|a| {
                let atoms = a.atoms().expect("discrete");
                atoms
                    .iter()
                    .flat_map(|(t, pt)| kp.iter().map(move |(k, pk)| (*t, *pt, *k, *pk)))
                    .map(|(t, pt, k, pk)| pt * pk * (affine.c1 * affine.p(t, k) + affine.c0))
                    .sum()
            })
            .collect();
        order_agrees(
            &mut report,
            &scores,
            &shifted,
            FLOAT_TOL,
            FLOAT_TOL * (c1 + c0.abs()),
            &format!("c1={c1}, c0={c0}"),
        );
        if let Some(ex) = &exact {
            let (c1r, c0r) = (rational(c1), rational(c0));
            for i in 0..ex.len() {
                for j in 0..ex.len() {
                    let lhs = ex[i] >= ex[j];
                    let rhs = &c1r * &ex[i] + &c0r >= &c1r * &ex[j] + &c0r;
                    report.check(lhs == rhs, || format!("exact order of {i} and {j} not affine invariant"));
                }
            }
        }
    }

    // (3) shape of p at the instance atoms
    let mut times: Vec<ExtendedTime> = inst
        .algorithms
        .iter()
        .flat_map(|a| a.atoms().expect("discrete").into_iter().map(|(t, _)| t))
        .chain(kp.iter().map(|(k, _)| *k))
        .chain([ExtendedTime::ZERO, ExtendedTime::INFINITY])
        .collect();
    times.sort();
    times.dedup();
    let positive = positive_until(&u.family);
    for (kappa, _) in &kp {
        let k = *kappa;
        report.check(u.p(ExtendedTime::ZERO, k) == 1.0, || format!("p(0, {k}) != 1"));
        report.check(u.p(k, k) == 0.0, || format!("p({k}, {k}) != 0"));
        for w in times.windows(2) {
            let (a, b) = (u.p(w[0], k), u.p(w[1], k));
            report.check(a >= b, || format!("p increases from t={} to t={} at κ={k}", w[0], w[1]));
        }
        for &t in &times {
            let p = u.p(t, k);
            report.check((0.0..=1.0).contains(&p), || format!("p({t}, {k}) = {p} outside [0, 1]"));
            if t < k && t < positive {
                report.check(p > 0.0, || format!("p({t}, {k}) is not positive"));
            }
            if let Some(px) = p_exact(u, t, k) {
                let d = (to_f64(&px) - p).abs();
                report.check(d <= FLOAT_TOL, || format!("p({t}, {k}) float/exact differ by {d:e}"));
            }
        }
    }
    let n = scores.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if scores[a] >= scores[b] && scores[b] >= scores[c] {
                    report.check(scores[a] >= scores[c], || format!("{a} ≥ {b} ≥ {c} but not {a} ≥ {c}"));
                }
            }
        }
    }

    RepresentationReport {
        report,
        scores,
        exact: exact.is_some(),
        max_residual,
    }
}

/// Checks that mixing more of the better algorithm never hurts.
///
/// For all `p >= q` from the grids, `[p : a, 1-p : b]` must score at least as
/// high as `[q : a, 1-q : b]`, strictly when `a` beats `b` and `p > q`. The
/// pair is reordered if `b` scores higher than `a`.
pub fn check_monotonicity_axiom(
    a: &RuntimeDistribution,
    b: &RuntimeDistribution,
    k: &CaptimeDistribution,
    u: &UtilityFunction,
    p_grid: &[f64],
    q_grid: &[f64],
) -> Result<CheckReport> {
    let (mut a, mut b) = (a, b);
    let (mut ea, mut eb) = (expected_p_discrete(a, k, u)?, expected_p_discrete(b, k, u)?);
    if ea < eb {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut ea, &mut eb);
    }
    let mut report = CheckReport::default();
    for &p in p_grid {
        let sp = expected_p_discrete(&mix(p, a, b)?, k, u)?;
        for &q in q_grid {
            if p < q {
                continue;
            }
            let sq = expected_p_discrete(&mix(q, a, b)?, k, u)?;
            report.check(sp >= sq - FLOAT_TOL, || format!("mix({p}) scores {sp} < mix({q}) {sq}"));
            if p > q && (p - q) * (ea - eb) > FLOAT_TOL {
                report.check(sp > sq, || format!("mix({p}) does not strictly beat mix({q})"));
            }
        }
    }
    Ok(report)
}

/// Result of [`check_continuity_axiom`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContinuityOutcome {
    /// Weight with `b ≍ [p : a, 1-p : c]`.
    pub p: f64,
    pub residual: f64,
    /// All three algorithms score the same; any weight works and 0.5 is returned.
    pub degenerate: bool,
}

/// Finds the mixture of `a` and `c` indifferent to `b`.
pub fn check_continuity_axiom(
    a: &RuntimeDistribution,
    b: &RuntimeDistribution,
    c: &RuntimeDistribution,
    k: &CaptimeDistribution,
    u: &UtilityFunction,
) -> Result<ContinuityOutcome> {
    let (ea, eb, ec) = (
        expected_p_discrete(a, k, u)?,
        expected_p_discrete(b, k, u)?,
        expected_p_discrete(c, k, u)?,
    );
    if !(ea >= eb && eb >= ec) {
        return Err(Error::bad(format!("need E[a] >= E[b] >= E[c], got {ea}, {eb}, {ec}")));
    }
    let degenerate = ea - ec <= 0.0;
    let p = if degenerate {
        0.5
    } else {
        ((eb - ec) / (ea - ec)).clamp(0.0, 1.0)
    };
    let em = expected_p_discrete(&mix(p, a, c)?, k, u)?;
    Ok(ContinuityOutcome {
        p,
        residual: (em - eb).abs(),
        degenerate,
    })
}

/// Runs every check on `n` random instances of `u`'s family.
pub fn run_suite<R: Rng + ?Sized>(rng: &mut R, u: &UtilityFunction, n: usize) -> CheckReport {
    let mut report = CheckReport::default();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for _ in 0..n {
        let inst = DiscreteInstance::random(rng, u.clone(), 3);
        report.merge(check_representation(&inst, rng).report);
        let (a, b, c) = (&inst.algorithms[0], &inst.algorithms[1], &inst.algorithms[2]);
        match check_monotonicity_axiom(a, b, &inst.captime, u, &grid, &grid) {
            Ok(r) => report.merge(r),
            Err(e) => report.check(false, || format!("monotonicity: {e}")),
        }
        let mut triple = [a, b, c];
        let s = |d: &RuntimeDistribution| expected_p_discrete(d, &inst.captime, u).unwrap_or(f64::NAN);
        triple.sort_by(|x, y| s(y).partial_cmp(&s(x)).unwrap_or(std::cmp::Ordering::Equal));
        match check_continuity_axiom(triple[0], triple[1], triple[2], &inst.captime, u) {
            Ok(o) => report.check(o.residual <= FLOAT_TOL, || format!("continuity residual {:e}", o.residual)),
            Err(e) => report.check(false, || format!("continuity: {e}")),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(x: f64) -> ExtendedTime {
        ExtendedTime::secs(x)
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(approximate(0.25, 1000), (1, 4));
        assert_eq!(approximate(1.0 / 3.0, 1000), (1, 3));
        assert_eq!(approximate(0.99, 1000), (99, 100));
    }

    #[test]
    fn uniform_pair_exact() {
        let u = UtilityFunction::new(Family::Uniform { kappa0: 3.0 }).unwrap();
        let inst = DiscreteInstance::new(
            vec![RuntimeDistribution::dirac(1.0).unwrap(), RuntimeDistribution::dirac(2.0).unwrap()],
            CaptimeDistribution::dirac(3.0).unwrap(),
            u,
        )
        .unwrap();
        let ex = inst.expected_p_exact().unwrap();
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(ex[0], &third * BigRational::from_integer(BigInt::from(2)));
        assert_eq!(ex[1], third);
        let r = check_representation(&inst, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(r.report.passed(), "{:?}", r.report.violations);
        assert!(r.exact);
    }

    #[test]
    fn rejects_irrational_weights() {
        let a = RuntimeDistribution::discrete(vec![(t(1.0), std::f64::consts::FRAC_1_PI), (t(2.0), 1.0 - std::f64::consts::FRAC_1_PI)])
            .unwrap();
        let u = UtilityFunction::new(Family::Step).unwrap();
        assert!(DiscreteInstance::new(vec![a], CaptimeDistribution::dirac(3.0).unwrap(), u).is_err());
    }

    #[test]
    fn continuity_degenerate() {
        let u = UtilityFunction::new(Family::Step).unwrap();
        let k = CaptimeDistribution::dirac(1.0).unwrap();
        let a = RuntimeDistribution::dirac(0.5).unwrap();
        let o = check_continuity_axiom(&a, &a, &a, &k, &u).unwrap();
        assert!(o.degenerate);
        assert_eq!(o.p, 0.5);
    }

    #[test]
    fn small_suite_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = UtilityFunction::new(Family::Exponential { kappa0: 2.0 }).unwrap();
        let r = run_suite(&mut rng, &u, 20);
        assert!(r.passed(), "{:?}", r.violations);
    }
}
