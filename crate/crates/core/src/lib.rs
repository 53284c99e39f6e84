//! Expected-utility scoring of algorithms from their runtime distributions.
//!
//! An algorithm is identified with the distribution of its running time on
//! the instances we care about, possibly with mass at infinity for runs that
//! never terminate. Runs are cut off at a captime, which may itself be
//! uncertain. Preferences between algorithms are represented by the expected
//! value of a utility `u(t, κ) = c1·p(t, κ) + c0`, where `p` decreases from 1
//! at `t = 0` to 0 at `t = κ`.
//!
//! The crate is organised around that pipeline:
//!
//! - [`runtime_dist`]: runtime and captime distributions, mixing, compounding.
//! - [`utility`]: utility families, the fundamental `p` function, inverses,
//!   and the solution-quality extension.
//! - [`maxent`]: maximum-entropy captime priors on a grid, with closed forms.
//! - [`scoring`]: analytic and empirical scores, classical baselines, ranking.
//! - [`estimation`]: sample/captime budgets for ε-accurate estimation.
//! - [`axioms`]: brute-force checks of the representation theorem on small
//!   discrete instances.
//! - [`quality`]: runtime/quality pairs threaded through scoring and checks.
//! - [`runlog`] and [`config`]: the on-disk formats shared with the CLI.

pub mod axioms;
pub mod config;
mod error;
pub mod estimation;
pub mod maxent;
pub(crate) mod quadrature;
pub mod quality;
pub mod runlog;
pub mod runtime_dist;
pub mod scoring;
mod time;
pub mod utility;

pub use error::{Error, Result};
pub use runtime_dist::{CaptimeDistribution, RuntimeDistribution};
pub use scoring::{ScoreMethod, ScoreReport};
pub use estimation::SamplePlan;
pub use time::{fmt_seconds, ExtendedTime};
pub use utility::{Family, QualityUtilityFunction, QualityWeight, UtilityFunction};
