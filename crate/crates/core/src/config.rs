//! JSON configuration documents.
//!
//! Utility:
//!
//! ```json
//! {"family": "pareto", "params": {"kappa0": 1.0, "alpha": 1.0}, "c1": 1.0, "c0": 0.0}
//! ```
//!
//! `c1` and `c0` default to 1 and 0. Families `step` and `linear_money` take an
//! optional `kappa` param, the fixed captime used where no run log supplies
//! one. An optional `quality` object `{"q0", "q1", "weight", "exponent"}`
//! turns on the quality extension.
//!
//! Maxent: `{"constraints": [{"type": "mean", "mean": 1.0}], "cells": 2048}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::maxent::{Constraint, EntropyProblem, DEFAULT_CELLS, DEFAULT_TOL};
use crate::{Error, ExtendedTime, Family, QualityUtilityFunction, QualityWeight, Result, UtilityFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityDocument {
    pub q0: f64,
    pub q1: f64,
    #[serde(default = "linear")]
    pub weight: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
}

fn linear() -> String {
    "linear".into()
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityDocument {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default)]
    pub c0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<QualityDocument>,
}

/// A parsed utility document.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityConfig {
    pub utility: UtilityFunction,
    /// Fixed captime for the families that take it as an argument.
    pub kappa: Option<ExtendedTime>,
    pub quality: Option<QualityUtilityFunction>,
}

struct Params {
    family: String,
    map: BTreeMap<String, f64>,
}

impl Params {
    fn take(&mut self, name: &str) -> Result<f64> {
        self.map
            .remove(name)
            .ok_or_else(|| Error::bad(format!("family {} needs param {name}", self.family)))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::bad(format!("family {} has no param {k}", self.family))),
            None => Ok(()),
        }
    }
}

pub fn family_name(f: &Family) -> &'static str {
    match f {
        Family::Step => "step",
        Family::LinearMoney { .. } => "linear_money",
        Family::SurvivalOf { .. } => "survival_of",
        Family::Uniform { .. } => "uniform",
        Family::Exponential { .. } => "exponential",
        Family::Pareto { .. } => "pareto",
        Family::LogLaplace { .. } => "log_laplace",
        Family::GeneralizedLogLaplace { .. } => "generalized_log_laplace",
        Family::LogNormal { .. } => "log_normal",
        Family::PiecewiseLinear { .. } => "piecewise_linear",
    }
}

impl UtilityDocument {
    pub fn into_config(self) -> Result<UtilityConfig> {
        let mut p = Params {
            family: self.family.clone(),
            map: self.params,
        };
        let mut kappa = None;
        let family = match self.family.as_str() {
            "step" | "linear_money" => {
                if let Some(k) = p.map.remove("kappa") {
                    kappa = Some(ExtendedTime::new(k)?);
                }
                if self.family == "step" {
                    Family::Step
                } else {
                    Family::LinearMoney {
                        revenue: p.take("revenue")?,
                        cost_fixed: p.take("cost_fixed")?,
                        cost_rate: p.take("cost_rate")?,
                    }
                }
            }
            "uniform" => Family::Uniform { kappa0: p.take("kappa0")? },
            "exponential" => Family::Exponential { kappa0: p.take("kappa0")? },
            "pareto" => Family::Pareto {
                kappa0: p.take("kappa0")?,
                alpha: p.take("alpha")?,
            },
            "log_laplace" => Family::LogLaplace {
                kappa0: p.take("kappa0")?,
                alpha: p.take("alpha")?,
            },
            "generalized_log_laplace" => Family::GeneralizedLogLaplace {
                kappa0: p.take("kappa0")?,
                alpha: p.take("alpha")?,
                beta: p.take("beta")?,
            },
            "log_normal" => Family::LogNormal {
                kappa0: p.take("kappa0")?,
                sigma: p.take("sigma")?,
            },
            "piecewise_linear" => Family::PiecewiseLinear {
                kappa0: p.take("kappa0")?,
                kappa1: p.take("kappa1")?,
                delta: p.take("delta")?,
            },
            other => return Err(Error::bad(format!("unknown utility family {other:?}"))),
        };
        p.finish()?;
        let utility = UtilityFunction::affine(family, self.c1, self.c0)?;
        let quality = match self.quality {
            None => None,
            Some(q) => {
                let weight = match (q.weight.as_str(), q.exponent) {
                    ("linear", None) => QualityWeight::Linear,
                    ("power", Some(exponent)) => QualityWeight::Power { exponent },
                    ("power", None) => return Err(Error::bad("power weight needs an exponent")),
                    (w, _) => return Err(Error::bad(format!("unknown quality weight {w:?}"))),
                };
                Some(QualityUtilityFunction::new(utility.clone(), q.q0, q.q1, weight)?)
            }
        };
        Ok(UtilityConfig { utility, kappa, quality })
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

impl UtilityConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        from_json::<UtilityDocument>(text)?.into_config()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxEntConfig {
    pub constraints: Vec<Constraint>,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_cells() -> usize {
    DEFAULT_CELLS
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl MaxEntConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        from_json(text)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn problem(&self) -> Result<EntropyProblem> {
        EntropyProblem::with_grid(self.constraints.clone(), self.cells)
    }
}
