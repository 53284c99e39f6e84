//! Python bindings. Structured results come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use runtime_utility::config::{MaxEntConfig, UtilityConfig, UtilityDocument};
use runtime_utility::estimation::{estimate_distribution, plan as make_plan};
use runtime_utility::maxent::solve;
use runtime_utility::scoring::{self, RuntimeSample};
use runtime_utility::{CaptimeDistribution, ExtendedTime};

fn err(e: runtime_utility::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn time(t: f64) -> PyResult<ExtendedTime> {
    ExtendedTime::new(t).map_err(err)
}

#[pyclass(name = "Utility", module = "pyrtu")]
struct Utility {
    config: UtilityConfig,
}

#[pymethods]
impl Utility {
    /// `Utility("pareto", {"kappa0": 1.0, "alpha": 1.0}, c1=1.0, c0=0.0)`.
    #[new]
    #[pyo3(signature = (family, params = None, c1 = 1.0, c0 = 0.0))]
    fn new(family: String, params: Option<std::collections::BTreeMap<String, f64>>, c1: f64, c0: f64) -> PyResult<Self> {
        let doc = UtilityDocument {
            family,
            params: params.unwrap_or_default(),
            c1,
            c0,
            quality: None,
        };
        Ok(Utility {
            config: doc.into_config().map_err(err)?,
        })
    }

    /// From a utility config document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Utility {
            config: UtilityConfig::from_json(text).map_err(err)?,
        })
    }

    #[pyo3(signature = (t, kappa = f64::INFINITY))]
    fn evaluate(&self, t: f64, kappa: f64) -> PyResult<f64> {
        Ok(self.config.utility.evaluate(time(t)?, time(kappa)?))
    }

    #[pyo3(signature = (t, kappa = f64::INFINITY))]
    fn p(&self, t: f64, kappa: f64) -> PyResult<f64> {
        Ok(self.config.utility.p(time(t)?, time(kappa)?))
    }

    fn inverse(&self, v: f64) -> PyResult<f64> {
        Ok(self.config.utility.normalized().inverse(v).map_err(err)?.seconds())
    }

    fn __repr__(&self) -> String {
        format!("Utility({:?})", self.config.utility)
    }
}

#[pyclass(name = "RuntimeDistribution", module = "pyrtu")]
struct RuntimeDistribution {
    inner: runtime_utility::RuntimeDistribution,
}

#[pymethods]
impl RuntimeDistribution {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: runtime_utility::RuntimeDistribution =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(err)?;
        Ok(RuntimeDistribution { inner })
    }

    #[staticmethod]
    fn dirac(t: f64) -> PyResult<Self> {
        Ok(RuntimeDistribution {
            inner: runtime_utility::RuntimeDistribution::Dirac { t: time(t)? },
        })
    }

    /// From `(runtime, probability)` pairs; `math.inf` for runs that never stop.
    #[staticmethod]
    fn discrete(points: Vec<(f64, f64)>) -> PyResult<Self> {
        let pts = points
            .into_iter()
            .map(|(t, w)| Ok((time(t)?, w)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(RuntimeDistribution {
            inner: runtime_utility::RuntimeDistribution::discrete(pts).map_err(err)?,
        })
    }

    fn cdf(&self, t: f64) -> PyResult<f64> {
        Ok(self.inner.cdf(time(t)?))
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.inner.sample(&mut rng).seconds()).collect()
    }

    fn __repr__(&self) -> String {
        format!("RuntimeDistribution({:?})", self.inner)
    }
}

fn captime_for(u: &Utility, kappa: Option<f64>) -> PyResult<CaptimeDistribution> {
    let k = match kappa {
        Some(k) => time(k)?,
        None => u.config.kappa.unwrap_or(ExtendedTime::INFINITY),
    };
    Ok(CaptimeDistribution::Dirac { kappa: k })
}

/// Expected utility by quadrature; `kappa` is the captime for step and linear money.
#[pyfunction]
#[pyo3(signature = (distribution, utility, kappa = None, tol = scoring::DEFAULT_QUAD_TOL))]
fn score_analytic<'py>(
    py: Python<'py>,
    distribution: &RuntimeDistribution,
    utility: &Utility,
    kappa: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let k = captime_for(utility, kappa)?;
    let r = scoring::score_analytic(&distribution.inner, &k, &utility.config.utility, tol).map_err(err)?;
    to_py(py, &r)
}

/// Capped sample mean utility of runs capped at one captime.
#[pyfunction]
#[pyo3(signature = (runtimes, captime, utility, confidence = 0.95))]
fn score_empirical<'py>(
    py: Python<'py>,
    runtimes: Vec<f64>,
    captime: f64,
    utility: &Utility,
    confidence: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let c = time(captime)?;
    let samples = runtimes
        .into_iter()
        .map(|t| Ok(RuntimeSample::capped(time(t)?, c)))
        .collect::<PyResult<Vec<_>>>()?;
    let r = scoring::score_empirical(&samples, &utility.config.utility, confidence).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (runtimes, captime, par_factor = 10.0))]
fn classical<'py>(py: Python<'py>, runtimes: Vec<f64>, captime: f64, par_factor: f64) -> PyResult<Bound<'py, PyAny>> {
    let ts = runtimes.into_iter().map(time).collect::<PyResult<Vec<_>>>()?;
    let c = scoring::classical_scores(&ts, time(captime)?, par_factor).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mean", c.mean)?;
    d.set_item("capped_mean", c.capped_mean)?;
    d.set_item("par", c.par)?;
    d.set_item("par_factor", c.par_factor)?;
    d.set_item("fraction_solved", c.fraction_solved)?;
    d.set_item("censoring_rate", c.censoring_rate)?;
    d.set_item("n", c.n)?;
    Ok(d.into_any())
}

#[pyfunction]
fn plan<'py>(py: Python<'py>, utility: &Utility, epsilon: f64, delta: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &make_plan(&utility.config.utility, epsilon, delta).map_err(err)?)
}

/// Simulated planned estimate against a runtime distribution.
#[pyfunction]
#[pyo3(signature = (distribution, utility, epsilon, delta, seed = 0))]
fn estimate<'py>(
    py: Python<'py>,
    distribution: &RuntimeDistribution,
    utility: &Utility,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let u = &utility.config.utility;
    let p = make_plan(u, epsilon, delta).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = estimate_distribution(&distribution.inner, &p, u, &mut rng).map_err(err)?;
    to_py(py, &e.report)
}

/// Maxent prior for a constraint config document.
#[pyfunction]
fn solve_maxent<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = MaxEntConfig::from_json(config).map_err(err)?;
    let problem = cfg.problem().map_err(err)?;
    let sol = solve(&problem, cfg.tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("edges", problem.edges.clone())?;
    d.set_item("masses", sol.masses.clone())?;
    d.set_item("entropy", sol.entropy)?;
    d.set_item("iterations", sol.iterations)?;
    d.set_item("residuals", sol.residuals.clone())?;
    d.set_item("truncation", sol.truncation)?;
    Ok(d.into_any())
}

#[pyfunction]
fn hoeffding_half_width(n: usize, confidence: f64) -> f64 {
    scoring::hoeffding_half_width(n, confidence)
}

#[pymodule]
fn pyrtu(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Utility>()?;
    m.add_class::<RuntimeDistribution>()?;
    m.add_function(wrap_pyfunction!(score_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(score_empirical, m)?)?;
    m.add_function(wrap_pyfunction!(classical, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_maxent, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_half_width, m)?)?;
    Ok(())
}
