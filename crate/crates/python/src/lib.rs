//! Python bindings: `import pa_urn`.

use std::collections::BTreeMap;

use pa_urn::lln::{solve_lln_closed, solve_lln_numeric, LLNSolution, NumericOptions};
use pa_urn::model::{realize_initial, Poly, Segment};
use pa_urn::oracle::{empirical_rate as oracle_rate, Arithmetic, Event, InitialSpec, RateMode};
use pa_urn::rate::{
    linear_path_rate_classical, path_rate_id, path_rate_iinf, preset_path as core_preset_path,
    IinfOptions, Preset, RateReport,
};
use pa_urn::verify::{run_suite, SuiteBudget};
use pa_urn::{simulator, InitialProfile as CoreProfile, Path as CorePath, Schedule as CoreSchedule};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};

fn err(e: pa_urn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(x) => match x.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => x.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        // extended reals are serialized as strings
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY.into_pyobject(py)?.into_any(),
            "-inf" => f64::NEG_INFINITY.into_pyobject(py)?.into_any(),
            "nan" => f64::NAN.into_pyobject(py)?.into_any(),
            _ => s.into_pyobject(py)?.into_any(),
        },
        Value::Array(a) => {
            let items = a.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Piecewise-polynomial schedule `(p(t), beta(t))`.
#[pyclass(frozen, skip_from_py_object, module = "pa_urn")]
#[derive(Clone)]
struct Schedule(CoreSchedule);

#[pymethods]
impl Schedule {
    /// `segments`: list of `(t_start, p_coeffs, beta_coeffs)`, coefficients
    /// in increasing degree.
    #[new]
    fn new(segments: Vec<(f64, Vec<f64>, Vec<f64>)>) -> PyResult<Self> {
        let segs = segments
            .into_iter()
            .map(|(t_start, p, beta)| Segment { t_start, p: Poly(p), beta: Poly(beta) })
            .collect();
        CoreSchedule::new(segs).map(Schedule).map_err(err)
    }

    #[staticmethod]
    fn homogeneous(p: f64, beta: f64) -> PyResult<Self> {
        CoreSchedule::homogeneous(p, beta).map(Schedule).map_err(err)
    }

    #[staticmethod]
    fn figure_one() -> Self {
        Schedule(CoreSchedule::figure_one())
    }

    fn p(&self, t: f64) -> f64 {
        self.0.p(t)
    }

    fn beta(&self, t: f64) -> f64 {
        self.0.beta(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }

    fn __repr__(&self) -> String {
        format!("Schedule(segments={})", self.0.segments().len())
    }
}

/// Initial profile `c` with optional weighted mass.
#[pyclass(frozen, skip_from_py_object, module = "pa_urn")]
#[derive(Clone)]
struct InitialProfile(CoreProfile);

#[pymethods]
impl InitialProfile {
    #[new]
    #[pyo3(signature = (c, c_weighted=None))]
    fn new(c: Vec<f64>, c_weighted: Option<f64>) -> PyResult<Self> {
        CoreProfile::new(c, c_weighted).map(InitialProfile).map_err(err)
    }

    #[staticmethod]
    fn zero() -> Self {
        InitialProfile(CoreProfile::zero())
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.0.c().to_vec()
    }

    #[getter]
    fn c_total(&self) -> f64 {
        self.0.c_total()
    }

    #[getter]
    fn c_weighted(&self) -> f64 {
        self.0.c_weighted()
    }

    #[getter]
    fn is_condensed(&self) -> bool {
        self.0.is_condensed()
    }

    fn __repr__(&self) -> String {
        format!("InitialProfile(c={:?}, c_weighted={})", self.0.c(), self.0.c_weighted())
    }
}

/// Piecewise-linear path in `R^{d+2}`.
#[pyclass(frozen, skip_from_py_object, module = "pa_urn")]
#[derive(Clone)]
struct Path(CorePath);

#[pymethods]
impl Path {
    #[new]
    fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> PyResult<Self> {
        CorePath::new(times, values).map(Path).map_err(err)
    }

    #[staticmethod]
    fn linear(profile: &InitialProfile, gamma: Vec<f64>, d: usize) -> PyResult<Self> {
        CorePath::linear(&profile.0, &gamma, d).map(Path).map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.values().to_vec()
    }

    fn eval(&self, t: f64) -> Vec<f64> {
        self.0.eval(t)
    }

    fn project(&self, r: usize) -> Self {
        Path(self.0.project(r))
    }

    fn is_admissible(&self, profile: &InitialProfile, tol: f64) -> bool {
        pa_urn::validate_path(&self.0, &profile.0, tol).is_admissible
    }

    fn __repr__(&self) -> String {
        format!("Path(d={}, knots={})", self.0.d(), self.0.times().len())
    }
}

/// Truncated LLN solution on a time grid.
#[pyclass(frozen, skip_from_py_object, module = "pa_urn")]
struct LlnSolution(LLNSolution);

#[pymethods]
impl LlnSolution {
    #[getter]
    fn d(&self) -> usize {
        self.0.d
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.0.grid.clone()
    }

    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        self.0.values.clone()
    }

    #[getter]
    fn condensed(&self) -> bool {
        self.0.condensed
    }

    fn mass_error(&self) -> f64 {
        self.0.mass_error()
    }

    fn to_path(&self) -> PyResult<Path> {
        self.0.to_path().map(Path).map_err(err)
    }
}

fn initial_state(
    profile: &InitialProfile,
    n: usize,
    d: usize,
    seed_config: Option<Vec<u64>>,
) -> PyResult<pa_urn::TruncatedState> {
    realize_initial(&profile.0, n, d, seed_config.as_deref()).map_err(err)
}

/// One run of `n` steps truncated at `d`; returns scaled counts at `j/n`.
#[pyfunction]
#[pyo3(signature = (n, d, schedule, profile, seed, seed_config=None))]
fn simulate(
    n: usize,
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    seed: u64,
    seed_config: Option<Vec<u64>>,
) -> PyResult<Vec<Vec<f64>>> {
    let init = initial_state(profile, n, d, seed_config)?;
    let run = simulator::run(n, &schedule.0, &init, seed).map_err(err)?;
    Ok(run.trajectory.iter().map(|s| s.scaled()).collect())
}

/// Terminal-count histogram over `samples` runs: `{counts: runs}`.
#[pyfunction]
#[pyo3(signature = (n, d, schedule, profile, samples, seed, seed_config=None))]
fn terminal_histogram<'py>(
    py: Python<'py>,
    n: usize,
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    samples: usize,
    seed: u64,
    seed_config: Option<Vec<u64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let init = initial_state(profile, n, d, seed_config)?;
    let hist: BTreeMap<Vec<u64>, u64> = py
        .detach(|| simulator::terminal_histogram(n, &schedule.0, &init, samples, seed))
        .map_err(err)?;
    let out = PyDict::new(py);
    for (k, v) in hist {
        out.set_item(PyTuple::new(py, k)?, v)?;
    }
    Ok(out)
}

/// Solves the truncated LLN on `grid`; `method` is `"closed"` or `"numeric"`.
#[pyfunction]
#[pyo3(signature = (d, schedule, profile, grid, method="closed"))]
fn solve_lln(
    d: usize,
    schedule: &Schedule,
    profile: &InitialProfile,
    grid: Vec<f64>,
    method: &str,
) -> PyResult<LlnSolution> {
    let sol = match method {
        "closed" => solve_lln_closed(d, &schedule.0, &profile.0, &grid),
        "numeric" => solve_lln_numeric(d, &schedule.0, &profile.0, &grid, NumericOptions::default()),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    sol.map(LlnSolution).map_err(err)
}

fn report<'py>(py: Python<'py>, r: &RateReport) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, r)
}

/// `I_d` when `d` is given, otherwise `I^inf`.
#[pyfunction]
#[pyo3(signature = (path, schedule, profile, d=None))]
fn path_rate<'py>(
    py: Python<'py>,
    path: &Path,
    schedule: &Schedule,
    profile: &InitialProfile,
    d: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| match d {
            Some(d) => path_rate_id(&path.0, d, &schedule.0, &profile.0, 1e-12),
            None => path_rate_iinf(&path.0, &schedule.0, &profile.0, IinfOptions::default()),
        })
        .map_err(err)?;
    report(py, &r)
}

/// Closed-form rate of the linear path with slopes `gamma` from the zero profile.
#[pyfunction]
fn classical_rate<'py>(py: Python<'py>, gamma: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    report(py, &linear_path_rate_classical(&gamma).map_err(err)?)
}

/// Named path: `star`, `straight-road`, `geometric`, `stretched:r` or `lln`.
#[pyfunction]
fn preset_path(name: &str, d: usize, schedule: &Schedule, profile: &InitialProfile) -> PyResult<Path> {
    let preset: Preset = name.parse().map_err(err)?;
    core_preset_path(preset, d, &schedule.0, &profile.0).map(Path).map_err(err)
}

/// Empirical rate `-(1/n) log P(event)` for each `n` in `n_list`.
///
/// `event` is `"star"` or `"straight-road"`; `mode` is `"rational"`,
/// `"float"` or `"mc"`.
#[pyfunction]
#[pyo3(signature = (event, n_list, d, schedule, sizes, mode="rational", samples=100_000, seed=0))]
#[allow(clippy::too_many_arguments)]
fn empirical_rate<'py>(
    py: Python<'py>,
    event: &str,
    n_list: Vec<usize>,
    d: usize,
    schedule: &Schedule,
    sizes: Vec<u64>,
    mode: &str,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let event = match event {
        "star" => Event::Star,
        "straight-road" => Event::StraightRoad,
        other => return Err(PyValueError::new_err(format!("unknown event {other:?}"))),
    };
    let mode = match mode {
        "rational" => RateMode::Exact(Arithmetic::Rational),
        "float" => RateMode::Exact(Arithmetic::Float),
        "mc" => RateMode::MonteCarlo { samples, seed },
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let init = InitialSpec::Sizes(sizes);
    let r = py
        .detach(|| oracle_rate(&event, &n_list, d, &schedule.0, &init, mode))
        .map_err(err)?;
    to_py(py, &r)
}

/// Runs the acceptance suite; `budget` is `"full"` or `"reduced"`.
#[pyfunction]
#[pyo3(signature = (budget="reduced", seed=20_240_601))]
fn verify<'py>(py: Python<'py>, budget: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let budget = match budget {
        "full" => SuiteBudget::Full,
        "reduced" => SuiteBudget::Reduced,
        other => return Err(PyValueError::new_err(format!("unknown budget {other:?}"))),
    };
    let r = py.detach(|| run_suite(budget, seed));
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "pa_urn")]
fn pa_urn_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Schedule>()?;
    m.add_class::<InitialProfile>()?;
    m.add_class::<Path>()?;
    m.add_class::<LlnSolution>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(terminal_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lln, m)?)?;
    m.add_function(wrap_pyfunction!(path_rate, m)?)?;
    m.add_function(wrap_pyfunction!(classical_rate, m)?)?;
    m.add_function(wrap_pyfunction!(preset_path, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_rate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
