//! Python bindings: `import advreg`.

use advreg_core as core;
use advreg_core::mesh::CLASSIFY_TOL;
use advreg_core::{ErrorRecord, Norm, Preset, SolverKind, SolverOptions, SweepConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

pyo3::create_exception!(advreg, SolverError, PyRuntimeError, "The linear solve failed.");

fn to_py(e: core::Error) -> PyErr {
    if e.is_solver_failure() {
        SolverError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

/// Structured right-triangle mesh of the unit square.
#[pyclass(name = "Mesh", module = "advreg", frozen)]
struct PyMesh {
    inner: core::Mesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(n_cells: usize) -> PyResult<Self> {
        Ok(Self {
            inner: core::Mesh::unit_square(n_cells).map_err(to_py)?,
        })
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.vertices.len()
    }

    #[getter]
    fn n_triangles(&self) -> usize {
        self.inner.triangles.len()
    }

    fn vertices(&self) -> Vec<(f64, f64)> {
        self.inner.vertices.iter().map(|p| (p[0], p[1])).collect()
    }

    fn triangles(&self) -> Vec<(usize, usize, usize)> {
        self.inner.triangles.iter().map(|t| (t[0], t[1], t[2])).collect()
    }

    /// `(a, b, tag)` per boundary edge, counter-clockwise, for `problem`'s advection field.
    fn boundary_edges(&self, problem: &PyProblem) -> Vec<(usize, usize, String)> {
        let tags = core::classify_boundary(&self.inner, |x| problem.inner.beta(x), CLASSIFY_TOL);
        self.inner
            .boundary_edges
            .iter()
            .zip(tags)
            .map(|(e, t)| (e.vertices[0], e.vertices[1], t.to_string()))
            .collect()
    }

    fn total_area(&self) -> f64 {
        (0..self.inner.triangles.len()).map(|t| self.inner.signed_area(t)).sum()
    }

    fn __repr__(&self) -> String {
        format!("Mesh(n_cells={}, h={:.6e})", self.inner.n_cells, self.inner.h)
    }
}

/// One of the four registry problems.
#[pyclass(name = "Problem", module = "advreg", frozen)]
struct PyProblem {
    inner: core::Problem,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (label, s = None))]
    fn new(label: &str, s: Option<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::Problem::from_label(label, s).map_err(to_py)?,
        })
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label()
    }

    #[getter]
    fn s(&self) -> Option<f64> {
        self.inner.s()
    }

    fn u(&self, x: f64, y: f64) -> f64 {
        self.inner.u([x, y])
    }

    fn grad_u(&self, x: f64, y: f64) -> (f64, f64) {
        let g = self.inner.grad_u([x, y]);
        (g[0], g[1])
    }

    fn beta(&self, x: f64, y: f64) -> (f64, f64) {
        let b = self.inner.beta([x, y]);
        (b[0], b[1])
    }

    fn mu(&self, x: f64, y: f64) -> f64 {
        self.inner.mu([x, y])
    }

    fn f(&self, x: f64, y: f64) -> f64 {
        self.inner.f([x, y])
    }

    #[pyo3(signature = (n_samples = 64))]
    fn coercivity_constant(&self, n_samples: usize) -> PyResult<f64> {
        self.inner.coercivity_constant(n_samples).map_err(to_py)
    }

    /// Theoretical exponent of `norm` (`l2_domain`, `l2_gamma_plus`, `h1_semi`, `l2_gamma0`).
    fn expected_rate(&self, norm: &str) -> PyResult<f64> {
        self.inner.expected_rate(parse::<Norm>(norm)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        match self.inner.s() {
            Some(s) => format!("Problem('{}', s={s})", self.inner.label()),
            None => format!("Problem('{}')", self.inner.label()),
        }
    }
}

/// Error norms and diagnostics from one solve.
#[pyclass(name = "SolveResult", module = "advreg", frozen, get_all)]
struct PySolveResult {
    epsilon: f64,
    l2_domain: f64,
    l2_gamma_plus: Option<f64>,
    h1_semi: f64,
    l2_gamma0: Option<f64>,
    residual: f64,
    iterations: usize,
    peclet: f64,
    /// Discrete solution at the mesh vertices.
    values: Vec<f64>,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(epsilon={:e}, l2_domain={:.4e}, h1_semi={:.4e}, residual={:.1e})",
            self.epsilon, self.l2_domain, self.h1_semi, self.residual
        )
    }
}

fn solver_options(solver: &str, tol: f64, max_iter: usize) -> PyResult<SolverOptions> {
    Ok(SolverOptions {
        kind: parse::<SolverKind>(solver)?,
        tol,
        max_iter,
    })
}

/// Solves the regularized problem at one epsilon on an `n_cells` mesh.
#[pyfunction]
#[pyo3(signature = (problem, epsilon, n_cells = 64, solver = "direct", tol = 1e-10, max_iter = 5000))]
fn solve(
    py: Python<'_>,
    problem: &PyProblem,
    epsilon: f64,
    n_cells: usize,
    solver: &str,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySolveResult> {
    core::RegularizedProblem::new(problem.inner, epsilon).map_err(to_py)?;
    let options = solver_options(solver, tol, max_iter)?;
    let inner = problem.inner;
    let out = py
        .detach(|| core::SolveContext::new(inner, n_cells)?.solve(epsilon, &options))
        .map_err(to_py)?;
    Ok(PySolveResult {
        epsilon: out.epsilon,
        l2_domain: out.norms.l2_domain,
        l2_gamma_plus: out.norms.l2_gamma_plus,
        h1_semi: out.norms.h1_semi,
        l2_gamma0: out.norms.l2_gamma0,
        residual: out.residual,
        iterations: out.iterations,
        peclet: out.peclet,
        values: out.values,
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_config(
    example: &str,
    s: Option<f64>,
    preset: &str,
    n_cells: Option<usize>,
    k_min: Option<i32>,
    k_max: Option<i32>,
    fit_lo: Option<i32>,
    fit_hi: Option<i32>,
    solver: &str,
    jobs: usize,
) -> PyResult<SweepConfig> {
    let base = SweepConfig::preset(parse::<Preset>(preset)?, example, s);
    let k_min = k_min.unwrap_or(base.k_min);
    let k_max = k_max.unwrap_or(base.k_max);
    Ok(SweepConfig {
        n_cells: n_cells.unwrap_or(base.n_cells),
        k_min,
        k_max,
        fit_lo: fit_lo.unwrap_or(base.fit_lo.max(k_min)),
        fit_hi: fit_hi.unwrap_or(base.fit_hi.min(k_max)),
        solver: solver_options(solver, 1e-10, 5000)?,
        jobs,
        ..base
    })
}

type Dicts<'py> = Vec<Bound<'py, PyDict>>;

fn record_dict<'py>(py: Python<'py>, r: &ErrorRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("k", r.k)?;
    d.set_item("eps", r.epsilon)?;
    d.set_item("l2_domain", r.l2_domain)?;
    d.set_item("l2_gamma_plus", r.l2_gamma_plus)?;
    d.set_item("h1_semi", r.h1_semi)?;
    d.set_item("l2_gamma0", r.l2_gamma0)?;
    d.set_item("residual", r.residual)?;
    d.set_item("peclet", r.peclet)?;
    Ok(d)
}

/// Runs an epsilon sweep and returns `(records, fits)` as lists of dicts.
/// Explicit grid arguments override the preset.
#[pyfunction]
#[pyo3(signature = (example, s = None, preset = "desk", n_cells = None, k_min = None, k_max = None,
                    fit_lo = None, fit_hi = None, solver = "direct", jobs = 0))]
#[allow(clippy::too_many_arguments)]
fn run_sweep<'py>(
    py: Python<'py>,
    example: &str,
    s: Option<f64>,
    preset: &str,
    n_cells: Option<usize>,
    k_min: Option<i32>,
    k_max: Option<i32>,
    fit_lo: Option<i32>,
    fit_hi: Option<i32>,
    solver: &str,
    jobs: usize,
) -> PyResult<(Dicts<'py>, Dicts<'py>)> {
    let config = sweep_config(example, s, preset, n_cells, k_min, k_max, fit_lo, fit_hi, solver, jobs)?;
    config.validate().map_err(to_py)?;
    let (records, fits) = py
        .detach(|| {
            let records = core::run_sweep(&config)?;
            let fits = core::sweep::fit_summary(&records, &config)?;
            Ok((records, fits))
        })
        .map_err(to_py)?;
    let records_py = records.iter().map(|r| record_dict(py, r)).collect::<PyResult<_>>()?;
    let fits_py = fits
        .iter()
        .map(|f| {
            let d = PyDict::new(py);
            d.set_item("norm", &f.norm)?;
            d.set_item("rate", f.rate)?;
            d.set_item("intercept", f.intercept)?;
            d.set_item("r_squared", f.r_squared)?;
            d.set_item("expected_rate", f.expected_rate)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    Ok((records_py, fits_py))
}

/// Least-squares fit of `ln(error)` against `ln(eps)`: returns `(rate, intercept, r_squared)`.
#[pyfunction]
fn fit_power_law(eps: Vec<f64>, errors: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    if eps.len() != errors.len() {
        return Err(PyValueError::new_err("eps and errors must have the same length"));
    }
    let samples: Vec<(f64, f64)> = eps.into_iter().zip(errors).collect();
    core::sweep::fit_power_law(&samples).map_err(to_py)
}

/// Runs an example4 sweep per `s` and returns one dict per row.
#[pyfunction]
#[pyo3(signature = (s_list, preset = "desk", n_cells = None, k_min = None, k_max = None,
                    fit_lo = None, fit_hi = None, solver = "direct", jobs = 0))]
#[allow(clippy::too_many_arguments)]
fn alpha_study<'py>(
    py: Python<'py>,
    s_list: Vec<f64>,
    preset: &str,
    n_cells: Option<usize>,
    k_min: Option<i32>,
    k_max: Option<i32>,
    fit_lo: Option<i32>,
    fit_hi: Option<i32>,
    solver: &str,
    jobs: usize,
) -> PyResult<Dicts<'py>> {
    let template = sweep_config(
        "example4", None, preset, n_cells, k_min, k_max, fit_lo, fit_hi, solver, jobs,
    )?;
    template.validate().map_err(to_py)?;
    let rows = py.detach(|| core::alpha_study(&s_list, &template)).map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("s", r.s)?;
            d.set_item("alpha", r.alpha)?;
            d.set_item("rate", r.rate)?;
            d.set_item("expected_rate", r.expected_rate)?;
            d.set_item("status", &r.status)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn alpha_of_s(s: f64) -> PyResult<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(PyValueError::new_err(format!("s must be positive and finite, got {s}")));
    }
    Ok(core::alpha_of_s(s))
}

/// `min(1, (3 + alpha) / 4)`.
#[pyfunction]
fn alpha_rate(alpha: f64) -> f64 {
    core::alpha_rate(alpha)
}

#[pymodule]
fn advreg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_study, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_of_s, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_rate, m)?)?;
    Ok(())
}
