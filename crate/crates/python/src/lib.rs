//! Python bindings: systems, tropisms, mixed volumes, the homotopy solver
//! and series certificates.

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;

use tropcert::catalog;
use tropcert::certificate::{self, OrderGain};
use tropcert::lattice::IntVector;
use tropcert::mixedvol;
use tropcert::polynomial::{parse_system, Coefficient, LaurentSystem};
use tropcert::solver::{self, SolverOptions};
use tropcert::tropism::{self, EnumerationOptions};
use tropcert::Error;

const DEFAULT_SEED: u64 = 0xC0FFEE;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DegenerateLifting | Error::PathFailure(_) | Error::Singular | Error::RankDeficient => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn vector(v: &IntVector) -> PyResult<Vec<i64>> {
    v.to_i64s().ok_or_else(|| to_py(Error::ExponentOverflow))
}

fn gain_to_py(py: Python<'_>, g: OrderGain) -> PyResult<Py<PyAny>> {
    Ok(match g {
        OrderGain::Gain(k) => k.into_pyobject(py)?.into_any().unbind(),
        OrderGain::ExactZero => PyString::new(py, "exact-zero").into_any().unbind(),
    })
}

/// A square or overdetermined system of Laurent polynomials.
#[pyclass(name = "System", module = "tropcert", frozen)]
struct PySystem {
    inner: LaurentSystem,
}

#[pymethods]
impl PySystem {
    /// Parses equations separated by `;`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySystem { inner: parse_system(text).map_err(to_py)? })
    }

    /// One of the bundled examples: binomial, cyclic4, cyclic8, cyclic12.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        catalog::bundled(name)
            .map(|inner| PySystem { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown example {name:?}")))
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        if n < 2 {
            return Err(PyValueError::new_err("cyclic systems need at least 2 variables"));
        }
        Ok(PySystem { inner: catalog::cyclic(n) })
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("System({} equations in {} variables)", self.inner.len(), self.inner.nvars())
    }

    /// Exponent vectors of each equation.
    fn supports(&self) -> Vec<Vec<Vec<i64>>> {
        self.inner.supports().iter().map(|a| a.points().to_vec()).collect()
    }

    fn eval(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        if x.len() != self.inner.nvars() {
            return Err(PyValueError::new_err(format!("expected {} values", self.inner.nvars())));
        }
        Ok(self.inner.eval(&x))
    }
}

/// A Puiseux series certificate for a curve of solutions.
#[pyclass(name = "Certificate", module = "tropcert", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCertificate {
    inner: certificate::Certificate,
}

#[pymethods]
impl PyCertificate {
    /// A one-term certificate with leading coefficients `coefficients`
    /// along `tropism`, which must be primitive with a positive first entry.
    #[staticmethod]
    #[pyo3(signature = (tropism, coefficients, second = None))]
    fn from_leading(tropism: Vec<i64>, coefficients: Vec<Complex64>, second: Option<Vec<Complex64>>) -> PyResult<Self> {
        let lead = coefficients.into_iter().map(Coefficient::from_complex).collect();
        let mut c = certificate::Certificate::from_leading(IntVector::from_i64s(&tropism), lead).map_err(to_py)?;
        if let Some(d) = second {
            c = c.with_second(d.into_iter().map(Coefficient::from_complex).collect()).map_err(to_py)?;
        }
        Ok(PyCertificate { inner: c })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCertificate { inner: certificate::Certificate::from_json(&value).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn tropism(&self) -> PyResult<Vec<i64>> {
        vector(&self.inner.tropism)
    }

    #[getter]
    fn exponents(&self) -> Vec<i64> {
        self.inner.exponents.clone()
    }

    #[getter]
    fn leading(&self) -> Vec<Complex64> {
        self.inner.leading.iter().map(Coefficient::value).collect()
    }

    #[getter]
    fn second(&self) -> Option<Vec<Complex64>> {
        self.inner.second.as_ref().map(|d| d.iter().map(Coefficient::value).collect())
    }

    /// Point of the truncated series at parameter `t`.
    fn at(&self, t: Complex64) -> Vec<Complex64> {
        self.inner.series().eval(t)
    }

    /// Order gain on `system`: an integer, or "exact-zero".
    fn verify(&self, py: Python<'_>, system: &PySystem) -> PyResult<Py<PyAny>> {
        let g = certificate::verify(&system.inner, &self.inner).map_err(to_py)?;
        gain_to_py(py, g)
    }

    #[pyo3(signature = (roots = 1))]
    fn degree(&self, roots: usize) -> i64 {
        certificate::degree(&self.inner, roots)
    }

    #[pyo3(signature = (seed = DEFAULT_SEED))]
    fn degree_by_hyperplane(&self, seed: u64) -> PyResult<i64> {
        certificate::degree_by_hyperplane(&self.inner, seed).map_err(to_py)
    }

    /// The images of this curve under the group generated by `generators`.
    fn orbit(&self, generators: Vec<Vec<usize>>) -> PyResult<Vec<PyCertificate>> {
        let curves = certificate::curve_orbit(&self.inner, &generators).map_err(to_py)?;
        Ok(curves.into_iter().map(|inner| PyCertificate { inner }).collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Certificate(tropism={})", self.inner.tropism)
    }
}

/// Result of `certify`.
#[pyclass(name = "Report", module = "tropcert", frozen)]
struct PyReport {
    inner: certificate::PipelineReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn outcome(&self) -> String {
        self.inner.outcome.to_string()
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.inner.degree
    }

    #[getter]
    fn tropisms(&self) -> PyResult<Vec<Vec<i64>>> {
        self.inner.tropisms.iter().map(|t| vector(&t.tropism)).collect()
    }

    #[getter]
    fn certificates(&self) -> Vec<PyCertificate> {
        self.inner.certificates().cloned().map(|inner| PyCertificate { inner }).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Result of `solve`.
#[pyclass(name = "Solutions", module = "tropcert", frozen, get_all)]
struct PySolutions {
    /// Regular finite endpoints.
    roots: Vec<Vec<Complex64>>,
    /// Slack values of the roots, when the system was embedded.
    slack: Option<Vec<Complex64>>,
    at_infinity: usize,
    failures: usize,
    paths: usize,
}

#[pymethods]
impl PySolutions {
    fn __len__(&self) -> usize {
        self.roots.len()
    }

    fn __repr__(&self) -> String {
        format!("Solutions({} roots of {} paths)", self.roots.len(), self.paths)
    }
}

/// Pretropisms of a system, with positive first entry unless `all`.
#[pyfunction]
#[pyo3(signature = (system, all = false))]
fn tropisms(system: &PySystem, all: bool) -> PyResult<Vec<Vec<i64>>> {
    let opts = EnumerationOptions { positive_first: !all };
    let ts = tropism::enumerate_pretropisms_with(&system.inner, &opts).map_err(to_py)?;
    ts.iter().map(|t| vector(&t.v)).collect()
}

/// Orbits of directions under the permutations `generators` (0-based images).
#[pyfunction]
fn orbits(directions: Vec<Vec<i64>>, generators: Vec<Vec<usize>>) -> PyResult<Vec<Vec<usize>>> {
    tropism::group_orbits(&directions, &generators).map_err(to_py)
}

#[pyfunction]
fn cyclic_generator(n: usize) -> Vec<usize> {
    tropism::cyclic_generator(n)
}

/// Mixed volume of the Newton polytopes of a square system.
#[pyfunction]
#[pyo3(signature = (system, method = "lifting", seed = DEFAULT_SEED))]
fn mixed_volume(system: &PySystem, method: &str, seed: u64) -> PyResult<BigInt> {
    let s = &system.inner;
    if s.len() != s.nvars() {
        return Err(PyValueError::new_err(format!("{} equations in {} unknowns", s.len(), s.nvars())));
    }
    let supports = s.supports();
    match method {
        "lifting" => mixedvol::mixed_volume(&supports, seed),
        "recursive" => mixedvol::mixed_volume_recursive(&supports),
        _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
    }
    .map_err(to_py)
}

/// Numerical roots in the torus; one equation too many is handled with a slack variable.
#[pyfunction]
#[pyo3(signature = (system, seed = DEFAULT_SEED, max_paths = 100_000))]
fn solve(py: Python<'_>, system: &PySystem, seed: u64, max_paths: usize) -> PyResult<PySolutions> {
    let s = &system.inner;
    let embedded = s.len() == s.nvars() + 1;
    let report = py
        .detach(|| {
            let target = if embedded { solver::embed_slack(s, seed)? } else { s.clone() };
            let opts = SolverOptions { seed, max_paths, ..SolverOptions::default() };
            solver::solve_square_numeric_with(&target, &opts)
        })
        .map_err(to_py)?;
    let regular: Vec<_> = report.regular_roots().cloned().collect();
    let (roots, slack) = if embedded {
        let split: Vec<_> = regular.into_iter().map(solver::NumericRoot::split_slack).collect();
        let slack = split.iter().map(|r| r.slack.unwrap_or_default()).collect();
        (split.into_iter().map(|r| r.coords).collect(), Some(slack))
    } else {
        (regular.into_iter().map(|r| r.coords).collect(), None)
    };
    Ok(PySolutions { roots, slack, at_infinity: report.at_infinity, failures: report.failures, paths: report.paths })
}

/// Tropisms, initial roots and verified series certificates of the curves.
#[pyfunction]
#[pyo3(signature = (system, seed = DEFAULT_SEED))]
fn certify(py: Python<'_>, system: &PySystem, seed: u64) -> PyResult<PyReport> {
    let s = &system.inner;
    let inner = py.detach(|| certificate::certify_curves(s, seed)).map_err(to_py)?;
    Ok(PyReport { inner })
}

#[pymodule]
#[pyo3(name = "tropcert")]
fn tropcert_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PySolutions>()?;
    m.add_function(wrap_pyfunction!(tropisms, m)?)?;
    m.add_function(wrap_pyfunction!(orbits, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_generator, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_volume, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}

/// Registers the module so embedded interpreters can import it.
pub fn register() {
    pyo3::append_to_inittab!(tropcert_module);
}
