//! Python bindings: polynomials in the ladder operators, Fock-space states,
//! moment tables and the separability tests built on them.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ptwitness::criteria::{self, OperatorBasis};
use ptwitness::opalg;
use ptwitness::states::{self, BuildOptions};

type Index = (u32, u32, u32, u32);

fn to_py(e: ptwitness::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn index(u: Index) -> opalg::MultiIndex {
    opalg::MultiIndex::new(u.0, u.1, u.2, u.3)
}

fn tuple(u: &opalg::MultiIndex) -> Index {
    (u.n, u.m, u.k, u.l)
}

/// Normally ordered polynomial in `a, a†, b, b†`.
#[pyclass(
    name = "Polynomial",
    module = "ptwitness_py",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
pub struct PyPolynomial {
    inner: opalg::NormalPolynomial,
}

impl From<opalg::NormalPolynomial> for PyPolynomial {
    fn from(inner: opalg::NormalPolynomial) -> Self {
        PyPolynomial { inner }
    }
}

#[pymethods]
impl PyPolynomial {
    /// Parse the text form, e.g. `"(1,0)·ad^1 a^1 + (0.5,0)"`.
    #[new]
    #[pyo3(signature = (text = "0"))]
    fn new(text: &str) -> PyResult<Self> {
        text.parse::<opalg::NormalPolynomial>()
            .map(Into::into)
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (n, m, k, l, coeff = Complex64::new(1.0, 0.0)))]
    fn monomial(n: u32, m: u32, k: u32, l: u32, coeff: Complex64) -> Self {
        opalg::NormalPolynomial::term(opalg::MultiIndex::new(n, m, k, l), coeff).into()
    }

    #[staticmethod]
    fn a() -> Self {
        opalg::NormalPolynomial::a().into()
    }

    #[staticmethod]
    fn ad() -> Self {
        opalg::NormalPolynomial::ad().into()
    }

    #[staticmethod]
    fn b() -> Self {
        opalg::NormalPolynomial::b().into()
    }

    #[staticmethod]
    fn bd() -> Self {
        opalg::NormalPolynomial::bd().into()
    }

    fn terms(&self) -> Vec<(Index, Complex64)> {
        self.inner.terms().map(|(u, c)| (tuple(u), *c)).collect()
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    fn multiply(&self, other: &PyPolynomial) -> PyResult<Self> {
        self.inner
            .multiply(&other.inner)
            .map(Into::into)
            .map_err(to_py)
    }

    fn adjoint(&self) -> Self {
        self.inner.adjoint().into()
    }

    fn pt_transform(&self) -> Self {
        self.inner.pt_transform().into()
    }

    fn __mul__(&self, other: &PyPolynomial) -> PyResult<Self> {
        self.multiply(other)
    }

    fn __add__(&self, other: &PyPolynomial) -> Self {
        (&self.inner + &other.inner).into()
    }

    fn __sub__(&self, other: &PyPolynomial) -> Self {
        (&self.inner - &other.inner).into()
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }
}

/// Two-mode density matrix on a truncated Fock space.
#[pyclass(name = "State", module = "ptwitness_py", frozen)]
pub struct PyState {
    inner: Arc<states::FockState>,
}

#[pymethods]
impl PyState {
    /// Build from a `{"kind", "params", "cutoffs"}` document.
    #[staticmethod]
    #[pyo3(signature = (text, allow_truncation = false))]
    fn from_json(text: &str, allow_truncation: bool) -> PyResult<Self> {
        let spec = states::StateSpec::from_json(text).map_err(to_py)?;
        let state = states::build_with(&spec, BuildOptions { allow_truncation }).map_err(to_py)?;
        Ok(PyState {
            inner: Arc::new(state),
        })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn tail_mass(&self) -> f64 {
        states::tail_mass(&self.inner)
    }

    fn partial_transpose(&self) -> Self {
        PyState {
            inner: Arc::new(states::partial_transpose(&self.inner)),
        }
    }

    fn min_eigenvalue(&self) -> PyResult<f64> {
        states::min_eigenvalue(self.inner.rho()).map_err(to_py)
    }

    fn expectation(&self, p: &PyPolynomial) -> PyResult<Complex64> {
        states::expectation(&self.inner, &p.inner).map_err(to_py)
    }

    /// Dense dump of the density matrix as JSON.
    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "State({:?}, dims={:?})",
            self.inner.label(),
            self.inner.dims()
        )
    }
}

/// Moments of a state (or an imported table) and the tests that use them.
#[pyclass(name = "MomentTable", module = "ptwitness_py", frozen)]
pub struct PyMomentTable {
    inner: ptwitness::MomentTable,
}

#[pymethods]
impl PyMomentTable {
    #[new]
    fn new(state: &PyState) -> Self {
        PyMomentTable {
            inner: ptwitness::MomentTable::from_shared_state(state.inner.clone()),
        }
    }

    /// Import `[{"index": [n,m,k,l], "value": [re,im]}, ...]`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMomentTable {
            inner: ptwitness::MomentTable::from_json(text).map_err(to_py)?,
        })
    }

    #[getter]
    fn max_degree(&self) -> u32 {
        self.inner.max_degree()
    }

    fn moment(&self, u: Index) -> PyResult<Complex64> {
        self.inner.moment(&index(u)).map_err(to_py)
    }

    fn pt_moment(&self, u: Index) -> PyResult<Complex64> {
        self.inner.pt_moment(&index(u)).map_err(to_py)
    }

    /// Export the first `count` moments in canonical order.
    fn to_json(&self, count: usize) -> PyResult<String> {
        self.inner
            .to_json(&opalg::enumerate_indices(count))
            .map_err(to_py)
    }

    /// Leading minors `D_1..D_nmax`: `(verdict, order_reached, [D_N])`.
    #[pyo3(signature = (nmax, tol = 1e-8))]
    fn scan(&self, nmax: usize, tol: f64) -> PyResult<(String, usize, Vec<f64>)> {
        let report = criteria::hierarchy_scan(&self.inner, nmax, tol).map_err(to_py)?;
        Ok((
            report.verdict.kind.as_str().to_string(),
            report.verdict.order_reached,
            report.determinants.iter().map(|d| d.value).collect(),
        ))
    }

    /// Most negative principal minor over all monomials up to `pool_degree`.
    #[pyo3(signature = (pool_degree, max_size, tol = 1e-8))]
    fn minor_search(
        &self,
        pool_degree: u32,
        max_size: usize,
        tol: f64,
    ) -> PyResult<(String, f64, Vec<Index>)> {
        let pool = opalg::indices_up_to_degree(pool_degree);
        let search =
            criteria::principal_minor_search(&self.inner, &pool, max_size).map_err(to_py)?;
        let verdict = search.verdict(tol);
        Ok((
            verdict.kind.as_str().to_string(),
            search.best.value,
            search.best.indices.iter().map(tuple).collect(),
        ))
    }

    /// Determinant of the moment matrix over the given monomials.
    fn determinant(&self, indices: Vec<Index>) -> PyResult<f64> {
        let idx: Vec<_> = indices.into_iter().map(index).collect();
        let basis = OperatorBasis::from_indices(&idx, "custom").map_err(to_py)?;
        criteria::build_matrix(&self.inner, &basis)
            .and_then(|m| m.determinant())
            .map_err(to_py)
    }

    fn simon_s(&self) -> PyResult<f64> {
        criteria::simon_s(&self.inner).map_err(to_py)
    }

    fn duan(&self, r: f64) -> PyResult<f64> {
        criteria::duan(&self.inner, r).map_err(to_py)
    }

    fn duan_min(&self) -> PyResult<f64> {
        criteria::duan_min(&self.inner).map_err(to_py)
    }

    fn det_d(&self) -> PyResult<f64> {
        criteria::det_d(&self.inner).map_err(to_py)
    }

    fn det_s(&self) -> PyResult<f64> {
        criteria::det_s(&self.inner).map_err(to_py)
    }

    fn two_term(&self, u: Index, v: Index) -> PyResult<f64> {
        criteria::two_term_condition(&self.inner, &index(u), &index(v)).map_err(to_py)
    }

    /// Named criteria as `(name, value, verdict)`.
    #[pyo3(signature = (tol = 1e-8))]
    fn criteria(&self, tol: f64) -> PyResult<Vec<(String, f64, String)>> {
        Ok(criteria::named_criteria(&self.inner, tol)
            .map_err(to_py)?
            .into_iter()
            .map(|r| (r.criterion, r.value, r.verdict))
            .collect())
    }
}

#[pyfunction]
fn enumerate_indices(count: usize) -> Vec<Index> {
    opalg::enumerate_indices(count).iter().map(tuple).collect()
}

/// Normal form of `aⁿ a†ᵐ`.
#[pyfunction]
fn antinormal_to_normal(n: u32, m: u32) -> PyPolynomial {
    opalg::antinormal_to_normal(n, m).into()
}

#[pymodule]
fn ptwitness_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyMomentTable>()?;
    m.add_function(wrap_pyfunction!(enumerate_indices, m)?)?;
    m.add_function(wrap_pyfunction!(antinormal_to_normal, m)?)?;
    m.add("SCHEMA_VERSION", ptwitness::json::SCHEMA_VERSION)?;
    Ok(())
}
