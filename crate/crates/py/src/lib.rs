//! Python bindings. Groups, homomorphisms and presentations are native
//! classes; composite reports are returned as plain dicts decoded from the
//! same JSON the command line emits.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use bsk_core::abelian::{self, FgAbGroup, GroupHom, IntMatrix, Order};
use bsk_core::json::{
    BcReportJson, KHomologyJson, KInputJson, PairSummaryJson, PvSolutionJson, SnfJson,
};
use bsk_core::{bc, json, presentation, pv, solenoid, Error};

create_exception!(bsk, BskError, PyValueError, "Raised for any error reported by the core library.");

fn err(e: Error) -> PyErr {
    BskError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| BskError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> PyResult<IntMatrix> {
    IntMatrix::from_rows(&rows, cols).map_err(err)
}

fn order_to_py(o: Order) -> Option<BigInt> {
    match o {
        Order::Finite(k) => Some(k),
        Order::Infinite => None,
    }
}

/// A finitely generated abelian group `Z^r + Z/d1 + ... + Z/dk`.
#[pyclass(name = "AbelianGroup", module = "bsk", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyGroup {
    inner: FgAbGroup,
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (free_rank, torsion = Vec::new(), gens = None))]
    fn new(free_rank: usize, torsion: Vec<BigInt>, gens: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match gens {
            Some(g) => FgAbGroup::new(free_rank, torsion, g),
            None => FgAbGroup::with_prefix(free_rank, torsion, "g"),
        }
        .map_err(err)?;
        Ok(PyGroup { inner })
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.inner.free_rank()
    }

    #[getter]
    fn torsion(&self) -> Vec<BigInt> {
        self.inner.torsion().to_vec()
    }

    #[getter]
    fn gens(&self) -> Vec<String> {
        self.inner.gen_names().to_vec()
    }

    /// Order of an element given by coordinates; `None` when infinite.
    fn element_order(&self, elem: Vec<BigInt>) -> PyResult<Option<BigInt>> {
        Ok(order_to_py(self.inner.element_order(&elem).map_err(err)?))
    }

    fn normal_form(&self) -> String {
        abelian::normal_form_string(self.inner.free_rank(), self.inner.torsion())
    }

    fn is_isomorphic(&self, other: &PyGroup) -> bool {
        abelian::is_isomorphic(&self.inner, &other.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("AbelianGroup({})", self.inner)
    }
}

/// A homomorphism given by an integer matrix acting on coordinate columns.
#[pyclass(name = "GroupHom", module = "bsk", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyHom {
    inner: GroupHom,
}

#[pymethods]
impl PyHom {
    #[new]
    fn new(source: &PyGroup, target: &PyGroup, matrix_rows: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let m = matrix(matrix_rows, source.inner.ngens())?;
        let inner = GroupHom::new(source.inner.clone(), target.inner.clone(), m).map_err(err)?;
        Ok(PyHom { inner })
    }

    #[getter]
    fn source(&self) -> PyGroup {
        PyGroup { inner: self.inner.source().clone() }
    }

    #[getter]
    fn target(&self) -> PyGroup {
        PyGroup { inner: self.inner.target().clone() }
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.inner.matrix().to_rows()
    }

    fn apply(&self, elem: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        self.inner.apply(&elem).map_err(err)
    }

    /// `(K, inclusion)` with `inclusion: K -> source`.
    fn kernel(&self) -> PyResult<(PyGroup, PyHom)> {
        let (k, i) = abelian::kernel(&self.inner).map_err(err)?;
        Ok((PyGroup { inner: k }, PyHom { inner: i }))
    }

    /// `(C, projection)` with `projection: target -> C`.
    fn cokernel(&self) -> PyResult<(PyGroup, PyHom)> {
        let (c, p) = abelian::cokernel(&self.inner).map_err(err)?;
        Ok((PyGroup { inner: c }, PyHom { inner: p }))
    }

    fn __repr__(&self) -> String {
        format!("GroupHom({})", self.inner)
    }
}

/// Smith normal form of a list of rows, as a dict with `diag`, `rank`, `s`,
/// `u` and `v` where `u·a·v = s`.
#[pyfunction]
#[pyo3(signature = (rows, cols = None))]
fn smith_normal_form<'py>(py: Python<'py>, rows: Vec<Vec<BigInt>>, cols: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cols = cols.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
    let a = matrix(rows, cols)?;
    to_py(py, &SnfJson::new(&a, &abelian::smith_normal_form(&a)))
}

/// Canonical rendering of a one-relator presentation.
#[pyfunction]
fn parse_presentation(text: &str) -> PyResult<String> {
    Ok(presentation::parse(text).map_err(err)?.render())
}

#[pyfunction]
fn abelianization(text: &str) -> PyResult<PyGroup> {
    let p = presentation::parse(text).map_err(err)?;
    Ok(PyGroup { inner: presentation::abelianization(&p).map_err(err)? })
}

/// `(H_0, H_1, H_2)` of the presentation complex.
#[pyfunction]
fn homology(text: &str) -> PyResult<(PyGroup, PyGroup, PyGroup)> {
    let p = presentation::parse(text).map_err(err)?;
    let h = presentation::presentation_homology(&p).map_err(err)?;
    Ok((PyGroup { inner: h.h0 }, PyGroup { inner: h.h1 }, PyGroup { inner: h.h2 }))
}

#[pyfunction]
fn k_homology<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = presentation::parse(text).map_err(err)?;
    let k = presentation::classifying_space_k(&p).map_err(err)?;
    to_py(py, &KHomologyJson::from(&k))
}

/// JSON input describing `BS(1,n)` for [`pv_solve`].
#[pyfunction]
fn bs_input<'py>(py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &KInputJson::from(&pv::bs_input(n).map_err(err)?))
}

/// Solves the six-term sequence for an input dict (or JSON string).
#[pyfunction]
fn pv_solve<'py>(py: Python<'py>, input: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let text: String = if input.is_instance_of::<PyDict>() {
        py.import("json")?.call_method1("dumps", (input,))?.extract()?
    } else {
        input.extract()?
    };
    let k = json::parse_kinput(&text).map_err(err)?;
    to_py(py, &PvSolutionJson::from(&pv::pv_solve(&k).map_err(err)?))
}

#[pyfunction]
fn bc_compare<'py>(py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &BcReportJson::from(&bc::bc_compare(n).map_err(err)?))
}

fn point(n: i64, coords: Vec<(BigInt, BigInt)>) -> PyResult<solenoid::SolenoidPoint> {
    let angles = coords
        .into_iter()
        .map(|(p, q)| solenoid::RationalAngle::new(p, q))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    solenoid::SolenoidPoint::new(n, angles).map_err(err)
}

fn angles(z: &solenoid::SolenoidPoint) -> Vec<(BigInt, BigInt)> {
    z.coords().iter().map(|a| (a.numer().clone(), a.denom().clone())).collect()
}

/// Compatible point `[(p, q), ...]` of `X_n` drawn from `seed`.
#[pyfunction]
fn random_point(n: i64, depth: usize, seed: u64) -> PyResult<Vec<(BigInt, BigInt)>> {
    Ok(angles(&solenoid::random_point(n, depth, seed).map_err(err)?))
}

/// `(z, m/n^l)` as a reduced angle `(p, q)` in `[0, 1)`.
#[pyfunction]
fn pairing(n: i64, coords: Vec<(BigInt, BigInt)>, m: BigInt, l: u32) -> PyResult<(BigInt, BigInt)> {
    let z = point(n, coords)?;
    let a = solenoid::pairing(&z, &solenoid::DyadicRational::new(m, l)).map_err(err)?;
    Ok((a.numer().clone(), a.denom().clone()))
}

#[pyfunction]
fn dual_shift(n: i64, coords: Vec<(BigInt, BigInt)>) -> PyResult<Vec<(BigInt, BigInt)>> {
    Ok(angles(&solenoid::dual_shift(&point(n, coords)?).map_err(err)?))
}

#[pyfunction]
fn check_pairing<'py>(py: Python<'py>, n: i64, depth: usize, seed: u64, trials: usize) -> PyResult<Bound<'py, PyAny>> {
    let t = solenoid::check_pairing_identities(n, depth, seed, trials).map_err(err)?;
    to_py(py, &PairSummaryJson::new(n, depth, seed, &t))
}

#[pymodule]
fn bsk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyHom>()?;
    m.add("BskError", m.py().get_type::<BskError>())?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(parse_presentation, m)?)?;
    m.add_function(wrap_pyfunction!(abelianization, m)?)?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(k_homology, m)?)?;
    m.add_function(wrap_pyfunction!(bs_input, m)?)?;
    m.add_function(wrap_pyfunction!(pv_solve, m)?)?;
    m.add_function(wrap_pyfunction!(bc_compare, m)?)?;
    m.add_function(wrap_pyfunction!(random_point, m)?)?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(dual_shift, m)?)?;
    m.add_function(wrap_pyfunction!(check_pairing, m)?)?;
    Ok(())
}
