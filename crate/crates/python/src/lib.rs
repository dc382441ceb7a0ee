//! Python bindings: groups, records, formal surgery, deciders and the
//! lemma oracles.

use ::clasper as core;
use core::decide::{decide_y2, Decision, Mode};
use core::fgab::FgAbelianGroup;
use core::invariants::{validate_record, InvariantRecord};
use core::io::{certificate_to_json, graphs_from_json, record_from_str, record_to_string};
use core::trivector::{detect_nonzero, Trivector};
use core::ygraph::{y_group, SpecialPair};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_u64().unwrap_or(0).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

/// A finitely generated abelian group `⊕ Z_{n_i}` (order 0 means `Z`).
#[pyclass(name = "AbelianGroup", frozen)]
struct PyGroup(FgAbelianGroup);

#[pymethods]
impl PyGroup {
    #[new]
    fn new(orders: Vec<u64>) -> PyResult<Self> {
        if orders.contains(&1) {
            return Err(PyValueError::new_err("orders must not contain 1"));
        }
        Ok(PyGroup(FgAbelianGroup::new(orders)))
    }

    #[getter]
    fn orders(&self) -> Vec<u64> {
        self.0.orders().to_vec()
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn invariant_factors(&self) -> Vec<u64> {
        self.0.invariant_factors()
    }

    fn cardinality(&self) -> Option<u128> {
        self.0.cardinality()
    }

    fn is_isomorphic(&self, other: &PyGroup) -> bool {
        self.0.is_isomorphic(&other.0)
    }

    /// Invariant factors of the graph group with the given special element.
    #[pyo3(signature = (special=None))]
    fn y_group_invariant_factors(&self, special: Option<Vec<i64>>) -> PyResult<Vec<u64>> {
        let s = match special {
            Some(c) => self.0.element(&c).map_err(err)?,
            None => self.0.zero(),
        };
        Ok(y_group(&SpecialPair::new(s).map_err(err)?).map_err(err)?.invariant_factors())
    }

    /// Smallest detecting modulus of the trivector with the given
    /// coefficients on sorted index triples, or `None` if it is zero.
    fn detect_trivector(&self, terms: Vec<([usize; 3], i64)>) -> PyResult<Option<u64>> {
        let mut x = Trivector::zero(&self.0);
        for (t, c) in terms {
            if t.iter().any(|&i| i >= self.0.rank()) {
                return Err(PyValueError::new_err(format!("index triple {t:?} out of range")));
            }
            x = x.try_add(&Trivector::basis(&self.0, t).scale(c)).map_err(err)?;
        }
        detect_nonzero(&x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("AbelianGroup({:?})", self.0.orders())
    }
}

/// An invariant record `(H, S, λ, q, (u^(n)), R)`.
#[pyclass(name = "Record", frozen)]
struct PyRecord(InvariantRecord);

#[pymethods]
impl PyRecord {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRecord(record_from_str(text).map_err(err)?))
    }

    #[staticmethod]
    fn homology_sphere(rochlin: u8) -> Self {
        PyRecord(InvariantRecord::homology_sphere(rochlin))
    }

    fn to_json(&self) -> String {
        record_to_string(&self.0)
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup(self.0.homology.clone())
    }

    #[getter]
    fn moduli(&self) -> Vec<u64> {
        self.0.moduli()
    }

    #[getter]
    fn rochlin(&self) -> Vec<u8> {
        self.0.rochlin.clone()
    }

    /// `(constraint, witness)` pairs; empty iff the record is valid.
    fn validate(&self) -> Vec<(String, String)> {
        validate_record(&self.0).into_iter().map(|v| (v.constraint.to_string(), v.witness)).collect()
    }

    /// Formal surgery along a JSON list of graphs.
    fn surger(&self, graphs_json: &str) -> PyResult<PyRecord> {
        let v: Value = serde_json::from_str(graphs_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let graphs = graphs_from_json(&self.0.spin, &v).map_err(err)?;
        Ok(PyRecord(core::surgery::surgery_s(&self.0, &graphs).map_err(err)?))
    }

    fn __eq__(&self, other: &PyRecord) -> bool {
        self.0 == other.0
    }
}

/// Decides equivalence; mode is "y1-spin", "y2-spin" or "y2". Returns a
/// dict with "decision" and either "certificate" or "reason".
#[pyfunction]
#[pyo3(signature = (a, b, mode="y2", spin_a=None, spin_b=None))]
fn decide<'py>(
    py: Python<'py>,
    a: &PyRecord,
    b: &PyRecord,
    mode: &str,
    spin_a: Option<&str>,
    spin_b: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let sigma =
        |r: &InvariantRecord, s: Option<&str>| s.map_or(Ok(0), |bits| r.spin.parse_bitstring(bits)).map_err(err);
    let (sa, sb) = (sigma(&a.0, spin_a)?, sigma(&b.0, spin_b)?);
    let mode = match mode {
        "y1-spin" => Mode::Y1Spin { sigma: sa, sigma_prime: sb },
        "y2-spin" => Mode::Y2Spin { sigma: sa, sigma_prime: sb },
        "y2" => Mode::Y2,
        m => return Err(PyValueError::new_err(format!("unknown mode {m:?}"))),
    };
    let v = match decide_y2(&a.0, &b.0, mode, &[]) {
        Ok(Decision::Equivalent(c)) => {
            serde_json::json!({"decision": "equivalent", "certificate": certificate_to_json(&a.0.spin, &c)})
        }
        Ok(Decision::NotEquivalent(r)) => serde_json::json!({"decision": "not-equivalent", "reason": r}),
        Ok(Decision::Unknown(r)) => serde_json::json!({"decision": "unknown", "reason": r}),
        Err(core::Error::InfiniteSearchSpace) => {
            serde_json::json!({"decision": "unknown", "reason": core::Error::InfiniteSearchSpace.to_string()})
        }
        Err(e) => return Err(err(e)),
    };
    to_py(py, &v)
}

/// Runs a lemma oracle ("trivectors", "cubic", "tri" or "square") and
/// returns `(passed, cases, failures)`.
#[pyfunction]
#[pyo3(signature = (lemma, bound, seed=0))]
fn verify(py: Python<'_>, lemma: &str, bound: u64, seed: u64) -> PyResult<(bool, u64, Vec<String>)> {
    let report = py
        .detach(|| match lemma {
            "trivectors" => Some(core::verify::verify_trivectors(bound)),
            "cubic" => Some(core::verify::verify_cubic(bound as usize)),
            "tri" => Some(core::verify::verify_tri(bound as usize)),
            "square" => Some(core::verify::verify_square(bound, seed)),
            _ => None,
        })
        .ok_or_else(|| PyValueError::new_err(format!("unknown lemma {lemma:?}")))?
        .map_err(err)?;
    Ok((report.passed(), report.cases, report.failures))
}

#[pymodule]
#[pyo3(name = "clasper")]
fn clasper_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyRecord>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
