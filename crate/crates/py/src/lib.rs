//! Python bindings: calculi, differential operators and the verification
//! suites, with all coefficients exchanged as exact expression strings.

use ncdiffop::aelem::parse_aelem;
use ncdiffop::calculus::ops::{module_curvature, torsion};
use ncdiffop::calculus::{CalculusSpec, ModuleConnection, Slot, TensorField};
use ncdiffop::diffop::bullet::{act, bullet};
use ncdiffop::diffop::curvature::da_relations;
use ncdiffop::diffop::DiffOp;
use ncdiffop::error::EngineError;
use ncdiffop::file::CalculusFile;
use ncdiffop::library;
use ncdiffop::scalar::{parse_scalar, VarSet};
use ncdiffop::verify::{self, Suite};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn err(e: EngineError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A differential calculus given by structure-constant data.
#[pyclass]
#[derive(Clone)]
struct Calculus {
    spec: CalculusSpec,
}

#[pymethods]
impl Calculus {
    /// classical-plane | complex-plane | su2q | podles
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Calculus> {
        let spec = match name {
            "classical-plane" => library::classical_plane(),
            "complex-plane" => library::classical_complex_plane(),
            "su2q" => library::su2q_3d_generic(),
            "podles" => library::podles_sphere(),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown builtin '{}'",
                    other
                )))
            }
        };
        Ok(Calculus { spec })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Calculus> {
        let spec = CalculusFile::from_json(text)
            .and_then(|f| f.to_spec())
            .map_err(err)?;
        Ok(Calculus { spec })
    }

    fn to_json(&self) -> String {
        CalculusFile::from_spec(&self.spec).to_json()
    }

    #[getter]
    fn parameters(&self) -> Vec<String> {
        self.spec.params.names().to_vec()
    }

    #[getter]
    fn omega1_basis(&self) -> Vec<String> {
        self.spec.omega1_names.clone()
    }

    #[getter]
    fn omega2_basis(&self) -> Vec<String> {
        self.spec.omega2_names.clone()
    }

    #[getter]
    fn vector_basis(&self) -> Vec<String> {
        self.spec.vec_names.clone()
    }

    /// Substitutes parameter bindings (name -> expression string).
    fn substitute(&self, bindings: BTreeMap<String, String>) -> PyResult<Calculus> {
        let mut map = BTreeMap::new();
        for (k, v) in bindings {
            map.insert(k, parse_scalar(&v, &self.spec.params).map_err(err)?);
        }
        Ok(Calculus {
            spec: self.spec.substitute(&map).map_err(err)?,
        })
    }

    /// The relation generators, rendered.
    fn relations(&self) -> PyResult<Vec<String>> {
        let rels = da_relations(&self.spec).map_err(err)?;
        Ok(rels.iter().map(|r| r.render(&self.spec)).collect())
    }

    /// The relation generators as (omega2, [(grade, indices, coeff)]).
    #[allow(clippy::type_complexity)]
    fn relations_data(&self) -> PyResult<Vec<(String, Vec<(usize, Vec<usize>, String)>)>> {
        let rels = da_relations(&self.spec).map_err(err)?;
        Ok(rels
            .iter()
            .enumerate()
            .map(|(k, rel)| {
                let mut terms = Vec::new();
                for (n, tf) in &rel.parts {
                    for (idx, a) in &tf.comps {
                        terms.push((*n, idx.clone(), a.render()));
                    }
                }
                (self.spec.omega2_names[k].clone(), terms)
            })
            .collect())
    }

    /// Torsion of a 1-form basis element, as (omega2 index, coeff) terms.
    fn torsion(&self, i: usize) -> PyResult<Vec<(usize, String)>> {
        let xi = TensorField::basis(&self.spec, vec![Slot::Form1], vec![i]);
        let t = torsion(&self.spec, &xi).map_err(err)?;
        Ok(t.comps.iter().map(|(idx, c)| (idx[0], c.render())).collect())
    }

    /// Curvature of the 1-form module on basis element a, as
    /// (omega2 index, module index, coeff) terms.
    fn curvature(&self, a: usize) -> PyResult<Vec<(usize, usize, String)>> {
        let e_mod = ModuleConnection::omega1(&self.spec).map_err(err)?;
        let mut e = vec![self.spec.zero_a(); e_mod.rank];
        e[a] = self.spec.one_a();
        let r = module_curvature(&self.spec, &e_mod, &e);
        Ok(r
            .comps
            .iter()
            .map(|(idx, c)| (idx[0], idx[1], c.render()))
            .collect())
    }

    /// Runs a named verification suite; returns (passed, [(check, ok)]).
    fn verify(&self, suite: &str) -> PyResult<(bool, Vec<(String, bool)>)> {
        let s = Suite::from_name(suite)
            .ok_or_else(|| PyValueError::new_err(format!("unknown suite '{}'", suite)))?;
        let report = verify::run_suite(&self.spec, s).map_err(err)?;
        Ok((report.passed(), report.checks))
    }

    /// Builds an operator from (indices, coeff) terms; indices refer to
    /// the dual basis, coeff is an expression string.
    fn operator(&self, terms: Vec<(Vec<usize>, String)>) -> PyResult<Operator> {
        let mut op = DiffOp::zero();
        for (idx, coeff) in terms {
            if idx.iter().any(|&i| i >= self.spec.n1()) {
                return Err(PyValueError::new_err("basis index out of range"));
            }
            let a = parse_aelem(&coeff, &self.spec.params, &self.spec.coords()).map_err(err)?;
            let mut tf = TensorField::zero(vec![Slot::Vec1; idx.len()]);
            tf.add_term(idx, a);
            op.add_part(tf);
        }
        Ok(Operator {
            spec: self.spec.clone(),
            op,
        })
    }
}

/// An element of the operator algebra over a fixed calculus.
#[pyclass]
#[derive(Clone)]
struct Operator {
    spec: CalculusSpec,
    op: DiffOp,
}

#[pymethods]
impl Operator {
    fn render(&self) -> String {
        self.op.render(&self.spec)
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.render())
    }

    /// The bullet product self . other.
    fn bullet(&self, other: &Operator) -> PyResult<Operator> {
        if self.spec != other.spec {
            return Err(PyValueError::new_err("operators over different calculi"));
        }
        Ok(Operator {
            spec: self.spec.clone(),
            op: bullet(&self.spec, &self.op, &other.op).map_err(err)?,
        })
    }

    fn add(&self, other: &Operator) -> PyResult<Operator> {
        if self.spec != other.spec {
            return Err(PyValueError::new_err("operators over different calculi"));
        }
        Ok(Operator {
            spec: self.spec.clone(),
            op: self.op.add(&other.op),
        })
    }

    /// The top-grade part.
    fn symbol(&self) -> PyResult<Operator> {
        let tf = self.op.symbol().map_err(err)?;
        Ok(Operator {
            spec: self.spec.clone(),
            op: DiffOp::from_part(tf),
        })
    }

    /// Acts on a coefficient-algebra element (E = A).
    fn act_on(&self, a: &str) -> PyResult<String> {
        let e_mod = ModuleConnection::trivial_line(&self.spec);
        let elem = parse_aelem(a, &self.spec.params, &self.spec.coords()).map_err(err)?;
        let out = act(&self.spec, &e_mod, &self.op, &[elem]).map_err(err)?;
        Ok(out[0].render())
    }

    fn is_zero(&self) -> bool {
        self.op.is_zero()
    }

    fn __eq__(&self, other: &Operator) -> bool {
        self.spec == other.spec && self.op == other.op
    }
}

/// Normalises an exact field expression over the given parameters.
#[pyfunction]
fn simplify(expr: &str, parameters: Vec<String>) -> PyResult<String> {
    let vars = VarSet::new(parameters);
    Ok(parse_scalar(expr, &vars).map_err(err)?.to_string())
}

/// Exact equality of two field expressions over the given parameters.
#[pyfunction]
fn scalar_eq(a: &str, b: &str, parameters: Vec<String>) -> PyResult<bool> {
    let vars = VarSet::new(parameters);
    let x = parse_scalar(a, &vars).map_err(err)?;
    let y = parse_scalar(b, &vars).map_err(err)?;
    Ok(x == y)
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    vec!["classical-plane", "complex-plane", "su2q", "podles"]
}

#[pymodule]
fn ncdiffop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Calculus>()?;
    m.add_class::<Operator>()?;
    m.add_function(wrap_pyfunction!(simplify, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_eq, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    Ok(())
}
