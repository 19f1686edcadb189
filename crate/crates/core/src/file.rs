//! The on-disk calculus format: a JSON document whose coefficients are
//! exact expression strings in the declared parameters (and, for the
//! polynomial backend, the coordinate variables).

use crate::aelem::{parse_aelem, AElem};
use crate::calculus::{CalculusSpec, CoeffAlgebra};
use crate::error::EngineError;
use crate::scalar::{parse_scalar, Scalar, VarSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CalculusFile {
    pub field: FieldSection,
    pub algebra: AlgebraSection,
    pub omega1: Omega1Section,
    pub omega2: Omega2Section,
    pub wedge: Vec<TripleEntry>,
    pub d1: Vec<PairEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldSection {
    pub parameters: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraSection {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vars: Vec<String>,
    /// d(vars[v]) = sum_k coeff * omega1.basis[k]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<DerivationEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Omega1Section {
    pub basis: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Omega2Section {
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DerivationEntry {
    pub v: usize,
    pub k: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TripleEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairEntry {
    pub i: usize,
    pub k: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConnectionSection {
    /// square(xi_k) = sum gamma[k][i][j] xi_i (x) xi_j.
    pub gamma: Vec<TripleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma_inv: Vec<QuadEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuadEntry {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexSection {
    /// J(omega1.basis[j]) = sum coeff * omega1.basis[i].
    #[serde(rename = "J")]
    pub j: Vec<PairIJEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairIJEntry {
    pub i: usize,
    pub j: usize,
    pub coeff: String,
}

impl CalculusFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calculus file serialises")
    }

    pub fn from_json(text: &str) -> Result<CalculusFile, EngineError> {
        serde_json::from_str(text).map_err(|e| EngineError::InvalidSpec(format!("bad calculus file: {}", e)))
    }

    /// Validates and assembles the calculus.
    pub fn to_spec(&self) -> Result<CalculusSpec, EngineError> {
        let params = VarSet::new(self.field.parameters.clone());
        let n1 = self.omega1.basis.len();
        let n2 = self.omega2.basis.len();
        let bad = |m: String| EngineError::InvalidSpec(m);
        let algebra = match self.algebra.kind.as_str() {
            "constants" => {
                if !self.algebra.vars.is_empty() {
                    return Err(bad("constants backend takes no coordinate variables".into()));
                }
                CoeffAlgebra::Constants
            }
            "polynomial" => {
                let coords = VarSet::new(self.algebra.vars.clone());
                let mut derivation = vec![vec![AElem::zero(coords.clone()); n1]; coords.len()];
                for e in &self.algebra.d {
                    if e.v >= coords.len() || e.k >= n1 {
                        return Err(bad(format!("derivation entry ({}, {}) out of range", e.v, e.k)));
                    }
                    derivation[e.v][e.k] = parse_aelem(&e.coeff, &params, &coords)?;
                }
                CoeffAlgebra::Polynomial { coords, derivation }
            }
            other => return Err(bad(format!("unknown algebra type '{}'", other))),
        };
        let coords = algebra.coords();
        let mut wedge = vec![vec![vec![Scalar::zero(params.clone()); n2]; n1]; n1];
        for e in &self.wedge {
            if e.i >= n1 || e.j >= n1 || e.k >= n2 {
                return Err(bad(format!("wedge entry ({},{},{}) out of range", e.i, e.j, e.k)));
            }
            wedge[e.i][e.j][e.k] = parse_scalar(&e.coeff, &params)?;
        }
        let mut d1 = vec![vec![Scalar::zero(params.clone()); n2]; n1];
        for e in &self.d1 {
            if e.i >= n1 || e.k >= n2 {
                return Err(bad(format!("d1 entry ({},{}) out of range", e.i, e.k)));
            }
            d1[e.i][e.k] = parse_scalar(&e.coeff, &params)?;
        }
        let (christoffel, sigma_inv) = match &self.connection {
            None => (None, None),
            Some(conn) => {
                let mut gamma = vec![vec![vec![AElem::zero(coords.clone()); n1]; n1]; n1];
                for e in &conn.gamma {
                    if e.k >= n1 || e.i >= n1 || e.j >= n1 {
                        return Err(bad(format!(
                            "gamma entry ({},{},{}) out of range",
                            e.k, e.i, e.j
                        )));
                    }
                    gamma[e.k][e.i][e.j] = parse_aelem(&e.coeff, &params, &coords)?;
                }
                let sigma = if conn.sigma_inv.is_empty() {
                    None
                } else {
                    let mut s =
                        vec![vec![vec![vec![AElem::zero(coords.clone()); n1]; n1]; n1]; n1];
                    for e in &conn.sigma_inv {
                        if e.i >= n1 || e.j >= n1 || e.a >= n1 || e.b >= n1 {
                            return Err(bad(format!(
                                "sigma_inv entry ({},{},{},{}) out of range",
                                e.i, e.j, e.a, e.b
                            )));
                        }
                        s[e.i][e.j][e.a][e.b] = parse_aelem(&e.coeff, &params, &coords)?;
                    }
                    Some(s)
                };
                (Some(gamma), sigma)
            }
        };
        let j_matrix = match &self.complex {
            None => None,
            Some(c) => {
                let mut jm = vec![vec![Scalar::zero(params.clone()); n1]; n1];
                for e in &c.j {
                    if e.i >= n1 || e.j >= n1 {
                        return Err(bad(format!("J entry ({},{}) out of range", e.i, e.j)));
                    }
                    jm[e.i][e.j] = parse_scalar(&e.coeff, &params)?;
                }
                Some(jm)
            }
        };
        let dual = self
            .omega1
            .dual
            .clone()
            .unwrap_or_else(|| (0..n1).map(|i| format!("u{}", i)).collect());
        if dual.len() != n1 {
            return Err(bad("dual basis naming must match the 1-form basis".into()));
        }
        let spec = CalculusSpec {
            params,
            omega1_names: self.omega1.basis.clone(),
            omega2_names: self.omega2.basis.clone(),
            vec_names: dual,
            algebra,
            wedge,
            d1,
            christoffel,
            sigma_inv,
            j_matrix,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Serialises a calculus back into the document form; only nonzero
    /// entries are emitted, in index order, with canonical expression
    /// rendering.
    pub fn from_spec(spec: &CalculusSpec) -> CalculusFile {
        let n1 = spec.n1();
        let n2 = spec.n2();
        let (kind, vars, d) = match &spec.algebra {
            CoeffAlgebra::Constants => ("constants".to_string(), Vec::new(), Vec::new()),
            CoeffAlgebra::Polynomial { coords, derivation } => {
                let mut entries = Vec::new();
                for (v, row) in derivation.iter().enumerate() {
                    for (k, a) in row.iter().enumerate() {
                        if !a.is_zero() {
                            entries.push(DerivationEntry {
                                v,
                                k,
                                coeff: a.render(),
                            });
                        }
                    }
                }
                (
                    "polynomial".to_string(),
                    coords.names().to_vec(),
                    entries,
                )
            }
        };
        let mut wedge = Vec::new();
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n2 {
                    if !spec.wedge[i][j][k].is_zero() {
                        wedge.push(TripleEntry {
                            i,
                            j,
                            k,
                            coeff: spec.wedge[i][j][k].to_string(),
                        });
                    }
                }
            }
        }
        let mut d1 = Vec::new();
        for i in 0..n1 {
            for k in 0..n2 {
                if !spec.d1[i][k].is_zero() {
                    d1.push(PairEntry {
                        i,
                        k,
                        coeff: spec.d1[i][k].to_string(),
                    });
                }
            }
        }
        let connection = spec.christoffel.as_ref().map(|g| {
            let mut gamma = Vec::new();
            for k in 0..n1 {
                for i in 0..n1 {
                    for j in 0..n1 {
                        if !g[k][i][j].is_zero() {
                            gamma.push(TripleEntry {
                                k,
                                i,
                                j,
                                coeff: g[k][i][j].render(),
                            });
                        }
                    }
                }
            }
            let mut sigma_inv = Vec::new();
            if let Some(s) = &spec.sigma_inv {
                for i in 0..n1 {
                    for j in 0..n1 {
                        for a in 0..n1 {
                            for b in 0..n1 {
                                if !s[i][j][a][b].is_zero() {
                                    sigma_inv.push(QuadEntry {
                                        i,
                                        j,
                                        a,
                                        b,
                                        coeff: s[i][j][a][b].render(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
            ConnectionSection { gamma, sigma_inv }
        });
        let complex = spec.j_matrix.as_ref().map(|jm| {
            let mut j = Vec::new();
            for a in 0..n1 {
                for b in 0..n1 {
                    if !jm[a][b].is_zero() {
                        j.push(PairIJEntry {
                            i: a,
                            j: b,
                            coeff: jm[a][b].to_string(),
                        });
                    }
                }
            }
            ComplexSection { j }
        });
        CalculusFile {
            field: FieldSection {
                parameters: spec.params.names().to_vec(),
            },
            algebra: AlgebraSection { kind, vars, d },
            omega1: Omega1Section {
                basis: spec.omega1_names.clone(),
                dual: Some(spec.vec_names.clone()),
            },
            omega2: Omega2Section {
                basis: spec.omega2_names.clone(),
            },
            wedge,
            d1,
            connection,
            complex,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::*;

    #[test]
    fn round_trip_all_builtins() {
        for spec in [
            classical_plane(),
            classical_complex_plane(),
            su2q_3d_generic(),
            podles_sphere(),
        ] {
            let file = CalculusFile::from_spec(&spec);
            let json = file.to_json();
            let reloaded = CalculusFile::from_json(&json).unwrap();
            assert_eq!(reloaded, file);
            let spec2 = reloaded.to_spec().unwrap();
            assert_eq!(spec2, spec);
            // serialisation is idempotent
            assert_eq!(CalculusFile::from_spec(&spec2).to_json(), json);
        }
    }

    #[test]
    fn bad_files_are_rejected() {
        let spec = su2q_3d_generic();
        let mut file = CalculusFile::from_spec(&spec);
        file.wedge[0].k = 7;
        assert!(file.to_spec().is_err());
        let mut file = CalculusFile::from_spec(&spec);
        file.d1[0].coeff = "q +".to_string();
        assert!(matches!(file.to_spec(), Err(EngineError::Parse { .. })));
        let mut file = CalculusFile::from_spec(&spec);
        file.algebra.kind = "weird".to_string();
        assert!(file.to_spec().is_err());
    }
}
