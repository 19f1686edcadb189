//! Elements of the coefficient algebra A: polynomials in the coordinate
//! variables with field coefficients. With no coordinate variables this
//! is the constants backend and an element is a single field scalar.

use crate::error::EngineError;
use crate::scalar::{parse_scalar, Monomial, Scalar, VarSet};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AElem {
    /// Coordinate variables of the backend (empty for constants).
    pub coords: VarSet,
    /// Coordinate monomial -> field coefficient; zero coefficients pruned.
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl AElem {
    pub fn zero(coords: VarSet) -> Self {
        AElem {
            coords,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_scalar(coords: VarSet, s: Scalar) -> Self {
        let mut a = AElem::zero(coords);
        if !s.is_zero() {
            a.terms.insert(Monomial::constant(a.coords.len()), s);
        }
        a
    }

    pub fn one(coords: VarSet, params: VarSet) -> Self {
        AElem::from_scalar(coords, Scalar::one(params))
    }

    pub fn coordinate(coords: VarSet, params: VarSet, idx: usize) -> Self {
        let mut a = AElem::zero(coords);
        a.terms
            .insert(Monomial::var(a.coords.len(), idx), Scalar::one(params));
        a
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant())
    }

    /// The scalar part when no coordinates occur.
    pub fn constant_scalar(&self, params: &VarSet) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero(params.clone()));
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &AElem) -> AElem {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> AElem {
        AElem {
            coords: self.coords.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &AElem) -> AElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AElem) -> AElem {
        let mut r = AElem::zero(self.coords.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> AElem {
        if s.is_zero() {
            return AElem::zero(self.coords.clone());
        }
        AElem {
            coords: self.coords.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(s)))
                .collect(),
        }
    }

    /// Partial derivative with respect to coordinate `idx`.
    pub fn derivative(&self, idx: usize, params: &VarSet) -> AElem {
        let mut r = AElem::zero(self.coords.clone());
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[idx] -= 1;
            r.add_term(m2, c.mul(&Scalar::from_int(params.clone(), e as i64)));
        }
        r
    }

    /// Substitutes parameter bindings into every coefficient.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<AElem, EngineError> {
        let mut r = AElem::zero(self.coords.clone());
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c.substitute(bindings)?);
        }
        Ok(r)
    }

    /// Total degree in the coordinate variables.
    pub fn coord_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Renders in the expression grammar; coordinates and parameters mix
    /// freely in the output.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        self.coords.names()[v].clone()
                    } else {
                        format!("{}^{}", self.coords.names()[v], e)
                    }
                })
                .collect();
            let cs = c.to_string();
            let needs_paren = cs.contains('+') || cs.contains(" - ") || cs.contains('/');
            let term = if mono.is_empty() {
                cs
            } else if c.is_one() {
                mono.join("*")
            } else if c.neg().is_one() {
                format!("-{}", mono.join("*"))
            } else if needs_paren {
                format!("({})*{}", cs, mono.join("*"))
            } else {
                format!("{}*{}", cs, mono.join("*"))
            };
            if n == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

impl fmt::Display for AElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Parses an expression that may mention both parameters and coordinate
/// variables. The denominator must be coordinate-free, since A is a
/// polynomial algebra over the coefficient field.
pub fn parse_aelem(text: &str, params: &VarSet, coords: &VarSet) -> Result<AElem, EngineError> {
    let mut names: Vec<String> = params.names().to_vec();
    names.extend(coords.names().iter().cloned());
    let combined = VarSet::new(names);
    let s = parse_scalar(text, &combined)?;
    let np = params.len();
    // Denominator must not involve coordinates.
    for m in s.den.terms.keys() {
        if m.0[np..].iter().any(|&e| e > 0) {
            return Err(EngineError::InvalidSpec(format!(
                "coefficient '{}' divides by a coordinate variable",
                text
            )));
        }
    }
    let den = Scalar {
        num: crate::scalar::MultiPoly {
            vars: params.clone(),
            terms: s
                .den
                .terms
                .iter()
                .map(|(m, c)| (Monomial(m.0[..np].to_vec()), c.clone()))
                .collect(),
        },
        den: crate::scalar::MultiPoly::one(params.clone()),
    };
    let mut out = AElem::zero(coords.clone());
    for (m, c) in &s.num.terms {
        let pm = Monomial(m.0[..np].to_vec());
        let cm = Monomial(m.0[np..].to_vec());
        let coeff = Scalar {
            num: crate::scalar::MultiPoly {
                vars: params.clone(),
                terms: [(pm, c.clone())].into_iter().collect(),
            },
            den: crate::scalar::MultiPoly::one(params.clone()),
        }
        .div(&den)?;
        out.add_term(cm, coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_mixed() {
        let params = VarSet::new(vec!["q"]);
        let coords = VarSet::new(vec!["x", "y"]);
        let a = parse_aelem("q*x^2*y - y/2", &params, &coords).unwrap();
        assert_eq!(a.coord_degree(), 3);
        let rendered = a.render();
        let b = parse_aelem(&rendered, &params, &coords).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coordinate_denominator_rejected() {
        let params = VarSet::new(vec!["q"]);
        let coords = VarSet::new(vec!["x"]);
        assert!(parse_aelem("1/x", &params, &coords).is_err());
        assert!(parse_aelem("q^-2*x", &params, &coords).is_ok());
    }

    #[test]
    fn derivative_is_leibniz() {
        let params = VarSet::new(vec![] as Vec<String>);
        let coords = VarSet::new(vec!["x", "y"]);
        let a = parse_aelem("x^2*y", &params, &coords).unwrap();
        let b = parse_aelem("x + y^3", &params, &coords).unwrap();
        let left = a.mul(&b).derivative(0, &params);
        let right = a
            .derivative(0, &params)
            .mul(&b)
            .add(&a.mul(&b.derivative(0, &params)));
        assert_eq!(left, right);
    }
}
