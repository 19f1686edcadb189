//! The tensor algebra of vector fields with its bullet product, the
//! curvature element, relation generation, the crossing map and the
//! endomorphism calculus.

pub mod bullet;
pub mod curvature;
pub mod endo;
pub mod theta;


use crate::aelem::AElem;
use crate::calculus::{CalculusSpec, Slot, TensorField};
use crate::error::EngineError;
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// An element of the tensor algebra of vector fields: finitely many
/// homogeneous parts, the grade-n part living in Vec^(x)n.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    pub parts: BTreeMap<usize, TensorField>,
}

impl DiffOp {
    pub fn zero() -> DiffOp {
        DiffOp {
            parts: BTreeMap::new(),
        }
    }

    pub fn one(spec: &CalculusSpec) -> DiffOp {
        DiffOp::from_aelem(spec.one_a())
    }

    pub fn from_aelem(a: AElem) -> DiffOp {
        DiffOp::from_part(TensorField::scalar(a))
    }

    pub fn from_part(tf: TensorField) -> DiffOp {
        debug_assert!(tf.slots.iter().all(|s| *s == Slot::Vec1));
        let mut parts = BTreeMap::new();
        if !tf.is_zero() {
            parts.insert(tf.grade(), tf);
        }
        DiffOp { parts }
    }

    /// The dual basis vector field u_idx.
    pub fn basis_vec(spec: &CalculusSpec, idx: usize) -> DiffOp {
        DiffOp::from_part(TensorField::basis(spec, vec![Slot::Vec1], vec![idx]))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, n: usize) -> Option<&TensorField> {
        self.parts.get(&n)
    }

    pub fn add_part(&mut self, tf: TensorField) {
        if tf.is_zero() {
            return;
        }
        let n = tf.grade();
        use std::collections::btree_map::Entry;
        match self.parts.entry(n) {
            Entry::Vacant(e) => {
                e.insert(tf);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&tf);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut r = self.clone();
        for tf in other.parts.values() {
            r.add_part(tf.clone());
        }
        r
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            parts: self.parts.iter().map(|(n, t)| (*n, t.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &AElem) -> DiffOp {
        let mut r = DiffOp::zero();
        for tf in self.parts.values() {
            r.add_part(tf.scale(a));
        }
        r
    }

    pub fn top_grade(&self) -> Option<usize> {
        self.parts.keys().next_back().copied()
    }

    /// The symbol: the highest-grade nonzero part.
    pub fn symbol(&self) -> Result<TensorField, EngineError> {
        match self.parts.iter().next_back() {
            Some((_, tf)) => Ok(tf.clone()),
            None => Err(EngineError::ZeroOperator),
        }
    }

    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<DiffOp, EngineError> {
        let mut r = DiffOp::zero();
        for tf in self.parts.values() {
            r.add_part(tf.substitute(bindings)?);
        }
        Ok(r)
    }

    /// Human-readable rendering using the calculus' dual basis names.
    pub fn render(&self, spec: &CalculusSpec) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<String> = Vec::new();
        for tf in self.parts.values() {
            for (idx, a) in &tf.comps {
                let basis = idx
                    .iter()
                    .map(|&i| spec.vec_names[i].clone())
                    .collect::<Vec<_>>()
                    .join("(x)");
                let coeff = a.render();
                let term = if idx.is_empty() {
                    coeff
                } else if coeff == "1" {
                    basis
                } else if coeff == "-1" {
                    format!("-{}", basis)
                } else if coeff.contains(" + ") || coeff.contains(" - ") || coeff.contains('/') {
                    format!("({})*{}", coeff, basis)
                } else {
                    format!("{}*{}", coeff, basis)
                };
                terms.push(term);
            }
        }
        let mut out = String::new();
        for (n, t) in terms.iter().enumerate() {
            if n == 0 {
                out.push_str(t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

/// An element of P (x) TVec for a fixed prefix sector P (one form slot,
/// one 2-form slot, or a module slot): finitely many parts, the part of
/// tensor grade n having slots `prefix ++ [Vec1; n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorOp {
    pub prefix: Vec<Slot>,
    pub parts: BTreeMap<usize, TensorField>,
}

impl SectorOp {
    pub fn zero(prefix: Vec<Slot>) -> SectorOp {
        SectorOp {
            prefix,
            parts: BTreeMap::new(),
        }
    }

    pub fn add_part(&mut self, tf: TensorField) {
        if tf.is_zero() {
            return;
        }
        let n = tf.grade() - self.prefix.len();
        debug_assert_eq!(&tf.slots[..self.prefix.len()], &self.prefix[..]);
        use std::collections::btree_map::Entry;
        match self.parts.entry(n) {
            Entry::Vacant(e) => {
                e.insert(tf);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&tf);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SectorOp) -> SectorOp {
        debug_assert_eq!(self.prefix, other.prefix);
        let mut r = self.clone();
        for tf in other.parts.values() {
            r.add_part(tf.clone());
        }
        r
    }

    pub fn neg(&self) -> SectorOp {
        SectorOp {
            prefix: self.prefix.clone(),
            parts: self.parts.iter().map(|(n, t)| (*n, t.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &SectorOp) -> SectorOp {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &AElem) -> SectorOp {
        let mut r = SectorOp::zero(self.prefix.clone());
        for tf in self.parts.values() {
            r.add_part(tf.scale(a));
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Splits off the prefix index: for each component, the leading
    /// prefix indices select a DiffOp accumulated per prefix index.
    pub fn by_prefix_index(&self) -> BTreeMap<Vec<usize>, DiffOp> {
        let p = self.prefix.len();
        let mut out: BTreeMap<Vec<usize>, DiffOp> = BTreeMap::new();
        for tf in self.parts.values() {
            for (idx, a) in &tf.comps {
                let key = idx[..p].to_vec();
                let mut part = TensorField::zero(vec![Slot::Vec1; idx.len() - p]);
                part.add_term(idx[p..].to_vec(), a.clone());
                out.entry(key).or_insert_with(DiffOp::zero).add_part(part);
            }
        }
        out
    }
}
