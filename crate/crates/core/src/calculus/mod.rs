//! A differential calculus presented by finite structure-constant data,
//! and the graded tensor fields it acts on.

pub mod ops;

#[cfg(test)]
mod tests;

use crate::aelem::AElem;
use crate::error::EngineError;
use crate::linalg::Matrix;
use crate::scalar::{Scalar, VarSet};
use std::collections::BTreeMap;

/// One tensor factor of a graded sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    /// The 1-form basis, dimension n1.
    Form1,
    /// The 2-form basis, dimension n2.
    Form2,
    /// The dual (vector field) basis, dimension n1.
    Vec1,
    /// A free module basis of the given rank.
    Module(usize),
}

/// The coefficient algebra A.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffAlgebra {
    /// A is the coefficient field itself; d = 0.
    Constants,
    /// A = field[coords], with d(x_v) = sum_k derivation[v][k] xi_k.
    Polynomial {
        coords: VarSet,
        derivation: Vec<Vec<AElem>>,
    },
}

impl CoeffAlgebra {
    pub fn coords(&self) -> VarSet {
        match self {
            CoeffAlgebra::Constants => VarSet::new(Vec::<String>::new()),
            CoeffAlgebra::Polynomial { coords, .. } => coords.clone(),
        }
    }
}

/// A differential calculus: free Omega^1 and Omega^2 bases, wedge and
/// d structure constants, optional covariant derivative data.
#[derive(Clone, Debug, PartialEq)]
pub struct CalculusSpec {
    pub params: VarSet,
    pub omega1_names: Vec<String>,
    pub omega2_names: Vec<String>,
    /// Display names for the dual basis of Vec A.
    pub vec_names: Vec<String>,
    pub algebra: CoeffAlgebra,
    /// W[i][j][k]: xi_i ^ xi_j = sum_k W[i][j][k] omega_k.
    pub wedge: Vec<Vec<Vec<Scalar>>>,
    /// N[i][k]: d xi_i = sum_k N[i][k] omega_k.
    pub d1: Vec<Vec<Scalar>>,
    /// Gamma[k][i][j]: square(xi_k) = sum Gamma[k][i][j] xi_i (x) xi_j.
    pub christoffel: Option<Vec<Vec<Vec<AElem>>>>,
    /// S[i][j][a][b]: sigma^{-1}(xi_i (x) xi_j) = sum S[i][j][a][b] xi_a (x) xi_b.
    pub sigma_inv: Option<Vec<Vec<Vec<Vec<AElem>>>>>,
    /// J[i][j]: J(xi_j) = sum_i J[i][j] xi_i.
    pub j_matrix: Option<Vec<Vec<Scalar>>>,
}

impl CalculusSpec {
    pub fn n1(&self) -> usize {
        self.omega1_names.len()
    }

    pub fn n2(&self) -> usize {
        self.omega2_names.len()
    }

    pub fn coords(&self) -> VarSet {
        self.algebra.coords()
    }

    pub fn slot_dim(&self, s: Slot) -> usize {
        match s {
            Slot::Form1 | Slot::Vec1 => self.n1(),
            Slot::Form2 => self.n2(),
            Slot::Module(r) => r,
        }
    }

    pub fn zero_a(&self) -> AElem {
        AElem::zero(self.coords())
    }

    pub fn one_a(&self) -> AElem {
        AElem::one(self.coords(), self.params.clone())
    }

    pub fn scalar_a(&self, s: Scalar) -> AElem {
        AElem::from_scalar(self.coords(), s)
    }

    pub fn christoffel_ref(&self) -> Result<&Vec<Vec<Vec<AElem>>>, EngineError> {
        self.christoffel
            .as_ref()
            .ok_or(EngineError::CapabilityMissing("christoffel data"))
    }

    pub fn sigma_inv_ref(&self) -> Result<&Vec<Vec<Vec<Vec<AElem>>>>, EngineError> {
        self.sigma_inv.as_ref().ok_or(EngineError::SigmaRequired)
    }

    /// The wedge structure constants as an (n1*n1) x n2 matrix, rows
    /// indexed by pairs (i, j) in lexicographic order.
    pub fn wedge_matrix(&self) -> Matrix {
        let n1 = self.n1();
        let n2 = self.n2();
        let mut rows = Vec::with_capacity(n1 * n1);
        for i in 0..n1 {
            for j in 0..n1 {
                let mut row = Vec::with_capacity(n2);
                for k in 0..n2 {
                    row.push(self.wedge[i][j][k].clone());
                }
                rows.push(row);
            }
        }
        Matrix::from_rows(rows)
    }

    /// A basis of ker(wedge) in Omega^1 (x) Omega^1, as coefficient
    /// vectors over pairs (i, j) in lexicographic order.
    pub fn wedge_kernel(&self) -> Vec<Vec<Scalar>> {
        // Kernel of the transpose pairing: x with sum_ij x[(i,j)] W[i][j][k] = 0.
        let n1 = self.n1();
        let n2 = self.n2();
        let mut rows = Vec::with_capacity(n2);
        for k in 0..n2 {
            let mut row = Vec::with_capacity(n1 * n1);
            for i in 0..n1 {
                for j in 0..n1 {
                    row.push(self.wedge[i][j][k].clone());
                }
            }
            rows.push(row);
        }
        Matrix::from_rows(rows).kernel()
    }

    /// Structural validation run by every constructor and file loader.
    pub fn validate(&self) -> Result<(), EngineError> {
        let n1 = self.n1();
        let n2 = self.n2();
        let fail = |m: String| Err(EngineError::InvalidSpec(m));
        if self.vec_names.len() != n1 {
            return fail("dual basis naming must match the 1-form basis".into());
        }
        if self.wedge.len() != n1
            || self.wedge.iter().any(|r| r.len() != n1 || r.iter().any(|c| c.len() != n2))
        {
            return fail("wedge table must be n1 x n1 x n2".into());
        }
        if self.d1.len() != n1 || self.d1.iter().any(|r| r.len() != n2) {
            return fail("d1 table must be n1 x n2".into());
        }
        if let Some(g) = &self.christoffel {
            if g.len() != n1
                || g.iter().any(|r| r.len() != n1 || r.iter().any(|c| c.len() != n1))
            {
                return fail("christoffel table must be n1 x n1 x n1".into());
            }
        }
        if let Some(s) = &self.sigma_inv {
            let ok = s.len() == n1
                && s.iter().all(|a| {
                    a.len() == n1
                        && a.iter()
                            .all(|b| b.len() == n1 && b.iter().all(|c| c.len() == n1))
                });
            if !ok {
                return fail("sigma_inv table must be n1^4".into());
            }
            self.check_sigma_d_compat()?;
        }
        if let CoeffAlgebra::Polynomial { coords, derivation } = &self.algebra {
            if derivation.len() != coords.len() || derivation.iter().any(|r| r.len() != n1) {
                return fail("derivation table must be (#coords) x n1".into());
            }
        }
        if let Some(j) = &self.j_matrix {
            if j.len() != n1 || j.iter().any(|r| r.len() != n1) {
                return fail("J must be an n1 x n1 matrix".into());
            }
            self.check_j()?;
        }
        Ok(())
    }

    /// Both Leibniz rules must agree on a commutative backend:
    /// sigma^{-1}(da (x) xi) = xi (x) da for every coordinate and basis 1-form.
    fn check_sigma_d_compat(&self) -> Result<(), EngineError> {
        let CoeffAlgebra::Polynomial { coords, .. } = &self.algebra else {
            return Ok(());
        };
        let s = self.sigma_inv.as_ref().unwrap();
        let n1 = self.n1();
        for v in 0..coords.len() {
            let da = ops::d_on_a(self, &AElem::coordinate(coords.clone(), self.params.clone(), v));
            for j in 0..n1 {
                // lhs = sigma^{-1}(da (x) xi_j), rhs = xi_j (x) da
                let mut lhs = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
                for (idx, c) in &da.comps {
                    let k = idx[0];
                    for a in 0..n1 {
                        for b in 0..n1 {
                            lhs.add_term(vec![a, b], s[k][j][a][b].mul(c));
                        }
                    }
                }
                let mut rhs = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
                for (idx, c) in &da.comps {
                    rhs.add_term(vec![j, idx[0]], c.clone());
                }
                if lhs != rhs {
                    return Err(EngineError::InvalidSpec(format!(
                        "sigma_inv is incompatible with d on coordinate '{}'",
                        coords.names()[v]
                    )));
                }
            }
        }
        Ok(())
    }

    /// J^2 = -id, and J (x) id + id (x) J must descend through the wedge.
    fn check_j(&self) -> Result<(), EngineError> {
        let j = self.j_matrix.as_ref().unwrap();
        let n1 = self.n1();
        let p = &self.params;
        let jm = Matrix::from_rows(j.clone());
        let j2 = jm.mul(&jm);
        let minus_id = Matrix::identity(p, n1).neg();
        if j2 != minus_id {
            return Err(EngineError::InvalidSpec("J^2 is not -identity".into()));
        }
        // For each kernel vector x of the wedge, wedge((J(x)id+id(x)J)x) = 0.
        for kv in self.wedge_kernel() {
            let mut image = vec![Scalar::zero(p.clone()); self.n2()];
            for i in 0..n1 {
                for jj in 0..n1 {
                    let x = &kv[i * n1 + jj];
                    if x.is_zero() {
                        continue;
                    }
                    // (J(x)id)(xi_i (x) xi_j) = sum_a J[a][i] xi_a (x) xi_j, etc.
                    for a in 0..n1 {
                        for k in 0..self.n2() {
                            let t1 = j[a][i].mul(x).mul(&self.wedge[a][jj][k]);
                            let t2 = j[a][jj].mul(x).mul(&self.wedge[i][a][k]);
                            image[k] = image[k].add(&t1).add(&t2);
                        }
                    }
                }
            }
            if image.iter().any(|v| !v.is_zero()) {
                return Err(EngineError::InvalidSpec(
                    "J does not descend to the 2-forms".into(),
                ));
            }
        }
        Ok(())
    }

    /// Substitutes parameter bindings into every structure table.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<CalculusSpec, EngineError> {
        let sub_s = |s: &Scalar| s.substitute(bindings);
        let sub_a = |a: &AElem| a.substitute(bindings);
        let wedge = self
            .wedge
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.iter().map(sub_s).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let d1 = self
            .d1
            .iter()
            .map(|r| r.iter().map(sub_s).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let christoffel = match &self.christoffel {
            None => None,
            Some(g) => Some(
                g.iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| c.iter().map(sub_a).collect::<Result<Vec<_>, _>>())
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let sigma_inv = match &self.sigma_inv {
            None => None,
            Some(s) => Some(
                s.iter()
                    .map(|a| {
                        a.iter()
                            .map(|b| {
                                b.iter()
                                    .map(|c| c.iter().map(sub_a).collect::<Result<Vec<_>, _>>())
                                    .collect::<Result<Vec<_>, _>>()
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let j_matrix = match &self.j_matrix {
            None => None,
            Some(j) => Some(
                j.iter()
                    .map(|r| r.iter().map(sub_s).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let algebra = match &self.algebra {
            CoeffAlgebra::Constants => CoeffAlgebra::Constants,
            CoeffAlgebra::Polynomial { coords, derivation } => CoeffAlgebra::Polynomial {
                coords: coords.clone(),
                derivation: derivation
                    .iter()
                    .map(|r| r.iter().map(sub_a).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?,
            },
        };
        let spec = CalculusSpec {
            params: self.params.clone(),
            omega1_names: self.omega1_names.clone(),
            omega2_names: self.omega2_names.clone(),
            vec_names: self.vec_names.clone(),
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
}

/// A finitely supported multi-index -> A-element map over a fixed list
/// of tensor slots. Zero components are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    pub slots: Vec<Slot>,
    pub comps: BTreeMap<Vec<usize>, AElem>,
}

impl TensorField {
    pub fn zero(slots: Vec<Slot>) -> TensorField {
        TensorField {
            slots,
            comps: BTreeMap::new(),
        }
    }

    /// Rank-0 field holding a single A-element.
    pub fn scalar(a: AElem) -> TensorField {
        let mut t = TensorField::zero(vec![]);
        t.add_term(vec![], a);
        t
    }

    /// A bare basis tensor with coefficient 1.
    pub fn basis(spec: &CalculusSpec, slots: Vec<Slot>, idx: Vec<usize>) -> TensorField {
        let mut t = TensorField::zero(slots);
        t.add_term(idx, spec.one_a());
        t
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn grade(&self) -> usize {
        self.slots.len()
    }

    pub fn add_term(&mut self, idx: Vec<usize>, a: AElem) {
        debug_assert_eq!(idx.len(), self.slots.len());
        if a.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.comps.entry(idx) {
            Entry::Vacant(e) => {
                e.insert(a);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&a);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &TensorField) -> TensorField {
        debug_assert_eq!(self.slots, other.slots);
        let mut r = self.clone();
        for (i, a) in &other.comps {
            r.add_term(i.clone(), a.clone());
        }
        r
    }

    pub fn neg(&self) -> TensorField {
        TensorField {
            slots: self.slots.clone(),
            comps: self.comps.iter().map(|(i, a)| (i.clone(), a.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &TensorField) -> TensorField {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &AElem) -> TensorField {
        let mut r = TensorField::zero(self.slots.clone());
        for (i, c) in &self.comps {
            r.add_term(i.clone(), c.mul(a));
        }
        r
    }

    pub fn tensor(&self, other: &TensorField) -> TensorField {
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().copied());
        let mut r = TensorField::zero(slots);
        for (i1, a1) in &self.comps {
            for (i2, a2) in &other.comps {
                let mut idx = i1.clone();
                idx.extend_from_slice(i2);
                r.add_term(idx, a1.mul(a2));
            }
        }
        r
    }

    /// Substitutes parameter bindings into all components.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<TensorField, EngineError> {
        let mut r = TensorField::zero(self.slots.clone());
        for (i, a) in &self.comps {
            r.add_term(i.clone(), a.substitute(bindings)?);
        }
        Ok(r)
    }
}

/// A free left module with a left covariant derivative given by a
/// matrix of 1-forms, plus optional braiding data.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleConnection {
    pub rank: usize,
    pub basis_names: Vec<String>,
    /// nabla e_a = sum_{i,b} gamma[a][i][b] xi_i (x) e_b.
    pub gamma: Vec<Vec<Vec<AElem>>>,
    pub sigma_e: Option<SigmaE>,
}

/// Braiding sigma_E : E (x) Omega^1 -> Omega^1 (x) E together with its
/// extension to Omega^2.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaE {
    /// sigma_E(e_a (x) xi_i) = sum s1[a][i][j][b] xi_j (x) e_b.
    pub s1: Vec<Vec<Vec<Vec<AElem>>>>,
    /// sigma_E(e_a (x) omega_k) = sum s2[a][k][l][b] omega_l (x) e_b.
    pub s2: Vec<Vec<Vec<Vec<AElem>>>>,
}

impl ModuleConnection {
    /// The trivial line module (E = A, nabla = d).
    pub fn trivial_line(spec: &CalculusSpec) -> ModuleConnection {
        let n1 = spec.n1();
        ModuleConnection {
            rank: 1,
            basis_names: vec!["1".to_string()],
            gamma: vec![vec![vec![spec.zero_a(); 1]; n1]],
            sigma_e: Some(SigmaE::flip(spec, 1)),
        }
    }

    /// E = Omega^1 with nabla given by the christoffel data.
    pub fn omega1(spec: &CalculusSpec) -> Result<ModuleConnection, EngineError> {
        let g = spec.christoffel_ref()?;
        Ok(ModuleConnection {
            rank: spec.n1(),
            basis_names: spec.omega1_names.clone(),
            gamma: g.clone(),
            sigma_e: None,
        })
    }

    pub fn with_sigma(mut self, s: SigmaE) -> ModuleConnection {
        self.sigma_e = Some(s);
        self
    }

    pub fn sigma_e_ref(&self) -> Result<&SigmaE, EngineError> {
        self.sigma_e.as_ref().ok_or(EngineError::SigmaERequired)
    }

    /// A rank-1 module with nabla(e) = xi (x) e for a chosen 1-form
    /// coefficient row; used to build curving connections in tests.
    pub fn line_with(spec: &CalculusSpec, row: Vec<AElem>) -> ModuleConnection {
        assert_eq!(row.len(), spec.n1());
        ModuleConnection {
            rank: 1,
            basis_names: vec!["e".to_string()],
            gamma: vec![row.into_iter().map(|c| vec![c]).collect()],
            sigma_e: Some(SigmaE::flip(spec, 1)),
        }
    }
}

impl SigmaE {
    /// The flip braiding on a rank-r module; satisfies the wedge
    /// extension law on any calculus whose coefficients commute.
    pub fn flip(spec: &CalculusSpec, rank: usize) -> SigmaE {
        let n1 = spec.n1();
        let n2 = spec.n2();
        let z = spec.zero_a();
        let o = spec.one_a();
        let mut s1 = vec![vec![vec![vec![z.clone(); rank]; n1]; n1]; rank];
        for a in 0..rank {
            for i in 0..n1 {
                s1[a][i][i][a] = o.clone();
            }
        }
        let mut s2 = vec![vec![vec![vec![z; rank]; n2]; n2]; rank];
        for a in 0..rank {
            for k in 0..n2 {
                s2[a][k][k][a] = o.clone();
            }
        }
        SigmaE { s1, s2 }
    }
}
