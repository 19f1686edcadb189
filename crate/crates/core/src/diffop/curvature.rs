//! The curvature element of the canonical covariant derivative, the
//! relation generator it induces, wedge splittings and the bracket
//! substitute phi on antisymmetric 2-tensors.

use super::bullet::bullet;
use super::{DiffOp, SectorOp};
use crate::calculus::ops::{directional, ev_n, torsion};
use crate::calculus::{CalculusSpec, Slot, TensorField};
use crate::error::EngineError;
use crate::linalg::Matrix;

/// The curvature element in Omega^2 (x) TVec, tensor grade at most 2.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureElement {
    pub value: SectorOp,
}

/// R = d xi_i (x) u_i - xi_i ^ xi_j (x) u_j . u_i, cross-checked against
/// the torsion form Tor(xi_i) (x) u_i - xi_i ^ xi_j (x) (u_j (x) u_i).
pub fn curvature_element(spec: &CalculusSpec) -> Result<CurvatureElement, EngineError> {
    let n1 = spec.n1();
    let n2 = spec.n2();
    let mut first = SectorOp::zero(vec![Slot::Form2]);
    let mut second = SectorOp::zero(vec![Slot::Form2]);

    for i in 0..n1 {
        let ui = TensorField::basis(spec, vec![Slot::Vec1], vec![i]);
        // d xi_i (x) u_i
        for k in 0..n2 {
            let c = &spec.d1[i][k];
            if c.is_zero() {
                continue;
            }
            let mut head = TensorField::zero(vec![Slot::Form2]);
            head.add_term(vec![k], spec.scalar_a(c.clone()));
            first.add_part(head.tensor(&ui));
        }
        // Tor(xi_i) (x) u_i
        let tor = torsion(spec, &TensorField::basis(spec, vec![Slot::Form1], vec![i]))?;
        for (idx, a) in &tor.comps {
            let mut head = TensorField::zero(vec![Slot::Form2]);
            head.add_term(idx.clone(), a.clone());
            second.add_part(head.tensor(&ui));
        }
    }
    for i in 0..n1 {
        for j in 0..n1 {
            let uj = DiffOp::basis_vec(spec, j);
            let ui = DiffOp::basis_vec(spec, i);
            let prod = bullet(spec, &uj, &ui)?;
            let tens = {
                let t = TensorField::basis(spec, vec![Slot::Vec1], vec![j])
                    .tensor(&TensorField::basis(spec, vec![Slot::Vec1], vec![i]));
                DiffOp::from_part(t)
            };
            for k in 0..n2 {
                let w = &spec.wedge[i][j][k];
                if w.is_zero() {
                    continue;
                }
                let mut head = TensorField::zero(vec![Slot::Form2]);
                head.add_term(vec![k], spec.scalar_a(w.neg()));
                for part in prod.parts.values() {
                    first.add_part(head.tensor(part));
                }
                for part in tens.parts.values() {
                    second.add_part(head.tensor(part));
                }
            }
        }
    }
    if first != second {
        return Err(EngineError::InvalidSpec(
            "the two closed forms of the curvature element disagree".into(),
        ));
    }
    Ok(CurvatureElement { value: first })
}

/// The relations of the differential operator sheaf: one generator
/// R_hat(alpha_k) = (alpha_k (x) id) R per 2-form dual basis element.
pub fn da_relations(spec: &CalculusSpec) -> Result<Vec<DiffOp>, EngineError> {
    let r = curvature_element(spec)?;
    let by_k = r.value.by_prefix_index();
    let mut out = vec![DiffOp::zero(); spec.n2()];
    for (key, op) in by_k {
        out[key[0]] = op;
    }
    // Cross-check against phi(alpha(xi_i ^ xi_j) u_j (x) u_i)
    //                     - alpha(xi_i ^ xi_j) u_j . u_i
    // whenever the wedge splits (it does for every built-in calculus).
    if let Ok(split) = wedge_splitting(spec) {
        for (k, rel) in out.iter().enumerate() {
            let mut pairs = Vec::new();
            let mut tensor_part = DiffOp::zero();
            for i in 0..spec.n1() {
                for j in 0..spec.n1() {
                    let c = &spec.wedge[i][j][k];
                    if c.is_zero() {
                        continue;
                    }
                    let mut uj = TensorField::zero(vec![Slot::Vec1]);
                    uj.add_term(vec![j], spec.scalar_a(c.clone()));
                    let ui = TensorField::basis(spec, vec![Slot::Vec1], vec![i]);
                    let prod = bullet(
                        spec,
                        &DiffOp::from_part(uj.clone()),
                        &DiffOp::from_part(ui.clone()),
                    )?;
                    tensor_part = tensor_part.add(&prod);
                    pairs.push((uj, ui));
                }
            }
            let phi_part = phi(spec, &pairs, &split)?;
            let alt = DiffOp::from_part(phi_part).sub(&tensor_part);
            if alt != *rel {
                return Err(EngineError::InvalidSpec(format!(
                    "relation {} disagrees with its phi-bracket form",
                    k
                )));
            }
        }
    }
    Ok(out)
}

/// A right-inverse of the wedge product, one preimage per 2-form basis
/// element, supported on the earliest 1-form pairs in lexicographic
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeSplitting {
    /// s[k]: an element of Omega^1 (x) Omega^1 with wedge(s[k]) = omega_k.
    pub s: Vec<TensorField>,
}

fn splitting_with_order(
    spec: &CalculusSpec,
    col_order: &[usize],
) -> Result<WedgeSplitting, EngineError> {
    let n1 = spec.n1();
    let n2 = spec.n2();
    // A[k'][(i,j)] x[(i,j)] = delta_{k,k'}
    let mut rows = Vec::with_capacity(n2);
    for k in 0..n2 {
        let mut row = Vec::with_capacity(n1 * n1);
        for i in 0..n1 {
            for j in 0..n1 {
                row.push(spec.wedge[i][j][k].clone());
            }
        }
        rows.push(row);
    }
    let m = Matrix::from_rows(rows);
    let mut s = Vec::with_capacity(n2);
    for k in 0..n2 {
        let mut b = vec![crate::scalar::Scalar::zero(spec.params.clone()); n2];
        b[k] = crate::scalar::Scalar::one(spec.params.clone());
        let x = m
            .solve_with_order(&b, col_order)
            .ok_or(EngineError::WedgeNotSurjective)?;
        let mut tf = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
        for i in 0..n1 {
            for j in 0..n1 {
                tf.add_term(vec![i, j], spec.scalar_a(x[i * n1 + j].clone()));
            }
        }
        s.push(tf);
    }
    Ok(WedgeSplitting { s })
}

/// The canonical splitting (earliest pairs in lexicographic order).
pub fn wedge_splitting(spec: &CalculusSpec) -> Result<WedgeSplitting, EngineError> {
    let order: Vec<usize> = (0..spec.n1() * spec.n1()).collect();
    splitting_with_order(spec, &order)
}

/// An alternative splitting preferring the latest pairs; used to check
/// that phi does not depend on the choice.
pub fn wedge_splitting_alt(spec: &CalculusSpec) -> Result<WedgeSplitting, EngineError> {
    let order: Vec<usize> = (0..spec.n1() * spec.n1()).rev().collect();
    splitting_with_order(spec, &order)
}

/// A formal sum of u (x) v pairs of vector fields. The plain tensor (not
/// over A) matters: phi is not balanced over A, only the combination
/// phi(x) - bullet(x) is.
pub type VecPairs = [(TensorField, TensorField)];

/// The A-balanced image in Vec (x)_A Vec as a two-slot tensor field.
pub fn pairs_to_tensor(pairs: &VecPairs) -> TensorField {
    let mut out = TensorField::zero(vec![Slot::Vec1, Slot::Vec1]);
    for (u, v) in pairs {
        out = out.add(&u.tensor(v));
    }
    out
}

/// ev^<2>(x (x) k) = 0 for every kernel element k of the wedge; only the
/// A-balanced image of x matters here.
pub fn is_antisymmetric(spec: &CalculusSpec, pairs: &VecPairs) -> bool {
    let x = pairs_to_tensor(pairs);
    let n1 = spec.n1();
    for kv in spec.wedge_kernel() {
        let mut acc = spec.zero_a();
        for (idx, a) in &x.comps {
            let (p, q) = (idx[0], idx[1]);
            // ev^<2>(u_p (x) u_q (x) xi_i (x) xi_j) = delta_{q,i} delta_{p,j}
            let coeff = &kv[q * n1 + p];
            if !coeff.is_zero() {
                acc = acc.add(&a.mul(&spec.scalar_a(coeff.clone())));
            }
        }
        if !acc.is_zero() {
            return false;
        }
    }
    true
}

/// The bracket substitute: phi(u (x) v)(xi) = D_u(v(xi)) + ev^<2>(u (x) v (x) z)
/// with wedge(z) = d xi. Defined on antisymmetric arguments only; the
/// result does not depend on the splitting.
pub fn phi(
    spec: &CalculusSpec,
    pairs: &VecPairs,
    split: &WedgeSplitting,
) -> Result<TensorField, EngineError> {
    if !is_antisymmetric(spec, pairs) {
        return Err(EngineError::NotAntisymmetric);
    }
    phi_unchecked(spec, pairs, split)
}

/// phi without the antisymmetry gate, for callers that have verified a
/// weaker sector-restricted kernel condition sufficient for
/// well-definedness on their inputs.
pub fn phi_unchecked(
    spec: &CalculusSpec,
    pairs: &VecPairs,
    split: &WedgeSplitting,
) -> Result<TensorField, EngineError> {
    let n1 = spec.n1();
    let mut out = TensorField::zero(vec![Slot::Vec1]);
    for m in 0..n1 {
        let xi_m = TensorField::basis(spec, vec![Slot::Form1], vec![m]);
        // z with wedge(z) = d xi_m
        let mut z = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
        for k in 0..spec.n2() {
            let c = &spec.d1[m][k];
            if c.is_zero() {
                continue;
            }
            z = z.add(&split.s[k].scale(&spec.scalar_a(c.clone())));
        }
        let mut comp = spec.zero_a();
        for (u, v) in pairs {
            let v_xi = ev_n(spec, v, &xi_m)?;
            comp = comp.add(&directional(spec, u, &v_xi)?);
            // ev^<2>(u (x) v (x) z) = sum z[(p,q)] v(xi_p) u(xi_q)
            for (idx, zc) in &z.comps {
                let vp = ev_n(spec, v, &TensorField::basis(spec, vec![Slot::Form1], vec![idx[0]]))?;
                let uq = ev_n(spec, u, &TensorField::basis(spec, vec![Slot::Form1], vec![idx[1]]))?;
                comp = comp.add(&zc.mul(&vp).mul(&uq));
            }
        }
        out.add_term(vec![m], comp);
    }
    Ok(out)
}

