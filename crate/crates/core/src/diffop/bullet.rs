//! The bullet product, the module action it is built for, and the
//! canonical covariant derivative on the operator algebra.

use super::{DiffOp, SectorOp};
use crate::aelem::AElem;
use crate::calculus::ops::{contract_ev, nabla_iter, square_vec_iter};
use crate::calculus::{CalculusSpec, ModuleConnection, Slot, TensorField};
use crate::error::EngineError;

/// The derivative half of the grade-1 product: u acting on a homogeneous
/// tensor by (ev (x) id^(x)m)(u (x) square^<m> w).
fn deriv_term(
    spec: &CalculusSpec,
    u: &TensorField,
    w: &TensorField,
) -> Result<TensorField, EngineError> {
    let dw = square_vec_iter(spec, w)?;
    Ok(contract_ev(u, &dw))
}

/// u acting by the derivative on every homogeneous part of w.
fn deriv_all(spec: &CalculusSpec, u: &TensorField, w: &DiffOp) -> Result<DiffOp, EngineError> {
    let mut out = DiffOp::zero();
    for part in w.parts.values() {
        out.add_part(deriv_term(spec, u, part)?);
    }
    Ok(out)
}

/// bullet of a homogeneous left factor with a general right factor.
fn bullet_homog(
    spec: &CalculusSpec,
    v: &TensorField,
    w: &DiffOp,
) -> Result<DiffOp, EngineError> {
    let n = v.grade();
    if v.is_zero() || w.is_zero() {
        return Ok(DiffOp::zero());
    }
    if n == 0 {
        let a = v.comps.get(&vec![]).cloned().unwrap_or_else(|| spec.zero_a());
        return Ok(w.scale(&a));
    }
    if n == 1 {
        // u (x) w + derivative part
        let mut out = DiffOp::zero();
        for part in w.parts.values() {
            out.add_part(v.tensor(part));
        }
        out = out.add(&deriv_all(spec, v, w)?);
        return Ok(out);
    }
    // (u (x) rest) . w = u (x) (rest . w) + u .deriv (rest . w) - (u .deriv rest) . w,
    // computed per component with the coefficient on the leading slot.
    let mut out = DiffOp::zero();
    for (idx, a) in &v.comps {
        let u = TensorField::basis(spec, vec![Slot::Vec1], vec![idx[0]]);
        let rest = TensorField::basis(spec, vec![Slot::Vec1; n - 1], idx[1..].to_vec());
        let rest_w = bullet_homog(spec, &rest, w)?;
        let mut acc = DiffOp::zero();
        for part in rest_w.parts.values() {
            acc.add_part(u.tensor(part));
        }
        acc = acc.add(&deriv_all(spec, &u, &rest_w)?);
        let du_rest = deriv_term(spec, &u, &rest)?;
        acc = acc.sub(&bullet_homog(spec, &du_rest, w)?);
        out = out.add(&acc.scale(a));
    }
    Ok(out)
}

/// The associative bullet product on the tensor algebra of vector
/// fields, with unit 1 in grade 0.
pub fn bullet(spec: &CalculusSpec, v: &DiffOp, w: &DiffOp) -> Result<DiffOp, EngineError> {
    let mut out = DiffOp::zero();
    for part in v.parts.values() {
        out = out.add(&bullet_homog(spec, part, w)?);
    }
    Ok(out)
}

/// Action of a homogeneous tensor on a module element through the
/// iterated covariant derivative.
pub fn act_homog(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    v: &TensorField,
    e: &[AElem],
) -> Result<Vec<AElem>, EngineError> {
    let n = v.grade();
    if n == 0 {
        let a = v.comps.get(&vec![]).cloned().unwrap_or_else(|| spec.zero_a());
        return Ok(e.iter().map(|c| c.mul(&a)).collect());
    }
    let ne = nabla_iter(spec, e_mod, n, e)?;
    let contracted = contract_ev(v, &ne);
    let mut out = vec![spec.zero_a(); e_mod.rank];
    for (idx, a) in &contracted.comps {
        out[idx[0]] = out[idx[0]].add(a);
    }
    Ok(out)
}

/// v acting on e in (E, nabla_E).
pub fn act(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    v: &DiffOp,
    e: &[AElem],
) -> Result<Vec<AElem>, EngineError> {
    let mut out = vec![spec.zero_a(); e_mod.rank];
    for part in v.parts.values() {
        let r = act_homog(spec, e_mod, part, e)?;
        for (o, x) in out.iter_mut().zip(r) {
            *o = o.add(&x);
        }
    }
    Ok(out)
}

/// The canonical covariant derivative nabla(v) = coev(1) . v
/// = sum_i xi_i (x) (u_i . v) on the operator algebra.
pub fn nabla_tvec(spec: &CalculusSpec, v: &DiffOp) -> Result<SectorOp, EngineError> {
    let mut out = SectorOp::zero(vec![Slot::Form1]);
    for i in 0..spec.n1() {
        let ui = DiffOp::basis_vec(spec, i);
        let prod = bullet(spec, &ui, v)?;
        let xi = TensorField::basis(spec, vec![Slot::Form1], vec![i]);
        for part in prod.parts.values() {
            out.add_part(xi.tensor(part));
        }
    }
    Ok(out)
}

/// Right bullet action on the tensor legs of a sector element:
/// sum_b p_b (x) y_b  |->  sum_b p_b (x) (y_b . w).
pub fn sector_bullet_right(
    spec: &CalculusSpec,
    s: &SectorOp,
    w: &DiffOp,
) -> Result<SectorOp, EngineError> {
    let p = s.prefix.len();
    let mut out = SectorOp::zero(s.prefix.clone());
    for tf in s.parts.values() {
        for (idx, a) in &tf.comps {
            let tail = TensorField::basis(spec, vec![Slot::Vec1; idx.len() - p], idx[p..].to_vec());
            let prod = bullet(spec, &DiffOp::from_part(tail), w)?;
            let mut head = TensorField::zero(s.prefix.clone());
            head.add_term(idx[..p].to_vec(), a.clone());
            for part in prod.parts.values() {
                out.add_part(head.tensor(part));
            }
        }
    }
    Ok(out)
}
