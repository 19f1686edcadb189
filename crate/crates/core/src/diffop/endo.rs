//! Differential operators combined with module endomorphisms: the K_n
//! pairing, the induced derivative on endomorphisms and the reordering
//! rule between the two.

use crate::aelem::AElem;
use crate::calculus::ops::{
    contract_ev, nabla_module, sigma_inv_chain, sigma_inv_vec_chain, square_forms_iter,
};
use crate::calculus::{CalculusSpec, ModuleConnection, Slot, TensorField};
use crate::error::EngineError;

/// A left-module map S : E -> Omega^(x)n (x) E, stored by its images of
/// the free basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EndoOperator {
    pub order: usize,
    pub rank: usize,
    /// images[b] has slots [Form1; order] ++ [Module(rank)].
    pub images: Vec<TensorField>,
}

impl EndoOperator {
    pub fn identity(spec: &CalculusSpec, rank: usize) -> EndoOperator {
        let images = (0..rank)
            .map(|b| {
                let mut tf = TensorField::zero(vec![Slot::Module(rank)]);
                tf.add_term(vec![b], spec.one_a());
                tf
            })
            .collect();
        EndoOperator {
            order: 0,
            rank,
            images,
        }
    }

    /// Order-0 operator from a matrix: T(e_a) = sum_b m[b][a] e_b.
    pub fn from_matrix(rank: usize, m: Vec<Vec<AElem>>) -> EndoOperator {
        let images = (0..rank)
            .map(|a| {
                let mut tf = TensorField::zero(vec![Slot::Module(rank)]);
                for (b, row) in m.iter().enumerate() {
                    tf.add_term(vec![b], row[a].clone());
                }
                tf
            })
            .collect();
        EndoOperator {
            order: 0,
            rank,
            images,
        }
    }

    /// Left-linear application to a module element.
    pub fn apply(&self, e: &[AElem]) -> TensorField {
        let mut slots = vec![Slot::Form1; self.order];
        slots.push(Slot::Module(self.rank));
        let mut out = TensorField::zero(slots);
        for (b, c) in e.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.images[b].scale(c));
            }
        }
        out
    }

    /// S . U = (id^(x)m (x) S) U, an operator of order n + m.
    pub fn compose(&self, other: &EndoOperator) -> EndoOperator {
        let rank = self.rank;
        let images = (0..rank)
            .map(|a| {
                let ua = &other.images[a];
                let mut slots = vec![Slot::Form1; other.order + self.order];
                slots.push(Slot::Module(rank));
                let mut out = TensorField::zero(slots);
                for (idx, c) in &ua.comps {
                    let forms = &idx[..other.order];
                    let b = idx[other.order];
                    let sb = self.images[b].scale(c);
                    for (sidx, sc) in &sb.comps {
                        let mut ni = forms.to_vec();
                        ni.extend_from_slice(sidx);
                        out.add_term(ni, sc.clone());
                    }
                }
                out
            })
            .collect();
        EndoOperator {
            order: self.order + other.order,
            rank,
            images,
        }
    }
}

/// K_n(v, S)(e) = (ev^<n> (x) id_E)(v (x) S(e)).
pub fn k_op(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    v: &TensorField,
    s: &EndoOperator,
    e: &[AElem],
) -> Result<Vec<AElem>, EngineError> {
    if v.grade() != s.order {
        return Err(EngineError::GradeMismatch {
            expected: s.order,
            got: v.grade(),
        });
    }
    debug_assert_eq!(e_mod.rank, s.rank);
    let image = s.apply(e);
    let contracted = contract_ev(v, &image);
    let mut out = vec![spec.zero_a(); s.rank];
    for (idx, a) in &contracted.comps {
        out[idx[0]] = out[idx[0]].add(a);
    }
    Ok(out)
}

/// nabla(T) = nabla . T - (id (x) T) . nabla for an order-0 endomorphism;
/// the result is a left module map of order 1.
pub fn nabla_of_endo(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    t: &EndoOperator,
) -> EndoOperator {
    debug_assert_eq!(t.order, 0);
    let rank = t.rank;
    let images = (0..rank)
        .map(|a| {
            // nabla(T(e_a))
            let te = t.images[a].clone();
            let te_vec: Vec<AElem> = {
                let mut v = vec![spec.zero_a(); rank];
                for (idx, c) in &te.comps {
                    v[idx[0]] = v[idx[0]].add(c);
                }
                v
            };
            let first = nabla_module(spec, e_mod, &te_vec);
            // (id (x) T)(nabla e_a)
            let mut basis_e = vec![spec.zero_a(); rank];
            basis_e[a] = spec.one_a();
            let ne = nabla_module(spec, e_mod, &basis_e);
            let mut second = TensorField::zero(vec![Slot::Form1, Slot::Module(rank)]);
            for (idx, c) in &ne.comps {
                let (i, b) = (idx[0], idx[1]);
                let tb = t.images[b].scale(c);
                for (tidx, tc) in &tb.comps {
                    second.add_term(vec![i, tidx[0]], tc.clone());
                }
            }
            first.sub(&second)
        })
        .collect();
    EndoOperator {
        order: 1,
        rank,
        images,
    }
}

/// nabla_E(S) = (square^<n> (x) id_E + id^(x)n (x) nabla_E) S
///            - (sigma^{-<n>} (x) id_E)(id (x) S) nabla_E,
/// a left module map of order n + 1.
pub fn nabla_of_endo_general(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    s: &EndoOperator,
) -> Result<EndoOperator, EngineError> {
    let n = s.order;
    if n == 0 {
        return Ok(nabla_of_endo(spec, e_mod, s));
    }
    let rank = s.rank;
    let mut images = Vec::with_capacity(rank);
    for a in 0..rank {
        let sa = &s.images[a];
        let mut slots = vec![Slot::Form1; n + 1];
        slots.push(Slot::Module(rank));
        let mut acc = TensorField::zero(slots.clone());
        for (idx, c) in &sa.comps {
            let forms_idx = idx[..n].to_vec();
            let b = idx[n];
            // square^<n> with the coefficient on the form legs
            let mut forms = TensorField::zero(vec![Slot::Form1; n]);
            forms.add_term(forms_idx.clone(), c.clone());
            let dforms = square_forms_iter(spec, &forms)?;
            let mut eb = TensorField::zero(vec![Slot::Module(rank)]);
            eb.add_term(vec![b], spec.one_a());
            acc = acc.add(&dforms.tensor(&eb));
            // id^(x)n (x) nabla_E on the bare basis element
            let mut basis_e = vec![spec.zero_a(); rank];
            basis_e[b] = spec.one_a();
            let nb = nabla_module(spec, e_mod, &basis_e);
            let mut head = TensorField::zero(vec![Slot::Form1; n]);
            head.add_term(forms_idx, c.clone());
            acc = acc.add(&head.tensor(&nb));
        }
        // -(sigma^{-<n>} (x) id_E)(id (x) S)(nabla e_a)
        let mut basis_e = vec![spec.zero_a(); rank];
        basis_e[a] = spec.one_a();
        let ne = nabla_module(spec, e_mod, &basis_e);
        for (idx, c) in &ne.comps {
            let (i, b) = (idx[0], idx[1]);
            let sb = s.images[b].scale(c);
            for (sidx, sc) in &sb.comps {
                let mut full_idx = vec![i];
                full_idx.extend_from_slice(&sidx[..n]);
                let target = sidx[n];
                let mut t = TensorField::zero(vec![Slot::Form1; n + 1]);
                t.add_term(full_idx, sc.clone());
                let braided = sigma_inv_chain(spec, n, &t)?;
                let mut et = TensorField::zero(vec![Slot::Module(rank)]);
                et.add_term(vec![target], spec.one_a());
                acc = acc.sub(&braided.tensor(&et));
            }
        }
        images.push(acc);
    }
    Ok(EndoOperator {
        order: n + 1,
        rank,
        images,
    })
}

/// The reordering identity
/// (u |>) . K_n(v, S) = K_n(u |> v, S) + K_{n+1}(u (x) v, nabla_E(S))
///                    + K_n(v', S) . (u' |>), sigma^{-<n>}(u (x) v) = v' (x) u';
/// returns both sides for comparison in tests.
pub fn reorder_identity_sides(
    spec: &CalculusSpec,
    e_mod: &ModuleConnection,
    u: &TensorField,
    v: &TensorField,
    s: &EndoOperator,
    e: &[AElem],
) -> Result<(Vec<AElem>, Vec<AElem>), EngineError> {
    use super::bullet::act_homog;
    let n = v.grade();
    // lhs: u |> K_n(v, S)(e)
    let inner = k_op(spec, e_mod, v, s, e)?;
    let lhs = act_homog(spec, e_mod, u, &inner)?;
    // rhs term 1: K_n(u |> v, S): u |> v through the canonical derivative
    // on Vec^(x)n (grade-preserving part of the bullet recursion).
    let uv = contract_ev(u, &crate::calculus::ops::square_vec_iter(spec, v)?);
    let mut rhs = k_op(spec, e_mod, &uv, s, e)?;
    // rhs term 2: K_{n+1}(u (x) v, nabla_E(S))
    let ns = nabla_of_endo_general(spec, e_mod, s)?;
    let t2 = k_op(spec, e_mod, &u.tensor(v), &ns, e)?;
    for (r, x) in rhs.iter_mut().zip(t2) {
        *r = r.add(&x);
    }
    // rhs term 3: K_n(v', S)(u' |> e) with sigma^{-<n>}(u (x) v) = v' (x) u'
    let braided = sigma_inv_vec_chain(spec, n, &u.tensor(v))?;
    for (idx, c) in &braided.comps {
        let vprime = TensorField::basis(spec, vec![Slot::Vec1; n], idx[..n].to_vec());
        let uprime = TensorField::basis(spec, vec![Slot::Vec1], vec![idx[n]]);
        let acted = act_homog(spec, e_mod, &uprime, e)?;
        let t3 = k_op(spec, e_mod, &vprime, s, &acted)?;
        for (r, x) in rhs.iter_mut().zip(t3) {
            *r = r.add(&x.mul(c));
        }
    }
    Ok((lhs, rhs))
}
