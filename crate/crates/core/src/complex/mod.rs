//! Almost-complex structures: sector decomposition of forms and vector
//! fields, integrability, and the nice-connection construction that
//! assembles a covariant derivative from holomorphic/antiholomorphic
//! halves.

pub mod holo;

#[cfg(test)]
mod tests;

use crate::aelem::AElem;
use crate::calculus::ops::{d_omega1, sigma_inv_apply, square_omega1, torsion, wedge_at};
use crate::calculus::{CalculusSpec, Slot, TensorField};
use crate::diffop::curvature::wedge_splitting;
use crate::error::EngineError;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Exact eigenprojections of J on 1-forms, vector fields and 2-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorDecomposition {
    pub p10: Matrix,
    pub p01: Matrix,
    pub p10_vec: Matrix,
    pub p01_vec: Matrix,
    /// J induced on the 2-form basis.
    pub j2: Matrix,
    pub pi20: Matrix,
    pub pi11: Matrix,
    pub pi02: Matrix,
}

fn scalar_half(params: &crate::scalar::VarSet) -> Scalar {
    Scalar::from_int(params.clone(), 1)
        .div(&Scalar::from_int(params.clone(), 2))
        .unwrap()
}

/// Applies a basis matrix to one slot: new index a gets sum_b m[a][b] old b.
pub fn apply_slot_matrix(tf: &TensorField, pos: usize, m: &Matrix, coords: &crate::scalar::VarSet) -> TensorField {
    let mut out = TensorField::zero(tf.slots.clone());
    for (idx, c) in &tf.comps {
        let b = idx[pos];
        for a in 0..m.rows {
            if m.data[a][b].is_zero() {
                continue;
            }
            let mut ni = idx.clone();
            ni[pos] = a;
            out.add_term(ni, c.mul(&AElem::from_scalar(coords.clone(), m.data[a][b].clone())));
        }
    }
    out
}

/// The sector decomposition of a calculus carrying J.
pub fn decompose(spec: &CalculusSpec) -> Result<SectorDecomposition, EngineError> {
    let j = spec
        .j_matrix
        .as_ref()
        .ok_or(EngineError::CapabilityMissing("J"))?;
    let n1 = spec.n1();
    let n2 = spec.n2();
    let p = &spec.params;
    let jm = Matrix::from_rows(j.clone());
    if jm.mul(&jm) != Matrix::identity(p, n1).neg() {
        return Err(EngineError::InvalidSpec("J^2 is not -identity".into()));
    }
    let half = scalar_half(p);
    let i_s = Scalar::i(p.clone());
    // p10 = (id - i J)/2, p01 = (id + i J)/2
    let p10 = Matrix::identity(p, n1)
        .add(&jm.scale(&i_s).neg())
        .scale(&half);
    let p01 = Matrix::identity(p, n1).add(&jm.scale(&i_s)).scale(&half);
    // Vec-side J is the transpose matrix on coefficients.
    let jt = {
        let mut t = Matrix::zero(p, n1, n1);
        for a in 0..n1 {
            for b in 0..n1 {
                t.data[a][b] = jm.data[b][a].clone();
            }
        }
        t
    };
    let p10_vec = Matrix::identity(p, n1)
        .add(&jt.scale(&i_s).neg())
        .scale(&half);
    let p01_vec = Matrix::identity(p, n1).add(&jt.scale(&i_s)).scale(&half);
    // J on the 2-form basis via any wedge splitting.
    let split = wedge_splitting(spec)?;
    let mut j2 = Matrix::zero(p, n2, n2);
    for (k, sk) in split.s.iter().enumerate() {
        let moved = apply_slot_matrix(sk, 0, &jm, &spec.coords())
            .add(&apply_slot_matrix(sk, 1, &jm, &spec.coords()));
        let w = wedge_at(spec, &moved, 0);
        for (idx, c) in &w.comps {
            let cs = c.constant_scalar(p).ok_or_else(|| {
                EngineError::InvalidSpec("J must act with constant coefficients".into())
            })?;
            j2.data[idx[0]][k] = j2.data[idx[0]][k].add(&cs);
        }
    }
    // Eigenprojections for eigenvalues 2i, 0, -2i.
    let two_i = Scalar::from_int(p.clone(), 2).mul(&i_s);
    let idm = Matrix::identity(p, n2);
    let lag = |l1: &Scalar, m1: &Matrix, l2: &Scalar, m2: &Matrix, lam: &Scalar| -> Matrix {
        // (J2 - l1)(J2 - l2) / ((lam - l1)(lam - l2))
        let num = j2.add(&m1.scale(l1).neg()).mul(&j2.add(&m2.scale(l2).neg()));
        let den = lam.sub(l1).mul(&lam.sub(l2));
        num.scale(&den.inv().unwrap())
    };
    let zero = Scalar::zero(p.clone());
    let pi20 = lag(&zero, &idm, &two_i.neg(), &idm, &two_i);
    let pi11 = lag(&two_i, &idm, &two_i.neg(), &idm, &zero);
    let pi02 = lag(&zero, &idm, &two_i, &idm, &two_i.neg());
    let dec = SectorDecomposition {
        p10,
        p01,
        p10_vec,
        p01_vec,
        j2,
        pi20,
        pi11,
        pi02,
    };
    // The eigenprojections must be complementary idempotents.
    let sum = dec.pi20.add(&dec.pi11).add(&dec.pi02);
    if sum != Matrix::identity(p, n2)
        || dec.pi20.mul(&dec.pi20) != dec.pi20
        || dec.pi11.mul(&dec.pi11) != dec.pi11
        || dec.pi02.mul(&dec.pi02) != dec.pi02
    {
        return Err(EngineError::InvalidSpec(
            "induced J on 2-forms is not semisimple with eigenvalues 0, +-2i".into(),
        ));
    }
    Ok(dec)
}

/// Integrability: d of every (0,1)-form lies in Omega^{0,2} + Omega^{1,1}.
pub fn integrable(spec: &CalculusSpec) -> Result<bool, EngineError> {
    let dec = decompose(spec)?;
    for i in 0..spec.n1() {
        let xi = TensorField::basis(spec, vec![Slot::Form1], vec![i]);
        let xi01 = apply_slot_matrix(&xi, 0, &dec.p01, &spec.coords());
        let d = d_omega1(spec, &xi01);
        let bad = apply_slot_matrix(&d, 0, &dec.pi20, &spec.coords());
        if !bad.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// phi (or psi): the inverse of the wedge restricted to one mixed
/// sector, tabulated as preimages of pi11(omega_k) per 2-form basis
/// element. `first` and `second` are the slot projections of the sector.
pub fn mixed_wedge_inverse(
    spec: &CalculusSpec,
    dec: &SectorDecomposition,
    first: &Matrix,
    second: &Matrix,
    name: &'static str,
) -> Result<Vec<TensorField>, EngineError> {
    let n1 = spec.n1();
    let n2 = spec.n2();
    let p = &spec.params;
    // Rows: wedge image coordinates (n2) plus sector constraints (n1^2).
    // Columns: pair coefficients x[(i,j)].
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for k in 0..n2 {
        let mut row = Vec::with_capacity(n1 * n1);
        for i in 0..n1 {
            for j in 0..n1 {
                // wedge coefficient of (first xi_i) (x) (second xi_j) at omega_k
                let mut acc = Scalar::zero(p.clone());
                for a in 0..n1 {
                    for b in 0..n1 {
                        let c = first.data[a][i]
                            .mul(&second.data[b][j])
                            .mul(&spec.wedge[a][b][k]);
                        acc = acc.add(&c);
                    }
                }
                row.push(acc);
            }
        }
        rows.push(row);
    }
    // Constrain solutions to the projected sector: (id - P (x) Q) x = 0.
    for a in 0..n1 {
        for b in 0..n1 {
            let mut row = Vec::with_capacity(n1 * n1);
            for i in 0..n1 {
                for j in 0..n1 {
                    let mut c = first.data[a][i].mul(&second.data[b][j]).neg();
                    if a == i && b == j {
                        c = c.add(&Scalar::one(p.clone()));
                    }
                    row.push(c);
                }
            }
            rows.push(row);
        }
    }
    let m = Matrix::from_rows(rows);
    if !m.kernel().is_empty() {
        return Err(EngineError::ConditionFailed {
            name,
            detail: "restricted wedge is not injective on its sector".into(),
        });
    }
    let mut out = Vec::with_capacity(n2);
    for k in 0..n2 {
        let mut b = vec![Scalar::zero(p.clone()); n2 + n1 * n1];
        for l in 0..n2 {
            b[l] = dec.pi11.data[l][k].clone();
        }
        let x = m.solve(&b).ok_or(EngineError::ConditionFailed {
            name,
            detail: "restricted wedge does not reach pi11 of the 2-forms".into(),
        })?;
        let mut tf = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
        for i in 0..n1 {
            for j in 0..n1 {
                tf.add_term(vec![i, j], spec.scalar_a(x[i * n1 + j].clone()));
            }
        }
        out.push(tf);
    }
    Ok(out)
}

/// phi pi11 applied to a 2-form-slot tensor using a preimage table.
pub fn apply_phi11(table: &[TensorField], tf: &TensorField, pos: usize) -> TensorField {
    let mut slots = tf.slots.clone();
    debug_assert_eq!(slots[pos], Slot::Form2);
    slots.remove(pos);
    slots.insert(pos, Slot::Form1);
    slots.insert(pos + 1, Slot::Form1);
    let mut out = TensorField::zero(slots);
    for (idx, c) in &tf.comps {
        let k = idx[pos];
        for (sidx, sc) in &table[k].comps {
            let mut ni = idx.clone();
            ni.remove(pos);
            ni.insert(pos, sidx[0]);
            ni.insert(pos + 1, sidx[1]);
            out.add_term(ni, c.mul(sc));
        }
    }
    out
}

/// Right bimodule covariant derivatives on the two halves of Omega^1,
/// given by connection tables on the projected basis, plus braidings.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloConnectionPair {
    /// nabla_10(p10 xi_k) = sum gamma10[k][i][j] xi_i (x) xi_j (must land
    /// in Omega^{1,0} (x) Omega^1); rows for (0,1) basis directions vanish.
    pub gamma10: Vec<Vec<Vec<AElem>>>,
    pub gamma01: Vec<Vec<Vec<AElem>>>,
    /// sigma10_inv[i][j][a][b]: the braiding of nabla_10 on
    /// Omega^1 (x) Omega^{1,0}.
    pub sigma10_inv: Vec<Vec<Vec<Vec<AElem>>>>,
    pub sigma01_inv: Vec<Vec<Vec<Vec<AElem>>>>,
}

impl HoloConnectionPair {
    /// Both halves zero on the basis, zero braidings. On a constants
    /// backend this is a full connection pair; on a polynomial backend
    /// the Leibniz terms are generated by the assembly formula.
    pub fn zero(spec: &CalculusSpec) -> HoloConnectionPair {
        let n1 = spec.n1();
        let z = spec.zero_a();
        HoloConnectionPair {
            gamma10: vec![vec![vec![z.clone(); n1]; n1]; n1],
            gamma01: vec![vec![vec![z.clone(); n1]; n1]; n1],
            sigma10_inv: vec![vec![vec![vec![z.clone(); n1]; n1]; n1]; n1],
            sigma01_inv: vec![vec![vec![vec![z.clone(); n1]; n1]; n1]; n1],
        }
    }

    /// Zero connection tables with flip braidings; the natural pair for
    /// the flat polynomial backends.
    pub fn flat_flip(spec: &CalculusSpec) -> HoloConnectionPair {
        let n1 = spec.n1();
        let mut pair = HoloConnectionPair::zero(spec);
        for i in 0..n1 {
            for j in 0..n1 {
                pair.sigma10_inv[i][j][j][i] = spec.one_a();
                pair.sigma01_inv[i][j][j][i] = spec.one_a();
            }
        }
        pair
    }
}

/// Assembles the nice covariant derivative
///   square = ((id (x) pi10) nabla_10 - phi pi11 d) pi10
///          + ((id (x) pi01) nabla_01 - psi pi11 d) pi01
/// with the matching braiding, returns the calculus extended by the
/// result, and asserts the three structural conclusions:
/// (i) (J (x) id) square = square J, (ii) pi11 Tor = 0,
/// (iii) pi11 wedge sigma^{-1} = -pi01 ^ pi10 - pi10 ^ pi01.
pub fn nice_connection(
    spec: &CalculusSpec,
    pair: &HoloConnectionPair,
) -> Result<CalculusSpec, EngineError> {
    let dec = decompose(spec)?;
    let n1 = spec.n1();
    let coords = spec.coords();
    let phi = mixed_wedge_inverse(spec, &dec, &dec.p10, &dec.p01, "a")?;
    let psi = mixed_wedge_inverse(spec, &dec, &dec.p01, &dec.p10, "b")?;

    // square on the basis.
    let mut gamma = vec![vec![vec![spec.zero_a(); n1]; n1]; n1];
    for m in 0..n1 {
        let mut total = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
        for (proj, conn, table) in [
            (&dec.p10, &pair.gamma10, &phi),
            (&dec.p01, &pair.gamma01, &psi),
        ] {
            // nabla on the projected basis element, second slot projected back.
            let mut nab = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
            for l in 0..n1 {
                let c = &proj.data[l][m];
                if c.is_zero() {
                    continue;
                }
                for i in 0..n1 {
                    for j in 0..n1 {
                        nab.add_term(
                            vec![i, j],
                            conn[l][i][j].mul(&AElem::from_scalar(coords.clone(), c.clone())),
                        );
                    }
                }
            }
            let nab = apply_slot_matrix(&nab, 1, proj, &coords);
            total = total.add(&nab);
            // - (phi or psi) pi11 d of the projected basis element
            let xi = TensorField::basis(spec, vec![Slot::Form1], vec![m]);
            let xi_p = apply_slot_matrix(&xi, 0, proj, &coords);
            let d = d_omega1(spec, &xi_p);
            total = total.sub(&apply_phi11(table, &d, 0));
        }
        for (idx, c) in &total.comps {
            gamma[m][idx[0]][idx[1]] = c.clone();
        }
    }

    // sigma^{-1} on basis pairs.
    let mut sigma = vec![vec![vec![vec![spec.zero_a(); n1]; n1]; n1]; n1];
    for i in 0..n1 {
        for j in 0..n1 {
            let mut total = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
            for (proj, sig, table) in [
                (&dec.p10, &pair.sigma10_inv, &phi),
                (&dec.p01, &pair.sigma01_inv, &psi),
            ] {
                // (id (x) proj) sig (xi_i (x) proj xi_j)
                let mut fed = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
                for l in 0..n1 {
                    let c = &proj.data[l][j];
                    if c.is_zero() {
                        continue;
                    }
                    for a in 0..n1 {
                        for b in 0..n1 {
                            fed.add_term(
                                vec![a, b],
                                sig[i][l][a][b].mul(&AElem::from_scalar(coords.clone(), c.clone())),
                            );
                        }
                    }
                }
                let fed = apply_slot_matrix(&fed, 1, proj, &coords);
                total = total.add(&fed);
                // - table pi11 wedge (xi_i (x) proj xi_j)
                let xi_i = TensorField::basis(spec, vec![Slot::Form1], vec![i]);
                let xi_j = TensorField::basis(spec, vec![Slot::Form1], vec![j]);
                let pairt = xi_i.tensor(&apply_slot_matrix(&xi_j, 0, proj, &coords));
                let w = wedge_at(spec, &pairt, 0);
                total = total.sub(&apply_phi11(table, &w, 0));
            }
            for (idx, c) in &total.comps {
                sigma[i][j][idx[0]][idx[1]] = c.clone();
            }
        }
    }

    let mut out = spec.clone();
    out.christoffel = Some(gamma);
    out.sigma_inv = Some(sigma);
    out.validate()?;
    check_nice_properties(&out, &dec)?;
    Ok(out)
}

/// The conclusions (i)-(iii) of the nice-connection construction, also
/// run standalone on calculi whose braiding was supplied directly.
pub fn check_nice_properties(
    spec: &CalculusSpec,
    dec: &SectorDecomposition,
) -> Result<(), EngineError> {
    let coords = spec.coords();
    let n1 = spec.n1();
    // (i) (J (x) id) square = square J on the basis
    let jm = Matrix::from_rows(spec.j_matrix.clone().unwrap());
    for m in 0..n1 {
        let xi = TensorField::basis(spec, vec![Slot::Form1], vec![m]);
        let sq = square_omega1(spec, &xi)?;
        let lhs = apply_slot_matrix(&sq, 0, &jm, &coords);
        let jxi = apply_slot_matrix(&xi, 0, &jm, &coords);
        let rhs = square_omega1(spec, &jxi)?;
        if lhs != rhs {
            return Err(EngineError::ConditionFailed {
                name: "i",
                detail: "assembled square does not commute with J".into(),
            });
        }
    }
    // (ii) pi11 Tor = 0
    for m in 0..n1 {
        let xi = TensorField::basis(spec, vec![Slot::Form1], vec![m]);
        let t = torsion(spec, &xi)?;
        if !apply_slot_matrix(&t, 0, &dec.pi11, &coords).is_zero() {
            return Err(EngineError::ConditionFailed {
                name: "ii",
                detail: "pi11 of the torsion does not vanish".into(),
            });
        }
    }
    // (iii) pi11 wedge sigma^{-1} = -pi01^pi10 - pi10^pi01
    for i in 0..n1 {
        for j in 0..n1 {
            let pairt = TensorField::basis(spec, vec![Slot::Form1, Slot::Form1], vec![i, j]);
            let braided = sigma_inv_apply(spec, &pairt, 0)?;
            let lhs = apply_slot_matrix(&wedge_at(spec, &braided, 0), 0, &dec.pi11, &coords);
            let mixed1 = apply_slot_matrix(
                &apply_slot_matrix(&pairt, 0, &dec.p01, &coords),
                1,
                &dec.p10,
                &coords,
            );
            let mixed2 = apply_slot_matrix(
                &apply_slot_matrix(&pairt, 0, &dec.p10, &coords),
                1,
                &dec.p01,
                &coords,
            );
            let rhs = wedge_at(spec, &mixed1, 0).add(&wedge_at(spec, &mixed2, 0)).neg();
            if lhs != rhs {
                return Err(EngineError::ConditionFailed {
                    name: "iii",
                    detail: "pi11 wedge sigma^{-1} has the wrong mixed-sector form".into(),
                });
            }
        }
    }
    Ok(())
}
