//! Built-in calculi: the classical plane, the classical complex plane,
//! the 3D calculus on quantum SU(2) restricted to its left-invariant
//! sector, and the invariant sector of the standard Podles sphere.

use crate::aelem::AElem;
use crate::calculus::{CalculusSpec, CoeffAlgebra};
use crate::error::EngineError;
use crate::linalg::Matrix;
use crate::scalar::{parse_scalar, Scalar, VarSet};
use std::collections::BTreeMap;

/// Names of the connection-family parameters of the quantum SU(2)
/// calculus, in the order used by `su2q_params()`.
pub const SU2Q_PARAM_NAMES: [&str; 8] = ["q", "r", "mu_p", "mu_m", "n_p", "n_m", "m_p", "m_m"];

pub fn su2q_params() -> VarSet {
    VarSet::new(SU2Q_PARAM_NAMES.to_vec())
}

fn sc(vars: &VarSet, text: &str) -> Scalar {
    parse_scalar(text, vars).expect("builtin scalar expression")
}

/// A = polynomials in x, y; free 1-forms dx, dy; flat connection; flip braiding.
pub fn classical_plane() -> CalculusSpec {
    let params = VarSet::new(Vec::<String>::new());
    let coords = VarSet::new(vec!["x", "y"]);
    let zero_a = AElem::zero(coords.clone());
    let one_a = AElem::one(coords.clone(), params.clone());
    let z = Scalar::zero(params.clone());
    let o = Scalar::one(params.clone());

    let mut wedge = vec![vec![vec![z.clone(); 1]; 2]; 2];
    wedge[0][1][0] = o.clone();
    wedge[1][0][0] = o.neg();

    let mut derivation = vec![vec![zero_a.clone(); 2]; 2];
    derivation[0][0] = one_a.clone(); // d x = dx
    derivation[1][1] = one_a.clone(); // d y = dy

    let mut sigma = vec![vec![vec![vec![zero_a.clone(); 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            sigma[i][j][j][i] = one_a.clone();
        }
    }

    let spec = CalculusSpec {
        params,
        omega1_names: vec!["dx".into(), "dy".into()],
        omega2_names: vec!["dx^dy".into()],
        vec_names: vec!["Dx".into(), "Dy".into()],
        algebra: CoeffAlgebra::Polynomial {
            coords,
            derivation,
        },
        wedge,
        d1: vec![vec![z.clone(); 1]; 2],
        christoffel: Some(vec![vec![vec![zero_a.clone(); 2]; 2]; 2]),
        sigma_inv: Some(sigma),
        j_matrix: None,
    };
    spec.validate().expect("classical plane is well formed");
    spec
}

/// A = polynomials in z, zb over Q(i); J dz = i dz, J dzb = -i dzb;
/// flat connection; flip braiding.
pub fn classical_complex_plane() -> CalculusSpec {
    let params = VarSet::new(Vec::<String>::new());
    let coords = VarSet::new(vec!["z", "zb"]);
    let zero_a = AElem::zero(coords.clone());
    let one_a = AElem::one(coords.clone(), params.clone());
    let z = Scalar::zero(params.clone());
    let o = Scalar::one(params.clone());
    let iu = Scalar::i(params.clone());

    let mut wedge = vec![vec![vec![z.clone(); 1]; 2]; 2];
    wedge[0][1][0] = o.clone();
    wedge[1][0][0] = o.neg();

    let mut derivation = vec![vec![zero_a.clone(); 2]; 2];
    derivation[0][0] = one_a.clone();
    derivation[1][1] = one_a.clone();

    let mut sigma = vec![vec![vec![vec![zero_a.clone(); 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            sigma[i][j][j][i] = one_a.clone();
        }
    }

    let mut jm = vec![vec![z.clone(); 2]; 2];
    jm[0][0] = iu.clone();
    jm[1][1] = iu.neg();

    let spec = CalculusSpec {
        params,
        omega1_names: vec!["dz".into(), "dzb".into()],
        omega2_names: vec!["dz^dzb".into()],
        vec_names: vec!["Dz".into(), "Dzb".into()],
        algebra: CoeffAlgebra::Polynomial {
            coords,
            derivation,
        },
        wedge,
        d1: vec![vec![z.clone(); 1]; 2],
        christoffel: Some(vec![vec![vec![zero_a.clone(); 2]; 2]; 2]),
        sigma_inv: Some(sigma),
        j_matrix: Some(jm),
    };
    spec.validate().expect("complex plane is well formed");
    spec
}

/// Free connection parameters of the SU(2)_q family; all default to the
/// generic symbolic parameter of the same name.
#[derive(Clone, Debug)]
pub struct Su2qConnectionParams {
    pub r: Scalar,
    pub mu_p: Scalar,
    pub mu_m: Scalar,
    pub n_p: Scalar,
    pub n_m: Scalar,
    pub m_p: Scalar,
    pub m_m: Scalar,
}

impl Su2qConnectionParams {
    pub fn generic() -> Su2qConnectionParams {
        let v = su2q_params();
        Su2qConnectionParams {
            r: Scalar::param(&v, "r").unwrap(),
            mu_p: Scalar::param(&v, "mu_p").unwrap(),
            mu_m: Scalar::param(&v, "mu_m").unwrap(),
            n_p: Scalar::param(&v, "n_p").unwrap(),
            n_m: Scalar::param(&v, "n_m").unwrap(),
            m_p: Scalar::param(&v, "m_p").unwrap(),
            m_m: Scalar::param(&v, "m_m").unwrap(),
        }
    }
}

/// The left-invariant sector of Woronowicz's 3D calculus on quantum
/// SU(2), with the one-parameter-family connection. Basis order is
/// (e+, e0, e-) for 1-forms and (w0, w+, w-) = (e+^e-, e+^e0, e-^e0)
/// for 2-forms. No sigma^{-1} is provided: the paper's braiding for this
/// calculus lives in a reference that is out of scope here, so any
/// operation that genuinely needs it reports sigma_required.
pub fn su2q_3d(cp: &Su2qConnectionParams) -> CalculusSpec {
    let v = su2q_params();
    let z = Scalar::zero(v.clone());
    let ael = |s: &Scalar| AElem::from_scalar(VarSet::new(Vec::<String>::new()), s.clone());

    // e+=0, e0=1, e-=2; w0=0, w+=1, w-=2.
    let mut wedge = vec![vec![vec![z.clone(); 3]; 3]; 3];
    wedge[0][2][0] = sc(&v, "1"); // e+ ^ e- = w0
    wedge[2][0][0] = sc(&v, "-q^2"); // e- ^ e+ = -q^2 w0
    wedge[0][1][1] = sc(&v, "1"); // e+ ^ e0 = w+
    wedge[1][0][1] = sc(&v, "-q^4"); // e0 ^ e+ = -q^4 w+
    wedge[2][1][2] = sc(&v, "1"); // e- ^ e0 = w-
    wedge[1][2][2] = sc(&v, "-q^-4"); // e0 ^ e- = -q^-4 w-

    let mut d1 = vec![vec![z.clone(); 3]; 3];
    d1[1][0] = sc(&v, "q^3"); // d e0 = q^3 e+ ^ e-
    d1[0][1] = sc(&v, "-q^2*(1+q^-2)"); // d e+ = -q^2(1+q^-2) e+ ^ e0
    d1[2][2] = sc(&v, "q^-2*(1+q^-2)"); // d e- = q^-2(1+q^-2) e- ^ e0

    // square(e+) = n+ e0 (x) e+ + m+ e+ (x) e0, and cyclic data for e0, e-.
    let za = ael(&z);
    let mut gamma = vec![vec![vec![za.clone(); 3]; 3]; 3];
    gamma[0][1][0] = ael(&cp.n_p);
    gamma[0][0][1] = ael(&cp.m_p);
    gamma[1][1][1] = ael(&cp.r);
    gamma[1][0][2] = ael(&cp.mu_p);
    gamma[1][2][0] = ael(&cp.mu_m);
    gamma[2][1][2] = ael(&cp.n_m);
    gamma[2][2][1] = ael(&cp.m_m);

    let spec = CalculusSpec {
        params: v,
        omega1_names: vec!["e+".into(), "e0".into(), "e-".into()],
        omega2_names: vec!["w0".into(), "w+".into(), "w-".into()],
        vec_names: vec!["u+".into(), "u0".into(), "u-".into()],
        algebra: CoeffAlgebra::Constants,
        wedge,
        d1,
        christoffel: Some(gamma),
        sigma_inv: None,
        j_matrix: None,
    };
    spec.validate().expect("su2q calculus is well formed");
    spec
}

pub fn su2q_3d_generic() -> CalculusSpec {
    su2q_3d(&Su2qConnectionParams::generic())
}

/// The invariant sector of the standard Podles sphere calculus:
/// basis (e+, e-), e-^e+ = -q^2 e+^e-, d e± = 0, flat square, braiding
/// derived from the nice-connection construction, J e± = ±i e±.
pub fn podles_sphere() -> CalculusSpec {
    let v = VarSet::new(vec!["q"]);
    let z = Scalar::zero(v.clone());
    let coords = VarSet::new(Vec::<String>::new());
    let za = AElem::zero(coords.clone());
    let ael = |s: Scalar| AElem::from_scalar(coords.clone(), s);

    let mut wedge = vec![vec![vec![z.clone(); 1]; 2]; 2];
    wedge[0][1][0] = sc(&v, "1"); // e+ ^ e- generates Omega^2
    wedge[1][0][0] = sc(&v, "-q^2");

    let mut sigma = vec![vec![vec![vec![za.clone(); 2]; 2]; 2]; 2];
    sigma[0][1][1][0] = ael(sc(&v, "q^-2")); // sigma^{-1}(e+ (x) e-) = q^-2 e- (x) e+
    sigma[1][0][0][1] = ael(sc(&v, "q^2")); // sigma^{-1}(e- (x) e+) = q^2 e+ (x) e-

    let mut jm = vec![vec![z.clone(); 2]; 2];
    jm[0][0] = Scalar::i(v.clone());
    jm[1][1] = Scalar::i(v.clone()).neg();

    let spec = CalculusSpec {
        params: v,
        omega1_names: vec!["e+".into(), "e-".into()],
        omega2_names: vec!["w".into()],
        vec_names: vec!["v+".into(), "v-".into()],
        algebra: CoeffAlgebra::Constants,
        wedge,
        d1: vec![vec![z.clone(); 1]; 2],
        christoffel: Some(vec![vec![vec![za.clone(); 2]; 2]; 2]),
        sigma_inv: Some(sigma),
        j_matrix: Some(jm),
    };
    spec.validate().expect("podles calculus is well formed");
    spec
}

/// One zero-curvature case of the SU(2)_q connection family: a label and
/// the parameter bindings, with genuinely free parameters left unbound.
#[derive(Clone, Debug)]
pub struct FlatCase {
    pub label: &'static str,
    pub bindings: BTreeMap<String, Scalar>,
    /// Whether the bindings are expected to kill the curvature. Case (d)
    /// is encoded verbatim from its source, whose printed constraints
    /// are mutually inconsistent; the engine reports rather than patches.
    pub expect_flat: bool,
}

fn bind(v: &VarSet, pairs: &[(&str, &str)]) -> BTreeMap<String, Scalar> {
    pairs
        .iter()
        .map(|(k, e)| (k.to_string(), sc(v, e)))
        .collect()
}

/// The four zero-curvature cases, encoded verbatim. Products that only
/// constrain a pair of parameters are resolved by solving for one of the
/// pair, leaving the other free.
pub fn su2q_flat_cases() -> Vec<FlatCase> {
    let v = su2q_params();
    vec![
        FlatCase {
            label: "a",
            bindings: bind(
                &v,
                &[
                    ("r", "0"),
                    ("mu_p", "0"),
                    ("mu_m", "0"),
                    ("n_p", "0"),
                    ("n_m", "0"),
                    ("m_p", "0"),
                    ("m_m", "0"),
                ],
            ),
            expect_flat: true,
        },
        FlatCase {
            label: "b",
            // n- = -q^2(1+q^-2) = -mu+ m- q^-1, n+ = q^-2(1+q^-2) = q^-3 mu- m+, r = 0;
            // mu+ and mu- stay free.
            bindings: bind(
                &v,
                &[
                    ("r", "0"),
                    ("n_m", "-q^2*(1+q^-2)"),
                    ("n_p", "q^-2*(1+q^-2)"),
                    ("m_m", "(q^3+q)*mu_p^-1"),
                    ("m_p", "(q+q^-1)*mu_m^-1"),
                ],
            ),
            expect_flat: true,
        },
        FlatCase {
            label: "c",
            // n- = m- = mu+ = 0, n+ = q^-2 = q^-3 mu- m+, r = -1; mu- free.
            bindings: bind(
                &v,
                &[
                    ("n_m", "0"),
                    ("m_m", "0"),
                    ("mu_p", "0"),
                    ("n_p", "q^-2"),
                    ("m_p", "q*mu_m^-1"),
                    ("r", "-1"),
                ],
            ),
            expect_flat: true,
        },
        FlatCase {
            label: "d",
            // Verbatim: n+ = m+ = mu+ = 0, n- = -1, r = q^-2. The companion
            // constraint -1 = -mu+ m- q^-1 cannot hold with mu+ = 0, so
            // these bindings are not expected to be flat; see
            // su2q_case_d_corrected for the solved variant.
            bindings: bind(
                &v,
                &[
                    ("n_p", "0"),
                    ("m_p", "0"),
                    ("mu_p", "0"),
                    ("n_m", "-1"),
                    ("r", "q^-2"),
                ],
            ),
            expect_flat: false,
        },
    ]
}

/// The corrected case (d) bindings found by `solve_case_d`:
/// mu- = 0 instead of mu+ = 0, with mu+ m- = q.
pub fn su2q_case_d_corrected() -> FlatCase {
    let v = su2q_params();
    FlatCase {
        label: "d-corrected",
        bindings: bind(
            &v,
            &[
                ("n_p", "0"),
                ("m_p", "0"),
                ("mu_m", "0"),
                ("n_m", "-1"),
                ("r", "q^-2"),
                ("m_m", "q*mu_p^-1"),
            ],
        ),
        expect_flat: true,
    }
}

/// The seven consistency polynomials of the quantum SU(2) calculus as
/// displayed: substituting the matrix representation into the operator
/// relations must give zero exactly on the flat locus.
pub fn su2q_golden_consistency() -> Vec<Scalar> {
    let v = su2q_params();
    [
        "m_p*mu_m - n_p*q^3",
        "m_m*mu_p - m_p*mu_m*q^2 - q^3*r",
        "m_m*mu_p + n_m*q",
        "m_p*(-1 - q^2 + n_p*q^4 - r)",
        "mu_p*(1 + n_m + q^2 - q^4*r)",
        "mu_m*(-1 - q^2 + n_p*q^4 - r)",
        "m_m*(1 + n_m + q^2 - q^4*r)",
    ]
    .iter()
    .map(|t| sc(&v, t))
    .collect()
}

/// Derives the consistency equations by acting with each relation
/// generator on the 1-form module and collecting the nonzero matrix
/// entries. Nothing here is read off the displayed list; the relations
/// come from the curvature element and the action from the connection.
pub fn su2q_consistency_equations(spec: &CalculusSpec) -> Result<Vec<Scalar>, EngineError> {
    use crate::calculus::ModuleConnection;
    use crate::diffop::bullet::act;
    use crate::diffop::curvature::da_relations;
    let e_mod = ModuleConnection::omega1(spec)?;
    let rels = da_relations(spec)?;
    let mut out = Vec::new();
    for rel in &rels {
        for a in 0..e_mod.rank {
            let mut e = vec![spec.zero_a(); e_mod.rank];
            e[a] = spec.one_a();
            let img = act(spec, &e_mod, rel, &e)?;
            for val in img {
                if let Some(s) = val.constant_scalar(&spec.params) {
                    if !s.is_zero() {
                        out.push(s);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether `derived` equals `golden` up to ordering and multiplication
/// by nonzero elements of Q(i)(q) (scalars free of the connection
/// parameters), matched bijectively.
pub fn consistency_sets_match(derived: &[Scalar], golden: &[Scalar]) -> bool {
    if derived.len() != golden.len() {
        return false;
    }
    let q_only = |s: &Scalar| -> bool {
        let check = |p: &crate::scalar::MultiPoly| {
            p.terms.keys().all(|m| m.0.iter().skip(1).all(|&e| e == 0))
        };
        check(&s.num) && check(&s.den)
    };
    let mut used = vec![false; golden.len()];
    for d in derived {
        let mut matched = false;
        for (j, g) in golden.iter().enumerate() {
            if used[j] || g.is_zero() {
                continue;
            }
            let Ok(ratio) = d.div(g) else { continue };
            if !ratio.is_zero() && q_only(&ratio) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}

/// Exact search for corrected case-(d) bindings: keep the verbatim
/// explicit assignments n+ = m+ = 0, n- = -1, r = q^-2, then solve the
/// curvature-vanishing system over the remaining parameters by trying
/// which of them must vanish and solving the surviving equations, each
/// linear in a single parameter, by exact division.
pub fn su2q_case_d_search() -> Result<Vec<FlatCase>, EngineError> {
    use crate::calculus::ops::module_curvature;
    use crate::calculus::ModuleConnection;
    let v = su2q_params();
    let base: Vec<(&str, &str)> = vec![("n_p", "0"), ("m_p", "0"), ("n_m", "-1"), ("r", "q^-2")];
    let free = ["mu_p", "mu_m", "m_m"];
    let mut solutions: Vec<FlatCase> = Vec::new();
    for mask in 0..(1u32 << free.len()) {
        let mut bindings = bind(&v, &base);
        let mut remaining: Vec<&str> = Vec::new();
        for (bit, name) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                bindings.insert(name.to_string(), Scalar::zero(v.clone()));
            } else {
                remaining.push(name);
            }
        }
        let residuals = |b: &BTreeMap<String, Scalar>| -> Result<Vec<Scalar>, EngineError> {
            let spec = su2q_3d_generic().substitute(b)?;
            let e_mod = ModuleConnection::omega1(&spec)?;
            let mut out = Vec::new();
            for a in 0..3 {
                let mut e = vec![spec.zero_a(); 3];
                e[a] = spec.one_a();
                let r = module_curvature(&spec, &e_mod, &e);
                for c in r.comps.values() {
                    if let Some(s) = c.constant_scalar(&spec.params) {
                        if !s.is_zero() {
                            out.push(s);
                        }
                    }
                }
            }
            Ok(out)
        };
        let res = residuals(&bindings)?;
        if res.is_empty() {
            solutions.push(FlatCase {
                label: "d-solved",
                bindings,
                expect_flat: true,
            });
            continue;
        }
        // Try to finish by solving every residual for one remaining
        // parameter; all residuals must agree on its value. Later
        // parameters are preferred as the solved one, keeping the
        // earlier ones free.
        'solve: for target in remaining.iter().rev() {
            let tvar = Scalar::param(&v, target).unwrap();
            let mut value: Option<Scalar> = None;
            for r in &res {
                // r = a*t + b exactly when r is degree <= 1 in t
                let zero_t = r
                    .substitute(&[(target.to_string(), Scalar::zero(v.clone()))].into())
                    .ok();
                let one_t = r
                    .substitute(&[(target.to_string(), Scalar::one(v.clone()))].into())
                    .ok();
                let (Some(b), Some(ab)) = (zero_t, one_t) else {
                    continue 'solve;
                };
                let a = ab.sub(&b);
                // verify linearity
                let two_t = r
                    .substitute(&[(target.to_string(), Scalar::from_int(v.clone(), 2))].into());
                let Ok(two_t) = two_t else { continue 'solve };
                if two_t != a.mul(&Scalar::from_int(v.clone(), 2)).add(&b) {
                    continue 'solve;
                }
                if a.is_zero() {
                    if b.is_zero() {
                        continue;
                    }
                    continue 'solve;
                }
                let cand = b.div(&a).map(|x| x.neg());
                let Ok(cand) = cand else { continue 'solve };
                match &value {
                    None => value = Some(cand),
                    Some(vv) if *vv == cand => {}
                    _ => continue 'solve,
                }
            }
            let Some(val) = value else { continue };
            if val == tvar {
                continue;
            }
            let mut b2 = bindings.clone();
            b2.insert(target.to_string(), val);
            if residuals(&b2)?.is_empty() {
                solutions.push(FlatCase {
                    label: "d-solved",
                    bindings: b2,
                    expect_flat: true,
                });
                break 'solve;
            }
        }
    }
    // Keep minimal solutions (fewest forced-zero parameters).
    solutions.sort_by_key(|s| {
        s.bindings
            .values()
            .filter(|b| b.is_zero())
            .count()
    });
    Ok(solutions)
}

/// The 3x3 matrices for the action of u+, u0, u- on the 1-form basis
/// (e+, e0, e-) by right multiplication on column vectors, read off the
/// connection family: M[c][b][a] is the e_b coefficient of u_c acting
/// on e_a.
pub fn su2q_matrix_rep(spec: &CalculusSpec) -> Result<Vec<Matrix>, EngineError> {
    let gamma = spec.christoffel_ref()?;
    let n1 = spec.n1();
    let mut out = Vec::with_capacity(n1);
    for c in 0..n1 {
        let mut m = Matrix::zero(&spec.params, n1, n1);
        for a in 0..n1 {
            for b in 0..n1 {
                m.data[b][a] = gamma[a][c][b]
                    .constant_scalar(&spec.params)
                    .ok_or_else(|| {
                        EngineError::InvalidSpec(
                            "matrix representation needs constant connection coefficients".into(),
                        )
                    })?;
            }
        }
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ops::module_curvature;
    use crate::calculus::ModuleConnection;

    #[test]
    fn consistency_equations_match_golden() {
        let spec = su2q_3d_generic();
        let derived = su2q_consistency_equations(&spec).unwrap();
        let golden = su2q_golden_consistency();
        assert_eq!(derived.len(), 7);
        assert!(consistency_sets_match(&derived, &golden));
        // and not against a corrupted list
        let mut bad = golden.clone();
        bad[0] = bad[0].add(&Scalar::one(su2q_params()));
        assert!(!consistency_sets_match(&derived, &bad));
    }

    #[test]
    fn flat_cases_zero_all_consistency_equations() {
        let golden = su2q_golden_consistency();
        let mut cases: Vec<FlatCase> = su2q_flat_cases()
            .into_iter()
            .filter(|c| c.expect_flat)
            .collect();
        cases.push(su2q_case_d_corrected());
        for case in cases {
            for g in &golden {
                assert!(
                    g.substitute(&case.bindings).unwrap().is_zero(),
                    "case {} leaves a consistency equation nonzero",
                    case.label
                );
            }
        }
        // The verbatim case (d) fails at least one equation.
        let verbatim = &su2q_flat_cases()[3];
        let residual: Vec<Scalar> = golden
            .iter()
            .map(|g| g.substitute(&verbatim.bindings).unwrap())
            .filter(|s| !s.is_zero())
            .collect();
        assert!(!residual.is_empty());
    }

    #[test]
    fn case_d_search_recovers_corrected_binding() {
        let sols = su2q_case_d_search().unwrap();
        assert!(!sols.is_empty());
        let corrected = su2q_case_d_corrected();
        let spec = su2q_3d_generic();
        let expect = spec.substitute(&corrected.bindings).unwrap();
        assert!(sols.iter().any(|s| {
            spec.substitute(&s.bindings).map(|got| got == expect).unwrap_or(false)
        }));
        // every reported solution really is flat
        for s in &sols {
            let sub = spec.substitute(&s.bindings).unwrap();
            let e_mod = ModuleConnection::omega1(&sub).unwrap();
            for a in 0..3 {
                let mut e = vec![sub.zero_a(); 3];
                e[a] = sub.one_a();
                assert!(module_curvature(&sub, &e_mod, &e).is_zero());
            }
        }
    }

    #[test]
    fn perturbed_case_b_is_not_flat() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let v = su2q_params();
        let spec = su2q_3d_generic();
        let mut rng = StdRng::seed_from_u64(61);
        let bound = ["r", "n_m", "n_p", "m_m", "m_p"];
        for trial in 0..20 {
            let mut b = su2q_flat_cases()[1].bindings.clone();
            // pin the free parameters to nonzero rationals
            b.insert("mu_p".into(), Scalar::from_int(v.clone(), rng.random_range(1..6)));
            b.insert("mu_m".into(), Scalar::from_int(v.clone(), rng.random_range(1..6)));
            let b: BTreeMap<String, Scalar> = b
                .into_iter()
                .map(|(k, s)| (k.clone(), s.substitute(&BTreeMap::new()).unwrap().substitute(&{
                    let mut m = BTreeMap::new();
                    m.insert("mu_p".to_string(), Scalar::from_int(v.clone(), 2));
                    m.insert("mu_m".to_string(), Scalar::from_int(v.clone(), 3));
                    m
                }).unwrap()))
                .collect();
            let _ = trial;
            // perturb one bound parameter by a nonzero rational
            let which = bound[rng.random_range(0..bound.len())];
            let mut pert = b.clone();
            let eps = Scalar::from_int(v.clone(), rng.random_range(1..5));
            pert.insert(which.to_string(), b[which].add(&eps));
            let sub = spec.substitute(&pert).unwrap();
            let e_mod = ModuleConnection::omega1(&sub).unwrap();
            let mut nonzero = false;
            for a in 0..3 {
                let mut e = vec![sub.zero_a(); 3];
                e[a] = sub.one_a();
                if !module_curvature(&sub, &e_mod, &e).is_zero() {
                    nonzero = true;
                }
            }
            assert!(nonzero, "perturbing {} left the connection flat", which);
        }
    }
}
