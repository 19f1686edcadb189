//! Acceptance battery: every check is exact equality in the normalised
//! scalar representation. One pass/fail line is printed per criterion.

use ncdiffop::aelem::{parse_aelem, AElem};
use ncdiffop::calculus::ops::module_curvature;
use ncdiffop::calculus::{CalculusSpec, ModuleConnection, SigmaE, Slot, TensorField};
use ncdiffop::diffop::bullet::{act, bullet};
use ncdiffop::diffop::curvature::{da_relations, phi, wedge_splitting, wedge_splitting_alt};
use ncdiffop::diffop::theta::{theta_product_law_holds, theta_relation_check};
use ncdiffop::diffop::DiffOp;
use ncdiffop::library::*;
use ncdiffop::scalar::{parse_scalar, Scalar};
use ncdiffop::verify::{self, Sampler, Suite};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

fn ae(spec: &CalculusSpec, text: &str) -> AElem {
    parse_aelem(text, &spec.params, &spec.coords()).unwrap()
}

fn sc(spec: &CalculusSpec, text: &str) -> Scalar {
    parse_scalar(text, &spec.params).unwrap()
}

fn op(spec: &CalculusSpec, parts: &[(&[usize], &str)]) -> DiffOp {
    let mut o = DiffOp::zero();
    for (idx, c) in parts {
        let mut t = TensorField::zero(vec![Slot::Vec1; idx.len()]);
        t.add_term(idx.to_vec(), ae(spec, c));
        o.add_part(t);
    }
    o
}

fn pass(n: usize, what: &str) {
    println!("criterion {:>2}: PASS - {}", n, what);
}

/// Relations of the quantum SU(2) sheaf: the three displayed relations,
/// including the connection-dependent grade-1 corrections, derived from
/// the curvature element (the phi-bracket cross-check runs inside
/// da_relations).
#[test]
fn criterion_01_su2q_relations() {
    let spec = su2q_3d_generic();
    let rels = da_relations(&spec).unwrap();
    assert_eq!(rels.len(), 3);
    // q^3 u0 = u- . u+ - q^2 u+ . u-, with u_j . u_i expanded into
    // tensor and derivative parts of the connection family.
    let expect = [
        op(
            &spec,
            &[
                (&[1], "q^3 + mu_p - q^2*mu_m"),
                (&[2, 0], "-1"),
                (&[0, 2], "q^2"),
            ],
        ),
        op(
            &spec,
            &[
                (&[0], "-q^2*(1+q^-2) + m_p - q^4*n_p"),
                (&[1, 0], "-1"),
                (&[0, 1], "q^4"),
            ],
        ),
        op(
            &spec,
            &[
                (&[2], "q^-2*(1+q^-2) + m_m - q^-4*n_m"),
                (&[1, 2], "-1"),
                (&[2, 1], "q^-4"),
            ],
        ),
    ];
    for (got, want) in rels.iter().zip(&expect) {
        assert_eq!(got, want);
    }
    pass(1, "su2q relations match the displayed q-deformed enveloping relations");
}

/// The curvature of the connection family on the 1-forms, coefficient
/// by coefficient against the displayed formulas.
#[test]
fn criterion_02_curvature_family() {
    let spec = su2q_3d_generic();
    let e_mod = ModuleConnection::omega1(&spec).unwrap();
    let expected: Vec<(usize, usize, usize, Scalar)> = vec![
        (0, 0, 0, sc(&spec, "n_p*q^3 - mu_m*m_p")),
        (0, 1, 1, sc(&spec, "m_p*(-q^2*(1+q^-2) + n_p*q^4 - r)")),
        (2, 0, 2, sc(&spec, "n_m*q^3 + q^2*mu_p*m_m")),
        (2, 2, 1, sc(&spec, "m_m*(q^-2*(1+q^-2) + n_m*q^-4 - r)")),
        (1, 0, 1, sc(&spec, "r*q^3 - mu_p*m_m + mu_m*m_p*q^2")),
        (1, 1, 2, sc(&spec, "mu_p*(-q^2*(1+q^-2) + r*q^4 - n_m)")),
        (1, 2, 0, sc(&spec, "mu_m*(q^-2*(1+q^-2) + r*q^-4 - n_p)")),
    ];
    let mut want = vec![
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
    ];
    for (a, k, b, c) in expected {
        want[a].add_term(vec![k, b], spec.scalar_a(c));
    }
    for a in 0..3 {
        let mut e = vec![spec.zero_a(); 3];
        e[a] = spec.one_a();
        assert_eq!(module_curvature(&spec, &e_mod, &e), want[a]);
    }
    pass(2, "curvature family reproduces all displayed coefficients exactly");
}

fn curvature_is_zero(spec: &CalculusSpec) -> bool {
    let e_mod = ModuleConnection::omega1(spec).unwrap();
    (0..spec.n1()).all(|a| {
        let mut e = vec![spec.zero_a(); spec.n1()];
        e[a] = spec.one_a();
        module_curvature(spec, &e_mod, &e).is_zero()
    })
}

/// Zero-curvature classification: cases (a), (b), (c) vanish under
/// substitution; the verbatim case (d) is evaluated and its failure
/// reported (its printed constraints are inconsistent); the corrected
/// binding found by exact solving is flat; and random perturbations of
/// case (b) are never flat.
#[test]
fn criterion_03_zero_curvature_classification() {
    let spec = su2q_3d_generic();
    let cases = su2q_flat_cases();
    for case in &cases[..3] {
        assert!(case.expect_flat);
        let sub = spec.substitute(&case.bindings).unwrap();
        assert!(curvature_is_zero(&sub), "case {} must be flat", case.label);
    }
    // case (d) verbatim: evaluated and reported, not patched
    let verbatim = &cases[3];
    let sub = spec.substitute(&verbatim.bindings).unwrap();
    let flat = curvature_is_zero(&sub);
    println!(
        "criterion  3: case (d) verbatim bindings -> {} (documented expectation: not flat)",
        if flat { "flat" } else { "NOT flat" }
    );
    assert!(!flat);
    assert!(!verbatim.expect_flat);
    // the corrected binding discovered by the solver is flat
    let solved = su2q_case_d_search().unwrap();
    assert!(!solved.is_empty());
    let corrected = su2q_case_d_corrected();
    let expect_spec = spec.substitute(&corrected.bindings).unwrap();
    assert!(curvature_is_zero(&expect_spec));
    assert!(solved.iter().any(|s| spec
        .substitute(&s.bindings)
        .map(|g| g == expect_spec)
        .unwrap_or(false)));
    // 20 random rational perturbations of case (b) are each non-flat
    let mut rng = StdRng::seed_from_u64(101);
    let v = su2q_params();
    let bound = ["r", "n_m", "n_p", "m_m", "m_p"];
    for _ in 0..20 {
        let mut b = cases[1].bindings.clone();
        let mut pin = BTreeMap::new();
        pin.insert(
            "mu_p".to_string(),
            Scalar::from_int(v.clone(), rng.random_range(1..7)),
        );
        pin.insert(
            "mu_m".to_string(),
            Scalar::from_int(v.clone(), rng.random_range(1..7)),
        );
        let mut full: BTreeMap<String, Scalar> = b
            .iter()
            .map(|(k, s)| (k.clone(), s.substitute(&pin).unwrap()))
            .collect();
        full.extend(pin.clone());
        let which = bound[rng.random_range(0..bound.len())];
        let eps = Scalar::from_int(v.clone(), rng.random_range(1..5));
        let cur = full[which].clone();
        full.insert(which.to_string(), cur.add(&eps));
        let sub = spec.substitute(&full).unwrap();
        assert!(!curvature_is_zero(&sub));
        b.clear();
    }
    pass(3, "flat cases (a)-(c) vanish, verbatim (d) reported, perturbations curve");
}

/// Deriving the matrix-representation constraints from the relations
/// reproduces the seven displayed polynomials up to ordering and
/// nonzero q-scalar multiples, and their zero set contains every flat
/// case.
#[test]
fn criterion_04_consistency_equations() {
    let spec = su2q_3d_generic();
    let derived = su2q_consistency_equations(&spec).unwrap();
    let golden = su2q_golden_consistency();
    assert_eq!(derived.len(), 7);
    assert!(consistency_sets_match(&derived, &golden));
    let mut cases: Vec<FlatCase> = su2q_flat_cases()
        .into_iter()
        .filter(|c| c.expect_flat)
        .collect();
    cases.push(su2q_case_d_corrected());
    for case in &cases {
        for d in &derived {
            assert!(
                d.substitute(&case.bindings).unwrap().is_zero(),
                "case {} violates a derived consistency equation",
                case.label
            );
        }
    }
    pass(4, "derived consistency equations equal the golden seven; flat cases satisfy them");
}

/// The curvature element acts as the module curvature, on the flat
/// classical plane and on the non-flat generic su2q family.
#[test]
fn criterion_05_curvature_as_operator() {
    for spec in [classical_plane(), su2q_3d_generic()] {
        let report = verify::run_suite(&spec, Suite::CurvatureOp).unwrap();
        assert!(report.passed(), "curvature-op fails on {:?}", spec.omega1_names);
    }
    pass(5, "R |> e = R_E(e) exactly on the classical plane and generic su2q");
}

/// Independent classical oracle: a tensor component acts by iterated
/// partial derivatives, rightmost factor first.
fn classical_eval(spec: &CalculusSpec, v: &DiffOp, f: &AElem) -> AElem {
    let mut out = spec.zero_a();
    for tf in v.parts.values() {
        for (idx, c) in &tf.comps {
            let mut g = f.clone();
            for &i in idx.iter().rev() {
                g = g.derivative(i, &spec.params);
            }
            out = out.add(&c.mul(&g));
        }
    }
    out
}

#[test]
fn criterion_06_classical_sanity() {
    let spec = classical_plane();
    let rels = da_relations(&spec).unwrap();
    assert_eq!(rels.len(), 1);
    // the commutator relation, in the R_hat(alpha) orientation
    let expect = op(&spec, &[(&[0, 1], "1"), (&[1, 0], "-1")]);
    assert_eq!(rels[0], expect);
    let mut s = Sampler::new(606);
    let mut rng = StdRng::seed_from_u64(607);
    for _ in 0..20 {
        let v = s.diffop(&spec, 2);
        let w = s.diffop(&spec, 2);
        let vw = bullet(&spec, &v, &w).unwrap();
        for _ in 0..20 {
            let mut f = spec.zero_a();
            for _ in 0..4 {
                let c = rng.random_range(-4_i64..=4);
                let mut term = spec.scalar_a(Scalar::from_int(spec.params.clone(), c));
                for _ in 0..rng.random_range(0..=4u32) {
                    let x = rng.random_range(0..2usize);
                    term = term.mul(&AElem::coordinate(
                        spec.coords(),
                        spec.params.clone(),
                        x,
                    ));
                }
                f = f.add(&term);
            }
            let lhs = classical_eval(&spec, &vw, &f);
            let rhs = classical_eval(&spec, &v, &classical_eval(&spec, &w, &f));
            assert_eq!(lhs, rhs);
        }
    }
    pass(6, "classical relations and 400 composed-operator oracle evaluations agree");
}

#[test]
fn criterion_07_algebra_laws() {
    for spec in [classical_plane(), classical_complex_plane()] {
        let assoc = verify::associativity_suite(&spec, 50).unwrap();
        assert!(assoc.passed());
        assert!(assoc.checks.len() >= 50);
        let action = verify::action_suite(&spec, 50).unwrap();
        assert!(action.passed());
        assert!(action.checks.len() >= 50);
    }
    pass(7, "bullet associativity and the action law hold on both classical backends");
}

#[test]
fn criterion_08_flat_module_action() {
    // Every relation annihilates flat modules, and a curving rank-1
    // module is detected, on every built-in with a connection.
    for spec in [classical_plane(), classical_complex_plane(), su2q_3d_generic()] {
        let report = verify::run_suite(&spec, Suite::RelationsAnnihilate).unwrap();
        assert!(report.passed());
    }
    // The su2q relations annihilate the flat case-(b) connection on the
    // 1-forms as well.
    let spec = su2q_3d_generic();
    let flat = spec.substitute(&su2q_flat_cases()[1].bindings).unwrap();
    let rels = da_relations(&flat).unwrap();
    let e_mod = ModuleConnection::omega1(&flat).unwrap();
    for rel in &rels {
        for a in 0..3 {
            let mut e = vec![flat.zero_a(); 3];
            e[a] = flat.one_a();
            assert!(act(&flat, &e_mod, rel, &e)
                .unwrap()
                .iter()
                .all(|x| x.is_zero()));
        }
    }
    // ...and fail against the generic (curving) connection.
    let rels = da_relations(&spec).unwrap();
    let e_mod = ModuleConnection::omega1(&spec).unwrap();
    let mut detected = false;
    for rel in &rels {
        for a in 0..3 {
            let mut e = vec![spec.zero_a(); 3];
            e[a] = spec.one_a();
            if !act(&spec, &e_mod, rel, &e).unwrap().iter().all(|x| x.is_zero()) {
                detected = true;
            }
        }
    }
    assert!(detected);
    pass(8, "relations annihilate flat connections and detect curving ones");
}

#[test]
fn criterion_09_crossing_map() {
    let spec = classical_plane();
    let e_mod = ModuleConnection::omega1(&spec)
        .unwrap()
        .with_sigma(SigmaE::flip(&spec, 2));
    let mut s = Sampler::new(909);
    for _ in 0..20 {
        let u = s.diffop(&spec, 2);
        let v = s.diffop(&spec, 2);
        let e = s.module_elem(&spec, 2);
        assert!(theta_product_law_holds(&spec, &e_mod, &u, &v, &e).unwrap());
    }
    assert!(theta_relation_check(&spec, &e_mod).unwrap());
    pass(9, "crossing-map product law (20 instances) and ideal stability to grade 3");
}

#[test]
fn criterion_10_complex_layer() {
    use ncdiffop::complex::holo::{holo_op_tests, holo_vec_check, partial_iter, partial_iter_factored};
    use ncdiffop::complex::{check_nice_properties, decompose};
    for spec in [classical_complex_plane(), podles_sphere()] {
        let dec = decompose(&spec).unwrap();
        check_nice_properties(&spec, &dec).unwrap();
    }
    // holomorphic vector field test against the classical oracle
    let spec = classical_complex_plane();
    let mut rng = StdRng::seed_from_u64(1010);
    let mut tested = 0;
    while tested < 20 {
        let mut f = spec.zero_a();
        for _ in 0..3 {
            let c = rng.random_range(-3_i64..=3);
            let mut term = spec.scalar_a(Scalar::from_int(spec.params.clone(), c));
            for _ in 0..rng.random_range(0..3u32) {
                let x = rng.random_range(0..2usize);
                term = term.mul(&AElem::coordinate(spec.coords(), spec.params.clone(), x));
            }
            f = f.add(&term);
        }
        if f.is_zero() {
            continue;
        }
        let oracle = f.derivative(1, &spec.params).is_zero();
        let mut v = TensorField::zero(vec![Slot::Vec1]);
        v.add_term(vec![0], f);
        assert_eq!(holo_vec_check(&spec, &v).unwrap(), oracle);
        tested += 1;
    }
    // factorisation of the holomorphic derivative for n <= 3
    let e_a = ModuleConnection::trivial_line(&spec);
    let mut s = Sampler::new(1011);
    for n in 1..=3 {
        for _ in 0..4 {
            let e = [s.poly(&spec, 3)];
            assert_eq!(
                partial_iter(&spec, &e_a, n, &e).unwrap(),
                partial_iter_factored(&spec, &e_a, n, &e).unwrap()
            );
        }
    }
    // holomorphic closure and the action identity
    let report = holo_op_tests(&spec, 20).unwrap();
    assert!(report.closure_checked >= 20);
    assert!(report.action_checked >= 20);
    pass(10, "nice-connection conclusions, holomorphy oracle, factorisation, closure");
}

#[test]
fn criterion_11_newlander_nirenberg() {
    use ncdiffop::complex::holo::nn_bracket_check;
    let spec = classical_complex_plane();
    let mut rng = StdRng::seed_from_u64(1111);
    for _ in 0..20 {
        let mut mono = |rng: &mut StdRng| {
            let mut t = spec.one_a();
            for _ in 0..rng.random_range(0..3u32) {
                t = t.mul(&AElem::coordinate(spec.coords(), spec.params.clone(), 0));
            }
            t.scale(&Scalar::from_int(
                spec.params.clone(),
                rng.random_range(1..=4),
            ))
        };
        let f = mono(&mut rng);
        let g = mono(&mut rng);
        let mut u = TensorField::zero(vec![Slot::Vec1]);
        u.add_term(vec![0], f);
        let mut v = TensorField::zero(vec![Slot::Vec1]);
        v.add_term(vec![0], g);
        let pairs = [(u.clone(), v.clone()), (v.clone().neg(), u.clone())];
        assert!(nn_bracket_check(&spec, &pairs).unwrap());
    }
    pass(11, "phi of 20 antisymmetric (1,0)-tensors lands in Vec^{1,0}");
}

#[test]
fn criterion_12_symbols() {
    let spec = su2q_3d_generic();
    let rels = da_relations(&spec).unwrap();
    // the displayed symbol relations, oriented as R_hat(alpha_k)
    let displays = [
        op(&spec, &[(&[2, 0], "1"), (&[0, 2], "-q^2")]),
        op(&spec, &[(&[1, 0], "1"), (&[0, 1], "-q^4")]),
        op(&spec, &[(&[1, 2], "1"), (&[2, 1], "-q^-4")]),
    ];
    for (rel, disp) in rels.iter().zip(&displays) {
        let sym = DiffOp::from_part(rel.symbol().unwrap());
        assert_eq!(sym, disp.neg());
    }
    // multiplicativity on 50 random pairs over both classical backends
    for spec in [classical_plane(), classical_complex_plane()] {
        let report = verify::symbols_suite(&spec, 50).unwrap();
        assert!(report.passed());
        assert!(report.checks.len() >= 45);
    }
    pass(12, "su2q relation symbols match the displayed tensors; symbol is multiplicative");
}

/// The full verify battery over every built-in calculus, as the front
/// end would run it: capability errors are only acceptable where the
/// calculus genuinely lacks the data.
#[test]
fn verify_suites_over_builtins() {
    use ncdiffop::error::EngineError;
    let expect_capability_gap = |spec: &CalculusSpec, suite: Suite| -> bool {
        let su2q = spec.params == su2q_params();
        match suite {
            // su2q ships without a braiding; these suites take bullet
            // products of grade-2 operators and need it
            Suite::Associativity | Suite::Action | Suite::Theta | Suite::Symbols => su2q,
            Suite::Complex => spec.j_matrix.is_none(),
            Suite::Su2qConsistency => !su2q,
            _ => false,
        }
    };
    for spec in [
        classical_plane(),
        classical_complex_plane(),
        su2q_3d_generic(),
        podles_sphere(),
    ] {
        for suite in Suite::all() {
            match verify::run_suite(&spec, *suite) {
                Ok(report) => {
                    assert!(
                        report.passed(),
                        "suite {} fails on {:?}",
                        suite.name(),
                        spec.omega1_names
                    );
                }
                Err(
                    EngineError::SigmaRequired
                    | EngineError::SigmaERequired
                    | EngineError::CapabilityMissing(_),
                ) => {
                    assert!(
                        expect_capability_gap(&spec, *suite),
                        "unexpected capability gap in {} on {:?}",
                        suite.name(),
                        spec.omega1_names
                    );
                }
                Err(EngineError::InvalidSpec(_)) if *suite == Suite::Su2qConsistency => {
                    assert!(expect_capability_gap(&spec, *suite));
                }
                Err(e) => panic!("suite {} errored: {}", suite.name(), e),
            }
        }
    }
}
