use super::holo::*;
use super::*;
use crate::aelem::{parse_aelem, AElem};
use crate::calculus::ops::sigma_inv_apply;
use crate::calculus::{CoeffAlgebra, ModuleConnection};
use crate::diffop::bullet::{act, bullet};
use crate::diffop::{DiffOp, SectorOp};
use crate::library::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn ae(spec: &CalculusSpec, text: &str) -> AElem {
    parse_aelem(text, &spec.params, &spec.coords()).unwrap()
}

fn vtf(spec: &CalculusSpec, idx: &[usize], coeff: &str) -> TensorField {
    let mut t = TensorField::zero(vec![Slot::Vec1; idx.len()]);
    t.add_term(idx.to_vec(), ae(spec, coeff));
    t
}

#[test]
fn decompose_complex_plane() {
    let spec = classical_complex_plane();
    let dec = decompose(&spec).unwrap();
    // p10 projects onto dz
    let one = Scalar::one(spec.params.clone());
    assert_eq!(dec.p10.data[0][0], one);
    assert!(dec.p10.data[1][1].is_zero());
    assert!(dec.p01.data[0][0].is_zero());
    assert_eq!(dec.p01.data[1][1], one);
    // complementary idempotents
    assert_eq!(dec.p10.mul(&dec.p10), dec.p10);
    assert!(dec.p10.mul(&dec.p01).is_zero());
    assert_eq!(dec.p10.add(&dec.p01), Matrix::identity(&spec.params, 2));
    // the single 2-form is of type (1,1)
    assert_eq!(dec.pi11, Matrix::identity(&spec.params, 1));
    assert!(dec.pi20.is_zero() && dec.pi02.is_zero());
    assert!(integrable(&spec).unwrap());
}

#[test]
fn decompose_errors_without_j() {
    let spec = su2q_3d_generic();
    assert!(matches!(
        decompose(&spec),
        Err(EngineError::CapabilityMissing("J"))
    ));
}

#[test]
fn decompose_podles() {
    let spec = podles_sphere();
    let dec = decompose(&spec).unwrap();
    // Omega^{1,0} = span e+, Omega^{0,1} = span e-
    assert_eq!(dec.p10.data[0][0], Scalar::one(spec.params.clone()));
    assert!(dec.p10.data[1][1].is_zero());
    assert!(integrable(&spec).unwrap());
}

#[test]
fn nice_connection_complex_plane() {
    let spec = classical_complex_plane();
    let mut bare = spec.clone();
    bare.christoffel = None;
    bare.sigma_inv = None;
    let pair = HoloConnectionPair::flat_flip(&bare);
    let nice = nice_connection(&bare, &pair).unwrap();
    // flat square and flip braiding reproduce the built-in calculus
    assert_eq!(nice.christoffel, spec.christoffel);
    assert_eq!(nice.sigma_inv, spec.sigma_inv);
}

#[test]
fn nice_connection_podles_derives_braiding() {
    let spec = podles_sphere();
    let mut bare = spec.clone();
    bare.christoffel = None;
    bare.sigma_inv = None;
    let pair = HoloConnectionPair::zero(&bare);
    let nice = nice_connection(&bare, &pair).unwrap();
    // square(e+-) = 0 and the q-deformed flip derived from condition (iii)
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert!(nice.christoffel.as_ref().unwrap()[k][i][j].is_zero());
            }
        }
    }
    assert_eq!(nice.sigma_inv, spec.sigma_inv);
}

#[test]
fn nice_connection_conclusions_on_builtins() {
    for spec in [classical_complex_plane(), podles_sphere()] {
        let dec = decompose(&spec).unwrap();
        check_nice_properties(&spec, &dec).unwrap();
    }
}

#[test]
fn holo_vec_check_examples() {
    let spec = classical_complex_plane();
    // z Dz is holomorphic
    assert!(holo_vec_check(&spec, &vtf(&spec, &[0], "z")).unwrap());
    // zb Dz is not: (pi01 (x) id) square(zb Dz) = dzb (x) Dz
    assert!(!holo_vec_check(&spec, &vtf(&spec, &[0], "zb")).unwrap());
    // Dzb is outside the (1,0)-sector
    assert!(matches!(
        holo_vec_check(&spec, &vtf(&spec, &[1], "1")),
        Err(EngineError::NotInSector)
    ));
    // Podles: square = 0, so v+ is holomorphic
    let podles = podles_sphere();
    assert!(holo_vec_check(&podles, &vtf(&podles, &[0], "1")).unwrap());
}

#[test]
fn holo_vec_check_matches_classical_oracle() {
    // The classical oracle: f(z, zb) Dz preserves holomorphy iff f has no
    // zb dependence.
    let spec = classical_complex_plane();
    let mut rng = StdRng::seed_from_u64(43);
    let coords = spec.coords();
    for _ in 0..20 {
        let mut f = spec.zero_a();
        for _ in 0..3 {
            let c = rng.random_range(-2_i64..=2);
            if c == 0 {
                continue;
            }
            let mut term = spec.scalar_a(Scalar::from_int(spec.params.clone(), c));
            for _ in 0..rng.random_range(0..3u32) {
                let v = rng.random_range(0..2);
                term = term.mul(&AElem::coordinate(coords.clone(), spec.params.clone(), v));
            }
            f = f.add(&term);
        }
        if f.is_zero() {
            continue;
        }
        let zb_free = f.derivative(1, &spec.params).is_zero();
        let mut v = TensorField::zero(vec![Slot::Vec1]);
        v.add_term(vec![0], f);
        assert_eq!(holo_vec_check(&spec, &v).unwrap(), zb_free);
    }
}

#[test]
fn nn_bracket_examples() {
    let spec = classical_complex_plane();
    // x = Dz (x) (z Dz) - (z Dz) (x) Dz: phi(x) = Dz, in Vec^{1,0}
    let dz = vtf(&spec, &[0], "1");
    let zdz = vtf(&spec, &[0], "z");
    let pairs = [(dz.clone(), zdz.clone()), (zdz.clone().neg(), dz.clone())];
    assert!(nn_bracket_check(&spec, &pairs).unwrap());
    let split = crate::diffop::curvature::wedge_splitting(&spec).unwrap();
    let ph = crate::diffop::curvature::phi(&spec, &pairs, &split).unwrap();
    assert_eq!(ph, vtf(&spec, &[0], "1"));
    // x = 0
    assert!(nn_bracket_check(&spec, &[]).unwrap());
    // Podles (1,0)-sector input with zero kernel pairing
    let podles = podles_sphere();
    let vp = vtf(&podles, &[0], "1");
    let balanced = [(vp.clone(), vp.clone()), (vp.clone().neg(), vp.clone())];
    assert!(nn_bracket_check(&podles, &balanced).unwrap());
    // a bare v+ (x) v+ pairs nontrivially with the sector kernel
    assert!(matches!(
        nn_bracket_check(&podles, &[(vp.clone(), vp.clone())]),
        Err(EngineError::NotAntisymmetric)
    ));
}

#[test]
fn nn_bracket_random_antisymmetric_inputs() {
    let spec = classical_complex_plane();
    let mut rng = StdRng::seed_from_u64(47);
    for _ in 0..20 {
        // commutator pattern f Dz (x) g Dz - g Dz (x) f Dz is always
        // antisymmetric in the (1,0)-sector
        let mut mono = |rng: &mut StdRng| {
            let e = rng.random_range(0..3u32);
            let mut t = spec.one_a();
            for _ in 0..e {
                t = t.mul(&AElem::coordinate(spec.coords(), spec.params.clone(), 0));
            }
            let c = rng.random_range(1..=3i64);
            t.scale(&Scalar::from_int(spec.params.clone(), c))
        };
        let f = mono(&mut rng);
        let g = mono(&mut rng);
        let u = vtf(&spec, &[0], "1").scale(&f);
        let v = vtf(&spec, &[0], "1").scale(&g);
        let pairs = [(u.clone(), v.clone()), (v.clone().neg(), u.clone())];
        assert!(nn_bracket_check(&spec, &pairs).unwrap());
    }
}

#[test]
fn sector_closure() {
    for spec in [classical_complex_plane(), podles_sphere()] {
        assert!(sector_bullet_closure(&spec).unwrap());
    }
    // Dz . (z Dz) stays in the holomorphic sector, concretely:
    let spec = classical_complex_plane();
    let dz = DiffOp::from_part(vtf(&spec, &[0], "1"));
    let zdz = DiffOp::from_part(vtf(&spec, &[0], "z"));
    let prod = bullet(&spec, &dz, &zdz).unwrap();
    let ctx = holo_context(&spec).unwrap();
    assert!(in_vec10_sector_op(&spec, &ctx, &prod));
}

#[test]
fn partial_iter_examples() {
    let spec = classical_complex_plane();
    let e_a = ModuleConnection::trivial_line(&spec);
    // n = 1 base case
    let e = [ae(&spec, "z^2*zb")];
    let p1 = partial_iter(&spec, &e_a, 1, &e).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Module(1)]);
    expect.add_term(vec![0, 0], ae(&spec, "2*z*zb"));
    assert_eq!(p1, expect);
    // z^2 zb: second holomorphic derivative is 2 zb dz (x) dz
    let p2 = partial_iter(&spec, &e_a, 2, &e).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1, Slot::Module(1)]);
    expect.add_term(vec![0, 0, 0], ae(&spec, "2*zb"));
    assert_eq!(p2, expect);
    // z^3: 6 z dz (x) dz
    let e = [ae(&spec, "z^3")];
    let p2 = partial_iter(&spec, &e_a, 2, &e).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1, Slot::Module(1)]);
    expect.add_term(vec![0, 0, 0], ae(&spec, "6*z"));
    assert_eq!(p2, expect);
}

#[test]
fn partial_iter_factorisation() {
    let spec = classical_complex_plane();
    let e_a = ModuleConnection::trivial_line(&spec);
    let e_o = ModuleConnection::omega1(&spec).unwrap();
    let mut rng = StdRng::seed_from_u64(53);
    for n in 1..=3 {
        for _ in 0..3 {
            let mk = |rng: &mut StdRng, spec: &CalculusSpec| {
                let mut t = spec.one_a();
                for _ in 0..rng.random_range(0..4u32) {
                    let v = rng.random_range(0..2);
                    t = t.mul(&AElem::coordinate(spec.coords(), spec.params.clone(), v));
                }
                t
            };
            let e = [mk(&mut rng, &spec)];
            assert_eq!(
                partial_iter(&spec, &e_a, n, &e).unwrap(),
                partial_iter_factored(&spec, &e_a, n, &e).unwrap()
            );
            let e2 = [mk(&mut rng, &spec), mk(&mut rng, &spec)];
            assert_eq!(
                partial_iter(&spec, &e_o, n, &e2).unwrap(),
                partial_iter_factored(&spec, &e_o, n, &e2).unwrap()
            );
        }
    }
}

#[test]
fn dbar_hd_examples() {
    let spec = classical_complex_plane();
    // dbar_HD(Dz (x) Dz) = 0
    let v = DiffOp::from_part(vtf(&spec, &[0, 0], "1"));
    assert!(dbar_hd(&spec, &v).unwrap().is_zero());
    // dbar_HD(zb Dz) = dzb (x) Dz
    let v = DiffOp::from_part(vtf(&spec, &[0], "zb"));
    let out = dbar_hd(&spec, &v).unwrap();
    let mut expect = SectorOp::zero(vec![Slot::Form1]);
    let mut tf = TensorField::zero(vec![Slot::Form1, Slot::Vec1]);
    tf.add_term(vec![1, 0], spec.one_a());
    expect.add_part(tf);
    assert_eq!(out, expect);
    // operators outside the sector are rejected
    let v = DiffOp::from_part(vtf(&spec, &[1], "1"));
    assert!(matches!(dbar_hd(&spec, &v), Err(EngineError::NotInSector)));
    // Podles: dbar_HD(v+) = 0
    let podles = podles_sphere();
    let v = DiffOp::from_part(vtf(&podles, &[0], "1"));
    assert!(dbar_hd(&podles, &v).unwrap().is_zero());
}

#[test]
fn dbar_hd_leibniz_law() {
    let spec = classical_complex_plane();
    let mut rng = StdRng::seed_from_u64(59);
    for _ in 0..8 {
        let mut mk = |rng: &mut StdRng, grade: usize| {
            let mut tf = TensorField::zero(vec![Slot::Vec1; grade]);
            let mut coeff = spec.one_a();
            for _ in 0..rng.random_range(0..3u32) {
                let v = rng.random_range(0..2);
                coeff = coeff.mul(&AElem::coordinate(spec.coords(), spec.params.clone(), v));
            }
            tf.add_term(vec![0; grade], coeff);
            DiffOp::from_part(tf)
        };
        let g1 = rng.random_range(0..=2usize);
        let g2 = rng.random_range(0..=2usize);
        let v = mk(&mut rng, g1);
        let w = mk(&mut rng, g2);
        let (lhs, rhs) = dbar_leibniz_sides(&spec, &v, &w).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn holo_op_battery() {
    let spec = classical_complex_plane();
    let report = holo_op_tests(&spec, 20).unwrap();
    assert!(report.kernel_checked >= 10);
    assert!(report.closure_checked >= 20);
    assert!(report.action_checked >= 20);
    let podles = podles_sphere();
    let report = holo_op_tests(&podles, 10).unwrap();
    assert!(report.kernel_checked > 0);
}

#[test]
fn podles_sigma_inv_spec_values() {
    // sigma^{-1}(e+ (x) e-) = q^-2 e- (x) e+ and sigma^{-1}(e- (x) e+) = q^2 e+ (x) e-
    let spec = podles_sphere();
    let pm = TensorField::basis(&spec, vec![Slot::Form1, Slot::Form1], vec![0, 1]);
    let out = sigma_inv_apply(&spec, &pm, 0).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    expect.add_term(
        vec![1, 0],
        spec.scalar_a(crate::scalar::parse_scalar("q^-2", &spec.params).unwrap()),
    );
    assert_eq!(out, expect);
    let mp = TensorField::basis(&spec, vec![Slot::Form1, Slot::Form1], vec![1, 0]);
    let out = sigma_inv_apply(&spec, &mp, 0).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    expect.add_term(
        vec![0, 1],
        spec.scalar_a(crate::scalar::parse_scalar("q^2", &spec.params).unwrap()),
    );
    assert_eq!(out, expect);
}

#[test]
fn j_compat_lemma_consequences() {
    // (J (x) id) sigma^{-1} = sigma^{-1} (id (x) J) on every built-in with
    // J and a braiding.
    for spec in [classical_complex_plane(), podles_sphere()] {
        let jm = Matrix::from_rows(spec.j_matrix.clone().unwrap());
        let coords = spec.coords();
        for i in 0..spec.n1() {
            for j in 0..spec.n1() {
                let pair = TensorField::basis(&spec, vec![Slot::Form1, Slot::Form1], vec![i, j]);
                let lhs = apply_slot_matrix(
                    &sigma_inv_apply(&spec, &pair, 0).unwrap(),
                    0,
                    &jm,
                    &coords,
                );
                let rhs =
                    sigma_inv_apply(&spec, &apply_slot_matrix(&pair, 1, &jm, &coords), 0).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn act_respects_sector_projection_on_holomorphic_functions() {
    // A holomorphic operator applied to a holomorphic coefficient stays
    // holomorphic; spot check v = z Dz, a = z^3.
    let spec = classical_complex_plane();
    let ctx = dbar_context(&spec).unwrap();
    let e_a = ModuleConnection::trivial_line(&spec);
    let v = DiffOp::from_part(vtf(&spec, &[0], "z"));
    let a = ae(&spec, "z^3");
    assert!(dbar_hd(&spec, &v).unwrap().is_zero());
    let va = act(&spec, &e_a, &v, &[a]).unwrap();
    assert_eq!(va[0], ae(&spec, "3*z^3"));
    assert!(is_holomorphic_a(&spec, &ctx, &va[0]));
    assert!(matches!(spec.algebra, CoeffAlgebra::Polynomial { .. }));
}
