use super::ops::*;
use super::*;
use crate::aelem::parse_aelem;
use crate::library::*;
use crate::scalar::{parse_scalar, Scalar};

pub fn ae(spec: &CalculusSpec, text: &str) -> AElem {
    parse_aelem(text, &spec.params, &spec.coords()).unwrap()
}

pub fn sc(spec: &CalculusSpec, text: &str) -> Scalar {
    parse_scalar(text, &spec.params).unwrap()
}

/// Single-index tensor with one named component.
pub fn tf1(spec: &CalculusSpec, slot: Slot, idx: usize, coeff: &str) -> TensorField {
    let mut t = TensorField::zero(vec![slot]);
    t.add_term(vec![idx], ae(spec, coeff));
    t
}

pub fn form(spec: &CalculusSpec, idx: usize) -> TensorField {
    TensorField::basis(spec, vec![Slot::Form1], vec![idx])
}

pub fn vec1(spec: &CalculusSpec, idx: usize) -> TensorField {
    TensorField::basis(spec, vec![Slot::Vec1], vec![idx])
}

#[test]
fn ev_dual_basis() {
    let spec = classical_plane();
    for i in 0..2 {
        for j in 0..2 {
            let v = ev_n(&spec, &vec1(&spec, i), &form(&spec, j)).unwrap();
            if i == j {
                assert_eq!(v, spec.one_a());
            } else {
                assert!(v.is_zero());
            }
        }
    }
}

#[test]
fn ev_kronecker_composition_su2q() {
    let spec = su2q_3d_generic();
    // ev^<2>(u+ (x) u0, e0 (x) e+) = 1: inner slots pair first.
    let v = vec1(&spec, 0).tensor(&vec1(&spec, 1));
    let w = form(&spec, 1).tensor(&form(&spec, 0));
    assert_eq!(ev_n(&spec, &v, &w).unwrap(), spec.one_a());
    // and the straight pairing vanishes
    let w2 = form(&spec, 0).tensor(&form(&spec, 1));
    assert!(ev_n(&spec, &v, &w2).unwrap().is_zero());
}

#[test]
fn ev_with_coefficients_classical() {
    let spec = classical_plane();
    // ev^<2>(Dx (x) Dy, x.dy (x) dx) = x by direct index contraction.
    let v = vec1(&spec, 0).tensor(&vec1(&spec, 1));
    let mut w = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    w.add_term(vec![1, 0], ae(&spec, "x"));
    assert_eq!(ev_n(&spec, &v, &w).unwrap(), ae(&spec, "x"));
    // grade mismatch is an error
    assert!(matches!(
        ev_n(&spec, &v, &form(&spec, 0)),
        Err(EngineError::GradeMismatch { .. })
    ));
}

#[test]
fn square_forms_flat_plane() {
    let spec = classical_plane();
    let w = form(&spec, 0).tensor(&form(&spec, 1));
    assert!(square_forms_iter(&spec, &w).unwrap().is_zero());
}

#[test]
fn square_e0_reproduces_connection_family() {
    let spec = su2q_3d_generic();
    let out = square_omega1(&spec, &form(&spec, 1)).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    expect.add_term(vec![1, 1], ae(&spec, "r"));
    expect.add_term(vec![0, 2], ae(&spec, "mu_p"));
    expect.add_term(vec![2, 0], ae(&spec, "mu_m"));
    assert_eq!(out, expect);
}

#[test]
fn square_right_leibniz_oracle() {
    let spec = classical_plane();
    // Oracle: square(xi.a) = square(xi).a + xi (x) da. For xi = dy, a = x
    // on the flat plane this is dy (x) dx.
    let w = tf1(&spec, Slot::Form1, 1, "x");
    let out = square_omega1(&spec, &w).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    expect.add_term(vec![1, 0], spec.one_a());
    assert_eq!(out, expect);

    // The rule itself, on a handful of (xi, a) pairs.
    for (i, atext) in [(0usize, "x^2*y"), (1, "x + y^3"), (0, "y")] {
        let a = ae(&spec, atext);
        let scaled = form(&spec, i).scale(&a);
        let lhs = square_omega1(&spec, &scaled).unwrap();
        let rhs = square_omega1(&spec, &form(&spec, i))
            .unwrap()
            .scale(&a)
            .add(&form(&spec, i).tensor(&d_on_a(&spec, &a)));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn sigma_chain_is_flip_cycle() {
    let spec = classical_plane();
    // On the flip braiding, sigma^{-<2>} moves slot 1 to slot 3.
    let t = form(&spec, 0).tensor(&form(&spec, 1)).tensor(&form(&spec, 1));
    let out = sigma_inv_chain(&spec, 2, &t).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1; 3]);
    expect.add_term(vec![1, 1, 0], spec.one_a());
    assert_eq!(out, expect);
    // n = 1 is sigma^{-1} itself.
    let pair = form(&spec, 0).tensor(&form(&spec, 1));
    assert_eq!(
        sigma_inv_chain(&spec, 1, &pair).unwrap(),
        sigma_inv_apply(&spec, &pair, 0).unwrap()
    );
}

#[test]
fn sigma_inv_podles_values() {
    let spec = podles_sphere();
    let pm = form(&spec, 0).tensor(&form(&spec, 1));
    let out = sigma_inv_apply(&spec, &pm, 0).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1]);
    expect.add_term(vec![1, 0], AElem::from_scalar(spec.coords(), sc(&spec, "q^-2")));
    assert_eq!(out, expect);
}

#[test]
fn dual_connection_su2q_values() {
    let spec = su2q_3d_generic();
    // square(u-) = -mu_m e+ (x) u0 - m_m e0 (x) u-
    let out = square_vec1(&spec, &vec1(&spec, 2)).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Vec1]);
    expect.add_term(vec![0, 1], ae(&spec, "-mu_m"));
    expect.add_term(vec![1, 2], ae(&spec, "-m_m"));
    assert_eq!(out, expect);
    // square(u+) = -m_p e0 (x) u+ - mu_p e- (x) u0
    let out = square_vec1(&spec, &vec1(&spec, 0)).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Vec1]);
    expect.add_term(vec![1, 0], ae(&spec, "-m_p"));
    expect.add_term(vec![2, 1], ae(&spec, "-mu_p"));
    assert_eq!(out, expect);
}

#[test]
fn dual_connection_flat_plane_vanishes() {
    let spec = classical_plane();
    assert!(square_vec1(&spec, &vec1(&spec, 0)).unwrap().is_zero());
}

#[test]
fn duality_identity_on_basis_pairs() {
    for spec in [classical_plane(), classical_complex_plane(), su2q_3d_generic(), podles_sphere()] {
        assert!(duality_identity_holds(&spec).unwrap());
    }
}

#[test]
fn square_vec_iter_examples() {
    let spec = classical_plane();
    // flat: Dx (x) Dy -> 0
    let t = vec1(&spec, 0).tensor(&vec1(&spec, 1));
    assert!(square_vec_iter(&spec, &t).unwrap().is_zero());
    // (x Dx) (x) Dy -> dx (x) Dx (x) Dy by the left Leibniz rule
    let mut t = TensorField::zero(vec![Slot::Vec1, Slot::Vec1]);
    t.add_term(vec![0, 1], ae(&spec, "x"));
    let out = square_vec_iter(&spec, &t).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Vec1, Slot::Vec1]);
    expect.add_term(vec![0, 0, 1], spec.one_a());
    assert_eq!(out, expect);
    // n = 1 base case agrees with the dual connection
    let v = tf1(&spec, Slot::Vec1, 1, "x*y");
    assert_eq!(
        square_vec_iter(&spec, &v).unwrap(),
        square_vec1(&spec, &v).unwrap()
    );
}

#[test]
fn sigma_vec_defining_identity() {
    // (id (x) ev)(sigma (x) id) = (ev (x) id)(id (x) sigma^{-1}) on all
    // basis triples, for every built-in with a braiding.
    for spec in [classical_plane(), classical_complex_plane(), podles_sphere()] {
        let s = spec.sigma_inv_ref().unwrap();
        let n1 = spec.n1();
        for c in 0..n1 {
            for j in 0..n1 {
                let sv = sigma_vec_apply(&spec, &vec1(&spec, c).tensor(&form(&spec, j)), 0).unwrap();
                for m in 0..n1 {
                    // lhs = (id (x) ev)(sigma(u_c (x) xi_j) (x) xi_m)
                    let mut lhs = TensorField::zero(vec![Slot::Form1]);
                    for (idx, a) in &sv.comps {
                        if idx[1] == m {
                            lhs.add_term(vec![idx[0]], a.clone());
                        }
                    }
                    // rhs = (ev (x) id)(u_c (x) sigma^{-1}(xi_j (x) xi_m))
                    let mut rhs = TensorField::zero(vec![Slot::Form1]);
                    for a in 0..n1 {
                        for b in 0..n1 {
                            if a == c {
                                rhs.add_term(vec![b], s[j][m][a][b].clone());
                            }
                        }
                    }
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn sigma_vec_podles_value() {
    // Composing the defining formula on the Podles braiding:
    // sigma(v+ (x) e-) = q^2 e- (x) v+, since sigma^{-1}(e- (x) e+) = q^2 e+ (x) e-.
    let spec = podles_sphere();
    let out = sigma_vec_apply(&spec, &vec1(&spec, 0).tensor(&form(&spec, 1)), 0).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Vec1]);
    expect.add_term(vec![1, 0], AElem::from_scalar(spec.coords(), sc(&spec, "q^2")));
    assert_eq!(out, expect);
}

#[test]
fn nabla_iter_hessians() {
    let spec = classical_plane();
    let e_mod = ModuleConnection::trivial_line(&spec);
    // n = 2, e = xy: dx (x) dy + dy (x) dx
    let out = nabla_iter(&spec, &e_mod, 2, &[ae(&spec, "x*y")]).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1, Slot::Module(1)]);
    expect.add_term(vec![0, 1, 0], spec.one_a());
    expect.add_term(vec![1, 0, 0], spec.one_a());
    assert_eq!(out, expect);
    // n = 2, e = x^2: 2 dx (x) dx
    let out = nabla_iter(&spec, &e_mod, 2, &[ae(&spec, "x^2")]).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form1, Slot::Form1, Slot::Module(1)]);
    expect.add_term(vec![0, 0, 0], ae(&spec, "2"));
    assert_eq!(out, expect);
    // n = 1 is nabla itself
    let e = [ae(&spec, "x^3*y")];
    assert_eq!(
        nabla_iter(&spec, &e_mod, 1, &e).unwrap(),
        nabla_module(&spec, &e_mod, &e)
    );
}

#[test]
fn torsion_values() {
    let flat = classical_plane();
    assert!(torsion(&flat, &form(&flat, 0)).unwrap().is_zero());

    let spec = su2q_3d_generic();
    let out = torsion(&spec, &form(&spec, 1)).unwrap();
    let mut expect = TensorField::zero(vec![Slot::Form2]);
    expect.add_term(vec![0], ae(&spec, "q^3 + mu_p - q^2*mu_m"));
    assert_eq!(out, expect);

    let podles = podles_sphere();
    assert!(torsion(&podles, &form(&podles, 0)).unwrap().is_zero());
}

#[test]
fn torsion_is_right_module_map() {
    let spec = classical_plane();
    for (i, atext) in [(0usize, "x^2 - y"), (1, "x*y + 3")] {
        let a = ae(&spec, atext);
        let lhs = torsion(&spec, &form(&spec, i).scale(&a)).unwrap();
        let rhs = torsion(&spec, &form(&spec, i)).unwrap().scale(&a);
        assert_eq!(lhs, rhs);
    }
}

fn su2q_curvature_expectations(spec: &CalculusSpec) -> Vec<(usize, usize, usize, Scalar)> {
    // (module basis a, 2-form k, module leg b, coefficient): the
    // displayed curvature family, converted to the (w0, w+, w-) basis.
    vec![
        (0, 0, 0, sc(spec, "n_p*q^3 - mu_m*m_p")),
        (0, 1, 1, sc(spec, "m_p*(-q^2*(1+q^-2) + n_p*q^4 - r)")),
        (2, 0, 2, sc(spec, "n_m*q^3 + q^2*mu_p*m_m")),
        (2, 2, 1, sc(spec, "m_m*(q^-2*(1+q^-2) + n_m*q^-4 - r)")),
        (1, 0, 1, sc(spec, "r*q^3 - mu_p*m_m + mu_m*m_p*q^2")),
        (1, 1, 2, sc(spec, "mu_p*(-q^2*(1+q^-2) + r*q^4 - n_m)")),
        (1, 2, 0, sc(spec, "mu_m*(q^-2*(1+q^-2) + r*q^-4 - n_p)")),
    ]
}

#[test]
fn curvature_reproduces_displayed_family() {
    let spec = su2q_3d_generic();
    let e_mod = ModuleConnection::omega1(&spec).unwrap();
    let mut seen = vec![
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
    ];
    for a in 0..3 {
        let mut e = vec![spec.zero_a(); 3];
        e[a] = spec.one_a();
        seen[a] = module_curvature(&spec, &e_mod, &e);
    }
    let mut expect = vec![
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
        TensorField::zero(vec![Slot::Form2, Slot::Module(3)]),
    ];
    for (a, k, b, c) in su2q_curvature_expectations(&spec) {
        expect[a].add_term(vec![k, b], spec.scalar_a(c));
    }
    assert_eq!(seen, expect);
}

#[test]
fn curvature_flat_plane_vanishes_and_is_left_linear() {
    let spec = classical_plane();
    let e_mod = ModuleConnection::omega1(&spec).unwrap();
    let e = [ae(&spec, "x*y"), ae(&spec, "y^2")];
    assert!(module_curvature(&spec, &e_mod, &e).is_zero());

    // left A-linearity on a curving line module
    let curving = ModuleConnection::line_with(&spec, vec![ae(&spec, "0"), ae(&spec, "x")]);
    let a = ae(&spec, "x^2 + y");
    let e = [ae(&spec, "x - y")];
    let ae_ = [a.mul(&e[0])];
    let lhs = module_curvature(&spec, &curving, &ae_);
    let rhs = module_curvature(&spec, &curving, &e).scale(&a);
    assert_eq!(lhs, rhs);
    assert!(!lhs.is_zero() || e[0].is_zero());
}

#[test]
fn su2q_flat_cases_kill_curvature() {
    let spec = su2q_3d_generic();
    for case in su2q_flat_cases() {
        let sub = spec.substitute(&case.bindings).unwrap();
        let e_mod = ModuleConnection::omega1(&sub).unwrap();
        let mut all_zero = true;
        for a in 0..3 {
            let mut e = vec![sub.zero_a(); 3];
            e[a] = sub.one_a();
            if !module_curvature(&sub, &e_mod, &e).is_zero() {
                all_zero = false;
            }
        }
        assert_eq!(
            all_zero, case.expect_flat,
            "case {} flatness mismatch",
            case.label
        );
    }
    // The corrected case (d) is flat.
    let corrected = su2q_case_d_corrected();
    let sub = spec.substitute(&corrected.bindings).unwrap();
    let e_mod = ModuleConnection::omega1(&sub).unwrap();
    for a in 0..3 {
        let mut e = vec![sub.zero_a(); 3];
        e[a] = sub.one_a();
        assert!(module_curvature(&sub, &e_mod, &e).is_zero());
    }
}

#[test]
fn sigma_e_wedge_law_for_flip() {
    let spec = classical_plane();
    let e_mod = ModuleConnection::omega1(&spec)
        .unwrap()
        .with_sigma(SigmaE::flip(&spec, 2));
    assert!(sigma_e_wedge_law_holds(&spec, &e_mod).unwrap());
}

#[test]
fn spec_validation_rejects_bad_j() {
    let mut spec = classical_complex_plane();
    // J = identity does not square to -id.
    let o = Scalar::one(spec.params.clone());
    let z = Scalar::zero(spec.params.clone());
    spec.j_matrix = Some(vec![vec![o.clone(), z.clone()], vec![z, o]]);
    assert!(matches!(spec.validate(), Err(EngineError::InvalidSpec(_))));
}

#[test]
fn sigma_required_is_lazy() {
    // su2q has no braiding: square^<2> on forms must report sigma_required
    // when a nonzero tail derivative appears...
    let spec = su2q_3d_generic();
    let w = form(&spec, 1).tensor(&form(&spec, 1));
    assert!(matches!(
        square_forms_iter(&spec, &w),
        Err(EngineError::SigmaRequired)
    ));
    // ...but a calculus whose first-leg derivatives vanish does not need it.
    let podles_no_sigma = {
        let mut p = podles_sphere();
        p.sigma_inv = None;
        p.j_matrix = None;
        p
    };
    let w = form(&podles_no_sigma, 0).tensor(&form(&podles_no_sigma, 1));
    assert!(square_forms_iter(&podles_no_sigma, &w).unwrap().is_zero());
}
