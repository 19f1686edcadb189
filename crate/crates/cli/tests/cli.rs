//! End-to-end checks of the command-line surface: output shapes, exit
//! codes and the file format round trip.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncdiffop"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn ncdiffop");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn relations_su2q_prints_three_displayed_relations() {
    let (code, stdout, _) = run(&["relations", "--builtin", "su2q"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "R[w0] = (q^3 - q^2*mu_m + mu_p)*u0 + q^2*u+(x)u- - u-(x)u+"
    );
    assert!(lines[1].starts_with("R[w+]"));
    assert!(lines[2].starts_with("R[w-]"));
}

#[test]
fn relations_classical_plane_is_one_commutator() {
    let (code, stdout, _) = run(&["relations", "--builtin", "classical-plane"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "R[dx^dy] = Dx(x)Dy - Dy(x)Dx");
}

#[test]
fn relations_without_connection_is_invalid_spec() {
    // a file with no connection section: relations need christoffel data
    let dir = tempdir();
    let path = dir.join("bare.json");
    let (_, exported, _) = run(&["export", "--builtin", "classical-plane"]);
    let mut doc: serde_json::Value = serde_json::from_str(&exported).unwrap();
    doc.as_object_mut().unwrap().remove("connection");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, _, stderr) = run(&["relations", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 2, "missing connection data is a spec error: {}", stderr);
}

#[test]
fn verify_on_su2q_without_braiding_exits_three() {
    let (code, _, stderr) = run(&["verify", "--builtin", "su2q", "--suite", "associativity"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("sigma_inv"));
}

#[test]
fn verify_action_suite_passes_on_classical_plane() {
    let (code, stdout, _) = run(&["verify", "--builtin", "classical-plane", "--suite", "action"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("suite action: PASS"));
}

#[test]
fn curvature_check_flat_reports_all_cases() {
    let (code, stdout, _) = run(&["curvature", "--builtin", "su2q", "--check-flat"]);
    assert_eq!(code, 0);
    for needle in [
        "case a: flat (as documented)",
        "case b: flat (as documented)",
        "case c: flat (as documented)",
        "case d: NOT flat (as documented)",
        "case d-corrected: flat (as documented)",
    ] {
        assert!(stdout.contains(needle), "missing: {}", needle);
    }
}

#[test]
fn curvature_with_case_b_params_vanishes() {
    let (code, stdout, _) = run(&[
        "curvature",
        "--builtin",
        "su2q",
        "--params",
        "r=0,n_m=-q^2*(1+q^-2),n_p=q^-2*(1+q^-2),m_m=(q^3+q)*mu_p^-1,m_p=(q+q^-1)*mu_m^-1",
    ]);
    assert_eq!(code, 0);
    for line in stdout.lines() {
        assert!(line.ends_with("= 0"), "unexpected curvature: {}", line);
    }
}

#[test]
fn export_round_trips_through_load() {
    let dir = tempdir();
    for name in ["classical-plane", "complex-plane", "su2q", "podles"] {
        let (code, exported, _) = run(&["export", "--builtin", name]);
        assert_eq!(code, 0);
        let path = dir.join(format!("{}.json", name));
        std::fs::write(&path, &exported).unwrap();
        let (code, again, _) = run(&["export", "--file", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(again, exported, "round trip changed {}", name);
    }
}

#[test]
fn shipped_su2q_document_matches_builtin() {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../calculi/su2q.json");
    let (code, from_file, _) = run(&["relations", "--file", shipped, "--json"]);
    assert_eq!(code, 0);
    let (_, from_builtin, _) = run(&["relations", "--builtin", "su2q", "--json"]);
    assert_eq!(from_file, from_builtin);
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, _) = run(&["relations"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["bogus-subcommand"]);
    assert_eq!(code, 1);
}

#[test]
fn json_output_is_deterministic() {
    let (_, a, _) = run(&["relations", "--builtin", "su2q", "--json"]);
    let (_, b, _) = run(&["relations", "--builtin", "su2q", "--json"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["relations"].as_array().unwrap().len(), 3);
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ncdiffop-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
