//! Batch front end: load a calculus (built-in or file), run relation
//! generation, curvature reports and verification suites.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid spec, 3 missing capability
//! (sigma_required and friends), 4 verification failure.

use clap::{Args, Parser, Subcommand};
use ncdiffop::calculus::ops::module_curvature;
use ncdiffop::calculus::{CalculusSpec, ModuleConnection};
use ncdiffop::diffop::curvature::da_relations;
use ncdiffop::error::EngineError;
use ncdiffop::file::CalculusFile;
use ncdiffop::library;
use ncdiffop::verify::{self, Suite};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ncdiffop", version, about = "Exact differential operators on structure-constant calculi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Built-in calculus: classical-plane | complex-plane | su2q | podles
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    /// Path to a calculus JSON file
    #[arg(long)]
    file: Option<String>,
    /// Parameter bindings, e.g. --params r=0,n_p=q^-2
    #[arg(long)]
    params: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the relation generators of the differential operator sheaf
    Relations {
        #[command(flatten)]
        spec: SpecArgs,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Print the curvature of the canonical module connection
    Curvature {
        #[command(flatten)]
        spec: SpecArgs,
        /// Module to differentiate: omega1 (default) or line
        #[arg(long, default_value = "omega1")]
        module: String,
        /// Evaluate the zero-curvature cases of the su2q family
        #[arg(long)]
        check_flat: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite; exit 0 iff every exact check passes
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// associativity | action | curvature-op | relations-annihilate |
        /// complex | theta | symbols | su2q-consistency | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        json: bool,
    },
    /// Write a built-in calculus as a JSON document to stdout
    Export {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

fn builtin_spec(name: &str) -> Result<CalculusSpec, EngineError> {
    match name {
        "classical-plane" => Ok(library::classical_plane()),
        "complex-plane" => Ok(library::classical_complex_plane()),
        "su2q" => Ok(library::su2q_3d_generic()),
        "podles" => Ok(library::podles_sphere()),
        other => Err(EngineError::InvalidSpec(format!(
            "unknown builtin '{}'; expected classical-plane, complex-plane, su2q or podles",
            other
        ))),
    }
}

fn load_spec(args: &SpecArgs) -> Result<CalculusSpec, EngineError> {
    let spec = match (&args.builtin, &args.file) {
        (Some(name), None) => builtin_spec(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| EngineError::InvalidSpec(format!("cannot read {}: {}", path, e)))?;
            CalculusFile::from_json(&text)?.to_spec()?
        }
        _ => {
            return Err(EngineError::InvalidSpec(
                "exactly one of --builtin or --file is required".into(),
            ))
        }
    };
    match &args.params {
        None => Ok(spec),
        Some(p) => {
            let bindings = verify::parse_bindings(&spec, p)?;
            spec.substitute(&bindings)
        }
    }
}

fn exit_for(err: &EngineError) -> u8 {
    match err {
        // a calculus without connection data is an invalid input for the
        // commands that need one, not a partial capability
        EngineError::CapabilityMissing("christoffel data") => 2,
        EngineError::SigmaRequired
        | EngineError::SigmaERequired
        | EngineError::CapabilityMissing(_) => 3,
        _ => 2,
    }
}

fn op_terms(op: &ncdiffop::diffop::DiffOp) -> Vec<serde_json::Value> {
    let mut terms = Vec::new();
    for (n, tf) in &op.parts {
        for (idx, a) in &tf.comps {
            terms.push(json!({
                "grade": n,
                "indices": idx,
                "coeff": a.render(),
            }));
        }
    }
    terms
}

fn cmd_relations(spec: &CalculusSpec, as_json: bool) -> Result<(), EngineError> {
    let rels = da_relations(spec)?;
    if as_json {
        let body: Vec<_> = rels
            .iter()
            .enumerate()
            .map(|(k, rel)| {
                json!({
                    "omega2": spec.omega2_names[k],
                    "relation": rel.render(spec),
                    "terms": op_terms(rel),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "relations": body })).unwrap()
        );
    } else {
        for (k, rel) in rels.iter().enumerate() {
            println!("R[{}] = {}", spec.omega2_names[k], rel.render(spec));
        }
    }
    Ok(())
}

fn module_by_name(spec: &CalculusSpec, name: &str) -> Result<ModuleConnection, EngineError> {
    match name {
        "omega1" => ModuleConnection::omega1(spec),
        "line" => Ok(ModuleConnection::trivial_line(spec)),
        other => Err(EngineError::InvalidSpec(format!(
            "unknown module '{}'; expected omega1 or line",
            other
        ))),
    }
}

type CurvatureRow = (usize, Vec<(usize, usize, String)>);

fn curvature_entries(spec: &CalculusSpec, e_mod: &ModuleConnection) -> Vec<CurvatureRow> {
    let mut out = Vec::new();
    for a in 0..e_mod.rank {
        let mut e = vec![spec.zero_a(); e_mod.rank];
        e[a] = spec.one_a();
        let r = module_curvature(spec, e_mod, &e);
        let mut entries = Vec::new();
        for (idx, c) in &r.comps {
            entries.push((idx[0], idx[1], c.render()));
        }
        out.push((a, entries));
    }
    out
}

fn cmd_curvature(
    spec: &CalculusSpec,
    module: &str,
    check_flat: bool,
    as_json: bool,
) -> Result<bool, EngineError> {
    let e_mod = module_by_name(spec, module)?;
    let rows = curvature_entries(spec, &e_mod);
    let mut flat_report = Vec::new();
    let mut all_expected = true;
    if check_flat {
        let mut cases = library::su2q_flat_cases();
        cases.push(library::su2q_case_d_corrected());
        for case in &cases {
            let sub = spec.substitute(&case.bindings)?;
            let sub_mod = module_by_name(&sub, module)?;
            let mut flat = true;
            for a in 0..sub_mod.rank {
                let mut e = vec![sub.zero_a(); sub_mod.rank];
                e[a] = sub.one_a();
                if !module_curvature(&sub, &sub_mod, &e).is_zero() {
                    flat = false;
                }
            }
            if flat != case.expect_flat {
                all_expected = false;
            }
            flat_report.push((case.label, flat, case.expect_flat));
        }
    }
    if as_json {
        let body: Vec<_> = rows
            .iter()
            .map(|(a, entries)| {
                json!({
                    "basis": e_mod.basis_names[*a],
                    "terms": entries.iter().map(|(k, b, c)| json!({
                        "omega2": spec.omega2_names[*k],
                        "module": e_mod.basis_names[*b],
                        "coeff": c,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let flat: Vec<_> = flat_report
            .iter()
            .map(|(label, flat, expected)| {
                json!({"case": label, "flat": flat, "expected_flat": expected})
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"curvature": body, "flat_cases": flat})).unwrap()
        );
    } else {
        for (a, entries) in &rows {
            if entries.is_empty() {
                println!("R({}) = 0", e_mod.basis_names[*a]);
                continue;
            }
            let terms: Vec<String> = entries
                .iter()
                .map(|(k, b, c)| {
                    format!(
                        "({})*{}(x){}",
                        c, spec.omega2_names[*k], e_mod.basis_names[*b]
                    )
                })
                .collect();
            println!("R({}) = {}", e_mod.basis_names[*a], terms.join(" + "));
        }
        for (label, flat, expected) in &flat_report {
            let verdict = if *flat { "flat" } else { "NOT flat" };
            let note = if *flat == *expected {
                "as documented"
            } else {
                "UNEXPECTED"
            };
            println!("case {}: {} ({})", label, verdict, note);
        }
    }
    Ok(all_expected)
}

fn cmd_verify(spec: &CalculusSpec, suite: &str, as_json: bool) -> Result<bool, EngineError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::all().to_vec()
    } else {
        match Suite::from_name(suite) {
            Some(s) => vec![s],
            None => {
                return Err(EngineError::InvalidSpec(format!(
                    "unknown suite '{}'",
                    suite
                )))
            }
        }
    };
    let mut all_ok = true;
    let mut reports = Vec::new();
    for s in suites {
        let report = verify::run_suite(spec, s)?;
        all_ok &= report.passed();
        reports.push(report);
    }
    if as_json {
        let body: Vec<_> = reports
            .iter()
            .map(|r| {
                json!({
                    "suite": r.suite,
                    "passed": r.passed(),
                    "checks": r.checks.iter().map(|(name, ok)| json!({
                        "check": name, "ok": ok,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"ok": all_ok, "suites": body})).unwrap()
        );
    } else {
        for r in &reports {
            for (name, ok) in &r.checks {
                println!(
                    "[{}] {} ... {}",
                    r.suite,
                    name,
                    if *ok { "ok" } else { "FAIL" }
                );
            }
            println!(
                "suite {}: {}",
                r.suite,
                if r.passed() { "PASS" } else { "FAIL" }
            );
        }
    }
    Ok(all_ok)
}

fn run() -> Result<bool, EngineError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap treats help/version as errors that should exit 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli.command {
        Command::Relations { spec, json } => {
            let s = load_spec(&spec)?;
            cmd_relations(&s, json)?;
            Ok(true)
        }
        Command::Curvature {
            spec,
            module,
            check_flat,
            json,
        } => {
            let s = load_spec(&spec)?;
            cmd_curvature(&s, &module, check_flat, json)
        }
        Command::Verify { spec, suite, json } => {
            let s = load_spec(&spec)?;
            cmd_verify(&s, &suite, json)
        }
        Command::Export { spec } => {
            let s = load_spec(&spec)?;
            println!("{}", CalculusFile::from_spec(&s).to_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_for(&e))
        }
    }
}
