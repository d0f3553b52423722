use std::path::Path;
use std::process::{Command, Output};

fn fgq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgq"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = fgq(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--flights", "8", "--gates", "4", "--seed", "7", "-o", "inst.json"]);
    let text = ok(d, &["solve-exact", "inst.json"]);
    assert!(text.contains("objective:"), "{text}");
    let json: serde_json::Value = serde_json::from_str(&ok(d, &["solve-exact", "inst.json", "--format", "json"])).unwrap();
    assert_eq!(json["assignment"].as_array().unwrap().len(), 8);
    assert_eq!(json["proven_optimal"], true);
    let csv = ok(d, &["solve-exact", "inst.json", "--format", "csv"]);
    assert!(csv.starts_with("assignment,nodes,objective,proven_optimal"), "{csv}");
}

#[test]
fn compile_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--flights", "4", "--gates", "3", "--seed", "2", "-o", "inst.json"]);
    ok(d, &["compile", "inst.json", "--penalty", "worst-case", "--epsilon", "1", "-o", "a.qubo"]);
    ok(d, &["compile", "inst.json", "--penalty", "worst-case", "--epsilon", "1", "-o", "b.qubo"]);
    let a = std::fs::read(d.join("a.qubo")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.qubo")).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("n 12\n# vars 4 3\n"));

    // the QUBO minimum equals the assignment optimum under worst-case weights
    let q: serde_json::Value = serde_json::from_str(&ok(d, &["solve-exact", "a.qubo", "--format", "json"])).unwrap();
    let i: serde_json::Value = serde_json::from_str(&ok(d, &["solve-exact", "inst.json", "--format", "json"])).unwrap();
    assert_eq!(q["energy"], i["objective"]);
}

#[test]
fn stage_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--flights", "3", "--gates", "2", "--seed", "5", "-o", "inst.json"]);
    let s = ok(d, &["binpack", "inst.json", "--n-p", "3", "--n-t", "3", "--seed", "1", "--ratio", "-o", "binned.json"]);
    assert!(s.contains("r: "), "{s}");
    let t = ok(d, &["tune-penalty", "binned.json", "--format", "json"]);
    let t: serde_json::Value = serde_json::from_str(&t).unwrap();
    assert!(t["lambda_one"].as_f64().unwrap() <= t["worst_case_lambda_one"].as_f64().unwrap());
    ok(d, &["compile", "binned.json", "--ising", "-o", "m.ising"]);
    ok(d, &["embed", "m.ising", "--tries", "2", "--seed", "3", "-o", "emb.json", "--physical", "phys.ising"]);
    assert!(d.join("phys.ising").exists());
    let s = ok(d, &[
        "anneal", "m.ising", "--embedding", "emb.json", "--reads", "50", "--sweeps", "50", "--seed", "4", "-o", "samples.csv",
    ]);
    assert!(s.contains("num_reads: 50"), "{s}");
    assert!(d.join("samples.csv.meta.json").exists());
    let plain = ok(d, &["anneal", "m.ising", "--reads", "20", "--sweeps", "20"]);
    assert!(plain.starts_with("state,energy,multiplicity\n"));
}

#[test]
fn extract_writes_components() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--flights", "60", "--gates", "20", "--airport-day", "--seed", "3", "-o", "day.json"]);
    let s = ok(d, &["extract", "day.json", "--min-flights", "3", "-o", "parts", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let n = v["instances"].as_u64().unwrap() as usize;
    assert_eq!(std::fs::read_dir(d.join("parts")).unwrap().count(), n);
    ok(d, &["extract", "day.json", "--cut", "5", "--seed", "1", "-o", "cut"]);
    assert!(d.join("cut/cut-5.json").exists());
}

#[test]
fn experiment_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml");
    ok(d, &["experiment", "--config", config.to_str().unwrap(), "-o", "out", "--jobs", "1"]);
    for f in ["fig2_binpack.csv", "fig3_embedding.csv", "fig4_jf_sweep.csv", "fig5_tts.csv", "records.csv"] {
        let text = std::fs::read_to_string(d.join("out").join(f)).unwrap();
        assert!(text.lines().count() >= 2, "{f} has no data rows");
    }
    let table = ok(d, &["report", "out/records.csv", "--x", "j_f", "--y", "p", "--study", "anneal", "--format", "csv"]);
    assert!(table.starts_with("j_f,count,p_p25,p_p50,p_p75\n"), "{table}");
    let bad = fgq(d, &["report", "out/records.csv", "--x", "nope", "--y", "p"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown record key"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(fgq(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(fgq(d, &["generate", "--flights", "3"]).status.code(), Some(2));
    assert_eq!(fgq(d, &["generate", "--flights", "3", "--gates", "2", "--bogus"]).status.code(), Some(2));
    let missing = fgq(d, &["solve-exact", "missing.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.json"));
    assert_eq!(fgq(d, &["generate", "--flights", "0", "--gates", "2"]).status.code(), Some(1));
    let help = fgq(d, &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let help = String::from_utf8_lossy(&help.stdout).into_owned();
    for cmd in ["generate", "extract", "binpack", "compile", "solve-exact", "tune-penalty", "embed", "anneal", "experiment", "report"] {
        assert!(help.contains(cmd), "help lacks {cmd}");
    }
    for flag in ["--seed", "--output", "--format"] {
        assert!(help.contains(flag), "help lacks {flag}");
    }
}
