use cayley_cli::input::GroupFile;
use cayley_cli::run;
use cayley_core::groups::builtin;
use serde_json::Value;

fn cayley(args: &[&str]) -> (i32, Value) {
    let out = run(std::iter::once("cayley").chain(args.iter().copied()));
    let json = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, json)
}

#[test]
fn spectrum_of_level_three() {
    let (code, v) = cayley(&["spectrum", "--group", "Z2", "--level", "3"]);
    assert_eq!(code, 0);
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 6);
    let total: u64 = atoms.iter().map(|a| a["multiplicity"].as_u64().unwrap()).sum();
    assert_eq!(total, 8);
    for a in atoms {
        for key in ["p", "q", "value", "multiplicity"] {
            assert!(a.get(key).is_some());
        }
    }
}

#[test]
fn numeric_spectrum_agrees() {
    let (code, v) = cayley(&["spectrum", "--group", "S3", "--level", "2", "--numeric"]);
    assert_eq!(code, 0);
    assert_eq!(v["numeric"]["matched"], Value::Bool(true));
}

#[test]
fn kns_with_two_denominators_has_one_atom() {
    let (code, v) = cayley(&["kns", "--n", "2", "--qmax", "2"]);
    assert_eq!(code, 0);
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert_eq!(atoms[0]["q"], 2);
    assert_eq!(atoms[0]["weight"], "1/3");
}

#[test]
fn negative_level_is_a_usage_error() {
    let out = run(["cayley", "spectrum", "--group", "Z2", "--level", "-1"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--level"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_group_and_subcommand_are_usage_errors() {
    assert_eq!(run(["cayley", "spectrum", "--group", "Z0x", "--level", "1"]).code, 2);
    assert_eq!(run(["cayley", "frobnicate"]).code, 2);
    assert_eq!(run(["cayley", "verify", "--only", "12"]).code, 2);
}

#[test]
fn abelian_structure_request_is_a_domain_error() {
    let out = run(["cayley", "structure", "--group", "Z2", "--theorem", "1", "--n", "1"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("abelian"));
}

#[test]
fn group_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s3.json");
    let file = GroupFile::from_group(&builtin("S3").unwrap());
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let (code, v) = cayley(&["spectrum", "--group", path.to_str().unwrap(), "--level", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["n"], 6);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"labels": ["e", "a"], "table": [[0, 1], [1, 1]]}"#).unwrap();
    assert_eq!(run(["cayley", "machine", "--group", bad.to_str().unwrap()]).code, 1);
}

#[test]
fn output_is_reproducible() {
    let args = ["cayley", "walk", "--group", "Z3", "--steps", "4", "--mc", "500", "--seed", "9"];
    let a = run(args);
    let b = run(args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rationals_are_strings() {
    let (_, v) = cayley(&["walk", "--group", "Z2", "--steps", "2"]);
    assert_eq!(v["table"][2]["p_m"]["exact"], "1/4");
    let (_, v) = cayley(&["moments", "--group", "Z2", "--level", "2", "-m", "2", "--fixed-points"]);
    for row in v["moments"].as_array().unwrap() {
        assert_eq!(row["identity_holds"], Value::Bool(true));
    }
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeta.csv");
    let out = run([
        "cayley", "zeta", "--group", "Z2", "--level", "1", "-R", "3", "--format", "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,coefficient,path_count,oracle,per_edge,per_vertex"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn zeta_reports_the_convention() {
    let (code, v) = cayley(&["zeta", "--group", "Z2", "--level", "2", "-R", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["exponent_convention"], "|E|-|V|");
    for row in v["coefficients"].as_array().unwrap() {
        assert_eq!(row["oracle_agrees"], Value::Bool(true));
    }
    let (code, v) = cayley(&["zeta", "--limit", "--n", "2", "--qmax", "30", "-R", "0"]);
    assert_eq!(code, 0);
    assert!(v["coefficients"].as_array().unwrap().is_empty());
}

#[test]
fn depth_and_fixed_points() {
    let (_, v) = cayley(&["depth", "--group", "Z3", "--power", "2", "--elem", "1"]);
    assert_eq!(v["depth"], 3);
    let (_, v) = cayley(&["fix", "--group", "Z2", "--word", "x", "--kmax", "5"]);
    assert_eq!(v["levels"][5]["fixed"], "2");
    let (_, v) = cayley(&["free", "--group", "Z2", "--len", "2", "--kmax", "6"]);
    assert_eq!(v["free_on_ball"], Value::Bool(true));
}

#[test]
fn structure_for_dihedral_groups() {
    let (code, v) = cayley(&["structure", "--group", "D4", "--theorem", "2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"], "class-two-open-case");
    let (_, v) = cayley(&["structure", "--group", "D8", "--theorem", "2", "--n", "3"]);
    assert_eq!(v["outcome"], "differs");
}
