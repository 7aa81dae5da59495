mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_dir, scratch_fixture};

fn ontoterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontoterm")).args(args).env("ONTOTERM_NO_COLOR", "1").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = ontoterm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(ontoterm(&["--help"]).status.code(), Some(0));
    assert_eq!(ontoterm(&["--version"]).status.code(), Some(0));
    assert_eq!(ontoterm(&["export", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ontoterm(&[]).status.code(), Some(1));
    assert_eq!(ontoterm(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ontoterm(&["extract", "--corpus", "x"]).status.code(), Some(1));
    assert_eq!(ontoterm(&["export", "--ontology", "x", "--format", "rdf"]).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two_with_code() {
    let out = ontoterm(&["ok-check", "--ontology", "/nonexistent/onto.ok"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[E_IO]"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ok");
    std::fs::write(&bad, "concept \"a\" genus \"b\"\n").unwrap();
    let out = ontoterm(&["ok-check", "--ontology", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_UNKNOWN_GENUS"));
}

#[test]
fn inconsistent_ontology_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let dsl = dir.path().join("bad.ok");
    let mut src = std::fs::read_to_string(fixture_dir().join("relais.ok")).unwrap();
    src.push_str("concept \"relais x\" genus \"relais\"\n");
    std::fs::write(&dsl, src).unwrap();
    let out = ontoterm(&["ok-check", "--ontology", p(&dsl)]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["violations"][0]["rule"], "R2");
    let out = ontoterm(&["export", "--ontology", p(&dsl)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_INCONSISTENT"));
}

#[test]
fn standalone_commands_chain() {
    let fx = fixture_dir();
    let dir = tempfile::tempdir().unwrap();
    let d = |name: &str| dir.path().join(name);
    let corpus = fx.join("corpus");
    let lexicon = fx.join("lexicon.tsv");
    let onto = fx.join("relais.ok");

    ok(&["extract", "--corpus", p(&corpus), "--lexicon", p(&lexicon), "--patterns", p(&fx.join("patterns.txt")), "--out", p(&d("candidates.json"))]);
    ok(&["net", "--candidates", p(&d("candidates.json")), "--corpus", p(&corpus), "--lexicon", p(&lexicon), "--out", p(&d("lexnet.json"))]);
    ok(&["validate", "--lexnet", p(&d("lexnet.json")), "--decisions", p(&fx.join("decisions.txt")), "--out", p(&d("validated.json"))]);
    ok(&["project", "--validated", p(&d("validated.json")), "--out", p(&d("taxonomy.json"))]);
    let dot = ok(&["project", "--validated", p(&d("validated.json")), "--dot"]);
    assert!(dot.starts_with("digraph"), "{dot}");
    assert_eq!(dot.matches("->").count(), 4);

    let check: serde_json::Value = serde_json::from_str(&ok(&["ok-check", "--ontology", p(&onto)])).unwrap();
    assert_eq!(check["violations"].as_array().unwrap().len(), 0);

    ok(&[
        "align", "--taxonomy", p(&d("taxonomy.json")), "--ontology", p(&onto), "--validated", p(&d("validated.json")),
        "--lexicon", p(&lexicon), "--out", p(&d("alignment.json")),
    ]);
    let alignment = std::fs::read_to_string(d("alignment.json")).unwrap();
    assert!(alignment.contains("PARENT_ELIDED"));

    ok(&[
        "index", "--structure", "projected", "--candidates", p(&d("candidates.json")), "--corpus", p(&corpus),
        "--taxonomy", p(&d("taxonomy.json")), "--out", p(&d("idx_projected.json")),
    ]);
    ok(&[
        "index", "--structure", "ok", "--candidates", p(&d("candidates.json")), "--corpus", p(&corpus),
        "--ontology", p(&onto), "--alignment", p(&d("alignment.json")), "--out", p(&d("idx_ok.json")),
    ]);

    let docs = |json: &str| -> BTreeSet<String> {
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        v["docs"].as_array().unwrap().iter().map(|d| d.as_str().unwrap().to_owned()).collect()
    };
    let projected = ok(&["query", "--structure", "projected", "--concept", "relais à seuil", "--index", p(&d("idx_projected.json")), "--taxonomy", p(&d("taxonomy.json"))]);
    assert_eq!(docs(&projected), BTreeSet::from(["D2".to_owned()]));
    let via_ok = ok(&["query", "--structure", "ok", "--concept", "relais à seuil", "--index", p(&d("idx_ok.json")), "--ontology", p(&onto)]);
    assert_eq!(docs(&via_ok), BTreeSet::from(["D1".to_owned(), "D2".to_owned()]));

    let cmp: serde_json::Value = serde_json::from_str(&ok(&[
        "compare-recall", "--label", "relais à seuil", "--projected-index", p(&d("idx_projected.json")), "--ok-index",
        p(&d("idx_ok.json")), "--taxonomy", p(&d("taxonomy.json")), "--ontology", p(&onto),
    ]))
    .unwrap();
    assert_eq!(cmp["symmetric_difference"], serde_json::json!(["D1"]));

    let owl = ok(&["export", "--ontology", p(&onto)]);
    assert!(owl.contains("SubClassOf(:RelaisASeuilDeTension :RelaisASeuil)"));
    ok(&["export", "--ontology", p(&onto), "--format", "kif", "--out", p(&d("relais.kif"))]);
    assert!(std::fs::read_to_string(d("relais.kif")).unwrap().contains("(=> (RelaisASeuilDeTension ?x) (RelaisASeuil ?x))"));
}

#[test]
fn unknown_query_concept_exits_two() {
    let fx = fixture_dir();
    let dir = tempfile::tempdir().unwrap();
    let candidates = dir.path().join("candidates.json");
    let index = dir.path().join("idx.json");
    let alignment = dir.path().join("alignment.json");
    std::fs::write(&alignment, r#"{"alignments": [], "discrepancies": {"entries": []}}"#).unwrap();
    let onto = fx.join("relais.ok");
    ok(&["extract", "--corpus", p(&fx.join("corpus")), "--lexicon", p(&fx.join("lexicon.tsv")), "--out", p(&candidates)]);
    ok(&[
        "index", "--structure", "ok", "--candidates", p(&candidates), "--corpus", p(&fx.join("corpus")), "--ontology", p(&onto),
        "--alignment", p(&alignment), "--out", p(&index),
    ]);
    let out = ontoterm(&["query", "--structure", "ok", "--concept", "pompe", "--index", p(&index), "--ontology", p(&onto)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_UNKNOWN_CONCEPT"));
}

#[test]
fn table_output_has_no_color_codes() {
    let onto = fixture_dir().join("relais.ok");
    let table = ok(&["ok-check", "--ontology", p(&onto), "--format", "table"]);
    assert!(!table.contains('\x1b'));
    assert!(!table.is_empty());
}

#[test]
fn run_writes_artifacts_and_reports_stages() {
    let (dir, config) = scratch_fixture();
    ok(&["run", "--config", p(&config)]);
    assert!(dir.path().join("out/manifest.json").is_file());
    let table = ok(&["run", "--config", p(&config), "--format", "table"]);
    assert!(table.contains("export"));
    assert!(!table.contains('\x1b'));
}
