use std::path::{Path, PathBuf};

use projrep::io::{self, IoError};

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("projrep-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

#[test]
fn minimal_z2_group() {
    let p = scratch("z2.json", r#"{"order": 2, "table": [[0, 1], [1, 0]]}"#);
    assert_eq!(io::load_group(&p).unwrap().order(), 2);
}

#[test]
fn pauli_rep_loads() {
    let rep = io::load_rep(&corpus("pauli-z2z2.json")).unwrap();
    assert_eq!(rep.group().order(), 4);
    assert_eq!(rep.dim(), 2);
}

#[test]
fn non_unitary_matrix_names_element() {
    let text = r#"{"group": {"order": 2, "table": [[0, 1], [1, 0]]}, "dim": 1,
        "matrices": [[[[1.0, 0.0]]], [[[2.0, 0.0]]]]}"#;
    let p = scratch("bad-rep.json", text);
    match io::load_rep(&p) {
        Err(IoError::Validation(msg)) => assert!(msg.contains("element 1"), "{msg}"),
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn non_group_table_rejected() {
    let p = scratch("bad-group.json", r#"{"order": 2, "table": [[0, 1], [1, 1]]}"#);
    assert!(matches!(io::load_group(&p), Err(IoError::Validation(_))));
}

#[test]
fn parse_error_reports_line() {
    let p = scratch("broken.json", "{\n  \"order\": 2,\n  \"table\": [[0, 1],\n}");
    match io::load_group(&p) {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn missing_file() {
    assert!(matches!(io::load_rep(Path::new("/nonexistent/rep.json")), Err(IoError::Read { .. })));
}

#[test]
fn exponent_round_trip() {
    let d = io::load_exponent(&corpus("exponent-z2-half.json")).unwrap();
    let back = io::exponent_from_file(&io::exponent_to_file(&d)).unwrap();
    assert_eq!(back, d);
}
