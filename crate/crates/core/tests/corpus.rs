use std::path::PathBuf;

use projrep::cohomology::exponent_of_rep;
use projrep::fixtures::{corpus_files, corpus_reps};
use projrep::io;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

#[test]
fn bundled_files_match_builders() {
    for (name, text) in corpus_files() {
        let on_disk = std::fs::read_to_string(dir().join(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(on_disk.trim_end(), text, "{name} is stale; rerun the gen_corpus example");
    }
}

#[test]
fn bundled_reps_round_trip_exactly() {
    for (name, rep) in corpus_reps() {
        let loaded = io::load_rep(&dir().join(format!("{name}.json"))).unwrap();
        assert_eq!(loaded, rep, "{name}");
        assert!(exponent_of_rep(&loaded).unwrap().is_exact(), "{name}");
    }
}

#[test]
fn corpus_covers_required_families() {
    let names: Vec<String> = corpus_files().into_iter().map(|(n, _)| n).collect();
    for n in 2..=12 {
        assert!(names.contains(&format!("twisted-z{n}.json")));
    }
    for f in ["pauli-z2z2.json", "clock-shift-z3z3.json", "clock-shift-z4z4.json", "s3-genuine.json", "q8-genuine.json", "su2-preset.json"] {
        assert!(names.iter().any(|n| n == f), "{f}");
    }
}
