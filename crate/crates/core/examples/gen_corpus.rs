//! Regenerate the bundled corpus: `cargo run --example gen_corpus`.

use std::path::Path;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
    std::fs::create_dir_all(&dir)?;
    for (name, text) in projrep::fixtures::corpus_files() {
        std::fs::write(dir.join(&name), text + "\n")?;
        println!("{name}");
    }
    Ok(())
}
