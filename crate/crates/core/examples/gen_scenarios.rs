//! Regenerates the bundled scenario files:
//! `cargo run -p balltree --example gen_scenarios -- scenarios`

use std::path::PathBuf;

use balltree::bench::{catalog, save_spec};

fn main() -> balltree::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "scenarios".into()));
    std::fs::create_dir_all(&dir)?;
    for (stem, spec) in catalog::bundled() {
        let path = dir.join(format!("{stem}.scenario"));
        save_spec(&spec, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}
