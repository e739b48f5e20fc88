//! Runs the bundled `.catt` scripts and a small size table.
//!
//!     cargo run --example scripts

use std::path::Path;

use cattforge::cli::{run_source, size_report, Options};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scripts");
    for name in ["basics.catt", "eckmann_hilton.catt", "ill_typed.catt"] {
        let src = std::fs::read_to_string(dir.join(name))?;
        let outcome = run_source(name, &src, &Options::default());
        println!("{name}: {} checked, {} errors", outcome.checked.len(), outcome.reports.len());
        for r in &outcome.reports {
            println!("  {r}");
        }
    }
    println!();
    print!("{}", size_report(&[(2, 1, 0), (3, 1, 0), (3, 2, 1), (3, 2, 0)], None).render());
    Ok(())
}
