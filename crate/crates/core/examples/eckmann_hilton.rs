//! Generates Eckmann-Hilton cells and prints their sizes.
//!
//!     cargo run --release --example eckmann_hilton -- 4

use cattforge::cli::{generate, Builtin};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3);
    for n in 2..=max {
        for k in 0..n {
            for l in (0..n).filter(|&l| l != k) {
                let a = generate(Builtin::H { n, k, l }, None)?;
                let s = a.size();
                println!("eh({n},{k},{l}): {} chars, {} distinct nodes", s.chars, s.distinct);
            }
        }
    }
    let swap = generate(Builtin::EH { n: 2, k: 1, l: 0 }, None)?;
    println!("\n{}", swap.printout());
    Ok(())
}
