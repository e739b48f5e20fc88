//! The unbiased padding of a cell and its symmetry under opposites.
//!
//!     cargo run --example padding -- 3 2 0

use cattforge::metaops::{opposite_tm, OppositeSet};
use cattforge::padding::unbiased;
use cattforge::syntax::type_of;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, k, l) = match args[..] {
        [n, k, l] => (n, k, l),
        _ => (3, 2, 0),
    };
    let pad = unbiased(n, k, l)?;
    println!("unbiased padding ({n},{k},{l}), levels {}..={}", pad.height(), pad.top());
    for i in pad.height()..=pad.top() {
        let th = pad.theta(i);
        let ty = type_of(th, pad.filtration.ctx(i))?;
        let fixed = (1..=n + 1).all(|r| opposite_tm(th, OppositeSet::single(r)).as_ref() == Ok(th));
        println!("  level {i}: type {ty}; fixed by every single opposite: {fixed}");
    }
    Ok(())
}
