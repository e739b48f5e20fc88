//! Padding twice versus padding once: composes the data of two unbiased
//! paddings and prints the comparison cells at each level.
//!
//!     cargo run --example iterated_padding -- 3 0 1 2

use cattforge::padding::{compose_padding, point_repadding_over, unbiased, unbiased_filtration};
use cattforge::syntax::{type_of, Tm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (n, p, k, l) = match args[..] {
        [n, p, k, l] => (n, p, k, l),
        _ => (3, 0, 1, 2),
    };
    let inner = unbiased(n, k, l)?;
    let outer = unbiased(n, p, k)?;
    let filt = unbiased_filtration(n, l, p.min(k).min(l) + 1)?;
    let composed = compose_padding(&filt, &inner, &outer)?;
    println!("pad ({k},{l}) then ({p},{k}): levels {}..={}", filt.height(), filt.top());
    for i in filt.height()..=filt.top() {
        let ty = type_of(composed.mu(i), filt.ctx(i))?;
        let is_id = ty.src() == ty.tgt();
        println!("  mu at level {i}: {} nodes, endpoints equal: {is_id}", size(composed.mu(i)));
    }
    let direct = unbiased(n, p, l)?;
    let rep = point_repadding_over(&composed.padding, &direct)?;
    println!("repadding onto ({p},{l}) at the top: {} nodes", size(rep.top()));
    Ok(())
}

fn size(t: &Tm) -> usize {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![t.clone()];
    while let Some(t) = stack.pop() {
        if seen.insert(t.id()) {
            if let Some((_, args)) = t.as_coh() {
                stack.extend(args.iter().cloned());
            }
        }
    }
    seen.len()
}
