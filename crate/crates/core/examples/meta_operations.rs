//! Suspension, opposites and inverses around a composite of two arrows.
//!
//!     cargo run --example meta_operations

use cattforge::kernel::check_tm;
use cattforge::metaops::{invert, opposite_ctx, opposite_tm, suspend_ctx, suspend_tm, OppositeSet};
use cattforge::pasting::{compose, PsContext, PsTree};
use cattforge::syntax::Name;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = Name::new;
    let ps = PsContext::from_tree(PsTree::node(
        vec![n("x"), n("y"), n("z")],
        vec![PsTree::leaf(n("f")), PsTree::leaf(n("g"))],
    ))?;
    let fg = compose(0, &[ps.args()[2].clone(), ps.args()[4].clone()], &ps.ctx)?;
    println!("f *0 g        : {}", check_tm(&fg, &ps.ctx)?);

    let (sctx, s) = suspend_ctx(&ps.ctx)?;
    let sfg = suspend_tm(&fg, &s);
    println!("suspended     : {}", check_tm(&sfg, &sctx)?);

    let op = OppositeSet::single(1);
    let octx = opposite_ctx(&ps.ctx, op)?;
    println!("opposite in 1 : {}", check_tm(&opposite_tm(&fg, op)?, &octx)?);

    // Composites of variables have no inverse; coherences do.
    println!("invert f *0 g : {}", invert(&fg).unwrap_err());
    let endo = ps.coh(&fg, &fg)?;
    let inv = invert(&endo)?;
    println!("inverse of a coherence: {}", check_tm(&inv, &ps.ctx)?);
    Ok(())
}
