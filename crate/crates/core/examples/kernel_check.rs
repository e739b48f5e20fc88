//! Builds the right unitor on an arrow and asks the kernel about it.
//!
//!     cargo run --example kernel_check

use cattforge::kernel::{check_head, check_tm};
use cattforge::pasting::{compose, id, pasting_context};
use cattforge::syntax::{Ctx, Name, Tm, Ty};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (x, y, f) = (Name::new("x"), Name::new("y"), Name::new("f"));
    let ctx = Ctx::new(vec![(x, Ty::obj()), (y, Ty::obj()), (f, Ty::arr(Ty::obj(), Tm::var(x), Tm::var(y)))])?;
    let ps = pasting_context(&ctx)?;

    let padded = compose(0, &[Tm::var(f), id(&Tm::var(y), &ctx)?], &ctx)?;
    let unitor = ps.coh(&padded, &Tm::var(f))?;
    println!("term: {unitor}");
    println!("type: {}", check_tm(&unitor, &ctx)?);
    println!("side condition: {:?}", check_head(unitor.as_coh().unwrap().0)?);

    // The reverse direction with a non-full source is rejected.
    let bad = ps.coh(&id(&Tm::var(y), &ctx)?, &padded)?;
    match check_tm(&bad, &ctx) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
