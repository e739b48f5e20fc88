//! The hexagonal composite: naturality of a ternary composite, used to
//! build repaddings dimension by dimension.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use super::lift::{lift_ctx, lift_tm, VarSet};
use super::suspend::suspend_tm_n;
use super::MetaError;
use crate::pasting::{compose, match_locmax};
use crate::syntax::{Ctx, Name, Tm, Ty};

struct Hexagon {
    ctx: Ctx,
    term: Tm,
    cells: [Name; 3],
}

static HEXAGONS: LazyLock<DashMap<usize, Arc<Hexagon>>> = LazyLock::new(DashMap::new);

fn hexagon(k: usize) -> Result<Arc<Hexagon>, MetaError> {
    if let Some(h) = HEXAGONS.get(&k) {
        return Ok(h.clone());
    }
    let n = Name::new;
    let v = |s: &str| Tm::var(Name::new(s));
    let o = Ty::obj;
    let three = Ctx::new(vec![
        (n("x"), o()),
        (n("y"), o()),
        (n("f"), Ty::arr(o(), v("x"), v("y"))),
        (n("z"), o()),
        (n("g"), Ty::arr(o(), v("y"), v("z"))),
        (n("w"), o()),
        (n("h"), Ty::arr(o(), v("z"), v("w"))),
    ])?;
    let set: VarSet = ["f", "y", "g", "z", "h"].iter().map(|s| n(s)).collect();
    let fgh = compose(0, &[v("f"), v("g"), v("h")], &three)?;
    let lifted = lift_ctx(&three, &set)?;
    let t = lift_tm(&fgh, &three, &set)?;
    let (term, ctx) = suspend_tm_n(&t, &lifted.ctx, k)?;
    let hex = Arc::new(Hexagon { ctx, term, cells: [n("f").arrow(), n("g").arrow(), n("h").arrow()] });
    HEXAGONS.insert(k, hex.clone());
    Ok(hex)
}

/// `hexcomp⟦a, b, c⟧`: the `k`-fold suspended naturality of `f *₀ g *₀ h`
/// along all of its variables but the endpoints, applied to three cells of
/// dimension `k + 2`.
pub fn hexcomp(a: &Tm, b: &Tm, c: &Tm, k: usize, ambient: &Ctx) -> Result<Tm, MetaError> {
    let hex = hexagon(k)?;
    let sigma = match_locmax(&hex.ctx, &hex.cells, &[a.clone(), b.clone(), c.clone()], ambient)?;
    Ok(sigma.apply_tm(&hex.term)?)
}
