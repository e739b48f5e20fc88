//! Fixed checks shared by the integration tests and the acceptance driver.
//! Each returns one `(label, outcome)` pair per item so callers can either
//! assert on all of them or print them.

use std::fmt::Debug;

use cattforge::eckmann_hilton::{eh, eh_factors, eh_padded, EhContext, EH};
use cattforge::kernel::{check_head, check_tm, check_tm_at, CohKind};
use cattforge::metaops::{opposite_tm, OppositeSet};
use cattforge::padding::{chi, unbiased, zeta};
use cattforge::pasting::{compose, disc, id, pasting_context, PsContext, PsTree, Sign};
use cattforge::syntax::{type_of, Ctx, Name, Tm, Ty};

pub type Item = (String, Result<(), String>);

fn err(e: impl Debug) -> String {
    format!("{e:?}")
}

fn n(s: &str) -> Name {
    Name::new(s)
}

fn v(s: &str) -> Tm {
    Tm::var(n(s))
}

fn expect_kind(t: &Tm, kind: CohKind) -> Result<(), String> {
    let (h, _) = t.as_coh().ok_or("not a coherence application")?;
    let got = check_head(h).map_err(err)?;
    if got == kind {
        Ok(())
    } else {
        Err(format!("head is a {got:?}, expected {kind:?}"))
    }
}

/// The unit cell `id_x -> id_x *₀ id_x` at a point.
fn unit_cell() -> Result<(), String> {
    let ctx = Ctx::new(vec![(n("x"), Ty::obj())]).map_err(err)?;
    let ps = pasting_context(&ctx).map_err(err)?;
    let idx = id(&v("x"), &ctx).map_err(err)?;
    let tgt = compose(0, &[idx.clone(), idx.clone()], &ctx).map_err(err)?;
    let u = ps.coh(&idx, &tgt).map_err(err)?;
    expect_kind(&u, CohKind::Coherence)?;
    let ty = Ty::arr(type_of(&idx, &ctx).map_err(err)?, idx, tgt);
    check_tm_at(&u, &ty, &ctx).map_err(err)
}

/// The right unitor `f *₀ id_y -> f` on an arrow.
fn right_unitor() -> Result<(), String> {
    let ctx = Ctx::new(vec![(n("x"), Ty::obj()), (n("y"), Ty::obj()), (n("f"), Ty::arr(Ty::obj(), v("x"), v("y")))])
        .map_err(err)?;
    let ps = pasting_context(&ctx).map_err(err)?;
    let idy = id(&v("y"), &ctx).map_err(err)?;
    let src = compose(0, &[v("f"), idy], &ctx).map_err(err)?;
    let rho = ps.coh(&src, &v("f")).map_err(err)?;
    expect_kind(&rho, CohKind::Coherence)?;
    let ty = Ty::arr(Ty::arr(Ty::obj(), v("x"), v("y")), src, v("f"));
    check_tm_at(&rho, &ty, &ctx).map_err(err)
}

/// Identities over `D⁰ … D⁴` and the unreduced composites over `D¹ … D⁴`.
fn discs() -> Result<(), String> {
    for k in 0..=4 {
        let d = disc(k);
        let top = v(&format!("d{k}"));
        let top_ty = type_of(&top, &d.ctx).map_err(err)?;
        let i = id(&top, &d.ctx).map_err(err)?;
        expect_kind(&i, CohKind::Coherence)?;
        check_tm_at(&i, &Ty::arr(top_ty.clone(), top.clone(), top.clone()), &d.ctx)
            .map_err(|e| format!("id over D{k}: {e:?}"))?;
        if k == 0 {
            continue;
        }
        let lo = d.boundary(Sign::Minus).map_err(err)?.comp();
        let hi = d.boundary(Sign::Plus).map_err(err)?.comp();
        let c = d.coh(&lo, &hi).map_err(err)?;
        expect_kind(&c, CohKind::Composite)?;
        check_tm_at(&c, &top_ty, &d.ctx).map_err(|e| format!("comp over D{k}: {e:?}"))?;
    }
    Ok(())
}

/// The nine-cell example tree with two 2-cells glued along `h`.
pub fn example_tree() -> PsTree<Name> {
    PsTree::node(
        vec![n("x"), n("y"), n("z")],
        vec![
            PsTree::leaf(n("f")),
            PsTree::node(vec![n("g"), n("h"), n("k")], vec![PsTree::leaf(n("a")), PsTree::leaf(n("b"))]),
        ],
    )
}

fn tree_composite() -> Result<(), String> {
    let ps = PsContext::from_tree(example_tree()).map_err(err)?;
    let names: Vec<String> = ps.ctx.names().map(|x| x.to_string()).collect();
    if names != ["x", "y", "f", "z", "g", "h", "a", "k", "b"] {
        return Err(format!("unexpected variable order {names:?}"));
    }
    let lo = ps.boundary(Sign::Minus).map_err(err)?;
    let hi = ps.boundary(Sign::Plus).map_err(err)?;
    let lo_names: Vec<String> = lo.ctx.names().map(|x| x.to_string()).collect();
    let hi_names: Vec<String> = hi.ctx.names().map(|x| x.to_string()).collect();
    if lo_names != ["x", "y", "f", "z", "g"] || hi_names != ["x", "y", "f", "z", "k"] {
        return Err(format!("unexpected boundaries {lo_names:?} / {hi_names:?}"));
    }
    let (src, tgt) = (lo.comp(), hi.comp());
    let ty = Ty::arr(type_of(&src, &ps.ctx).map_err(err)?, src, tgt);
    let c = ps.comp();
    expect_kind(&c, CohKind::Composite)?;
    check_tm_at(&c, &ty, &ps.ctx).map_err(err)
}

fn interchangers() -> Result<(), String> {
    for k in [2, 3] {
        for (label, c) in [("zeta", zeta(k)), ("chi", chi(k))] {
            let c = c.map_err(|e| format!("{label}({k}): {e:?}"))?;
            expect_kind(&c.term, CohKind::Coherence).map_err(|e| format!("{label}({k}): {e}"))?;
            check_tm(&c.term, &c.ps.ctx).map_err(|e| format!("{label}({k}): {e:?}"))?;
        }
    }
    Ok(())
}

pub fn kernel_golden() -> Vec<Item> {
    vec![
        ("unit cell id_x -> id_x *0 id_x".into(), unit_cell()),
        ("right unitor f *0 id_y -> f".into(), right_unitor()),
        ("identities and composites over discs".into(), discs()),
        ("composite of the nine-cell tree".into(), tree_composite()),
        ("interchangers zeta/chi in dims 2, 3".into(), interchangers()),
    ]
}

/// Self-duality of unbiased paddings and the p/q swap, for `n ≤ max_n`.
pub fn self_duality(max_n: usize) -> Vec<Item> {
    let mut out = Vec::new();
    for dim in 2..=max_n {
        for k in 0..dim {
            for l in 0..dim {
                if k != l {
                    out.push((format!("unbiased({dim},{k},{l})"), duality_at(dim, k, l)));
                }
            }
        }
    }
    out
}

fn duality_at(dim: usize, k: usize, l: usize) -> Result<(), String> {
    let pad = unbiased(dim, k, l).map_err(err)?;
    for i in pad.height().max(2)..=pad.top() {
        for r in 1..=dim + 1 {
            let op = opposite_tm(pad.theta(i), OppositeSet::single(r)).map_err(err)?;
            if &op != pad.theta(i) {
                return Err(format!("theta({i}) not fixed by op{{{r}}}"));
            }
        }
    }
    for i in pad.height()..pad.top() {
        let (p, q) = (pad.data.p(i), pad.data.q(i));
        for r in 1..=dim + 1 {
            let op = OppositeSet::single(r);
            let (want_p, want_q) = if r == i + 1 { (q, p) } else { (p, q) };
            if &opposite_tm(p, op).map_err(err)? != want_p || &opposite_tm(q, op).map_err(err)? != want_q {
                return Err(format!("p/q at level {i} under op{{{r}}}"));
            }
        }
    }
    Ok(())
}

fn pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |k| (0..dim).filter(move |&l| l != k).map(move |l| (k, l)))
}

fn eh_at(dim: usize, k: usize, l: usize) -> Result<(), String> {
    let e = EhContext::new(dim).map_err(err)?;
    let t = eh(dim, k, l).map_err(err)?;
    check_tm_at(&t, &e.eh_type(k, l).map_err(err)?, &e.ctx).map_err(err)
}

pub fn eh_cells(max_n: usize) -> Vec<Item> {
    (2..=max_n).flat_map(|dim| pairs(dim).map(move |(k, l)| (format!("eh({dim},{k},{l})"), eh_at(dim, k, l)))).collect()
}

fn commutativity_at(dim: usize, k: usize, l: usize) -> Result<(), String> {
    let e = EhContext::new(dim).map_err(err)?;
    let t = EH(dim, k, l).map_err(err)?;
    check_tm_at(&t, &e.commutativity_type(k).map_err(err)?, &e.ctx).map_err(err)
}

pub fn commutativity_cells() -> Vec<Item> {
    let mut cases: Vec<(usize, usize, usize)> =
        (2..=3).flat_map(|dim| pairs(dim).map(move |(k, l)| (dim, k, l))).collect();
    cases.push((4, 3, 2));
    let mut out: Vec<Item> =
        cases.into_iter().map(|(dim, k, l)| (format!("EH({dim},{k},{l})"), commutativity_at(dim, k, l))).collect();
    out.push(("EH(2,1,0) step by step".into(), commutativity_steps()));
    out
}

/// `EH(2,1,0)` is the composite of `eh(2,1,0)` and a second factor whose
/// source is the target of the first.
fn commutativity_steps() -> Result<(), String> {
    let e = EhContext::new(2).map_err(err)?;
    let (h, back) = eh_factors(2, 1, 0).map_err(err)?;
    let th = check_tm(&h, &e.ctx).map_err(err)?;
    let tb = check_tm(&back, &e.ctx).map_err(err)?;
    let (Some((_, _, h_tgt)), Some((_, b_src, b_tgt))) = (th.as_arr(), tb.as_arr()) else {
        return Err("factors are not arrows".into());
    };
    if h_tgt != b_src {
        return Err("target of the first factor differs from the source of the second".into());
    }
    let swapped = compose(1, &[e.b(), e.a()], &e.ctx).map_err(err)?;
    if b_tgt != &swapped {
        return Err("second factor does not end at b *1 a".into());
    }
    let whole = compose(2, &[h, back], &e.ctx).map_err(err)?;
    check_tm_at(&whole, &e.commutativity_type(1).map_err(err)?, &e.ctx).map_err(err)
}

fn padded_at(p: usize, k: usize, l: usize) -> Result<(), String> {
    let e = EhContext::new(3).map_err(err)?;
    let t = eh_padded(3, p, k, l).map_err(err)?;
    check_tm_at(&t, &e.padded_type(p, k, l).map_err(err)?, &e.ctx).map_err(err)
}

pub fn padded_cells() -> Vec<Item> {
    let mut out = Vec::new();
    for p in 0..3 {
        for (k, l) in pairs(3) {
            if p != k && p != l {
                out.push((format!("eh_padded(3,{p},{k},{l})"), padded_at(p, k, l)));
            }
        }
    }
    out
}
