//! Suspension: every type gains two new bottom objects.

use std::sync::LazyLock;

use dashmap::DashMap;

use crate::syntax::{Ctx, Head, Name, NodeMap, PassHasher, Sub, SyntaxError, Tm, TmKind, Ty, TyKind};

/// The two poles added by a suspension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Suspension {
    pub north: Name,
    pub south: Name,
}

impl Suspension {
    /// Poles named `N` and `S`, or fresh variants when `ctx` already uses them.
    pub fn fresh_for(ctx: &Ctx) -> Suspension {
        let north = Name::fresh("N", |n| !ctx.contains(n));
        let south = Name::fresh("S", |n| !ctx.contains(n) && n != north);
        Suspension { north, south }
    }
}

struct Suspender {
    north: Tm,
    south: Tm,
    rename: fn(Name) -> Name,
    memo: NodeMap<Tm, Tm>,
}

impl Suspender {
    fn tm(&mut self, t: &Tm) -> Tm {
        if let Some(r) = self.memo.get(t) {
            return r.clone();
        }
        let out = match t.kind() {
            TmKind::Var(n) => Tm::var((self.rename)(*n)),
            TmKind::Coh(h, args) => {
                let mut new_args = Vec::with_capacity(args.len() + 2);
                new_args.push(self.north.clone());
                new_args.push(self.south.clone());
                crate::syntax::deep(|| {
                    for a in args.iter() {
                        new_args.push(self.tm(a));
                    }
                });
                Tm::coh(suspend_head(h), new_args)
            }
        };
        self.memo.insert(t.clone(), out.clone());
        out
    }

    fn ty(&mut self, a: &Ty) -> Ty {
        match a.kind() {
            TyKind::Obj => Ty::arr(Ty::obj(), self.north.clone(), self.south.clone()),
            TyKind::Arr(b, u, v) => {
                let b = self.ty(b);
                Ty::arr(b, self.tm(u), self.tm(v))
            }
        }
    }
}

fn keep(n: Name) -> Name {
    n
}

fn shift_two(n: Name) -> Name {
    Name::bound(n.level().expect("closed head") + 2)
}

static HEADS: LazyLock<DashMap<Head, Head, std::hash::BuildHasherDefault<PassHasher>>> =
    LazyLock::new(Default::default);

/// `ΣH`: the head over the suspended shape, poles at levels 0 and 1.
pub fn suspend_head(h: &Head) -> Head {
    if let Some(r) = HEADS.get(h) {
        return r.clone();
    }
    let mut s = Suspender {
        north: Tm::var(Name::bound(0)),
        south: Tm::var(Name::bound(1)),
        rename: shift_two,
        memo: NodeMap::default(),
    };
    let out = Head::new(h.shape().suspend(), s.ty(h.ty()));
    HEADS.insert(h.clone(), out.clone());
    out
}

fn suspender(s: &Suspension) -> Suspender {
    Suspender { north: Tm::var(s.north), south: Tm::var(s.south), rename: keep, memo: NodeMap::default() }
}

pub fn suspend_tm(t: &Tm, s: &Suspension) -> Tm {
    suspender(s).tm(t)
}

pub fn suspend_ty(a: &Ty, s: &Suspension) -> Ty {
    suspender(s).ty(a)
}

/// `ΣΓ = (N : *, S : *, x : ΣA, ...)`.
pub fn suspend_ctx(ctx: &Ctx) -> Result<(Ctx, Suspension), SyntaxError> {
    let s = Suspension::fresh_for(ctx);
    let mut sus = suspender(&s);
    let mut entries = vec![(s.north, Ty::obj()), (s.south, Ty::obj())];
    for (n, a) in ctx.entries() {
        entries.push((*n, sus.ty(a)));
    }
    Ok((Ctx::new(entries)?, s))
}

/// `Σσ`, sending the poles of `dom` to the poles of `cod`.
pub fn suspend_sub(sigma: &Sub, dom: &Suspension, cod: &Suspension) -> Sub {
    let mut sus = suspender(cod);
    let mut entries = vec![(dom.north, Tm::var(cod.north)), (dom.south, Tm::var(cod.south))];
    for (n, t) in sigma.entries() {
        entries.push((*n, sus.tm(t)));
    }
    Sub::new(entries)
}

/// `Σ^k t` for a closed-up term: the result lives in `Σ^k Γ` as built by
/// repeated [`suspend_ctx`].
pub fn suspend_tm_n(t: &Tm, ctx: &Ctx, k: usize) -> Result<(Tm, Ctx), SyntaxError> {
    let (mut t, mut ctx) = (t.clone(), ctx.clone());
    for _ in 0..k {
        let (c, s) = suspend_ctx(&ctx)?;
        t = suspend_tm(&t, &s);
        ctx = c;
    }
    Ok((t, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_tm;
    use crate::pasting::{compose, id, Shape};

    fn arrow_pair() -> Ctx {
        let (x, y, z) = (Name::new("x"), Name::new("y"), Name::new("z"));
        Ctx::new(vec![
            (x, Ty::obj()),
            (y, Ty::obj()),
            (Name::new("f"), Ty::arr(Ty::obj(), Tm::var(x), Tm::var(y))),
            (z, Ty::obj()),
            (Name::new("g"), Ty::arr(Ty::obj(), Tm::var(y), Tm::var(z))),
        ])
        .unwrap()
    }

    #[test]
    fn suspended_composite_is_composite_one_up() {
        let ctx = arrow_pair();
        let fg = compose(0, &[Tm::var(Name::new("f")), Tm::var(Name::new("g"))], &ctx).unwrap();
        let (sctx, s) = suspend_ctx(&ctx).unwrap();
        let sfg = suspend_tm(&fg, &s);
        check_tm(&sfg, &sctx).unwrap();
        let direct = compose(1, &[Tm::var(Name::new("f")), Tm::var(Name::new("g"))], &sctx).unwrap();
        assert_eq!(sfg, direct);
    }

    #[test]
    fn suspended_identity_is_identity() {
        let ctx = arrow_pair();
        let idf = id(&Tm::var(Name::new("f")), &ctx).unwrap();
        let (sctx, s) = suspend_ctx(&ctx).unwrap();
        assert_eq!(suspend_tm(&idf, &s), id(&Tm::var(Name::new("f")), &sctx).unwrap());
    }

    #[test]
    fn suspended_shape_shifts_levels() {
        let d1 = Shape::disc(1);
        assert_eq!(d1.suspend(), Shape::disc(2));
    }
}
