//! Higher Eckmann-Hilton cells: `ehⁿ_{k,l} : a *_k b -> Θⁿ_{k,l}⟦a *_l b⟧`
//! relating composites in two directions, and the commutativity cells
//! `EHⁿ_{k,l} : a *_k b -> b *_k a` built from them.
//!
//! Every cell is assembled from kernel-checked steps; a failing step is
//! reported by name.

use std::sync::LazyLock;

use dashmap::DashMap;
use thiserror::Error;

use crate::kernel::{check_tm, check_tm_at, Diagnostic};
use crate::metaops::{invert, lift_tm, opposite_ctx, opposite_tm, suspend_tm_n, MetaError, OppositeSet, VarSet};
use crate::padding::{
    compose_padding, point, point_repadding, point_repadding_over, suspend_padding, unbiased, unbiased_filtration,
    unbiasing_repadding, unitor, xi, zeta, FiltrationMorphism, Flavor, PaddingError,
};
use crate::pasting::{coh_over, compose, id, identity, match_locmax, PastingError, Shape};
use crate::syntax::{budget_exhausted, type_of, Ctx, Name, Sub, SyntaxError, Tm, Ty};

#[derive(Debug, Error)]
pub enum EhError {
    #[error("indices out of range: {0}")]
    Range(String),
    #[error("node budget exceeded while building {stage}")]
    BudgetExceeded { stage: String },
    #[error("step `{stage}` is ill-typed: {source}")]
    StepFailed { stage: String, source: Diagnostic },
    #[error("naturality could not be assembled: {0}")]
    NaturalityFailed(MetaError),
    #[error(transparent)]
    Padding(#[from] PaddingError),
    #[error(transparent)]
    Meta(MetaError),
    #[error(transparent)]
    Pasting(#[from] PastingError),
}

impl From<MetaError> for EhError {
    fn from(e: MetaError) -> Self {
        match e {
            MetaError::BudgetExceeded => EhError::BudgetExceeded { stage: "a lift".into() },
            e => EhError::Meta(e),
        }
    }
}

impl From<SyntaxError> for EhError {
    fn from(e: SyntaxError) -> Self {
        EhError::Pasting(e.into())
    }
}

impl From<Diagnostic> for EhError {
    fn from(d: Diagnostic) -> Self {
        EhError::StepFailed { stage: "final".into(), source: d }
    }
}

pub type Result<T, E = EhError> = std::result::Result<T, E>;

fn nm(s: &str) -> Name {
    Name::new(s)
}

/// `𝔼ⁿ = (x : ⋆, a, b : idⁿ⁻¹_x -> idⁿ⁻¹_x)` with the cells' target types.
#[derive(Clone, Debug)]
pub struct EhContext {
    pub n: usize,
    pub ctx: Ctx,
}

impl EhContext {
    pub fn new(n: usize) -> Result<EhContext> {
        if n < 1 {
            return Err(EhError::Range("cells need dimension at least 1".into()));
        }
        let p = &point().ctx;
        let x = Tm::var(nm("x"));
        let idn = identity(&x, n - 1, p)?;
        let base = type_of(&idn, p)?;
        let ty = Ty::arr(base, idn.clone(), idn);
        let ctx = p.extend(nm("a"), ty.clone())?.extend(nm("b"), ty)?;
        Ok(EhContext { n, ctx })
    }

    pub fn a(&self) -> Tm {
        Tm::var(nm("a"))
    }

    pub fn b(&self) -> Tm {
        Tm::var(nm("b"))
    }

    /// `a *_k b`.
    pub fn product(&self, k: usize) -> Result<Tm> {
        Ok(compose(k, &[self.a(), self.b()], &self.ctx)?)
    }

    /// `Θⁿ_{p,k}⟦t⟧`.
    pub fn padded(&self, p: usize, k: usize, t: &Tm) -> Result<Tm> {
        Ok(unbiased(self.n, p, k)?.theta_at(self.n, t, &self.ctx)?)
    }

    fn arrow(&self, src: Tm, tgt: Tm) -> Result<Ty> {
        Ok(Ty::arr(type_of(&src, &self.ctx)?, src, tgt))
    }

    /// `Eⁿ_{k,l} = a *_k b -> Θⁿ_{k,l}⟦a *_l b⟧`.
    pub fn eh_type(&self, k: usize, l: usize) -> Result<Ty> {
        let tgt = self.padded(k, l, &self.product(l)?)?;
        self.arrow(self.product(k)?, tgt)
    }

    /// `Θⁿ_{p,k}⟦a *_k b⟧ -> Θⁿ_{p,l}⟦a *_l b⟧`.
    pub fn padded_type(&self, p: usize, k: usize, l: usize) -> Result<Ty> {
        let side = |k| -> Result<Tm> {
            let t = self.product(k)?;
            if p == k {
                Ok(t)
            } else {
                self.padded(p, k, &t)
            }
        };
        self.arrow(side(k)?, side(l)?)
    }

    /// `a *_k b -> b *_k a`.
    pub fn commutativity_type(&self, k: usize) -> Result<Ty> {
        let swapped = compose(k, &[self.b(), self.a()], &self.ctx)?;
        self.arrow(self.product(k)?, swapped)
    }

    /// Instantiates a term over `𝔼ⁿ` (or a context with cells named `a`, `b`
    /// and whatever they force) at the given cells.
    fn at(&self, pattern: &Ctx, cells: &[(&str, Tm)]) -> Result<Sub> {
        let names: Vec<Name> = cells.iter().map(|(n, _)| nm(n)).collect();
        let args: Vec<Tm> = cells.iter().map(|(_, t)| t.clone()).collect();
        Ok(match_locmax(pattern, &names, &args, &self.ctx)?)
    }
}

fn validate(n: usize, k: usize, l: usize) -> Result<()> {
    if n < 2 || k >= n || l >= n || k == l {
        return Err(EhError::Range(format!("need k ≠ l < n with n ≥ 2, got n={n}, k={k}, l={l}")));
    }
    Ok(())
}

/// Checks one named step and returns it.
fn step(stage: &str, t: Tm, ctx: &Ctx) -> Result<Tm> {
    if budget_exhausted() {
        return Err(EhError::BudgetExceeded { stage: stage.into() });
    }
    check_tm(&t, ctx).map_err(|source| EhError::StepFailed { stage: stage.into(), source })?;
    Ok(t)
}

fn finish(stage: &str, t: Tm, ty: &Ty, ctx: &Ctx) -> Result<Tm> {
    if budget_exhausted() {
        return Err(EhError::BudgetExceeded { stage: stage.into() });
    }
    check_tm_at(&t, ty, ctx).map_err(|source| EhError::StepFailed { stage: stage.into(), source })?;
    Ok(t)
}

/// `(ρⁿ)⁻¹` or one of its variants, applied to a cell.
fn unitor_at(e: &EhContext, n: usize, flavor: Flavor, cell: &Tm) -> Result<Tm> {
    let (u, ctx) = unitor(n, flavor)?;
    let top = nm(&format!("d{n}"));
    let s = match_locmax(&ctx, &[top], std::slice::from_ref(cell), &e.ctx)?;
    Ok(s.apply_tm(&invert(&u)?)?)
}

/// Which of the two base cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    /// `ehⁿ_{n-1,0}`.
    TopBottom,
    /// `ehⁿ_{0,n-1}`.
    BottomTop,
}

/// The base cases, each a four-step composite of unitors, unbiasing
/// repaddings, pseudofunctoriality and an interchanger.
pub fn eh_base(n: usize, which: Base) -> Result<Tm> {
    if n < 2 {
        return Err(EhError::Range("base cases need n ≥ 2".into()));
    }
    let e = EhContext::new(n)?;
    let c = &e.ctx;
    let x = Tm::var(nm("x"));
    let idn = identity(&x, n, c)?;
    let (a, b) = (e.a(), e.b());
    let z = zeta(n)?.apply(0, &[a.clone(), b.clone()], c)?;
    let top = n - 1;
    let out = match which {
        Base::TopBottom => {
            let ra = compose(0, &[a.clone(), idn.clone()], c)?;
            let lb = compose(0, &[idn.clone(), b.clone()], c)?;
            let x1 = step(
                "unitors",
                compose(top, &[unitor_at(&e, n, Flavor::Rho, &a)?, unitor_at(&e, n, Flavor::Lambda, &b)?], c)?,
                c,
            )?;
            let target = unbiased(n, n - 1, 0)?;
            let filt = &target.filtration;
            let rep = |fl, t: &Tm| -> Result<Tm> {
                let r = unbiasing_repadding(n, fl)?;
                Ok(filt.at(n, t, c)?.apply_tm(r.top())?)
            };
            let x2 = step("repaddings", compose(top, &[rep(Flavor::Rho, &ra)?, rep(Flavor::Lambda, &lb)?], c)?, c)?;
            let (xi_t, xi_ctx) = xi(n, n - 1, 0)?;
            let x3 = step(
                "pseudofunctoriality",
                e.at(&xi_ctx, &[("v", ra.clone()), ("w", lb.clone())])?.apply_tm(&xi_t)?,
                c,
            )?;
            let lifted = lift_tm(target.theta(n), filt.ctx(n), &single(filt.var(n)))?;
            let up = &filt.lifted(n)?.ctx;
            let x4 = step("interchange", match_locmax(up, &[filt.var(n).arrow()], &[z], c)?.apply_tm(&lifted)?, c)?;
            compose(n, &[x1, x2, x3, x4], c)?
        }
        Base::BottomTop => {
            let y1 = step("interchange", invert(&z)?, c)?;
            let y2 = step(
                "unitors",
                compose(
                    top,
                    &[unitor_at(&e, n, Flavor::RhoTilde, &a)?, unitor_at(&e, n, Flavor::LambdaTilde, &b)?],
                    c,
                )?,
                c,
            )?;
            let target = unbiased(n, 0, n - 1)?;
            let filt = &target.filtration;
            let rep = |fl, t: &Tm| -> Result<Tm> {
                let r = unbiasing_repadding(n, fl)?;
                Ok(filt.at(n, t, c)?.apply_tm(r.top())?)
            };
            let y3 =
                step("repaddings", compose(top, &[rep(Flavor::RhoTilde, &a)?, rep(Flavor::LambdaTilde, &b)?], c)?, c)?;
            let (xi_t, xi_ctx) = xi(n, 0, n - 1)?;
            let y4 =
                step("pseudofunctoriality", e.at(&xi_ctx, &[("v", a.clone()), ("w", b.clone())])?.apply_tm(&xi_t)?, c)?;
            compose(n, &[y1, y2, y3, y4], c)?
        }
    };
    let (k, l) = if which == Base::TopBottom { (n - 1, 0) } else { (0, n - 1) };
    finish("base case", out, &e.eh_type(k, l)?, c)
}

fn single(n: Name) -> VarSet {
    std::iter::once(n).collect()
}

/// `ehⁿ⁺¹_{k+1,l+1} = Σehⁿ_{k,l} *ₙ Πⁿ_{Σ(k,l)->(k+1,l+1)}`.
pub fn eh_suspend(cell: &Tm, n: usize, k: usize, l: usize) -> Result<Tm> {
    validate(n, k, l)?;
    let lo = EhContext::new(n)?;
    let e = EhContext::new(n + 1)?;
    let c = &e.ctx;
    let (s, sctx) = suspend_tm_n(cell, &lo.ctx, 1)?;
    let lifted = step("suspension", e.at(&sctx, &[("a", e.a()), ("b", e.b())])?.apply_tm(&s)?, c)?;
    let target = unbiased(n + 1, k + 1, l + 1)?;
    let base = unbiased(n, k, l)?;
    let suspended = suspend_padding(&base)?;
    let psi = FiltrationMorphism::by_matching(target.filtration.clone(), suspended.filtration.clone())?;
    let moved = suspended.transport(&psi)?;
    let rep = point_repadding(&moved, &target)?;
    let at = target.filtration.at(n + 1, &e.product(l + 1)?, c)?;
    let pi = step("repadding", at.apply_tm(rep.top())?, c)?;
    finish("suspension step", compose(n + 1, &[lifted, pi], c)?, &e.eh_type(k + 1, l + 1)?, c)
}

/// `ehⁿ⁺¹_{k,l}` from `ehⁿ_{k,l}` through the inverse naturality square of
/// `ehⁿ_{k,l}` along its two cells, conjugated into place by coherences over
/// the point.
pub fn eh_naturality_step(cell: &Tm, n: usize, k: usize, l: usize) -> Result<Tm> {
    validate(n, k, l)?;
    let lo = EhContext::new(n)?;
    let e = EhContext::new(n + 1)?;
    let c = &e.ctx;
    let pt = point();
    let x = Tm::var(nm("x"));
    let idn = identity(&x, n, &pt.ctx)?;
    let pad = unbiased(n + 1, k, l)?;
    let (p, q) = (pad.data.p(n).clone(), pad.data.q(n).clone());

    let at_ids = Sub::new(vec![(nm("x"), x.clone()), (nm("a"), idn.clone()), (nm("b"), idn.clone())]);
    let degenerate = at_ids.apply_tm(cell)?;
    let prod = e.product(k)?;
    let glued3 = Shape::glued(n, &[n + 1; 3]);

    let unit = coh_over(
        &Shape::disc(n + 1),
        std::slice::from_ref(&prod),
        c,
        |f, _| Ok(f[0].clone()),
        |f, cx| {
            let t = type_of(&f[0], cx)?.tgt().unwrap().clone();
            compose(n, &[f[0].clone(), id(&t, cx)?], cx)
        },
    )?;
    let s1 = step("unitor", unit, c)?;
    let id_prod = id(&compose(k, &[idn.clone(), idn.clone()], &pt.ctx)?, &pt.ctx)?;
    let xi1 = pt.coh(&id_prod, &compose(n, &[degenerate.clone(), q.clone()], &pt.ctx)?)?;
    let s2 = step("introduce", compose(n, &[prod.clone(), xi1], c)?, c)?;
    let s3 = step(
        "associate",
        coh_over(
            &glued3,
            &[prod.clone(), degenerate.clone(), q.clone()],
            c,
            |f, cx| compose(n, &[f[0].clone(), compose(n, &f[1..3], cx)?], cx),
            |f, cx| compose(n, &[compose(n, &f[0..2], cx)?, f[2].clone()], cx),
        )?,
        c,
    )?;

    let set: VarSet = [nm("a"), nm("b")].into_iter().collect();
    let nat = lift_tm(cell, &lo.ctx, &set).map_err(|err| match err {
        MetaError::BudgetExceeded => EhError::BudgetExceeded { stage: "naturality".into() },
        err => EhError::NaturalityFailed(err),
    })?;
    let back = invert(&nat).map_err(EhError::NaturalityFailed)?;
    let mut entries = vec![(nm("x"), x.clone())];
    for v in ["a", "b"] {
        let v = nm(v);
        entries.extend([(v.minus(), idn.clone()), (v.plus(), idn.clone()), (v.arrow(), Tm::var(v))]);
    }
    let back = Sub::new(entries).apply_tm(&back)?;
    let back = step("naturality", back, c)?;
    let padded = type_of(&back, c)?.tgt().unwrap().clone();
    let (_, parts) = padded.as_coh().ok_or_else(|| EhError::Range("naturality target is not a composite".into()))?;
    let lifted_theta = parts.last().unwrap().clone();
    let s4 = step("naturality", compose(n, &[back, q.clone()], c)?, c)?;
    let s5 = step(
        "reassociate",
        coh_over(
            &glued3,
            &[degenerate.clone(), lifted_theta.clone(), q.clone()],
            c,
            |f, cx| compose(n, &[compose(n, &f[0..2], cx)?, f[2].clone()], cx),
            |f, cx| compose(n, f, cx),
        )?,
        c,
    )?;
    let xi2 = pt.coh(&degenerate, &p)?;
    let s6 = step("eliminate", compose(n, &[xi2, lifted_theta, q], c)?, c)?;
    finish("naturality step", compose(n + 1, &[s1, s2, s3, s4, s5, s6], c)?, &e.eh_type(k, l)?, c)
}

static CACHE: LazyLock<DashMap<(usize, usize, usize), Tm>> = LazyLock::new(DashMap::new);

/// `ehⁿ_{k,l}`: strip `min(k,l)` by suspension, then climb from a base case
/// by naturality.
pub fn eh(n: usize, k: usize, l: usize) -> Result<Tm> {
    validate(n, k, l)?;
    if let Some(t) = CACHE.get(&(n, k, l)) {
        return Ok(t.clone());
    }
    let m = k.min(l);
    let out = if m > 0 {
        eh_suspend(&eh(n - 1, k - 1, l - 1)?, n - 1, k - 1, l - 1)?
    } else if k.max(l) == n - 1 {
        eh_base(n, if k > l { Base::TopBottom } else { Base::BottomTop })?
    } else {
        eh_naturality_step(&eh(n - 1, k, l)?, n - 1, k, l)?
    };
    CACHE.insert((n, k, l), out.clone());
    Ok(out)
}

/// The two factors of `EHⁿ_{k,l}`: `ehⁿ_{k,l}⟦a,b⟧` and the inverse of
/// the opposite cell at `⟦b,a⟧`.
pub fn eh_factors(n: usize, k: usize, l: usize) -> Result<(Tm, Tm)> {
    let e = EhContext::new(n)?;
    let h = eh(n, k, l)?;
    let op = OppositeSet::single(l + 1);
    let dual = opposite_tm(&h, op)?;
    let dual_ctx = opposite_ctx(&e.ctx, op)?;
    let swap = match_locmax(&dual_ctx, &[nm("a"), nm("b")], &[e.b(), e.a()], &e.ctx)?;
    let back = invert(&swap.apply_tm(&dual)?)?;
    Ok((h, back))
}

/// `EHⁿ_{k,l} = ehⁿ_{k,l}⟦a,b⟧ *ₙ ((ehⁿ_{k,l})^{op{l+1}}⟦b,a⟧)⁻¹`.
#[allow(non_snake_case)]
pub fn EH(n: usize, k: usize, l: usize) -> Result<Tm> {
    validate(n, k, l)?;
    let e = EhContext::new(n)?;
    let (h, back) = eh_factors(n, k, l)?;
    finish("commutativity", compose(n, &[h, back], &e.ctx)?, &e.commutativity_type(k)?, &e.ctx)
}

/// `ehⁿ_{p,k,l} : Θⁿ_{p,k}⟦a *_k b⟧ -> Θⁿ_{p,l}⟦a *_l b⟧`.
pub fn eh_padded(n: usize, p: usize, k: usize, l: usize) -> Result<Tm> {
    validate(n, k, l)?;
    if p >= n {
        return Err(EhError::Range(format!("padding direction {p} is not below {n}")));
    }
    let e = EhContext::new(n)?;
    let out = if p == k {
        eh(n, k, l)?
    } else if p == l {
        invert(&eh(n, l, k)?)?
    } else {
        padded_through_composite(&e, p, k, l)?
    };
    finish("padded cell", out, &e.padded_type(p, k, l)?, &e.ctx)
}

/// `(Θ_{p,k}↑v)⟦eh_{k,l}⟧ *ₙ μ_{p,k,l}⟦a *_l b⟧ *ₙ Π_{(p,k)□(k,l)->(p,l)}⟦a *_l b⟧`
/// for pairwise distinct `p`, `k`, `l`.
fn padded_through_composite(e: &EhContext, p: usize, k: usize, l: usize) -> Result<Tm> {
    let (n, c) = (e.n, &e.ctx);
    let inner = unbiased(n, k, l)?;
    let outer = unbiased(n, p, k)?;
    let filt = unbiased_filtration(n, l, p.min(k).min(l) + 1)?;
    let composed = compose_padding(&filt, &inner, &outer)?;
    let rep = point_repadding_over(&composed.padding, &*unbiased(n, p, l)?)?;

    let f = &outer.filtration;
    let v = f.var(n);
    let lifted = lift_tm(outer.theta(n), f.ctx(n), &single(v))?;
    let at_eh = match_locmax(&f.lifted(n)?.ctx, &[v.arrow()], &[eh(n, k, l)?], c)?;
    let conjugated = step("lifted eh", at_eh.apply_tm(&lifted)?, c)?;
    let at = filt.at(n, &e.product(l)?, c)?;
    let mu = step("composite padding", at.apply_tm(composed.mu(n))?, c)?;
    let pi = step("repadding", at.apply_tm(rep.top())?, c)?;
    Ok(compose(n, &[conjugated, mu, pi], c)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_types_are_valid() {
        for n in 2..=4 {
            let e = EhContext::new(n).unwrap();
            for k in 0..n {
                for l in 0..n {
                    if k != l {
                        crate::kernel::check_ty(&e.eh_type(k, l).unwrap(), &e.ctx).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn base_cases_in_dimension_two() {
        eh_base(2, Base::TopBottom).unwrap();
        eh_base(2, Base::BottomTop).unwrap();
    }

    #[test]
    fn suspension_step_from_dimension_two() {
        let t = eh_suspend(&eh(2, 1, 0).unwrap(), 2, 1, 0).unwrap();
        let e = EhContext::new(3).unwrap();
        check_tm_at(&t, &e.eh_type(2, 1).unwrap(), &e.ctx).unwrap();
    }

    #[test]
    fn naturality_step_from_dimension_two() {
        let t = eh_naturality_step(&eh(2, 1, 0).unwrap(), 2, 1, 0).unwrap();
        let e = EhContext::new(3).unwrap();
        check_tm_at(&t, &e.eh_type(1, 0).unwrap(), &e.ctx).unwrap();
    }

    #[test]
    fn commutativity_in_dimension_two() {
        EH(2, 1, 0).unwrap();
        EH(2, 0, 1).unwrap();
    }

    #[test]
    fn padded_cells_reduce_to_eh_on_the_diagonal() {
        assert_eq!(eh_padded(2, 1, 1, 0).unwrap(), eh(2, 1, 0).unwrap());
        assert_eq!(eh_padded(2, 0, 1, 0).unwrap(), invert(&eh(2, 0, 1).unwrap()).unwrap());
    }

    #[test]
    fn padded_cell_through_the_composite_padding() {
        let e = EhContext::new(4).unwrap();
        let t = eh_padded(4, 3, 1, 2).unwrap();
        check_tm_at(&t, &e.padded_type(3, 1, 2).unwrap(), &e.ctx).unwrap();
    }

    #[test]
    fn range_is_enforced() {
        assert!(matches!(eh(2, 1, 1), Err(EhError::Range(_))));
        assert!(matches!(eh(2, 2, 0), Err(EhError::Range(_))));
        assert!(matches!(eh_padded(3, 3, 1, 0), Err(EhError::Range(_))));
    }
}
