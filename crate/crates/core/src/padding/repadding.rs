//! Repaddings: equivalences between the paddings of two sets of padding data
//! for the same type family.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use super::{biased_of_identity, unbiased, Filtration, Flavor, Padding, PaddingError, Result};
use crate::kernel::{check_tm_at, Diagnostic};
use crate::metaops::{hexcomp, invert, opposite_tm, OppositeSet};
use crate::pasting::{coh_over, compose, id, pasting_context, PastingError, Shape, Sign};
use crate::syntax::{type_of, Ctx, Tm, Ty};

/// The cells `(fⁱ, gⁱ)` for `m ≤ i < n`.
#[derive(Clone, Debug)]
pub struct RepaddingData {
    pub height: usize,
    pub cells: Vec<(Tm, Tm)>,
}

/// A repadding with its data and the cells `Πⁱ : Θⁱ_0 -> Θⁱ_1`.
#[derive(Clone, Debug)]
pub struct Repadding {
    pub data: Option<RepaddingData>,
    height: usize,
    pi: Vec<Tm>,
}

impl Repadding {
    pub fn pi(&self, i: usize) -> &Tm {
        &self.pi[i - self.height]
    }

    pub fn top(&self) -> &Tm {
        self.pi.last().unwrap()
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

fn same_levels(p0: &Padding, p1: &Padding) -> Result<()> {
    let (f0, f1) = (&p0.filtration, &p1.filtration);
    if f0.height() != f1.height() || f0.top() != f1.top() {
        return Err(PaddingError::InvalidComposition("paddings have different levels".into()));
    }
    for i in f0.height()..=f0.top() {
        if f0.ctx(i) != f1.ctx(i) || f0.var(i) != f1.var(i) {
            return Err(PaddingError::InvalidComposition(format!("filtrations differ at level {i}")));
        }
    }
    Ok(())
}

/// The endpoints required of `fⁱ` and `gⁱ` given `Πⁱ`.
fn expected(p0: &Padding, p1: &Padding, i: usize, pi: &Tm) -> Result<(Ty, Ty)> {
    let filt = &p0.filtration;
    let ctx = filt.ctx(i + 1);
    let lo = filt.inj(i, Sign::Minus)?.apply_tm(pi)?;
    let hi = filt.inj(i, Sign::Plus)?.apply_tm(pi)?;
    let f_src = compose(i, &[p0.data.p(i).clone(), lo], ctx)?;
    let g_tgt = compose(i, &[hi, p1.data.q(i).clone()], ctx)?;
    let f_ty = Ty::arr(type_of(&f_src, ctx)?, f_src, p1.data.p(i).clone());
    let g_ty = Ty::arr(type_of(&g_tgt, ctx)?, p0.data.q(i).clone(), g_tgt);
    Ok((f_ty, g_ty))
}

/// `Πᵐ = id(vᵐ)`, `Πⁱ⁺¹ = hexcomp⟦fⁱ, ((Πⁱ↑vⁱ)[σⁱ⁺¹])⁻¹, gⁱ⟧`, checking every
/// `fⁱ`, `gⁱ` and `Πⁱ`.
pub fn build_repadding(p0: &Padding, p1: &Padding, data: &RepaddingData) -> Result<Repadding> {
    same_levels(p0, p1)?;
    let filt = &p0.filtration;
    let (m, n) = (filt.height(), filt.top());
    if data.height != m || data.cells.len() != n - m {
        return Err(PaddingError::InvalidRepaddingData {
            level: m,
            source: Diagnostic::new(crate::kernel::DiagKind::TypeMismatch, "wrong number of levels"),
        });
    }
    let mut pi = vec![id(&Tm::var(filt.var(m)), filt.ctx(m))?];
    for i in m..n {
        let ctx = filt.ctx(i + 1);
        let invalid = |source: Diagnostic| PaddingError::InvalidRepaddingData { level: i, source };
        let (f_ty, g_ty) = expected(p0, p1, i, &pi[i - m])?;
        let (f, g) = &data.cells[i - m];
        check_tm_at(f, &f_ty, ctx).map_err(|d| invalid(d.at_step("f")))?;
        check_tm_at(g, &g_ty, ctx).map_err(|d| invalid(d.at_step("g")))?;
        let back = invert(&filt.lift_along(i, &pi[i - m])?)?;
        let next = hexcomp(f, &back, g, i, ctx)?;
        let ty = Ty::arr(p0.family.get(i + 1).clone(), p0.theta(i + 1).clone(), p1.theta(i + 1).clone());
        check_tm_at(&next, &ty, ctx).map_err(|d| invalid(d.at_step("repadding")))?;
        pi.push(next);
    }
    Ok(Repadding { data: Some(data.clone()), height: m, pi })
}

/// `Γⁱ⁺¹` without its chosen variable, as a pasting context.
fn without_top(ctx: &Ctx, top: crate::syntax::Name) -> Result<crate::pasting::PsContext> {
    let rest = Ctx::new(ctx.entries().iter().filter(|(n, _)| *n != top).cloned().collect())?;
    Ok(pasting_context(&rest)?)
}

/// Repadding whose cells are the coherences of the required types over the
/// context left when the chosen variable is removed.
pub fn point_repadding(p0: &Padding, p1: &Padding) -> Result<Repadding> {
    same_levels(p0, p1)?;
    let filt = &p0.filtration;
    let (m, n) = (filt.height(), filt.top());
    let mut pi = id(&Tm::var(filt.var(m)), filt.ctx(m))?;
    let mut cells = Vec::new();
    for i in m..n {
        let ps = without_top(filt.ctx(i + 1), filt.var(i + 1))?;
        let (f_ty, g_ty) = expected(p0, p1, i, &pi)?;
        let f = ps.coh(f_ty.src().unwrap(), f_ty.tgt().unwrap())?;
        let g = ps.coh(g_ty.src().unwrap(), g_ty.tgt().unwrap())?;
        let back = invert(&filt.lift_along(i, &pi)?)?;
        pi = hexcomp(&f, &back, &g, i, filt.ctx(i + 1))?;
        cells.push((f, g));
    }
    build_repadding(p0, p1, &RepaddingData { height: m, cells })
}

fn glued_coh(
    i: usize,
    cells: &[Tm],
    ctx: &Ctx,
    src: impl FnOnce(&[Tm], &Ctx) -> std::result::Result<Tm, PastingError>,
    tgt: impl FnOnce(&[Tm], &Ctx) -> std::result::Result<Tm, PastingError>,
) -> Result<Tm> {
    Ok(coh_over(&Shape::glued(i, &vec![i + 1; cells.len()]), cells, ctx, src, tgt)?)
}

/// `Πⁱ⁺¹ : p *ᵢ L *ᵢ q -> vⁱ⁺¹` from `Πⁱ : Θⁱ -> vⁱ`, at a level where the
/// target padding has no data.
fn collapse_step(filt: &Filtration, i: usize, pi: &Tm, theta: &Tm, (p, q): (&Tm, &Tm)) -> Result<Tm> {
    let ctx = filt.ctx(i + 1);
    let ps = without_top(ctx, filt.var(i + 1))?;
    let v = Tm::var(filt.var(i + 1));
    let pi_m = filt.inj(i, Sign::Minus)?.apply_tm(pi)?;
    let pi_p = filt.inj(i, Sign::Plus)?.apply_tm(pi)?;
    let lifted = filt.lift_along(i, theta)?;
    let back = invert(&filt.lift_along(i, pi)?)?;
    let start = type_of(p, ctx)?.src().unwrap().clone();
    let onto_pi = ps.coh(q, &pi_p)?;
    let cancel = ps.coh(&compose(i, &[p.clone(), pi_m.clone()], ctx)?, &id(&start, ctx)?)?;
    let steps = [
        compose(i, &[p.clone(), lifted.clone(), onto_pi], ctx)?,
        glued_coh(
            i,
            &[p.clone(), lifted, pi_p],
            ctx,
            |f, c| compose(i, f, c),
            |f, c| compose(i, &[f[0].clone(), compose(i, &f[1..3], c)?], c),
        )?,
        compose(i, &[p.clone(), back], ctx)?,
        glued_coh(
            i,
            &[p.clone(), pi_m, v.clone()],
            ctx,
            |f, c| compose(i, &[f[0].clone(), compose(i, &f[1..3], c)?], c),
            |f, c| compose(i, &[compose(i, &f[0..2], c)?, f[2].clone()], c),
        )?,
        compose(i, &[cancel, v.clone()], ctx)?,
        glued_coh(
            i,
            &[v],
            ctx,
            |f, c| {
                let from = type_of(&f[0], c)?.src().unwrap().clone();
                compose(i, &[id(&from, c)?, f[0].clone()], c)
            },
            |f, _| Ok(f[0].clone()),
        )?,
    ];
    Ok(compose(i + 1, &steps, ctx)?)
}

/// Like [`point_repadding`], for a target padding `p1` whose height may
/// exceed that of `p0`, over `p0`'s filtration. Below `p1`'s height its `Θ`
/// is the chosen variable, and `Π` cancels the source padding cell by cell.
pub fn point_repadding_over(p0: &Padding, p1: &Padding) -> Result<Repadding> {
    let filt = &p0.filtration;
    let (m, n, h) = (filt.height(), filt.top(), p1.height());
    if h < m || p1.top() != n {
        return Err(PaddingError::InvalidComposition("the target padding does not fit the filtration".into()));
    }
    for i in h..=n {
        let f1 = &p1.filtration;
        if f1.ctx(i) != filt.ctx(i) || f1.var(i) != filt.var(i) || (i > h && f1.step(i) != filt.step(i)) {
            return Err(PaddingError::InvalidComposition(format!("filtrations differ at level {i}")));
        }
    }
    if h == m {
        return point_repadding(p0, p1);
    }
    let mut pi = vec![id(&Tm::var(filt.var(m)), filt.ctx(m))?];
    for i in m..n {
        let prev = &pi[i - m];
        let next = if i < h {
            collapse_step(filt, i, prev, p0.theta(i), (p0.data.p(i), p0.data.q(i)))?
        } else {
            let ps = without_top(filt.ctx(i + 1), filt.var(i + 1))?;
            let (f_ty, g_ty) = expected(p0, p1, i, prev)?;
            let f = ps.coh(f_ty.src().unwrap(), f_ty.tgt().unwrap())?;
            let g = ps.coh(g_ty.src().unwrap(), g_ty.tgt().unwrap())?;
            hexcomp(&f, &invert(&filt.lift_along(i, prev)?)?, &g, i, filt.ctx(i + 1))?
        };
        let target = if i < h { Tm::var(filt.var(i + 1)) } else { p1.theta(i + 1).clone() };
        let ty = Ty::arr(p0.family.get(i + 1).clone(), p0.theta(i + 1).clone(), target);
        check_tm_at(&next, &ty, filt.ctx(i + 1))
            .map_err(|d| PaddingError::InvalidRepaddingData { level: i, source: d.at_step("repadding") })?;
        pi.push(next);
    }
    Ok(Repadding { data: None, height: m, pi })
}

static UNBIASING: LazyLock<DashMap<(usize, Flavor), Arc<Repadding>>> = LazyLock::new(DashMap::new);

/// `Π_{ρ→u}`, `Π_{ρ̃→u}`, and their opposites `Π_{λ→u}`, `Π_{λ̃→u}`.
pub fn unbiasing_repadding(n: usize, flavor: Flavor) -> Result<Arc<Repadding>> {
    if n < 2 {
        return Err(PaddingError::Range("unbiasing repaddings need n ≥ 2".into()));
    }
    if let Some(r) = UNBIASING.get(&(n, flavor)) {
        return Ok(r.clone());
    }
    let target = if flavor.over_zero() { unbiased(n, n - 1, 0)? } else { unbiased(n, 0, n - 1)? };
    let out = match flavor {
        Flavor::Rho | Flavor::RhoTilde => {
            let source = biased_of_identity(n, flavor)?;
            point_repadding(&source, &target)?
        }
        Flavor::Lambda | Flavor::LambdaTilde => {
            let right = if flavor == Flavor::Lambda { Flavor::Rho } else { Flavor::RhoTilde };
            let r = unbiasing_repadding(n, right)?;
            let source = biased_of_identity(n, flavor)?;
            let op = OppositeSet::single(1);
            let mut pi = Vec::new();
            for i in r.height()..=n {
                let t = opposite_tm(r.pi(i), op)?;
                let ty = Ty::arr(source.family.get(i).clone(), source.theta(i).clone(), target.theta(i).clone());
                check_tm_at(&t, &ty, source.filtration.ctx(i))
                    .map_err(|d| PaddingError::InvalidRepaddingData { level: i, source: d })?;
                pi.push(t);
            }
            Repadding { data: None, height: r.height(), pi }
        }
    };
    let out = Arc::new(out);
    UNBIASING.insert((n, flavor), out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_head, CohKind};

    #[test]
    fn rho_to_unbiased_in_dimension_two() {
        let r = unbiasing_repadding(2, Flavor::Rho).unwrap();
        let src = biased_of_identity(2, Flavor::Rho).unwrap();
        let tgt = unbiased(2, 1, 0).unwrap();
        let ty = Ty::arr(tgt.family.get(2).clone(), src.theta(2).clone(), tgt.theta(2).clone());
        check_tm_at(r.pi(2), &ty, tgt.filtration.ctx(2)).unwrap();
        assert_eq!(r.pi(1), &id(&Tm::var(tgt.filtration.var(1)), tgt.filtration.ctx(1)).unwrap());
    }

    #[test]
    fn synthesized_cells_are_coherences() {
        let r = unbiasing_repadding(3, Flavor::Rho).unwrap();
        for (f, g) in &r.data.as_ref().unwrap().cells {
            for c in [f, g] {
                let (h, _) = c.as_coh().unwrap();
                assert_eq!(check_head(h).unwrap(), CohKind::Coherence);
            }
        }
    }

    #[test]
    fn all_flavours_in_dimension_three() {
        for fl in [Flavor::Rho, Flavor::RhoTilde, Flavor::Lambda, Flavor::LambdaTilde] {
            unbiasing_repadding(3, fl).unwrap();
        }
    }

    #[test]
    fn repadding_onto_a_higher_padding_collapses_the_lower_levels() {
        let filt = crate::padding::unbiased_filtration(3, 2, 1).unwrap();
        let c =
            crate::padding::compose_padding(&filt, &unbiased(3, 0, 2).unwrap(), &unbiased(3, 1, 0).unwrap()).unwrap();
        let target = unbiased(3, 1, 2).unwrap();
        assert_eq!(target.height(), 2);
        let r = point_repadding_over(&c.padding, &target).unwrap();
        let ty = Ty::arr(target.family.get(2).clone(), c.padding.theta(2).clone(), Tm::var(filt.var(2)));
        check_tm_at(r.pi(2), &ty, filt.ctx(2)).unwrap();
        assert!(point_repadding_over(&target, &c.padding).is_err());
    }

    #[test]
    fn left_repadding_is_the_opposite_of_the_right_one() {
        let r = unbiasing_repadding(3, Flavor::Rho).unwrap();
        let l = unbiasing_repadding(3, Flavor::Lambda).unwrap();
        assert_eq!(&opposite_tm(r.top(), OppositeSet::single(1)).unwrap(), l.top());
    }
}
