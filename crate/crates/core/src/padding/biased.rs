//! Biased paddings built from generalised right unitors, and their
//! opposites built from left unitors.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use super::{unbiased, Filtration, FiltrationMorphism, Padding, PaddingData, PaddingError, Result, TypeFamily};
use crate::metaops::{invert, opposite_ctx, opposite_tm, opposite_ty, OppositeSet};
use crate::pasting::{compose, disc, identity, match_locmax, sphere};
use crate::syntax::{dim_tm, Ctx, Name, Tm, Ty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Right unitors over sphere-and-variable contexts.
    Rho,
    /// Right unitors over discs.
    RhoTilde,
    /// Opposite of [`Flavor::Rho`].
    Lambda,
    /// Opposite of [`Flavor::RhoTilde`].
    LambdaTilde,
}

impl Flavor {
    fn right(self) -> Flavor {
        match self {
            Flavor::Lambda => Flavor::Rho,
            Flavor::LambdaTilde => Flavor::RhoTilde,
            f => f,
        }
    }

    fn is_left(self) -> bool {
        matches!(self, Flavor::Lambda | Flavor::LambdaTilde)
    }

    /// Whether the biased padding of the identity lives over `Γ_0` (as
    /// opposed to `Γ_{n-1}`).
    pub fn over_zero(self) -> bool {
        matches!(self, Flavor::Rho | Flavor::Lambda)
    }
}

fn nm(s: String) -> Name {
    Name::new(&s)
}

/// `c *₀ id^j(d0_p)` for a `j`-cell `c`, or `c` itself when `j = 0`.
pub(crate) fn whisker_right(c: &Tm, ctx: &Ctx) -> Result<Tm> {
    let j = dim_tm(c, ctx)?;
    if j == 0 {
        return Ok(c.clone());
    }
    let pole = identity(&Tm::var(Name::new("d0_p")), j as usize, ctx)?;
    Ok(compose(0, &[c.clone(), pole], ctx)?)
}

/// `Γⁱ_ρ`: the sphere of dimension `i-1` and `v : W(d_m) -> W(d_p)`.
fn rho_ctx(i: usize) -> Result<Ctx> {
    let (sph, _) = sphere(i as i32 - 1);
    let lo = whisker_right(&Tm::var(nm(format!("d{}_m", i - 1))), &sph)?;
    let hi = whisker_right(&Tm::var(nm(format!("d{}_p", i - 1))), &sph)?;
    let base = crate::syntax::type_of(&lo, &sph)?;
    Ok(sph.extend(Name::new("v"), Ty::arr(base, lo, hi))?)
}

/// `⟦dⁱ ↦ dⁱ_±⟧` from `Dⁱ` into the next level.
fn to_face(i: usize, plus: bool, ambient: &Ctx) -> Result<crate::syntax::Sub> {
    let d = disc(i);
    let face = nm(format!("d{i}_{}", if plus { "p" } else { "m" }));
    Ok(match_locmax(&d.ctx, &d.locmax, &[Tm::var(face)], ambient)?)
}

static CACHE: LazyLock<DashMap<(usize, Flavor), Arc<Padding>>> = LazyLock::new(DashMap::new);

/// The biased padding of the given flavour up to dimension `n`.
pub fn biased(n: usize, flavor: Flavor) -> Result<Arc<Padding>> {
    if n < 1 {
        return Err(PaddingError::Range("biased paddings start in dimension 1".into()));
    }
    if let Some(p) = CACHE.get(&(n, flavor)) {
        return Ok(p.clone());
    }
    let pad = if flavor.is_left() {
        let right = biased(n, flavor.right())?;
        Arc::new(opposite_padding(&right, OppositeSet::single(1))?)
    } else {
        Arc::new(right_biased(n, flavor)?)
    };
    CACHE.insert((n, flavor), pad.clone());
    Ok(pad)
}

fn right_biased(n: usize, flavor: Flavor) -> Result<Padding> {
    let tilde = flavor == Flavor::RhoTilde;
    let levels = (1..=n)
        .map(|i| {
            Ok(if tilde {
                let d = disc(i);
                (d.ctx, nm(format!("d{i}")))
            } else {
                (rho_ctx(i)?, Name::new("v"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let filt = Arc::new(Filtration::by_matching(1, levels)?);
    let types = (1..=n)
        .map(|i| {
            let (sph, ty) = sphere(i as i32 - 1);
            if !tilde {
                return Ok(ty);
            }
            let lo = whisker_right(ty.src().unwrap(), &sph)?;
            let hi = whisker_right(ty.tgt().unwrap(), &sph)?;
            Ok(Ty::arr(crate::syntax::type_of(&lo, &sph)?, lo, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut theta = Tm::var(filt.var(1));
    let mut cells = Vec::new();
    for i in 1..n {
        let d = disc(i);
        let top = Tm::var(nm(format!("d{i}")));
        let unitor = if tilde {
            d.coh(&theta, &whisker_right(&top, &d.ctx)?)?
        } else {
            let padded = filt.apply_at(i, &theta, &whisker_right(&top, &d.ctx)?, &d.ctx)?;
            d.coh(&padded, &top)?
        };
        let next = filt.ctx(i + 1);
        let p = to_face(i, false, next)?.apply_tm(&invert(&unitor)?)?;
        let q = to_face(i, true, next)?.apply_tm(&unitor)?;
        theta = compose(i, &[p.clone(), filt.lift_along(i, &theta)?, q.clone()], next)?;
        cells.push((p, q));
    }
    Padding::new(filt, TypeFamily::new(1, types), PaddingData::new(1, cells))
}

/// The generalised unitor `ρⁱ` (or `ρ̃ⁱ`, `λⁱ`, `λ̃ⁱ`) over `Dⁱ` or its opposite.
pub fn unitor(i: usize, flavor: Flavor) -> Result<(Tm, Ctx)> {
    let pad = biased(i, flavor.right())?;
    let d = disc(i);
    let top = Tm::var(nm(format!("d{i}")));
    let theta = pad.theta(i);
    let t = if flavor.right() == Flavor::RhoTilde {
        d.coh(theta, &whisker_right(&top, &d.ctx)?)?
    } else {
        let padded = pad.filtration.apply_at(i, theta, &whisker_right(&top, &d.ctx)?, &d.ctx)?;
        d.coh(&padded, &top)?
    };
    if flavor.is_left() {
        let op = OppositeSet::single(1);
        Ok((opposite_tm(&t, op)?, opposite_ctx(&d.ctx, op)?))
    } else {
        Ok((t, d.ctx))
    }
}

/// Applies `op(set)` to every part of a padding.
pub fn opposite_padding(pad: &Padding, set: OppositeSet) -> Result<Padding> {
    let (m, n) = (pad.height(), pad.top());
    let levels = (m..=n)
        .map(|i| Ok((opposite_ctx(pad.filtration.ctx(i), set)?, pad.filtration.var(i))))
        .collect::<Result<Vec<_>>>()?;
    let filt = Arc::new(Filtration::by_matching(m, levels)?);
    let types = (m..=n).map(|i| Ok(opposite_ty(pad.family.get(i), set)?)).collect::<Result<Vec<_>>>()?;
    let cells = (m..n)
        .map(|i| {
            let (p, q) = (opposite_tm(pad.data.p(i), set)?, opposite_tm(pad.data.q(i), set)?);
            Ok(if set.contains(i as i32 + 1) { (q, p) } else { (p, q) })
        })
        .collect::<Result<Vec<_>>>()?;
    Padding::new(filt, TypeFamily::new(m, types), PaddingData::new(m, cells))
}

/// The biased padding of the identity, transported onto the unbiased
/// filtration `Γⁿ_0` (for ρ, λ) or `Γⁿ_{n-1}` (for ρ̃, λ̃).
pub fn biased_of_identity(n: usize, flavor: Flavor) -> Result<Arc<Padding>> {
    static IDS: LazyLock<DashMap<(usize, Flavor), Arc<Padding>>> = LazyLock::new(DashMap::new);
    if let Some(p) = IDS.get(&(n, flavor)) {
        return Ok(p.clone());
    }
    if n < 2 {
        return Err(PaddingError::Range("biased paddings of the identity need n ≥ 2".into()));
    }
    let target = biased(n, flavor)?;
    let source = if flavor.over_zero() { unbiased(n, n - 1, 0)? } else { unbiased(n, 0, n - 1)? };
    let psi = FiltrationMorphism::by_matching(source.filtration.clone(), target.filtration.clone())?;
    let out = Arc::new(target.transport(&psi)?);
    IDS.insert((n, flavor), out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_tm, check_tm_at};
    use crate::pasting::Sign;

    #[test]
    fn rho_one_is_the_right_unitor() {
        let (r, ctx) = unitor(1, Flavor::Rho).unwrap();
        let ty = check_tm(&r, &ctx).unwrap();
        let d1 = Tm::var(Name::new("d1"));
        assert_eq!(ty.tgt(), Some(&d1));
        assert_eq!(ty.src(), Some(&whisker_right(&d1, &ctx).unwrap()));
    }

    #[test]
    fn lambda_one_whiskers_on_the_other_side() {
        let (l, ctx) = unitor(1, Flavor::Lambda).unwrap();
        let ty = check_tm(&l, &ctx).unwrap();
        let src = ty.src().unwrap();
        let (_, args) = src.as_coh().unwrap();
        // The identity now comes first along dimension 0.
        let pos_id = args.iter().position(|a| a.as_coh().is_some()).unwrap();
        let pos_d = args.iter().position(|a| a == &Tm::var(Name::new("d1"))).unwrap();
        assert!(pos_id < pos_d);
    }

    #[test]
    fn first_rho_padding_cell_has_the_stated_type() {
        let pad = biased(2, Flavor::Rho).unwrap();
        let f = &pad.filtration;
        let p = pad.data.p(1);
        let lo = f.inj(1, Sign::Minus).unwrap().apply_tm(pad.theta(1)).unwrap();
        let s = pad.family.src(1).clone();
        let base = pad.family.get(2).base().unwrap().clone();
        check_tm_at(p, &Ty::arr(base, s, lo), f.ctx(2)).unwrap();
    }

    #[test]
    fn all_flavours_build_to_dimension_four() {
        for fl in [Flavor::Rho, Flavor::RhoTilde, Flavor::Lambda, Flavor::LambdaTilde] {
            let pad = biased(4, fl).unwrap();
            assert_eq!(pad.top(), 4);
            let id = biased_of_identity(3, fl).unwrap();
            assert_eq!(id.top(), 3);
        }
    }

    #[test]
    fn left_padding_is_the_opposite_of_the_right_one() {
        let r = biased(3, Flavor::Rho).unwrap();
        let l = biased(3, Flavor::Lambda).unwrap();
        for i in 1..=3 {
            assert_eq!(&opposite_tm(r.theta(i), OppositeSet::single(1)).unwrap(), l.theta(i));
        }
    }

    #[test]
    fn biased_identity_family_is_the_unbiased_family() {
        let id = biased_of_identity(3, Flavor::Rho).unwrap();
        let u = unbiased(3, 2, 0).unwrap();
        for i in 1..=3 {
            assert_eq!(id.family.get(i), u.family.get(i));
        }
    }
}
