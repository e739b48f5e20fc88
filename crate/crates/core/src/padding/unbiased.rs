//! The unbiased padding, built from generalised unbiased unitors over the
//! point context.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use super::{Filtration, Padding, PaddingData, PaddingError, Result, TypeFamily};
use crate::metaops::invert;
use crate::pasting::{compose, identity, PsContext, PsTree};
use crate::syntax::{Ctx, Name, Tm, Ty};

/// The point context `(x : *)`.
pub fn point() -> &'static PsContext {
    static POINT: LazyLock<PsContext> =
        LazyLock::new(|| PsContext::from_tree(PsTree::leaf(Name::new("x"))).expect("a point is a pasting context"));
    &POINT
}

/// `(idʲ_x)^{*a} = idʲ_x *_a idʲ_x`, which collapses to `idʲ_x` when `a ≥ j`.
pub fn doubled_identity(j: usize, a: usize) -> Tm {
    let p = &point().ctx;
    let id = identity(&Tm::var(Name::new("x")), j, p).expect("identities exist");
    compose(a, &[id.clone(), id], p).expect("identities compose")
}

/// `Iʲ_a = (idʲ_x)^{*a} -> (idʲ_x)^{*a}`.
pub fn identity_type(j: usize, a: usize) -> Ty {
    let t = doubled_identity(j, a);
    let base = crate::syntax::type_of(&t, &point().ctx).expect("closed term");
    Ty::arr(base, t.clone(), t)
}

/// `Γⁱ_l = (x : *, v : Iⁱ⁻¹_l)`.
pub fn unbiased_ctx(i: usize, l: usize) -> Ctx {
    point().ctx.extend(Name::new("v"), identity_type(i - 1, l)).expect("fresh name")
}

/// The levels `Γᵐ_l, ..., Γⁿ_l` with chosen variable `v`.
pub fn unbiased_filtration(n: usize, l: usize, height: usize) -> Result<Arc<Filtration>> {
    if height < 1 || height > n {
        return Err(PaddingError::Range(format!("no filtration from level {height} to {n}")));
    }
    let levels = (height..=n).map(|i| (unbiased_ctx(i, l), Name::new("v"))).collect();
    Ok(Arc::new(Filtration::by_matching(height, levels)?))
}

type Key = (usize, usize, usize);
static CACHE: LazyLock<DashMap<Key, Arc<Padding>>> = LazyLock::new(DashMap::new);

/// The unbiased padding `Θⁱ_{k,l}` for `min(k,l) < i ≤ n`.
pub fn unbiased(n: usize, k: usize, l: usize) -> Result<Arc<Padding>> {
    if n < 1 || k >= n || l >= n || k == l {
        return Err(PaddingError::Range(format!("unbiased padding needs k ≠ l < n, got n={n}, k={k}, l={l}")));
    }
    if let Some(p) = CACHE.get(&(n, k, l)) {
        return Ok(p.clone());
    }
    let m = k.min(l) + 1;
    let filt = unbiased_filtration(n, l, m)?;
    let family = TypeFamily::new(m, (m..=n).map(|i| identity_type(i - 1, k)).collect());
    let x = point();
    let mut thetas = vec![Tm::var(Name::new("v"))];
    let mut cells = Vec::new();
    for i in m..n {
        let theta = thetas.last().unwrap();
        let target = filt.apply_at(i, theta, &doubled_identity(i, l), &x.ctx)?;
        let p = x.coh(&doubled_identity(i, k), &target)?;
        let q = invert(&p)?;
        let next = compose(i, &[p.clone(), filt.lift_along(i, theta)?, q.clone()], filt.ctx(i + 1))?;
        thetas.push(next);
        cells.push((p, q));
    }
    let pad = Arc::new(Padding::new(filt, family, PaddingData::new(m, cells))?);
    CACHE.insert((n, k, l), pad.clone());
    Ok(pad)
}
