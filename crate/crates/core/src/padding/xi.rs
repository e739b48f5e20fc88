//! Pseudofunctoriality of paddings: a cell relating the composite of two
//! padded cells to the padding of their composite, and the interchangers it
//! is assembled from.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use super::{single, unbiased, unbiased_ctx, Padding, PaddingError, Result};
use crate::metaops::{cancel_counit, suspend_head};
use crate::pasting::{coh_over, compose, id, match_locmax, subst_from_locmax, PsContext, PsTree, Shape};
use crate::syntax::{Ctx, Name, Sub, Tm, Ty};

fn nm(s: &str) -> Name {
    Name::new(s)
}

fn v(s: &str) -> Tm {
    Tm::var(nm(s))
}

/// A coherence over a pasting context, applied to the identity.
#[derive(Clone, Debug)]
pub struct Interchanger {
    pub ps: PsContext,
    pub term: Tm,
    /// Names of the locally maximal variables in argument order.
    pub cells: Vec<Name>,
}

impl Interchanger {
    /// `Σʲ(self)` applied to images of its locally maximal cells.
    pub fn apply(&self, suspensions: usize, cells: &[Tm], ambient: &Ctx) -> Result<Tm> {
        let mut head = self.term.as_coh().expect("coherence").0.clone();
        for _ in 0..suspensions {
            head = suspend_head(&head);
        }
        let order: Vec<Tm> = self
            .ps
            .locmax
            .iter()
            .map(|n| cells[self.cells.iter().position(|c| c == n).expect("known cell")].clone())
            .collect();
        let args = subst_from_locmax(head.shape(), &order, ambient)?;
        Ok(Tm::coh(head, args))
    }
}

/// `(L *₀ T *₀ R) *_{N-1} (L *₀ B *₀ R) -> L *₀ (T *_{N-1} B) *₀ R` over the
/// pasting context of a whiskered vertical pair of `N`-cells.
pub fn chi(n: usize) -> Result<Arc<Interchanger>> {
    static CACHE: LazyLock<DashMap<usize, Arc<Interchanger>>> = LazyLock::new(DashMap::new);
    if n < 2 {
        return Err(PaddingError::Range("the interchanger needs N ≥ 2".into()));
    }
    if let Some(c) = CACHE.get(&n) {
        return Ok(c.clone());
    }
    let mut middle = PsTree::node(
        vec![nm(&format!("d{}_m", n - 1)), nm(&format!("d{}_0", n - 1)), nm(&format!("d{}_p", n - 1))],
        vec![PsTree::leaf(nm("dT")), PsTree::leaf(nm("dB"))],
    );
    for j in (1..n - 1).rev() {
        middle = PsTree::node(vec![nm(&format!("d{j}_m")), nm(&format!("d{j}_p"))], vec![middle]);
    }
    let tree = PsTree::node(
        vec![nm("d0_L"), nm("d0_m"), nm("d0_p"), nm("d0_R")],
        vec![PsTree::leaf(nm("d1_L")), middle, PsTree::leaf(nm("d1_R"))],
    );
    let ps = PsContext::from_tree(tree)?;
    let c = &ps.ctx;
    let whisk = |t: Tm| compose(0, &[v("d1_L"), t, v("d1_R")], c);
    let src = compose(n - 1, &[whisk(v("dT"))?, whisk(v("dB"))?], c)?;
    let tgt = whisk(compose(n - 1, &[v("dT"), v("dB")], c)?)?;
    let term = ps.coh(&src, &tgt)?;
    let out = Arc::new(Interchanger { ps, term, cells: vec![nm("d1_L"), nm("dT"), nm("dB"), nm("d1_R")] });
    CACHE.insert(n, out.clone());
    Ok(out)
}

/// `(L *₀ id(∂⁻R)) *_{N-1} (id(∂⁺L) *₀ R) -> L *₀ R` over two `N`-discs glued
/// at a point.
pub fn zeta(n: usize) -> Result<Arc<Interchanger>> {
    static CACHE: LazyLock<DashMap<usize, Arc<Interchanger>>> = LazyLock::new(DashMap::new);
    if n < 2 {
        return Err(PaddingError::Range("the interchanger needs N ≥ 2".into()));
    }
    if let Some(c) = CACHE.get(&n) {
        return Ok(c.clone());
    }
    let chain = |side: &str| {
        let mut t = PsTree::leaf(nm(&format!("d{n}_{side}")));
        for j in (1..n).rev() {
            t = PsTree::node(vec![nm(&format!("d{j}_{side}m")), nm(&format!("d{j}_{side}p"))], vec![t]);
        }
        t
    };
    let tree = PsTree::node(vec![nm("d0_L"), nm("d0_0"), nm("d0_R")], vec![chain("L"), chain("R")]);
    let ps = PsContext::from_tree(tree)?;
    let c = &ps.ctx;
    let (l, r) = (v(&format!("d{n}_L")), v(&format!("d{n}_R")));
    let l_plus = v(&format!("d{}_Lp", n - 1));
    let r_minus = v(&format!("d{}_Rm", n - 1));
    let src = compose(
        n - 1,
        &[compose(0, &[l.clone(), id(&r_minus, c)?], c)?, compose(0, &[id(&l_plus, c)?, r.clone()], c)?],
        c,
    )?;
    let tgt = compose(0, &[l, r], c)?;
    let term = ps.coh(&src, &tgt)?;
    let out = Arc::new(Interchanger { ps, term, cells: vec![nm(&format!("d{n}_L")), nm(&format!("d{n}_R"))] });
    CACHE.insert(n, out.clone());
    Ok(out)
}

/// Data for the generic tower: three substitutions from `Δ` into the top
/// lifted level, agreeing except on the lifted variable.
pub struct XiInput<'a> {
    pub pad: &'a Padding,
    /// Level `N` of the filtration whose lift the substitutions target.
    pub level: usize,
    pub delta: &'a Ctx,
    pub sigma_v: Sub,
    pub sigma_w: Sub,
    pub sigma_vw: Sub,
}

/// The tower `Ξ^{i↑}` for `m ≤ i ≤ N` together with the lifted paddings
/// `Tᵢ = (Θⁱ↑^{N-i})↑vᴺ` it relates.
pub struct XiTower {
    pub cells: Vec<Tm>,
    pub lifted: Vec<Tm>,
}

/// `Ξ^{i↑} : Tᵢ[σ_v] *_N Tᵢ[σ_w] -> Tᵢ[σ_vw]`, built bottom-up from `id(v *_N w)`
/// by suspended interchangers and whiskering.
pub fn xi_lifted(input: &XiInput) -> Result<XiTower> {
    let pad = input.pad;
    let filt = &pad.filtration;
    let top = input.level;
    let m = pad.height();
    let up = &filt.lifted(top)?.ctx;
    let delta = input.delta;
    let vf = Tm::var(filt.var(top).arrow());
    let at = |s: &Sub, t: &Tm| -> Result<Tm> { Ok(s.apply_tm(t)?) };
    let (a, b) = (at(&input.sigma_v, &vf)?, at(&input.sigma_w, &vf)?);
    let mut lifted = vec![vf];
    let mut cells = vec![id(&compose(top, &[a, b], delta)?, delta)?];
    for i in m + 1..=top {
        let (p, q) = (pad.data.p(i - 1), pad.data.q(i - 1));
        let prev = lifted.last().unwrap().clone();
        lifted.push(compose(i - 1, &[p.clone(), prev.clone(), q.clone()], up)?);
        let (pv, qv) = (at(&input.sigma_v, p)?, at(&input.sigma_v, q)?);
        let swap = chi(top - i + 2)?.apply(
            i - 1,
            &[pv.clone(), at(&input.sigma_v, &prev)?, at(&input.sigma_w, &prev)?, qv.clone()],
            delta,
        )?;
        let whiskered = compose(i - 1, &[pv, cells.last().unwrap().clone(), qv], delta)?;
        cells.push(compose(top + 1, &[swap, whiskered], delta)?);
    }
    Ok(XiTower { cells, lifted })
}

/// The three substitutions `v_f ↦ v, w, v *_N w` into `Γᴺ↑vᴺ` for terms of
/// a context extending `Γᴺ⁺¹`.
pub fn xi_substitutions(pad: &Padding, level: usize, v: &Tm, w: &Tm, delta: &Ctx) -> Result<(Sub, Sub, Sub)> {
    let up = &pad.filtration.lifted(level)?.ctx;
    let f = [pad.filtration.var(level).arrow()];
    let vw = compose(level, &[v.clone(), w.clone()], delta)?;
    let s = |t: &Tm| -> Result<Sub> { Ok(match_locmax(up, &f, std::slice::from_ref(t), delta)?) };
    Ok((s(v)?, s(w)?, s(&vw)?))
}

/// `Ξⁿ_{k,l} : Θⁿ⟦v⟧ *_{n-1} Θⁿ⟦w⟧ -> Θⁿ⟦v *_{n-1} w⟧` in `(Γⁿ_l, w : Iⁿ⁻¹_l)`.
pub fn xi(n: usize, k: usize, l: usize) -> Result<(Tm, Ctx)> {
    type Cell = (Tm, Ctx);
    static CACHE: LazyLock<DashMap<(usize, usize, usize), Cell>> = LazyLock::new(DashMap::new);
    if let Some(r) = CACHE.get(&(n, k, l)) {
        return Ok(r.clone());
    }
    let pad = unbiased(n, k, l)?;
    let gamma = unbiased_ctx(n, l);
    let w_ty = gamma.lookup(nm("v")).unwrap().clone();
    let delta = gamma.extend(nm("w"), w_ty)?;
    let out = (xi_unbiased(&pad, &delta, &v("v"), &v("w"))?, delta);
    CACHE.insert((n, k, l), out.clone());
    Ok(out)
}

/// The padding's top-level `Ξ` on two composable cells `a`, `b` of `delta`
/// of the type of the chosen top variable, for data whose top cells are
/// mutually inverse.
pub fn xi_unbiased(pad: &Padding, delta: &Ctx, a: &Tm, b: &Tm) -> Result<Tm> {
    let n = pad.top();
    let filt = &pad.filtration;
    let top = n - 1;
    let (a_top, b_top) = (filt.at(n, a, delta)?, filt.at(n, b, delta)?);
    let (sv, sw, svw) = (
        filt.step(n).compose(&a_top)?,
        filt.step(n).compose(&b_top)?,
        filt.step(n).compose(&filt.at(n, &compose(top, &[a.clone(), b.clone()], delta)?, delta)?)?,
    );
    let tower =
        xi_lifted(&XiInput { pad, level: top, delta, sigma_v: sv.clone(), sigma_w: sw.clone(), sigma_vw: svw })?;
    let t = tower.lifted.last().unwrap();
    let (t1, t2) = (sv.apply_tm(t)?, sw.apply_tm(t)?);
    let (p, q) = (a_top.apply_tm(pad.data.p(top))?, a_top.apply_tm(pad.data.q(top))?);
    let six = Shape::glued(top, &[n; 6]);
    let assoc = coh_over(
        &six,
        &[p.clone(), t1.clone(), q.clone(), p.clone(), t2.clone(), q.clone()],
        delta,
        |f, c| compose(top, &[compose(top, &f[0..3], c)?, compose(top, &f[3..6], c)?], c),
        |f, c| compose(top, &[f[0].clone(), f[1].clone(), compose(top, &f[2..4], c)?, f[4].clone(), f[5].clone()], c),
    )?;
    let cancel = compose(top, &[p.clone(), t1.clone(), cancel_counit(&q, delta)?, t2.clone(), q.clone()], delta)?;
    let four = Shape::glued(top, &[n; 4]);
    let unit = coh_over(
        &four,
        &[p.clone(), t1.clone(), t2.clone(), q.clone()],
        delta,
        |f, c| {
            let mid = crate::syntax::type_of(&f[1], c)?.tgt().unwrap().clone();
            compose(top, &[f[0].clone(), f[1].clone(), id(&mid, c)?, f[2].clone(), f[3].clone()], c)
        },
        |f, c| compose(top, &[f[0].clone(), compose(top, &f[1..3], c)?, f[3].clone()], c),
    )?;
    let inner = compose(top, &[p, tower.cells.last().unwrap().clone(), q], delta)?;
    Ok(compose(n, &[assoc, cancel, unit, inner], delta)?)
}

/// The expected type of [`xi_unbiased`].
pub fn xi_type(pad: &Padding, delta: &Ctx, a: &Tm, b: &Tm) -> Result<Ty> {
    let n = pad.top();
    let th = |t: &Tm| pad.theta_at(n, t, delta);
    let src = compose(n - 1, &[th(a)?, th(b)?], delta)?;
    let tgt = th(&compose(n - 1, &[a.clone(), b.clone()], delta)?)?;
    Ok(Ty::arr(crate::syntax::type_of(&src, delta)?, src, tgt))
}

#[allow(dead_code)]
fn lifted_padding(pad: &Padding, i: usize, level: usize) -> Result<Tm> {
    let filt = &pad.filtration;
    let t = filt.lift_iter(i, level - i, pad.theta(i))?;
    Ok(crate::metaops::lift_tm(&t, filt.ctx(level), &single(filt.var(level)))?)
}
