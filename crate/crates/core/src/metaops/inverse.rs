//! Inverses of invertible terms and the cells witnessing cancellation.

use std::sync::LazyLock;

use dashmap::DashMap;

use super::opposite::{opposite_head, OppositeSet};
use super::MetaError;
use crate::kernel::{check_head, CohKind};
use crate::pasting::{coh_step, comp_terms, compose, id, PsTree};
use crate::syntax::{deep, type_of, Ctx, Head, Name, NodeMap, PassHasher, Sub, Tm, Ty};

/// Whether `t` is a coherence, or a composite whose top-dimensional
/// arguments are all invertible.
pub fn is_invertible(t: &Tm) -> bool {
    fn go(t: &Tm, memo: &mut NodeMap<Tm, bool>) -> bool {
        if let Some(&b) = memo.get(t) {
            return b;
        }
        let out = match t.as_coh() {
            None => false,
            Some((h, args)) => match check_head(h) {
                Ok(CohKind::Coherence) => true,
                Ok(CohKind::Composite) => {
                    let shape = h.shape();
                    let n = shape.dim();
                    deep(|| (0..args.len()).filter(|&i| shape.var_dim(i) == n).all(|i| go(&args[i], memo)))
                }
                Err(_) => false,
            },
        };
        memo.insert(t.clone(), out);
        out
    }
    go(t, &mut NodeMap::default())
}

static INVERSES: LazyLock<DashMap<Tm, Tm, std::hash::BuildHasherDefault<PassHasher>>> = LazyLock::new(Default::default);

/// `t⁻¹`. A coherence is inverted by swapping its endpoints; a composite by
/// reversing its top dimension and inverting its top cells.
pub fn invert(t: &Tm) -> Result<Tm, MetaError> {
    if let Some(r) = INVERSES.get(t) {
        return Ok(r.clone());
    }
    let (h, args) = t.as_coh().ok_or_else(|| MetaError::NotInvertible(t.to_string()))?;
    let out = match check_head(h)? {
        CohKind::Coherence => {
            let (base, u, v) = h.ty().as_arr().unwrap();
            Tm::coh(Head::new(h.shape().clone(), Ty::arr(base.clone(), v.clone(), u.clone())), args.to_vec())
        }
        CohKind::Composite => {
            let shape = h.shape();
            let n = shape.dim();
            let (h2, perm) = opposite_head(h, OppositeSet::single(n as usize))?;
            let args = deep(|| {
                perm.iter()
                    .map(|&i| if shape.var_dim(i) == n { invert(&args[i]) } else { Ok(args[i].clone()) })
                    .collect::<Result<Vec<_>, _>>()
            })?;
            Tm::coh(h2, args)
        }
    };
    INVERSES.insert(t.clone(), out.clone());
    Ok(out)
}

/// Paths from the root to the nodes of depth `depth` that have children.
fn columns<L: Clone>(tree: &PsTree<L>, depth: usize) -> Vec<Vec<usize>> {
    fn go<L: Clone>(t: &PsTree<L>, depth: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == 0 {
            if !t.children.is_empty() {
                out.push(path.clone());
            }
            return;
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            go(c, depth - 1, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(tree, depth, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn node_mut<'a, L>(mut t: &'a mut PsTree<L>, path: &[usize]) -> &'a mut PsTree<L> {
    for &i in path {
        t = &mut t.children[i];
    }
    t
}

/// The diagram `t *_{n-1} t⁻¹` with column `c` cut down to its innermost
/// `js[c]` pairs.
fn doubled_state(base: &PsTree<Tm>, inverses: &PsTree<Tm>, cols: &[Vec<usize>], js: &[usize]) -> PsTree<Tm> {
    let mut out = base.clone();
    for (path, &j) in cols.iter().zip(js) {
        let src = node_mut(&mut base.clone(), path).clone();
        let inv = node_mut(&mut inverses.clone(), path).clone();
        let node = node_mut(&mut out, path);
        let mut labels: Vec<Tm> = src.labels[..=j].to_vec();
        labels.extend(src.labels[..j].iter().rev().cloned());
        let mut children: Vec<PsTree<Tm>> = src.children[..j].to_vec();
        children.extend(inv.children[..j].iter().rev().cloned());
        *node = PsTree { labels, children };
    }
    out
}

/// Replaces the middle pair of a column by its composite.
fn merge_middle(tree: &PsTree<Tm>, path: &[usize], j: usize, ctx: &Ctx) -> Result<PsTree<Tm>, MetaError> {
    let mut out = tree.clone();
    let node = node_mut(&mut out, path);
    let dim = (type_of(&node.labels[0], ctx)?.dim() + 1) as usize;
    node.labels.remove(j);
    let pair = [node.children[j - 1].labels[0].clone(), node.children[j].labels[0].clone()];
    let c = compose(dim, &pair, ctx)?;
    node.children.splice(j - 1..=j, [PsTree::leaf(c)]);
    Ok(out)
}

/// Inserts an identity cell at the middle label of a column.
fn insert_identity(tree: &PsTree<Tm>, path: &[usize], j: usize, ctx: &Ctx) -> Result<PsTree<Tm>, MetaError> {
    let mut out = tree.clone();
    let node = node_mut(&mut out, path);
    let v = node.labels[j].clone();
    node.labels.insert(j, v.clone());
    node.children.insert(j, PsTree::leaf(id(&v, ctx)?));
    Ok(out)
}

type CancelKey = (u64, Tm);
static COUNITS: LazyLock<DashMap<CancelKey, Tm>> = LazyLock::new(DashMap::new);

/// `ε_t : t *_{n-1} t⁻¹ -> id(∂⁻t)` for an invertible `t` of dimension `n`.
pub fn cancel_counit(t: &Tm, ctx: &Ctx) -> Result<Tm, MetaError> {
    let key = (ctx.id(), t.clone());
    if let Some(r) = COUNITS.get(&key) {
        return Ok(r.clone());
    }
    let out = deep(|| counit(t, ctx))?;
    COUNITS.insert(key, out.clone());
    Ok(out)
}

fn counit(t: &Tm, ctx: &Ctx) -> Result<Tm, MetaError> {
    let (h, args) = t.as_coh().ok_or_else(|| MetaError::NotInvertible(t.to_string()))?;
    let shape = h.shape();
    let n = h.ty().dim() + 1;
    let kind = check_head(h)?;
    if kind == CohKind::Coherence {
        let formal: Vec<Tm> = (0..shape.len()).map(|l| Tm::var(Name::bound(l))).collect();
        let c = Tm::coh(h.clone(), formal.clone());
        let ci = invert(&c)?;
        let src = compose(n as usize - 1, &[c, ci], shape.ctx())?;
        let tgt = id(h.ty().src().unwrap(), shape.ctx())?;
        let base = type_of(&src, shape.ctx())?;
        return Ok(Tm::coh(Head::new(shape.clone(), Ty::arr(base, src, tgt)), args.to_vec()));
    }
    let k = n as usize - 1;
    let (h_inv, _) = opposite_head(h, OppositeSet::single(n as usize))?;
    let actual = shape.tree().map(&mut |l| args[*l].clone());
    let inverses = shape.tree().map(&mut |l| {
        if shape.var_dim(*l) == n {
            invert(&args[*l])
        } else {
            Ok(args[*l].clone())
        }
    });
    let inverses = lift_result(inverses)?;
    let cols = columns(&actual, k);
    let mut js: Vec<usize> = cols.iter().map(|p| node_mut(&mut actual.clone(), p).children.len()).collect();
    let full = js.clone();
    let mut steps = Vec::new();

    let start = doubled_state(&actual, &inverses, &cols, &js);
    let halves = |f: &PsTree<Tm>, c: &Ctx| -> Result<Tm, crate::pasting::PastingError> {
        let (mut first, mut second) = (f.clone(), f.clone());
        for (path, &r) in cols.iter().zip(&full) {
            let node = node_mut(&mut first, path);
            node.labels.truncate(r + 1);
            node.children.truncate(r);
            let node = node_mut(&mut second, path);
            node.labels.drain(..r);
            node.children.drain(..r);
        }
        let a = Tm::coh(h.clone(), first.labels_in_order());
        let b = Tm::coh(h_inv.clone(), second.labels_in_order());
        compose(k, &[a, b], c)
    };
    steps.extend(coh_step(&start, halves, |f, _| Ok(comp_terms(f)))?);

    for c in 0..cols.len() {
        while js[c] > 0 {
            let j = js[c];
            let path = &cols[c];
            let state = doubled_state(&actual, &inverses, &cols, &js);
            steps.extend(coh_step(
                &state,
                |f, _| Ok(comp_terms(f)),
                |f, cx| merge_middle(f, path, j, cx).map(|m| comp_terms(&m)).map_err(pasting_of),
            )?);
            let cell = node_mut(&mut actual.clone(), path).children[j - 1].labels[0].clone();
            let mut whisker = merge_middle(&state, path, j, ctx)?;
            let v = node_mut(&mut actual.clone(), path).labels[j - 1].clone();
            let leaf = &mut node_mut(&mut whisker, path).children[j - 1];
            leaf.labels.push(id(&v, ctx)?);
            leaf.children.push(PsTree::leaf(cancel_counit(&cell, ctx)?));
            steps.push(comp_terms(&whisker));
            js[c] -= 1;
            let last = js.iter().all(|&j| j == 0);
            let next = doubled_state(&actual, &inverses, &cols, &js);
            steps.extend(coh_step(
                &next,
                |f, cx| insert_identity(f, path, j - 1, cx).map(|m| comp_terms(&m)).map_err(pasting_of),
                |f, cx| if last { id(&comp_terms(f), cx) } else { Ok(comp_terms(f)) },
            )?);
        }
    }
    Ok(compose(n as usize, &steps, ctx)?)
}

fn pasting_of(e: MetaError) -> crate::pasting::PastingError {
    match e {
        MetaError::Pasting(p) => p,
        e => crate::pasting::PastingError::NotComposable(e.to_string()),
    }
}

fn lift_result(t: PsTree<Result<Tm, MetaError>>) -> Result<PsTree<Tm>, MetaError> {
    Ok(PsTree {
        labels: t.labels.into_iter().collect::<Result<_, _>>()?,
        children: t.children.into_iter().map(lift_result).collect::<Result<_, _>>()?,
    })
}

/// `η_t : id(∂⁺t) -> t⁻¹ *_{n-1} t`.
pub fn cancel_unit(t: &Tm, ctx: &Ctx) -> Result<Tm, MetaError> {
    let ti = invert(t)?;
    invert(&cancel_counit(&ti, ctx)?)
}

/// Which cancellation witness to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `t *_{n-1} t⁻¹ -> id`
    Counit,
    /// `id -> t⁻¹ *_{n-1} t`
    Unit,
}

pub fn cancellator(t: &Tm, side: Side, ctx: &Ctx) -> Result<Tm, MetaError> {
    match side {
        Side::Counit => cancel_counit(t, ctx),
        Side::Unit => cancel_unit(t, ctx),
    }
}

/// `σ̄`: inverts the images of the top-dimensional variables of `dom`.
pub fn bar_subst(sigma: &Sub, dom: &Ctx) -> Result<Sub, MetaError> {
    let n = dom.dim();
    let entries = sigma
        .entries()
        .iter()
        .map(|(x, t)| {
            let top = dom.lookup(*x).map(|a| a.dim() + 1) == Some(n);
            Ok((*x, if top { invert(t)? } else { t.clone() }))
        })
        .collect::<Result<Vec<_>, MetaError>>()?;
    Ok(Sub::new(entries))
}
