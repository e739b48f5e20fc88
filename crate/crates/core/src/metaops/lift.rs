//! Lifting a term along an up-closed set of variables: functoriality of
//! composites (depth 0) and naturality of coherences (depth 1).

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;
use rustc_hash::FxHashSet;

use super::inverse::node_mut;
use super::MetaError;
use crate::kernel::{check_head, CohKind};
use crate::pasting::{coh_step, comp_terms, compose, recognize_unordered, PsContext, PsTree};
use crate::syntax::{deep, support_tm, type_of, vars_of_ty, Ctx, Head, Name, NodeMap, Sub, Tm, TmKind, Ty, TyKind};

pub type VarSet = FxHashSet<Name>;

/// `Γ↑X` with its two inclusions of `Γ`.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub ctx: Ctx,
    pub minus: Sub,
    pub plus: Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Keep,
    Minus,
    Plus,
    Arrow,
}

fn check_up_closed(ctx: &Ctx, set: &VarSet) -> Result<(), MetaError> {
    for n in set {
        if !ctx.contains(*n) {
            return Err(crate::syntax::SyntaxError::UnboundVariable(*n).into());
        }
    }
    for (n, a) in ctx.entries() {
        if !set.contains(n) && vars_of_ty(a).iter().any(|v| set.contains(v)) {
            return Err(MetaError::NotUpClosed(n.to_string()));
        }
    }
    Ok(())
}

/// `depth_X t = max{dim t - dim x : x ∈ supp(t) ∩ X}`, or `-1` if empty.
pub fn depth(t: &Tm, ctx: &Ctx, set: &VarSet) -> Result<i32, MetaError> {
    let d = type_of(t, ctx)?.dim() + 1;
    let supp = support_tm(t, ctx)?;
    Ok(supp.iter().filter(|x| set.contains(x)).map(|x| d - (ctx.lookup(*x).unwrap().dim() + 1)).max().unwrap_or(-1))
}

fn depth_ctx(ctx: &Ctx, set: &VarSet) -> Result<i32, MetaError> {
    let mut out = -1;
    for n in ctx.names() {
        out = out.max(depth(&Tm::var(n), ctx, set)?);
    }
    Ok(out)
}

/// `X_σ`: the variables of the domain whose image meets `X`.
pub fn lifted_set(sigma: &Sub, set: &VarSet) -> VarSet {
    sigma
        .entries()
        .iter()
        .filter(|(_, t)| crate::syntax::vars_of_tm(t).iter().any(|v| set.contains(v)))
        .map(|(n, _)| *n)
        .collect()
}

struct Lifter<'a> {
    set: &'a VarSet,
    lifted: Ctx,
    touch: NodeMap<Tm, bool>,
    inj: [NodeMap<Tm, Tm>; 2],
    memo: NodeMap<Tm, Tm>,
}

impl<'a> Lifter<'a> {
    /// Builds `Γ↑X` entry by entry.
    fn new(base: &Ctx, set: &'a VarSet) -> Result<(Lifter<'a>, Vec<(usize, Role)>), MetaError> {
        let mut l = Lifter {
            set,
            lifted: Ctx::empty(),
            touch: NodeMap::default(),
            inj: [NodeMap::default(), NodeMap::default()],
            memo: NodeMap::default(),
        };
        let mut roles = Vec::new();
        for (i, (n, a)) in base.entries().iter().enumerate() {
            if set.contains(n) {
                let am = l.inj_ty(a, 0);
                let ap = l.inj_ty(a, 1);
                l.lifted = l.lifted.extend(n.minus(), am)?;
                l.lifted = l.lifted.extend(n.plus(), ap)?;
                let arrow = l.ty(a, &Tm::var(*n))?;
                l.lifted = l.lifted.extend(n.arrow(), arrow)?;
                roles.extend([(i, Role::Minus), (i, Role::Plus), (i, Role::Arrow)]);
            } else {
                l.lifted = l.lifted.extend(*n, a.clone())?;
                roles.push((i, Role::Keep));
            }
        }
        Ok((l, roles))
    }

    fn touches(&mut self, t: &Tm) -> bool {
        if let Some(&b) = self.touch.get(t) {
            return b;
        }
        let b = match t.kind() {
            TmKind::Var(n) => self.set.contains(n),
            TmKind::Coh(_, args) => deep(|| args.iter().any(|a| self.touches(a))),
        };
        self.touch.insert(t.clone(), b);
        b
    }

    fn inj_tm(&mut self, t: &Tm, side: usize) -> Tm {
        if let Some(r) = self.inj[side].get(t) {
            return r.clone();
        }
        let out = match t.kind() {
            TmKind::Var(n) if self.set.contains(n) => Tm::var(if side == 0 { n.minus() } else { n.plus() }),
            TmKind::Var(_) => t.clone(),
            TmKind::Coh(h, args) => {
                let args: Vec<Tm> = deep(|| args.iter().map(|a| self.inj_tm(a, side)).collect());
                Tm::coh(h.clone(), args)
            }
        };
        self.inj[side].insert(t.clone(), out.clone());
        out
    }

    fn inj_ty(&mut self, a: &Ty, side: usize) -> Ty {
        match a.kind() {
            TyKind::Obj => a.clone(),
            TyKind::Arr(b, u, v) => {
                let b = self.inj_ty(b, side);
                Ty::arr(b, self.inj_tm(u, side), self.inj_tm(v, side))
            }
        }
    }

    /// The endpoints of `A↑^t X`.
    fn ends(&mut self, a: &Ty, t: &Tm) -> Result<(Tm, Tm), MetaError> {
        let tm = self.inj_tm(t, 0);
        let tp = self.inj_tm(t, 1);
        let Some((_, u, v)) = a.as_arr() else {
            return Ok((tm, tp));
        };
        let k = a.dim() as usize;
        let l = if self.touches(v) { compose(k, &[tm, self.tm(v)?], &self.lifted)? } else { tm };
        let r = if self.touches(u) { compose(k, &[self.tm(u)?, tp], &self.lifted)? } else { tp };
        Ok((l, r))
    }

    fn ty(&mut self, a: &Ty, t: &Tm) -> Result<Ty, MetaError> {
        let (l, r) = self.ends(a, t)?;
        let base = type_of(&l, &self.lifted)?;
        Ok(Ty::arr(base, l, r))
    }

    fn tm(&mut self, t: &Tm) -> Result<Tm, MetaError> {
        if let Some(r) = self.memo.get(t) {
            return Ok(r.clone());
        }
        let out = match t.kind() {
            TmKind::Var(n) if self.set.contains(n) => Tm::var(n.arrow()),
            TmKind::Var(_) => return Err(MetaError::NothingToLift),
            TmKind::Coh(h, args) => {
                if crate::syntax::budget_exhausted() {
                    return Err(MetaError::BudgetExceeded);
                }
                let ys: Vec<usize> = (0..args.len()).filter(|&i| self.touches(&args[i])).collect();
                if ys.is_empty() {
                    return Err(MetaError::NothingToLift);
                }
                let lh = lift_head(h, &ys)?;
                let mut images = Vec::with_capacity(lh.roles.len());
                for &(i, role) in &lh.roles {
                    images.push(match role {
                        Role::Keep => args[i].clone(),
                        Role::Minus => self.inj_tm(&args[i], 0),
                        Role::Plus => self.inj_tm(&args[i], 1),
                        Role::Arrow => deep(|| self.tm(&args[i]))?,
                    });
                }
                let sub = Sub::new(lh.ctx.names().zip(images).collect());
                sub.apply_tm(&lh.term)?
            }
        };
        self.memo.insert(t.clone(), out.clone());
        Ok(out)
    }
}

/// `coh(Δ : A)↑Y` over `Δ↑Y`, with the origin of each variable.
struct LiftedHead {
    ctx: Ctx,
    roles: Vec<(usize, Role)>,
    term: Tm,
}

type LiftKey = (Head, Vec<usize>);
static LIFTED_HEADS: LazyLock<DashMap<LiftKey, Arc<LiftedHead>>> = LazyLock::new(DashMap::new);

fn lift_head(h: &Head, ys: &[usize]) -> Result<Arc<LiftedHead>, MetaError> {
    let key = (h.clone(), ys.to_vec());
    if let Some(r) = LIFTED_HEADS.get(&key) {
        return Ok(r.clone());
    }
    let out = Arc::new(deep(|| build_lifted_head(h, ys))?);
    LIFTED_HEADS.insert(key, out.clone());
    Ok(out)
}

fn build_lifted_head(h: &Head, ys: &[usize]) -> Result<LiftedHead, MetaError> {
    let shape = h.shape();
    let delta = shape.ctx();
    let set: VarSet = ys.iter().map(|&i| Name::bound(i)).collect();
    let (mut l, roles) = Lifter::new(delta, &set)?;
    let c = Tm::coh(h.clone(), delta.names().map(Tm::var).collect::<Vec<_>>());
    let (src, tgt) = l.ends(h.ty(), &c)?;
    let term = match depth_ctx(delta, &set)? {
        d if d <= 0 => {
            let ps = PsContext::from_tree(recognize_unordered(&l.lifted)?)?;
            ps.coh(&src, &tgt)?
        }
        1 if check_head(h)? == CohKind::Composite => cylinder(h, &set, &mut l, &src, &tgt)?,
        1 => return Err(MetaError::SynthesisFailed("coherence lifted along a set of context depth 1".into())),
        d => return Err(MetaError::DepthTooLarge { found: d }),
    };
    Ok(LiftedHead { ctx: l.lifted, roles, term })
}

/// Rewrites a term over the labels of `actual` into one over `formal`.
fn formalize(t: &Tm, actual: &PsTree<Tm>, formal: &PsTree<Tm>) -> Result<Tm, crate::pasting::PastingError> {
    let pairs = actual
        .labels_in_order()
        .into_iter()
        .zip(formal.labels_in_order())
        .map(|(a, f)| (a.as_var().expect("variable labels"), f))
        .collect();
    Ok(Sub::new(pairs).apply_tm(t)?)
}

fn merge_at(
    tree: &PsTree<Tm>,
    path: &[usize],
    i: usize,
    ctx: &Ctx,
) -> Result<PsTree<Tm>, crate::pasting::PastingError> {
    let mut out = tree.clone();
    let node = node_mut(&mut out, path);
    let k = (type_of(&node.labels[0], ctx)?.dim() + 1) as usize;
    node.labels.remove(i + 1);
    let pair = [node.children[i].labels[0].clone(), node.children[i + 1].labels[0].clone()];
    let c = compose(k, &pair, ctx)?;
    node.children.splice(i..=i + 1, [PsTree::leaf(c)]);
    Ok(out)
}

/// The naturality square of a composite along variables of its top two
/// dimensions, assembled column by column from whiskers of the lifted top
/// cells and rebracketing coherences.
fn cylinder(h: &Head, set: &VarSet, l: &mut Lifter<'_>, src: &Tm, tgt: &Tm) -> Result<Tm, MetaError> {
    let shape = h.shape();
    let d = shape.dim() as usize;
    let var = |lv: usize| Name::bound(lv);
    let inside = |lv: usize| set.contains(&var(lv));
    let minus = |lv: usize| Tm::var(if inside(lv) { var(lv).minus() } else { var(lv) });
    let plus = |lv: usize| Tm::var(if inside(lv) { var(lv).plus() } else { var(lv) });
    let arrow = |lv: usize| Tm::var(var(lv).arrow());

    let tree = shape.tree();
    let mut cols: Vec<(Vec<usize>, PsTree<usize>)> = Vec::new();
    fn find(t: &PsTree<usize>, depth: usize, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, PsTree<usize>)>) {
        if depth == 0 {
            out.push((path.clone(), t.clone()));
            return;
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            find(c, depth - 1, path, out);
            path.pop();
        }
    }
    find(tree, d - 1, &mut Vec::new(), &mut cols);
    let mut skeleton = tree.map(&mut |lv| Tm::var(var(*lv)));
    fn check_low(t: &PsTree<usize>, depth: usize, inside: &dyn Fn(usize) -> bool) -> bool {
        depth == 0
            || (t.labels.iter().all(|&l| !inside(l)) && t.children.iter().all(|c| check_low(c, depth - 1, inside)))
    }
    if !check_low(tree, d - 1, &inside) {
        return Err(MetaError::DepthTooLarge { found: 2 });
    }

    // Column state with the moves at child indices >= s already done.
    let column = |col: &PsTree<usize>, s: usize| -> PsTree<Tm> {
        let (v, a) = (&col.labels, &col.children);
        let mut labels: Vec<Tm> = v[..=s].iter().map(|&x| minus(x)).collect();
        let mut children: Vec<PsTree<Tm>> = a[..s].iter().map(|c| PsTree::leaf(minus(c.labels[0]))).collect();
        if inside(v[s]) {
            labels.push(plus(v[s]));
            children.push(PsTree::leaf(arrow(v[s])));
        }
        labels.extend(v[s + 1..].iter().map(|&x| plus(x)));
        children.extend(a[s..].iter().map(|c| PsTree::leaf(plus(c.labels[0]))));
        PsTree { labels, children }
    };
    let mut splits: Vec<usize> = cols.iter().map(|(_, c)| c.children.len()).collect();
    let state = |skeleton: &mut PsTree<Tm>, splits: &[usize]| -> PsTree<Tm> {
        for ((path, col), &s) in cols.iter().zip(splits) {
            *node_mut(skeleton, path) = column(col, s);
        }
        skeleton.clone()
    };

    let mut steps = Vec::new();
    let start = state(&mut skeleton, &splits);
    steps.extend(coh_step(&start, |f, _| formalize(src, &start, f), |f, _| Ok(comp_terms(f)))?);
    for (ci, (path, col)) in cols.iter().enumerate() {
        for i in (0..col.children.len()).rev() {
            let a = col.children[i].labels[0];
            if !inside(a) {
                splits[ci] = i;
                continue;
            }
            let (vi, vn) = (col.labels[i], col.labels[i + 1]);
            let before = state(&mut skeleton, &splits);
            let merged = if inside(vn) {
                steps.extend(coh_step(
                    &before,
                    |f, _| Ok(comp_terms(f)),
                    |f, c| Ok(comp_terms(&merge_at(f, path, i, c)?)),
                )?);
                merge_at(&before, path, i, &l.lifted)?
            } else {
                before
            };
            let right = if inside(vi) { compose(d - 1, &[arrow(vi), plus(a)], &l.lifted)? } else { plus(a) };
            let mut whisker = merged;
            let leaf = &mut node_mut(&mut whisker, path).children[i];
            leaf.labels.push(right);
            leaf.children.push(PsTree::leaf(arrow(a)));
            steps.push(comp_terms(&whisker));
            splits[ci] = i;
            let after = state(&mut skeleton, &splits);
            if inside(vi) {
                steps.extend(coh_step(
                    &after,
                    |f, c| Ok(comp_terms(&merge_at(f, path, i, c)?)),
                    |f, _| Ok(comp_terms(f)),
                )?);
            }
        }
    }
    let end = state(&mut skeleton, &splits);
    steps.extend(coh_step(&end, |f, _| Ok(comp_terms(f)), |f, _| formalize(tgt, &end, f))?);
    if steps.is_empty() {
        return Err(MetaError::SynthesisFailed("empty naturality cylinder".into()));
    }
    Ok(compose(d, &steps, &l.lifted)?)
}

/// `Γ↑X` together with `inc⁻` and `inc⁺`.
pub fn lift_ctx(ctx: &Ctx, set: &VarSet) -> Result<Lifted, MetaError> {
    check_up_closed(ctx, set)?;
    if depth_ctx(ctx, set)? > 1 {
        return Err(MetaError::DepthTooLarge { found: depth_ctx(ctx, set)? });
    }
    let (mut l, _) = Lifter::new(ctx, set)?;
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for n in ctx.names() {
        let t = Tm::var(n);
        minus.push((n, l.inj_tm(&t, 0)));
        plus.push((n, l.inj_tm(&t, 1)));
    }
    Ok(Lifted { ctx: l.lifted, minus: Sub::new(minus), plus: Sub::new(plus) })
}

fn lifter<'a>(ctx: &Ctx, set: &'a VarSet) -> Result<Lifter<'a>, MetaError> {
    check_up_closed(ctx, set)?;
    Ok(Lifter::new(ctx, set)?.0)
}

/// `t↑X`, a term of `Γ↑X` of type `A↑^t X`.
pub fn lift_tm(t: &Tm, ctx: &Ctx, set: &VarSet) -> Result<Tm, MetaError> {
    match depth(t, ctx, set)? {
        -1 => Err(MetaError::NothingToLift),
        0 | 1 => lifter(ctx, set)?.tm(t),
        d => Err(MetaError::DepthTooLarge { found: d }),
    }
}

/// `A↑^t X`.
pub fn lift_ty(a: &Ty, t: &Tm, ctx: &Ctx, set: &VarSet) -> Result<Ty, MetaError> {
    lifter(ctx, set)?.ty(a, t)
}

/// `σ↑X : Δ↑X_σ` for `Γ ⊢ σ : Δ`.
pub fn lift_sub(sigma: &Sub, ctx: &Ctx, set: &VarSet) -> Result<Sub, MetaError> {
    let mut l = lifter(ctx, set)?;
    let mut entries = Vec::new();
    for (n, t) in sigma.entries() {
        if l.touches(t) {
            entries.push((n.minus(), l.inj_tm(t, 0)));
            entries.push((n.plus(), l.inj_tm(t, 1)));
            entries.push((n.arrow(), l.tm(t)?));
        } else {
            entries.push((*n, t.clone()));
        }
    }
    Ok(Sub::new(entries))
}
