//! Random well-typed instances and the meta-operation laws checked on them.
//!
//! Instances are built from a vector of random choices so that proptest can
//! shrink them. Every generated term is kernel-checked before use.

#![allow(dead_code)]

use cattforge::kernel::check_tm;
use cattforge::metaops::{
    invert, lift_ctx, lift_sub, lift_tm, lifted_set, opposite_ctx, opposite_sub, opposite_tm, suspend_ctx, suspend_sub,
    suspend_tm, OppositeSet, VarSet,
};
use cattforge::pasting::{compose, id, identity, PsContext, PsTree};
use cattforge::syntax::{support_tm, type_of, Ctx, Name, Sub, Tm};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// A stream of random decisions.
pub struct Choices {
    raw: Vec<u32>,
    at: usize,
}

impl Choices {
    pub fn new(raw: Vec<u32>) -> Self {
        Choices { raw, at: 0 }
    }

    /// A number in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        let v = self.raw[self.at % self.raw.len()];
        self.at += 1;
        if n == 0 {
            0
        } else {
            v as usize % n
        }
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 0
    }
}

pub fn choices() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(any::<u32>(), 48..96)
}

/// A random Batanin tree of height at most `max_height`, labelled with
/// fresh names.
pub fn random_tree(c: &mut Choices, max_height: usize) -> PsTree<Name> {
    fn go(c: &mut Choices, h: usize, next: &mut usize) -> PsTree<Name> {
        let mut fresh = || {
            let n = Name::new(&format!("v{next}"));
            *next += 1;
            n
        };
        let kids = if h == 0 { 0 } else { c.below(3) };
        let mut labels = vec![fresh()];
        let mut children = Vec::new();
        for _ in 0..kids {
            children.push(go(c, h - 1, next));
            labels.push(Name::new(&format!("v{next}")));
            *next += 1;
        }
        PsTree::node(labels, children)
    }
    let mut next = 0;
    let h = 1 + c.below(max_height);
    // Force at least one edge so the context is not a point.
    let mut t = go(c, h, &mut next);
    if t.height() == 0 {
        t = PsTree::node(vec![Name::new("v0"), Name::new("v1")], vec![PsTree::leaf(Name::new("v2"))]);
    }
    t
}

pub fn random_ps(c: &mut Choices, max_height: usize) -> PsContext {
    PsContext::from_tree(random_tree(c, max_height)).expect("trees give pasting contexts")
}

/// `∂^±_k t`, iterating sources or targets down to dimension `k`.
pub fn boundary(t: &Tm, k: usize, plus: bool, ctx: &Ctx) -> Tm {
    let mut t = t.clone();
    while type_of(&t, ctx).unwrap().dim() + 1 > k as i32 {
        let ty = type_of(&t, ctx).unwrap();
        t = if plus { ty.tgt().unwrap().clone() } else { ty.src().unwrap().clone() };
    }
    t
}

pub fn dim(t: &Tm, ctx: &Ctx) -> usize {
    (type_of(t, ctx).unwrap().dim() + 1) as usize
}

/// A binary composite `u *_k v` recorded with its parts.
#[derive(Clone, Debug)]
pub struct Composite {
    pub k: usize,
    pub parts: [Tm; 2],
    pub term: Tm,
}

/// Well-typed terms of a context, built by identities, composites and
/// unitor-like coherences.
#[derive(Clone, Debug)]
pub struct Pool {
    pub ctx: Ctx,
    pub terms: Vec<Tm>,
    pub composites: Vec<Composite>,
}

const MAX_DIM: usize = 4;

impl Pool {
    pub fn new(ctx: &Ctx, c: &mut Choices, steps: usize) -> Pool {
        let mut pool = Pool { ctx: ctx.clone(), terms: ctx.names().map(Tm::var).collect(), composites: Vec::new() };
        if let Ok(ps) = cattforge::pasting::pasting_context(ctx) {
            if !ps.shape.is_disc() {
                pool.push(ps.comp());
            }
        }
        for _ in 0..steps {
            match c.below(4) {
                0 => {
                    let t = c.pick(&pool.terms).clone();
                    if dim(&t, ctx) < MAX_DIM {
                        pool.push(id(&t, ctx).unwrap());
                    }
                }
                1 | 2 => pool.compose_step(c),
                _ => pool.unitor_step(c),
            }
        }
        pool
    }

    fn push(&mut self, t: Tm) {
        check_tm(&t, &self.ctx).expect("generated terms are well typed");
        if !self.terms.contains(&t) {
            self.terms.push(t);
        }
    }

    /// `u *_k v`, with `v` either a matching pool term or an identity.
    fn compose_step(&mut self, c: &mut Choices) {
        let ctx = self.ctx.clone();
        let u = c.pick(&self.terms).clone();
        let du = dim(&u, &ctx);
        if du == 0 {
            return;
        }
        let k = c.below(du);
        let end = boundary(&u, k, true, &ctx);
        let matching: Vec<Tm> =
            self.terms.iter().filter(|v| dim(v, &ctx) > k && boundary(v, k, false, &ctx) == end).cloned().collect();
        let v = if !matching.is_empty() && c.coin() {
            c.pick(&matching).clone()
        } else {
            let j = 1 + c.below(MAX_DIM - k);
            identity(&end, j, &ctx).unwrap()
        };
        if let Ok(t) = compose(k, &[u.clone(), v.clone()], &ctx) {
            if check_tm(&t, &ctx).is_ok() && dim(&t, &ctx) <= MAX_DIM + 1 {
                self.composites.push(Composite { k, parts: [u, v], term: t.clone() });
                self.push(t);
            }
        }
    }

    /// A coherence `c -> c *_{n-1} id(∂⁺c)` for a composite `c` of the pool.
    fn unitor_step(&mut self, c: &mut Choices) {
        if self.composites.is_empty() {
            return;
        }
        let t = c.pick(&self.composites).term.clone();
        let (h, args) = t.as_coh().unwrap();
        let shape = h.shape();
        let n = shape.dim() as usize;
        if n == 0 || n + 1 > MAX_DIM + 1 {
            return;
        }
        let ps = PsContext::from_tree(shape.tree().map(&mut |l| Name::bound(*l))).unwrap();
        let comp = ps.comp();
        let tgt = boundary(&comp, n - 1, true, &ps.ctx);
        let Ok(right) = compose(n - 1, &[comp.clone(), id(&tgt, &ps.ctx).unwrap()], &ps.ctx) else { return };
        let Ok(coh) = ps.coh(&comp, &right) else { return };
        let (h2, _) = coh.as_coh().unwrap();
        let u = Tm::coh(h2.clone(), args.to_vec());
        if check_tm(&u, &self.ctx).is_ok() {
            self.push(u);
        }
    }

    /// The composites of the pool, each seen as a substitution from its
    /// head's pasting context.
    pub fn substitutions(&self) -> Vec<(Ctx, Sub)> {
        self.terms
            .iter()
            .filter_map(|t| t.as_coh())
            .map(|(h, args)| (h.shape().ctx().clone(), Sub::from_args(args)))
            .collect()
    }
}

/// A random pasting context with a pool of terms over it.
pub fn random_pool(c: &mut Choices) -> Pool {
    let ps = random_ps(c, 3);
    let steps = 4 + c.below(6);
    Pool::new(&ps.ctx, c, steps)
}

/// A substitution `σ : Δ -> Γ` from the pool together with a term pool
/// over `Δ`.
pub fn random_sub(c: &mut Choices) -> Option<(Pool, Ctx, Sub, Pool)> {
    let gamma = random_pool(c);
    let subs = gamma.substitutions();
    if subs.is_empty() {
        return None;
    }
    let (delta, sigma) = c.pick(&subs).clone();
    let steps = 3 + c.below(5);
    let dpool = Pool::new(&delta, c, steps);
    Some((gamma, delta, sigma, dpool))
}

pub fn random_op_set(c: &mut Choices) -> OppositeSet {
    let dims: Vec<usize> = (1..=6).filter(|_| c.coin()).collect();
    OppositeSet::new(if dims.is_empty() { vec![1 + c.below(4)] } else { dims })
}

/// A nonempty set of top-dimensional variables.
pub fn random_top_set(ctx: &Ctx, c: &mut Choices) -> VarSet {
    let top = ctx.dim();
    let tops: Vec<Name> = ctx.names().filter(|n| ctx.lookup(*n).unwrap().dim() + 1 == top).collect();
    let mut set: VarSet = tops.iter().copied().filter(|_| c.coin()).collect();
    if set.is_empty() {
        set.insert(*c.pick(&tops));
    }
    set
}

type Outcome = Result<(), TestCaseError>;

fn skip(why: &str) -> Outcome {
    Err(TestCaseError::reject(why.to_string()))
}

/// `Σ(t[σ]) = (Σt)[Σσ]`.
pub fn suspension_commutes_with_substitution(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let Some((gamma, delta, sigma, dpool)) = random_sub(c) else { return skip("no substitution") };
    let t = c.pick(&dpool.terms).clone();
    let (_, sg) = suspend_ctx(&gamma.ctx).unwrap();
    let (_, sd) = suspend_ctx(&delta).unwrap();
    let lhs = suspend_tm(&sigma.apply_tm(&t).unwrap(), &sg);
    let rhs = suspend_sub(&sigma, &sd, &sg).apply_tm(&suspend_tm(&t, &sd)).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `Σ(t₀ *_k t₁) = Σt₀ *_{k+1} Σt₁`.
pub fn suspension_commutes_with_composites(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let pool = random_pool(c);
    if pool.composites.is_empty() {
        return skip("no composite");
    }
    let comp = c.pick(&pool.composites).clone();
    let (sctx, s) = suspend_ctx(&pool.ctx).unwrap();
    let lhs = suspend_tm(&comp.term, &s);
    let parts: Vec<Tm> = comp.parts.iter().map(|p| suspend_tm(p, &s)).collect();
    let rhs = compose(comp.k + 1, &parts, &sctx).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `(t[σ])^{op M} = t^{op M}[σ^{op M}]`.
pub fn opposite_commutes_with_substitution(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let Some((_, _, sigma, dpool)) = random_sub(c) else { return skip("no substitution") };
    let t = c.pick(&dpool.terms).clone();
    let m = random_op_set(c);
    let lhs = opposite_tm(&sigma.apply_tm(&t).unwrap(), m).unwrap();
    let rhs = opposite_sub(&sigma, m).unwrap().apply_tm(&opposite_tm(&t, m).unwrap()).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Opposites of composites reverse the factors exactly when `k+1 ∈ M`, and
/// opposites of identities are identities.
pub fn opposite_composite_and_identity_laws(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let pool = random_pool(c);
    let m = random_op_set(c);
    let octx = opposite_ctx(&pool.ctx, m).unwrap();
    if let Some(comp) = pool.composites.first().map(|_| c.pick(&pool.composites).clone()) {
        let mut parts: Vec<Tm> = comp.parts.iter().map(|p| opposite_tm(p, m).unwrap()).collect();
        if m.contains(comp.k as i32 + 1) {
            parts.reverse();
        }
        let lhs = opposite_tm(&comp.term, m).unwrap();
        prop_assert_eq!(lhs, compose(comp.k, &parts, &octx).unwrap());
    }
    let t = c.pick(&pool.terms).clone();
    let j = 1 + c.below(3);
    let lhs = opposite_tm(&identity(&t, j, &pool.ctx).unwrap(), m).unwrap();
    let rhs = identity(&opposite_tm(&t, m).unwrap(), j, &octx).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `t[inj^±] = t` whenever `supp(t)` misses `X`.
pub fn inclusion_absorbs_disjoint_terms(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let pool = random_pool(c);
    let x = random_top_set(&pool.ctx, c);
    let lifted = lift_ctx(&pool.ctx, &x).unwrap();
    let disjoint: Vec<Tm> = pool
        .terms
        .iter()
        .filter(|t| support_tm(t, &pool.ctx).unwrap().iter().all(|v| !x.contains(v)))
        .cloned()
        .collect();
    if disjoint.is_empty() {
        return skip("every term meets X");
    }
    let t = c.pick(&disjoint);
    prop_assert_eq!(&lifted.minus.apply_tm(t).unwrap(), t);
    prop_assert_eq!(&lifted.plus.apply_tm(t).unwrap(), t);
    Ok(())
}

/// `(t↑X_σ)[σ↑X] = t[σ]↑X` at depth 0.
pub fn lifting_commutes_with_substitution(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let Some((gamma, delta, sigma, dpool)) = random_sub(c) else { return skip("no substitution") };
    if delta.dim() != gamma.ctx.dim() {
        return skip("dimensions differ");
    }
    let x = random_top_set(&gamma.ctx, c);
    let tops: Vec<Tm> = dpool.terms.iter().filter(|t| dim(t, &delta) as i32 == delta.dim()).cloned().collect();
    if tops.is_empty() {
        return skip("no top-dimensional term");
    }
    let t = c.pick(&tops).clone();
    let image = sigma.apply_tm(&t).unwrap();
    let Ok(rhs) = lift_tm(&image, &gamma.ctx, &x) else { return skip("nothing to lift") };
    let xs = lifted_set(&sigma, &x);
    let lifted_sigma = lift_sub(&sigma, &gamma.ctx, &x).unwrap();
    let lhs = lifted_sigma.apply_tm(&lift_tm(&t, &delta, &xs).unwrap()).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `Σ(Γ↑X) = (ΣΓ)↑X` and `Σ(t↑X) = (Σt)↑X` at depth 0.
pub fn suspension_commutes_with_lifting(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let pool = random_pool(c);
    let x = random_top_set(&pool.ctx, c);
    let top = pool.ctx.dim() as usize;
    let tops: Vec<Tm> = pool.terms.iter().filter(|t| dim(t, &pool.ctx) == top).cloned().collect();
    let t = c.pick(&tops).clone();
    let Ok(lifted_t) = lift_tm(&t, &pool.ctx, &x) else { return skip("nothing to lift") };
    let lifted = lift_ctx(&pool.ctx, &x).unwrap();
    let (sl, s1) = suspend_ctx(&lifted.ctx).unwrap();
    let (sctx, s2) = suspend_ctx(&pool.ctx).unwrap();
    if s1 != s2 {
        return skip("pole names differ");
    }
    prop_assert_eq!(&sl, &lift_ctx(&sctx, &x).unwrap().ctx);
    let lhs = suspend_tm(&lifted_t, &s1);
    let rhs = lift_tm(&suspend_tm(&t, &s2), &sctx, &x).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `(t↑X)^{op M}[op↑] = t^{op M}↑X`, where `op↑` swaps `x_m` and `x_p`
/// when `dim x + 1 ∈ M`.
pub fn opposite_commutes_with_lifting(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let pool = random_pool(c);
    let x = random_top_set(&pool.ctx, c);
    let top = pool.ctx.dim() as usize;
    let tops: Vec<Tm> = pool.terms.iter().filter(|t| dim(t, &pool.ctx) == top).cloned().collect();
    let t = c.pick(&tops).clone();
    let m = random_op_set(c);
    let Ok(lifted_t) = lift_tm(&t, &pool.ctx, &x) else { return skip("nothing to lift") };
    let lifted = lift_ctx(&pool.ctx, &x).unwrap();
    let swap = m.contains(top as i32 + 1);
    let iso = Sub::new(
        lifted
            .ctx
            .names()
            .map(|n| {
                let img = x
                    .iter()
                    .find_map(|v| match () {
                        _ if swap && n == v.minus() => Some(v.plus()),
                        _ if swap && n == v.plus() => Some(v.minus()),
                        _ => None,
                    })
                    .unwrap_or(n);
                (n, Tm::var(img))
            })
            .collect(),
    );
    let lhs = iso.apply_tm(&opposite_tm(&lifted_t, m).unwrap()).unwrap();
    let octx = opposite_ctx(&pool.ctx, m).unwrap();
    let rhs = lift_tm(&opposite_tm(&t, m).unwrap(), &octx, &x).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// `(t[σ])⁻¹ = t⁻¹[σ]`.
pub fn inverse_commutes_with_substitution(raw: Vec<u32>) -> Outcome {
    let c = &mut Choices::new(raw);
    let Some((_, _, sigma, dpool)) = random_sub(c) else { return skip("no substitution") };
    let invertible: Vec<(Tm, Tm)> = dpool.terms.iter().filter_map(|t| invert(t).ok().map(|i| (t.clone(), i))).collect();
    if invertible.is_empty() {
        return skip("nothing invertible");
    }
    let (t, inv) = c.pick(&invertible).clone();
    let lhs = invert(&sigma.apply_tm(&t).unwrap()).unwrap();
    let rhs = sigma.apply_tm(&inv).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Name and body of every law, for drivers that run them all.
pub type Law = fn(Vec<u32>) -> Outcome;

pub const LAWS: [(&str, Law); 9] = [
    ("suspension/substitution", suspension_commutes_with_substitution),
    ("suspension/composite", suspension_commutes_with_composites),
    ("opposite/substitution", opposite_commutes_with_substitution),
    ("opposite composite and identity", opposite_composite_and_identity_laws),
    ("inclusion absorption", inclusion_absorbs_disjoint_terms),
    ("lifting/substitution at depth 0", lifting_commutes_with_substitution),
    ("suspension/lifting", suspension_commutes_with_lifting),
    ("opposite/lifting", opposite_commutes_with_lifting),
    ("inverse/substitution", inverse_commutes_with_substitution),
];

pub mod golden;
