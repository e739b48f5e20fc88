//! Untyped syntax: names, terms, types, contexts and substitutions, together
//! with the substitution action, support and dimension.

mod name;
mod term;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock};

use dashmap::DashMap;
use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

pub use name::Name;
pub use term::{
    budget_exhausted, created_nodes, interned_terms, Head, NodeBudget, NodeMap, NodeSet, PassHasher, Tm, TmKind, Ty,
    TyKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("variable `{0}` declared twice")]
    Shadowing(Name),
}

/// Runs `f` with enough stack for deep recursion over large terms.
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(128 * 1024, 16 * 1024 * 1024, f)
}

static CTX_IDS: AtomicU64 = AtomicU64::new(0);

struct CtxNode {
    id: u64,
    entries: Vec<(Name, Ty)>,
    index: FxHashMap<Name, usize>,
}

/// An ordered list of typed variables with pairwise distinct names.
#[derive(Clone)]
pub struct Ctx(Arc<CtxNode>);

impl Ctx {
    pub fn new(entries: Vec<(Name, Ty)>) -> Result<Ctx, SyntaxError> {
        let mut index = FxHashMap::default();
        for (i, (n, _)) in entries.iter().enumerate() {
            if index.insert(*n, i).is_some() {
                return Err(SyntaxError::Shadowing(*n));
            }
        }
        let id = CTX_IDS.fetch_add(1, Ordering::Relaxed);
        Ok(Ctx(Arc::new(CtxNode { id, entries, index })))
    }

    pub fn empty() -> Ctx {
        Ctx::new(Vec::new()).unwrap()
    }

    pub fn extend(&self, name: Name, ty: Ty) -> Result<Ctx, SyntaxError> {
        let mut entries = self.0.entries.clone();
        entries.push((name, ty));
        Ctx::new(entries)
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn entries(&self) -> &[(Name, Ty)] {
        &self.0.entries
    }

    pub fn len(&self) -> usize {
        self.0.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = Name> + '_ {
        self.0.entries.iter().map(|(n, _)| *n)
    }

    pub fn lookup(&self, name: Name) -> Option<&Ty> {
        self.0.index.get(&name).map(|&i| &self.0.entries[i].1)
    }

    pub fn position(&self, name: Name) -> Option<usize> {
        self.0.index.get(&name).copied()
    }

    pub fn contains(&self, name: Name) -> bool {
        self.0.index.contains_key(&name)
    }

    /// Maximal dimension of a variable; `-1` for the empty context.
    pub fn dim(&self) -> i32 {
        self.0.entries.iter().map(|(_, t)| t.dim() + 1).max().unwrap_or(-1)
    }

    /// The identity substitution on this context.
    pub fn identity(&self) -> Sub {
        Sub::new(self.names().map(|n| (n, Tm::var(n))).collect())
    }

    /// Variables of this context that occur in no other variable's type.
    pub fn locally_maximal(&self) -> Vec<Name> {
        let mut used = FxHashSet::default();
        for (_, ty) in self.entries() {
            used.extend(vars_of_ty(ty));
        }
        self.names().filter(|n| !used.contains(n)).collect()
    }
}

impl PartialEq for Ctx {
    fn eq(&self, other: &Self) -> bool {
        self.entries() == other.entries()
    }
}

impl Eq for Ctx {}

impl std::fmt::Debug for Ctx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, (n, t)) in self.entries().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} : {t}")?;
        }
        f.write_str(")")
    }
}

/// An assignment of terms to the variables of a target context, in order.
#[derive(Clone, PartialEq, Eq)]
pub struct Sub {
    entries: Vec<(Name, Tm)>,
    index: FxHashMap<Name, usize>,
}

impl Sub {
    pub fn new(entries: Vec<(Name, Tm)>) -> Sub {
        let index = entries.iter().enumerate().map(|(i, (n, _))| (*n, i)).collect();
        Sub { entries, index }
    }

    /// Positional substitution for the bound levels of a coherence head.
    pub fn from_args(args: &[Tm]) -> Sub {
        Sub::new(args.iter().enumerate().map(|(i, t)| (Name::bound(i), t.clone())).collect())
    }

    pub fn entries(&self) -> &[(Name, Tm)] {
        &self.entries
    }

    pub fn get(&self, name: Name) -> Option<&Tm> {
        self.index.get(&name).map(|&i| &self.entries[i].1)
    }

    pub fn images(&self) -> impl Iterator<Item = &Tm> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply_tm(&self, t: &Tm) -> Result<Tm, SyntaxError> {
        Rewriter::new(|n| self.get(n).cloned().ok_or(SyntaxError::UnboundVariable(n))).tm(t)
    }

    pub fn apply_ty(&self, a: &Ty) -> Result<Ty, SyntaxError> {
        Rewriter::new(|n| self.get(n).cloned().ok_or(SyntaxError::UnboundVariable(n))).ty(a)
    }

    /// `self ∘ sigma`, which maps `x` to `x[self][sigma]`.
    pub fn compose(&self, sigma: &Sub) -> Result<Sub, SyntaxError> {
        let mut rw = Rewriter::new(|n| sigma.get(n).cloned().ok_or(SyntaxError::UnboundVariable(n)));
        let entries = self.entries.iter().map(|(n, t)| Ok((*n, rw.tm(t)?))).collect::<Result<_, SyntaxError>>()?;
        Ok(Sub::new(entries))
    }
}

impl std::fmt::Debug for Sub {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<")?;
        for (i, (n, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} -> {t}")?;
        }
        f.write_str(">")
    }
}

/// Memoized rewriting of variable leaves.
pub(crate) struct Rewriter<F> {
    leaf: F,
    memo: NodeMap<Tm, Tm>,
}

impl<F: FnMut(Name) -> Result<Tm, SyntaxError>> Rewriter<F> {
    pub(crate) fn new(leaf: F) -> Self {
        Rewriter { leaf, memo: NodeMap::default() }
    }

    pub(crate) fn tm(&mut self, t: &Tm) -> Result<Tm, SyntaxError> {
        if let Some(r) = self.memo.get(t) {
            return Ok(r.clone());
        }
        let out = match t.kind() {
            TmKind::Var(n) => (self.leaf)(*n)?,
            TmKind::Coh(h, args) => {
                let args = deep(|| args.iter().map(|a| self.tm(a)).collect::<Result<Vec<_>, _>>())?;
                Tm::coh(h.clone(), args)
            }
        };
        self.memo.insert(t.clone(), out.clone());
        Ok(out)
    }

    pub(crate) fn ty(&mut self, a: &Ty) -> Result<Ty, SyntaxError> {
        match a.kind() {
            TyKind::Obj => Ok(a.clone()),
            TyKind::Arr(b, u, v) => {
                let b = self.ty(b)?;
                Ok(Ty::arr(b, self.tm(u)?, self.tm(v)?))
            }
        }
    }
}

/// Instantiates a head-level type with positional arguments.
pub fn instantiate_ty(a: &Ty, args: &[Tm]) -> Ty {
    let mut rw = Rewriter::new(|n: Name| Ok(args[n.level().expect("closed head")].clone()));
    rw.ty(a).expect("closed head")
}

pub fn instantiate_tm(t: &Tm, args: &[Tm]) -> Tm {
    let mut rw = Rewriter::new(|n: Name| Ok(args[n.level().expect("closed head")].clone()));
    rw.tm(t).expect("closed head")
}

static COH_TYPES: LazyLock<DashMap<Tm, Ty, std::hash::BuildHasherDefault<PassHasher>>> =
    LazyLock::new(Default::default);

/// The type of `coh(H)[args]`, which depends only on the term.
pub fn coh_type(t: &Tm) -> Ty {
    if let Some(ty) = COH_TYPES.get(t) {
        return ty.clone();
    }
    let (h, args) = t.as_coh().expect("coherence term");
    let ty = instantiate_ty(h.ty(), args);
    COH_TYPES.insert(t.clone(), ty.clone());
    ty
}

/// Reads off the type of a term without checking it.
pub fn type_of(t: &Tm, ctx: &Ctx) -> Result<Ty, SyntaxError> {
    match t.kind() {
        TmKind::Var(n) => ctx.lookup(*n).cloned().ok_or(SyntaxError::UnboundVariable(*n)),
        TmKind::Coh(..) => Ok(coh_type(t)),
    }
}

/// `dim(t) = dim(A) + 1` for `t : A`.
pub fn dim_tm(t: &Tm, ctx: &Ctx) -> Result<i32, SyntaxError> {
    match t.kind() {
        TmKind::Var(n) => ctx.lookup(*n).map(|a| a.dim() + 1).ok_or(SyntaxError::UnboundVariable(*n)),
        TmKind::Coh(h, _) => Ok(h.ty().dim() + 1),
    }
}

/// Variables occurring syntactically in a term, in first-occurrence order.
pub fn vars_of_tm(t: &Tm) -> Vec<Name> {
    let mut c = VarCollector::default();
    c.tm(t);
    c.order
}

pub fn vars_of_ty(a: &Ty) -> Vec<Name> {
    let mut c = VarCollector::default();
    c.ty(a);
    c.order
}

#[derive(Default)]
pub(crate) struct VarCollector {
    seen: NodeSet<Tm>,
    names: FxHashSet<Name>,
    pub(crate) order: Vec<Name>,
}

impl VarCollector {
    pub(crate) fn tm(&mut self, t: &Tm) {
        if !self.seen.insert(t.clone()) {
            return;
        }
        match t.kind() {
            TmKind::Var(n) => {
                if self.names.insert(*n) {
                    self.order.push(*n);
                }
            }
            TmKind::Coh(_, args) => deep(|| args.iter().for_each(|a| self.tm(a))),
        }
    }

    pub(crate) fn ty(&mut self, a: &Ty) {
        if let TyKind::Arr(b, u, v) = a.kind() {
            self.ty(b);
            self.tm(u);
            self.tm(v);
        }
    }
}

/// Closes a set of variables downwards along the types of `ctx`.
fn close_support(mut marked: FxHashSet<Name>, ctx: &Ctx) -> Result<FxHashSet<Name>, SyntaxError> {
    for n in &marked {
        if !ctx.contains(*n) {
            return Err(SyntaxError::UnboundVariable(*n));
        }
    }
    for (n, ty) in ctx.entries().iter().rev() {
        if marked.contains(n) {
            marked.extend(vars_of_ty(ty));
        }
    }
    Ok(marked)
}

/// `supp(t)`: the occurring variables together with everything their types mention.
pub fn support_tm(t: &Tm, ctx: &Ctx) -> Result<FxHashSet<Name>, SyntaxError> {
    close_support(vars_of_tm(t).into_iter().collect(), ctx)
}

pub fn support_ty(a: &Ty, ctx: &Ctx) -> Result<FxHashSet<Name>, SyntaxError> {
    close_support(vars_of_ty(a).into_iter().collect(), ctx)
}

pub fn support_sub(s: &Sub, ctx: &Ctx) -> Result<FxHashSet<Name>, SyntaxError> {
    let mut c = VarCollector::default();
    for t in s.images() {
        c.tm(t);
    }
    close_support(c.order.into_iter().collect(), ctx)
}

/// A term is full in `ctx` when its support is every variable of `ctx`.
pub fn is_full(t: &Tm, ctx: &Ctx) -> Result<bool, SyntaxError> {
    Ok(support_tm(t, ctx)?.len() == ctx.len())
}

/// Alpha-equivalence. Heads are stored over bound levels, so this is identity.
pub fn alpha_equal(a: &Tm, b: &Tm) -> bool {
    a == b
}
