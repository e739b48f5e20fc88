//! Hash-consed terms, types and coherence heads.
//!
//! Every node is created through a global interner, so two structurally equal
//! nodes are the same allocation and equality is a pointer comparison.

use std::fmt;
use std::hash::{BuildHasherDefault, Hash, Hasher};
use std::sync::{Arc, LazyLock, OnceLock};

use dashmap::DashMap;
use rustc_hash::FxHasher;

use super::Name;
use crate::pasting::Shape;

/// Hasher for keys that already carry a precomputed hash.
#[derive(Default)]
pub struct PassHasher(u64);

impl Hasher for PassHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(*b);
        }
    }
    fn write_u64(&mut self, n: u64) {
        self.0 = n;
    }
}

pub type NodeMap<K, V> = std::collections::HashMap<K, V, BuildHasherDefault<PassHasher>>;
pub type NodeSet<K> = std::collections::HashSet<K, BuildHasherDefault<PassHasher>>;
type Interner<K> = DashMap<K, (), BuildHasherDefault<PassHasher>>;

fn mix(parts: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = FxHasher::default();
    for p in parts {
        h.write_u64(p);
    }
    h.finish()
}

pub enum TmKind {
    Var(Name),
    Coh(Head, Box<[Tm]>),
}

pub struct TmNode {
    hash: u64,
    kind: TmKind,
}

#[derive(Clone)]
pub struct Tm(Arc<TmNode>);

pub enum TyKind {
    Obj,
    Arr(Ty, Tm, Tm),
}

pub struct TyNode {
    hash: u64,
    dim: i32,
    kind: TyKind,
}

#[derive(Clone)]
pub struct Ty(Arc<TyNode>);

pub struct HeadNode {
    hash: u64,
    shape: Shape,
    ty: Ty,
    pub(crate) verdict: OnceLock<Result<crate::kernel::CohKind, crate::kernel::Diagnostic>>,
}

/// A closed coherence `coh(ps : ty)`: the pasting context is given by its
/// shape and `ty` is written over the shape's bound levels.
#[derive(Clone)]
pub struct Head(Arc<HeadNode>);

macro_rules! pointer_identity {
    ($t:ty) => {
        impl PartialEq for $t {
            fn eq(&self, other: &Self) -> bool {
                Arc::ptr_eq(&self.0, &other.0)
            }
        }
        impl Eq for $t {}
        impl Hash for $t {
            fn hash<H: Hasher>(&self, state: &mut H) {
                state.write_u64(self.0.hash)
            }
        }
    };
}

pointer_identity!(Tm);
pointer_identity!(Ty);
pointer_identity!(Head);

struct TmKey(Tm);
struct TyKey(Ty);
struct HeadKey(Head);

impl PartialEq for TmKey {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0 .0.kind, &other.0 .0.kind) {
            (TmKind::Var(a), TmKind::Var(b)) => a == b,
            (TmKind::Coh(h1, a1), TmKind::Coh(h2, a2)) => h1 == h2 && a1 == a2,
            _ => false,
        }
    }
}

impl PartialEq for TyKey {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0 .0.kind, &other.0 .0.kind) {
            (TyKind::Obj, TyKind::Obj) => true,
            (TyKind::Arr(a, u, v), TyKind::Arr(b, s, t)) => a == b && u == s && v == t,
            _ => false,
        }
    }
}

impl PartialEq for HeadKey {
    fn eq(&self, other: &Self) -> bool {
        self.0 .0.shape == other.0 .0.shape && self.0 .0.ty == other.0 .0.ty
    }
}

macro_rules! key_impls {
    ($k:ty) => {
        impl Eq for $k {}
        impl Hash for $k {
            fn hash<H: Hasher>(&self, state: &mut H) {
                state.write_u64(self.0 .0.hash)
            }
        }
    };
}

key_impls!(TmKey);
key_impls!(TyKey);
key_impls!(HeadKey);

static TERMS: LazyLock<Interner<TmKey>> = LazyLock::new(Interner::default);
static TYPES: LazyLock<Interner<TyKey>> = LazyLock::new(Interner::default);
static HEADS: LazyLock<Interner<HeadKey>> = LazyLock::new(Interner::default);

fn intern<K: Eq + Hash>(map: &Interner<K>, key: K, unwrap: impl Fn(&K) -> K) -> K {
    use dashmap::mapref::entry::Entry;
    match map.entry(key) {
        Entry::Occupied(e) => unwrap(e.key()),
        Entry::Vacant(e) => {
            let out = unwrap(e.key());
            e.insert(());
            CREATED.with(|c| c.set(c.get() + 1));
            out
        }
    }
}

thread_local! {
    static CREATED: std::cell::Cell<usize> = const { std::cell::Cell::new(0) };
    static LIMIT: std::cell::Cell<usize> = const { std::cell::Cell::new(usize::MAX) };
}

/// Caps the nodes the current thread may create while the guard lives.
/// Long-running builders poll [`budget_exhausted`] and bail out cleanly.
pub struct NodeBudget {
    previous: usize,
}

impl NodeBudget {
    pub fn new(limit: Option<usize>) -> NodeBudget {
        let previous = LIMIT.with(|l| l.get());
        let cap = limit.map_or(usize::MAX, |n| created_nodes().saturating_add(n));
        LIMIT.with(|l| l.set(cap.min(previous)));
        NodeBudget { previous }
    }
}

impl Drop for NodeBudget {
    fn drop(&mut self) {
        LIMIT.with(|l| l.set(self.previous));
    }
}

pub fn budget_exhausted() -> bool {
    created_nodes() > LIMIT.with(|l| l.get())
}

/// Nodes (terms, types and heads) first interned by the current thread.
pub fn created_nodes() -> usize {
    CREATED.with(|c| c.get())
}

/// Number of distinct term nodes created so far.
pub fn interned_terms() -> usize {
    TERMS.len()
}

impl Tm {
    pub fn var(name: Name) -> Tm {
        let hash = mix([1, u64::from(name.uid())]);
        let node = Tm(Arc::new(TmNode { hash, kind: TmKind::Var(name) }));
        intern(&TERMS, TmKey(node), |k| TmKey(k.0.clone())).0
    }

    pub fn coh(head: Head, args: impl Into<Box<[Tm]>>) -> Tm {
        let args = args.into();
        let hash = mix(std::iter::once(2).chain([head.0.hash]).chain(args.iter().map(|a| a.0.hash)));
        let node = Tm(Arc::new(TmNode { hash, kind: TmKind::Coh(head, args) }));
        intern(&TERMS, TmKey(node), |k| TmKey(k.0.clone())).0
    }

    pub fn kind(&self) -> &TmKind {
        &self.0.kind
    }

    pub fn as_var(&self) -> Option<Name> {
        match self.kind() {
            TmKind::Var(n) => Some(*n),
            TmKind::Coh(..) => None,
        }
    }

    pub fn as_coh(&self) -> Option<(&Head, &[Tm])> {
        match self.kind() {
            TmKind::Var(_) => None,
            TmKind::Coh(h, a) => Some((h, a)),
        }
    }

    /// Stable structural hash; equal for alpha-equivalent terms.
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    /// Address of the shared node, usable as an identity key.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }
}

impl Ty {
    pub fn obj() -> Ty {
        static OBJ: OnceLock<Ty> = OnceLock::new();
        OBJ.get_or_init(|| {
            let node = Ty(Arc::new(TyNode { hash: mix([3]), dim: -1, kind: TyKind::Obj }));
            intern(&TYPES, TyKey(node), |k| TyKey(k.0.clone())).0
        })
        .clone()
    }

    pub fn arr(base: Ty, src: Tm, tgt: Tm) -> Ty {
        let hash = mix([4, base.0.hash, src.0.hash, tgt.0.hash]);
        let dim = base.dim() + 1;
        let node = Ty(Arc::new(TyNode { hash, dim, kind: TyKind::Arr(base, src, tgt) }));
        intern(&TYPES, TyKey(node), |k| TyKey(k.0.clone())).0
    }

    pub fn kind(&self) -> &TyKind {
        &self.0.kind
    }

    /// `dim(*) = -1`, `dim(u -> v) = dim(base) + 1`.
    pub fn dim(&self) -> i32 {
        self.0.dim
    }

    pub fn is_obj(&self) -> bool {
        matches!(self.kind(), TyKind::Obj)
    }

    pub fn as_arr(&self) -> Option<(&Ty, &Tm, &Tm)> {
        match self.kind() {
            TyKind::Obj => None,
            TyKind::Arr(a, u, v) => Some((a, u, v)),
        }
    }

    pub fn src(&self) -> Option<&Tm> {
        self.as_arr().map(|(_, u, _)| u)
    }

    pub fn tgt(&self) -> Option<&Tm> {
        self.as_arr().map(|(_, _, v)| v)
    }

    pub fn base(&self) -> Option<&Ty> {
        self.as_arr().map(|(a, _, _)| a)
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }
}

impl Head {
    pub fn new(shape: Shape, ty: Ty) -> Head {
        let hash = mix([5, shape.structural_hash(), ty.0.hash]);
        let node = Head(Arc::new(HeadNode { hash, shape, ty, verdict: OnceLock::new() }));
        intern(&HEADS, HeadKey(node), |k| HeadKey(k.0.clone())).0
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    pub fn ty(&self) -> &Ty {
        &self.0.ty
    }

    pub(crate) fn node(&self) -> &HeadNode {
        &self.0
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }
}

impl fmt::Debug for Tm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::cli::print::inline_tm(self))
    }
}

impl fmt::Display for Tm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::cli::print::inline_tm(self))
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::cli::print::inline_ty(self))
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::cli::print::inline_ty(self))
    }
}

impl fmt::Debug for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "coh[{:?}]({:?})", self.shape(), self.ty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_shares_nodes() {
        let x = Tm::var(Name::new("x"));
        let y = Tm::var(Name::new("y"));
        let a = Ty::arr(Ty::obj(), x.clone(), y.clone());
        let b = Ty::arr(Ty::obj(), x.clone(), y.clone());
        assert_eq!(a, b);
        assert_eq!(x, Tm::var(Name::new("x")));
        assert_ne!(x, y);
    }

    #[test]
    fn type_dimension() {
        let x = Tm::var(Name::new("x"));
        assert_eq!(Ty::obj().dim(), -1);
        assert_eq!(Ty::arr(Ty::obj(), x.clone(), x).dim(), 0);
    }
}
