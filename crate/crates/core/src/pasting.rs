//! Pasting contexts as Batanin trees: recognition, boundaries, discs and
//! spheres, canonical composites, identities and argument inference from
//! locally maximal cells.

use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, OnceLock};

use dashmap::DashMap;
use rustc_hash::{FxHashMap, FxHasher};
use thiserror::Error;

use crate::syntax::{dim_tm, type_of, Ctx, Head, Name, Sub, SyntaxError, Tm, TmKind, Ty, TyKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PastingError {
    #[error("not a pasting context at `{entry}`: {reason}")]
    NotPasting { entry: String, reason: String },
    #[error("the point context has no boundary")]
    TrivialBoundary,
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("boundary mismatch at `{var}`: expected {expected}, found {found}")]
    BoundaryMismatch { var: String, expected: String, found: String },
    #[error("wrong number of arguments: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A rooted planar tree whose node with `n` children carries `n + 1` labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsTree<L> {
    pub labels: Vec<L>,
    pub children: Vec<PsTree<L>>,
}

impl<L: Clone> PsTree<L> {
    pub fn leaf(label: L) -> Self {
        PsTree { labels: vec![label], children: Vec::new() }
    }

    pub fn node(labels: Vec<L>, children: Vec<PsTree<L>>) -> Self {
        assert_eq!(labels.len(), children.len() + 1, "a node with n children carries n+1 labels");
        PsTree { labels, children }
    }

    /// Labels in canonical order: a node emits its first label, then each
    /// further label followed by the subtree hanging below it.
    pub fn labels_in_order(&self) -> Vec<L> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<L>) {
        out.push(self.labels[0].clone());
        for (i, c) in self.children.iter().enumerate() {
            out.push(self.labels[i + 1].clone());
            c.collect(out);
        }
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn map<M: Clone>(&self, f: &mut impl FnMut(&L) -> M) -> PsTree<M> {
        PsTree {
            labels: self.labels.iter().map(&mut *f).collect(),
            children: self.children.iter().map(|c| c.map(f)).collect(),
        }
    }

    fn encode(&self, out: &mut Vec<u32>) {
        out.push(self.children.len() as u32);
        for c in &self.children {
            c.encode(out);
        }
    }

    /// Removes the leaves of maximal height, keeping the first (`-`) or last
    /// (`+`) label of their parents.
    pub fn boundary(&self, sign: Sign) -> Option<PsTree<L>> {
        let h = self.height();
        (h > 0).then(|| self.trim(h - 1, sign))
    }

    fn trim(&self, depth_left: usize, sign: Sign) -> PsTree<L> {
        if depth_left == 0 {
            let label = match sign {
                Sign::Minus => self.labels[0].clone(),
                Sign::Plus => self.labels[self.labels.len() - 1].clone(),
            };
            if self.children.is_empty() {
                return PsTree::leaf(self.labels[0].clone());
            }
            return PsTree::leaf(label);
        }
        PsTree {
            labels: self.labels.clone(),
            children: self.children.iter().map(|c| c.trim(depth_left - 1, sign)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

/// A boundary shape with the levels it occupies in the parent.
type Face = (Shape, Vec<usize>);

pub struct ShapeNode {
    hash: u64,
    encoding: Vec<u32>,
    tree: PsTree<usize>,
    ctx: Ctx,
    locmax: Vec<usize>,
    is_disc: bool,
    boundary: [OnceLock<Option<Face>>; 2],
    comp: OnceLock<Option<Head>>,
}

/// The shape of a pasting context, with variables named by bound levels.
#[derive(Clone)]
pub struct Shape(Arc<ShapeNode>);

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Shape {}

impl Hash for Shape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl std::fmt::Debug for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0.encoding)
    }
}

static SHAPES: LazyLock<DashMap<Vec<u32>, Shape>> = LazyLock::new(DashMap::new);

impl Shape {
    /// Interns the shape of `tree` and returns its labels in canonical order.
    pub fn of_tree<L: Clone>(tree: &PsTree<L>) -> (Shape, Vec<L>) {
        let mut enc = Vec::new();
        tree.encode(&mut enc);
        (Shape::from_encoding(enc), tree.labels_in_order())
    }

    fn from_encoding(enc: Vec<u32>) -> Shape {
        if let Some(s) = SHAPES.get(&enc) {
            return s.clone();
        }
        let shape = Shape::build(enc.clone());
        SHAPES.entry(enc).or_insert(shape).clone()
    }

    fn build(encoding: Vec<u32>) -> Shape {
        fn grow(enc: &[u32], pos: &mut usize, next: &mut usize) -> PsTree<usize> {
            let n = enc[*pos] as usize;
            *pos += 1;
            let mut labels = vec![*next];
            *next += 1;
            let mut children = Vec::new();
            for _ in 0..n {
                labels.push(*next);
                *next += 1;
                children.push(grow(enc, pos, next));
            }
            PsTree { labels, children }
        }
        let (mut pos, mut next) = (0, 0);
        let tree = grow(&encoding, &mut pos, &mut next);
        let mut types = vec![None; next];
        fn assign(t: &PsTree<usize>, ty: &Ty, types: &mut [Option<Ty>]) {
            for &l in &t.labels {
                types[l] = Some(ty.clone());
            }
            for (i, c) in t.children.iter().enumerate() {
                let src = Tm::var(Name::bound(t.labels[i]));
                let tgt = Tm::var(Name::bound(t.labels[i + 1]));
                assign(c, &Ty::arr(ty.clone(), src, tgt), types);
            }
        }
        assign(&tree, &Ty::obj(), &mut types);
        let entries = types.into_iter().enumerate().map(|(i, t)| (Name::bound(i), t.unwrap())).collect();
        let ctx = Ctx::new(entries).unwrap();
        let locmax = ctx.locally_maximal().into_iter().map(|n| n.level().unwrap()).collect();
        fn linear(t: &PsTree<usize>) -> bool {
            t.children.len() <= 1 && t.children.iter().all(linear)
        }
        let is_disc = linear(&tree);
        let mut h = FxHasher::default();
        encoding.hash(&mut h);
        Shape(Arc::new(ShapeNode {
            hash: h.finish(),
            encoding,
            tree,
            ctx,
            locmax,
            is_disc,
            boundary: [OnceLock::new(), OnceLock::new()],
            comp: OnceLock::new(),
        }))
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    /// Preorder list of children counts.
    pub fn encoding(&self) -> &[u32] {
        &self.0.encoding
    }

    /// The suspended shape: a new root with two labels above the old tree.
    /// Old level `l` becomes `l + 2`.
    pub fn suspend(&self) -> Shape {
        let mut enc = vec![1];
        enc.extend_from_slice(&self.0.encoding);
        Shape::from_encoding(enc)
    }

    /// The tree with labels given by bound levels.
    pub fn tree(&self) -> &PsTree<usize> {
        &self.0.tree
    }

    /// The pasting context over bound level names.
    pub fn ctx(&self) -> &Ctx {
        &self.0.ctx
    }

    pub fn len(&self) -> usize {
        self.0.ctx.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> i32 {
        self.0.tree.height() as i32
    }

    pub fn locmax(&self) -> &[usize] {
        &self.0.locmax
    }

    pub fn is_disc(&self) -> bool {
        self.0.is_disc
    }

    pub fn is_point(&self) -> bool {
        self.0.encoding == [0]
    }

    pub fn var_dim(&self, level: usize) -> i32 {
        self.0.ctx.entries()[level].1.dim() + 1
    }

    /// `∂±` of the shape together with the levels of its variables in `self`.
    pub fn boundary(&self, sign: Sign) -> Option<&(Shape, Vec<usize>)> {
        let slot = match sign {
            Sign::Minus => &self.0.boundary[0],
            Sign::Plus => &self.0.boundary[1],
        };
        slot.get_or_init(|| {
            let b = self.0.tree.boundary(sign)?;
            Some(Shape::of_tree(&b))
        })
        .as_ref()
    }

    /// The head of `comp` over this shape; `None` for discs, whose composite
    /// is their top variable.
    pub fn comp_head(&self) -> Option<&Head> {
        self.0
            .comp
            .get_or_init(|| {
                if self.is_disc() {
                    return None;
                }
                let side = |sign| {
                    let (b, incl) = self.boundary(sign).unwrap();
                    let args: Vec<Tm> = incl.iter().map(|&l| Tm::var(Name::bound(l))).collect();
                    b.comp_app(&args)
                };
                let (u, v) = (side(Sign::Minus), side(Sign::Plus));
                let base = type_of(&u, self.ctx()).unwrap();
                Some(Head::new(self.clone(), Ty::arr(base, u, v)))
            })
            .as_ref()
    }

    /// `comp` over this shape applied to positional arguments.
    pub fn comp_app(&self, args: &[Tm]) -> Tm {
        match self.comp_head() {
            None => args[args.len() - 1].clone(),
            Some(h) => Tm::coh(h.clone(), args.to_vec()),
        }
    }

    /// `comp` over this shape with the identity substitution.
    pub fn comp(&self) -> Tm {
        let args: Vec<Tm> = (0..self.len()).map(|l| Tm::var(Name::bound(l))).collect();
        self.comp_app(&args)
    }

    /// The disc shape of dimension `n`.
    pub fn disc(n: usize) -> Shape {
        let mut enc = vec![1; n];
        enc.push(0);
        Shape::from_encoding(enc)
    }

    /// `k`-gluing of discs of the given dimensions, all greater than `k`.
    pub fn glued(k: usize, dims: &[usize]) -> Shape {
        let mut enc = vec![1; k];
        enc.push(dims.len() as u32);
        for &d in dims {
            assert!(d > k);
            enc.extend(std::iter::repeat_n(1, d - k - 1));
            enc.push(0);
        }
        Shape::from_encoding(enc)
    }
}

/// A pasting context with its named Batanin tree.
#[derive(Clone, Debug)]
pub struct PsContext {
    pub ctx: Ctx,
    pub tree: PsTree<Name>,
    pub locmax: Vec<Name>,
    pub shape: Shape,
}

impl PsContext {
    /// Renames the shape's bound levels by the tree's labels.
    pub fn from_tree(tree: PsTree<Name>) -> Result<PsContext, PastingError> {
        let (shape, names) = Shape::of_tree(&tree);
        let ren = Sub::from_args(&names.iter().map(|n| Tm::var(*n)).collect::<Vec<_>>());
        let entries = shape
            .ctx()
            .entries()
            .iter()
            .zip(&names)
            .map(|((_, ty), n)| Ok((*n, ren.apply_ty(ty)?)))
            .collect::<Result<Vec<_>, PastingError>>()?;
        let ctx = Ctx::new(entries)?;
        let locmax = shape.locmax().iter().map(|&l| names[l]).collect();
        Ok(PsContext { ctx, tree, locmax, shape })
    }

    /// The variables of the context in canonical order.
    pub fn names(&self) -> Vec<Name> {
        self.ctx.names().collect()
    }

    /// The identity substitution seen as positional arguments of the shape.
    pub fn args(&self) -> Vec<Tm> {
        self.ctx.names().map(Tm::var).collect()
    }

    pub fn boundary(&self, sign: Sign) -> Result<PsContext, PastingError> {
        let t = self.tree.boundary(sign).ok_or(PastingError::TrivialBoundary)?;
        PsContext::from_tree(t)
    }

    pub fn comp(&self) -> Tm {
        self.shape.comp_app(&self.args())
    }
}

impl PsContext {
    /// `coh(ps : src -> tgt)[id]` for endpoints written over the names of `self`.
    pub fn coh(&self, src: &Tm, tgt: &Tm) -> Result<Tm, PastingError> {
        let ren = Sub::new(self.ctx.names().enumerate().map(|(i, n)| (n, Tm::var(Name::bound(i)))).collect());
        let (fs, ft) = (ren.apply_tm(src)?, ren.apply_tm(tgt)?);
        let base = type_of(&fs, self.shape.ctx())?;
        let head = Head::new(self.shape.clone(), Ty::arr(base, fs, ft));
        Ok(Tm::coh(head, self.args()))
    }
}

/// `comp` over a tree whose labels are arbitrary terms.
pub fn comp_terms(tree: &PsTree<Tm>) -> Tm {
    let (shape, args) = Shape::of_tree(tree);
    shape.comp_app(&args)
}

/// A coherence over the pasting diagram `state`, whose endpoints are built by
/// `src` and `tgt` from a labelled tree. The builders are run on the formal
/// tree of the shape, so repeated labels in `state` stay distinct variables.
/// Returns `None` when both endpoints coincide.
pub fn coh_step(
    state: &PsTree<Tm>,
    src: impl FnOnce(&PsTree<Tm>, &Ctx) -> Result<Tm, PastingError>,
    tgt: impl FnOnce(&PsTree<Tm>, &Ctx) -> Result<Tm, PastingError>,
) -> Result<Option<Tm>, PastingError> {
    let (shape, args) = Shape::of_tree(state);
    let formal = shape.tree().map(&mut |l| Tm::var(Name::bound(*l)));
    let fs = src(&formal, shape.ctx())?;
    let ft = tgt(&formal, shape.ctx())?;
    if fs == ft {
        return Ok(None);
    }
    let base = type_of(&fs, shape.ctx())?;
    let head = Head::new(shape, Ty::arr(base, fs, ft));
    Ok(Some(Tm::coh(head, args)))
}

pub fn tree_to_context(tree: PsTree<Name>) -> Result<PsContext, PastingError> {
    PsContext::from_tree(tree)
}

fn not_pasting(entry: impl ToString, reason: impl Into<String>) -> PastingError {
    PastingError::NotPasting { entry: entry.to_string(), reason: reason.into() }
}

/// Reconstructs the tree of a context whose variables may be listed in any
/// globular order.
pub fn recognize_unordered(ctx: &Ctx) -> Result<PsTree<Name>, PastingError> {
    let mut by_base: FxHashMap<Ty, Vec<(Name, Name, Name)>> = FxHashMap::default();
    let mut objects = Vec::new();
    for (n, ty) in ctx.entries() {
        match ty.kind() {
            TyKind::Obj => objects.push(*n),
            TyKind::Arr(base, u, v) => match (u.as_var(), v.as_var()) {
                (Some(a), Some(b)) if ctx.contains(a) && ctx.contains(b) => {
                    by_base.entry(base.clone()).or_default().push((*n, a, b))
                }
                _ => return Err(not_pasting(n, "boundary is not a variable of the context")),
            },
        }
    }
    if objects.is_empty() {
        return Err(not_pasting("<empty>", "no object variable"));
    }
    let mut used = 0usize;
    let tree = chain(&Ty::obj(), objects, &by_base, &mut used)?;
    if used != ctx.len() {
        let placed: rustc_hash::FxHashSet<Name> = tree.labels_in_order().into_iter().collect();
        let stray = ctx.names().find(|n| !placed.contains(n)).unwrap();
        return Err(not_pasting(stray, "variable is not reachable from the root"));
    }
    Ok(tree)
}

fn chain(
    ty: &Ty,
    labels: Vec<Name>,
    by_base: &FxHashMap<Ty, Vec<(Name, Name, Name)>>,
    used: &mut usize,
) -> Result<PsTree<Name>, PastingError> {
    *used += labels.len();
    let edges: &[(Name, Name, Name)] = by_base.get(ty).map(|v| v.as_slice()).unwrap_or(&[]);
    if labels.len() == 1 {
        if let Some((e, _, _)) = edges.first() {
            return Err(not_pasting(e, "cell over a single-point level"));
        }
        return Ok(PsTree::leaf(labels[0]));
    }
    let starts: Vec<Name> = labels.iter().copied().filter(|l| edges.iter().all(|(_, _, b)| b != l)).collect();
    if starts.len() != 1 {
        return Err(not_pasting(labels[0], "labels do not form a single chain"));
    }
    let mut order = vec![starts[0]];
    let mut children = Vec::new();
    let mut consumed = 0;
    while order.len() < labels.len() {
        let cur = *order.last().unwrap();
        let out: Vec<&(Name, Name, Name)> = edges.iter().filter(|(_, a, _)| *a == cur).collect();
        let Some(&&(_, _, next)) = out.first() else {
            return Err(not_pasting(cur, "chain of labels is broken"));
        };
        if out.iter().any(|(_, _, b)| *b != next) || order.contains(&next) {
            return Err(not_pasting(out[0].0, "branching or cyclic cells"));
        }
        consumed += out.len();
        let group: Vec<Name> = out.iter().map(|(e, _, _)| *e).collect();
        let child_ty = Ty::arr(ty.clone(), Tm::var(cur), Tm::var(next));
        children.push(chain(&child_ty, group, by_base, used)?);
        order.push(next);
    }
    if consumed != edges.len() {
        let stray = edges.iter().find(|(_, a, _)| !order[..order.len() - 1].contains(a)).unwrap();
        return Err(not_pasting(stray.0, "cell outside the chain"));
    }
    Ok(PsTree { labels: order, children })
}

/// Recognizes a pasting context listed in the canonical order.
pub fn recognize_pasting(ctx: &Ctx) -> Result<PsTree<Name>, PastingError> {
    let tree = recognize_unordered(ctx)?;
    for (expected, found) in tree.labels_in_order().iter().zip(ctx.names()) {
        if *expected != found {
            return Err(not_pasting(found, format!("out of order, expected `{expected}` here")));
        }
    }
    Ok(tree)
}

/// The recognized pasting context of `ctx`.
pub fn pasting_context(ctx: &Ctx) -> Result<PsContext, PastingError> {
    PsContext::from_tree(recognize_pasting(ctx)?)
}

/// The disc context `D^n` with its canonical names.
pub fn disc(n: usize) -> PsContext {
    let mut tree = PsTree::leaf(Name::new(&format!("d{n}")));
    for i in (0..n).rev() {
        tree = PsTree::node(vec![Name::new(&format!("d{i}_m")), Name::new(&format!("d{i}_p"))], vec![tree]);
    }
    PsContext::from_tree(tree).unwrap()
}

/// The sphere context `S^n` and the type `S^n` of its filler.
pub fn sphere(n: i32) -> (Ctx, Ty) {
    let mut entries = Vec::new();
    let mut ty = Ty::obj();
    for i in 0..=n {
        let (m, p) = (Name::new(&format!("d{i}_m")), Name::new(&format!("d{i}_p")));
        entries.push((m, ty.clone()));
        entries.push((p, ty.clone()));
        ty = Ty::arr(ty, Tm::var(m), Tm::var(p));
    }
    (Ctx::new(entries).unwrap(), ty)
}

/// Structural first-order matching of a pattern type against a type.
pub(crate) struct Matcher<'a> {
    pub assigned: FxHashMap<Name, Tm>,
    pattern_ctx: &'a Ctx,
}

impl<'a> Matcher<'a> {
    pub(crate) fn new(pattern_ctx: &'a Ctx) -> Self {
        Matcher { assigned: FxHashMap::default(), pattern_ctx }
    }

    fn mismatch(var: impl ToString, expected: &dyn std::fmt::Display, found: &dyn std::fmt::Display) -> PastingError {
        PastingError::BoundaryMismatch {
            var: var.to_string(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn tm(&mut self, pat: &Tm, t: &Tm) -> Result<(), PastingError> {
        match pat.kind() {
            TmKind::Var(n) if self.pattern_ctx.contains(*n) => match self.assigned.get(n) {
                Some(prev) if prev != t => Err(Self::mismatch(n, prev, t)),
                Some(_) => Ok(()),
                None => {
                    self.assigned.insert(*n, t.clone());
                    Ok(())
                }
            },
            TmKind::Var(_) => {
                if pat == t {
                    Ok(())
                } else {
                    Err(Self::mismatch(pat, pat, t))
                }
            }
            TmKind::Coh(h, pargs) => match t.as_coh() {
                Some((h2, targs)) if h == h2 => {
                    for (p, a) in pargs.iter().zip(targs.iter()) {
                        self.tm(p, a)?;
                    }
                    Ok(())
                }
                _ => Err(Self::mismatch(pat, pat, t)),
            },
        }
    }

    pub(crate) fn ty(&mut self, pat: &Ty, a: &Ty) -> Result<(), PastingError> {
        match (pat.kind(), a.kind()) {
            (TyKind::Obj, TyKind::Obj) => Ok(()),
            (TyKind::Arr(pb, pu, pv), TyKind::Arr(b, u, v)) => {
                self.ty(pb, b)?;
                self.tm(pu, u)?;
                self.tm(pv, v)
            }
            _ => Err(Self::mismatch("<type>", pat, a)),
        }
    }
}

/// Builds the substitution into `pattern` (any context) determined by images
/// of its locally maximal variables, inferring the rest from boundaries.
pub fn match_locmax(pattern: &Ctx, locmax: &[Name], args: &[Tm], ambient: &Ctx) -> Result<Sub, PastingError> {
    if locmax.len() != args.len() {
        return Err(PastingError::Arity { expected: locmax.len(), got: args.len() });
    }
    let mut m = Matcher::new(pattern);
    for (n, a) in locmax.iter().zip(args) {
        m.assigned.insert(*n, a.clone());
    }
    for (n, ty) in pattern.entries().iter().rev() {
        let Some(img) = m.assigned.get(n).cloned() else {
            return Err(PastingError::NotComposable(format!("`{n}` is not determined by the arguments")));
        };
        let found = type_of(&img, ambient)?;
        m.ty(ty, &found).map_err(|e| match e {
            PastingError::BoundaryMismatch { expected, found, .. } => {
                PastingError::BoundaryMismatch { var: n.to_string(), expected, found }
            }
            e => e,
        })?;
    }
    Ok(Sub::new(pattern.names().map(|n| (n, m.assigned[&n].clone())).collect()))
}

/// Positional arguments of `shape` determined by its locally maximal images.
pub fn subst_from_locmax(shape: &Shape, args: &[Tm], ambient: &Ctx) -> Result<Vec<Tm>, PastingError> {
    let locmax: Vec<Name> = shape.locmax().iter().map(|&l| Name::bound(l)).collect();
    let s = match_locmax(shape.ctx(), &locmax, args, ambient)?;
    Ok(s.images().cloned().collect())
}

/// `comp` over `shape` applied to its locally maximal cells.
pub fn comp_of(shape: &Shape, args: &[Tm], ambient: &Ctx) -> Result<Tm, PastingError> {
    Ok(shape.comp_app(&subst_from_locmax(shape, args, ambient)?))
}

/// The composite `t_1 *_k ... *_k t_m`.
pub fn compose(k: usize, terms: &[Tm], ambient: &Ctx) -> Result<Tm, PastingError> {
    if terms.is_empty() {
        return Err(PastingError::NotComposable("empty composite".into()));
    }
    let dims = terms.iter().map(|t| dim_tm(t, ambient)).collect::<Result<Vec<_>, _>>()?;
    if dims.iter().all(|&d| d <= k as i32) {
        return if terms.iter().all(|t| *t == terms[0]) {
            Ok(terms[0].clone())
        } else {
            Err(PastingError::NotComposable("low-dimensional terms are not all equal".into()))
        };
    }
    if dims.iter().any(|&d| d <= k as i32) {
        return Err(PastingError::NotComposable(format!("mixed dimensions {dims:?} at level {k}")));
    }
    if terms.len() == 1 {
        return Ok(terms[0].clone());
    }
    let dims: Vec<usize> = dims.into_iter().map(|d| d as usize).collect();
    comp_of(&Shape::glued(k, &dims), terms, ambient)
}

/// `coh(shape : src -> tgt)` applied to the cells `args` of an ambient
/// context. The endpoint builders receive the formal locally maximal
/// variables of the shape and its context.
pub fn coh_over(
    shape: &Shape,
    args: &[Tm],
    ambient: &Ctx,
    src: impl FnOnce(&[Tm], &Ctx) -> Result<Tm, PastingError>,
    tgt: impl FnOnce(&[Tm], &Ctx) -> Result<Tm, PastingError>,
) -> Result<Tm, PastingError> {
    let formal: Vec<Tm> = shape.locmax().iter().map(|&l| Tm::var(Name::bound(l))).collect();
    let fs = src(&formal, shape.ctx())?;
    let ft = tgt(&formal, shape.ctx())?;
    let base = type_of(&fs, shape.ctx())?;
    let head = Head::new(shape.clone(), Ty::arr(base, fs, ft));
    Ok(Tm::coh(head, subst_from_locmax(shape, args, ambient)?))
}

fn identity_head(n: usize) -> Head {
    static HEADS: LazyLock<DashMap<usize, Head>> = LazyLock::new(DashMap::new);
    HEADS
        .entry(n)
        .or_insert_with(|| {
            let shape = Shape::disc(n);
            let top = Tm::var(Name::bound(shape.len() - 1));
            let ty = type_of(&top, shape.ctx()).unwrap();
            Head::new(shape, Ty::arr(ty, top.clone(), top))
        })
        .clone()
}

/// `id_t`, the identity on a cell.
pub fn id(t: &Tm, ambient: &Ctx) -> Result<Tm, PastingError> {
    let n = dim_tm(t, ambient)?;
    let shape = Shape::disc(n as usize);
    let args = subst_from_locmax(&shape, std::slice::from_ref(t), ambient)?;
    Ok(Tm::coh(identity_head(n as usize), args))
}

/// `id^k_t`, the `k`-fold iterated identity.
pub fn identity(t: &Tm, k: usize, ambient: &Ctx) -> Result<Tm, PastingError> {
    let mut out = t.clone();
    for _ in 0..k {
        out = id(&out, ambient)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    /// The tree of the running example: x, y, f, z, g, h, a, k, b.
    pub(crate) fn example_tree() -> PsTree<Name> {
        PsTree::node(
            vec![n("x"), n("y"), n("z")],
            vec![
                PsTree::leaf(n("f")),
                PsTree::node(vec![n("g"), n("h"), n("k")], vec![PsTree::leaf(n("a")), PsTree::leaf(n("b"))]),
            ],
        )
    }

    #[test]
    fn example_order_and_dim() {
        let ps = PsContext::from_tree(example_tree()).unwrap();
        let names: Vec<String> = ps.ctx.names().map(|n| n.to_string()).collect();
        assert_eq!(names, ["x", "y", "f", "z", "g", "h", "a", "k", "b"]);
        assert_eq!(ps.ctx.dim(), 2);
        assert_eq!(format!("{:?}", ps.ctx.lookup(n("a")).unwrap()), "g -> h");
    }

    #[test]
    fn example_boundaries() {
        let ps = PsContext::from_tree(example_tree()).unwrap();
        let m: Vec<String> = ps.boundary(Sign::Minus).unwrap().ctx.names().map(|n| n.to_string()).collect();
        let p: Vec<String> = ps.boundary(Sign::Plus).unwrap().ctx.names().map(|n| n.to_string()).collect();
        assert_eq!(m, ["x", "y", "f", "z", "g"]);
        assert_eq!(p, ["x", "y", "f", "z", "k"]);
    }

    #[test]
    fn recognition_round_trip() {
        let ps = PsContext::from_tree(example_tree()).unwrap();
        assert_eq!(recognize_pasting(&ps.ctx).unwrap(), example_tree());
    }

    #[test]
    fn disconnected_is_not_pasting() {
        let ctx = Ctx::new(vec![(n("x"), Ty::obj()), (n("y"), Ty::obj())]).unwrap();
        assert!(matches!(recognize_pasting(&ctx), Err(PastingError::NotPasting { .. })));
    }

    #[test]
    fn point_and_discs() {
        let p = disc(0);
        assert_eq!(p.ctx.len(), 1);
        for k in 0..5 {
            let d = disc(k);
            assert_eq!(d.ctx.len(), 2 * k + 1);
            assert_eq!(d.comp(), Tm::var(Name::new(&format!("d{k}"))));
            assert_eq!(recognize_pasting(&d.ctx).unwrap(), d.tree);
        }
        assert!(matches!(p.boundary(Sign::Minus), Err(PastingError::TrivialBoundary)));
    }

    #[test]
    fn disc_boundaries_are_discs() {
        let d = disc(3);
        assert_eq!(d.boundary(Sign::Minus).unwrap().shape, Shape::disc(2));
        assert_eq!(d.boundary(Sign::Plus).unwrap().shape, Shape::disc(2));
    }

    #[test]
    fn sphere_minus_one_is_empty() {
        let (ctx, ty) = sphere(-1);
        assert!(ctx.is_empty());
        assert!(ty.is_obj());
        assert_eq!(sphere(1).0.len(), 4);
    }

    #[test]
    fn degenerate_composite() {
        let ctx = Ctx::new(vec![(n("x"), Ty::obj())]).unwrap();
        let x = Tm::var(n("x"));
        assert_eq!(compose(0, &[x.clone(), x.clone()], &ctx).unwrap(), x);
    }

    #[test]
    fn boundary_mismatch_reported() {
        let ps = PsContext::from_tree(example_tree()).unwrap();
        let shape = Shape::glued(1, &[2, 2]);
        let err = comp_of(&shape, &[Tm::var(n("a")), Tm::var(n("a"))], &ps.ctx).unwrap_err();
        assert!(matches!(err, PastingError::BoundaryMismatch { .. }));
    }
}
