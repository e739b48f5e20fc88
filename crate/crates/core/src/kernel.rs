//! The typing judgements of CaTT and the side condition on coherences.

use std::fmt;
use std::sync::LazyLock;

use dashmap::DashMap;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::pasting::{PastingError, Sign};
use crate::syntax::{
    coh_type, deep, support_tm, Ctx, Head, Name, NodeMap, Rewriter, Sub, SyntaxError, Tm, TmKind, Ty, TyKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagKind {
    UnboundVariable,
    TypeMismatch,
    NotPasting,
    SideConditionFailed,
    Shadowing,
}

/// A failed judgement: the first violated premise and where it sits.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct Diagnostic {
    pub kind: DiagKind,
    pub path: Vec<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if !self.path.is_empty() {
            write!(f, " at {}", self.path.join("/"))?;
        }
        write!(f, ": {}", self.message)
    }
}

impl Diagnostic {
    pub fn new(kind: DiagKind, message: impl Into<String>) -> Self {
        Diagnostic { kind, path: Vec::new(), message: message.into() }
    }

    fn at(mut self, step: impl Into<String>) -> Self {
        self.path.insert(0, step.into());
        self
    }
}

impl From<SyntaxError> for Diagnostic {
    fn from(e: SyntaxError) -> Self {
        match e {
            SyntaxError::UnboundVariable(_) => Diagnostic::new(DiagKind::UnboundVariable, e.to_string()),
            SyntaxError::Shadowing(_) => Diagnostic::new(DiagKind::Shadowing, e.to_string()),
        }
    }
}

impl From<PastingError> for Diagnostic {
    fn from(e: PastingError) -> Self {
        match e {
            PastingError::Syntax(s) => s.into(),
            e @ PastingError::NotPasting { .. } => Diagnostic::new(DiagKind::NotPasting, e.to_string()),
            e => Diagnostic::new(DiagKind::TypeMismatch, e.to_string()),
        }
    }
}

/// Which branch of the side condition a coherence head satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CohKind {
    /// Source and target are full in the two boundaries.
    Composite,
    /// Source and target are both full in the whole pasting context.
    Coherence,
}

type CheckedKey = (u64, Tm);
static CHECKED: LazyLock<DashMap<CheckedKey, Ty, std::hash::BuildHasherDefault<rustc_hash::FxHasher>>> =
    LazyLock::new(Default::default);

/// Checks terms against a fixed context, remembering every verified subterm.
pub struct Checker {
    ctx: Ctx,
    memo: NodeMap<Tm, Ty>,
}

impl Checker {
    pub fn new(ctx: &Ctx) -> Self {
        Checker { ctx: ctx.clone(), memo: NodeMap::default() }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// Infers and verifies the type of `t`.
    pub fn tm(&mut self, t: &Tm) -> Result<Ty, Diagnostic> {
        if let Some(ty) = self.memo.get(t) {
            return Ok(ty.clone());
        }
        if let Some(ty) = CHECKED.get(&(self.ctx.id(), t.clone())) {
            let ty = ty.clone();
            self.memo.insert(t.clone(), ty.clone());
            return Ok(ty);
        }
        let ty =
            match t.kind() {
                TmKind::Var(n) => self.ctx.lookup(*n).cloned().ok_or_else(|| {
                    Diagnostic::new(DiagKind::UnboundVariable, format!("`{n}` is not in the context"))
                })?,
                TmKind::Coh(h, args) => {
                    check_head(h).map_err(|d| d.at("head"))?;
                    let shape = h.shape();
                    if args.len() != shape.len() {
                        return Err(Diagnostic::new(
                            DiagKind::TypeMismatch,
                            format!("coherence expects {} arguments, got {}", shape.len(), args.len()),
                        ));
                    }
                    let mut inst = Rewriter::new(|n: Name| Ok(args[n.level().unwrap()].clone()));
                    for (i, (a, (_, expected))) in args.iter().zip(shape.ctx().entries()).enumerate() {
                        let found = deep(|| self.tm(a)).map_err(|d| d.at(format!("arg {i}")))?;
                        let expected = inst.ty(expected).map_err(Diagnostic::from)?;
                        if found != expected {
                            return Err(Diagnostic::new(
                                DiagKind::TypeMismatch,
                                format!("argument has type {found} but {expected} was expected"),
                            )
                            .at(format!("arg {i}")));
                        }
                    }
                    coh_type(t)
                }
            };
        self.memo.insert(t.clone(), ty.clone());
        if t.as_coh().is_some() {
            CHECKED.insert((self.ctx.id(), t.clone()), ty.clone());
        }
        Ok(ty)
    }

    /// Verifies that `t` has exactly the type `expected`.
    pub fn tm_at(&mut self, t: &Tm, expected: &Ty) -> Result<(), Diagnostic> {
        self.ty(expected).map_err(|d| d.at("expected type"))?;
        let found = self.tm(t)?;
        if &found != expected {
            return Err(Diagnostic::new(
                DiagKind::TypeMismatch,
                format!("term has type {found} but {expected} was expected"),
            ));
        }
        Ok(())
    }

    pub fn ty(&mut self, a: &Ty) -> Result<(), Diagnostic> {
        match a.kind() {
            TyKind::Obj => Ok(()),
            TyKind::Arr(base, u, v) => {
                self.ty(base).map_err(|d| d.at("base"))?;
                let tu = self.tm(u).map_err(|d| d.at("src"))?;
                let tv = self.tm(v).map_err(|d| d.at("tgt"))?;
                if &tu != base {
                    return Err(Diagnostic::new(DiagKind::TypeMismatch, format!("source has type {tu}, not {base}")));
                }
                if &tv != base {
                    return Err(Diagnostic::new(DiagKind::TypeMismatch, format!("target has type {tv}, not {base}")));
                }
                Ok(())
            }
        }
    }

    /// `ctx ⊢ sigma : target`.
    pub fn sub(&mut self, sigma: &Sub, target: &Ctx) -> Result<(), Diagnostic> {
        if sigma.len() != target.len() {
            return Err(Diagnostic::new(
                DiagKind::TypeMismatch,
                format!("substitution has {} entries, context has {}", sigma.len(), target.len()),
            ));
        }
        for (i, ((n, t), (m, a))) in sigma.entries().iter().zip(target.entries()).enumerate() {
            if n != m {
                return Err(Diagnostic::new(
                    DiagKind::TypeMismatch,
                    format!("entry {i} assigns `{n}`, expected `{m}`"),
                ));
            }
            let found = self.tm(t).map_err(|d| d.at(n.to_string()))?;
            let prefix = Sub::new(sigma.entries()[..i].to_vec());
            let expected = prefix.apply_ty(a).map_err(Diagnostic::from)?;
            if found != expected {
                return Err(Diagnostic::new(
                    DiagKind::TypeMismatch,
                    format!("`{n}` is sent to a term of type {found}, expected {expected}"),
                ));
            }
        }
        Ok(())
    }
}

/// `Γ ⊢`: names are distinct by construction, types must be well formed.
pub fn check_ctx(ctx: &Ctx) -> Result<(), Diagnostic> {
    let mut prefix: Vec<(Name, Ty)> = Vec::new();
    for (n, a) in ctx.entries() {
        let c = Ctx::new(prefix.clone()).map_err(Diagnostic::from)?;
        Checker::new(&c).ty(a).map_err(|d| d.at(n.to_string()))?;
        prefix.push((*n, a.clone()));
    }
    Ok(())
}

/// Validates a coherence head once and caches the verdict.
pub fn check_head(h: &Head) -> Result<CohKind, Diagnostic> {
    h.node().verdict.get_or_init(|| deep(|| verify_head(h))).clone()
}

fn verify_head(h: &Head) -> Result<CohKind, Diagnostic> {
    let shape = h.shape();
    let ctx = shape.ctx();
    let Some((_, u, v)) = h.ty().as_arr() else {
        return Err(Diagnostic::new(DiagKind::SideConditionFailed, "a coherence must have an arrow type"));
    };
    Checker::new(ctx).ty(h.ty()).map_err(|d| d.at("type"))?;
    let su = support_tm(u, ctx)?;
    let sv = support_tm(v, ctx)?;
    if su.len() == ctx.len() && sv.len() == ctx.len() {
        return Ok(CohKind::Coherence);
    }
    if !shape.is_point() {
        let levels =
            |sign| -> FxHashSet<Name> { shape.boundary(sign).unwrap().1.iter().map(|&l| Name::bound(l)).collect() };
        if su == levels(Sign::Minus) && sv == levels(Sign::Plus) {
            return Ok(CohKind::Composite);
        }
    }
    Err(Diagnostic::new(
        DiagKind::SideConditionFailed,
        "source and target are neither full in the boundaries nor full in the pasting context",
    ))
}

/// Classifies a coherence term by the branch its head satisfies.
pub fn classify_coh(t: &Tm) -> Result<CohKind, Diagnostic> {
    match t.as_coh() {
        Some((h, _)) => check_head(h),
        None => Err(Diagnostic::new(DiagKind::TypeMismatch, "a variable is not a coherence")),
    }
}

/// `Γ ⊢ t : A`, returning the inferred type.
pub fn check_tm(t: &Tm, ctx: &Ctx) -> Result<Ty, Diagnostic> {
    Checker::new(ctx).tm(t)
}

/// `Γ ⊢ t : A` for a given `A`, compared syntactically.
pub fn check_tm_at(t: &Tm, expected: &Ty, ctx: &Ctx) -> Result<(), Diagnostic> {
    Checker::new(ctx).tm_at(t, expected)
}

pub fn check_ty(a: &Ty, ctx: &Ctx) -> Result<(), Diagnostic> {
    Checker::new(ctx).ty(a)
}

pub fn check_sub(sigma: &Sub, target: &Ctx, ctx: &Ctx) -> Result<(), Diagnostic> {
    Checker::new(ctx).sub(sigma, target)
}

/// The subject of a judgement.
#[derive(Clone, Debug)]
pub enum Judgement {
    Ctx,
    Ty(Ty),
    Tm(Tm, Option<Ty>),
    Sub(Sub, Ctx),
}

/// Checks a judgement in `gamma` (the context itself is checked first).
pub fn check_judgement(j: &Judgement, gamma: &Ctx) -> Result<Option<Ty>, Diagnostic> {
    check_ctx(gamma).map_err(|d| d.at("context"))?;
    match j {
        Judgement::Ctx => Ok(None),
        Judgement::Ty(a) => check_ty(a, gamma).map(|_| None),
        Judgement::Tm(t, None) => check_tm(t, gamma).map(Some),
        Judgement::Tm(t, Some(a)) => check_tm_at(t, a, gamma).map(|_| Some(a.clone())),
        Judgement::Sub(s, target) => check_sub(s, target, gamma).map(|_| None),
    }
}
