//! Printers.

use crate::syntax::{Ctx, Head, NodeMap, NodeSet, Tm, TmKind, Ty, TyKind};

const INLINE_LIMIT: usize = 400;

struct Inline {
    out: String,
}

impl Inline {
    fn full(&self) -> bool {
        self.out.len() > INLINE_LIMIT
    }

    fn tm(&mut self, t: &Tm) {
        if self.full() {
            return;
        }
        match t.kind() {
            TmKind::Var(n) => self.out.push_str(&n.text()),
            TmKind::Coh(h, args) => {
                self.out.push_str(&format!("coh({:?} : ", h.shape()));
                self.ty(h.ty());
                self.out.push_str(")[");
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.tm(a);
                }
                self.out.push(']');
            }
        }
    }

    fn ty(&mut self, a: &Ty) {
        match a.kind() {
            TyKind::Obj => self.out.push('*'),
            TyKind::Arr(_, u, v) => {
                self.tm(u);
                self.out.push_str(" -> ");
                self.tm(v);
            }
        }
    }

    fn finish(mut self) -> String {
        if self.full() {
            self.out.truncate(INLINE_LIMIT);
            while !self.out.is_char_boundary(self.out.len()) {
                self.out.pop();
            }
            self.out.push_str("...");
        }
        self.out
    }
}

/// A one-line rendering, truncated for large terms.
pub fn inline_tm(t: &Tm) -> String {
    let mut p = Inline { out: String::new() };
    p.tm(t);
    p.finish()
}

pub fn inline_ty(a: &Ty) -> String {
    let mut p = Inline { out: String::new() };
    p.ty(a);
    p.finish()
}

/// Name of the `i`-th variable of a coherence declaration.
pub fn head_var(level: usize) -> String {
    format!("x{level}")
}

/// Writes a term as a sequence of declarations.
///
/// Each distinct coherence head becomes a `coh cN` declaration and each
/// distinct non-variable subterm of `t` becomes `let aux_N` over `ctx`,
/// numbered in post-order. The last line is `let name ... = ...`.
pub fn print_shared(t: &Tm, ctx: &Ctx, name: &str) -> String {
    let mut p = Shared::new(ctx);
    p.visit_ctx();
    p.visit_tm(t);
    p.render(t, name)
}

struct Shared<'a> {
    ctx: &'a Ctx,
    heads: NodeMap<Head, usize>,
    head_order: Vec<Head>,
    lets: NodeMap<Tm, usize>,
    let_order: Vec<Tm>,
    visited_tys: NodeSet<Ty>,
}

impl<'a> Shared<'a> {
    fn new(ctx: &'a Ctx) -> Self {
        Shared {
            ctx,
            heads: NodeMap::default(),
            head_order: Vec::new(),
            lets: NodeMap::default(),
            let_order: Vec::new(),
            visited_tys: NodeSet::default(),
        }
    }

    fn visit_ctx(&mut self) {
        for (_, ty) in self.ctx.entries() {
            self.heads_of_ty(ty);
        }
    }

    /// Registers heads reachable from a type, dependencies first.
    fn heads_of_ty(&mut self, a: &Ty) {
        if !self.visited_tys.insert(a.clone()) {
            return;
        }
        if let TyKind::Arr(b, u, v) = a.kind() {
            self.heads_of_ty(b);
            self.heads_of_tm(u);
            self.heads_of_tm(v);
        }
    }

    fn heads_of_tm(&mut self, t: &Tm) {
        if let TmKind::Coh(h, args) = t.kind() {
            crate::syntax::deep(|| {
                self.head(h);
                for &l in h.shape().locmax() {
                    self.heads_of_tm(&args[l]);
                }
            });
        }
    }

    fn head(&mut self, h: &Head) {
        if self.heads.contains_key(h) {
            return;
        }
        self.heads_of_ty(h.ty());
        self.heads.insert(h.clone(), self.head_order.len());
        self.head_order.push(h.clone());
    }

    fn visit_tm(&mut self, t: &Tm) {
        if self.lets.contains_key(t) {
            return;
        }
        if let TmKind::Coh(h, args) = t.kind() {
            crate::syntax::deep(|| {
                self.head(h);
                for &l in h.shape().locmax() {
                    self.visit_tm(&args[l]);
                }
            });
            self.lets.insert(t.clone(), self.let_order.len());
            self.let_order.push(t.clone());
        }
    }

    /// `cN[locmax args]` with arguments written by `arg`.
    fn app(&self, out: &mut String, h: &Head, args: &[Tm], arg: &mut dyn FnMut(&mut String, &Tm)) {
        out.push_str(&format!("c{}[", self.heads[h]));
        for (i, &l) in h.shape().locmax().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            arg(out, &args[l]);
        }
        out.push(']');
    }

    /// Inline rendering, used inside types.
    fn inline(&self, out: &mut String, t: &Tm) {
        match t.kind() {
            TmKind::Var(n) => match n.level() {
                Some(l) => out.push_str(&head_var(l)),
                None => out.push_str(&n.text()),
            },
            TmKind::Coh(h, args) => {
                crate::syntax::deep(|| self.app(out, h, args, &mut |o, a| self.inline(o, a)));
            }
        }
    }

    fn ty(&self, out: &mut String, a: &Ty) {
        match a.kind() {
            TyKind::Obj => out.push('*'),
            TyKind::Arr(_, u, v) => {
                self.inline(out, u);
                out.push_str(" -> ");
                self.inline(out, v);
            }
        }
    }

    fn telescope(&self, out: &mut String, ctx: &Ctx, rename: &dyn Fn(crate::syntax::Name) -> String) {
        for (n, a) in ctx.entries() {
            out.push_str(&format!(" ({} : ", rename(*n)));
            self.ty(out, a);
            out.push(')');
        }
    }

    fn shared_arg(&self, out: &mut String, t: &Tm, locmax: &str) {
        match t.kind() {
            TmKind::Var(n) => out.push_str(&n.text()),
            TmKind::Coh(..) => out.push_str(&format!("aux_{}[{locmax}]", self.lets[t])),
        }
    }

    fn render(&self, root: &Tm, name: &str) -> String {
        let mut out = String::new();
        for (i, h) in self.head_order.iter().enumerate() {
            out.push_str(&format!("coh c{i}"));
            self.telescope(&mut out, h.shape().ctx(), &|n| head_var(n.level().unwrap()));
            out.push_str(" : ");
            self.ty(&mut out, h.ty());
            out.push('\n');
        }
        let locmax = self.ctx.locally_maximal().iter().map(|n| n.text().to_string()).collect::<Vec<_>>().join(", ");
        let mut tel = String::new();
        self.telescope(&mut tel, self.ctx, &|n| n.text().to_string());
        let body = |out: &mut String, t: &Tm| {
            let (h, args) = t.as_coh().unwrap();
            self.app(out, h, args, &mut |o, a| self.shared_arg(o, a, &locmax));
        };
        for (i, t) in self.let_order.iter().enumerate() {
            if t == root {
                continue;
            }
            out.push_str(&format!("let aux_{i}{tel} = "));
            body(&mut out, t);
            out.push('\n');
        }
        out.push_str(&format!("let {name}{tel} = "));
        match root.kind() {
            TmKind::Var(n) => out.push_str(&n.text()),
            TmKind::Coh(..) => body(&mut out, root),
        }
        out.push('\n');
        out
    }
}

/// Size measures of a term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TermStats {
    /// Nodes of the term written out as a tree, saturating at `u64::MAX`.
    pub nodes: u64,
    /// Distinct subterms, variables included.
    pub distinct: usize,
    /// Largest dimension of a subterm.
    pub max_dim: i32,
}

pub fn term_stats(t: &Tm, ctx: &Ctx) -> TermStats {
    fn go(t: &Tm, ctx: &Ctx, memo: &mut NodeMap<Tm, u64>, max_dim: &mut i32) -> u64 {
        if let Some(&n) = memo.get(t) {
            return n;
        }
        if let Ok(d) = crate::syntax::dim_tm(t, ctx) {
            *max_dim = (*max_dim).max(d);
        }
        let n = match t.kind() {
            TmKind::Var(_) => 1,
            TmKind::Coh(_, args) => {
                crate::syntax::deep(|| args.iter().fold(1u64, |acc, a| acc.saturating_add(go(a, ctx, memo, max_dim))))
            }
        };
        memo.insert(t.clone(), n);
        n
    }
    let mut memo = NodeMap::default();
    let mut max_dim = 0;
    let nodes = go(t, ctx, &mut memo, &mut max_dim);
    TermStats { nodes, distinct: memo.len(), max_dim }
}
