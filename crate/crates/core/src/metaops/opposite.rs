//! Opposites: reversing the direction of cells in chosen dimensions.

use std::sync::{Arc, LazyLock};

use dashmap::DashMap;

use crate::pasting::{recognize_unordered, PastingError, Shape};
use crate::syntax::{deep, Ctx, Head, Name, NodeMap, Rewriter, Sub, Tm, TmKind, Ty, TyKind};

/// A set of positive dimensions, stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OppositeSet(u64);

impl OppositeSet {
    pub fn new(dims: impl IntoIterator<Item = usize>) -> OppositeSet {
        OppositeSet(dims.into_iter().fold(0, |m, d| {
            assert!((1..64).contains(&d), "opposite dimensions range over 1..64");
            m | (1 << d)
        }))
    }

    pub fn single(d: usize) -> OppositeSet {
        OppositeSet::new([d])
    }

    pub fn contains(self, d: i32) -> bool {
        (1..64).contains(&d) && self.0 & (1 << d) != 0
    }

    pub fn dims(self) -> impl Iterator<Item = usize> {
        (1..64).filter(move |d| self.0 & (1 << d) != 0)
    }
}

struct Opposite {
    set: OppositeSet,
    memo: NodeMap<Tm, Tm>,
}

impl Opposite {
    fn tm(&mut self, t: &Tm) -> Result<Tm, PastingError> {
        if let Some(r) = self.memo.get(t) {
            return Ok(r.clone());
        }
        let out = match t.kind() {
            TmKind::Var(_) => t.clone(),
            TmKind::Coh(h, args) => {
                let (h2, perm) = opposite_head(h, self.set)?;
                let args = deep(|| perm.iter().map(|&i| self.tm(&args[i])).collect::<Result<Vec<_>, _>>())?;
                Tm::coh(h2, args)
            }
        };
        self.memo.insert(t.clone(), out.clone());
        Ok(out)
    }

    fn ty(&mut self, a: &Ty) -> Result<Ty, PastingError> {
        Ok(match a.kind() {
            TyKind::Obj => a.clone(),
            TyKind::Arr(b, u, v) => {
                let b = self.ty(b)?;
                let (u, v) = (self.tm(u)?, self.tm(v)?);
                if self.set.contains(a.dim() + 1) {
                    Ty::arr(b, v, u)
                } else {
                    Ty::arr(b, u, v)
                }
            }
        })
    }
}

type HeadKey = (Head, OppositeSet);
/// An opposite head with the permutation of its arguments.
type OppositeHead = (Head, Arc<[usize]>);

static HEADS: LazyLock<DashMap<HeadKey, OppositeHead>> = LazyLock::new(DashMap::new);

/// The opposite of a head together with the permutation of its arguments:
/// position `j` of the new shape holds the old level `perm[j]`.
pub fn opposite_head(h: &Head, set: OppositeSet) -> Result<(Head, Arc<[usize]>), PastingError> {
    if let Some(r) = HEADS.get(&(h.clone(), set)) {
        return Ok(r.clone());
    }
    let mut op = Opposite { set, memo: NodeMap::default() };
    let shape = h.shape();
    let entries =
        shape.ctx().entries().iter().map(|(n, a)| Ok((*n, op.ty(a)?))).collect::<Result<Vec<_>, PastingError>>()?;
    let flipped = Ctx::new(entries)?;
    let tree = recognize_unordered(&flipped)?;
    let (new_shape, order) = Shape::of_tree(&tree);
    let perm: Arc<[usize]> = order.iter().map(|n| n.level().unwrap()).collect();
    let mut inverse = vec![0; perm.len()];
    for (j, &i) in perm.iter().enumerate() {
        inverse[i] = j;
    }
    let ty = op.ty(h.ty())?;
    let ty = Rewriter::new(|n: Name| Ok(Tm::var(Name::bound(inverse[n.level().unwrap()])))).ty(&ty)?;
    let out = (Head::new(new_shape, ty), perm);
    HEADS.insert((h.clone(), set), out.clone());
    Ok(out)
}

pub fn opposite_tm(t: &Tm, set: OppositeSet) -> Result<Tm, PastingError> {
    Opposite { set, memo: NodeMap::default() }.tm(t)
}

pub fn opposite_ty(a: &Ty, set: OppositeSet) -> Result<Ty, PastingError> {
    Opposite { set, memo: NodeMap::default() }.ty(a)
}

/// `Γ^op`: same variables in the same order, with flipped types.
pub fn opposite_ctx(ctx: &Ctx, set: OppositeSet) -> Result<Ctx, PastingError> {
    let mut op = Opposite { set, memo: NodeMap::default() };
    let entries = ctx.entries().iter().map(|(n, a)| Ok((*n, op.ty(a)?))).collect::<Result<Vec<_>, PastingError>>()?;
    Ctx::new(entries).map_err(PastingError::from)
}

pub fn opposite_sub(sigma: &Sub, set: OppositeSet) -> Result<Sub, PastingError> {
    let mut op = Opposite { set, memo: NodeMap::default() };
    let entries = sigma.entries().iter().map(|(n, t)| Ok((*n, op.tm(t)?))).collect::<Result<Vec<_>, PastingError>>()?;
    Ok(Sub::new(entries))
}
