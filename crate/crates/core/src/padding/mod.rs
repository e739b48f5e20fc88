//! Paddings: conjugating a cell by towers of cells, one dimension at a time,
//! so that its boundary matches a prescribed type.
//!
//! A [`Filtration`] fixes the scaffolding (a context per dimension, a chosen
//! top variable and a substitution from the previous level lifted along its
//! chosen variable). A [`TypeFamily`] adapted to it says where the padded
//! cell should land, and [`PaddingData`] supplies the conjugating cells.

mod biased;
mod compose;
mod repadding;
mod unbiased;
mod xi;

use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::kernel::{check_sub, check_tm_at, check_ty, Diagnostic};
use crate::metaops::{
    lift_ctx, lift_sub, lift_tm, suspend_ctx, suspend_sub, suspend_tm, suspend_ty, Lifted, MetaError, Suspension,
    VarSet,
};
use crate::pasting::{compose as compose_at, match_locmax, PastingError, Sign};
use crate::syntax::{type_of, vars_of_tm, Ctx, Name, Sub, SyntaxError, Tm, Ty};

pub use biased::{biased, biased_of_identity, opposite_padding, unitor, Flavor};
pub use compose::{compose_padding, quotient_filtration, ComposedPadding};
pub use repadding::{
    build_repadding, point_repadding, point_repadding_over, unbiasing_repadding, Repadding, RepaddingData,
};
pub use unbiased::{identity_type, point, unbiased, unbiased_ctx, unbiased_filtration};
pub use xi::{chi, xi, xi_lifted, xi_substitutions, xi_type, xi_unbiased, zeta, Interchanger, XiInput, XiTower};

#[derive(Debug, Clone, Error)]
pub enum PaddingError {
    #[error("invalid filtration at level {level}: {reason}")]
    InvalidFiltration { level: usize, reason: String },
    #[error("type family is not adapted at level {level}: {reason}")]
    NotAdapted { level: usize, reason: String },
    #[error("invalid padding data at level {level}: {source}")]
    InvalidPaddingData { level: usize, source: Diagnostic },
    #[error("invalid repadding data at level {level}: {source}")]
    InvalidRepaddingData { level: usize, source: Diagnostic },
    #[error("morphism square fails at level {level}: {reason}")]
    MorphismSquareFailed { level: usize, reason: String },
    #[error("paddings cannot be composed: {0}")]
    InvalidComposition(String),
    #[error("parameters out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error(transparent)]
    Pasting(#[from] PastingError),
    #[error(transparent)]
    Kernel(#[from] Diagnostic),
}

impl From<SyntaxError> for PaddingError {
    fn from(e: SyntaxError) -> Self {
        PaddingError::Pasting(e.into())
    }
}

pub type Result<T, E = PaddingError> = std::result::Result<T, E>;

/// One level of a filtration.
#[derive(Clone, Debug)]
pub struct Level {
    pub ctx: Ctx,
    pub var: Name,
    /// `σⁱ : Γⁱ ⊢ σⁱ : Γⁱ⁻¹↑vⁱ⁻¹`, absent at the bottom level.
    pub step: Option<Sub>,
    lifted: OnceLock<Lifted>,
}

impl Level {
    pub fn new(ctx: Ctx, var: Name, step: Option<Sub>) -> Level {
        Level { ctx, var, step, lifted: OnceLock::new() }
    }
}

/// Contexts `Γᵐ, ..., Γⁿ` with chosen variables and connecting substitutions.
#[derive(Clone, Debug)]
pub struct Filtration {
    height: usize,
    levels: Vec<Level>,
}

impl Filtration {
    /// Validates the filtration conditions level by level.
    pub fn new(height: usize, levels: Vec<Level>) -> Result<Filtration> {
        if levels.is_empty() {
            return Err(PaddingError::InvalidFiltration { level: height, reason: "no levels".into() });
        }
        let f = Filtration { height, levels };
        f.validate()?;
        Ok(f)
    }

    /// Builds each step by sending `vⁱ⁻¹_f` to `vⁱ` and matching the rest.
    pub fn by_matching(height: usize, levels: Vec<(Ctx, Name)>) -> Result<Filtration> {
        let mut out: Vec<Level> = Vec::with_capacity(levels.len());
        for (ctx, var) in levels {
            let step = match out.last() {
                None => None,
                Some(prev) => {
                    let lifted = lift_ctx(&prev.ctx, &single(prev.var))?;
                    Some(match_locmax(&lifted.ctx, &[prev.var.arrow()], &[Tm::var(var)], &ctx)?)
                }
            };
            out.push(Level::new(ctx, var, step));
        }
        Filtration::new(height, out)
    }

    fn validate(&self) -> Result<()> {
        for i in self.height..=self.top() {
            let lvl = self.level(i);
            let bad = |reason: String| PaddingError::InvalidFiltration { level: i, reason };
            if lvl.ctx.dim() != i as i32 {
                return Err(bad(format!("context has dimension {}", lvl.ctx.dim())));
            }
            if !lvl.ctx.contains(lvl.var) {
                return Err(bad(format!("`{}` is not in the context", lvl.var)));
            }
            if i == self.height {
                continue;
            }
            let step = lvl.step.as_ref().ok_or_else(|| bad("missing step".into()))?;
            let prev = self.level(i - 1);
            let lifted = self.lifted(i - 1)?;
            check_sub(step, &lifted.ctx, &lvl.ctx).map_err(|d| bad(d.to_string()))?;
            if step.get(prev.var.arrow()) != Some(&Tm::var(lvl.var)) {
                return Err(bad("the step does not send the lifted variable to the chosen one".into()));
            }
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn top(&self) -> usize {
        self.height + self.levels.len() - 1
    }

    fn level(&self, i: usize) -> &Level {
        &self.levels[i - self.height]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn ctx(&self, i: usize) -> &Ctx {
        &self.level(i).ctx
    }

    pub fn var(&self, i: usize) -> Name {
        self.level(i).var
    }

    /// `σⁱ`, defined for `i > height`.
    pub fn step(&self, i: usize) -> &Sub {
        self.level(i).step.as_ref().expect("step above the bottom level")
    }

    /// `Γⁱ↑vⁱ` and its inclusions.
    pub fn lifted(&self, i: usize) -> Result<&Lifted> {
        let lvl = self.level(i);
        if let Some(l) = lvl.lifted.get() {
            return Ok(l);
        }
        let l = lift_ctx(&lvl.ctx, &single(lvl.var))?;
        Ok(lvl.lifted.get_or_init(|| l))
    }

    /// `inj^± ∘ σⁱ⁺¹`, a substitution from `Γⁱ` into `Γⁱ⁺¹`.
    pub fn inj(&self, i: usize, sign: Sign) -> Result<Sub> {
        let l = self.lifted(i)?;
        let inj = match sign {
            Sign::Minus => &l.minus,
            Sign::Plus => &l.plus,
        };
        Ok(inj.compose(self.step(i + 1))?)
    }

    /// `(t↑vⁱ)[σⁱ⁺¹]` for a term of `Γⁱ`.
    pub fn lift_along(&self, i: usize, t: &Tm) -> Result<Tm> {
        let lvl = self.level(i);
        let lifted = lift_tm(t, &lvl.ctx, &single(lvl.var))?;
        Ok(self.step(i + 1).apply_tm(&lifted)?)
    }

    /// `t ↑^j` : `j` successive lifts starting at level `i`.
    pub fn lift_iter(&self, i: usize, j: usize, t: &Tm) -> Result<Tm> {
        let mut t = t.clone();
        for d in i..i + j {
            t = self.lift_along(d, &t)?;
        }
        Ok(t)
    }

    /// The substitution `⟦t⟧` from `Γⁱ` into `ambient` sending `vⁱ` to `t`.
    pub fn at(&self, i: usize, t: &Tm, ambient: &Ctx) -> Result<Sub> {
        let lvl = self.level(i);
        Ok(match_locmax(&lvl.ctx, &[lvl.var], std::slice::from_ref(t), ambient)?)
    }

    /// `u⟦t⟧` for a term `u` of `Γⁱ`.
    pub fn apply_at(&self, i: usize, u: &Tm, t: &Tm, ambient: &Ctx) -> Result<Tm> {
        Ok(self.at(i, t, ambient)?.apply_tm(u)?)
    }
}

pub(crate) fn single(n: Name) -> VarSet {
    std::iter::once(n).collect()
}

/// Types `Aᵐ, ..., Aⁿ` adapted to a filtration.
#[derive(Clone, Debug)]
pub struct TypeFamily {
    height: usize,
    types: Vec<Ty>,
}

impl TypeFamily {
    pub fn new(height: usize, types: Vec<Ty>) -> TypeFamily {
        TypeFamily { height, types }
    }

    pub fn get(&self, i: usize) -> &Ty {
        &self.types[i - self.height]
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn top(&self) -> usize {
        self.height + self.types.len() - 1
    }

    /// `sⁱ`, the source of `Aⁱ⁺¹`.
    pub fn src(&self, i: usize) -> &Tm {
        self.get(i + 1).src().expect("arrow type above the bottom")
    }

    /// `tⁱ`, the target of `Aⁱ⁺¹`.
    pub fn tgt(&self, i: usize) -> &Tm {
        self.get(i + 1).tgt().expect("arrow type above the bottom")
    }

    /// Checks adaptedness to `filt`.
    pub fn validate(&self, filt: &Filtration) -> Result<()> {
        let m = self.height;
        if m != filt.height() || self.top() != filt.top() {
            return Err(PaddingError::NotAdapted { level: m, reason: "levels differ from the filtration".into() });
        }
        let bad = |level, reason: String| PaddingError::NotAdapted { level, reason };
        let vm = type_of(&Tm::var(filt.var(m)), filt.ctx(m))?;
        if &vm != self.get(m) {
            return Err(bad(m, format!("chosen variable has type {vm}, not {}", self.get(m))));
        }
        for i in m..=self.top() {
            check_ty(self.get(i), filt.ctx(i)).map_err(|d| bad(i, d.to_string()))?;
            if i > m {
                let expected = filt.step(i).apply_ty(self.get(i - 1))?;
                if self.get(i).base() != Some(&expected) {
                    return Err(bad(i, format!("base type should be {expected}")));
                }
            }
        }
        Ok(())
    }

    /// `A[ψ]`.
    pub fn transport(&self, psi: &FiltrationMorphism) -> Result<TypeFamily> {
        let types =
            (self.height..=self.top()).map(|i| Ok(psi.at(i).apply_ty(self.get(i))?)).collect::<Result<Vec<_>>>()?;
        Ok(TypeFamily::new(self.height, types))
    }
}

/// The conjugating cells `(pⁱ, qⁱ)` for `m ≤ i < n`.
#[derive(Clone, Debug)]
pub struct PaddingData {
    height: usize,
    cells: Vec<(Tm, Tm)>,
}

impl PaddingData {
    pub fn new(height: usize, cells: Vec<(Tm, Tm)>) -> PaddingData {
        PaddingData { height, cells }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of levels carrying data.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn p(&self, i: usize) -> &Tm {
        &self.cells[i - self.height].0
    }

    pub fn q(&self, i: usize) -> &Tm {
        &self.cells[i - self.height].1
    }

    /// `p[ψ]`, each level substituted by the morphism one dimension up.
    pub fn transport(&self, psi: &FiltrationMorphism) -> Result<PaddingData> {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(j, (p, q))| {
                let s = psi.at(self.height + j + 1);
                Ok((s.apply_tm(p)?, s.apply_tm(q)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PaddingData::new(self.height, cells))
    }
}

/// A filtration, an adapted family, padding data and the associated padding.
#[derive(Clone, Debug)]
pub struct Padding {
    pub filtration: Arc<Filtration>,
    pub family: TypeFamily,
    pub data: PaddingData,
    theta: Vec<Tm>,
}

impl Padding {
    /// Validates the data and builds `Θ`, kernel-checking every level.
    pub fn new(filtration: Arc<Filtration>, family: TypeFamily, data: PaddingData) -> Result<Padding> {
        family.validate(&filtration)?;
        let theta = build_theta(&filtration, &family, &data)?;
        Ok(Padding { filtration, family, data, theta })
    }

    pub fn height(&self) -> usize {
        self.filtration.height()
    }

    pub fn top(&self) -> usize {
        self.filtration.top()
    }

    /// `Θⁱ`, a term of `Γⁱ` of type `Aⁱ`.
    pub fn theta(&self, i: usize) -> &Tm {
        &self.theta[i - self.height()]
    }

    pub fn thetas(&self) -> &[Tm] {
        &self.theta
    }

    /// `Θⁱ⟦t⟧`.
    pub fn theta_at(&self, i: usize, t: &Tm, ambient: &Ctx) -> Result<Tm> {
        self.filtration.apply_at(i, self.theta(i), t, ambient)
    }

    /// Transports the family and data along `psi` and rebuilds the padding.
    pub fn transport(&self, psi: &FiltrationMorphism) -> Result<Padding> {
        Padding::new(psi.source.clone(), self.family.transport(psi)?, self.data.transport(psi)?)
    }
}

/// `Θᵐ = vᵐ` and `Θⁱ⁺¹ = pⁱ *ᵢ (Θⁱ↑vⁱ)[σⁱ⁺¹] *ᵢ qⁱ`.
pub fn build_theta(filt: &Filtration, fam: &TypeFamily, data: &PaddingData) -> Result<Vec<Tm>> {
    let m = filt.height();
    let n = filt.top();
    if data.height() != m || data.len() != n - m {
        return Err(PaddingError::InvalidPaddingData {
            level: m,
            source: Diagnostic::new(
                crate::kernel::DiagKind::TypeMismatch,
                "padding data has the wrong number of levels",
            ),
        });
    }
    let mut theta = vec![Tm::var(filt.var(m))];
    for i in m..n {
        let ctx = filt.ctx(i + 1);
        let prev = &theta[i - m];
        let invalid = |source: Diagnostic| PaddingError::InvalidPaddingData { level: i, source };
        let base = fam.get(i + 1).base().expect("arrow type").clone();
        let lo = filt.inj(i, Sign::Minus)?.apply_tm(prev)?;
        let hi = filt.inj(i, Sign::Plus)?.apply_tm(prev)?;
        let (p, q) = (data.p(i), data.q(i));
        check_tm_at(p, &Ty::arr(base.clone(), fam.src(i).clone(), lo), ctx).map_err(|d| invalid(d.at_step("p")))?;
        check_tm_at(q, &Ty::arr(base, hi, fam.tgt(i).clone()), ctx).map_err(|d| invalid(d.at_step("q")))?;
        let top = filt.var(i + 1);
        if vars_of_tm(p).contains(&top) || vars_of_tm(q).contains(&top) {
            return Err(invalid(Diagnostic::new(
                crate::kernel::DiagKind::SideConditionFailed,
                format!("padding cells may not mention `{top}`"),
            )));
        }
        let next = compose_at(i, &[p.clone(), filt.lift_along(i, prev)?, q.clone()], ctx)?;
        check_tm_at(&next, fam.get(i + 1), ctx).map_err(invalid)?;
        theta.push(next);
    }
    Ok(theta)
}

/// Substitutions `ψⁱ` from the levels of `target` into those of `source`.
#[derive(Clone, Debug)]
pub struct FiltrationMorphism {
    pub source: Arc<Filtration>,
    pub target: Arc<Filtration>,
    subs: Vec<Sub>,
}

impl FiltrationMorphism {
    /// Validates `vⁱ[ψⁱ] = wⁱ` and the commuting square at every level.
    pub fn new(source: Arc<Filtration>, target: Arc<Filtration>, subs: Vec<Sub>) -> Result<FiltrationMorphism> {
        let (m, n) = (source.height(), source.top());
        let bad = |level, reason: String| PaddingError::MorphismSquareFailed { level, reason };
        if target.height() != m || target.top() != n || subs.len() != n - m + 1 {
            return Err(bad(m, "filtrations have different levels".into()));
        }
        for i in m..=n {
            let psi = &subs[i - m];
            check_sub(psi, target.ctx(i), source.ctx(i)).map_err(|d| bad(i, d.to_string()))?;
            if psi.get(target.var(i)) != Some(&Tm::var(source.var(i))) {
                return Err(bad(i, "chosen variables do not correspond".into()));
            }
            if i == m {
                continue;
            }
            let up = lift_sub(&subs[i - m - 1], source.ctx(i - 1), &single(source.var(i - 1)))?;
            let left = up.compose(source.step(i))?;
            let right = target.step(i).compose(psi)?;
            for (name, t) in right.entries() {
                if left.get(*name) != Some(t) {
                    return Err(bad(i, format!("images of `{name}` differ")));
                }
            }
        }
        Ok(FiltrationMorphism { source, target, subs })
    }

    /// Each `ψⁱ` is determined by `vⁱ ↦ wⁱ` through matching.
    pub fn by_matching(source: Arc<Filtration>, target: Arc<Filtration>) -> Result<FiltrationMorphism> {
        let subs = (source.height()..=source.top())
            .map(|i| target.at(i, &Tm::var(source.var(i)), source.ctx(i)))
            .collect::<Result<Vec<_>>>()?;
        FiltrationMorphism::new(source, target, subs)
    }

    pub fn at(&self, i: usize) -> &Sub {
        &self.subs[i - self.source.height()]
    }
}

/// `ΣΓ`, `ΣA` and `Σp`, one dimension higher.
pub fn suspend_padding(pad: &Padding) -> Result<Padding> {
    let filt = &pad.filtration;
    let (m, n) = (filt.height(), filt.top());
    let mut levels = Vec::new();
    let mut poles: Vec<Suspension> = Vec::new();
    for i in m..=n {
        let (ctx, s) = suspend_ctx(filt.ctx(i))?;
        let step = if i == m {
            None
        } else {
            let lifted = filt.lifted(i - 1)?;
            let dom = Suspension::fresh_for(&lifted.ctx);
            Some(suspend_sub(filt.step(i), &dom, &s))
        };
        levels.push(Level::new(ctx, filt.var(i), step));
        poles.push(s);
    }
    let sfilt = Arc::new(Filtration::new(m + 1, levels)?);
    let types = (m..=n).map(|i| suspend_ty(pad.family.get(i), &poles[i - m])).collect();
    let cells = (m..n)
        .map(|i| {
            let s = &poles[i + 1 - m];
            (suspend_tm(pad.data.p(i), s), suspend_tm(pad.data.q(i), s))
        })
        .collect();
    Padding::new(sfilt, TypeFamily::new(m + 1, types), PaddingData::new(m + 1, cells))
}

impl Diagnostic {
    pub(crate) fn at_step(mut self, step: &str) -> Self {
        self.path.insert(0, step.to_string());
        self
    }
}
