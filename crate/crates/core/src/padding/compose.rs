//! Iterated padding: padding an already padded cell, and the cells `μ`
//! relating the two-step padding to a single padding by composite data.
//!
//! The two paddings may start at different heights. Below its own height a
//! padding has no data at a level, so its `Θ` is just the chosen variable
//! there; [`compose_padding`] takes the common filtration starting at the
//! lower height and skips the factors that such levels make trivial.

use std::sync::Arc;

use super::{single, xi_lifted, xi_substitutions, Filtration, Level, Padding, PaddingData, PaddingError, Result};
use super::{TypeFamily, XiInput};
use crate::kernel::check_tm_at;
use crate::metaops::{cancel_counit, invert, lift_ctx, lift_tm};
use crate::pasting::{coh_over, compose, id, match_locmax, Shape, Sign};
use crate::syntax::{type_of, Ctx, Name, Sub, Tm, Ty};

/// `Γ_{/B}`: each level with its chosen variable replaced by `var : Bⁱ`.
pub fn quotient_filtration(filt: &Filtration, family: &TypeFamily, var: Name) -> Result<Filtration> {
    let (m, n) = (filt.height(), filt.top());
    if family.height() != m || family.top() != n {
        return Err(PaddingError::NotAdapted { level: m, reason: "levels differ from the filtration".into() });
    }
    let mut levels: Vec<Level> = Vec::with_capacity(n - m + 1);
    for i in m..=n {
        let chosen = filt.var(i);
        let rest: Vec<(Name, Ty)> = filt.ctx(i).entries().iter().filter(|(x, _)| *x != chosen).cloned().collect();
        if rest.iter().any(|(x, _)| *x == var) {
            return Err(PaddingError::InvalidFiltration { level: i, reason: format!("`{var}` is already bound") });
        }
        let ctx = Ctx::new(rest)?.extend(var, family.get(i).clone())?;
        let step = match levels.last() {
            None => None,
            Some(prev) => {
                let lifted = lift_ctx(&prev.ctx, &single(var))?;
                let sigma = filt.step(i);
                let entries = lifted
                    .ctx
                    .names()
                    .map(|x| {
                        let image = if x == var.arrow() {
                            Tm::var(var)
                        } else if x == var.minus() {
                            family.src(i - 1).clone()
                        } else if x == var.plus() {
                            family.tgt(i - 1).clone()
                        } else {
                            sigma.get(x).cloned().ok_or_else(|| PaddingError::InvalidFiltration {
                                level: i,
                                reason: format!("the step does not cover `{x}`"),
                            })?
                        };
                        Ok((x, image))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Sub::new(entries))
            }
        };
        levels.push(Level::new(ctx, var, step));
    }
    Filtration::new(m, levels)
}

/// The padding by `q□p` together with `μⁱ : Θⁱ_q⟦Θⁱ_p⟧ -> Θⁱ_{q□p}`.
#[derive(Clone, Debug)]
pub struct ComposedPadding {
    pub padding: Padding,
    mu: Vec<Tm>,
}

impl ComposedPadding {
    pub fn mu(&self, i: usize) -> &Tm {
        &self.mu[i - self.padding.height()]
    }

    pub fn mus(&self) -> &[Tm] {
        &self.mu
    }
}

/// Level `i` of `filt` and `other` agree, including the step into it.
fn same_level(filt: &Filtration, other: &Filtration, i: usize, first: bool) -> bool {
    filt.ctx(i) == other.ctx(i) && filt.var(i) == other.var(i) && (first || filt.step(i) == other.step(i))
}

fn check_levels(filt: &Filtration, pad: &Padding, what: &str) -> Result<()> {
    let f = &pad.filtration;
    if f.height() < filt.height() || f.top() != filt.top() {
        return Err(PaddingError::InvalidComposition(format!("{what} does not live on the levels of the filtration")));
    }
    for i in f.height()..=f.top() {
        if !same_level(filt, f, i, i == f.height()) {
            return Err(PaddingError::InvalidComposition(format!("{what} differs from the filtration at level {i}")));
        }
    }
    Ok(())
}

/// `Θⁱ`, which is the chosen variable below the padding's height.
fn theta(pad: &Padding, filt: &Filtration, i: usize) -> Tm {
    if i < pad.height() {
        Tm::var(filt.var(i))
    } else {
        pad.theta(i).clone()
    }
}

fn data(pad: &Padding, i: usize) -> Option<(Tm, Tm)> {
    (i >= pad.height()).then(|| (pad.data.p(i).clone(), pad.data.q(i).clone()))
}

fn glued(i: usize, arity: usize) -> Shape {
    Shape::glued(i, &vec![i + 1; arity])
}

#[derive(Clone, Copy)]
enum Grouping {
    Flat,
    Left,
    Right,
}

fn grouped(i: usize, f: &[Tm], c: &Ctx, g: Grouping) -> Result<Tm, crate::pasting::PastingError> {
    match g {
        Grouping::Flat => compose(i, f, c),
        Grouping::Left => compose(i, &[compose(i, &f[0..2], c)?, f[2].clone()], c),
        Grouping::Right => compose(i, &[f[0].clone(), compose(i, &f[1..3], c)?], c),
    }
}

/// The associator between two bracketings of three composable cells.
fn assoc3(i: usize, cells: [&Tm; 3], ctx: &Ctx, from: Grouping, to: Grouping) -> Result<Tm> {
    let args: Vec<Tm> = cells.into_iter().cloned().collect();
    Ok(coh_over(&glued(i, 3), &args, ctx, |f, c| grouped(i, f, c, from), |f, c| grouped(i, f, c, to))?)
}

/// The lift of `Θ_q` along its chosen variable at level `i`, as an operation
/// on cells of `ambient`.
struct LiftedTheta<'a> {
    q: &'a Padding,
    quot: &'a Filtration,
    level: usize,
    term: Tm,
    ambient: &'a Ctx,
}

impl<'a> LiftedTheta<'a> {
    fn new(q: &'a Padding, quot: &'a Filtration, level: usize, ambient: &'a Ctx) -> Result<Self> {
        let w = quot.var(level);
        let term = lift_tm(&theta(q, quot, level), quot.ctx(level), &single(w))?;
        Ok(LiftedTheta { q, quot, level, term, ambient })
    }

    fn sub(&self, t: &Tm) -> Result<Sub> {
        let up = &self.quot.lifted(self.level)?.ctx;
        Ok(match_locmax(up, &[self.quot.var(self.level).arrow()], std::slice::from_ref(t), self.ambient)?)
    }

    /// `(Θ_q↑w)⟦t⟧`.
    fn at(&self, t: &Tm) -> Result<Tm> {
        Ok(self.sub(t)?.apply_tm(&self.term)?)
    }

    /// `(Θ_q↑w)⟦β⟧` for a cell `β` between two cells of the lifted
    /// variable's type: `β` whiskered by the data of every level.
    fn on_cell(&self, beta: &Tm) -> Result<Tm> {
        let ty = type_of(beta, self.ambient)?;
        let s = self.sub(ty.src().expect("a cell between cells"))?;
        let mut cell = beta.clone();
        for j in self.q.height() + 1..=self.level {
            let (p, q) = (s.apply_tm(self.q.data.p(j - 1))?, s.apply_tm(self.q.data.q(j - 1))?);
            cell = compose(j - 1, &[p, cell, q], self.ambient)?;
        }
        Ok(cell)
    }

    /// `Ξ^{i↑1}_q : (Θ_q↑w)⟦a⟧ * (Θ_q↑w)⟦b⟧ -> (Θ_q↑w)⟦a * b⟧`.
    fn xi(&self, a: &Tm, b: &Tm) -> Result<Tm> {
        let (sigma_v, sigma_w, sigma_vw) = xi_substitutions(self.q, self.level, a, b, self.ambient)?;
        let tower =
            xi_lifted(&XiInput { pad: self.q, level: self.level, delta: self.ambient, sigma_v, sigma_w, sigma_vw })?;
        Ok(tower.cells.last().expect("the tower has a base").clone())
    }
}

/// Composes padding data `p` for `B` over `filt` with data `q` for `C` over
/// `filt_{/B}`, giving data for `C` over `filt` and the comparison cells `μ`.
///
/// Each padding must agree with the corresponding filtration from its own
/// height up; `filt` starts at the lower of the two heights.
pub fn compose_padding(filt: &Arc<Filtration>, p: &Padding, q: &Padding) -> Result<ComposedPadding> {
    let (m, n) = (filt.height(), filt.top());
    check_levels(filt, p, "the inner padding")?;
    if m != p.height().min(q.height()) {
        return Err(PaddingError::InvalidComposition("the filtration must start at the lower height".into()));
    }
    let b_types = (m..=n)
        .map(|i| {
            if i < p.height() {
                Ok(type_of(&Tm::var(filt.var(i)), filt.ctx(i))?)
            } else {
                Ok(p.family.get(i).clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let b = TypeFamily::new(m, b_types);
    b.validate(filt)?;
    let w = q.filtration.var(q.height());
    let quot = quotient_filtration(filt, &b, w)?;
    check_levels(&quot, q, "the outer padding")?;
    let c_types = (m..=n).map(|i| if i < q.height() { b.get(i).clone() } else { q.family.get(i).clone() }).collect();
    let c = TypeFamily::new(m, c_types);

    let nested = |i: usize| quot.apply_at(i, &theta(q, &quot, i), &theta(p, filt, i), filt.ctx(i));
    let mut thetas = vec![Tm::var(filt.var(m))];
    // `None` while the nested and composite paddings coincide.
    let mut mu: Option<Tm> = None;
    let mut mus = Vec::new();
    let mut cells = Vec::new();
    for i in m..n {
        let tu = thetas.last().unwrap().clone();
        mus.push(match &mu {
            Some(t) => t.clone(),
            None => id(&tu, filt.ctx(i))?,
        });
        let (pd, qd) = (data(p, i), data(q, i));
        let (cell, next_mu) = match (&mu, pd, qd) {
            (None, None, Some(d)) | (None, Some(d), None) => (d, None),
            (_, Some(pd), Some(qd)) => {
                let mu_i = mus.last().unwrap().clone();
                let step = Step { filt, quot: &quot, p, q, i, mu: mu_i, nested: nested(i)?, theta: tu.clone() };
                let (cell, next) = step.build(pd, qd)?;
                (cell, Some(next))
            }
            _ => return Err(PaddingError::InvalidComposition(format!("no padding data at level {i}"))),
        };
        let lifted = filt.lift_along(i, &tu)?;
        thetas.push(compose(i, &[cell.0.clone(), lifted, cell.1.clone()], filt.ctx(i + 1))?);
        cells.push(cell);
        mu = next_mu;
    }
    mus.push(match mu {
        Some(t) => t,
        None => id(thetas.last().unwrap(), filt.ctx(n))?,
    });
    let padding = Padding::new(filt.clone(), c, PaddingData::new(m, cells))?;
    for i in m..=n {
        let src = nested(i)?;
        let ty = Ty::arr(padding.family.get(i).clone(), src, padding.theta(i).clone());
        check_tm_at(&mus[i - m], &ty, filt.ctx(i))
            .map_err(|d| PaddingError::InvalidComposition(format!("μ^{i}: {d}")))?;
    }
    Ok(ComposedPadding { padding, mu: mus })
}

/// One inductive step: the data `q⊟p`, `p⊞q` at level `i` and `μⁱ⁺¹`.
struct Step<'a> {
    filt: &'a Filtration,
    quot: &'a Filtration,
    p: &'a Padding,
    q: &'a Padding,
    i: usize,
    mu: Tm,
    /// `Θⁱ_q⟦Θⁱ_p⟧`
    nested: Tm,
    /// `Θⁱ_{q□p}`
    theta: Tm,
}

impl Step<'_> {
    fn build(&self, (pm, pp): (Tm, Tm), (qm, qp): (Tm, Tm)) -> Result<((Tm, Tm), Tm)> {
        let (filt, i) = (self.filt, self.i);
        let g = filt.ctx(i + 1);
        let t = LiftedTheta::new(self.q, self.quot, i, g)?;
        let (pm_t, pp_t) = (t.at(&pm)?, t.at(&pp)?);
        let mu_m = filt.inj(i, Sign::Minus)?.apply_tm(&self.mu)?;
        let mu_p_inv = invert(&filt.inj(i, Sign::Plus)?.apply_tm(&self.mu)?)?;
        let lower = compose(i, &[qm.clone(), pm_t.clone(), mu_m.clone()], g)?;
        let upper = compose(i, &[mu_p_inv.clone(), pp_t.clone(), qp.clone()], g)?;

        let lp = filt.lift_along(i, &theta(self.p, filt, i))?;
        let y = filt.step(i + 1).apply_tm(&self.y()?)?;
        let mut inner = compose(i, &[pm_t.clone(), y, pp_t.clone()], g)?;
        if i > self.q.height() {
            inner = compose(i + 1, &[self.x(&t, &pm, &lp, &pp)?, inner], g)?;
        }
        let whiskered = compose(i, &[qm.clone(), inner, qp.clone()], g)?;
        let lu = filt.lift_along(i, &self.theta)?;
        let seven = [qm, pm_t, mu_m, lu, mu_p_inv, pp_t, qp];
        let assoc = coh_over(
            &glued(i, 7),
            &seven,
            g,
            |f, c| {
                let mid = compose(i, &f[2..5], c)?;
                let wrapped = compose(i, &[f[1].clone(), mid, f[5].clone()], c)?;
                compose(i, &[f[0].clone(), wrapped, f[6].clone()], c)
            },
            |f, c| compose(i, &[compose(i, &f[0..3], c)?, f[3].clone(), compose(i, &f[4..7], c)?], c),
        )?;
        Ok(((lower, upper), compose(i + 1, &[whiskered, assoc], g)?))
    }

    /// `(Θ_q↑w)⟦a * b * c⟧ -> (Θ_q↑w)⟦a⟧ * (Θ_q↑w)⟦b⟧ * (Θ_q↑w)⟦c⟧` from two
    /// binary `Ξ` and associators.
    fn x(&self, t: &LiftedTheta, a: &Tm, b: &Tm, c: &Tm) -> Result<Tm> {
        let (i, g) = (self.i, self.filt.ctx(self.i + 1));
        let ab = compose(i, &[a.clone(), b.clone()], g)?;
        let regroup = t.on_cell(&assoc3(i, [a, b, c], g, Grouping::Flat, Grouping::Left)?)?;
        let split_c = invert(&t.xi(&ab, c)?)?;
        let split_ab = compose(i, &[invert(&t.xi(a, b)?)?, t.at(c)?], g)?;
        let flatten = assoc3(i, [&t.at(a)?, &t.at(b)?, &t.at(c)?], g, Grouping::Left, Grouping::Flat)?;
        Ok(compose(i + 1, &[regroup, split_c, split_ab, flatten], g)?)
    }

    /// `Θ_q⟦Θ_p⟧↑v -> μ[inj⁻] * (Θ_{q□p}↑v) * μ[inj⁺]⁻¹` over `Γⁱ↑vⁱ`.
    fn y(&self) -> Result<Tm> {
        let (filt, i) = (self.filt, self.i);
        let gi = filt.ctx(i);
        let v = single(filt.var(i));
        let lifted = filt.lifted(i)?;
        let u = &lifted.ctx;
        let s_up = lift_tm(&self.nested, gi, &v)?;
        let mu_up = lift_tm(&self.mu, gi, &v)?;
        let t_up = lift_tm(&self.theta, gi, &v)?;
        let mu_m = lifted.minus.apply_tm(&self.mu)?;
        let mu_p = lifted.plus.apply_tm(&self.mu)?;
        let mu_p_inv = invert(&mu_p)?;
        let unitor = coh_over(
            &glued(i, 1),
            std::slice::from_ref(&s_up),
            u,
            |f, _| Ok(f[0].clone()),
            |f, c| {
                let end = type_of(&f[0], c)?.tgt().unwrap().clone();
                compose(i, &[f[0].clone(), id(&end, c)?], c)
            },
        )?;
        let expand = compose(i, &[s_up.clone(), invert(&cancel_counit(&mu_p, u)?)?], u)?;
        let regroup = assoc3(i, [&s_up, &mu_p, &mu_p_inv], u, Grouping::Right, Grouping::Left)?;
        let swap = compose(i, &[invert(&mu_up)?, mu_p_inv.clone()], u)?;
        let flatten = assoc3(i, [&mu_m, &t_up, &mu_p_inv], u, Grouping::Left, Grouping::Flat)?;
        Ok(compose(i + 1, &[unitor, expand, regroup, swap, flatten], u)?)
    }
}
