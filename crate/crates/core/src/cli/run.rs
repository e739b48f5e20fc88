//! Executing scripts: elaboration, checking, printing and size reports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::parse::{parse_file, Builtin, Command, ParseError, Pos, Telescope, TermExpr, TypeExpr};
use super::print::{print_shared, term_stats, TermStats};
use crate::eckmann_hilton::{eh, eh_padded, EhContext, EhError, EH};
use crate::kernel::{check_head, check_tm, check_tm_at, check_ty, Diagnostic};
use crate::pasting::{match_locmax, pasting_context, subst_from_locmax};
use crate::syntax::{budget_exhausted, type_of, Ctx, Head, Name, NodeBudget, Sub, Tm, Ty};

/// A problem with one command, located in its file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{file}:{pos}: {message}")]
pub struct Report {
    pub file: String,
    pub pos: Pos,
    pub message: String,
}

#[derive(Debug, Error)]
enum CmdError {
    #[error("{0}")]
    Scope(String),
    #[error(transparent)]
    Kernel(#[from] Diagnostic),
    #[error(transparent)]
    Generate(#[from] EhError),
    #[error(transparent)]
    Pasting(#[from] crate::pasting::PastingError),
    #[error(transparent)]
    Syntax(#[from] crate::syntax::SyntaxError),
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Cap on newly created nodes per generated cell.
    pub budget: Option<usize>,
    /// Worker threads for checking files; `None` uses all cores.
    pub jobs: Option<usize>,
}

/// A checked term together with its context.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub ctx: Ctx,
    pub term: Tm,
}

impl Artifact {
    pub fn printout(&self) -> String {
        print_shared(&self.term, &self.ctx, &self.name)
    }

    pub fn size(&self) -> ArtifactSize {
        let TermStats { nodes, distinct, max_dim } = term_stats(&self.term, &self.ctx);
        ArtifactSize { chars: self.printout().len(), nodes, distinct, max_dim }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArtifactSize {
    /// Bytes of the shared printout.
    pub chars: usize,
    pub nodes: u64,
    pub distinct: usize,
    pub max_dim: i32,
}

/// What running one file produced.
#[derive(Debug, Default)]
pub struct FileOutcome {
    /// Terms bound by `let`, in order.
    pub defined: Vec<Artifact>,
    pub checked: Vec<Artifact>,
    pub reports: Vec<Report>,
}

impl FileOutcome {
    pub fn ok(&self) -> bool {
        self.reports.is_empty()
    }
}

#[derive(Default)]
struct Env {
    cohs: HashMap<String, Head>,
    lets: HashMap<String, (Ctx, Tm)>,
    checks: usize,
}

impl Env {
    fn telescope(&self, tel: &Telescope) -> Result<Ctx, CmdError> {
        let mut ctx = Ctx::empty();
        for (name, ty, _) in tel {
            let a = self.ty(ty, &ctx)?;
            check_ty(&a, &ctx)?;
            ctx = ctx.extend(Name::new(name), a)?;
        }
        Ok(ctx)
    }

    fn ty(&self, ty: &TypeExpr, ctx: &Ctx) -> Result<Ty, CmdError> {
        match ty {
            TypeExpr::Obj => Ok(Ty::obj()),
            TypeExpr::Arr(s, t) => {
                let (s, t) = (self.tm(s, ctx)?, self.tm(t, ctx)?);
                Ok(Ty::arr(type_of(&s, ctx)?, s, t))
            }
        }
    }

    fn tm(&self, t: &TermExpr, ctx: &Ctx) -> Result<Tm, CmdError> {
        match t {
            TermExpr::Name(n, _) => {
                let name = Name::new(n);
                if ctx.contains(name) {
                    return Ok(Tm::var(name));
                }
                match self.lets.get(n) {
                    Some((c, body)) if c.is_empty() => Ok(body.clone()),
                    Some(_) => Err(CmdError::Scope(format!("`{n}` needs arguments"))),
                    None => Err(CmdError::Scope(format!("unknown name `{n}`"))),
                }
            }
            TermExpr::App(f, args, _) => {
                let args = args.iter().map(|a| self.tm(a, ctx)).collect::<Result<Vec<_>, _>>()?;
                if let Some(h) = self.cohs.get(f) {
                    let shape = h.shape();
                    let full = if args.len() == shape.locmax().len() {
                        subst_from_locmax(shape, &args, ctx)?
                    } else if args.len() == shape.len() {
                        args
                    } else {
                        return Err(CmdError::Scope(format!(
                            "`{f}` takes {} or {} arguments, got {}",
                            shape.locmax().len(),
                            shape.len(),
                            args.len()
                        )));
                    };
                    return Ok(Tm::coh(h.clone(), full));
                }
                let Some((c, body)) = self.lets.get(f) else {
                    return Err(CmdError::Scope(format!("unknown name `{f}`")));
                };
                let locmax = c.locally_maximal();
                let sub = if args.len() == locmax.len() {
                    match_locmax(c, &locmax, &args, ctx)?
                } else if args.len() == c.len() {
                    Sub::new(c.names().zip(args).collect())
                } else {
                    return Err(CmdError::Scope(format!(
                        "`{f}` takes {} or {} arguments, got {}",
                        locmax.len(),
                        c.len(),
                        args.len()
                    )));
                };
                Ok(sub.apply_tm(body)?)
            }
            TermExpr::Builtin(b, _) => Err(CmdError::Scope(format!("{b} may only be the whole target of `check`"))),
        }
    }

    fn command(&mut self, cmd: &Command, opts: &Options) -> Result<Option<Artifact>, CmdError> {
        match cmd {
            Command::Coh { name, telescope, ty, .. } => {
                let ctx = self.telescope(telescope)?;
                let ps = pasting_context(&ctx)?;
                let TypeExpr::Arr(s, t) = ty else {
                    return Err(CmdError::Scope("a coherence needs an arrow type".into()));
                };
                let (s, t) = (self.tm(s, &ctx)?, self.tm(t, &ctx)?);
                let term = ps.coh(&s, &t)?;
                let (h, _) = term.as_coh().expect("coherence");
                check_head(h)?;
                self.cohs.insert(name.clone(), h.clone());
                Ok(None)
            }
            Command::Let { name, telescope, body, .. } => {
                let ctx = self.telescope(telescope)?;
                let t = self.tm(body, &ctx)?;
                check_tm(&t, &ctx)?;
                self.lets.insert(name.clone(), (ctx.clone(), t.clone()));
                Ok(Some(Artifact { name: name.clone(), ctx, term: t }))
            }
            Command::Check { telescope, target, ty, .. } => {
                self.checks += 1;
                if let TermExpr::Builtin(b, _) = target {
                    if !telescope.is_empty() || ty.is_some() {
                        return Err(CmdError::Scope(format!("{b} takes neither a telescope nor a type")));
                    }
                    return Ok(Some(generate(*b, opts.budget)?));
                }
                let ctx = self.telescope(telescope)?;
                let t = self.tm(target, &ctx)?;
                match ty {
                    Some(ty) => {
                        let ty = self.ty(ty, &ctx)?;
                        check_ty(&ty, &ctx)?;
                        check_tm_at(&t, &ty, &ctx)?;
                    }
                    None => {
                        check_tm(&t, &ctx)?;
                    }
                }
                Ok(Some(Artifact { name: format!("check_{}", self.checks), ctx, term: t }))
            }
        }
    }
}

/// Builds a builtin cell under a node budget and checks it at its stated type.
pub fn generate(b: Builtin, budget: Option<usize>) -> Result<Artifact, EhError> {
    let _guard = NodeBudget::new(budget);
    // Budget errors may surface wrapped in other errors; report them plainly.
    build(b).map_err(|e| if budget_exhausted() { EhError::BudgetExceeded { stage: b.to_string() } } else { e })
}

fn build(b: Builtin) -> Result<Artifact, EhError> {
    let e = EhContext::new(b.dim())?;
    let (term, ty) = match b {
        Builtin::H { n, k, l } => (eh(n, k, l)?, e.eh_type(k, l)?),
        Builtin::EH { n, k, l } => (EH(n, k, l)?, e.commutativity_type(k)?),
        Builtin::Hp { n, p, k, l } => (eh_padded(n, p, k, l)?, e.padded_type(p, k, l)?),
    };
    check_tm_at(&term, &ty, &e.ctx).map_err(|d| EhError::StepFailed { stage: b.to_string(), source: d })?;
    Ok(Artifact { name: b.ident(), ctx: e.ctx, term })
}

/// Runs the commands of one script in order. Declarations that fail are
/// reported and skipped.
pub fn run_commands(file: &str, cmds: &[Command], opts: &Options) -> FileOutcome {
    let mut env = Env::default();
    let mut out = FileOutcome::default();
    for cmd in cmds {
        match env.command(cmd, opts) {
            Ok(Some(a)) if matches!(cmd, Command::Let { .. }) => out.defined.push(a),
            Ok(Some(a)) => out.checked.push(a),
            Ok(None) => {}
            Err(e) => out.reports.push(Report { file: file.into(), pos: cmd.pos(), message: e.to_string() }),
        }
    }
    out
}

pub fn run_source(file: &str, src: &str, opts: &Options) -> FileOutcome {
    match parse_file(src) {
        Ok(cmds) => run_commands(file, &cmds, opts),
        Err(ParseError { pos, message }) => {
            FileOutcome { reports: vec![Report { file: file.into(), pos, message }], ..FileOutcome::default() }
        }
    }
}

/// Runs several files, concurrently when `opts.jobs` allows. Outcomes are
/// returned in the order of `files`.
pub fn run_files(files: &[PathBuf], opts: &Options) -> Vec<FileOutcome> {
    let one = |path: &PathBuf| {
        let name = path.display().to_string();
        match std::fs::read(path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(src) => run_source(&name, &src, opts),
                Err(_) => failure(&name, "file is not UTF-8"),
            },
            Err(e) => failure(&name, &e.to_string()),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.unwrap_or(0)).build();
    match pool {
        Ok(pool) if opts.jobs != Some(1) => pool.install(|| files.par_iter().map(one).collect()),
        _ => files.iter().map(one).collect(),
    }
}

fn failure(file: &str, message: &str) -> FileOutcome {
    FileOutcome {
        reports: vec![Report { file: file.into(), pos: Pos::default(), message: message.into() }],
        ..FileOutcome::default()
    }
}

/// The printouts of all checked artifacts, separated by blank lines.
pub fn printouts(outcomes: &[FileOutcome]) -> String {
    let all: Vec<String> = outcomes.iter().flat_map(|o| o.checked.iter().map(Artifact::printout)).collect();
    all.join("\n")
}

/// One line per checked artifact.
pub fn stats_lines(outcomes: &[FileOutcome]) -> String {
    let mut out = String::from("artifact\tchars\tnodes\tdistinct\tmax_dim\n");
    for a in outcomes.iter().flat_map(|o| &o.checked) {
        let s = a.size();
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", a.name, s.chars, s.nodes, s.distinct, s.max_dim);
    }
    out
}

/// Reads `FILE` paths, runs them and returns the exit status.
pub fn check_paths(files: &[PathBuf], out: Option<&Path>, stats: bool, opts: &Options) -> std::io::Result<i32> {
    let outcomes = run_files(files, opts);
    for r in outcomes.iter().flat_map(|o| &o.reports) {
        eprintln!("{r}");
    }
    if let Some(path) = out {
        std::fs::write(path, printouts(&outcomes))?;
    }
    if stats {
        print!("{}", stats_lines(&outcomes));
    }
    Ok(if outcomes.iter().all(FileOutcome::ok) { 0 } else { 1 })
}

/// The columns of the size table, as `(k, l)`.
pub const SIZE_COLUMNS: [(usize, usize); 6] = [(1, 0), (2, 1), (3, 2), (2, 0), (3, 1), (3, 0)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SizeCell {
    Size(ArtifactSize),
    Overflow,
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct SizeEntry {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub cell: SizeCell,
}

#[derive(Clone, Debug, Default)]
pub struct SizeReport {
    pub entries: Vec<SizeEntry>,
}

pub const SIZE_NOTE: &str = "note: counts are bytes of this tool's shared printout; \
exact counts of other printers are not reproducible, only their order of magnitude";

impl SizeReport {
    pub fn get(&self, n: usize, k: usize, l: usize) -> Option<&SizeCell> {
        self.entries.iter().find(|e| (e.n, e.k, e.l) == (n, k, l)).map(|e| &e.cell)
    }

    /// Rows by `n`, one column per `eh_{k,l}`; character counts with node
    /// counts in parentheses.
    pub fn render(&self) -> String {
        let mut rows: Vec<usize> = self.entries.iter().map(|e| e.n).collect();
        rows.sort_unstable();
        rows.dedup();
        let mut cols: Vec<(usize, usize)> = SIZE_COLUMNS.to_vec();
        for e in &self.entries {
            if !cols.contains(&(e.k, e.l)) {
                cols.push((e.k, e.l));
            }
        }
        cols.retain(|c| self.entries.iter().any(|e| (e.k, e.l) == *c));
        let mut out = String::from("n");
        for (k, l) in &cols {
            let _ = write!(out, "\teh_{k},{l}");
        }
        out.push('\n');
        for n in rows {
            let _ = write!(out, "{n}");
            for &(k, l) in &cols {
                let cell = match self.get(n, k, l) {
                    None => String::new(),
                    Some(SizeCell::Size(s)) => format!("{} ({} nodes)", s.chars, s.nodes),
                    Some(SizeCell::Overflow) => "(overflow)".into(),
                    Some(SizeCell::Failed(e)) => format!("(failed: {e})"),
                };
                let _ = write!(out, "\t{cell}");
            }
            out.push('\n');
        }
        out.push_str(SIZE_NOTE);
        out.push('\n');
        out
    }
}

/// Generates `eh(n,k,l)` for each artifact under the budget and measures it.
pub fn size_report(artifacts: &[(usize, usize, usize)], budget: Option<usize>) -> SizeReport {
    let entries = artifacts
        .iter()
        .map(|&(n, k, l)| {
            let cell = match generate(Builtin::H { n, k, l }, budget) {
                Ok(a) => SizeCell::Size(a.size()),
                Err(EhError::BudgetExceeded { .. }) => SizeCell::Overflow,
                Err(e) => SizeCell::Failed(e.to_string()),
            };
            SizeEntry { n, k, l, cell }
        })
        .collect();
    SizeReport { entries }
}
