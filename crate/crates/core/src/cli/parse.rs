//! Parser for `.catt` scripts.
//!
//! ```text
//! # comment
//! coh NAME (x : TYPE)* : TYPE
//! let NAME (x : TYPE)* = TERM
//! check (x : TYPE)* TERM [: TYPE]
//! TYPE ::= * | TERM -> TERM
//! TERM ::= NAME | NAME[TERM, ...] | H(n,k,l) | EH(n,k,l) | Hp(n,p,k,l)
//! ```

use std::fmt;

use thiserror::Error;

/// A line and column, both starting at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

/// The generated cells available as check targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `eh(n,k,l)`.
    H { n: usize, k: usize, l: usize },
    /// The full commutativity cell `EH(n,k,l)`.
    EH { n: usize, k: usize, l: usize },
    /// `eh_padded(n,p,k,l)`.
    Hp { n: usize, p: usize, k: usize, l: usize },
}

impl Builtin {
    pub fn dim(&self) -> usize {
        match *self {
            Builtin::H { n, .. } | Builtin::EH { n, .. } | Builtin::Hp { n, .. } => n,
        }
    }

    /// A name usable as an identifier, e.g. `H_3_2_0`.
    pub fn ident(&self) -> String {
        match *self {
            Builtin::H { n, k, l } => format!("H_{n}_{k}_{l}"),
            Builtin::EH { n, k, l } => format!("EH_{n}_{k}_{l}"),
            Builtin::Hp { n, p, k, l } => format!("Hp_{n}_{p}_{k}_{l}"),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Builtin::H { n, k, l } => write!(f, "H({n},{k},{l})"),
            Builtin::EH { n, k, l } => write!(f, "EH({n},{k},{l})"),
            Builtin::Hp { n, p, k, l } => write!(f, "Hp({n},{p},{k},{l})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermExpr {
    Name(String, Pos),
    App(String, Vec<TermExpr>, Pos),
    Builtin(Builtin, Pos),
}

impl TermExpr {
    pub fn pos(&self) -> Pos {
        match self {
            TermExpr::Name(_, p) | TermExpr::App(_, _, p) | TermExpr::Builtin(_, p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Obj,
    Arr(TermExpr, TermExpr),
}

pub type Telescope = Vec<(String, TypeExpr, Pos)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Coh { name: String, telescope: Telescope, ty: TypeExpr, pos: Pos },
    Let { name: String, telescope: Telescope, body: TermExpr, pos: Pos },
    Check { telescope: Telescope, target: TermExpr, ty: Option<TypeExpr>, pos: Pos },
}

impl Command {
    pub fn pos(&self) -> Pos {
        match self {
            Command::Coh { pos, .. } | Command::Let { pos, .. } | Command::Check { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.chars().enumerate().collect();
        let mut j = 0;
        while j < chars.len() {
            let (col, c) = chars[j];
            let pos = Pos { line: i + 1, col: col + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                j += 1;
                continue;
            }
            if c == '-' && chars.get(j + 1).map(|p| p.1) == Some('>') {
                out.push((Tok::Sym("->"), pos));
                j += 2;
                continue;
            }
            let sym = match c {
                '(' => Some("("),
                ')' => Some(")"),
                '[' => Some("["),
                ']' => Some("]"),
                ',' => Some(","),
                ':' => Some(":"),
                '=' => Some("="),
                '*' => Some("*"),
                _ => None,
            };
            if let Some(s) = sym {
                out.push((Tok::Sym(s), pos));
                j += 1;
                continue;
            }
            let start = j;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_' || chars[j].1 == '\'') {
                j += 1;
            }
            if start == j {
                return Err(ParseError { pos, message: format!("unexpected character `{c}`") });
            }
            let word: String = chars[start..j].iter().map(|p| p.1).collect();
            if word.chars().all(|c| c.is_ascii_digit()) {
                let n = word.parse().map_err(|_| ParseError { pos, message: format!("number `{word}` too large") })?;
                out.push((Tok::Num(n), pos));
            } else if word.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(ParseError { pos, message: format!("identifier `{word}` starts with a digit") });
            } else {
                out.push((Tok::Ident(word), pos));
            }
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 3] = ["coh", "let", "check"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of input")),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.at += 1;
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let out = (s.clone(), self.pos());
                self.at += 1;
                Ok(out)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn num(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        let pos = self.pos();
        let kw = match self.peek() {
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return self.unexpected("`coh`, `let` or `check`"),
        };
        self.at += 1;
        match kw.as_str() {
            "coh" => {
                let (name, _) = self.ident()?;
                let telescope = self.telescope()?;
                self.sym(":")?;
                let ty = self.ty()?;
                Ok(Command::Coh { name, telescope, ty, pos })
            }
            "let" => {
                let (name, _) = self.ident()?;
                let telescope = self.telescope()?;
                self.sym("=")?;
                let body = self.term()?;
                Ok(Command::Let { name, telescope, body, pos })
            }
            _ => {
                let telescope = self.telescope()?;
                let target = self.term()?;
                let ty = if self.is_sym(":") {
                    self.at += 1;
                    Some(self.ty()?)
                } else {
                    None
                };
                Ok(Command::Check { telescope, target, ty, pos })
            }
        }
    }

    fn telescope(&mut self) -> Result<Telescope, ParseError> {
        let mut out = Vec::new();
        while self.is_sym("(") {
            self.at += 1;
            let (name, pos) = self.ident()?;
            self.sym(":")?;
            let ty = self.ty()?;
            self.sym(")")?;
            out.push((name, ty, pos));
        }
        Ok(out)
    }

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        if self.is_sym("*") {
            self.at += 1;
            return Ok(TypeExpr::Obj);
        }
        let src = self.term()?;
        self.sym("->")?;
        let tgt = self.term()?;
        Ok(TypeExpr::Arr(src, tgt))
    }

    fn term(&mut self) -> Result<TermExpr, ParseError> {
        let (name, pos) = self.ident()?;
        if self.is_sym("(") && matches!(name.as_str(), "H" | "EH" | "Hp") {
            self.at += 1;
            let mut nums = vec![self.num()?];
            while self.is_sym(",") {
                self.at += 1;
                nums.push(self.num()?);
            }
            self.sym(")")?;
            let b = match (name.as_str(), nums.as_slice()) {
                ("H", &[n, k, l]) => Builtin::H { n, k, l },
                ("EH", &[n, k, l]) => Builtin::EH { n, k, l },
                ("Hp", &[n, p, k, l]) => Builtin::Hp { n, p, k, l },
                _ => {
                    return Err(ParseError {
                        pos,
                        message: format!("`{name}` takes {} arguments", if name == "Hp" { 4 } else { 3 }),
                    })
                }
            };
            return Ok(TermExpr::Builtin(b, pos));
        }
        if !self.is_sym("[") {
            return Ok(TermExpr::Name(name, pos));
        }
        self.at += 1;
        let mut args = Vec::new();
        if !self.is_sym("]") {
            args.push(self.term()?);
            while self.is_sym(",") {
                self.at += 1;
                args.push(self.term()?);
            }
        }
        self.sym("]")?;
        Ok(TermExpr::App(name, args, pos))
    }
}

/// Parses a whole script.
pub fn parse_file(src: &str) -> Result<Vec<Command>, ParseError> {
    let toks = lex(src)?;
    let lines = src.lines().count().max(1);
    let end = Pos { line: lines, col: src.lines().last().map_or(0, |l| l.chars().count()) + 1 };
    let mut p = Parser { toks, at: 0, end };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.command()?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_check() {
        let cmds = parse_file("check H(3,2,0)").unwrap();
        assert_eq!(
            cmds,
            vec![Command::Check {
                telescope: vec![],
                target: TermExpr::Builtin(Builtin::H { n: 3, k: 2, l: 0 }, Pos { line: 1, col: 7 }),
                ty: None,
                pos: Pos { line: 1, col: 1 },
            }]
        );
    }

    #[test]
    fn empty_and_comment_only_files() {
        assert!(parse_file("").unwrap().is_empty());
        assert!(parse_file("# nothing here\n\n").unwrap().is_empty());
    }

    #[test]
    fn coh_then_check() {
        let cmds = parse_file("coh id (x : *) : x -> x\ncheck (y : *) id[y]\n").unwrap();
        assert_eq!(cmds.len(), 2);
        let Command::Coh { name, telescope, ty, .. } = &cmds[0] else { panic!() };
        assert_eq!(name, "id");
        assert_eq!(telescope.len(), 1);
        assert!(matches!(ty, TypeExpr::Arr(..)));
        let Command::Check { target: TermExpr::App(f, args, _), .. } = &cmds[1] else { panic!() };
        assert_eq!(f, "id");
        assert_eq!(args.len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_file("coh id (x : *) : x -> \n").unwrap_err();
        assert_eq!(e.pos.line, 1);
        let e = parse_file("let f (x : *) = x\n  check ?").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 9 });
        let e = parse_file("check H(3,2)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 7 });
    }

    #[test]
    fn arrow_binds_terms_not_types() {
        let cmds = parse_file("let g (x : *) (y : *) (f : x -> y) = f").unwrap();
        let Command::Let { telescope, body, .. } = &cmds[0] else { panic!() };
        assert_eq!(telescope.len(), 3);
        assert_eq!(body, &TermExpr::Name("f".into(), Pos { line: 1, col: 38 }));
    }
}
