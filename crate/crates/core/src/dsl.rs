//! The workspace language read by `finalg run`.
//!
//! A document is a sequence of statements, one per line (braces, brackets and
//! parentheses may span lines). `#` starts a comment.
//!
//! ```text
//! quiver Q { vertices 2; arrow c1: 1 -> 2 deg 0; arrow b1: 2 -> 1 deg 0; }
//! relations I on Q { c1*b1 = 0; } trunc 3
//! algebra A = quotient(Q, I)
//! family F = rfamily(n=3, m=2, k=1, seed=7)
//! matrix M = [[0,-1],[1,0]]
//! run gldim A bound=10
//! ```
//!
//! Paths are written right to left: `c1*b1` is `b1` followed by `c1`.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};

use crate::exactmat::{format_rational, Q};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub type ParseResult<T> = std::result::Result<T, ParseError>;

/// A linear combination of paths, each named by its arrow word or `e<i>`.
pub type LinComb = Vec<(Q, String)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    /// The semisimple algebra spanned by the vertex idempotents.
    S,
    /// The ground field.
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tau {
    /// The canonical twisting map built from the augmentations.
    V,
    /// `b ⊗ a -> a ⊗ b`.
    Flip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraExpr {
    Quotient { quiver: String, relations: Option<String>, differential: Vec<(String, LinComb)> },
    Green { k: usize },
    Kronecker { n: usize, degrees: Vec<i64> },
    Twist { left: String, right: String, over: Base, tau: Tau, nabla: Vec<(String, LinComb)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyExpr {
    Random { n: usize, m: usize, k: usize, seed: u64 },
    Kk { m: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Int(BigInt),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Quiver { name: String, vertices: usize, arrows: Vec<ArrowDecl> },
    Relations { name: String, quiver: String, relations: Vec<LinComb>, trunc: Option<usize> },
    Algebra { name: String, expr: AlgebraExpr },
    Family { name: String, expr: FamilyExpr },
    Matrix { name: String, rows: Vec<Vec<BigInt>> },
    Run { command: String, target: Option<String>, args: Vec<(String, Arg)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub line: usize,
    pub col: usize,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WorkspaceDoc {
    pub stmts: Vec<Stmt>,
}

pub const COMMANDS: &[&str] = &[
    "validate",
    "dims",
    "radical",
    "gldim",
    "resolve",
    "chi",
    "quadform",
    "exceptional",
    "gamma",
    "factor-sl",
    "realize",
    "cohomology",
    "verify-twist",
    "report-all",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Quiver,
    Relations,
    Algebra,
    Twist,
    Family,
    Matrix,
}

impl Kind {
    fn noun(self) -> &'static str {
        match self {
            Kind::Quiver => "a quiver",
            Kind::Relations => "a relation set",
            Kind::Algebra | Kind::Twist => "an algebra",
            Kind::Family => "a family",
            Kind::Matrix => "a matrix",
        }
    }

    pub fn is_algebra_like(self) -> bool {
        matches!(self, Kind::Algebra | Kind::Twist | Kind::Family)
    }
}

/// Which kinds of target a command accepts.
pub fn command_accepts(command: &str, kind: Kind) -> bool {
    match command {
        "gamma" => kind == Kind::Family,
        "factor-sl" | "realize" => kind == Kind::Matrix,
        "verify-twist" => kind == Kind::Twist,
        "report-all" => kind != Kind::Quiver && kind != Kind::Relations,
        _ => kind.is_algebra_like(),
    }
}

impl StmtKind {
    pub fn defined_name(&self) -> Option<(&str, Kind)> {
        match self {
            StmtKind::Quiver { name, .. } => Some((name, Kind::Quiver)),
            StmtKind::Relations { name, .. } => Some((name, Kind::Relations)),
            StmtKind::Algebra { name, expr: AlgebraExpr::Twist { .. } } => Some((name, Kind::Twist)),
            StmtKind::Algebra { name, .. } => Some((name, Kind::Algebra)),
            StmtKind::Family { name, .. } => Some((name, Kind::Family)),
            StmtKind::Matrix { name, .. } => Some((name, Kind::Matrix)),
            StmtKind::Run { .. } => None,
        }
    }
}

impl WorkspaceDoc {
    pub fn definitions(&self) -> impl Iterator<Item = &Stmt> {
        self.stmts.iter().filter(|s| !matches!(s.kind, StmtKind::Run { .. }))
    }

    pub fn commands(&self) -> impl Iterator<Item = &Stmt> {
        self.stmts.iter().filter(|s| matches!(s.kind, StmtKind::Run { .. }))
    }

    pub fn kind_of(&self, name: &str) -> Option<Kind> {
        self.definitions().filter_map(|s| s.kind.defined_name()).find(|(n, _)| *n == name).map(|(_, k)| k)
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Arrow,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    /// Column just past the token, for adjacency checks.
    end: usize,
}

fn lex(src: &str) -> ParseResult<Vec<Token>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let (lno, col) = (li + 1, i + 1);
            let err = |message: String| ParseError { line: lno, col, message };
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = if ch.is_ascii_alphabetic() || ch == '_' {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if ch.is_ascii_digit() {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                Tok::Int(s.parse().map_err(|_| err(format!("bad integer `{s}`")))?)
            } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
                i += 2;
                Tok::Arrow
            } else if "{}()[];:,=*/+-".contains(ch) {
                i += 1;
                match ch {
                    '{' | '(' | '[' => depth += 1,
                    '}' | ')' | ']' => {
                        depth = depth.checked_sub(1).ok_or_else(|| err(format!("unbalanced `{ch}`")))?;
                    }
                    _ => {}
                }
                Tok::Sym(ch)
            } else {
                return Err(err(format!("unexpected character `{ch}`")));
            };
            out.push(Token { tok, line: lno, col, end: i + 1 });
        }
        if depth == 0 && !matches!(out.last(), None | Some(Token { tok: Tok::Newline, .. })) {
            out.push(Token { tok: Tok::Newline, line: li + 1, col: chars.len() + 1, end: chars.len() + 1 });
        }
    }
    let line = src.lines().count().max(1);
    if depth != 0 {
        return Err(ParseError { line, col: 1, message: "unexpected end of input inside brackets".into() });
    }
    out.push(Token { tok: Tok::Eof, line, col: 1, end: 1 });
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError { line: t.line, col: t.col, message: message.into() }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> ParseResult<T> {
        let t = self.peek();
        Err(Self::error_at(t, format!("expected {wanted}, found {}", Self::describe(&t.tok))))
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> ParseResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> ParseResult<()> {
        if self.is_keyword(kw) {
            self.next();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> ParseResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    fn int(&mut self) -> ParseResult<BigInt> {
        let neg = self.eat_sym('-');
        match &self.peek().tok {
            Tok::Int(n) => {
                let n = if neg { -n.clone() } else { n.clone() };
                self.next();
                Ok(n)
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn small<T: TryFrom<BigInt>>(&mut self, what: &str) -> ParseResult<T> {
        let t = self.peek().clone();
        let n = self.int()?;
        T::try_from(n).map_err(|_| Self::error_at(&t, format!("{what} out of range")))
    }

    fn end_of_statement(&mut self) -> ParseResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.unexpected("end of line"),
        }
    }

    fn document(&mut self) -> ParseResult<WorkspaceDoc> {
        let mut doc = WorkspaceDoc::default();
        loop {
            while self.peek().tok == Tok::Newline {
                self.next();
            }
            if self.peek().tok == Tok::Eof {
                return Ok(doc);
            }
            let t = self.peek().clone();
            let kind = match &t.tok {
                Tok::Ident(kw) => match kw.as_str() {
                    "quiver" => self.quiver()?,
                    "relations" => self.relations()?,
                    "algebra" => self.algebra()?,
                    "family" => self.family()?,
                    "matrix" => self.matrix()?,
                    "run" => self.run()?,
                    other => return Err(Self::error_at(&t, format!("unknown statement `{other}`"))),
                },
                _ => return self.unexpected("a statement"),
            };
            self.end_of_statement()?;
            doc.stmts.push(Stmt { line: t.line, col: t.col, kind });
        }
    }

    fn quiver(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("quiver")?;
        let name = self.ident()?;
        self.expect_sym('{')?;
        let mut vertices = None;
        let mut arrows = Vec::new();
        while !self.eat_sym('}') {
            if self.is_keyword("vertices") {
                self.next();
                vertices = Some(self.small::<usize>("vertex count")?);
            } else if self.is_keyword("arrow") {
                self.next();
                let name = self.ident()?;
                self.expect_sym(':')?;
                let source = self.small::<usize>("vertex")?;
                if self.peek().tok != Tok::Arrow {
                    return self.unexpected("`->`");
                }
                self.next();
                let target = self.small::<usize>("vertex")?;
                let degree = if self.is_keyword("deg") {
                    self.next();
                    self.small::<i64>("degree")?
                } else {
                    0
                };
                arrows.push(ArrowDecl { name, source, target, degree });
            } else {
                return self.unexpected("`vertices`, `arrow` or `}`");
            }
            if !self.is_sym('}') {
                self.expect_sym(';')?;
            }
        }
        let vertices = match vertices {
            Some(v) => v,
            None => return Err(Self::error_at(self.peek(), format!("quiver `{name}` does not declare its vertices"))),
        };
        Ok(StmtKind::Quiver { name, vertices, arrows })
    }

    fn path(&mut self) -> ParseResult<String> {
        let mut parts = vec![self.ident()?];
        while self.eat_sym('*') {
            parts.push(self.ident()?);
        }
        Ok(parts.join("*"))
    }

    fn rational(&mut self) -> ParseResult<Q> {
        let n = self.int()?;
        if self.eat_sym('/') {
            let t = self.peek().clone();
            let d = self.int()?;
            if d.is_zero() {
                return Err(Self::error_at(&t, "zero denominator"));
            }
            return Ok(Q::new(n, d));
        }
        Ok(Q::from_integer(n))
    }

    /// `[±] term (± term)*` where a term is `path`, `q*path`, `q path` or a bare `0`.
    fn lincomb(&mut self) -> ParseResult<LinComb> {
        let mut out: LinComb = Vec::new();
        let mut first = true;
        loop {
            let sign = if self.eat_sym('-') {
                -Q::one()
            } else if self.eat_sym('+') || first {
                Q::one()
            } else {
                break;
            };
            first = false;
            let t = self.peek().clone();
            let (coef, path) = if let Tok::Int(_) = t.tok {
                let c = self.rational()?;
                let starts_path = matches!(self.peek().tok, Tok::Ident(_));
                if self.eat_sym('*') || starts_path {
                    (c, Some(self.path()?))
                } else {
                    (c, None)
                }
            } else {
                (Q::one(), Some(self.path()?))
            };
            match path {
                Some(p) => add_term(&mut out, sign * coef, p),
                None if coef.is_zero() => {}
                None => return Err(Self::error_at(&t, "a nonzero scalar needs a path")),
            }
        }
        Ok(out)
    }

    fn relations(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("relations")?;
        let name = self.ident()?;
        self.expect_keyword("on")?;
        let quiver = self.ident()?;
        self.expect_sym('{')?;
        let mut relations = Vec::new();
        while !self.eat_sym('}') {
            let t = self.peek().clone();
            let mut lhs = self.lincomb()?;
            self.expect_sym('=')?;
            let rhs = self.lincomb()?;
            for (c, p) in rhs {
                add_term(&mut lhs, -c, p);
            }
            if lhs.is_empty() {
                return Err(Self::error_at(&t, "relation is trivially zero"));
            }
            relations.push(lhs);
            if !self.is_sym('}') {
                self.expect_sym(';')?;
            }
        }
        let trunc = if self.is_keyword("trunc") {
            self.next();
            Some(self.small::<usize>("truncation bound")?)
        } else {
            None
        };
        Ok(StmtKind::Relations { name, quiver, relations, trunc })
    }

    /// `key=value` pairs up to the closing parenthesis, which is consumed.
    fn kwargs(&mut self) -> ParseResult<Vec<(Token, String, Arg)>> {
        let mut out = Vec::new();
        while !self.eat_sym(')') {
            let t = self.peek().clone();
            let key = self.ident()?;
            self.expect_sym('=')?;
            let value = if let Tok::Ident(s) = &self.peek().tok {
                let s = s.clone();
                self.next();
                Arg::Name(s)
            } else {
                Arg::Int(self.int()?)
            };
            out.push((t, key, value));
            if !self.is_sym(')') {
                self.expect_sym(',')?;
            }
        }
        Ok(out)
    }

    fn algebra(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("algebra")?;
        let name = self.ident()?;
        self.expect_sym('=')?;
        let t = self.peek().clone();
        let ctor = self.ident()?;
        self.expect_sym('(')?;
        let expr = match ctor.as_str() {
            "quotient" => {
                let quiver = self.ident()?;
                let relations = if self.eat_sym(',') { Some(self.ident()?) } else { None };
                self.expect_sym(')')?;
                let differential = if self.is_keyword("d") { self.arrow_map("d")? } else { Vec::new() };
                AlgebraExpr::Quotient { quiver, relations, differential }
            }
            "green" => {
                let args = self.kwargs()?;
                let k = take_usize(&args, "k", &t)?;
                check_keys(&args, &["k"])?;
                AlgebraExpr::Green { k }
            }
            "kronecker" => {
                let (n, degrees) = self.kronecker_args(&t)?;
                AlgebraExpr::Kronecker { n, degrees }
            }
            "twist" => {
                let left = self.ident()?;
                self.expect_sym(',')?;
                let right = self.ident()?;
                let mut over = Base::S;
                let mut tau = Tau::V;
                if self.eat_sym(',') {
                    let args = self.kwargs()?;
                    check_keys(&args, &["over", "tau"])?;
                    for (tok, key, value) in &args {
                        match (key.as_str(), value) {
                            ("over", Arg::Name(s)) if s == "S" => over = Base::S,
                            ("over", Arg::Name(s)) if s == "Q" => over = Base::Q,
                            ("tau", Arg::Name(s)) if s == "v" => tau = Tau::V,
                            ("tau", Arg::Name(s)) if s == "flip" => tau = Tau::Flip,
                            _ => return Err(Self::error_at(tok, format!("bad value for `{key}`"))),
                        }
                    }
                } else {
                    self.expect_sym(')')?;
                }
                let nabla = if self.is_keyword("nabla") { self.arrow_map("nabla")? } else { Vec::new() };
                AlgebraExpr::Twist { left, right, over, tau, nabla }
            }
            other => return Err(Self::error_at(&t, format!("unknown algebra constructor `{other}`"))),
        };
        Ok(StmtKind::Algebra { name, expr })
    }

    fn kronecker_args(&mut self, t: &Token) -> ParseResult<(usize, Vec<i64>)> {
        let mut n = None;
        let mut degrees = Vec::new();
        while !self.eat_sym(')') {
            let kt = self.peek().clone();
            let key = self.ident()?;
            self.expect_sym('=')?;
            match key.as_str() {
                "n" => n = Some(self.small::<usize>("arrow count")?),
                "deg" => {
                    self.expect_sym('[')?;
                    while !self.eat_sym(']') {
                        degrees.push(self.small::<i64>("degree")?);
                        if !self.is_sym(']') {
                            self.expect_sym(',')?;
                        }
                    }
                }
                _ => return Err(Self::error_at(&kt, format!("unknown argument `{key}`"))),
            }
            if !self.is_sym(')') {
                self.expect_sym(',')?;
            }
        }
        let n = n.ok_or_else(|| Self::error_at(t, "missing argument `n`"))?;
        if !degrees.is_empty() && degrees.len() != n {
            return Err(Self::error_at(t, format!("{n} arrows but {} degrees", degrees.len())));
        }
        if degrees.iter().all(|&d| d == 0) {
            degrees.clear();
        }
        Ok((n, degrees))
    }

    /// `kw { arrow -> lincomb; ... }`
    fn arrow_map(&mut self, kw: &str) -> ParseResult<Vec<(String, LinComb)>> {
        self.expect_keyword(kw)?;
        self.expect_sym('{')?;
        let mut out = Vec::new();
        while !self.eat_sym('}') {
            let arrow = self.ident()?;
            if self.peek().tok != Tok::Arrow {
                return self.unexpected("`->`");
            }
            self.next();
            out.push((arrow, self.lincomb()?));
            if !self.is_sym('}') {
                self.expect_sym(';')?;
            }
        }
        Ok(out)
    }

    fn family(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("family")?;
        let name = self.ident()?;
        self.expect_sym('=')?;
        let t = self.peek().clone();
        let ctor = self.ident()?;
        self.expect_sym('(')?;
        let args = self.kwargs()?;
        let expr = match ctor.as_str() {
            "rfamily" => {
                check_keys(&args, &["n", "m", "k", "seed"])?;
                FamilyExpr::Random {
                    n: take_usize(&args, "n", &t)?,
                    m: take_usize(&args, "m", &t)?,
                    k: take_usize(&args, "k", &t)?,
                    seed: take_usize(&args, "seed", &t)? as u64,
                }
            }
            "kk" => {
                check_keys(&args, &["m"])?;
                FamilyExpr::Kk { m: take_usize(&args, "m", &t)? }
            }
            other => return Err(Self::error_at(&t, format!("unknown family constructor `{other}`"))),
        };
        Ok(StmtKind::Family { name, expr })
    }

    fn matrix(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("matrix")?;
        let name = self.ident()?;
        self.expect_sym('=')?;
        let t = self.peek().clone();
        self.expect_sym('[')?;
        let mut rows = Vec::new();
        while !self.eat_sym(']') {
            self.expect_sym('[')?;
            let mut row = Vec::new();
            while !self.eat_sym(']') {
                row.push(self.int()?);
                if !self.is_sym(']') {
                    self.expect_sym(',')?;
                }
            }
            rows.push(row);
            if !self.is_sym(']') {
                self.expect_sym(',')?;
            }
        }
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Self::error_at(&t, "matrix must be square and nonempty"));
        }
        Ok(StmtKind::Matrix { name, rows })
    }

    fn run(&mut self) -> ParseResult<StmtKind> {
        self.expect_keyword("run")?;
        let t = self.peek().clone();
        let mut command = self.ident()?;
        let mut last_end = self.toks[self.pos - 1].end;
        // hyphenated names such as `factor-sl`, written without spaces
        while self.is_sym('-') && self.peek().col == last_end {
            let dash = self.next();
            match &self.peek().tok {
                Tok::Ident(s) if self.peek().col == dash.end => {
                    command.push('-');
                    command.push_str(s);
                    last_end = self.peek().end;
                    self.next();
                }
                _ => return self.unexpected("a command name"),
            }
        }
        if !COMMANDS.contains(&command.as_str()) {
            return Err(Self::error_at(&t, format!("unknown command `{command}`")));
        }
        let mut target = None;
        let mut args = Vec::new();
        while let Tok::Ident(s) = &self.peek().tok {
            let s = s.clone();
            let at = self.next();
            if self.eat_sym('=') {
                let value = match &self.peek().tok {
                    Tok::Ident(v) => {
                        let v = v.clone();
                        self.next();
                        Arg::Name(v)
                    }
                    _ => Arg::Int(self.int()?),
                };
                args.push((s, value));
            } else if target.is_none() && args.is_empty() {
                target = Some(s);
            } else {
                return Err(Self::error_at(&at, "expected `key=value`"));
            }
        }
        Ok(StmtKind::Run { command, target, args })
    }
}

fn add_term(out: &mut LinComb, c: Q, p: String) {
    if let Some(slot) = out.iter_mut().find(|(_, q)| *q == p) {
        slot.0 += c;
    } else {
        out.push((c, p));
    }
    out.retain(|(c, _)| !c.is_zero());
}

fn take_usize(args: &[(Token, String, Arg)], key: &str, at: &Token) -> ParseResult<usize> {
    match args.iter().find(|(_, k, _)| k == key) {
        Some((t, _, Arg::Int(n))) => {
            usize::try_from(n.clone()).map_err(|_| Parser::error_at(t, format!("`{key}` must be a nonnegative integer")))
        }
        Some((t, _, Arg::Name(_))) => Err(Parser::error_at(t, format!("`{key}` must be an integer"))),
        None => Err(Parser::error_at(at, format!("missing argument `{key}`"))),
    }
}

fn check_keys(args: &[(Token, String, Arg)], allowed: &[&str]) -> ParseResult<()> {
    let mut seen: Vec<&str> = Vec::new();
    for (t, k, _) in args {
        if !allowed.contains(&k.as_str()) {
            return Err(Parser::error_at(t, format!("unknown argument `{k}`")));
        }
        if seen.contains(&k.as_str()) {
            return Err(Parser::error_at(t, format!("argument `{k}` given twice")));
        }
        seen.push(k);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// static checks

fn check(doc: &WorkspaceDoc) -> ParseResult<()> {
    let mut kinds: HashMap<&str, Kind> = HashMap::new();
    let mut graded: HashMap<&str, bool> = HashMap::new();
    let mut quivers: HashMap<&str, &Vec<ArrowDecl>> = HashMap::new();
    let mut rel_quiver: HashMap<&str, &str> = HashMap::new();
    for s in &doc.stmts {
        let err = |message: String| ParseError { line: s.line, col: s.col, message };
        let need = |name: &str, ok: &dyn Fn(Kind) -> bool, what: &str| -> ParseResult<Kind> {
            match kinds.get(name) {
                None => Err(err(format!("unresolved reference `{name}`"))),
                Some(&k) if ok(k) => Ok(k),
                Some(&k) => Err(err(format!("type mismatch: `{name}` is {}, expected {what}", k.noun()))),
            }
        };
        match &s.kind {
            StmtKind::Quiver { vertices, arrows, .. } => {
                for a in arrows {
                    if a.source == 0 || a.target == 0 || a.source > *vertices || a.target > *vertices {
                        return Err(err(format!("arrow `{}` uses a vertex outside 1..{vertices}", a.name)));
                    }
                    if arrows.iter().filter(|b| b.name == a.name).count() > 1 {
                        return Err(err(format!("arrow `{}` declared twice", a.name)));
                    }
                }
            }
            StmtKind::Relations { quiver, .. } => {
                need(quiver, &|k| k == Kind::Quiver, "a quiver")?;
            }
            StmtKind::Algebra { expr, .. } => match expr {
                AlgebraExpr::Quotient { quiver, relations, differential } => {
                    need(quiver, &|k| k == Kind::Quiver, "a quiver")?;
                    if let Some(r) = relations {
                        need(r, &|k| k == Kind::Relations, "a relation set")?;
                        if rel_quiver[r.as_str()] != quiver {
                            return Err(err(format!("type mismatch: `{r}` is a relation set on `{}`", rel_quiver[r.as_str()])));
                        }
                    }
                    for (a, _) in differential {
                        if !quivers[quiver.as_str()].iter().any(|d| &d.name == a) {
                            return Err(err(format!("`{a}` is not an arrow of `{quiver}`")));
                        }
                    }
                }
                AlgebraExpr::Twist { left, right, nabla, .. } => {
                    need(left, &|k| k.is_algebra_like(), "an algebra")?;
                    need(right, &|k| k.is_algebra_like(), "an algebra")?;
                    if !nabla.is_empty() && !graded[left.as_str()] && !graded[right.as_str()] {
                        return Err(err("type mismatch: nabla needs a graded factor, both factors are concentrated in degree 0".into()));
                    }
                }
                _ => {}
            },
            StmtKind::Run { command, target: Some(t), .. } => {
                let k = need(t, &|_| true, "a target")?;
                if !command_accepts(command, k) {
                    return Err(err(format!("type mismatch: `{command}` does not apply to {}", k.noun())));
                }
            }
            StmtKind::Run { command, target: None, .. }
                if command != "report-all" => {
                    return Err(err(format!("`{command}` needs a target")));
                }
            _ => {}
        }
        if let Some((name, kind)) = s.kind.defined_name() {
            if kinds.insert(name, kind).is_some() {
                return Err(err(format!("`{name}` is defined twice")));
            }
            let is_graded = match &s.kind {
                StmtKind::Algebra { expr: AlgebraExpr::Quotient { quiver, differential, .. }, .. } => {
                    !differential.is_empty() || quivers[quiver.as_str()].iter().any(|a| a.degree != 0)
                }
                StmtKind::Algebra { expr: AlgebraExpr::Kronecker { degrees, .. }, .. } => !degrees.is_empty(),
                StmtKind::Algebra { expr: AlgebraExpr::Twist { left, right, nabla, .. }, .. } => {
                    !nabla.is_empty() || graded[left.as_str()] || graded[right.as_str()]
                }
                _ => false,
            };
            graded.insert(name, is_graded);
            match &s.kind {
                StmtKind::Quiver { name, arrows, .. } => {
                    quivers.insert(name, arrows);
                }
                StmtKind::Relations { name, quiver, .. } => {
                    rel_quiver.insert(name, quiver);
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Parses and checks a document: unique names, resolvable references, matching types.
pub fn parse(src: &str) -> ParseResult<WorkspaceDoc> {
    let toks = lex(src)?;
    let doc = Parser { toks, pos: 0 }.document()?;
    check(&doc)?;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// canonical printing

pub fn format_lincomb(terms: &LinComb) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, p)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !abs.is_one() {
            out.push_str(&format_rational(&abs));
            out.push('*');
        }
        out.push_str(p);
    }
    out
}

fn format_arrow_map(kw: &str, map: &[(String, LinComb)]) -> String {
    let body: Vec<String> = map.iter().map(|(a, l)| format!("{a} -> {}", format_lincomb(l))).collect();
    format!(" {kw} {{ {} }}", body.join("; "))
}

impl fmt::Display for StmtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StmtKind::Quiver { name, vertices, arrows } => {
                write!(f, "quiver {name} {{ vertices {vertices};")?;
                for a in arrows {
                    write!(f, " arrow {}: {} -> {} deg {};", a.name, a.source, a.target, a.degree)?;
                }
                write!(f, " }}")
            }
            StmtKind::Relations { name, quiver, relations, trunc } => {
                write!(f, "relations {name} on {quiver} {{")?;
                for r in relations {
                    write!(f, " {} = 0;", format_lincomb(r))?;
                }
                write!(f, " }}")?;
                if let Some(t) = trunc {
                    write!(f, " trunc {t}")?;
                }
                Ok(())
            }
            StmtKind::Algebra { name, expr } => {
                write!(f, "algebra {name} = ")?;
                match expr {
                    AlgebraExpr::Quotient { quiver, relations, differential } => {
                        match relations {
                            Some(r) => write!(f, "quotient({quiver}, {r})")?,
                            None => write!(f, "quotient({quiver})")?,
                        }
                        if !differential.is_empty() {
                            f.write_str(&format_arrow_map("d", differential))?;
                        }
                        Ok(())
                    }
                    AlgebraExpr::Green { k } => write!(f, "green(k={k})"),
                    AlgebraExpr::Kronecker { n, degrees } if degrees.is_empty() => write!(f, "kronecker(n={n})"),
                    AlgebraExpr::Kronecker { n, degrees } => {
                        let d: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
                        write!(f, "kronecker(n={n}, deg=[{}])", d.join(","))
                    }
                    AlgebraExpr::Twist { left, right, over, tau, nabla } => {
                        let over = match over {
                            Base::S => "S",
                            Base::Q => "Q",
                        };
                        let tau = match tau {
                            Tau::V => "v",
                            Tau::Flip => "flip",
                        };
                        write!(f, "twist({left}, {right}, over={over}, tau={tau})")?;
                        if !nabla.is_empty() {
                            f.write_str(&format_arrow_map("nabla", nabla))?;
                        }
                        Ok(())
                    }
                }
            }
            StmtKind::Family { name, expr } => match expr {
                FamilyExpr::Random { n, m, k, seed } => write!(f, "family {name} = rfamily(n={n}, m={m}, k={k}, seed={seed})"),
                FamilyExpr::Kk { m } => write!(f, "family {name} = kk(m={m})"),
            },
            StmtKind::Matrix { name, rows } => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                write!(f, "matrix {name} = [{}]", rows.join(","))
            }
            StmtKind::Run { command, target, args } => {
                write!(f, "run {command}")?;
                if let Some(t) = target {
                    write!(f, " {t}")?;
                }
                for (k, v) in args {
                    match v {
                        Arg::Int(n) => write!(f, " {k}={n}")?,
                        Arg::Name(s) => write!(f, " {k}={s}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for WorkspaceDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{}", s.kind)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G3: &str = "\
quiver Q { vertices 2; arrow c1: 1 -> 2 deg 0; arrow c2: 1 -> 2 deg 0; arrow b1: 2 -> 1 deg 0; }
relations I on Q { c1*b1 = 0; b1*c2 = 0; } trunc 4
algebra G3 = quotient(Q, I)
run gldim G3 bound=10
";

    #[test]
    fn empty_file() {
        assert_eq!(parse("").unwrap(), WorkspaceDoc::default());
        assert_eq!(parse("# nothing\n\n").unwrap(), WorkspaceDoc::default());
    }

    #[test]
    fn canonical_round_trip() {
        let doc = parse(G3).unwrap();
        assert_eq!(doc.to_string(), G3);
        assert_eq!(doc.stmts.len(), 4);
    }

    #[test]
    fn multi_line_blocks_and_lincombs() {
        let src = "quiver Q {\n  vertices 2;\n  arrow c1: 1 -> 2; arrow c2: 1 -> 2\n  arrow b1: 2 -> 1\n}\n";
        assert!(parse(src).is_err());
        let src = "quiver Q {\n  vertices 2;\n  arrow c1: 1 -> 2; arrow c2: 1 -> 2;\n  arrow b1: 2 -> 1\n}\n\
                   relations I on Q { b1*c2 - 2/3 b1*c1 = b1*c2; 2*c1*b1 + c2*b1 = 0 }\n";
        let doc = parse(src).unwrap();
        let StmtKind::Relations { relations, .. } = &doc.stmts[1].kind else { panic!() };
        assert_eq!(format_lincomb(&relations[0]), "-2/3*b1*c1");
        assert_eq!(format_lincomb(&relations[1]), "2*c1*b1 + c2*b1");
        let again = parse(&doc.to_string()).unwrap();
        assert_eq!(again.to_string(), doc.to_string());
    }

    #[test]
    fn malformed_arrow_reports_column() {
        let e = parse("quiver Q { vertices 2; arrow c1: 1 -> ; }").unwrap_err();
        assert_eq!((e.line, e.col), (1, 39));
        let e = parse("quiver Q { vertices 2; arrow c1: 1 -> }").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.message.contains("integer"), "{e}");
    }

    #[test]
    fn resolution_and_types() {
        let e = parse("algebra A = quotient(Q)").unwrap_err();
        assert!(e.message.contains("unresolved"), "{e}");
        let e = parse("matrix M = [[1]]\nrun chi M").unwrap_err();
        assert!(e.message.contains("type mismatch"), "{e}");
        let e = parse("algebra A = green(k=2)\nalgebra A = green(k=3)").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("algebra A = green(k=1)\nalgebra B = green(k=1)\nalgebra C = twist(A, B) nabla { c1 -> c1 }").unwrap_err();
        assert!(e.message.contains("nabla"), "{e}");
        parse("algebra A = kronecker(n=1)\nalgebra B = kronecker(n=1, deg=[-1])\nalgebra C = twist(A, B) nabla { c1 -> c1 }").unwrap();
    }

    #[test]
    fn commands_with_hyphens() {
        let doc = parse("matrix M = [[0,-1],[1,0]]\nrun factor-sl M\nrun report-all").unwrap();
        assert_eq!(doc.to_string(), "matrix M = [[0,-1],[1,0]]\nrun factor-sl M\nrun report-all\n");
        assert!(parse("matrix M = [[1]]\nrun factor - sl M").is_err());
    }
}
