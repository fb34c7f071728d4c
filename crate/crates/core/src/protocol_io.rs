//! The `.protocol` text format and trajectory CSV export.
//!
//! ```text
//! # comment
//! vars x1 x2 x3
//! f1 = x2 - x1
//! f2 = 1/2*x1^2 - x2
//! f3 = 0
//! ```
//!
//! Precedence from tightest: `^` (variable to a positive integer literal),
//! unary `-`, `*`, binary `+`/`-`. Rational literals `p/q` are the only use
//! of `/`.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyring::{Coeff, Monomial, Polynomial, Ring};
use crate::protocol::Protocol;
use crate::simulate::Trajectory;

const MAX_DEPTH: usize = 64;
const MAX_TERMS: usize = 100_000;
const MAX_DEGREE: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredVariable(String),
    DuplicateDefinition(usize),
    MissingDefinition(usize),
    NonPositiveExponent,
    ZeroDenominator,
    TooLarge(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UndeclaredVariable(v) => write!(f, "undeclared variable `{v}`"),
            ParseErrorKind::DuplicateDefinition(i) => write!(f, "f{i} defined twice"),
            ParseErrorKind::MissingDefinition(i) => write!(f, "f{i} is never defined"),
            ParseErrorKind::NonPositiveExponent => write!(f, "exponent must be a positive integer"),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator"),
            ParseErrorKind::TooLarge(m) => write!(f, "expression too large: {m}"),
        }
    }
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }

    fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Self::new(line, column, ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
        }
    }
}

/// Token with its 1-based column.
type Spanned = (Tok, usize);

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(line_no: usize, text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let col = k + 1;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            if k < chars.len() && is_ident_char(chars[k]) {
                return Err(ParseError::syntax(line_no, k + 1, "missing `*` between number and name"));
            }
            let digits: String = chars[start..k].iter().collect();
            let n: BigInt = digits.parse().expect("ascii digits");
            out.push((Tok::Int(n), col));
        } else if is_ident_start(c) {
            let start = k;
            while k < chars.len() && is_ident_char(chars[k]) {
                k += 1;
            }
            out.push((Tok::Ident(chars[start..k].iter().collect()), col));
        } else {
            return Err(ParseError::syntax(line_no, col, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    /// Column just past the last token, for end-of-line errors.
    end_col: usize,
    ring: &'a Ring,
    depth: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |&(_, c)| c)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.line, self.col(), kind)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().map_or("end of line".to_string(), Tok::describe);
        self.err(ParseErrorKind::Syntax(format!("expected {wanted}, found {found}")))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn check_size(&self, p: &Polynomial) -> Result<(), ParseError> {
        if p.len() > MAX_TERMS {
            return Err(self.err(ParseErrorKind::TooLarge(format!("more than {MAX_TERMS} terms"))));
        }
        if p.total_degree().is_some_and(|d| d > MAX_DEGREE) {
            return Err(self.err(ParseErrorKind::TooLarge(format!("degree above {MAX_DEGREE}"))));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
            self.check_size(&acc)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let rhs = self.unary()?;
            acc = self.checked_mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn checked_mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, ParseError> {
        let too_big = || self.err(ParseErrorKind::TooLarge(format!("degree above {MAX_DEGREE}")));
        if a.len().saturating_mul(b.len()) > MAX_TERMS * 4 {
            return Err(self.err(ParseErrorKind::TooLarge(format!("more than {MAX_TERMS} terms"))));
        }
        let mut terms = Vec::with_capacity(a.len() * b.len());
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let m = ma.checked_mul(mb).ok_or_else(too_big)?;
                if m.degree() > MAX_DEGREE {
                    return Err(too_big());
                }
                terms.push((m, ca * cb));
            }
        }
        let p = Polynomial::from_terms(self.ring, terms).expect("monomials from ring");
        self.check_size(&p)?;
        Ok(p)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(-&inner);
        }
        self.atom()
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ParseErrorKind::TooLarge(format!("nesting deeper than {MAX_DEPTH}"))));
        }
        Ok(())
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(num)) => {
                let mut c = Coeff::from_integer(num);
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let den_col = self.col();
                    match self.bump() {
                        Some(Tok::Int(den)) if den.is_zero() => {
                            return Err(ParseError::new(self.line, den_col, ParseErrorKind::ZeroDenominator));
                        }
                        Some(Tok::Int(den)) => c /= Coeff::from_integer(den),
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("integer denominator"));
                        }
                    }
                }
                if self.peek() == Some(&Tok::Caret) {
                    return Err(self.err(ParseErrorKind::Syntax("`^` applies to a variable only".into())));
                }
                Ok(Polynomial::constant(self.ring, c))
            }
            Some(Tok::Ident(name)) => {
                let v = self.ring.index_of(&name).ok_or_else(|| {
                    ParseError::new(self.line, col, ParseErrorKind::UndeclaredVariable(name.clone()))
                })?;
                let mut exp = 1u32;
                if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    let ecol = self.col();
                    match self.bump() {
                        Some(Tok::Int(e)) => {
                            if e.is_zero() {
                                return Err(ParseError::new(self.line, ecol, ParseErrorKind::NonPositiveExponent));
                            }
                            exp = u32::try_from(&e)
                                .ok()
                                .filter(|&e| u64::from(e) <= MAX_DEGREE)
                                .ok_or_else(|| {
                                    ParseError::new(
                                        self.line,
                                        ecol,
                                        ParseErrorKind::TooLarge(format!("exponent above {MAX_DEGREE}")),
                                    )
                                })?;
                        }
                        Some(Tok::Minus) => {
                            return Err(ParseError::new(self.line, ecol, ParseErrorKind::NonPositiveExponent));
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected("integer exponent"));
                        }
                    }
                    if self.peek() == Some(&Tok::Caret) {
                        return Err(self.err(ParseErrorKind::Syntax("chained `^`".into())));
                    }
                }
                Ok(Polynomial::monomial(
                    self.ring,
                    Coeff::one(),
                    Monomial::var(self.ring.nvars(), v, exp),
                ))
            }
            Some(Tok::LParen) => {
                self.enter()?;
                let inner = self.expr()?;
                self.depth -= 1;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                if self.peek() == Some(&Tok::Caret) {
                    return Err(self.err(ParseErrorKind::Syntax("`^` applies to a variable only".into())));
                }
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a number, variable or `(`"))
            }
        }
    }
}

fn parse_expr_tokens(
    toks: &[Spanned],
    line: usize,
    end_col: usize,
    ring: &Ring,
) -> Result<Polynomial, ParseError> {
    let mut p = ExprParser {
        toks,
        pos: 0,
        line,
        end_col,
        ring,
        depth: 0,
    };
    let poly = p.expr()?;
    if p.pos < toks.len() {
        return Err(p.unexpected("an operator or end of line"));
    }
    Ok(poly)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(code, _)| code)
}

/// Parses a single polynomial expression over `ring`.
pub fn parse_polynomial(text: &str, ring: &Ring) -> Result<Polynomial, ParseError> {
    if text.contains('\n') {
        let col = text.find('\n').map_or(1, |k| text[..k].chars().count() + 1);
        return Err(ParseError::syntax(1, col, "expression must fit on one line"));
    }
    let code = strip_comment(text);
    let toks = tokenize(1, code)?;
    parse_expr_tokens(&toks, 1, code.chars().count() + 1, ring)
}

/// Parses a whole `.protocol` document.
pub fn parse_protocol(text: &str) -> Result<Protocol, ParseError> {
    let mut ring: Option<Ring> = None;
    let mut polys: Vec<Option<Polynomial>> = Vec::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let code = strip_comment(raw);
        let toks = tokenize(line, code)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = code.chars().count() + 1;
        match &ring {
            None => {
                match &toks[0].0 {
                    Tok::Ident(kw) if kw == "vars" => {}
                    _ => return Err(ParseError::syntax(line, toks[0].1, "expected `vars` declaration first")),
                }
                let mut names: Vec<String> = Vec::new();
                for (t, col) in &toks[1..] {
                    match t {
                        Tok::Ident(n) if n == "vars" => {
                            return Err(ParseError::syntax(line, *col, "`vars` is reserved"));
                        }
                        Tok::Ident(n) if names.contains(n) => {
                            return Err(ParseError::syntax(line, *col, format!("variable `{n}` declared twice")));
                        }
                        Tok::Ident(n) => names.push(n.clone()),
                        other => {
                            return Err(ParseError::syntax(
                                line,
                                *col,
                                format!("expected a variable name, found {}", other.describe()),
                            ));
                        }
                    }
                }
                if names.is_empty() {
                    return Err(ParseError::syntax(line, end_col, "`vars` needs at least one name"));
                }
                polys = vec![None; names.len()];
                ring = Some(Ring::new(names));
            }
            Some(r) => {
                let (head, col) = &toks[0];
                let index = match head {
                    Tok::Ident(name) if name == "vars" => {
                        return Err(ParseError::syntax(line, *col, "`vars` declared twice"));
                    }
                    Tok::Ident(name) => definition_index(name),
                    _ => None,
                };
                let Some(i) = index else {
                    return Err(ParseError::syntax(line, *col, format!("expected `f<i> =`, found {}", head.describe())));
                };
                if i == 0 || i > polys.len() {
                    return Err(ParseError::syntax(
                        line,
                        *col,
                        format!("f{i} out of range 1..={}", polys.len()),
                    ));
                }
                if polys[i - 1].is_some() {
                    return Err(ParseError::new(line, *col, ParseErrorKind::DuplicateDefinition(i)));
                }
                match toks.get(1) {
                    Some((Tok::Eq, _)) => {}
                    Some((t, c)) => {
                        return Err(ParseError::syntax(line, *c, format!("expected `=`, found {}", t.describe())));
                    }
                    None => return Err(ParseError::syntax(line, end_col, "expected `=`")),
                }
                polys[i - 1] = Some(parse_expr_tokens(&toks[2..], line, end_col, r)?);
            }
        }
    }
    let Some(ring) = ring else {
        return Err(ParseError::syntax(last_line.max(1), 1, "missing `vars` declaration"));
    };
    let mut out = Vec::with_capacity(polys.len());
    for (i, p) in polys.into_iter().enumerate() {
        match p {
            Some(p) => out.push(p),
            None => {
                return Err(ParseError::new(last_line + 1, 1, ParseErrorKind::MissingDefinition(i + 1)));
            }
        }
    }
    Ok(Protocol::new(ring, out).expect("one polynomial per declared variable"))
}

/// `f12` → 12; anything else → None.
fn definition_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('f')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// Canonical text: terms in descending lex order, reduced fractions.
pub fn format_protocol(p: &Protocol) -> String {
    let mut out = String::from("vars");
    for name in p.ring().names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for (i, f) in p.polys().iter().enumerate() {
        out.push_str(&format!("f{} = {f}\n", i + 1));
    }
    out
}

/// Writes `t,x1,...,xN` rows with 17 significant digits and a closing
/// `# outcome: ...` comment.
pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, mut sink: W) -> io::Result<()> {
    write!(sink, "t")?;
    for name in &tr.names {
        write!(sink, ",{name}")?;
    }
    writeln!(sink)?;
    for (t, x) in tr.times.iter().zip(&tr.states) {
        write!(sink, "{t:.16e}")?;
        for v in x {
            write!(sink, ",{v:.16e}")?;
        }
        writeln!(sink)?;
    }
    writeln!(sink, "# outcome: {}", tr.outcome)?;
    sink.flush()
}
