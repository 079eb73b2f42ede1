//! A small language for complex scalar fields of `(t, x, y, z)`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! atom   := number | 'i' | 't' | 'x' | 'y' | 'z' | 'conj' '(' expr ')' | '(' expr ')'
//! exponent := ['+' | '-'] integer | '(' ['+' | '-'] integer ')'      |n| <= 16
//! ```
//!
//! Evaluation goes through [`Jet2`], so every parsed expression comes with
//! exact first and second derivatives.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub use crate::jet::Jet2;

pub const MAX_EXPONENT: i32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    T,
    X,
    Y,
    Z,
}

impl Coord {
    pub fn axis(self) -> usize {
        match self {
            Coord::T => 0,
            Coord::X => 1,
            Coord::Y => 2,
            Coord::Z => 3,
        }
    }

    fn name(self) -> &'static str {
        ["t", "x", "y", "z"][self.axis()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Real(f64),
    /// The imaginary unit.
    I,
    Var(Coord),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Conj(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        /// 1-based byte offset of the offending token.
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("evaluation failed at (t, x, y, z) = {point:?}: {reason}")]
pub struct EvalError {
    pub point: [f64; 4],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number `{v}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

/// Tokens paired with their 0-based byte offsets.
fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start + 1,
                    expected: "a number".into(),
                    found: format!("`{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start + 1,
                    expected: "an operator, operand or parenthesis".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1 + 1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let n = self.exponent()?;
        if *self.peek() == Tok::Caret {
            return Err(self.error("an operator other than a second `^` (parenthesize chained powers)"));
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1
            }
            Tok::Plus => {
                self.bump();
                1
            }
            _ => 1,
        };
        let what = "an integer exponent with magnitude at most 16";
        let n = match self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= MAX_EXPONENT as f64 => *v as i32 * sign,
            _ => return Err(self.error(what)),
        };
        self.bump();
        if paren {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Real(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "i" => Ok(Expr::I),
                    "t" => Ok(Expr::Var(Coord::T)),
                    "x" => Ok(Expr::Var(Coord::X)),
                    "y" => Ok(Expr::Var(Coord::Y)),
                    "z" => Ok(Expr::Var(Coord::Z)),
                    "conj" => {
                        self.expect(Tok::LParen, "`(` after `conj`")?;
                        let e = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Expr::Conj(Box::new(e)))
                    }
                    _ => Err(ParseError::UnknownIdentifier { offset, name }),
                }
            }
            _ => Err(self.error("an operand")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Real(v) if *v < 0.0 => write!(f, "(-{:?})", -v),
            Expr::Real(v) => write!(f, "{v:?}"),
            Expr::I => f.write_str("i"),
            Expr::Var(c) => f.write_str(c.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(e, n) => write!(f, "({e})^({n})"),
            Expr::Conj(e) => write!(f, "conj({e})"),
        }
    }
}

impl Expr {
    /// Value, gradient and Hessian at the event `p = (t, x, y, z)`.
    pub fn eval_jet(&self, p: &[f64; 4]) -> Result<Jet2, EvalError> {
        let coords = Jet2::coordinates(p);
        self.eval_with(&coords, p)
    }

    fn eval_with(&self, coords: &[Jet2; 4], p: &[f64; 4]) -> Result<Jet2, EvalError> {
        let fail = |reason: &str| EvalError {
            point: *p,
            reason: reason.to_string(),
        };
        let out = match self {
            Expr::Real(v) => Jet2::real(*v),
            Expr::I => Jet2::constant(Complex64::i()),
            Expr::Var(c) => coords[c.axis()],
            Expr::Neg(e) => -e.eval_with(coords, p)?,
            Expr::Add(a, b) => a.eval_with(coords, p)? + b.eval_with(coords, p)?,
            Expr::Sub(a, b) => a.eval_with(coords, p)? - b.eval_with(coords, p)?,
            Expr::Mul(a, b) => a.eval_with(coords, p)? * b.eval_with(coords, p)?,
            Expr::Div(a, b) => {
                let den = b.eval_with(coords, p)?;
                if den.value.norm() == 0.0 {
                    return Err(fail("division by zero"));
                }
                a.eval_with(coords, p)? / den
            }
            Expr::Pow(e, n) => {
                let base = e.eval_with(coords, p)?;
                if *n < 0 && base.value.norm() == 0.0 {
                    return Err(fail("negative power of zero"));
                }
                base.powi(*n)
            }
            Expr::Conj(e) => e.eval_with(coords, p)?.conj(),
        };
        if !out.is_finite() {
            return Err(fail("non-finite intermediate value"));
        }
        Ok(out)
    }
}

pub fn eval_jet(e: &Expr, p: &[f64; 4]) -> Result<Jet2, EvalError> {
    e.eval_jet(p)
}
