//! Equation language.
//!
//! ```text
//! equation := expr ( "=" expr )?
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := "-" factor | atom ("^" exponent)?
//! atom     := rational | "q" | "x" | yref | "(" expr ")"
//! yref     := "y" "(" shiftarg ")" | "y" | "y" digits
//! shiftarg := "x" | "q" ("^" integer)? "*" "x"
//! exponent := integer | "(" "-"? rational ")"
//! rational := integer ("/" positive-integer)?
//! ```
//!
//! `y` is `y(x)`, `y(q^j*x)` and `yj` are `σʲy`. An equation `lhs = rhs`
//! means `lhs − rhs`. Division is only by `y`-free monomials such as `2`,
//! `x^3` or `(q - 1)`; fractional exponents only apply to monomials like
//! `x`, `q` or `q^2*x`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::rational::Rational;
use crate::field::KScalar;
use crate::qdiff::{MultiIndex, QDiffPolynomial, TermKey};

pub const MAX_DEPTH: usize = 512;
/// Largest term count of any intermediate polynomial.
pub const MAX_TERMS: usize = 20_000;
/// Largest monomial count of a coefficient.
pub const MAX_COEFF_SIZE: usize = 1024;
/// Largest integer power of a polynomial with more than one term.
pub const MAX_POWER: u64 = 1024;
/// Largest shift index and `y` degree.
pub const MAX_SHIFT: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("unsupported exponent at {pos}: {msg}")]
    UnsupportedExponent { pos: Pos, msg: String },
    #[error("unsupported division at {pos}: {msg}")]
    UnsupportedDivision { pos: Pos, msg: String },
    #[error("expression nested deeper than {MAX_DEPTH} at {pos}")]
    TooDeep { pos: Pos },
    #[error("expression too large at {pos}: {msg}")]
    TooLarge { pos: Pos, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Q,
    X,
    /// `σʲy`.
    Y(usize),
    /// `first ± rest…`; `true` marks subtraction.
    Sum(Box<Expr>, Vec<(bool, Expr)>),
    /// `first (*|/) rest…`; `true` marks division.
    Product(Box<Expr>, Vec<(bool, Expr, Pos)>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Rational, Pos),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Q,
    X,
    Y,
    /// `y` immediately followed by digits.
    YIndex(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number {n}"),
        Tok::Q => "'q'".into(),
        Tok::X => "'x'".into(),
        Tok::Y => "'y'".into(),
        Tok::YIndex(j) => format!("'y{j}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Eq => "'='".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, col };
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            'q' => Some(Tok::Q),
            'x' => Some(Tok::X),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if ch == 'y' {
            i += 1;
            col += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i == start {
                out.push((Tok::Y, pos));
            } else {
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let j = s
                    .parse::<u64>()
                    .ok()
                    .filter(|&j| j <= MAX_SHIFT)
                    .ok_or_else(|| ParseError::TooLarge {
                        pos,
                        msg: format!("shift index {s} exceeds {MAX_SHIFT}"),
                    })?;
                out.push((Tok::YIndex(j), pos));
            }
            continue;
        }
        return Err(ParseError::Syntax {
            pos,
            msg: format!("unexpected character {ch:?}"),
        });
    }
    out.push((Tok::End, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<Pos, ParseError> {
        let pos = self.pos();
        if self.eat(t) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("expected {}", describe(t))))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("{what}, found {}", describe(self.peek())),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { pos: self.pos() });
        }
        Ok(())
    }

    fn equation(&mut self) -> Result<Equation, ParseError> {
        let lhs = self.expr()?;
        let rhs = if self.eat(&Tok::Eq) {
            Some(self.expr()?)
        } else {
            None
        };
        if *self.peek() != Tok::End {
            return Err(self.unexpected("expected an operator or end of input"));
        }
        Ok(Equation { lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let first = self.term()?;
        let mut rest = Vec::new();
        loop {
            if self.eat(&Tok::Plus) {
                rest.push((false, self.term()?));
            } else if self.eat(&Tok::Minus) {
                rest.push((true, self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(if rest.is_empty() {
            first
        } else {
            Expr::Sum(Box::new(first), rest)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let first = self.factor()?;
        let mut rest = Vec::new();
        while matches!(self.peek(), Tok::Star | Tok::Slash) {
            let (op, pos) = self.bump();
            rest.push((op == Tok::Slash, self.factor()?, pos));
        }
        Ok(if rest.is_empty() {
            first
        } else {
            Expr::Product(Box::new(first), rest)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            self.enter()?;
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let atom_pos = self.pos();
        let is_y = matches!(self.peek(), Tok::Y | Tok::YIndex(_));
        let atom = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(atom);
        }
        let (_, caret) = self.bump();
        let e = self.exponent()?;
        if is_y && (!e.is_integer() || e.is_negative()) {
            return Err(ParseError::UnsupportedExponent {
                pos: atom_pos,
                msg: format!("y can only be raised to nonnegative integer powers, not {e}"),
            });
        }
        Ok(Expr::Pow(Box::new(atom), e, caret))
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Rational::from_integer(n))
            }
            Tok::LParen => {
                self.bump();
                let neg = self.eat(&Tok::Minus);
                let r = self.rational()?;
                self.expect(&Tok::RParen)?;
                Ok(if neg { -r } else { r })
            }
            _ => Err(self.unexpected("expected an exponent")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("expected an integer")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let n = self.integer()?;
        if self.eat(&Tok::Slash) {
            let pos = self.pos();
            let d = self.integer()?;
            if d.is_zero() {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "zero denominator".into(),
                });
            }
            Ok(Rational::new(n, d))
        } else {
            Ok(Rational::from_integer(n))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr::Num(Rational::from_integer(n))),
            Tok::Q => Ok(Expr::Q),
            Tok::X => Ok(Expr::X),
            Tok::YIndex(j) => Ok(Expr::Y(j as usize)),
            Tok::Y => {
                if self.eat(&Tok::LParen) {
                    let j = self.shiftarg()?;
                    self.expect(&Tok::RParen)?;
                    Ok(Expr::Y(j))
                } else {
                    Ok(Expr::Y(0))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            other => {
                self.at -= usize::from(other != Tok::End);
                Err(ParseError::Syntax {
                    pos,
                    msg: format!(
                        "expected a number, q, x, y or '(', found {}",
                        describe(&other)
                    ),
                })
            }
        }
    }

    fn shiftarg(&mut self) -> Result<usize, ParseError> {
        if self.eat(&Tok::X) {
            return Ok(0);
        }
        if !self.eat(&Tok::Q) {
            return Err(self.unexpected("expected x or q^j*x as the argument of y"));
        }
        let mut j = 1u64;
        if self.eat(&Tok::Caret) {
            let pos = self.pos();
            let n = self.integer()?;
            j = n
                .to_u64()
                .filter(|&j| j <= MAX_SHIFT)
                .ok_or_else(|| ParseError::TooLarge {
                    pos,
                    msg: format!("shift index {n} exceeds {MAX_SHIFT}"),
                })?;
        }
        self.expect(&Tok::Star)?;
        self.expect(&Tok::X)?;
        Ok(j as usize)
    }
}

/// Stack for recursive descent over [`MAX_DEPTH`] levels, unoptimized
/// builds included.
const PARSE_STACK: usize = 256 << 20;

fn with_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(PARSE_STACK)
            .spawn_scoped(s, f)
            .expect("spawn parser thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Parses an equation into its syntax tree.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    with_stack(|| parse_equation_inner(text))
}

fn parse_equation_inner(text: &str) -> Result<Equation, ParseError> {
    let toks = lex(text)?;
    if toks.len() == 1 {
        return Err(ParseError::Syntax {
            pos: toks[0].1,
            msg: "empty equation".into(),
        });
    }
    Parser {
        toks,
        at: 0,
        depth: 0,
    }
    .equation()
}

type Poly = QDiffPolynomial<KScalar>;

fn too_large(pos: Pos, n: usize) -> ParseError {
    ParseError::TooLarge {
        pos,
        msg: format!("intermediate result would have about {n} terms (limit {MAX_TERMS})"),
    }
}

fn coeff_size(p: &Poly) -> usize {
    p.terms().map(|(_, c)| c.size()).max().unwrap_or(0)
}

fn checked_mul(a: &Poly, b: &Poly, pos: Pos) -> Result<Poly, ParseError> {
    let n = a.len().saturating_mul(b.len());
    if n > MAX_TERMS {
        return Err(too_large(pos, n));
    }
    let c = coeff_size(a).saturating_mul(coeff_size(b));
    if c > MAX_COEFF_SIZE * 8 {
        return Err(ParseError::TooLarge {
            pos,
            msg: format!("coefficients would have about {c} monomials"),
        });
    }
    Ok(a.mul(b))
}

/// The single term of `p`, if `p` is a nonzero monomial.
fn single_term(p: &Poly) -> Option<(&TermKey, &KScalar)> {
    let mut it = p.terms();
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

fn power(base: &Poly, e: &Rational, pos: Pos) -> Result<Poly, ParseError> {
    if let Some((key, c)) = single_term(base) {
        return monomial_power(key, c, e, pos);
    }
    if base.is_zero() {
        return if e.is_positive() {
            Ok(Poly::zero())
        } else if e.is_zero() {
            Ok(Poly::x_monomial(KScalar::one(), Rational::zero()))
        } else {
            Err(ParseError::UnsupportedExponent {
                pos,
                msg: "negative power of zero".into(),
            })
        };
    }
    if !e.is_integer() || e.is_negative() {
        return Err(ParseError::UnsupportedExponent {
            pos,
            msg: format!("a sum can only be raised to nonnegative integer powers, not {e}"),
        });
    }
    let n = e
        .to_integer()
        .to_u64()
        .filter(|&n| n <= MAX_POWER)
        .ok_or_else(|| ParseError::TooLarge {
            pos,
            msg: format!("power {e} of a sum exceeds {MAX_POWER}"),
        })?;
    let mut acc = Poly::x_monomial(KScalar::one(), Rational::zero());
    for _ in 0..n {
        acc = checked_mul(&acc, base, pos)?;
    }
    Ok(acc)
}

fn monomial_power(key: &TermKey, c: &KScalar, e: &Rational, pos: Pos) -> Result<Poly, ParseError> {
    let unsupported = |msg: String| ParseError::UnsupportedExponent { pos, msg };
    if key.height() > 0 && (!e.is_integer() || e.is_negative()) {
        return Err(unsupported(format!(
            "y can only be raised to nonnegative integer powers, not {e}"
        )));
    }
    let coeff = if e.is_integer() {
        let n = e
            .to_integer()
            .to_i32()
            .ok_or_else(|| ParseError::TooLarge {
                pos,
                msg: format!("exponent {e} is too large"),
            })?;
        if n < 0 && c.is_zero() {
            return Err(unsupported("negative power of zero".into()));
        }
        if c.as_monomial().is_none()
            && (c.size() as u64).saturating_mul(u64::from(n.unsigned_abs())) > MAX_COEFF_SIZE as u64
        {
            return Err(ParseError::TooLarge {
                pos,
                msg: format!("power {n} of {c} is too large"),
            });
        }
        c.pow(n)
            .map_err(|_| unsupported("negative power of zero".into()))?
    } else {
        let (_, qe) = c
            .as_monomial()
            .filter(|(r, _)| r.is_one())
            .ok_or_else(|| unsupported(format!("fractional power {e} of {c}")))?;
        KScalar::qpow(&(qe * e))
    };
    let entries: Vec<u32> = key.mi.entries().to_vec();
    let n = e.to_integer();
    let mut scaled = Vec::with_capacity(entries.len());
    for t in entries {
        let v = BigInt::from(t) * &n;
        let v = v
            .to_u32()
            .filter(|&v| u64::from(v) <= MAX_SHIFT)
            .ok_or_else(|| ParseError::TooLarge {
                pos,
                msg: format!("y degree {v} exceeds {MAX_SHIFT}"),
            })?;
        scaled.push(v);
    }
    Ok(Poly::from_terms([(
        &key.xexp * e,
        MultiIndex::new(scaled),
        coeff,
    )]))
}

fn divide(num: &Poly, den: &Poly, pos: Pos) -> Result<Poly, ParseError> {
    let unsupported = |msg: &str| ParseError::UnsupportedDivision {
        pos,
        msg: msg.into(),
    };
    let (key, c) = single_term(den).ok_or_else(|| {
        unsupported(if den.is_zero() {
            "division by zero"
        } else {
            "the divisor must be a single y-free term"
        })
    })?;
    if key.height() > 0 {
        return Err(unsupported("the divisor must not contain y"));
    }
    let inv = c.inv().map_err(|_| unsupported("division by zero"))?;
    Ok(num.shift_x(&-key.xexp.clone()).scale(&inv))
}

fn lower_expr(e: &Expr) -> Result<Poly, ParseError> {
    let one = |c: KScalar, a: Rational| Poly::x_monomial(c, a);
    Ok(match e {
        Expr::Num(r) => one(KScalar::from_rational(r.clone()), Rational::zero()),
        Expr::Q => one(KScalar::q(), Rational::zero()),
        Expr::X => one(KScalar::one(), Rational::one()),
        Expr::Y(j) => Poly::shifted_y(*j),
        Expr::Sum(first, rest) => {
            let mut acc = lower_expr(first)?;
            for (minus, e) in rest {
                let t = lower_expr(e)?;
                acc = if *minus { acc.sub(&t) } else { acc.add(&t) };
            }
            acc
        }
        Expr::Product(first, rest) => {
            let mut acc = lower_expr(first)?;
            for (div, e, pos) in rest {
                let t = lower_expr(e)?;
                acc = if *div {
                    divide(&acc, &t, *pos)?
                } else {
                    checked_mul(&acc, &t, *pos)?
                };
            }
            acc
        }
        Expr::Neg(a) => lower_expr(a)?.neg(),
        Expr::Pow(a, r, pos) => power(&lower_expr(a)?, r, *pos)?,
    })
}

/// Expands an equation into canonical form `lhs − rhs`.
pub fn lower(eq: &Equation) -> Result<Poly, ParseError> {
    with_stack(|| lower_inner(eq))
}

fn lower_inner(eq: &Equation) -> Result<Poly, ParseError> {
    let lhs = lower_expr(&eq.lhs)?;
    Ok(match &eq.rhs {
        Some(r) => lhs.sub(&lower_expr(r)?),
        None => lhs,
    })
}

/// [`parse_equation`] followed by [`lower`].
pub fn parse_polynomial(text: &str) -> Result<Poly, ParseError> {
    with_stack(|| lower_inner(&parse_equation_inner(text)?))
}

/// Parses a `y`-free expression in `q` and `x` as a finite series.
pub fn parse_series(text: &str) -> Result<crate::qdiff::PuiseuxSeries<KScalar>, ParseError> {
    let p = parse_polynomial(text)?;
    if p.has_y() {
        return Err(ParseError::Syntax {
            pos: Pos { line: 1, col: 1 },
            msg: "a series must not contain y".into(),
        });
    }
    Ok(crate::qdiff::PuiseuxSeries::new(
        p.terms().map(|(k, c)| (k.xexp.clone(), c.clone())),
        None,
    ))
}

/// Parses a coefficient such as `(2*q^(3/2) - 1)/(q - 1)`.
pub fn parse_scalar(text: &str) -> Result<KScalar, ParseError> {
    let p = parse_polynomial(text)?;
    let pos = Pos { line: 1, col: 1 };
    match single_term(&p) {
        None if p.is_zero() => Ok(KScalar::zero()),
        Some((k, c)) if k.height() == 0 && k.xexp.is_zero() => Ok(c.clone()),
        _ => Err(ParseError::Syntax {
            pos,
            msg: "expected an expression in q only".into(),
        }),
    }
}
