//! Series expressions: a small recursive-descent parser and its printer.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' uint)?
//! atom  := uint ('/' uint)? | 'i' | var | '(' expr ')'
//! var   := ('z' | 'w' | 'zeta' | 'xi') index      (1-based)
//! ```

use std::fmt;

use cr_constancy::{FrameKind, GaussianRational, TruncatedSeries, Variable, VariableFrame};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

/// Largest exponent accepted after `^`.
pub const MAX_POWER: u32 = 1000;

// Working precision while parsing: large enough that nothing is truncated,
// so the degree check sees the exact polynomial.
const EXACT: usize = usize::MAX / 2;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at position {position}")]
    UnknownVariable { position: usize, name: String },
    #[error("variable '{name}' at position {position} is not allowed in frame {frame}")]
    FrameConflict {
        position: usize,
        name: String,
        frame: FrameKindName,
    },
    #[error("degree {degree} is not below the precision order {precision}")]
    DegreeTooHigh { degree: u32, precision: usize },
}

/// Display wrapper for frame kinds in messages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameKindName(pub FrameKind);

impl fmt::Display for FrameKindName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(frame_kind_name(self.0))
    }
}

pub fn frame_kind_name(kind: FrameKind) -> &'static str {
    match kind {
        FrameKind::T => "T",
        FrameKind::Tau => "TAU",
        FrameKind::Intrinsic => "INTRINSIC",
        FrameKind::Full => "FULL",
    }
}

/// How the parsed polynomial is turned into a series of order `precision`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    pub m: usize,
    pub d: usize,
    pub precision: usize,
    /// Forces the frame instead of inferring it from the variables used.
    pub frame: Option<FrameKind>,
    /// Drops terms of degree ≥ precision instead of rejecting them.
    pub truncate: bool,
}

impl ParseOptions {
    pub fn new(m: usize, d: usize, precision: usize) -> Self {
        Self {
            m,
            d,
            precision,
            frame: None,
            truncate: false,
        }
    }

    pub fn in_frame(self, kind: FrameKind) -> Self {
        Self {
            frame: Some(kind),
            ..self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
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
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

/// Positions are 1-based character columns.
fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => return Err(syntax(pos, "decimal numbers are not accepted; write p/q")),
            other => return Err(syntax(pos, format!("unexpected character '{other}'"))),
        };
        out.push((pos, tok));
        i += 1;
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

fn parse_variable(name: &str, m: usize, d: usize) -> Option<Variable> {
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (head, digits) = name.split_at(split);
    if digits.starts_with('0') {
        return None;
    }
    let k: usize = digits.parse().ok()?;
    let (make, bound): (fn(usize) -> Variable, usize) = match head {
        "z" => (Variable::Z, m),
        "w" => (Variable::W, d),
        "zeta" => (Variable::Zeta, m),
        "xi" => (Variable::Xi, d),
        _ => return None,
    };
    (1..=bound).contains(&k).then(|| make(k - 1))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    frame: VariableFrame,
    used: Vec<(usize, Variable)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn constant(&self, c: GaussianRational) -> TruncatedSeries {
        TruncatedSeries::constant(self.frame, c, EXACT).expect("positive precision")
    }

    fn expr(&mut self) -> Result<TruncatedSeries, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?).expect("same frame");
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?).expect("same frame");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TruncatedSeries, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.unary()?).expect("same frame");
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<TruncatedSeries, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<TruncatedSeries, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (pos, tok) = self.bump();
        let Tok::Int(n) = tok else {
            return Err(syntax(
                pos,
                format!("expected a nonnegative integer exponent, found {tok}"),
            ));
        };
        let e = u32::try_from(&n)
            .ok()
            .filter(|e| *e <= MAX_POWER)
            .ok_or_else(|| syntax(pos, format!("exponent {n} exceeds the limit {MAX_POWER}")))?;
        Ok(base.pow(e).expect("exact precision"))
    }

    fn atom(&mut self) -> Result<TruncatedSeries, ParseError> {
        let (pos, tok) = self.bump();
        match tok {
            Tok::Int(num) => {
                let mut value = BigRational::from_integer(num);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let (dpos, dtok) = self.bump();
                    let Tok::Int(den) = dtok else {
                        return Err(syntax(
                            dpos,
                            format!("expected a denominator, found {dtok}"),
                        ));
                    };
                    if den.is_zero() {
                        return Err(syntax(dpos, "zero denominator"));
                    }
                    value /= BigRational::from_integer(den);
                }
                Ok(self.constant(GaussianRational::from_real(value)))
            }
            Tok::Ident(name) if name == "i" => Ok(self.constant(GaussianRational::i())),
            Tok::Ident(name) => {
                let v = parse_variable(&name, self.frame.m(), self.frame.d()).ok_or(
                    ParseError::UnknownVariable {
                        position: pos,
                        name,
                    },
                )?;
                self.used.push((pos, v));
                Ok(TruncatedSeries::var(self.frame, v, EXACT).expect("variable in full frame"))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (cpos, close) = self.bump();
                if close != Tok::RParen {
                    return Err(syntax(cpos, format!("expected ')', found {close}")));
                }
                Ok(inner)
            }
            other => Err(syntax(
                pos,
                format!("expected a number, 'i', a variable or '(', found {other}"),
            )),
        }
    }
}

fn infer_kind(used: &[(usize, Variable)]) -> FrameKind {
    let has = |p: fn(&Variable) -> bool| used.iter().any(|(_, v)| p(v));
    let holo = has(|v| matches!(v, Variable::Z(_) | Variable::W(_)));
    let zeta = has(|v| matches!(v, Variable::Zeta(_)));
    let xi = has(|v| matches!(v, Variable::Xi(_)));
    match (holo, zeta, xi) {
        (_, _, true) if holo => FrameKind::Full,
        (false, _, true) | (false, true, false) => FrameKind::Tau,
        (true, true, false) => FrameKind::Intrinsic,
        _ => FrameKind::T,
    }
}

/// Parses `text` into a series of order `opts.precision`.
pub fn parse_expression(text: &str, opts: ParseOptions) -> Result<TruncatedSeries, ParseError> {
    let toks = tokenize(text)?;
    let full = VariableFrame::full(opts.m, opts.d);
    let mut p = Parser {
        toks,
        at: 0,
        frame: full,
        used: Vec::new(),
    };
    let value = p.expr()?;
    if *p.peek() != Tok::End {
        let hint = if matches!(p.peek(), Tok::Ident(_) | Tok::Int(_) | Tok::LParen) {
            " (implicit multiplication is not allowed; use '*')"
        } else {
            ""
        };
        return Err(syntax(p.pos(), format!("unexpected {}{hint}", p.peek())));
    }
    let kind = opts.frame.unwrap_or_else(|| infer_kind(&p.used));
    let target = VariableFrame::new(kind, opts.m, opts.d);
    if let Some((position, v)) = p.used.iter().find(|(_, v)| target.index_of(*v).is_none()) {
        return Err(ParseError::FrameConflict {
            position: *position,
            name: v.to_string(),
            frame: FrameKindName(kind),
        });
    }
    let value = value
        .reframe(target)
        .expect("variables checked against the target frame");
    if !opts.truncate {
        if let Some(degree) = value
            .max_degree()
            .filter(|deg| *deg as usize >= opts.precision)
        {
            return Err(ParseError::DegreeTooHigh {
                degree,
                precision: opts.precision,
            });
        }
    }
    Ok(shrink(value, opts.precision))
}

fn shrink(s: TruncatedSeries, precision: usize) -> TruncatedSeries {
    s.truncate(precision).expect("positive precision")
}

/// The canonical textual form; it parses back to the same series.
pub fn print_series(s: &TruncatedSeries) -> String {
    s.to_string()
}

/// `p/q` with the denominator always written.
pub fn rational_pair(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `re + im i` with explicit denominators, e.g. `5/1 + 0/1i`.
pub fn complex_pair(c: &GaussianRational) -> String {
    let im = c.im();
    let sign = if im < &BigRational::zero() { "-" } else { "+" };
    let mag = if im < &BigRational::zero() {
        -im.clone()
    } else {
        im.clone()
    };
    format!("{} {sign} {}i", rational_pair(c.re()), rational_pair(&mag))
}
