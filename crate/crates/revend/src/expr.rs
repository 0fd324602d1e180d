//! Arithmetic expressions in one variable `t` for curve specification files.
//!
//! Grammar (binding, loosest to tightest): `+ -`, `* /`, unary `-`, `^`.
//! `^` is right-associative and binds tighter than unary minus, so
//! `-2^2 = -4` while `2^-2 = 0.25`. Identifiers are the variable `t`, the
//! constants `pi` and `e`, and a fixed set of unary functions.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor (("*" | "/") factor)*
//! factor  := "-" factor | power
//! power   := primary ("^" factor)?
//! primary := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```

use crate::error::{Error, Result};
use std::fmt;

/// Unary functions callable from expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
    Atan,
}

pub const FUNC_NAMES: [(&str, Func); 11] = [
    ("sin", Func::Sin),
    ("cos", Func::Cos),
    ("tan", Func::Tan),
    ("sinh", Func::Sinh),
    ("cosh", Func::Cosh),
    ("tanh", Func::Tanh),
    ("exp", Func::Exp),
    ("log", Func::Log),
    ("sqrt", Func::Sqrt),
    ("abs", Func::Abs),
    ("atan", Func::Atan),
];

impl Func {
    fn name(self) -> &'static str {
        FUNC_NAMES.iter().find(|(_, f)| *f == self).unwrap().0
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Atan => x.atan(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression AST. `Var` is the single variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Pi,
    E,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluate at `t`. Total: out-of-domain inputs yield IEEE NaN/inf,
    /// which downstream validation rejects with context.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Neg(e) => -e.eval(t),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(t), r.eval(t));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(t)),
        }
    }

    /// Binding level for the printer: 1 add/sub, 2 mul/div, 3 neg, 4 pow,
    /// 5 atoms.
    fn level(&self) -> u8 {
        match self {
            Expr::Bin(Op::Add | Op::Sub, ..) => 1,
            Expr::Bin(Op::Mul | Op::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(Op::Pow, ..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(out: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(out, "({e})")
            } else {
                write!(out, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(out, "{v}"),
            Expr::Var => write!(out, "t"),
            Expr::Pi => write!(out, "pi"),
            Expr::E => write!(out, "e"),
            Expr::Neg(e) => {
                write!(out, "-")?;
                paren(out, e, e.level() < 3)
            }
            Expr::Bin(op, l, r) => {
                let (sym, lv) = match op {
                    Op::Add => ("+", 1),
                    Op::Sub => ("-", 1),
                    Op::Mul => ("*", 2),
                    Op::Div => ("/", 2),
                    Op::Pow => ("^", 4),
                };
                if *op == Op::Pow {
                    // Base must be a primary; exponent may be any factor.
                    paren(out, l, l.level() < 5)?;
                    write!(out, "{sym}")?;
                    paren(out, r, r.level() < 3)
                } else {
                    paren(out, l, l.level() < lv)?;
                    write!(out, "{sym}")?;
                    paren(out, r, r.level() <= lv)
                }
            }
            Expr::Call(f, e) => write!(out, "{}({e})", f.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
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
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token with its starting byte offset; None at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok(Some((t, start)));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.') {
                end += 1;
            }
            // Exponent part only if followed by digits (optionally signed).
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut k = end + 1;
                if k < self.src.len() && (self.src[k] == b'+' || self.src[k] == b'-') {
                    k += 1;
                }
                if k < self.src.len() && self.src[k].is_ascii_digit() {
                    while k < self.src.len() && self.src[k].is_ascii_digit() {
                        k += 1;
                    }
                    end = k;
                }
            }
            let text = std::str::from_utf8(&self.src[start..end]).unwrap();
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                offset: start,
                msg: format!("bad number literal `{text}`"),
            })?;
            self.pos = end;
            return Ok(Some((Tok::Num(v), start)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[start..end]).unwrap().to_string();
            self.pos = end;
            return Ok(Some((Tok::Ident(text), start)));
        }
        Err(Error::Parse {
            offset: start,
            msg: format!("unexpected character `{}`", c as char),
        })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map(|(_, o)| *o).unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse { offset: off, msg: format!("expected {what}") }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = match self.peek() {
            Some(Tok::Plus) => Some(Op::Add),
            Some(Tok::Minus) => Some(Op::Sub),
            _ => None,
        } {
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(op) = match self.peek() {
            Some(Tok::Star) => Some(Op::Mul),
            Some(Tok::Slash) => Some(Op::Div),
            _ => None,
        } {
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    let func = FUNC_NAMES
                        .iter()
                        .find(|(n, _)| *n == name)
                        .map(|(_, f)| *f)
                        .ok_or_else(|| Error::Parse {
                            offset: off,
                            msg: format!(
                                "unknown function `{name}`; allowed: {}",
                                FUNC_NAMES.map(|(n, _)| n).join(", ")
                            ),
                        })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    match name.as_str() {
                        "t" => Ok(Expr::Var),
                        "pi" => Ok(Expr::Pi),
                        "e" => Ok(Expr::E),
                        _ => Err(Error::Parse {
                            offset: off,
                            msg: format!("unknown identifier `{name}`; allowed: t, pi, e"),
                        }),
                    }
                }
            }
            _ => Err(Error::Parse { offset: off, msg: "expected a value".into() }),
        }
    }
}

/// Parse an expression; errors carry the byte offset of the offending token.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut lx = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return Err(Error::Parse { offset: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, at: 0, end_offset: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(Error::Parse {
            offset: p.offset(),
            msg: "trailing input after expression".into(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64) -> f64 {
        parse_expr(src).unwrap().eval(t)
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(eval("1+2*3", 0.0), 7.0);
        assert_eq!(eval("(1+2)*3", 0.0), 9.0);
        assert_eq!(eval("2*sin(t)^2", std::f64::consts::FRAC_PI_2), 2.0);
    }

    #[test]
    fn oscillator_first_component() {
        let v = eval("(1-0)*t^2/(t^2+1)+0", 1.0);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(eval("-2^2", 0.0), -4.0);
        assert_eq!(eval("2^-2", 0.0), 0.25);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
    }

    #[test]
    fn constants_and_functions() {
        assert!((eval("cos(pi)", 0.0) + 1.0).abs() < 1e-15);
        assert!((eval("log(e)", 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("sqrt(abs(-9))", 0.0) - 3.0).abs() < 1e-15);
        assert!((eval("atan(1)*4", 0.0) - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(eval("1e-3", 0.0), 1e-3);
        assert_eq!(eval("2.5E2", 0.0), 250.0);
    }

    #[test]
    fn unterminated_call_reports_offset() {
        match parse_expr("sin(") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_lists_alternatives() {
        match parse_expr("2*q") {
            Err(Error::Parse { offset, msg }) => {
                assert_eq!(offset, 2);
                assert!(msg.contains("allowed"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_tokens_rejected() {
        assert!(parse_expr("1+2 3").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn print_parse_round_trip_spotchecks() {
        for src in [
            "-2^2",
            "2^-2",
            "1-(2-3)",
            "1/(2*3)",
            "-(t+1)",
            "(-2)^2",
            "2^(3*2)",
            "sin(t)^2+cos(t)^2",
            "t/2/3",
            "1-2-3",
        ] {
            let ast = parse_expr(src).unwrap();
            let printed = ast.to_string();
            let reparsed = parse_expr(&printed).unwrap();
            assert_eq!(ast, reparsed, "round trip failed: {src} -> {printed}");
        }
    }
}
