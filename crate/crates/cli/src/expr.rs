//! A small arithmetic language for problem data: numbers, the variables
//! x, t, u, the constant pi, + - * / ^, unary minus and the functions
//! sin, cos, exp, sqrt, abs.
//!
//! Precedence from loosest: `+ -`, `* /`, unary minus, `^` (right
//! associative), so `-x^2` is `-(x^2)` and `2^-1` is `0.5`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
    U,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
            Var::U => "u",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdent { offset: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in {expr}")]
    DivisionByZero { expr: String },
    #[error("square root of negative value {value} in {expr}")]
    Domain { expr: String, value: f64 },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn syntax<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.syntax(self.pos, format!("expected '{want}', found '{c}'")),
            None => self.syntax(self.pos, format!("expected '{want}', found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        match self.peek() {
            None => self.syntax(self.pos, "unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let begin = self.pos;
                let rest = &self.src[begin..];
                let len = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len());
                let name = &rest[..len];
                self.pos += len;
                match name {
                    "x" => Ok(Expr::Var(Var::X)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "u" => Ok(Expr::Var(Var::U)),
                    "pi" => Ok(Expr::Pi),
                    _ => match Func::from_name(name) {
                        Some(f) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => Err(ParseError::UnknownIdent {
                            offset: begin,
                            name: name.to_string(),
                        }),
                    },
                }
            }
            Some(c) => self.syntax(start.max(self.pos), format!("unexpected character '{c}'")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let begin = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = begin;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[begin..end];
        self.pos = end;
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            Ok(_) => self.syntax(begin, format!("number {text} is out of range")),
            Err(_) => self.syntax(begin, format!("malformed number {text:?}")),
        }
    }
}

/// Parses a complete expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => p.syntax(p.pos, format!("unexpected '{c}' after expression")),
    }
}

impl Expr {
    pub fn eval(&self, x: f64, t: f64, u: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::U) => u,
            Expr::Neg(e) => -e.eval(x, t, u)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval(x, t, u)?;
                let b = r.eval(x, t, u)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero {
                                expr: self.to_string(),
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, arg) => {
                let v = arg.eval(x, t, u)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Abs => v.abs(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::Domain {
                                expr: self.to_string(),
                                value: v,
                            });
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    /// Whether `var` occurs anywhere in the expression.
    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Call(_, e) => e.mentions(var),
            Expr::Bin(_, l, r) => l.mentions(var) || r.mentions(var),
        }
    }
}

pub fn eval_expr(e: &Expr, x: f64, t: f64, u: f64) -> Result<f64, EvalError> {
    e.eval(x, t, u)
}

/// Fully parenthesized text that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, x: f64, t: f64, u: f64) -> f64 {
        parse_expr(src).unwrap().eval(x, t, u).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2+3*4", 0.0, 0.0, 0.0), 14.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0, 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0, 0.0, 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0, 0.0, 0.0), 0.5);
        assert_eq!(ev("8/4/2", 0.0, 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0, 0.0), -4.0);
        assert_eq!(ev("--3", 0.0, 0.0, 0.0), 3.0);
        assert_eq!(ev("2*-3", 0.0, 0.0, 0.0), -6.0);
    }

    #[test]
    fn spot_values() {
        assert!(ev("sin(pi)", 0.0, 0.0, 0.0).abs() < 1e-15);
        assert_eq!(ev("4*x*(1-x)", 0.5, 0.0, 0.0), 1.0);
        assert_eq!(ev("-u^3", 0.0, 0.0, 2.0), -8.0);
        assert_eq!(ev("x*t", 0.5, 2.0, 0.0), 1.0);
        assert_eq!(ev(" sqrt( abs(-9) ) + exp(0) + cos(0)", 0.0, 0.0, 0.0), 5.0);
        assert_eq!(ev("1.5e2 + .5 + 2E-1", 0.0, 0.0, 0.0), 150.7);
    }

    #[test]
    fn eval_errors() {
        let e = parse_expr("1/x").unwrap();
        assert!(matches!(
            e.eval(0.0, 0.0, 0.0),
            Err(EvalError::DivisionByZero { .. })
        ));
        let e = parse_expr("sqrt(x-1)").unwrap();
        match e.eval(0.0, 0.0, 0.0) {
            Err(EvalError::Domain { expr, value }) => {
                assert_eq!(value, -1.0);
                assert!(expr.contains("sqrt"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(parse_expr("   "), Err(ParseError::Empty));
        assert_eq!(
            parse_expr("2 + y"),
            Err(ParseError::UnknownIdent {
                offset: 4,
                name: "y".into()
            })
        );
        assert!(matches!(
            parse_expr("2 +"),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_expr("(1"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expr("1 2"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expr("1e999"),
            Err(ParseError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expr("sin 2"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("2 $"),
            Err(ParseError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn mentions() {
        let e = parse_expr("x + sin(u*t)").unwrap();
        assert!(e.mentions(Var::X) && e.mentions(Var::T) && e.mentions(Var::U));
        assert!(!parse_expr("pi*x").unwrap().mentions(Var::U));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..10.0).prop_map(Expr::Num),
            Just(Expr::Pi),
            Just(Expr::Var(Var::X)),
            Just(Expr::Var(Var::T)),
            Just(Expr::Var(Var::U)),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
                (
                    prop_oneof![
                        Just(Func::Sin),
                        Just(Func::Cos),
                        Just(Func::Exp),
                        Just(Func::Sqrt),
                        Just(Func::Abs)
                    ],
                    inner
                )
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    fn same(a: &Result<f64, EvalError>, b: &Result<f64, EvalError>) -> bool {
        match (a, b) {
            (Ok(x), Ok(y)) => {
                x == y || (x.is_nan() && y.is_nan()) || (x - y).abs() <= 1e-15 * x.abs().max(1.0)
            }
            (Err(_), Err(_)) => true,
            _ => false,
        }
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(), envs in prop::collection::vec((-3.0f64..3.0, 0.0f64..2.0, -3.0f64..3.0), 100)) {
            let text = e.to_string();
            let back = parse_expr(&text).unwrap();
            prop_assert_eq!(&back, &e);
            for (x, t, u) in envs {
                prop_assert!(same(&e.eval(x, t, u), &back.eval(x, t, u)));
            }
        }
    }
}
