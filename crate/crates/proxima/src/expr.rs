//! Arithmetic expressions for proximity functions and point maps.
//!
//! Expressions are plain text over real literals, variables, unary minus,
//! `abs`, two-argument `min`/`max`, and the binary operators `+ - * / ^`.
//! Precedence, tightest first: unary minus, `^` (right-associative),
//! `* /`, `+ -`. There is no implicit multiplication: `2a1` is a syntax
//! error.
//!
//! The variable contract is positional: `a1..ak` name the coordinates of
//! the first argument and `b1..bk` those of the second. Binding an
//! expression to a dimension checks every variable up front, so evaluation
//! itself can only fail on arithmetic (division by zero, `0^negative`,
//! non-finite intermediates).
//!
//! Parsed expressions are immutable and evaluation is pure, so they can be
//! shared freely across threads.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Binary operators, in source syntax `+ - * / ^`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    /// Binding strength; unary minus sits above all of these.
    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        }
    }
}

/// Abstract syntax tree of an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Exact set of variable names appearing in the tree.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(x) | Expr::Abs(x) => x.collect_vars(out),
            Expr::Min(x, y) | Expr::Max(x, y) | Expr::Bin(_, x, y) => {
                x.collect_vars(out);
                y.collect_vars(out);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.prec(),
            Expr::Neg(_) => 4,
            _ => 5,
        }
    }
}

/// Pretty printer. The output re-parses to a structurally identical tree:
/// same-precedence right operands of `+ - * /` and left operands of `^`
/// are parenthesised to pin associativity, and arguments of unary minus
/// are parenthesised whenever they bind looser than the minus itself.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Neg(x) => {
                if x.prec() < 4 {
                    write!(f, "-({x})")
                } else {
                    write!(f, "-{x}")
                }
            }
            Expr::Abs(x) => write!(f, "abs({x})"),
            Expr::Min(x, y) => write!(f, "min({x}, {y})"),
            Expr::Max(x, y) => write!(f, "max({x}, {y})"),
            Expr::Bin(op, l, r) => {
                let p = op.prec();
                if *op == BinOp::Pow {
                    // right-associative: parenthesise an equally tight left side
                    if l.prec() <= p {
                        write!(f, "({l})")?;
                    } else {
                        write!(f, "{l}")?;
                    }
                    write!(f, "^")?;
                    if r.prec() < p {
                        write!(f, "({r})")
                    } else {
                        write!(f, "{r}")
                    }
                } else {
                    if l.prec() < p {
                        write!(f, "({l})")?;
                    } else {
                        write!(f, "{l}")?;
                    }
                    write!(f, " {} ", op.symbol())?;
                    if r.prec() <= p {
                        write!(f, "({r})")
                    } else {
                        write!(f, "{r}")
                    }
                }
            }
        }
    }
}

/// Syntax error with the byte offset of the offending character.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
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
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b',' => {
                    lx.pos += 1;
                    Tok::Comma
                }
                b'0'..=b'9' => lx.number(start)?,
                c if c.is_ascii_alphabetic() || c == b'_' => lx.ident(start),
                c => return err(start, format!("unexpected character '{}'", c as char)),
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                return err(self.pos, "expected digit after decimal point");
            }
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                // not an exponent after all ("2e" would otherwise eat the 'e')
                self.pos = mark;
            } else {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        // a literal directly followed by an identifier is implicit
        // multiplication, which the grammar rejects
        if self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            return err(self.pos, "number may not be directly followed by a name");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Tok::Num(v)),
            _ => err(start, format!("invalid numeric literal '{text}'")),
        }
    }

    fn ident(&mut self, start: usize) -> Tok {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .to_string(),
        )
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.offset(), format!("expected {what}"))
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.multiplicative()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.power()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.power()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            Ok(Expr::Neg(Box::new(inner)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.additive()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    match name.as_str() {
                        "abs" => {
                            let x = self.additive()?;
                            self.expect(Tok::RParen, "')'")?;
                            Ok(Expr::Abs(Box::new(x)))
                        }
                        "min" | "max" => {
                            let x = self.additive()?;
                            self.expect(Tok::Comma, "','")?;
                            let y = self.additive()?;
                            self.expect(Tok::RParen, "')'")?;
                            if name == "min" {
                                Ok(Expr::Min(Box::new(x), Box::new(y)))
                            } else {
                                Ok(Expr::Max(Box::new(x), Box::new(y)))
                            }
                        }
                        other => err(at, format!("unknown function name '{other}'")),
                    }
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(_) => err(at, "expected a number, variable, function or '('"),
            None => err(at, "unexpected end of expression"),
        }
    }
}

/// Parse source text into an [`Expr`]. Trailing input is rejected.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return err(0, "empty expression");
    }
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let expr = p.additive()?;
    if p.pos < p.toks.len() {
        return err(p.offset(), "trailing input after expression");
    }
    Ok(expr)
}

/// Variable binding failure, reported when an expression is attached to an
/// instance of a given dimension.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum BindError {
    #[error("unbound variable '{name}': expected {expected} for dimension {dim}")]
    UnknownVariable {
        name: String,
        expected: String,
        dim: usize,
    },
}

/// Arithmetic failure during evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("non-finite result in '{0}'")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone)]
enum Code {
    Num(f64),
    ArgA(usize),
    ArgB(usize),
    Neg(Box<Code>),
    Abs(Box<Code>),
    Min(Box<Code>, Box<Code>),
    Max(Box<Code>, Box<Code>),
    Bin(BinOp, Box<Code>, Box<Code>),
}

impl Code {
    fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
        match self {
            Code::Num(v) => Ok(*v),
            Code::ArgA(i) => Ok(a[*i]),
            Code::ArgB(i) => Ok(b[*i]),
            Code::Neg(x) => Ok(-x.eval(a, b)?),
            Code::Abs(x) => Ok(x.eval(a, b)?.abs()),
            Code::Min(x, y) => Ok(f64::min(x.eval(a, b)?, y.eval(a, b)?)),
            Code::Max(x, y) => Ok(f64::max(x.eval(a, b)?, y.eval(a, b)?)),
            Code::Bin(op, x, y) => {
                let l = x.eval(a, b)?;
                let r = y.eval(a, b)?;
                let v = match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        if l == 0.0 && r < 0.0 {
                            return Err(EvalError::ZeroToNegativePower);
                        }
                        l.powf(r)
                    }
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite(op.symbol()))
                }
            }
        }
    }
}

/// Which argument slots an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgSpec {
    /// `a1..ak` only — point maps and guards.
    Single,
    /// `a1..ak` and `b1..bk` — proximity functions.
    Pair,
}

/// An [`Expr`] bound to a fixed dimension, with variables resolved to
/// argument slots. Construction checks every variable reference.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    ast: Expr,
    code: Code,
}

impl BoundExpr {
    pub fn bind(ast: Expr, dim: usize, spec: ArgSpec) -> Result<Self, BindError> {
        let code = compile(&ast, dim, spec)?;
        Ok(BoundExpr { ast, code })
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// Evaluate against the coordinates of one or two points. `b` is empty
    /// for expressions bound with [`ArgSpec::Single`].
    pub fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
        self.code.eval(a, b)
    }
}

impl PartialEq for BoundExpr {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

/// Split a variable name into its slot, given the dimension: `a3` is the
/// third coordinate of the first argument. Indices are 1-based.
fn resolve_var(name: &str, dim: usize, spec: ArgSpec) -> Option<Code> {
    let mut chars = name.chars();
    let side = chars.next()?;
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    let idx: usize = rest.parse().ok()?;
    if idx == 0 || idx > dim {
        return None;
    }
    match (side, spec) {
        ('a', _) => Some(Code::ArgA(idx - 1)),
        ('b', ArgSpec::Pair) => Some(Code::ArgB(idx - 1)),
        _ => None,
    }
}

fn compile(ast: &Expr, dim: usize, spec: ArgSpec) -> Result<Code, BindError> {
    match ast {
        Expr::Num(v) => Ok(Code::Num(*v)),
        Expr::Var(name) => resolve_var(name, dim, spec).ok_or_else(|| {
            let expected = match spec {
                ArgSpec::Single => format!("a1..a{dim}"),
                ArgSpec::Pair => format!("a1..a{dim} or b1..b{dim}"),
            };
            BindError::UnknownVariable {
                name: name.clone(),
                expected,
                dim,
            }
        }),
        Expr::Neg(x) => Ok(Code::Neg(Box::new(compile(x, dim, spec)?))),
        Expr::Abs(x) => Ok(Code::Abs(Box::new(compile(x, dim, spec)?))),
        Expr::Min(x, y) => Ok(Code::Min(
            Box::new(compile(x, dim, spec)?),
            Box::new(compile(y, dim, spec)?),
        )),
        Expr::Max(x, y) => Ok(Code::Max(
            Box::new(compile(x, dim, spec)?),
            Box::new(compile(y, dim, spec)?),
        )),
        Expr::Bin(op, x, y) => Ok(Code::Bin(
            *op,
            Box::new(compile(x, dim, spec)?),
            Box::new(compile(y, dim, spec)?),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    /// Independent reference evaluator working directly on the unbound AST
    /// with a name -> value map. Kept deliberately separate from the
    /// compiled path it cross-checks.
    fn reference_eval(e: &Expr, env: &HashMap<&str, f64>) -> f64 {
        match e {
            Expr::Num(v) => *v,
            Expr::Var(n) => env[n.as_str()],
            Expr::Neg(x) => -reference_eval(x, env),
            Expr::Abs(x) => reference_eval(x, env).abs(),
            Expr::Min(x, y) => reference_eval(x, env).min(reference_eval(y, env)),
            Expr::Max(x, y) => reference_eval(x, env).max(reference_eval(y, env)),
            Expr::Bin(op, x, y) => {
                let l = reference_eval(x, env);
                let r = reference_eval(y, env);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                }
            }
        }
    }

    fn eval2(src: &str, a: &[f64], b: &[f64]) -> f64 {
        let ast = parse(src).unwrap();
        let dim = a.len().max(b.len());
        let bound = BoundExpr::bind(ast, dim, ArgSpec::Pair).unwrap();
        bound.eval(a, b).unwrap()
    }

    fn eval0(src: &str) -> f64 {
        eval2(src, &[], &[])
    }

    #[test]
    fn parses_difference_of_squares() {
        let ast = parse("a2^2 - b2^2").unwrap();
        let expected = Expr::Bin(
            BinOp::Sub,
            Box::new(Expr::Bin(
                BinOp::Pow,
                Box::new(Expr::Var("a2".into())),
                Box::new(Expr::Num(2.0)),
            )),
            Box::new(Expr::Bin(
                BinOp::Pow,
                Box::new(Expr::Var("b2".into())),
                Box::new(Expr::Num(2.0)),
            )),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn parses_single_variable() {
        assert_eq!(parse("a2").unwrap(), Expr::Var("a2".into()));
    }

    #[test]
    fn min_with_negated_argument() {
        // hand-checked against the reference evaluator: min(3, -(2)) = -2
        let ast = parse("min(a1, -(b1))").unwrap();
        let env = HashMap::from([("a1", 3.0), ("b1", 2.0)]);
        assert_eq!(reference_eval(&ast, &env), -2.0);
        assert_eq!(eval2("min(a1, -(b1))", &[3.0], &[2.0]), -2.0);
    }

    #[test]
    fn eval_matches_hand_values() {
        assert_eq!(eval2("a2 - b2", &[0.0, 0.0], &[0.0, 0.5]), -0.5);
        assert_eq!(eval2("a2 - b2", &[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(eval2("a2 * b2", &[0.0, -0.5], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn free_vars_walks_the_tree() {
        let vars = |s: &str| {
            parse(s)
                .unwrap()
                .free_vars()
                .into_iter()
                .collect::<Vec<_>>()
        };
        assert_eq!(vars("a2^2 - b2^2"), ["a2", "b2"]);
        assert!(vars("3.5").is_empty());
        assert_eq!(vars("abs(a1-b1)+abs(a2-b2)"), ["a1", "a2", "b1", "b2"]);
    }

    // Precedence/associativity table. Expected values hand-computed; the
    // reference evaluator cross-checks each row on the same parse.
    const PRECEDENCE_CASES: &[(&str, f64)] = &[
        ("2+3*4", 14.0),
        ("(2+3)*4", 20.0),
        ("2*3+4", 10.0),
        ("2-3-4", -5.0),
        ("2-(3-4)", 3.0),
        ("100-10+1", 91.0),
        ("12/4/3", 1.0),
        ("12/(4/3)", 9.0),
        ("2*3/6", 1.0),
        ("8/2*4", 16.0),
        ("2^3^2", 512.0),
        ("(2^3)^2", 64.0),
        ("2^3*4", 32.0),
        ("4*2^3", 32.0),
        ("2^3+1", 9.0),
        ("-2^2", 4.0), // unary minus binds tighter than ^
        ("-(2^2)", -4.0),
        ("2^-2", 0.25),
        ("-2^-2", 0.25),
        ("2^-1^2", 2.0_f64), // 2^((-1)^2)
        ("--3", 3.0),
        ("-3+5", 2.0),
        ("5*-3", -15.0),
        ("5--3", 8.0),
        ("min(1+2, 2*3)", 3.0),
        ("max(abs(-5), 4)", 5.0),
        ("min(2^2, max(1, 3))", 3.0),
        ("abs(2-5)", 3.0),
        ("abs(-(2+5))", 7.0),
        ("min(-1, 1)*max(-1, 1)", -1.0),
        ("0.5*4", 2.0),
        ("1.25e2", 125.0),
        ("1e-2*100", 1.0),
        ("2E3/1000", 2.0),
        ("10/4", 2.5),
        ("7/2-1/2", 3.0),
        ("(1+2)*(3+4)", 21.0),
        ("((1))", 1.0),
        ("-(-(-1))", -1.0),
        ("1+2+3+4+5", 15.0),
        ("2*2*2*2", 16.0),
        ("3^2-2^3", 1.0),
        ("2^0.5*2^0.5", 2.0000000000000004),
        ("9^0.5", 3.0),
        ("4^-0.5", 0.5),
        ("0^0", 1.0),
        ("1/3*3", 1.0),
        ("0.1+0.2", 0.30000000000000004),
        ("min(0.1+0.2, 0.3)", 0.3),
        ("max(1e300, 1)", 1e300),
        ("abs(3)-abs(-3)", 0.0),
        ("2+-3", -1.0),
        ("-abs(-2)^2", 4.0), // (-abs(-2))^2
        ("2^2^-1", 1.4142135623730951),
    ];

    #[test]
    fn precedence_table() {
        assert!(PRECEDENCE_CASES.len() >= 50);
        for (src, expected) in PRECEDENCE_CASES {
            let got = eval0(src);
            assert_eq!(got, *expected, "{src}");
            let ast = parse(src).unwrap();
            let reference = reference_eval(&ast, &HashMap::new());
            assert_eq!(got, reference, "reference disagrees on {src}");
        }
    }

    #[test]
    fn rejects_bad_syntax() {
        assert!(parse("").is_err());
        assert!(parse("   ").is_err());
        assert!(parse("2a1").is_err()); // no implicit multiplication
        assert!(parse("1+2 3").is_err()); // trailing garbage
        assert!(parse("1+").is_err());
        assert!(parse("(1+2").is_err());
        assert!(parse("1+2)").is_err());
        assert!(parse("min(1)").is_err());
        assert!(parse("max(1, 2, 3)").is_err());
        assert!(parse("5.").is_err());
        assert!(parse(".5").is_err());
        assert!(parse("a1 b1").is_err());
        assert!(parse("1..2").is_err());
    }

    #[test]
    fn unknown_function_is_reported_at_its_offset() {
        let e = parse("1 + foo(2, 3)").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.message.contains("unknown function"));
    }

    #[test]
    fn bind_rejects_out_of_range_variables() {
        let reject = |src: &str, dim, spec| {
            let ast = parse(src).unwrap();
            assert!(BoundExpr::bind(ast, dim, spec).is_err(), "{src}");
        };
        reject("c3", 2, ArgSpec::Pair);
        reject("a3", 2, ArgSpec::Pair);
        reject("b1", 2, ArgSpec::Single);
        reject("a0", 2, ArgSpec::Pair);
        reject("a01", 2, ArgSpec::Pair);
        let ok = BoundExpr::bind(parse("a2 - b1").unwrap(), 2, ArgSpec::Pair);
        assert!(ok.is_ok());
    }

    #[test]
    fn arithmetic_errors_are_errors_not_infinities() {
        let run = |src: &str| {
            let b = BoundExpr::bind(parse(src).unwrap(), 1, ArgSpec::Pair).unwrap();
            b.eval(&[0.0], &[0.0])
        };
        assert_eq!(run("1/0"), Err(EvalError::DivisionByZero));
        assert_eq!(run("0^-1"), Err(EvalError::ZeroToNegativePower));
        assert!(matches!(run("1e300*1e300"), Err(EvalError::NonFinite(_))));
        assert!(matches!(run("(-1)^0.5"), Err(EvalError::NonFinite(_))));
    }

    #[test]
    fn evaluation_is_bitwise_deterministic() {
        let b = BoundExpr::bind(
            parse("abs(a1 - b1)^2 / (1 + a2*b2) - min(a1, b2)").unwrap(),
            2,
            ArgSpec::Pair,
        )
        .unwrap();
        let a = [0.3000000000001, -7.25];
        let bb = [1.0 / 3.0, 0.1];
        let first = b.eval(&a, &bb).unwrap();
        for _ in 0..1000 {
            let again = b.eval(&a, &bb).unwrap();
            assert_eq!(first.to_bits(), again.to_bits());
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0..1e6f64).prop_map(Expr::Num),
            prop_oneof![Just("a1"), Just("a2"), Just("b1"), Just("b2")]
                .prop_map(|v| Expr::Var(v.to_string())),
        ];
        leaf.prop_recursive(4, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|x| Expr::Neg(Box::new(x))),
                inner.clone().prop_map(|x| Expr::Abs(Box::new(x))),
                (inner.clone(), inner.clone())
                    .prop_map(|(x, y)| Expr::Min(Box::new(x), Box::new(y))),
                (inner.clone(), inner.clone())
                    .prop_map(|(x, y)| Expr::Max(Box::new(x), Box::new(y))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, x, y)| Expr::Bin(op, Box::new(x), Box::new(y))),
            ]
        })
    }

    proptest! {
        // Pretty-print then re-parse: the tree must come back unchanged.
        #[test]
        fn print_parse_round_trip(ast in arb_expr()) {
            let printed = ast.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(reparsed, ast, "printed as {}", printed);
        }
    }
}
