//! A small expression language for scalar fields on the unit hypercube.
//!
//! ## Grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?          // right-associative
//! atom   := NUMBER | IDENT '(' expr (',' expr)* ')' | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers are the coordinates `x1`, `x2`, ... (one-based) and the
//! functions `abs`, `min`, `max`, and `step`; `step(g)` is `1` where
//! `g >= 0` and `0` elsewhere, so `step(x1 - 0.5)` is the unit jump at
//! one half. Parse errors carry the byte offset of the offending token.
//!
//! ## Derivatives
//!
//! [`differentiate`] produces an exact symbolic first partial whenever the
//! differentiated variable does not appear under `abs`, `step`, `min`,
//! `max`, or a variable exponent; otherwise it reports that no symbolic
//! derivative exists and the caller decides between finite differences and
//! an error.
//!
//! ## Breakpoint detection
//!
//! For arguments of `abs`/`step`/`min`/`max` that are affine in a single
//! coordinate the root is an axis-aligned kink or jump; [`detect_breaks`]
//! returns those so that quadrature partitions and sup grids can honor
//! them.

use crate::error::{Error, Result};

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Literal constant (non-negative when produced by the parser; unary
    /// minus parses as [`Expr::Neg`]).
    Num(f64),
    /// Coordinate variable, zero-based (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `base ^ exponent`, right-associative.
    Pow(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    /// `1` where the argument is `>= 0`, else `0`.
    Step(Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
}

/// An axis-aligned non-smooth point detected in an expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectedBreak {
    /// Zero-based axis.
    pub axis: usize,
    /// Coordinate of the break on that axis.
    pub coord: f64,
    /// `true` for a jump (`step`), `false` for a kink (`abs`, `min`, `max`).
    pub jump: bool,
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

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
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token with its starting byte offset; `None` at end of input.
    fn next(&mut self) -> Result<Option<(usize, Tok)>> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // Optional exponent part: e/E [+-]? digits
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut exp_end = end + 1;
                    if exp_end < self.src.len()
                        && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-')
                    {
                        exp_end += 1;
                    }
                    if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                        while exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                            exp_end += 1;
                        }
                        end = exp_end;
                    }
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let value: f64 = text.parse().map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("malformed number `{text}`"),
                })?;
                self.pos = end;
                Tok::Num(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end_pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.bump() {
            Some((_, ref t)) if t == want => Ok(()),
            Some((p, t)) => Err(Error::Parse {
                pos: p,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(Error::Parse {
                pos: self.end_pos,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.parse_factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            // Right-associative; the exponent may carry its own unary minus.
            let exponent = self.parse_factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some((_, Tok::Num(v))) => Ok(Expr::Num(v)),
            Some((p, Tok::Ident(name))) => self.finish_ident(p, name),
            Some((_, Tok::LParen)) => {
                let inner = self.parse_expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((p, t)) => Err(Error::Parse {
                pos: p,
                msg: format!("expected a value, found {t:?}"),
            }),
            None => Err(Error::Parse {
                pos: self.end_pos,
                msg: "expected a value, found end of input".into(),
            }),
        }
    }

    fn finish_ident(&mut self, pos: usize, name: String) -> Result<Expr> {
        // Coordinate variable x1, x2, ...
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let one_based: usize = rest.parse().map_err(|_| Error::Parse {
                    pos,
                    msg: format!("variable index out of range in `{name}`"),
                })?;
                if one_based == 0 {
                    return Err(Error::Parse {
                        pos,
                        msg: "variables are numbered from x1".into(),
                    });
                }
                return Ok(Expr::Var(one_based - 1));
            }
        }
        let is_call = matches!(self.peek(), Some(Tok::LParen));
        if !is_call {
            return Err(Error::Parse {
                pos,
                msg: format!("unknown identifier `{name}`"),
            });
        }
        self.bump(); // consume '('
        let mut args = vec![self.parse_expr()?];
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.bump();
            args.push(self.parse_expr()?);
        }
        self.expect(&Tok::RParen, "`)`")?;
        let argc = args.len();
        let one_arg = |args: Vec<Expr>| -> Result<Box<Expr>> {
            if argc == 1 {
                Ok(Box::new(args.into_iter().next().unwrap()))
            } else {
                Err(Error::Parse {
                    pos,
                    msg: format!("`{name}` takes exactly one argument, found {argc}"),
                })
            }
        };
        match name.as_str() {
            "abs" => Ok(Expr::Abs(one_arg(args)?)),
            "step" => Ok(Expr::Step(one_arg(args)?)),
            "min" | "max" => {
                if argc < 2 {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("`{name}` takes at least two arguments, found {argc}"),
                    });
                }
                if name == "min" {
                    Ok(Expr::Min(args))
                } else {
                    Ok(Expr::Max(args))
                }
            }
            _ => Err(Error::Parse {
                pos,
                msg: format!("unknown function `{name}`"),
            }),
        }
    }
}

/// Parse an expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut parser = Parser { toks, idx: 0, end_pos: text.len() };
    let expr = parser.parse_expr()?;
    if let Some(&(p, ref t)) = parser.toks.get(parser.idx) {
        return Err(Error::Parse {
            pos: p,
            msg: format!("unexpected trailing {t:?}"),
        });
    }
    Ok(expr)
}

/// Parse and validate that every variable fits the dimension `d`.
pub fn parse_for_dimension(text: &str, d: usize) -> Result<Expr> {
    let expr = parse(text)?;
    if let Some(v) = max_var(&expr) {
        if v >= d {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("expression uses x{}, but the dimension is {d}", v + 1),
            });
        }
    }
    Ok(expr)
}

// ---------------------------------------------------------------------------
// Evaluation and structural queries
// ---------------------------------------------------------------------------

/// Evaluate at `x` (no domain checks; the field layer owns those).
pub fn eval(e: &Expr, x: &[f64]) -> f64 {
    match e {
        Expr::Num(v) => *v,
        Expr::Var(i) => x[*i],
        Expr::Neg(a) => -eval(a, x),
        Expr::Add(a, b) => eval(a, x) + eval(b, x),
        Expr::Sub(a, b) => eval(a, x) - eval(b, x),
        Expr::Mul(a, b) => eval(a, x) * eval(b, x),
        Expr::Div(a, b) => eval(a, x) / eval(b, x),
        Expr::Pow(a, b) => {
            let base = eval(a, x);
            let exp = eval(b, x);
            // Integer exponents go through powi: exact for squares and
            // cheap in the quadrature hot path.
            if exp.fract() == 0.0 && exp.abs() <= 64.0 {
                base.powi(exp as i32)
            } else {
                base.powf(exp)
            }
        }
        Expr::Abs(a) => eval(a, x).abs(),
        Expr::Step(a) => {
            if eval(a, x) >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Expr::Min(args) => args
            .iter()
            .map(|a| eval(a, x))
            .fold(f64::INFINITY, f64::min),
        Expr::Max(args) => args
            .iter()
            .map(|a| eval(a, x))
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Largest variable index used, if any.
pub fn max_var(e: &Expr) -> Option<usize> {
    match e {
        Expr::Num(_) => None,
        Expr::Var(i) => Some(*i),
        Expr::Neg(a) | Expr::Abs(a) | Expr::Step(a) => max_var(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
        | Expr::Pow(a, b) => match (max_var(a), max_var(b)) {
            (Some(u), Some(v)) => Some(u.max(v)),
            (u, v) => u.or(v),
        },
        Expr::Min(args) | Expr::Max(args) => args.iter().filter_map(max_var).max(),
    }
}

/// Whether the variable `axis` occurs anywhere in the tree.
pub fn contains_var(e: &Expr, axis: usize) -> bool {
    match e {
        Expr::Num(_) => false,
        Expr::Var(i) => *i == axis,
        Expr::Neg(a) | Expr::Abs(a) | Expr::Step(a) => contains_var(a, axis),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
        | Expr::Pow(a, b) => contains_var(a, axis) || contains_var(b, axis),
        Expr::Min(args) | Expr::Max(args) => args.iter().any(|a| contains_var(a, axis)),
    }
}

// ---------------------------------------------------------------------------
// Symbolic differentiation
// ---------------------------------------------------------------------------

/// Constant constructor that keeps parser-image shape: negative constants
/// become `Neg(Num(..))` so printed derivatives re-parse to equal trees.
fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(v)
    }
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Exact partial derivative along `axis`, or `None` when the variable sits
/// under `abs`/`step`/`min`/`max` or in an exponent.
pub fn differentiate(e: &Expr, axis: usize) -> Option<Expr> {
    let d = match e {
        Expr::Num(_) => num(0.0),
        Expr::Var(i) => num(if *i == axis { 1.0 } else { 0.0 }),
        Expr::Neg(a) => Expr::Neg(bx(differentiate(a, axis)?)),
        Expr::Add(a, b) => Expr::Add(bx(differentiate(a, axis)?), bx(differentiate(b, axis)?)),
        Expr::Sub(a, b) => Expr::Sub(bx(differentiate(a, axis)?), bx(differentiate(b, axis)?)),
        Expr::Mul(a, b) => {
            let da = differentiate(a, axis)?;
            let db = differentiate(b, axis)?;
            Expr::Add(
                bx(Expr::Mul(bx(da), b.clone())),
                bx(Expr::Mul(a.clone(), bx(db))),
            )
        }
        Expr::Div(a, b) => {
            let da = differentiate(a, axis)?;
            let db = differentiate(b, axis)?;
            Expr::Div(
                bx(Expr::Sub(
                    bx(Expr::Mul(bx(da), b.clone())),
                    bx(Expr::Mul(a.clone(), bx(db))),
                )),
                bx(Expr::Mul(b.clone(), b.clone())),
            )
        }
        Expr::Pow(a, b) => {
            if contains_var(b, axis) {
                return None; // variable exponent: no symbolic rule here
            }
            if !contains_var(a, axis) {
                num(0.0)
            } else {
                // d/dx a^c = c * a^(c-1) * a'
                let da = differentiate(a, axis)?;
                Expr::Mul(
                    bx(Expr::Mul(
                        b.clone(),
                        bx(Expr::Pow(a.clone(), bx(Expr::Sub(b.clone(), bx(num(1.0)))))),
                    )),
                    bx(da),
                )
            }
        }
        Expr::Abs(a) | Expr::Step(a) => {
            if contains_var(a, axis) {
                return None;
            }
            num(0.0)
        }
        Expr::Min(args) | Expr::Max(args) => {
            if args.iter().any(|a| contains_var(a, axis)) {
                return None;
            }
            num(0.0)
        }
    };
    Some(simplify(d))
}

/// Light structural simplification: constant folding and 0/1 identities.
pub fn simplify(e: Expr) -> Expr {
    match e {
        Expr::Neg(a) => {
            let a = simplify(*a);
            match a {
                Expr::Num(v) if v == 0.0 => Expr::Num(0.0),
                Expr::Neg(inner) => *inner,
                other => Expr::Neg(bx(other)),
            }
        }
        Expr::Add(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Expr::Num(u), Expr::Num(v)) => num(u + v),
                (Expr::Num(z), other) | (other, Expr::Num(z)) if z == 0.0 => other,
                (a, b) => Expr::Add(bx(a), bx(b)),
            }
        }
        Expr::Sub(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Expr::Num(u), Expr::Num(v)) => num(u - v),
                (other, Expr::Num(z)) if z == 0.0 => other,
                (Expr::Num(z), other) if z == 0.0 => simplify(Expr::Neg(bx(other))),
                (a, b) => Expr::Sub(bx(a), bx(b)),
            }
        }
        Expr::Mul(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Expr::Num(u), Expr::Num(v)) => num(u * v),
                (Expr::Num(z), _) | (_, Expr::Num(z)) if z == 0.0 => Expr::Num(0.0),
                (Expr::Num(o), other) | (other, Expr::Num(o)) if o == 1.0 => other,
                (a, b) => Expr::Mul(bx(a), bx(b)),
            }
        }
        Expr::Div(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (Expr::Num(z), other) if z == 0.0 => {
                    // keep 0/g as 0 only when g is a nonzero constant
                    match other {
                        Expr::Num(v) if v != 0.0 => Expr::Num(0.0),
                        other => Expr::Div(bx(Expr::Num(0.0)), bx(other)),
                    }
                }
                (other, Expr::Num(o)) if o == 1.0 => other,
                (Expr::Num(u), Expr::Num(v)) if v != 0.0 => num(u / v),
                (a, b) => Expr::Div(bx(a), bx(b)),
            }
        }
        Expr::Pow(a, b) => {
            let a = simplify(*a);
            let b = simplify(*b);
            match (a, b) {
                (_, Expr::Num(z)) if z == 0.0 => Expr::Num(1.0),
                (base, Expr::Num(o)) if o == 1.0 => base,
                (Expr::Num(u), Expr::Num(v)) => num(u.powf(v)),
                (a, b) => Expr::Pow(bx(a), bx(b)),
            }
        }
        Expr::Abs(a) => Expr::Abs(bx(simplify(*a))),
        Expr::Step(a) => Expr::Step(bx(simplify(*a))),
        Expr::Min(args) => Expr::Min(args.into_iter().map(simplify).collect()),
        Expr::Max(args) => Expr::Max(args.into_iter().map(simplify).collect()),
        leaf => leaf,
    }
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn print_prec(e: &Expr, min_prec: u8, out: &mut String) {
    let prec = precedence(e);
    let need_parens = prec < min_prec;
    if need_parens {
        out.push('(');
    }
    match e {
        Expr::Num(v) => out.push_str(&format!("{v}")),
        Expr::Var(i) => out.push_str(&format!("x{}", i + 1)),
        Expr::Neg(a) => {
            out.push('-');
            print_prec(a, 4, out);
        }
        Expr::Add(a, b) => {
            print_prec(a, 1, out);
            out.push_str(" + ");
            print_prec(b, 2, out);
        }
        Expr::Sub(a, b) => {
            print_prec(a, 1, out);
            out.push_str(" - ");
            print_prec(b, 2, out);
        }
        Expr::Mul(a, b) => {
            print_prec(a, 2, out);
            out.push_str(" * ");
            print_prec(b, 3, out);
        }
        Expr::Div(a, b) => {
            print_prec(a, 2, out);
            out.push_str(" / ");
            print_prec(b, 3, out);
        }
        Expr::Pow(a, b) => {
            print_prec(a, 5, out);
            out.push('^');
            print_prec(b, 3, out);
        }
        Expr::Abs(a) => {
            out.push_str("abs(");
            print_prec(a, 0, out);
            out.push(')');
        }
        Expr::Step(a) => {
            out.push_str("step(");
            print_prec(a, 0, out);
            out.push(')');
        }
        Expr::Min(args) | Expr::Max(args) => {
            out.push_str(if matches!(e, Expr::Min(_)) { "min(" } else { "max(" });
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_prec(a, 0, out);
            }
            out.push(')');
        }
    }
    if need_parens {
        out.push(')');
    }
}

/// Render with the fewest parentheses that still re-parse to an equal tree.
pub fn pretty(e: &Expr) -> String {
    let mut out = String::new();
    print_prec(e, 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Affine analysis and break detection
// ---------------------------------------------------------------------------

/// Affine form `constant + sum_i coeff_i * x_i` with sparse coefficients,
/// when the expression is affine; `None` otherwise.
fn affine_form(e: &Expr) -> Option<(f64, Vec<(usize, f64)>)> {
    fn merge(mut a: Vec<(usize, f64)>, b: Vec<(usize, f64)>, sign: f64) -> Vec<(usize, f64)> {
        for (axis, coeff) in b {
            if let Some(entry) = a.iter_mut().find(|(ax, _)| *ax == axis) {
                entry.1 += sign * coeff;
            } else {
                a.push((axis, sign * coeff));
            }
        }
        a.retain(|(_, c)| *c != 0.0);
        a
    }
    if max_var(e).is_none() {
        return Some((eval(e, &[]), Vec::new()));
    }
    match e {
        Expr::Var(i) => Some((0.0, vec![(*i, 1.0)])),
        Expr::Neg(a) => {
            let (c, v) = affine_form(a)?;
            Some((-c, v.into_iter().map(|(ax, co)| (ax, -co)).collect()))
        }
        Expr::Add(a, b) => {
            let (ca, va) = affine_form(a)?;
            let (cb, vb) = affine_form(b)?;
            Some((ca + cb, merge(va, vb, 1.0)))
        }
        Expr::Sub(a, b) => {
            let (ca, va) = affine_form(a)?;
            let (cb, vb) = affine_form(b)?;
            Some((ca - cb, merge(va, vb, -1.0)))
        }
        Expr::Mul(a, b) => {
            let (ca, va) = affine_form(a)?;
            let (cb, vb) = affine_form(b)?;
            if va.is_empty() {
                Some((ca * cb, vb.into_iter().map(|(ax, co)| (ax, ca * co)).collect()))
            } else if vb.is_empty() {
                Some((ca * cb, va.into_iter().map(|(ax, co)| (ax, cb * co)).collect()))
            } else {
                None
            }
        }
        Expr::Div(a, b) => {
            let (cb, vb) = affine_form(b)?;
            if !vb.is_empty() || cb == 0.0 {
                return None;
            }
            let (ca, va) = affine_form(a)?;
            Some((ca / cb, va.into_iter().map(|(ax, co)| (ax, co / cb)).collect()))
        }
        _ => None,
    }
}

fn push_break(out: &mut Vec<DetectedBreak>, arg: &Expr, jump: bool) {
    if let Some((c, coeffs)) = affine_form(arg) {
        if coeffs.len() == 1 {
            let (axis, a) = coeffs[0];
            let root = -c / a;
            if (0.0..=1.0).contains(&root) {
                let brk = DetectedBreak { axis, coord: root, jump };
                if !out
                    .iter()
                    .any(|b| b.axis == axis && (b.coord - root).abs() < 1e-12)
                {
                    out.push(brk);
                }
            }
        }
    }
}

/// Detect axis-aligned kinks and jumps: roots of single-variable affine
/// arguments of `abs`, `step`, `min`, `max` that land inside the hypercube.
pub fn detect_breaks(e: &Expr) -> Vec<DetectedBreak> {
    fn walk(e: &Expr, out: &mut Vec<DetectedBreak>) {
        match e {
            Expr::Abs(a) => {
                push_break(out, a, false);
                walk(a, out);
            }
            Expr::Step(a) => {
                push_break(out, a, true);
                walk(a, out);
            }
            Expr::Min(args) | Expr::Max(args) => {
                // A kink sits where two branches cross.
                for i in 0..args.len() {
                    for j in (i + 1)..args.len() {
                        let diff = Expr::Sub(bx(args[i].clone()), bx(args[j].clone()));
                        push_break(out, &diff, false);
                    }
                }
                for a in args {
                    walk(a, out);
                }
            }
            Expr::Neg(a) => walk(a, out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Expr::Num(_) | Expr::Var(_) => {}
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    out
}
