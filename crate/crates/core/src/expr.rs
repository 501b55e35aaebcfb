//! Recursive-descent parser and evaluator for test-function expressions in
//! the single variable `t`.
//!
//! Grammar (whitespace-insensitive, `^` right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | 't' | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Function names come from a fixed whitelist; exponents must fold to a
//! constant at parse time. Evaluation is total on `[0, ∞)` except division
//! by zero, which is a runtime error.

use thiserror::Error;

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found:?}")]
    Syntax { offset: usize, expected: &'static str, found: String },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("{name} takes {expected} argument(s), got {got} (at byte {offset})")]
    BadArity { offset: usize, name: &'static str, expected: usize, got: usize },
    #[error("exponent at byte {offset} must be a constant")]
    NonConstantExponent { offset: usize },
}

/// Whitelisted functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Abs,
    Min,
    Max,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Sqrt => "sqrt",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree over the variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var,
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    /// `base ^ exponent` with a constant exponent.
    Pow(Box<ExprAst>, f64),
    Call(Func, Vec<ExprAst>),
}

impl ExprAst {
    /// Evaluate at `t`; the only runtime failure is division by zero.
    pub fn eval(&self, t: f64) -> Result<f64, crate::Error> {
        Ok(match self {
            ExprAst::Const(c) => *c,
            ExprAst::Var => t,
            ExprAst::Neg(e) => -e.eval(t)?,
            ExprAst::Add(a, b) => a.eval(t)? + b.eval(t)?,
            ExprAst::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            ExprAst::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            ExprAst::Div(a, b) => {
                let denom = b.eval(t)?;
                if denom == 0.0 {
                    return Err(crate::Error::Eval(format!("division by zero at t = {t}")));
                }
                a.eval(t)? / denom
            }
            ExprAst::Pow(base, exp) => {
                let b = base.eval(t)?;
                if *exp == exp.round() && exp.abs() < 64.0 {
                    b.powi(*exp as i32)
                } else {
                    b.powf(*exp)
                }
            }
            ExprAst::Call(f, args) => {
                let a0 = args[0].eval(t)?;
                match f {
                    Func::Exp => a0.exp(),
                    Func::Sin => a0.sin(),
                    Func::Cos => a0.cos(),
                    Func::Abs => a0.abs(),
                    Func::Sqrt => a0.sqrt(),
                    Func::Min => a0.min(args[1].eval(t)?),
                    Func::Max => a0.max(args[1].eval(t)?),
                }
            }
        })
    }

    /// Render back to text; `parse_expr(to_text(e))` is structurally `e`.
    pub fn to_text(&self) -> String {
        // precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5
        fn prec(e: &ExprAst) -> u8 {
            match e {
                ExprAst::Add(..) | ExprAst::Sub(..) => 1,
                ExprAst::Mul(..) | ExprAst::Div(..) => 2,
                ExprAst::Neg(..) => 3,
                ExprAst::Pow(..) => 4,
                _ => 5,
            }
        }
        fn wrap(e: &ExprAst, min_prec: u8) -> String {
            let s = render(e);
            if prec(e) < min_prec {
                format!("({s})")
            } else {
                s
            }
        }
        fn render(e: &ExprAst) -> String {
            match e {
                // negative literals reparse through the unary-minus fold
                ExprAst::Const(c) => format!("{c}"),
                ExprAst::Var => "t".to_string(),
                ExprAst::Neg(inner) => format!("-{}", wrap(inner, 5)),
                ExprAst::Add(a, b) => format!("{} + {}", wrap(a, 1), wrap(b, 2)),
                ExprAst::Sub(a, b) => format!("{} - {}", wrap(a, 1), wrap(b, 2)),
                ExprAst::Mul(a, b) => format!("{} * {}", wrap(a, 2), wrap(b, 3)),
                ExprAst::Div(a, b) => format!("{} / {}", wrap(a, 2), wrap(b, 3)),
                ExprAst::Pow(base, exp) => format!("{}^{exp}", wrap(base, 5)),
                ExprAst::Call(f, args) => {
                    let inner: Vec<String> = args.iter().map(render).collect();
                    format!("{}({})", f.name(), inner.join(", "))
                }
            }
        }
        render(self)
    }

    /// True when no subtree references the variable.
    fn is_constant(&self) -> bool {
        match self {
            ExprAst::Const(_) => true,
            ExprAst::Var => false,
            ExprAst::Neg(e) => e.is_constant(),
            ExprAst::Add(a, b) | ExprAst::Sub(a, b) | ExprAst::Mul(a, b) | ExprAst::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            ExprAst::Pow(base, _) => base.is_constant(),
            ExprAst::Call(_, args) => args.iter().all(ExprAst::is_constant),
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

/// Parse an expression in the variable `t`.
pub fn parse_expr(text: &str) -> Result<ExprAst, ParseError> {
    let mut parser = Parser { bytes: text.as_bytes(), pos: 0 };
    parser.skip_ws();
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.syntax("end of input"));
    }
    Ok(expr)
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = &self.bytes[self.pos..];
                let len = rest.len().min(8);
                String::from_utf8_lossy(&rest[..len]).into_owned()
            }
        }
    }

    fn syntax(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax { offset: self.pos, expected, found: self.found() }
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.term()?;
        loop {
            if self.eat(b'+') {
                node = ExprAst::Add(Box::new(node), Box::new(self.term()?));
            } else if self.eat(b'-') {
                node = ExprAst::Sub(Box::new(node), Box::new(self.term()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.factor()?;
        loop {
            if self.eat(b'*') {
                node = ExprAst::Mul(Box::new(node), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                node = ExprAst::Div(Box::new(node), Box::new(self.factor()?));
            } else {
                return Ok(node);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.unary()?;
        if self.eat(b'^') {
            let exp_offset = self.pos;
            let exp = self.factor()?; // right-associative
            if !exp.is_constant() {
                return Err(ParseError::NonConstantExponent { offset: exp_offset });
            }
            // no Var inside, so eval(0) cannot touch the variable; division
            // by zero inside a constant exponent is also rejected here
            let folded = exp
                .eval(0.0)
                .map_err(|_| ParseError::NonConstantExponent { offset: exp_offset })?;
            return Ok(ExprAst::Pow(Box::new(base), folded));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.eat(b'-') {
            // fold negated literals so "-5" is a constant, not Neg(Const)
            return Ok(match self.atom()? {
                ExprAst::Const(c) => ExprAst::Const(-c),
                other => ExprAst::Neg(Box::new(other)),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.syntax("number, 't', function call or '('")),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else if (c == b'e' || c == b'E') && self.pos > start {
                // exponent part: e[+-]?digits
                let mark = self.pos;
                self.pos += 1;
                if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                        self.pos += 1;
                    }
                } else {
                    self.pos = mark;
                    break;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            expected: "number",
            found: text.to_string(),
        })?;
        self.skip_ws();
        Ok(ExprAst::Const(value))
    }

    fn ident(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii").to_string();
        self.skip_ws();
        if name == "t" {
            return Ok(ExprAst::Var);
        }
        let func = Func::from_name(&name)
            .ok_or(ParseError::UnknownIdentifier { offset: start, name: name.clone() })?;
        if !self.eat(b'(') {
            return Err(self.syntax("'(' after function name"));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.syntax("')' or ','"));
        }
        if args.len() != func.arity() {
            return Err(ParseError::BadArity {
                offset: start,
                name: func.name(),
                expected: func.arity(),
                got: args.len(),
            });
        }
        Ok(ExprAst::Call(func, args))
    }
}
