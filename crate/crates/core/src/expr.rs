//! Expression trees for vector-field components.
//!
//! An [`Expr`] is an immutable tree over the state variables `x1..xn`, named
//! parameters and real constants. Derivatives are taken symbolically and the
//! results are lightly simplified: constants are folded and neutral elements
//! (`0 + e`, `1 * e`, `e ^ 1`, ...) are removed. There is no polynomial
//! canonicalization, so two equal expressions may still differ structurally.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Elementary functions understood by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// State variable `x<i>`, 1-based.
    Var(usize),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("variable x{index} is outside a point of dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(0.0)
    }

    pub fn one() -> Self {
        Expr::Const(1.0)
    }

    pub fn var(index: usize) -> Self {
        assert!(index >= 1, "variable indices start at 1");
        Expr::Var(index)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Expr::Param(name.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 1.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    // Simplifying constructors. Folding is skipped whenever it would produce a
    // non-finite constant, so evaluation errors stay observable.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => fold(x + y).unwrap_or_else(|| raw_add(a, b)),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => raw_add(a, b),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => fold(x - y).unwrap_or_else(|| Expr::Sub(Box::new(a), Box::new(b))),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Expr::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => fold(x * y).unwrap_or_else(|| raw_mul(a, b)),
            _ if a.is_zero() || b.is_zero() => Expr::zero(),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Expr::Const(c), _) if *c == -1.0 => Expr::neg(b),
            (_, Expr::Const(c)) if *c == -1.0 => Expr::neg(a),
            (Expr::Const(c), Expr::Mul(inner, rest)) => match inner.as_const().and_then(|d| fold(c * d)) {
                Some(k) => Expr::mul(k, (**rest).clone()),
                None => raw_mul(a, b),
            },
            _ => raw_mul(a, b),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => {
                fold(x / y).unwrap_or_else(|| Expr::Div(Box::new(a), Box::new(b)))
            }
            (_, Expr::Const(y)) if *y == 0.0 => Expr::Div(Box::new(a), Box::new(b)),
            _ if a.is_zero() => Expr::zero(),
            _ if b.is_one() => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: i32) -> Expr {
        match exponent {
            0 => Expr::one(),
            1 => base,
            _ => match base {
                Expr::Const(c) if !(c == 0.0 && exponent < 0) => {
                    fold(c.powi(exponent)).unwrap_or(Expr::Pow(Box::new(Expr::Const(c)), exponent))
                }
                other => Expr::Pow(Box::new(other), exponent),
            },
        }
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    /// Evaluates at `x` (where `x[0]` is the value of `x1`).
    pub fn eval(&self, x: &[f64], params: &BTreeMap<String, f64>) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *x.get(i - 1).ok_or(ExprError::VariableOutOfRange {
                index: *i,
                dim: x.len(),
            })?,
            Expr::Param(name) => *params
                .get(name)
                .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?,
            Expr::Neg(e) => -e.eval(x, params)?,
            Expr::Add(a, b) => a.eval(x, params)? + b.eval(x, params)?,
            Expr::Sub(a, b) => a.eval(x, params)? - b.eval(x, params)?,
            Expr::Mul(a, b) => a.eval(x, params)? * b.eval(x, params)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, params)?;
                let den = b.eval(x, params)?;
                if den == 0.0 {
                    return Err(ExprError::DivisionByZero);
                }
                num / den
            }
            Expr::Pow(base, n) => {
                let b = base.eval(x, params)?;
                if b == 0.0 && *n < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                b.powi(*n)
            }
            Expr::Call(f, arg) => f.apply(arg.eval(x, params)?),
        })
    }

    /// Symbolic partial derivative with respect to `x<var>` (1-based).
    pub fn derivative(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(e) => Expr::neg(e.derivative(var)),
            Expr::Add(a, b) => Expr::add(a.derivative(var), b.derivative(var)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(var), b.derivative(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(var), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(var)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = a'/b - a*b'/b^2
                let db = b.derivative(var);
                let first = Expr::div(a.derivative(var), (**b).clone());
                if db.is_zero() {
                    first
                } else {
                    Expr::sub(
                        first,
                        Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2)),
                    )
                }
            }
            Expr::Pow(base, n) => {
                let db = base.derivative(var);
                if db.is_zero() {
                    return Expr::zero();
                }
                Expr::mul(
                    Expr::mul(Expr::Const(f64::from(*n)), Expr::pow((**base).clone(), n - 1)),
                    db,
                )
            }
            Expr::Call(f, arg) => {
                let darg = arg.derivative(var);
                if darg.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, (**arg).clone()),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, (**arg).clone())),
                    Func::Exp => Expr::call(Func::Exp, (**arg).clone()),
                };
                Expr::mul(outer, darg)
            }
        }
    }

    /// Indices of the variables that occur in the tree.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Var(i) = e {
                out.insert(*i);
            }
        });
        out
    }

    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Param(p) = e {
                out.insert(p.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => {}
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            _ => 5,
        }
    }
}

fn fold(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

fn raw_add(a: Expr, b: Expr) -> Expr {
    Expr::Add(Box::new(a), Box::new(b))
}

fn raw_mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}

struct Operand<'a> {
    expr: &'a Expr,
    min_prec: u8,
}

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.precedence() < self.min_prec {
            write!(f, "({})", self.expr)
        } else {
            write!(f, "{}", self.expr)
        }
    }
}

fn left(expr: &Expr, prec: u8) -> Operand<'_> {
    Operand { expr, min_prec: prec }
}

fn right(expr: &Expr, prec: u8) -> Operand<'_> {
    Operand {
        expr,
        min_prec: prec + 1,
    }
}

/// Prints in the field-file grammar; the output parses back to a tree that
/// evaluates identically.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(e) => write!(f, "-{}", left(e, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", left(a, 1), right(b, 1)),
            Expr::Sub(a, b) => write!(f, "{} - {}", left(a, 1), right(b, 1)),
            Expr::Mul(a, b) => write!(f, "{}*{}", left(a, 2), right(b, 2)),
            Expr::Div(a, b) => write!(f, "{}/{}", left(a, 2), right(b, 2)),
            Expr::Pow(base, n) => write!(f, "{}^{}", left(base, 5), n),
            Expr::Call(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}
