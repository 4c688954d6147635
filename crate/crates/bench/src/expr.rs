//! Real-valued expressions for user Hamiltonians: parsed by `evalexpr`,
//! lowered to a small tree that evaluates on a slice and differentiates
//! symbolically.

use std::fmt;

use evalexpr::{build_operator_tree, DefaultNumericTypes, Node, Operator, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    fn parse(name: &str) -> Option<Func> {
        let name = name.strip_prefix("math::").unwrap_or(name);
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError(pub String);

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

use Expr::*;

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn add(l: Expr, r: Expr) -> Expr {
    match (l, r) {
        (Const(a), Const(c)) => Const(a + c),
        (Const(z), e) | (e, Const(z)) if z == 0.0 => e,
        (l, r) => Add(b(l), b(r)),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (l, r) {
        (Const(a), Const(c)) => Const(a - c),
        (e, Const(z)) if z == 0.0 => e,
        (Const(z), e) if z == 0.0 => neg(e),
        (l, r) => Sub(b(l), b(r)),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (l, r) {
        (Const(a), Const(c)) => Const(a * c),
        (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
        (Const(o), e) | (e, Const(o)) if o == 1.0 => e,
        (l, r) => Mul(b(l), b(r)),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (l, r) {
        (Const(a), Const(c)) => Const(a / c),
        (Const(z), _) if z == 0.0 => Const(0.0),
        (e, Const(o)) if o == 1.0 => e,
        (l, r) => Div(b(l), b(r)),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Const(a) => Const(-a),
        Neg(inner) => *inner,
        e => Neg(b(e)),
    }
}

fn pow(l: Expr, r: Expr) -> Expr {
    match (l, r) {
        (Const(a), Const(c)) => Const(a.powf(c)),
        (_, Const(z)) if z == 0.0 => Const(1.0),
        (e, Const(o)) if o == 1.0 => e,
        (l, r) => Pow(b(l), b(r)),
    }
}

fn call(f: Func, e: Expr) -> Expr {
    match e {
        Const(a) => Const(f.apply(a)),
        e => Call(f, b(e)),
    }
}

impl Expr {
    /// Parses `src` with the given variable names; `Var(i)` refers to
    /// `names[i]`.
    pub fn parse(src: &str, names: &[&str]) -> Result<Expr, ExprError> {
        let node = build_operator_tree::<DefaultNumericTypes>(src)
            .map_err(|e| ExprError(format!("cannot parse {src:?}: {e}")))?;
        lower(&node, names)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Const(a) => *a,
            Var(i) => v[*i],
            Neg(e) => -e.eval(v),
            Add(l, r) => l.eval(v) + r.eval(v),
            Sub(l, r) => l.eval(v) - r.eval(v),
            Mul(l, r) => l.eval(v) * r.eval(v),
            Div(l, r) => l.eval(v) / r.eval(v),
            Pow(l, r) => match **r {
                Const(c) if c == c.round() && c.abs() <= 64.0 => l.eval(v).powi(c as i32),
                _ => l.eval(v).powf(r.eval(v)),
            },
            Call(f, e) => f.apply(e.eval(v)),
        }
    }

    /// Replaces `Var(i)` by a constant and folds.
    pub fn substitute(&self, i: usize, value: f64) -> Expr {
        let s = |e: &Expr| e.substitute(i, value);
        match self {
            Var(j) if *j == i => Const(value),
            Const(_) | Var(_) => self.clone(),
            Neg(e) => neg(s(e)),
            Add(l, r) => add(s(l), s(r)),
            Sub(l, r) => sub(s(l), s(r)),
            Mul(l, r) => mul(s(l), s(r)),
            Div(l, r) => div(s(l), s(r)),
            Pow(l, r) => pow(s(l), s(r)),
            Call(f, e) => call(*f, s(e)),
        }
    }

    /// Partial derivative in `Var(i)`.
    pub fn derivative(&self, i: usize) -> Expr {
        let d = |e: &Expr| e.derivative(i);
        match self {
            Const(_) => Const(0.0),
            Var(j) => Const(if *j == i { 1.0 } else { 0.0 }),
            Neg(e) => neg(d(e)),
            Add(l, r) => add(d(l), d(r)),
            Sub(l, r) => sub(d(l), d(r)),
            Mul(l, r) => add(mul(d(l), (**r).clone()), mul((**l).clone(), d(r))),
            Div(l, r) => div(
                sub(mul(d(l), (**r).clone()), mul((**l).clone(), d(r))),
                pow((**r).clone(), Const(2.0)),
            ),
            Pow(l, r) => {
                let (u, w) = ((**l).clone(), (**r).clone());
                if let Const(c) = w {
                    mul(mul(Const(c), pow(u, Const(c - 1.0))), d(l))
                } else {
                    // u^w (w' ln u + w u'/u)
                    mul(
                        self.clone(),
                        add(mul(d(r), call(Func::Ln, u.clone())), div(mul(w, d(l)), u)),
                    )
                }
            }
            Call(f, e) => {
                let u = (**e).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Tan => div(Const(1.0), pow(call(Func::Cos, u), Const(2.0))),
                    Func::Exp => call(Func::Exp, u),
                    Func::Ln => div(Const(1.0), u),
                    Func::Sqrt => div(Const(0.5), call(Func::Sqrt, u)),
                    Func::Abs => div(u.clone(), call(Func::Abs, u)),
                    Func::Sinh => call(Func::Cosh, u),
                    Func::Cosh => call(Func::Sinh, u),
                    Func::Tanh => sub(Const(1.0), pow(call(Func::Tanh, u), Const(2.0))),
                };
                mul(outer, d(e))
            }
        }
    }
}

fn lower(node: &Node<DefaultNumericTypes>, names: &[&str]) -> Result<Expr, ExprError> {
    let kids = node.children();
    let arg = |i: usize| -> Result<Expr, ExprError> {
        kids.get(i)
            .ok_or_else(|| ExprError(format!("operator {} is missing an operand", node.operator())))
            .and_then(|c| lower(c, names))
    };
    Ok(match node.operator() {
        Operator::RootNode => {
            if kids.len() != 1 {
                return Err(ExprError("expected a single expression".into()));
            }
            arg(0)?
        }
        Operator::Add => add(arg(0)?, arg(1)?),
        Operator::Sub => sub(arg(0)?, arg(1)?),
        Operator::Neg => neg(arg(0)?),
        Operator::Mul => mul(arg(0)?, arg(1)?),
        Operator::Div => div(arg(0)?, arg(1)?),
        Operator::Exp => pow(arg(0)?, arg(1)?),
        Operator::Const { value } => match value {
            Value::Float(x) => Const(*x),
            Value::Int(i) => Const(*i as f64),
            other => return Err(ExprError(format!("unsupported constant {other}"))),
        },
        Operator::VariableIdentifierRead { identifier } => match identifier.as_str() {
            "pi" => Const(std::f64::consts::PI),
            name => Var(names
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| ExprError(format!("unknown variable {name:?}")))?),
        },
        Operator::FunctionIdentifier { identifier } => {
            let f = Func::parse(identifier)
                .ok_or_else(|| ExprError(format!("unknown function {identifier:?}")))?;
            call(f, arg(0)?)
        }
        other => return Err(ExprError(format!("unsupported operator {other}"))),
    })
}
