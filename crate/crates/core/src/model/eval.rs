use thiserror::Error;

use super::ast::{BinaryOp, Builtin, Expr};
use super::poly::{max_re_root, peak_gain};

/// A parameter vector at which the quantity has no finite value.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("undefined sample: {reason}")]
pub struct Undefined {
    pub reason: String,
}

fn undefined(reason: impl Into<String>) -> Undefined {
    Undefined { reason: reason.into() }
}

fn finite(v: f64, what: &str) -> Result<f64, Undefined> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(undefined(format!("{what} produced {v}")))
    }
}

fn eval_list(items: &[Expr], q: &[f64]) -> Result<Vec<f64>, Undefined> {
    items.iter().map(|e| evaluate(e, q)).collect()
}

fn list_arg(arg: &Expr, q: &[f64]) -> Result<Vec<f64>, Undefined> {
    match arg {
        Expr::List(items) => eval_list(items, q),
        other => Ok(vec![evaluate(other, q)?]),
    }
}

fn call(func: Builtin, args: &[Expr], q: &[f64]) -> Result<f64, Undefined> {
    let name = func.name();
    let value = match func {
        Builtin::MaxReRoot => {
            let coeffs = eval_list(args, q)?;
            max_re_root(&coeffs).map_err(|e| undefined(format!("{name}: {e}")))?
        }
        Builtin::PeakGain => {
            let num = list_arg(&args[0], q)?;
            let den = list_arg(&args[1], q)?;
            let w_min = evaluate(&args[2], q)?;
            let w_max = evaluate(&args[3], q)?;
            let points = evaluate(&args[4], q)?;
            if points.fract() != 0.0 || points < 2.0 {
                return Err(undefined(format!("{name}: point count {points} is not an integer >= 2")));
            }
            peak_gain(&num, &den, w_min, w_max, points as usize).map_err(|e| undefined(format!("{name}: {e}")))?
        }
        Builtin::Min => eval_list(args, q)?.into_iter().fold(f64::INFINITY, f64::min),
        Builtin::Max => eval_list(args, q)?.into_iter().fold(f64::NEG_INFINITY, f64::max),
        _ => {
            let x = evaluate(&args[0], q)?;
            match func {
                Builtin::Abs => x.abs(),
                Builtin::Exp => x.exp(),
                Builtin::Log => x.ln(),
                Builtin::Sqrt => x.sqrt(),
                Builtin::Sin => x.sin(),
                Builtin::Cos => x.cos(),
                _ => unreachable!("multi-argument builtins handled above"),
            }
        }
    };
    finite(value, name)
}

/// Evaluates u(q). Any non-finite intermediate value (log of a nonpositive
/// number, division by zero, a failed root solve) yields [`Undefined`].
///
/// Panics if the expression references a coordinate beyond `q`; models are
/// checked against their domain dimension when built.
pub fn evaluate(expr: &Expr, q: &[f64]) -> Result<f64, Undefined> {
    match expr {
        Expr::Number(v) => Ok(*v),
        Expr::Param(i) => Ok(q[*i]),
        Expr::Neg(e) => Ok(-evaluate(e, q)?),
        Expr::Binary { op, lhs, rhs } => {
            let a = evaluate(lhs, q)?;
            let b = evaluate(rhs, q)?;
            let (v, what) = match op {
                BinaryOp::Add => (a + b, "addition"),
                BinaryOp::Sub => (a - b, "subtraction"),
                BinaryOp::Mul => (a * b, "multiplication"),
                BinaryOp::Div => (a / b, "division"),
                BinaryOp::Pow => (a.powf(b), "power"),
            };
            finite(v, what)
        }
        Expr::Call { func, args } => call(*func, args, q),
        Expr::List(_) => Err(undefined("a coefficient list has no scalar value")),
    }
}
