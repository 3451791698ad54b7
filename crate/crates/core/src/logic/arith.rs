//! Arithmetic evaluation for `is/2` and the comparison builtins.

use std::cmp::Ordering;

use super::engine::SolveError;
use super::term::{Number, Term};

fn eval_err(msg: impl Into<String>) -> SolveError {
    SolveError::Arithmetic(msg.into())
}

fn finite(f: f64) -> Result<Number, SolveError> {
    if f.is_finite() {
        Ok(Number::Float(f))
    } else {
        Err(eval_err("float overflow or undefined result"))
    }
}

fn int_op(r: Option<i64>) -> Result<Number, SolveError> {
    r.map(Number::Int).ok_or_else(|| eval_err("integer overflow"))
}

fn need_int(n: Number, op: &str) -> Result<i64, SolveError> {
    match n {
        Number::Int(i) => Ok(i),
        Number::Float(_) => Err(eval_err(format!("{op} expects integer arguments"))),
    }
}

fn to_int(f: f64) -> Result<Number, SolveError> {
    if f.is_finite() && f >= i64::MIN as f64 && f < i64::MAX as f64 {
        Ok(Number::Int(f as i64))
    } else {
        Err(eval_err("integer overflow"))
    }
}

/// Evaluates a fully dereferenced arithmetic expression.
pub fn eval(t: &Term) -> Result<Number, SolveError> {
    match t {
        Term::Number(n) => Ok(*n),
        Term::Var(_) => Err(SolveError::Instantiation),
        Term::Atom(a) => match &**a {
            "pi" => Ok(Number::Float(std::f64::consts::PI)),
            "e" => Ok(Number::Float(std::f64::consts::E)),
            other => Err(eval_err(format!("{other}/0 is not an arithmetic function"))),
        },
        Term::Compound(f, args) if args.len() == 1 => unary(f, eval(&args[0])?),
        Term::Compound(f, args) if args.len() == 2 => binary(f, eval(&args[0])?, eval(&args[1])?),
        Term::Compound(f, args) => {
            Err(eval_err(format!("{f}/{} is not an arithmetic function", args.len())))
        }
    }
}

fn unary(op: &str, x: Number) -> Result<Number, SolveError> {
    use Number::*;
    match (op, x) {
        ("-", Int(i)) => int_op(i.checked_neg()),
        ("-", Float(f)) => finite(-f),
        ("+", n) => Ok(n),
        ("abs", Int(i)) => int_op(i.checked_abs()),
        ("abs", Float(f)) => finite(f.abs()),
        ("sign", Int(i)) => Ok(Int(i.signum())),
        ("sign", Float(f)) => finite(if f == 0.0 { 0.0 } else { f.signum() }),
        ("float", n) => finite(n.as_f64()),
        ("integer", Int(i)) => Ok(Int(i)),
        ("integer", Float(f)) => to_int(f.round()),
        ("float_integer_part", n) => finite(n.as_f64().trunc()),
        ("float_fractional_part", n) => finite(n.as_f64().fract()),
        ("truncate", Int(i)) | ("floor", Int(i)) | ("ceiling", Int(i)) | ("round", Int(i)) => Ok(Int(i)),
        ("truncate", Float(f)) => to_int(f.trunc()),
        ("floor", Float(f)) => to_int(f.floor()),
        ("ceiling", Float(f)) => to_int(f.ceil()),
        ("round", Float(f)) => to_int(f.round()),
        ("sqrt", n) if n.as_f64() < 0.0 => Err(eval_err("sqrt of negative number")),
        ("sqrt", n) => finite(n.as_f64().sqrt()),
        ("exp", n) => finite(n.as_f64().exp()),
        ("log", n) if n.as_f64() <= 0.0 => Err(eval_err("log of non-positive number")),
        ("log", n) => finite(n.as_f64().ln()),
        ("sin", n) => finite(n.as_f64().sin()),
        ("cos", n) => finite(n.as_f64().cos()),
        ("tan", n) => finite(n.as_f64().tan()),
        ("atan", n) => finite(n.as_f64().atan()),
        ("\\", n) => Ok(Int(!need_int(n, "\\")?)),
        (other, _) => Err(eval_err(format!("{other}/1 is not an arithmetic function"))),
    }
}

fn binary(op: &str, x: Number, y: Number) -> Result<Number, SolveError> {
    use Number::*;
    match op {
        "+" | "-" | "*" => match (x, y) {
            (Int(a), Int(b)) => int_op(match op {
                "+" => a.checked_add(b),
                "-" => a.checked_sub(b),
                _ => a.checked_mul(b),
            }),
            _ => {
                let (a, b) = (x.as_f64(), y.as_f64());
                finite(match op {
                    "+" => a + b,
                    "-" => a - b,
                    _ => a * b,
                })
            }
        },
        "/" => match (x, y) {
            // ISO float division: integer operands still give a float
            _ if y.as_f64() == 0.0 => Err(eval_err("division by zero")),
            _ => finite(x.as_f64() / y.as_f64()),
        },
        "//" | "mod" | "rem" | "div" => {
            let a = need_int(x, op)?;
            let b = need_int(y, op)?;
            if b == 0 {
                return Err(eval_err("division by zero"));
            }
            int_op(match op {
                "//" => a.checked_div(b),
                "rem" => a.checked_rem(b),
                "div" => a
                    .checked_div(b)
                    .map(|q| if a % b != 0 && ((a < 0) != (b < 0)) { q - 1 } else { q }),
                _ => a.checked_rem(b).map(|r| if r != 0 && ((r < 0) != (b < 0)) { r + b } else { r }),
            })
        }
        "min" | "max" => {
            let ord = compare(x, y);
            let pick_x = if op == "min" { ord != Ordering::Greater } else { ord != Ordering::Less };
            Ok(if pick_x { x } else { y })
        }
        "**" => finite(x.as_f64().powf(y.as_f64())),
        "^" => match (x, y) {
            (Int(a), Int(b)) => {
                if b < 0 {
                    match a {
                        1 => Ok(Int(1)),
                        -1 => Ok(Int(if b % 2 == 0 { 1 } else { -1 })),
                        _ => Err(eval_err("negative integer exponent")),
                    }
                } else {
                    let e = u32::try_from(b).map_err(|_| eval_err("integer overflow"))?;
                    int_op(a.checked_pow(e))
                }
            }
            _ => finite(x.as_f64().powf(y.as_f64())),
        },
        "atan2" | "atan" => finite(x.as_f64().atan2(y.as_f64())),
        ">>" => Ok(Int(need_int(x, op)? >> need_int(y, op)?.clamp(0, 63))),
        "<<" => int_op(need_int(x, op)?.checked_shl(need_int(y, op)?.clamp(0, 63) as u32)),
        "/\\" => Ok(Int(need_int(x, op)? & need_int(y, op)?)),
        "\\/" => Ok(Int(need_int(x, op)? | need_int(y, op)?)),
        "xor" => Ok(Int(need_int(x, op)? ^ need_int(y, op)?)),
        other => Err(eval_err(format!("{other}/2 is not an arithmetic function"))),
    }
}

/// Numeric ordering; mixed operands compare as floats.
pub fn compare(x: Number, y: Number) -> Ordering {
    match (x, y) {
        (Number::Int(a), Number::Int(b)) => a.cmp(&b),
        _ => x.as_f64().partial_cmp(&y.as_f64()).unwrap_or(Ordering::Equal),
    }
}

/// Evaluates `op(lhs, rhs)` for the six arithmetic comparisons. `None`
/// means `op` is not a comparison.
pub fn compare_op(op: &str) -> Option<fn(Ordering) -> bool> {
    Some(match op {
        "=:=" => |o| o == Ordering::Equal,
        "=\\=" => |o| o != Ordering::Equal,
        "<" => |o| o == Ordering::Less,
        ">" => |o| o == Ordering::Greater,
        "=<" => |o| o != Ordering::Greater,
        ">=" => |o| o != Ordering::Less,
        _ => return None,
    })
}
