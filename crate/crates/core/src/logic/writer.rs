//! Writer producing text that the reader maps back to the same term.

use std::fmt::{self, Write};

use super::ops;
use super::term::{Number, Term};

fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

/// Whether `name` can be written without quotes.
pub fn atom_needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if first.is_lowercase() {
        return !name.chars().all(|c| c.is_alphanumeric() || c == '_');
    }
    if matches!(name, "[]" | "!" | ";") {
        return false;
    }
    if name.chars().all(is_symbol_char) {
        // a lone `.` reads as an end token, `/*` opens a comment
        return name == "." || name.starts_with("/*");
    }
    true
}

pub fn write_atom(out: &mut impl Write, name: &str) -> fmt::Result {
    if !atom_needs_quotes(name) {
        return out.write_str(name);
    }
    out.write_char('\'')?;
    for c in name.chars() {
        match c {
            '\'' => out.write_str("\\'")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\t' => out.write_str("\\t")?,
            '\r' => out.write_str("\\r")?,
            '\0' => out.write_str("\\0")?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('\'')
}

pub fn write_number(out: &mut impl Write, n: Number) -> fmt::Result {
    match n {
        Number::Int(i) => write!(out, "{i}"),
        Number::Float(f) => {
            let s = format!("{f:?}");
            match s.find('e') {
                Some(idx) if !s[..idx].contains('.') => write!(out, "{}.0{}", &s[..idx], &s[idx..]),
                _ => out.write_str(&s),
            }
        }
    }
}

fn write_term(out: &mut impl Write, t: &Term, max: u16) -> fmt::Result {
    match t {
        Term::Var(v) => out.write_str(v),
        Term::Number(n) => write_number(out, *n),
        Term::Atom(a) => {
            if max < 1200 && ops::is_op(a) && &**a != "," {
                out.write_char('(')?;
                write_atom(out, a)?;
                out.write_char(')')
            } else {
                write_atom(out, a)
            }
        }
        Term::Compound(f, args) => {
            if &**f == "." && args.len() == 2 {
                return write_list(out, t);
            }
            if args.len() == 2 {
                if let Some(op) = ops::infix(f) {
                    let (lmax, rmax) = op.arg_priorities();
                    let wrap = op.priority > max;
                    if wrap {
                        out.write_char('(')?;
                    }
                    write_term(out, &args[0], lmax)?;
                    if &**f == "," {
                        out.write_str(", ")?;
                    } else {
                        out.write_char(' ')?;
                        out.write_str(f)?;
                        out.write_char(' ')?;
                    }
                    write_term(out, &args[1], rmax)?;
                    if wrap {
                        out.write_char(')')?;
                    }
                    return Ok(());
                }
            }
            if args.len() == 1 && !matches!(args[0], Term::Number(_)) {
                if let Some(op) = ops::prefix(f) {
                    let (_, rmax) = op.arg_priorities();
                    let wrap = op.priority > max;
                    if wrap {
                        out.write_char('(')?;
                    }
                    out.write_str(f)?;
                    out.write_char(' ')?;
                    // an operand that is itself an operator atom must be bracketed
                    write_term(out, &args[0], rmax.min(999))?;
                    if wrap {
                        out.write_char(')')?;
                    }
                    return Ok(());
                }
            }
            if &**f == "[]" {
                out.write_str("'[]'")?;
            } else {
                write_atom(out, f)?;
            }
            out.write_char('(')?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_char(',')?;
                }
                write_term(out, a, 999)?;
            }
            out.write_char(')')
        }
    }
}

fn write_list(out: &mut impl Write, t: &Term) -> fmt::Result {
    out.write_char('[')?;
    let mut cur = t;
    let mut first = true;
    loop {
        match cur {
            Term::Compound(f, args) if &**f == "." && args.len() == 2 => {
                if !first {
                    out.write_char(',')?;
                }
                write_term(out, &args[0], 999)?;
                first = false;
                cur = &args[1];
            }
            Term::Atom(a) if &**a == "[]" => break,
            other => {
                out.write_char('|')?;
                write_term(out, other, 999)?;
                break;
            }
        }
    }
    out.write_char(']')
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 1200)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_number(f, *self)
    }
}
