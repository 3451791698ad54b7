//! Reader for the Prolog-like text syntax: terms, clauses and theories.

use std::fmt;

use super::ops;
use super::term::{Clause, Number, Term};

/// Malformed input, with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    /// Quoted names never act as operators.
    QName(String),
    Var(String),
    Num(Number),
    Str(String),
    Open,
    /// `(` directly after a name: functional notation.
    OpenCall,
    Close,
    OpenList,
    CloseList,
    Bar,
    Comma,
    End,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) | Tok::QName(n) => write!(f, "'{n}'"),
            Tok::Var(v) => write!(f, "variable {v}"),
            Tok::Num(_) => f.write_str("number"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Open | Tok::OpenCall => f.write_str("'('"),
            Tok::Close => f.write_str("')'"),
            Tok::OpenList => f.write_str("'['"),
            Tok::CloseList => f.write_str("']'"),
            Tok::Bar => f.write_str("'|'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of clause"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// No layout between this token and the previous one.
    glued: bool,
}

fn is_symbol_char(c: char) -> bool {
    "+-*/\\^<>=~:.?@#&$".contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError { line, column, message: message.into() }
    }

    /// Skips whitespace and comments; reports whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, SyntaxError> {
        let start = self.pos;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return Err(self.error(line, column, "unterminated block comment")),
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                        }
                    }
                }
                _ => return Ok(self.pos != start),
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut out: Vec<Token> = Vec::new();
        loop {
            let had_layout = self.skip_layout()?;
            let glued = !had_layout && !out.is_empty();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                out.push(Token { tok: Tok::Eof, line, column, glued });
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    self.bump();
                    let after_name = glued
                        && matches!(out.last().map(|t| &t.tok), Some(Tok::Name(_) | Tok::QName(_)));
                    if after_name {
                        Tok::OpenCall
                    } else {
                        Tok::Open
                    }
                }
                ')' => {
                    self.bump();
                    Tok::Close
                }
                '[' => {
                    self.bump();
                    Tok::OpenList
                }
                ']' => {
                    self.bump();
                    Tok::CloseList
                }
                '|' => {
                    self.bump();
                    Tok::Bar
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '!' => {
                    self.bump();
                    Tok::Name("!".into())
                }
                ';' => {
                    self.bump();
                    Tok::Name(";".into())
                }
                '\'' => {
                    self.bump();
                    Tok::QName(self.quoted('\'', line, column)?)
                }
                '"' => {
                    self.bump();
                    Tok::Str(self.quoted('"', line, column)?)
                }
                c if c.is_ascii_digit() => Tok::Num(self.number(line, column)?),
                c if c == '_' || c.is_uppercase() => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_alnum(c)) {
                        s.push(c);
                        self.bump();
                    }
                    Tok::Var(s)
                }
                c if c.is_alphabetic() => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_alnum(c)) {
                        s.push(c);
                        self.bump();
                    }
                    Tok::Name(s)
                }
                '.' if matches!(self.peek_at(1), None | Some('%')) || self.peek_at(1).is_some_and(char::is_whitespace) => {
                    self.bump();
                    Tok::End
                }
                c if is_symbol_char(c) => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|&c| is_symbol_char(c)) {
                        s.push(c);
                        self.bump();
                    }
                    Tok::Name(s)
                }
                other => return Err(self.error(line, column, format!("unexpected character {other:?}"))),
            };
            out.push(Token { tok, line, column, glued });
        }
    }

    fn quoted(&mut self, quote: char, line: usize, column: usize) -> Result<String, SyntaxError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, column, "unterminated quoted text")),
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        s.push(quote);
                    } else {
                        return Ok(s);
                    }
                }
                Some('\\') => {
                    let (el, ec) = (self.line, self.column);
                    match self.bump() {
                        Some('n') => s.push('\n'),
                        Some('t') => s.push('\t'),
                        Some('r') => s.push('\r'),
                        Some('0') => s.push('\0'),
                        Some('\\') => s.push('\\'),
                        Some('\'') => s.push('\''),
                        Some('"') => s.push('"'),
                        Some('`') => s.push('`'),
                        Some('\n') => {}
                        _ => return Err(self.error(el, ec, "invalid escape sequence")),
                    }
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn digits(&mut self, radix: u32) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_digit(radix) || *c == '_') {
            if c != '_' {
                s.push(c);
            }
            self.bump();
        }
        s
    }

    fn number(&mut self, line: usize, column: usize) -> Result<Number, SyntaxError> {
        if self.peek() == Some('0') {
            match self.peek_at(1) {
                Some('\'') => {
                    self.bump();
                    self.bump();
                    let c = match self.bump() {
                        Some('\\') => match self.bump() {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(c) => c,
                            None => return Err(self.error(line, column, "bad character code")),
                        },
                        Some('\'') if self.peek() == Some('\'') => {
                            self.bump();
                            '\''
                        }
                        Some(c) => c,
                        None => return Err(self.error(line, column, "bad character code")),
                    };
                    return Ok(Number::Int(c as i64));
                }
                Some(r @ ('x' | 'o' | 'b')) if self.peek_at(2).is_some_and(|c| c.is_ascii_hexdigit()) => {
                    let radix = match r {
                        'x' => 16,
                        'o' => 8,
                        _ => 2,
                    };
                    self.bump();
                    self.bump();
                    let ds = self.digits(radix);
                    return i64::from_str_radix(&ds, radix)
                        .map(Number::Int)
                        .map_err(|_| self.error(line, column, "integer out of range"));
                }
                _ => {}
            }
        }
        let mut text = self.digits(10);
        let mut is_float = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            self.bump();
            text.push('.');
            text.push_str(&self.digits(10));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let signed = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if signed { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                is_float = true;
                self.bump();
                text.push('e');
                if signed {
                    text.push(self.bump().unwrap());
                }
                text.push_str(&self.digits(10));
            }
        }
        if is_float {
            let v: f64 = text.parse().map_err(|_| self.error(line, column, "malformed float"))?;
            if !v.is_finite() {
                return Err(self.error(line, column, "float out of range"));
            }
            Ok(Number::Float(v))
        } else {
            text.parse::<i64>()
                .map(Number::Int)
                .map_err(|_| self.error(line, column, "integer out of range"))
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser { toks: Lexer::new(src).tokenize()?, pos: 0, anon: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, tok: &Token, message: impl Into<String>) -> SyntaxError {
        SyntaxError { line: tok.line, column: tok.column, message: message.into() }
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            Err(self.err_at(&t, format!("expected {want}, found {}", t.tok)))
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    /// Whether the upcoming token can begin a term (used to tell a prefix
    /// operator from a plain atom).
    fn starts_term(&self) -> bool {
        match &self.peek().tok {
            Tok::Name(n) => ops::infix(n).is_none() || ops::prefix(n).is_some(),
            Tok::QName(_) | Tok::Var(_) | Tok::Num(_) | Tok::Str(_) | Tok::Open | Tok::OpenList => true,
            _ => false,
        }
    }

    fn parse(&mut self, max: u16) -> Result<Term, SyntaxError> {
        let (mut left, mut left_prec) = self.primary()?;
        loop {
            let (name, tok) = match &self.peek().tok {
                Tok::Name(n) => (n.clone(), self.peek().clone()),
                Tok::Comma => (",".to_string(), self.peek().clone()),
                _ => break,
            };
            let Some(op) = ops::infix(&name) else {
                return Err(self.err_at(&tok, format!("operator expected, found '{name}'")));
            };
            let (lmax, rmax) = op.arg_priorities();
            if op.priority > max || left_prec > lmax {
                break;
            }
            self.next();
            let right = self.parse(rmax)?;
            left = Term::compound(&name, vec![left, right]);
            left_prec = op.priority;
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<(Term, u16), SyntaxError> {
        let t = self.next();
        match t.tok.clone() {
            Tok::Num(n) => Ok((Term::Number(n), 0)),
            Tok::Var(v) => {
                if v == "_" {
                    self.anon += 1;
                    Ok((Term::var(format!("__{}", self.anon)), 0))
                } else {
                    Ok((Term::var(v), 0))
                }
            }
            Tok::Str(s) => Ok((Term::list(s.chars().map(|c| Term::atom(c.to_string())).collect(), Term::nil()), 0)),
            Tok::Open | Tok::OpenCall => {
                let inner = self.parse(1200)?;
                self.expect(Tok::Close)?;
                Ok((inner, 0))
            }
            Tok::OpenList => {
                if self.peek().tok == Tok::CloseList {
                    self.next();
                    return self.after_name("[]".into(), false);
                }
                let mut items = vec![self.parse(999)?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    items.push(self.parse(999)?);
                }
                let tail = if self.peek().tok == Tok::Bar {
                    self.next();
                    self.parse(999)?
                } else {
                    Term::nil()
                };
                self.expect(Tok::CloseList)?;
                Ok((Term::list(items, tail), 0))
            }
            Tok::QName(name) => self.after_name(name, true),
            Tok::Name(name) => self.after_name(name, false),
            other => Err(self.err_at(&t, format!("unexpected {other}"))),
        }
    }

    fn after_name(&mut self, name: String, quoted: bool) -> Result<(Term, u16), SyntaxError> {
        if self.peek().tok == Tok::OpenCall {
            self.next();
            let mut args = vec![self.parse(999)?];
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.parse(999)?);
            }
            self.expect(Tok::Close)?;
            return Ok((Term::compound(name, args), 0));
        }
        if quoted {
            return Ok((Term::atom(name), 0));
        }
        // Negative numeric literal.
        if name == "-" {
            if let Tok::Num(n) = self.peek().tok.clone() {
                if self.peek().glued {
                    self.next();
                    let neg = match n {
                        Number::Int(i) => Number::Int(-i),
                        Number::Float(f) => Number::Float(-f),
                    };
                    return Ok((Term::Number(neg), 0));
                }
            }
        }
        if let Some(op) = ops::prefix(&name) {
            if self.starts_term() {
                let (_, rmax) = op.arg_priorities();
                let arg = self.parse(rmax)?;
                return Ok((Term::compound(name, vec![arg]), op.priority));
            }
        }
        Ok((Term::atom(name), 0))
    }
}

/// Parses a single term, optionally followed by a terminating `.`.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text)?;
    if p.at_eof() {
        let t = p.peek().clone();
        return Err(p.err_at(&t, "empty input"));
    }
    let term = p.parse(1200)?;
    if p.peek().tok == Tok::End {
        p.next();
    }
    if !p.at_eof() {
        let t = p.peek().clone();
        return Err(p.err_at(&t, format!("unexpected {} after term", t.tok)));
    }
    Ok(term)
}

/// Parses a sequence of `.`-terminated clauses. Empty input is a valid empty theory.
pub fn parse_theory(text: &str) -> Result<Vec<Clause>, SyntaxError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while !p.at_eof() {
        let start = p.peek().clone();
        let term = p.parse(1200)?;
        let end = p.next();
        if end.tok != Tok::End {
            return Err(p.err_at(&end, format!("expected end of clause, found {}", end.tok)));
        }
        clauses.push(clause_from_term(term).map_err(|m| p.err_at(&start, m))?);
    }
    Ok(clauses)
}

/// Parses exactly one clause.
pub fn parse_clause(text: &str) -> Result<Clause, SyntaxError> {
    let mut clauses = parse_theory(text)?;
    match clauses.len() {
        1 => Ok(clauses.pop().unwrap()),
        n => Err(SyntaxError { line: 1, column: 1, message: format!("expected one clause, found {n}") }),
    }
}

/// Splits a `Head :- Body` term into a clause, checking callability.
pub fn clause_from_term(term: Term) -> Result<Clause, String> {
    let (head, body) = match &term {
        Term::Compound(f, args) if &**f == ":-" && args.len() == 2 => (args[0].clone(), args[1].conjuncts()),
        Term::Compound(f, args) if &**f == ":-" && args.len() == 1 => {
            return Err("directives are not supported".into())
        }
        _ => (term, Vec::new()),
    };
    if !head.is_callable() {
        return Err("clause head must be an atom or compound term".into());
    }
    if let Some(bad) = body.iter().find(|g| matches!(g, Term::Number(_))) {
        return Err(format!("body goal {bad} is not callable"));
    }
    Ok(Clause { head, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_literal() {
        assert_eq!(parse_term("foo").unwrap(), Term::atom("foo"));
    }

    #[test]
    fn compound_with_variable() {
        assert_eq!(
            parse_term("grandparent(X, jacob)").unwrap(),
            Term::compound("grandparent", vec![Term::var("X"), Term::atom("jacob")])
        );
    }

    #[test]
    fn nested_compound() {
        assert_eq!(
            parse_term("f(g(1), Y)").unwrap(),
            Term::compound("f", vec![Term::compound("g", vec![Term::int(1)]), Term::var("Y")])
        );
    }

    #[test]
    fn facts_in_order() {
        let cs = parse_theory("p(1). p(2).").unwrap();
        assert_eq!(
            cs,
            vec![
                Clause::fact(Term::compound("p", vec![Term::int(1)])),
                Clause::fact(Term::compound("p", vec![Term::int(2)])),
            ]
        );
    }

    #[test]
    fn rule_body() {
        let cs = parse_theory("gp(X,Z) :- p(X,Y), p(Y,Z).").unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].body.len(), 2);
    }

    #[test]
    fn missing_terminator() {
        let e = parse_theory("p(1) q(2).").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
    }

    #[test]
    fn empty_theory_is_fine() {
        assert!(parse_theory("  % nothing\n").unwrap().is_empty());
    }

    #[test]
    fn operators_and_precedence() {
        let t = parse_term("X is 1 + 2 * 3 - 4").unwrap();
        assert_eq!(t.to_string(), "X is 1 + 2 * 3 - 4");
        let t = parse_term("a :- b, c ; d").unwrap();
        let Term::Compound(f, args) = &t else { panic!() };
        assert_eq!(&**f, ":-");
        assert_eq!(args[1].functor(), Some((";", 2)));
        assert_eq!(parse_term("- 1").unwrap(), Term::compound("-", vec![Term::int(1)]));
        assert_eq!(parse_term("-1").unwrap(), Term::int(-1));
        assert_eq!(parse_term("a - 1").unwrap(), Term::compound("-", vec![Term::atom("a"), Term::int(1)]));
        assert_eq!(parse_term("2 - -1").unwrap(), Term::compound("-", vec![Term::int(2), Term::int(-1)]));
    }

    #[test]
    fn negation_prefix() {
        let t = parse_term("\\+ p(1)").unwrap();
        assert_eq!(t.functor(), Some(("\\+", 1)));
    }

    #[test]
    fn lists_and_strings() {
        let t = parse_term("[a, b | T]").unwrap();
        assert_eq!(t, Term::list(vec![Term::atom("a"), Term::atom("b")], Term::var("T")));
        assert_eq!(parse_term("[]").unwrap(), Term::nil());
        assert_eq!(parse_term("\"ab\"").unwrap(), Term::list(vec![Term::atom("a"), Term::atom("b")], Term::nil()));
    }

    #[test]
    fn quoted_atoms_and_escapes() {
        assert_eq!(parse_term("'hello world'").unwrap(), Term::atom("hello world"));
        assert_eq!(parse_term("'it''s'").unwrap(), Term::atom("it's"));
        assert_eq!(parse_term("'a\\nb'").unwrap(), Term::atom("a\nb"));
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let t = parse_term("f(_, _)").unwrap();
        assert_eq!(t.variables().len(), 2);
    }

    #[test]
    fn floats_and_radix() {
        assert_eq!(parse_term("1.5").unwrap(), Term::float(1.5));
        assert_eq!(parse_term("1.0e10").unwrap(), Term::float(1.0e10));
        assert_eq!(parse_term("0'a").unwrap(), Term::int(97));
        assert_eq!(parse_term("0xff").unwrap(), Term::int(255));
    }

    #[test]
    fn comments_are_layout() {
        let cs = parse_theory("% c\np(1). /* block\n */ p(2).").unwrap();
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn error_positions() {
        let e = parse_term("f(a,").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_theory("p(1).\n  q(.").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_theory("p(1)").is_err());
        assert!(parse_theory("1 :- true.").is_err());
        assert!(parse_term("'abc").is_err());
    }
}
