//! Text grammar for superalgebra elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | name | 'D' '(' name (',' name)* ')' | '(' expr ')'
//! ```
//!
//! Names are looked up in the symbol table. `D(f, x1, x2)` is the jet
//! `∂²f/∂x1∂x2` of a declared function symbol.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::superalgebra::symbols::MAX_COORDS;
use crate::superalgebra::{Scalar, SuperExpr, Symbol, Table, Var, VarKind};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Int(s.parse().unwrap()), l0, c0));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Ident(s), l0, c0));
            continue;
        }
        if "+-*/^(),".contains(c) {
            toks.push((Tok::Op(c), l0, c0));
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse { line: l0, column: c0, message: format!("unexpected character `{c}`") });
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (_, line, column) = self.toks[self.pos];
        Err(Error::Parse { line, column, message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }
}

/// Parses `text` into an element over `table`.
pub fn parse_expr(text: &str, table: &Table) -> Result<SuperExpr> {
    let mut lx = lex(text)?;
    let e = parse_sum(&mut lx, table)?;
    if *lx.peek() != Tok::End {
        return lx.err("unexpected trailing input");
    }
    Ok(e)
}

fn parse_sum(lx: &mut Lexer, t: &Table) -> Result<SuperExpr> {
    let mut acc = parse_product(lx, t)?;
    loop {
        match lx.peek() {
            Tok::Op('+') => {
                lx.next();
                acc = &acc + &parse_product(lx, t)?;
            }
            Tok::Op('-') => {
                lx.next();
                acc = &acc - &parse_product(lx, t)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_product(lx: &mut Lexer, t: &Table) -> Result<SuperExpr> {
    let mut acc = parse_unary(lx, t)?;
    loop {
        match lx.peek() {
            Tok::Op('*') => {
                lx.next();
                acc = &acc * &parse_unary(lx, t)?;
            }
            Tok::Op('/') => {
                lx.next();
                let d = parse_unary(lx, t)?;
                acc = &acc * &divisor(lx, &d)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn divisor(lx: &Lexer, d: &SuperExpr) -> Result<SuperExpr> {
    match d.invert_even() {
        Ok(inv) => Ok(inv),
        Err(e) => lx.err(format!("cannot divide: {e}")),
    }
}

fn parse_unary(lx: &mut Lexer, t: &Table) -> Result<SuperExpr> {
    if *lx.peek() == Tok::Op('-') {
        lx.next();
        return Ok(-&parse_unary(lx, t)?);
    }
    parse_power(lx, t)
}

fn parse_power(lx: &mut Lexer, t: &Table) -> Result<SuperExpr> {
    let base = parse_atom(lx, t)?;
    if *lx.peek() != Tok::Op('^') {
        return Ok(base);
    }
    lx.next();
    let negative = if *lx.peek() == Tok::Op('-') {
        lx.next();
        true
    } else {
        false
    };
    let e: u32 = match lx.next() {
        Tok::Int(k) => match u32::try_from(k) {
            Ok(k) => k,
            Err(_) => return lx.err("exponent too large"),
        },
        _ => return lx.err("expected an integer exponent"),
    };
    let p = base.pow(e);
    if negative {
        divisor(lx, &p)
    } else {
        Ok(p)
    }
}

fn parse_atom(lx: &mut Lexer, t: &Table) -> Result<SuperExpr> {
    match lx.peek().clone() {
        Tok::Int(k) => {
            lx.next();
            Ok(SuperExpr::scalar(t, Scalar::from_bigint(k)))
        }
        Tok::Op('(') => {
            lx.next();
            let e = parse_sum(lx, t)?;
            lx.expect(')')?;
            Ok(e)
        }
        Tok::Ident(name) if name == "D" && t.resolve("D").is_none() => {
            lx.next();
            lx.expect('(')?;
            let f = match lx.next() {
                Tok::Ident(f) => f,
                _ => return lx.err("expected a function name"),
            };
            let func = match t.resolve(&f) {
                Some(Symbol::Function(i)) => i,
                _ => return lx.err(format!("`{f}` is not a function symbol")),
            };
            let mut orders = [0u8; MAX_COORDS];
            while *lx.peek() == Tok::Op(',') {
                lx.next();
                let c = match lx.next() {
                    Tok::Ident(c) => c,
                    _ => return lx.err("expected a coordinate name"),
                };
                match t.resolve(&c) {
                    Some(Symbol::Even(v)) => match v.kind() {
                        VarKind::Coord(i) => orders[i] += 1,
                        _ => return lx.err(format!("`{c}` is not a coordinate")),
                    },
                    _ => return lx.err(format!("`{c}` is not a coordinate")),
                }
            }
            lx.expect(')')?;
            Ok(SuperExpr::scalar(t, Scalar::var(Var::jet(func, &orders))))
        }
        Tok::Ident(name) => {
            let sym = match t.resolve(&name) {
                Some(s) => s,
                None => return lx.err(format!("unknown symbol `{name}`")),
            };
            lx.next();
            Ok(match sym {
                Symbol::Even(v) => SuperExpr::scalar(t, Scalar::var(v)),
                Symbol::Odd(k) => SuperExpr::odd(t, k),
                Symbol::Function(i) => SuperExpr::scalar(t, Scalar::var(Var::jet(i, &[0; MAX_COORDS]))),
            })
        }
        Tok::End => lx.err("unexpected end of input"),
        Tok::Op(c) => lx.err(format!("unexpected `{c}`")),
    }
}
