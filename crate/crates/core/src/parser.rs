//! Surface syntax for terms.
//!
//! ```text
//! expr   := "zero" | "one" | "negone"
//!         | "proj" "(" nat "," nat ")"
//!         | ("const0" | "const1" | "constm1") "(" nat ")"
//!         | "jx" "[" nat "]" "(" [expr ("," expr)*] ")"
//!         | "cm" "(" expr "," expr ")"
//!         | ("pr" | "prc") "(" expr ";" expr ")"
//!         | "mn" "(" expr ")"
//!         | "lit" "(" rational ")"
//!         | library-name
//! rational := ["-"] nat ["/" nat | "." digits]
//! ```
//!
//! Error offsets are 1-based byte positions.

use serde_json::{json, Value};
use thiserror::Error;

use crate::stdlib::{self, StdName};
use crate::term::{Constant, Node, PrVariant, Term, TermError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("at offset {offset}: {source}")]
    Arity { offset: usize, source: TermError },
    #[error("bad term JSON: {0}")]
    Json(String),
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Arity { offset, .. } => Some(*offset),
            ParseError::Json(_) => None,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.pos + 1,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an expression");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        let at = self.pos;
        let d = self.digits()?;
        d.parse().or_else(|_| {
            self.pos = at;
            self.err("number too large")
        })
    }

    fn arity<T>(&self, at: usize, r: Result<T, TermError>) -> Result<T, ParseError> {
        r.map_err(|source| ParseError::Arity { offset: at + 1, source })
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let word = self.ident()?;
        match word {
            "zero" => Ok(Term::zero()),
            "one" => Ok(Term::one()),
            "negone" => Ok(Term::neg_one()),
            "proj" => {
                self.expect(b'(')?;
                let i = self.nat()?;
                self.expect(b',')?;
                let n = self.nat()?;
                self.expect(b')')?;
                self.arity(at, Term::proj(i, n))
            }
            "const0" | "const1" | "constm1" => {
                self.expect(b'(')?;
                let n = self.nat()?;
                self.expect(b')')?;
                Ok(stdlib::build(match word {
                    "const0" => StdName::Const0(n),
                    "const1" => StdName::Const1(n),
                    _ => StdName::ConstM1(n),
                }))
            }
            "jx" => {
                self.expect(b'[')?;
                let n = self.nat()?;
                self.expect(b']')?;
                self.expect(b'(')?;
                let mut children = Vec::new();
                if self.peek() != Some(b')') {
                    loop {
                        children.push(self.expr()?);
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect(b')')?;
                self.arity(at, Term::jx(n, children))
            }
            "cm" => {
                self.expect(b'(')?;
                let f = self.expr()?;
                self.expect(b',')?;
                let g = self.expr()?;
                self.expect(b')')?;
                self.arity(at, Term::cm(f, g))
            }
            "pr" | "prc" => {
                self.expect(b'(')?;
                let f = self.expr()?;
                self.expect(b';')?;
                let g = self.expr()?;
                self.expect(b')')?;
                let variant = if word == "pr" { PrVariant::Strict } else { PrVariant::Campagnolo };
                self.arity(at, Term::pr(f, g, variant))
            }
            "mn" => {
                self.expect(b'(')?;
                let f = self.expr()?;
                self.expect(b')')?;
                self.arity(at, Term::mn(f))
            }
            "lit" => {
                self.expect(b'(')?;
                let t = self.rational()?;
                self.expect(b')')?;
                Ok(t)
            }
            _ => match StdName::from_keyword(word) {
                Some(name) => Ok(stdlib::build(name)),
                None => {
                    self.pos = at;
                    self.err(format!("unknown name '{word}'"))
                }
            },
        }
    }

    fn rational(&mut self) -> Result<Term, ParseError> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let at = self.pos;
        let whole = self.digits()?;
        let (num, den): (String, String) = match self.src.get(self.pos) {
            Some(b'/') => {
                self.pos += 1;
                (whole.to_string(), self.digits()?.to_string())
            }
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits()?;
                (format!("{whole}{frac}"), format!("1{}", "0".repeat(frac.len())))
            }
            _ => (whole.to_string(), "1".to_string()),
        };
        let (Ok(p), Ok(q)) = (num.parse::<i64>(), den.parse::<u64>()) else {
            self.pos = at;
            return self.err("literal out of range");
        };
        stdlib::lit(if neg { -p } else { p }, q).or_else(|e| {
            self.pos = at;
            self.err(e.to_string())
        })
    }
}

pub fn parse(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let t = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(t)
}

pub fn print(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

/// Prints the term with every library name and projection expanded.
pub fn print_core(t: &Term) -> String {
    print(&t.to_core())
}

fn write_term(t: &Term, out: &mut String) {
    match t.node() {
        Node::Const(Constant::Zero) => out.push_str("zero"),
        Node::Const(Constant::One) => out.push_str("one"),
        Node::Const(Constant::MinusOne) => out.push_str("negone"),
        Node::Proj { index, arity } => out.push_str(&format!("proj({index},{arity})")),
        Node::Jx { inputs, children } => {
            out.push_str(&format!("jx[{inputs}]("));
            for (k, c) in children.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_term(c, out);
            }
            out.push(')');
        }
        Node::Cm { outer, inner } => {
            out.push_str("cm(");
            write_term(outer, out);
            out.push_str(", ");
            write_term(inner, out);
            out.push(')');
        }
        Node::Pr { init, step, variant } => {
            out.push_str(match variant {
                PrVariant::Strict => "pr(",
                PrVariant::Campagnolo => "prc(",
            });
            write_term(init, out);
            out.push_str("; ");
            write_term(step, out);
            out.push(')');
        }
        Node::Mn { body } => {
            out.push_str("mn(");
            write_term(body, out);
            out.push(')');
        }
        Node::Named { name, .. } => out.push_str(&name.to_string()),
    }
}

/// JSON form mirroring the surface syntax.
pub fn to_json(t: &Term) -> Value {
    match t.node() {
        Node::Const(Constant::Zero) => json!({"op": "zero"}),
        Node::Const(Constant::One) => json!({"op": "one"}),
        Node::Const(Constant::MinusOne) => json!({"op": "negone"}),
        Node::Proj { index, arity } => json!({"op": "proj", "args": [index, arity]}),
        Node::Jx { inputs, children } => json!({
            "op": "jx",
            "inputs": inputs,
            "children": children.iter().map(to_json).collect::<Vec<_>>(),
        }),
        Node::Cm { outer, inner } => json!({"op": "cm", "children": [to_json(outer), to_json(inner)]}),
        Node::Pr { init, step, variant } => json!({
            "op": if *variant == PrVariant::Strict { "pr" } else { "prc" },
            "children": [to_json(init), to_json(step)],
        }),
        Node::Mn { body } => json!({"op": "mn", "children": [to_json(body)]}),
        Node::Named { name, .. } => match name {
            StdName::Const0(n) | StdName::Const1(n) | StdName::ConstM1(n) => {
                json!({"op": name.keyword(), "args": [n]})
            }
            _ => json!({"op": name.keyword()}),
        },
    }
}

pub fn from_json(v: &Value) -> Result<Term, ParseError> {
    let bad = |m: &str| ParseError::Json(m.to_string());
    let op = v.get("op").and_then(Value::as_str).ok_or_else(|| bad("missing op"))?;
    let nat_args = || -> Result<Vec<usize>, ParseError> {
        v.get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing args"))?
            .iter()
            .map(|a| a.as_u64().map(|n| n as usize).ok_or_else(|| bad("args must be naturals")))
            .collect()
    };
    let children = || -> Result<Vec<Term>, ParseError> {
        v.get("children")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing children"))?
            .iter()
            .map(from_json)
            .collect()
    };
    let arity = |r: Result<Term, TermError>| r.map_err(|e| ParseError::Json(e.to_string()));
    let two = |mut c: Vec<Term>| -> Result<(Term, Term), ParseError> {
        if c.len() != 2 {
            return Err(bad("expected two children"));
        }
        let b = c.pop().expect("len 2");
        Ok((c.pop().expect("len 2"), b))
    };
    match op {
        "zero" => Ok(Term::zero()),
        "one" => Ok(Term::one()),
        "negone" => Ok(Term::neg_one()),
        "proj" => match nat_args()?[..] {
            [i, n] => arity(Term::proj(i, n)),
            _ => Err(bad("proj takes two args")),
        },
        "const0" | "const1" | "constm1" => match nat_args()?[..] {
            [n] => Ok(stdlib::build(match op {
                "const0" => StdName::Const0(n),
                "const1" => StdName::Const1(n),
                _ => StdName::ConstM1(n),
            })),
            _ => Err(bad("constant family takes one arg")),
        },
        "jx" => {
            let n = v.get("inputs").and_then(Value::as_u64).ok_or_else(|| bad("jx needs inputs"))?;
            arity(Term::jx(n as usize, children()?))
        }
        "cm" => {
            let (f, g) = two(children()?)?;
            arity(Term::cm(f, g))
        }
        "pr" | "prc" => {
            let (f, g) = two(children()?)?;
            let variant = if op == "pr" { PrVariant::Strict } else { PrVariant::Campagnolo };
            arity(Term::pr(f, g, variant))
        }
        "mn" => match &children()?[..] {
            [b] => arity(Term::mn(b.clone())),
            _ => Err(bad("mn takes one child")),
        },
        _ => StdName::from_keyword(op)
            .map(stdlib::build)
            .ok_or_else(|| bad(&format!("unknown op '{op}'"))),
    }
}
