//! Prefix S-expression serialization for rule trees, e.g.
//! `(div exp_dur (add 1.0 succ_count))`. Printing uses the shortest
//! round-trippable float form, so print -> parse -> print is exact.

use super::{Attribute, BinOp, Expr};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("operator `{op}` expects {expected} arguments, found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("trailing input after expression")]
    TrailingInput,
}

pub fn print<A: Attribute>(expr: &Expr<A>) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_expr<A: Attribute>(expr: &Expr<A>, out: &mut String) {
    match expr {
        Expr::Const(c) => out.push_str(&format!("{c:?}")),
        Expr::Attr(a) => out.push_str(a.name()),
        Expr::Neg(x) => {
            out.push_str("(neg ");
            write_expr(x, out);
            out.push(')');
        }
        Expr::Bin(op, a, b) => {
            out.push('(');
            out.push_str(op.name());
            out.push(' ');
            write_expr(a, out);
            out.push(' ');
            write_expr(b, out);
            out.push(')');
        }
    }
}

pub fn parse<A: Attribute>(text: &str) -> Result<Expr<A>, ParseError> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let expr = parse_expr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(ParseError::TrailingInput);
    }
    Ok(expr)
}

fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn parse_expr<A: Attribute>(tokens: &[String], pos: &mut usize) -> Result<Expr<A>, ParseError> {
    let token = tokens.get(*pos).ok_or(ParseError::UnexpectedEnd)?;
    *pos += 1;
    match token.as_str() {
        "(" => {
            let op = tokens.get(*pos).ok_or(ParseError::UnexpectedEnd)?.clone();
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(ParseError::UnexpectedEnd),
                    Some(t) if t == ")" => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_expr(tokens, pos)?),
                }
            }
            build_node(&op, args)
        }
        ")" => Err(ParseError::UnexpectedToken(")".into())),
        atom => parse_atom(atom),
    }
}

fn build_node<A: Attribute>(op: &str, mut args: Vec<Expr<A>>) -> Result<Expr<A>, ParseError> {
    let arity = |expected: usize, args: &Vec<Expr<A>>| -> Result<(), ParseError> {
        if args.len() != expected {
            Err(ParseError::Arity {
                op: op.to_string(),
                expected,
                found: args.len(),
            })
        } else {
            Ok(())
        }
    };
    if op == "neg" {
        arity(1, &args)?;
        return Ok(Expr::Neg(Box::new(args.pop().unwrap())));
    }
    let bin = BinOp::ALL.iter().find(|b| b.name() == op);
    match bin {
        Some(&b) => {
            arity(2, &args)?;
            let second = args.pop().unwrap();
            let first = args.pop().unwrap();
            Ok(Expr::Bin(b, Box::new(first), Box::new(second)))
        }
        None => Err(ParseError::UnknownSymbol(op.to_string())),
    }
}

fn parse_atom<A: Attribute>(atom: &str) -> Result<Expr<A>, ParseError> {
    if let Some(a) = A::parse(atom) {
        return Ok(Expr::Attr(a));
    }
    atom.parse::<f64>()
        .map(Expr::Const)
        .map_err(|_| ParseError::UnknownSymbol(atom.to_string()))
}
