//! Parser for coefficient literals: decimal integers, `p/q`, and polynomial
//! fractions like `(4*a-2)/(t+1)` with the field's declared variable names.

use num_bigint::BigInt;

use super::{Field, FieldValue};
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Int(s.parse().expect("digits")));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(s));
            }
            other => {
                return Err(Error::Parse(format!("unexpected character '{}'", other)));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<FieldValue, Error> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldValue, Error> {
        let mut acc = self.factor()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Star => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Token::Slash => {
                    self.next();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FieldValue, Error> {
        let mut negate = false;
        while matches!(self.peek(), Some(Token::Minus)) {
            self.next();
            negate = !negate;
        }
        let base = self.primary()?;
        let value = if let Some(Token::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Token::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    let mut acc = self.field.one();
                    for _ in 0..e {
                        acc = acc.mul(&base);
                    }
                    acc
                }
                _ => return Err(Error::Parse("expected integer exponent after '^'".into())),
            }
        } else {
            base
        };
        Ok(value.neg_if(negate))
    }

    fn primary(&mut self) -> Result<FieldValue, Error> {
        match self.next() {
            Some(Token::Int(n)) => {
                let i: i64 = (&n)
                    .try_into()
                    .map_err(|_| Error::Parse("integer literal too large".into()))?;
                Ok(self.field.int(i))
            }
            Some(Token::Ident(name)) => self.field.var(&name),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

pub fn parse_field_value(field: &Field, text: &str) -> Result<FieldValue, Error> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty coefficient literal".into()));
    }
    let mut p = Parser { field, tokens, pos: 0 };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in '{}'", text)));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_fractions() {
        let f = Field::Q;
        assert_eq!(f.parse("5").unwrap(), f.int(5));
        assert_eq!(f.parse("-3/4").unwrap(), f.ratio(-3, 4));
        assert_eq!(f.parse("1/2 + 1/3").unwrap(), f.ratio(5, 6));
    }

    #[test]
    fn polynomial_fractions() {
        let f = Field::rational_functions(["a", "t"]);
        let v = f.parse("(4*a-2)/(t+1)").unwrap();
        let a = f.var("a").unwrap();
        let t = f.var("t").unwrap();
        let expect = a.mul_int(4).sub(&f.int(2)).div(&t.add(&f.one())).unwrap();
        assert_eq!(v, expect);
    }

    #[test]
    fn powers_and_signs() {
        let f = Field::rational_functions(["a"]);
        let a = f.var("a").unwrap();
        assert_eq!(f.parse("a^2 - -1").unwrap(), a.mul(&a).add(&f.one()));
    }

    #[test]
    fn unknown_variable_rejected() {
        let f = Field::rational_functions(["a"]);
        assert!(f.parse("b + 1").is_err());
    }

    #[test]
    fn gf_literals() {
        let f = Field::Fp(5);
        assert_eq!(f.parse("7").unwrap(), f.int(2));
        assert_eq!(f.parse("1/2").unwrap(), f.int(3));
    }
}
