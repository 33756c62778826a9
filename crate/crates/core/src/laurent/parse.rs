//! Expression syntax: integers, variables, the parameter `b`, named
//! substitutions, `+ - *`, parentheses and `^` with a (possibly negative)
//! integer exponent.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{LaurentPoly, ParamPoly};
use crate::error::{Error, Result};
use crate::lattice::rat_int;

/// Parses an expression over `vars`.
pub fn parse(expr: &str, vars: &[String]) -> Result<LaurentPoly> {
    parse_with(expr, vars, &BTreeMap::new())
}

/// Like [`parse`], with extra identifiers replaced by the given polynomials.
pub fn parse_with(
    expr: &str,
    vars: &[String],
    substitutions: &BTreeMap<String, LaurentPoly>,
) -> Result<LaurentPoly> {
    let mut p = Parser {
        tokens: tokenize(expr)?,
        pos: 0,
        vars,
        subs: substitutions,
    };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("trailing input in {expr:?}")));
    }
    out.with_vars(vars)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
    subs: &'a BTreeMap<String, LaurentPoly>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.checked_mul(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LaurentPoly> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<LaurentPoly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let n = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                i64::try_from(n).map_err(|_| Error::Overflow)?
            }
            t => return Err(Error::Parse(format!("expected exponent, found {t:?}"))),
        };
        base.pow(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<LaurentPoly> {
        let tok = self.peek().cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(n)) => Ok(LaurentPoly::constant(
                self.vars,
                ParamPoly::constant(rat_int(&n)),
            )),
            Some(Tok::Ident(name)) => {
                if self.vars.contains(&name) {
                    LaurentPoly::var(self.vars, &name)
                } else if name == "b" {
                    Ok(LaurentPoly::constant(self.vars, ParamPoly::b()))
                } else if let Some(p) = self.subs.get(&name) {
                    Ok(p.clone())
                } else {
                    Err(Error::UnknownVariable(name))
                }
            }
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence() {
        let v = vars(&["x"]);
        let p = parse("-x^2 + 2*x - 1", &v).unwrap();
        let q = parse("-(x - 1)^2", &v).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn negative_powers() {
        let v = vars(&["x", "y"]);
        let p = parse("(x*y)^-2", &v).unwrap();
        assert_eq!(p.as_monomial().unwrap().0, &[-2, -2]);
        assert!(parse("(1 + x)^-1", &v).is_err());
    }

    #[test]
    fn substitutions() {
        let v = vars(&["x"]);
        let mut subs = BTreeMap::new();
        subs.insert("a5".to_string(), parse("b^2", &[]).unwrap());
        let p = parse_with("a5*x", &v, &subs).unwrap();
        let (_, c) = p.as_monomial().unwrap();
        assert_eq!(c, &ParamPoly::term(2, rat(1, 1)));
        assert_eq!(parse("z", &v), Err(Error::UnknownVariable("z".into())));
    }

    #[test]
    fn malformed() {
        let v = vars(&["x"]);
        for s in ["x +", "(x", "x ^ y", "x $ 1", "x)"] {
            assert!(parse(s, &v).is_err(), "{s}");
        }
    }
}
