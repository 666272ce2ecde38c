use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Whitehead-product expression over the wedge inclusions `α_1, …, α_k`.
///
/// Text form: `a1`, `a1.nu`, `[a1,a2].nu7`, `2 a1.x`, `[a1 - a2, a2.nu]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// `α_i`, 0-based.
    Gen(usize),
    Scale(BigInt, Box<Expr>),
    Sum(Vec<Expr>),
    Bracket(Box<Expr>, Box<Expr>),
    /// Precomposition with a named sphere class.
    Compose(Box<Expr>, String),
}

impl Expr {
    pub fn gen(i: usize) -> Expr {
        Expr::Gen(i)
    }

    pub fn zero() -> Expr {
        Expr::Sum(Vec::new())
    }

    pub fn bracket(a: Expr, b: Expr) -> Expr {
        Expr::Bracket(Box::new(a), Box::new(b))
    }

    pub fn compose(a: Expr, name: &str) -> Expr {
        Expr::Compose(Box::new(a), name.to_string())
    }

    pub fn scale(c: impl Into<BigInt>, a: Expr) -> Expr {
        Expr::Scale(c.into(), Box::new(a))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    /// `Σ c_i α_i`.
    pub fn linear(coeffs: &[BigInt]) -> Expr {
        Expr::Sum(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| if c.is_one() { Expr::Gen(i) } else { Expr::Scale(c.clone(), Box::new(Expr::Gen(i))) })
                .collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Replaces each `α_i` by `images[i]`.
    pub fn substitute(&self, images: &[Expr]) -> Result<Expr> {
        Ok(match self {
            Expr::Gen(i) => images
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Dimension(format!("no image for a{}", i + 1)))?,
            Expr::Scale(c, e) => Expr::Scale(c.clone(), Box::new(e.substitute(images)?)),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.substitute(images)).collect::<Result<_>>()?),
            Expr::Bracket(a, b) => Expr::bracket(a.substitute(images)?, b.substitute(images)?),
            Expr::Compose(e, name) => Expr::compose(e.substitute(images)?, name),
        })
    }

    /// Largest generator index plus one.
    pub fn rank_hint(&self) -> usize {
        match self {
            Expr::Gen(i) => i + 1,
            Expr::Scale(_, e) | Expr::Compose(e, _) => e.rank_hint(),
            Expr::Sum(v) => v.iter().map(Expr::rank_hint).max().unwrap_or(0),
            Expr::Bracket(a, b) => a.rank_hint().max(b.rank_hint()),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        let mut v = match self {
            Expr::Sum(v) => v,
            e => vec![e],
        };
        match rhs {
            Expr::Sum(w) => v.extend(w),
            e => v.push(e),
        }
        Expr::Sum(v)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Scale(c, e) => Expr::Scale(-c, e),
            e => Expr::Scale(BigInt::from(-1), Box::new(e)),
        }
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + -rhs
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> Error {
        Error::Parse(format!("{m} at offset {}", self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut neg = self.eat(b'-');
        loop {
            let t = self.term()?;
            terms.push(if neg { -t } else { t });
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let c: BigInt = std::str::from_utf8(&self.s[start..self.pos])
                .expect("ascii")
                .parse()
                .map_err(|_| self.err("bad integer"))?;
            self.eat(b'*');
            match self.peek() {
                Some(b'a' | b'[' | b'(') => Ok(Expr::Scale(c, Box::new(self.atom()?))),
                _ if c.is_zero() => Ok(Expr::zero()),
                _ => Err(self.err("a bare integer is only allowed for 0")),
            }
        } else {
            self.atom()
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos || !self.s[start].is_ascii_alphabetic() {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8(self.s[start..self.pos].to_vec()).expect("ascii"))
    }

    fn atom(&mut self) -> Result<Expr> {
        let mut e = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let a = self.sum()?;
                if !self.eat(b',') {
                    return Err(self.err("expected ','"));
                }
                let b = self.sum()?;
                if !self.eat(b']') {
                    return Err(self.err("expected ']'"));
                }
                Expr::bracket(a, b)
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                a
            }
            Some(b'a') => {
                let name = self.ident()?;
                let i: usize = name[1..].parse().map_err(|_| self.err("expected a generator a<i>"))?;
                if i == 0 {
                    return Err(self.err("generators are numbered from 1"));
                }
                Expr::Gen(i - 1)
            }
            _ => return Err(self.err("expected a term")),
        };
        while self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            e = Expr::compose(e, &self.ident()?);
        }
        Ok(e)
    }
}

fn needs_parens(e: &Expr) -> bool {
    matches!(e, Expr::Sum(v) if v.len() != 1) || matches!(e, Expr::Scale(..))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Gen(i) => write!(f, "a{}", i + 1),
            Expr::Scale(c, e) => {
                if c.is_one() && !needs_parens(e) {
                    write!(f, "{e}")
                } else if needs_parens(e) {
                    write!(f, "{c} ({e})")
                } else {
                    write!(f, "{c} {e}")
                }
            }
            Expr::Sum(v) if v.is_empty() => write!(f, "0"),
            Expr::Sum(v) => {
                for (n, t) in v.iter().enumerate() {
                    match t {
                        Expr::Scale(c, e) if n > 0 && c.is_negative() => {
                            write!(f, " - {}", Expr::Scale(-c, e.clone()))?;
                        }
                        _ if n > 0 => write!(f, " + {t}")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
            Expr::Bracket(a, b) => write!(f, "[{a}, {b}]"),
            Expr::Compose(e, name) => {
                if matches!(**e, Expr::Gen(_) | Expr::Bracket(..) | Expr::Compose(..)) {
                    write!(f, "{e}.{name}")
                } else {
                    write!(f, "({e}).{name}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let e = Expr::parse("[a1,a2].nu7").unwrap();
        assert_eq!(e, Expr::compose(Expr::bracket(Expr::Gen(0), Expr::Gen(1)), "nu7"));
        let e = Expr::parse("2 a1.x - a2").unwrap();
        assert_eq!(
            e,
            Expr::Sum(vec![Expr::scale(2, Expr::compose(Expr::Gen(0), "x")), -Expr::Gen(1)])
        );
        assert_eq!(Expr::parse("0").unwrap(), Expr::zero());
        assert_eq!(Expr::parse("a1.nup.nu7").unwrap().to_string(), "a1.nup.nu7");
        assert!(Expr::parse("a0").is_err());
        assert!(Expr::parse("[a1 a2]").is_err());
        assert!(Expr::parse("3").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["[a1 - a2, a2.nu]", "2 a1.x + a1.y - [a1, [a1, a2]]", "(a1 + a2).eta", "-3 [a1, a2].nu7"] {
            let e = Expr::parse(s).unwrap();
            assert_eq!(Expr::parse(&e.to_string()).unwrap(), e, "{s}");
        }
    }
}
