//! Generator words in `s`, `t`, `v<a>`.
//!
//! ```text
//! word   := factor (space+ factor)*
//! factor := base star? power?
//! base   := "s" | "t" | "v" uint
//! star   := "*"
//! power  := "^" uint
//! ```
//!
//! Star binds tighter than power: `s*^3 = (s*)^3`. `v1` is the identity;
//! composite indices such as `v6` stand for `W_(0,6) = v2 v3`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::monomial::{AlgebraElement, WMonomial};
use crate::semigroup::PNElement;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    S,
    T,
    V(BigInt),
}

impl Generator {
    pub fn element(&self) -> PNElement {
        match self {
            Generator::S => PNElement::s(),
            Generator::T => PNElement::t(),
            Generator::V(a) => PNElement::v(a.clone()).expect("v index is positive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub generator: Generator,
    pub starred: bool,
    pub power: u64,
}

impl Factor {
    pub fn new(generator: Generator, starred: bool, power: u64) -> Self {
        Factor {
            generator,
            starred,
            power,
        }
    }

    /// `g^power` or `(g^*)^power` as a single monomial.
    pub fn monomial(&self) -> WMonomial {
        let g = self.generator.element().pow(self.power);
        if self.starred {
            WMonomial::coisometry(g)
        } else {
            WMonomial::isometry(g)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenWord {
    pub factors: Vec<Factor>,
}

impl GenWord {
    pub fn new(factors: Vec<Factor>) -> Self {
        GenWord { factors }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).word()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Concatenation `self other`.
    pub fn then(mut self, other: &GenWord) -> GenWord {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    /// The letters `(g, starred)` with powers expanded, left to right.
    pub fn letters(&self) -> Vec<(PNElement, bool)> {
        self.factors
            .iter()
            .flat_map(|f| {
                let g = f.generator.element();
                std::iter::repeat_n((g, f.starred), f.power as usize)
            })
            .collect()
    }

    /// Left fold of the factor monomials; `None` when the word is zero.
    pub fn to_monomial(&self) -> Option<WMonomial> {
        self.factors
            .iter()
            .try_fold(WMonomial::one(), |acc, f| acc.mul(&f.monomial()))
    }
}

impl FromStr for GenWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GenWord::parse(s)
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match &fac.generator {
                Generator::S => write!(f, "s")?,
                Generator::T => write!(f, "t")?,
                Generator::V(a) => write!(f, "v{a}")?,
            }
            if fac.starred {
                write!(f, "*")?;
            }
            if fac.power != 1 {
                write!(f, "^{}", fac.power)?;
            }
        }
        Ok(())
    }
}

/// Parses and reduces a word; the result is zero or one unit-coefficient monomial.
pub fn word_to_element(word: &GenWord) -> AlgebraElement {
    AlgebraElement::from(word.to_monomial())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn word(mut self) -> Result<GenWord> {
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(GenWord { factors });
            }
            factors.push(self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        let generator = match self.peek() {
            Some('s') => {
                self.pos += 1;
                Generator::S
            }
            Some('t') => {
                self.pos += 1;
                Generator::T
            }
            Some('v') => {
                self.pos += 1;
                let at = self.pos;
                let a = self.uint("index after `v`")?;
                if a.is_zero() {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "v0 is not a generator (indices start at 1)".into(),
                    });
                }
                Generator::V(a)
            }
            Some(c) => return self.err(format!("expected `s`, `t` or `v`, found {c:?}")),
            None => return self.err("unexpected end of input"),
        };
        self.skip_ws();
        let starred = self.peek() == Some('*');
        if starred {
            self.pos += 1;
            self.skip_ws();
        }
        let mut power = 1;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let p = self.uint("exponent after `^`")?;
            power = u64::try_from(p).map_err(|_| Error::Parse {
                pos: at,
                msg: "exponent does not fit in 64 bits".into(),
            })?;
        }
        Ok(Factor {
            generator,
            starred,
            power,
        })
    }

    fn uint(&mut self, what: &str) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(format!("expected {what}"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }
}

/// `s^((k))`: `s^k` for `k >= 0`, `(s^*)^{-k}` for `k < 0`.
pub fn generalized_power(generator: Generator, k: i64) -> Factor {
    Factor::new(generator, k < 0, k.unsigned_abs())
}
