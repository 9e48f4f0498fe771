use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Monomial, MultiPoly};
use crate::error::{Error, Result};

/// Parses `c * x1^a1 * ... * xn^an` sums. Coefficients may be integers,
/// `p/q` fractions or finite decimals; `*` between factors is optional.
///
/// With `nvars = None` the variable count is the largest index seen.
pub fn parse_poly(src: &str, nvars: Option<usize>) -> Result<MultiPoly> {
    let terms = Parser { src, pos: 0 }.expr()?;
    let max_var = terms
        .iter()
        .flat_map(|(_, vars)| vars.iter().map(|&(k, _)| k + 1))
        .max()
        .unwrap_or(1);
    let n = match nvars {
        Some(n) if n < max_var => {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("x{max_var} exceeds declared {n} variables"),
            })
        }
        Some(0) => {
            return Err(Error::Parse {
                pos: 0,
                msg: "need at least one variable".into(),
            })
        }
        Some(n) => n,
        None => max_var,
    };
    let mut p = MultiPoly::zero(n);
    for (c, vars) in terms {
        let mut e = vec![0u32; n];
        for (k, a) in vars {
            e[k] += a;
        }
        p.add_term(Monomial(e), c);
    }
    Ok(p)
}

type Term = (BigRational, Vec<(usize, u32)>);

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        self.skip_ws();
        let mut sign = BigRational::one();
        match self.peek() {
            Some('-') => {
                self.bump();
                sign = -sign;
            }
            Some('+') => {
                self.bump();
            }
            None => return self.err("empty polynomial"),
            _ => {}
        }
        loop {
            let (c, vars) = self.term()?;
            out.push((c * &sign, vars));
            self.skip_ws();
            match self.bump() {
                None => break,
                Some('+') => sign = BigRational::one(),
                Some('-') => sign = -BigRational::one(),
                Some(ch) => {
                    self.pos -= ch.len_utf8();
                    return self.err(format!("unexpected '{ch}'"));
                }
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term> {
        let mut coef = BigRational::one();
        let mut vars = Vec::new();
        let mut first = true;
        loop {
            self.skip_ws();
            if !first {
                match self.peek() {
                    Some('*') => {
                        self.bump();
                        self.skip_ws();
                    }
                    Some(c) if c == 'x' || c.is_ascii_digit() || c == '.' => {}
                    _ => break,
                }
            }
            match self.peek() {
                Some('x') => {
                    self.bump();
                    let k = self.integer()?;
                    if k.is_zero() {
                        return self.err("variables are numbered from x1");
                    }
                    let k: usize = k.try_into().or_else(|_| self.err("variable index too large"))?;
                    self.skip_ws();
                    let mut e = 1u32;
                    if self.peek() == Some('^') {
                        self.bump();
                        self.skip_ws();
                        let v = self.integer()?;
                        e = v.try_into().or_else(|_| self.err("exponent too large"))?;
                    }
                    vars.push((k - 1, e));
                }
                Some(c) if c.is_ascii_digit() || c == '.' => {
                    let c = self.number()?;
                    coef *= c;
                }
                Some(ch) => return self.err(format!("expected factor, found '{ch}'")),
                None => return self.err("expected factor, found end of input"),
            }
            first = false;
        }
        Ok((coef, vars))
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt> {
        let d = self.digits();
        if d.is_empty() {
            return self.err("expected digits");
        }
        Ok(d.parse().expect("ascii digits"))
    }

    fn number(&mut self) -> Result<BigRational> {
        let int_part = self.digits().to_string();
        let mut frac_part = String::new();
        if self.peek() == Some('.') {
            self.bump();
            frac_part = self.digits().to_string();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return self.err("expected number");
        }
        let all = format!("{int_part}{frac_part}");
        let num: BigInt = all.parse().expect("ascii digits");
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let mut value = BigRational::new(num, den);
        let save = self.pos;
        self.skip_ws();
        if self.peek() == Some('/') {
            self.bump();
            self.skip_ws();
            let q = self.integer()?;
            if q.is_zero() {
                return self.err("zero denominator");
            }
            value /= BigRational::from_integer(q);
        } else {
            self.pos = save;
        }
        Ok(value)
    }
}
