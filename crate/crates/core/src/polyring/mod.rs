//! Exact sparse multivariate polynomials over the rationals.
//!
//! Variables are indexed from 0 in the API; the text format uses `x1..xn`.

mod eval;
mod parse;

pub use eval::EvalPoly;
pub use parse::parse_poly;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector ordered by graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

/// Termwise split of a polynomial with respect to a pair of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSplit {
    /// Divisible by x_i but not x_j.
    pub f1: MultiPoly,
    /// Divisible by both.
    pub g: MultiPoly,
    /// Divisible by x_j but not x_i.
    pub f2: MultiPoly,
    /// Divisible by neither.
    pub f0: MultiPoly,
}

impl MonomialSplit {
    pub fn reconstruct(&self) -> MultiPoly {
        &(&(&self.f1 + &self.g) + &self.f2) + &self.f0
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational value of a finite double.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars > 0, "polynomials need at least one variable");
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, k: usize) -> Result<Self> {
        check_index(k, nvars)?;
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, k), BigRational::one());
        Ok(p)
    }

    pub fn monomial(c: BigRational, exps: Vec<u32>) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::NvarsMismatch {
                    left: e.len(),
                    right: nvars,
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn homogeneous_part(&self, degree: u32) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.nvars, BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `k`.
    pub fn derive(&self, k: usize) -> Result<MultiPoly> {
        check_index(k, self.nvars)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[k] -= 1;
            out.add_term(Monomial(exps), c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[BigRational]) -> Result<BigRational> {
        if x.len() != self.nvars {
            return Err(Error::NvarsMismatch {
                left: x.len(),
                right: self.nvars,
            });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t *= xi.pow(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation; for exact work use [`MultiPoly::eval`].
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        EvalPoly::new(self).eval(x)
    }

    /// Minimum exponent of `x_k` over all terms.
    pub fn valuation(&self, k: usize) -> Result<u32> {
        check_index(k, self.nvars)?;
        self.terms
            .keys()
            .map(|m| m.0[k])
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Exact quotient `g / self` when `self` divides `g`.
    ///
    /// Single-divisor reduction in graded lex order. If `self | g` then the
    /// leading monomial of every intermediate remainder is a multiple of the
    /// leading monomial of `self`, so the first failure proves non-divisibility.
    pub fn divides(&self, g: &MultiPoly) -> Result<Option<MultiPoly>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        check_same(self, g)?;
        let (lm, lc) = self.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut q = MultiPoly::zero(self.nvars);
        let mut r = g.clone();
        while let Some((rm, rc)) = r.leading_term() {
            let Some(t) = rm.div(&lm) else {
                return Ok(None);
            };
            let c = rc / &lc;
            r = &r - &self.mul_monomial(&t, &c);
            q.add_term(t, c);
        }
        Ok(Some(q))
    }

    pub fn split_monomials(&self, i: usize, j: usize) -> Result<MonomialSplit> {
        check_pair(i, j, self.nvars)?;
        let mut s = MonomialSplit {
            f1: MultiPoly::zero(self.nvars),
            g: MultiPoly::zero(self.nvars),
            f2: MultiPoly::zero(self.nvars),
            f0: MultiPoly::zero(self.nvars),
        };
        for (m, c) in &self.terms {
            let part = match (m.0[i] > 0, m.0[j] > 0) {
                (true, false) => &mut s.f1,
                (true, true) => &mut s.g,
                (false, true) => &mut s.f2,
                (false, false) => &mut s.f0,
            };
            part.terms.insert(m.clone(), c.clone());
        }
        Ok(s)
    }

    /// True when no term involves both `x_i` and `x_j`, i.e. the mixed
    /// partial in `x_i, x_j` vanishes identically.
    pub fn mixed_partial_vanishes(&self, i: usize, j: usize) -> Result<bool> {
        Ok(self.derive(i)?.derive(j)?.is_zero())
    }

    /// Substitutes `x -> x + c` exactly.
    pub fn shift(&self, c: &[BigRational]) -> Result<MultiPoly> {
        if c.len() != self.nvars {
            return Err(Error::NvarsMismatch {
                left: c.len(),
                right: self.nvars,
            });
        }
        let n = self.nvars;
        let deg = self.degree().unwrap_or(0) as usize;
        // powers[k][e] = (x_k + c_k)^e
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
        for (k, ck) in c.iter().enumerate() {
            let base = &MultiPoly::var(n, k)? + &MultiPoly::constant(n, ck.clone());
            let mut row = vec![MultiPoly::constant(n, BigRational::one())];
            for e in 1..=deg {
                let next = &row[e - 1] * &base;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = MultiPoly::zero(n);
        for (m, coef) in &self.terms {
            let mut t = MultiPoly::constant(n, coef.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[k][e as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Polynomial in the variables `keep` (in that order) after fixing every
    /// other variable `x_k` to `values[k]`.
    pub fn restrict(&self, keep: &[usize], values: &[BigRational]) -> Result<MultiPoly> {
        if values.len() != self.nvars {
            return Err(Error::NvarsMismatch {
                left: values.len(),
                right: self.nvars,
            });
        }
        for &k in keep {
            check_index(k, self.nvars)?;
        }
        let mut out = MultiPoly::zero(keep.len().max(1));
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 && !keep.contains(&k) {
                    coef *= values[k].pow(e as i32);
                }
            }
            let exps: Vec<u32> = if keep.is_empty() {
                vec![0]
            } else {
                keep.iter().map(|&k| m.0[k]).collect()
            };
            out.add_term(Monomial(exps), coef);
        }
        Ok(out)
    }

    /// Fixes the listed variables to constants, keeping the variable count.
    pub fn substitute(&self, assignments: &[(usize, BigRational)]) -> Result<MultiPoly> {
        for (k, _) in assignments {
            check_index(*k, self.nvars)?;
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut exps = m.0.clone();
            for (k, v) in assignments {
                let e = exps[*k];
                if e > 0 {
                    coef *= v.pow(e as i32);
                    exps[*k] = 0;
                }
            }
            out.add_term(Monomial(exps), coef);
        }
        Ok(out)
    }

    /// Largest absolute coefficient, as a double.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| rat_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

/// (x_i F_ii + F_i)(x_j F_jj + F_j) - x_i x_j F_ij^2.
pub fn build_g(f: &MultiPoly, i: usize, j: usize) -> Result<MultiPoly> {
    check_pair(i, j, f.nvars)?;
    let n = f.nvars;
    let fi = f.derive(i)?;
    let fj = f.derive(j)?;
    let fii = fi.derive(i)?;
    let fjj = fj.derive(j)?;
    let fij = fi.derive(j)?;
    let xi = MultiPoly::var(n, i)?;
    let xj = MultiPoly::var(n, j)?;
    let a = &(&xi * &fii) + &fi;
    let b = &(&xj * &fjj) + &fj;
    let cross = &(&xi * &xj) * &(&fij * &fij);
    Ok(&(&a * &b) - &cross)
}

pub(crate) fn check_index(k: usize, nvars: usize) -> Result<()> {
    if k >= nvars {
        Err(Error::IndexOutOfRange { index: k, nvars })
    } else {
        Ok(())
    }
}

pub(crate) fn check_pair(i: usize, j: usize, nvars: usize) -> Result<()> {
    check_index(i, nvars)?;
    check_index(j, nvars)?;
    if i == j {
        return Err(Error::SameIndex(i));
    }
    Ok(())
}

fn check_same(a: &MultiPoly, b: &MultiPoly) -> Result<()> {
    if a.nvars != b.nvars {
        Err(Error::NvarsMismatch {
            left: a.nvars,
            right: b.nvars,
        })
    } else {
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    /// Highest term first, e.g. `x1^2 - 3/2*x1*x2 + 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (k, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{}", k + 1)),
                    _ => factors.push(format!("x{}^{}", k + 1, e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
