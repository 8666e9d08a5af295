//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Construction-time algebra (products, partial derivatives, substitution of
//! fixed coordinates) is exact. Point evaluation runs in `f64` over a cached
//! copy of the terms, always in the canonical (lexicographically sorted
//! exponent) order so results are bit-reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exponent tuple, one entry per variable.
pub type Monomial = Vec<u32>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational value of a finite double.
pub fn from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::InvalidInput(format!("non-finite value {v}")))
}

/// Formats as `"num/den"` (denominator always present).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"`, a plain integer, or a decimal literal such as `"-2.5"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

#[derive(Clone)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
    cached: Vec<(f64, Monomial)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in mono.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self::from_map(nvars, BTreeMap::new())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; nvars], c);
        Self::from_map(nvars, terms)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut mono = vec![0; nvars];
        mono[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(mono, Rational::one());
        Self::from_map(nvars, terms)
    }

    /// Builds a polynomial from (coefficient, exponents) pairs, merging repeated
    /// monomials.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Monomial)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (c, mono) in terms {
            if mono.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: mono.len() });
            }
            *map.entry(mono).or_insert_with(Rational::zero) += c;
        }
        Ok(Self::from_map(nvars, map))
    }

    fn from_map(nvars: usize, mut terms: BTreeMap<Monomial, Rational>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let cached = terms.iter().map(|(m, c)| (to_f64(c), m.clone())).collect();
        Self { nvars, terms, cached }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &[u32]) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as i64).sum::<i64>())
            .max()
            .unwrap_or(-1)
    }

    /// Whether `x_i` appears in any term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m[i] > 0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check; panics on short input.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, mono) in &self.cached {
            let mut t = *c;
            for (xi, &e) in x.iter().zip(mono) {
                if e > 0 {
                    t *= xi.powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = Rational::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(mono) {
                if e > 0 {
                    t *= num_traits::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = BTreeMap::new();
        for (mono, c) in &self.terms {
            let e = mono[i];
            if e == 0 {
                continue;
            }
            let mut m = mono.clone();
            m[i] -= 1;
            out.insert(m, c * Rational::from_integer(BigInt::from(e)));
        }
        Self::from_map(self.nvars, out)
    }

    pub fn grad(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(m.clone()).or_insert_with(Rational::zero) += c;
        }
        Ok(Self::from_map(self.nvars, terms))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *terms.entry(m).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Ok(Self::from_map(self.nvars, terms))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect();
        Self::from_map(self.nvars, terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes exact values for some coordinates. The result lives in the
    /// remaining variables, kept in increasing index order.
    pub fn substitute(&self, fixed: &[(usize, Rational)]) -> Result<Self> {
        let mut is_fixed = vec![None; self.nvars];
        for (i, v) in fixed {
            if *i >= self.nvars {
                return Err(Error::InvalidInput(format!("coordinate {i} out of range")));
            }
            is_fixed[*i] = Some(v);
        }
        let keep: Vec<usize> = (0..self.nvars).filter(|&i| is_fixed[i].is_none()).collect();
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let mut coef = c.clone();
            for (i, &e) in mono.iter().enumerate() {
                if let Some(v) = is_fixed[i] {
                    if e > 0 {
                        coef *= num_traits::pow((*v).clone(), e as usize);
                    }
                }
            }
            let m: Monomial = keep.iter().map(|&i| mono[i]).collect();
            *terms.entry(m).or_insert_with(Rational::zero) += coef;
        }
        Ok(Self::from_map(keep.len(), terms))
    }

    /// Re-indexes into a larger variable space: variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(mono, c)| {
                let mut m = vec![0; nvars];
                for (i, &e) in mono.iter().enumerate() {
                    m[map[i]] += e;
                }
                (m, c.clone())
            })
            .collect();
        Self::from_map(nvars, terms)
    }

    /// Largest absolute coefficient as `f64`, used for scale-aware tolerances.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| to_f64(&c.abs())).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(&-rhs).expect("polynomial dimension mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// Evaluates a gradient (as returned by [`Polynomial::grad`]) at a point.
pub fn eval_grad(grad: &[Polynomial], x: &[f64]) -> Vec<f64> {
    grad.iter().map(|g| g.eval_unchecked(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, int(v))
    }

    #[test]
    fn eval_cap() {
        // 1 - x2^2 - x3^2
        let p = &(&c(3, 1) - &x(3, 1).pow(2)) - &x(3, 2).pow(2);
        assert_eq!(p.eval(&[0.0, 0.5, 0.0]).unwrap(), 0.75);
    }

    #[test]
    fn zero_poly() {
        let z = Polynomial::zero(2);
        assert_eq!(z.eval(&[3.0, -1.0]).unwrap(), 0.0);
        assert_eq!(z.degree(), -1);
        assert!(z.grad().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn product_root() {
        let p = &c(1, 3) + &x(1, 0);
        let q = &c(1, 3) - &x(1, 0);
        let pq = p.checked_mul(&q).unwrap();
        assert_eq!(pq.eval(&[3.0]).unwrap(), 0.0);
        assert_eq!(pq, &c(1, 9) - &x(1, 0).pow(2));
        assert_eq!(pq.checked_mul(&Polynomial::one(1)).unwrap(), pq);
    }

    #[test]
    fn dimension_errors() {
        let p = x(2, 0);
        assert!(matches!(p.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(p.checked_mul(&x(3, 0)).is_err());
    }

    #[test]
    fn gradients() {
        let p = &(&c(3, 1) - &x(3, 1).pow(2)) - &x(3, 2).pow(2);
        assert_eq!(p.partial(1), x(3, 1).scale(&int(-2)));
        let q = &(&x(2, 0).pow(2) + &(&x(2, 1) - &c(2, 1)).pow(2)) - &c(2, 1);
        let g = q.grad();
        assert_eq!(g[0], x(2, 0).scale(&int(2)));
        assert_eq!(g[1], &x(2, 1).scale(&int(2)) - &c(2, 2));
    }

    #[test]
    fn degree_additivity() {
        let f1 = &x(3, 0) + &c(3, 3);
        let f2 = &c(3, 3) - &x(3, 0);
        let f4 = &(&x(3, 0).pow(2) + &(&x(3, 1) - &c(3, 1)).pow(2)) - &c(3, 1);
        assert_eq!((&(&f1 * &f2) * &f4).degree(), 4);
    }

    #[test]
    fn substitution() {
        let p = &(&c(3, 1) - &x(3, 1).pow(2)) - &x(3, 2).pow(2);
        let s = p.substitute(&[(2, rat(1, 2))]).unwrap();
        assert_eq!(s.nvars(), 2);
        assert_eq!(s, &c(2, 1).scale(&rat(3, 4)) - &x(2, 1).pow(2));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-5/2").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("-2.5").unwrap(), rat(-5, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert!(parse_rational("1/0").is_err());
    }
}
