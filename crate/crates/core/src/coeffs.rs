//! Exact coefficient arithmetic: Laurent polynomials in `q` with
//! arbitrary-precision integer coefficients, and the rational function
//! field `Q(q)` used by the exact linear algebra.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("cannot evaluate a Laurent polynomial at q = 0")]
    ZeroEvaluationPoint,
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed Laurent polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A Laurent polynomial `sum c_e q^e` stored as a strictly increasing list
/// of `(e, c_e)` pairs with every `c_e` nonzero. The zero polynomial is the
/// empty list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: Vec<(i64, BigInt)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let c = c.into();
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(e, c)] }
        }
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::monomial(1, e)
    }

    /// `(-q)^e`, which is `(-1)^e q^e` for any integer `e`.
    pub fn neg_q_pow(e: i64) -> Self {
        let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
        Self::monomial(sign, e)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// Builds a polynomial from arbitrary `(exponent, coefficient)` pairs,
    /// merging repeated exponents.
    pub fn from_terms<I, C>(iter: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut v: Vec<(i64, BigInt)> = iter.into_iter().map(|(e, c)| (e, c.into())).collect();
        v.sort_by_key(|(e, _)| *e);
        let mut terms: Vec<(i64, BigInt)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match terms.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e)
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.last().map(|(e, _)| *e)
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        match self.terms.binary_search_by_key(&e, |(x, _)| *x) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// `Some((c, e))` when the polynomial is the single term `c q^e`.
    pub fn as_monomial(&self) -> Option<(&BigInt, i64)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((c, *e)),
            _ => None,
        }
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    /// Image under `q -> 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    /// Exact value at a nonzero rational point.
    pub fn eval(&self, q0: &BigRational) -> Result<BigRational, CoeffError> {
        if q0.is_zero() {
            return Err(CoeffError::ZeroEvaluationPoint);
        }
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Ok(BigRational::zero());
        };
        // Horner in q0 over the shifted polynomial, then apply q0^lo.
        let mut acc = BigRational::zero();
        let mut idx = self.terms.len();
        let mut e = hi;
        loop {
            acc *= q0;
            if idx > 0 && self.terms[idx - 1].0 == e {
                acc += BigRational::from_integer(self.terms[idx - 1].1.clone());
                idx -= 1;
            }
            if e == lo {
                break;
            }
            e -= 1;
        }
        Ok(acc * pow_rational(q0, lo))
    }

    /// Integer content (gcd of coefficients), zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::zero(), |g, (_, c)| g.gcd(c))
    }

    fn add_impl(&self, rhs: &Self, negate_rhs: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &rhs.terms;
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate_rhs { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_rhs { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Self { terms: out }
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if let Some((c, e)) = rhs.as_monomial() {
            return Self {
                terms: self.terms.iter().map(|(x, d)| (x + e, d * c)).collect(),
            };
        }
        if let Some((c, e)) = self.as_monomial() {
            return Self {
                terms: rhs.terms.iter().map(|(x, d)| (x + e, c * d)).collect(),
            };
        }
        let lo = self.min_exp().unwrap() + rhs.min_exp().unwrap();
        let hi = self.max_exp().unwrap() + rhs.max_exp().unwrap();
        let mut buf = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                buf[(e1 + e2 - lo) as usize] += c1 * c2;
            }
        }
        Self {
            terms: buf
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (lo + k as i64, c))
                .collect(),
        }
    }
}

fn pow_rational(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*q^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = CoeffError;

    /// Parses the `c*q^e + c*q^e + ...` form written by `Display`.
    /// Whitespace around `+` is optional; repeated exponents are merged.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let err = |pos: usize, msg: &str| CoeffError::Parse { pos, msg: msg.to_string() };
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let read_int = |pos: &mut usize| -> Option<(usize, usize)> {
            let start = *pos;
            if *pos < bytes.len() && bytes[*pos] == b'-' {
                *pos += 1;
            }
            let digits = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            (*pos > digits).then_some((start, *pos))
        };

        skip_ws(&mut pos);
        if s[pos..].trim_end() == "0" {
            return Ok(Self::zero());
        }
        let mut raw = Vec::new();
        loop {
            skip_ws(&mut pos);
            let (a, b) = read_int(&mut pos).ok_or_else(|| err(pos, "expected integer coefficient"))?;
            let c: BigInt = s[a..b].parse().map_err(|_| err(a, "bad coefficient"))?;
            for &expect in b"*q^" {
                if bytes.get(pos) != Some(&expect) {
                    return Err(err(pos, &format!("expected '{}'", expect as char)));
                }
                pos += 1;
            }
            let (a, b) = read_int(&mut pos).ok_or_else(|| err(pos, "expected exponent"))?;
            let e: i64 = s[a..b].parse().map_err(|_| err(a, "exponent out of range"))?;
            raw.push((e, c));
            skip_ws(&mut pos);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'+' {
                return Err(err(pos, "expected '+'"));
            }
            pos += 1;
        }
        Ok(Self::from_terms(raw))
    }
}

macro_rules! forward_binop {
    ($Trait:ident, $method:ident, $body:expr) => {
        impl $Trait<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                let f: fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly = $body;
                f(self, rhs)
            }
        }
        impl $Trait<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl $Trait<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b, false));
forward_binop!(Sub, sub, |a, b| a.add_impl(b, true));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = self.add_impl(rhs, false);
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self = self.add_impl(rhs, true);
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

// ---------------------------------------------------------------------------
// Dense integer polynomials (ascending coefficients), used for gcds.

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn dense_content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn dense_primitive(p: &[BigInt]) -> Vec<BigInt> {
    let c = dense_content(p);
    if c.is_zero() || c.is_one() {
        return p.to_vec();
    }
    p.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of `a` by `b` (deg b >= 0, b nonzero).
fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= &lr * bc;
        }
        trim(&mut r);
        r = dense_primitive(&r);
    }
    r
}

/// Primitive gcd over `Z[q]` with positive leading coefficient.
fn dense_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut x = dense_primitive(a);
    let mut y = dense_primitive(b);
    trim(&mut x);
    trim(&mut y);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        if y.len() == 1 {
            return vec![BigInt::one()];
        }
        let r = prem(&x, &y);
        x = y;
        y = dense_primitive(&r);
    }
    if x.last().is_some_and(|c| c.is_negative()) {
        x = x.into_iter().map(|c| -c).collect();
    }
    x
}

/// Exact division in `Z[q]`; the caller guarantees `b | a`.
fn dense_divexact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return Vec::new();
    }
    let mut quo = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / &b[db];
        let shift = dr - db;
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= &c * bc;
        }
        quo[shift] = c;
        trim(&mut r);
    }
    quo
}

impl LaurentPoly {
    /// Splits `self = q^lo * dense` with `dense[0] != 0`.
    fn to_dense(&self) -> (i64, Vec<BigInt>) {
        let Some(lo) = self.min_exp() else {
            return (0, Vec::new());
        };
        let hi = self.max_exp().unwrap();
        let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (lo, v)
    }

    fn from_dense(lo: i64, v: Vec<BigInt>) -> Self {
        Self {
            terms: v
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (lo + k as i64, c))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------

/// An element of `Q(q)` kept in lowest terms.
///
/// The denominator is an ordinary polynomial with nonzero constant term and
/// positive leading coefficient; all powers of `q` live in the numerator.
/// Numerator and denominator share no nonconstant factor and no integer
/// factor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `Some` when the denominator is 1.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.den.is_one().then_some(&self.num)
    }

    fn reduce(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (dlo, dd) = den.to_dense();
        let (nlo, nd) = num.to_dense();
        let shift = nlo - dlo;
        if dd.len() == 1 {
            // Constant denominator: only an integer gcd.
            let d = &dd[0];
            let g = num.content().gcd(d);
            let sign = if d.is_negative() { -BigInt::one() } else { BigInt::one() };
            let num = LaurentPoly::from_dense(shift, nd.iter().map(|c| c * &sign / &g).collect());
            let den = LaurentPoly::constant(d * &sign / &g);
            return Self { num, den };
        }
        let g = dense_gcd(&nd, &dd);
        let (mut nd, mut dd) = if g.len() > 1 {
            (dense_divexact(&nd, &g), dense_divexact(&dd, &g))
        } else {
            (nd, dd)
        };
        let c = dense_content(&nd).gcd(&dense_content(&dd));
        let sign_neg = dd.last().unwrap().is_negative();
        if !c.is_one() || sign_neg {
            let c = if sign_neg { -c } else { c };
            nd = nd.iter().map(|x| x / &c).collect();
            dd = dd.iter().map(|x| x / &c).collect();
        }
        Self { num: LaurentPoly::from_dense(shift, nd), den: LaurentPoly::from_dense(0, dd) }
    }

    pub fn inv(&self) -> Result<Self, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn eval(&self, q0: &BigRational) -> Result<BigRational, CoeffError> {
        let d = self.den.eval(q0)?;
        if d.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(self.num.eval(q0)? / d)
    }
}

impl From<LaurentPoly> for RatFunc {
    fn from(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return RatFunc { num, den: self.den.clone() };
            }
            return RatFunc::reduce(num, self.den.clone());
        }
        let num = &self.num * &rhs.den + &rhs.num * &self.den;
        RatFunc::reduce(num, &self.den * &rhs.den)
    }
}

impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc { num: &self.num * &rhs.num, den: LaurentPoly::one() };
        }
        RatFunc::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn difference_of_squares() {
        let a = lp(&[(1, 1), (-1, -1)]);
        let b = lp(&[(1, 1), (-1, 1)]);
        assert_eq!(&a * &b, lp(&[(2, 1), (-2, -1)]));
    }

    #[test]
    fn additive_inverse_is_empty() {
        let q = LaurentPoly::q_pow(1);
        let z = &q + &(-&q);
        assert!(z.is_zero());
        assert_eq!(z.terms().count(), 0);
    }

    #[test]
    fn telescoping_product() {
        let a = lp(&[(0, 1), (1, -1)]);
        let b = lp(&[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(&a * &b, lp(&[(0, 1), (3, -1)]));
    }

    #[test]
    fn degree_bounds_add_under_multiplication() {
        let a = lp(&[(-3, 2), (4, 1)]);
        let b = lp(&[(-1, 5), (2, -7)]);
        let p = &a * &b;
        assert_eq!(p.min_exp(), Some(-4));
        assert_eq!(p.max_exp(), Some(6));
    }

    #[test]
    fn evaluation() {
        let p = lp(&[(2, 1), (-2, -1)]);
        assert_eq!(p.eval(&rat(2, 1)).unwrap(), rat(15, 4));
        assert_eq!(LaurentPoly::zero().eval(&rat(7, 3)).unwrap(), rat(0, 1));
        assert_eq!(LaurentPoly::q_pow(-1).eval(&rat(1, 2)).unwrap(), rat(2, 1));
        assert_eq!(p.eval(&rat(0, 1)), Err(CoeffError::ZeroEvaluationPoint));
    }

    #[test]
    fn neg_q_power_sign() {
        assert_eq!(LaurentPoly::neg_q_pow(-1), lp(&[(-1, -1)]));
        assert_eq!(LaurentPoly::neg_q_pow(-2), lp(&[(-2, 1)]));
        assert_eq!(LaurentPoly::neg_q_pow(3), lp(&[(3, -1)]));
    }

    #[test]
    fn ratfunc_inverse() {
        let f = RatFunc::from(lp(&[(1, 1), (0, -1)]));
        let g = f.inv().unwrap();
        assert_eq!(g.numerator(), &LaurentPoly::one());
        assert_eq!(g.denominator(), &lp(&[(1, 1), (0, -1)]));
        assert_eq!(RatFunc::zero().inv(), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn ratfunc_cancellation() {
        let a = RatFunc::new(LaurentPoly::one(), lp(&[(1, 1), (0, -1)])).unwrap();
        let b = RatFunc::new(LaurentPoly::one(), lp(&[(0, 1), (1, -1)])).unwrap();
        assert!((&a + &b).is_zero());
    }

    #[test]
    fn ratfunc_gcd_reduction() {
        let a = RatFunc::from(lp(&[(2, 1), (0, -1)]));
        let b = RatFunc::new(LaurentPoly::one(), lp(&[(1, 1), (0, -1)])).unwrap();
        let p = &a * &b;
        assert_eq!(p.numerator(), &lp(&[(1, 1), (0, 1)]));
        assert!(p.denominator().is_one());
    }

    #[test]
    fn ratfunc_clears_q_powers_into_numerator() {
        // (q^-1) / (q^2 + q^3) = q^-3 / (1 + q)
        let f = RatFunc::new(LaurentPoly::q_pow(-1), lp(&[(2, 1), (3, 1)])).unwrap();
        assert_eq!(f.numerator(), &LaurentPoly::q_pow(-3));
        assert_eq!(f.denominator(), &lp(&[(0, 1), (1, 1)]));
        // Negative leading denominator coefficient is normalized away.
        let g = RatFunc::new(LaurentPoly::constant(2), lp(&[(0, 4), (1, -6)])).unwrap();
        assert_eq!(g.numerator(), &LaurentPoly::constant(-1));
        assert_eq!(g.denominator(), &lp(&[(0, -2), (1, 3)]));
    }

    #[test]
    fn display_and_parse() {
        let p = lp(&[(-2, -1), (2, 1), (0, 7)]);
        let s = p.to_string();
        assert_eq!(s, "-1*q^-2 + 7*q^0 + 1*q^2");
        assert_eq!(s.parse::<LaurentPoly>().unwrap(), p);
        assert_eq!("0".parse::<LaurentPoly>().unwrap(), LaurentPoly::zero());
        assert_eq!("2*q^1+3*q^1".parse::<LaurentPoly>().unwrap(), lp(&[(1, 5)]));
        assert!("q^2".parse::<LaurentPoly>().is_err());
        assert!("1*q^99999999999999999999".parse::<LaurentPoly>().is_err());
        assert!("".parse::<LaurentPoly>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_laurent() -> impl Strategy<Value = LaurentPoly> {
            prop::collection::vec((-6i64..6, -20i64..20), 0..6).prop_map(LaurentPoly::from_terms)
        }

        fn arb_point() -> impl Strategy<Value = BigRational> {
            (1i64..40, 1i64..40, any::<bool>())
                .prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
        }

        fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
            (arb_laurent(), arb_laurent())
                .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
                .prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
        }

        proptest! {
            #[test]
            fn eval_is_multiplicative(a in arb_laurent(), b in arb_laurent(), x in arb_point()) {
                let lhs = (&a * &b).eval(&x).unwrap();
                prop_assert_eq!(lhs, a.eval(&x).unwrap() * b.eval(&x).unwrap());
            }

            #[test]
            fn canonical_equality(a in arb_laurent(), b in arb_laurent()) {
                prop_assert_eq!(a == b, (&a - &b).is_zero());
            }

            #[test]
            fn reduction_is_idempotent(f in arb_ratfunc()) {
                let again = RatFunc::new(f.numerator().clone(), f.denominator().clone()).unwrap();
                prop_assert_eq!(again, f);
            }

            #[test]
            fn field_axioms(f in arb_ratfunc(), g in arb_ratfunc(), h in arb_ratfunc()) {
                prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
                prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
                if !f.is_zero() {
                    prop_assert!((&f * &f.inv().unwrap()).is_one());
                }
            }

            #[test]
            fn ratfunc_eval_agrees(f in arb_ratfunc(), g in arb_ratfunc(), x in arb_point()) {
                let (Ok(fx), Ok(gx)) = (f.eval(&x), g.eval(&x)) else { return Ok(()); };
                if let Ok(v) = (&f * &g).eval(&x) {
                    prop_assert_eq!(v, &fx * &gx);
                }
                if let Ok(v) = (&f + &g).eval(&x) {
                    prop_assert_eq!(v, fx + gx);
                }
            }

            #[test]
            fn text_round_trip(a in arb_laurent()) {
                prop_assert_eq!(a.to_string().parse::<LaurentPoly>().unwrap(), a);
            }
        }
    }
}
