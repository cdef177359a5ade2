//! Polynomials over `Z[q, q^-1]` in noncommuting generators `a[i,j]`,
//! optionally decorated with sorted quantum-plane monomials `x^v`.
//!
//! All three algebras used by the crate (the free algebra, the mixed
//! `(a, x)` algebra and the operator algebra in `opcalc`) multiply
//! monomials into `q^k` times a monomial, so they share one generic
//! container, [`Poly`], parameterised by a [`Monomial`] type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::coeffs::{CoeffError, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

/// The generator `a[row, col]`, 1-based. Generators compare by `(row, col)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Gen {
    pub row: u8,
    pub col: u8,
}

impl Gen {
    pub fn new(row: usize, col: usize) -> Self {
        debug_assert!(row >= 1 && col >= 1 && row < 256 && col < 256);
        Self { row: row as u8, col: col as u8 }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a[{},{}]", self.row, self.col)
    }
}

/// A word in the generators; concatenation is the monoid product.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct AWord(pub Vec<Gen>);

impl AWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letter(row: usize, col: usize) -> Self {
        Self(vec![Gen::new(row, col)])
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self(pairs.iter().map(|&(i, j)| Gen::new(i, j)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn concat(&self, other: &AWord) -> AWord {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        AWord(v)
    }

    /// True when the letters are weakly increasing.
    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    fn write_letters(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Display for AWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            self.write_letters(f)
        }
    }
}

/// Monomials of a q-twisted monoid algebra.
pub trait Monomial: Clone + Ord + fmt::Debug + fmt::Display + Send + Sync {
    fn unit(rank: usize) -> Self;
    /// `self * rhs = q^k * m`, returned as `(k, m)`.
    fn twisted_mul(&self, rhs: &Self) -> (i64, Self);
    fn aword(&self) -> &AWord;
}

impl Monomial for AWord {
    fn unit(_rank: usize) -> Self {
        AWord::empty()
    }

    fn twisted_mul(&self, rhs: &Self) -> (i64, Self) {
        (0, self.concat(rhs))
    }

    fn aword(&self) -> &AWord {
        self
    }
}

/// Exponent of `q` produced by sorting `x^u x^v` into `x^{u+v}` using
/// `x_j x_i = q x_i x_j` for `i < j`: every `x_j` of the left factor that
/// must pass an `x_i` of the right factor with `i < j` contributes one `q`.
pub fn x_crossing(u: &[i32], v: &[i32]) -> i64 {
    let mut k = 0i64;
    let mut prefix = 0i64; // sum of v_j over j < i
    for i in 0..u.len().min(v.len()) {
        k += u[i] as i64 * prefix;
        prefix += v[i] as i64;
    }
    k
}

/// `a`-word times a sorted `x`-monomial `x_1^{v_1} ... x_r^{v_r}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MixedMonomial {
    pub aword: AWord,
    pub xvec: Vec<i32>,
}

impl MixedMonomial {
    pub fn new(aword: AWord, xvec: Vec<i32>) -> Self {
        Self { aword, xvec }
    }
}

impl Monomial for MixedMonomial {
    fn unit(rank: usize) -> Self {
        Self { aword: AWord::empty(), xvec: vec![0; rank] }
    }

    fn twisted_mul(&self, rhs: &Self) -> (i64, Self) {
        let k = x_crossing(&self.xvec, &rhs.xvec);
        let xvec = self.xvec.iter().zip(&rhs.xvec).map(|(a, b)| a + b).collect();
        (k, Self { aword: self.aword.concat(&rhs.aword), xvec })
    }

    fn aword(&self) -> &AWord {
        &self.aword
    }
}

impl fmt::Display for MixedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<_> = self.xvec.iter().enumerate().filter(|(_, e)| **e != 0).collect();
        if self.aword.is_empty() && xs.is_empty() {
            return write!(f, "1");
        }
        self.aword.write_letters(f)?;
        for (k, (i, e)) in xs.into_iter().enumerate() {
            if k > 0 || !self.aword.is_empty() {
                write!(f, " ")?;
            }
            write!(f, "x[{}]^{}", i + 1, e)?;
        }
        Ok(())
    }
}

/// A finite sum of monomials with nonzero Laurent coefficients, iterated in
/// monomial order.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<M: Monomial> {
    rank: usize,
    terms: BTreeMap<M, LaurentPoly>,
}

/// Element of the free algebra on `a[i,j]`.
pub type NcPoly = Poly<AWord>;
/// Element of the mixed `(a, x)` algebra.
pub type MixedPoly = Poly<MixedMonomial>;

impl<M: Monomial> Poly<M> {
    pub fn zero(rank: usize) -> Self {
        Self { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::term(rank, M::unit(rank), LaurentPoly::one())
    }

    pub fn term(rank: usize, m: M, c: LaurentPoly) -> Self {
        let mut p = Self::zero(rank);
        p.add_term(m, c);
        p
    }

    pub fn scalar(rank: usize, c: LaurentPoly) -> Self {
        Self::term(rank, M::unit(rank), c)
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn terms(&self) -> impl Iterator<Item = (&M, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &M) -> LaurentPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: M, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        Self {
            rank: self.rank,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.rank != rhs.rank {
            return Err(AlgebraError::RankMismatch(self.rank, rhs.rank));
        }
        let mut out = Self::zero(self.rank);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let (k, m) = m1.twisted_mul(m2);
                let c = c1 * c2;
                out.add_term(m, if k == 0 { c } else { c.shift(k) });
            }
        }
        Ok(out)
    }

    /// Product keeping only terms of a-degree at most `max_degree`.
    pub fn mul_truncated(&self, rhs: &Self, max_degree: usize) -> Self {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = Self::zero(self.rank);
        for (m1, c1) in &self.terms {
            let d1 = m1.aword().len();
            if d1 > max_degree {
                continue;
            }
            for (m2, c2) in &rhs.terms {
                if d1 + m2.aword().len() > max_degree {
                    continue;
                }
                let (k, m) = m1.twisted_mul(m2);
                out.add_term(m, (c1 * c2).shift(k));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.rank);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Sum of the terms whose a-word has length `d`.
    pub fn graded_component(&self, d: usize) -> Self {
        self.filter(|m| m.aword().len() == d)
    }

    pub fn filter(&self, mut keep: impl FnMut(&M) -> bool) -> Self {
        Self {
            rank: self.rank,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Distinct a-degrees present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(|m| m.aword().len()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.aword().len()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Applies a coefficient map, dropping terms that become zero.
    pub fn map_coeffs(&self, mut f: impl FnMut(&LaurentPoly) -> LaurentPoly) -> Self {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl<M: Monomial> fmt::Display for Poly<M> {
    /// Terms are written `(<laurent>) <monomial>` and joined by ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {m}")?;
        }
        Ok(())
    }
}

impl<M: Monomial> fmt::Debug for Poly<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<M: Monomial> Add<&Poly<M>> for &Poly<M> {
    type Output = Poly<M>;
    fn add(self, rhs: &Poly<M>) -> Poly<M> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<M: Monomial> Sub<&Poly<M>> for &Poly<M> {
    type Output = Poly<M>;
    fn sub(self, rhs: &Poly<M>) -> Poly<M> {
        let mut out = self.clone();
        out.add_assign_ref(&-rhs);
        out
    }
}

impl<M: Monomial> Neg for &Poly<M> {
    type Output = Poly<M>;
    fn neg(self) -> Poly<M> {
        Poly {
            rank: self.rank,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<M: Monomial> Mul<&Poly<M>> for &Poly<M> {
    type Output = Poly<M>;
    /// Panics on rank mismatch; use [`Poly::try_mul`] to recover.
    fn mul(self, rhs: &Poly<M>) -> Poly<M> {
        self.try_mul(rhs).expect("rank mismatch in polynomial product")
    }
}

impl<M: Monomial> std::iter::Sum for Poly<M> {
    /// Panics on an empty iterator (the rank would be unknown).
    fn sum<I: Iterator<Item = Self>>(mut iter: I) -> Self {
        let mut acc = iter.next().expect("sum of empty polynomial iterator");
        for p in iter {
            acc.add_assign_ref(&p);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Free-algebra specifics.

impl NcPoly {
    pub fn gen(rank: usize, row: usize, col: usize) -> Self {
        Self::term(rank, AWord::letter(row, col), LaurentPoly::one())
    }

    pub fn word(rank: usize, pairs: &[(usize, usize)], c: LaurentPoly) -> Self {
        Self::term(rank, AWord::from_pairs(pairs), c)
    }

    /// Image in the commutative polynomial ring on the `r^2` generators at
    /// `q = 1`.
    pub fn specialize_q1_commutative(&self) -> CommPoly {
        let r = self.rank;
        let mut out = CommPoly::zero(r * r);
        for (w, c) in &self.terms {
            let mut e = vec![0u32; r * r];
            for g in w.letters() {
                e[(g.row as usize - 1) * r + g.col as usize - 1] += 1;
            }
            out.add_term(e, c.at_one());
        }
        out
    }

    pub fn to_mixed(&self) -> MixedPoly {
        let mut out = MixedPoly::zero(self.rank);
        for (w, c) in &self.terms {
            out.add_term(MixedMonomial::new(w.clone(), vec![0; self.rank]), c.clone());
        }
        out
    }
}

impl MixedPoly {
    /// `x_i^e`, 1-based `i`.
    pub fn x_pow(rank: usize, i: usize, e: i32) -> Self {
        let mut v = vec![0; rank];
        v[i - 1] = e;
        Self::term(rank, MixedMonomial::new(AWord::empty(), v), LaurentPoly::one())
    }

    pub fn x_monomial(rank: usize, xvec: Vec<i32>) -> Self {
        Self::term(rank, MixedMonomial::new(AWord::empty(), xvec), LaurentPoly::one())
    }

    /// The pure a-part multiplying the sorted monomial `x^v`.
    pub fn coefficient_of_x(&self, v: &[i32]) -> NcPoly {
        let mut out = NcPoly::zero(self.rank);
        for (m, c) in &self.terms {
            if m.xvec == v {
                out.add_term(m.aword.clone(), c.clone());
            }
        }
        out
    }

    /// Groups terms by x-exponent vector.
    pub fn split_by_x(&self) -> BTreeMap<Vec<i32>, NcPoly> {
        let mut out: BTreeMap<Vec<i32>, NcPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.xvec.clone())
                .or_insert_with(|| NcPoly::zero(self.rank))
                .add_term(m.aword.clone(), c.clone());
        }
        out
    }
}

/// Commutative polynomial with integer coefficients in `nvars` variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl CommPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], BigInt::from(1));
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigInt::from(1));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    /// Product, dropping terms of total degree above `max_degree` when given.
    pub fn mul_truncated(&self, other: &Self, max_degree: Option<u32>) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &other.terms {
                let d2: u32 = e2.iter().sum();
                if max_degree.is_some_and(|n| d1 + d2 > n) {
                    continue;
                }
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, None)
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Text form.

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.s.len() - trimmed.len();
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{lit}'")))
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let rest = self.rest();
        let mut end = usize::from(rest.starts_with('-'));
        let digits = end;
        end += rest[end..].bytes().take_while(u8::is_ascii_digit).count();
        if end == digits {
            return Err(self.err("expected integer"));
        }
        let v = rest[..end].parse().map_err(|_| self.err("integer out of range"))?;
        self.pos += end;
        Ok(v)
    }

    fn index(&mut self, rank: usize) -> Result<usize, ParseError> {
        let at = self.pos;
        let v = self.int()?;
        if v < 1 || v as usize > rank {
            return Err(ParseError { pos: at, msg: format!("index {v} outside 1..={rank}") });
        }
        Ok(v as usize)
    }
}

/// Parses the text written by `Display` for [`MixedPoly`]. Letters
/// `a[i,j]` come first, then `x[i]^e` factors with strictly increasing `i`;
/// a bare `1` denotes the empty monomial.
pub fn parse_mixed_poly(s: &str, rank: usize) -> Result<MixedPoly, ParseError> {
    let mut cur = Cursor { s, pos: 0 };
    if rank == 0 || rank > u8::MAX as usize {
        return Err(cur.err(format!("unsupported rank {rank}")));
    }
    let mut out = MixedPoly::zero(rank);
    cur.skip_ws();
    if cur.rest().trim_end() == "0" {
        return Ok(out);
    }
    loop {
        cur.skip_ws();
        cur.expect("(")?;
        let close = cur
            .rest()
            .find(')')
            .ok_or_else(|| cur.err("unterminated coefficient"))?;
        let coeff: LaurentPoly = cur.rest()[..close].parse().map_err(|e: CoeffError| match e {
            CoeffError::Parse { pos, msg } => ParseError { pos: cur.pos + pos, msg },
            other => cur.err(other.to_string()),
        })?;
        cur.pos += close + 1;

        let mut letters = Vec::new();
        let mut xvec = vec![0i32; rank];
        let mut last_x = 0usize;
        let mut saw_unit = false;
        loop {
            let before = cur.pos;
            cur.skip_ws();
            if cur.eat("a[") {
                if last_x > 0 || saw_unit {
                    return Err(cur.err("a-letters must precede x-factors"));
                }
                let i = cur.index(rank)?;
                cur.expect(",")?;
                let j = cur.index(rank)?;
                cur.expect("]")?;
                letters.push(Gen::new(i, j));
            } else if cur.eat("x[") {
                let i = cur.index(rank)?;
                if i <= last_x {
                    return Err(cur.err("x-factors must have strictly increasing indices"));
                }
                cur.expect("]^")?;
                let e = cur.int()?;
                if e == 0 || e.abs() > i32::MAX as i64 {
                    return Err(cur.err("x-exponent must be a nonzero 32-bit integer"));
                }
                xvec[i - 1] = e as i32;
                last_x = i;
            } else if cur.rest().starts_with('1') && letters.is_empty() && last_x == 0 && !saw_unit {
                cur.pos += 1;
                saw_unit = true;
            } else {
                cur.pos = before;
                break;
            }
        }
        if letters.is_empty() && last_x == 0 && !saw_unit {
            return Err(cur.err("expected monomial"));
        }
        out.add_term(MixedMonomial::new(AWord(letters), xvec), coeff);
        cur.skip_ws();
        if cur.pos == s.len() {
            return Ok(out);
        }
        cur.expect("+")?;
    }
}

/// Parses a free-algebra polynomial; any `x` factor is an error.
pub fn parse_nc_poly(s: &str, rank: usize) -> Result<NcPoly, ParseError> {
    let mixed = parse_mixed_poly(s, rank)?;
    let mut out = NcPoly::zero(rank);
    for (m, c) in mixed.terms() {
        if m.xvec.iter().any(|&e| e != 0) {
            return Err(ParseError { pos: 0, msg: "unexpected x-factor in a pure a-polynomial".into() });
        }
        out.add_term(m.aword.clone(), c.clone());
    }
    Ok(out)
}
