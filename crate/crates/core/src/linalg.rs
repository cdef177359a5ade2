//! Sparse row echelon forms over an exact field.
//!
//! Rows are inserted one at a time and reduced against the existing pivots
//! in column order; the first surviving column becomes the new pivot. With a
//! fixed column order and a fixed insertion order the result is
//! deterministic.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeffs::RatFunc;

pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `None` for zero.
    fn inv(&self) -> Option<Self>;
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        RatFunc::inv(self).ok()
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

/// Sparse row: strictly increasing column indices with nonzero entries.
pub type SparseRow<F> = Vec<(usize, F)>;

#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    ncols: usize,
    /// Pivot column -> row whose first entry is `(col, 1)`.
    pivots: BTreeMap<usize, SparseRow<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `row` until its leading column has no pivot. Returns the
    /// remainder (empty when `row` lies in the row space) and stops early
    /// at the first non-pivot column.
    fn reduce_leading(&self, row: SparseRow<F>) -> BTreeMap<usize, F> {
        let mut acc: BTreeMap<usize, F> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        while let Some((&c, _)) = acc.first_key_value() {
            let Some(prow) = self.pivots.get(&c) else {
                break;
            };
            let f = acc.remove(&c).unwrap();
            for (cc, pv) in &prow[1..] {
                let delta = f.mul(pv);
                match acc.entry(*cc) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(delta.neg());
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let v = e.get().sub(&delta);
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                }
            }
        }
        acc
    }

    /// Adds a row to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow<F>) -> bool {
        let acc = self.reduce_leading(row);
        let Some((&c, lead)) = acc.first_key_value() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading entry");
        let normalized: SparseRow<F> = acc
            .into_iter()
            .map(|(k, v)| if k == c { (k, F::one()) } else { (k, v.mul(&inv)) })
            .collect();
        self.pivots.insert(c, normalized);
        true
    }

    /// Whether `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: SparseRow<F>) -> bool {
        self.reduce_leading(row).is_empty()
    }

    /// Reduced row echelon form: every pivot column is zero outside its
    /// own row. Rows are returned by increasing pivot column.
    pub fn reduced_rows(&self) -> Vec<SparseRow<F>> {
        let mut done: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut acc: BTreeMap<usize, F> = row.iter().cloned().collect();
            let tail: Vec<usize> = acc.keys().copied().filter(|&k| k != c && done.contains_key(&k)).collect();
            for k in tail {
                let Some(f) = acc.remove(&k) else { continue };
                for (cc, pv) in &done[&k][1..] {
                    let v = acc.get(cc).cloned().unwrap_or_else(F::zero).sub(&f.mul(pv));
                    if v.is_zero() {
                        acc.remove(cc);
                    } else {
                        acc.insert(*cc, v);
                    }
                }
            }
            done.insert(c, acc.into_iter().collect());
        }
        done.into_values().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rank_and_membership() {
        let mut e = Echelon::<BigRational>::new(3);
        assert!(e.insert(vec![(0, r(1)), (1, r(2))]));
        assert!(e.insert(vec![(1, r(1)), (2, r(1))]));
        assert!(!e.insert(vec![(0, r(2)), (1, r(5)), (2, r(1))]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(vec![(0, r(1)), (1, r(3)), (2, r(1))]));
        assert!(!e.contains(vec![(2, r(1))]));
        assert!(e.contains(Vec::new()));
    }

    #[test]
    fn reduced_form_clears_above_pivots() {
        let mut e = Echelon::<BigRational>::new(3);
        e.insert(vec![(0, r(1)), (1, r(2)), (2, r(3))]);
        e.insert(vec![(1, r(1)), (2, r(1))]);
        let rows = e.reduced_rows();
        assert_eq!(rows[0], vec![(0, r(1)), (2, r(1))]);
        assert_eq!(rows[1], vec![(1, r(1)), (2, r(1))]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Dense Gaussian elimination rank, an independent oracle.
        fn dense_rank(rows: &[Vec<i64>], ncols: usize) -> usize {
            let mut m: Vec<Vec<BigRational>> = rows.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect();
            let mut rank = 0;
            for c in 0..ncols {
                let Some(p) = (rank..m.len()).find(|&i| !Zero::is_zero(&m[i][c])) else { continue };
                m.swap(rank, p);
                for i in 0..m.len() {
                    if i != rank && !Zero::is_zero(&m[i][c]) {
                        let f = &m[i][c] / &m[rank][c];
                        for k in 0..ncols {
                            let d = &f * &m[rank][k];
                            m[i][k] -= d;
                        }
                    }
                }
                rank += 1;
            }
            rank
        }

        proptest! {
            #[test]
            fn rank_matches_dense(rows in prop::collection::vec(prop::collection::vec(-2i64..3, 5), 0..7)) {
                let mut e = Echelon::<BigRational>::new(5);
                for row in &rows {
                    e.insert(row.iter().enumerate().filter(|(_, v)| **v != 0).map(|(k, v)| (k, r(*v))).collect());
                }
                prop_assert_eq!(e.rank(), dense_rank(&rows, 5));
            }
        }
    }
}
