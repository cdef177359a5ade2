//! Quantum determinants over any q-twisted monomial algebra, principal
//! submatrices, the fermionic sum, and the determinantal identities used on
//! the way to the master theorem.

use thiserror::Error;

use crate::coeffs::LaurentPoly;
use crate::ncpoly::{AWord, Monomial, NcPoly, Poly};
use crate::relations::{CheckOutcome, IdealOracle, RelationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("expected {expected} entries for a square matrix, got {got}")]
    NotSquare { expected: usize, got: usize },
    #[error("row set has {rows} indices but column set has {cols}")]
    SizeMismatch { rows: usize, cols: usize },
    #[error("index {index} outside 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("entries must share rank {0}")]
    MixedRanks(usize),
}

/// Square matrix with entries in a single ambient algebra, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct NcMatrix<M: Monomial> {
    size: usize,
    rank: usize,
    entries: Vec<Poly<M>>,
}

impl<M: Monomial> NcMatrix<M> {
    pub fn new(rank: usize, size: usize, entries: Vec<Poly<M>>) -> Result<Self, MatrixError> {
        if entries.len() != size * size {
            return Err(MatrixError::NotSquare { expected: size * size, got: entries.len() });
        }
        if entries.iter().any(|e| e.rank() != rank) {
            return Err(MatrixError::MixedRanks(rank));
        }
        Ok(Self { size, rank, entries })
    }

    /// Entry `(i, j)` given by a closure on 1-based indices.
    pub fn from_fn(rank: usize, size: usize, mut f: impl FnMut(usize, usize) -> Poly<M>) -> Self {
        let entries = (1..=size).flat_map(|i| (1..=size).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self { size, rank, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// 1-based entry.
    pub fn get(&self, i: usize, j: usize) -> &Poly<M> {
        &self.entries[(i - 1) * self.size + (j - 1)]
    }

    fn check_indices(&self, idx: &[usize]) -> Result<(), MatrixError> {
        match idx.iter().find(|&&k| k == 0 || k > self.size) {
            Some(&index) => Err(MatrixError::IndexOutOfRange { index, size: self.size }),
            None => Ok(()),
        }
    }

    /// Rows `rows` and columns `cols` in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self, MatrixError> {
        if rows.len() != cols.len() {
            return Err(MatrixError::SizeMismatch { rows: rows.len(), cols: cols.len() });
        }
        self.check_indices(rows)?;
        self.check_indices(cols)?;
        Ok(Self::from_fn(self.rank, rows.len(), |i, j| self.get(rows[i - 1], cols[j - 1]).clone()))
    }

    /// Principal submatrix on the index set `j`.
    pub fn principal(&self, j: &[usize]) -> Result<Self, MatrixError> {
        self.submatrix(j, j)
    }

    /// The matrix with row `i` and the last column deleted.
    pub fn last_column_minor(&self, i: usize) -> Result<Self, MatrixError> {
        self.check_indices(&[i])?;
        let rows: Vec<usize> = (1..=self.size).filter(|&k| k != i).collect();
        let cols: Vec<usize> = (1..self.size).collect();
        self.submatrix(&rows, &cols)
    }

    pub fn swap_columns(&self, i: usize, j: usize) -> Result<Self, MatrixError> {
        self.check_indices(&[i, j])?;
        Ok(Self::from_fn(self.rank, self.size, |r, c| {
            let c = if c == i {
                j
            } else if c == j {
                i
            } else {
                c
            };
            self.get(r, c).clone()
        }))
    }
}

/// The matrix of free generators `a[i,j]`.
pub fn generic_matrix(r: usize) -> NcMatrix<AWord> {
    NcMatrix::from_fn(r, r, |i, j| NcPoly::gen(r, i, j))
}

/// Number of pairs `i < j` with `p[i] > p[j]`.
pub fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

/// Lexicographic successor, `false` once `p` is the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every permutation of `1..=n` in lexicographic order, with its inversion
/// count.
pub fn permutations(n: usize) -> impl Iterator<Item = (Vec<usize>, usize)> {
    let mut cur: Option<Vec<usize>> = Some((1..=n).collect());
    std::iter::from_fn(move || {
        let p = cur.take()?;
        let mut next = p.clone();
        if next_permutation(&mut next) {
            cur = Some(next);
        }
        let inv = inversions(&p);
        Some((p, inv))
    })
}

/// All subsets of `1..=r` as sorted vectors, ordered by bitmask.
pub fn subsets(r: usize) -> Vec<Vec<usize>> {
    (0u32..1 << r).map(|mask| (1..=r).filter(|&i| mask & (1 << (i - 1)) != 0).collect()).collect()
}

/// `sum over pi of (-q)^(-inv pi) b[pi(1),1] b[pi(2),2] ... b[pi(n),n]`.
pub fn qdet<M: Monomial>(m: &NcMatrix<M>) -> Poly<M> {
    let mut acc = Poly::zero(m.rank);
    for (p, inv) in permutations(m.size) {
        let mut term = Poly::scalar(m.rank, LaurentPoly::neg_q_pow(-(inv as i64)));
        for (col, &row) in p.iter().enumerate() {
            term = &term * m.get(row, col + 1);
        }
        acc.add_assign_ref(&term);
    }
    acc
}

/// `sum over J of (-1)^|J| qdet(M_J)` for principal submatrices `M_J`.
pub fn ferm_of<M: Monomial>(m: &NcMatrix<M>) -> Poly<M> {
    let mut acc = Poly::zero(m.rank);
    for j in subsets(m.size) {
        let d = qdet(&m.principal(&j).expect("subset indices are in range"));
        if j.len() % 2 == 0 {
            acc.add_assign_ref(&d);
        } else {
            acc = &acc - &d;
        }
    }
    acc
}

/// The fermionic sum of the generic rank-`r` matrix.
pub fn ferm(r: usize) -> NcPoly {
    ferm_of(&generic_matrix(r))
}

/// Expansion along the last column, as an exact identity in the free
/// algebra: `qdet(A) = sum_i (-q)^(i-n) qdet(A_i) a[i,n]`.
pub fn column_expansion_check(n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let a = generic_matrix(n);
    let mut rhs = NcPoly::zero(n);
    for i in 1..=n {
        let minor = qdet(&a.last_column_minor(i).unwrap());
        let t = &minor * a.get(i, n);
        rhs.add_assign_ref(&t.scale(&LaurentPoly::neg_q_pow(i as i64 - n as i64)));
    }
    qdet(&a) == rhs
}

/// Exponent `inv(ij)` for exchanging columns `i < j`: the exchange is
/// carried out by adjacent swaps, moving column `j` down to `i` and then
/// the displaced column back up, `2(j - i) - 1` swaps in total, each
/// contributing one factor `(-q)^-1`.
pub fn column_swap_exponent(i: usize, j: usize) -> i64 {
    2 * (j as i64 - i as i64) - 1
}

/// `qdet(A') - (-q)^(-e) qdet(A)` in the ideal, with `A'` the generic
/// matrix with columns `i` and `j` exchanged and `e` the given exponent.
pub fn column_swap_residual(r: usize, i: usize, j: usize, exponent: i64) -> NcPoly {
    let a = generic_matrix(r);
    let swapped = a.swap_columns(i, j).expect("column indices in range");
    &qdet(&swapped) - &qdet(&a).scale(&LaurentPoly::neg_q_pow(-exponent))
}

pub fn column_swap_check(oracle: &IdealOracle, i: usize, j: usize) -> Result<CheckOutcome, RelationError> {
    let r = oracle.rank();
    assert!(i < j && j <= r, "need i < j <= r");
    oracle.zero_mod_ideal(&column_swap_residual(r, i, j, column_swap_exponent(i, j)))
}

/// `sum_i (-q)^(i-r) qdet(A_i) a[i,j]`: the last-column expansion with
/// column `j` in place of column `r`.
pub fn equal_column_sum(r: usize, j: usize) -> NcPoly {
    let a = generic_matrix(r);
    let mut acc = NcPoly::zero(r);
    for i in 1..=r {
        let t = &qdet(&a.last_column_minor(i).unwrap()) * a.get(i, j);
        acc.add_assign_ref(&t.scale(&LaurentPoly::neg_q_pow(i as i64 - r as i64)));
    }
    acc
}

pub fn equal_column_vanishing_check(oracle: &IdealOracle, j: usize) -> Result<CheckOutcome, RelationError> {
    let r = oracle.rank();
    assert!(j >= 1 && j < r, "need 1 <= j < r");
    oracle.zero_mod_ideal(&equal_column_sum(r, j))
}
