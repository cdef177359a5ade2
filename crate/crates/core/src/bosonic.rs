//! The bosonic side: linear forms `X_i`, the coefficients `G(m)`, truncated
//! `Bos(A)`, trace series, and the top-level checks of `Bos = 1 / Ferm`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::coeffs::LaurentPoly;
use crate::ncpoly::{AWord, CommPoly, MixedMonomial, MixedPoly, NcPoly};
use crate::qdet::{ferm, ferm_of, generic_matrix, permutations, qdet, subsets};
use crate::relations::{
    ArithMode, CheckOutcome, Flavor, IdealOracle, MembershipCertificate, RelationError, RelationSet, Rewriter,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("degree {degree} of {order} - 1 is not in the ideal; residual: {residual}")]
    DegreeFailed { degree: usize, order: ProductOrder, residual: String },
    #[error("{0} relations are not a supported setting for the master theorem")]
    UnsupportedFlavor(Flavor),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// `X_i = sum_j a[i,j] x_j`, for `i = 1..=r`.
pub fn make_x(r: usize) -> Vec<MixedPoly> {
    (1..=r)
        .map(|i| {
            let mut p = MixedPoly::zero(r);
            for j in 1..=r {
                let mut xv = vec![0; r];
                xv[j - 1] = 1;
                p.add_term(MixedMonomial::new(AWord::letter(i, j), xv), LaurentPoly::one());
            }
            p
        })
        .collect()
}

/// Multi-indices of length `r` with total `n`, in lexicographic order.
pub fn multi_indices(r: usize, n: u32) -> Vec<Vec<u32>> {
    if r == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in multi_indices(r - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Memoized products `X_1^{m_1} ... X_r^{m_r}`; each is the product for
/// `m - e_k` times `X_k`, `k` the last nonzero index.
#[derive(Debug, Clone)]
pub struct BosonicExpander {
    rank: usize,
    xs: Vec<MixedPoly>,
    memo: HashMap<Vec<u32>, MixedPoly>,
}

impl BosonicExpander {
    pub fn new(r: usize) -> Self {
        Self { rank: r, xs: make_x(r), memo: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn x_forms(&self) -> &[MixedPoly] {
        &self.xs
    }

    pub fn product(&mut self, m: &[u32]) -> MixedPoly {
        assert_eq!(m.len(), self.rank, "multi-index length");
        if let Some(p) = self.memo.get(m) {
            return p.clone();
        }
        let p = match m.iter().rposition(|&e| e > 0) {
            None => MixedPoly::one(self.rank),
            Some(k) => {
                let mut prev = m.to_vec();
                prev[k] -= 1;
                &self.product(&prev) * &self.xs[k]
            }
        };
        self.memo.insert(m.to_vec(), p.clone());
        p
    }

    /// `G(m)`: the coefficient of `x_1^{m_1} ... x_r^{m_r}`.
    pub fn g(&mut self, m: &[u32]) -> NcPoly {
        let xv: Vec<i32> = m.iter().map(|&e| e as i32).collect();
        self.product(m).coefficient_of_x(&xv)
    }

    /// `sum of G(m)` over `|m| <= n` with `m` supported in `support`
    /// (1-based indices).
    pub fn bos_supported(&mut self, n: usize, support: &[usize]) -> NcPoly {
        let mut acc = NcPoly::zero(self.rank);
        for d in 0..=n as u32 {
            for m in multi_indices(self.rank, d) {
                if m.iter().enumerate().all(|(i, &e)| e == 0 || support.contains(&(i + 1))) {
                    acc.add_assign_ref(&self.g(&m));
                }
            }
        }
        acc
    }

    pub fn bos_truncated(&mut self, n: usize) -> NcPoly {
        let all: Vec<usize> = (1..=self.rank).collect();
        self.bos_supported(n, &all)
    }

    pub fn tr_sym(&mut self, n: usize) -> NcPoly {
        let mut acc = NcPoly::zero(self.rank);
        for m in multi_indices(self.rank, n as u32) {
            acc.add_assign_ref(&self.g(&m));
        }
        acc
    }
}

pub fn g_coefficient(r: usize, m: &[u32]) -> NcPoly {
    BosonicExpander::new(r).g(m)
}

pub fn bos_truncated(r: usize, n: usize) -> NcPoly {
    BosonicExpander::new(r).bos_truncated(n)
}

pub fn tr_sym(r: usize, n: usize) -> NcPoly {
    BosonicExpander::new(r).tr_sym(n)
}

/// `sum over |J| = n of qdet(A_J)`.
pub fn tr_ext(r: usize, n: usize) -> NcPoly {
    let a = generic_matrix(r);
    let mut acc = NcPoly::zero(r);
    for j in subsets(r).into_iter().filter(|j| j.len() == n) {
        acc.add_assign_ref(&qdet(&a.principal(&j).unwrap()));
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductOrder {
    FermBos,
    BosFerm,
}

impl fmt::Display for ProductOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductOrder::FermBos => "ferm*bos",
            ProductOrder::BosFerm => "bos*ferm",
        })
    }
}

impl Serialize for ProductOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeEntry {
    pub degree: usize,
    pub order: ProductOrder,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MembershipCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_terms: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MasterReport {
    pub rank: usize,
    pub degree: usize,
    pub flavor: Flavor,
    pub entries: Vec<DegreeEntry>,
}

impl MasterReport {
    pub fn verdict(&self) -> bool {
        self.entries.iter().all(|e| e.verdict)
    }
}

/// How graded components are certified to vanish in the quotient.
pub enum Decider<'a> {
    Ideal(&'a IdealOracle),
    Rewrite(&'a mut Rewriter),
}

fn rewrite_certificate(degree: usize, verdict: bool, terms: usize) -> MembershipCertificate {
    MembershipCertificate {
        degree,
        mode: "rewrite".into(),
        verdict,
        matrix_rows: 0,
        matrix_cols: terms,
        eval_points: Vec::new(),
        elapsed_ms: None,
    }
}

impl Decider<'_> {
    /// Certifies each graded component of `p` in degrees `1..=max` (degree
    /// 0 is compared exactly by the caller).
    fn components(&mut self, p: &NcPoly, max: usize) -> Result<Vec<(usize, MembershipCertificate)>, RelationError> {
        let comps: Vec<(usize, NcPoly)> = (1..=max).map(|d| (d, p.graded_component(d))).collect();
        match self {
            Decider::Ideal(oracle) => comps
                .par_iter()
                .map(|(d, c)| {
                    let mut cert = oracle.member(c)?;
                    cert.degree = *d;
                    Ok((*d, cert))
                })
                .collect(),
            Decider::Rewrite(rw) => Ok(comps
                .iter()
                .map(|(d, c)| {
                    let nf = rw.normal_form(c);
                    (*d, rewrite_certificate(*d, nf.is_zero(), nf.len()))
                })
                .collect()),
        }
    }
}

/// Checks that `ferm * bos_N - 1` and `bos_N * ferm - 1` vanish in the
/// quotient through degree `n`, degree 0 exactly.
pub fn master_verify_with(decider: &mut Decider<'_>, r: usize, n: usize, flavor: Flavor) -> Result<MasterReport, VerifyError> {
    let f = ferm(r);
    let b = bos_truncated(r, n);
    let one = NcPoly::one(r);
    let mut entries = Vec::new();
    for order in [ProductOrder::FermBos, ProductOrder::BosFerm] {
        let prod = match order {
            ProductOrder::FermBos => f.mul_truncated(&b, n),
            ProductOrder::BosFerm => b.mul_truncated(&f, n),
        };
        let residual = &prod - &one;
        let zero = residual.graded_component(0);
        if !zero.is_zero() {
            return Err(VerifyError::DegreeFailed { degree: 0, order, residual: zero.to_string() });
        }
        entries.push(DegreeEntry { degree: 0, order, verdict: true, certificate: None, residual_terms: None });
        for (d, cert) in decider.components(&residual, n)? {
            if !cert.verdict {
                return Err(VerifyError::DegreeFailed {
                    degree: d,
                    order,
                    residual: residual.graded_component(d).to_string(),
                });
            }
            entries.push(DegreeEntry { degree: d, order, verdict: true, certificate: Some(cert), residual_terms: None });
        }
    }
    Ok(MasterReport { rank: r, degree: n, flavor, entries })
}

/// Right-quantum flavor by ideal membership, full-quantum by rewriting.
pub fn master_verify(r: usize, n: usize, flavor: Flavor, mode: ArithMode) -> Result<MasterReport, VerifyError> {
    match flavor {
        Flavor::RightQuantum => {
            let oracle = IdealOracle::new(RelationSet::for_flavor(flavor, r), mode)?;
            master_verify_with(&mut Decider::Ideal(&oracle), r, n, flavor)
        }
        Flavor::FullQuantum => {
            let mut rw = Rewriter::new(&RelationSet::for_flavor(flavor, r))?;
            master_verify_with(&mut Decider::Rewrite(&mut rw), r, n, flavor)
        }
        Flavor::LeftQuantum => Err(VerifyError::UnsupportedFlavor(flavor)),
    }
}

/// Commutative image at `q = 1`: `sum over |m| <= n` of the `x^m`
/// coefficient of `prod_i (sum_j a_ij x_j)^{m_i}`, computed in the
/// polynomial ring on the `r^2` entries and `r` extra variables, against
/// the series inverse of `det(I - A)` from the Leibniz formula.
pub fn classical_check(r: usize, n: usize) -> bool {
    classical_bos(r, n) == classical_inverse_det(r, n)
}

pub fn classical_bos(r: usize, n: usize) -> CommPoly {
    let nv = r * r + r;
    let xs: Vec<CommPoly> = (0..r)
        .map(|i| {
            let mut p = CommPoly::zero(nv);
            for j in 0..r {
                p = p.add(&CommPoly::var(nv, i * r + j).mul(&CommPoly::var(nv, r * r + j)));
            }
            p
        })
        .collect();
    let mut acc = CommPoly::zero(r * r);
    for d in 0..=n as u32 {
        for m in multi_indices(r, d) {
            let mut prod = CommPoly::one(nv);
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    prod = prod.mul(&xs[i]);
                }
            }
            for (e, c) in prod.terms() {
                if e[r * r..].iter().zip(&m).all(|(a, b)| a == b) {
                    acc.add_term(e[..r * r].to_vec(), c.clone());
                }
            }
        }
    }
    acc
}

pub fn classical_inverse_det(r: usize, n: usize) -> CommPoly {
    let nv = r * r;
    let entry = |i: usize, j: usize| {
        let a = CommPoly::var(nv, i * r + j);
        if i == j {
            CommPoly::one(nv).sub(&a)
        } else {
            CommPoly::zero(nv).sub(&a)
        }
    };
    let mut det = CommPoly::zero(nv);
    for (p, inv) in permutations(r) {
        let mut t = CommPoly::one(nv).scale(&BigInt::from(if inv % 2 == 0 { 1 } else { -1 }));
        for (col, &row) in p.iter().enumerate() {
            t = t.mul(&entry(row - 1, col));
        }
        det = det.add(&t);
    }
    // det = 1 - e with e of positive degree; 1/det = sum e^k.
    let e = CommPoly::one(nv).sub(&det);
    let mut acc = CommPoly::one(nv);
    let mut pow = CommPoly::one(nv);
    for _ in 0..n {
        pow = pow.mul_truncated(&e, Some(n as u32));
        acc = acc.add(&pow);
    }
    acc.truncate(n as u32)
}

/// `sum over J of (-1)^|J| Ferm(A_J) S_{J,N}`, where `S_{J,N}` sums `G(m)`
/// over `|m| <= N` supported in `J`; every component through degree `N`
/// must vanish in the quotient.
pub fn inclusion_exclusion_sum(expander: &mut BosonicExpander, n: usize) -> NcPoly {
    let r = expander.rank();
    let a = generic_matrix(r);
    let mut acc = NcPoly::zero(r);
    for j in subsets(r) {
        let f = ferm_of(&a.principal(&j).unwrap());
        let s = expander.bos_supported(n, &j);
        let t = f.mul_truncated(&s, n);
        if j.len() % 2 == 0 {
            acc.add_assign_ref(&t);
        } else {
            acc = &acc - &t;
        }
    }
    acc
}

pub fn inclusion_exclusion_check(oracle: &IdealOracle, n: usize) -> Result<CheckOutcome, RelationError> {
    let mut ex = BosonicExpander::new(oracle.rank());
    oracle.zero_mod_ideal(&inclusion_exclusion_sum(&mut ex, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse_nc_poly;
    use crate::relations::right_quantum_relations;

    fn nc(s: &str, r: usize) -> NcPoly {
        parse_nc_poly(s, r).unwrap()
    }

    #[test]
    fn linear_forms() {
        let xs = make_x(2);
        assert_eq!(xs[0].to_string(), "(1*q^0) a[1,1] x[1]^1 + (1*q^0) a[1,2] x[2]^1");
        for r in 1..=3 {
            for x in make_x(r) {
                assert_eq!(x.len(), r);
                assert!(x.terms().all(|(m, _)| m.aword.len() == 1 && m.xvec.iter().sum::<i32>() == 1));
            }
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_coefficient(2, &[0, 0]), NcPoly::one(2));
        assert_eq!(g_coefficient(2, &[1, 1]), nc("(1*q^0) a[1,1] a[2,2] + (1*q^1) a[1,2] a[2,1]", 2));
        assert_eq!(g_coefficient(2, &[2, 0]), nc("(1*q^0) a[1,1] a[1,1]", 2));
    }

    #[test]
    fn g_grading_and_row_content() {
        for r in 1..=3 {
            let mut ex = BosonicExpander::new(r);
            for d in 0..=4 {
                for m in multi_indices(r, d) {
                    let g = ex.g(&m);
                    assert!(!g.is_zero());
                    for (w, _) in g.terms() {
                        assert_eq!(w.len(), d as usize);
                        let mut rows = vec![0u32; r];
                        for l in w.letters() {
                            rows[l.row as usize - 1] += 1;
                        }
                        assert_eq!(rows, m);
                        assert!(w.letters().windows(2).all(|p| p[0].row <= p[1].row));
                    }
                }
            }
        }
    }

    #[test]
    fn bos_examples() {
        assert_eq!(
            bos_truncated(1, 3),
            nc("(1*q^0) 1 + (1*q^0) a[1,1] + (1*q^0) a[1,1] a[1,1] + (1*q^0) a[1,1] a[1,1] a[1,1]", 1)
        );
        assert_eq!(bos_truncated(2, 1), nc("(1*q^0) 1 + (1*q^0) a[1,1] + (1*q^0) a[2,2]", 2));
        let b2 = bos_truncated(2, 2).graded_component(2);
        let expect = &(&g_coefficient(2, &[2, 0]) + &g_coefficient(2, &[1, 1])) + &g_coefficient(2, &[0, 2]);
        assert_eq!(b2, expect);
    }

    #[test]
    fn traces() {
        for r in 1..=3 {
            assert_eq!(tr_sym(r, 0), NcPoly::one(r));
            assert_eq!(tr_ext(r, 0), NcPoly::one(r));
            assert!(tr_ext(r, r + 1).is_zero());
            let mut sym = NcPoly::zero(r);
            for n in 0..=3 {
                sym.add_assign_ref(&tr_sym(r, n));
            }
            assert_eq!(sym, bos_truncated(r, 3));
            let mut ext = NcPoly::zero(r);
            for n in 0..=r {
                let t = tr_ext(r, n);
                ext = if n % 2 == 0 { &ext + &t } else { &ext - &t };
                assert_eq!(ferm(r).graded_component(n), if n % 2 == 0 { t.clone() } else { -&t });
            }
            assert_eq!(ext, ferm(r));
        }
        assert_eq!(tr_ext(2, 1), nc("(1*q^0) a[1,1] + (1*q^0) a[2,2]", 2));
        assert_eq!(tr_ext(2, 2), nc("(1*q^0) a[1,1] a[2,2] + (-1*q^-1) a[2,1] a[1,2]", 2));
    }

    #[test]
    fn rank_one_telescopes() {
        let p = ferm(1).mul_truncated(&bos_truncated(1, 5), 5);
        assert_eq!(p, NcPoly::one(1));
        let report = master_verify(1, 5, Flavor::RightQuantum, ArithMode::Exact).unwrap();
        assert!(report.verdict());
        assert_eq!(report.entries.len(), 12);
    }

    #[test]
    fn rank_two_degree_two_residual_is_cross_generator() {
        let p = ferm(2).mul_truncated(&bos_truncated(2, 2), 2);
        let residual = p.graded_component(2);
        assert_eq!(residual, right_quantum_relations(2).generators[2]);
        let commutative = residual.specialize_q1_commutative();
        assert!(commutative.is_zero());
    }

    #[test]
    fn master_theorem_small() {
        for (r, n) in [(2, 4), (3, 3)] {
            let mode = ArithMode::Probabilistic { evals: 2, seed: 7 };
            let report = master_verify(r, n, Flavor::RightQuantum, mode).unwrap();
            assert!(report.verdict());
            assert_eq!(report.entries.len(), 2 * (n + 1));
            assert!(master_verify(r, n, Flavor::FullQuantum, mode).unwrap().verdict());
        }
        assert_eq!(
            master_verify(2, 2, Flavor::LeftQuantum, ArithMode::Exact).unwrap_err(),
            VerifyError::UnsupportedFlavor(Flavor::LeftQuantum)
        );
    }

    #[test]
    fn failing_degree_is_reported() {
        // With no relations at all the degree-2 residual survives.
        let rs = RelationSet { rank: 2, flavor: Flavor::RightQuantum, generators: Vec::new() };
        let oracle = IdealOracle::new(rs, ArithMode::Exact).unwrap();
        let err = master_verify_with(&mut Decider::Ideal(&oracle), 2, 2, Flavor::RightQuantum).unwrap_err();
        let VerifyError::DegreeFailed { degree, order, residual } = err else { panic!("{err}") };
        assert_eq!((degree, order), (2, ProductOrder::FermBos));
        assert_eq!(parse_nc_poly(&residual, 2).unwrap(), right_quantum_relations(2).generators[2]);
    }

    #[test]
    fn classical_limit() {
        for r in 1..=3 {
            assert!(classical_check(r, 3), "r = {r}");
        }
        // geometric series for r = 1
        let inv = classical_inverse_det(1, 4);
        assert_eq!(inv.terms().count(), 5);
        assert!(inv.terms().all(|(_, c)| *c == BigInt::from(1)));
        // agrees with the q = 1 image of the noncommutative expansion
        assert_eq!(bos_truncated(2, 3).specialize_q1_commutative(), classical_bos(2, 3));
    }

    #[test]
    fn inclusion_exclusion() {
        let mut ex = BosonicExpander::new(1);
        let s = inclusion_exclusion_sum(&mut ex, 4);
        assert!(s.is_zero());
        let oracle = IdealOracle::new(right_quantum_relations(2), ArithMode::Exact).unwrap();
        assert!(inclusion_exclusion_check(&oracle, 2).unwrap().verdict);
        // The empty subset contributes exactly S_empty = 1.
        assert_eq!(BosonicExpander::new(3).bos_supported(3, &[]), NcPoly::one(3));
    }
}
