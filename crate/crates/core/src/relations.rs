//! Quadratic relation ideals on the generators `a[i,j]`, a decision
//! procedure for membership in a fixed degree, and normal forms for the
//! full-quantum algebra.
//!
//! Every generator is homogeneous in the a-degree and also in the row and
//! column content of its words (how many letters come from each row and
//! each column). The degree-`d` piece of the ideal therefore splits into
//! independent blocks, one per content, and membership is decided block by
//! block by sparse elimination on the spanning set `u * g * v`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{LaurentPoly, RatFunc};
use crate::linalg::{Echelon, Field, SparseRow};
use crate::ncpoly::{AWord, Gen, NcPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("membership needs a homogeneous element, found degrees {0:?}")]
    Inhomogeneous(Vec<usize>),
    #[error("probabilistic mode needs at least one evaluation point")]
    NoEvaluationPoints,
    #[error("rewriting is only certified for the full-quantum relations, not {0}")]
    RewriteUnsupported(Flavor),
    #[error("relations admit no orientation onto sorted words: {0}")]
    NoOrientation(String),
    #[error("rank mismatch: element has rank {0}, relations have rank {1}")]
    RankMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    RightQuantum,
    LeftQuantum,
    FullQuantum,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::RightQuantum => "right-quantum",
            Flavor::LeftQuantum => "left-quantum",
            Flavor::FullQuantum => "full-quantum",
        })
    }
}

impl FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "right-quantum" => Ok(Flavor::RightQuantum),
            "left-quantum" => Ok(Flavor::LeftQuantum),
            "full-quantum" => Ok(Flavor::FullQuantum),
            other => Err(format!("unknown flavor '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationSet {
    pub rank: usize,
    pub flavor: Flavor,
    pub generators: Vec<NcPoly>,
}

fn word2(r: usize, x: (usize, usize), y: (usize, usize), c: LaurentPoly) -> NcPoly {
    NcPoly::word(r, &[x, y], c)
}

fn q(e: i64) -> LaurentPoly {
    LaurentPoly::q_pow(e)
}

fn neg_q(e: i64) -> LaurentPoly {
    -LaurentPoly::q_pow(e)
}

/// `x y - q * y x`, i.e. the relation `x y = q y x`.
fn q_commutator(r: usize, x: (usize, usize), y: (usize, usize)) -> NcPoly {
    &word2(r, x, y, q(0)) - &word2(r, y, x, q(1))
}

fn pairs(r: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=r).flat_map(move |i| (i + 1..=r).map(move |k| (i, k)))
}

/// Column q-commutation followed by the cross relation of every 2x2 minor.
pub fn right_quantum_relations(r: usize) -> RelationSet {
    let mut gens = Vec::new();
    for j in 1..=r {
        for (i, k) in pairs(r) {
            // c a - q a c with a = a[i,j], c = a[k,j]
            gens.push(q_commutator(r, (k, j), (i, j)));
        }
    }
    for (i, k) in pairs(r) {
        for (j, l) in pairs(r) {
            gens.push(cross_relation(r, i, k, j, l, false));
        }
    }
    RelationSet { rank: r, flavor: Flavor::RightQuantum, generators: gens }
}

/// `a d - d a - q^-1 c b + q b c` for rows `i < k`, columns `j < l`
/// (`a = a[i,j], b = a[i,l], c = a[k,j], d = a[k,l]`); with `transpose` the
/// roles of `b` and `c` swap.
fn cross_relation(r: usize, i: usize, k: usize, j: usize, l: usize, transpose: bool) -> NcPoly {
    let (a, d) = ((i, j), (k, l));
    let (mut b, mut c) = ((i, l), (k, j));
    if transpose {
        std::mem::swap(&mut b, &mut c);
    }
    let mut g = word2(r, a, d, q(0));
    g.add_assign_ref(&word2(r, d, a, neg_q(0)));
    g.add_assign_ref(&word2(r, c, b, neg_q(-1)));
    g.add_assign_ref(&word2(r, b, c, q(1)));
    g
}

/// Row q-commutation and the transposed cross relation.
pub fn left_quantum_relations(r: usize) -> RelationSet {
    let mut gens = Vec::new();
    for i in 1..=r {
        for (j, l) in pairs(r) {
            // b a - q a b with a = a[i,j], b = a[i,l]
            gens.push(q_commutator(r, (i, l), (i, j)));
        }
    }
    for (i, k) in pairs(r) {
        for (j, l) in pairs(r) {
            gens.push(cross_relation(r, i, k, j, l, true));
        }
    }
    RelationSet { rank: r, flavor: Flavor::LeftQuantum, generators: gens }
}

/// The right-quantum generators followed by row q-commutation and
/// `c b - b c` for every 2x2 minor.
pub fn full_quantum_relations(r: usize) -> RelationSet {
    let mut gens = right_quantum_relations(r).generators;
    for i in 1..=r {
        for (j, l) in pairs(r) {
            gens.push(q_commutator(r, (i, l), (i, j)));
        }
    }
    for (i, k) in pairs(r) {
        for (j, l) in pairs(r) {
            gens.push(&word2(r, (k, j), (i, l), q(0)) - &word2(r, (i, l), (k, j), q(0)));
        }
    }
    RelationSet { rank: r, flavor: Flavor::FullQuantum, generators: gens }
}

impl RelationSet {
    pub fn for_flavor(flavor: Flavor, r: usize) -> Self {
        match flavor {
            Flavor::RightQuantum => right_quantum_relations(r),
            Flavor::LeftQuantum => left_quantum_relations(r),
            Flavor::FullQuantum => full_quantum_relations(r),
        }
    }

    /// Whether every generator has a single row/column content.
    pub fn is_multigraded(&self) -> bool {
        self.generators.iter().all(|g| {
            let mut keys = g.terms().map(|(w, _)| content(self.rank, w));
            let first = keys.next();
            keys.all(|k| Some(k) == first)
        })
    }
}

/// Row counts followed by column counts.
fn content(r: usize, w: &AWord) -> Vec<u8> {
    let mut c = vec![0u8; 2 * r];
    for g in w.letters() {
        c[g.row as usize - 1] += 1;
        c[r + g.col as usize - 1] += 1;
    }
    c
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ArithMode {
    /// Elimination over `Q(q)`.
    Exact,
    /// Elimination over `Q` at `evals` seeded random values of `q`.
    Probabilistic { evals: usize, seed: u64 },
}

impl ArithMode {
    pub fn tag(&self) -> &'static str {
        match self {
            ArithMode::Exact => "exact",
            ArithMode::Probabilistic { .. } => "probabilistic",
        }
    }
}

/// Outcome of one membership query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub degree: usize,
    pub mode: String,
    pub verdict: bool,
    /// Spanning-set rows over all blocks touched by the query.
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub eval_points: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Conjunction of membership certificates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub verdict: bool,
    pub certificates: Vec<MembershipCertificate>,
}

impl CheckOutcome {
    pub fn pass() -> Self {
        Self { verdict: true, certificates: Vec::new() }
    }

    pub fn fail() -> Self {
        Self { verdict: false, certificates: Vec::new() }
    }

    pub fn from_bool(verdict: bool) -> Self {
        Self { verdict, certificates: Vec::new() }
    }

    pub fn absorb(&mut self, other: CheckOutcome) {
        self.verdict &= other.verdict;
        self.certificates.extend(other.certificates);
    }

    pub fn push(&mut self, cert: MembershipCertificate) {
        self.verdict &= cert.verdict;
        self.certificates.push(cert);
    }
}

/// `count` distinct rationals `n/d` with `2 <= n, d <= 97`, `n != d`.
pub fn evaluation_points(count: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BigRational> = Vec::with_capacity(count);
    while out.len() < count {
        let n: i64 = rng.gen_range(2..=97);
        let d: i64 = rng.gen_range(2..=97);
        if n == d {
            continue;
        }
        let x = BigRational::new(BigInt::from(n), BigInt::from(d));
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

type BlockKey = (usize, Vec<u8>);

struct BlockLayout {
    index: HashMap<AWord, usize>,
    ncols: usize,
    spanning: Vec<SparseRow<LaurentPoly>>,
}

/// All words of length `len` with the given row/column content.
fn words_with_content(r: usize, len: usize, content: &[u8]) -> Vec<AWord> {
    fn rec(r: usize, left: &mut [u8], cur: &mut Vec<Gen>, len: usize, out: &mut Vec<AWord>) {
        if cur.len() == len {
            out.push(AWord(cur.clone()));
            return;
        }
        for i in 0..r {
            if left[i] == 0 {
                continue;
            }
            for j in 0..r {
                if left[r + j] == 0 {
                    continue;
                }
                left[i] -= 1;
                left[r + j] -= 1;
                cur.push(Gen::new(i + 1, j + 1));
                rec(r, left, cur, len, out);
                cur.pop();
                left[i] += 1;
                left[r + j] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut left = content.to_vec();
    rec(r, &mut left, &mut Vec::with_capacity(len), len, &mut out);
    out
}

/// All words of length `len` over `r^2` letters.
fn all_words(r: usize, len: usize) -> Vec<AWord> {
    let letters: Vec<Gen> = (1..=r).flat_map(|i| (1..=r).map(move |j| Gen::new(i, j))).collect();
    let mut out = vec![AWord::empty()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| letters.iter().map(move |g| {
                let mut v = w.0.clone();
                v.push(*g);
                AWord(v)
            }))
            .collect();
    }
    out
}

/// Decides membership in the two-sided ideal generated by a relation set,
/// one graded (and content) block at a time. Block layouts and echelon
/// forms are cached, so repeated queries in the same degree are cheap.
pub struct IdealOracle {
    rs: RelationSet,
    mode: ArithMode,
    points: Vec<BigRational>,
    multigraded: bool,
    layouts: Mutex<HashMap<BlockKey, Arc<BlockLayout>>>,
    exact: Mutex<HashMap<BlockKey, Arc<Echelon<RatFunc>>>>,
    numeric: Mutex<HashMap<(usize, BlockKey), Arc<Echelon<BigRational>>>>,
}

impl fmt::Debug for IdealOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealOracle")
            .field("rank", &self.rs.rank)
            .field("flavor", &self.rs.flavor)
            .field("mode", &self.mode)
            .finish()
    }
}

impl IdealOracle {
    pub fn new(rs: RelationSet, mode: ArithMode) -> Result<Self, RelationError> {
        let points = match mode {
            ArithMode::Exact => Vec::new(),
            ArithMode::Probabilistic { evals: 0, .. } => return Err(RelationError::NoEvaluationPoints),
            ArithMode::Probabilistic { evals, seed } => evaluation_points(evals, seed),
        };
        let multigraded = rs.is_multigraded();
        Ok(Self {
            rs,
            mode,
            points,
            multigraded,
            layouts: Mutex::new(HashMap::new()),
            exact: Mutex::new(HashMap::new()),
            numeric: Mutex::new(HashMap::new()),
        })
    }

    pub fn relations(&self) -> &RelationSet {
        &self.rs
    }

    pub fn mode(&self) -> ArithMode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    pub fn points(&self) -> &[BigRational] {
        &self.points
    }

    fn block_key(&self, w: &AWord) -> BlockKey {
        if self.multigraded {
            (w.len(), content(self.rs.rank, w))
        } else {
            (w.len(), Vec::new())
        }
    }

    fn layout(&self, key: &BlockKey) -> Arc<BlockLayout> {
        if let Some(l) = self.layouts.lock().unwrap().get(key) {
            return l.clone();
        }
        let built = Arc::new(self.build_layout(key));
        self.layouts.lock().unwrap().entry(key.clone()).or_insert(built).clone()
    }

    fn build_layout(&self, key: &BlockKey) -> BlockLayout {
        let r = self.rs.rank;
        let (d, cont) = key;
        let mut words = if self.multigraded { words_with_content(r, *d, cont) } else { all_words(r, *d) };
        // Larger words first: generators lead with their out-of-order word.
        words.sort_unstable_by(|a, b| b.cmp(a));
        let index: HashMap<AWord, usize> = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        let mut spanning = Vec::new();
        if *d >= 2 {
            for g in &self.rs.generators {
                let Some((gw, _)) = g.terms().next() else { continue };
                let outer: Vec<AWord> = if self.multigraded {
                    let gc = content(r, gw);
                    if cont.iter().zip(&gc).any(|(b, x)| x > b) {
                        continue;
                    }
                    let rest: Vec<u8> = cont.iter().zip(&gc).map(|(b, x)| b - x).collect();
                    words_with_content(r, d - 2, &rest)
                } else {
                    all_words(r, d - 2)
                };
                for w in &outer {
                    for split in 0..=w.len() {
                        let u = AWord(w.0[..split].to_vec());
                        let v = AWord(w.0[split..].to_vec());
                        let mut row: SparseRow<LaurentPoly> = g
                            .terms()
                            .map(|(t, c)| (index[&u.concat(t).concat(&v)], c.clone()))
                            .collect();
                        row.sort_by_key(|(k, _)| *k);
                        spanning.push(row);
                    }
                }
            }
        }
        spanning.sort_by(|a, b| (a[0].0, a.len()).cmp(&(b[0].0, b.len())));
        BlockLayout { index, ncols: words.len(), spanning }
    }

    fn exact_block(&self, key: &BlockKey, layout: &BlockLayout) -> Arc<Echelon<RatFunc>> {
        if let Some(e) = self.exact.lock().unwrap().get(key) {
            return e.clone();
        }
        let mut ech = Echelon::new(layout.ncols);
        for row in &layout.spanning {
            ech.insert(row.iter().map(|(k, c)| (*k, RatFunc::from(c.clone()))).collect());
        }
        let ech = Arc::new(ech);
        self.exact.lock().unwrap().entry(key.clone()).or_insert(ech).clone()
    }

    fn numeric_block(&self, point: usize, key: &BlockKey, layout: &BlockLayout) -> Arc<Echelon<BigRational>> {
        let cache_key = (point, key.clone());
        if let Some(e) = self.numeric.lock().unwrap().get(&cache_key) {
            return e.clone();
        }
        let x = &self.points[point];
        let mut ech = Echelon::new(layout.ncols);
        for row in &layout.spanning {
            let lifted: SparseRow<BigRational> = row
                .iter()
                .map(|(k, c)| (*k, c.eval(x).expect("evaluation points are nonzero")))
                .filter(|(_, v)| !Field::is_zero(v))
                .collect();
            ech.insert(lifted);
        }
        let ech = Arc::new(ech);
        self.numeric.lock().unwrap().entry(cache_key).or_insert(ech).clone()
    }

    /// Rank of the degree-`d` piece of the ideal within the block of `w`,
    /// and the block dimension. Exact mode only reports exact ranks; in
    /// probabilistic mode the first evaluation point is used.
    pub fn block_rank(&self, w: &AWord) -> (usize, usize) {
        let key = self.block_key(w);
        let layout = self.layout(&key);
        let rank = match self.mode {
            ArithMode::Exact => self.exact_block(&key, &layout).rank(),
            ArithMode::Probabilistic { .. } => self.numeric_block(0, &key, &layout).rank(),
        };
        (rank, layout.ncols)
    }

    /// Membership of a homogeneous element in the ideal.
    pub fn member(&self, p: &NcPoly) -> Result<MembershipCertificate, RelationError> {
        if p.rank() != self.rs.rank {
            return Err(RelationError::RankMismatch(p.rank(), self.rs.rank));
        }
        let degrees = p.degrees();
        if degrees.len() > 1 {
            return Err(RelationError::Inhomogeneous(degrees));
        }
        let start = Instant::now();
        let degree = degrees.first().copied().unwrap_or(0);
        let mut blocks: BTreeMap<BlockKey, Vec<(&AWord, &LaurentPoly)>> = BTreeMap::new();
        for (w, c) in p.terms() {
            blocks.entry(self.block_key(w)).or_default().push((w, c));
        }
        let results: Vec<(bool, usize, usize)> = blocks
            .par_iter()
            .map(|(key, terms)| {
                if key.0 < 2 {
                    // No relations below degree 2.
                    return (terms.is_empty(), 0, 0);
                }
                let layout = self.layout(key);
                let mut row: SparseRow<LaurentPoly> =
                    terms.iter().map(|(w, c)| (layout.index[*w], (*c).clone())).collect();
                row.sort_by_key(|(k, _)| *k);
                let ok = match self.mode {
                    ArithMode::Exact => {
                        let ech = self.exact_block(key, &layout);
                        ech.contains(row.into_iter().map(|(k, c)| (k, RatFunc::from(c))).collect())
                    }
                    ArithMode::Probabilistic { .. } => (0..self.points.len()).all(|i| {
                        let ech = self.numeric_block(i, key, &layout);
                        let x = &self.points[i];
                        let lifted: SparseRow<BigRational> = row
                            .iter()
                            .map(|(k, c)| (*k, c.eval(x).expect("evaluation points are nonzero")))
                            .filter(|(_, v)| !Field::is_zero(v))
                            .collect();
                        ech.contains(lifted)
                    }),
                };
                (ok, layout.spanning.len(), layout.ncols)
            })
            .collect();
        let verdict = results.iter().all(|r| r.0);
        Ok(MembershipCertificate {
            degree,
            mode: self.mode.tag().to_string(),
            verdict,
            matrix_rows: results.iter().map(|r| r.1).sum(),
            matrix_cols: results.iter().map(|r| r.2).sum(),
            eval_points: self.points.iter().map(|x| x.to_string()).collect(),
            elapsed_ms: Some(start.elapsed().as_millis() as u64),
        })
    }

    pub fn is_member(&self, p: &NcPoly) -> Result<bool, RelationError> {
        Ok(self.member(p)?.verdict)
    }

    /// `p1 = p2` modulo the ideal, checked per graded component. A nonzero
    /// degree-0 or degree-1 difference fails outright.
    pub fn equal_mod_ideal(&self, p1: &NcPoly, p2: &NcPoly) -> Result<CheckOutcome, RelationError> {
        self.zero_mod_ideal(&(p1 - p2))
    }

    pub fn zero_mod_ideal(&self, p: &NcPoly) -> Result<CheckOutcome, RelationError> {
        let mut out = CheckOutcome::pass();
        for d in p.degrees() {
            let comp = p.graded_component(d);
            if d == 0 {
                out.verdict &= comp.is_zero();
                continue;
            }
            out.push(self.member(&comp)?);
        }
        Ok(out)
    }
}

/// One-shot membership query.
pub fn ideal_member(p: &NcPoly, rs: &RelationSet, mode: ArithMode) -> Result<MembershipCertificate, RelationError> {
    IdealOracle::new(rs.clone(), mode)?.member(p)
}

/// One-shot equality test modulo the ideal.
pub fn equal_mod_ideal(p1: &NcPoly, p2: &NcPoly, rs: &RelationSet, mode: ArithMode) -> Result<bool, RelationError> {
    Ok(IdealOracle::new(rs.clone(), mode)?.equal_mod_ideal(p1, p2)?.verdict)
}

// ---------------------------------------------------------------------------

/// Replacement for an out-of-order pair: `sum c * y' x'`.
type RewriteRule = Vec<(Gen, Gen, LaurentPoly)>;

/// Rewriting system for the full-quantum algebra: every adjacent pair of
/// letters `y x` with `y > x` is replaced by a combination of sorted pairs,
/// always at the leftmost out-of-order position. Normal forms of words are
/// memoized.
#[derive(Debug, Clone)]
pub struct Rewriter {
    rank: usize,
    rules: HashMap<(Gen, Gen), RewriteRule>,
    memo: HashMap<AWord, NcPoly>,
}

impl Rewriter {
    /// Orients the relations by interreducing them in degree 2 with the
    /// out-of-order pairs as leading words.
    pub fn new(rs: &RelationSet) -> Result<Self, RelationError> {
        if rs.flavor != Flavor::FullQuantum {
            return Err(RelationError::RewriteUnsupported(rs.flavor));
        }
        let r = rs.rank;
        let mut words = all_words(r, 2);
        // Out-of-order pairs first, each group in descending order.
        words.sort_by(|a, b| (a.is_sorted(), b).cmp(&(b.is_sorted(), a)));
        let index: HashMap<AWord, usize> = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        let mut ech = Echelon::<RatFunc>::new(words.len());
        for g in &rs.generators {
            let mut row: SparseRow<RatFunc> = g.terms().map(|(w, c)| (index[w], RatFunc::from(c.clone()))).collect();
            row.sort_by_key(|(k, _)| *k);
            ech.insert(row);
        }
        let unsorted = words.iter().filter(|w| !w.is_sorted()).count();
        let mut rules = HashMap::new();
        for row in ech.reduced_rows() {
            let lead = &words[row[0].0];
            if lead.is_sorted() {
                return Err(RelationError::NoOrientation(format!("relation with sorted leading word {lead}")));
            }
            let mut rhs = Vec::new();
            for (k, c) in &row[1..] {
                let w = &words[*k];
                if !w.is_sorted() {
                    return Err(RelationError::NoOrientation(format!("{lead} rewrites to unsorted {w}")));
                }
                let c = c
                    .as_laurent()
                    .ok_or_else(|| RelationError::NoOrientation(format!("non-Laurent coefficient {c} in rule for {lead}")))?;
                rhs.push((w.0[0], w.0[1], -c));
            }
            rules.insert((lead.0[0], lead.0[1]), rhs);
        }
        if rules.len() != unsorted {
            return Err(RelationError::NoOrientation(format!(
                "{} of {} out-of-order pairs have a rule",
                rules.len(),
                unsorted
            )));
        }
        Ok(Self { rank: r, rules, memo: HashMap::new() })
    }

    /// The right-hand side of the rule for the out-of-order pair `y x`.
    pub fn rule(&self, y: Gen, x: Gen) -> Option<NcPoly> {
        self.rules.get(&(y, x)).map(|rhs| {
            let mut p = NcPoly::zero(self.rank);
            for (a, b, c) in rhs {
                p.add_term(AWord(vec![*a, *b]), c.clone());
            }
            p
        })
    }

    fn word_normal_form(&mut self, w: &AWord) -> NcPoly {
        if let Some(p) = self.memo.get(w) {
            return p.clone();
        }
        let pos = w.0.windows(2).position(|p| p[0] > p[1]);
        let result = match pos {
            None => NcPoly::term(self.rank, w.clone(), LaurentPoly::one()),
            Some(i) => {
                let rhs = self.rules[&(w.0[i], w.0[i + 1])].clone();
                let mut acc = NcPoly::zero(self.rank);
                for (a, b, c) in rhs {
                    let mut v = w.0.clone();
                    v[i] = a;
                    v[i + 1] = b;
                    let nf = self.word_normal_form(&AWord(v));
                    acc.add_assign_ref(&nf.scale(&c));
                }
                acc
            }
        };
        self.memo.insert(w.clone(), result.clone());
        result
    }

    pub fn normal_form(&mut self, p: &NcPoly) -> NcPoly {
        let mut acc = NcPoly::zero(self.rank);
        for (w, c) in p.terms() {
            let nf = self.word_normal_form(w);
            acc.add_assign_ref(&nf.scale(c));
        }
        acc
    }
}

/// One-shot normal form; rejects anything but the full-quantum relations.
pub fn rewrite_normal_form(p: &NcPoly, rs: &RelationSet) -> Result<NcPoly, RelationError> {
    Ok(Rewriter::new(rs)?.normal_form(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(r: usize, pairs: &[(usize, usize)], e: i64) -> NcPoly {
        NcPoly::word(r, pairs, q(e))
    }

    #[test]
    fn generator_counts() {
        assert!(right_quantum_relations(1).generators.is_empty());
        assert_eq!(right_quantum_relations(2).generators.len(), 3);
        assert_eq!(right_quantum_relations(3).generators.len(), 18);
        assert_eq!(full_quantum_relations(2).generators.len(), 6);
        assert_eq!(left_quantum_relations(3).generators.len(), 18);
    }

    #[test]
    fn rank_two_right_quantum_generators() {
        let rs = right_quantum_relations(2);
        let (a, b, c, d) = ((1, 1), (1, 2), (2, 1), (2, 2));
        let ca = &w(2, &[c, a], 0) - &w(2, &[a, c], 1);
        let db = &w(2, &[d, b], 0) - &w(2, &[b, d], 1);
        let cross = &(&(&w(2, &[a, d], 0) - &w(2, &[d, a], 0)) - &w(2, &[c, b], -1)) + &w(2, &[b, c], 1);
        assert_eq!(rs.generators, vec![ca, db, cross]);
    }

    #[test]
    fn full_contains_right_and_anti_diagonal() {
        for r in 1..=3 {
            let full = full_quantum_relations(r);
            for g in right_quantum_relations(r).generators {
                assert!(full.generators.contains(&g));
            }
        }
        let cb = &w(2, &[(2, 1), (1, 2)], 0) - &w(2, &[(1, 2), (2, 1)], 0);
        assert!(full_quantum_relations(2).generators.contains(&cb));
    }

    #[test]
    fn generators_are_multigraded() {
        for r in 1..=3 {
            for f in [Flavor::RightQuantum, Flavor::LeftQuantum, Flavor::FullQuantum] {
                assert!(RelationSet::for_flavor(f, r).is_multigraded());
            }
        }
    }

    #[test]
    fn word_enumeration_counts() {
        // rows (2,1,1), cols (2,1,1): 12 row sequences times 12 column sequences
        assert_eq!(words_with_content(3, 4, &[2, 1, 1, 2, 1, 1]).len(), 144);
        assert_eq!(all_words(2, 3).len(), 64);
    }

    #[test]
    fn membership_examples() {
        let rs = right_quantum_relations(2);
        let oracle = IdealOracle::new(rs.clone(), ArithMode::Exact).unwrap();
        assert!(oracle.is_member(&rs.generators[2]).unwrap());
        let commutator = &w(2, &[(1, 1), (2, 2)], 0) - &w(2, &[(2, 2), (1, 1)], 0);
        assert!(!oracle.is_member(&commutator).unwrap());
        let residual = &(&(&w(2, &[(1, 2), (2, 1)], 1) - &w(2, &[(2, 2), (1, 1)], 0)) + &w(2, &[(1, 1), (2, 2)], 0))
            - &w(2, &[(2, 1), (1, 2)], -1);
        assert!(oracle.is_member(&residual).unwrap());
        assert!(oracle.is_member(&NcPoly::zero(2)).unwrap());
    }

    #[test]
    fn degree_two_quotient_dimension() {
        // 16 words, 3 independent relations.
        let oracle = IdealOracle::new(right_quantum_relations(2), ArithMode::Exact).unwrap();
        let mut total = 0;
        let mut seen = std::collections::HashSet::new();
        for word in all_words(2, 2) {
            let key = content(2, &word);
            if seen.insert(key) {
                total += oracle.block_rank(&word).0;
            }
        }
        assert_eq!(total, 3);
    }

    #[test]
    fn membership_errors() {
        let rs = right_quantum_relations(2);
        let mixed = &NcPoly::gen(2, 1, 1) + &w(2, &[(1, 1), (2, 2)], 0);
        assert!(matches!(ideal_member(&mixed, &rs, ArithMode::Exact), Err(RelationError::Inhomogeneous(_))));
        assert_eq!(
            IdealOracle::new(rs, ArithMode::Probabilistic { evals: 0, seed: 1 }).unwrap_err(),
            RelationError::NoEvaluationPoints
        );
    }

    #[test]
    fn equality_mod_ideal() {
        let rs = right_quantum_relations(2);
        let p = &NcPoly::one(2) + &w(2, &[(2, 1), (1, 1)], 0);
        assert!(equal_mod_ideal(&p, &p, &rs, ArithMode::Exact).unwrap());
        let p2 = &NcPoly::one(2) + &w(2, &[(1, 1), (2, 1)], 1);
        assert!(equal_mod_ideal(&p, &p2, &rs, ArithMode::Exact).unwrap());
        assert!(!equal_mod_ideal(&NcPoly::gen(2, 1, 1), &NcPoly::gen(2, 2, 2), &rs, ArithMode::Exact).unwrap());
        assert!(!equal_mod_ideal(&NcPoly::one(2), &NcPoly::zero(2), &rs, ArithMode::Exact).unwrap());
    }

    #[test]
    fn evaluation_points_are_seeded_and_distinct() {
        let a = evaluation_points(5, 42);
        assert_eq!(a, evaluation_points(5, 42));
        for (i, x) in a.iter().enumerate() {
            assert!(!a[..i].contains(x));
            assert!(*x != BigRational::from_integer(1.into()));
        }
    }

    #[test]
    fn rewriting_rules() {
        let rs = full_quantum_relations(2);
        let mut rw = Rewriter::new(&rs).unwrap();
        let (a, b, c, d) = ((1, 1), (1, 2), (2, 1), (2, 2));
        assert_eq!(rw.normal_form(&w(2, &[c, a], 0)), w(2, &[a, c], 1));
        let expected = &w(2, &[a, d], 0) + &NcPoly::word(2, &[b, c], LaurentPoly::from_terms([(1, 1), (-1, -1)]));
        assert_eq!(rw.normal_form(&w(2, &[d, a], 0)), expected);
        let sorted = w(2, &[a, b, c, d], 0);
        assert_eq!(rw.normal_form(&sorted), sorted);
        assert_eq!(
            rewrite_normal_form(&sorted, &right_quantum_relations(2)),
            Err(RelationError::RewriteUnsupported(Flavor::RightQuantum))
        );
    }

    #[test]
    fn rewriting_kills_generators_in_context() {
        for r in 2..=3 {
            let rs = full_quantum_relations(r);
            let mut rw = Rewriter::new(&rs).unwrap();
            for g in &rs.generators {
                assert!(rw.normal_form(g).is_zero());
                let ctx = &(&NcPoly::gen(r, r, 1) * g) * &NcPoly::gen(r, 1, r);
                assert!(rw.normal_form(&ctx).is_zero());
            }
        }
    }
}
