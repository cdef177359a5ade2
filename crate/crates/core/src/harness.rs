//! Suite orchestration and reports.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bosonic::{classical_check, inclusion_exclusion_check, master_verify_with, multi_indices, BosonicExpander, Decider, VerifyError};
use crate::opcalc::{
    annihilation_check, b_right_quantum_check, detq_b_expansion_check, detq_b_on_g_check, lemma1_check, lemma2_check,
    DetBOutcome,
};
use crate::qdet::{column_expansion_check, column_swap_check, equal_column_vanishing_check};
use crate::relations::{ArithMode, CheckOutcome, Flavor, IdealOracle, MembershipCertificate, RelationError, RelationSet, Rewriter};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest rank the suite accepts.
pub const MAX_RANK: usize = 5;
/// Largest size for the free-algebra column expansion.
pub const COLUMN_EXPANSION_BOUND: usize = 4;
/// Largest rank for the operator determinant of `B`.
pub const DETQ_B_BOUND: usize = 3;
/// Largest degree used when applying the subset operator to `G`.
const DETQ_B_ON_G_DEGREE: usize = 5;

pub const LEMMA_NAMES: [&str; 11] = [
    "lemma1",
    "lemma2",
    "lemma3",
    "lemma3a",
    "lemma4",
    "lemma5",
    "lemma6a",
    "lemma6b",
    "annihilation",
    "inclusion-exclusion",
    "detq-b-on-g",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Arith {
    Exact,
    Probabilistic,
}

impl fmt::Display for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arith::Exact => "exact",
            Arith::Probabilistic => "probabilistic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Verify,
    Lemmas,
    Classical,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("rank must be in 1..={MAX_RANK}, got {0}")]
    Rank(usize),
    #[error("probabilistic mode needs at least one evaluation point")]
    NoEvaluations,
    #[error("unknown check '{0}'; known: {known}", known = LEMMA_NAMES.join(", "))]
    UnknownLemma(String),
    #[error("the master theorem is not checked for {0} relations")]
    Flavor(Flavor),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub rank: usize,
    pub degree: usize,
    pub flavor: Flavor,
    pub arith: Arith,
    pub evals: usize,
    pub seed: u64,
    /// Selected lemma checks; empty means all.
    pub lemmas: Vec<String>,
    pub format: Format,
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            rank: 2,
            degree: 4,
            flavor: Flavor::RightQuantum,
            arith: Arith::Probabilistic,
            evals: 3,
            seed: 42,
            lemmas: Vec::new(),
            format: Format::Json,
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rank == 0 || self.rank > MAX_RANK {
            return Err(ConfigError::Rank(self.rank));
        }
        if self.arith == Arith::Probabilistic && self.evals == 0 {
            return Err(ConfigError::NoEvaluations);
        }
        if self.flavor == Flavor::LeftQuantum {
            return Err(ConfigError::Flavor(self.flavor));
        }
        if let Some(bad) = self.lemmas.iter().find(|l| !LEMMA_NAMES.contains(&l.as_str())) {
            return Err(ConfigError::UnknownLemma(bad.clone()));
        }
        Ok(())
    }

    pub fn mode(&self) -> ArithMode {
        match self.arith {
            Arith::Exact => ArithMode::Exact,
            Arith::Probabilistic => ArithMode::Probabilistic { evals: self.evals, seed: self.seed },
        }
    }

    fn selected(&self, name: &str) -> bool {
        self.lemmas.is_empty() || self.lemmas.iter().any(|l| l == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: Value,
    pub verdict: bool,
    pub degree_certificates: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub overall: bool,
    pub version: String,
}

impl VerificationReport {
    pub fn new(config: SuiteConfig, checks: Vec<CheckRecord>) -> Self {
        let overall = checks.iter().all(|c| c.verdict);
        Self { config, checks, overall, version: VERSION.to_string() }
    }
}

/// Shared oracles and expanders, one per rank and flavor.
struct Context {
    config: SuiteConfig,
    oracles: HashMap<(usize, Flavor), Arc<IdealOracle>>,
    expanders: HashMap<usize, BosonicExpander>,
}

impl Context {
    fn oracle(&mut self, rank: usize, flavor: Flavor) -> Result<Arc<IdealOracle>, RelationError> {
        if let Some(o) = self.oracles.get(&(rank, flavor)) {
            return Ok(o.clone());
        }
        let o = Arc::new(IdealOracle::new(RelationSet::for_flavor(flavor, rank), self.config.mode())?);
        self.oracles.insert((rank, flavor), o.clone());
        Ok(o)
    }

    fn expander(&mut self, rank: usize) -> &mut BosonicExpander {
        self.expanders.entry(rank).or_insert_with(|| BosonicExpander::new(rank))
    }

    fn certs(&self, certs: Vec<MembershipCertificate>) -> Vec<Value> {
        certs
            .into_iter()
            .map(|mut c| {
                if !self.config.timings {
                    c.elapsed_ms = None;
                }
                serde_json::to_value(c).expect("certificate serializes")
            })
            .collect()
    }

    fn record(&self, name: &str, params: Value, outcome: Result<CheckOutcome, RelationError>, start: Instant) -> CheckRecord {
        let (verdict, certs, diagnostic) = match outcome {
            Ok(o) => (o.verdict, self.certs(o.certificates), None),
            Err(e) => (false, Vec::new(), Some(e.to_string())),
        };
        CheckRecord {
            name: name.to_string(),
            params,
            verdict,
            degree_certificates: certs,
            diagnostic,
            info: None,
            elapsed_ms: self.elapsed(start),
        }
    }

    fn elapsed(&self, start: Instant) -> Option<u64> {
        self.config.timings.then(|| start.elapsed().as_millis() as u64)
    }
}

fn master_record(ctx: &mut Context, rank: usize, degree: usize, flavor: Flavor) -> CheckRecord {
    let start = Instant::now();
    let params = json!({"rank": rank, "degree": degree, "flavor": flavor});
    let result = match flavor {
        Flavor::FullQuantum => Rewriter::new(&RelationSet::for_flavor(flavor, rank))
            .map_err(VerifyError::from)
            .and_then(|mut rw| master_verify_with(&mut Decider::Rewrite(&mut rw), rank, degree, flavor)),
        _ => ctx
            .oracle(rank, flavor)
            .map_err(VerifyError::from)
            .and_then(|o| master_verify_with(&mut Decider::Ideal(&o), rank, degree, flavor)),
    };
    let (verdict, certs, diagnostic) = match result {
        Ok(report) => {
            let certs = report
                .entries
                .into_iter()
                .map(|mut e| {
                    if !ctx.config.timings {
                        if let Some(c) = e.certificate.as_mut() {
                            c.elapsed_ms = None;
                        }
                    }
                    serde_json::to_value(e).expect("entry serializes")
                })
                .collect();
            (true, certs, None)
        }
        Err(VerifyError::DegreeFailed { degree, order, residual }) => {
            let entry = json!({"degree": degree, "order": order, "verdict": false, "residual_terms": residual});
            (false, vec![entry], Some(format!("degree {degree} of {order} - 1 is not zero in the quotient")))
        }
        Err(e) => (false, Vec::new(), Some(e.to_string())),
    };
    CheckRecord {
        name: "master-theorem".into(),
        params,
        verdict,
        degree_certificates: certs,
        diagnostic,
        info: None,
        elapsed_ms: ctx.elapsed(start),
    }
}

fn classical_records(ctx: &Context) -> Vec<CheckRecord> {
    (1..=ctx.config.rank)
        .map(|r| {
            let start = Instant::now();
            let ok = classical_check(r, ctx.config.degree);
            ctx.record("classical", json!({"rank": r, "degree": ctx.config.degree}), Ok(CheckOutcome::from_bool(ok)), start)
        })
        .collect()
}

fn grid(rank: usize, max_entry: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=rank as u32 * max_entry {
        out.extend(multi_indices(rank, total).into_iter().filter(|m| m.iter().all(|&e| e <= max_entry)));
    }
    out
}

fn lemma_records(ctx: &mut Context, name: &str) -> Vec<CheckRecord> {
    let r = ctx.config.rank;
    let rq = Flavor::RightQuantum;
    let mut out = Vec::new();
    match name {
        "lemma1" => {
            for rank in 1..=r {
                let start = Instant::now();
                let res = ctx.oracle(rank, rq).and_then(|o| lemma1_check(&o));
                out.push(ctx.record(name, json!({"rank": rank}), res, start));
            }
        }
        "lemma2" => {
            for rank in 1..=r {
                let start = Instant::now();
                let ok = (1..=rank).all(|i| (1..=rank).all(|j| (1..=3).all(|m| lemma2_check(rank, i, j, m))));
                out.push(ctx.record(name, json!({"rank": rank, "max_m": 3}), Ok(CheckOutcome::from_bool(ok)), start));
            }
        }
        "lemma3" => {
            for n in 1..=r.max(COLUMN_EXPANSION_BOUND) {
                let start = Instant::now();
                let ok = column_expansion_check(n);
                out.push(ctx.record(name, json!({"size": n}), Ok(CheckOutcome::from_bool(ok)), start));
            }
        }
        "lemma3a" => {
            for rank in 2..=r {
                for i in 1..=rank {
                    for j in i + 1..=rank {
                        let start = Instant::now();
                        let res = ctx.oracle(rank, rq).and_then(|o| column_swap_check(&o, i, j));
                        out.push(ctx.record(name, json!({"rank": rank, "i": i, "j": j}), res, start));
                    }
                }
            }
        }
        "lemma4" => {
            for rank in 2..=r {
                for j in 1..rank {
                    let start = Instant::now();
                    let res = ctx.oracle(rank, rq).and_then(|o| equal_column_vanishing_check(&o, j));
                    out.push(ctx.record(name, json!({"rank": rank, "j": j}), res, start));
                }
            }
        }
        "lemma5" => {
            for rank in 2..=r {
                let start = Instant::now();
                let res = ctx.oracle(rank, rq).and_then(|o| b_right_quantum_check(&o));
                out.push(ctx.record(name, json!({"rank": rank}), res, start));
            }
        }
        "lemma6a" | "lemma6b" => {
            for rank in 1..=r.min(DETQ_B_BOUND) {
                let start = Instant::now();
                let res: Result<DetBOutcome, RelationError> = ctx.oracle(rank, rq).and_then(|o| detq_b_expansion_check(&o));
                let free = res.as_ref().ok().map(|d| d.free_exact);
                let part = res.map(|d| if name == "lemma6a" { d.expansion } else { d.specialization });
                let mut rec = ctx.record(name, json!({"rank": rank}), part, start);
                if name == "lemma6a" {
                    rec.info = free.map(|f| json!({"holds_in_free_algebra": f}));
                }
                out.push(rec);
            }
        }
        "annihilation" => {
            for rank in 1..=r {
                let max_entry = if rank <= 2 { 2 } else { 1 };
                let start = Instant::now();
                let res = ctx.oracle(rank, rq).and_then(|o| {
                    let ex = ctx.expander(rank);
                    let mut acc = CheckOutcome::pass();
                    for m in grid(rank, max_entry) {
                        for i in 1..=rank {
                            acc.absorb(annihilation_check(&o, ex, &m, i)?);
                        }
                    }
                    Ok(acc)
                });
                out.push(ctx.record(name, json!({"rank": rank, "max_entry": max_entry}), res, start));
            }
        }
        "inclusion-exclusion" => {
            for rank in 1..=r {
                let start = Instant::now();
                let degree = ctx.config.degree;
                let res = ctx.oracle(rank, rq).and_then(|o| inclusion_exclusion_check(&o, degree));
                out.push(ctx.record(name, json!({"rank": rank, "degree": degree}), res, start));
            }
        }
        "detq-b-on-g" => {
            for rank in 1..=r.min(DETQ_B_ON_G_DEGREE) {
                let start = Instant::now();
                let ms: Vec<Vec<u32>> =
                    grid(rank, 1).into_iter().filter(|m| m.iter().sum::<u32>() as usize + rank <= DETQ_B_ON_G_DEGREE).collect();
                let res = ctx.oracle(rank, rq).and_then(|o| {
                    let ex = ctx.expander(rank);
                    let mut acc = CheckOutcome::pass();
                    for m in &ms {
                        acc.absorb(detq_b_on_g_check(&o, ex, m)?);
                    }
                    Ok(acc)
                });
                out.push(ctx.record(name, json!({"rank": rank, "max_degree": DETQ_B_ON_G_DEGREE}), res, start));
            }
        }
        other => unreachable!("unvalidated lemma name {other}"),
    }
    out
}

/// Runs a suite. The configuration must be valid.
pub fn run_suite(config: &SuiteConfig, suite: Suite) -> Result<VerificationReport, ConfigError> {
    config.validate()?;
    let mut ctx = Context { config: config.clone(), oracles: HashMap::new(), expanders: HashMap::new() };
    let mut checks = Vec::new();
    if matches!(suite, Suite::Verify | Suite::All) {
        checks.push(master_record(&mut ctx, config.rank, config.degree, config.flavor));
    }
    if suite == Suite::All && config.flavor != Flavor::FullQuantum {
        checks.push(master_record(&mut ctx, config.rank, config.degree, Flavor::FullQuantum));
    }
    if matches!(suite, Suite::Classical | Suite::All) {
        checks.extend(classical_records(&ctx));
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        for name in LEMMA_NAMES {
            if config.selected(name) {
                checks.extend(lemma_records(&mut ctx, name));
            }
        }
    }
    Ok(VerificationReport::new(config.clone(), checks))
}

pub fn emit_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let c = &report.config;
            let mut s = String::new();
            let _ = writeln!(
                s,
                "qmm {}  rank={} degree={} flavor={} arith={} evals={} seed={}",
                report.version, c.rank, c.degree, c.flavor, c.arith, c.evals, c.seed
            );
            for check in &report.checks {
                let _ = write!(
                    s,
                    "{:<5} {:<20} {}",
                    if check.verdict { "PASS" } else { "FAIL" },
                    check.name,
                    check.params
                );
                if let Some(ms) = check.elapsed_ms {
                    let _ = write!(s, "  {ms} ms");
                }
                s.push('\n');
                if let Some(d) = &check.diagnostic {
                    let _ = writeln!(s, "      {d}");
                }
                for cert in &check.degree_certificates {
                    if let Some(res) = cert.get("residual_terms") {
                        let _ = writeln!(s, "      residual: {}", res.as_str().unwrap_or_default());
                    }
                }
            }
            let _ = writeln!(s, "overall: {}", if report.overall { "PASS" } else { "FAIL" });
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(rank: usize, degree: usize) -> SuiteConfig {
        SuiteConfig { rank, degree, ..SuiteConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        assert_eq!(quick(0, 1).validate(), Err(ConfigError::Rank(0)));
        let bad = SuiteConfig { evals: 0, ..SuiteConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::NoEvaluations));
        let exact_no_evals = SuiteConfig { evals: 0, arith: Arith::Exact, ..SuiteConfig::default() };
        assert!(exact_no_evals.validate().is_ok());
        let unknown = SuiteConfig { lemmas: vec!["lemma9".into()], ..SuiteConfig::default() };
        assert!(matches!(unknown.validate(), Err(ConfigError::UnknownLemma(_))));
        let left = SuiteConfig { flavor: Flavor::LeftQuantum, ..SuiteConfig::default() };
        assert_eq!(left.validate(), Err(ConfigError::Flavor(Flavor::LeftQuantum)));
    }

    #[test]
    fn empty_report() {
        let report = VerificationReport::new(SuiteConfig::default(), Vec::new());
        let v: Value = serde_json::from_str(&emit_report(&report, Format::Json)).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["overall"], json!(true));
        assert_eq!(v["version"], json!(VERSION));
    }

    #[test]
    fn rank_one_suite_passes() {
        let config = SuiteConfig { rank: 1, degree: 5, arith: Arith::Exact, ..SuiteConfig::default() };
        let report = run_suite(&config, Suite::All).unwrap();
        assert!(report.overall, "{}", emit_report(&report, Format::Text));
        assert!(report.checks.iter().all(|c| c.elapsed_ms.is_none()));
    }

    #[test]
    fn lemma_selection() {
        let config = SuiteConfig { lemmas: vec!["lemma2".into()], ..quick(2, 2) };
        let report = run_suite(&config, Suite::Lemmas).unwrap();
        assert!(report.checks.iter().all(|c| c.name == "lemma2"));
        assert_eq!(report.checks.len(), 2);
    }

    #[test]
    fn failed_records_carry_residual() {
        let mut ctx = Context { config: quick(2, 2), oracles: HashMap::new(), expanders: HashMap::new() };
        let empty = RelationSet { rank: 2, flavor: Flavor::RightQuantum, generators: Vec::new() };
        ctx.oracles.insert((2, Flavor::RightQuantum), Arc::new(IdealOracle::new(empty, ctx.config.mode()).unwrap()));
        let rec = master_record(&mut ctx, 2, 2, Flavor::RightQuantum);
        assert!(!rec.verdict);
        let report = VerificationReport::new(ctx.config.clone(), vec![rec]);
        assert!(!report.overall);
        let text = emit_report(&report, Format::Text);
        assert!(text.contains("FAIL"));
        assert!(text.contains("residual: "));
        let v: Value = serde_json::from_str(&emit_report(&report, Format::Json)).unwrap();
        let residual = v["checks"][0]["degree_certificates"][0]["residual_terms"].as_str().unwrap();
        assert!(crate::ncpoly::parse_nc_poly(residual, 2).is_ok());
    }

    #[test]
    fn timings_are_opt_in() {
        let config = SuiteConfig { timings: true, ..quick(2, 2) };
        let report = run_suite(&config, Suite::Verify).unwrap();
        assert!(report.checks[0].elapsed_ms.is_some());
    }
}
