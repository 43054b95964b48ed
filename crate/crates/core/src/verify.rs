//! Batch verification harness.
//!
//! Sweeps a corpus over a grid of exponents, compares the actual trapezoid
//! defect against every applicable bound, and collects the auxiliary checks
//! (integral identity, power-mean sandwich, exponent discrimination, Hölder
//! split frontier) into one [`VerifyReport`].

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::adaptive::{self, Options};
use crate::bounds::{
    best_bound, bound_v2, bound_v2_limit, power_mean_factor, BoundKind, HolderPair, Interval,
    SecondDerivEndpoints, V2Exponent,
};
use crate::corpus::CorpusEntry;
use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, DEFAULT_GRID_N, DEFAULT_QC_TOL};

/// Version of the JSON/CSV report layout.
pub const SCHEMA_VERSION: u32 = 1;
/// A record is a violation when its margin drops below `-VIOLATION_TOL`.
pub const VIOLATION_TOL: f64 = 1e-10;
/// Largest acceptable residual of the integral identity.
pub const LEMMA_TOL: f64 = 1e-8;
/// Tolerance for `φ(1) = 1/3`.
pub const SANDWICH_EQ_TOL: f64 = 1e-15;
/// Exponent grid used when none is supplied.
pub const DEFAULT_Q_GRID: [f64; 7] = [1.0, 1.5, 1.75, 2.0, 3.0, 5.0, 10.0];

/// Both sides of
/// `(f(a)+f(b))/2 - (1/(b-a))∫f = ((b-a)²/2) ∫₀¹ t(1-t) f''(ta + (1-t)b) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn lemma_identity_residual(f: &FunctionSpec, iv: Interval) -> Result<LemmaCheck> {
    let (a, b) = (iv.a(), iv.b());
    let lhs = 0.5 * (f.value(a)? + f.value(b)?) - f.reference_integral(iv)? / iv.width();
    let kernel = adaptive::integrate(
        |t| Ok(t * (1.0 - t) * f.evaluate(t * a + (1.0 - t) * b, 2)?),
        0.0,
        1.0,
        Options {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            ..Options::default()
        },
    )?;
    let rhs = 0.5 * iv.width().powi(2) * kernel.value;
    Ok(LemmaCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// `|(f(a)+f(b))/2 - (1/(b-a))∫ₐᵇ f|`
pub fn trapezoid_defect(f: &FunctionSpec, iv: Interval) -> Result<f64> {
    let mean = f.reference_integral(iv)? / iv.width();
    Ok((0.5 * (f.value(iv.a())? + f.value(iv.b())?) - mean).abs())
}

fn nan_from_null<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One (function, interval, q) comparison. Numeric fields of records whose
/// evaluation failed are NaN (serialized as `null`) and `error` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub function_label: String,
    pub interval: Interval,
    pub q: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub lhs_error: f64,
    pub v1: Option<f64>,
    pub v2_proof: Option<f64>,
    pub v2_statement: Option<f64>,
    pub v3: Option<f64>,
    pub limit_bound: Option<f64>,
    #[serde(deserialize_with = "nan_from_null")]
    pub best: f64,
    pub winner: Option<BoundKind>,
    #[serde(deserialize_with = "nan_from_null")]
    pub margin: f64,
    pub quasiconvex_verdict: bool,
    pub negative_domain_flag: bool,
    pub violation: bool,
    pub error: Option<String>,
}

impl VerificationRecord {
    fn failed(entry: &CorpusEntry, q: f64, err: Error) -> Self {
        Self {
            function_label: entry.function.label.clone(),
            interval: entry.interval,
            q,
            lhs_error: f64::NAN,
            v1: None,
            v2_proof: None,
            v2_statement: None,
            v3: None,
            limit_bound: None,
            best: f64::NAN,
            winner: None,
            margin: f64::NAN,
            quasiconvex_verdict: false,
            negative_domain_flag: entry.interval.negative_domain(),
            violation: false,
            error: Some(err.to_string()),
        }
    }
}

fn evaluate_record(entry: &CorpusEntry, q: f64) -> Result<VerificationRecord> {
    let (f, iv) = (&entry.function, entry.interval);
    let lhs_error = trapezoid_defect(f, iv)?;
    let d2 = SecondDerivEndpoints::new(f.evaluate(iv.a(), 2)?, f.evaluate(iv.b(), 2)?)?;
    let breakdown = best_bound(iv, q, d2)?;
    let v2_statement = bound_v2(iv, q, d2, V2Exponent::StatementExponent)?;
    let limit_bound = bound_v2_limit(iv, q, d2)?;
    let quasiconvex_verdict = f
        .is_quasiconvex(iv, 2, DEFAULT_GRID_N, DEFAULT_QC_TOL)?
        .holds;
    let margin = breakdown.best - lhs_error;
    Ok(VerificationRecord {
        function_label: f.label.clone(),
        interval: iv,
        q,
        lhs_error,
        v1: breakdown.v1,
        v2_proof: Some(breakdown.v2),
        v2_statement: Some(v2_statement),
        v3: breakdown.v3,
        limit_bound: Some(limit_bound),
        best: breakdown.best,
        winner: Some(breakdown.winner),
        margin,
        quasiconvex_verdict,
        negative_domain_flag: iv.negative_domain(),
        violation: quasiconvex_verdict && margin < -VIOLATION_TOL,
        error: None,
    })
}

/// One record per (entry, q) in corpus-major order. Records are evaluated in
/// parallel; per-record failures are captured, never propagated.
pub fn sweep(corpus: &[CorpusEntry], q_grid: &[f64]) -> Result<Vec<VerificationRecord>> {
    if let Some(q) = q_grid.iter().find(|q| !(q.is_finite() && **q >= 1.0)) {
        return Err(Error::domain(format!(
            "sweep exponents must be >= 1, got {q}"
        )));
    }
    let jobs: Vec<(&CorpusEntry, f64)> = corpus
        .iter()
        .flat_map(|e| q_grid.iter().map(move |&q| (e, q)))
        .collect();
    Ok(jobs
        .into_par_iter()
        .map(|(e, q)| {
            evaluate_record(e, q).unwrap_or_else(|err| VerificationRecord::failed(e, q, err))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub records: usize,
    pub evaluated: usize,
    pub errors: usize,
    /// Records whose `|f''|` failed the grid verdict; kept but not judged.
    pub excluded: usize,
    pub violations: usize,
    pub min_margin: Option<f64>,
    pub mean_margin: Option<f64>,
}

pub fn summarize(records: &[VerificationRecord]) -> SweepSummary {
    let judged: Vec<f64> = records
        .iter()
        .filter(|r| r.error.is_none() && r.quasiconvex_verdict)
        .map(|r| r.margin)
        .collect();
    let errors = records.iter().filter(|r| r.error.is_some()).count();
    SweepSummary {
        records: records.len(),
        evaluated: records.len() - errors,
        errors,
        excluded: records
            .iter()
            .filter(|r| r.error.is_none() && !r.quasiconvex_verdict)
            .count(),
        violations: records.iter().filter(|r| r.violation).count(),
        min_margin: judged.iter().copied().reduce(f64::min),
        mean_margin: (!judged.is_empty()).then(|| judged.iter().sum::<f64>() / judged.len() as f64),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub function_label: String,
    pub interval: Interval,
    pub q: f64,
    pub lhs_error: f64,
    pub proof_margin: f64,
    pub statement_margin: f64,
}

/// Margins of both power-mean exponent variants against the true defect.
/// Makes no claim about the printed variant; the counts are the finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub rows: Vec<ExponentRow>,
    pub proof_negative: usize,
    pub statement_negative: usize,
    pub min_proof_margin: Option<f64>,
    pub min_statement_margin: Option<f64>,
}

pub fn exponent_experiment(corpus: &[CorpusEntry], q_grid: &[f64]) -> Result<ExponentReport> {
    if let Some(q) = q_grid.iter().find(|q| !(q.is_finite() && **q > 1.0)) {
        return Err(Error::domain(format!(
            "exponent experiment needs q > 1, got {q}"
        )));
    }
    let rows: Vec<ExponentRow> = sweep(corpus, q_grid)?
        .into_iter()
        .filter(|r| r.error.is_none() && r.quasiconvex_verdict)
        .map(|r| ExponentRow {
            proof_margin: r.v2_proof.expect("evaluated") - r.lhs_error,
            statement_margin: r.v2_statement.expect("evaluated") - r.lhs_error,
            function_label: r.function_label,
            interval: r.interval,
            q: r.q,
            lhs_error: r.lhs_error,
        })
        .collect();
    let negative =
        |m: &dyn Fn(&ExponentRow) -> f64| rows.iter().filter(|r| m(r) < -VIOLATION_TOL).count();
    let minimum = |m: &dyn Fn(&ExponentRow) -> f64| rows.iter().map(m).reduce(f64::min);
    Ok(ExponentReport {
        proof_negative: negative(&|r| r.proof_margin),
        statement_negative: negative(&|r| r.statement_margin),
        min_proof_margin: minimum(&|r| r.proof_margin),
        min_statement_margin: minimum(&|r| r.statement_margin),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichEntry {
    pub q: f64,
    pub phi: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub entries: Vec<SandwichEntry>,
    pub passed: bool,
}

/// Checks `φ(1) = 1/3` and `1/3 < φ(q) < 1` for `q > 1`.
pub fn sandwich_check(q_grid: &[f64]) -> Result<SandwichReport> {
    let third = 1.0 / 3.0;
    let entries = q_grid
        .iter()
        .map(|&q| {
            if !(q.is_finite() && q >= 1.0) {
                return Err(Error::domain(format!(
                    "sandwich check needs q >= 1, got {q}"
                )));
            }
            let phi = power_mean_factor(q);
            let ok = if q == 1.0 {
                (phi - third).abs() <= SANDWICH_EQ_TOL
            } else {
                third < phi && phi < 1.0
            };
            Ok(SandwichEntry { q, phi, ok })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.ok);
    Ok(SandwichReport { entries, passed })
}

/// `n` evenly spaced exponents in `(lo, hi]`.
pub fn open_closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPoint {
    /// The integral runs over `[e^{-depth}, 1]`.
    pub depth: f64,
    /// `+∞` once the truncated integral overflows.
    pub value: f64,
}

/// Numerical study of `∫₀¹ t^{(q-p)/(q-1)} dt` by truncation at `e^{-L}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierStudy {
    pub q: f64,
    pub exponent: f64,
    /// `(q-1)/(2q-p-1)` where the integral converges.
    pub closed_form: Option<f64>,
    pub truncated: Vec<TruncationPoint>,
}

/// Depths used by [`frontier_study`] when none are given.
pub const DEFAULT_DEPTHS: [f64; 6] = [1.0, 10.0, 100.0, 1000.0, 5000.0, 20000.0];

pub fn frontier_study(q: f64, depths: &[f64]) -> Result<FrontierStudy> {
    let hp = HolderPair::new(q)?;
    let exponent = (hp.q() - hp.p()) / (hp.q() - 1.0);
    // t = e^u turns ∫_{e^{-L}}^1 t^e dt into ∫_{-L}^0 e^{(e+1)u} du
    let rate = exponent + 1.0;
    let truncated = depths
        .iter()
        .map(|&depth| {
            let value = match truncated_power_integral(rate, depth) {
                Ok(v) => v,
                Err(Error::OracleFailure(_)) if rate < 0.0 => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(TruncationPoint { depth, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontierStudy {
        q,
        exponent,
        closed_form: hp.holder_split_factor().ok(),
        truncated,
    })
}

/// `∫_{-depth}^0 e^{rate·u} du`, summed over `[-1, 0]` and doubling panels
/// `[-2^{k+1}, -2^k]` so no single panel is long enough to miss the mass
/// concentrated near its right end.
fn truncated_power_integral(rate: f64, depth: f64) -> Result<f64> {
    let opts = Options {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_segments: 2_000,
    };
    let mut total = 0.0;
    let mut right = 0.0f64;
    let mut left = -(depth.min(1.0));
    while right > -depth {
        total += adaptive::integrate(|u| Ok((rate * u).exp()), left, right, opts)?.value;
        if !total.is_finite() {
            return Err(Error::OracleFailure("truncated integral overflowed".into()));
        }
        right = left;
        left = (2.0 * left).max(-depth);
    }
    Ok(total)
}

impl FrontierStudy {
    /// Truncated values grow without bound: strictly increasing and the
    /// deepest is at least `1e6` (or overflowed).
    pub fn diverges(&self) -> bool {
        let increasing = self
            .truncated
            .windows(2)
            .all(|w| w[1].value > w[0].value || w[1].value.is_infinite());
        let last = self.truncated.last().map_or(0.0, |p| p.value);
        increasing && last >= 1e6
    }

    /// Difference between the deepest truncation and the closed form.
    pub fn closed_form_gap(&self) -> Option<f64> {
        let last = self.truncated.last()?.value;
        self.closed_form.map(|c| (last - c).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub function_label: String,
    pub interval: Interval,
    pub check: Option<LemmaCheck>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub q_grid: Vec<f64>,
    pub summary: SweepSummary,
    pub records: Vec<VerificationRecord>,
    pub lemma: Vec<LemmaRow>,
    pub sandwich: SandwichReport,
    pub exponent: ExponentReport,
}

impl VerifyReport {
    /// True when there are no violations and every auxiliary check passed.
    pub fn passed(&self) -> bool {
        self.summary.violations == 0 && self.sandwich.passed && self.lemma.iter().all(|l| l.passed)
    }
}

/// Runs the sweep, identity check, sandwich check and exponent experiment.
pub fn run_verification(corpus: &[CorpusEntry], q_grid: &[f64]) -> Result<VerifyReport> {
    let records = sweep(corpus, q_grid)?;
    let lemma = corpus
        .par_iter()
        .map(|e| match lemma_identity_residual(&e.function, e.interval) {
            Ok(check) => LemmaRow {
                function_label: e.function.label.clone(),
                interval: e.interval,
                passed: check.residual <= LEMMA_TOL,
                check: Some(check),
                error: None,
            },
            Err(err) => LemmaRow {
                function_label: e.function.label.clone(),
                interval: e.interval,
                check: None,
                passed: false,
                error: Some(err.to_string()),
            },
        })
        .collect();
    let above_one: Vec<f64> = q_grid.iter().copied().filter(|&q| q > 1.0).collect();
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        q_grid: q_grid.to_vec(),
        summary: summarize(&records),
        records,
        lemma,
        sandwich: sandwich_check(q_grid)?,
        exponent: exponent_experiment(corpus, &above_one)?,
    })
}
