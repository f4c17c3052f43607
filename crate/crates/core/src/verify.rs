//! Sweep engine: for ranges of fields and all multipliers `c != 1`,
//! compare both closed-form layers against the brute-force oracle and
//! report divergences as machine-readable records.
//!
//! Printed-layer divergences are first-class data, not failures; the
//! C-primitive layer is the one expected to match everywhere.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::charsum::abc_sums_with_table;
use crate::curve::count_points_lambda;
use crate::error::{Error, Result};
use crate::field::{Element, EtaTable, FieldSpec, PowTable};
use crate::oracle::{ddt_row_with_table, moment_check, n4, spectrum_of_row};
use crate::spectrum::{
    spectrum_c0, spectrum_c2_minus1, spectrum_cminus1, spectrum_general_cprimitive,
    spectrum_general_printed, BaseCase, CaseTag, ClosedEval, FormulaVariant, RawEntry, Spectrum,
    SpectrumOutcome,
};

/// How the closed layer fared against the oracle at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantReport {
    pub consistency: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<BTreeMap<u64, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw: Option<Vec<RawEntry>>,
    pub matches_oracle: bool,
    pub notes: Vec<String>,
}

impl VariantReport {
    fn from_eval(eval: &ClosedEval, oracle: &Spectrum) -> Self {
        match &eval.outcome {
            SpectrumOutcome::Spectrum(s) => VariantReport {
                consistency: "ok".into(),
                spectrum: Some(s.entries.clone()),
                raw: None,
                matches_oracle: s == oracle,
                notes: eval.notes.clone(),
            },
            SpectrumOutcome::Inconsistent(inc) => VariantReport {
                consistency: "formula-inconsistency".into(),
                spectrum: None,
                raw: Some(inc.raw.clone()),
                matches_oracle: false,
                notes: eval.notes.clone(),
            },
        }
    }
}

/// Moment-identity summary for one record. The `N_4` second-moment check
/// runs only up to the configured bound; `None` means it was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentSummary {
    pub sums_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n4: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_moment_ok: Option<bool>,
}

/// Curve-layer cross-checks for general `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveSummary {
    pub count: u64,
    pub t: i64,
    pub s: i64,
    pub hasse_ok: bool,
    /// `C = s - 1`, the bridge between the quartic sum and the trace.
    pub c_bridge_ok: bool,
}

/// Comparison record for one `(field, c)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRecord {
    pub p: u64,
    pub n: u32,
    pub modulus: Vec<u64>,
    pub q: u64,
    pub c_index: u64,
    pub case: String,
    pub c_square_minus1: bool,
    pub oracle: BTreeMap<u64, u64>,
    pub uniformity: u64,
    pub printed: VariantReport,
    pub cprimitive: VariantReport,
    pub moments: MomentSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSummary>,
}

/// Multiplier selection for a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CSelect {
    /// Every `c != 1`.
    All,
    /// Explicit canonical indices (invalid ones are rejected).
    Explicit(Vec<u64>),
    /// Deterministic evenly-strided sample of about this many indices.
    Sample(u64),
}

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub fields: Vec<(u64, u32)>,
    pub c_select: CSelect,
    /// Run the `N_4` second-moment check for fields with `q` up to here.
    pub n4_bound: u64,
    /// Enumeration limit applied to every field.
    pub q_limit: u64,
    /// Worker threads; output is identical for any value.
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(fields: Vec<(u64, u32)>) -> Self {
        SweepConfig {
            fields,
            c_select: CSelect::All,
            n4_bound: 0,
            q_limit: crate::field::DEFAULT_Q_LIMIT,
            jobs: 1,
        }
    }
}

/// Aggregate tallies of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub fields: usize,
    pub records: usize,
    pub cprimitive_mismatches: u64,
    pub printed_divergences: u64,
    pub printed_divergences_by_case: BTreeMap<String, u64>,
    pub moment_failures: u64,
}

/// Full sweep output: records sorted by `(p, n, c_index)` plus a summary.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub records: Vec<VerifyRecord>,
    pub summary: SweepSummary,
}

struct FieldCtx {
    f: FieldSpec,
    eta: EtaTable,
    pows: PowTable,
    d: u64,
}

impl FieldCtx {
    fn build(p: u64, n: u32, q_limit: u64) -> Result<Self> {
        let f = FieldSpec::with_limit(p, n, q_limit)?;
        let eta = EtaTable::build(&f);
        let d = crate::map_exponent(f.q());
        let pows = PowTable::build(&f, d);
        Ok(FieldCtx { f, eta, pows, d })
    }
}

fn build_record(ctx: &FieldCtx, c: &Element, n4_bound: u64) -> Result<VerifyRecord> {
    let f = &ctx.f;
    let case: CaseTag = crate::spectrum::classify(f, c)?;
    let row = ddt_row_with_table(f, &ctx.pows, ctx.d, c, &f.one());
    let oracle = spectrum_of_row(f, &row);

    let (printed_eval, cprim_eval, curve) = match case.base {
        BaseCase::CZero => {
            let s = spectrum_c0(f);
            let eval = ClosedEval {
                case,
                outcome: SpectrumOutcome::Spectrum(s),
                notes: vec![],
            };
            (eval.clone(), eval, None)
        }
        BaseCase::CMinusOne => {
            let s = spectrum_cminus1(f);
            let eval = ClosedEval {
                case,
                outcome: SpectrumOutcome::Spectrum(s),
                notes: vec![],
            };
            (eval.clone(), eval, None)
        }
        _ => {
            let c2 = f.mul(c, c);
            let trace = count_points_lambda(f, &c2, &ctx.eta);
            let sums = abc_sums_with_table(f, c, &ctx.eta)?;
            let printed = if case.c_square_minus1 {
                spectrum_c2_minus1(f, c, FormulaVariant::AsPrinted)?
            } else {
                spectrum_general_printed(f, c, trace.t)?
            };
            let cprim = spectrum_general_cprimitive(f, c, sums.c)?;
            let hasse_ok = (trace.t as i128).pow(2) <= 4 * f.q() as i128;
            let curve = CurveSummary {
                count: trace.count,
                t: trace.t,
                s: trace.s,
                hasse_ok,
                c_bridge_ok: sums.c == trace.s - 1,
            };
            (printed, cprim, Some(curve))
        }
    };

    let moments = {
        let (m0, m1, _) = oracle.moments();
        let sums_ok = m0 == f.q() as u128 && m1 == f.q() as u128;
        if f.q() <= n4_bound {
            let n4_val = n4(f, ctx.d, c);
            let report = moment_check(&oracle, &n4_val, ctx.d, f);
            MomentSummary {
                sums_ok,
                n4: Some(n4_val.to_string()),
                second_moment_ok: Some(report.consistent),
            }
        } else {
            MomentSummary {
                sums_ok,
                n4: None,
                second_moment_ok: None,
            }
        }
    };

    Ok(VerifyRecord {
        p: f.p(),
        n: f.n(),
        modulus: f.modulus().to_vec(),
        q: f.q(),
        c_index: f.index(c),
        case: case.to_string(),
        c_square_minus1: case.c_square_minus1,
        uniformity: oracle.uniformity(),
        printed: VariantReport::from_eval(&printed_eval, &oracle),
        cprimitive: VariantReport::from_eval(&cprim_eval, &oracle),
        oracle: oracle.entries,
        moments,
        curve,
    })
}

/// Runs every check for a single `(field, c)` pair. `n4_bound` gates the
/// quadratic-time second-moment check.
pub fn verify_one(f: &FieldSpec, c: &Element, n4_bound: u64) -> Result<VerifyRecord> {
    let ctx = FieldCtx {
        f: f.clone(),
        eta: EtaTable::build(f),
        d: crate::map_exponent(f.q()),
        pows: PowTable::build(f, crate::map_exponent(f.q())),
    };
    build_record(&ctx, c, n4_bound)
}

fn selected_indices(q: u64, select: &CSelect) -> Result<Vec<u64>> {
    match select {
        CSelect::All => Ok((0..q).filter(|&i| i != 1).collect()),
        CSelect::Explicit(list) => {
            for &i in list {
                if i >= q {
                    return Err(Error::IndexOutOfRange { index: i, q });
                }
                if i == 1 {
                    return Err(Error::COneOutOfScope);
                }
            }
            Ok(list.clone())
        }
        CSelect::Sample(k) => {
            let k = (*k).max(1);
            let stride = (q / k).max(1);
            Ok((0..q)
                .step_by(stride as usize)
                .filter(|&i| i != 1)
                .collect())
        }
    }
}

/// Runs the sweep. Records come back sorted by `(p, n, c_index)` and are
/// byte-identical for repeated runs regardless of `jobs`.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let mut contexts = Vec::new();
    for &(p, n) in &cfg.fields {
        contexts.push(FieldCtx::build(p, n, cfg.q_limit)?);
    }
    let mut tasks: Vec<(usize, u64)> = Vec::new();
    for (fi, ctx) in contexts.iter().enumerate() {
        for idx in selected_indices(ctx.f.q(), &cfg.c_select)? {
            tasks.push((fi, idx));
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, VerifyRecord)>> = Mutex::new(Vec::with_capacity(tasks.len()));
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    let workers = cfg.jobs.max(1).min(tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= tasks.len() {
                        break;
                    }
                    let (fi, c_idx) = tasks[i];
                    let ctx = &contexts[fi];
                    let c = ctx.f.from_index(c_idx).expect("selected index < q");
                    match build_record(ctx, &c, cfg.n4_bound) {
                        Ok(rec) => local.push((i, rec)),
                        Err(e) => {
                            let mut slot = first_error.lock().unwrap();
                            if slot.is_none() {
                                *slot = Some(e);
                            }
                            break;
                        }
                    }
                }
                results.lock().unwrap().extend(local);
            });
        }
    });
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }

    let mut records: Vec<VerifyRecord> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    records.sort_by_key(|r| (r.p, r.n, r.c_index));

    let mut summary = SweepSummary {
        fields: contexts.len(),
        records: records.len(),
        cprimitive_mismatches: 0,
        printed_divergences: 0,
        printed_divergences_by_case: BTreeMap::new(),
        moment_failures: 0,
    };
    for r in &records {
        if !r.cprimitive.matches_oracle {
            summary.cprimitive_mismatches += 1;
        }
        if !r.printed.matches_oracle {
            summary.printed_divergences += 1;
            *summary
                .printed_divergences_by_case
                .entry(r.case.clone())
                .or_insert(0) += 1;
        }
        let second_ok = r.moments.second_moment_ok.unwrap_or(true);
        if !r.moments.sums_ok || !second_ok {
            summary.moment_failures += 1;
        }
    }
    Ok(SweepReport { records, summary })
}

/// Renders a report as newline-delimited JSON records followed by one
/// summary object.
pub fn render_ndjson(report: &SweepReport) -> String {
    let mut out = String::new();
    for r in &report.records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out.push_str(
        &serde_json::to_string(&serde_json::json!({ "summary": report.summary }))
            .expect("summary serializes"),
    );
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_one_f9_c_i() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let i = f9.from_coeffs(&[0, 1]).unwrap();
        let rec = verify_one(&f9, &i, 100).unwrap();
        assert!(rec.cprimitive.matches_oracle);
        assert!(!rec.printed.matches_oracle);
        assert_eq!(
            rec.printed.spectrum.as_ref().unwrap(),
            &[(0, 1), (1, 7), (2, 1)].into_iter().collect()
        );
        assert_eq!(rec.case, "GEN_ETA1_I+C_SQUARE_MINUS1");
        assert!(rec.moments.sums_ok);
        assert_eq!(rec.moments.second_moment_ok, Some(true));
        let curve = rec.curve.unwrap();
        assert_eq!(curve.t, -6);
        assert!(curve.c_bridge_ok);
    }

    #[test]
    fn verify_one_f5_c2_both_match() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        let c = f5.from_index(2).unwrap();
        let rec = verify_one(&f5, &c, 100).unwrap();
        assert!(rec.printed.matches_oracle);
        assert!(rec.cprimitive.matches_oracle);
    }

    #[test]
    fn verify_one_c_zero() {
        let f7 = FieldSpec::new(7, 1).unwrap();
        let rec = verify_one(&f7, &f7.zero(), 100).unwrap();
        assert_eq!(rec.case, "C_ZERO");
        assert!(rec.printed.matches_oracle && rec.cprimitive.matches_oracle);
        assert!(rec.curve.is_none());
    }

    #[test]
    fn sweep_small_fields_no_cprimitive_mismatch() {
        let cfg = SweepConfig {
            fields: vec![(3, 1), (5, 1), (7, 1), (3, 2)],
            c_select: CSelect::All,
            n4_bound: 9,
            q_limit: crate::field::DEFAULT_Q_LIMIT,
            jobs: 2,
        };
        let report = sweep(&cfg).unwrap();
        assert_eq!(report.summary.cprimitive_mismatches, 0);
        assert_eq!(report.summary.moment_failures, 0);
        // records exclude c = 1
        assert_eq!(
            report.summary.records,
            (3 - 1) + (5 - 1) + (7 - 1) + (9 - 1)
        );
    }

    #[test]
    fn sweep_empty_config() {
        let report = sweep(&SweepConfig::new(vec![])).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.summary.records, 0);
    }

    #[test]
    fn sweep_is_deterministic_across_thread_counts() {
        let mut cfg = SweepConfig::new(vec![(5, 1), (7, 1), (3, 2)]);
        cfg.n4_bound = 9;
        let sequential = sweep(&cfg).unwrap();
        cfg.jobs = 4;
        let parallel = sweep(&cfg).unwrap();
        assert_eq!(render_ndjson(&sequential), render_ndjson(&parallel));
    }

    #[test]
    fn explicit_selection_rejects_bad_indices() {
        let mut cfg = SweepConfig::new(vec![(5, 1)]);
        cfg.c_select = CSelect::Explicit(vec![7]);
        assert!(matches!(
            sweep(&cfg).unwrap_err(),
            Error::IndexOutOfRange { .. }
        ));
        cfg.c_select = CSelect::Explicit(vec![1]);
        assert_eq!(sweep(&cfg).unwrap_err(), Error::COneOutOfScope);
    }
}
