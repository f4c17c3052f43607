//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them all).
//!
//! Criterion 3 asserts that printed-formula divergences stay confined to
//! the eta(-1) = -1 general cases and the c^2 = -1 refinements. The
//! exhaustive engine refutes that confinement (first counterexample
//! F_9 with c = 1+i, where the curve has t = 2 and the printed quartic
//! entry evaluates to 1/2), so that single check fails by construction
//! and prints the divergence census; see README.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;

use cdiff_core::charsum::{
    abc_sums, jacobsthal_quadratic, jacobsthal_quadratic_brute, quad_counts, quad_counts_closed,
};
use cdiff_core::curve::{cornacchia, count_points, trace_lift, trace_x3_minus_x};
use cdiff_core::field::FieldSpec;
use cdiff_core::oracle::{moment_check, n4, n4_closed_cminus1, spectrum_brute};
use cdiff_core::spectrum::{spectrum_c2_minus1, FormulaVariant};
use cdiff_core::verify::{sweep, CSelect, SweepConfig, SweepReport};

/// The acceptance field list: q in {3, 5, 7, 9, 11, 13, 23, 25, 27, 49,
/// 81, 121, 125, 169, 243, 343}.
const FIELDS: [(u64, u32); 16] = [
    (3, 1),
    (5, 1),
    (7, 1),
    (3, 2),
    (11, 1),
    (13, 1),
    (23, 1),
    (5, 2),
    (3, 3),
    (7, 2),
    (3, 4),
    (11, 2),
    (5, 3),
    (13, 2),
    (3, 5),
    (7, 3),
];

fn shared_sweep() -> &'static SweepReport {
    static SWEEP: OnceLock<SweepReport> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let cfg = SweepConfig {
            fields: FIELDS.to_vec(),
            c_select: CSelect::All,
            n4_bound: 125,
            q_limit: cdiff_core::DEFAULT_Q_LIMIT,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        sweep(&cfg).expect("acceptance sweep runs")
    })
}

fn entries(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
    pairs.iter().copied().collect()
}

fn field(p: u64, n: u32) -> FieldSpec {
    FieldSpec::new(p, n).unwrap()
}

#[test]
fn criterion_1_point_spectra() {
    type PointCase = (u64, u32, u64, &'static [(u64, u64)]);
    let cases: [PointCase; 5] = [
        (5, 1, 2, &[(0, 2), (1, 2), (3, 1)]),
        (7, 1, 6, &[(0, 4), (2, 2), (3, 1)]),
        (7, 1, 0, &[(0, 3), (1, 1), (2, 3)]),
        (3, 1, 2, &[(0, 1), (1, 1), (2, 1)]),
        (3, 2, 3, &[(0, 2), (1, 5), (2, 2)]),
    ];
    for (p, n, c_idx, expected) in cases {
        let f = field(p, n);
        let c = f.from_index(c_idx).unwrap();
        let s = spectrum_brute(&f, cdiff_core::map_exponent(f.q()), &c);
        assert_eq!(
            s.entries,
            entries(expected),
            "brute spectrum at F_{} c = {}",
            f.q(),
            c_idx
        );
    }
    println!("ACCEPTANCE 1 (point spectra): PASS");
}

#[test]
fn criterion_2_closed_form_agreement() {
    let report = shared_sweep();
    let mismatches: Vec<_> = report
        .records
        .iter()
        .filter(|r| !r.cprimitive.matches_oracle)
        .map(|r| (r.q, r.c_index))
        .collect();
    if mismatches.is_empty() {
        println!(
            "ACCEPTANCE 2 (C-primitive agreement, {} records): PASS",
            report.summary.records
        );
    } else {
        println!(
            "ACCEPTANCE 2 (C-primitive agreement): FAIL at {:?}",
            mismatches
        );
    }
    assert!(mismatches.is_empty());
}

#[test]
fn criterion_3_documented_divergence() {
    // the named divergence point: printed {0:1, 1:7, 2:1} vs oracle
    // {0:2, 1:5, 2:2} at F_9, c = i
    let f9 = field(3, 2);
    let i = f9.from_coeffs(&[0, 1]).unwrap();
    let printed = spectrum_c2_minus1(&f9, &i, FormulaVariant::AsPrinted).unwrap();
    let printed = printed.outcome.spectrum().expect("branch (i) is integral");
    assert_eq!(printed.entries, entries(&[(0, 1), (1, 7), (2, 1)]));
    let oracle = spectrum_brute(&f9, 5, &i);
    assert_eq!(oracle.entries, entries(&[(0, 2), (1, 5), (2, 2)]));
    assert_ne!(&oracle, printed);

    let report = shared_sweep();

    // every eta(-1) = -1 general-c record must be flagged, and the
    // eta(1-c^2) = 1 family must flag through a non-integer entry
    // (the printed omega_0/omega_2 split differs by 1/2 there)
    for r in &report.records {
        if r.case.starts_with("GEN_ETAM1") {
            assert!(
                !r.printed.matches_oracle,
                "printed formulas unexpectedly match at q = {} c = {}",
                r.q, r.c_index
            );
            if r.case == "GEN_ETAM1_I" {
                assert_eq!(
                    r.printed.consistency, "formula-inconsistency",
                    "expected a non-integer split at q = {} c = {}",
                    r.q, r.c_index
                );
            }
        }
    }

    // confinement claim: no flagged instance outside the GEN_ETAM1_*
    // cases and the c^2 = -1 refinements
    let mut outside: BTreeMap<String, u64> = BTreeMap::new();
    for r in &report.records {
        if !r.printed.matches_oracle && !r.case.starts_with("GEN_ETAM1") && !r.c_square_minus1 {
            *outside.entry(format!("q={} {}", r.q, r.case)).or_insert(0) += 1;
        }
    }
    if outside.is_empty() {
        println!("ACCEPTANCE 3 (documented divergence): PASS");
    } else {
        let total: u64 = outside.values().sum();
        println!(
            "ACCEPTANCE 3 (documented divergence): FAIL — {total} printed-formula \
             divergences outside the GEN_ETAM1_*/C_SQUARE_MINUS1 cases:"
        );
        for (k, v) in &outside {
            println!("    {k}: {v}");
        }
        println!(
            "    (the printed general-c statements shift the quartic sum by a \
             constant; they can only match the oracle where the curve trace is \
             exactly -2, which rational 8-torsion rules out on every q = 1 mod 8 \
             field, e.g. F_9 with c = 1+i has t = 2)"
        );
    }
    assert!(
        outside.is_empty(),
        "printed-formula divergences outside the expected cases: {outside:?}"
    );
}

#[test]
fn criterion_4_moment_identities() {
    let report = shared_sweep();
    for r in &report.records {
        assert!(
            r.moments.sums_ok,
            "sum or weighted sum differs from q at q = {} c = {}",
            r.q, r.c_index
        );
        if let Some(ok) = r.moments.second_moment_ok {
            assert!(ok, "second moment fails at q = {} c = {}", r.q, r.c_index);
        }
    }
    // second-moment check actually ran for every field within its bound
    for r in &report.records {
        assert_eq!(r.moments.second_moment_ok.is_some(), r.q <= 125);
    }

    // spot values
    let f7 = field(7, 1);
    let c6 = f7.from_index(6).unwrap();
    let n4_f7 = n4(&f7, 4, &c6);
    assert_eq!(n4_f7, BigInt::from(115));
    let s = spectrum_brute(&f7, 4, &c6);
    let report_f7 = moment_check(&s, &n4_f7, 4, &f7);
    assert_eq!(report_f7.sum2, 17);
    assert!(report_f7.consistent);

    let f3 = field(3, 1);
    let c2 = f3.from_index(2).unwrap();
    assert_eq!(n4(&f3, 2, &c2), BigInt::from(15));
    println!("ACCEPTANCE 4 (moment identities): PASS");
}

#[test]
fn criterion_5_corollary_closed_form() {
    for (p, n) in FIELDS {
        let f = field(p, n);
        let m1 = f.neg(&f.one());
        assert_eq!(
            n4(&f, cdiff_core::map_exponent(f.q()), &m1),
            n4_closed_cminus1(&f),
            "N_4 closed form at q = {}",
            f.q()
        );
    }
    println!("ACCEPTANCE 5 (corollary closed form): PASS");
}

#[test]
fn criterion_6_curve_layer() {
    // y^2 = x^3 - x over F_5 (c = 2, c^2 = -1)
    let f5 = field(5, 1);
    let tr = count_points(&f5, &f5.from_index(2).unwrap()).unwrap();
    assert_eq!((tr.count, tr.t), (8, -2));

    assert_eq!(trace_x3_minus_x(7).unwrap(), 0);

    assert_eq!(trace_lift(0, 3, 2).unwrap(), -6);
    let f9 = field(3, 2);
    let i = f9.from_coeffs(&[0, 1]).unwrap();
    assert_eq!(count_points(&f9, &i).unwrap().count, 16);

    // Hasse bound and the bridge C = s - 1 on the full sweep
    let report = shared_sweep();
    for r in &report.records {
        if let Some(curve) = &r.curve {
            assert!(
                curve.hasse_ok,
                "Hasse fails at q = {} c = {}",
                r.q, r.c_index
            );
            assert!(
                curve.c_bridge_ok,
                "C != s - 1 at q = {} c = {}",
                r.q, r.c_index
            );
        }
    }
    println!("ACCEPTANCE 6 (curve layer): PASS");
}

#[test]
fn criterion_7_character_sum_layer() {
    // Jacobsthal closed form vs enumeration, exhaustive over q <= 49
    for (p, n) in [
        (3, 1),
        (5, 1),
        (7, 1),
        (3, 2),
        (11, 1),
        (13, 1),
        (23, 1),
        (5, 2),
        (7, 2),
        (3, 3),
    ] {
        let f = field(p, n);
        if f.q() > 49 {
            continue;
        }
        let els = f.enumerate();
        for a2 in els.iter().filter(|e| !f.is_zero(e)) {
            for a1 in &els {
                for a0 in &els {
                    assert_eq!(
                        jacobsthal_quadratic(&f, a2, a1, a0).unwrap(),
                        jacobsthal_quadratic_brute(&f, a2, a1, a0).unwrap()
                    );
                }
            }
        }
    }

    // all sixteen closed forms vs enumeration on every eta(-1) = 1 field
    // with q <= 169
    let mut primes = Vec::new();
    for p in (3u64..=169).step_by(2) {
        if (3..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            primes.push(p);
        }
    }
    let mut fields: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        let mut q = p;
        let mut n = 1;
        while q <= 169 {
            fields.push((p, n));
            n += 1;
            q = match q.checked_mul(p) {
                Some(v) if v <= 169 => v,
                _ => break,
            };
        }
    }
    for (p, n) in fields {
        let f = field(p, n);
        if f.q() % 4 != 1 {
            continue;
        }
        let one = f.one();
        let m1 = f.neg(&one);
        for c in f.enumerate() {
            if f.is_zero(&c) || c == one || c == m1 {
                continue;
            }
            let sums = abc_sums(&f, &c).unwrap();
            assert_eq!(
                quad_counts_closed(&f, &c, &sums).unwrap(),
                quad_counts(&f, &c).unwrap(),
                "sixteen closed forms at F_{} c = {}",
                f.q(),
                f.index(&c)
            );
        }
    }
    println!("ACCEPTANCE 7 (character-sum layer): PASS");
}

#[test]
fn criterion_8_cornacchia() {
    let mut p = 5u64;
    while p < 500 {
        let prime = (2..p)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d));
        if prime && p % 4 == 1 {
            let ts = cornacchia(p).unwrap();
            assert_eq!(ts.a * ts.a + ts.b * ts.b, p as i64);
            assert_eq!(ts.b % 2, 0);
            assert_eq!((ts.a + ts.b).rem_euclid(4), 1);

            // 2a equals the direct-count trace of y^2 = x^3 - x
            let f = field(p, 1);
            let one = f.one();
            let mut s = 0i64;
            for x in f.enumerate() {
                let v = f.mul(&f.mul(&x, &f.sub(&x, &one)), &f.add(&x, &one));
                s += f.eta(&v);
            }
            assert_eq!(2 * ts.a, -s, "trace at p = {p}");
        }
        p += 2;
    }
    println!("ACCEPTANCE 8 (cornacchia): PASS");
}

#[test]
fn criterion_9_determinism() {
    let cfg = SweepConfig {
        fields: vec![(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)],
        c_select: CSelect::All,
        n4_bound: 13,
        q_limit: cdiff_core::DEFAULT_Q_LIMIT,
        jobs: 1,
    };
    let first = cdiff_core::verify::render_ndjson(&sweep(&cfg).unwrap());
    let second = cdiff_core::verify::render_ndjson(&sweep(&cfg).unwrap());
    assert_eq!(first, second, "repeated runs differ");
    let mut parallel_cfg = cfg.clone();
    parallel_cfg.jobs = 4;
    let parallel = cdiff_core::verify::render_ndjson(&sweep(&parallel_cfg).unwrap());
    assert_eq!(first, parallel, "parallel and sequential runs differ");
    println!("ACCEPTANCE 9 (determinism): PASS");
}
