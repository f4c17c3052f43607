//! `cdiff`: c-differential spectra of x^((q+1)/2) over odd-characteristic
//! finite fields, from the command line.
//!
//! Exit codes: 0 success; 1 C-primitive mismatch under `sweep --strict`;
//! 2 invalid input. Output is fully buffered, so error paths never leave
//! partial output behind.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cdiff_core::charsum::{abc_sums, pair_counts_s, pair_counts_t, quad_counts};
use cdiff_core::curve::trace_via_subfield;
use cdiff_core::field::{Element, FieldSpec, DEFAULT_Q_LIMIT};
use cdiff_core::oracle::{a0_row, ddt_row, spectrum_brute};
use cdiff_core::spectrum::{closed_spectrum, FormulaVariant, SpectrumOutcome};
use cdiff_core::verify::{render_ndjson, sweep, verify_one, CSelect, SweepConfig};

#[derive(Parser)]
#[command(name = "cdiff", version, about = "c-differential spectrum toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of x^((q+1)/2) at one (field, c), closed form and/or brute force
    Spectrum(SpectrumArgs),
    /// c-DDT: one row or the full table, as CSV
    Ddt(DdtArgs),
    /// Character sums A, B, C and the cyclotomic pair/quad counts
    Charsum(CharsumArgs),
    /// Point count and Frobenius trace of y^2 = x(x-1)(x-c^2)
    EcTrace(FieldCArgs),
    /// Compare closed forms against the oracle at one (field, c)
    Verify(VerifyArgs),
    /// Sweep fields and multipliers, emitting NDJSON records and a summary
    Sweep(SweepArgs),
}

#[derive(Args)]
struct FieldCArgs {
    /// Field characteristic (odd prime)
    #[arg(long)]
    p: u64,
    /// Extension degree
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Multiplier c as its canonical integer index
    #[arg(long, conflicts_with = "c_poly")]
    c: Option<u64>,
    /// Multiplier c as comma-separated coefficients, constant term first
    #[arg(long)]
    c_poly: Option<String>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Brute,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Printed,
    Cprim,
}

impl From<Variant> for FormulaVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Printed => FormulaVariant::AsPrinted,
            Variant::Cprim => FormulaVariant::CPrimitive,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    field: FieldCArgs,
    /// Exponent override; brute-force methods only
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Variant::Cprim)]
    variant: Variant,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct DdtArgs {
    #[command(flatten)]
    field: FieldCArgs,
    /// Exponent; defaults to (q+1)/2
    #[arg(long)]
    d: Option<u64>,
    /// Row shift a (canonical index); omit for the full table
    #[arg(long)]
    a: Option<u64>,
}

#[derive(Args)]
struct CharsumArgs {
    #[command(flatten)]
    field: FieldCArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    field: FieldCArgs,
    /// Run the N_4 second-moment check for q up to this bound
    #[arg(long, default_value_t = 125)]
    n4_bound: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Explicit fields as "p,n" pairs separated by ';' (e.g. "3,1;5,1;3,2")
    #[arg(long)]
    fields: Option<String>,
    /// Largest characteristic when enumerating fields from bounds
    #[arg(long, default_value_t = 13)]
    p_max: u64,
    /// Largest extension degree when enumerating fields from bounds
    #[arg(long, default_value_t = 3)]
    n_max: u32,
    /// Largest field size when enumerating fields from bounds
    #[arg(long, default_value_t = 343)]
    q_max: u64,
    /// Explicit c indices (comma separated); default all c != 1
    #[arg(long, conflicts_with = "c_sample")]
    c_list: Option<String>,
    /// Deterministic evenly-strided sample of about this many c per field
    #[arg(long)]
    c_sample: Option<u64>,
    /// Run the N_4 second-moment check for q up to this bound
    #[arg(long, default_value_t = 0)]
    n4_bound: u64,
    /// Exit 1 if any C-primitive spectrum mismatches the oracle
    #[arg(long)]
    strict: bool,
    /// Worker threads (output is identical for any value)
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn q_limit() -> u64 {
    std::env::var("CDIFF_QMAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_Q_LIMIT)
}

struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

fn parse_field(args: &FieldCArgs) -> Result<(FieldSpec, Element), Invalid> {
    let f = FieldSpec::with_limit(args.p, args.n, q_limit())?;
    let c = match (&args.c, &args.c_poly) {
        (Some(idx), None) => f.from_index(*idx)?,
        (None, Some(poly)) => {
            let coeffs: Vec<u64> = poly
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Invalid(format!("bad --c-poly: {e}")))?;
            f.from_coeffs(&coeffs)?
        }
        _ => return Err(Invalid("exactly one of --c or --c-poly is required".into())),
    };
    Ok((f, c))
}

fn spectrum_entries_json(entries: &std::collections::BTreeMap<u64, u64>) -> Value {
    let mut map = Map::new();
    for (&i, &w) in entries {
        map.insert(i.to_string(), json!(w));
    }
    Value::Object(map)
}

fn run_spectrum(args: &SpectrumArgs) -> Result<String, Invalid> {
    let (f, c) = parse_field(&args.field)?;
    let default_d = cdiff_core::map_exponent(f.q());
    let d = args.d.unwrap_or(default_d);
    if d != default_d && args.method != Method::Brute {
        return Err(Invalid(
            "closed forms are specific to d = (q+1)/2; use --method brute with --d".into(),
        ));
    }

    let case = cdiff_core::spectrum::classify(&f, &c)?;
    let mut notes: Vec<String> = Vec::new();
    let mut obj = Map::new();
    obj.insert("q".into(), json!(f.q()));
    obj.insert("c".into(), json!(f.index(&c)));
    obj.insert("case".into(), json!(case.to_string()));

    let brute = if args.method != Method::Closed {
        Some(spectrum_brute(&f, d, &c))
    } else {
        None
    };
    let closed = if args.method != Method::Brute {
        let eval = closed_spectrum(&f, &c, args.variant.into())?;
        notes.extend(eval.notes.clone());
        Some(eval)
    } else {
        None
    };

    let (main_spectrum, consistency, raw) = match (&brute, &closed) {
        (Some(b), _) => {
            let consistency = match closed.as_ref().map(|e| &e.outcome) {
                Some(SpectrumOutcome::Inconsistent(inc)) => {
                    ("formula-inconsistency", Some(inc.raw.clone()))
                }
                _ => ("ok", None),
            };
            (Some(b.clone()), consistency.0, consistency.1)
        }
        (None, Some(eval)) => match &eval.outcome {
            SpectrumOutcome::Spectrum(s) => (Some(s.clone()), "ok", None),
            SpectrumOutcome::Inconsistent(inc) => {
                (None, "formula-inconsistency", Some(inc.raw.clone()))
            }
        },
        (None, None) => unreachable!("some method always selected"),
    };

    match &main_spectrum {
        Some(s) => {
            obj.insert("spectrum".into(), spectrum_entries_json(&s.entries));
            // rows at a != 0 share the a = 1 histogram for a power map, so
            // the uniformity needs only the spectrum and the a = 0 row
            let uniformity = if c == f.one() {
                s.uniformity()
            } else {
                s.uniformity().max(a0_row(&f, d, &c)?.max_count())
            };
            obj.insert("uniformity".into(), json!(uniformity));
        }
        None => {
            obj.insert("spectrum".into(), Value::Null);
            obj.insert("uniformity".into(), Value::Null);
        }
    }
    if args.method == Method::Both {
        if let Some(eval) = &closed {
            let closed_json = match &eval.outcome {
                SpectrumOutcome::Spectrum(s) => spectrum_entries_json(&s.entries),
                SpectrumOutcome::Inconsistent(_) => Value::Null,
            };
            obj.insert("closed_spectrum".into(), closed_json);
            let matched = matches!(
                (&eval.outcome, &brute),
                (SpectrumOutcome::Spectrum(s), Some(b)) if s == b
            );
            obj.insert("match".into(), json!(matched));
        }
    }
    obj.insert("consistency".into(), json!(consistency));
    if let Some(raw) = raw {
        obj.insert("raw".into(), serde_json::to_value(raw).unwrap());
    }
    obj.insert("notes".into(), json!(notes));

    match args.format {
        Format::Json => Ok(format!("{}\n", Value::Object(obj))),
        Format::Csv => {
            let mut out = String::from("multiplicity,count\n");
            if let Some(s) = &main_spectrum {
                for (i, w) in &s.entries {
                    writeln!(out, "{i},{w}").unwrap();
                }
            }
            Ok(out)
        }
    }
}

fn run_ddt(args: &DdtArgs) -> Result<String, Invalid> {
    let (f, c) = parse_field(&args.field)?;
    let d = args.d.unwrap_or(cdiff_core::map_exponent(f.q()));
    let mut out = String::new();
    match args.a {
        Some(a_idx) => {
            let a = f.from_index(a_idx)?;
            let row = ddt_row(&f, d, &c, &a);
            out.push_str("b,count\n");
            for b in 0..f.q() {
                writeln!(out, "{b},{}", row.counts.get(&b).copied().unwrap_or(0)).unwrap();
            }
        }
        None => {
            out.push_str("a,b,count\n");
            for a_idx in 0..f.q() {
                let a = f.from_index(a_idx)?;
                let row = ddt_row(&f, d, &c, &a);
                for b in 0..f.q() {
                    writeln!(
                        out,
                        "{a_idx},{b},{}",
                        row.counts.get(&b).copied().unwrap_or(0)
                    )
                    .unwrap();
                }
            }
        }
    }
    Ok(out)
}

fn signs_key(signs: &[i64]) -> String {
    signs
        .iter()
        .map(|s| if *s == 1 { "+1" } else { "-1" })
        .collect::<Vec<_>>()
        .join(",")
}

fn run_charsum(args: &CharsumArgs) -> Result<String, Invalid> {
    let (f, c) = parse_field(&args.field)?;
    let sums = abc_sums(&f, &c)?;
    let quads = quad_counts(&f, &c)?;
    let s_counts = pair_counts_s(&f);
    let t_counts = pair_counts_t(&f);

    let pair_json = |counts: &cdiff_core::charsum::PairCounts| {
        let mut m = Map::new();
        for ((i, j), v) in counts.iter() {
            m.insert(signs_key(&[i, j]), json!(v));
        }
        Value::Object(m)
    };
    let mut squad = Map::new();
    for ((i, j, u, v), count) in quads.iter() {
        squad.insert(signs_key(&[i, j, u, v]), json!(count));
    }
    let obj = json!({
        "q": f.q(),
        "c": f.index(&c),
        "A": sums.a,
        "B": sums.b,
        "C": sums.c,
        "S": pair_json(&s_counts),
        "T": pair_json(&t_counts),
        "Squad": Value::Object(squad),
    });
    Ok(format!("{obj}\n"))
}

fn run_ec_trace(args: &FieldCArgs) -> Result<String, Invalid> {
    let (f, c) = parse_field(args)?;
    let trace = trace_via_subfield(&f, &c)?;
    Ok(format!("{}\n", serde_json::to_value(trace).unwrap()))
}

fn run_verify(args: &VerifyArgs) -> Result<String, Invalid> {
    let (f, c) = parse_field(&args.field)?;
    let record = verify_one(&f, &c, args.n4_bound)?;
    Ok(format!("{}\n", serde_json::to_value(&record).unwrap()))
}

fn odd_primes_up_to(limit: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    'outer: for p in (3..=limit).step_by(2) {
        let mut f = 3;
        while f * f <= p {
            if p % f == 0 {
                continue 'outer;
            }
            f += 2;
        }
        primes.push(p);
    }
    primes
}

fn run_sweep(args: &SweepArgs) -> Result<(String, u64), Invalid> {
    let fields = match &args.fields {
        Some(list) => {
            let mut out = Vec::new();
            for part in list.split(';').filter(|s| !s.trim().is_empty()) {
                let (p, n) = part
                    .split_once(',')
                    .ok_or_else(|| Invalid(format!("bad --fields entry '{part}', want p,n")))?;
                out.push((
                    p.trim()
                        .parse::<u64>()
                        .map_err(|e| Invalid(e.to_string()))?,
                    n.trim()
                        .parse::<u32>()
                        .map_err(|e| Invalid(e.to_string()))?,
                ));
            }
            out
        }
        None => {
            let mut out = Vec::new();
            for p in odd_primes_up_to(args.p_max) {
                let mut q = p;
                for n in 1..=args.n_max {
                    if q > args.q_max {
                        break;
                    }
                    out.push((p, n));
                    q = match q.checked_mul(p) {
                        Some(v) => v,
                        None => break,
                    };
                }
            }
            out
        }
    };
    let c_select = match (&args.c_list, args.c_sample) {
        (Some(list), _) => CSelect::Explicit(
            list.split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Invalid(format!("bad --c-list: {e}")))?,
        ),
        (None, Some(k)) => CSelect::Sample(k),
        (None, None) => CSelect::All,
    };
    let cfg = SweepConfig {
        fields,
        c_select,
        n4_bound: args.n4_bound,
        q_limit: q_limit(),
        jobs: args.jobs,
    };
    let report = sweep(&cfg)?;
    Ok((render_ndjson(&report), report.summary.cprimitive_mismatches))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Invalid> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| Invalid(e.to_string())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(String, Option<PathBuf>, u64), Invalid> = match &cli.command {
        Command::Spectrum(a) => run_spectrum(a).map(|s| (s, a.field.out.clone(), 0)),
        Command::Ddt(a) => run_ddt(a).map(|s| (s, a.field.out.clone(), 0)),
        Command::Charsum(a) => run_charsum(a).map(|s| (s, a.field.out.clone(), 0)),
        Command::EcTrace(a) => run_ec_trace(a).map(|s| (s, a.out.clone(), 0)),
        Command::Verify(a) => run_verify(a).map(|s| (s, a.field.out.clone(), 0)),
        Command::Sweep(a) => run_sweep(a).map(|(s, mismatches)| {
            let code = if a.strict && mismatches > 0 { 1 } else { 0 };
            (s, a.out.clone(), code)
        }),
    };
    match result {
        Ok((content, out, code)) => {
            if let Err(Invalid(e)) = emit(&out, &content) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code as u8)
        }
        Err(Invalid(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
