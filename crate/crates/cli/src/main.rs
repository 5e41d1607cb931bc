//! `biquo`: exact computations on truncated biquotient cohomology rings.
//!
//! Every subcommand emits either human-readable text or, with `--json`, a
//! machine-readable report whose evidence re-verifies through the library
//! without repeating the search. Exit codes: 0 for a definite verdict, 2 for
//! Unknown, 1 for usage or input errors.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use biquo_core::biquotient::{
    catalog_low_dim, freeness_check, q_first_pontryagin, ra_cohomology, rp_cohomology,
    selection_determinants, Freeness, Isotropy, TorusActionSpec, WeightMatrix,
};
use biquo_core::bundle::{
    chern_summary, inverse_decision, pontryagin_of_realification, sufficient_conditions,
    InverseDecision, LineBundleSum,
};
use biquo_core::distinguish::{
    bounded_iso_search, distinguish, DistinguishBounds, DistinguishVerdict, IsoSearchResult,
};
use biquo_core::{
    builtins, check_star, CohomologyRing, IntMat, SearchBudget, StarVerdict,
};

#[derive(Parser)]
#[command(name = "biquo", version, about = "Exact invariants of torus biquotients")]
struct Cli {
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a ring definition.
    Ring {
        #[command(subcommand)]
        command: RingCommand,
    },
    /// Decide the vanishing-squares property.
    Star {
        #[command(subcommand)]
        command: StarCommand,
    },
    /// Characteristic classes and inverse decisions for line-bundle sums.
    Bundle {
        #[command(subcommand)]
        command: BundleCommand,
    },
    /// Freeness test for a torus action on a product of 3-spheres.
    Free {
        /// Action spec file: {"matrix": [[..]]} or {"a_weights": .., "b_weights": ..}.
        spec: String,
    },
    /// Generators for the example families.
    Family {
        #[command(subcommand)]
        command: FamilyCommand,
    },
    /// Bounded search for a graded ring isomorphism.
    Iso {
        ring_a: String,
        ring_b: String,
        /// Max absolute matrix entry.
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Bounded non-isomorphism evidence for two prime-family rings.
    Distinguish {
        #[arg(short = 'p')]
        p: i64,
        #[arg(short = 'q')]
        q: i64,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long, default_value_t = 10)]
        pair_height: u32,
        #[arg(long, default_value_t = 3)]
        iso_bound: u32,
        #[arg(long, default_value_t = 30)]
        obstruction_box: u32,
    },
    /// The low-dimensional catalog.
    Catalog {
        /// Also evaluate the inverse-existence conditions per entry.
        #[arg(long)]
        check_conditions: bool,
    },
}

#[derive(Subcommand)]
enum RingCommand {
    /// Print a ring with its normalised degree-4 group.
    Show { ring: String },
}

#[derive(Subcommand)]
enum StarCommand {
    /// Run the decision procedure on a ring.
    Check {
        ring: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Witness search height bound.
    #[arg(long)]
    height: Option<u32>,
    /// Max witness tuple length (default: free rank + 1).
    #[arg(long)]
    tuple_len: Option<usize>,
    /// Cap on candidate functionals per certificate stage.
    #[arg(long)]
    budget: Option<usize>,
}

impl BudgetArgs {
    fn resolve(&self, ring: &CohomologyRing) -> Result<SearchBudget, String> {
        let mut b = SearchBudget::default_for(ring);
        if let Some(h) = self.height {
            b.height_bound = h;
        }
        if let Some(t) = self.tuple_len {
            b.tuple_length_bound = t;
        }
        if let Some(c) = self.budget {
            b.max_functional_candidates = c;
        }
        SearchBudget::new(
            b.height_bound,
            b.tuple_length_bound,
            b.functional_coefficient_set.clone(),
            b.max_functional_candidates,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum BundleCommand {
    /// Chern data of a complex sum, or p1 of a realified one.
    Chern { ring: String, bundle: String },
    /// Decide inverse existence (runs the property check first).
    Inverse {
        ring: String,
        bundle: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum FamilyCommand {
    /// Ring of an admissible weight matrix (JSON file with a bare matrix).
    Ra { matrix: String },
    /// Ring of the prime family.
    Rp {
        #[arg(short = 'p')]
        p: i64,
        #[arg(short = 'k')]
        k: usize,
    },
    /// First Pontryagin number of the 7-dimensional family.
    Q {
        #[arg(long, allow_hyphen_values = true)]
        s: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<i64>,
        /// Tabulate over an inclusive range, e.g. --table -10..10.
        #[arg(long, value_name = "A..B", allow_hyphen_values = true)]
        table: Option<String>,
    },
}

/// Exit disposition of a successful run.
enum Verdict {
    Definite,
    Unknown,
}

struct Report {
    /// argv echo
    command: Vec<String>,
    inputs_digest: String,
    result: Value,
    evidence: Value,
    human: String,
    verdict: Verdict,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Digest over the argv echo plus the raw bytes of every file input.
fn digest(command: &[String], files: &[(String, Vec<u8>)]) -> String {
    let mut acc: Vec<u8> = Vec::new();
    for part in command {
        acc.extend_from_slice(part.as_bytes());
        acc.push(0);
    }
    for (name, bytes) in files {
        acc.extend_from_slice(name.as_bytes());
        acc.push(0);
        acc.extend_from_slice(bytes);
        acc.push(0);
    }
    format!("fnv1a:{:016x}", fnv1a(&acc))
}

/// A ring argument: a built-in name or a path to a ring definition file.
/// Returns the ring and the bytes that should feed the input digest.
fn load_ring(arg: &str) -> Result<(CohomologyRing, Vec<u8>), String> {
    if let Ok(ring) = builtins::resolve(arg) {
        return Ok((ring, arg.as_bytes().to_vec()));
    }
    let text = fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?;
    let ring = CohomologyRing::from_json(&text).map_err(|e| format!("{arg}: {e}"))?;
    Ok((ring, text.into_bytes()))
}

fn load_bundle(arg: &str) -> Result<(LineBundleSum, Vec<u8>), String> {
    let text = fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?;
    let bundle = LineBundleSum::from_json(&text).map_err(|e| format!("{arg}: {e}"))?;
    Ok((bundle, text.into_bytes()))
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serialization")
}

fn ring_summary_value(ring: &CohomologyRing) -> Value {
    let h4 = ring.degree_four();
    json!({
        "name": ring.name(),
        "k": ring.k(),
        "generators": (0..ring.k()).map(|i| ring.generator_name(i)).collect::<Vec<_>>(),
        "relations": ring.relations().iter()
            .map(|r| ring.relation_display(r)).collect::<Vec<_>>(),
        "h4_free_rank": h4.free_rank(),
        "h4_torsion_orders": h4.torsion_orders().iter()
            .map(std::string::ToString::to_string).collect::<Vec<_>>(),
        "definition": serde_json::from_str::<Value>(&ring.to_json()).unwrap(),
    })
}

fn ring_summary_text(ring: &CohomologyRing) -> String {
    let h4 = ring.degree_four();
    let mut out = String::new();
    if let Some(name) = ring.name() {
        let _ = writeln!(out, "ring: {name}");
    }
    let _ = writeln!(out, "presentation: {ring}");
    let _ = writeln!(out, "H^2 rank: {}", ring.k());
    let _ = write!(out, "H^4: free rank {}", h4.free_rank());
    if h4.torsion_orders().is_empty() {
        let _ = writeln!(out, ", no torsion");
    } else {
        let t: Vec<String> =
            h4.torsion_orders().iter().map(std::string::ToString::to_string).collect();
        let _ = writeln!(out, ", torsion orders [{}]", t.join(", "));
    }
    out
}

fn star_verdict_report(
    command: Vec<String>,
    files: &[(String, Vec<u8>)],
    ring: &CohomologyRing,
    verdict: &StarVerdict,
) -> Report {
    let (human, disposition) = match verdict {
        StarVerdict::Holds { certificate } => (
            format!(
                "verdict: holds ({} stage{})\n",
                certificate.stages.len(),
                if certificate.stages.len() == 1 { "" } else { "s" }
            ),
            Verdict::Definite,
        ),
        StarVerdict::Fails { witness } => {
            let elems: Vec<String> = witness
                .tuple
                .iter()
                .map(|x| {
                    let coords: Vec<String> =
                        x.0.iter().map(std::string::ToString::to_string).collect();
                    format!("({})", coords.join(", "))
                })
                .collect();
            (format!("verdict: fails, witness {{{}}}\n", elems.join(", ")), Verdict::Definite)
        }
        StarVerdict::Unknown { report } => (
            format!(
                "verdict: unknown (functionals tried {}, singles scanned {}, tuple sums tried {})\n",
                report.functionals_tried, report.singles_scanned, report.tuple_sums_tried
            ),
            Verdict::Unknown,
        ),
    };
    Report {
        inputs_digest: digest(&command, files),
        command,
        result: json!({"ring": ring.name(), "k": ring.k()}),
        evidence: to_value(verdict),
        human,
        verdict: disposition,
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<Report, String> {
    let command = argv.to_vec();
    match &cli.command {
        Command::Ring { command: RingCommand::Show { ring } } => {
            let (r, bytes) = load_ring(ring)?;
            let files = vec![(ring.clone(), bytes)];
            Ok(Report {
                inputs_digest: digest(&command, &files),
                command,
                result: ring_summary_value(&r),
                evidence: Value::Null,
                human: ring_summary_text(&r),
                verdict: Verdict::Definite,
            })
        }
        Command::Star { command: StarCommand::Check { ring, budget } } => {
            let (r, bytes) = load_ring(ring)?;
            let b = budget.resolve(&r)?;
            let verdict = check_star(&r, &b);
            let files = vec![(ring.clone(), bytes)];
            Ok(star_verdict_report(command, &files, &r, &verdict))
        }
        Command::Bundle { command: BundleCommand::Chern { ring, bundle } } => {
            let (r, rbytes) = load_ring(ring)?;
            let (e, ebytes) = load_bundle(bundle)?;
            let files = vec![(ring.clone(), rbytes), (bundle.clone(), ebytes)];
            if e.real_flag {
                let p1 = pontryagin_of_realification(&e, &r).map_err(|er| er.to_string())?;
                let rank = 2 * e.c1s.len() as u32 + e.extra_trivial_rank;
                Ok(Report {
                    inputs_digest: digest(&command, &files),
                    command,
                    result: json!({"real": true, "rank": rank, "p1": to_value(&p1)}),
                    evidence: Value::Null,
                    human: format!("real bundle of rank {rank}\np1 = {}\n", to_value(&p1)),
                    verdict: Verdict::Definite,
                })
            } else {
                let summary = chern_summary(&e, &r).map_err(|er| er.to_string())?;
                Ok(Report {
                    inputs_digest: digest(&command, &files),
                    command,
                    result: to_value(&summary),
                    evidence: Value::Null,
                    human: format!(
                        "rank {}\nc1 = {}\nc2 = {}\nc1^2 - 2 c2 = {}\n",
                        summary.rank,
                        to_value(&summary.c1),
                        to_value(&summary.c2),
                        to_value(&summary.stable_obstruction),
                    ),
                    verdict: Verdict::Definite,
                })
            }
        }
        Command::Bundle { command: BundleCommand::Inverse { ring, bundle, budget } } => {
            let (r, rbytes) = load_ring(ring)?;
            let (e, ebytes) = load_bundle(bundle)?;
            let b = budget.resolve(&r)?;
            let star = check_star(&r, &b);
            let decision = inverse_decision(&r, &star, &e).map_err(|er| er.to_string())?;
            let files = vec![(ring.clone(), rbytes), (bundle.clone(), ebytes)];
            let (text, disposition) = match decision {
                InverseDecision::HasBiquotientInverse => {
                    ("inverse exists within the class (bundle is trivial)", Verdict::Definite)
                }
                InverseDecision::NoBiquotientInverse => {
                    ("no inverse within the class", Verdict::Definite)
                }
                InverseDecision::Unknown => {
                    ("unknown (vanishing-squares property not established)", Verdict::Unknown)
                }
            };
            Ok(Report {
                inputs_digest: digest(&command, &files),
                command,
                result: to_value(&decision),
                evidence: json!({"star": to_value(&star)}),
                human: format!("{text}\n"),
                verdict: disposition,
            })
        }
        Command::Free { spec } => {
            let text =
                fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
            let parsed: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let action = if let Some(matrix) = parsed.get("matrix") {
                let m: IntMat =
                    serde_json::from_value(matrix.clone()).map_err(|e| e.to_string())?;
                let w = WeightMatrix::new(m).map_err(|e| e.to_string())?;
                TorusActionSpec::from_weight_matrix(&w)
            } else {
                TorusActionSpec::from_json(&text).map_err(|e| e.to_string())?
            };
            let freeness = freeness_check(&action);
            let dets: Vec<String> = selection_determinants(&action)
                .into_iter()
                .map(|(_, d)| d.to_string())
                .collect();
            let human = match &freeness {
                Freeness::Free => format!("free (selection determinants: {})\n", dets.join(", ")),
                Freeness::NonFree { selection, isotropy } => {
                    let sel: Vec<&str> =
                        selection.iter().map(|&b| if b { "b" } else { "a" }).collect();
                    let iso = match isotropy {
                        Isotropy::Finite { order } => format!("finite isotropy of order {order}"),
                        Isotropy::PositiveDimensional => {
                            "positive-dimensional isotropy".to_string()
                        }
                    };
                    format!("not free: selection ({}) has {iso}\n", sel.join(", "))
                }
            };
            let files = vec![(spec.clone(), text.into_bytes())];
            Ok(Report {
                inputs_digest: digest(&command, &files),
                command,
                result: to_value(&freeness),
                evidence: json!({"selection_determinants": dets}),
                human,
                verdict: Verdict::Definite,
            })
        }
        Command::Family { command: FamilyCommand::Ra { matrix } } => {
            let text =
                fs::read_to_string(matrix).map_err(|e| format!("cannot read {matrix}: {e}"))?;
            let m: IntMat = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let w = WeightMatrix::new(m).map_err(|e| e.to_string())?;
            let ring = ra_cohomology(&w).map_err(|e| e.to_string())?;
            let files = vec![(matrix.clone(), text.into_bytes())];
            Ok(Report {
                inputs_digest: digest(&command, &files),
                command,
                result: ring_summary_value(&ring),
                evidence: Value::Null,
                human: ring_summary_text(&ring),
                verdict: Verdict::Definite,
            })
        }
        Command::Family { command: FamilyCommand::Rp { p, k } } => {
            let ring = rp_cohomology(*p, *k).map_err(|e| e.to_string())?;
            Ok(Report {
                inputs_digest: digest(&command, &[]),
                command,
                result: ring_summary_value(&ring),
                evidence: Value::Null,
                human: ring_summary_text(&ring),
                verdict: Verdict::Definite,
            })
        }
        Command::Family { command: FamilyCommand::Q { s, t, table } } => {
            if let Some(range) = table {
                let (lo, hi) = parse_range(range)?;
                let mut rows = Vec::new();
                let mut human = String::new();
                let mut distinct = std::collections::BTreeSet::new();
                for s in lo..=hi {
                    for t in lo..=hi {
                        let p1 = q_first_pontryagin(s, t);
                        distinct.insert(p1.abs());
                        rows.push(json!({"s": s, "t": t, "p1": p1}));
                    }
                }
                let _ = writeln!(human, "s, t in [{lo}, {hi}]");
                for s in lo..=hi {
                    let line: Vec<String> =
                        (lo..=hi).map(|t| q_first_pontryagin(s, t).to_string()).collect();
                    let _ = writeln!(human, "s={s:>4}: {}", line.join(" "));
                }
                let _ = writeln!(human, "distinct |p1| values: {}", distinct.len());
                Ok(Report {
                    inputs_digest: digest(&command, &[]),
                    command,
                    result: json!({
                        "table": rows,
                        "distinct_abs_values": distinct.len(),
                    }),
                    evidence: Value::Null,
                    human,
                    verdict: Verdict::Definite,
                })
            } else {
                let (s, t) = match (s, t) {
                    (Some(s), Some(t)) => (*s, *t),
                    _ => return Err("family q needs --s and --t, or --table".to_string()),
                };
                let p1 = q_first_pontryagin(s, t);
                Ok(Report {
                    inputs_digest: digest(&command, &[]),
                    command,
                    result: json!({"s": s, "t": t, "p1": p1}),
                    evidence: Value::Null,
                    human: format!("p1(Q({s},{t})) = {p1}\n"),
                    verdict: Verdict::Definite,
                })
            }
        }
        Command::Iso { ring_a, ring_b, bound } => {
            let (a, abytes) = load_ring(ring_a)?;
            let (b, bbytes) = load_ring(ring_b)?;
            let outcome = bounded_iso_search(&a, &b, *bound).map_err(|e| e.to_string())?;
            let files = vec![(ring_a.clone(), abytes), (ring_b.clone(), bbytes)];
            let (human, disposition) = match &outcome {
                IsoSearchResult::FoundIso { matrix } => {
                    (format!("isomorphism found: {matrix:?}\n"), Verdict::Definite)
                }
                IsoSearchResult::NoneFound { entry_bound } => (
                    format!("no isomorphism with entries bounded by {entry_bound}\n"),
                    Verdict::Unknown,
                ),
            };
            Ok(Report {
                inputs_digest: digest(&command, &files),
                command,
                result: json!({"bound": bound}),
                evidence: to_value(&outcome),
                human,
                verdict: disposition,
            })
        }
        Command::Distinguish { p, q, k, pair_height, iso_bound, obstruction_box } => {
            let bounds = DistinguishBounds {
                pair_height: *pair_height,
                iso_entry_bound: *iso_bound,
                obstruction_box: *obstruction_box,
            };
            let verdict = distinguish(*p, *q, *k, &bounds).map_err(|e| e.to_string())?;
            let (human, disposition) = match &verdict {
                DistinguishVerdict::Distinct { evidence } => (
                    format!(
                        "distinct at the given bounds (no iso at entry bound {}, pair claim to height {}, obstruction checked)\n",
                        evidence.no_iso_bound, evidence.pair_claim_height
                    ),
                    Verdict::Definite,
                ),
                DistinguishVerdict::Unknown { .. } => {
                    ("unknown at the given bounds\n".to_string(), Verdict::Unknown)
                }
            };
            Ok(Report {
                inputs_digest: digest(&command, &[]),
                command,
                result: json!({"p": p, "p_prime": q, "k": k}),
                evidence: to_value(&verdict),
                human,
                verdict: disposition,
            })
        }
        Command::Catalog { check_conditions } => {
            let entries = catalog_low_dim();
            let mut rows = Vec::new();
            let mut human = String::new();
            for entry in &entries {
                if *check_conditions {
                    let report = sufficient_conditions(&entry.profile);
                    let _ = writeln!(
                        human,
                        "{:<12} dim {}  real: {}  complex: {}  via {:?}",
                        entry.name,
                        entry.dimension,
                        report.real_inverse_guaranteed,
                        report.complex_inverse_guaranteed,
                        report.condition_used,
                    );
                    rows.push(json!({
                        "entry": to_value(entry),
                        "conditions": to_value(&report),
                    }));
                } else {
                    let _ = writeln!(human, "{:<12} dim {}", entry.name, entry.dimension);
                    rows.push(to_value(entry));
                }
            }
            Ok(Report {
                inputs_digest: digest(&command, &[]),
                command,
                result: Value::Array(rows),
                evidence: Value::Null,
                human,
                verdict: Verdict::Definite,
            })
        }
    }
}

fn parse_range(range: &str) -> Result<(i64, i64), String> {
    let bad = || format!("bad range {range:?}; expected A..B");
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn emit(cli: &Cli, report: &Report, elapsed_ms: u128) -> Result<(), String> {
    let payload = if cli.json {
        let value = json!({
            "command": report.command,
            "inputs_digest": report.inputs_digest,
            "result": report.result,
            "evidence": report.evidence,
            "timing_ms": elapsed_ms,
        });
        format!("{}\n", serde_json::to_string_pretty(&value).expect("report"))
    } else {
        report.human.clone()
    };
    match &cli.out {
        Some(path) => fs::write(path, payload).map_err(|e| format!("cannot write {path}: {e}")),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    let started = std::time::Instant::now();
    match run(&cli, &argv[1..]) {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report, started.elapsed().as_millis()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            match report.verdict {
                Verdict::Definite => ExitCode::SUCCESS,
                Verdict::Unknown => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
