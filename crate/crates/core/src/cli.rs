//! The `pirc` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{
    check_mindist_bound, max_code_size, optimality_report_3pir, A2Source, OptimalityOptions,
};
use crate::constructions::{
    build_packing_pir, build_pir3, extend_for_even_t, linear_length_table, ConstructedCode,
};
use crate::designs::{
    exact_packing, greedy_packing, is_packing, johnson_bound_4, packing_number_formula,
    packing_with_blocks, PackingDesign, PackingSearch,
};
use crate::error::Error;
use crate::gf2::parse_matrix;
use crate::hamming::{check_claims, check_no_3pir_any_encoder};
use crate::recovery::{verify_batch, verify_pir, Encoder, Verdict, VerificationReport};
use crate::searchlab::{open11_hunt, search_codes, HuntConfig, SearchMode, SearchParams};
use crate::Budget;
use std::io::Write;

const EXIT_HELP: &str = "\
Exit codes:
  0  a verdict or result was produced (negative verdicts included)
  1  internal error
  2  invalid command line
  3  malformed input file or invalid argument
  4  checkpoint error
  5  budget exhausted before a verdict
  6  I/O error";

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_CHECKPOINT: u8 = 4;
pub const EXIT_BUDGET: u8 = 5;
pub const EXIT_IO: u8 = 6;

#[derive(Parser, Debug)]
#[command(name = "pirc", version, about = "Binary PIR and batch codes: construct, verify, search", after_help = EXIT_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Search budget in decision nodes.
    #[arg(long, default_value_t = Budget::default().0, global = true)]
    pub budget: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "PIRC_THREADS", default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a code with recovery witnesses.
    #[command(subcommand)]
    Construct(Construct),
    /// Build a code and append an overall parity bit (t to t+1).
    Extend(Source),
    /// Check the PIR or batch property of an encoder.
    #[command(subcommand)]
    Verify(Verify),
    /// Compare the minimum distance with ceil(t/mu) for a verified encoder.
    Mindist {
        #[command(flatten)]
        input: EncoderInput,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        mu: usize,
    },
    /// Pair packings with blocks of size 4.
    #[command(subcommand)]
    Packing(Packing),
    /// Hamming code checks.
    #[command(subcommand)]
    Hamming(Hamming),
    /// A2(n,3), the largest code of length n and minimum distance 3.
    Maxsize {
        #[arg(long)]
        n: usize,
    },
    /// Shortest 3-PIR code lengths with lower-bound justifications.
    OptimalTable {
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long)]
        kmax: usize,
        /// Replace the (7,16,3) uniqueness fact by an exhaustive search.
        #[arg(long)]
        verify_uniqueness: bool,
    },
    /// Code searches.
    #[command(subcommand)]
    Search(Search),
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// Systematic 3-PIR code with distinct weight-2 parity rows.
    Pir3 {
        #[arg(long)]
        k: usize,
    },
    /// Systematic t-PIR code from a pair packing with blocks of size t-1.
    PackingPir {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        /// Design file; searched for when omitted.
        #[arg(long)]
        design: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct Source {
    #[arg(long)]
    pub k: usize,
    /// Odd t of the base code (3 uses weight-2 rows, larger values a packing).
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    #[arg(long)]
    pub design: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct EncoderInput {
    /// Generator matrix file (rows of 0/1).
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Explicit encoder table file ("data codeword" lines).
    #[arg(long)]
    pub encoder: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    Pir {
        #[command(flatten)]
        input: EncoderInput,
        #[arg(long)]
        t: usize,
        /// Width cap; unbounded when omitted.
        #[arg(long)]
        w: Option<usize>,
        #[arg(long, default_value_t = 1)]
        mu: usize,
    },
    Batch {
        #[command(flatten)]
        input: EncoderInput,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Packing {
    /// Search for a packing with a given number of blocks.
    Find {
        #[arg(long)]
        r: usize,
        /// Number of blocks; defaults to the packing number.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, default_value_t = 4)]
        blocksize: usize,
        /// Write the design file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The packing number D(r,4,2).
    Number {
        #[arg(long)]
        r: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Hamming {
    /// Exhaustive complement argument over all disjoint triples (r = 2, 3).
    Check {
        #[arg(long)]
        r: usize,
    },
    /// Structural claims for a triple, written as "1,2;3,4;5,6".
    Claims {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        sets: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Search {
    /// Enumerate codes of a given length, size and minimum distance.
    Codes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        dmin: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Heuristic restarts.
        #[arg(long, default_value_t = 32)]
        iterations: u64,
    },
    /// Look for a 3-PIR encoder on (11,128,3) codes.
    Open11 {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        codes: u64,
        #[arg(long, default_value_t = 200_000)]
        per_code_budget: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Heuristic,
}

/// What a command produced: machine output, human output, and whether a
/// verdict was reached.
struct Output {
    json: Value,
    text: String,
    decided: bool,
}

impl Output {
    fn done(json: Value, text: String) -> Self {
        Self {
            json,
            text,
            decided: true,
        }
    }
}

fn read(path: &Path) -> crate::Result<String> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

fn load_encoder(input: &EncoderInput) -> crate::Result<Encoder> {
    match (&input.generator, &input.encoder) {
        (Some(g), _) => Encoder::linear(parse_matrix(&read(g)?)?),
        (_, Some(e)) => Encoder::parse_explicit(&read(e)?),
        _ => Err(Error::InvalidArgument(
            "pass --generator or --encoder".into(),
        )),
    }
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("pirc: {}", msg.as_ref());
}

fn code_json(c: &ConstructedCode, report: &VerificationReport) -> Value {
    json!({
        "k": c.k(),
        "n": c.n(),
        "t": c.t(),
        "provenance": c.provenance,
        "generator": c.generator().rows().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "witnesses": c.witnesses,
        "report": report,
    })
}

fn code_text(c: &ConstructedCode, report: &VerificationReport) -> String {
    let mut s = format!(
        "{} code: k = {}, n = {}, t = {}\ngenerator:\n",
        c.provenance.construction,
        c.k(),
        c.n(),
        c.t()
    );
    for r in c.generator().rows() {
        s.push_str(&format!("  {r}\n"));
    }
    s.push_str("witnesses:\n");
    for f in &c.witnesses {
        let sets: Vec<String> = f
            .sets
            .iter()
            .map(|x| {
                format!(
                    "{{{}}}",
                    x.positions()
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )
            })
            .collect();
        s.push_str(&format!("  bit {}: {}\n", f.bit, sets.join(" ")));
    }
    s.push_str(&format!(
        "verified {}-PIR: {}\n",
        report.parameters.t,
        report.holds()
    ));
    s
}

fn base_code(
    k: usize,
    t: usize,
    design: Option<&Path>,
    budget: Budget,
) -> crate::Result<ConstructedCode> {
    match design {
        Some(path) => build_packing_pir(k, t, &PackingDesign::parse(&read(path)?)?),
        None if t == 3 => build_pir3(k),
        None => {
            if t < 3 {
                return Err(Error::InvalidArgument("t must be at least 3".into()));
            }
            progress(format!(
                "searching a packing with {k} blocks of size {}",
                t - 1
            ));
            build_packing_pir(k, t, &packing_with_blocks(k, t - 1, budget)?)
        }
    }
}

fn constructed(c: ConstructedCode, budget: Budget) -> crate::Result<Output> {
    let report = c.verify(budget)?;
    Ok(Output::done(code_json(&c, &report), code_text(&c, &report)))
}

fn report_output(r: VerificationReport) -> Output {
    let text = format!(
        "{:?} t = {} w = {:?} mu = {}: {:?} ({} queries, {} nodes)\n",
        r.property,
        r.parameters.t,
        r.parameters.w,
        r.parameters.mu,
        r.verdict,
        r.queries.len(),
        r.stats.nodes
    );
    Output {
        decided: r.verdict != Verdict::Unknown,
        json: serde_json::to_value(&r).expect("reports serialize"),
        text,
    }
}

fn parse_sets(s: &str) -> crate::Result<[Vec<usize>; 3]> {
    let parts: Vec<Vec<usize>> = s
        .split(';')
        .map(|part| {
            part.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad position {x:?}")))
                })
                .collect()
        })
        .collect::<crate::Result<_>>()?;
    <[Vec<usize>; 3]>::try_from(parts)
        .map_err(|_| Error::InvalidArgument("expected three sets separated by ';'".into()))
}

fn execute(cmd: Command, g: &Global) -> crate::Result<Output> {
    let budget = Budget(g.budget);
    match cmd {
        Command::Construct(Construct::Pir3 { k }) => constructed(build_pir3(k)?, budget),
        Command::Construct(Construct::PackingPir { k, t, design }) => {
            constructed(base_code(k, t, design.as_deref(), budget)?, budget)
        }
        Command::Extend(Source { k, t, design }) => {
            let base = base_code(k, t, design.as_deref(), budget)?;
            constructed(extend_for_even_t(&base)?, budget)
        }
        Command::Verify(Verify::Pir { input, t, w, mu }) => {
            let e = load_encoder(&input)?;
            Ok(report_output(verify_pir(&e, t, w, mu, None, budget)?))
        }
        Command::Verify(Verify::Batch { input, t }) => {
            let e = load_encoder(&input)?;
            Ok(report_output(verify_batch(&e, t, budget)?))
        }
        Command::Mindist { input, t, mu } => {
            let e = load_encoder(&input)?;
            let c = check_mindist_bound(&e, t, mu, budget)?;
            let text = if c.vacuous {
                format!(
                    "d = {}, bound = {}: vacuous (PIR verdict {:?})\n",
                    c.d, c.bound, c.pir_verdict
                )
            } else {
                format!(
                    "d = {}, bound = {}: {}\n",
                    c.d,
                    c.bound,
                    if c.ok { "ok" } else { "VIOLATED" }
                )
            };
            Ok(Output {
                decided: c.pir_verdict != Verdict::Unknown,
                json: serde_json::to_value(&c).expect("serializes"),
                text,
            })
        }
        Command::Packing(Packing::Number { r }) => {
            let d = packing_number_formula(r)?;
            Ok(Output::done(
                json!({"r": r, "packing_number": d, "johnson_bound": johnson_bound_4(r)}),
                format!("{d}\n"),
            ))
        }
        Command::Packing(Packing::Find {
            r,
            target,
            blocksize,
            out,
        }) => {
            let target = match target {
                Some(t) => t,
                None if blocksize == 4 => packing_number_formula(r)?,
                None => greedy_packing(r, blocksize)?.num_blocks(),
            };
            let start = Instant::now();
            let (outcome, nodes) = exact_packing(r, blocksize, target, budget)?;
            progress(format!("{nodes} nodes in {:?}", start.elapsed()));
            let (status, design) = match outcome {
                PackingSearch::Found(d) => ("found", Some(d)),
                PackingSearch::ProvenImpossible => ("impossible", None),
                PackingSearch::BudgetExhausted => ("budget_exhausted", None),
            };
            if let (Some(d), Some(path)) = (&design, &out) {
                std::fs::write(path, d.to_text())?;
            }
            let valid = design
                .as_ref()
                .map(is_packing)
                .transpose()?
                .map(|c| c.is_valid());
            let text = match &design {
                Some(d) => format!(
                    "found {} blocks on {} points\n{}",
                    d.num_blocks(),
                    r,
                    d.to_text()
                ),
                None => format!("{status}: {target} blocks on {r} points ({nodes} nodes)\n"),
            };
            Ok(Output {
                decided: status != "budget_exhausted",
                json: json!({"r": r, "target": target, "status": status, "nodes": nodes, "valid": valid, "design": design}),
                text,
            })
        }
        Command::Hamming(Hamming::Check { r }) => {
            let c = check_no_3pir_any_encoder(r)?;
            let text = format!(
                "r = {r}: {:?} after {} triples ({} us)\n",
                c.verdict, c.triples, c.elapsed_us
            );
            Ok(Output::done(
                serde_json::to_value(&c).expect("serializes"),
                text,
            ))
        }
        Command::Hamming(Hamming::Claims { r, sets }) => {
            let rep = check_claims(r, &parse_sets(&sets)?)?;
            let text = format!(
                "lines meet all three: {}\nno set contains a line: {}\nunused points form a subspace: {}\nsets are cosets: {}\nsizes {:?} match 2^(r-2): {}\n",
                rep.lines_meet_all_three,
                rep.no_set_contains_line,
                rep.unused_is_subspace,
                rep.sets_are_cosets,
                rep.sizes,
                rep.sizes_match
            );
            Ok(Output::done(
                serde_json::to_value(&rep).expect("serializes"),
                text,
            ))
        }
        Command::Maxsize { n } => {
            let e = max_code_size(n, budget)?;
            let mut flags = Vec::new();
            if e.source == A2Source::Reference {
                flags.push(format!(
                    "A2({n},3) = {} is taken from published tables",
                    e.value
                ));
            }
            let text = format!(
                "A2({n},3) = {} ({:?}, {} nodes)\n",
                e.value, e.source, e.nodes
            );
            let mut json = serde_json::to_value(&e).expect("serializes");
            json["literature_flags"] = json!(flags);
            Ok(Output {
                decided: e.source != A2Source::Incomplete,
                json,
                text,
            })
        }
        Command::OptimalTable {
            t,
            kmax,
            verify_uniqueness,
        } => {
            let table = linear_length_table(t, kmax)?;
            let opts = OptimalityOptions {
                verify_uniqueness,
                budget,
            };
            let mut rows = Vec::new();
            let mut text = String::from("k  linear n  exact\n");
            let mut flags = Vec::new();
            for (k, n) in table {
                let report = if k <= 6 {
                    Some(optimality_report_3pir(k, opts)?)
                } else {
                    None
                };
                let exact = report
                    .as_ref()
                    .filter(|r| r.lower_bound == r.upper_bound)
                    .map(|r| r.upper_bound);
                if let Some(r) = &report {
                    for f in &r.literature_flags {
                        if !flags.contains(f) {
                            flags.push(f.clone());
                        }
                    }
                }
                text.push_str(&format!(
                    "{k:<2} {n:<9} {}\n",
                    exact.map_or("-".to_string(), |v| v.to_string())
                ));
                rows.push(json!({"k": k, "n": n, "exact": exact, "report": report}));
            }
            for f in &flags {
                text.push_str(&format!("literature: {f}\n"));
            }
            Ok(Output::done(
                json!({"t": t, "rows": rows, "literature_flags": flags}),
                text,
            ))
        }
        Command::Search(Search::Codes {
            n,
            size,
            dmin,
            mode,
            checkpoint,
            seed,
            iterations,
        }) => {
            let mode = match mode {
                Mode::Exhaustive => SearchMode::Exhaustive,
                Mode::Heuristic => SearchMode::Heuristic { seed, iterations },
            };
            let params = SearchParams {
                n,
                size,
                dmin,
                mode,
            };
            let run = search_codes(params, checkpoint.as_deref(), budget)?;
            progress(format!("{} nodes, complete: {}", run.nodes, run.complete));
            let codes: Vec<Vec<String>> = run
                .codes
                .iter()
                .map(|c| c.words().iter().map(|w| w.to_string()).collect())
                .collect();
            let mut text = format!("{} code(s), complete: {}\n", codes.len(), run.complete);
            for c in &codes {
                text.push_str(&format!("{}\n", c.join(" ")));
            }
            Ok(Output {
                decided: run.complete || !codes.is_empty(),
                json: json!({"params": params, "complete": run.complete, "nodes": run.nodes, "resumed": run.resumed, "codes": codes}),
                text,
            })
        }
        Command::Search(Search::Open11 {
            checkpoint,
            seed,
            codes,
            per_code_budget,
        }) => {
            let config = HuntConfig {
                codes,
                per_code_budget,
                ..HuntConfig::default()
            };
            let r = open11_hunt(&config, checkpoint.as_deref(), budget, seed)?;
            let mut text = format!(
                "examined {} code(s): {} encoder(s) found, {} without encoder, {} undecided; nonexistence is never claimed\n",
                r.examined,
                r.encoders.len(),
                r.no_encoder,
                r.unknown
            );
            for note in &r.literature {
                text.push_str(&format!("literature: {note}\n"));
            }
            Ok(Output::done(
                serde_json::to_value(&r).expect("serializes"),
                text,
            ))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Checkpoint(_) => EXIT_CHECKPOINT,
        Error::Construction(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and prints
/// its output to standard output.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if cli.global.threads > 0 {
        // a pool installed earlier in the process keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global();
    }
    let format = cli.global.format;
    match execute(cli.command, &cli.global) {
        Ok(out) => {
            let rendered = match format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializes") + "\n",
                Format::Text => out.text,
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
            if out.decided {
                ExitCode::SUCCESS
            } else {
                progress("budget exhausted before a verdict");
                ExitCode::from(EXIT_BUDGET)
            }
        }
        Err(e) => {
            eprintln!("pirc: error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
