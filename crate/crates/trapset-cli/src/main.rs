//! Command line interface to the trapping set and stopping set engines.
//!
//! One binary exposes the searches, the stopping distance drivers, the
//! analytic bounds, the brute-force oracle, and the table renderers, all
//! with machine-readable output. Results go to standard output as text
//! or JSON; `--out` also writes a JSON result file that embeds a run
//! manifest (command line, input digest, configuration echo, wall time,
//! worker count) for reproducibility. The algorithms take no random
//! seeds, so equal inputs produce byte-identical result bodies at any
//! worker count.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on an input or
//! domain error (rendered to standard error as `E:<code>: message`),
//! and 3 when `--strict` is set and a time limit or budget truncated
//! the result.

mod load;
mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use trapset_core::bounds::{range_lookup, working_b_max, RangeInfo};
use trapset_core::graph::{build_qc, parse_qc_exponents};
use trapset_core::ledger::LevelStore;
use trapset_core::nets::{search_nets, NetsOptions};
use trapset_core::oracle::OracleCensus;
use trapset_core::search::{search_etsl, search_lets, LevelAction, SearchOptions, SearchStats};
use trapset_core::stopping::{
    search_stopping_sets, stopping_lower, stopping_upper, LowerOptions, SsOptions, StoppingWitness,
    UpperOptions,
};
use trapset_core::{
    ClassKey, ClassLedger, Error, Family, Regularity, Result, SubgraphProfile, SymmetryGroup,
    TannerGraph,
};

use load::{load_code, SymmetryArg};
use output::{
    classes_text, multiplicity_csv, multiplicity_text, oracle_text, print_body, stopping_sets_text,
    stopping_text, write_instances, write_result_file, BoundsBody, ClassCount, ClassesBody,
    CodeStoppingBody, CompareBody, CompareRow, FloorsRow, GridBody, InfoBody, InstanceRecord,
    MultiplicityBody, MultiplicityRow, OracleBody, OracleRow, OwnedDocument, RangesRow,
    RunManifest, StoppingBody, StoppingSetsBody, StoppingSizeRow, WitnessBody,
};

/// Finds trapping sets and stopping sets of LDPC codes.
#[derive(Parser)]
#[command(name = "trapset", version, about)]
struct Cli {
    /// Worker pool size; defaults to TRAPSET_WORKERS or the CPU count.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Exit with status 3 when a time limit or budget truncated the result.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prints the dimensions, girth, and regularity of a code.
    Info(InfoArgs),
    /// Prints the tabulated floors and search ranges for a degree and girth.
    Bounds(BoundsArgs),
    /// Builds an alist file from a quasi-cyclic exponent matrix.
    GenQc(GenQcArgs),
    /// Enumerates trapping sets or stopping sets of a code.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Bounds the stopping distance of a code.
    #[command(subcommand)]
    Stopping(StoppingCommand),
    /// Brute-force census of connected sets, for validating the engines.
    Oracle(OracleArgs),
    /// Renders the bound grids and per-code summary tables.
    #[command(subcommand)]
    Tables(TablesCommand),
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Leafless elementary trapping sets.
    Lets(ElementaryArgs),
    /// Elementary trapping sets with at least one leaf.
    Etsl(ElementaryArgs),
    /// Non-elementary trapping sets, reported as a multiplicity table.
    Nets(NetsArgs),
    /// Stopping sets, elementary and non-elementary.
    Ss(SsArgs),
}

#[derive(Subcommand)]
enum StoppingCommand {
    /// Certified lower bound, exact when a stopping set is in range.
    Lower(StoppingLowerArgs),
    /// Upper bound from an escalating non-exhaustive search.
    Upper(StoppingUpperArgs),
}

#[derive(Subcommand)]
enum TablesCommand {
    /// Search-free stopping size floors over the tabulated grid.
    Floors(GridArgs),
    /// Exhaustive search ranges over the tabulated grid.
    Ranges(GridArgs),
    /// Per-class trapping set multiplicities of a code.
    Multiplicity(MultiplicityArgs),
    /// Stopping distance summary row of a code.
    Stopping(TablesStoppingArgs),
}

#[derive(Args)]
struct CodeArg {
    /// Code to load: an alist file, or a built-in such as @tanner155.
    #[arg(long)]
    code: String,
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Variable degree.
    #[arg(long)]
    dv: u32,
    /// Girth.
    #[arg(long)]
    girth: u32,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenQcArgs {
    /// Exponent matrix file: rows of integers, -1 for an absent block.
    #[arg(long)]
    exponents: PathBuf,
    /// Circulant size p.
    #[arg(long)]
    circulant_size: usize,
    /// Write the alist here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ElementaryArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Largest set size to search.
    #[arg(long)]
    a_max: u32,
    /// Working cap on unsatisfied checks; defaults to the tabulated cap.
    #[arg(long)]
    bprime_max: Option<u32>,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Write every instance to this JSONL file.
    #[arg(long)]
    list_instances: Option<PathBuf>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Audit every Nth expanded parent against the class arithmetic.
    #[arg(long, default_value_t = 0)]
    audit_stride: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Certified range; size cap defaults to the tabulated maximum.
    Exhaustive,
    /// User-chosen size cap beyond the certified range, no guarantee.
    Extended,
    /// Free-running search with a user working cap, any family.
    Nonexhaustive,
}

impl ModeArg {
    fn echo(self) -> &'static str {
        match self {
            ModeArg::Exhaustive => "exhaustive",
            ModeArg::Extended => "extended",
            ModeArg::Nonexhaustive => "nonexhaustive",
        }
    }
}

#[derive(Args)]
struct NetsArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Largest set size to search; defaults to the certified maximum.
    #[arg(long)]
    a_max: Option<u32>,
    /// Report cap on unsatisfied checks; defaults to 4.
    #[arg(long)]
    b_max: Option<u32>,
    /// Working cap on unsatisfied checks; defaults to the tabulated cap.
    #[arg(long)]
    bprime_max: Option<u32>,
    /// Search mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Families to count, comma separated: N3,N33,N333,N3333,N4,N43,other.
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<String>>,
    /// Cap on the unsatisfied count of elementary seeds; defaults to the
    /// working cap.
    #[arg(long)]
    seed_b_max: Option<u32>,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Write the reported instances to this JSONL file.
    #[arg(long)]
    list_instances: Option<PathBuf>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Audit every Nth expanded parent against the class arithmetic.
    #[arg(long, default_value_t = 0)]
    audit_stride: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Print the result as CSV.
    #[arg(long)]
    csv: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SsArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Largest set size to list; defaults to the certified maximum.
    #[arg(long)]
    a_max: Option<u32>,
    /// Working cap on unsatisfied checks; defaults to the tabulated cap.
    #[arg(long)]
    bprime_max: Option<u32>,
    /// Report cap on unsatisfied checks of non-elementary sets.
    #[arg(long, default_value_t = 4)]
    ness_b_max: u32,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Write every stopping set to this JSONL file.
    #[arg(long)]
    list_instances: Option<PathBuf>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Audit every Nth expanded parent against the class arithmetic.
    #[arg(long, default_value_t = 0)]
    audit_stride: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StoppingLowerArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Audit every Nth expanded parent against the class arithmetic.
    #[arg(long, default_value_t = 0)]
    audit_stride: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StoppingUpperArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Initial size cap; defaults to three times the tabulated floor.
    #[arg(long)]
    a0: Option<u32>,
    /// Initial working cap on unsatisfied checks.
    #[arg(long)]
    bprime0: Option<u32>,
    /// Keep searching below a find at raised caps until a round is empty.
    #[arg(long)]
    tighten: bool,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Audit every Nth expanded parent against the class arithmetic.
    #[arg(long, default_value_t = 0)]
    audit_stride: u64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Largest set size to census.
    #[arg(long)]
    a_max: u32,
    /// Hard cap on recorded sets; defaults to n * C(n, a_max).
    #[arg(long)]
    budget: Option<u64>,
    /// Compare the census against a result file written with --out.
    #[arg(long)]
    compare_with: Option<PathBuf>,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MultiplicityArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Largest set size to tabulate.
    #[arg(long)]
    a_max: u32,
    /// Report cap on unsatisfied checks; defaults to 4.
    #[arg(long)]
    b_max: Option<u32>,
    /// Working cap on unsatisfied checks; defaults to the tabulated cap.
    #[arg(long)]
    bprime_max: Option<u32>,
    /// Cap on the unsatisfied count of elementary seeds; defaults to the
    /// working cap.
    #[arg(long)]
    seed_b_max: Option<u32>,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Print the result as CSV.
    #[arg(long)]
    csv: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesStoppingArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Orbit reduction: none, auto, or qc:P.
    #[arg(long, default_value = "none")]
    symmetry: SymmetryArg,
    /// Wall-clock budget in seconds, shared by both drivers.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
    /// Also write a JSON result file with the run manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Per-run context shared by every command body.
struct Ctx {
    argv: Vec<String>,
    workers: usize,
    started: Instant,
}

impl Ctx {
    /// Builds the manifest for a finished computation.
    fn manifest(
        &self,
        digest: Option<String>,
        config: serde_json::Value,
        truncated: bool,
    ) -> RunManifest {
        RunManifest {
            command_line: self.argv.clone(),
            code_digest: digest,
            config,
            wall_seconds: self.started.elapsed().as_secs_f64(),
            workers: self.workers,
            version: env!("CARGO_PKG_VERSION").to_string(),
            truncated,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = err.print();
                std::process::exit(0);
            }
            eprintln!("E:usage: invalid command line");
            let _ = err.print();
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(status) => std::process::exit(status),
        Err(err) => {
            // The error display already starts with its machine code.
            eprintln!("E:{err}");
            std::process::exit(2);
        }
    }
}

/// Dispatches the parsed command line; the returned status is 0, or 3
/// for a truncated result under `--strict`.
fn run(cli: Cli) -> Result<i32> {
    let workers = resolve_workers(cli.workers)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))?;
    let ctx = Ctx {
        argv: std::env::args().collect(),
        workers,
        started: Instant::now(),
    };
    let truncated = match &cli.command {
        Command::Info(args) => cmd_info(&ctx, args)?,
        Command::Bounds(args) => cmd_bounds(&ctx, args)?,
        Command::GenQc(args) => cmd_gen_qc(args)?,
        Command::Search(SearchCommand::Lets(args)) => cmd_search_elementary(&ctx, args, false)?,
        Command::Search(SearchCommand::Etsl(args)) => cmd_search_elementary(&ctx, args, true)?,
        Command::Search(SearchCommand::Nets(args)) => cmd_search_nets(&ctx, args)?,
        Command::Search(SearchCommand::Ss(args)) => cmd_search_ss(&ctx, args)?,
        Command::Stopping(StoppingCommand::Lower(args)) => cmd_stopping_lower(&ctx, args)?,
        Command::Stopping(StoppingCommand::Upper(args)) => cmd_stopping_upper(&ctx, args)?,
        Command::Oracle(args) => cmd_oracle(&ctx, args)?,
        Command::Tables(TablesCommand::Floors(args)) => cmd_tables_floors(&ctx, args)?,
        Command::Tables(TablesCommand::Ranges(args)) => cmd_tables_ranges(&ctx, args)?,
        Command::Tables(TablesCommand::Multiplicity(args)) => cmd_tables_multiplicity(&ctx, args)?,
        Command::Tables(TablesCommand::Stopping(args)) => cmd_tables_stopping(&ctx, args)?,
    };
    if truncated && cli.strict {
        eprintln!("E:truncated: the result was cut short by a time limit or budget");
        return Ok(3);
    }
    Ok(0)
}

/// Resolves the worker count: flag, then TRAPSET_WORKERS, then the CPUs.
fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    let workers = match flag {
        Some(w) => w,
        None => match std::env::var("TRAPSET_WORKERS") {
            Ok(s) => s.trim().parse().map_err(|_| {
                Error::Domain(format!(
                    "TRAPSET_WORKERS must be a positive integer, got {s:?}"
                ))
            })?,
            Err(_) => std::thread::available_parallelism()
                .map(usize::from)
                .unwrap_or(1),
        },
    };
    if workers == 0 {
        return Err(Error::Domain("worker count must be positive".into()));
    }
    Ok(workers)
}

/// Turns a `--time-limit` in seconds into a deadline; a non-finite
/// limit means no deadline.
fn deadline(limit: Option<f64>) -> Option<Instant> {
    let secs = limit?;
    if !secs.is_finite() {
        return None;
    }
    Some(Instant::now() + Duration::from_secs_f64(secs.clamp(0.0, f64::from(u32::MAX))))
}

/// The tabulated ranges for a code, when it is variable-regular with a
/// tabulated degree and girth.
fn tabulated_range(graph: &TannerGraph) -> Option<RangeInfo> {
    let dv = graph.regularity().uniform()?;
    let girth = graph.girth().finite()?;
    range_lookup(dv, girth).ok()
}

/// Resolves a working cap: the flag, the tabulated cap, or an error
/// naming the flag.
fn resolve_bprime(graph: &TannerGraph, flag: Option<u32>) -> Result<u32> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match tabulated_range(graph) {
        Some(range) => Ok(range.bprime_max),
        None => match graph.regularity() {
            Regularity::VariableRegular(dv) => Ok(working_b_max(dv)),
            Regularity::Irregular { .. } => Err(Error::Domain(
                "irregular codes need an explicit --bprime-max".into(),
            )),
        },
    }
}

/// Class counts of a ledger, orbit-weighted when a group is active.
fn ledger_counts(ledger: &ClassLedger, sym: Option<&SymmetryGroup>) -> BTreeMap<ClassKey, u64> {
    match sym {
        Some(sym) => ledger.weighted_counts(sym),
        None => ledger.counts(),
    }
}

/// Instance listings hold concrete sets, which an orbit-reduced ledger
/// does not: it stores one representative per orbit.
fn check_listing(list: &Option<PathBuf>, sym: &Option<Arc<SymmetryGroup>>) -> Result<()> {
    if list.is_some() && sym.is_some() {
        return Err(Error::Domain(
            "--list-instances needs --symmetry none; orbit-reduced runs keep representatives only"
                .into(),
        ));
    }
    Ok(())
}

/// Fails when the expansion audit recorded any violation.
fn check_audit(stats: &SearchStats) -> Result<()> {
    if stats.audit_violations > 0 {
        return Err(Error::Domain(format!(
            "expansion audit found {} class arithmetic violations",
            stats.audit_violations
        )));
    }
    Ok(())
}

fn cmd_info(ctx: &Ctx, args: &InfoArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let graph = &code.graph;
    let regularity = graph.regularity();
    let (dv_min, dv_max) = match regularity {
        Regularity::VariableRegular(dv) => (dv, dv),
        Regularity::Irregular { dv_min, dv_max } => (dv_min, dv_max),
    };
    let n = graph.num_vars();
    let m = graph.num_checks();
    let body = InfoBody {
        n,
        m,
        edges: graph.num_edges(),
        girth: graph.girth().finite(),
        dv: regularity.uniform(),
        dv_min,
        dv_max,
        rate: (n as f64 - m as f64) / n as f64,
    };
    let mut text = String::new();
    text.push_str(&format!("n={n}\nm={m}\nedges={}\n", body.edges));
    text.push_str(&format!("girth={}\n", graph.girth()));
    match regularity {
        Regularity::VariableRegular(dv) => {
            text.push_str(&format!("regularity=variable-regular dv={dv}\n"));
        }
        Regularity::Irregular { dv_min, dv_max } => {
            text.push_str(&format!("regularity=irregular dv={dv_min}..{dv_max}\n"));
        }
    }
    text.push_str(&format!("rate={}\n", body.rate));
    finish(
        ctx,
        "info",
        args.json,
        &args.out,
        Some(code.digest),
        serde_json::json!({}),
        false,
        text,
        &body,
    )
}

fn cmd_bounds(ctx: &Ctx, args: &BoundsArgs) -> Result<bool> {
    let range = range_lookup(args.dv, args.girth)?;
    let body = BoundsBody {
        dv: range.dv,
        girth: range.girth,
        l_ss1: range.l_ss1,
        l_ss2: range.l_ss2,
        l_ss3: range.l_ss3,
        smallest_nets: range.nets_size_floor,
        nets_a_max: range.nets_a_max,
        ness_a_max: range.ness_a_max,
        bprime_max: range.bprime_max,
        disconnected_min: range.disconnected_min,
    };
    let mut text = String::new();
    text.push_str(&format!("dv={}\ngirth={}\n", body.dv, body.girth));
    text.push_str(&format!(
        "L_SS1={}\nL_SS2={}\nL_SS3={}\n",
        body.l_ss1, body.l_ss2, body.l_ss3
    ));
    text.push_str(&format!("smallest_nets={}\n", body.smallest_nets));
    text.push_str(&format!(
        "nets_a_max={}\nness_a_max={}\nbprime_max={}\n",
        body.nets_a_max, body.ness_a_max, body.bprime_max
    ));
    text.push_str(&format!(
        "disconnected_min={}\n",
        disconnected_text(&body.disconnected_min)
    ));
    finish(
        ctx,
        "bounds",
        args.json,
        &args.out,
        None,
        serde_json::json!({"dv": args.dv, "girth": args.girth}),
        false,
        text,
        &body,
    )
}

/// Renders the adjunction-unreachable size floors, `-` for classes that
/// parity rules out.
fn disconnected_text(mins: &[Option<u32>; 4]) -> String {
    let mut out = String::new();
    for (i, entry) in mins.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match entry {
            Some(v) => out.push_str(&v.to_string()),
            None => out.push('-'),
        }
    }
    out
}

fn cmd_gen_qc(args: &GenQcArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&args.exponents)?;
    let exponents = parse_qc_exponents(&text)?;
    let graph = build_qc(&exponents, args.circulant_size)?;
    let alist = graph.write_alist();
    match &args.out {
        Some(path) => std::fs::write(path, alist)?,
        None => print!("{alist}"),
    }
    Ok(false)
}

fn cmd_search_elementary(ctx: &Ctx, args: &ElementaryArgs, with_leaves: bool) -> Result<bool> {
    let command = if with_leaves {
        "search-etsl"
    } else {
        "search-lets"
    };
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    check_listing(&args.list_instances, &sym)?;
    let bprime_max = resolve_bprime(&code.graph, args.bprime_max)?;
    let opts = SearchOptions {
        a_max: args.a_max,
        bprime_max,
        audit_stride: args.audit_stride,
        deadline: deadline(args.time_limit),
        symmetry: sym.clone(),
    };
    let (lets, lets_stats) = search_lets(&code.graph, &opts, |_, _| LevelAction::Continue)?;
    check_audit(&lets_stats)?;
    let mut truncated = lets_stats.truncated;
    let (ledger, category) = if with_leaves {
        let (etsl, etsl_stats) = search_etsl(&code.graph, &lets, &opts)?;
        check_audit(&etsl_stats)?;
        truncated = truncated || etsl_stats.truncated;
        (etsl, "ETSL")
    } else {
        (lets, "LETS")
    };
    let counts = ledger_counts(&ledger, sym.as_deref());
    let body = ClassesBody {
        category: category.into(),
        classes: counts
            .iter()
            .map(|(key, &count)| ClassCount {
                a: key.a,
                b: key.b,
                count,
            })
            .collect(),
        total: counts.values().sum(),
        truncated,
    };
    let config = serde_json::json!({
        "a_max": args.a_max,
        "bprime_max": bprime_max,
        "symmetry": args.symmetry.echo(),
        "audit_stride": args.audit_stride,
    });
    let manifest = ctx.manifest(Some(code.digest), config, truncated);
    if let Some(path) = &args.list_instances {
        write_instances(path, command, &manifest, ledger_records(&ledger, category))?;
    }
    let text = classes_text(&body);
    finish_with_manifest(command, args.json, &args.out, manifest, text, &body)?;
    Ok(truncated)
}

/// Streams a ledger as instance records in size order.
fn ledger_records<'a>(
    ledger: &'a ClassLedger,
    category: &'a str,
) -> impl Iterator<Item = InstanceRecord> + 'a {
    let sizes: Vec<u32> = ledger.sizes().collect();
    sizes.into_iter().flat_map(move |a| {
        let level = ledger.level(a).expect("listed size is present");
        (0..level.len()).map(move |i| InstanceRecord {
            class: [a, level.b(i)],
            vars: level.row(i).iter().map(|&v| u32::from(v)).collect(),
            category: category.into(),
        })
    })
}

/// Resolved configuration of a non-elementary search.
struct NetsPlan {
    a_max: u32,
    b_max: u32,
    bprime_max: u32,
    seed_b_max: u32,
    families: BTreeSet<Family>,
    mode: ModeArg,
}

impl NetsPlan {
    /// Applies the mode rules: defaults from the tabulated ranges, range
    /// checks in exhaustive mode, and the family filter default.
    fn resolve(
        graph: &TannerGraph,
        mode: ModeArg,
        a_max: Option<u32>,
        b_max: Option<u32>,
        bprime_max: Option<u32>,
        seed_b_max: Option<u32>,
        families: &Option<Vec<String>>,
    ) -> Result<NetsPlan> {
        let range = tabulated_range(graph);
        if mode != ModeArg::Nonexhaustive && graph.regularity().uniform().is_none() {
            return Err(Error::Domain(
                "irregular codes support --mode nonexhaustive only".into(),
            ));
        }
        let b_max = b_max.unwrap_or(4);
        let (a_max, bprime_max) = match mode {
            ModeArg::Exhaustive => {
                let range = range.ok_or_else(|| {
                    Error::Range(
                        "no tabulated exhaustive range for this degree and girth; use --mode extended"
                            .into(),
                    )
                })?;
                let a_max = a_max.unwrap_or(range.nets_a_max);
                if a_max > range.nets_a_max {
                    return Err(Error::Range(format!(
                        "exhaustive mode certifies sizes up to {}; use --mode extended for {a_max}",
                        range.nets_a_max
                    )));
                }
                if b_max > 4 {
                    return Err(Error::Range(
                        "exhaustive mode certifies report caps up to b = 4".into(),
                    ));
                }
                (a_max, bprime_max.unwrap_or(range.bprime_max))
            }
            ModeArg::Extended => {
                let a_max = a_max.ok_or_else(|| {
                    Error::Domain("extended mode needs an explicit --a-max".into())
                })?;
                let default_bprime = range.map(|r| r.bprime_max);
                let bprime = match (bprime_max, default_bprime) {
                    (Some(b), _) => b,
                    (None, Some(b)) => b,
                    (None, None) => {
                        return Err(Error::Domain(
                            "no tabulated working cap; supply --bprime-max".into(),
                        ))
                    }
                };
                (a_max, bprime)
            }
            ModeArg::Nonexhaustive => {
                let a_max = a_max.ok_or_else(|| {
                    Error::Domain("nonexhaustive mode needs an explicit --a-max".into())
                })?;
                (a_max, bprime_max.unwrap_or(b_max + 1))
            }
        };
        if b_max > bprime_max {
            return Err(Error::Range(format!(
                "report cap {b_max} exceeds the working cap {bprime_max}"
            )));
        }
        let default: Vec<Family> = match mode {
            ModeArg::Nonexhaustive => Family::NAMED
                .iter()
                .copied()
                .chain([Family::Other])
                .collect(),
            _ => Family::NAMED.to_vec(),
        };
        let families = parse_families(families, &default)?;
        Ok(NetsPlan {
            a_max,
            b_max,
            bprime_max,
            seed_b_max: seed_b_max.unwrap_or(bprime_max),
            families,
            mode,
        })
    }

    fn config(&self, symmetry: &SymmetryArg) -> serde_json::Value {
        serde_json::json!({
            "a_max": self.a_max,
            "b_max": self.b_max,
            "bprime_max": self.bprime_max,
            "mode": self.mode.echo(),
            "families": family_names(&self.families),
            "seed_a_max": self.a_max,
            "seed_b_max": self.seed_b_max,
            "symmetry": symmetry.echo(),
        })
    }
}

/// Parses a `--families` list, or returns the mode default.
fn parse_families(list: &Option<Vec<String>>, default: &[Family]) -> Result<BTreeSet<Family>> {
    match list {
        None => Ok(default.iter().copied().collect()),
        Some(names) => names
            .iter()
            .map(|name| {
                Family::parse(name).ok_or_else(|| Error::Domain(format!("unknown family {name}")))
            })
            .collect(),
    }
}

/// Family names in report order.
fn family_names(families: &BTreeSet<Family>) -> Vec<String> {
    families.iter().map(|f| f.to_string()).collect()
}

/// Keeps only the rows of `ledger` whose unsatisfied count is at most
/// `b_cap`.
fn filter_ledger_b(ledger: &ClassLedger, b_cap: u32) -> ClassLedger {
    let mut out = ClassLedger::new();
    for a in ledger.sizes() {
        let level = ledger.level(a).expect("listed size is present");
        let mut rows: Vec<u16> = Vec::new();
        let mut bs: Vec<u16> = Vec::new();
        for (row, b) in level.iter() {
            if b <= b_cap {
                rows.extend_from_slice(row);
                bs.push(b as u16);
            }
        }
        if !bs.is_empty() {
            out.set_level(a, LevelStore::from_raw(a as usize, rows, bs));
        }
    }
    out
}

/// Everything the non-elementary pipeline produces.
struct NetsRun {
    body: MultiplicityBody,
    reported: ClassLedger,
    truncated: bool,
}

/// Runs the full pipeline behind the multiplicity table: leafless and
/// with-leaf elementary searches, the adjunction search seeded by their
/// union, and per-family counting.
fn run_nets_pipeline(
    graph: &TannerGraph,
    plan: &NetsPlan,
    sym: Option<Arc<SymmetryGroup>>,
    deadline: Option<Instant>,
    audit_stride: u64,
) -> Result<NetsRun> {
    let opts = SearchOptions {
        a_max: plan.a_max,
        bprime_max: plan.bprime_max,
        audit_stride,
        deadline,
        symmetry: sym.clone(),
    };
    let (lets, lets_stats) = search_lets(graph, &opts, |_, _| LevelAction::Continue)?;
    check_audit(&lets_stats)?;
    let (etsl, etsl_stats) = search_etsl(graph, &lets, &opts)?;
    check_audit(&etsl_stats)?;
    let mut seeds = ClassLedger::new();
    seeds.merge(&lets);
    seeds.merge(&etsl);
    if plan.seed_b_max < plan.bprime_max {
        seeds = filter_ledger_b(&seeds, plan.seed_b_max);
    }
    let mut nopts = NetsOptions::new(plan.a_max, plan.b_max, plan.bprime_max);
    nopts.audit_stride = audit_stride;
    nopts.deadline = deadline;
    nopts.symmetry = sym.clone();
    // Pruning by family potential is sound exactly when every counted
    // family is a named one: each ancestor of a named-family set is a
    // subset of it, so its degree pattern is dominated and kept.
    nopts.family_prune = plan
        .families
        .iter()
        .all(|family| Family::NAMED.contains(family));
    let outcome = search_nets(graph, &seeds, &nopts)?;
    check_audit(&outcome.stats)?;
    let truncated = lets_stats.truncated || etsl_stats.truncated || outcome.stats.truncated;

    let sym_ref = sym.as_deref();
    let lets_counts = ledger_counts(&lets, sym_ref);
    let etsl_counts = ledger_counts(&etsl, sym_ref);
    let (nets_counts, reported) =
        family_filtered_counts(graph, &outcome.reported, &plan.families, sym_ref);
    let mut keys: BTreeSet<ClassKey> = BTreeSet::new();
    keys.extend(lets_counts.keys().copied());
    keys.extend(etsl_counts.keys().copied());
    keys.extend(nets_counts.keys().copied());
    let classes = keys
        .into_iter()
        .filter(|key| key.b <= plan.b_max)
        .map(|key| {
            let lets = lets_counts.get(&key).copied().unwrap_or(0);
            let etsl = etsl_counts.get(&key).copied().unwrap_or(0);
            let nets = nets_counts.get(&key).copied().unwrap_or(0);
            MultiplicityRow {
                a: key.a,
                b: key.b,
                lets,
                etsl,
                nets,
                total_ts: lets + etsl + nets,
            }
        })
        .filter(|row| row.total_ts > 0)
        .collect();
    Ok(NetsRun {
        body: MultiplicityBody {
            mode: plan.mode.echo().into(),
            families: family_names(&plan.families),
            classes,
            truncated,
        },
        reported,
        truncated,
    })
}

/// Counts the reported non-elementary sets inside the family filter,
/// orbit-weighted when a group is active, and returns the kept rows.
fn family_filtered_counts(
    graph: &TannerGraph,
    reported: &ClassLedger,
    families: &BTreeSet<Family>,
    sym: Option<&SymmetryGroup>,
) -> (BTreeMap<ClassKey, u64>, ClassLedger) {
    let mut counts: BTreeMap<ClassKey, u64> = BTreeMap::new();
    let mut kept = ClassLedger::new();
    let mut vars: Vec<u32> = Vec::new();
    for a in reported.sizes() {
        let level = reported.level(a).expect("listed size is present");
        let mut rows: Vec<u16> = Vec::new();
        let mut bs: Vec<u16> = Vec::new();
        for (row, b) in level.iter() {
            vars.clear();
            vars.extend(row.iter().map(|&v| u32::from(v)));
            let profile = SubgraphProfile::of(graph, &vars);
            if !families.contains(&profile.family()) {
                continue;
            }
            let weight = match sym {
                Some(sym) => sym.orbit_len(&vars),
                None => 1,
            };
            *counts.entry(ClassKey { a, b }).or_insert(0) += weight;
            rows.extend_from_slice(row);
            bs.push(b as u16);
        }
        if !bs.is_empty() {
            kept.set_level(a, LevelStore::from_raw(a as usize, rows, bs));
        }
    }
    (counts, kept)
}

fn cmd_search_nets(ctx: &Ctx, args: &NetsArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    check_listing(&args.list_instances, &sym)?;
    let plan = NetsPlan::resolve(
        &code.graph,
        args.mode,
        args.a_max,
        args.b_max,
        args.bprime_max,
        args.seed_b_max,
        &args.families,
    )?;
    let run = run_nets_pipeline(
        &code.graph,
        &plan,
        sym,
        deadline(args.time_limit),
        args.audit_stride,
    )?;
    let manifest = ctx.manifest(
        Some(code.digest),
        plan.config(&args.symmetry),
        run.truncated,
    );
    if let Some(path) = &args.list_instances {
        write_instances(
            path,
            "search-nets",
            &manifest,
            ledger_records(&run.reported, "NETS"),
        )?;
    }
    let text = if args.csv {
        multiplicity_csv(&run.body)
    } else {
        multiplicity_text(&run.body)
    };
    finish_with_manifest(
        "search-nets",
        args.json,
        &args.out,
        manifest,
        text,
        &run.body,
    )?;
    Ok(run.truncated)
}

fn cmd_search_ss(ctx: &Ctx, args: &SsArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    check_listing(&args.list_instances, &sym)?;
    let range = tabulated_range(&code.graph);
    let a_max = match (args.a_max, &range) {
        (Some(a), _) => a,
        (None, Some(range)) => range.ness_a_max,
        (None, None) => {
            return Err(Error::Domain(
                "no tabulated range for this code; supply --a-max".into(),
            ))
        }
    };
    let bprime_max = resolve_bprime(&code.graph, args.bprime_max)?;
    let opts = SsOptions {
        a_max,
        bprime_max,
        ness_b_max: args.ness_b_max,
        audit_stride: args.audit_stride,
        deadline: deadline(args.time_limit),
        symmetry: sym.clone(),
    };
    let outcome = search_stopping_sets(&code.graph, &opts)?;
    check_audit(&outcome.stats)?;
    let (sizes, total) = stopping_size_rows(&code.graph, &outcome.sets, sym.as_deref());
    let body = StoppingSetsBody {
        sizes,
        total,
        truncated: outcome.truncated,
    };
    let config = serde_json::json!({
        "a_max": a_max,
        "bprime_max": bprime_max,
        "ness_b_max": args.ness_b_max,
        "symmetry": args.symmetry.echo(),
    });
    let manifest = ctx.manifest(Some(code.digest), config, outcome.truncated);
    if let Some(path) = &args.list_instances {
        write_instances(
            path,
            "search-ss",
            &manifest,
            ledger_records(&outcome.sets, "SS"),
        )?;
    }
    let text = stopping_sets_text(&body);
    finish_with_manifest("search-ss", args.json, &args.out, manifest, text, &body)?;
    Ok(outcome.truncated)
}

/// Splits the stopping set ledger into per-size elementary and
/// non-elementary counts.
fn stopping_size_rows(
    graph: &TannerGraph,
    sets: &ClassLedger,
    sym: Option<&SymmetryGroup>,
) -> (Vec<StoppingSizeRow>, u64) {
    let mut rows = Vec::new();
    let mut total = 0;
    let mut vars: Vec<u32> = Vec::new();
    for a in sets.sizes() {
        let level = sets.level(a).expect("listed size is present");
        let (mut ess, mut ness) = (0u64, 0u64);
        for (row, _) in level.iter() {
            vars.clear();
            vars.extend(row.iter().map(|&v| u32::from(v)));
            let weight = match sym {
                Some(sym) => sym.orbit_len(&vars),
                None => 1,
            };
            if SubgraphProfile::of(graph, &vars).elementary() {
                ess += weight;
            } else {
                ness += weight;
            }
        }
        if ess + ness > 0 {
            total += ess + ness;
            rows.push(StoppingSizeRow {
                a,
                ess,
                ness,
                total: ess + ness,
            });
        }
    }
    (rows, total)
}

fn witness_body(witness: &StoppingWitness) -> WitnessBody {
    WitnessBody {
        a: witness.a,
        b: witness.b,
        elementary: witness.elementary,
        vars: witness.vars.clone(),
    }
}

fn cmd_stopping_lower(ctx: &Ctx, args: &StoppingLowerArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    let opts = LowerOptions {
        audit_stride: args.audit_stride,
        deadline: deadline(Some(args.time_limit)),
        symmetry: sym,
    };
    let outcome = stopping_lower(&code.graph, &opts)?;
    check_audit(&outcome.lets_stats)?;
    if let Some(stats) = &outcome.hunt_stats {
        check_audit(stats)?;
    }
    let body = StoppingBody {
        outcome: if outcome.exact {
            "exact"
        } else {
            "lower-bound"
        }
        .into(),
        value: Some(outcome.lower_bound),
        certified_floor: Some(outcome.certified_floor),
        l_ss3: Some(outcome.range.l_ss3),
        bprime_used: Some(outcome.range.bprime_max),
        rounds: None,
        witness: outcome.witness.as_ref().map(witness_body),
        truncated: outcome.truncated,
    };
    let config = serde_json::json!({
        "time_limit": args.time_limit,
        "symmetry": args.symmetry.echo(),
    });
    let manifest = ctx.manifest(Some(code.digest), config, outcome.truncated);
    let text = stopping_text(&body);
    finish_with_manifest(
        "stopping-lower",
        args.json,
        &args.out,
        manifest,
        text,
        &body,
    )?;
    Ok(outcome.truncated)
}

fn cmd_stopping_upper(ctx: &Ctx, args: &StoppingUpperArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    let opts = UpperOptions {
        a0: args.a0,
        bprime0: args.bprime0,
        max_rounds: 0,
        tighten: args.tighten,
        audit_stride: args.audit_stride,
        deadline: deadline(Some(args.time_limit)),
        symmetry: sym,
    };
    let outcome = stopping_upper(&code.graph, &opts)?;
    check_audit(&outcome.stats)?;
    let body = StoppingBody {
        outcome: if outcome.upper_bound.is_some() {
            "upper-bound"
        } else {
            "none-found"
        }
        .into(),
        value: outcome.upper_bound,
        certified_floor: None,
        l_ss3: None,
        bprime_used: Some(outcome.final_bprime),
        rounds: Some(outcome.rounds),
        witness: outcome.witness.as_ref().map(witness_body),
        truncated: outcome.truncated,
    };
    let config = serde_json::json!({
        "a0": args.a0,
        "bprime0": args.bprime0,
        "tighten": args.tighten,
        "time_limit": args.time_limit,
        "symmetry": args.symmetry.echo(),
    });
    let manifest = ctx.manifest(Some(code.digest), config, outcome.truncated);
    let text = stopping_text(&body);
    finish_with_manifest(
        "stopping-upper",
        args.json,
        &args.out,
        manifest,
        text,
        &body,
    )?;
    Ok(outcome.truncated)
}

fn cmd_oracle(ctx: &Ctx, args: &OracleArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let budget = match args.budget {
        Some(b) => b,
        None => default_census_budget(code.graph.num_vars(), args.a_max),
    };
    let census = OracleCensus::build(&code.graph, args.a_max, budget)?;
    let sizes = (1..=args.a_max)
        .map(|a| OracleRow {
            a,
            connected: census.entries(a).count() as u64,
            lets: census.count_where(a, |e| e.is_lets()),
            etsl: census.count_where(a, |e| e.is_etsl()),
            nets: census.count_where(a, |e| e.is_nets()),
            stopping: census.count_where(a, |e| e.is_stopping()),
        })
        .filter(|row| row.connected > 0)
        .collect();
    let compare = match &args.compare_with {
        Some(path) => Some(compare_result_file(&census, path)?),
        None => None,
    };
    let truncated = false;
    let body = OracleBody {
        a_max: args.a_max,
        visited: census.visited,
        sizes,
        compare,
    };
    let config = serde_json::json!({
        "a_max": args.a_max,
        "budget": budget,
    });
    let manifest = ctx.manifest(Some(code.digest), config, truncated);
    let text = oracle_text(&body);
    finish_with_manifest("oracle", args.json, &args.out, manifest, text, &body)?;
    Ok(truncated)
}

/// Budget guard for the census: the variable count times the number of
/// size-`a_max` subsets, saturating.
fn default_census_budget(n: usize, a_max: u32) -> u64 {
    let mut subsets: u128 = 1;
    for k in 1..=u128::from(a_max) {
        subsets = subsets.saturating_mul(n as u128 + 1 - k) / k;
        if subsets > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    u64::try_from((n as u128).saturating_mul(subsets)).unwrap_or(u64::MAX)
}

fn cmd_tables_floors(ctx: &Ctx, args: &GridArgs) -> Result<bool> {
    let rows: Vec<FloorsRow> = grid_ranges()
        .map(|range| FloorsRow {
            dv: range.dv,
            girth: range.girth,
            l_ss1: range.l_ss1,
            l_ss2: range.l_ss2,
            l_ss3: range.l_ss3,
        })
        .collect();
    let mut text = String::new();
    for row in &rows {
        text.push_str(&format!(
            "dv={} g={} l_ss1={} l_ss2={} l_ss3={}\n",
            row.dv, row.girth, row.l_ss1, row.l_ss2, row.l_ss3
        ));
    }
    let body = GridBody { rows };
    finish(
        ctx,
        "tables-floors",
        args.json,
        &args.out,
        None,
        serde_json::json!({}),
        false,
        text,
        &body,
    )
}

fn cmd_tables_ranges(ctx: &Ctx, args: &GridArgs) -> Result<bool> {
    let rows: Vec<RangesRow> = grid_ranges()
        .map(|range| RangesRow {
            dv: range.dv,
            girth: range.girth,
            smallest_nets: range.nets_size_floor,
            nets_a_max: range.nets_a_max,
            ness_a_max: range.ness_a_max,
            bprime_max: range.bprime_max,
            disconnected_min: range.disconnected_min,
        })
        .collect();
    let mut text = String::new();
    for row in &rows {
        text.push_str(&format!(
            "dv={} g={} smallest_nets={} nets_a_max={} ness_a_max={} bprime_max={} disconnected_min={}\n",
            row.dv,
            row.girth,
            row.smallest_nets,
            row.nets_a_max,
            row.ness_a_max,
            row.bprime_max,
            disconnected_text(&row.disconnected_min)
        ));
    }
    let body = GridBody { rows };
    finish(
        ctx,
        "tables-ranges",
        args.json,
        &args.out,
        None,
        serde_json::json!({}),
        false,
        text,
        &body,
    )
}

/// The tabulated grid in row order: degrees 3 to 6, girths 6, 8, 10.
fn grid_ranges() -> impl Iterator<Item = RangeInfo> {
    (3..=6).flat_map(|dv| {
        [6u32, 8, 10]
            .into_iter()
            .map(move |g| range_lookup(dv, g).expect("the whole grid is tabulated"))
    })
}

fn cmd_tables_multiplicity(ctx: &Ctx, args: &MultiplicityArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    let plan = NetsPlan::resolve(
        &code.graph,
        ModeArg::Exhaustive,
        Some(args.a_max),
        args.b_max,
        args.bprime_max,
        args.seed_b_max,
        &None,
    )?;
    let run = run_nets_pipeline(&code.graph, &plan, sym, deadline(args.time_limit), 0)?;
    let manifest = ctx.manifest(
        Some(code.digest),
        plan.config(&args.symmetry),
        run.truncated,
    );
    let text = if args.csv {
        multiplicity_csv(&run.body)
    } else {
        multiplicity_text(&run.body)
    };
    finish_with_manifest(
        "tables-multiplicity",
        args.json,
        &args.out,
        manifest,
        text,
        &run.body,
    )?;
    Ok(run.truncated)
}

fn cmd_tables_stopping(ctx: &Ctx, args: &TablesStoppingArgs) -> Result<bool> {
    let code = load_code(&args.code.code)?;
    let sym = args.symmetry.resolve(&code)?;
    let shared_deadline = deadline(Some(args.time_limit));
    let lower = stopping_lower(
        &code.graph,
        &LowerOptions {
            audit_stride: 0,
            deadline: shared_deadline,
            symmetry: sym.clone(),
        },
    )?;
    let upper = stopping_upper(
        &code.graph,
        &UpperOptions {
            a0: None,
            bprime0: None,
            max_rounds: 0,
            tighten: false,
            audit_stride: 0,
            deadline: shared_deadline,
            symmetry: sym,
        },
    )?;
    let truncated = lower.truncated || upper.truncated;
    let girth = code
        .graph
        .girth()
        .finite()
        .expect("the drivers reject acyclic graphs");
    let body = CodeStoppingBody {
        n: code.graph.num_vars(),
        m: code.graph.num_checks(),
        girth,
        lower: lower.lower_bound,
        exact: lower.exact,
        upper: upper.upper_bound,
        upper_elementary: upper.witness.as_ref().map(|w| w.elementary),
        bprime_used: upper.upper_bound.map(|_| upper.final_bprime),
        truncated,
    };
    let upper_text = match (body.upper, body.upper_elementary) {
        (Some(u), Some(true)) => format!("{u}(e)"),
        (Some(u), Some(false)) => format!("{u}(n)"),
        (Some(u), None) => u.to_string(),
        (None, _) => "none".into(),
    };
    let text = format!(
        "n={} m={} girth={} lower={} upper={} bprime={} exact={} truncated={}\n",
        body.n,
        body.m,
        body.girth,
        body.lower,
        upper_text,
        body.bprime_used
            .map_or_else(|| "-".into(), |b| b.to_string()),
        body.exact,
        body.truncated
    );
    let config = serde_json::json!({
        "time_limit": args.time_limit,
        "symmetry": args.symmetry.echo(),
    });
    let manifest = ctx.manifest(Some(code.digest), config, truncated);
    finish_with_manifest(
        "tables-stopping",
        args.json,
        &args.out,
        manifest,
        text,
        &body,
    )?;
    Ok(truncated)
}

/// Loads a result file and compares its per-class counts against the
/// census, listing up to ten census witnesses per disagreement.
fn compare_result_file(census: &OracleCensus, path: &PathBuf) -> Result<CompareBody> {
    let text = std::fs::read_to_string(path)?;
    let doc: OwnedDocument<serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| Error::Domain(format!("{}: not a result file: {e}", path.display())))?;
    if doc.schema != output::SCHEMA {
        return Err(Error::Domain(format!(
            "{}: unsupported result schema {:?}",
            path.display(),
            doc.schema
        )));
    }
    let manifest = doc.manifest.as_ref().ok_or_else(|| {
        Error::Domain(
            "comparison needs a result file written with --out (it carries the manifest)".into(),
        )
    })?;
    let config = &manifest.config;
    let engine = engine_class_counts(&doc.command, &doc.result)?;
    let keep = oracle_filter(&doc.command, config)?;
    let a_cap = config_u32(config, "a_max")?.min(census.a_max());
    let mut oracle: BTreeMap<ClassKey, u64> = BTreeMap::new();
    for a in 1..=a_cap {
        for entry in census.entries(a) {
            if let Some(b) = keep(&entry) {
                *oracle.entry(ClassKey { a, b }).or_insert(0) += 1;
            }
        }
    }
    let engine: BTreeMap<ClassKey, u64> = engine
        .into_iter()
        .filter(|(key, _)| key.a <= a_cap)
        .collect();
    let keys: BTreeSet<ClassKey> = engine.keys().chain(oracle.keys()).copied().collect();
    let mut mismatches = Vec::new();
    for key in &keys {
        let engine_count = engine.get(key).copied().unwrap_or(0);
        let oracle_count = oracle.get(key).copied().unwrap_or(0);
        if engine_count == oracle_count {
            continue;
        }
        let witnesses = census
            .entries(key.a)
            .filter(|e| keep(e) == Some(key.b))
            .take(10)
            .map(|e| e.row.iter().map(|&v| u32::from(v)).collect())
            .collect();
        mismatches.push(CompareRow {
            a: key.a,
            b: key.b,
            engine: engine_count,
            oracle: oracle_count,
            witnesses,
        });
    }
    Ok(CompareBody {
        against: doc.command,
        classes_checked: keys.len() as u64,
        matched: mismatches.is_empty(),
        mismatches,
    })
}

/// Extracts per-class counts from a result body by command kind. The
/// stopping set listing is keyed by size alone, with `b` flattened to 0.
fn engine_class_counts(
    command: &str,
    result: &serde_json::Value,
) -> Result<BTreeMap<ClassKey, u64>> {
    let mut counts = BTreeMap::new();
    match command {
        "search-lets" | "search-etsl" => {
            let body: ClassesBody = parse_body(result)?;
            for row in body.classes {
                counts.insert(ClassKey { a: row.a, b: row.b }, row.count);
            }
        }
        "search-nets" | "tables-multiplicity" => {
            let body: MultiplicityBody = parse_body(result)?;
            for row in body.classes {
                if row.nets > 0 {
                    counts.insert(ClassKey { a: row.a, b: row.b }, row.nets);
                }
            }
        }
        "search-ss" => {
            let body: StoppingSetsBody = parse_body(result)?;
            for row in body.sizes {
                counts.insert(ClassKey { a: row.a, b: 0 }, row.total);
            }
        }
        other => {
            return Err(Error::Domain(format!(
                "cannot compare against a {other} result"
            )))
        }
    }
    Ok(counts)
}

fn parse_body<T: serde::de::DeserializeOwned>(value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone())
        .map_err(|e| Error::Domain(format!("malformed result body: {e}")))
}

type OracleFilter = Box<dyn Fn(&trapset_core::oracle::OracleEntry) -> Option<u32>>;

/// Builds the census-side filter matching a result file's category and
/// caps; the returned closure yields the class key `b` for kept entries.
fn oracle_filter(command: &str, config: &serde_json::Value) -> Result<OracleFilter> {
    match command {
        "search-lets" => {
            let bprime = config_u32(config, "bprime_max")?;
            Ok(Box::new(move |e| {
                (e.is_lets() && e.b <= bprime).then_some(e.b)
            }))
        }
        "search-etsl" => {
            let bprime = config_u32(config, "bprime_max")?;
            Ok(Box::new(move |e| {
                (e.is_etsl() && e.b <= bprime).then_some(e.b)
            }))
        }
        "search-nets" | "tables-multiplicity" => {
            let b_max = config_u32(config, "b_max")?;
            let families = config_families(config)?;
            Ok(Box::new(move |e| {
                (e.is_nets() && e.b <= b_max && families.contains(&e.family())).then_some(e.b)
            }))
        }
        "search-ss" => {
            let ness_b_max = config_u32(config, "ness_b_max")?;
            Ok(Box::new(move |e| {
                (e.is_stopping() && (e.b == 0 || e.b <= ness_b_max)).then_some(0)
            }))
        }
        other => Err(Error::Domain(format!(
            "cannot compare against a {other} result"
        ))),
    }
}

/// Reads an integer out of a manifest configuration echo.
fn config_u32(config: &serde_json::Value, key: &str) -> Result<u32> {
    config
        .get(key)
        .and_then(serde_json::Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::Domain(format!("result manifest lacks a {key} configuration echo")))
}

/// Reads the family filter out of a manifest configuration echo.
fn config_families(config: &serde_json::Value) -> Result<BTreeSet<Family>> {
    let names = config
        .get("families")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| {
            Error::Domain("result manifest lacks a families configuration echo".into())
        })?;
    names
        .iter()
        .map(|name| {
            name.as_str()
                .and_then(Family::parse)
                .ok_or_else(|| Error::Domain(format!("unknown family {name} in result manifest")))
        })
        .collect()
}

/// Builds the manifest and emits a command result everywhere it goes.
#[allow(clippy::too_many_arguments)]
fn finish<T: serde::Serialize>(
    ctx: &Ctx,
    command: &str,
    json: bool,
    out: &Option<PathBuf>,
    digest: Option<String>,
    config: serde_json::Value,
    truncated: bool,
    text: String,
    body: &T,
) -> Result<bool> {
    let manifest = ctx.manifest(digest, config, truncated);
    finish_with_manifest(command, json, out, manifest, text, body)?;
    Ok(truncated)
}

/// Emits a command result: body to standard output, and the manifested
/// document to `--out` when given.
fn finish_with_manifest<T: serde::Serialize>(
    command: &str,
    json: bool,
    out: &Option<PathBuf>,
    manifest: RunManifest,
    text: String,
    body: &T,
) -> Result<()> {
    print_body(command, json, &text, body);
    if let Some(path) = out {
        write_result_file(path, command, &manifest, body)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_budget_guard() {
        // 8 * C(8, 3) = 8 * 56.
        assert_eq!(default_census_budget(8, 3), 448);
        // Saturates instead of overflowing.
        assert_eq!(default_census_budget(500, 64), u64::MAX);
    }

    #[test]
    fn family_lists_parse() {
        let named = parse_families(&None, &Family::NAMED).unwrap();
        assert_eq!(named.len(), 6);
        let picked = parse_families(&Some(vec!["n3".into(), "N43".into()]), &[]).unwrap();
        assert!(picked.contains(&Family::N3) && picked.contains(&Family::N43));
        assert_eq!(picked.len(), 2);
        assert!(parse_families(&Some(vec!["N5".into()]), &[]).is_err());
    }

    #[test]
    fn disconnected_floor_rendering() {
        assert_eq!(
            disconnected_text(&[Some(21), Some(20), None, Some(14)]),
            "21,20,-,14"
        );
    }
}
