//! Result documents, run manifests, and the text, CSV, and JSON renderers.
//!
//! Every command produces a typed result body. The body alone goes to
//! standard output (as text or JSON), so reruns with different worker
//! counts stay byte-identical; the manifest, which records the command
//! line, input digest, wall time, and worker count, is embedded only in
//! result files written with `--out`.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use trapset_core::Result;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "trapset/1";

/// Reproducibility record embedded in result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// The invoking command line, argv[0] included.
    pub command_line: Vec<String>,
    /// SHA-256 of the code file bytes, when the command loads a code.
    pub code_digest: Option<String>,
    /// Echo of the resolved configuration.
    pub config: serde_json::Value,
    /// Wall time of the computation, in seconds.
    pub wall_seconds: f64,
    /// Worker pool size the run used.
    pub workers: usize,
    /// Library version.
    pub version: String,
    /// A deadline or budget cut the computation short.
    pub truncated: bool,
}

/// JSON document wrapper: schema tag, command name, optional manifest,
/// and the result body.
#[derive(Serialize)]
pub struct Document<'a, T: Serialize> {
    /// Schema version, always [`SCHEMA`].
    pub schema: &'static str,
    /// Subcommand that produced the result.
    pub command: &'a str,
    /// Present in result files, absent on standard output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<&'a RunManifest>,
    /// The result body.
    pub result: &'a T,
}

/// Owning mirror of [`Document`] for parsing result files back.
#[derive(Debug, Deserialize)]
pub struct OwnedDocument<T> {
    /// Schema version.
    pub schema: String,
    /// Subcommand that produced the result.
    pub command: String,
    /// Manifest, when the document came from a result file.
    pub manifest: Option<RunManifest>,
    /// The result body.
    pub result: T,
}

/// One instance line of a `--list-instances` file.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    /// The `(a, b)` class.
    pub class: [u32; 2],
    /// The variables, ascending.
    pub vars: Vec<u32>,
    /// LETS, ETSL, NETS, or SS.
    pub category: String,
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Renders the standard output for a finished command: human text by
/// default, a manifest-free JSON document with `--json`.
pub fn print_body<T: Serialize>(command: &str, json: bool, text: &str, result: &T) {
    if json {
        let doc = Document {
            schema: SCHEMA,
            command,
            manifest: None,
            result,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("result bodies serialize")
        );
    } else {
        print!("{text}");
    }
}

/// Writes the full JSON document, manifest included, to `path`.
pub fn write_result_file<T: Serialize>(
    path: &Path,
    command: &str,
    manifest: &RunManifest,
    result: &T,
) -> Result<()> {
    let doc = Document {
        schema: SCHEMA,
        command,
        manifest: Some(manifest),
        result,
    };
    let mut body = serde_json::to_string_pretty(&doc).expect("result bodies serialize");
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

/// Writes a `--list-instances` file: a manifest header line followed by
/// one [`InstanceRecord`] per line.
pub fn write_instances(
    path: &Path,
    command: &str,
    manifest: &RunManifest,
    records: impl Iterator<Item = InstanceRecord>,
) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    let header = Document {
        schema: SCHEMA,
        command,
        manifest: Some(manifest),
        result: &serde_json::json!(null),
    };
    serde_json::to_writer(&mut out, &header).expect("manifests serialize");
    out.write_all(b"\n")?;
    for record in records {
        serde_json::to_writer(&mut out, &record).expect("instance records serialize");
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Per-class count row of the elementary searches.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    /// Number of variables.
    pub a: u32,
    /// Number of unsatisfied checks.
    pub b: u32,
    /// Instances in the class.
    pub count: u64,
}

/// Result body of `search lets` and `search etsl`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassesBody {
    /// LETS or ETSL.
    pub category: String,
    /// Nonempty classes, ordered by size then unsatisfied count.
    pub classes: Vec<ClassCount>,
    /// Total instances.
    pub total: u64,
    /// A deadline cut the search short.
    pub truncated: bool,
}

/// One class row of the multiplicity table.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityRow {
    /// Number of variables.
    pub a: u32,
    /// Number of unsatisfied checks.
    pub b: u32,
    /// Leafless elementary instances.
    pub lets: u64,
    /// Elementary instances with a leaf.
    pub etsl: u64,
    /// Non-elementary instances within the family filter.
    pub nets: u64,
    /// Sum of the three columns.
    pub total_ts: u64,
}

/// Result body of `search nets` and `tables multiplicity`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityBody {
    /// Search mode the run used.
    pub mode: String,
    /// Families counted in the NETS column.
    pub families: Vec<String>,
    /// Nonempty classes with `b` within the report cap.
    pub classes: Vec<MultiplicityRow>,
    /// A deadline cut the search short.
    pub truncated: bool,
}

/// Per-size count row of the stopping set listing.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingSizeRow {
    /// Number of variables.
    pub a: u32,
    /// Elementary stopping sets.
    pub ess: u64,
    /// Non-elementary stopping sets.
    pub ness: u64,
    /// Sum of both columns.
    pub total: u64,
}

/// Result body of `search ss`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingSetsBody {
    /// Nonempty sizes, ascending.
    pub sizes: Vec<StoppingSizeRow>,
    /// Total stopping sets listed.
    pub total: u64,
    /// A deadline cut the search short.
    pub truncated: bool,
}

/// A stopping set witness in a result body.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBody {
    /// Number of variables.
    pub a: u32,
    /// Number of unsatisfied checks.
    pub b: u32,
    /// True when every induced check has degree at most 2.
    pub elementary: bool,
    /// The variables, ascending.
    pub vars: Vec<u32>,
}

/// Result body of `stopping lower` and `stopping upper`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingBody {
    /// exact, lower-bound, upper-bound, or none-found.
    pub outcome: String,
    /// The bound, absent only for none-found.
    pub value: Option<u32>,
    /// Largest size through which absence of stopping sets is certified.
    pub certified_floor: Option<u32>,
    /// Tabulated search-free floor, for reference.
    pub l_ss3: Option<u32>,
    /// Working cap on unsatisfied checks the result used.
    pub bprime_used: Option<u32>,
    /// Escalation rounds the upper driver ran.
    pub rounds: Option<u32>,
    /// The stopping set behind an exact value or upper bound.
    pub witness: Option<WitnessBody>,
    /// A deadline cut the search short.
    pub truncated: bool,
}

/// Per-size census row of the oracle.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    /// Number of variables.
    pub a: u32,
    /// Connected sets of that size.
    pub connected: u64,
    /// Leafless elementary sets.
    pub lets: u64,
    /// Elementary sets with a leaf.
    pub etsl: u64,
    /// Non-elementary trapping sets.
    pub nets: u64,
    /// Stopping sets.
    pub stopping: u64,
}

/// One disagreement between a result file and the oracle.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    /// Number of variables.
    pub a: u32,
    /// Number of unsatisfied checks.
    pub b: u32,
    /// Count claimed by the result file.
    pub engine: u64,
    /// Count established by the census.
    pub oracle: u64,
    /// Census instances of the class, at most ten.
    pub witnesses: Vec<Vec<u32>>,
}

/// Comparison section of the oracle body.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareBody {
    /// Command of the compared result file.
    pub against: String,
    /// Classes checked on either side.
    pub classes_checked: u64,
    /// True when every class agreed.
    pub matched: bool,
    /// Disagreeing classes.
    pub mismatches: Vec<CompareRow>,
}

/// Result body of `oracle`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleBody {
    /// Size cap of the census.
    pub a_max: u32,
    /// Connected sets recorded.
    pub visited: u64,
    /// Per-size category counts.
    pub sizes: Vec<OracleRow>,
    /// Comparison against a result file, when requested.
    pub compare: Option<CompareBody>,
}

/// Result body of `info`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoBody {
    /// Variables.
    pub n: usize,
    /// Checks.
    pub m: usize,
    /// Edges.
    pub edges: usize,
    /// Girth, absent for acyclic graphs.
    pub girth: Option<u32>,
    /// Common variable degree, when variable-regular.
    pub dv: Option<u32>,
    /// Smallest variable degree.
    pub dv_min: u32,
    /// Largest variable degree.
    pub dv_max: u32,
    /// Design rate `(n - m) / n`.
    pub rate: f64,
}

/// Result body of `bounds`: the tabulated ranges and floors of one
/// degree and girth pair.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsBody {
    /// Variable degree.
    pub dv: u32,
    /// Girth.
    pub girth: u32,
    /// Stopping distance floor from class `(2, 0)`.
    pub l_ss1: u32,
    /// Non-elementary stopping size floor from class `(3, 1)`.
    pub l_ss2: u32,
    /// Post-search stopping distance floor.
    pub l_ss3: u32,
    /// Smallest possible non-elementary set size with `b <= 4`.
    pub smallest_nets: u32,
    /// Exhaustive size cap of the six-family search.
    pub nets_a_max: u32,
    /// Exhaustive size cap of the non-elementary stopping search.
    pub ness_a_max: u32,
    /// Working cap on unsatisfied checks.
    pub bprime_max: u32,
    /// Smallest adjunction-unreachable sizes, by `b = 1..=4`.
    pub disconnected_min: [Option<u32>; 4],
}

/// One row of `tables floors`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorsRow {
    /// Variable degree.
    pub dv: u32,
    /// Girth.
    pub girth: u32,
    /// Stopping distance floor from class `(2, 0)`.
    pub l_ss1: u32,
    /// Non-elementary stopping size floor from class `(3, 1)`.
    pub l_ss2: u32,
    /// Post-search stopping distance floor.
    pub l_ss3: u32,
}

/// One row of `tables ranges`.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct RangesRow {
    /// Variable degree.
    pub dv: u32,
    /// Girth.
    pub girth: u32,
    /// Smallest possible non-elementary set size with `b <= 4`.
    pub smallest_nets: u32,
    /// Exhaustive size cap of the six-family search.
    pub nets_a_max: u32,
    /// Exhaustive size cap of the non-elementary stopping search.
    pub ness_a_max: u32,
    /// Working cap on unsatisfied checks.
    pub bprime_max: u32,
    /// Smallest adjunction-unreachable sizes, by `b = 1..=4`.
    pub disconnected_min: [Option<u32>; 4],
}

/// Result body of the grid renderers.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBody<R> {
    /// One row per tabulated degree and girth pair.
    pub rows: Vec<R>,
}

/// Result body of `tables stopping`: one summary row for a code.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeStoppingBody {
    /// Variables.
    pub n: usize,
    /// Checks.
    pub m: usize,
    /// Girth.
    pub girth: u32,
    /// Certified lower bound on the stopping distance.
    pub lower: u32,
    /// The lower bound is the exact stopping distance.
    pub exact: bool,
    /// Upper bound, when a stopping set was found.
    pub upper: Option<u32>,
    /// The upper witness is elementary.
    pub upper_elementary: Option<bool>,
    /// Working cap that produced the upper bound.
    pub bprime_used: Option<u32>,
    /// A deadline cut either driver short.
    pub truncated: bool,
}

/// Renders the text form of a class count table.
pub fn classes_text(body: &ClassesBody) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:>4} {:>4} {:>12}\n", "a", "b", "count"));
    for row in &body.classes {
        out.push_str(&format!("{:>4} {:>4} {:>12}\n", row.a, row.b, row.count));
    }
    out.push_str(&format!("total={}\n", body.total));
    out.push_str(&format!("truncated={}\n", body.truncated));
    out
}

/// Renders the text form of the multiplicity table.
pub fn multiplicity_text(body: &MultiplicityBody) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}\n",
        "a", "b", "lets", "etsl", "nets", "total_ts"
    ));
    for row in &body.classes {
        out.push_str(&format!(
            "{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}\n",
            row.a, row.b, row.lets, row.etsl, row.nets, row.total_ts
        ));
    }
    out.push_str(&format!("truncated={}\n", body.truncated));
    out
}

/// Renders the CSV form of the multiplicity table.
pub fn multiplicity_csv(body: &MultiplicityBody) -> String {
    let mut out = String::from("a,b,lets,etsl,nets,total_ts\n");
    for row in &body.classes {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.a, row.b, row.lets, row.etsl, row.nets, row.total_ts
        ));
    }
    out
}

/// Renders the text form of the stopping set size table.
pub fn stopping_sets_text(body: &StoppingSetsBody) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>4} {:>10} {:>10} {:>10}\n",
        "a", "ess", "ness", "total"
    ));
    for row in &body.sizes {
        out.push_str(&format!(
            "{:>4} {:>10} {:>10} {:>10}\n",
            row.a, row.ess, row.ness, row.total
        ));
    }
    out.push_str(&format!("total={}\n", body.total));
    out.push_str(&format!("truncated={}\n", body.truncated));
    out
}

/// Renders the text form of a stopping driver result.
pub fn stopping_text(body: &StoppingBody) -> String {
    let mut out = String::new();
    out.push_str(&format!("outcome={}\n", body.outcome));
    match body.value {
        Some(v) => out.push_str(&format!("value={v}\n")),
        None => out.push_str("value=none\n"),
    }
    if let Some(floor) = body.certified_floor {
        out.push_str(&format!("certified_floor={floor}\n"));
    }
    if let Some(l3) = body.l_ss3 {
        out.push_str(&format!("l_ss3={l3}\n"));
    }
    if let Some(bp) = body.bprime_used {
        out.push_str(&format!("bprime_used={bp}\n"));
    }
    if let Some(rounds) = body.rounds {
        out.push_str(&format!("rounds={rounds}\n"));
    }
    match &body.witness {
        Some(w) => {
            out.push_str(&format!(
                "witness_class=({}, {})\nwitness_elementary={}\nwitness_vars={}\n",
                w.a,
                w.b,
                w.elementary,
                join_vars(&w.vars)
            ));
        }
        None => out.push_str("witness=none\n"),
    }
    out.push_str(&format!("truncated={}\n", body.truncated));
    out
}

/// Renders the text form of the oracle census.
pub fn oracle_text(body: &OracleBody) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "a", "connected", "lets", "etsl", "nets", "stopping"
    ));
    for row in &body.sizes {
        out.push_str(&format!(
            "{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
            row.a, row.connected, row.lets, row.etsl, row.nets, row.stopping
        ));
    }
    out.push_str(&format!("visited={}\n", body.visited));
    if let Some(compare) = &body.compare {
        out.push_str(&format!(
            "compare={} against={} classes_checked={}\n",
            if compare.matched { "ok" } else { "mismatch" },
            compare.against,
            compare.classes_checked
        ));
        for row in &compare.mismatches {
            out.push_str(&format!(
                "mismatch a={} b={} engine={} oracle={}\n",
                row.a, row.b, row.engine, row.oracle
            ));
            for w in &row.witnesses {
                out.push_str(&format!("  witness={}\n", join_vars(w)));
            }
        }
    }
    out
}

/// Space-separated variable list.
pub fn join_vars(vars: &[u32]) -> String {
    let mut out = String::new();
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&v.to_string());
    }
    out
}
