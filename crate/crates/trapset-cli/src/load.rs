//! Code loading and symmetry resolution for the command line.
//!
//! A `--code` argument is either a path to an alist file or the name of a
//! built-in code prefixed with `@`. Symmetry groups for orbit-reduced
//! searches come from `--symmetry`: `none`, `auto` (built-in codes only),
//! or `qc:P` for the circulant shift of a quasi-cyclic code.

use std::fs;
use std::str::FromStr;
use std::sync::Arc;

use trapset_core::codes::{qc_shift_symmetry, tanner_155, tanner_155_symmetry};
use trapset_core::{Error, Result, SymmetryGroup, TannerGraph};

use crate::output::sha256_hex;

/// A loaded code: the graph, the digest of its source bytes, and whether
/// it came from a built-in constructor.
pub struct LoadedCode {
    /// The Tanner graph.
    pub graph: TannerGraph,
    /// SHA-256 of the alist bytes the graph was built from.
    pub digest: String,
    /// Name of the built-in, when `--code` used one.
    pub builtin: Option<&'static str>,
}

/// Resolves a `--code` argument: `@tanner155` builds the built-in Tanner
/// code, anything else is read as an alist file.
pub fn load_code(spec: &str) -> Result<LoadedCode> {
    if let Some(name) = spec.strip_prefix('@') {
        return match name {
            "tanner155" => {
                let graph = tanner_155();
                let digest = sha256_hex(graph.write_alist().as_bytes());
                Ok(LoadedCode {
                    graph,
                    digest,
                    builtin: Some("tanner155"),
                })
            }
            _ => Err(Error::Domain(format!(
                "unknown built-in code @{name}; available: @tanner155"
            ))),
        };
    }
    let bytes = fs::read(spec)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{spec}: {e}"))))?;
    let text =
        String::from_utf8(bytes).map_err(|_| Error::Alist(format!("{spec} is not UTF-8 text")))?;
    let graph = TannerGraph::parse_alist(&text)?;
    Ok(LoadedCode {
        graph,
        digest: sha256_hex(text.as_bytes()),
        builtin: None,
    })
}

/// Parsed form of the `--symmetry` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryArg {
    /// Plain search, no orbit reduction.
    None,
    /// Built-in group for built-in codes, none otherwise.
    Auto,
    /// Circulant shift of a quasi-cyclic code with blocks of size `p`.
    Qc(usize),
}

impl FromStr for SymmetryArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<SymmetryArg, String> {
        match s {
            "none" => Ok(SymmetryArg::None),
            "auto" => Ok(SymmetryArg::Auto),
            _ => match s.strip_prefix("qc:").map(str::parse) {
                Some(Ok(p)) if p > 0 => Ok(SymmetryArg::Qc(p)),
                _ => Err(format!(
                    "expected none, auto, or qc:P with a positive block size, got {s}"
                )),
            },
        }
    }
}

impl SymmetryArg {
    /// Builds the automorphism group the argument names for `code`, or
    /// `None` for plain searches. The group is validated against the
    /// graph by the engines on first use.
    pub fn resolve(self, code: &LoadedCode) -> Result<Option<Arc<SymmetryGroup>>> {
        match self {
            SymmetryArg::None => Ok(None),
            SymmetryArg::Auto => match code.builtin {
                Some("tanner155") => Ok(Some(Arc::new(tanner_155_symmetry()))),
                _ => Ok(None),
            },
            SymmetryArg::Qc(p) => {
                let n = code.graph.num_vars();
                if n % p != 0 {
                    return Err(Error::Domain(format!(
                        "qc:{p} does not divide the {n} variables evenly"
                    )));
                }
                Ok(Some(Arc::new(qc_shift_symmetry(n / p, p)?)))
            }
        }
    }

    /// The flag value echoed into manifests.
    pub fn echo(self) -> String {
        match self {
            SymmetryArg::None => "none".into(),
            SymmetryArg::Auto => "auto".into(),
            SymmetryArg::Qc(p) => format!("qc:{p}"),
        }
    }
}
