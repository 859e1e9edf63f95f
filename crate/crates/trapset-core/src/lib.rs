//! Search engines for small harmful substructures of LDPC Tanner graphs.
//!
//! The crate revolves around three kinds of objects:
//!
//! * **Trapping sets.** A set `S` of variable nodes belongs to class `(a, b)`
//!   when `|S| = a` and exactly `b` checks see an odd number of variables of
//!   `S`. Elementary trapping sets (every induced check degree at most 2)
//!   split into leafless ones (`LETS`, every variable lies on an induced
//!   cycle) and ones with leaves (`ETSL`). Non-elementary trapping sets
//!   (`NETS`) contain at least one check of induced degree 3 or more.
//! * **Stopping sets.** A set with no induced check of degree exactly 1.
//!   Elementary stopping sets are exactly the `(a, 0)` `LETS` classes;
//!   non-elementary ones (`NESS`) additionally contain a check of degree 3
//!   or more.
//! * **Bounds.** Closed-form lower bounds on the size of trapping and
//!   stopping sets as a function of variable degree and girth, used both to
//!   prune searches and to certify stopping distance results.
//!
//! The searches grow sets one variable at a time. Leafless elementary sets
//! are produced by expanding short cycles with dot, path, and lollipop moves;
//! sets with leaves are closed over single-leaf attachments; non-elementary
//! sets are produced by adjoining variables with at least two edges into the
//! induced neighborhood. Every engine processes candidates one size level at
//! a time and merges results through sorted deduplication, so results are
//! identical regardless of thread count.

#![warn(missing_docs)]

pub mod bounds;
pub mod codes;
pub mod expand;
pub mod graph;
pub mod ledger;
pub mod nets;
pub mod oracle;
pub mod profile;
pub mod search;
pub mod stopping;
pub mod symmetry;

pub use graph::{Girth, Regularity, TannerGraph};
pub use ledger::{ClassKey, ClassLedger};
pub use profile::{Family, SubgraphProfile};
pub use symmetry::SymmetryGroup;

use thiserror::Error;

/// Errors produced by parsers, builders, and search drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent alist input.
    #[error("alist: {0}")]
    Alist(String),
    /// Malformed quasi-cyclic exponent input.
    #[error("qc: {0}")]
    Qc(String),
    /// Graph construction failed validation.
    #[error("graph: {0}")]
    Graph(String),
    /// The code contains a length-4 cycle, which the searches do not support.
    #[error("girth4: code has girth 4; searches require girth at least 6")]
    Girth4,
    /// A bound was requested outside its domain of validity.
    #[error("domain: {0}")]
    Domain(String),
    /// A search range is invalid or not certified for the requested mode.
    #[error("range: {0}")]
    Range(String),
    /// An enumeration exceeded its configured budget.
    #[error("budget: {0}")]
    Budget(String),
    /// Underlying I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable code for this error, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Alist(_) => "alist",
            Error::Qc(_) => "qc",
            Error::Graph(_) => "graph",
            Error::Girth4 => "girth4",
            Error::Domain(_) => "domain",
            Error::Range(_) => "range",
            Error::Budget(_) => "budget",
            Error::Io(_) => "io",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// A set of variable node indices, kept sorted ascending.
///
/// All engines emit variable sets in this canonical form, so two sets are
/// equal as sets exactly when they are equal as vectors.
pub type VarSet = Vec<u32>;

/// Sorts a variable list into canonical form and drops duplicates.
pub fn canonical(mut vars: Vec<u32>) -> VarSet {
    vars.sort_unstable();
    vars.dedup();
    vars
}
