//! Exhaustive reference enumeration and decoding checks.
//!
//! The census enumerates every connected variable set up to a size cap,
//! exactly once, by rooted extension: subgraphs are grown from their
//! smallest variable, and a new variable may only enter through the
//! exclusive neighborhood of the chosen extension vertex. Each recorded
//! set is profiled from scratch, independently of the search engines, so
//! the census serves as ground truth for engine-versus-oracle comparison.
//!
//! The module also carries the two decoding-side checks used on stopping
//! set witnesses: a direct no-degree-1-check verification and iterative
//! erasure peeling, which a stopping set must stall completely.

use std::collections::BTreeMap;

use crate::graph::TannerGraph;
use crate::ledger::ClassLedger;
use crate::profile::{Family, SubgraphProfile};
use crate::{Error, Result};

/// The set is leafless and elementary.
pub const FLAG_LETS: u8 = 1 << 0;
/// The set is elementary with at least one leaf.
pub const FLAG_ETSL: u8 = 1 << 1;
/// The set has a check of induced degree 3 or more.
pub const FLAG_NETS: u8 = 1 << 2;
/// The set has no check of induced degree 1.
pub const FLAG_STOPPING: u8 = 1 << 3;

const FAMILY_SHIFT: u32 = 4;

fn family_code(f: Family) -> u8 {
    match f {
        Family::N3 => 0,
        Family::N33 => 1,
        Family::N333 => 2,
        Family::N3333 => 3,
        Family::N4 => 4,
        Family::N43 => 5,
        Family::Other => 6,
    }
}

fn family_from_code(code: u8) -> Family {
    match code {
        0 => Family::N3,
        1 => Family::N33,
        2 => Family::N333,
        3 => Family::N3333,
        4 => Family::N4,
        5 => Family::N43,
        _ => Family::Other,
    }
}

fn pack_flags(p: &SubgraphProfile) -> u8 {
    let mut flags = 0u8;
    if p.is_lets() {
        flags |= FLAG_LETS;
    }
    if p.is_etsl() {
        flags |= FLAG_ETSL;
    }
    if p.is_nets() {
        flags |= FLAG_NETS;
    }
    if p.is_stopping() {
        flags |= FLAG_STOPPING;
    }
    flags | (family_code(p.family()) << FAMILY_SHIFT)
}

/// One recorded set of the census.
#[derive(Debug, Clone, Copy)]
pub struct OracleEntry<'a> {
    /// The variables, sorted ascending.
    pub row: &'a [u16],
    /// Number of odd-degree induced checks.
    pub b: u32,
    /// Packed classification flags.
    pub flags: u8,
}

impl OracleEntry<'_> {
    /// Leafless elementary set.
    pub fn is_lets(&self) -> bool {
        self.flags & FLAG_LETS != 0
    }

    /// Elementary set with at least one leaf.
    pub fn is_etsl(&self) -> bool {
        self.flags & FLAG_ETSL != 0
    }

    /// Non-elementary set.
    pub fn is_nets(&self) -> bool {
        self.flags & FLAG_NETS != 0
    }

    /// Stopping set.
    pub fn is_stopping(&self) -> bool {
        self.flags & FLAG_STOPPING != 0
    }

    /// Non-elementary stopping set.
    pub fn is_ness(&self) -> bool {
        self.is_stopping() && self.is_nets()
    }

    /// Family of the non-elementary degree pattern; `Other` for
    /// elementary sets.
    pub fn family(&self) -> Family {
        family_from_code(self.flags >> FAMILY_SHIFT)
    }
}

#[derive(Debug, Default)]
struct OracleLevel {
    rows: Vec<u16>,
    bs: Vec<u16>,
    flags: Vec<u8>,
}

/// Exhaustive census of connected variable sets up to a size cap.
#[derive(Debug)]
pub struct OracleCensus {
    a_max: u32,
    levels: BTreeMap<u32, OracleLevel>,
    /// Total sets recorded.
    pub visited: u64,
}

impl OracleCensus {
    /// Enumerates every connected set of at most `a_max` variables,
    /// stopping with a budget error after `budget` recorded sets.
    pub fn build(graph: &TannerGraph, a_max: u32, budget: u64) -> Result<OracleCensus> {
        if graph.num_vars() > u16::MAX as usize {
            return Err(Error::Range("census rows index variables as u16".into()));
        }
        if a_max == 0 {
            return Err(Error::Range("census needs a positive size cap".into()));
        }
        let n = graph.num_vars();
        // Variable adjacency: two variables are neighbors when they share
        // a check.
        let mut adj_off = Vec::with_capacity(n + 1);
        let mut adj: Vec<u32> = Vec::new();
        let mut nbrs: Vec<u32> = Vec::new();
        adj_off.push(0usize);
        for v in 0..n as u32 {
            nbrs.clear();
            for &c in graph.var_checks(v) {
                nbrs.extend(graph.chk_vars(c).iter().filter(|&&w| w != v));
            }
            nbrs.sort_unstable();
            nbrs.dedup();
            adj.extend_from_slice(&nbrs);
            adj_off.push(adj.len());
        }
        let mut esu = Esu {
            graph,
            adj_off,
            adj,
            a_max: a_max as usize,
            budget,
            visited: 0,
            sub: Vec::new(),
            seen: vec![false; n],
            row_buf: Vec::new(),
            out: BTreeMap::new(),
        };
        for v in 0..n as u32 {
            esu.root(v)?;
        }
        let mut census = OracleCensus {
            a_max,
            levels: BTreeMap::new(),
            visited: esu.visited,
        };
        for (a, level) in esu.out {
            census.levels.insert(a, finalize_level(a as usize, level));
        }
        Ok(census)
    }

    /// The size cap the census was built with.
    pub fn a_max(&self) -> u32 {
        self.a_max
    }

    /// The recorded sets of size `a`, in row order.
    pub fn entries(&self, a: u32) -> OracleIter<'_> {
        OracleIter {
            level: self.levels.get(&a),
            stride: a as usize,
            i: 0,
        }
    }

    /// Number of recorded sets of size `a` satisfying `keep`.
    pub fn count_where(&self, a: u32, keep: impl Fn(&OracleEntry) -> bool) -> u64 {
        self.entries(a).filter(|e| keep(e)).count() as u64
    }
}

/// Iterator over the entries of one census level.
pub struct OracleIter<'a> {
    level: Option<&'a OracleLevel>,
    stride: usize,
    i: usize,
}

impl<'a> Iterator for OracleIter<'a> {
    type Item = OracleEntry<'a>;

    fn next(&mut self) -> Option<OracleEntry<'a>> {
        let level = self.level?;
        if self.i >= level.bs.len() {
            return None;
        }
        let i = self.i;
        self.i += 1;
        Some(OracleEntry {
            row: &level.rows[i * self.stride..(i + 1) * self.stride],
            b: level.bs[i] as u32,
            flags: level.flags[i],
        })
    }
}

fn finalize_level(stride: usize, level: OracleLevel) -> OracleLevel {
    let count = level.bs.len();
    let mut order: Vec<u32> = (0..count as u32).collect();
    order.sort_unstable_by(|&x, &y| {
        level.rows[x as usize * stride..(x as usize + 1) * stride]
            .cmp(&level.rows[y as usize * stride..(y as usize + 1) * stride])
    });
    let mut rows = Vec::with_capacity(level.rows.len());
    let mut bs = Vec::with_capacity(count);
    let mut flags = Vec::with_capacity(count);
    for &i in &order {
        let row = &level.rows[i as usize * stride..(i as usize + 1) * stride];
        debug_assert!(
            bs.is_empty() || rows[rows.len() - stride..] != *row,
            "rooted extension produced a duplicate set"
        );
        rows.extend_from_slice(row);
        bs.push(level.bs[i as usize]);
        flags.push(level.flags[i as usize]);
    }
    OracleLevel { rows, bs, flags }
}

struct Esu<'g> {
    graph: &'g TannerGraph,
    adj_off: Vec<usize>,
    adj: Vec<u32>,
    a_max: usize,
    budget: u64,
    visited: u64,
    sub: Vec<u32>,
    seen: Vec<bool>,
    row_buf: Vec<u32>,
    out: BTreeMap<u32, OracleLevel>,
}

impl Esu<'_> {
    fn root(&mut self, v: u32) -> Result<()> {
        self.sub.push(v);
        self.seen[v as usize] = true;
        let mut ext = Vec::new();
        for i in self.adj_off[v as usize]..self.adj_off[v as usize + 1] {
            let u = self.adj[i];
            if u > v {
                self.seen[u as usize] = true;
                ext.push(u);
            }
        }
        let result = self.extend(&ext, v);
        for &u in &ext {
            self.seen[u as usize] = false;
        }
        self.seen[v as usize] = false;
        self.sub.pop();
        result
    }

    fn extend(&mut self, ext: &[u32], root: u32) -> Result<()> {
        self.record()?;
        if self.sub.len() == self.a_max {
            return Ok(());
        }
        for (i, &w) in ext.iter().enumerate() {
            // Remaining extension candidates plus the exclusive new
            // neighbors of w, which are marked for the recursion below.
            let mut ext2: Vec<u32> = ext[i + 1..].to_vec();
            let first_new = ext2.len();
            for &u in &self.adj[self.adj_off[w as usize]..self.adj_off[w as usize + 1]] {
                if u > root && !self.seen[u as usize] {
                    ext2.push(u);
                }
            }
            for &u in &ext2[first_new..] {
                self.seen[u as usize] = true;
            }
            self.sub.push(w);
            let result = self.extend(&ext2, root);
            self.sub.pop();
            for &u in &ext2[first_new..] {
                self.seen[u as usize] = false;
            }
            result?;
        }
        Ok(())
    }

    fn record(&mut self) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::Budget(format!(
                "census exceeded its budget of {} sets",
                self.budget
            )));
        }
        self.row_buf.clear();
        self.row_buf.extend_from_slice(&self.sub);
        self.row_buf.sort_unstable();
        let p = SubgraphProfile::of(self.graph, &self.row_buf);
        let level = self.out.entry(p.a).or_default();
        level.rows.extend(self.row_buf.iter().map(|&v| v as u16));
        level.bs.push(p.b as u16);
        level.flags.push(pack_flags(&p));
        Ok(())
    }
}

/// One engine-versus-oracle disagreement.
#[derive(Debug, Clone)]
pub struct Mismatch {
    /// Number of variables.
    pub a: u32,
    /// Number of odd-degree induced checks.
    pub b: u32,
    /// The variables, ascending.
    pub vars: Vec<u32>,
    /// True when the engine holds a set the oracle filter does not,
    /// false when the engine misses an oracle set.
    pub engine_has: bool,
}

/// Walks census and ledger levels over `sizes` and reports rows present
/// on one side only, after filtering both sides. Collection stops at
/// `max_mismatches` witnesses; an empty result means exact agreement.
pub fn compare_with_ledger(
    census: &OracleCensus,
    ledger: &ClassLedger,
    sizes: std::ops::RangeInclusive<u32>,
    keep_oracle: impl Fn(&OracleEntry) -> bool,
    keep_engine: impl Fn(&[u16], u32) -> bool,
    max_mismatches: usize,
) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for a in sizes {
        let oracle_rows: Vec<(&[u16], u32)> = census
            .entries(a)
            .filter(|e| keep_oracle(e))
            .map(|e| (e.row, e.b))
            .collect();
        let engine_rows: Vec<(&[u16], u32)> = ledger
            .level(a)
            .map(|l| l.iter().filter(|&(row, b)| keep_engine(row, b)).collect())
            .unwrap_or_default();
        let (mut i, mut j) = (0, 0);
        while (i < oracle_rows.len() || j < engine_rows.len()) && out.len() < max_mismatches {
            let ord = match (oracle_rows.get(i), engine_rows.get(j)) {
                (Some(o), Some(e)) => o.0.cmp(e.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => break,
            };
            match ord {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    let (row, b) = oracle_rows[i];
                    out.push(Mismatch {
                        a,
                        b,
                        vars: row.iter().map(|&v| v as u32).collect(),
                        engine_has: false,
                    });
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let (row, b) = engine_rows[j];
                    out.push(Mismatch {
                        a,
                        b,
                        vars: row.iter().map(|&v| v as u32).collect(),
                        engine_has: true,
                    });
                    j += 1;
                }
            }
        }
        if out.len() >= max_mismatches {
            break;
        }
    }
    out
}

/// True when `vars` is nonempty and its induced subgraph has no check of
/// degree 1, the defining property of a stopping set.
pub fn verify_stopping_set(graph: &TannerGraph, vars: &[u32]) -> bool {
    if vars.is_empty() {
        return false;
    }
    SubgraphProfile::of(graph, vars).degree_one_checks == 0
}

/// Iterative erasure peeling. Starting from the erased variables, any
/// check with exactly one erased neighbor resolves it; the returned
/// stalled core is empty exactly when peeling decodes everything. A
/// stopping set stalls immediately and comes back unchanged.
pub fn peel_erasures(graph: &TannerGraph, erased: &[u32]) -> Vec<u32> {
    let mut is_erased = vec![false; graph.num_vars()];
    let mut count = vec![0u32; graph.num_checks()];
    let mut queue: Vec<u32> = Vec::new();
    for &v in erased {
        if is_erased[v as usize] {
            continue;
        }
        is_erased[v as usize] = true;
        for &c in graph.var_checks(v) {
            count[c as usize] += 1;
        }
    }
    for c in 0..graph.num_checks() as u32 {
        if count[c as usize] == 1 {
            queue.push(c);
        }
    }
    while let Some(c) = queue.pop() {
        if count[c as usize] != 1 {
            continue;
        }
        let v = graph
            .chk_vars(c)
            .iter()
            .copied()
            .find(|&v| is_erased[v as usize])
            .expect("count says one erased neighbor remains");
        is_erased[v as usize] = false;
        for &c2 in graph.var_checks(v) {
            count[c2 as usize] -= 1;
            if count[c2 as usize] == 1 {
                queue.push(c2);
            }
        }
    }
    (0..graph.num_vars() as u32)
        .filter(|&v| is_erased[v as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{search_lets, LevelAction, SearchOptions};

    fn cube_graph() -> TannerGraph {
        let cube_edges: [(u32, u32); 12] = [
            (0, 1),
            (0, 2),
            (0, 4),
            (1, 3),
            (1, 5),
            (2, 3),
            (2, 6),
            (3, 7),
            (4, 5),
            (4, 6),
            (5, 7),
            (6, 7),
        ];
        let mut edges = Vec::new();
        for (c, &(x, y)) in cube_edges.iter().enumerate() {
            edges.push((x, c as u32));
            edges.push((y, c as u32));
        }
        TannerGraph::from_edges(8, 12, &edges).unwrap()
    }

    fn connected_in(graph: &TannerGraph, vars: &[u32]) -> bool {
        if vars.is_empty() {
            return false;
        }
        let mut seen = vec![false; vars.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(i) = stack.pop() {
            for (j, &w) in vars.iter().enumerate() {
                if !seen[j]
                    && graph
                        .var_checks(vars[i])
                        .iter()
                        .any(|&c| graph.chk_vars(c).binary_search(&w).is_ok())
                {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
        reached == vars.len()
    }

    #[test]
    fn census_counts_connected_sets_exactly() {
        let g = cube_graph();
        let census = OracleCensus::build(&g, 8, 1 << 20).unwrap();
        let mut want = vec![0u64; 9];
        for mask in 1u32..256 {
            let vars: Vec<u32> = (0..8).filter(|&v| mask >> v & 1 == 1).collect();
            if connected_in(&g, &vars) {
                want[vars.len()] += 1;
            }
        }
        for a in 1..=8u32 {
            assert_eq!(
                census.count_where(a, |_| true),
                want[a as usize],
                "size {a}"
            );
        }
        assert_eq!(census.visited, want.iter().sum::<u64>());
    }

    #[test]
    fn census_flags_match_fresh_profiles() {
        let g = cube_graph();
        let census = OracleCensus::build(&g, 8, 1 << 20).unwrap();
        for a in 1..=8u32 {
            for e in census.entries(a) {
                let vars: Vec<u32> = e.row.iter().map(|&v| v as u32).collect();
                let p = SubgraphProfile::of(&g, &vars);
                assert_eq!(e.b, p.b);
                assert_eq!(e.is_lets(), p.is_lets());
                assert_eq!(e.is_etsl(), p.is_etsl());
                assert_eq!(e.is_nets(), p.is_nets());
                assert_eq!(e.is_stopping(), p.is_stopping());
                assert_eq!(e.family(), p.family());
            }
        }
    }

    #[test]
    fn engine_agrees_with_census_on_cube() {
        let g = cube_graph();
        let census = OracleCensus::build(&g, 8, 1 << 20).unwrap();
        let (lets, _) =
            search_lets(&g, &SearchOptions::new(8, 8), |_, _| LevelAction::Continue).unwrap();
        let mismatches = compare_with_ledger(
            &census,
            &lets,
            1..=8,
            |e| e.is_lets() && e.b <= 8,
            |_, _| true,
            10,
        );
        assert!(mismatches.is_empty(), "{mismatches:?}");
    }

    #[test]
    fn comparison_spots_a_missing_row() {
        let g = cube_graph();
        let census = OracleCensus::build(&g, 4, 1 << 20).unwrap();
        // An engine ledger with no levels at all misses every filtered row.
        let empty = ClassLedger::new();
        let mismatches =
            compare_with_ledger(&census, &empty, 1..=4, |e| e.is_lets(), |_, _| true, 3);
        assert_eq!(mismatches.len(), 3);
        assert!(mismatches.iter().all(|m| !m.engine_has));
    }

    #[test]
    fn budget_is_enforced() {
        let g = cube_graph();
        let err = OracleCensus::build(&g, 8, 3).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn whole_cube_stalls_peeling() {
        let g = cube_graph();
        let all: Vec<u32> = (0..8).collect();
        assert!(verify_stopping_set(&g, &all));
        assert_eq!(peel_erasures(&g, &all), all);
        // Removing any variable lets peeling unravel the rest.
        let seven: Vec<u32> = (0..7).collect();
        assert!(!verify_stopping_set(&g, &seven));
        assert!(peel_erasures(&g, &seven).is_empty());
    }

    #[test]
    fn face_is_not_a_stopping_set() {
        let g = cube_graph();
        // A face leaves four degree-1 checks toward the opposite face.
        let face = vec![0u32, 1, 2, 3];
        assert!(!verify_stopping_set(&g, &face));
        assert!(peel_erasures(&g, &face).is_empty());
    }
}
