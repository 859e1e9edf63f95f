//! Cycle seeding and level-synchronized searches for elementary sets.
//!
//! Both searches proceed one set size at a time. The leafless search seeds
//! every level with the chordless cycles of that size and expands each
//! stored set by dot, path, and lollipop moves; the with-leaf search seeds
//! size 1 with single variables and expands by leaf attachment, drawing
//! parents from both its own levels and the leafless ledger.
//!
//! Levels are processed with a fixed parent chunk size and merged in chunk
//! order, then sorted and deduplicated, so results are byte-identical
//! regardless of how many worker threads run the expansion.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::expand::{ExpansionTable, MoveKind, Workspace};
use crate::graph::{Girth, TannerGraph};
use crate::ledger::{ClassLedger, LevelStore};
use crate::profile::SubgraphProfile;
use crate::symmetry::SymmetryGroup;
use crate::{Error, Result};

/// Parents processed per work unit. Fixed so that chunk boundaries, and
/// with them the merged output, do not depend on the thread count.
const PARENT_CHUNK: usize = 1024;

/// Search range and instrumentation settings.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Largest set size to enumerate.
    pub a_max: u32,
    /// Working cap on unsatisfied checks; children above it are discarded.
    pub bprime_max: u32,
    /// Audit every `audit_stride`-th parent by reprofiling each of its
    /// children from scratch; 0 disables auditing.
    pub audit_stride: u64,
    /// Cooperative deadline; the search stops between chunks once passed.
    pub deadline: Option<Instant>,
    /// Automorphism group of the graph; when set, the search stores one
    /// orbit representative per set and counts are weighed by orbit
    /// length.
    pub symmetry: Option<Arc<SymmetryGroup>>,
}

impl SearchOptions {
    /// Options for a search up to `a_max` with working cap `bprime_max`,
    /// with auditing disabled, no deadline, and no symmetry reduction.
    pub fn new(a_max: u32, bprime_max: u32) -> SearchOptions {
        SearchOptions {
            a_max,
            bprime_max,
            audit_stride: 0,
            deadline: None,
            symmetry: None,
        }
    }

    /// Attaches an automorphism group for orbit reduction.
    pub fn with_symmetry(mut self, sym: Arc<SymmetryGroup>) -> SearchOptions {
        self.symmetry = Some(sym);
        self
    }

    pub(crate) fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Rejects a symmetry group that does not act on this graph.
pub(crate) fn check_symmetry(graph: &TannerGraph, sym: Option<&SymmetryGroup>) -> Result<()> {
    if let Some(sym) = sym {
        if sym.n_vars() != graph.num_vars() || !sym.preserves(graph) {
            return Err(Error::Domain(
                "symmetry group is not an automorphism group of this graph".into(),
            ));
        }
    }
    Ok(())
}

/// Builds a level from raw rows: sort and deduplicate, and when a
/// symmetry group is active, replace every row with its orbit
/// representative and deduplicate again.
pub(crate) fn finish_level(
    stride: usize,
    rows: Vec<u16>,
    bs: Vec<u16>,
    sym: Option<&SymmetryGroup>,
) -> LevelStore {
    let level = LevelStore::from_raw(stride, rows, bs);
    let Some(sym) = sym else {
        return level;
    };
    let (mut rows, bs) = level.into_raw();
    rows.par_chunks_mut(stride).for_each_init(
        || (Vec::new(), Vec::new()),
        |(base, image), row| sym.canonicalize_row(row, base, image),
    );
    LevelStore::from_raw(stride, rows, bs)
}

/// Counters reported by a search.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct SearchStats {
    /// Parents whose moves were applied.
    pub parents_expanded: u64,
    /// Children emitted before deduplication.
    pub children_emitted: u64,
    /// Children reprofiled from scratch by the audit.
    pub audited: u64,
    /// Audited children whose reprofile disagreed with the engine.
    pub audit_violations: u64,
    /// Largest size whose level was completed and stored.
    pub last_level: u32,
    /// The deadline cut the search short.
    pub truncated: bool,
    /// A level inspector ended the search early.
    pub stopped: bool,
}

impl SearchStats {
    fn absorb(&mut self, chunk: &ChunkOut) {
        self.children_emitted += chunk.children;
        self.audited += chunk.audited;
        self.audit_violations += chunk.violations;
    }
}

/// Verdict of a level inspector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelAction {
    /// Keep searching.
    Continue,
    /// Store this level and end the search.
    Stop,
}

/// What the audit requires of every child, beyond its class arithmetic.
#[derive(Debug, Clone, Copy)]
pub(crate) enum AuditShape {
    /// Leafless and elementary.
    Lets,
    /// Elementary with at least one leaf.
    Etsl,
    /// No structural requirement.
    Any,
}

/// Which move set a level expansion applies.
pub(crate) enum ExpandMode<'t> {
    /// Dot and chain moves gated by the expansion table.
    Lets(&'t ExpansionTable),
    /// Leaf attachment only.
    Leaves,
    /// Generalized adjunction.
    Adjoin,
}

impl ExpandMode<'_> {
    fn audit_shape(&self) -> AuditShape {
        match self {
            ExpandMode::Lets(_) => AuditShape::Lets,
            ExpandMode::Leaves => AuditShape::Etsl,
            ExpandMode::Adjoin => AuditShape::Any,
        }
    }
}

/// Children produced by one parent chunk, grouped by size.
#[derive(Default)]
struct ChunkOut {
    by_size: BTreeMap<u32, (Vec<u16>, Vec<u16>)>,
    children: u64,
    audited: u64,
    violations: u64,
}

/// Sets and unsatisfied counts are stored as u16; reject ranges that
/// could overflow them.
fn check_row_limits(graph: &TannerGraph, bprime_max: u32) -> Result<()> {
    if graph.num_vars() > u16::MAX as usize {
        return Err(Error::Range("set rows index variables as u16".into()));
    }
    if bprime_max > u16::MAX as u32 {
        return Err(Error::Range("working cap exceeds u16 storage".into()));
    }
    Ok(())
}

fn audit_child(
    graph: &TannerGraph,
    row: &[u16],
    b: u32,
    shape: AuditShape,
    scratch: &mut Vec<u32>,
) -> bool {
    scratch.clear();
    scratch.extend(row.iter().map(|&v| v as u32));
    let p = SubgraphProfile::of(graph, scratch);
    if p.a != row.len() as u32 || p.b != b {
        return false;
    }
    match shape {
        AuditShape::Lets => p.is_lets(),
        AuditShape::Etsl => p.is_etsl(),
        AuditShape::Any => true,
    }
}

/// Expands every parent of `level`, merging children into `pending` keyed
/// by child size. Returns false when the deadline cancelled the level, in
/// which case `pending` is left untouched.
pub(crate) fn expand_level(
    graph: &TannerGraph,
    level: &LevelStore,
    mode: &ExpandMode<'_>,
    opts: &SearchOptions,
    pending: &mut BTreeMap<u32, (Vec<u16>, Vec<u16>)>,
    stats: &mut SearchStats,
) -> bool {
    let cancelled = AtomicBool::new(false);
    let offset = stats.parents_expanded;
    let n = level.len();
    let chunks = n.div_ceil(PARENT_CHUNK);
    let a = if n > 0 { level.row(0).len() as u32 } else { 0 };
    let outs: Vec<ChunkOut> = (0..chunks)
        .into_par_iter()
        .map_init(
            || (Workspace::new(graph), Vec::<u32>::new()),
            |(ws, audit_buf), ci| {
                let mut out = ChunkOut::default();
                if cancelled.load(Ordering::Relaxed) || opts.expired() {
                    cancelled.store(true, Ordering::Relaxed);
                    return out;
                }
                let lo = ci * PARENT_CHUNK;
                let hi = n.min(lo + PARENT_CHUNK);
                for i in lo..hi {
                    let row = level.row(i);
                    let b = level.b(i);
                    ws.load(graph, row, b);
                    let audit_this =
                        opts.audit_stride != 0 && (offset + i as u64) % opts.audit_stride == 0;
                    let shape = mode.audit_shape();
                    let mut sink = |crow: &[u16], cb: u32, _kind: MoveKind| {
                        out.children += 1;
                        if audit_this {
                            out.audited += 1;
                            if !audit_child(graph, crow, cb, shape, audit_buf) {
                                out.violations += 1;
                            }
                        }
                        let (rows, bs) = out.by_size.entry(crow.len() as u32).or_default();
                        rows.extend_from_slice(crow);
                        bs.push(cb as u16);
                    };
                    match mode {
                        ExpandMode::Lets(table) => {
                            let moves = table.class_moves(a, b);
                            if moves.dot {
                                ws.apply_dots(graph, opts.bprime_max, &mut sink);
                            }
                            if moves.chain_max >= 2 {
                                ws.apply_chains(
                                    graph,
                                    moves.chain_min,
                                    moves.chain_max,
                                    opts.bprime_max,
                                    &mut sink,
                                );
                            }
                        }
                        ExpandMode::Leaves => ws.apply_leaves(graph, opts.bprime_max, &mut sink),
                        ExpandMode::Adjoin => ws.apply_adjoin(graph, opts.bprime_max, &mut sink),
                    }
                }
                out
            },
        )
        .collect();
    if cancelled.load(Ordering::Relaxed) {
        return false;
    }
    for out in &outs {
        stats.absorb(out);
    }
    stats.parents_expanded += n as u64;
    for out in outs {
        for (size, (rows, bs)) in out.by_size {
            let (prows, pbs) = pending.entry(size).or_default();
            prows.extend_from_slice(&rows);
            pbs.extend_from_slice(&bs);
        }
    }
    true
}

/// Per-root scratch for the cycle enumeration.
struct CycleScratch {
    /// Variable-graph distance from the current root, in variable steps.
    dist: Vec<u16>,
    /// Induced degree of each check under the current path.
    chk_cnt: Vec<u16>,
    /// Path position (0-based) that first touched each counted check.
    chk_owner: Vec<u16>,
    /// Membership flags for path variables.
    in_path: Vec<bool>,
    path: Vec<u32>,
    queue: Vec<u32>,
    by_size: BTreeMap<u32, (Vec<u16>, Vec<u16>)>,
}

impl CycleScratch {
    fn new(graph: &TannerGraph) -> CycleScratch {
        CycleScratch {
            dist: vec![u16::MAX; graph.num_vars()],
            chk_cnt: vec![0; graph.num_checks()],
            chk_owner: vec![0; graph.num_checks()],
            in_path: vec![false; graph.num_vars()],
            path: Vec::new(),
            queue: Vec::new(),
            by_size: BTreeMap::new(),
        }
    }

    /// Breadth-first variable-graph distances from `root`, capped at `k_max`.
    fn bfs(&mut self, graph: &TannerGraph, root: u32, k_max: u32) {
        self.dist.fill(u16::MAX);
        self.dist[root as usize] = 0;
        self.queue.clear();
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head];
            head += 1;
            let du = self.dist[u as usize];
            if du as u32 >= k_max {
                break;
            }
            for &c in graph.var_checks(u) {
                for &w in graph.chk_vars(c) {
                    if self.dist[w as usize] == u16::MAX {
                        self.dist[w as usize] = du + 1;
                        self.queue.push(w);
                    }
                }
            }
        }
    }
}

/// Enumerates variable sets whose induced subgraph is a single chordless
/// cycle, up to `k_max` variables, discarding cycles whose unsatisfied
/// count exceeds `bprime_max`.
///
/// Each cycle is found exactly once: the walk is rooted at the smallest
/// variable and oriented toward its smaller neighbor.
pub fn enumerate_cycles(graph: &TannerGraph, k_max: u32, bprime_max: u32) -> Result<ClassLedger> {
    let raw = cycle_seeds(graph, k_max, bprime_max)?;
    let mut ledger = ClassLedger::new();
    for (k, (rows, bs)) in raw {
        ledger.set_level(k, LevelStore::from_raw(k as usize, rows, bs));
    }
    Ok(ledger)
}

/// The girth of `graph` together with the number of distinct shortest
/// cycles, counted as variable sets.
pub fn shortest_cycle_count(graph: &TannerGraph) -> Result<(u32, u64)> {
    let girth = match graph.girth() {
        Girth::Finite(g) => g,
        Girth::Unbounded => return Err(Error::Graph("acyclic graph has no shortest cycle".into())),
    };
    if girth == 4 {
        return Err(Error::Girth4);
    }
    let k = girth / 2;
    // Any cycle of k variables has b at most k * (max degree - 2).
    let cap = (0..graph.num_vars() as u32)
        .map(|v| graph.var_degree(v) - 2)
        .max()
        .unwrap_or(0)
        * k;
    let ledger = enumerate_cycles(graph, k, cap)?;
    let count = ledger.level(k).map_or(0, |l| l.len() as u64);
    Ok((girth, count))
}

fn cycle_seeds(
    graph: &TannerGraph,
    k_max: u32,
    bprime_max: u32,
) -> Result<BTreeMap<u32, (Vec<u16>, Vec<u16>)>> {
    graph.require_girth_above_4()?;
    check_row_limits(graph, bprime_max)?;
    let roots: Vec<u32> = (0..graph.num_vars() as u32).collect();
    let locals: Vec<BTreeMap<u32, (Vec<u16>, Vec<u16>)>> = roots
        .par_chunks(64)
        .map_init(
            || CycleScratch::new(graph),
            |scratch, chunk| {
                scratch.by_size.clear();
                for &root in chunk {
                    root_cycles(graph, root, k_max, bprime_max, scratch);
                }
                std::mem::take(&mut scratch.by_size)
            },
        )
        .collect();
    let mut merged: BTreeMap<u32, (Vec<u16>, Vec<u16>)> = BTreeMap::new();
    for local in locals {
        for (k, (rows, bs)) in local {
            let (mrows, mbs) = merged.entry(k).or_default();
            mrows.extend_from_slice(&rows);
            mbs.extend_from_slice(&bs);
        }
    }
    Ok(merged)
}

fn root_cycles(
    graph: &TannerGraph,
    root: u32,
    k_max: u32,
    bprime_max: u32,
    scratch: &mut CycleScratch,
) {
    let start_slack = graph.var_degree(root) - 2;
    if start_slack > bprime_max || k_max < 2 {
        return;
    }
    scratch.bfs(graph, root, k_max);
    scratch.path.clear();
    scratch.path.push(root);
    scratch.in_path[root as usize] = true;
    for &c in graph.var_checks(root) {
        scratch.chk_cnt[c as usize] = 1;
        scratch.chk_owner[c as usize] = 0;
    }
    cycle_step(
        graph,
        root,
        root,
        None,
        start_slack,
        k_max,
        bprime_max,
        scratch,
    );
    for &c in graph.var_checks(root) {
        scratch.chk_cnt[c as usize] = 0;
    }
    scratch.in_path[root as usize] = false;
    scratch.path.pop();
}

/// Extends the rooted path from variable `u`. `entry` is the check through
/// which `u` was entered (None at the root) and `slack` the accumulated
/// `sum(deg - 2)` over path variables.
#[allow(clippy::too_many_arguments)]
fn cycle_step(
    graph: &TannerGraph,
    root: u32,
    u: u32,
    entry: Option<u32>,
    slack: u32,
    k_max: u32,
    bprime_max: u32,
    scratch: &mut CycleScratch,
) {
    let t = scratch.path.len() as u32;
    for &link in graph.var_checks(u) {
        if Some(link) == entry || scratch.chk_cnt[link as usize] != 1 {
            continue;
        }
        for &v in graph.chk_vars(link) {
            if v <= root || scratch.in_path[v as usize] {
                continue;
            }
            // A cycle through v needs at least dist(v) - 1 further
            // variables to walk back to the root.
            let dist = scratch.dist[v as usize];
            if dist == u16::MAX || t + 1 + (dist as u32).saturating_sub(1) > k_max {
                continue;
            }
            let slack_v = slack + (graph.var_degree(v) - 2);
            if slack_v > bprime_max {
                continue;
            }
            // Classify the other checks of v against the path.
            let mut closure = false;
            let mut bad = false;
            for &c in graph.var_checks(v) {
                if c == link || scratch.chk_cnt[c as usize] == 0 {
                    continue;
                }
                let owner = scratch.chk_owner[c as usize];
                if scratch.chk_cnt[c as usize] == 1 && owner == 0 && t >= 2 && !closure {
                    closure = true;
                } else {
                    bad = true;
                    break;
                }
            }
            if bad {
                continue;
            }
            if closure {
                // Orientation rule: accept only the direction whose first
                // step is the smaller neighbor of the root.
                if scratch.path[1] < v {
                    let (rows, bs) = scratch.by_size.entry(t + 1).or_default();
                    let at = rows.len();
                    rows.extend(scratch.path.iter().map(|&w| w as u16));
                    rows.push(v as u16);
                    rows[at..].sort_unstable();
                    bs.push(slack_v as u16);
                }
                continue;
            }
            if t >= k_max {
                continue;
            }
            // Walk deeper through v.
            scratch.path.push(v);
            scratch.in_path[v as usize] = true;
            for &c in graph.var_checks(v) {
                let cnt = scratch.chk_cnt[c as usize];
                scratch.chk_cnt[c as usize] = cnt + 1;
                if cnt == 0 {
                    scratch.chk_owner[c as usize] = t as u16;
                }
            }
            cycle_step(
                graph,
                root,
                v,
                Some(link),
                slack_v,
                k_max,
                bprime_max,
                scratch,
            );
            for &c in graph.var_checks(v) {
                scratch.chk_cnt[c as usize] -= 1;
            }
            scratch.in_path[v as usize] = false;
            scratch.path.pop();
        }
    }
}

/// Enumerates leafless elementary sets up to `opts.a_max` variables with
/// unsatisfied counts capped at `opts.bprime_max`.
///
/// After each level is assembled and deduplicated, and before it is
/// expanded, `inspect` sees it and may end the search. The inspected level
/// is stored either way.
pub fn search_lets(
    graph: &TannerGraph,
    opts: &SearchOptions,
    mut inspect: impl FnMut(u32, &LevelStore) -> LevelAction,
) -> Result<(ClassLedger, SearchStats)> {
    let sym = opts.symmetry.as_deref();
    check_symmetry(graph, sym)?;
    let mut ledger = ClassLedger::new();
    let mut stats = SearchStats::default();
    let girth = match graph.girth() {
        Girth::Finite(4) => return Err(Error::Girth4),
        Girth::Finite(g) => g,
        // No cycles means no leafless sets at all.
        Girth::Unbounded => return Ok((ledger, stats)),
    };
    let table = ExpansionTable::new(
        opts.a_max,
        opts.bprime_max,
        girth,
        graph.regularity().dv_min(),
    )?;
    let mode = ExpandMode::Lets(&table);
    let mut pending = cycle_seeds(graph, opts.a_max, opts.bprime_max)?;
    for a in girth / 2..=opts.a_max {
        if opts.expired() {
            stats.truncated = true;
            break;
        }
        let Some((rows, bs)) = pending.remove(&a) else {
            stats.last_level = a;
            continue;
        };
        let level = finish_level(a as usize, rows, bs, sym);
        if level.is_empty() {
            stats.last_level = a;
            continue;
        }
        let action = inspect(a, &level);
        if action == LevelAction::Stop {
            ledger.set_level(a, level);
            stats.last_level = a;
            stats.stopped = true;
            break;
        }
        if a < opts.a_max && !expand_level(graph, &level, &mode, opts, &mut pending, &mut stats) {
            // The level itself is complete; only its children are lost.
            ledger.set_level(a, level);
            stats.last_level = a;
            stats.truncated = true;
            break;
        }
        ledger.set_level(a, level);
        stats.last_level = a;
    }
    Ok((ledger, stats))
}

/// Enumerates elementary sets with at least one leaf, up to `opts.a_max`
/// variables with unsatisfied counts capped at `opts.bprime_max`.
///
/// Parents are drawn from both the produced levels and the leafless ledger
/// `lets`, which should cover the same range; every such set arises by
/// attaching a leaf to a smaller elementary set, down to single variables.
pub fn search_etsl(
    graph: &TannerGraph,
    lets: &ClassLedger,
    opts: &SearchOptions,
) -> Result<(ClassLedger, SearchStats)> {
    graph.require_girth_above_4()?;
    let sym = opts.symmetry.as_deref();
    check_symmetry(graph, sym)?;
    let mut ledger = ClassLedger::new();
    let mut stats = SearchStats::default();
    if graph.regularity().dv_min() < 2 {
        return Err(Error::Range(
            "searches require minimum variable degree 2".into(),
        ));
    }
    if graph.num_vars() > u16::MAX as usize {
        return Err(Error::Range("set rows index variables as u16".into()));
    }
    let mut pending: BTreeMap<u32, (Vec<u16>, Vec<u16>)> = BTreeMap::new();
    {
        let (rows, bs) = pending.entry(1).or_default();
        for v in 0..graph.num_vars() as u32 {
            let b = graph.var_degree(v);
            if b <= opts.bprime_max {
                rows.push(v as u16);
                bs.push(b as u16);
            }
        }
    }
    for a in 1..=opts.a_max {
        if opts.expired() {
            stats.truncated = true;
            break;
        }
        let own = pending.remove(&a);
        let level = own.map(|(rows, bs)| finish_level(a as usize, rows, bs, sym));
        let mut cancelled = false;
        if a < opts.a_max {
            // Leaf-extend the leafless sets of this size, then our own.
            if let Some(parents) = lets.level(a) {
                cancelled = !expand_level(
                    graph,
                    parents,
                    &ExpandMode::Leaves,
                    opts,
                    &mut pending,
                    &mut stats,
                );
            }
            if let Some(level) = &level {
                cancelled = cancelled
                    || !expand_level(
                        graph,
                        level,
                        &ExpandMode::Leaves,
                        opts,
                        &mut pending,
                        &mut stats,
                    );
            }
        }
        if let Some(level) = level {
            ledger.set_level(a, level);
        }
        stats.last_level = a;
        if cancelled {
            stats.truncated = true;
            break;
        }
    }
    Ok((ledger, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TannerGraph;

    /// Two hexagons sharing variable 2: variables 0-2 close through
    /// checks 0-2, variables 2-4 close through checks 3-5.
    fn two_hexagons() -> TannerGraph {
        TannerGraph::from_edges(
            5,
            6,
            &[
                (0, 0),
                (0, 1),
                (1, 1),
                (1, 2),
                (2, 2),
                (2, 0),
                (2, 3),
                (2, 5),
                (3, 3),
                (3, 4),
                (4, 4),
                (4, 5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hexagon_cycles_found_once() {
        let g = two_hexagons();
        let ledger = enumerate_cycles(&g, 6, 20).unwrap();
        // The two hexagons are the only cycles: any walk through all five
        // variables would pass variable 2 twice.
        assert_eq!(ledger.level(3).map_or(0, |l| l.len()), 2);
        assert_eq!(ledger.total(), 2);
        let rows: Vec<&[u16]> = ledger.level(3).unwrap().iter().map(|(r, _)| r).collect();
        assert_eq!(rows, vec![&[0u16, 1, 2][..], &[2u16, 3, 4][..]]);
        // Variable degrees are 2 except variable 2 (degree 4), so cycle
        // b values are 0 + (4 - 2) = 2 for each hexagon.
        assert_eq!(ledger.level(3).unwrap().b(0), 2);
    }

    #[test]
    fn shortest_cycles_counted() {
        let g = two_hexagons();
        let (girth, count) = shortest_cycle_count(&g).unwrap();
        assert_eq!(girth, 6);
        assert_eq!(count, 2);
    }

    /// The cube as a Tanner graph: variables are cube vertices, checks are
    /// cube edges. Tanner girth 8; the six faces are the shortest cycles.
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

    #[test]
    fn cube_faces_are_the_shortest_cycles() {
        let g = cube_graph();
        let (girth, count) = shortest_cycle_count(&g).unwrap();
        assert_eq!(girth, 8);
        // The six faces are the only chordless 4-cycles of the cube.
        assert_eq!(count, 6);
        let ledger = enumerate_cycles(&g, 6, 20).unwrap();
        assert_eq!(ledger.level(4).map_or(0, |l| l.len()), 6);
        // The cube graph is bipartite, so no 5-variable cycles exist.
        assert_eq!(ledger.level(5).map_or(0, |l| l.len()), 0);
        // Chordless hexagons avoid one antipodal vertex pair each.
        assert_eq!(ledger.level(6).map_or(0, |l| l.len()), 4);
    }

    #[test]
    fn lets_search_on_cube_matches_brute_force() {
        let g = cube_graph();
        let opts = SearchOptions::new(8, 8);
        let (ledger, stats) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        assert_eq!(stats.audit_violations, 0);
        // Brute force: every subset of the 8 cube vertices, profiled.
        let mut want: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for mask in 1u32..256 {
            let vars: Vec<u32> = (0..8).filter(|&v| mask >> v & 1 == 1).collect();
            if !connected_in(&g, &vars) {
                continue;
            }
            let p = SubgraphProfile::of(&g, &vars);
            if p.is_lets() && p.b <= 8 {
                *want.entry(p.class()).or_default() += 1;
            }
        }
        let got: BTreeMap<(u32, u32), u64> = ledger
            .counts()
            .into_iter()
            .map(|(k, n)| ((k.a, k.b), n))
            .collect();
        assert_eq!(got, want);
        // The cube is vertex-transitive with girth 8: the faces appear as
        // the (4, 4) class.
        assert_eq!(got.get(&(4, 4)), Some(&6));
    }

    #[test]
    fn etsl_search_on_cube_matches_brute_force() {
        let g = cube_graph();
        let opts = SearchOptions::new(8, 8);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        let (etsl, stats) = search_etsl(&g, &lets, &opts).unwrap();
        assert_eq!(stats.audit_violations, 0);
        let mut want: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for mask in 1u32..256 {
            let vars: Vec<u32> = (0..8).filter(|&v| mask >> v & 1 == 1).collect();
            if !connected_in(&g, &vars) {
                continue;
            }
            let p = SubgraphProfile::of(&g, &vars);
            if p.is_etsl() && p.b <= 8 {
                *want.entry(p.class()).or_default() += 1;
            }
        }
        let got: BTreeMap<(u32, u32), u64> = etsl
            .counts()
            .into_iter()
            .map(|(k, n)| ((k.a, k.b), n))
            .collect();
        assert_eq!(got, want);
        // Single variables are the size-1 sets with leaves.
        assert_eq!(got.get(&(1, 3)), Some(&8));
    }

    #[test]
    fn inspector_stops_a_search() {
        let g = cube_graph();
        let opts = SearchOptions::new(8, 8);
        let (ledger, stats) = search_lets(&g, &opts, |a, _| {
            if a >= 5 {
                LevelAction::Stop
            } else {
                LevelAction::Continue
            }
        })
        .unwrap();
        assert!(stats.stopped);
        assert!(ledger.sizes().all(|a| a <= 6));
        assert!(ledger.level(4).is_some());
    }

    #[test]
    fn audits_run_when_requested() {
        let g = cube_graph();
        let mut opts = SearchOptions::new(8, 8);
        opts.audit_stride = 1;
        let (_, stats) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        assert!(stats.audited > 0);
        assert_eq!(stats.audited, stats.children_emitted);
        assert_eq!(stats.audit_violations, 0);
    }

    #[test]
    fn symmetry_reduction_reproduces_plain_counts() {
        let g = cube_graph();
        // Vertices are 3-bit words; the graph automorphisms flip and
        // permute the bits, 48 in all.
        let flips: Vec<u32> = (0..8).map(|v| v ^ 1).collect();
        let swap_xy: Vec<u32> = (0..8)
            .map(|v| (v & 4) | (v & 1) << 1 | (v & 2) >> 1)
            .collect();
        let swap_yz: Vec<u32> = (0..8)
            .map(|v| (v & 1) | (v & 2) << 1 | (v & 4) >> 1)
            .collect();
        let sym = std::sync::Arc::new(
            crate::symmetry::SymmetryGroup::from_generators(8, &[flips, swap_xy, swap_yz]).unwrap(),
        );
        assert_eq!(sym.order(), 48);
        assert!(sym.preserves(&g));
        let plain = SearchOptions::new(8, 8);
        let reduced = SearchOptions::new(8, 8).with_symmetry(sym.clone());
        let (lets_p, _) = search_lets(&g, &plain, |_, _| LevelAction::Continue).unwrap();
        let (lets_r, _) = search_lets(&g, &reduced, |_, _| LevelAction::Continue).unwrap();
        assert_eq!(lets_r.weighted_counts(&sym), lets_p.counts());
        // The six faces collapse to one stored representative.
        assert_eq!(lets_r.count(4, 4), 1);
        assert_eq!(lets_r.weighted_count(4, 4, &sym), 6);
        assert_eq!(lets_r.witness(4, 4), lets_p.witness(4, 4));
        let (etsl_p, _) = search_etsl(&g, &lets_p, &plain).unwrap();
        let (etsl_r, _) = search_etsl(&g, &lets_r, &reduced).unwrap();
        assert_eq!(etsl_r.weighted_counts(&sym), etsl_p.counts());
        // A mismatched group is rejected up front.
        let bad = std::sync::Arc::new(
            crate::symmetry::SymmetryGroup::from_generators(8, &[vec![1, 0, 2, 3, 4, 5, 6, 7]])
                .unwrap(),
        );
        let bad_opts = SearchOptions::new(8, 8).with_symmetry(bad);
        assert!(search_lets(&g, &bad_opts, |_, _| LevelAction::Continue).is_err());
    }

    /// Connectivity of `vars` in the induced variable graph.
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
                if seen[j] {
                    continue;
                }
                let shares = graph
                    .var_checks(vars[i])
                    .iter()
                    .any(|&c| graph.chk_vars(c).binary_search(&w).is_ok());
                if shares {
                    seen[j] = true;
                    reached += 1;
                    stack.push(j);
                }
            }
        }
        reached == vars.len()
    }
}
