//! Expansion moves that grow variable sets one step at a time.
//!
//! The leafless elementary search runs on three moves, applied to a parent
//! set `S` whose induced check degrees are known:
//!
//! * **dot(m)**: adjoin one variable with `m >= 2` edges into the induced
//!   neighborhood, all landing on distinct degree-1 checks. The child stays
//!   elementary and leafless, and `b` changes by `deg(v) - 2m`.
//! * **path(m)**: adjoin a chain of `m >= 2` variables linking two distinct
//!   degree-1 checks through fresh degree-2 checks. Open and closed variants
//!   differ in whether the two endpoints belong to different parent
//!   variables. `b` changes by `sum(deg(v_i) - 2) - 2`.
//! * **lollipop(m, c)**: adjoin a chain of `m` variables that starts at a
//!   degree-1 check and closes a fresh cycle among its last `c` variables.
//!   Same `b` law as path(m). The graph girth forces `2c >= girth`.
//!
//! A fourth move, **leaf**, adjoins a variable with exactly one edge into
//! the induced neighborhood, landing on a degree-1 check; it creates the
//! sets with leaves and changes `b` by `deg(v) - 2`. Non-elementary search
//! uses a generalized adjunction that accepts any variable with at least
//! two edges into the induced neighborhood; there `b` changes by
//! `deg(v) - 2q` with `q` the number of odd-degree checks hit.
//!
//! All moves insist that every other edge of every adjoined variable lands
//! on a previously untouched check, so the child class is exactly the
//! parent class plus the move law. Structures that violate this are not
//! lost: each is produced from a different parent by the move that does
//! apply.

use crate::graph::TannerGraph;
use crate::{Error, Result};

/// One expansion move, with enough detail to audit its class arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Adjoin one variable on `m` distinct degree-1 checks.
    Dot {
        /// Number of degree-1 checks consumed.
        m: u32,
    },
    /// Adjoin a chain between degree-1 checks of two distinct variables.
    PathOpen {
        /// Chain length in variables.
        m: u32,
    },
    /// Adjoin a chain between two degree-1 checks of one variable.
    PathClosed {
        /// Chain length in variables.
        m: u32,
    },
    /// Adjoin a chain whose tail closes a fresh cycle.
    Lollipop {
        /// Chain length in variables.
        m: u32,
        /// Number of chain variables on the closed cycle.
        c: u32,
    },
    /// Adjoin one variable on a single degree-1 check.
    Leaf,
    /// Adjoin one variable with either at least two edges anywhere into
    /// the induced neighborhood, or a single edge into a check of induced
    /// degree 3 or more.
    Adjoin {
        /// Total edges into the induced neighborhood.
        m: u32,
        /// Edges landing on odd-degree checks.
        q: u32,
    },
}

impl MoveKind {
    /// Number of variables the move adjoins.
    pub fn added_vars(&self) -> u32 {
        match *self {
            MoveKind::Dot { .. } | MoveKind::Leaf | MoveKind::Adjoin { .. } => 1,
            MoveKind::PathOpen { m }
            | MoveKind::PathClosed { m }
            | MoveKind::Lollipop { m, .. } => m,
        }
    }
}

impl std::fmt::Display for MoveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            MoveKind::Dot { m } => write!(f, "dot_{m}"),
            MoveKind::PathOpen { m } => write!(f, "pa_{m}^o"),
            MoveKind::PathClosed { m } => write!(f, "pa_{m}^c"),
            MoveKind::Lollipop { m, c } => write!(f, "lo_{m}^{c}"),
            MoveKind::Leaf => write!(f, "leaf"),
            MoveKind::Adjoin { m, q } => write!(f, "adjoin(m={m},q={q})"),
        }
    }
}

/// Receiver for expansion children: a sorted row, its `b`, and the move
/// that produced it. Rows are only valid for the duration of the call.
pub type ChildSink<'a> = dyn FnMut(&[u16], u32, MoveKind) + 'a;

/// Moves admitted for one `(a, b)` class by an [`ExpansionTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassMoves {
    /// Dot moves are admitted.
    pub dot: bool,
    /// Chain moves (paths and lollipops) admitted for lengths
    /// `chain_min..=chain_max`; empty when `chain_max` is 0.
    pub chain_min: u32,
    /// See `chain_min`.
    pub chain_max: u32,
}

impl ClassMoves {
    /// True when no move is admitted.
    pub fn is_empty(&self) -> bool {
        !self.dot && self.chain_max == 0
    }
}

/// Which expansion moves apply to which class, for a fixed search range.
///
/// Dot moves are admitted for every in-range class. A chain of length `m`
/// is admitted for class `(a, b)` when the child still fits the range
/// (`a + m <= a_max`) and `b <= bprime_max - 2 + m * (dv - 2)`, with `dv`
/// the smallest variable degree of the code. The table gate is necessary,
/// not sufficient: the engine still checks each concrete child against the
/// working cap, because in irregular codes chain variables can carry more
/// than the minimum degree.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionTable {
    /// Largest set size the search may produce.
    pub a_max: u32,
    /// Working cap on unsatisfied checks.
    pub bprime_max: u32,
    /// Girth of the code the table was built for.
    pub girth: u32,
    /// Smallest variable degree of the code.
    pub dv_min: u32,
}

impl ExpansionTable {
    /// Builds the move table for a search up to `a_max` with working cap
    /// `bprime_max` on a code of girth `girth` and minimum variable degree
    /// `dv_min`.
    pub fn new(a_max: u32, bprime_max: u32, girth: u32, dv_min: u32) -> Result<ExpansionTable> {
        if a_max < girth / 2 {
            return Err(Error::Range(format!(
                "a_max {a_max} below the smallest cycle size {}",
                girth / 2
            )));
        }
        if dv_min < 2 {
            return Err(Error::Range(
                "searches require minimum variable degree 2".into(),
            ));
        }
        Ok(ExpansionTable {
            a_max,
            bprime_max,
            girth,
            dv_min,
        })
    }

    /// Moves admitted for class `(a, b)`.
    pub fn class_moves(&self, a: u32, b: u32) -> ClassMoves {
        if a >= self.a_max || b > self.bprime_max {
            return ClassMoves::default();
        }
        let mut moves = ClassMoves {
            dot: true,
            chain_min: 0,
            chain_max: 0,
        };
        let chain_cap = self.a_max - a;
        if b >= 1 && chain_cap >= 2 {
            let admitted = |m: u32| b <= self.bprime_max - 2 + m * (self.dv_min - 2);
            // The gate is monotone in m, so admitted lengths form a suffix.
            if let Some(lo) = (2..=chain_cap).find(|&m| admitted(m)) {
                moves.chain_min = lo;
                moves.chain_max = chain_cap;
            }
        }
        moves
    }

    /// Lists the admitted move kinds for class `(a, b)` in report order.
    ///
    /// Chain entries expand into open paths, closed paths, and lollipops
    /// with every cycle length the girth allows.
    pub fn kinds(&self, a: u32, b: u32) -> Vec<MoveKind> {
        let moves = self.class_moves(a, b);
        let mut out = Vec::new();
        if moves.dot {
            out.extend((2..=self.dv_min.max(2)).map(|m| MoveKind::Dot { m }));
        }
        if moves.chain_max >= 2 {
            for m in moves.chain_min.max(2)..=moves.chain_max {
                out.push(MoveKind::PathOpen { m });
                out.push(MoveKind::PathClosed { m });
                for c in (self.girth / 2)..=m {
                    out.push(MoveKind::Lollipop { m, c });
                }
            }
        }
        out
    }
}

/// Reusable per-thread scratch space for expansion.
///
/// Holds the induced check degrees of the currently loaded parent plus
/// epoch-stamped marker arrays, so switching parents costs time
/// proportional to the parent, not the graph.
pub struct Workspace {
    /// Induced degree of each check under the loaded parent.
    chk_deg: Vec<u16>,
    /// Checks with nonzero induced degree.
    touched: Vec<u32>,
    /// Degree-1 checks of the loaded parent.
    deg1: Vec<u32>,
    /// Epoch stamp per variable; current epoch means "in parent".
    var_stamp: Vec<u32>,
    /// Round stamp per variable for candidate collection.
    cand_stamp: Vec<u32>,
    /// Edges from each candidate into the counted region.
    cand_hits: Vec<u16>,
    /// Candidates seen this round.
    cand_list: Vec<u32>,
    /// Chain overlay: extra induced degree from chain variables.
    overlay: Vec<u16>,
    /// Chain position (1-based) that first touched each overlaid check.
    overlay_owner: Vec<u16>,
    /// Variables of the current chain, in order.
    chain: Vec<u32>,
    /// Child row assembly buffer.
    row_buf: Vec<u16>,
    epoch: u32,
    cand_round: u32,
    /// Loaded parent row and b.
    parent: Vec<u16>,
    parent_b: u32,
}

impl Workspace {
    /// Creates scratch space sized for `graph`.
    pub fn new(graph: &TannerGraph) -> Workspace {
        Workspace {
            chk_deg: vec![0; graph.num_checks()],
            touched: Vec::new(),
            deg1: Vec::new(),
            var_stamp: vec![0; graph.num_vars()],
            cand_stamp: vec![0; graph.num_vars()],
            cand_hits: vec![0; graph.num_vars()],
            cand_list: Vec::new(),
            overlay: vec![0; graph.num_checks()],
            overlay_owner: vec![0; graph.num_checks()],
            chain: Vec::new(),
            row_buf: Vec::new(),
            epoch: 0,
            cand_round: 0,
            parent: Vec::new(),
            parent_b: 0,
        }
    }

    /// Loads parent `row` with unsatisfied count `b`, replacing any
    /// previously loaded parent.
    pub fn load(&mut self, graph: &TannerGraph, row: &[u16], b: u32) {
        for &c in &self.touched {
            self.chk_deg[c as usize] = 0;
        }
        self.touched.clear();
        self.deg1.clear();
        self.epoch += 1;
        for &v in row {
            self.var_stamp[v as usize] = self.epoch;
            for &c in graph.var_checks(v as u32) {
                if self.chk_deg[c as usize] == 0 {
                    self.touched.push(c);
                }
                self.chk_deg[c as usize] += 1;
            }
        }
        for &c in &self.touched {
            if self.chk_deg[c as usize] == 1 {
                self.deg1.push(c);
            }
        }
        if cfg!(debug_assertions) {
            let odd = self
                .touched
                .iter()
                .filter(|&&c| self.chk_deg[c as usize] % 2 == 1)
                .count() as u32;
            debug_assert_eq!(odd, b, "stored b disagrees with the induced subgraph");
        }
        self.parent.clear();
        self.parent.extend_from_slice(row);
        self.parent_b = b;
    }

    #[inline]
    fn in_parent(&self, v: u32) -> bool {
        self.var_stamp[v as usize] == self.epoch
    }

    /// The parent variable attached to degree-1 check `c`.
    fn owner_of(&self, graph: &TannerGraph, c: u32) -> u32 {
        *graph
            .chk_vars(c)
            .iter()
            .find(|&&v| self.in_parent(v))
            .expect("degree-1 check must touch the parent")
    }

    fn emit(&mut self, added: &[u32], b: u32, kind: MoveKind, sink: &mut ChildSink) {
        self.row_buf.clear();
        self.row_buf.extend_from_slice(&self.parent);
        self.row_buf.extend(added.iter().map(|&v| v as u16));
        self.row_buf.sort_unstable();
        debug_assert!(self.row_buf.windows(2).all(|w| w[0] < w[1]));
        sink(&self.row_buf, b, kind);
    }

    /// Applies dot moves to the loaded parent: one new variable with
    /// `m >= 2` edges into the induced neighborhood, all on distinct
    /// degree-1 checks, every other edge fresh. Children with `b` above
    /// `bprime_max` are discarded.
    pub fn apply_dots(&mut self, graph: &TannerGraph, bprime_max: u32, sink: &mut ChildSink) {
        self.collect_deg1_candidates(graph);
        for i in 0..self.cand_list.len() {
            let v = self.cand_list[i];
            let m = self.cand_hits[v as usize] as u32;
            if m < 2 {
                continue;
            }
            if self.hits_multi_check(graph, v) {
                continue;
            }
            let dv = graph.var_degree(v);
            let b = self.parent_b + dv - 2 * m;
            if b <= bprime_max {
                self.emit(&[v], b, MoveKind::Dot { m }, sink);
            }
        }
    }

    /// Applies the leaf move: one new variable with exactly one edge into
    /// the induced neighborhood, landing on a degree-1 check.
    pub fn apply_leaves(&mut self, graph: &TannerGraph, bprime_max: u32, sink: &mut ChildSink) {
        self.collect_deg1_candidates(graph);
        for i in 0..self.cand_list.len() {
            let v = self.cand_list[i];
            if self.cand_hits[v as usize] != 1 {
                continue;
            }
            if self.hits_multi_check(graph, v) {
                continue;
            }
            let b = self.parent_b + graph.var_degree(v) - 2;
            if b <= bprime_max {
                self.emit(&[v], b, MoveKind::Leaf, sink);
            }
        }
    }

    /// Gathers variables outside the parent adjacent to its degree-1
    /// checks, counting edges onto those checks.
    fn collect_deg1_candidates(&mut self, graph: &TannerGraph) {
        self.cand_list.clear();
        self.cand_round += 1;
        let stamp = self.cand_round;
        for &c in &self.deg1 {
            for &v in graph.chk_vars(c) {
                if self.in_parent(v) {
                    continue;
                }
                if self.cand_stamp[v as usize] != stamp {
                    self.cand_stamp[v as usize] = stamp;
                    self.cand_hits[v as usize] = 0;
                    self.cand_list.push(v);
                }
                self.cand_hits[v as usize] += 1;
            }
        }
    }

    /// True when `v` has an edge onto an induced check of degree 2 or more.
    #[inline]
    fn hits_multi_check(&self, graph: &TannerGraph, v: u32) -> bool {
        graph
            .var_checks(v)
            .iter()
            .any(|&c| self.chk_deg[c as usize] >= 2)
    }

    /// Applies the generalized adjunction move: one new variable with at
    /// least two edges into the induced neighborhood, regardless of the
    /// degrees of the checks hit, or with a single edge into a check of
    /// degree 3 or more.
    ///
    /// The single-edge variant is what lets a high-degree check collect
    /// pendant variables. Without it, a check of degree 4 whose branches
    /// are mostly pendant could only be assembled through intermediates
    /// that are either disconnected or themselves unreachable. A single
    /// edge into a check of degree 1 or 2 stays excluded: the first is a
    /// leaf attachment, which belongs to the elementary searches, and the
    /// second is how the genuinely unreachable structures behind the
    /// tabulated floors would be built.
    pub fn apply_adjoin(&mut self, graph: &TannerGraph, bprime_max: u32, sink: &mut ChildSink) {
        self.cand_list.clear();
        self.cand_round += 1;
        let stamp = self.cand_round;
        for &c in &self.touched {
            for &v in graph.chk_vars(c) {
                if self.in_parent(v) {
                    continue;
                }
                if self.cand_stamp[v as usize] != stamp {
                    self.cand_stamp[v as usize] = stamp;
                    self.cand_hits[v as usize] = 0;
                    self.cand_list.push(v);
                }
                self.cand_hits[v as usize] += 1;
            }
        }
        for i in 0..self.cand_list.len() {
            let v = self.cand_list[i];
            let m = self.cand_hits[v as usize] as u32;
            if m < 2 {
                // With a single edge in, the landing check must already
                // have degree 3; it is the only touched check, so one
                // scan settles it.
                let grows_high = graph
                    .var_checks(v)
                    .iter()
                    .any(|&c| self.chk_deg[c as usize] >= 3);
                if !grows_high {
                    continue;
                }
            }
            let mut q = 0u32;
            for &c in graph.var_checks(v) {
                if self.chk_deg[c as usize] % 2 == 1 {
                    q += 1;
                }
            }
            let b = self.parent_b + graph.var_degree(v) - 2 * q;
            if b <= bprime_max {
                self.emit(&[v], b, MoveKind::Adjoin { m, q }, sink);
            }
        }
    }

    /// Applies path and lollipop moves with chain lengths in
    /// `chain_min..=chain_max`, discarding children with `b` above
    /// `bprime_max`.
    pub fn apply_chains(
        &mut self,
        graph: &TannerGraph,
        chain_min: u32,
        chain_max: u32,
        bprime_max: u32,
        sink: &mut ChildSink,
    ) {
        if chain_max < 2 || chain_min > chain_max {
            return;
        }
        debug_assert!(self.chain.is_empty());
        for start in 0..self.deg1.len() {
            let c0 = self.deg1[start];
            self.overlay[c0 as usize] += 1;
            self.overlay_owner[c0 as usize] = 0;
            self.chain_step(graph, c0, c0, 1, 0, chain_min, chain_max, bprime_max, sink);
            self.overlay[c0 as usize] -= 1;
        }
    }

    /// Recursive chain growth. `link` is the check through which the next
    /// variable must connect, `pos` the 1-based position it would occupy,
    /// and `slack` the accumulated `sum(deg(v_i) - 2)` of the chain so far.
    #[allow(clippy::too_many_arguments)]
    fn chain_step(
        &mut self,
        graph: &TannerGraph,
        c0: u32,
        link: u32,
        pos: u32,
        slack: u32,
        chain_min: u32,
        chain_max: u32,
        bprime_max: u32,
        sink: &mut ChildSink,
    ) {
        // Every deeper variable adds a nonnegative amount to b, so once
        // the best completed child exceeds the cap the branch is dead.
        if self.parent_b + slack > bprime_max + 2 {
            return;
        }
        let cands = graph.chk_vars(link);
        for ci in 0..cands.len() {
            let v = cands[ci];
            if self.in_parent(v) || self.chain.contains(&v) {
                continue;
            }
            // Classify the other edges of v.
            let mut landing: Option<u32> = None;
            let mut closure_owner: Option<u32> = None;
            let mut bad = false;
            for &c in graph.var_checks(v) {
                if c == link {
                    continue;
                }
                let base = self.chk_deg[c as usize];
                let over = self.overlay[c as usize];
                match (base, over) {
                    (0, 0) => {}
                    (1, 0) => {
                        if landing.is_some() || closure_owner.is_some() {
                            bad = true;
                            break;
                        }
                        landing = Some(c);
                    }
                    (0, 1) => {
                        let owner = self.overlay_owner[c as usize] as u32;
                        // Closing onto the immediately preceding variable
                        // would be a 4-cycle; only strictly earlier chain
                        // positions close a valid fresh cycle.
                        if owner + 2 > pos || landing.is_some() || closure_owner.is_some() {
                            bad = true;
                            break;
                        }
                        closure_owner = Some(owner);
                    }
                    _ => {
                        bad = true;
                        break;
                    }
                }
            }
            if bad {
                continue;
            }
            let dv = graph.var_degree(v);
            let slack_v = slack + (dv - 2);
            match (landing, closure_owner) {
                (Some(land), None) => {
                    // Path landing on a second degree-1 check.
                    if pos >= chain_min.max(2) {
                        let b = self.parent_b + slack_v - 2;
                        if b <= bprime_max {
                            self.chain.push(v);
                            let kind = if self.owner_of(graph, c0) == self.owner_of(graph, land) {
                                MoveKind::PathClosed { m: pos }
                            } else {
                                MoveKind::PathOpen { m: pos }
                            };
                            let added = std::mem::take(&mut self.chain);
                            self.emit(&added, b, kind, sink);
                            self.chain = added;
                            self.chain.pop();
                        }
                    }
                }
                (None, Some(owner)) => {
                    // Lollipop closure onto an earlier chain variable.
                    if pos >= chain_min && pos >= 3 {
                        let b = self.parent_b + slack_v - 2;
                        if b <= bprime_max {
                            self.chain.push(v);
                            let c = pos - owner + 1;
                            debug_assert!(
                                c >= 3,
                                "closure onto the previous variable slipped through"
                            );
                            let added = std::mem::take(&mut self.chain);
                            self.emit(&added, b, MoveKind::Lollipop { m: pos, c }, sink);
                            self.chain = added;
                            self.chain.pop();
                        }
                    }
                }
                (None, None) => {
                    // Pure interior variable; recurse deeper.
                    if pos < chain_max {
                        self.chain.push(v);
                        for &c in graph.var_checks(v) {
                            if c != link {
                                let was = self.overlay[c as usize];
                                self.overlay[c as usize] = was + 1;
                                if was == 0 {
                                    self.overlay_owner[c as usize] = pos as u16;
                                }
                            }
                        }
                        self.overlay[link as usize] += 1;
                        for &c in graph.var_checks(v) {
                            if c == link {
                                continue;
                            }
                            self.chain_step(
                                graph,
                                c0,
                                c,
                                pos + 1,
                                slack_v,
                                chain_min,
                                chain_max,
                                bprime_max,
                                sink,
                            );
                        }
                        self.overlay[link as usize] -= 1;
                        for &c in graph.var_checks(v) {
                            if c != link {
                                self.overlay[c as usize] -= 1;
                            }
                        }
                        self.chain.pop();
                    }
                }
                (Some(_), Some(_)) => unreachable!("classification rejects mixed completions"),
            }
        }
    }
}
