//! Bipartite Tanner graph representation, alist I/O, and quasi-cyclic
//! construction.
//!
//! Variables and checks are indexed from 0. Adjacency is stored in compressed
//! sparse rows with sorted neighbor lists, so neighbor slices can be merged
//! and binary-searched directly.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Largest supported variable or check count.
///
/// Search engines store member lists as 16-bit indices; one graph side
/// therefore must not exceed this.
pub const MAX_NODES: usize = u16::MAX as usize;

/// Girth of a Tanner graph. Bipartite, so always even when finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    /// Length of a shortest cycle.
    Finite(u32),
    /// The graph has no cycle.
    Unbounded,
}

impl Girth {
    /// Finite girth value, if any.
    pub fn finite(self) -> Option<u32> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Unbounded => None,
        }
    }
}

impl std::fmt::Display for Girth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Variable degree structure of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// Every variable has the same degree.
    VariableRegular(u32),
    /// Variable degrees differ.
    Irregular {
        /// Smallest variable degree.
        dv_min: u32,
        /// Largest variable degree.
        dv_max: u32,
    },
}

impl Regularity {
    /// Smallest variable degree in the code.
    pub fn dv_min(self) -> u32 {
        match self {
            Regularity::VariableRegular(d) => d,
            Regularity::Irregular { dv_min, .. } => dv_min,
        }
    }

    /// The common variable degree, if the code is variable-regular.
    pub fn uniform(self) -> Option<u32> {
        match self {
            Regularity::VariableRegular(d) => Some(d),
            Regularity::Irregular { .. } => None,
        }
    }
}

/// A bipartite Tanner graph with `n` variables and `m` checks.
#[derive(Debug)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    var_off: Vec<u32>,
    var_chk: Vec<u32>,
    chk_off: Vec<u32>,
    chk_var: Vec<u32>,
    girth: OnceLock<Girth>,
}

impl TannerGraph {
    /// Builds a graph from an edge list of `(variable, check)` pairs.
    ///
    /// Fails on out-of-range indices, duplicate edges, isolated variables,
    /// or a side exceeding [`MAX_NODES`].
    pub fn from_edges(n: usize, m: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Graph("graph must have variables and checks".into()));
        }
        if n > MAX_NODES || m > MAX_NODES {
            return Err(Error::Graph(format!(
                "side exceeds {MAX_NODES} nodes (n={n}, m={m})"
            )));
        }
        let mut var_adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(v, c) in edges {
            if v as usize >= n || c as usize >= m {
                return Err(Error::Graph(format!(
                    "edge ({v}, {c}) out of range for n={n}, m={m}"
                )));
            }
            var_adj[v as usize].push(c);
        }
        let mut chk_adj: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (v, adj) in var_adj.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Graph(format!("duplicate edge at variable {v}")));
            }
            if adj.is_empty() {
                return Err(Error::Graph(format!("variable {v} has no checks")));
            }
            for &c in adj.iter() {
                chk_adj[c as usize].push(v as u32);
            }
        }
        // Insertion order above is ascending in v, so check lists are sorted.
        let (var_off, var_chk) = to_csr(&var_adj);
        let (chk_off, chk_var) = to_csr(&chk_adj);
        Ok(TannerGraph {
            n,
            m,
            var_off,
            var_chk,
            chk_off,
            chk_var,
            girth: OnceLock::new(),
        })
    }

    /// Number of variable nodes.
    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Number of check nodes.
    pub fn num_checks(&self) -> usize {
        self.m
    }

    /// Number of edges.
    pub fn num_edges(&self) -> usize {
        self.var_chk.len()
    }

    /// Checks adjacent to variable `v`, sorted ascending.
    #[inline]
    pub fn var_checks(&self, v: u32) -> &[u32] {
        &self.var_chk[self.var_off[v as usize] as usize..self.var_off[v as usize + 1] as usize]
    }

    /// Variables adjacent to check `c`, sorted ascending.
    #[inline]
    pub fn chk_vars(&self, c: u32) -> &[u32] {
        &self.chk_var[self.chk_off[c as usize] as usize..self.chk_off[c as usize + 1] as usize]
    }

    /// Degree of variable `v`.
    #[inline]
    pub fn var_degree(&self, v: u32) -> u32 {
        self.var_off[v as usize + 1] - self.var_off[v as usize]
    }

    /// Degree of check `c`.
    #[inline]
    pub fn chk_degree(&self, c: u32) -> u32 {
        self.chk_off[c as usize + 1] - self.chk_off[c as usize]
    }

    /// Variable degree structure.
    pub fn regularity(&self) -> Regularity {
        let mut lo = u32::MAX;
        let mut hi = 0;
        for v in 0..self.n {
            let d = self.var_degree(v as u32);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == hi {
            Regularity::VariableRegular(lo)
        } else {
            Regularity::Irregular {
                dv_min: lo,
                dv_max: hi,
            }
        }
    }

    /// Girth of the graph, computed on first use and cached.
    ///
    /// Runs one breadth-first search per variable; the minimum over all
    /// roots of the shortest cycle detected is exact.
    pub fn girth(&self) -> Girth {
        *self.girth.get_or_init(|| self.compute_girth())
    }

    /// Returns an error if the graph contains a length-4 cycle.
    pub fn require_girth_above_4(&self) -> Result<()> {
        match self.girth() {
            Girth::Finite(g) if g <= 4 => Err(Error::Girth4),
            _ => Ok(()),
        }
    }

    fn compute_girth(&self) -> Girth {
        let total = self.n + self.m;
        let mut dist = vec![u32::MAX; total];
        let mut parent = vec![u32::MAX; total];
        let mut queue: Vec<u32> = Vec::with_capacity(total);
        let mut best = u32::MAX;
        // Node ids: variables are 0..n, checks are n..n+m.
        let chk_base = self.n as u32;
        for root in 0..self.n as u32 {
            dist.fill(u32::MAX);
            queue.clear();
            dist[root as usize] = 0;
            parent[root as usize] = u32::MAX;
            queue.push(root);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                let du = dist[u as usize];
                // A cycle through nodes at depth d has length at least 2d;
                // deeper layers cannot improve on the current best.
                if 2 * du >= best {
                    break;
                }
                let neighbors: &[u32] = if u < chk_base {
                    self.var_checks(u)
                } else {
                    self.chk_vars(u - chk_base)
                };
                for &w0 in neighbors {
                    let w = if u < chk_base { w0 + chk_base } else { w0 };
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = du + 1;
                        parent[w as usize] = u;
                        queue.push(w);
                    } else if parent[u as usize] != w {
                        best = best.min(du + dist[w as usize] + 1);
                    }
                }
            }
            if best == 4 {
                // No bipartite graph without parallel edges does better.
                break;
            }
        }
        if best == u32::MAX {
            Girth::Unbounded
        } else {
            debug_assert!(best % 2 == 0, "bipartite girth must be even");
            Girth::Finite(best)
        }
    }

    /// Parses the standard alist text format.
    ///
    /// Expected layout: a line `n m`, a line with the maximum variable and
    /// check degrees, `n` variable degrees, `m` check degrees, then one
    /// neighbor list per variable and one per check, all indices 1-based.
    /// Zero entries inside neighbor lists are treated as padding and
    /// ignored. Both adjacency sections must describe the same edge set.
    pub fn parse_alist(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = |line: Option<&str>, what: &str| -> Result<Vec<usize>> {
            let line = line.ok_or_else(|| Error::Alist(format!("missing {what} line")))?;
            line.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Alist(format!("bad integer {t:?} in {what} line")))
                })
                .collect()
        };
        let sizes = header(lines.next(), "size")?;
        if sizes.len() != 2 {
            return Err(Error::Alist("size line must hold exactly n and m".into()));
        }
        let (n, m) = (sizes[0], sizes[1]);
        if n == 0 || m == 0 {
            return Err(Error::Alist("n and m must be positive".into()));
        }
        let maxdeg = header(lines.next(), "max degree")?;
        if maxdeg.len() != 2 {
            return Err(Error::Alist("max degree line must hold two values".into()));
        }
        let vdeg = header(lines.next(), "variable degree")?;
        if vdeg.len() != n {
            return Err(Error::Alist(format!(
                "expected {n} variable degrees, found {}",
                vdeg.len()
            )));
        }
        let cdeg = header(lines.next(), "check degree")?;
        if cdeg.len() != m {
            return Err(Error::Alist(format!(
                "expected {m} check degrees, found {}",
                cdeg.len()
            )));
        }
        if let Some(&d) = vdeg.iter().max() {
            if d > maxdeg[0] {
                return Err(Error::Alist(format!(
                    "variable degree {d} exceeds declared maximum {}",
                    maxdeg[0]
                )));
            }
        }
        if let Some(&d) = cdeg.iter().max() {
            if d > maxdeg[1] {
                return Err(Error::Alist(format!(
                    "check degree {d} exceeds declared maximum {}",
                    maxdeg[1]
                )));
            }
        }
        let mut read_lists =
            |count: usize, degs: &[usize], limit: usize, what: &str| -> Result<Vec<Vec<u32>>> {
                let mut out = Vec::with_capacity(count);
                for (i, &d) in degs.iter().enumerate().take(count) {
                    let line = lines
                        .next()
                        .ok_or_else(|| Error::Alist(format!("missing {what} list {i}")))?;
                    let mut entries = Vec::with_capacity(d);
                    for t in line.split_whitespace() {
                        let x: usize = t.parse().map_err(|_| {
                            Error::Alist(format!("bad index {t:?} in {what} list {i}"))
                        })?;
                        if x == 0 {
                            continue; // padding
                        }
                        if x > limit {
                            return Err(Error::Alist(format!(
                                "index {x} out of range in {what} list {i}"
                            )));
                        }
                        entries.push((x - 1) as u32);
                    }
                    if entries.len() != d {
                        return Err(Error::Alist(format!(
                            "{what} list {i} has {} entries, degree says {d}",
                            entries.len()
                        )));
                    }
                    out.push(entries);
                }
                Ok(out)
            };
        let var_lists = read_lists(n, &vdeg, m, "variable")?;
        let chk_lists = read_lists(m, &cdeg, n, "check")?;
        if lines.next().is_some() {
            return Err(Error::Alist("trailing content after check lists".into()));
        }

        let mut edges = Vec::with_capacity(vdeg.iter().sum());
        for (v, list) in var_lists.iter().enumerate() {
            for &c in list {
                edges.push((v as u32, c));
            }
        }
        let graph = Self::from_edges(n, m, &edges)?;
        // The check section must be the transpose of the variable section.
        for (c, list) in chk_lists.iter().enumerate() {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Alist(format!("duplicate entry in check list {c}")));
            }
            if sorted != graph.chk_vars(c as u32) {
                return Err(Error::Alist(format!(
                    "check list {c} disagrees with the variable lists"
                )));
            }
        }
        Ok(graph)
    }

    /// Serializes the graph in alist format without zero padding.
    ///
    /// Output from this writer parses back to an identical graph and
    /// round-trips byte for byte.
    pub fn write_alist(&self) -> String {
        let mut out = String::new();
        let dv_max = (0..self.n)
            .map(|v| self.var_degree(v as u32))
            .max()
            .unwrap_or(0);
        let dc_max = (0..self.m)
            .map(|c| self.chk_degree(c as u32))
            .max()
            .unwrap_or(0);
        let _ = writeln!(out, "{} {}", self.n, self.m);
        let _ = writeln!(out, "{dv_max} {dc_max}");
        fn number_line(values: impl Iterator<Item = u32>, out: &mut String) {
            let mut first = true;
            for x in values {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{x}");
                first = false;
            }
            out.push('\n');
        }
        number_line((0..self.n).map(|v| self.var_degree(v as u32)), &mut out);
        number_line((0..self.m).map(|c| self.chk_degree(c as u32)), &mut out);
        for v in 0..self.n {
            number_line(self.var_checks(v as u32).iter().map(|&c| c + 1), &mut out);
        }
        for c in 0..self.m {
            number_line(self.chk_vars(c as u32).iter().map(|&v| v + 1), &mut out);
        }
        out
    }
}

fn to_csr(adj: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let mut off = Vec::with_capacity(adj.len() + 1);
    let mut flat = Vec::with_capacity(adj.iter().map(Vec::len).sum());
    off.push(0);
    for list in adj {
        flat.extend_from_slice(list);
        off.push(flat.len() as u32);
    }
    (off, flat)
}

/// Parses a quasi-cyclic exponent matrix from text.
///
/// One row per line, entries whitespace separated; `-1` marks an all-zero
/// block and any entry `s >= 0` marks a circulant shift. All rows must have
/// the same length.
pub fn parse_qc_exponents(text: &str) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    for (i, line) in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
    {
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Qc(format!("bad entry {t:?} in row {i}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Qc("empty exponent matrix".into()));
    }
    let width = rows[0].len();
    if width == 0 {
        return Err(Error::Qc("empty exponent row".into()));
    }
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Qc("exponent rows differ in length".into()));
    }
    for row in &rows {
        if row.iter().any(|&s| s < -1) {
            return Err(Error::Qc("entries must be -1 or nonnegative".into()));
        }
    }
    Ok(rows)
}

/// Builds the Tanner graph of a quasi-cyclic code from its exponent matrix.
///
/// For a `J x L` matrix and circulant size `p`, the graph has `L * p`
/// variables and `J * p` checks. Entry `s >= 0` at block `(i, j)` connects
/// check `i * p + r` to variable `j * p + ((r + s) mod p)` for every
/// `r < p`; entry `-1` leaves the block empty.
pub fn build_qc(exponents: &[Vec<i64>], p: usize) -> Result<TannerGraph> {
    if p == 0 {
        return Err(Error::Qc("circulant size must be positive".into()));
    }
    if exponents.is_empty() || exponents[0].is_empty() {
        return Err(Error::Qc("empty exponent matrix".into()));
    }
    let j_blocks = exponents.len();
    let l_blocks = exponents[0].len();
    if exponents.iter().any(|r| r.len() != l_blocks) {
        return Err(Error::Qc("exponent rows differ in length".into()));
    }
    let mut edges = Vec::new();
    for (i, row) in exponents.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if s < -1 {
                return Err(Error::Qc("entries must be -1 or nonnegative".into()));
            }
            if s < 0 {
                continue;
            }
            let shift = (s as usize) % p;
            for r in 0..p {
                let chk = (i * p + r) as u32;
                let var = (j * p + (r + shift) % p) as u32;
                edges.push((var, chk));
            }
        }
    }
    TannerGraph::from_edges(l_blocks * p, j_blocks * p, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three variables in a 6-cycle plus one pendant variable on check 0.
    fn small_graph() -> TannerGraph {
        TannerGraph::from_edges(
            4,
            3,
            &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0), (3, 0)],
        )
        .unwrap()
    }

    #[test]
    fn adjacency_is_sorted() {
        let g = small_graph();
        assert_eq!(g.var_checks(0), &[0, 1]);
        assert_eq!(g.chk_vars(0), &[0, 2, 3]);
        assert_eq!(g.var_degree(3), 1);
        assert_eq!(g.chk_degree(0), 3);
    }

    #[test]
    fn girth_of_hexagon_is_six() {
        let g = small_graph();
        assert_eq!(g.girth(), Girth::Finite(6));
        assert!(g.require_girth_above_4().is_ok());
    }

    #[test]
    fn girth_of_double_edge_pair_is_four() {
        // Two variables sharing two checks.
        let g = TannerGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.girth(), Girth::Finite(4));
        assert!(matches!(g.require_girth_above_4(), Err(Error::Girth4)));
    }

    #[test]
    fn tree_has_unbounded_girth() {
        let g = TannerGraph::from_edges(3, 2, &[(0, 0), (1, 0), (1, 1), (2, 1)]).unwrap();
        assert_eq!(g.girth(), Girth::Unbounded);
        assert!(g.require_girth_above_4().is_ok());
    }

    #[test]
    fn duplicate_edge_rejected() {
        let err = TannerGraph::from_edges(2, 1, &[(0, 0), (0, 0), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Graph(_)));
    }

    #[test]
    fn isolated_variable_rejected() {
        let err = TannerGraph::from_edges(2, 1, &[(0, 0)]).unwrap_err();
        assert!(matches!(err, Error::Graph(_)));
    }

    #[test]
    fn regularity_detection() {
        let g = small_graph();
        assert_eq!(
            g.regularity(),
            Regularity::Irregular {
                dv_min: 1,
                dv_max: 2
            }
        );
        let cycle = TannerGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(cycle.regularity(), Regularity::VariableRegular(2));
    }

    #[test]
    fn alist_round_trip() {
        let g = small_graph();
        let text = g.write_alist();
        let h = TannerGraph::parse_alist(&text).unwrap();
        assert_eq!(h.write_alist(), text);
        assert_eq!(h.num_vars(), 4);
        assert_eq!(h.num_checks(), 3);
        assert_eq!(h.girth(), Girth::Finite(6));
    }

    #[test]
    fn alist_zero_padding_ignored() {
        let text = "4 3\n2 3\n2 2 2 1\n3 2 2\n1 2 0\n2 3 0\n3 1 0\n1 0 0\n1 3 4\n1 2 0\n2 3 0\n";
        let g = TannerGraph::parse_alist(text).unwrap();
        assert_eq!(g.var_checks(0), &[0, 1]);
        assert_eq!(g.chk_vars(0), &[0, 2, 3]);
    }

    #[test]
    fn alist_inconsistent_transpose_rejected() {
        // Check list 0 omits variable 3.
        let text = "4 3\n2 3\n2 2 2 1\n3 2 2\n1 2\n2 3\n3 1\n1\n1 3\n1 2\n2 3\n";
        assert!(TannerGraph::parse_alist(text).is_err());
    }

    #[test]
    fn alist_degree_mismatch_rejected() {
        let text = "2 1\n2 2\n2 1\n2\n1\n1\n1 2\n";
        // Variable 0 declares degree 2 but lists a single check.
        assert!(TannerGraph::parse_alist(text).is_err());
    }

    #[test]
    fn qc_single_cycle_block() {
        // A single block column gives every check degree 1: three disjoint
        // paths, no cycle at all.
        let g = build_qc(&[vec![0], vec![1]], 3).unwrap();
        assert_eq!(g.num_vars(), 3);
        assert_eq!(g.num_checks(), 6);
        assert_eq!(g.girth(), Girth::Unbounded);
        // Two block columns whose shifts differ by 1 wrap once around the
        // circulant: a single cycle through all six variables and checks.
        let g = build_qc(&[vec![0, 0], vec![0, 1]], 3).unwrap();
        assert_eq!(g.num_vars(), 6);
        assert_eq!(g.num_checks(), 6);
        assert_eq!(g.girth(), Girth::Finite(12));
    }

    #[test]
    fn qc_zero_block_skipped() {
        let g = build_qc(&[vec![0, -1], vec![1, 0]], 2).unwrap();
        assert_eq!(g.num_vars(), 4);
        assert_eq!(g.num_checks(), 4);
        // Column 0 meets both block rows, column 1 only the second.
        assert_eq!(g.var_degree(0), 2);
        assert_eq!(g.var_degree(2), 1);
        // An all -1 column would isolate its variables.
        assert!(build_qc(&[vec![0, -1]], 2).is_err());
    }

    #[test]
    fn qc_exponent_parsing() {
        let rows = parse_qc_exponents("0 1 -1\n2 -1 0\n").unwrap();
        assert_eq!(rows, vec![vec![0, 1, -1], vec![2, -1, 0]]);
        assert!(parse_qc_exponents("0 1\n2\n").is_err());
        assert!(parse_qc_exponents("0 -2\n").is_err());
    }
}
