//! Ready-made code constructions for demos, benchmarks, and tests.
//!
//! The Tanner (155, 64) code is the standard small benchmark for trapping
//! set searches: large enough to have interesting structure, small enough
//! that exhaustive desk-scale runs finish in seconds. The random
//! constructions produce 4-cycle-free variable-regular codes from a seed,
//! deterministically, for property tests against the brute-force oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_qc, TannerGraph};
use crate::symmetry::SymmetryGroup;
use crate::{Error, Result};

/// Builds the (155, 64) quasi-cyclic code of Tanner: a 3 by 5 array of
/// 31 by 31 circulants with exponents `5^i * 2^j mod 31`.
///
/// The row multiplier 5 has order 3 and the column multiplier 2 has
/// order 5 modulo 31, so all fifteen circulants are distinct and the
/// resulting graph is (3, 5)-regular with girth 8.
pub fn tanner_155() -> TannerGraph {
    let mut exponents = Vec::with_capacity(3);
    let mut row_factor: i64 = 1;
    for _ in 0..3 {
        let mut row = Vec::with_capacity(5);
        let mut e = row_factor;
        for _ in 0..5 {
            row.push(e);
            e = e * 2 % 31;
        }
        exponents.push(row);
        row_factor = row_factor * 5 % 31;
    }
    build_qc(&exponents, 31).expect("the built-in exponent matrix is valid")
}

/// The automorphism group of the Tanner (155, 64) graph induced by its
/// algebraic construction, of order 465.
///
/// Variable `j * 31 + r` sits at position `r` of circulant column `j`.
/// Three maps generate the group: the circulant shift `r -> r + 1`, the
/// column rotation `(j, r) -> (j + 1, 2r)`, which is consistent because
/// 2 has order 5 modulo 31, and the row rotation `r -> 5r`, which
/// permutes the three check rows because 5 has order 3 modulo 31.
pub fn tanner_155_symmetry() -> SymmetryGroup {
    let split = |v: u32| (v / 31, v % 31);
    let shift: Vec<u32> = (0..155)
        .map(|v| {
            let (j, r) = split(v);
            j * 31 + (r + 1) % 31
        })
        .collect();
    let col: Vec<u32> = (0..155)
        .map(|v| {
            let (j, r) = split(v);
            (j + 1) % 5 * 31 + 2 * r % 31
        })
        .collect();
    let row: Vec<u32> = (0..155)
        .map(|v| {
            let (j, r) = split(v);
            j * 31 + 5 * r % 31
        })
        .collect();
    SymmetryGroup::from_generators(155, &[shift, col, row])
        .expect("the built-in generators are valid")
}

/// The cyclic shift symmetry every quasi-cyclic code carries: variables
/// advance one position within each of the `cols` circulant columns of
/// size `p`. The group has order `p`.
pub fn qc_shift_symmetry(cols: usize, p: usize) -> Result<SymmetryGroup> {
    if cols == 0 || p == 0 {
        return Err(Error::Qc(
            "circulant layout needs positive dimensions".into(),
        ));
    }
    let n = cols * p;
    let shift: Vec<u32> = (0..n as u32)
        .map(|v| {
            let (j, r) = (v / p as u32, v % p as u32);
            j * p as u32 + (r + 1) % p as u32
        })
        .collect();
    SymmetryGroup::from_generators(n, &[shift])
}

/// Generates a variable-regular code with `n` variables of degree `dv`
/// over `m` checks, free of length-4 cycles, deterministically from
/// `seed`.
///
/// Edges are placed one variable at a time onto the least-loaded check
/// that does not close a 4-cycle, with ties broken by the seeded
/// generator. Dense parameter choices can paint a variable into a corner
/// where every check would close a 4-cycle; the builder then restarts
/// with a derived seed, up to 64 attempts, before giving up. Note that
/// two checks can share at most one variable, so parameters violating
/// `n * dv * (dv - 1) <= m * (m - 1)` admit no 4-cycle-free code at all.
pub fn random_regular(n: usize, m: usize, dv: u32, seed: u64) -> Result<TannerGraph> {
    if n == 0 || m == 0 || dv == 0 {
        return Err(Error::Graph(
            "random code needs positive dimensions and degree".into(),
        ));
    }
    if (dv as usize) > m {
        return Err(Error::Graph(format!(
            "variable degree {dv} exceeds the number of checks {m}"
        )));
    }
    for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        if let Some(edges) = place_edges(n, m, dv, &mut rng) {
            return TannerGraph::from_edges(n, m, &edges);
        }
    }
    Err(Error::Graph(format!(
        "no 4-cycle-free placement found for n={n}, m={m}, dv={dv}"
    )))
}

/// One construction attempt; None when some variable has no check left
/// that avoids a 4-cycle.
fn place_edges(n: usize, m: usize, dv: u32, rng: &mut ChaCha8Rng) -> Option<Vec<(u32, u32)>> {
    let mut chk_deg = vec![0u32; m];
    let mut var_adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut chk_adj: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut stamp = vec![0u32; m];
    let mut round = 0u32;
    let mut edges = Vec::with_capacity(n * dv as usize);
    let mut best: Vec<u32> = Vec::new();
    for v in 0..n {
        for _ in 0..dv {
            round += 1;
            // A new edge (v, c) closes a 4-cycle exactly when c already
            // reaches v through some other variable, so both the checks
            // of v and every check two steps away are off limits.
            for &c in &var_adj[v] {
                stamp[c as usize] = round;
                for &u in &chk_adj[c as usize] {
                    for &c2 in &var_adj[u as usize] {
                        stamp[c2 as usize] = round;
                    }
                }
            }
            let mut best_deg = u32::MAX;
            best.clear();
            for c in 0..m {
                if stamp[c] == round {
                    continue;
                }
                match chk_deg[c].cmp(&best_deg) {
                    std::cmp::Ordering::Less => {
                        best_deg = chk_deg[c];
                        best.clear();
                        best.push(c as u32);
                    }
                    std::cmp::Ordering::Equal => best.push(c as u32),
                    std::cmp::Ordering::Greater => {}
                }
            }
            if best.is_empty() {
                return None;
            }
            let c = best[rng.gen_range(0..best.len())];
            edges.push((v as u32, c));
            chk_deg[c as usize] += 1;
            var_adj[v].push(c);
            chk_adj[c as usize].push(v as u32);
        }
    }
    Some(edges)
}
