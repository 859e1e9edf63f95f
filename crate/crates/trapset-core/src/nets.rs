//! Non-elementary trapping set search by repeated adjunction.
//!
//! Non-elementary sets, those whose induced subgraph has a check of degree
//! 3 or more, arise from elementary ones: starting from a ledger of
//! elementary seeds, each level adjoins one variable with at least two
//! edges into the induced neighborhood, without restricting which checks
//! it lands on, or with a single edge into a check that already has
//! induced degree 3 or more. Children above the working cap are
//! discarded; from the survivors, every set that is non-elementary and
//! within the report cap is recorded.
//!
//! The same walk doubles as a hunt for non-elementary stopping sets: with
//! the stop flag raised, the first stored row whose induced subgraph has
//! no degree-1 check ends the search and is returned as a witness. Levels
//! are sorted before scanning, so the witness is the lexicographically
//! smallest of its size regardless of thread count.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use crate::graph::TannerGraph;
use crate::ledger::{ClassLedger, LevelStore};
use crate::profile::SubgraphProfile;
use crate::search::{
    check_symmetry, expand_level, finish_level, ExpandMode, SearchOptions, SearchStats,
};
use crate::symmetry::SymmetryGroup;
use crate::{Error, Result};

/// Range and instrumentation settings for the non-elementary search.
#[derive(Debug, Clone)]
pub struct NetsOptions {
    /// Largest set size to enumerate.
    pub a_max: u32,
    /// Report cap: non-elementary sets with `b` above it are traversed but
    /// not recorded.
    pub b_max: u32,
    /// Working cap on unsatisfied checks during expansion.
    pub bprime_max: u32,
    /// Audit every `audit_stride`-th parent; 0 disables auditing.
    pub audit_stride: u64,
    /// Cooperative deadline.
    pub deadline: Option<Instant>,
    /// End the search at the first non-elementary stopping set within the
    /// report cap.
    pub stop_on_ness: bool,
    /// Expand only sets whose degree spectrum can still grow into a named
    /// family. Induced check degrees never drop under adjunction, so this
    /// loses no set of a named family; sets outside them may be missed.
    pub family_prune: bool,
    /// Automorphism group of the graph; when set, the search stores one
    /// orbit representative per set.
    pub symmetry: Option<Arc<SymmetryGroup>>,
}

impl NetsOptions {
    /// Options for a search up to `a_max`, reporting at `b_max`, working
    /// at `bprime_max`, with auditing disabled, no deadline, and no
    /// pruning.
    pub fn new(a_max: u32, b_max: u32, bprime_max: u32) -> NetsOptions {
        NetsOptions {
            a_max,
            b_max,
            bprime_max,
            audit_stride: 0,
            deadline: None,
            stop_on_ness: false,
            family_prune: false,
            symmetry: None,
        }
    }
}

/// A non-elementary stopping set found during the search.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NessHit {
    /// Number of variables.
    pub a: u32,
    /// Unsatisfied checks, all of degree 3 or more.
    pub b: u32,
    /// The variables, ascending.
    pub vars: Vec<u32>,
}

/// Result of a non-elementary search.
#[derive(Debug)]
pub struct NetsOutcome {
    /// Non-elementary sets within the report cap, by size.
    pub reported: ClassLedger,
    /// Expansion counters.
    pub stats: SearchStats,
    /// First non-elementary stopping set, when the hunt was armed.
    pub ness: Option<NessHit>,
}

/// Enumerates non-elementary trapping sets reachable from `seeds` by
/// adjunction, recording those with `b` at most `opts.b_max`.
///
/// Seeds are elementary ledgers, typically the union of the leafless and
/// with-leaf searches over the same range; their sizes must not exceed
/// `opts.a_max` and their unsatisfied counts must fit the working cap.
pub fn search_nets(
    graph: &TannerGraph,
    seeds: &ClassLedger,
    opts: &NetsOptions,
) -> Result<NetsOutcome> {
    graph.require_girth_above_4()?;
    let sym = opts.symmetry.as_deref();
    check_symmetry(graph, sym)?;
    if graph.num_vars() > u16::MAX as usize || opts.bprime_max > u16::MAX as u32 {
        return Err(Error::Range("set rows and caps are stored as u16".into()));
    }
    let mut pending: BTreeMap<u32, (Vec<u16>, Vec<u16>)> = BTreeMap::new();
    for a in seeds.sizes() {
        if a > opts.a_max {
            return Err(Error::Range(format!(
                "seed size {a} exceeds the search range {}",
                opts.a_max
            )));
        }
        let level = seeds.level(a).expect("listed size is present");
        if let Some(over) = level.iter().map(|(_, b)| b).find(|&b| b > opts.bprime_max) {
            return Err(Error::Range(format!(
                "seed with b = {over} exceeds the working cap {}",
                opts.bprime_max
            )));
        }
        let (rows, bs) = pending.entry(a).or_default();
        for (row, b) in level.iter() {
            rows.extend_from_slice(row);
            bs.push(b as u16);
        }
    }
    let search_opts = SearchOptions {
        a_max: opts.a_max,
        bprime_max: opts.bprime_max,
        audit_stride: opts.audit_stride,
        deadline: opts.deadline,
        symmetry: opts.symmetry.clone(),
    };
    let mut outcome = NetsOutcome {
        reported: ClassLedger::new(),
        stats: SearchStats::default(),
        ness: None,
    };
    let mut scratch: Vec<u32> = Vec::new();
    while let Some((&a, _)) = pending.iter().next() {
        if a > opts.a_max {
            break;
        }
        if search_opts.expired() {
            outcome.stats.truncated = true;
            break;
        }
        let (rows, bs) = pending.remove(&a).expect("peeked key is present");
        let level = finish_level(a as usize, rows, bs, sym);
        // Record the non-elementary rows of this level, watching for a
        // stopping set if the hunt is armed, and select which rows are
        // worth expanding further.
        let prune = opts.family_prune && a < opts.a_max;
        let mut rep_rows: Vec<u16> = Vec::new();
        let mut rep_bs: Vec<u16> = Vec::new();
        let mut keep_rows: Vec<u16> = Vec::new();
        let mut keep_bs: Vec<u16> = Vec::new();
        for (row, b) in level.iter() {
            if b > opts.b_max && !prune {
                continue;
            }
            scratch.clear();
            scratch.extend(row.iter().map(|&v| v as u32));
            let p = SubgraphProfile::of(graph, &scratch);
            debug_assert_eq!(p.b, b, "stored b disagrees with the induced subgraph");
            if prune && p.family_reachable() {
                keep_rows.extend_from_slice(row);
                keep_bs.push(b as u16);
            }
            if b > opts.b_max || !p.is_nets() {
                continue;
            }
            rep_rows.extend_from_slice(row);
            rep_bs.push(b as u16);
            if opts.stop_on_ness && outcome.ness.is_none() && p.is_ness() {
                outcome.ness = Some(NessHit {
                    a,
                    b,
                    vars: scratch.clone(),
                });
            }
        }
        outcome
            .reported
            .set_level(a, LevelStore::from_raw(a as usize, rep_rows, rep_bs));
        outcome.stats.last_level = a;
        if outcome.ness.is_some() {
            outcome.stats.stopped = true;
            break;
        }
        let expand_src = if prune {
            LevelStore::from_raw(a as usize, keep_rows, keep_bs)
        } else {
            level
        };
        if a < opts.a_max
            && !expand_level(
                graph,
                &expand_src,
                &ExpandMode::Adjoin,
                &search_opts,
                &mut pending,
                &mut outcome.stats,
            )
        {
            outcome.stats.truncated = true;
            break;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{search_etsl, search_lets, LevelAction};

    /// A hexagon with one extra variable riding two of its checks: the
    /// 4-variable set is non-elementary with a degree-3 check.
    fn hexagon_with_rider() -> TannerGraph {
        TannerGraph::from_edges(
            4,
            5,
            &[
                (0, 0),
                (0, 1),
                (1, 1),
                (1, 2),
                (2, 2),
                (2, 0),
                (3, 0),
                (3, 3),
                (3, 4),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rider_found_through_with_leaf_seed() {
        let g = hexagon_with_rider();
        let opts = SearchOptions::new(4, 9);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        assert_eq!(lets.count(3, 0), 1);
        let (etsl, _) = search_etsl(&g, &lets, &opts).unwrap();
        let mut seeds = ClassLedger::new();
        seeds.merge(&lets);
        seeds.merge(&etsl);
        let outcome = search_nets(&g, &seeds, &NetsOptions::new(4, 9, 9)).unwrap();
        // {0, 1, 2, 3}: check 0 has degree 3, checks 3 and 4 degree 1.
        // Variable 3 has a single edge into the hexagon, so the set is
        // reached by adjoining variable 0 onto the with-leaf set {1, 2, 3}.
        assert_eq!(outcome.reported.count(4, 3), 1);
        assert_eq!(outcome.reported.witness(4, 3), Some(vec![0, 1, 2, 3]));
        assert!(outcome.ness.is_none());
    }

    /// The cube with a rider: variable 8 sits on three pairwise disjoint
    /// cube edges, so it shares at most one check with any vertex, plus a
    /// private fresh check. Sets joining it to both endpoints of a ridden
    /// edge get a degree-3 check.
    fn cube_with_rider() -> TannerGraph {
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
        edges.extend([(8, 0), (8, 5), (8, 11), (8, 12)]);
        TannerGraph::from_edges(9, 13, &edges).unwrap()
    }

    #[test]
    fn nets_on_riding_cube_are_sound_and_reach_known_sets() {
        let g = cube_with_rider();
        // Thirteen checks bound b by 13, so these caps are vacuous.
        let opts = SearchOptions::new(9, 13);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        let (etsl, _) = search_etsl(&g, &lets, &opts).unwrap();
        let mut seeds = ClassLedger::new();
        seeds.merge(&lets);
        seeds.merge(&etsl);
        let outcome = search_nets(&g, &seeds, &NetsOptions::new(9, 13, 13)).unwrap();
        // Every reported set must be a connected non-elementary set of the
        // brute-force list; adjunction needs two edges into the subgraph,
        // so sets like {0, 1, 8} stay out of reach and equality with the
        // full list is not on offer here.
        let mut all_nets: std::collections::BTreeSet<Vec<u16>> = Default::default();
        for mask in 1u32..512 {
            let vars: Vec<u32> = (0..9).filter(|&v| mask >> v & 1 == 1).collect();
            if connected_in(&g, &vars) && SubgraphProfile::of(&g, &vars).is_nets() {
                all_nets.insert(vars.iter().map(|&v| v as u16).collect());
            }
        }
        let mut reported = 0u64;
        for a in outcome.reported.sizes().collect::<Vec<_>>() {
            let level = outcome.reported.level(a).unwrap();
            for (row, _) in level.iter() {
                assert!(all_nets.contains(row), "spurious report {row:?}");
                reported += 1;
            }
        }
        assert!(reported > 0);
        // A face of the cube plus the rider on two of its edge checks.
        assert_eq!(outcome.reported.witness(5, 8), Some(vec![0, 1, 2, 3, 8]));
        // The full graph: one adjunction on top of the cube itself.
        assert_eq!(
            outcome.reported.witness(9, 4),
            Some((0..9).collect::<Vec<u32>>())
        );
        // The rider's private check blocks every stopping set through it,
        // and the cube alone is everywhere elementary.
        let mut nopts = NetsOptions::new(9, 13, 13);
        nopts.stop_on_ness = true;
        let hunt = search_nets(&g, &seeds, &nopts).unwrap();
        assert!(hunt.ness.is_none());
    }

    /// An 8-cycle on variables 0-3 with private checks 4-7, variable 4
    /// covering privates 4 and 5, and variable 5 covering privates 6, 7
    /// and riding check 4. All six variables form a stopping set whose
    /// check 4 has degree 3.
    fn covered_cycle() -> TannerGraph {
        TannerGraph::from_edges(
            6,
            8,
            &[
                (0, 0),
                (0, 3),
                (0, 4),
                (1, 0),
                (1, 1),
                (1, 5),
                (2, 1),
                (2, 2),
                (2, 6),
                (3, 2),
                (3, 3),
                (3, 7),
                (4, 4),
                (4, 5),
                (5, 4),
                (5, 6),
                (5, 7),
            ],
        )
        .unwrap()
    }

    #[test]
    fn ness_hunt_stops_at_first_witness() {
        let g = covered_cycle();
        let opts = SearchOptions::new(6, 9);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        assert!(lets.count(4, 4) >= 1);
        let mut nopts = NetsOptions::new(6, 4, 9);
        nopts.stop_on_ness = true;
        let outcome = search_nets(&g, &lets, &nopts).unwrap();
        let hit = outcome.ness.expect("the covered cycle is a stopping set");
        assert_eq!((hit.a, hit.b), (6, 1));
        assert_eq!(hit.vars, vec![0, 1, 2, 3, 4, 5]);
        let p = SubgraphProfile::of(&g, &hit.vars);
        assert!(p.is_ness());
        assert!(outcome.stats.stopped);
        // No smaller non-elementary stopping set exists by brute force.
        for mask in 1u32..64 {
            let vars: Vec<u32> = (0..6).filter(|&v| mask >> v & 1 == 1).collect();
            if (vars.len() as u32) < hit.a && connected_in(&g, &vars) {
                assert!(!SubgraphProfile::of(&g, &vars).is_ness());
            }
        }
    }

    #[test]
    fn family_pruning_keeps_named_family_sets() {
        let g = cube_with_rider();
        let opts = SearchOptions::new(9, 13);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        let (etsl, _) = search_etsl(&g, &lets, &opts).unwrap();
        let mut seeds = ClassLedger::new();
        seeds.merge(&lets);
        seeds.merge(&etsl);
        let full = search_nets(&g, &seeds, &NetsOptions::new(9, 13, 13)).unwrap();
        let mut popts = NetsOptions::new(9, 13, 13);
        popts.family_prune = true;
        let pruned = search_nets(&g, &seeds, &popts).unwrap();
        // No check of this graph can reach induced degree 4, so every set
        // stays within family reach and pruning must change nothing.
        assert_eq!(full.reported.counts(), pruned.reported.counts());
    }

    #[test]
    fn oversized_seed_rejected() {
        let g = hexagon_with_rider();
        let opts = SearchOptions::new(4, 9);
        let (lets, _) = search_lets(&g, &opts, |_, _| LevelAction::Continue).unwrap();
        let err = search_nets(&g, &lets, &NetsOptions::new(2, 9, 9)).unwrap_err();
        assert!(matches!(err, Error::Range(_)));
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
