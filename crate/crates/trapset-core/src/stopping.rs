//! Stopping distance bounds by exhaustive search within certified ranges.
//!
//! A stopping set is a nonempty variable set whose induced subgraph has no
//! check of degree 1; the stopping distance is the size of the smallest
//! one, and it governs iterative decoding over the erasure channel.
//!
//! The lower driver certifies a floor: elementary stopping sets appear as
//! `(a, 0)` classes of the leafless search, non-elementary ones are hunted
//! by adjunction from the leafless ledger. Both phases are exhaustive
//! within the tabulated ranges of the code's degree and girth, so when
//! nothing is found the floor is proven, and when something is found the
//! distance is known exactly.
//!
//! The upper driver looks for any stopping set, small sizes first: it
//! grows the leafless search under a low working cap on unsatisfied
//! checks, and as each size level completes it hunts non-elementary
//! stopping sets reachable from that level by adjunction. The first find
//! caps every later phase below its size, so the run ends as soon as no
//! smaller set can appear. Rounds that come back empty raise the working
//! cap and try again; optionally a find can also trigger tightened
//! rounds that re-search below it at the raised cap.

use std::sync::Arc;
use std::time::Instant;

use crate::bounds::{range_lookup, RangeInfo};
use crate::graph::{Girth, TannerGraph};
use crate::ledger::{ClassLedger, LevelStore};
use crate::nets::{search_nets, NetsOptions};
use crate::profile::SubgraphProfile;
use crate::search::{search_lets, LevelAction, SearchOptions, SearchStats};
use crate::symmetry::SymmetryGroup;
use crate::{Error, Result};

/// A verified stopping set found by a driver.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StoppingWitness {
    /// The variables, ascending.
    pub vars: Vec<u32>,
    /// Number of variables.
    pub a: u32,
    /// Number of odd-degree induced checks.
    pub b: u32,
    /// True when every induced check has degree at most 2.
    pub elementary: bool,
}

impl StoppingWitness {
    fn from_vars(graph: &TannerGraph, vars: Vec<u32>) -> StoppingWitness {
        let p = SubgraphProfile::of(graph, &vars);
        debug_assert!(p.is_stopping(), "witness must be a stopping set");
        StoppingWitness {
            a: p.a,
            b: p.b,
            elementary: p.elementary(),
            vars,
        }
    }
}

/// Instrumentation settings for the lower driver.
#[derive(Debug, Clone, Default)]
pub struct LowerOptions {
    /// Audit every `audit_stride`-th parent; 0 disables auditing.
    pub audit_stride: u64,
    /// Cooperative deadline.
    pub deadline: Option<Instant>,
    /// Automorphism group of the graph, for orbit reduction.
    pub symmetry: Option<Arc<SymmetryGroup>>,
}

/// Result of the lower driver.
#[derive(Debug)]
pub struct LowerOutcome {
    /// Proven bound: no stopping set is smaller than this.
    pub lower_bound: u32,
    /// Largest size through which absence of stopping sets is certified.
    pub certified_floor: u32,
    /// The bound is the exact stopping distance, with a witness attached.
    pub exact: bool,
    /// Smallest stopping set found, if any.
    pub witness: Option<StoppingWitness>,
    /// A deadline cut a phase short, weakening the floor.
    pub truncated: bool,
    /// Counters of the leafless phase.
    pub lets_stats: SearchStats,
    /// Counters of the non-elementary hunt, when it ran.
    pub hunt_stats: Option<SearchStats>,
    /// The tabulated ranges the certification is based on.
    pub range: RangeInfo,
}

/// Certifies a lower bound on the stopping distance, exact when a
/// stopping set is found within the certified range.
///
/// Requires a variable-regular code with tabulated degree and girth. The
/// leafless phase runs to the tabulated exhaustive size, stopping at the
/// first `(a, 0)` class; unless analytic bounds already rule them out,
/// smaller non-elementary stopping sets are then hunted by adjunction.
pub fn stopping_lower(graph: &TannerGraph, opts: &LowerOptions) -> Result<LowerOutcome> {
    let dv = graph.regularity().uniform().ok_or_else(|| {
        Error::Domain("stopping distance certification requires a variable-regular code".into())
    })?;
    let girth = match graph.girth() {
        Girth::Finite(g) => g,
        Girth::Unbounded => return Err(Error::Domain("acyclic graph has no stopping sets".into())),
    };
    let range = range_lookup(dv, girth)?;
    let search_opts = SearchOptions {
        a_max: range.ness_a_max,
        bprime_max: range.bprime_max,
        audit_stride: opts.audit_stride,
        deadline: opts.deadline,
        symmetry: opts.symmetry.clone(),
    };
    let mut found: Option<(u32, Vec<u32>)> = None;
    let (lets, lets_stats) = search_lets(graph, &search_opts, |a, level| {
        for i in 0..level.len() {
            if level.b(i) == 0 {
                let vars = level.row(i).iter().map(|&v| v as u32).collect();
                found = Some((a, vars));
                return LevelAction::Stop;
            }
        }
        LevelAction::Continue
    })?;
    let ess_reach = match &found {
        Some((s, _)) => s - 1,
        None => lets_stats.last_level,
    };
    let s_ess = found.as_ref().map(|(s, _)| *s);
    // Where elementary knowledge ends, non-elementary hunting begins,
    // unless the analytic floor on non-elementary stopping sets already
    // covers every size at stake.
    let skip_hunt = s_ess.is_some_and(|s| s <= range.l_ss2);
    let mut hunt_stats = None;
    let mut ness_reach = ess_reach;
    let mut witness = found.map(|(_, vars)| StoppingWitness::from_vars(graph, vars));
    if !skip_hunt {
        let hunt_a_max = match s_ess {
            Some(s) => s - 1,
            None => ess_reach.min(range.ness_a_max),
        };
        if hunt_a_max >= girth / 2 {
            // Adjunction strictly grows a set, so seeds at the hunt cap
            // itself cannot lead anywhere new.
            let mut seeds = lets.clone();
            for a in seeds
                .sizes()
                .filter(|&a| a >= hunt_a_max)
                .collect::<Vec<_>>()
            {
                seeds.drop_level(a);
            }
            let mut nopts = NetsOptions::new(hunt_a_max, 4, range.bprime_max);
            nopts.audit_stride = opts.audit_stride;
            nopts.deadline = opts.deadline;
            nopts.stop_on_ness = true;
            nopts.family_prune = true;
            nopts.symmetry = opts.symmetry.clone();
            let outcome = search_nets(graph, &seeds, &nopts)?;
            ness_reach = match &outcome.ness {
                Some(hit) => hit.a - 1,
                None if outcome.stats.truncated => outcome.stats.last_level,
                None => hunt_a_max,
            };
            if let Some(hit) = outcome.ness {
                let smaller = witness.as_ref().map_or(true, |w| hit.a < w.a);
                if smaller {
                    witness = Some(StoppingWitness::from_vars(graph, hit.vars));
                }
            }
            hunt_stats = Some(outcome.stats);
        }
    }
    let truncated = lets_stats.truncated || hunt_stats.as_ref().is_some_and(|s| s.truncated);
    let certified_floor = ess_reach.min(ness_reach);
    let lower_bound = certified_floor + 1;
    let exact = witness.as_ref().is_some_and(|w| w.a == lower_bound);
    Ok(LowerOutcome {
        lower_bound,
        certified_floor,
        exact,
        witness,
        truncated,
        lets_stats,
        hunt_stats,
        range,
    })
}

/// Range and escalation settings for the upper driver.
#[derive(Debug, Clone, Default)]
pub struct UpperOptions {
    /// Initial size cap; defaults to three times the tabulated range for
    /// variable-regular codes and is required otherwise.
    pub a0: Option<u32>,
    /// Initial working cap on unsatisfied checks; defaults to
    /// `(girth / 2) * (dv - 2)` for variable-regular codes and 4
    /// otherwise.
    pub bprime0: Option<u32>,
    /// Extra rounds allowed beyond the first; 0 picks the default of 8.
    pub max_rounds: u32,
    /// After a find, keep searching below it at a raised working cap
    /// until a round comes back empty, instead of reporting the first
    /// find as the bound.
    pub tighten: bool,
    /// Audit every `audit_stride`-th parent; 0 disables auditing.
    pub audit_stride: u64,
    /// Cooperative deadline.
    pub deadline: Option<Instant>,
    /// Automorphism group of the graph, for orbit reduction.
    pub symmetry: Option<Arc<SymmetryGroup>>,
}

/// Result of the upper driver.
#[derive(Debug)]
pub struct UpperOutcome {
    /// Size of the smallest stopping set found; None when every round
    /// came back empty.
    pub upper_bound: Option<u32>,
    /// The stopping set certifying the bound.
    pub witness: Option<StoppingWitness>,
    /// Search rounds executed.
    pub rounds: u32,
    /// A deadline cut the final round short.
    pub truncated: bool,
    /// Working cap of the last completed round.
    pub final_bprime: u32,
    /// Size cap of the last completed round.
    pub final_a_max: u32,
    /// Aggregated counters over all rounds.
    pub stats: SearchStats,
}

/// Searches for small stopping sets and returns the best one found.
///
/// Each round interleaves the leafless climb with non-elementary hunts:
/// as every size level completes it is scanned for `(a, 0)` sets and
/// used as the seed of an adjunction hunt, and each find lowers the size
/// cap below it, so the climb stops as soon as nothing smaller can
/// appear. A round that comes back empty raises the working cap on
/// unsatisfied checks and tries again; once a bound is found the search
/// ends, or, with the tightening flag set, keeps re-searching below the
/// bound at raised caps until a round finds nothing.
pub fn stopping_upper(graph: &TannerGraph, opts: &UpperOptions) -> Result<UpperOutcome> {
    let girth = match graph.girth() {
        Girth::Finite(g) => g,
        Girth::Unbounded => return Err(Error::Domain("acyclic graph has no stopping sets".into())),
    };
    let uniform = graph.regularity().uniform();
    let a0 = match (opts.a0, uniform) {
        (Some(a0), _) => a0,
        (None, Some(dv)) => 3 * range_lookup(dv, girth)?.l_ss3,
        (None, None) => {
            return Err(Error::Domain(
                "irregular codes need an explicit initial size cap".into(),
            ))
        }
    };
    if a0 < girth / 2 {
        return Err(Error::Range(format!(
            "size cap {a0} below the smallest cycle size {}",
            girth / 2
        )));
    }
    let mut bprime = match (opts.bprime0, uniform) {
        (Some(b0), _) => b0,
        (None, Some(dv)) => (girth / 2) * (dv - 2),
        (None, None) => 4,
    };
    let max_rounds = if opts.max_rounds == 0 {
        8
    } else {
        opts.max_rounds
    };
    let mut outcome = UpperOutcome {
        upper_bound: None,
        witness: None,
        rounds: 0,
        truncated: false,
        final_bprime: bprime,
        final_a_max: a0,
        stats: SearchStats::default(),
    };
    let mut a_max = a0;
    while outcome.rounds < max_rounds {
        outcome.rounds += 1;
        outcome.final_bprime = bprime;
        outcome.final_a_max = a_max;
        let round = upper_round(graph, a_max, bprime, opts)?;
        absorb_stats(&mut outcome.stats, &round.stats);
        if round.truncated {
            outcome.truncated = true;
            break;
        }
        match round.witness {
            Some(w) => {
                let s = w.a;
                if outcome.upper_bound.map_or(true, |u| s < u) {
                    outcome.upper_bound = Some(s);
                    outcome.witness = Some(w);
                }
                if !opts.tighten || s <= girth / 2 {
                    // Either the first find is the answer, or nothing can
                    // be smaller than the shortest cycle.
                    break;
                }
                a_max = s - 1;
                bprime += 1;
            }
            None => {
                if outcome.upper_bound.is_some() {
                    // Tightening came back empty: the bound stands.
                    break;
                }
                bprime += 1;
            }
        }
    }
    Ok(outcome)
}

struct UpperRound {
    witness: Option<StoppingWitness>,
    truncated: bool,
    stats: SearchStats,
}

/// One climb of the leafless search at fixed caps, hunting non-elementary
/// stopping sets from every completed level.
///
/// The climb meets set sizes in ascending order, so the first `(a, 0)`
/// row is the smallest elementary stopping set within the caps, and every
/// hunt find lowers the bar for all later levels. The hunt seeds from one
/// level at a time, which spreads the full-ledger hunt over the climb and
/// lets the first find end the round early.
fn upper_round(
    graph: &TannerGraph,
    a_max: u32,
    bprime: u32,
    opts: &UpperOptions,
) -> Result<UpperRound> {
    let search_opts = SearchOptions {
        a_max,
        bprime_max: bprime,
        audit_stride: opts.audit_stride,
        deadline: opts.deadline,
        symmetry: opts.symmetry.clone(),
    };
    let mut best: Option<StoppingWitness> = None;
    // Largest size still worth finding; shrinks below each find.
    let mut cap = a_max;
    let mut hunt_stats = SearchStats::default();
    let mut hunt_err: Option<Error> = None;
    let (_, lets_stats) = search_lets(graph, &search_opts, |a, level| {
        for i in 0..level.len() {
            if level.b(i) == 0 {
                if a <= cap {
                    let vars = level.row(i).iter().map(|&v| v as u32).collect();
                    best = Some(StoppingWitness::from_vars(graph, vars));
                }
                // No later level or hunt can beat an elementary find.
                return LevelAction::Stop;
            }
        }
        if a + 1 > cap {
            return LevelAction::Stop;
        }
        let mut seeds = ClassLedger::new();
        seeds.set_level(a, level.clone());
        let mut nopts = NetsOptions::new(cap, bprime, bprime);
        nopts.audit_stride = opts.audit_stride;
        nopts.deadline = opts.deadline;
        nopts.stop_on_ness = true;
        nopts.symmetry = opts.symmetry.clone();
        match search_nets(graph, &seeds, &nopts) {
            Ok(out) => {
                absorb_stats(&mut hunt_stats, &out.stats);
                if let Some(hit) = out.ness {
                    cap = hit.a - 1;
                    best = Some(StoppingWitness::from_vars(graph, hit.vars));
                }
                if a + 1 > cap {
                    LevelAction::Stop
                } else {
                    LevelAction::Continue
                }
            }
            Err(e) => {
                hunt_err = Some(e);
                LevelAction::Stop
            }
        }
    })?;
    if let Some(e) = hunt_err {
        return Err(e);
    }
    let mut stats = lets_stats;
    absorb_stats(&mut stats, &hunt_stats);
    Ok(UpperRound {
        witness: best,
        truncated: stats.truncated,
        stats,
    })
}

fn absorb_stats(into: &mut SearchStats, from: &SearchStats) {
    into.parents_expanded += from.parents_expanded;
    into.children_emitted += from.children_emitted;
    into.audited += from.audited;
    into.audit_violations += from.audit_violations;
    into.last_level = into.last_level.max(from.last_level);
    into.truncated = into.truncated || from.truncated;
    into.stopped = into.stopped || from.stopped;
}

/// Range settings for the exhaustive stopping set listing.
#[derive(Debug, Clone)]
pub struct SsOptions {
    /// Largest set size to list.
    pub a_max: u32,
    /// Working cap on unsatisfied checks for the underlying searches.
    pub bprime_max: u32,
    /// Report cap for non-elementary stopping sets.
    pub ness_b_max: u32,
    /// Audit every `audit_stride`-th parent; 0 disables auditing.
    pub audit_stride: u64,
    /// Cooperative deadline.
    pub deadline: Option<Instant>,
    /// Automorphism group of the graph, for orbit reduction.
    pub symmetry: Option<Arc<SymmetryGroup>>,
}

/// Result of the exhaustive stopping set listing.
#[derive(Debug)]
pub struct SsOutcome {
    /// All stopping sets found, by size.
    pub sets: ClassLedger,
    /// A deadline cut a phase short.
    pub truncated: bool,
    /// Aggregated counters.
    pub stats: SearchStats,
}

/// Lists stopping sets up to `opts.a_max`: elementary ones from the
/// leafless search, non-elementary ones from the adjunction search with
/// `b` at most `opts.ness_b_max`.
///
/// Within the tabulated ranges of a variable-regular code this listing is
/// exhaustive for elementary sets and for non-elementary ones in the six
/// smallest degree-pattern families.
pub fn search_stopping_sets(graph: &TannerGraph, opts: &SsOptions) -> Result<SsOutcome> {
    let search_opts = SearchOptions {
        a_max: opts.a_max,
        bprime_max: opts.bprime_max,
        audit_stride: opts.audit_stride,
        deadline: opts.deadline,
        symmetry: opts.symmetry.clone(),
    };
    let (lets, lets_stats) = search_lets(graph, &search_opts, |_, _| LevelAction::Continue)?;
    let mut nopts = NetsOptions::new(opts.a_max, opts.ness_b_max, opts.bprime_max);
    nopts.audit_stride = opts.audit_stride;
    nopts.deadline = opts.deadline;
    nopts.symmetry = opts.symmetry.clone();
    let nets_outcome = search_nets(graph, &lets, &nopts)?;
    let mut stats = lets_stats;
    absorb_stats(&mut stats, &nets_outcome.stats);
    let mut sets = ClassLedger::new();
    let mut scratch: Vec<u32> = Vec::new();
    for a in 1..=opts.a_max {
        let mut rows: Vec<u16> = Vec::new();
        let mut bs: Vec<u16> = Vec::new();
        if let Some(level) = lets.level(a) {
            for (row, b) in level.iter() {
                // An elementary set is stopping exactly when b = 0.
                if b == 0 {
                    rows.extend_from_slice(row);
                    bs.push(0);
                }
            }
        }
        if let Some(level) = nets_outcome.reported.level(a) {
            for (row, b) in level.iter() {
                scratch.clear();
                scratch.extend(row.iter().map(|&v| v as u32));
                if SubgraphProfile::of(graph, &scratch).is_stopping() {
                    rows.extend_from_slice(row);
                    bs.push(b as u16);
                }
            }
        }
        sets.set_level(a, LevelStore::from_raw(a as usize, rows, bs));
    }
    Ok(SsOutcome {
        sets,
        truncated: stats.truncated,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{peel_erasures, verify_stopping_set};

    /// An 8-cycle with both private sides covered: variables 0-3 on the
    /// cycle, 4 and 5 covering the four private checks. The whole graph
    /// is a non-elementary stopping set of size 6; nothing smaller stops.
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
    fn upper_finds_the_covered_cycle() {
        let g = covered_cycle();
        let opts = UpperOptions {
            a0: Some(6),
            bprime0: Some(4),
            ..Default::default()
        };
        let outcome = stopping_upper(&g, &opts).unwrap();
        assert_eq!(outcome.upper_bound, Some(6));
        let w = outcome.witness.unwrap();
        assert_eq!(w.vars, vec![0, 1, 2, 3, 4, 5]);
        assert!(!w.elementary);
        assert!(verify_stopping_set(&g, &w.vars));
        assert_eq!(peel_erasures(&g, &w.vars), w.vars);
    }

    /// Two hexagons sharing the degree-4 variable 2. No proper subset
    /// closes every check, so the only stopping set is the whole graph,
    /// and it is elementary: all six checks end up with degree 2.
    fn hexagon_pair() -> TannerGraph {
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
    fn upper_finds_an_elementary_stopping_set() {
        let g = hexagon_pair();
        let opts = UpperOptions {
            a0: Some(5),
            bprime0: Some(2),
            ..Default::default()
        };
        let outcome = stopping_upper(&g, &opts).unwrap();
        assert_eq!(outcome.upper_bound, Some(5));
        let w = outcome.witness.unwrap();
        assert_eq!(w.vars, vec![0, 1, 2, 3, 4]);
        assert!(w.elementary);
        assert!(verify_stopping_set(&g, &w.vars));
    }

    #[test]
    fn listing_collects_both_kinds() {
        let g = covered_cycle();
        let opts = SsOptions {
            a_max: 6,
            bprime_max: 9,
            ness_b_max: 4,
            audit_stride: 0,
            deadline: None,
            symmetry: None,
        };
        let outcome = search_stopping_sets(&g, &opts).unwrap();
        // The covered cycle is the only stopping set of this graph.
        assert_eq!(outcome.sets.total(), 1);
        assert_eq!(outcome.sets.witness(6, 1), Some(vec![0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn lower_requires_a_regular_code() {
        let g = covered_cycle();
        let err = stopping_lower(&g, &LowerOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn upper_needs_a_cap_for_irregular_codes() {
        let g = covered_cycle();
        let err = stopping_upper(&g, &UpperOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
