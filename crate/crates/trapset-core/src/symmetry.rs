//! Automorphism orbit reduction for the set searches.
//!
//! A permutation of the variables that maps the Tanner graph onto itself
//! sends every variable set to one with the same induced structure, so
//! trapping and stopping sets come in orbits of equivalent copies. When
//! such a group is known, the searches can store one canonical
//! representative per orbit, the lexicographically smallest image of the
//! sorted set, and expansion still reaches every orbit because the moves
//! commute with the permutations. Time and memory shrink by a factor
//! close to the group order; true class counts are recovered by weighing
//! each representative with its orbit length.
//!
//! Quasi-cyclic codes always admit the blockwise index shift; particular
//! constructions add multiplier maps on top. The group is built from any
//! set of generator permutations and closed under composition.

use std::collections::{HashMap, VecDeque};

use crate::graph::TannerGraph;
use crate::{Error, Result};

/// A group of variable permutations under which searches store one
/// representative per orbit.
#[derive(Clone)]
pub struct SymmetryGroup {
    n: usize,
    /// Every group element as a full permutation, laid out contiguously
    /// in lexicographic order.
    perms: Vec<u16>,
}

impl std::fmt::Debug for SymmetryGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetryGroup")
            .field("n_vars", &self.n)
            .field("order", &self.order())
            .finish()
    }
}

/// Largest group order the closure is allowed to reach.
const MAX_ORDER: usize = 1 << 16;

impl SymmetryGroup {
    /// Closes `generators` under composition into a full permutation
    /// group on `n_vars` variables.
    ///
    /// Each generator must be a permutation of `0..n_vars`. The closure
    /// is rejected if it grows past 2^16 elements; useful groups are far
    /// smaller.
    pub fn from_generators(n_vars: usize, generators: &[Vec<u32>]) -> Result<SymmetryGroup> {
        if n_vars == 0 || n_vars > u16::MAX as usize {
            return Err(Error::Range(
                "symmetry groups index variables as u16".into(),
            ));
        }
        let mut gens: Vec<Vec<u16>> = Vec::with_capacity(generators.len());
        for gen in generators {
            if gen.len() != n_vars {
                return Err(Error::Domain(format!(
                    "generator length {} does not match {n_vars} variables",
                    gen.len()
                )));
            }
            let mut seen = vec![false; n_vars];
            for &v in gen {
                if v as usize >= n_vars || seen[v as usize] {
                    return Err(Error::Domain(
                        "generator is not a permutation of the variables".into(),
                    ));
                }
                seen[v as usize] = true;
            }
            gens.push(gen.iter().map(|&v| v as u16).collect());
        }
        let identity: Vec<u16> = (0..n_vars as u16).collect();
        let mut elements: HashMap<Vec<u16>, ()> = HashMap::new();
        let mut queue: VecDeque<Vec<u16>> = VecDeque::new();
        elements.insert(identity.clone(), ());
        queue.push_back(identity);
        while let Some(p) = queue.pop_front() {
            for g in &gens {
                let q: Vec<u16> = p.iter().map(|&v| g[v as usize]).collect();
                if !elements.contains_key(&q) {
                    if elements.len() >= MAX_ORDER {
                        return Err(Error::Range(format!(
                            "symmetry closure exceeds {MAX_ORDER} elements"
                        )));
                    }
                    elements.insert(q.clone(), ());
                    queue.push_back(q);
                }
            }
        }
        let mut sorted: Vec<Vec<u16>> = elements.into_keys().collect();
        sorted.sort_unstable();
        let mut perms = Vec::with_capacity(sorted.len() * n_vars);
        for p in sorted {
            perms.extend_from_slice(&p);
        }
        Ok(SymmetryGroup { n: n_vars, perms })
    }

    /// Number of group elements.
    pub fn order(&self) -> usize {
        self.perms.len() / self.n
    }

    /// Number of variables the permutations act on.
    pub fn n_vars(&self) -> usize {
        self.n
    }

    #[inline]
    fn perm(&self, i: usize) -> &[u16] {
        &self.perms[i * self.n..(i + 1) * self.n]
    }

    /// True when every element maps the graph's edge set onto itself.
    ///
    /// A variable permutation extends to a graph automorphism exactly
    /// when it preserves the multiset of check neighborhoods.
    pub fn preserves(&self, graph: &TannerGraph) -> bool {
        if graph.num_vars() != self.n {
            return false;
        }
        let mut original: Vec<Vec<u16>> = (0..graph.num_checks() as u32)
            .map(|c| graph.chk_vars(c).iter().map(|&v| v as u16).collect())
            .collect();
        original.sort_unstable();
        let mut mapped: Vec<Vec<u16>> = Vec::with_capacity(original.len());
        for i in 0..self.order() {
            let p = self.perm(i);
            mapped.clear();
            for c in 0..graph.num_checks() as u32 {
                let mut row: Vec<u16> = graph.chk_vars(c).iter().map(|&v| p[v as usize]).collect();
                row.sort_unstable();
                mapped.push(row);
            }
            mapped.sort_unstable();
            if mapped != original {
                return false;
            }
        }
        true
    }

    /// Replaces the sorted row with its orbit canonical form, the
    /// lexicographically smallest image over the group.
    pub(crate) fn canonicalize_row(
        &self,
        row: &mut [u16],
        base: &mut Vec<u16>,
        image: &mut Vec<u16>,
    ) {
        base.clear();
        base.extend_from_slice(row);
        for i in 0..self.order() {
            let p = self.perm(i);
            // Cheap rejection: an image can only win if its smallest
            // element does not exceed the current best's.
            let mut imin = u16::MAX;
            for &v in base.iter() {
                imin = imin.min(p[v as usize]);
            }
            if imin > row[0] {
                continue;
            }
            image.clear();
            image.extend(base.iter().map(|&v| p[v as usize]));
            image.sort_unstable();
            if image.as_slice() < &*row {
                row.copy_from_slice(image);
            }
        }
    }

    /// Orbit canonical form of a sorted variable set.
    pub fn canonical(&self, vars: &[u32]) -> Vec<u32> {
        let mut row: Vec<u16> = vars.iter().map(|&v| v as u16).collect();
        let mut base = Vec::new();
        let mut image = Vec::new();
        self.canonicalize_row(&mut row, &mut base, &mut image);
        row.into_iter().map(u32::from).collect()
    }

    /// Number of distinct images of the sorted row under the group.
    pub(crate) fn orbit_len_row(&self, row: &[u16]) -> u64 {
        let mut image: Vec<u16> = Vec::with_capacity(row.len());
        let mut stabilizer = 0u64;
        for i in 0..self.order() {
            let p = self.perm(i);
            let mut imin = u16::MAX;
            for &v in row {
                imin = imin.min(p[v as usize]);
            }
            if imin != row[0] {
                continue;
            }
            image.clear();
            image.extend(row.iter().map(|&v| p[v as usize]));
            image.sort_unstable();
            if image.as_slice() == row {
                stabilizer += 1;
            }
        }
        let order = self.order() as u64;
        debug_assert_eq!(order % stabilizer, 0, "stabilizer must divide the order");
        order / stabilizer
    }

    /// Number of distinct images of a sorted variable set under the
    /// group.
    pub fn orbit_len(&self, vars: &[u32]) -> u64 {
        let row: Vec<u16> = vars.iter().map(|&v| v as u16).collect();
        self.orbit_len_row(&row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The rotation group of a hexagon labeled 0..5.
    fn hexagon_rotations() -> SymmetryGroup {
        let rot: Vec<u32> = (0..6).map(|v| (v + 1) % 6).collect();
        SymmetryGroup::from_generators(6, &[rot]).unwrap()
    }

    #[test]
    fn closure_reaches_the_whole_cyclic_group() {
        let g = hexagon_rotations();
        assert_eq!(g.order(), 6);
        assert_eq!(g.n_vars(), 6);
    }

    #[test]
    fn canonical_is_constant_on_orbits_and_minimal() {
        let g = hexagon_rotations();
        // All rotations of {1, 2, 4} map to the same representative.
        let orbit_member = g.canonical(&[1, 2, 4]);
        assert_eq!(orbit_member, g.canonical(&[2, 3, 5]));
        assert_eq!(orbit_member, g.canonical(&[0, 3, 4]));
        assert_eq!(orbit_member[0], 0);
        // The canonical form is itself in the orbit, so it is a fixed
        // point of canonicalization.
        assert_eq!(g.canonical(&orbit_member), orbit_member);
    }

    #[test]
    fn orbit_lengths_respect_stabilizers() {
        let g = hexagon_rotations();
        // Antipodal pairs are stabilized by the half turn.
        assert_eq!(g.orbit_len(&[0, 3]), 3);
        // A generic pair has a trivial stabilizer.
        assert_eq!(g.orbit_len(&[0, 1]), 6);
        // The full set is fixed by everything.
        assert_eq!(g.orbit_len(&[0, 1, 2, 3, 4, 5]), 1);
    }

    #[test]
    fn orbits_partition_the_subsets() {
        let g = hexagon_rotations();
        // Summing each representative's orbit length over distinct
        // representatives of size 2 recovers all 15 pairs.
        let mut reps: std::collections::BTreeMap<Vec<u32>, u64> = Default::default();
        for x in 0..6u32 {
            for y in x + 1..6 {
                let rep = g.canonical(&[x, y]);
                let len = g.orbit_len(&[x, y]);
                reps.insert(rep, len);
            }
        }
        assert_eq!(reps.values().sum::<u64>(), 15);
        assert_eq!(reps.len(), 3);
    }

    #[test]
    fn bad_generators_are_rejected() {
        assert!(SymmetryGroup::from_generators(3, &[vec![0, 1]]).is_err());
        assert!(SymmetryGroup::from_generators(3, &[vec![0, 1, 1]]).is_err());
        assert!(SymmetryGroup::from_generators(3, &[vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn preserves_detects_non_automorphisms() {
        // A path of two variables through one check, plus a private
        // check on variable 0: swapping the variables is not an
        // automorphism.
        let g = TannerGraph::from_edges(2, 2, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        let swap = SymmetryGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        assert!(!swap.preserves(&g));
        let id = SymmetryGroup::from_generators(2, &[vec![0, 1]]).unwrap();
        assert!(id.preserves(&g));
    }
}
