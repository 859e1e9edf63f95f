//! Storage for enumerated variable sets, organized by size level.
//!
//! Every engine in this crate produces sets level by level: all sets of
//! size `a` are collected, sorted, and deduplicated before any set of size
//! `a + 1` is considered. A level therefore stores fixed-stride rows of
//! sorted variable indices in lexicographic order, with the unsatisfied
//! check count of each row alongside. Lexicographic order makes the
//! smallest witness of a class well defined and independent of how the
//! rows were produced.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::symmetry::SymmetryGroup;

/// An `(a, b)` class label: set size and unsatisfied check count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassKey {
    /// Number of variables in the set.
    pub a: u32,
    /// Number of odd-degree checks in the induced subgraph.
    pub b: u32,
}

impl std::fmt::Display for ClassKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// All stored sets of one size, as sorted fixed-stride rows.
#[derive(Debug, Default, Clone)]
pub struct LevelStore {
    stride: usize,
    rows: Vec<u16>,
    bs: Vec<u16>,
}

impl LevelStore {
    /// Builds a level from parallel row and `b` arrays, sorting and
    /// deduplicating in place. Each consecutive `stride` entries of `rows`
    /// form one set; duplicate rows must carry equal `b` values.
    pub fn from_raw(stride: usize, rows: Vec<u16>, bs: Vec<u16>) -> LevelStore {
        assert!(stride > 0, "level stride must be positive");
        assert_eq!(rows.len(), bs.len() * stride, "row and b arrays disagree");
        let mut level = LevelStore { stride, rows, bs };
        level.sort_dedup();
        level
    }

    fn sort_dedup(&mut self) {
        let k = self.bs.len();
        if k <= 1 {
            return;
        }
        let stride = self.stride;
        let rows = &self.rows;
        let mut order: Vec<u32> = (0..k as u32).collect();
        order.sort_unstable_by(|&x, &y| {
            rows[x as usize * stride..(x as usize + 1) * stride]
                .cmp(&rows[y as usize * stride..(y as usize + 1) * stride])
        });
        let mut new_rows = Vec::with_capacity(self.rows.len());
        let mut new_bs = Vec::with_capacity(k);
        let mut last: Option<u32> = None;
        for &i in &order {
            let row = &rows[i as usize * stride..(i as usize + 1) * stride];
            if let Some(prev) = last {
                let prev_row = &new_rows[prev as usize * stride..(prev as usize + 1) * stride];
                if prev_row == row {
                    debug_assert_eq!(new_bs[prev as usize], self.bs[i as usize]);
                    continue;
                }
            }
            new_rows.extend_from_slice(row);
            new_bs.push(self.bs[i as usize]);
            last = Some(new_bs.len() as u32 - 1);
        }
        self.rows = new_rows;
        self.bs = new_bs;
    }

    /// Number of stored sets.
    pub fn len(&self) -> usize {
        self.bs.len()
    }

    /// True when the level holds no sets.
    pub fn is_empty(&self) -> bool {
        self.bs.is_empty()
    }

    /// Variables of set `i`, sorted ascending.
    #[inline]
    pub fn row(&self, i: usize) -> &[u16] {
        &self.rows[i * self.stride..(i + 1) * self.stride]
    }

    /// Unsatisfied check count of set `i`.
    #[inline]
    pub fn b(&self, i: usize) -> u32 {
        self.bs[i] as u32
    }

    /// Iterates over `(row, b)` pairs in lexicographic row order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u16], u32)> + '_ {
        self.rows
            .chunks_exact(self.stride)
            .zip(self.bs.iter().map(|&b| b as u32))
    }

    /// Approximate heap footprint in bytes.
    pub fn bytes(&self) -> usize {
        2 * (self.rows.len() + self.bs.len())
    }

    /// Takes the row and `b` arrays back out for reprocessing.
    pub(crate) fn into_raw(self) -> (Vec<u16>, Vec<u16>) {
        (self.rows, self.bs)
    }

    /// Orbit length of every row under `sym`, in row order.
    fn orbit_weights(&self, sym: &SymmetryGroup) -> Vec<u64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| sym.orbit_len_row(self.row(i)))
            .collect()
    }

    /// The deduplicated union of two levels of the same stride.
    pub fn merged(&self, other: &LevelStore) -> LevelStore {
        assert_eq!(self.stride, other.stride, "levels hold different sizes");
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        let mut bs = self.bs.clone();
        bs.extend_from_slice(&other.bs);
        LevelStore::from_raw(self.stride, rows, bs)
    }
}

/// Sets grouped by size level, the common result shape of all searches.
#[derive(Debug, Default, Clone)]
pub struct ClassLedger {
    levels: BTreeMap<u32, LevelStore>,
}

impl ClassLedger {
    /// An empty ledger.
    pub fn new() -> ClassLedger {
        ClassLedger::default()
    }

    /// Installs the deduplicated level of size `a`, replacing any previous
    /// content at that size.
    pub fn set_level(&mut self, a: u32, level: LevelStore) {
        if level.is_empty() {
            self.levels.remove(&a);
        } else {
            self.levels.insert(a, level);
        }
    }

    /// The level of size `a`, if present.
    pub fn level(&self, a: u32) -> Option<&LevelStore> {
        self.levels.get(&a)
    }

    /// Sizes with at least one stored set, ascending.
    pub fn sizes(&self) -> impl Iterator<Item = u32> + '_ {
        self.levels.keys().copied()
    }

    /// Frees the level of size `a`, keeping the rest.
    pub fn drop_level(&mut self, a: u32) {
        self.levels.remove(&a);
    }

    /// Folds every level of `other` into this ledger, deduplicating.
    pub fn merge(&mut self, other: &ClassLedger) {
        for (&a, level) in &other.levels {
            let merged = match self.levels.get(&a) {
                Some(own) => own.merged(level),
                None => level.clone(),
            };
            self.set_level(a, merged);
        }
    }

    /// Number of sets in class `(a, b)`.
    pub fn count(&self, a: u32, b: u32) -> u64 {
        self.levels
            .get(&a)
            .map(|l| l.bs.iter().filter(|&&x| x as u32 == b).count() as u64)
            .unwrap_or(0)
    }

    /// Per-class set counts over the whole ledger.
    pub fn counts(&self) -> BTreeMap<ClassKey, u64> {
        let mut out = BTreeMap::new();
        for (&a, level) in &self.levels {
            for &b in &level.bs {
                *out.entry(ClassKey { a, b: b as u32 }).or_insert(0) += 1;
            }
        }
        out
    }

    /// Total number of stored sets.
    pub fn total(&self) -> u64 {
        self.levels.values().map(|l| l.len() as u64).sum()
    }

    /// Number of sets in class `(a, b)` when every stored row is an orbit
    /// representative under `sym`: each row counts once per orbit member.
    pub fn weighted_count(&self, a: u32, b: u32, sym: &SymmetryGroup) -> u64 {
        let Some(level) = self.levels.get(&a) else {
            return 0;
        };
        (0..level.len())
            .into_par_iter()
            .filter(|&i| level.b(i) == b)
            .map(|i| sym.orbit_len_row(level.row(i)))
            .sum()
    }

    /// Per-class counts weighing each stored row by its orbit length
    /// under `sym`.
    pub fn weighted_counts(&self, sym: &SymmetryGroup) -> BTreeMap<ClassKey, u64> {
        let mut out = BTreeMap::new();
        for (&a, level) in &self.levels {
            let weights = level.orbit_weights(sym);
            for (i, &b) in level.bs.iter().enumerate() {
                *out.entry(ClassKey { a, b: b as u32 }).or_insert(0) += weights[i];
            }
        }
        out
    }

    /// Total number of sets weighing each stored row by its orbit length
    /// under `sym`.
    pub fn weighted_total(&self, sym: &SymmetryGroup) -> u64 {
        self.levels
            .values()
            .map(|l| l.orbit_weights(sym).iter().sum::<u64>())
            .sum()
    }

    /// Lexicographically smallest set of class `(a, b)`, if any.
    pub fn witness(&self, a: u32, b: u32) -> Option<Vec<u32>> {
        let level = self.levels.get(&a)?;
        (0..level.len())
            .find(|&i| level.b(i) == b)
            .map(|i| level.row(i).iter().map(|&v| v as u32).collect())
    }

    /// Approximate heap footprint in bytes.
    pub fn bytes(&self) -> usize {
        self.levels.values().map(LevelStore::bytes).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sorts_and_dedups() {
        let rows = vec![3, 5, 1, 2, 3, 5, 1, 4];
        let bs = vec![2, 1, 2, 3];
        let level = LevelStore::from_raw(2, rows, bs);
        assert_eq!(level.len(), 3);
        assert_eq!(level.row(0), &[1, 2]);
        assert_eq!(level.row(1), &[1, 4]);
        assert_eq!(level.row(2), &[3, 5]);
        assert_eq!(level.b(0), 1);
        assert_eq!(level.b(2), 2);
    }

    #[test]
    fn ledger_counts_and_witness() {
        let mut ledger = ClassLedger::new();
        ledger.set_level(2, LevelStore::from_raw(2, vec![3, 5, 1, 2], vec![2, 0]));
        ledger.set_level(3, LevelStore::from_raw(3, vec![1, 2, 3], vec![2]));
        assert_eq!(ledger.count(2, 0), 1);
        assert_eq!(ledger.count(2, 2), 1);
        assert_eq!(ledger.count(3, 2), 1);
        assert_eq!(ledger.total(), 3);
        assert_eq!(ledger.witness(2, 2), Some(vec![3, 5]));
        assert_eq!(ledger.witness(2, 1), None);
        let counts = ledger.counts();
        assert_eq!(counts[&ClassKey { a: 2, b: 0 }], 1);
    }

    #[test]
    fn empty_level_is_dropped() {
        let mut ledger = ClassLedger::new();
        ledger.set_level(4, LevelStore::default());
        assert!(ledger.level(4).is_none());
        assert_eq!(ledger.total(), 0);
    }

    #[test]
    fn weighted_counts_multiply_by_orbit_length() {
        // Rotation of a 6-cycle: {0, 3} has orbit length 3, {0, 1} has 6.
        let rot: Vec<u32> = (0..6).map(|v| (v + 1) % 6).collect();
        let sym = SymmetryGroup::from_generators(6, &[rot]).unwrap();
        let mut ledger = ClassLedger::new();
        ledger.set_level(2, LevelStore::from_raw(2, vec![0, 3, 0, 1], vec![0, 1]));
        assert_eq!(ledger.weighted_count(2, 0, &sym), 3);
        assert_eq!(ledger.weighted_count(2, 1, &sym), 6);
        assert_eq!(ledger.weighted_total(&sym), 9);
        let counts = ledger.weighted_counts(&sym);
        assert_eq!(counts[&ClassKey { a: 2, b: 0 }], 3);
        assert_eq!(counts[&ClassKey { a: 2, b: 1 }], 6);
        assert_eq!(ledger.count(2, 0), 1);
    }
}
