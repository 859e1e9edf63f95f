//! Classification of induced subgraphs.
//!
//! Given a set `S` of variables, the induced subgraph consists of `S`, every
//! check with at least one neighbor in `S`, and the edges between them. The
//! profile summarizes the check degree spectrum of that subgraph and derives
//! the structural flags the search engines and reports are built on.

use serde::Serialize;
use smallvec::SmallVec;

use crate::graph::TannerGraph;

/// Families of non-elementary sets, keyed by the multiset of induced check
/// degrees above 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// One degree-3 check.
    N3,
    /// Two degree-3 checks.
    N33,
    /// Three degree-3 checks.
    N333,
    /// Four degree-3 checks.
    N3333,
    /// One degree-4 check.
    N4,
    /// One degree-4 and one degree-3 check.
    N43,
    /// Any other combination of checks of degree 3 or more.
    Other,
}

impl Family {
    /// All named families, in report order.
    pub const NAMED: [Family; 6] = [
        Family::N3,
        Family::N33,
        Family::N333,
        Family::N3333,
        Family::N4,
        Family::N43,
    ];

    /// Parses a family name as used on the command line.
    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_uppercase().as_str() {
            "N3" => Some(Family::N3),
            "N33" => Some(Family::N33),
            "N333" => Some(Family::N333),
            "N3333" => Some(Family::N3333),
            "N4" => Some(Family::N4),
            "N43" => Some(Family::N43),
            "OTHER" => Some(Family::Other),
            _ => None,
        }
    }

    /// Classifies a sorted list of induced check degrees above 2.
    pub fn from_high_degrees(degrees: &[u32]) -> Family {
        match degrees {
            [3] => Family::N3,
            [3, 3] => Family::N33,
            [3, 3, 3] => Family::N333,
            [3, 3, 3, 3] => Family::N3333,
            [4] => Family::N4,
            [3, 4] => Family::N43,
            _ => Family::Other,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Degree spectrum and structural flags of one induced subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphProfile {
    /// Number of variables.
    pub a: u32,
    /// Number of checks with odd induced degree.
    pub b: u32,
    /// Number of checks with induced degree exactly 1.
    pub degree_one_checks: u32,
    /// Largest induced check degree.
    pub max_check_degree: u32,
    /// Sorted induced degrees of the checks with degree 3 or more.
    pub high_degrees: SmallVec<[u32; 4]>,
    /// Every variable touches at least two checks of induced degree 2 or
    /// more. For elementary sets this means every variable lies on a cycle.
    pub leafless: bool,
}

impl SubgraphProfile {
    /// Profiles the set `vars` in `graph`. `vars` must be sorted, unique,
    /// and in range.
    pub fn of(graph: &TannerGraph, vars: &[u32]) -> SubgraphProfile {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        // Gather all incident checks, then count multiplicities.
        let mut touched: SmallVec<[u32; 32]> = SmallVec::new();
        for &v in vars {
            touched.extend_from_slice(graph.var_checks(v));
        }
        touched.sort_unstable();
        let mut b = 0u32;
        let mut deg1 = 0u32;
        let mut max_deg = 0u32;
        let mut high: SmallVec<[u32; 4]> = SmallVec::new();
        let mut i = 0;
        while i < touched.len() {
            let c = touched[i];
            let mut j = i + 1;
            while j < touched.len() && touched[j] == c {
                j += 1;
            }
            let deg = (j - i) as u32;
            if deg % 2 == 1 {
                b += 1;
            }
            if deg == 1 {
                deg1 += 1;
            }
            if deg >= 3 {
                high.push(deg);
            }
            max_deg = max_deg.max(deg);
            i = j;
        }
        high.sort_unstable();
        let leafless = vars.iter().all(|&v| {
            let mut shared = 0;
            for &c in graph.var_checks(v) {
                let lo = touched.partition_point(|&x| x < c);
                let hi = touched.partition_point(|&x| x <= c);
                if hi - lo >= 2 {
                    shared += 1;
                    if shared == 2 {
                        break;
                    }
                }
            }
            shared >= 2
        });
        SubgraphProfile {
            a: vars.len() as u32,
            b,
            degree_one_checks: deg1,
            max_check_degree: max_deg,
            high_degrees: high,
            leafless,
        }
    }

    /// Class of the set as an `(a, b)` pair.
    pub fn class(&self) -> (u32, u32) {
        (self.a, self.b)
    }

    /// Every induced check degree is at most 2.
    pub fn elementary(&self) -> bool {
        self.max_check_degree <= 2
    }

    /// Leafless elementary set.
    pub fn is_lets(&self) -> bool {
        self.elementary() && self.leafless
    }

    /// Elementary set with at least one leaf variable.
    pub fn is_etsl(&self) -> bool {
        self.elementary() && !self.leafless
    }

    /// At least one induced check degree is 3 or more.
    pub fn is_nets(&self) -> bool {
        self.max_check_degree >= 3
    }

    /// No induced check has degree exactly 1, so erasing the set stalls
    /// iterative erasure recovery.
    pub fn is_stopping(&self) -> bool {
        self.degree_one_checks == 0
    }

    /// Non-elementary stopping set.
    pub fn is_ness(&self) -> bool {
        self.is_stopping() && self.is_nets()
    }

    /// Family label, meaningful for non-elementary sets.
    pub fn family(&self) -> Family {
        Family::from_high_degrees(&self.high_degrees)
    }

    /// The set is in a named family or could still grow into one.
    ///
    /// Adding a variable never lowers an induced check degree, so a
    /// degree spectrum already past every named pattern, a check of
    /// degree 5, two checks of degree 4, or too many of degree 3, is
    /// permanent and the adjunction walk can drop the set.
    pub fn family_reachable(&self) -> bool {
        if self.max_check_degree > 4 {
            return false;
        }
        let fours = self.high_degrees.iter().filter(|&&d| d == 4).count();
        let threes = self.high_degrees.len() - fours;
        match fours {
            0 => threes <= 4,
            1 => threes <= 1,
            _ => false,
        }
    }
}

/// Whether class `(a, b)` can occur in a code with uniform variable degree
/// `dv`.
///
/// Summing induced check degrees counts every edge once, so
/// `b = a * dv (mod 2)`; classes violating the congruence are empty.
pub fn feasible_class(a: u32, b: u32, dv: u32) -> bool {
    (a * dv) % 2 == b % 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TannerGraph;

    /// 6-cycle on variables {0,1,2} plus variable 3 pendant on check 0 and
    /// a degree-1 private check 3 for variable 3.
    fn fixture() -> TannerGraph {
        TannerGraph::from_edges(
            4,
            4,
            &[
                (0, 0),
                (0, 1),
                (1, 1),
                (1, 2),
                (2, 2),
                (2, 0),
                (3, 0),
                (3, 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cycle_profile_is_leafless_elementary() {
        let g = fixture();
        let p = SubgraphProfile::of(&g, &[0, 1, 2]);
        assert_eq!(p.class(), (3, 0));
        assert!(p.is_lets());
        assert!(!p.is_nets());
        assert!(p.is_stopping());
        assert_eq!(p.max_check_degree, 2);
    }

    #[test]
    fn pendant_variable_creates_leaf_and_high_degree() {
        let g = fixture();
        let p = SubgraphProfile::of(&g, &[0, 1, 2, 3]);
        // Check 0 now has degree 3 and check 3 degree 1.
        assert_eq!(p.class(), (4, 2));
        assert!(p.is_nets());
        assert!(!p.is_stopping());
        assert_eq!(p.family(), Family::N3);
        assert!(!p.leafless);
    }

    #[test]
    fn single_variable_profile() {
        let g = fixture();
        let p = SubgraphProfile::of(&g, &[3]);
        assert_eq!(p.class(), (1, 2));
        assert!(p.is_etsl());
        assert_eq!(p.degree_one_checks, 2);
    }

    #[test]
    fn family_classification() {
        assert_eq!(Family::from_high_degrees(&[3]), Family::N3);
        assert_eq!(Family::from_high_degrees(&[3, 3, 3, 3]), Family::N3333);
        assert_eq!(Family::from_high_degrees(&[3, 4]), Family::N43);
        assert_eq!(Family::from_high_degrees(&[4, 4]), Family::Other);
        assert_eq!(Family::from_high_degrees(&[5]), Family::Other);
        assert_eq!(Family::parse("n43"), Some(Family::N43));
        assert_eq!(Family::parse("n5"), None);
    }

    #[test]
    fn family_reach_follows_the_degree_spectrum() {
        let g = fixture();
        // Elementary sets can reach any family.
        assert!(SubgraphProfile::of(&g, &[0, 1, 2]).family_reachable());
        // One degree-3 check is in family and can still grow.
        assert!(SubgraphProfile::of(&g, &[0, 1, 2, 3]).family_reachable());
        // Synthetic spectra past the named patterns are out of reach.
        let mut p = SubgraphProfile::of(&g, &[0, 1, 2, 3]);
        p.high_degrees = smallvec::smallvec![3, 3, 3, 3, 3];
        assert!(!p.family_reachable());
        p.high_degrees = smallvec::smallvec![4, 4];
        assert!(!p.family_reachable());
        p.high_degrees = smallvec::smallvec![3, 3, 4];
        assert!(!p.family_reachable());
        p.high_degrees = smallvec::smallvec![5];
        p.max_check_degree = 5;
        assert!(!p.family_reachable());
        p.high_degrees = smallvec::smallvec![3, 4];
        p.max_check_degree = 4;
        assert!(p.family_reachable());
    }

    #[test]
    fn class_parity() {
        assert!(feasible_class(4, 4, 3));
        assert!(!feasible_class(4, 3, 3));
        assert!(!feasible_class(5, 4, 3));
        assert!(feasible_class(5, 3, 3));
        assert!(feasible_class(6, 2, 4));
        assert!(!feasible_class(6, 3, 4));
    }
}
