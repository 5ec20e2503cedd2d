use num_bigint::BigUint;
use serde::Serialize;

use super::midpoint::MidpointReport;
use crate::error::{Error, Result};
use crate::exact::text;
use crate::sumset::RationalCover;

/// `[lo/D, hi/D)`: the closed hull of the cover, written over the cover's
/// half-open cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalHull {
    #[serde(serialize_with = "text::big")]
    pub denominator: BigUint,
    #[serde(serialize_with = "text::big")]
    pub lo: BigUint,
    #[serde(serialize_with = "text::big")]
    pub hi: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexityReport {
    pub j_max: u64,
    pub depth: u64,
    pub midpoint: Option<MidpointReport>,
    pub hull: Option<IntervalHull>,
    /// Maximal `[p/D, q/D)` inside the hull missed by the cover.
    #[serde(serialize_with = "text::big_pairs")]
    pub gap_cells: Vec<(BigUint, BigUint)>,
    pub caveat: String,
}

impl ConvexityReport {
    pub fn has_gaps(&self) -> bool {
        !self.gap_cells.is_empty()
    }

    pub fn with_midpoint(mut self, m: MidpointReport) -> Self {
        self.midpoint = Some(m);
        self
    }
}

pub fn truncation_caveat(j_max: u64, depth: u64) -> String {
    format!(
        "gaps are relative to the union over j <= {j_max} at depth {depth}; larger j or depth may shrink them"
    )
}

/// Hull and uncovered stretches of a rational cover of `E`.
pub fn hull_gap(e: &RationalCover, j_max: u64, depth: u64) -> Result<ConvexityReport> {
    let (first, last) = match (e.intervals().first(), e.intervals().last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::usage("hull of an empty cover")),
    };
    let lo = first.0.clone();
    let hi = last.1.clone();
    let gap_cells = e.gaps_within(&lo, &hi);
    Ok(ConvexityReport {
        j_max,
        depth,
        midpoint: None,
        hull: Some(IntervalHull {
            denominator: e.denominator().clone(),
            lo,
            hi,
        }),
        gap_cells,
        caveat: truncation_caveat(j_max, depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn cells(depth: u32, idx: &[u64]) -> RationalCover {
        RationalCover::new(
            BigUint::from(1u64 << depth),
            idx.iter().map(|&k| (b(k), b(k + 1))).collect(),
            idx.iter().map(|&k| b(k)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_points() {
        let r = hull_gap(&cells(3, &[0, 8]), 1, 3).unwrap();
        let h = r.hull.as_ref().unwrap();
        assert_eq!((h.lo.clone(), h.hi.clone()), (b(0), b(9)));
        assert_eq!(r.gap_cells, vec![(b(1), b(8))]);
        assert!(r.caveat.contains("j <= 1"));
    }

    #[test]
    fn full_and_empty() {
        let full: Vec<u64> = (0..16).collect();
        assert!(!hull_gap(&cells(4, &full), 2, 4).unwrap().has_gaps());
        assert!(hull_gap(&cells(4, &[]), 2, 4).is_err());
    }

    proptest! {
        #[test]
        fn removals_become_the_gaps(mask in proptest::collection::vec(any::<bool>(), 30)) {
            // keep the two ends, drop interior cells where mask is false
            let keep: Vec<u64> = (0..32u64)
                .filter(|&k| k == 0 || k == 31 || mask[(k - 1) as usize])
                .collect();
            let r = hull_gap(&cells(5, &keep), 1, 5).unwrap();
            let mut covered: Vec<bool> = vec![false; 32];
            for &k in &keep { covered[k as usize] = true; }
            for (p, q) in &r.gap_cells {
                let (p, q): (u64, u64) = (p.try_into().unwrap(), q.try_into().unwrap());
                for k in p..q { prop_assert!(!covered[k as usize]); covered[k as usize] = true; }
            }
            prop_assert!(covered.iter().all(|&c| c));
        }
    }
}
