use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::boxcount::box_estimate;
use super::Bracket;
use crate::dyadic::DigitSpec;
use crate::error::{Error, Result};
use crate::schedule::IntervalSchedule;
use crate::sumset::{count_layout, count_sumset_cells, multisets, AddendLayout};

/// Box estimates of one union component `B_{l_1} + … + B_{l_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEstimate {
    /// 1-based rule indices `l_1 <= … <= l_j`.
    pub combo: Vec<u64>,
    pub per_depth: Vec<(u64, BigUint, Bracket)>,
    /// Smallest estimate over the depths.
    pub min: Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetDimensionEstimate {
    pub i: u64,
    pub j: u64,
    pub components: Vec<ComponentEstimate>,
    /// Largest component minimum: a finite union has the dimension of its
    /// largest piece, and each piece is judged by its liminf-type minimum.
    pub estimate: Bracket,
    /// Box counts of the whole union `A^i_j`, for comparison.
    pub union_counts: Vec<(u64, BigUint, Bracket)>,
}

/// Estimates the dimension of `A^i_j` (the `j`-fold sum of `A^i = ∪_l B^i_l`)
/// at the given depths, component by component.
pub fn componentwise_estimate(
    sched: &IntervalSchedule,
    j: u64,
    depths: &[u64],
) -> Result<SumsetDimensionEstimate> {
    let cutoff = *depths
        .iter()
        .max()
        .ok_or_else(|| Error::usage("at least one depth is required"))?;
    let union = sched.a_rule_union(cutoff)?.value;
    let mut components = Vec::new();
    for combo in multisets(union.rules().len(), j) {
        let mut per_depth = Vec::new();
        for &n in depths {
            let layout = AddendLayout::from_union_combo(&union, &combo, n)?;
            let count = count_layout(&layout)?;
            let b = box_estimate(&count, n)?;
            per_depth.push((n, count, b));
        }
        let min = Bracket::min_of(per_depth.iter().map(|t| t.2))?;
        components.push(ComponentEstimate {
            combo: combo.iter().map(|&k| k as u64 + 1).collect(),
            per_depth,
            min,
        });
    }
    let estimate = Bracket::max_of(components.iter().map(|c| c.min))?;
    let spec = DigitSpec::from(union);
    let mut union_counts = Vec::new();
    for &n in depths {
        let count = count_sumset_cells(&spec, j, n)?;
        let b = box_estimate(&count, n)?;
        union_counts.push((n, count, b));
    }
    Ok(SumsetDimensionEstimate {
        i: sched.i,
        j,
        components,
        estimate,
        union_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Q;
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};

    #[test]
    fn small_toy_estimate() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 4, GrowthMode::toy(4).unwrap()).unwrap();
        let depths: Vec<u64> = (1..=3)
            .map(|k| s.entry(k).unwrap().eta.clone().try_into().unwrap())
            .collect();
        let e = componentwise_estimate(&s, 1, &depths).unwrap();
        assert_eq!(e.components.len(), 2);
        // components are subsets of the union
        for c in &e.components {
            for ((_, cn, _), (_, un, _)) in c.per_depth.iter().zip(&e.union_counts) {
                assert!(cn <= un);
            }
        }
        assert!(e.estimate.hi <= Q::from_integer(1));
        let e2 = componentwise_estimate(&s, 2, &depths[..2]).unwrap();
        assert_eq!(e2.components.len(), 3);
    }
}
