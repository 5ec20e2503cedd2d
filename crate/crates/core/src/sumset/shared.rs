use serde::{Deserialize, Serialize};

use super::engine::one_positions;
use super::layout::{multisets, AddendLayout};
use crate::error::{Error, Result};
use crate::schedule::{z_partition, IntervalSchedule};

/// For one choice `B_{l_1} + ... + B_{l_j}`: the first `q` whose shortened
/// intervals carry only zero digits in every sum, for the `2j` shortening
/// and for the tighter `j − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedZeroEntry {
    pub ls: Vec<u64>,
    pub q_wide: Option<u64>,
    pub q_tight: Option<u64>,
    /// Number of positions tested for `q_wide`.
    pub checked_positions: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedZeroReport {
    pub i: u64,
    pub j: u64,
    pub depth: u64,
    pub entries: Vec<SharedZeroEntry>,
}

impl SharedZeroReport {
    pub fn all_wide(&self) -> bool {
        self.entries.iter().all(|e| e.q_wide.is_some())
    }

    pub fn all_tight(&self) -> bool {
        self.entries.iter().all(|e| e.q_tight.is_some())
    }
}

/// Runs the digit pass on every `j`-multiset of `B^i_l` and looks for a
/// shared block of zero digits, at depth `n`.
pub fn shared_zero_check(sched: &IntervalSchedule, j: u64, n: u64) -> Result<SharedZeroReport> {
    let i = sched.i;
    if j == 0 || j > i {
        return Err(Error::usage(format!("j={j} outside 1..={i}")));
    }
    let z = z_partition(i)?;
    let bs = (1..=i)
        .map(|l| sched.b_rule(l, n).map(|b| b.value))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for combo in multisets(i as usize, j) {
        let addends: Vec<_> = combo.iter().map(|&k| &bs[k]).collect();
        let ones = one_positions(&AddendLayout::from_addends(&addends, n)?)?;
        let zero_on = |slack: u64| -> Result<Option<(u64, u64)>> {
            for q in 1..=z.block_len(j) {
                let xi = sched.xi_set_with_slack(j, q, n, slack)?.value;
                if !xi.is_empty() && xi.intersection(&ones).is_empty() {
                    return Ok(Some((q, xi.len())));
                }
            }
            Ok(None)
        };
        let wide = zero_on(2 * j)?;
        let tight = zero_on(j - 1)?;
        entries.push(SharedZeroEntry {
            ls: combo.iter().map(|&k| k as u64 + 1).collect(),
            q_wide: wide.map(|w| w.0),
            q_tight: tight.map(|t| t.0),
            checked_positions: wide.map_or(0, |w| w.1),
        });
    }
    Ok(SharedZeroReport {
        i,
        j,
        depth: n,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};

    #[test]
    fn toy_sums_share_zero_blocks() {
        let a = AlphaSequence::parse("1/2,2/3,3/4").unwrap();
        for i in 2..=3 {
            let s = build_interval_schedule(
                i,
                &a,
                3 * i * (i + 1) / 2 + 1,
                GrowthMode::toy(4).unwrap(),
            )
            .unwrap();
            let n = s.entries.last().unwrap().eta.to_u64_digits()[0];
            for j in 1..=i {
                let r = shared_zero_check(&s, j, n).unwrap();
                assert!(r.all_wide(), "i={i} j={j}: {r:?}");
                assert!(r.all_tight(), "i={i} j={j}: {r:?}");
                assert!(r.entries.iter().all(|e| e.checked_positions > 0));
            }
        }
    }

    #[test]
    fn blocks_fail_before_any_interval() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 6, GrowthMode::toy(4).unwrap()).unwrap();
        let r = shared_zero_check(&s, 1, 60).unwrap();
        assert!(!r.all_wide());
    }
}
