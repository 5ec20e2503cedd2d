use serde::{Deserialize, Serialize};

use super::intervals::IntervalSchedule;
use super::partition::z_partition;
use crate::dyadic::{RuleUnion, ZeroForcedRule};
use crate::error::{Error, Result};
use crate::positions::PositionSet;

/// A non-fatal remark produced while expanding a schedule into digit rules.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub s: Option<u64>,
    pub message: String,
}

/// A constructed value together with the remarks raised building it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleBuild<T> {
    pub value: T,
    pub diagnostics: Vec<Diagnostic>,
}

impl IntervalSchedule {
    /// Union of the intervals `[γ_s, η_s − shrink]` over the `s` with `k >= 1`
    /// selected by `pick(t, q)`, truncated at `cutoff`.
    fn forced_union(
        &self,
        cutoff: u64,
        shrink: u64,
        pick: impl Fn(u64, u64) -> bool,
        diagnostics: &mut Vec<Diagnostic>,
    ) -> Result<PositionSet> {
        self.require_cutoff(cutoff)?;
        let mut ranges = Vec::new();
        for (s, loc, g, h) in self.intervals_upto(cutoff) {
            if loc.k == 0 || !pick(loc.t, loc.q) {
                continue;
            }
            let hi = h.saturating_sub(shrink);
            if hi < g {
                diagnostics.push(Diagnostic {
                    s: Some(s),
                    message: format!("interval [{g}, {h} - {shrink}] is empty and was skipped"),
                });
                continue;
            }
            ranges.push((g, hi.min(cutoff)));
        }
        PositionSet::from_ranges(ranges)
    }

    /// `Ξ^i_{j,q}`: the union over `k >= 1` of `[γ_s, η_s − 2j]` for
    /// `s = i(i+1)k/2 + a^i_{j,q}`, truncated at `cutoff`.
    pub fn xi_set(&self, j: u64, q: u64, cutoff: u64) -> Result<RuleBuild<PositionSet>> {
        self.xi_set_with_slack(j, q, cutoff, 2 * j)
    }

    /// `Ξ^i_{j,q}` with the intervals shortened by `slack` instead of `2j`.
    pub fn xi_set_with_slack(
        &self,
        j: u64,
        q: u64,
        cutoff: u64,
        slack: u64,
    ) -> Result<RuleBuild<PositionSet>> {
        let z = z_partition(self.i)?;
        if j == 0 || j > self.i {
            return Err(Error::usage(format!(
                "xi index j={j} outside 1..={}",
                self.i
            )));
        }
        if q == 0 || q > z.block_len(j) {
            return Err(Error::usage(format!(
                "Z^{}_{j} has {} element(s); q={q} is not available",
                self.i,
                z.block_len(j)
            )));
        }
        let mut diagnostics = Vec::new();
        let value =
            self.forced_union(cutoff, slack, |t, qq| t == j && qq == q, &mut diagnostics)?;
        Ok(RuleBuild { value, diagnostics })
    }

    /// Forced positions of `B^i_l`: the intervals with `t <= i−1, q != l`
    /// together with every `t = i` interval (all for `k >= 1`).
    pub fn b_rule(&self, l: u64, cutoff: u64) -> Result<RuleBuild<ZeroForcedRule>> {
        if l == 0 || l > self.i {
            return Err(Error::usage(format!(
                "B index l={l} outside 1..={}",
                self.i
            )));
        }
        let i = self.i;
        let mut diagnostics = Vec::new();
        let forced = self.forced_union(cutoff, 0, |t, q| t == i || q != l, &mut diagnostics)?;
        if forced.is_empty() {
            diagnostics.push(Diagnostic {
                s: None,
                message: format!(
                    "no forced positions up to depth {cutoff}: the set looks full at this depth"
                ),
            });
        }
        Ok(RuleBuild {
            value: ZeroForcedRule::new(forced, cutoff)?,
            diagnostics,
        })
    }

    /// `A^i = B^i_1 ∪ ... ∪ B^i_i`.
    pub fn a_rule_union(&self, cutoff: u64) -> Result<RuleBuild<RuleUnion>> {
        let mut rules = Vec::new();
        let mut diagnostics = Vec::new();
        for l in 1..=self.i {
            let b = self.b_rule(l, cutoff)?;
            rules.push(b.value);
            for d in b.diagnostics {
                if !diagnostics.contains(&d) {
                    diagnostics.push(d);
                }
            }
        }
        Ok(RuleBuild {
            value: RuleUnion::new(rules),
            diagnostics,
        })
    }

    /// `T^i_j(p)`: forced on every interval with `t >= j`, up to `p`. It sits
    /// inside the `j`-fold sum of `A^i` and carries the lower-bound measure.
    pub fn t_rule(&self, j: u64, p: u64) -> Result<ZeroForcedRule> {
        if j == 0 || j > self.i {
            return Err(Error::usage(format!(
                "T index j={j} outside 1..={}",
                self.i
            )));
        }
        let mut diagnostics = Vec::new();
        let forced = self.forced_union(p, 0, |t, _| t >= j, &mut diagnostics)?;
        ZeroForcedRule::new(forced, p)
    }

    /// `Q^i_j(p)`: the union over `q` of the sets vanishing on
    /// `Ξ^i_{j,q} ∩ [1, p − 2j]`. It contains the `j`-fold sum of `A^i`
    /// at depth `p`.
    pub fn q_union(&self, j: u64, p: u64) -> Result<RuleUnion> {
        let z = z_partition(self.i)?;
        let mut rules = Vec::new();
        for q in 1..=z.block_len(j) {
            let xi = self.xi_set(j, q, p)?.value;
            rules.push(ZeroForcedRule::new(
                xi.truncate(p.saturating_sub(2 * j)),
                p,
            )?);
        }
        if rules.is_empty() {
            return Err(Error::usage(format!(
                "Q index j={j} outside 1..={}",
                self.i
            )));
        }
        Ok(RuleUnion::new(rules))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};

    fn toy2() -> IntervalSchedule {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        build_interval_schedule(2, &a, 8, GrowthMode::toy(4).unwrap()).unwrap()
    }

    #[test]
    fn xi_expansion() {
        let s = toy2();
        // s = 3k: t=1, q=1. k=1 → s=3, k=2 → s=6.
        let xi = s.xi_set(1, 1, 100_000).unwrap().value;
        assert_eq!(xi.ranges(), &[(77, 136), (20285, 37184)]);
        assert!(s.xi_set(1, 1, 50).unwrap().value.is_empty());
        assert!(s.xi_set(2, 2, 100).is_err());
        assert!(s.xi_set(2, 1, 100).is_ok());
    }

    #[test]
    fn b_rule_index_sets() {
        let s = toy2();
        // l=1 forces (t,q)=(1,2) (s ≡ 1 mod 3) and t=2 (s ≡ 2 mod 3), k >= 1.
        let b1 = s.b_rule(1, 300_000).unwrap().value;
        assert_eq!(
            b1.forced().ranges(),
            &[(553, 966), (3865, 5071), (148745, 260302)]
        );
        let b2 = s.b_rule(2, 300_000).unwrap().value;
        assert_eq!(
            b2.forced().ranges(),
            &[(77, 138), (3865, 5071), (20285, 37186)]
        );
        // nothing below the first forcing interval
        let early = s.b_rule(1, 60).unwrap();
        assert!(early.value.forced().is_empty());
        assert_eq!(early.diagnostics.len(), 1);
        // t = i intervals are shared
        for l in 1..=2 {
            assert!(s.b_rule(l, 10_000).unwrap().value.forced().contains(4000));
        }
    }

    #[test]
    fn cutoff_beyond_schedule_rejected() {
        let s = toy2();
        assert!(s.b_rule(1, s.covered_depth_u64() + 1).is_err());
        assert!(s.b_rule(1, s.covered_depth_u64()).is_ok());
    }

    #[test]
    fn empty_xi_intervals_flagged() {
        // With i=4 the j=4 intervals shrink by 8; early short ones vanish.
        let a = AlphaSequence::parse("1/2,1/2,1/2,1/2").unwrap();
        let s = build_interval_schedule(4, &a, 24, GrowthMode::toy(2).unwrap()).unwrap();
        let total: usize = (1..=4)
            .map(|j| {
                s.xi_set(j, 1, s.covered_depth_u64())
                    .unwrap()
                    .diagnostics
                    .len()
            })
            .sum();
        let lens_ok = s.entries.iter().all(|e| e.eta >= e.gamma);
        assert!(lens_ok);
        // Diagnostics (if any) name the skipped s.
        for j in 1..=4 {
            for d in s.xi_set(j, 1, s.covered_depth_u64()).unwrap().diagnostics {
                let e = s.entry(d.s.unwrap()).unwrap();
                assert!(e.eta < &e.gamma + 2 * j);
            }
        }
        let _ = total;
    }

    #[test]
    fn t_and_q_rules_nest() {
        let s = toy2();
        let p = 6000;
        let t1 = s.t_rule(1, p).unwrap();
        let t2 = s.t_rule(2, p).unwrap();
        // T_2 forces a subset of T_1's positions
        assert_eq!(t2.forced().intersection(t1.forced()), t2.forced().clone());
        let q1 = s.q_union(1, p).unwrap();
        assert_eq!(q1.rules().len(), 2);
        assert_eq!(s.q_union(2, p).unwrap().rules().len(), 1);
    }
}
