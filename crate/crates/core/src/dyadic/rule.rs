use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{check_index_range, CellCover, DigitString, Exactness};
use crate::error::{Budget, Error, Result};
use crate::positions::PositionSet;

/// The set of `x ∈ [0,1)` whose binary digit vanishes at every forced
/// position, known up to `cutoff_depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroForcedRule {
    forced: PositionSet,
    cutoff_depth: u64,
}

impl ZeroForcedRule {
    /// Forced positions beyond the cutoff are dropped.
    pub fn new(forced: PositionSet, cutoff_depth: u64) -> Result<Self> {
        if cutoff_depth == 0 {
            return Err(Error::usage("rule cutoff depth must be positive"));
        }
        Ok(ZeroForcedRule {
            forced: forced.truncate(cutoff_depth),
            cutoff_depth,
        })
    }

    /// Rule whose free positions are exactly `free ∩ [1, cutoff]`.
    pub fn from_free(free: &PositionSet, cutoff_depth: u64) -> Result<Self> {
        Self::new(free.complement_upto(cutoff_depth), cutoff_depth)
    }

    /// The unconstrained rule: every digit free.
    pub fn unconstrained(cutoff_depth: u64) -> Result<Self> {
        Self::new(PositionSet::new(), cutoff_depth)
    }

    pub fn forced(&self) -> &PositionSet {
        &self.forced
    }

    pub fn cutoff_depth(&self) -> u64 {
        self.cutoff_depth
    }

    pub fn is_forced(&self, p: u64) -> bool {
        self.forced.contains(p)
    }

    pub fn free_upto(&self, n: u64) -> PositionSet {
        self.forced.complement_upto(n)
    }

    pub fn free_count(&self, n: u64) -> u64 {
        n - self.forced.count_le(n)
    }

    /// Exact number of depth-`n` cells: `2^(free positions <= n)`.
    pub fn count_cells(&self, n: u64) -> BigUint {
        BigUint::one() << self.free_count(n)
    }

    /// Digit strings consistent with the rule: zero at each forced position
    /// they reach.
    pub fn admits(&self, d: &DigitString) -> bool {
        d.len() <= self.cutoff_depth && self.forced.ranges().iter().all(|&(a, b)| d.zero_on(a, b))
    }

    /// Intersection of two rule sets is again a rule.
    pub fn intersect(&self, other: &Self) -> Self {
        ZeroForcedRule {
            forced: self.forced.union(&other.forced),
            cutoff_depth: self.cutoff_depth.min(other.cutoff_depth),
        }
    }

    /// `{x/2 : x in set} ⊆ set` up to depth `n`: the right shift puts a 0 at
    /// position 1 and moves `x_p` to `p+1`, so every forced `p+1 <= n` needs
    /// `p` forced too.
    pub fn closed_under_halving(&self, n: u64) -> bool {
        self.forced
            .iter()
            .take_while(|&q| q <= n)
            .all(|q| q == 1 || self.forced.contains(q - 1))
    }

    /// Sorted cell indices at depth `n` (all `2^free` of them).
    pub(crate) fn cell_indices(&self, n: u32) -> Vec<u64> {
        let mask = free_mask(self, n);
        let mut out = Vec::with_capacity(1usize << mask.count_ones());
        let mut sub = 0u64;
        loop {
            out.push(sub);
            if sub == mask {
                break;
            }
            sub = (sub | !mask).wrapping_add(1) & mask;
        }
        out
    }
}

/// Bit `n-p` set for every free position `p <= n`.
pub(crate) fn free_mask(rule: &ZeroForcedRule, n: u32) -> u64 {
    rule.free_upto(n as u64)
        .iter()
        .fold(0u64, |m, p| m | (1u64 << (n as u64 - p)))
}

/// Finite union of rule sets; the empty list is the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleUnion {
    rules: Vec<ZeroForcedRule>,
}

impl RuleUnion {
    /// Unions with more members make inclusion-exclusion impractical.
    pub const MAX_RULES: usize = 20;

    pub fn new(rules: Vec<ZeroForcedRule>) -> Self {
        RuleUnion { rules }
    }

    pub fn empty() -> Self {
        RuleUnion { rules: Vec::new() }
    }

    pub fn single(rule: ZeroForcedRule) -> Self {
        RuleUnion { rules: vec![rule] }
    }

    pub fn rules(&self) -> &[ZeroForcedRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Smallest member cutoff; `u64::MAX` for the empty union.
    pub fn cutoff_depth(&self) -> u64 {
        self.rules
            .iter()
            .map(|r| r.cutoff_depth)
            .min()
            .unwrap_or(u64::MAX)
    }

    pub fn admits(&self, d: &DigitString) -> bool {
        self.rules.iter().any(|r| r.admits(d))
    }

    /// Exact depth-`n` cell count by inclusion-exclusion over the members.
    pub fn count_cells(&self, n: u64) -> Result<BigUint> {
        let r = self.rules.len();
        if r > Self::MAX_RULES {
            return Err(Error::usage(format!(
                "inclusion-exclusion over {r} rules exceeds {}",
                Self::MAX_RULES
            )));
        }
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for subset in 1u32..(1u32 << r) {
            let mut forced = PositionSet::new();
            for (k, rule) in self.rules.iter().enumerate() {
                if subset & (1 << k) != 0 {
                    forced = forced.union(&rule.forced.truncate(n));
                }
            }
            let term = BigUint::one() << (n - forced.count_le(n));
            if subset.count_ones() % 2 == 1 {
                plus += term;
            } else {
                minus += term;
            }
        }
        Ok(plus - minus)
    }

    /// Exact depth-`n` cover inside `[0, span)`. The rule sets live in
    /// `[0,1)`, so `span` only widens the index range.
    pub fn materialize(&self, n: u32, span: u64, budget: &Budget) -> Result<CellCover> {
        if n == 0 {
            return Err(Error::usage("materialize needs depth >= 1"));
        }
        check_index_range(n, span)?;
        for rule in &self.rules {
            if rule.cutoff_depth < n as u64 {
                return Err(Error::usage(format!(
                    "rule known only to depth {} but depth {n} requested",
                    rule.cutoff_depth
                )));
            }
        }
        let total: BigUint = self
            .rules
            .iter()
            .map(|r| r.count_cells(n as u64))
            .fold(BigUint::zero(), |a, b| a + b);
        budget.check(&format!("materialize at depth {n}"), &total)?;
        let mut cells: Vec<u64> = Vec::new();
        for rule in &self.rules {
            let idx = rule.cell_indices(n);
            cells = merge_sorted(&cells, &idx);
        }
        CellCover::new(n, span, cells, Exactness::Exact)
    }
}

pub(crate) fn merge_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
