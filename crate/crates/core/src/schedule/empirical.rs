//! Working-depth estimates of the constants `p_i`, `m_i` and `q_i(p)` whose
//! existence the construction asserts without a formula.
//!
//! * `Q^i_j` is a union of `r = |Z^i_j|` rule sets whose forced intervals
//!   are disjoint, so no single depth makes the whole union thin. Each
//!   member `q` is covered at its own depth `c`, which *certifies* when the
//!   member's `2^free(c)` cells satisfy `2^free(c)·2^(−cβ) < 1/r`,
//!   `β = α_j + 1/(2i)`; the `r` partial sums then total less than 1.
//!   For `Q^i_j(p)` exactly the `c <= p − 2j` certifying for the untruncated
//!   member are usable (beyond `p − 2j` every digit is free).
//! * `q_i(p) = min_{j,q} max{c certifying (j,q), c <= p − 2j} − 1` and
//!   `p_i = max_{j,q} (min certifying c + 2j) − 1`.
//! * `m_i` is the least `m` such that the equal-split measure on `T^i_j`
//!   obeys `μ(I) <= |I|^(α_j − 1/i)` at every depth in `[m, W]`, for all `j`.
//!
//! All values are estimates at the working depth `W`, never ground truth.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::intervals::IntervalSchedule;
use super::partition::z_partition;
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::positions::PositionSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalEstimates {
    pub i: u64,
    pub working_depth: u64,
    pub p: Option<u64>,
    pub m: u64,
    /// Indexed `[j−1][q−1]`: the depths `c <= W` at which member `q` of
    /// the `Q^i_j` union certifies.
    pub certified: Vec<Vec<PositionSet>>,
}

impl EmpiricalEstimates {
    /// `q_i(p)`, or `None` when some `j` has no certificate below `p − 2j`
    /// or `p − 2j` lies beyond the working depth.
    pub fn q_of(&self, p: u64) -> Option<u64> {
        let mut best = u64::MAX;
        for (idx, members) in self.certified.iter().enumerate() {
            let top = p.checked_sub(2 * (idx as u64 + 1))?;
            if top > self.working_depth {
                return None;
            }
            for good in members {
                best = best.min(good.truncate(top).max()?);
            }
        }
        Some(best - 1)
    }

    /// Least `p` with `q_i(p) > bound`; `q_i` is nondecreasing so every
    /// larger `p` works too.
    pub fn least_p_with_q_above(&self, bound: u64) -> Option<u64> {
        let mut p = 0u64;
        for (idx, members) in self.certified.iter().enumerate() {
            for good in members {
                let c = good.iter_from(bound.checked_add(2)?)?;
                p = p.max(c + 2 * (idx as u64 + 1));
            }
        }
        Some(p)
    }
}

trait FirstFrom {
    fn iter_from(&self, lo: u64) -> Option<u64>;
}

impl FirstFrom for PositionSet {
    fn iter_from(&self, lo: u64) -> Option<u64> {
        self.ranges()
            .iter()
            .find(|&&(_, b)| b >= lo)
            .map(|&(a, _)| a.max(lo))
    }
}

/// Depths `c <= w` at which one member of an `r`-fold union, with forced
/// positions `forced`, has `2^free(c)·2^(−βc) < 1/r`: with `β = a/b` that is
/// `a·c − b·free(c) >= bitlen(r^b)`.
fn certifying_depths(forced: &PositionSet, beta: &Q, r: u64, w: u64) -> Result<PositionSet> {
    let a = *beta.numer() as i128;
    let b = *beta.denom() as i128;
    let k = num_traits::pow(BigUint::from(r), b as usize).bits() as i128;
    let mut good: Vec<(u64, u64)> = Vec::new();
    let mut free = 0i128;
    let mut ranges = forced.ranges().iter().peekable();
    for c in 1..=w {
        while ranges.next_if(|&&(_, hi)| hi < c).is_some() {}
        let is_forced = ranges.peek().is_some_and(|&&(lo, _)| lo <= c);
        if !is_forced {
            free += 1;
        }
        if a * c as i128 - b * free >= k {
            match good.last_mut() {
                Some(last) if last.1 + 1 == c => last.1 = c,
                _ => good.push((c, c)),
            }
        }
    }
    PositionSet::from_ranges(good)
}

/// Last depth `n <= w` where `b·free(n) < a·n` for the rule forcing
/// `forced`; violations can only peak at the end of a forced run.
fn last_mass_violation(forced: &PositionSet, kappa: &Q, w: u64) -> Option<u64> {
    if *kappa <= Q::from_integer(0) {
        return None;
    }
    let a = *kappa.numer() as u128;
    let b = *kappa.denom() as u128;
    let mut last = None;
    for &(_, hi) in forced.ranges() {
        let n = hi.min(w);
        let free = (n - forced.count_le(n)) as u128;
        if b * free < a * n as u128 {
            last = Some(n);
        }
        if hi >= w {
            break;
        }
    }
    last
}

/// Estimates `p_i`, `m_i` and the certifying depths behind `q_i` for the
/// schedule `sched` at working depth `min(working_depth, covered depth)`.
pub fn estimate_constants(
    sched: &IntervalSchedule,
    working_depth: u64,
) -> Result<EmpiricalEstimates> {
    let i = sched.i;
    let w = working_depth.min(sched.covered_depth_u64());
    if w == 0 {
        return Err(Error::usage("working depth must be positive"));
    }
    let z = z_partition(i)?;
    let half_inv_i = Q::new(1, 2 * i as i64);
    let inv_i = Q::new(1, i as i64);
    let mut certified = Vec::new();
    let mut p: Option<u64> = Some(0);
    let mut m = 1u64;
    for j in 1..=i {
        let alpha = sched.alphas.get(j)?;
        let r = z.block_len(j);
        let mut members = Vec::new();
        for q in 1..=r {
            let xi = sched.xi_set(j, q, w)?.value;
            let good = certifying_depths(&xi, &(alpha + half_inv_i), r, w)?;
            p = match (p, good.ranges().first()) {
                (Some(p), Some(&(c, _))) => Some(p.max(c + 2 * j - 1)),
                _ => None,
            };
            members.push(good);
        }
        certified.push(members);
        let t = sched.t_rule(j, w)?;
        if let Some(n) = last_mass_violation(t.forced(), &(alpha - inv_i), w) {
            m = m.max(n + 1);
        }
    }
    Ok(EmpiricalEstimates {
        i,
        working_depth: w,
        p,
        m,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cmp_pow_pow2;
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};
    use num_bigint::BigInt;
    use std::cmp::Ordering;

    fn toy2() -> IntervalSchedule {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        build_interval_schedule(2, &a, 6, GrowthMode::toy(4).unwrap()).unwrap()
    }

    #[test]
    fn certified_depths_match_direct_count() {
        // oracle: r·|cells of member q at depth c| < 2^(βc), compared exactly
        let s = toy2();
        let w = 6000;
        let est = estimate_constants(&s, w).unwrap();
        for j in 1..=2u64 {
            let beta = s.alphas.get(j).unwrap() + Q::new(1, 4);
            let union = s.q_union(j, w + 2 * j).unwrap();
            let r = union.rules().len() as u64;
            for (q, rule) in union.rules().iter().enumerate() {
                for c in (1..=w).step_by(7).chain([136, 137, 138, 964, 966, 5067]) {
                    let n = rule.count_cells(c) * r;
                    let direct = cmp_pow_pow2(
                        &n,
                        *beta.denom() as u64,
                        &BigInt::from(*beta.numer() as u64 * c),
                    ) == Ordering::Less;
                    assert_eq!(
                        est.certified[j as usize - 1][q].contains(c),
                        direct,
                        "j={j} q={q} c={c}"
                    );
                }
            }
        }
        assert!(est.certified[0][0].contains(136));
    }

    #[test]
    fn thresholds_are_consistent() {
        let s = toy2();
        let est = estimate_constants(&s, 40_000).unwrap();
        let p = est.p.expect("certificates exist at this depth");
        assert!(est.q_of(p).is_none());
        let q = est.q_of(p + 1).expect("q defined just past p");
        assert!(q >= 1);
        // q is nondecreasing
        let mut prev = 0;
        for pp in (p + 1..=39_000).step_by(97) {
            let q = est.q_of(pp).unwrap();
            assert!(q >= prev);
            prev = q;
        }
        let target = 500;
        let pz = est.least_p_with_q_above(target).unwrap();
        assert!(est.q_of(pz).unwrap() > target);
        assert!(est.q_of(pz - 1).is_none_or(|q| q <= target));
    }

    #[test]
    fn mass_threshold_checks_every_depth() {
        let s = toy2();
        let w = 40_000;
        let est = estimate_constants(&s, w).unwrap();
        for j in 1..=2u64 {
            let kappa = s.alphas.get(j).unwrap() - Q::new(1, 2);
            let t = s.t_rule(j, w).unwrap();
            for n in est.m..=w {
                let free = t.free_count(n) as i64;
                assert!(
                    Q::from_integer(free) >= kappa * Q::from_integer(n as i64),
                    "j={j} n={n}"
                );
            }
        }
    }
}
