use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::CellCover;
use crate::error::{Error, Result};
use crate::exact::{Dyadic, Q};
use crate::schedule::{EmpiricalEstimates, IntervalSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    /// The sum is strictly below 1.
    Below,
    /// The sum is at least 1.
    NotBelow,
    /// Precision ran out before the two could be separated.
    Undecided,
}

/// `Σ |I|^β` over a cover given as `(depth, number of cells)` groups,
/// enclosed in `[lo, hi]` by dyadic rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub beta: Q,
    pub terms: Vec<(u64, BigUint)>,
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub verdict: CertificateVerdict,
}

/// `floor` and `ceil` of `count · 2^(−dβ) · 2^k` for `β = a/b`, via the
/// integer `b`-th root of `count^b · 2^(kb − da)`.
fn scaled_term(count: &BigUint, d: u64, a: u64, b: u64, k: u64) -> (BigUint, BigUint) {
    let base = num_traits::pow(count.clone(), b as usize);
    let up = (k as u128) * (b as u128);
    let down = (d as u128) * (a as u128);
    let (x, exact) = if up >= down {
        (base << ((up - down) as u64), true)
    } else {
        let s = (down - up) as u64;
        let q = &base >> s;
        let exact = (&q << s) == base;
        (q, exact)
    };
    let r = x.nth_root(b as u32);
    let hit = exact && num_traits::pow(r.clone(), b as usize) == x;
    let ceil = if hit { r.clone() } else { &r + 1u32 };
    (r, ceil)
}

/// Exact test of `Σ |I|^β < 1` with `β ∈ (0, 1]` rational.
pub fn covering_sum_certificate(terms: &[(u64, BigUint)], beta: Q) -> Result<CoveringCertificate> {
    if beta <= Q::from_integer(0) || beta > Q::from_integer(1) {
        return Err(Error::usage(format!("exponent {beta} outside (0, 1]")));
    }
    let (a, b) = (*beta.numer() as u64, *beta.denom() as u64);
    let deepest = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let mut k = 64u64;
    loop {
        let mut lo = BigUint::zero();
        let mut hi = BigUint::zero();
        for (d, count) in terms {
            if count.is_zero() {
                continue;
            }
            let (f, c) = scaled_term(count, *d, a, b, k);
            lo += f;
            hi += c;
        }
        let one = BigUint::one() << k;
        let verdict = if hi < one {
            CertificateVerdict::Below
        } else if lo >= one {
            CertificateVerdict::NotBelow
        } else {
            CertificateVerdict::Undecided
        };
        if verdict != CertificateVerdict::Undecided || k > 4 * deepest + 4096 {
            return Ok(CoveringCertificate {
                beta,
                terms: terms.to_vec(),
                lo: Dyadic::new(lo, k),
                hi: Dyadic::new(hi, k),
                verdict,
            });
        }
        k *= 4;
    }
}

/// One group per cover: all cells share the cover's depth.
pub fn cover_terms(cover: &CellCover) -> Vec<(u64, BigUint)> {
    vec![(cover.depth() as u64, BigUint::from(cover.len()))]
}

/// Covers each member `q` of `Q^i_j(p)` by its cells at the deepest
/// certifying depth `c <= p − 2j` and certifies the total at exponent
/// `α_j + 1/(2i)`. The depths come from the estimates; the sum itself is
/// recomputed from exact cell counts.
pub fn q_cover_certificate(
    sched: &IntervalSchedule,
    est: &EmpiricalEstimates,
    j: u64,
    p: u64,
) -> Result<CoveringCertificate> {
    let top = p
        .checked_sub(2 * j)
        .ok_or_else(|| Error::usage("p must exceed 2j"))?;
    let union = sched.q_union(j, p)?;
    let members = est
        .certified
        .get((j - 1) as usize)
        .ok_or_else(|| Error::usage(format!("no estimates for j={j}")))?;
    let mut terms = Vec::new();
    for (rule, good) in union.rules().iter().zip(members) {
        let c = good
            .truncate(top)
            .max()
            .ok_or_else(|| Error::usage(format!("no certifying depth below {top} for j={j}")))?;
        terms.push((c, rule.count_cells(c)));
    }
    let beta = sched.alphas.get(j)? + Q::new(1, 2 * sched.i as i64);
    covering_sum_certificate(&terms, beta)
}
