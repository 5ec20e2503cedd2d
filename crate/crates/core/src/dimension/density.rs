use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Q;
use crate::positions::PositionSet;
use crate::schedule::{z_partition, IntervalSchedule};

/// Prefix densities `|S ∩ [1,n]| / n` for `n = 1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    counts: Vec<u64>,
    /// `argmin[n−1]`: a prefix length attaining the minimum over `1..=n`.
    argmin: Vec<u64>,
}

impl DensityProfile {
    pub fn len(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, n: u64) -> u64 {
        self.counts[(n - 1) as usize]
    }

    pub fn density(&self, n: u64) -> Q {
        Q::new(self.count(n) as i64, n as i64)
    }

    /// `min_{m <= n} |S ∩ [1,m]|/m`.
    pub fn running_min(&self, n: u64) -> Q {
        self.density(self.argmin[(n - 1) as usize])
    }

    /// `min_{a <= m <= b}` of the prefix density, with a minimizer.
    pub fn min_between(&self, a: u64, b: u64) -> (Q, u64) {
        (a..=b)
            .map(|m| (self.density(m), m))
            .min()
            .expect("nonempty range")
    }
}

/// Exact prefix densities of `s` up to `n`.
pub fn lower_density(s: &PositionSet, n: u64) -> DensityProfile {
    let mut counts = Vec::with_capacity(n as usize);
    let mut argmin: Vec<u64> = Vec::with_capacity(n as usize);
    let mut ranges = s.ranges().iter().peekable();
    let mut c = 0u64;
    for m in 1..=n {
        while ranges.next_if(|&&(_, hi)| hi < m).is_some() {}
        if ranges.peek().is_some_and(|&&(lo, _)| lo <= m) {
            c += 1;
        }
        counts.push(c);
        let best = match argmin.last() {
            Some(&b)
                if Q::new(counts[(b - 1) as usize] as i64, b as i64)
                    <= Q::new(c as i64, m as i64) =>
            {
                b
            }
            _ => m,
        };
        argmin.push(best);
    }
    DensityProfile { counts, argmin }
}

/// Where the free positions of the `A^i_j` construction are headed: the
/// per-interval ratios `γ_s / (η_s − 2j)` over the `s` with `t = j`,
/// `k >= 1`, which tend to `α_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTarget {
    pub j: u64,
    pub limit: Q,
    pub ratios: Vec<(u64, BigRational)>,
}

pub fn density_target(sched: &IntervalSchedule, j: u64) -> Result<DensityTarget> {
    if j == 0 || j > sched.i {
        return Err(Error::usage(format!("j={j} outside 1..={}", sched.i)));
    }
    z_partition(sched.i)?;
    let mut ratios = Vec::new();
    for e in &sched.entries {
        if e.loc.t != j || e.loc.k == 0 {
            continue;
        }
        let den = &e.eta - BigUint::from(2 * j);
        ratios.push((
            e.s,
            BigRational::new(BigInt::from(e.gamma.clone()), BigInt::from(den)),
        ));
    }
    Ok(DensityTarget {
        j,
        limit: sched.alphas.get(j)?,
        ratios,
    })
}
