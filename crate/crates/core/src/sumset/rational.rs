use std::io::Write;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cover::{sumset_runs, SumsetCover, SumsetRuns};
use crate::dyadic::DigitSpec;
use crate::error::{Budget, Error, Result};

/// Half-open intervals `[p/D, q/D)` over one common denominator, plus
/// exact points `k/D` known to belong to the covered set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCover {
    denominator: BigUint,
    intervals: Vec<(BigUint, BigUint)>,
    points: Vec<BigUint>,
}

fn normalize(mut iv: Vec<(BigUint, BigUint)>) -> Vec<(BigUint, BigUint)> {
    iv.retain(|(p, q)| p < q);
    iv.sort();
    let mut out: Vec<(BigUint, BigUint)> = Vec::with_capacity(iv.len());
    for (p, q) in iv {
        match out.last_mut() {
            Some(last) if p <= last.1 => {
                if q > last.1 {
                    last.1 = q;
                }
            }
            _ => out.push((p, q)),
        }
    }
    out
}

impl RationalCover {
    /// Intervals are sorted and merged; points are sorted and deduplicated.
    pub fn new(
        denominator: BigUint,
        intervals: Vec<(BigUint, BigUint)>,
        mut points: Vec<BigUint>,
    ) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::usage("denominator must be positive"));
        }
        points.sort();
        points.dedup();
        Ok(RationalCover {
            denominator,
            intervals: normalize(intervals),
            points,
        })
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn intervals(&self) -> &[(BigUint, BigUint)] {
        &self.intervals
    }

    pub fn points(&self) -> &[BigUint] {
        &self.points
    }

    /// Same cover over a multiple of the current denominator.
    pub fn rescale(&self, denominator: &BigUint) -> Result<Self> {
        let (f, r) = denominator.div_rem(&self.denominator);
        if !r.is_zero() {
            return Err(Error::usage(format!(
                "{denominator} is not a multiple of {}",
                self.denominator
            )));
        }
        Ok(RationalCover {
            denominator: denominator.clone(),
            intervals: self
                .intervals
                .iter()
                .map(|(p, q)| (p * &f, q * &f))
                .collect(),
            points: self.points.iter().map(|p| p * &f).collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let d = self.denominator.lcm(&other.denominator);
        let a = self.rescale(&d)?;
        let b = other.rescale(&d)?;
        Self::new(
            d,
            a.intervals.into_iter().chain(b.intervals).collect(),
            a.points.into_iter().chain(b.points).collect(),
        )
    }

    /// Whether `num/den` lies in one of the intervals.
    pub fn covers(&self, num: &BigUint, den: &BigUint) -> bool {
        // p/D <= num/den < q/D  <=>  p·den <= num·D < q·den
        let x = num * &self.denominator;
        let idx = self.intervals.partition_point(|(p, _)| p * den <= x);
        idx > 0 && {
            let (_, q) = &self.intervals[idx - 1];
            x < q * den
        }
    }

    /// Maximal subintervals of `[lo, hi)` (in units of `1/D`) not covered.
    pub fn gaps_within(&self, lo: &BigUint, hi: &BigUint) -> Vec<(BigUint, BigUint)> {
        let mut out = Vec::new();
        let mut at = lo.clone();
        for (p, q) in &self.intervals {
            if q <= &at {
                continue;
            }
            if p >= hi {
                break;
            }
            if p > &at {
                out.push((at.clone(), p.clone()));
            }
            at = q.clone();
        }
        if &at < hi {
            out.push((at, hi.clone()));
        }
        out
    }

    /// Total covered length as `(numerator, D)`.
    pub fn measure(&self) -> (BigUint, BigUint) {
        let total = self.intervals.iter().map(|(p, q)| q - p).sum();
        (total, self.denominator.clone())
    }
}

/// `A_j / j` over the denominator `j·2^n`: the outer intervals
/// `[K, K+j)` and the exact points `K`.
pub fn scale_down(s: &SumsetCover) -> RationalCover {
    let j = BigUint::from(s.j());
    let d = &j * (BigUint::one() << s.depth());
    let intervals = s
        .base_indices()
        .iter()
        .map(|&k| (BigUint::from(k), BigUint::from(k) + &j))
        .collect();
    let points = s.base_indices().iter().map(|&k| BigUint::from(k)).collect();
    RationalCover::new(d, intervals, points).expect("positive denominator")
}

/// [`scale_down`] for run-encoded sums; the exact points kept are the run
/// ends.
pub fn scale_down_runs(s: &SumsetRuns) -> RationalCover {
    let j = BigUint::from(s.j());
    let d = &j * (BigUint::one() << s.depth());
    let intervals = s
        .runs()
        .iter()
        .map(|&(a, b)| (BigUint::from(a), BigUint::from(b) + &j))
        .collect();
    let points = s
        .runs()
        .iter()
        .flat_map(|&(a, b)| [BigUint::from(a), BigUint::from(b)])
        .collect();
    RationalCover::new(d, intervals, points).expect("positive denominator")
}

/// `E = ∪_{j <= j_max} A_j / j` at depth `n`, over `lcm(1..j_max)·2^n`.
pub fn e_set(spec: &DigitSpec, j_max: u64, n: u32, budget: &Budget) -> Result<RationalCover> {
    if j_max == 0 {
        return Err(Error::usage("j_max must be at least 1"));
    }
    let l = (1..=j_max).fold(BigUint::one(), |acc, j| acc.lcm(&BigUint::from(j)));
    let d = l << n;
    let mut out = RationalCover::new(d.clone(), Vec::new(), Vec::new())?;
    for j in 1..=j_max {
        let part = scale_down_runs(&sumset_runs(spec, j, n, budget)?).rescale(&d)?;
        out = out.union(&part)?;
    }
    Ok(out)
}

/// `D d` header, then one `p q` line per interval.
pub fn write_rational_text<W: Write>(c: &RationalCover, mut w: W) -> Result<()> {
    writeln!(w, "D {}", c.denominator)?;
    for (p, q) in &c.intervals {
        writeln!(w, "{p} {q}")?;
    }
    Ok(())
}

pub fn read_rational_text(text: &str) -> Result<RationalCover> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty rational cover"))?;
    let d = header
        .strip_prefix("D ")
        .and_then(|t| t.trim().parse::<BigUint>().ok())
        .ok_or_else(|| Error::parse(format!("bad header {header:?}")))?;
    let mut iv = Vec::new();
    for l in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        let parse = |t: &str| {
            t.parse::<BigUint>()
                .map_err(|_| Error::parse(format!("bad line {l:?}")))
        };
        if f.len() != 2 {
            return Err(Error::parse(format!("bad line {l:?}")));
        }
        iv.push((parse(f[0])?, parse(f[1])?));
    }
    RationalCover::new(d, iv, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{RuleUnion, ZeroForcedRule};
    use crate::positions::PositionSet;

    use crate::sumset::sumset_cover_dp;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn half_set() -> DigitSpec {
        DigitSpec::from(RuleUnion::single(
            ZeroForcedRule::new(PositionSet::from_ranges([(2, 6)]).unwrap(), 6).unwrap(),
        ))
    }

    #[test]
    fn rescaled_sums() {
        let b = Budget::default();
        let a = half_set();
        let s2 = sumset_cover_dp(&a, 2, 2, &b).unwrap();
        let r = scale_down(&s2);
        // A_2/2 = {0, 1/4, 1/2} over D = 8
        assert_eq!(r.denominator(), &BigUint::from(8u32));
        assert_eq!(r.points(), big(&[0, 2, 4]).as_slice());
        let s1 = sumset_cover_dp(&a, 1, 2, &b).unwrap();
        let r1 = scale_down(&s1);
        assert_eq!(r1.points(), big(&[0, 2]).as_slice());
        let e = e_set(&a, 2, 2, &b).unwrap();
        assert_eq!(e.denominator(), &BigUint::from(8u32));
        for part in [&r, &r1] {
            let p = part.rescale(e.denominator()).unwrap();
            for (lo, hi) in p.intervals() {
                assert!(e.gaps_within(lo, hi).is_empty());
            }
            for x in p.points() {
                assert!(e.points().contains(x));
            }
        }
    }

    #[test]
    fn gaps_and_membership() {
        let c = RationalCover::new(
            BigUint::from(10u32),
            vec![
                (BigUint::from(0u32), BigUint::from(2u32)),
                (BigUint::from(5u32), BigUint::from(7u32)),
                (BigUint::from(1u32), BigUint::from(3u32)),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(c.intervals().len(), 2);
        assert_eq!(
            c.gaps_within(&BigUint::from(0u32), &BigUint::from(10u32)),
            vec![
                (BigUint::from(3u32), BigUint::from(5u32)),
                (BigUint::from(7u32), BigUint::from(10u32))
            ]
        );
        assert!(c.covers(&BigUint::from(1u32), &BigUint::from(4u32)));
        assert!(!c.covers(&BigUint::from(2u32), &BigUint::from(5u32)));
        assert!(c.covers(&BigUint::from(3u32), &BigUint::from(5u32)));
        assert!(!c.covers(&BigUint::from(7u32), &BigUint::from(10u32)));
        let mut buf = Vec::new();
        write_rational_text(&c, &mut buf).unwrap();
        assert_eq!(
            read_rational_text(std::str::from_utf8(&buf).unwrap()).unwrap(),
            c
        );
        assert_eq!(c.measure(), (BigUint::from(5u32), BigUint::from(10u32)));
    }
}
