//! Sets of positive digit positions stored as sorted, disjoint, non-adjacent
//! inclusive ranges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PositionSet {
    ranges: Vec<(u64, u64)>,
}

impl PositionSet {
    pub fn new() -> Self {
        PositionSet { ranges: Vec::new() }
    }

    /// Builds from arbitrary inclusive ranges; empty ranges (`lo > hi`) are
    /// dropped, overlapping or adjacent ones merged. Position 0 is rejected.
    pub fn from_ranges<I: IntoIterator<Item = (u64, u64)>>(ranges: I) -> Result<Self> {
        let mut v: Vec<(u64, u64)> = ranges.into_iter().filter(|(a, b)| a <= b).collect();
        if v.iter().any(|&(a, _)| a == 0) {
            return Err(Error::usage("digit positions start at 1"));
        }
        v.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Ok(PositionSet { ranges: out })
    }

    pub fn from_positions<I: IntoIterator<Item = u64>>(positions: I) -> Result<Self> {
        Self::from_ranges(positions.into_iter().map(|p| (p, p)))
    }

    /// `{1, ..., n}`.
    pub fn full(n: u64) -> Self {
        if n == 0 {
            PositionSet::new()
        } else {
            PositionSet {
                ranges: vec![(1, n)],
            }
        }
    }

    pub fn ranges(&self) -> &[(u64, u64)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.ranges.last().map(|r| r.1)
    }

    pub fn contains(&self, p: u64) -> bool {
        match self.ranges.binary_search_by(|&(a, _)| a.cmp(&p)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => p <= self.ranges[i - 1].1,
        }
    }

    /// `|S ∩ [1, n]|`.
    pub fn count_le(&self, n: u64) -> u64 {
        let mut c = 0;
        for &(a, b) in &self.ranges {
            if a > n {
                break;
            }
            c += b.min(n) - a + 1;
        }
        c
    }

    pub fn len(&self) -> u64 {
        self.ranges.iter().map(|&(a, b)| b - a + 1).sum()
    }

    /// Restriction to `[1, n]`.
    pub fn truncate(&self, n: u64) -> Self {
        let ranges = self
            .ranges
            .iter()
            .filter(|&&(a, _)| a <= n)
            .map(|&(a, b)| (a, b.min(n)))
            .collect();
        PositionSet { ranges }
    }

    /// `[1, n] \ S`.
    pub fn complement_upto(&self, n: u64) -> Self {
        let mut out = Vec::new();
        let mut next = 1u64;
        for &(a, b) in &self.ranges {
            if a > n {
                break;
            }
            if a > next {
                out.push((next, a - 1));
            }
            next = b.saturating_add(1);
        }
        if next <= n {
            out.push((next, n));
        }
        PositionSet { ranges: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_ranges(self.ranges.iter().chain(other.ranges.iter()).copied())
            .expect("inputs already valid")
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.ranges.len() && j < other.ranges.len() {
            let (a1, b1) = self.ranges[i];
            let (a2, b2) = other.ranges[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        PositionSet { ranges: out }
    }

    /// Moves every position up by `offset`.
    pub fn shift(&self, offset: u64) -> Self {
        PositionSet {
            ranges: self
                .ranges
                .iter()
                .map(|&(a, b)| (a + offset, b + offset))
                .collect(),
        }
    }

    /// Positions of `self` inside `[lo, hi]`, renumbered so `lo` becomes 1.
    pub fn window(&self, lo: u64, hi: u64) -> Self {
        let ranges = self
            .ranges
            .iter()
            .filter(|&&(a, b)| b >= lo && a <= hi)
            .map(|&(a, b)| (a.max(lo) - lo + 1, b.min(hi) - lo + 1))
            .collect();
        PositionSet { ranges }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.ranges.iter().flat_map(|&(a, b)| a..=b)
    }

    /// Parses the line format used by position files: one position `p` or
    /// range `a..b` / `a-b` per line (inclusive), `#` comments, blank lines ok.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ranges = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let bad = || Error::parse(format!("line {}: bad position {tok:?}", ln + 1));
                let (a, b) = if let Some((a, b)) = tok.split_once("..") {
                    (a, b)
                } else if let Some((a, b)) = tok.split_once('-') {
                    (a, b)
                } else {
                    (tok, tok)
                };
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                ranges.push((a, b));
            }
        }
        Self::from_ranges(ranges)
    }
}

impl fmt::Display for PositionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ranges
            .iter()
            .map(|&(a, b)| {
                if a == b {
                    a.to_string()
                } else {
                    format!("{a}..{b}")
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn merges_and_counts() {
        let s = PositionSet::from_ranges([(5, 7), (1, 2), (3, 3), (10, 9)]).unwrap();
        assert_eq!(s.ranges(), &[(1, 3), (5, 7)]);
        assert_eq!(s.count_le(4), 3);
        assert_eq!(s.count_le(6), 5);
        assert!(s.contains(6) && !s.contains(4) && !s.contains(8));
        assert_eq!(s.complement_upto(9).ranges(), &[(4, 4), (8, 9)]);
        assert_eq!(s.window(2, 6).ranges(), &[(1, 2), (4, 5)]);
        assert!(PositionSet::from_positions([0]).is_err());
    }

    #[test]
    fn parses_position_files() {
        let s = PositionSet::parse("# free\n1\n3..5\n8-9, 11\n").unwrap();
        assert_eq!(s.ranges(), &[(1, 1), (3, 5), (8, 9), (11, 11)]);
        assert!(PositionSet::parse("x").is_err());
    }

    proptest! {
        #[test]
        fn set_algebra_matches_bitmaps(a in proptest::collection::vec(1u64..40, 0..20),
                                       b in proptest::collection::vec(1u64..40, 0..20)) {
            let sa = PositionSet::from_positions(a.iter().copied()).unwrap();
            let sb = PositionSet::from_positions(b.iter().copied()).unwrap();
            let inter = sa.intersection(&sb);
            let uni = sa.union(&sb);
            let comp = sa.complement_upto(40);
            for p in 1..=40u64 {
                let (ia, ib) = (a.contains(&p), b.contains(&p));
                prop_assert_eq!(inter.contains(p), ia && ib);
                prop_assert_eq!(uni.contains(p), ia || ib);
                prop_assert_eq!(comp.contains(p), !ia);
                prop_assert_eq!(sa.count_le(p), (1..=p).filter(|q| a.contains(q)).count() as u64);
            }
        }
    }
}
