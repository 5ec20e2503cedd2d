use std::io::Write;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::engine::{contains_sum, count_sums, sum_runs, sum_set};
use super::layout::AddendLayout;
use crate::bits::BitSet;
use crate::dyadic::{check_index_range, CellCover, DigitSpec, Exactness};
use crate::error::{Budget, Error, Result};

/// The `j`-fold sums of depth-`n` truncated points: `K·2^-n` is a true
/// point of the sumset for every listed `K` (zero tails are admissible),
/// and every point of the sumset lies in `[K, K+j)·2^-n` for some `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetCover {
    j: u64,
    depth: u32,
    base_indices: Vec<u64>,
}

impl SumsetCover {
    pub fn new(j: u64, depth: u32, base_indices: Vec<u64>) -> Result<Self> {
        if j == 0 {
            return Err(Error::usage("sumsets need j >= 1"));
        }
        let limit = check_index_range(depth, j)?;
        if base_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("sum indices must be strictly increasing"));
        }
        if base_indices.last().is_some_and(|&k| k > limit - j) {
            return Err(Error::usage("sum index exceeds j(2^n - 1)"));
        }
        Ok(SumsetCover {
            j,
            depth,
            base_indices,
        })
    }

    pub(crate) fn from_bits(j: u64, depth: u32, bits: &BitSet) -> Result<Self> {
        Self::new(j, depth, bits.to_vec())
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn base_indices(&self) -> &[u64] {
        &self.base_indices
    }

    pub fn len(&self) -> usize {
        self.base_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_indices.is_empty()
    }

    pub fn contains_index(&self, k: u64) -> bool {
        self.base_indices.binary_search(&k).is_ok()
    }

    /// The tail bound `j·2^-n` as `(numerator, denominator)`.
    pub fn tail_bound(&self) -> (BigUint, BigUint) {
        (BigUint::from(self.j), BigUint::one() << self.depth)
    }

    /// Cells `K, ..., K+j-1` for every `K`, inside `[0, j)`.
    pub fn outer_cover(&self) -> Result<CellCover> {
        let mut cells = Vec::with_capacity(self.base_indices.len() * self.j as usize);
        for &k in &self.base_indices {
            cells.extend(k..k + self.j);
        }
        CellCover::from_unsorted(self.depth, self.j, cells, Exactness::Outer)
    }
}

fn check_cover_input(cover: &CellCover, j: u64) -> Result<()> {
    if j == 0 {
        return Err(Error::usage("sumsets need j >= 1"));
    }
    if cover.span() != 1 {
        return Err(Error::usage("sumset inputs must live in [0,1) (span 1)"));
    }
    Ok(())
}

/// Exact `j`-fold sums of a digit-specified set at depth `n`, by the digit
/// column pass (no enumeration of tuples).
pub fn sumset_cover_dp(spec: &DigitSpec, j: u64, n: u32, budget: &Budget) -> Result<SumsetCover> {
    let layout = AddendLayout::from_spec(spec, j, n as u64)?;
    let bits = sum_set(&layout, budget)?;
    SumsetCover::from_bits(j, n, &bits)
}

/// Sums `K` of `j` truncated members as maximal runs `a..=b` of
/// consecutive integers. Cost follows the number of runs, not the index
/// range, so sets with long free stretches stay cheap at depth ~60.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetRuns {
    j: u64,
    depth: u32,
    runs: Vec<(u64, u64)>,
}

impl SumsetRuns {
    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn runs(&self) -> &[(u64, u64)] {
        &self.runs
    }

    /// Number of sums (cells).
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(a, b)| b - a + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn contains_index(&self, k: u64) -> bool {
        let i = self.runs.partition_point(|&(a, _)| a <= k);
        i > 0 && self.runs[i - 1].1 >= k
    }
}

pub fn sumset_runs(spec: &DigitSpec, j: u64, n: u32, budget: &Budget) -> Result<SumsetRuns> {
    let layout = AddendLayout::from_spec(spec, j, n as u64)?;
    let mut runs = sum_runs(&layout, budget)?;
    if layout.blocks.iter().any(|b| b.alts.is_empty()) {
        runs.clear();
    }
    Ok(SumsetRuns { j, depth: n, runs })
}

/// Whether `k·2^-n` is a sum of `j` members truncated at depth `n`; any
/// depth, one pass over the digits of `k`.
pub fn sumset_contains(spec: &DigitSpec, j: u64, n: u64, k: &BigUint) -> Result<bool> {
    let layout = AddendLayout::from_spec(spec, j, n)?;
    if layout.blocks.iter().any(|b| b.alts.is_empty()) {
        return Ok(false);
    }
    Ok(contains_sum(&layout, k))
}

/// Sums of an explicit layout (fixed rule per addend, or all multisets).
pub fn sumset_of_layout(layout: &AddendLayout, budget: &Budget) -> Result<SumsetCover> {
    let n = u32::try_from(layout.depth()).map_err(|_| Error::usage("depth too large"))?;
    let bits = sum_set(layout, budget)?;
    SumsetCover::from_bits(layout.j(), n, &bits)
}

/// Exact number of distinct `K` (the inner count of the sumset at depth
/// `n`), at any depth the time allows.
pub fn count_sumset_cells(spec: &DigitSpec, j: u64, n: u64) -> Result<BigUint> {
    count_layout(&AddendLayout::from_spec(spec, j, n)?)
}

/// Deepest layout [`count_layout`] accepts. The pass is quadratic in the
/// depth (one big-integer add per position), so deeper counts are refused.
pub const MAX_COUNT_DEPTH: u64 = 1 << 22;

pub fn count_layout(layout: &AddendLayout) -> Result<BigUint> {
    if layout.depth() > MAX_COUNT_DEPTH {
        return Err(Error::usage(format!(
            "counting sums to depth {} exceeds the limit {MAX_COUNT_DEPTH}",
            layout.depth()
        )));
    }
    Ok(count_sums(layout))
}

/// Sums of an arbitrary exact cover by repeated shifted unions
/// (`S_{k+1} = ∪_{c} S_k + c`).
pub fn sumset_of_cover(cover: &CellCover, j: u64, budget: &Budget) -> Result<SumsetCover> {
    check_cover_input(cover, j)?;
    let n = cover.depth();
    let range = check_index_range(n, j)?;
    budget.check("sumset index range", &range)?;
    let work = (cover.len() as u128) * (j as u128) * (range as u128 / 64 + 1);
    budget.check("sumset convolution work (words)", &(work / 64))?;
    let mut s = BitSet::new(range);
    if cover.is_empty() {
        return SumsetCover::from_bits(j, n, &s);
    }
    s.insert(0);
    for _ in 0..j {
        let mut next = BitSet::new(range);
        for &c in cover.cells() {
            next.or_shifted(&s, c);
        }
        s = next;
    }
    SumsetCover::from_bits(j, n, &s)
}

/// Independent oracle: every multiset of `j` cells, summed.
pub fn brute_sumset(cover: &CellCover, j: u64, budget: &Budget) -> Result<SumsetCover> {
    check_cover_input(cover, j)?;
    let m = cover.len() as u64;
    // number of multisets C(m+j-1, j), computed exactly
    let mut tuples = BigUint::one();
    for k in 0..j {
        tuples = tuples * BigUint::from(m + k) / BigUint::from(k + 1);
    }
    budget.check(
        "brute-force sumset tuples (use the digit DP instead)",
        &tuples,
    )?;
    let cells = cover.cells();
    let mut out = Vec::new();
    if m > 0 {
        let mut idx = vec![0usize; j as usize];
        loop {
            out.push(idx.iter().map(|&k| cells[k]).sum::<u64>());
            let mut k = idx.len();
            while k > 0 && idx[k - 1] == cells.len() - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            let v = idx[k - 1] + 1;
            for x in &mut idx[k - 1..] {
                *x = v;
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    SumsetCover::new(j, cover.depth(), out)
}

/// `sumset depth n j J tail_num J tail_den 2^n`, then one index per line.
pub fn write_sumset_text<W: Write>(s: &SumsetCover, mut w: W) -> Result<()> {
    let (tn, td) = s.tail_bound();
    writeln!(
        w,
        "sumset depth {} span {} j {} tail_num {tn} tail_den {td}",
        s.depth, s.j, s.j
    )?;
    for k in &s.base_indices {
        writeln!(w, "{k}")?;
    }
    Ok(())
}

pub fn read_sumset_text(text: &str) -> Result<SumsetCover> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty sumset file"))?;
    let t: Vec<&str> = header.split_whitespace().collect();
    let bad = || Error::parse(format!("bad sumset header {header:?}"));
    if t.len() != 11 || t[0] != "sumset" || t[1] != "depth" || t[5] != "j" {
        return Err(bad());
    }
    let depth: u32 = t[2].parse().map_err(|_| bad())?;
    let j: u64 = t[6].parse().map_err(|_| bad())?;
    let s = SumsetCover::new(
        j,
        depth,
        lines
            .map(|l| {
                l.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(format!("bad sum index {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let (tn, td) = s.tail_bound();
    if t[8] != tn.to_string() || t[10] != td.to_string() {
        return Err(bad());
    }
    Ok(s)
}
