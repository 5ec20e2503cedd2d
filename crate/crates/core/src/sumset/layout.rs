use crate::dyadic::{DigitSpec, RuleUnion, ZeroForcedRule};
use crate::error::{Error, Result};

/// Largest number of addends handled; capacities are stored as `u8`.
pub const MAX_ADDENDS: u64 = 64;

/// One digit block of a sum of `j` points. The block is cut into segments
/// on which every rule is either forced or free throughout; each
/// alternative fixes which rule every addend follows inside the block and
/// records, per segment, how many addends may put a 1 there (the column
/// capacity).
#[derive(Clone, Debug)]
pub(crate) struct LayoutBlock {
    pub offset: u64,
    /// Inclusive local position ranges, increasing, covering the block.
    pub segments: Vec<(u64, u64)>,
    /// `alts[a][k]`: capacity on segment `k` under alternative `a`.
    pub alts: Vec<Vec<u8>>,
}

impl LayoutBlock {
    fn new(offset: u64, len: u64, rule_sets: &[Vec<&ZeroForcedRule>]) -> Self {
        let mut cuts = vec![1, len + 1];
        for rs in rule_sets {
            for r in rs {
                for &(lo, hi) in r.forced().ranges() {
                    if lo > len {
                        break;
                    }
                    cuts.push(lo);
                    cuts.push((hi + 1).min(len + 1));
                }
            }
        }
        cuts.sort_unstable();
        cuts.dedup();
        let segments: Vec<(u64, u64)> = cuts.windows(2).map(|w| (w[0], w[1] - 1)).collect();
        let alts = rule_sets
            .iter()
            .map(|rs| {
                segments
                    .iter()
                    .map(|&(lo, _)| rs.iter().filter(|r| !r.is_forced(lo)).count() as u8)
                    .collect()
            })
            .collect();
        LayoutBlock {
            offset,
            segments,
            alts,
        }
    }
}

/// Column capacities of a `j`-fold sum, truncated at depth `n`.
#[derive(Clone, Debug)]
pub struct AddendLayout {
    pub(crate) j: u64,
    pub(crate) n: u64,
    pub(crate) blocks: Vec<LayoutBlock>,
}

/// Nondecreasing index tuples of length `j` over `0..r` (multisets).
pub fn multisets(r: usize, j: u64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    let mut cur = vec![0usize; j as usize];
    loop {
        out.push(cur.clone());
        // advance like an odometer keeping the tuple nondecreasing
        let mut k = cur.len();
        while k > 0 && cur[k - 1] == r - 1 {
            k -= 1;
        }
        if k == 0 {
            return out;
        }
        let v = cur[k - 1] + 1;
        for x in &mut cur[k - 1..] {
            *x = v;
        }
    }
}

fn check_j(j: u64) -> Result<()> {
    if j == 0 || j > MAX_ADDENDS {
        return Err(Error::usage(format!(
            "number of addends j={j} outside 1..={MAX_ADDENDS}"
        )));
    }
    Ok(())
}

impl AddendLayout {
    /// Every addend ranges over the whole set: per block, all multisets of
    /// the block's rules.
    pub fn from_spec(spec: &DigitSpec, j: u64, n: u64) -> Result<Self> {
        check_j(j)?;
        if n > spec.depth_limit() {
            return Err(Error::usage(format!(
                "set specified only to depth {} but depth {n} requested",
                spec.depth_limit()
            )));
        }
        let mut blocks = Vec::new();
        for (b, local) in spec.segments(n) {
            let rules = b.union.rules();
            let sets: Vec<Vec<&ZeroForcedRule>> = multisets(rules.len(), j)
                .iter()
                .map(|c| c.iter().map(|&k| &rules[k]).collect())
                .collect();
            blocks.push(LayoutBlock::new(b.offset, local, &sets));
        }
        Ok(AddendLayout { j, n, blocks })
    }

    /// A single block in which addend `k` follows `addends[k]`.
    pub fn from_addends(addends: &[&ZeroForcedRule], n: u64) -> Result<Self> {
        let j = addends.len() as u64;
        check_j(j)?;
        if let Some(r) = addends.iter().find(|r| r.cutoff_depth() < n) {
            return Err(Error::usage(format!(
                "rule known only to depth {} but depth {n} requested",
                r.cutoff_depth()
            )));
        }
        Ok(AddendLayout {
            j,
            n,
            blocks: vec![LayoutBlock::new(0, n, &[addends.to_vec()])],
        })
    }

    /// The sum `rules[combo[0]] + ... + rules[combo[j-1]]` of union members.
    pub fn from_union_combo(union: &RuleUnion, combo: &[usize], n: u64) -> Result<Self> {
        let rules = union.rules();
        let picked = combo
            .iter()
            .map(|&k| {
                rules
                    .get(k)
                    .ok_or_else(|| Error::usage(format!("union has no member {k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_addends(&picked, n)
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn depth(&self) -> u64 {
        self.n
    }
}
