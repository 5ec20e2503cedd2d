use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_index_range, CellCover, DigitString, Exactness, RuleUnion};
use crate::error::{Budget, Error, Result};

/// One block of a concatenated digit specification: digits
/// `offset+1 ..= offset+len` must form (a prefix of) a member of `union`,
/// with the union's positions counted from the block start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecBlock {
    pub offset: u64,
    pub len: u64,
    pub union: RuleUnion,
}

/// A set given block-by-block: `x` belongs iff every digit block lies in
/// the block's rule union. A plain [`RuleUnion`] is the one-block case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitSpec {
    blocks: Vec<SpecBlock>,
}

impl DigitSpec {
    pub fn from_union(union: RuleUnion) -> Self {
        let len = union.cutoff_depth();
        DigitSpec {
            blocks: vec![SpecBlock {
                offset: 0,
                len,
                union,
            }],
        }
    }

    /// Consecutive blocks `(len, union)` starting at position 1.
    pub fn from_blocks(blocks: Vec<(u64, RuleUnion)>) -> Result<Self> {
        let mut offset = 0u64;
        let mut out = Vec::with_capacity(blocks.len());
        for (len, union) in blocks {
            if len == 0 {
                return Err(Error::usage("spec blocks must be nonempty"));
            }
            if union.cutoff_depth() < len {
                return Err(Error::usage(format!(
                    "block of length {len} backed by rules known only to depth {}",
                    union.cutoff_depth()
                )));
            }
            out.push(SpecBlock { offset, len, union });
            offset = offset.saturating_add(len);
        }
        Ok(DigitSpec { blocks: out })
    }

    pub fn blocks(&self) -> &[SpecBlock] {
        &self.blocks
    }

    /// Number of digits the specification determines.
    pub fn depth_limit(&self) -> u64 {
        self.blocks
            .last()
            .map(|b| b.offset.saturating_add(b.len))
            .unwrap_or(0)
    }

    fn check_depth(&self, n: u64) -> Result<()> {
        if n > self.depth_limit() {
            return Err(Error::usage(format!(
                "set specified only to depth {} but depth {n} requested",
                self.depth_limit()
            )));
        }
        Ok(())
    }

    /// The blocks meeting `[1, n]` with their truncated local lengths.
    pub fn segments(&self, n: u64) -> impl Iterator<Item = (&SpecBlock, u64)> + '_ {
        self.blocks
            .iter()
            .take_while(move |b| b.offset < n)
            .map(move |b| (b, b.len.min(n - b.offset)))
    }

    pub fn admits(&self, d: &DigitString) -> bool {
        if d.len() > self.depth_limit() {
            return false;
        }
        self.segments(d.len()).all(|(b, local)| {
            let w = d.window(b.offset + 1, b.offset + local);
            b.union.admits(&w)
        })
    }

    /// Exact number of depth-`n` cells (product over blocks).
    pub fn count_cells(&self, n: u64) -> Result<BigUint> {
        self.check_depth(n)?;
        let mut total = BigUint::one();
        for (b, local) in self.segments(n) {
            total *= b.union.count_cells(local)?;
            if total.is_zero() {
                break;
            }
        }
        Ok(total)
    }

    pub fn materialize(&self, n: u32, span: u64, budget: &Budget) -> Result<CellCover> {
        if n == 0 {
            return Err(Error::usage("materialize needs depth >= 1"));
        }
        self.check_depth(n as u64)?;
        check_index_range(n, span)?;
        let count = self.count_cells(n as u64)?;
        budget.check(&format!("materialize at depth {n}"), &count)?;
        let mut cells: Vec<u64> = vec![0];
        for (b, local) in self.segments(n as u64) {
            let part = b.union.materialize(local as u32, 1, budget)?;
            let mut next = Vec::with_capacity(cells.len() * part.len());
            for &c in &cells {
                for &l in part.cells() {
                    next.push((c << local) | l);
                }
            }
            cells = next;
        }
        if self.blocks.is_empty() {
            cells.clear();
        }
        CellCover::new(n, span, cells, Exactness::Exact)
    }

    /// A uniformly random rule per block, then uniformly random free digits.
    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<DigitString> {
        self.check_depth(n)?;
        let mut out = DigitString::zeros(0);
        for (b, local) in self.segments(n) {
            let rules = b.union.rules();
            if rules.is_empty() {
                return Err(Error::usage("cannot sample from an empty set"));
            }
            let rule = &rules[rng.gen_range(0..rules.len())];
            let mut bits = vec![0u8; local as usize];
            for p in rule.free_upto(local).iter() {
                bits[(p - 1) as usize] = rng.gen_range(0..=1);
            }
            out = out.concat(&DigitString::from_bits(&bits)?);
        }
        Ok(out)
    }
}

impl From<RuleUnion> for DigitSpec {
    fn from(u: RuleUnion) -> Self {
        DigitSpec::from_union(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::ZeroForcedRule;
    use crate::positions::PositionSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn union(forced: &[&[u64]], cutoff: u64) -> RuleUnion {
        RuleUnion::new(
            forced
                .iter()
                .map(|f| {
                    ZeroForcedRule::new(
                        PositionSet::from_positions(f.iter().copied()).unwrap(),
                        cutoff,
                    )
                    .unwrap()
                })
                .collect(),
        )
    }

    #[test]
    fn blocks_concatenate() {
        let spec = DigitSpec::from_blocks(vec![
            (2, union(&[&[1]], 2)),
            (3, union(&[&[1, 2], &[3]], 3)),
        ])
        .unwrap();
        let c = spec.materialize(5, 1, &Budget::default()).unwrap();
        // block 1: x1 = 0, x2 free; block 2: 00x or xx0
        let expect: Vec<u64> = [0u64, 1]
            .iter()
            .flat_map(|&b1| [0u64, 1, 2, 4, 6].into_iter().map(move |b2| (b1 << 3) | b2))
            .collect();
        assert_eq!(c.cells(), expect.as_slice());
        assert_eq!(spec.count_cells(5).unwrap(), BigUint::from(10u32));
        // prefix of depth 3 sees only the first digit of block 2
        assert_eq!(spec.count_cells(3).unwrap(), BigUint::from(4u32));
        assert!(spec.materialize(6, 1, &Budget::default()).is_err());
    }

    #[test]
    fn samples_are_admitted() {
        let spec = DigitSpec::from_blocks(vec![
            (4, union(&[&[1, 3]], 4)),
            (4, union(&[&[2], &[4]], 4)),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = spec.sample(7, &mut rng).unwrap();
            assert!(spec.admits(&d));
            let cover = spec.materialize(7, 1, &Budget::default()).unwrap();
            assert!(cover.contains_index(d.to_cell().unwrap().index));
        }
    }
}
