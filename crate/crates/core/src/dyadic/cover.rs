use serde::{Deserialize, Serialize};

use super::{check_index_range, DyadicCell};
use crate::error::{Error, Result};

/// Whether a cover lists exactly the cells meeting the set, or only
/// guarantees every point lies in some listed cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Outer,
}

/// A finite-depth cover of a set inside `[0, span)` by depth-`depth` cells.
/// Indices are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCover {
    depth: u32,
    span: u64,
    cells: Vec<u64>,
    exactness: Exactness,
}

impl CellCover {
    pub fn new(depth: u32, span: u64, cells: Vec<u64>, exactness: Exactness) -> Result<Self> {
        let limit = check_index_range(depth, span)?;
        if cells.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("cover cells must be strictly increasing"));
        }
        if let Some(&last) = cells.last() {
            if last >= limit {
                return Err(Error::usage(format!(
                    "cell {last} outside [0, {limit}) at depth {depth}"
                )));
            }
        }
        Ok(CellCover {
            depth,
            span,
            cells,
            exactness,
        })
    }

    /// Builds from unsorted indices, sorting and removing duplicates.
    pub fn from_unsorted(
        depth: u32,
        span: u64,
        mut cells: Vec<u64>,
        exactness: Exactness,
    ) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        Self::new(depth, span, cells, exactness)
    }

    pub fn empty(depth: u32, span: u64) -> Result<Self> {
        Self::new(depth, span, Vec::new(), Exactness::Exact)
    }

    /// Every cell of `[0, span)`.
    pub fn full(depth: u32, span: u64) -> Result<Self> {
        let limit = check_index_range(depth, span)?;
        Self::new(depth, span, (0..limit).collect(), Exactness::Exact)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn span(&self) -> u64 {
        self.span
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_index(&self, k: u64) -> bool {
        self.cells.binary_search(&k).is_ok()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = DyadicCell> + '_ {
        let depth = self.depth;
        self.cells
            .iter()
            .map(move |&index| DyadicCell { depth, index })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.depth != other.depth || self.span != other.span {
            return Err(Error::usage(format!(
                "cover mismatch: depth {} span {} vs depth {} span {}",
                self.depth, self.span, other.depth, other.span
            )));
        }
        Ok(())
    }

    /// Union; exact only if both inputs are exact.
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cells = super::rule::merge_sorted(&self.cells, &other.cells);
        let exactness = if self.exactness == Exactness::Exact && other.exactness == Exactness::Exact
        {
            Exactness::Exact
        } else {
            Exactness::Outer
        };
        Ok(CellCover {
            depth: self.depth,
            span: self.span,
            cells,
            exactness,
        })
    }

    /// Subset test on index sets.
    pub fn contains(&self, other: &Self) -> Result<bool> {
        self.check_compatible(other)?;
        let mut it = self.cells.iter().peekable();
        for &k in &other.cells {
            loop {
                match it.peek() {
                    Some(&&c) if c < k => {
                        it.next();
                    }
                    Some(&&c) if c == k => break,
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// Cover of `{x/2}` at depth `depth+1`: cell `k` at depth `n` maps onto
    /// cell `k` at depth `n+1`.
    pub fn halve(&self) -> Result<Self> {
        check_index_range(self.depth + 1, self.span)?;
        Ok(CellCover {
            depth: self.depth + 1,
            span: self.span,
            cells: self.cells.clone(),
            exactness: self.exactness,
        })
    }

    /// Drops the last digit: the cover at depth `depth-1`.
    pub fn coarsen(&self) -> Result<Self> {
        if self.depth == 0 {
            return Err(Error::usage("cannot coarsen a depth-0 cover"));
        }
        let mut cells: Vec<u64> = self.cells.iter().map(|k| k >> 1).collect();
        cells.dedup();
        Ok(CellCover {
            depth: self.depth - 1,
            span: self.span,
            cells,
            exactness: self.exactness,
        })
    }

    /// Re-expresses the cover at a finer depth (each cell split fully).
    pub fn refine_to(&self, depth: u32) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::usage("refine_to needs a finer depth"));
        }
        check_index_range(depth, self.span)?;
        let shift = depth - self.depth;
        let mut cells = Vec::with_capacity(self.cells.len() << shift);
        for &k in &self.cells {
            let base = k << shift;
            cells.extend(base..base + (1u64 << shift));
        }
        Ok(CellCover {
            depth,
            span: self.span,
            cells,
            exactness: self.exactness,
        })
    }

    /// Trie levels `0..=depth`: level `d` holds the sorted indices of the
    /// depth-`d` ancestors of the cover's cells.
    pub fn trie_levels(&self) -> Vec<Vec<u64>> {
        let mut levels = vec![self.cells.clone()];
        for _ in 0..self.depth {
            let mut up: Vec<u64> = levels.last().unwrap().iter().map(|k| k >> 1).collect();
            up.dedup();
            levels.push(up);
        }
        levels.reverse();
        levels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(depth: u32, cells: &[u64]) -> CellCover {
        CellCover::new(depth, 1, cells.to_vec(), Exactness::Exact).unwrap()
    }

    #[test]
    fn union_and_containment() {
        let u = cover(2, &[0, 2]).union(&cover(2, &[1])).unwrap();
        assert_eq!(u.cells(), &[0, 1, 2]);
        assert!(cover(2, &[0, 1, 2]).contains(&cover(2, &[0, 2])).unwrap());
        assert!(!cover(2, &[0]).contains(&cover(2, &[1])).unwrap());
        assert!(cover(2, &[0]).union(&cover(3, &[0])).is_err());
        let outer = CellCover::new(2, 1, vec![3], Exactness::Outer).unwrap();
        assert_eq!(
            cover(2, &[0]).union(&outer).unwrap().exactness(),
            Exactness::Outer
        );
    }

    #[test]
    fn halving_examples() {
        let h = cover(2, &[0, 2]).halve().unwrap();
        assert_eq!((h.depth(), h.cells()), (3, &[0u64, 2][..]));
        let full = CellCover::full(3, 1).unwrap().halve().unwrap();
        assert_eq!(full.cells(), (0..8).collect::<Vec<_>>().as_slice());
        assert_eq!(full.depth(), 4); // [0, 1/2) at depth 4
        assert!(cover(3, &[]).halve().unwrap().is_empty());
    }

    #[test]
    fn rejects_unsorted_and_out_of_range() {
        assert!(CellCover::new(2, 1, vec![2, 1], Exactness::Exact).is_err());
        assert!(CellCover::new(2, 1, vec![4], Exactness::Exact).is_err());
        assert!(CellCover::new(2, 2, vec![7], Exactness::Exact).is_ok());
    }

    #[test]
    fn trie_levels_run_from_root() {
        let lv = cover(3, &[1, 5]).trie_levels();
        assert_eq!(lv, vec![vec![0], vec![0, 1], vec![0, 2], vec![1, 5]]);
    }
}
