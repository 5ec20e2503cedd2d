use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::check_index_range;
use crate::error::{Error, Result};

/// The half-open cell `[index 2^-depth, (index+1) 2^-depth)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCell {
    pub depth: u32,
    pub index: u64,
}

impl DyadicCell {
    /// Validates `index < span * 2^depth`.
    pub fn new(depth: u32, index: u64, span: u64) -> Result<Self> {
        let limit = check_index_range(depth, span)?;
        if index >= limit {
            return Err(Error::usage(format!(
                "cell index {index} outside [0, {limit}) at depth {depth}"
            )));
        }
        Ok(DyadicCell { depth, index })
    }

    pub fn children(&self) -> [DyadicCell; 2] {
        let d = self.depth + 1;
        [
            DyadicCell {
                depth: d,
                index: 2 * self.index,
            },
            DyadicCell {
                depth: d,
                index: 2 * self.index + 1,
            },
        ]
    }

    pub fn parent(&self) -> Option<DyadicCell> {
        (self.depth > 0).then(|| DyadicCell {
            depth: self.depth - 1,
            index: self.index >> 1,
        })
    }

    pub fn left_endpoint(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.index),
            BigInt::from(BigUint::from(1u32) << self.depth),
        )
    }

    pub fn contains_cell(&self, other: &DyadicCell) -> bool {
        other.depth >= self.depth && (other.index >> (other.depth - self.depth)) == self.index
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_gives_two_children() {
        let c = DyadicCell::new(3, 5, 1).unwrap();
        let [l, r] = c.children();
        assert_eq!((l.index, r.index, l.depth), (10, 11, 4));
        assert_eq!(l.parent(), Some(c));
        assert!(c.contains_cell(&r) && !l.contains_cell(&r));
        assert!(DyadicCell::new(3, 8, 1).is_err());
        assert!(DyadicCell::new(3, 8, 2).is_ok());
        assert_eq!(c.left_endpoint(), BigRational::new(5.into(), 8.into()));
    }
}
