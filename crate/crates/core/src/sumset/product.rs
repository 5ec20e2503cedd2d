use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::dyadic::CellCover;
use crate::error::{Error, Result};

/// `c × [0,1)^d0`, stored as the base cover and the number of full
/// factors; the product cells are never enumerated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCover {
    pub base: CellCover,
    pub d0: u32,
}

pub fn product_cover(c: &CellCover, d0: u32) -> Result<ProductCover> {
    if d0 == 0 {
        return Err(Error::usage("product needs at least one full factor"));
    }
    Ok(ProductCover {
        base: c.clone(),
        d0,
    })
}

impl ProductCover {
    pub fn ambient_dim(&self) -> u32 {
        self.d0 + 1
    }

    /// `|c|·2^(d0·n)` depth-`n` boxes.
    pub fn box_count(&self) -> BigUint {
        BigUint::from(self.base.len()) << (self.d0 as u64 * self.base.depth() as u64)
    }

    /// Whether the box with base index `k` and full-factor indices `rest`
    /// belongs to the product.
    pub fn contains_box(&self, k: u64, rest: &[u64]) -> bool {
        let side = 1u64 << self.base.depth();
        rest.len() == self.d0 as usize
            && rest.iter().all(|&r| r < side)
            && self.base.contains_index(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Exactness;

    #[test]
    fn counts() {
        let c = CellCover::new(3, 1, vec![0, 1, 5, 7], Exactness::Exact).unwrap();
        assert_eq!(
            product_cover(&c, 1).unwrap().box_count(),
            BigUint::from(32u32)
        );
        let one = CellCover::new(2, 1, vec![3], Exactness::Exact).unwrap();
        let p = product_cover(&one, 2).unwrap();
        assert_eq!(p.box_count(), BigUint::from(16u32));
        assert!(p.contains_box(3, &[0, 3]));
        assert!(!p.contains_box(2, &[0, 3]));
        assert!(!p.contains_box(3, &[4, 0]));
        assert!(product_cover(&c, 0).is_err());
    }
}
