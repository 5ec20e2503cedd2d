use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::DyadicCell;
use crate::error::{Error, Result};

/// A finite binary expansion `x_1 x_2 ... x_len` of `x = Σ x_i 2^-i`,
/// stored as the integer numerator `Σ x_i 2^(len-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitString {
    len: u64,
    numer: BigUint,
}

impl DigitString {
    pub fn zeros(len: u64) -> Self {
        DigitString {
            len,
            numer: BigUint::zero(),
        }
    }

    /// Fails if `numer >= 2^len`.
    pub fn from_numer(len: u64, numer: BigUint) -> Result<Self> {
        if numer.bits() > len {
            return Err(Error::usage(format!(
                "numerator {numer} has more than {len} binary digits"
            )));
        }
        Ok(DigitString { len, numer })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut numer = BigUint::zero();
        for &b in bits {
            if b > 1 {
                return Err(Error::usage(format!("digit {b} is not binary")));
            }
            numer <<= 1u32;
            if b == 1 {
                numer |= BigUint::from(1u32);
            }
        }
        Ok(DigitString {
            len: bits.len() as u64,
            numer,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    /// Digit `x_p` for `1 <= p <= len`.
    pub fn digit(&self, p: u64) -> u8 {
        assert!(p >= 1 && p <= self.len, "digit position {p} out of range");
        self.numer.bit(self.len - p) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.len).map(|p| self.digit(p)).collect()
    }

    /// True when every digit at positions `lo..=hi` (clipped to the string) is 0.
    pub fn zero_on(&self, lo: u64, hi: u64) -> bool {
        let hi = hi.min(self.len);
        if lo > hi {
            return true;
        }
        // positions lo..=hi are bits len-hi ..= len-lo
        let low_bit = self.len - hi;
        let width = hi - lo + 1;
        let window = &self.numer >> low_bit;
        let mask = (BigUint::from(1u32) << width) - 1u32;
        (window & mask).is_zero()
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: u64) -> DigitString {
        let n = n.min(self.len);
        DigitString {
            len: n,
            numer: &self.numer >> (self.len - n),
        }
    }

    /// Digits `lo..=hi` as their own string.
    pub fn window(&self, lo: u64, hi: u64) -> DigitString {
        let hi = hi.min(self.len);
        if lo > hi {
            return DigitString::zeros(0);
        }
        let width = hi - lo + 1;
        let mask = (BigUint::from(1u32) << width) - 1u32;
        DigitString {
            len: width,
            numer: (&self.numer >> (self.len - hi)) & mask,
        }
    }

    /// Appends zeros up to length `n` (no-op if already at least `n` long).
    pub fn zero_extend(&self, n: u64) -> DigitString {
        if n <= self.len {
            return self.clone();
        }
        DigitString {
            len: n,
            numer: &self.numer << (n - self.len),
        }
    }

    pub fn concat(&self, tail: &DigitString) -> DigitString {
        DigitString {
            len: self.len + tail.len,
            numer: (&self.numer << tail.len) | &tail.numer,
        }
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numer.clone()),
            BigInt::from(BigUint::from(1u32) << self.len),
        )
    }

    /// The depth-`len` cell containing the point.
    pub fn to_cell(&self) -> Result<DyadicCell> {
        let idx = self
            .numer
            .to_u64()
            .filter(|_| self.len < 64)
            .ok_or_else(|| Error::usage("digit string too long for an explicit cell"))?;
        Ok(DyadicCell {
            depth: self.len as u32,
            index: idx,
        })
    }

    pub fn from_cell(cell: &DyadicCell) -> Result<Self> {
        Self::from_numer(cell.depth as u64, BigUint::from(cell.index))
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_and_cells_agree() {
        let d = DigitString::from_bits(&[1, 0, 1]).unwrap();
        assert_eq!(d.to_cell().unwrap(), DyadicCell { depth: 3, index: 5 });
        assert_eq!(d.value(), BigRational::new(5.into(), 8.into()));
        assert_eq!(d.digit(1), 1);
        assert_eq!(d.digit(2), 0);
        assert!(d.zero_on(2, 2) && !d.zero_on(2, 3));
        assert_eq!(d.prefix(2).bits(), vec![1, 0]);
        assert_eq!(d.window(2, 3).bits(), vec![0, 1]);
        assert_eq!(d.zero_extend(5).value(), d.value());
        assert_eq!(DigitString::from_cell(&d.to_cell().unwrap()).unwrap(), d);
        assert!(DigitString::from_numer(2, 4u32.into()).is_err());
    }
}
