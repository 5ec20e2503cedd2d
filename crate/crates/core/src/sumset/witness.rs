use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DigitSpec, DigitString};
use crate::error::{Error, Result};

/// A point of the `j`-fold sumset together with `j` digit strings, each a
/// truncated member of the set, that sum to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessedPoint {
    pub value: BigRational,
    pub witness: Vec<DigitString>,
}

impl WitnessedPoint {
    pub fn new(witness: Vec<DigitString>) -> Result<Self> {
        if witness.is_empty() {
            return Err(Error::usage("a witness needs at least one summand"));
        }
        let value = witness
            .iter()
            .fold(BigRational::zero(), |acc, d| acc + d.value());
        Ok(WitnessedPoint { value, witness })
    }

    /// `j`, the number of summands.
    pub fn j(&self) -> u64 {
        self.witness.len() as u64
    }

    /// The point `value / j` of `A_j / j`.
    pub fn scaled(&self) -> BigRational {
        &self.value / BigRational::from_integer(BigInt::from(self.j()))
    }

    /// Every summand is admitted by `spec` and the summands add up to
    /// `value`.
    pub fn verify(&self, spec: &DigitSpec) -> bool {
        let sum = self
            .witness
            .iter()
            .fold(BigRational::zero(), |acc, d| acc + d.value());
        sum == self.value && self.witness.iter().all(|d| spec.admits(d))
    }

    /// `j` independent samples of truncated members at depth `n`.
    pub fn sample<R: Rng + ?Sized>(spec: &DigitSpec, j: u64, n: u64, rng: &mut R) -> Result<Self> {
        if j == 0 {
            return Err(Error::usage("a witness needs at least one summand"));
        }
        let witness = (0..j)
            .map(|_| spec.sample(n, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(witness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{RuleUnion, ZeroForcedRule};
    use crate::positions::PositionSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_verify() {
        let spec = DigitSpec::from(RuleUnion::single(
            ZeroForcedRule::new(PositionSet::from_ranges([(2, 4)]).unwrap(), 10).unwrap(),
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for j in 1..=4 {
            let w = WitnessedPoint::sample(&spec, j, 10, &mut rng).unwrap();
            assert!(w.verify(&spec));
            assert_eq!(w.j(), j);
            assert!(w.scaled() < BigRational::from_integer(1.into()));
        }
        let bad = WitnessedPoint::new(vec![DigitString::from_bits(&[0, 1, 0]).unwrap()]).unwrap();
        assert!(!bad.verify(&spec));
    }
}
