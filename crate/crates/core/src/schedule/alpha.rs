use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{parse_q, Q};

/// Target dimensions `0 < α_1 <= α_2 <= ... < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaSequence {
    values: Vec<Q>,
}

impl AlphaSequence {
    pub fn new(values: Vec<Q>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::usage("at least one alpha is required"));
        }
        for a in &values {
            if *a <= Q::from_integer(0) || *a >= Q::from_integer(1) {
                return Err(Error::usage(format!("alpha {a} must lie in (0,1)")));
            }
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::usage("alphas must be non-decreasing"));
        }
        Ok(AlphaSequence { values })
    }

    /// Comma-separated rationals, e.g. `1/2,2/3`.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse_q)
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `α_j`, 1-based.
    pub fn get(&self, j: u64) -> Result<Q> {
        self.values
            .get((j as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::usage(format!("alpha_{j} is not defined")))
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// The first `i` values.
    pub fn prefix(&self, i: u64) -> Result<Self> {
        if (i as usize) > self.values.len() || i == 0 {
            return Err(Error::usage(format!(
                "alphas defined up to index {} but {i} needed",
                self.values.len()
            )));
        }
        Ok(AlphaSequence {
            values: self.values[..i as usize].to_vec(),
        })
    }
}

impl std::fmt::Display for AlphaSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|q| q.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(AlphaSequence::parse("1/2,2/3").is_ok());
        let e = AlphaSequence::parse("2/3,1/2").unwrap_err();
        assert!(e.to_string().contains("alphas must be non-decreasing"));
        assert!(AlphaSequence::parse("0,1/2").is_err());
        assert!(AlphaSequence::parse("1/2,1").is_err());
        let a = AlphaSequence::parse("1/2,1/2,3/4").unwrap();
        assert_eq!(a.get(3).unwrap(), Q::new(3, 4));
        assert!(a.get(4).is_err());
        assert!(a.get(0).is_err());
    }
}
