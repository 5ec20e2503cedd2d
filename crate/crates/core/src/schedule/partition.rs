use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The split of `{0, ..., i(i+1)/2 - 1}` into blocks of sizes
/// `2, 3, ..., i, 1`. For `i = 1` the displayed pattern degenerates and the
/// single block `{0}` is returned with `degenerate` set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZPartition {
    pub i: u64,
    pub blocks: Vec<Vec<u64>>,
    pub degenerate: bool,
}

impl ZPartition {
    /// Length `i(i+1)/2` of one period.
    pub fn period(&self) -> u64 {
        self.i * (self.i + 1) / 2
    }

    /// `a^i_{t,q}` (1-based `t`, `q`).
    pub fn element(&self, t: u64, q: u64) -> Result<u64> {
        self.blocks
            .get((t as usize).wrapping_sub(1))
            .and_then(|b| b.get((q as usize).wrapping_sub(1)))
            .copied()
            .ok_or_else(|| Error::usage(format!("Z^{}_{t} has no element number {q}", self.i)))
    }

    /// `|Z^i_t|`.
    pub fn block_len(&self, t: u64) -> u64 {
        self.blocks
            .get((t as usize).wrapping_sub(1))
            .map_or(0, |b| b.len() as u64)
    }
}

pub fn z_partition(i: u64) -> Result<ZPartition> {
    if i == 0 {
        return Err(Error::usage("partition index i must be positive"));
    }
    if i == 1 {
        return Ok(ZPartition {
            i,
            blocks: vec![vec![0]],
            degenerate: true,
        });
    }
    let mut blocks = Vec::with_capacity(i as usize);
    let mut next = 0u64;
    for t in 1..i {
        blocks.push((next..next + t + 1).collect());
        next += t + 1;
    }
    blocks.push(vec![next]);
    Ok(ZPartition {
        i,
        blocks,
        degenerate: false,
    })
}

/// `s = i(i+1)k/2 + a^i_{t,q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Located {
    pub t: u64,
    pub q: u64,
    pub k: u64,
}

pub fn locate(i: u64, s: u64) -> Result<Located> {
    let z = z_partition(i)?;
    let period = z.period();
    let (k, a) = (s / period, s % period);
    for (t, block) in z.blocks.iter().enumerate() {
        if let Some(q) = block.iter().position(|&x| x == a) {
            return Ok(Located {
                t: t as u64 + 1,
                q: q as u64 + 1,
                k,
            });
        }
    }
    unreachable!("partition covers every residue")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn partitions() {
        assert_eq!(
            z_partition(3).unwrap().blocks,
            vec![vec![0, 1], vec![2, 3, 4], vec![5]]
        );
        assert_eq!(z_partition(2).unwrap().blocks, vec![vec![0, 1], vec![2]]);
        assert_eq!(
            z_partition(4).unwrap().blocks,
            vec![vec![0, 1], vec![2, 3, 4], vec![5, 6, 7, 8], vec![9]]
        );
        let one = z_partition(1).unwrap();
        assert!(one.degenerate);
        assert_eq!(one.blocks, vec![vec![0]]);
        assert!(z_partition(0).is_err());
    }

    #[test]
    fn locate_examples() {
        assert_eq!(locate(3, 10).unwrap(), Located { t: 2, q: 3, k: 1 });
        assert_eq!(locate(2, 5).unwrap(), Located { t: 2, q: 1, k: 1 });
        assert_eq!(locate(3, 5).unwrap(), Located { t: 3, q: 1, k: 0 });
    }

    #[test]
    fn locate_is_a_bijection_on_each_period() {
        for i in 1..=6u64 {
            let z = z_partition(i).unwrap();
            let p = z.period();
            let sizes: Vec<u64> = (1..=i).map(|t| z.block_len(t)).collect();
            let total: u64 = sizes.iter().sum();
            assert_eq!(total, p);
            for k in 0..3 {
                let mut seen = HashSet::new();
                for s in p * k..p * (k + 1) {
                    let l = locate(i, s).unwrap();
                    assert_eq!(l.k, k);
                    assert_eq!(p * l.k + z.element(l.t, l.q).unwrap(), s);
                    assert!(seen.insert((l.t, l.q)));
                }
                assert_eq!(seen.len() as u64, p);
            }
        }
    }
}
