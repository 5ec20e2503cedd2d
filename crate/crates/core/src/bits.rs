//! A plain growable-free bitset over `0..len`, with shifted OR for
//! Minkowski sums of integer sets.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: u64,
}

impl BitSet {
    pub fn new(len: u64) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    pub fn insert(&mut self, k: u64) {
        debug_assert!(k < self.len);
        self.words[(k / 64) as usize] |= 1 << (k % 64);
    }

    /// `self |= src << shift`, dropping bits beyond `len`.
    pub fn or_shifted(&mut self, src: &BitSet, shift: u64) {
        let ws = (shift / 64) as usize;
        let bs = (shift % 64) as u32;
        let n = self.words.len();
        for (k, &w) in src.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let at = k + ws;
            if at >= n {
                break;
            }
            if bs == 0 {
                self.words[at] |= w;
            } else {
                self.words[at] |= w << bs;
                if at + 1 < n {
                    self.words[at + 1] |= w >> (64 - bs);
                }
            }
        }
        self.clear_tail();
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[cfg(test)]
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(k as u64 * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    proptest! {
        #[test]
        fn shifted_or_matches_sets(a in prop::collection::btree_set(0u64..300, 0..40),
                                   b in prop::collection::btree_set(0u64..300, 0..40),
                                   shift in 0u64..200, len in 1u64..400) {
            let mut x = BitSet::new(len);
            let mut y = BitSet::new(len);
            a.iter().filter(|&&k| k < len).for_each(|&k| x.insert(k));
            b.iter().filter(|&&k| k < len).for_each(|&k| y.insert(k));
            x.or_shifted(&y, shift);
            let expect: BTreeSet<u64> = a.iter().copied().filter(|&k| k < len)
                .chain(b.iter().filter(|&&k| k < len).map(|k| k + shift).filter(|&k| k < len))
                .collect();
            prop_assert_eq!(x.to_vec(), expect.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(x.count(), expect.len() as u64);
        }
    }
}
