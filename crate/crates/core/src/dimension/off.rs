use crate::dyadic::{CellCover, ZeroForcedRule};
use crate::error::{Error, Result};
use crate::exact::{log2_floor, Q};
use crate::measures::DyadicMeasure;

use super::Bracket;

/// `min` over leaf paths of the number of two-child ancestors, divided by
/// the depth: one bottom-up pass over the trie, never over leaf paths.
pub fn off_n(cover: &CellCover) -> Result<Q> {
    if cover.is_empty() {
        return Err(Error::usage("OFF_n of an empty cover is undefined"));
    }
    let n = cover.depth();
    if n == 0 {
        return Err(Error::usage("OFF_n needs depth >= 1"));
    }
    Ok(Q::new(min_branch_count(cover) as i64, n as i64))
}

/// The minimal path branch count behind [`off_n`].
pub fn min_branch_count(cover: &CellCover) -> u64 {
    let levels = cover.trie_levels();
    let mut best: Vec<u64> = vec![0; levels[levels.len() - 1].len()];
    for d in (0..levels.len() - 1).rev() {
        let (up, down) = (&levels[d], &levels[d + 1]);
        let mut next = Vec::with_capacity(up.len());
        let mut k = 0;
        for &p in up {
            let mut m = u64::MAX;
            let mut children = 0;
            while k < down.len() && down[k] >> 1 == p {
                m = m.min(best[k]);
                children += 1;
                k += 1;
            }
            next.push(m + u64::from(children == 2));
        }
        best = next;
    }
    best.into_iter().min().unwrap_or(0)
}

/// Closed form for a single rule: every path branches exactly at the free
/// positions.
pub fn off_rule(rule: &ZeroForcedRule, n: u64) -> Result<Q> {
    if n == 0 {
        return Err(Error::usage("OFF_n needs depth >= 1"));
    }
    Ok(Q::new(rule.free_count(n) as i64, n as i64))
}

/// `min` over positive-mass `n`-cells of `−log2 μ(I) / n`, i.e. the
/// heaviest cell's exponent. Exact when that mass is a power of two.
pub fn billingsley_lower(m: &DyadicMeasure, n: u64) -> Result<Bracket> {
    if n == 0 {
        return Err(Error::usage("Billingsley bound needs depth >= 1"));
    }
    let (mass, _) = m.max_mass(n)?;
    if mass.is_zero() {
        return Err(Error::usage("measure has no mass at this depth"));
    }
    // −log2(M / 2^L) = L − log2 M
    let (f, exact) = log2_floor(mass.numer());
    let l = mass.log2_den() as i64;
    let hi = Q::new(l - f as i64, n as i64);
    let lo = if exact {
        hi
    } else {
        Q::new(l - f as i64 - 1, n as i64)
    };
    Ok(Bracket { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{Exactness, RuleUnion};
    use crate::measures::{equal_split_measure, DyadicMeasure, RuleMeasure};
    use crate::positions::PositionSet;
    use crate::Budget;

    #[test]
    fn off_examples() {
        assert_eq!(
            off_n(&CellCover::full(6, 1).unwrap()).unwrap(),
            Q::from_integer(1)
        );
        let path = CellCover::new(6, 1, vec![41], Exactness::Exact).unwrap();
        assert_eq!(off_n(&path).unwrap(), Q::from_integer(0));
        let r =
            ZeroForcedRule::from_free(&PositionSet::from_positions([1, 3]).unwrap(), 4).unwrap();
        let c = RuleUnion::single(r.clone())
            .materialize(4, 1, &Budget::default())
            .unwrap();
        assert_eq!(off_n(&c).unwrap(), Q::new(2, 4));
        assert_eq!(off_rule(&r, 4).unwrap(), Q::new(2, 4));
        assert!(off_n(&CellCover::empty(3, 1).unwrap()).is_err());
    }

    #[test]
    fn billingsley_examples() {
        let full =
            DyadicMeasure::Trie(equal_split_measure(&CellCover::full(5, 1).unwrap()).unwrap());
        assert_eq!(
            billingsley_lower(&full, 5).unwrap().exact(),
            Some(Q::from_integer(1))
        );
        let path = CellCover::new(5, 1, vec![9], Exactness::Exact).unwrap();
        let p = DyadicMeasure::Trie(equal_split_measure(&path).unwrap());
        assert_eq!(
            billingsley_lower(&p, 5).unwrap().exact(),
            Some(Q::from_integer(0))
        );
        let r = ZeroForcedRule::new(PositionSet::from_positions([2, 5]).unwrap(), 8).unwrap();
        let m = DyadicMeasure::Rule(RuleMeasure { rule: r.clone() });
        assert_eq!(
            billingsley_lower(&m, 8).unwrap().exact(),
            Some(off_rule(&r, 8).unwrap())
        );
    }

    #[test]
    fn off_dp_matches_path_enumeration() {
        // independent oracle: walk every leaf path and count branch levels
        let cells = vec![0u64, 1, 5, 6, 7, 12, 31];
        let c = CellCover::new(5, 1, cells.clone(), Exactness::Exact).unwrap();
        let present = |d: u32, k: u64| cells.iter().any(|&x| x >> (5 - d) == k);
        let mut best = u64::MAX;
        for &x in &cells {
            let mut b = 0;
            for d in 0..5u32 {
                let a = x >> (5 - d);
                if present(d + 1, 2 * a) && present(d + 1, 2 * a + 1) {
                    b += 1;
                }
            }
            best = best.min(b);
        }
        assert_eq!(min_branch_count(&c), best);
    }
}
