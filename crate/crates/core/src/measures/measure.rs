use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dyadic::{CellCover, DigitString, Exactness, ZeroForcedRule};
use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::schedule::{IntervalSchedule, ZetaSchedule};

/// An explicit measure on the trie of an exact cover: level `d` lists the
/// depth-`d` cells of positive mass and their masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieMeasure {
    levels: Vec<Vec<u64>>,
    masses: Vec<Vec<Dyadic>>,
}

impl TrieMeasure {
    /// Builds from per-level cells and masses, checking additivity, total
    /// mass 1 and that every listed cell has a listed parent.
    pub fn new(levels: Vec<Vec<u64>>, masses: Vec<Vec<Dyadic>>) -> Result<Self> {
        let m = TrieMeasure { levels, masses };
        m.check()?;
        Ok(m)
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn cells(&self, d: u32) -> &[u64] {
        &self.levels[d as usize]
    }

    pub fn masses(&self, d: u32) -> &[Dyadic] {
        &self.masses[d as usize]
    }

    pub fn mass(&self, d: u32, index: u64) -> Dyadic {
        match self.levels[d as usize].binary_search(&index) {
            Ok(k) => self.masses[d as usize][k].clone(),
            Err(_) => Dyadic::zero(),
        }
    }

    /// Additivity at every node, root mass 1, no zero-mass entries.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Verification(msg));
        if self.levels.is_empty() || self.levels.len() != self.masses.len() {
            return bad("measure has no levels".into());
        }
        if self.levels[0] != [0] || self.masses[0] != [Dyadic::one()] {
            return bad("root mass must be 1".into());
        }
        for d in 1..self.levels.len() {
            let (cells, masses) = (&self.levels[d], &self.masses[d]);
            if cells.len() != masses.len() || cells.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("level {d} is malformed"));
            }
            let mut k = 0;
            for (p, pm) in self.levels[d - 1].iter().zip(&self.masses[d - 1]) {
                let mut sum = Dyadic::zero();
                while k < cells.len() && cells[k] >> 1 == *p {
                    if masses[k].is_zero() {
                        return bad(format!("zero-mass cell {} listed at depth {d}", cells[k]));
                    }
                    sum = &sum + &masses[k];
                    k += 1;
                }
                if &sum != pm {
                    return bad(format!(
                        "additivity fails below cell {p} at depth {}",
                        d - 1
                    ));
                }
            }
            if k != cells.len() {
                return bad(format!("orphan cells at depth {d}"));
            }
        }
        Ok(())
    }
}

/// The equal-split measure of a single zero-forced rule: every admitted
/// `n`-cell carries `2^-free(n)`, so it is never materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleMeasure {
    pub rule: ZeroForcedRule,
}

impl RuleMeasure {
    pub fn mass_at(&self, n: u64) -> Dyadic {
        Dyadic::pow2_neg(self.rule.free_count(n))
    }
}

/// One factor of a block product: digits `offset+1 ..= offset+len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBlock {
    pub offset: u64,
    pub len: u64,
    pub component: DyadicMeasure,
}

/// A dyadic pre-measure known to a finite depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DyadicMeasure {
    Trie(TrieMeasure),
    Rule(RuleMeasure),
    Product(Vec<ProductBlock>),
}

impl DyadicMeasure {
    /// Number of digits on which masses are defined.
    pub fn depth_limit(&self) -> u64 {
        match self {
            DyadicMeasure::Trie(t) => t.depth() as u64,
            DyadicMeasure::Rule(r) => r.rule.cutoff_depth(),
            DyadicMeasure::Product(b) => b.last().map_or(0, |b| b.offset + b.len),
        }
    }

    fn check_depth(&self, n: u64) -> Result<()> {
        if n > self.depth_limit() {
            return Err(Error::usage(format!(
                "measure known to depth {} but depth {n} requested",
                self.depth_limit()
            )));
        }
        Ok(())
    }

    /// Mass of the cell with digit prefix `d`.
    pub fn mass_of(&self, d: &DigitString) -> Result<Dyadic> {
        let n = d.len();
        self.check_depth(n)?;
        Ok(match self {
            DyadicMeasure::Trie(t) => match d.numer().to_u64() {
                Some(k) => t.mass(n as u32, k),
                None => Dyadic::zero(),
            },
            DyadicMeasure::Rule(r) => {
                if r.rule.admits(d) {
                    r.mass_at(n)
                } else {
                    Dyadic::zero()
                }
            }
            DyadicMeasure::Product(blocks) => {
                let mut m = Dyadic::one();
                for b in blocks.iter().take_while(|b| b.offset < n) {
                    let local = b.len.min(n - b.offset);
                    let w = d.window(b.offset + 1, b.offset + local);
                    m = &m * &b.component.mass_of(&w)?;
                    if m.is_zero() {
                        break;
                    }
                }
                m
            }
        })
    }

    /// Largest mass of an `n`-cell with a cell attaining it.
    pub fn max_mass(&self, n: u64) -> Result<(Dyadic, DigitString)> {
        self.check_depth(n)?;
        match self {
            DyadicMeasure::Trie(t) => {
                let d = n as u32;
                let (k, m) = t
                    .masses(d)
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .ok_or_else(|| Error::usage("measure has no cells"))?;
                let w = DigitString::from_numer(n, BigUint::from(t.cells(d)[k]))?;
                Ok((m.clone(), w))
            }
            // the all-zero string is always admitted
            DyadicMeasure::Rule(r) => Ok((r.mass_at(n), DigitString::zeros(n))),
            // blocks are independent, so the maximum factorizes
            DyadicMeasure::Product(blocks) => {
                let mut m = Dyadic::one();
                let mut w = DigitString::zeros(0);
                for b in blocks.iter().take_while(|b| b.offset < n) {
                    let local = b.len.min(n - b.offset);
                    let (bm, bw) = b.component.max_mass(local)?;
                    m = &m * &bm;
                    w = w.concat(&bw);
                }
                Ok((m, w))
            }
        }
    }
}

/// Mass halves at two-child nodes and passes whole to a single child.
pub fn equal_split_measure(cover: &CellCover) -> Result<TrieMeasure> {
    if cover.is_empty() {
        return Err(Error::usage("equal-split measure of an empty cover"));
    }
    if cover.exactness() != Exactness::Exact || cover.span() != 1 {
        return Err(Error::usage(
            "equal-split measures need an exact cover of a subset of [0, 1)",
        ));
    }
    let levels = cover.trie_levels();
    let mut masses = vec![vec![Dyadic::one()]];
    for d in 1..levels.len() {
        let parent = &levels[d - 1];
        let pm = &masses[d - 1];
        let cells = &levels[d];
        let mut out = Vec::with_capacity(cells.len());
        let mut p = 0;
        let mut k = 0;
        while k < cells.len() {
            while parent[p] != cells[k] >> 1 {
                p += 1;
            }
            let both = k + 1 < cells.len() && cells[k + 1] >> 1 == parent[p];
            if both {
                let h = pm[p].half();
                out.push(h.clone());
                out.push(h);
                k += 2;
            } else {
                out.push(pm[p].clone());
                k += 1;
            }
        }
        masses.push(out);
    }
    Ok(TrieMeasure { levels, masses })
}

/// `μ^i`: the equal-split measure carried by `B^i_1`, to `depth`.
pub fn mu_i_measure(sched: &IntervalSchedule, depth: u64) -> Result<DyadicMeasure> {
    let rule = sched.b_rule(1, depth)?.value;
    Ok(DyadicMeasure::Rule(RuleMeasure { rule }))
}

/// `μ^i_j`: the equal-split measure on `T^i_j(p)`.
pub fn mu_ij_measure(sched: &IntervalSchedule, j: u64, p: u64) -> Result<DyadicMeasure> {
    Ok(DyadicMeasure::Rule(RuleMeasure {
        rule: sched.t_rule(j, p)?,
    }))
}

/// Stitches `components[l]` onto digit block `l` of lengths `lens`; the
/// mass of a cell is the product of the block-restricted masses, the last
/// block evaluated on its prefix.
pub fn block_product_measure(
    components: Vec<DyadicMeasure>,
    lens: &[u64],
    depth: u64,
) -> Result<DyadicMeasure> {
    if components.len() != lens.len() {
        return Err(Error::usage("one component per block is required"));
    }
    let mut blocks = Vec::new();
    let mut offset = 0u64;
    for (component, &len) in components.into_iter().zip(lens) {
        if offset >= depth {
            break;
        }
        let local = len.min(depth - offset);
        if component.depth_limit() < local {
            return Err(Error::usage(format!(
                "component for digits {}..={} is known only to local depth {}",
                offset + 1,
                offset + len,
                component.depth_limit()
            )));
        }
        blocks.push(ProductBlock {
            offset,
            len: local,
            component,
        });
        offset += len;
    }
    if offset < depth {
        return Err(Error::usage(format!(
            "components cover {offset} digits but depth {depth} requested"
        )));
    }
    Ok(DyadicMeasure::Product(blocks))
}

/// [`block_product_measure`] with blocks `[s_l + 1, s_{l+1}]` of a ζ schedule.
pub fn zeta_product_measure(
    components: Vec<DyadicMeasure>,
    zeta: &ZetaSchedule,
    depth: u64,
) -> Result<DyadicMeasure> {
    let lens: Vec<u64> = zeta.entries.iter().map(|e| e.zeta).collect();
    let k = components.len().min(lens.len());
    block_product_measure(components, &lens[..k], depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::positions::PositionSet;
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};
    use crate::Budget;
    use proptest::prelude::*;

    fn cover(depth: u32, cells: &[u64]) -> CellCover {
        CellCover::new(depth, 1, cells.to_vec(), Exactness::Exact).unwrap()
    }

    #[test]
    fn equal_split_examples() {
        let full = equal_split_measure(&CellCover::full(5, 1).unwrap()).unwrap();
        assert!(full.masses(5).iter().all(|m| *m == Dyadic::pow2_neg(5)));
        let path = equal_split_measure(&cover(6, &[37])).unwrap();
        assert!((0..=6).all(|d| path.masses(d) == [Dyadic::one()]));
        // free positions {1,3}
        let r =
            ZeroForcedRule::from_free(&PositionSet::from_positions([1, 3]).unwrap(), 4).unwrap();
        let c = crate::RuleUnion::single(r.clone())
            .materialize(4, 1, &Budget::default())
            .unwrap();
        let m = equal_split_measure(&c).unwrap();
        assert_eq!(m.cells(4).len(), 4);
        assert!(m.masses(4).iter().all(|x| *x == Dyadic::pow2_neg(2)));
        assert!(equal_split_measure(&cover(3, &[])).is_err());
    }

    #[test]
    fn rule_measure_matches_trie() {
        let r = ZeroForcedRule::new(PositionSet::from_positions([2, 3, 7]).unwrap(), 9).unwrap();
        let trie = DyadicMeasure::Trie(
            equal_split_measure(
                &crate::RuleUnion::single(r.clone())
                    .materialize(9, 1, &Budget::default())
                    .unwrap(),
            )
            .unwrap(),
        );
        let rule = DyadicMeasure::Rule(RuleMeasure { rule: r });
        for n in 0..=9u64 {
            for k in 0..(1u64 << n) {
                let d = DigitString::from_numer(n, BigUint::from(k)).unwrap();
                assert_eq!(trie.mass_of(&d).unwrap(), rule.mass_of(&d).unwrap());
            }
            assert_eq!(trie.max_mass(n).unwrap().0, rule.max_mass(n).unwrap().0);
        }
    }

    #[test]
    fn product_of_uniform_blocks() {
        let u =
            |n| DyadicMeasure::Trie(equal_split_measure(&CellCover::full(n, 1).unwrap()).unwrap());
        let p = block_product_measure(vec![u(2), u(2)], &[2, 2], 4).unwrap();
        for k in 0..16u64 {
            let d = DigitString::from_numer(4, BigUint::from(k)).unwrap();
            assert_eq!(p.mass_of(&d).unwrap(), Dyadic::pow2_neg(4));
        }
        assert!(block_product_measure(vec![u(2), u(2)], &[2, 2], 5).is_err());
        // one block reproduces the component
        let c = cover(3, &[1, 2, 6]);
        let m = DyadicMeasure::Trie(equal_split_measure(&c).unwrap());
        let one = block_product_measure(vec![m.clone()], &[3], 3).unwrap();
        for k in 0..8u64 {
            let d = DigitString::from_numer(3, BigUint::from(k)).unwrap();
            assert_eq!(one.mass_of(&d).unwrap(), m.mass_of(&d).unwrap());
        }
    }

    #[test]
    fn mu_i_splits_only_outside_forcing() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 6, GrowthMode::toy(4).unwrap()).unwrap();
        let mu = mu_i_measure(&s, 1000).unwrap();
        assert_eq!(mu.max_mass(3).unwrap().0, Dyadic::pow2_neg(3));
        // B_1 is forced on [553, 966]: no splitting there
        let a = mu.max_mass(560).unwrap().0;
        let b = mu.max_mass(600).unwrap().0;
        assert_eq!(a, b);
    }

    fn arb_cover() -> impl Strategy<Value = CellCover> {
        (1u32..=10).prop_flat_map(|n| {
            prop::collection::btree_set(0u64..(1 << n), 1..40).prop_map(move |s| {
                CellCover::new(n, 1, s.into_iter().collect(), Exactness::Exact).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn equal_split_is_additive(c in arb_cover()) {
            let m = equal_split_measure(&c).unwrap();
            prop_assert!(m.check().is_ok());
            prop_assert_eq!(m.cells(c.depth()), c.cells());
        }

        #[test]
        fn product_restricts_to_first_block(c1 in arb_cover(), c2 in arb_cover()) {
            let (n1, n2) = (c1.depth() as u64, c2.depth() as u64);
            let m1 = DyadicMeasure::Trie(equal_split_measure(&c1).unwrap());
            let m2 = DyadicMeasure::Trie(equal_split_measure(&c2).unwrap());
            let p = block_product_measure(vec![m1.clone(), m2], &[n1, n2], n1 + n2).unwrap();
            for &k in c1.cells() {
                let d = DigitString::from_numer(n1, BigUint::from(k)).unwrap();
                prop_assert_eq!(p.mass_of(&d).unwrap(), m1.mass_of(&d).unwrap());
            }
        }
    }
}
