use std::io::Write;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::off::min_branch_count;
use super::Bracket;
use crate::dyadic::{CellCover, DigitSpec};
use crate::error::{Budget, Error, Result};
use crate::exact::{log2_floor, Q};
use crate::sumset::{count_sumset_cells, sumset_cover_dp, SumsetCover, MAX_COUNT_DEPTH};

/// Something whose depth-`n` cells can be counted.
pub trait BoxCount {
    fn box_count(&self) -> BigUint;
}

impl BoxCount for CellCover {
    fn box_count(&self) -> BigUint {
        BigUint::from(self.len())
    }
}

impl BoxCount for SumsetCover {
    fn box_count(&self) -> BigUint {
        BigUint::from(self.len())
    }
}

pub fn box_count<C: BoxCount + ?Sized>(cover: &C) -> BigUint {
    cover.box_count()
}

/// `log2(count) / n` as an exact value or a floor/ceiling bracket.
pub fn box_estimate(count: &BigUint, n: u64) -> Result<Bracket> {
    if count.is_zero() || n == 0 {
        return Err(Error::usage(
            "box estimates need a nonempty cover and n >= 1",
        ));
    }
    let (f, exact) = log2_floor(count);
    let lo = Q::new(f as i64, n as i64);
    let hi = if exact {
        lo
    } else {
        Q::new(f as i64 + 1, n as i64)
    };
    Ok(Bracket { lo, hi })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub depth: u64,
    /// `None` when the depth was skipped for budget reasons.
    pub count: Option<BigUint>,
    pub estimate: Option<Bracket>,
    pub off: Option<Q>,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    /// Span of the ambient interval `[0, span)`; estimates may reach
    /// `1 + log2(span)/n`.
    pub span: u64,
    pub rows: Vec<DimensionRow>,
}

impl DimensionReport {
    pub fn row(&self, depth: u64) -> Option<&DimensionRow> {
        self.rows.iter().find(|r| r.depth == depth)
    }
}

fn box_tag(b: &Bracket) -> &'static str {
    if b.is_exact() {
        "box:exact"
    } else {
        "box:floor"
    }
}

fn single_rules(spec: &DigitSpec) -> bool {
    spec.blocks().iter().all(|b| b.union.rules().len() == 1)
}

/// Box counts of a digit specification at each depth, with `OFF_n`
/// (closed form for block-wise single rules, by trie otherwise when the
/// cover fits the budget).
pub fn dim_profile(
    spec: &DigitSpec,
    depths: impl IntoIterator<Item = u64>,
    budget: &Budget,
) -> Result<DimensionReport> {
    let mut rows = Vec::new();
    for n in depths {
        let count = spec.count_cells(n)?;
        if count.is_zero() {
            return Err(Error::usage(format!("the set is empty at depth {n}")));
        }
        let estimate = box_estimate(&count, n)?;
        let (off, tag) = if single_rules(spec) {
            let mut free = 0u64;
            for (b, local) in spec.segments(n) {
                free += b.union.rules()[0].free_count(local);
            }
            (Some(Q::new(free as i64, n as i64)), "off:rule")
        } else if n <= 63 && budget.check("off trie", &count).is_ok() {
            let c = spec.materialize(n as u32, 1, budget)?;
            (
                Some(Q::new(min_branch_count(&c) as i64, n as i64)),
                "off:trie",
            )
        } else {
            (None, "off:skipped")
        };
        rows.push(DimensionRow {
            depth: n,
            method: format!("{};{tag}", box_tag(&estimate)),
            count: Some(count),
            estimate: Some(estimate),
            off,
        });
    }
    Ok(DimensionReport { span: 1, rows })
}

fn skipped(n: u64) -> DimensionRow {
    DimensionRow {
        depth: n,
        count: None,
        estimate: None,
        off: None,
        method: "skipped:budget".into(),
    }
}

/// Box counts of the `j`-fold sumset of `spec` (cells of `[0, j)`), with
/// `OFF_n` of the sumset trie when it fits the budget.
pub fn sumset_dim_profile(
    spec: &DigitSpec,
    j: u64,
    depths: impl IntoIterator<Item = u64>,
    budget: &Budget,
) -> Result<DimensionReport> {
    let mut rows = Vec::new();
    for n in depths {
        if n > MAX_COUNT_DEPTH {
            rows.push(skipped(n));
            continue;
        }
        let count = count_sumset_cells(spec, j, n)?;
        let estimate = box_estimate(&count, n)?;
        let off = if n <= 40 && budget.check("off trie", &count).is_ok() {
            sumset_cover_dp(spec, j, n as u32, budget).ok().map(|s| {
                let c = CellCover::new(
                    s.depth(),
                    j,
                    s.base_indices().to_vec(),
                    crate::dyadic::Exactness::Exact,
                )
                .expect("sumset indices are in range");
                Q::new(min_branch_count(&c) as i64, n as i64)
            })
        } else {
            None
        };
        let tag = if off.is_some() {
            "off:trie"
        } else {
            "off:skipped"
        };
        rows.push(DimensionRow {
            depth: n,
            method: format!("{};{tag}", box_tag(&estimate)),
            count: Some(count),
            estimate: Some(estimate),
            off,
        });
    }
    Ok(DimensionReport { span: j, rows })
}

/// CSV `depth,count,estimate_num,estimate_den,off_num,off_den,method`.
/// The estimate is the lower end of the bracket; `box:floor` marks a
/// count that is not a power of two. Skipped depths leave fields empty.
pub fn write_dimension_csv<W: Write>(r: &DimensionReport, mut w: W) -> Result<()> {
    writeln!(
        w,
        "depth,count,estimate_num,estimate_den,off_num,off_den,method"
    )?;
    for row in &r.rows {
        let count = row
            .count
            .as_ref()
            .map(|c| c.to_string())
            .unwrap_or_default();
        let (en, ed) = row
            .estimate
            .map(|b| (b.lo.numer().to_string(), b.lo.denom().to_string()))
            .unwrap_or_default();
        let (on, od) = row
            .off
            .map(|q| (q.numer().to_string(), q.denom().to_string()))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{count},{en},{ed},{on},{od},{}",
            row.depth, row.method
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{RuleUnion, ZeroForcedRule};
    use crate::positions::PositionSet;

    fn rule_spec(free: &[u64], cutoff: u64) -> DigitSpec {
        let f = PositionSet::from_positions(free.iter().copied()).unwrap();
        DigitSpec::from(RuleUnion::single(
            ZeroForcedRule::from_free(&f, cutoff).unwrap(),
        ))
    }

    #[test]
    fn examples() {
        let full = CellCover::full(5, 1).unwrap();
        assert_eq!(box_count(&full), BigUint::from(32u32));
        assert_eq!(
            box_estimate(&BigUint::from(32u32), 5).unwrap().exact(),
            Some(Q::from_integer(1))
        );
        let r = dim_profile(&rule_spec(&[1, 3], 4), [4], &Budget::default()).unwrap();
        let row = &r.rows[0];
        assert_eq!(row.count, Some(BigUint::from(4u32)));
        assert_eq!(row.estimate.unwrap().exact(), Some(Q::new(2, 4)));
        assert_eq!(row.off, Some(Q::new(2, 4)));
        let b = box_estimate(&BigUint::from(5u32), 3).unwrap();
        assert_eq!((b.lo, b.hi), (Q::new(2, 3), Q::new(1, 1)));
    }

    #[test]
    fn off_never_exceeds_the_box_estimate() {
        let u = RuleUnion::new(vec![
            ZeroForcedRule::new(PositionSet::from_ranges([(2, 4)]).unwrap(), 12).unwrap(),
            ZeroForcedRule::new(PositionSet::from_ranges([(6, 9)]).unwrap(), 12).unwrap(),
        ]);
        let r = dim_profile(&DigitSpec::from(u), 1..=12, &Budget::default()).unwrap();
        for row in &r.rows {
            assert!(row.method.ends_with("off:trie"));
            assert!(row.off.unwrap() <= row.estimate.unwrap().hi);
        }
    }

    #[test]
    fn sumset_profile_and_csv() {
        let r =
            sumset_dim_profile(&rule_spec(&[1, 3, 4], 8), 2, [4, 8], &Budget::default()).unwrap();
        assert_eq!(r.span, 2);
        let mut buf = Vec::new();
        write_dimension_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("depth,count,estimate_num,estimate_den,off_num,off_den,method\n4,")
        );
        assert_eq!(text.lines().count(), 3);
    }
}
