use std::cmp::Ordering;
use std::io::Write;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::measure::DyadicMeasure;
use crate::dyadic::DigitString;
use crate::error::{Error, Result};
use crate::exact::{cmp_products, Dyadic, Q};

/// Shapes of `μ(I) <= c(|I|)·|I|^δ` with `c` a step function of the depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassBound {
    /// `c` constant.
    Constant { c: Q },
    /// `c = 1/s` from depth `thresholds[s−1]` on, `c = 1` before the
    /// first threshold.
    Decaying { thresholds: Vec<u64> },
    /// `c` constant with the exponent lowered by `reduction`.
    ReducedExponent { c: Q, reduction: Q },
}

impl MassBound {
    pub fn label(&self) -> &'static str {
        match self {
            MassBound::Constant { .. } => "constant",
            MassBound::Decaying { .. } => "decaying",
            MassBound::ReducedExponent { .. } => "reduced",
        }
    }

    /// `c` at depth `n`.
    pub fn c_at(&self, n: u64) -> Q {
        match self {
            MassBound::Constant { c } | MassBound::ReducedExponent { c, .. } => *c,
            MassBound::Decaying { thresholds } => {
                let s = thresholds.iter().take_while(|&&g| g <= n).count();
                Q::new(1, s.max(1) as i64)
            }
        }
    }

    pub fn exponent(&self, delta: Q) -> Q {
        match self {
            MassBound::ReducedExponent { reduction, .. } => delta - reduction,
            _ => delta,
        }
    }

    /// Whether `mass <= c(n)·2^(−n·exponent)`.
    pub fn admits(&self, mass: &Dyadic, n: u64, delta: Q) -> bool {
        let e = self.exponent(delta) * Q::from_integer(n as i64);
        mass.cmp_scaled_pow2(&self.c_at(n), &e) != Ordering::Greater
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassBoundRow {
    pub depth: u64,
    /// Largest `n`-cell mass; the sup of `μ(I)/|I|^δ` is this times `2^(nδ)`.
    pub sup: Dyadic,
    pub witness: DigitString,
    /// One verdict per tested bound, in order.
    pub verdicts: Vec<bool>,
}

/// Behaviour of `sup μ(I)/|I|^δ` across the checked depths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupTrend {
    /// Never increases: finite-depth evidence only, not an asymptotic claim.
    NonIncreasing,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassBoundReport {
    pub delta: Q,
    pub bounds: Vec<MassBound>,
    pub rows: Vec<MassBoundRow>,
    pub trend: SupTrend,
}

impl MassBoundReport {
    pub fn holds(&self, bound: usize) -> bool {
        self.rows.iter().all(|r| r.verdicts[bound])
    }

    /// Smallest checked depth from which the bound holds at every later
    /// checked depth (the empirical "for large s" constant).
    pub fn holds_from(&self, bound: usize) -> Option<u64> {
        let mut from = None;
        for r in self.rows.iter().rev() {
            if !r.verdicts[bound] {
                break;
            }
            from = Some(r.depth);
        }
        from
    }

    pub fn row(&self, depth: u64) -> Option<&MassBoundRow> {
        self.rows.iter().find(|r| r.depth == depth)
    }
}

/// `a·2^(nδ) >= b·2^(mδ)` for masses `a` at depth `n`, `b` at depth `m`.
fn ratio_ge(a: &Dyadic, n: u64, b: &Dyadic, m: u64, delta: Q) -> bool {
    let (p, q) = (*delta.numer(), *delta.denom() as u64);
    let shift = BigInt::from(q) * (BigInt::from(a.log2_den()) - BigInt::from(b.log2_den()))
        + BigInt::from(p) * (BigInt::from(m) - BigInt::from(n));
    cmp_products(a.numer(), b.numer(), q, &shift) != Ordering::Less
}

/// Exact per-depth sup of `μ(I)` with a witness cell, tested against each
/// bound shape.
pub fn verify_mass_bound(
    m: &DyadicMeasure,
    delta: Q,
    bounds: &[MassBound],
    depths: impl IntoIterator<Item = u64>,
) -> Result<MassBoundReport> {
    if delta <= Q::from_integer(0) || delta > Q::from_integer(1) {
        return Err(Error::usage(format!("exponent {delta} outside (0, 1]")));
    }
    for b in bounds {
        let c = match b {
            MassBound::Constant { c } | MassBound::ReducedExponent { c, .. } => *c,
            MassBound::Decaying { .. } => Q::from_integer(1),
        };
        if c <= Q::from_integer(0) {
            return Err(Error::usage("bound constants must be positive"));
        }
    }
    let mut rows = Vec::new();
    for n in depths {
        let (sup, witness) = m.max_mass(n)?;
        let verdicts = bounds.iter().map(|b| b.admits(&sup, n, delta)).collect();
        rows.push(MassBoundRow {
            depth: n,
            sup,
            witness,
            verdicts,
        });
    }
    let trend = if rows
        .windows(2)
        .all(|w| ratio_ge(&w[0].sup, w[0].depth, &w[1].sup, w[1].depth, delta))
    {
        SupTrend::NonIncreasing
    } else {
        SupTrend::Mixed
    };
    Ok(MassBoundReport {
        delta,
        bounds: bounds.to_vec(),
        rows,
        trend,
    })
}

/// CSV `depth,sup_num,sup_den,witness_index,verdict`; `sup` is the largest
/// cell mass and `verdict` lists `label=pass|fail` per bound.
pub fn write_mass_report_csv<W: Write>(r: &MassBoundReport, mut w: W) -> Result<()> {
    writeln!(w, "depth,sup_num,sup_den,witness_index,verdict")?;
    for row in &r.rows {
        let verdict: Vec<String> = r
            .bounds
            .iter()
            .zip(&row.verdicts)
            .map(|(b, &ok)| format!("{}={}", b.label(), if ok { "pass" } else { "fail" }))
            .collect();
        let den = num_bigint::BigUint::from(1u32) << row.sup.log2_den();
        writeln!(
            w,
            "{},{},{},{},{}",
            row.depth,
            row.sup.numer(),
            den,
            row.witness.numer(),
            verdict.join(";")
        )?;
    }
    Ok(())
}

/// Outcome of checking `ν̄ = ν × Lebesgue^d0` on dyadic rectangles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleVerdict {
    pub d0: u32,
    /// Exponent checked: the base exponent plus `d0`.
    pub exponent: Q,
    pub checked: u64,
    /// Side depths `(n_0, n_1, ..)` of failing rectangles.
    pub failures: Vec<Vec<u64>>,
}

impl RectangleVerdict {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `ν̄(B) <= c(|B|)·|B|^(δ+d0)` for every rectangle `B = I × J_1 ×
/// … × J_d0` with `I` a cell at a depth of the base report and each `J_k`
/// a cell at one of `side_depths`; `|B|` is the longest side. Only the
/// heaviest `I` at each depth matters, so this is exhaustive over those
/// side depths.
pub fn rectangle_product_bound(
    base: &MassBoundReport,
    bound: usize,
    d0: u32,
    side_depths: &[u64],
) -> Result<RectangleVerdict> {
    let shape = base
        .bounds
        .get(bound)
        .ok_or_else(|| Error::usage(format!("base report has no bound {bound}")))?;
    let exponent = shape.exponent(base.delta) + Q::from_integer(d0 as i64);
    let mut checked = 0u64;
    let mut failures = Vec::new();
    let mut sides = vec![0usize; d0 as usize];
    for row in &base.rows {
        loop {
            let depths: Vec<u64> = sides.iter().map(|&k| side_depths[k]).collect();
            let m = depths.iter().copied().chain([row.depth]).min().unwrap();
            let extra: u64 = depths.iter().sum();
            let mass = &row.sup * &Dyadic::pow2_neg(extra);
            let e = exponent * Q::from_integer(m as i64);
            checked += 1;
            if mass.cmp_scaled_pow2(&shape.c_at(m), &e) == Ordering::Greater {
                let mut f = vec![row.depth];
                f.extend(depths);
                failures.push(f);
            }
            // odometer over side depth choices
            let mut k = 0;
            while k < sides.len() {
                sides[k] += 1;
                if sides[k] < side_depths.len() {
                    break;
                }
                sides[k] = 0;
                k += 1;
            }
            if k == sides.len() || side_depths.is_empty() {
                break;
            }
        }
    }
    Ok(RectangleVerdict {
        d0,
        exponent,
        checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::super::measure::{equal_split_measure, mu_i_measure};
    use super::*;
    use crate::dyadic::{CellCover, Exactness};
    use crate::schedule::{build_interval_schedule, AlphaSequence, GrowthMode};

    fn constant() -> Vec<MassBound> {
        vec![MassBound::Constant {
            c: Q::from_integer(1),
        }]
    }

    #[test]
    fn uniform_and_point_masses() {
        let u = DyadicMeasure::Trie(equal_split_measure(&CellCover::full(8, 1).unwrap()).unwrap());
        let r = verify_mass_bound(&u, Q::from_integer(1), &constant(), 0..=8).unwrap();
        assert!(r.holds(0));
        assert_eq!(r.trend, SupTrend::NonIncreasing);
        let p = DyadicMeasure::Trie(
            equal_split_measure(&CellCover::new(8, 1, vec![77], Exactness::Exact).unwrap())
                .unwrap(),
        );
        let r = verify_mass_bound(&p, Q::new(1, 2), &constant(), 1..=8).unwrap();
        assert!(r.rows.iter().all(|row| !row.verdicts[0]));
        assert_eq!(r.trend, SupTrend::Mixed);
        assert_eq!(r.holds_from(0), None);
        assert!(verify_mass_bound(&p, Q::new(3, 2), &constant(), 1..=2).is_err());
        assert!(verify_mass_bound(&p, Q::from_integer(0), &constant(), 1..=2).is_err());
    }

    #[test]
    fn decaying_step_function() {
        let b = MassBound::Decaying {
            thresholds: vec![10, 20, 40],
        };
        assert_eq!(b.c_at(5), Q::from_integer(1));
        assert_eq!(b.c_at(20), Q::new(1, 2));
        assert_eq!(b.c_at(100), Q::new(1, 3));
    }

    #[test]
    fn toy_mu_two_decays_like_one_over_s() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 6, GrowthMode::toy(4).unwrap()).unwrap();
        let w = 5000;
        let mu = mu_i_measure(&s, w).unwrap();
        let gam: Vec<u64> = (1..=3)
            .map(|k| s.entry(k).unwrap().gamma.clone().try_into().unwrap())
            .collect();
        let bounds = vec![MassBound::Decaying { thresholds: gam }];
        let r = verify_mass_bound(&mu, Q::new(1, 2), &bounds, 1..=w).unwrap();
        assert!(r.holds(0));
        let mut out = Vec::new();
        write_mass_report_csv(&r, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(
            text.starts_with("depth,sup_num,sup_den,witness_index,verdict\n1,1,2,0,decaying=pass")
        );
    }

    #[test]
    fn rectangles_inherit_the_base_bound() {
        let u = DyadicMeasure::Trie(equal_split_measure(&CellCover::full(6, 1).unwrap()).unwrap());
        let r = verify_mass_bound(&u, Q::from_integer(1), &constant(), 0..=6).unwrap();
        let v = rectangle_product_bound(&r, 0, 1, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        assert!(v.holds());
        assert_eq!(v.checked, 49);
        assert_eq!(v.exponent, Q::from_integer(2));
        let p = DyadicMeasure::Trie(
            equal_split_measure(&CellCover::new(6, 1, vec![5], Exactness::Exact).unwrap()).unwrap(),
        );
        let r = verify_mass_bound(&p, Q::new(1, 2), &constant(), 1..=6).unwrap();
        assert!(!rectangle_product_bound(&r, 0, 1, &[0, 3, 6])
            .unwrap()
            .holds());
    }
}
