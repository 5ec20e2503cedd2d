//! Counting analog of the self-similar density step: a midpoint-convex
//! set containing `0` and its maximum `y` is closed under `x ↦ x/2` and
//! `x ↦ (x+y)/2`, so `n` such steps carry the ball `B_{r0}(y)` into the
//! ball of radius `2^-n r0` around `y_{k,n} = k 2^-n y` for odd `k`.
//!
//! On cell indices with the base at depth `M`, those `n` steps send index
//! `X` to `X + (k-1)·Y` at depth `M+n`, and radii measured in cells stay
//! the same.

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use crate::dyadic::{CellCover, Exactness};
use crate::error::{Budget, Error, Result};
use crate::exact::{text, Dyadic};
use crate::dyadic::DigitSpec;
use crate::sumset::sumset_runs;

/// Deepest generation checked; there are `2^(n-1)` centres at generation `n`.
pub const MAX_GENERATIONS: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityCheckRow {
    pub n: u32,
    pub k: u64,
    /// Centre index `k·Y` at depth `M+n`.
    pub center: u64,
    /// Cells of the depth-`M+n` cover within `r0` cells of the centre.
    pub count: u64,
    /// Cells of the base cover within `r0` cells of `Y`.
    pub target_lower: u64,
    /// First image index missing from the cover, if any.
    pub missing: Option<u64>,
}

impl DensityCheckRow {
    pub fn passed(&self) -> bool {
        self.missing.is_none() && self.count >= self.target_lower
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityCheckReport {
    pub base_depth: u32,
    #[serde(serialize_with = "text::ratio")]
    pub base_point: BigRational,
    #[serde(serialize_with = "text::display")]
    pub r0: Dyadic,
    pub rows: Vec<DensityCheckRow>,
}

impl DensityCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(DensityCheckRow::passed)
    }

    pub fn first_failure(&self) -> Option<&DensityCheckRow> {
        self.rows.iter().find(|r| !r.passed())
    }
}

fn ball(cells: &[u64], center: u64, r: u64) -> &[u64] {
    let lo = cells.partition_point(|&c| c + r <= center);
    let hi = cells.partition_point(|&c| c < center.saturating_add(r));
    &cells[lo..hi.max(lo)]
}

/// `targets[n-1]` is the cover at depth `M+n`, `M` the base depth. Cell
/// left endpoints stand for the points of the set; `0` must be among
/// them and the largest is taken as `y`.
pub fn halving_density_check(
    base: &CellCover,
    targets: &[CellCover],
    r0_cells: u64,
) -> Result<DensityCheckReport> {
    let m = base.depth();
    let cells = base.cells();
    let y = match (cells.first(), cells.last()) {
        (Some(0), Some(&y)) if y > 0 => y,
        _ => {
            return Err(Error::usage(
                "halving check needs 0 and a positive maximum in the base cover",
            ))
        }
    };
    if r0_cells == 0 {
        return Err(Error::usage("r0 must be at least one cell"));
    }
    if targets.len() > MAX_GENERATIONS as usize {
        return Err(Error::usage(format!(
            "at most {MAX_GENERATIONS} generations"
        )));
    }
    let base_ball = ball(cells, y, r0_cells);
    let target_lower = base_ball.len() as u64;
    let mut rows = Vec::new();
    for (i, t) in targets.iter().enumerate() {
        let n = i as u32 + 1;
        if t.depth() != m + n {
            return Err(Error::usage(format!(
                "generation {n} cover has depth {}, expected {}",
                t.depth(),
                m + n
            )));
        }
        for k in (1..(1u64 << n)).step_by(2) {
            let overflow = || Error::usage("centre index overflows 64 bits");
            let center = k.checked_mul(y).ok_or_else(overflow)?;
            let shift = (k - 1) * y;
            let missing = base_ball
                .iter()
                .map(|&x| x + shift)
                .find(|&img| !t.contains_index(img));
            rows.push(DensityCheckRow {
                n,
                k,
                center,
                count: ball(t.cells(), center, r0_cells).len() as u64,
                target_lower,
                missing,
            });
        }
    }
    Ok(DensityCheckReport {
        base_depth: m,
        base_point: BigRational::new(y.into(), (BigUint::from(1u8) << m).into()),
        r0: Dyadic::new(BigUint::from(r0_cells), m as u64),
        rows,
    })
}

/// `∪ A_j/j` over the given powers of two `j`, as exact cells at depth
/// `n + log2(max j)`: a point `K/(j·2^n)` is the cell `K·(J/j)`.
pub fn dyadic_average_cover(
    spec: &DigitSpec,
    js: &[u64],
    n: u32,
    budget: &Budget,
) -> Result<CellCover> {
    let jm = js.iter().copied().max().unwrap_or(0);
    if js.iter().any(|&j| !j.is_power_of_two()) || jm == 0 {
        return Err(Error::usage("averages must use powers of two j"));
    }
    let depth = n + jm.trailing_zeros();
    let mut out = Vec::new();
    for &j in js {
        let runs = sumset_runs(spec, j, n, budget)?;
        let f = jm / j;
        let total: u64 = runs.len();
        budget.check("average cover cells", &(out.len() as u64 + total))?;
        for &(a, b) in runs.runs() {
            out.extend((a..=b).map(|k| k * f));
        }
    }
    CellCover::from_unsorted(depth, 1, out, Exactness::Exact)
}
