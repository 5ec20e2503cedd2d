//! Finite-resolution test for "convex up to the boundary of the hull, with
//! nonempty interior". Cells are closed grid boxes of side `2^-n`; all
//! geometry is on the integer corner lattice, so every test is exact.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;
use serde::Serialize;

use super::hull::{truncation_caveat, IntervalHull};
use crate::error::{Budget, Error, Result};
use crate::sumset::RationalCover;

/// Explicit 3D hulls are found by brute force over candidate vertices.
pub const MAX_HULL_CANDIDATES_3D: usize = 160;
pub const MAX_EXPLICIT_DEPTH: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EssentialVerdict {
    EssentiallyConvexAtResolution,
    NotEssentiallyConvexAtResolution,
}

/// `normal · x <= offset` on corner coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Halfspace {
    fn slack(&self, p: &[i64]) -> i64 {
        self.offset - self.normal.iter().zip(p).map(|(a, b)| a * b).sum::<i64>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HullShape {
    /// Facets of the hull of all cell corners.
    Polytope { dim: usize, facets: Vec<Halfspace> },
    /// `factor × [0,1]^cube_dims`.
    Product {
        factor: IntervalHull,
        cube_dims: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EssentialReport {
    pub depth: u32,
    pub verdict: EssentialVerdict,
    pub hull: HullShape,
    /// A covered cell whose neighbours inside the hull are all covered.
    pub interior_witness: Option<Vec<u64>>,
    /// Number of grid cells inside the hull missed by the cover.
    pub gap_cells: u64,
    /// A missed cell inside the hull that does not reach its boundary.
    pub interior_gap: Option<Vec<u64>>,
    /// Dimension of the affine span, for product forms only.
    pub subspace_dim: Option<usize>,
    pub caveat: String,
}

impl EssentialReport {
    pub fn is_essentially_convex(&self) -> bool {
        self.verdict == EssentialVerdict::EssentiallyConvexAtResolution
    }
}

fn verdict(interior: bool, bad_gap: bool) -> EssentialVerdict {
    if interior && !bad_gap {
        EssentialVerdict::EssentiallyConvexAtResolution
    } else {
        EssentialVerdict::NotEssentiallyConvexAtResolution
    }
}

fn cross(o: &[i64], a: &[i64], b: &[i64]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn hull_2d(points: &[Vec<i64>]) -> Vec<Halfspace> {
    let mut pts = points.to_vec();
    pts.sort();
    let mut chain: Vec<Vec<i64>> = Vec::new();
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &Vec<i64>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while chain.len() >= start + 2
                && cross(&chain[chain.len() - 2], &chain[chain.len() - 1], p) <= 0
            {
                chain.pop();
            }
            chain.push(p.clone());
        }
        chain.pop();
    }
    // counter-clockwise: the inside is to the left of every edge
    (0..chain.len())
        .map(|i| {
            let (p, q) = (&chain[i], &chain[(i + 1) % chain.len()]);
            let normal = vec![q[1] - p[1], p[0] - q[0]];
            let offset = normal[0] * p[0] + normal[1] * p[1];
            Halfspace { normal, offset }
        })
        .collect()
}

fn normalized(normal: Vec<i64>, offset: i64) -> Halfspace {
    let g = normal.iter().fold(offset.abs(), |g, &x| g.gcd(&x.abs()));
    let g = g.max(1);
    Halfspace {
        normal: normal.into_iter().map(|x| x / g).collect(),
        offset: offset / g,
    }
}

/// Points that are the first or last along each axis-parallel line
/// through them; every vertex of the hull is one.
fn axis_extreme(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = points[0].len();
    let mut keep: BTreeSet<Vec<i64>> = BTreeSet::new();
    for axis in 0..d {
        let mut lines: std::collections::BTreeMap<Vec<i64>, (i64, i64)> = Default::default();
        for p in points {
            let mut key = p.clone();
            key.remove(axis);
            let e = lines.entry(key).or_insert((p[axis], p[axis]));
            e.0 = e.0.min(p[axis]);
            e.1 = e.1.max(p[axis]);
        }
        let on_ends: BTreeSet<Vec<i64>> = points
            .iter()
            .filter(|p| {
                let mut key = (*p).clone();
                key.remove(axis);
                let (lo, hi) = lines[&key];
                p[axis] == lo || p[axis] == hi
            })
            .cloned()
            .collect();
        keep = if axis == 0 {
            on_ends
        } else {
            keep.intersection(&on_ends).cloned().collect()
        };
    }
    keep.into_iter().collect()
}

fn hull_3d(points: &[Vec<i64>]) -> Result<Vec<Halfspace>> {
    let cand = axis_extreme(points);
    if cand.len() > MAX_HULL_CANDIDATES_3D {
        return Err(Error::usage(format!(
            "3D hull has {} candidate vertices, limit {MAX_HULL_CANDIDATES_3D}",
            cand.len()
        )));
    }
    let sub = |a: &[i64], b: &[i64]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let mut facets = BTreeSet::new();
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            for k in j + 1..cand.len() {
                let (u, v) = (sub(&cand[j], &cand[i]), sub(&cand[k], &cand[i]));
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                if n == [0, 0, 0] {
                    continue;
                }
                let off: i64 = (0..3).map(|t| n[t] * cand[i][t]).sum();
                let side = |p: &Vec<i64>| (0..3).map(|t| n[t] * p[t]).sum::<i64>() - off;
                let (mut above, mut below) = (false, false);
                for p in &cand {
                    let s = side(p);
                    above |= s > 0;
                    below |= s < 0;
                    if above && below {
                        break;
                    }
                }
                if !above {
                    facets.insert(normalized(n.to_vec(), off));
                } else if !below {
                    facets.insert(normalized(n.iter().map(|x| -x).collect(), -off));
                }
            }
        }
    }
    Ok(facets.into_iter().collect())
}

fn corners(cell: &[u64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let d = cell.len();
    (0..1u32 << d).map(move |m| {
        (0..d)
            .map(|t| cell[t] as i64 + ((m >> t) & 1) as i64)
            .collect()
    })
}

/// Odometer over the box `lo..=hi`.
fn grid(lo: &[u64], hi: &[u64]) -> impl Iterator<Item = Vec<u64>> {
    let lo = lo.to_vec();
    let hi = hi.to_vec();
    let mut cur = Some(lo.clone());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut c = out.clone();
        let mut t = 0;
        loop {
            if t == c.len() {
                cur = None;
                break;
            }
            if c[t] < hi[t] {
                c[t] += 1;
                cur = Some(c);
                break;
            }
            c[t] = lo[t];
            t += 1;
        }
        Some(out)
    })
}

/// Explicit cells `[c_1, c_1+1] × ... × [c_d, c_d+1]` (units `2^-n`) in
/// dimension `d <= 3`.
pub fn essential_convexity_explicit(
    dim: usize,
    depth: u32,
    cells: &[Vec<u64>],
    budget: &Budget,
) -> Result<EssentialReport> {
    if !(1..=3).contains(&dim) {
        return Err(Error::usage("explicit covers need dimension 1, 2 or 3"));
    }
    if depth == 0 || depth > MAX_EXPLICIT_DEPTH {
        return Err(Error::usage(format!(
            "explicit depth must lie in 1..={MAX_EXPLICIT_DEPTH}"
        )));
    }
    let side = 1u64 << depth;
    if cells.is_empty() {
        return Err(Error::usage("empty cover"));
    }
    if cells.iter().any(|c| c.len() != dim || c.iter().any(|&x| x >= side)) {
        return Err(Error::usage(format!(
            "cells must have {dim} coordinates below {side}"
        )));
    }
    let covered: HashSet<&[u64]> = cells.iter().map(|c| c.as_slice()).collect();
    let pts: Vec<Vec<i64>> = cells
        .iter()
        .flat_map(|c| corners(c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let facets = match dim {
        1 => {
            let lo = pts.iter().map(|p| p[0]).min().unwrap_or(0);
            let hi = pts.iter().map(|p| p[0]).max().unwrap_or(0);
            vec![
                Halfspace { normal: vec![-1], offset: -lo },
                Halfspace { normal: vec![1], offset: hi },
            ]
        }
        2 => hull_2d(&pts),
        _ => hull_3d(&pts)?,
    };
    let inside = |c: &[u64]| corners(c).all(|p| facets.iter().all(|h| h.slack(&p) >= 0));
    let touches = |c: &[u64]| corners(c).any(|p| facets.iter().any(|h| h.slack(&p) == 0));

    let lo: Vec<u64> = (0..dim).map(|t| cells.iter().map(|c| c[t]).min().unwrap()).collect();
    let hi: Vec<u64> = (0..dim).map(|t| cells.iter().map(|c| c[t]).max().unwrap()).collect();
    let boxed: u128 = (0..dim).map(|t| (hi[t] - lo[t] + 1) as u128).product();
    budget.check("hull grid cells", &boxed)?;

    let mut gap_cells = 0u64;
    let mut interior_gap = None;
    for c in grid(&lo, &hi) {
        if covered.contains(c.as_slice()) || !inside(&c) {
            continue;
        }
        gap_cells += 1;
        if interior_gap.is_none() && !touches(&c) {
            interior_gap = Some(c);
        }
    }
    let ones = vec![1u64; dim];
    let interior_witness = cells
        .iter()
        .find(|c| {
            let nlo: Vec<u64> = c.iter().map(|&x| x.saturating_sub(1)).collect();
            let nhi: Vec<u64> = c.iter().zip(&ones).map(|(&x, _)| (x + 1).min(side - 1)).collect();
            grid(&nlo, &nhi).all(|q| covered.contains(q.as_slice()) || !inside(&q))
        })
        .cloned();
    Ok(EssentialReport {
        depth,
        verdict: verdict(interior_witness.is_some(), interior_gap.is_some()),
        hull: HullShape::Polytope { dim, facets },
        interior_witness,
        gap_cells,
        interior_gap,
        subspace_dim: None,
        caveat: format!("decided on the depth-{depth} grid only"),
    })
}

/// `factor × [0,1)^cube_dims` with the cube resolved at `depth`. The
/// factor's gaps sit strictly inside its hull, so a gap box avoids the
/// boundary of the product hull exactly when its cube part can: always if
/// `cube_dims = 0`, otherwise once the cube grid has an interior cell.
pub fn essential_convexity_product(
    factor: &RationalCover,
    cube_dims: usize,
    depth: u32,
    j_max: u64,
) -> Result<EssentialReport> {
    let hull = super::hull::hull_gap(factor, j_max, depth as u64)?;
    let cube_interior = cube_dims == 0 || depth >= 2;
    let interior_gap = if cube_interior {
        hull.gap_cells.first().map(|(p, _)| {
            let mut w = vec![p.try_into().unwrap_or(u64::MAX)];
            w.extend(std::iter::repeat_n(1u64, cube_dims));
            w
        })
    } else {
        None
    };
    let gap_units: u64 = hull
        .gap_cells
        .iter()
        .map(|(p, q)| u64::try_from(q - p).unwrap_or(u64::MAX))
        .fold(0, u64::saturating_add);
    let gap_cells = gap_units.saturating_mul(1u64.checked_shl(depth * cube_dims as u32).unwrap_or(u64::MAX));
    let factor_span = usize::from(factor.points().len() >= 2 || factor.intervals().len() >= 2);
    let interior_witness = factor.intervals().first().map(|(p, _)| {
        let mut w = vec![p.try_into().unwrap_or(u64::MAX)];
        w.extend(std::iter::repeat_n(0u64, cube_dims));
        w
    });
    Ok(EssentialReport {
        depth,
        verdict: verdict(interior_witness.is_some(), interior_gap.is_some()),
        hull: HullShape::Product {
            factor: hull.hull.expect("nonempty factor"),
            cube_dims,
        },
        interior_witness,
        gap_cells,
        interior_gap,
        subspace_dim: Some(factor_span + cube_dims),
        caveat: truncation_caveat(j_max, depth as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn all_cells(dim: usize, depth: u32) -> Vec<Vec<u64>> {
        let m = (1u64 << depth) - 1;
        grid(&vec![0; dim], &vec![m; dim]).collect()
    }

    #[test]
    fn full_cube_every_dimension() {
        for dim in 1..=3 {
            for depth in 1..=3 {
                let r = essential_convexity_explicit(dim, depth, &all_cells(dim, depth), &Budget::default())
                    .unwrap();
                assert!(r.is_essentially_convex(), "dim {dim} depth {depth}");
                assert_eq!(r.gap_cells, 0);
            }
        }
    }

    #[test]
    fn opposite_corners() {
        for dim in 1..=3 {
            let cells = vec![vec![0; dim], vec![7; dim]];
            let r = essential_convexity_explicit(dim, 3, &cells, &Budget::default()).unwrap();
            assert!(!r.is_essentially_convex(), "dim {dim}");
            assert!(r.gap_cells > 0);
            assert!(r.interior_witness.is_none());
        }
        // in 1D the gap is strictly inside
        let r = essential_convexity_explicit(1, 3, &[vec![0], vec![7]], &Budget::default()).unwrap();
        assert_eq!(r.interior_gap, Some(vec![1]));
        assert_eq!(r.gap_cells, 6);
    }

    #[test]
    fn square_hull_facets() {
        let r = essential_convexity_explicit(2, 2, &all_cells(2, 2), &Budget::default()).unwrap();
        match r.hull {
            HullShape::Polytope { facets, .. } => assert_eq!(facets.len(), 4),
            _ => unreachable!(),
        }
        let r = essential_convexity_explicit(3, 1, &all_cells(3, 1), &Budget::default()).unwrap();
        match r.hull {
            HullShape::Polytope { facets, .. } => assert_eq!(facets.len(), 6),
            _ => unreachable!(),
        }
    }

    #[test]
    fn l_shape_is_convex_up_to_boundary() {
        // hull of an L is a pentagon; the missing corner cell touches the
        // diagonal facet
        let cells = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
        let r = essential_convexity_explicit(2, 1, &cells, &Budget::default()).unwrap();
        assert_eq!(r.gap_cells, 0);
        let cells = vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1], vec![0, 2], vec![1, 1]];
        let r = essential_convexity_explicit(2, 2, &cells, &Budget::default()).unwrap();
        assert!(r.is_essentially_convex());
    }

    #[test]
    fn punctured_square() {
        let mut cells = all_cells(2, 2);
        cells.retain(|c| c != &vec![1, 1]);
        let r = essential_convexity_explicit(2, 2, &cells, &Budget::default()).unwrap();
        assert_eq!(r.interior_gap, Some(vec![1, 1]));
        assert!(!r.is_essentially_convex());
    }

    #[test]
    fn product_with_gapped_factor() {
        let b = |x: u64| BigUint::from(x);
        let gapped = RationalCover::new(b(8), vec![(b(0), b(1)), (b(7), b(8))], vec![b(0), b(7)]).unwrap();
        let r = essential_convexity_product(&gapped, 1, 3, 1).unwrap();
        assert!(!r.is_essentially_convex());
        assert_eq!(r.subspace_dim, Some(2));
        assert_eq!(r.gap_cells, 6 * 8);
        // at depth 1 every cube cell meets the cube boundary
        assert!(essential_convexity_product(&gapped, 1, 1, 1).unwrap().is_essentially_convex());
        let full = RationalCover::new(b(8), vec![(b(0), b(8))], vec![]).unwrap();
        assert!(essential_convexity_product(&full, 2, 3, 1).unwrap().is_essentially_convex());
    }
}
