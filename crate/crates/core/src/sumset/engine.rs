//! The three passes over an [`AddendLayout`], all running from the least
//! significant digit to the most significant one:
//!
//! * `sum_set`: the exact set of sums `K` (so `K·2^-n` is a sum of `j`
//!   truncated points), as a bitset over `0..j·2^n`.
//! * `count_sums`: the number of distinct `K`, by subset construction over
//!   the carry automaton with states `(alternative, carry)`, so depth is
//!   limited by time rather than memory.
//! * `one_positions`: the positions at which some `K` has a 1 digit.
//!
//! Two more run the other way or on a single sum: `sum_runs` builds the
//! sums as maximal runs of consecutive integers from the most significant
//! digit down (free digits merge runs, forced ones split them), and
//! `contains_sum` decides membership of one `K` on the carry automaton.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::layout::AddendLayout;
use crate::bits::BitSet;
use crate::error::{Budget, Error, Result};
use crate::positions::PositionSet;

pub(crate) fn sum_range(layout: &AddendLayout) -> Result<u64> {
    let n = layout.n;
    if n >= 63 {
        return Err(Error::usage(format!(
            "explicit sums need depth < 63, got {n}; use exact counting instead"
        )));
    }
    layout
        .j
        .checked_mul(1u64 << n)
        .ok_or_else(|| Error::usage("sum index range overflows 64 bits"))
}

pub(crate) fn sum_set(layout: &AddendLayout, budget: &Budget) -> Result<BitSet> {
    let range = sum_range(layout)?;
    budget.check(&format!("sumset index range at depth {}", layout.n), &range)?;
    let mut s = BitSet::new(range);
    s.insert(0);
    for block in layout.blocks.iter().rev() {
        let mut merged = BitSet::new(range);
        for cap in &block.alts {
            let mut t = s.clone();
            for (k, &(lo, hi)) in block.segments.iter().enumerate().rev() {
                let f = cap[k] as u64;
                if f == 0 {
                    continue;
                }
                for p in (lo..=hi).rev() {
                    let w = 1u64 << (layout.n - (block.offset + p));
                    let base = t.clone();
                    for c in 1..=f {
                        t.or_shifted(&base, c * w);
                    }
                }
            }
            merged.or_shifted(&t, 0);
        }
        s = merged;
    }
    if layout.blocks.iter().any(|b| b.alts.is_empty()) {
        s = BitSet::new(range);
    }
    Ok(s)
}

/// One digit step `S -> 2S + {0..=cap}` on sorted disjoint runs.
fn double_runs(runs: &[(u64, u64)], cap: u64, budget: &Budget) -> Result<Vec<(u64, u64)>> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(runs.len());
    if cap == 0 {
        let total: u128 = runs.iter().map(|&(a, b)| (b - a + 1) as u128).sum();
        budget.check("sumset runs", &total)?;
        for &(a, b) in runs {
            out.extend((a..=b).map(|x| (2 * x, 2 * x)));
        }
        return Ok(out);
    }
    for &(a, b) in runs {
        let (lo, hi) = (2 * a, 2 * b + cap);
        match out.last_mut() {
            Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    Ok(out)
}

fn merge_runs(mut runs: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    runs.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(runs.len());
    for (a, b) in runs {
        match out.last_mut() {
            Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// The sums `K` as inclusive runs, most significant digit first.
pub(crate) fn sum_runs(layout: &AddendLayout, budget: &Budget) -> Result<Vec<(u64, u64)>> {
    sum_range(layout)?;
    let mut s = vec![(0u64, 0u64)];
    for block in &layout.blocks {
        let mut merged = Vec::new();
        for cap in &block.alts {
            let mut t = s.clone();
            for (k, &(lo, hi)) in block.segments.iter().enumerate() {
                for _ in lo..=hi {
                    t = double_runs(&t, cap[k] as u64, budget)?;
                }
            }
            merged.extend(t);
        }
        budget.check("sumset runs", &(merged.len() as u64))?;
        s = merge_runs(merged);
    }
    Ok(s)
}

/// Whether `k` (in units of `2^-n`) is a sum of `j` truncated members.
pub(crate) fn contains_sum(layout: &AddendLayout, k: &BigUint) -> bool {
    let j = layout.j as usize;
    let n = layout.n;
    // live carries entering the current block from below
    let mut live: Vec<bool> = (0..j).map(|c| c == 0).collect();
    for block in layout.blocks.iter().rev() {
        let mut out = vec![false; j];
        for cap in &block.alts {
            let mut cur = live.clone();
            for (seg, &(lo, hi)) in block.segments.iter().enumerate().rev() {
                let f = cap[seg] as usize;
                for p in (lo..=hi).rev() {
                    let bit = k.bit(n - (block.offset + p)) as usize;
                    let mut next = vec![false; j];
                    for c in (0..j).filter(|&c| cur[c]) {
                        for x in 0..=f {
                            if (x + c) % 2 == bit {
                                next[(x + c) / 2] = true;
                            }
                        }
                    }
                    cur = next;
                }
            }
            for c in 0..j {
                out[c] |= cur[c];
            }
        }
        live = out;
    }
    // what is left is the integer part of the sum
    let int_part = k >> n;
    (0..j).any(|c| live[c] && int_part == BigUint::from(c))
}

type StateSet = Vec<u32>;

fn carries(state: &StateSet, j: u32) -> Vec<u32> {
    let mut c: Vec<u32> = state.iter().map(|s| s % j).collect();
    c.sort_unstable();
    c.dedup();
    c
}

pub(crate) fn count_sums(layout: &AddendLayout) -> BigUint {
    let j = layout.j as u32;
    let mut states: HashMap<StateSet, BigUint> = HashMap::new();
    let mut first = true;
    for block in layout.blocks.iter().rev() {
        let nalt = block.alts.len() as u32;
        if nalt == 0 {
            return BigUint::zero();
        }
        // entering a new block: keep the carries, let the block pick afresh
        let mut entered: HashMap<StateSet, BigUint> = HashMap::new();
        if first {
            entered.insert((0..nalt).map(|a| a * j).collect(), BigUint::from(1u32));
            first = false;
        } else {
            for (st, cnt) in states {
                let cs = carries(&st, j);
                let next: StateSet = (0..nalt)
                    .flat_map(|a| cs.iter().map(move |&c| a * j + c))
                    .collect();
                *entered.entry(next).or_default() += cnt;
            }
        }
        states = entered;
        for (k, &(lo, hi)) in block.segments.iter().enumerate().rev() {
            for _ in lo..=hi {
                let mut next_states: HashMap<StateSet, BigUint> =
                    HashMap::with_capacity(states.len() * 2);
                for (st, cnt) in &states {
                    for bit in 0..2u32 {
                        let mut next: StateSet = Vec::new();
                        for &s in st {
                            let (a, c) = (s / j, s % j);
                            let f = block.alts[a as usize][k] as u32;
                            // column total c + x with x in 0..=f and the right parity
                            let mut x = (bit + c) % 2;
                            while x <= f {
                                next.push(a * j + (c + x) / 2);
                                x += 2;
                            }
                        }
                        if next.is_empty() {
                            continue;
                        }
                        next.sort_unstable();
                        next.dedup();
                        *next_states.entry(next).or_default() += cnt;
                    }
                }
                states = next_states;
            }
        }
    }
    states
        .into_iter()
        .map(|(st, cnt)| cnt * carries(&st, j).len())
        .sum()
}

/// Positions `1..=n` where some sum has a 1 digit. Every automaton state
/// can be completed (the final carry just becomes the integer part), so a
/// reachable state able to emit a 1 witnesses a real sum. Inside a segment
/// the reachable set settles after a few steps, after which the rest of
/// the segment behaves identically and is skipped.
pub(crate) fn one_positions(layout: &AddendLayout) -> Result<PositionSet> {
    let j = layout.j as usize;
    let mut reach: Vec<Vec<bool>> = Vec::new();
    let mut ones: Vec<(u64, u64)> = Vec::new();
    for block in layout.blocks.iter().rev() {
        let nalt = block.alts.len();
        let live: Vec<bool> = (0..j)
            .map(|c| (reach.is_empty() && c == 0) || reach.iter().any(|r| r[c]))
            .collect();
        reach = vec![live; nalt];
        for (k, &(lo, hi)) in block.segments.iter().enumerate().rev() {
            let mut p = hi;
            loop {
                let mut next = vec![vec![false; j]; nalt];
                let mut one = false;
                for (a, row) in reach.iter().enumerate() {
                    let f = block.alts[a][k] as usize;
                    for c in (0..j).filter(|&c| row[c]) {
                        one |= f >= 1 || c % 2 == 1;
                        for x in 0..=f {
                            next[a][(c + x) / 2] = true;
                        }
                    }
                }
                let settled = next == reach;
                reach = next;
                // a settled state repeats for every remaining position
                let stop = if settled { lo } else { p };
                if one {
                    ones.push((block.offset + stop, block.offset + p));
                }
                if stop == lo {
                    break;
                }
                p -= 1;
            }
        }
    }
    PositionSet::from_ranges(ones)
}
