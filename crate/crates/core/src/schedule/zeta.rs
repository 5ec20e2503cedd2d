use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::empirical::EmpiricalEstimates;
use super::intervals::IntervalSchedule;
use super::rules::{Diagnostic, RuleBuild};
use crate::dyadic::DigitSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ConstraintStatus {
    Verified { detail: String },
    Unverified { reason: String },
    Violated { detail: String },
}

impl ConstraintStatus {
    pub fn is_violated(&self) -> bool {
        matches!(self, ConstraintStatus::Violated { .. })
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, ConstraintStatus::Verified { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaConstraint {
    pub name: String,
    pub status: ConstraintStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaEntry {
    pub i: u64,
    pub zeta: u64,
    /// `s_i = ζ_1 + ... + ζ_{i−1}`.
    pub s: u64,
    pub constraints: Vec<ZetaConstraint>,
}

/// Block lengths `ζ_i` of the final set, with `ζ_0 := 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaSchedule {
    pub entries: Vec<ZetaEntry>,
}

impl ZetaSchedule {
    pub fn zeta(&self, i: u64) -> Option<u64> {
        self.entries
            .get((i as usize).wrapping_sub(1))
            .map(|e| e.zeta)
    }

    /// `s_i`; `s_{i_max+1}` is the total length.
    pub fn s(&self, i: u64) -> Option<u64> {
        if i as usize == self.entries.len() + 1 {
            let last = self.entries.last()?;
            return Some(last.s + last.zeta);
        }
        self.entries.get((i as usize).wrapping_sub(1)).map(|e| e.s)
    }

    pub fn total_len(&self) -> u64 {
        self.s(self.entries.len() as u64 + 1).unwrap_or(0)
    }

    pub fn constraints(&self) -> impl Iterator<Item = (u64, &ZetaConstraint)> {
        self.entries
            .iter()
            .flat_map(|e| e.constraints.iter().map(move |c| (e.i, c)))
    }
}

fn overflow() -> Error {
    Error::usage("zeta exceeds the 64-bit range")
}

fn verified(name: &str, detail: String) -> ZetaConstraint {
    ZetaConstraint {
        name: name.into(),
        status: ConstraintStatus::Verified { detail },
    }
}

fn unverified(name: &str, reason: String) -> ZetaConstraint {
    ZetaConstraint {
        name: name.into(),
        status: ConstraintStatus::Unverified { reason },
    }
}

fn judged(name: &str, holds: bool, detail: String) -> ZetaConstraint {
    ZetaConstraint {
        name: name.into(),
        status: if holds {
            ConstraintStatus::Verified { detail }
        } else {
            ConstraintStatus::Violated { detail }
        },
    }
}

/// Chooses each `ζ_i` as the least integer meeting every available
/// constraint. `scheds[k]` is the schedule for `i = k+1` and may extend
/// past `i_max` (the `m_{i+1}` constraint reads one schedule ahead);
/// `estimates` is aligned the same way and missing entries leave the
/// matching constraints unverified.
pub fn build_zeta(
    i_max: u64,
    scheds: &[IntervalSchedule],
    estimates: &[Option<EmpiricalEstimates>],
) -> Result<ZetaSchedule> {
    if i_max == 0 || scheds.len() < i_max as usize {
        return Err(Error::usage(format!(
            "zeta up to i={i_max} needs schedules for every i <= {i_max}"
        )));
    }
    for (k, s) in scheds.iter().enumerate() {
        if s.i != k as u64 + 1 {
            return Err(Error::usage(
                "schedules must be listed in order i = 1, 2, ...",
            ));
        }
    }
    let est = |i: u64| estimates.get(i as usize - 1).and_then(|e| e.as_ref());
    let mut entries = Vec::new();
    let mut prev = 1u64;
    let mut s_i = 0u64;
    for i in 1..=i_max {
        let sched = &scheds[i as usize - 1];
        let gamma2 = sched
            .gamma(2)
            .ok_or_else(|| Error::usage(format!("schedule for i={i} needs at least 2 terms")))?
            .to_u64()
            .ok_or_else(overflow)?;
        let growth = 1u64
            .checked_shl(i as u32)
            .and_then(|f| f.checked_mul(prev))
            .ok_or_else(overflow)?;
        let mut zeta = (growth + 1).max(gamma2 + 1);
        let two_i_s = 2 * i * s_i;
        if let Some(p) = est(i).and_then(|e| e.p) {
            zeta = zeta.max(p + 1);
        }
        let m_next = est(i + 1).map(|e| e.m);
        if let Some(m) = m_next {
            zeta = zeta.max((i + 1) * m + 1);
        }
        let q_need = est(i).map(|e| e.least_p_with_q_above(two_i_s));
        if let Some(Some(p)) = q_need {
            zeta = zeta.max(p);
        }

        // Re-judge each constraint against the chosen value.
        let mut cs = vec![
            judged(
                "growth",
                zeta > growth,
                format!("zeta={zeta} > 2^{i}*{prev}={growth}"),
            ),
            judged(
                "past_second_interval",
                zeta > gamma2,
                format!("zeta={zeta} > gamma^{i}_2={gamma2}"),
            ),
        ];
        cs.push(match est(i) {
            None => unverified("cover_threshold", format!("no estimate of p_{i}")),
            Some(e) => match e.p {
                Some(p) => judged(
                    "cover_threshold",
                    zeta > p,
                    format!(
                        "zeta={zeta} > p_{i}={p} (estimated at depth {})",
                        e.working_depth
                    ),
                ),
                None => unverified(
                    "cover_threshold",
                    format!("no certificate for some j within depth {}", e.working_depth),
                ),
            },
        });
        cs.push(match (est(i + 1), m_next) {
            (Some(e), Some(m)) => judged(
                "measure_threshold",
                zeta > (i + 1) * m,
                format!(
                    "zeta={zeta} > {}*m_{}={} (estimated at depth {})",
                    i + 1,
                    i + 1,
                    (i + 1) * m,
                    e.working_depth
                ),
            ),
            _ => unverified("measure_threshold", format!("no estimate of m_{}", i + 1)),
        });
        cs.push(match est(i) {
            None => unverified("cover_scale", format!("no estimate of q_{i}")),
            Some(e) => match e.q_of(zeta) {
                Some(q) => judged(
                    "cover_scale",
                    q > two_i_s,
                    format!("q_{i}(zeta)={q} > 2*{i}*s_{i}={two_i_s}"),
                ),
                None => match q_need {
                    // q is nondecreasing, so the witness p below zeta suffices
                    Some(Some(p)) if p <= zeta => verified(
                        "cover_scale",
                        format!("q_{i}({p}) > {two_i_s} and q_{i} is nondecreasing"),
                    ),
                    _ => unverified(
                        "cover_scale",
                        format!(
                            "q_{i} cannot exceed {two_i_s} within depth {}",
                            e.working_depth
                        ),
                    ),
                },
            },
        });
        entries.push(ZetaEntry {
            i,
            zeta,
            s: s_i,
            constraints: cs,
        });
        s_i = s_i.checked_add(zeta).ok_or_else(overflow)?;
        prev = zeta;
    }
    Ok(ZetaSchedule { entries })
}

/// The final set as a block concatenation: digits `s_i+1 ..= s_{i+1}` form
/// a member of `A^i`. Blocks are included until `depth` is reached.
pub fn final_a_spec(
    zeta: &ZetaSchedule,
    scheds: &[IntervalSchedule],
    depth: u64,
) -> Result<RuleBuild<DigitSpec>> {
    if depth > zeta.total_len() {
        return Err(Error::usage(format!(
            "the zeta schedule determines the final set only to depth {}, {depth} requested",
            zeta.total_len()
        )));
    }
    let mut blocks = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    for e in &zeta.entries {
        if e.s >= depth && !blocks.is_empty() {
            break;
        }
        let sched = scheds
            .get(e.i as usize - 1)
            .ok_or_else(|| Error::usage(format!("missing schedule for i={}", e.i)))?;
        let a = sched.a_rule_union(e.zeta)?;
        diagnostics.extend(a.diagnostics.into_iter().map(|d| Diagnostic {
            s: d.s,
            message: format!("block {}: {}", e.i, d.message),
        }));
        blocks.push((e.zeta, a.value));
    }
    Ok(RuleBuild {
        value: DigitSpec::from_blocks(blocks)?,
        diagnostics,
    })
}
