use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::alpha::AlphaSequence;
use super::partition::{locate, Located};
use crate::error::{Error, Result};
use crate::exact::{cmp_pow_pow2, Q};

/// How fast the schedule outruns itself. `Faithful` separates consecutive
/// intervals by the factor `2^(2^s)`; `Toy` uses `growth_base^min(s, cap)`
/// so that several periods fit at desk-scale depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthMode {
    Faithful,
    Toy { growth_base: u64, exponent_cap: u32 },
}

impl GrowthMode {
    /// Faithful growth is capped here: `2^(2^s)` for larger `s` no longer
    /// fits comfortably in memory.
    pub const MAX_FAITHFUL_COUNT: u64 = 24;

    pub fn toy(growth_base: u64) -> Result<Self> {
        let m = GrowthMode::Toy {
            growth_base,
            exponent_cap: 1,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GrowthMode::Faithful => Ok(()),
            GrowthMode::Toy {
                growth_base,
                exponent_cap,
            } => {
                if growth_base < 2 || exponent_cap == 0 {
                    Err(Error::usage(format!(
                        "toy growth base {growth_base} with exponent cap {exponent_cap} \
                         cannot keep consecutive intervals apart (need base >= 2, cap >= 1)"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Separation factor `F(s)` in `γ_{s+1} > F(s)·η_s`.
    pub fn factor(&self, s: u64) -> BigUint {
        match *self {
            GrowthMode::Faithful => BigUint::one() << (1u64 << s),
            GrowthMode::Toy {
                growth_base,
                exponent_cap,
            } => num_traits::pow(
                BigUint::from(growth_base),
                s.min(exponent_cap as u64) as usize,
            ),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GrowthMode::Faithful => "faithful".into(),
            GrowthMode::Toy {
                growth_base,
                exponent_cap,
            } => format!("toy {growth_base} {exponent_cap}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub s: u64,
    pub loc: Located,
    pub gamma: BigUint,
    pub eta: BigUint,
    pub d: BigUint,
    /// `Σ_{n<s} d_n`.
    pub d_before: BigUint,
}

/// The interval sequences `γ_s <= η_s` for one `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSchedule {
    pub i: u64,
    pub alphas: AlphaSequence,
    pub mode: GrowthMode,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub s: u64,
    pub passed: bool,
    pub detail: String,
}

/// Least `γ` with `γ(1−α_1) > 1 + D + log2 s`. With `α_1 = a/b` this reads
/// `γ(b−a) − b(1+D) = X` where `2^X > s^b`, so `X >= bitlen(s^b)`.
fn measure_lower_bound(s: u64, alpha1: &Q, d_before: &BigUint) -> BigUint {
    let a = BigUint::from(*alpha1.numer() as u64);
    let b = BigUint::from(*alpha1.denom() as u64);
    let c = &b - &a;
    let sb = num_traits::pow(BigUint::from(s), *alpha1.denom() as usize);
    // least X with 2^X > s^b is the bit length of s^b
    let x_min = BigUint::from(sb.bits());
    let need = x_min + &b * (BigUint::one() + d_before);
    need.div_ceil(&c)
}

/// Largest `L` with `α_t·L <= Y − log2 s`, `Y = γ − 1 − D`.
fn eta_candidate(s: u64, alpha_t: &Q, y: &BigInt) -> BigInt {
    let a = BigInt::from(*alpha_t.numer());
    let b = BigInt::from(*alpha_t.denom());
    let sb = num_traits::pow(BigUint::from(s), *alpha_t.denom() as usize);
    // least Z with 2^Z >= s^b
    let z_min = if sb.count_ones() == 1 {
        sb.bits() - 1
    } else {
        sb.bits()
    };
    (&b * y - BigInt::from(z_min)).div_floor(&a)
}

/// Does `α·L <= Y − log2 s` hold? Exact: `s^b <= 2^(bY − aL)`.
fn fits(s: u64, alpha: &Q, y: &BigInt, l: &BigInt) -> bool {
    let a = BigInt::from(*alpha.numer());
    let b = BigInt::from(*alpha.denom());
    let e = &b * y - &a * l;
    cmp_pow_pow2(&BigUint::from(s), *alpha.denom() as u64, &e) != Ordering::Greater
}

/// `2^-(γ − 1 − D) < (1/s)·2^(−α_1 γ)`, i.e. `s^b < 2^(b(γ−1−D) − aγ)`.
fn measure_holds(s: u64, alpha1: &Q, gamma: &BigInt, d_before: &BigInt) -> bool {
    let a = BigInt::from(*alpha1.numer());
    let b = BigInt::from(*alpha1.denom());
    let e = &b * (gamma - 1 - d_before) - &a * gamma;
    cmp_pow_pow2(&BigUint::from(s), *alpha1.denom() as u64, &e) == Ordering::Less
}

/// Builds `count` terms of the schedule for index `i`, each `γ_s` minimal.
pub fn build_interval_schedule(
    i: u64,
    alphas: &AlphaSequence,
    count: u64,
    mode: GrowthMode,
) -> Result<IntervalSchedule> {
    mode.validate()?;
    if count == 0 {
        return Err(Error::usage("schedule count must be at least 1"));
    }
    if mode == GrowthMode::Faithful && count > GrowthMode::MAX_FAITHFUL_COUNT {
        return Err(Error::usage(format!(
            "faithful schedules are limited to {} terms",
            GrowthMode::MAX_FAITHFUL_COUNT
        )));
    }
    let alphas = alphas.prefix(i)?;
    let alpha1 = alphas.get(1)?;
    let mut entries: Vec<ScheduleEntry> = Vec::with_capacity(count as usize);
    let mut d_before = BigUint::zero();
    for s in 1..=count {
        let loc = locate(i, s)?;
        let growth_min = match entries.last() {
            None => BigUint::from(3u32),
            Some(prev) => mode.factor(s - 1) * &prev.eta + 1u32,
        };
        let gamma = growth_min.max(measure_lower_bound(s, &alpha1, &d_before));
        let y = BigInt::from(gamma.clone()) - 1 - BigInt::from(d_before.clone());
        let l = eta_candidate(s, &alphas.get(loc.t)?, &y);
        let gamma_i = BigInt::from(gamma.clone());
        let eta = if l > gamma_i {
            l.magnitude().clone()
        } else {
            gamma.clone()
        };
        let d = &eta - &gamma + 1u32;
        entries.push(ScheduleEntry {
            s,
            loc,
            gamma,
            eta,
            d: d.clone(),
            d_before: d_before.clone(),
        });
        d_before += d;
    }
    Ok(IntervalSchedule {
        i,
        alphas,
        mode,
        entries,
    })
}

impl IntervalSchedule {
    pub fn count(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Entry for `s` (1-based).
    pub fn entry(&self, s: u64) -> Option<&ScheduleEntry> {
        self.entries.get((s as usize).wrapping_sub(1))
    }

    pub fn gamma(&self, s: u64) -> Option<&BigUint> {
        self.entry(s).map(|e| &e.gamma)
    }

    pub fn eta(&self, s: u64) -> Option<&BigUint> {
        self.entry(s).map(|e| &e.eta)
    }

    /// Every digit position up to this depth is determined by the generated
    /// terms: the next interval starts beyond `F(count)·η_count`.
    pub fn covered_depth(&self) -> BigUint {
        let last = self.entries.last().expect("schedules are nonempty");
        self.mode.factor(last.s) * &last.eta
    }

    /// `covered_depth` clamped to `u64`.
    pub fn covered_depth_u64(&self) -> u64 {
        self.covered_depth().to_u64().unwrap_or(u64::MAX)
    }

    pub(crate) fn require_cutoff(&self, cutoff: u64) -> Result<()> {
        if BigUint::from(cutoff) > self.covered_depth() {
            return Err(Error::usage(format!(
                "schedule with {} terms determines digits only up to {}, cutoff {cutoff} requested",
                self.count(),
                self.covered_depth()
            )));
        }
        Ok(())
    }

    /// `(s, loc, γ_s, η_s)` for the entries whose interval starts at or
    /// before `cutoff`, as machine integers.
    pub(crate) fn intervals_upto(&self, cutoff: u64) -> Vec<(u64, Located, u64, u64)> {
        let mut out = Vec::new();
        for e in &self.entries {
            let Some(g) = e.gamma.to_u64().filter(|&g| g <= cutoff) else {
                break;
            };
            let h = e.eta.to_u64().unwrap_or(u64::MAX);
            out.push((e.s, e.loc, g, h));
        }
        out
    }

    /// Re-derives every defining inequality from scratch, by a route that
    /// does not share code with the minimal-choice construction.
    pub fn check_constraints(&self) -> Vec<ConstraintCheck> {
        let mut out = Vec::new();
        let alpha1 = self.alphas.get(1).expect("alpha_1 exists");
        let mut check = |name: &str, s: u64, passed: bool, detail: String| {
            out.push(ConstraintCheck {
                name: name.to_string(),
                s,
                passed,
                detail,
            })
        };
        let mut d_sum = BigUint::zero();
        for (idx, e) in self.entries.iter().enumerate() {
            let s = e.s;
            let gamma = BigInt::from(e.gamma.clone());
            let d_before = BigInt::from(d_sum.clone());
            if s == 1 {
                check(
                    "gamma_1_above_2",
                    s,
                    e.gamma > BigUint::from(2u32),
                    format!("gamma_1={}", e.gamma),
                );
            }
            check(
                "eta_at_least_gamma",
                s,
                e.eta >= e.gamma,
                format!("gamma={} eta={}", e.gamma, e.eta),
            );
            let d_ok = e.eta >= e.gamma && e.d == &e.eta - &e.gamma + 1u32 && e.d_before == d_sum;
            check("interval_length", s, d_ok, format!("d={}", e.d));
            let loc_ok = locate(self.i, s).map(|l| l == e.loc).unwrap_or(false);
            check(
                "location",
                s,
                loc_ok,
                format!("t={} q={} k={}", e.loc.t, e.loc.q, e.loc.k),
            );
            check(
                "measure",
                s,
                measure_holds(s, &alpha1, &gamma, &d_before),
                format!("gamma={} sum_d={}", e.gamma, d_sum),
            );
            if let Some(next) = self.entries.get(idx + 1) {
                let bound = self.mode.factor(s) * &e.eta;
                check(
                    "growth",
                    s,
                    next.gamma > bound,
                    format!("gamma_{}={} vs F({s})*eta_{s}={bound}", s + 1, next.gamma),
                );
                if let GrowthMode::Toy { growth_base, .. } = self.mode {
                    check(
                        "toy_growth",
                        s,
                        next.gamma > BigUint::from(growth_base) * &e.eta,
                        format!("base {growth_base}"),
                    );
                }
            }
            // η is max(γ, L) with L the floor: verify both sides of the floor.
            let alpha_t = self.alphas.get(e.loc.t).expect("alpha_t exists");
            let y = &gamma - 1 - &d_before;
            let eta = BigInt::from(e.eta.clone());
            let floor_ok = if eta > gamma {
                fits(s, &alpha_t, &y, &eta) && !fits(s, &alpha_t, &y, &(&eta + 1))
            } else {
                !fits(s, &alpha_t, &y, &(&gamma + 1))
            };
            check(
                "eta_floor",
                s,
                floor_ok,
                format!("eta={} alpha_t={alpha_t}", e.eta),
            );
            // γ − 1 must break one of the constraints.
            let gm = &gamma - 1;
            let growth_broken = match idx {
                0 => gm <= BigInt::from(2),
                _ => {
                    let prev = &self.entries[idx - 1];
                    gm <= BigInt::from(self.mode.factor(s - 1) * &prev.eta)
                }
            };
            let measure_broken = !measure_holds(s, &alpha1, &gm, &d_before);
            check(
                "gamma_minimal",
                s,
                growth_broken || measure_broken,
                format!("gamma-1={gm}"),
            );
            d_sum += &e.d;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(i: u64, alphas: &str, count: u64) -> IntervalSchedule {
        build_interval_schedule(
            i,
            &AlphaSequence::parse(alphas).unwrap(),
            count,
            GrowthMode::toy(4).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn first_term_half_half() {
        let a = AlphaSequence::parse("1/2,1/2").unwrap();
        let s = build_interval_schedule(2, &a, 1, GrowthMode::Faithful).unwrap();
        assert_eq!(s.entries[0].gamma, BigUint::from(3u32));
        assert_eq!(s.entries[0].eta, BigUint::from(4u32));
    }

    #[test]
    fn frozen_toy_fixture() {
        // i=2, α=(1/2,2/3), base 4; computed independently and frozen.
        let s = toy(2, "1/2,2/3", 8);
        let gamma: Vec<u64> = s
            .entries
            .iter()
            .map(|e| e.gamma.to_u64().unwrap())
            .collect();
        let eta: Vec<u64> = s.entries.iter().map(|e| e.eta.to_u64().unwrap()).collect();
        assert_eq!(gamma, [3, 17, 77, 553, 3865, 20285, 148745, 1041209]);
        assert_eq!(eta, [4, 19, 138, 966, 5071, 37186, 260302, 1366585]);
        let t: Vec<u64> = s.entries.iter().map(|e| e.loc.t).collect();
        assert_eq!(t, [1, 2, 1, 1, 2, 1, 1, 2]);
    }

    #[test]
    fn all_constraints_hold() {
        for i in 1..=4u64 {
            for alphas in ["1/2,1/2,1/2,1/2", "1/3,1/2,2/3,3/4", "1/2,2/3,2/3,9/10"] {
                let a = AlphaSequence::parse(alphas).unwrap();
                for mode in [
                    GrowthMode::Faithful,
                    GrowthMode::toy(4).unwrap(),
                    GrowthMode::toy(2).unwrap(),
                ] {
                    let sched = build_interval_schedule(i, &a, 8, mode).unwrap();
                    for c in sched.check_constraints() {
                        assert!(c.passed, "i={i} {alphas} {mode:?}: {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn faithful_growth_is_doubly_exponential() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 6, GrowthMode::Faithful).unwrap();
        for w in s.entries.windows(2) {
            let f = BigUint::one() << (1u64 << w[0].s);
            assert!(w[1].gamma > f * &w[0].eta);
        }
        assert!(s.entries[5].gamma.bits() > 32);
    }

    #[test]
    fn bad_modes_rejected() {
        assert!(GrowthMode::toy(1).is_err());
        let a = AlphaSequence::parse("1/2").unwrap();
        assert!(build_interval_schedule(1, &a, 0, GrowthMode::Faithful).is_err());
        assert!(build_interval_schedule(2, &a, 3, GrowthMode::Faithful).is_err());
    }

    #[test]
    fn ratio_approaches_alpha_within_slack() {
        // γ/(η − 2j) − α_j lies in [lo, lo + α_j) / (η − 2j) with
        // lo = 1 + D + log2 s + 2jα_j; the slack vanishes in faithful mode.
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let s = build_interval_schedule(2, &a, 7, GrowthMode::Faithful).unwrap();
        for e in s.entries.iter().filter(|e| e.loc.k >= 1) {
            let j = e.loc.t;
            let alpha = a.get(j).unwrap();
            let g = e.gamma.to_f64().unwrap();
            let h = e.eta.to_f64().unwrap() - 2.0 * j as f64;
            let al = *alpha.numer() as f64 / *alpha.denom() as f64;
            let lo = 1.0 + e.d_before.to_f64().unwrap() + (e.s as f64).log2() + 2.0 * j as f64 * al;
            let dev = g / h - al;
            assert!(dev >= lo / h - 1e-9 && dev < (lo + al) / h + 1e-9, "{e:?}");
        }
        let last = s.entries.last().unwrap();
        let al = if last.loc.t == 1 { 0.5 } else { 2.0 / 3.0 };
        let r =
            last.gamma.to_f64().unwrap() / (last.eta.to_f64().unwrap() - 2.0 * last.loc.t as f64);
        assert!((r - al).abs() < 1e-6);
    }
}
