//! The acceptance checks as library functions, shared by the `report`
//! command and the acceptance test target. Each check returns a pass flag
//! and a one-line exact detail; timings are kept out of the rendered text
//! so that two runs of the same configuration agree byte for byte.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convexity::{hull_gap, midpoint_certify, MidpointMode};
use crate::dimension::{
    billingsley_lower, componentwise_estimate, lower_density, off_n, q_cover_certificate,
    CertificateVerdict,
};
use crate::dyadic::{CellCover, DigitSpec, Exactness, RuleUnion, ZeroForcedRule};
use crate::error::{Budget, Error, Result};
use crate::exact::Q;
use crate::measures::{equal_split_measure, mu_i_measure, verify_mass_bound, DyadicMeasure, MassBound};
use crate::positions::PositionSet;
use crate::schedule::{
    build_interval_schedule, build_zeta, estimate_constants, final_a_spec, AlphaSequence,
    GrowthMode, IntervalSchedule,
};
use crate::sumset::{brute_sumset, count_sumset_cells, e_set, product_cover, sumset_cover_dp};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    #[serde(serialize_with = "crate::exact::text::display")]
    pub alphas: AlphaSequence,
    pub growth_base: u64,
    /// Schedule index used by the single-`i` checks.
    pub i: u64,
    pub i_max: u64,
    pub count: u64,
    /// Digit depth of the convexity checks.
    pub depth: u64,
    pub j_max: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget_cells: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            alphas: AlphaSequence::parse("1/2,2/3,3/4,4/5").expect("valid default"),
            growth_base: 4,
            i: 2,
            i_max: 4,
            count: 8,
            depth: 40,
            j_max: 3,
            samples: 1000,
            seed: 7,
            budget_cells: Budget::DEFAULT_CELLS,
        }
    }
}

impl SuiteConfig {
    fn budget(&self) -> Budget {
        Budget::new(self.budget_cells)
    }

    fn toy(&self) -> Result<GrowthMode> {
        GrowthMode::toy(self.growth_base)
    }

    fn toy_schedule(&self, i: u64, count: u64) -> Result<IntervalSchedule> {
        build_interval_schedule(i, &self.alphas, count, self.toy()?)
    }

    /// The final set `A` truncated at the convexity depth.
    pub fn final_set(&self) -> Result<DigitSpec> {
        let scheds: Vec<IntervalSchedule> = (1..=self.i)
            .map(|i| self.toy_schedule(i, 6))
            .collect::<Result<_>>()?;
        let z = build_zeta(self.i, &scheds, &[])?;
        Ok(final_a_spec(&z, &scheds, self.depth)?.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

type Check = fn(&SuiteConfig) -> Result<(bool, String)>;

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "schedule-exactness"),
    (2, "sumset-oracle"),
    (3, "off-measure-identity"),
    (4, "lower-density"),
    (5, "mass-bound"),
    (6, "covering-certificate"),
    (7, "midpoint-certification"),
    (8, "dimension-targets"),
    (9, "product-additivity"),
    (10, "non-convexity"),
    (11, "determinism"),
];

fn check_fn(id: u32) -> Check {
    match id {
        1 => schedule_exactness,
        2 => sumset_oracle,
        3 => off_measure_identity,
        4 => lower_density_check,
        5 => mass_bound,
        6 => covering_certificate,
        7 => midpoint_certification,
        8 => dimension_targets,
        9 => product_additivity,
        10 => non_convexity,
        _ => determinism,
    }
}

/// Runs one criterion. Hard errors are returned, not folded into a fail.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::usage(format!("no criterion {id}")))?
        .1;
    let start = Instant::now();
    let (ok, detail) = check_fn(id)(cfg)?;
    Ok(CriterionResult {
        id,
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
        elapsed: start.elapsed(),
    })
}

pub fn skipped(id: u32, why: &str) -> CriterionResult {
    CriterionResult {
        id,
        name: CRITERIA[id as usize - 1].1,
        status: Status::Skipped,
        detail: why.to_string(),
        elapsed: Duration::ZERO,
    }
}

/// Criteria 1 through 10. If the schedule criterion fails, the rest are
/// skipped: everything downstream is built from the schedule.
pub fn run_checks(cfg: &SuiteConfig) -> Result<Vec<CriterionResult>> {
    let first = run_criterion(1, cfg)?;
    let failed = first.status != Status::Pass;
    let mut out = vec![first];
    for id in 2..=10 {
        out.push(if failed {
            skipped(id, "schedule suite failed")
        } else {
            run_criterion(id, cfg)?
        });
    }
    Ok(out)
}

/// All eleven; the last reruns 1 through 10 and compares the rendering.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CriterionResult>> {
    let mut out = run_checks(cfg)?;
    if out[0].status != Status::Pass {
        out.push(skipped(11, "schedule suite failed"));
        return Ok(out);
    }
    let start = Instant::now();
    let again = run_checks(cfg)?;
    let same = render_text(&out) == render_text(&again);
    out.push(CriterionResult {
        id: 11,
        name: CRITERIA[10].1,
        status: if same { Status::Pass } else { Status::Fail },
        detail: format!("two runs with seed {} render identically: {same}", cfg.seed),
        elapsed: start.elapsed(),
    });
    Ok(out)
}

/// `id name status detail`, one line per result.
pub fn render_text(results: &[CriterionResult]) -> String {
    let mut s = String::new();
    for r in results {
        let _ = writeln!(s, "{:>2} {:<22} {} {}", r.id, r.name, r.status.label(), r.detail);
    }
    s
}

fn schedule_exactness(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let i_max = cfg.i_max.min(cfg.alphas.len() as u64);
    let toy = match cfg.toy() {
        Ok(m) => m,
        Err(e) => return Ok((false, e.to_string())),
    };
    let mut checked = 0usize;
    let mut failed = Vec::new();
    for mode in [toy, GrowthMode::Faithful] {
        let mut scheds = Vec::new();
        for i in 1..=i_max {
            let s = build_interval_schedule(i, &cfg.alphas, cfg.count, mode)?;
            for c in s.check_constraints() {
                checked += 1;
                if !c.passed {
                    failed.push(format!("{} i={i} {} s={}", mode.label(), c.name, c.s));
                }
            }
            scheds.push(s);
        }
        if mode != GrowthMode::Faithful {
            let z = build_zeta(i_max, &scheds, &[])?;
            for (i, c) in z.constraints() {
                checked += 1;
                if c.status.is_violated() {
                    failed.push(format!("zeta i={i} {}", c.name));
                }
            }
        }
    }
    let detail = match failed.first() {
        None => format!("{checked} inequalities hold for i<={i_max}, {} terms", cfg.count),
        Some(f) => format!("{} of {checked} fail, first {f}", failed.len()),
    };
    Ok((failed.is_empty(), detail))
}

fn random_rule(rng: &mut ChaCha8Rng, n: u64, free: u64) -> Result<ZeroForcedRule> {
    let free_pos: HashSet<u64> = sample(rng, n as usize, free as usize)
        .into_iter()
        .map(|p| p as u64 + 1)
        .collect();
    let mut forced: Vec<u64> = (1..=n).filter(|p| !free_pos.contains(p)).collect();
    // positions past the working depth do not matter but are allowed
    forced.extend((n + 1..=12).filter(|_| rng.gen_bool(0.5)));
    ZeroForcedRule::new(PositionSet::from_positions(forced)?, 12)
}

fn sumset_oracle(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let budget = Budget::unlimited();
    let instances = 200;
    let mut bad = None;
    for t in 0..instances {
        let n = rng.gen_range(1..=12u64);
        let j = rng.gen_range(1..=4u64);
        let free = rng.gen_range(0..=n.min(24 / j));
        let spec = DigitSpec::from(RuleUnion::single(random_rule(&mut rng, n, free)?));
        let cover = spec.materialize(n as u32, 1, &budget)?;
        let dp = sumset_cover_dp(&spec, j, n as u32, &budget)?;
        let bf = brute_sumset(&cover, j, &budget)?;
        if dp != bf && bad.is_none() {
            bad = Some(format!("instance {t}: n={n} j={j}"));
        }
    }
    Ok(match bad {
        None => (true, format!("{instances} random rules, j<=4, depth<=12: equal")),
        Some(b) => (false, format!("mismatch at {b}")),
    })
}

fn random_trie(rng: &mut ChaCha8Rng) -> Result<CellCover> {
    let n = rng.gen_range(1..=20u32);
    if rng.gen_bool(0.5) {
        let m = rng.gen_range(1..=300usize);
        let cells: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect();
        CellCover::from_unsorted(n, 1, cells, Exactness::Exact)
    } else {
        let rules = (0..rng.gen_range(1..=3))
            .map(|_| {
                let free = rng.gen_range(0..=(n as u64).min(10));
                random_rule(rng, n as u64, free)
                    .and_then(|r| ZeroForcedRule::new(r.forced().clone(), 20))
            })
            .collect::<Result<Vec<_>>>()?;
        RuleUnion::new(rules).materialize(n, 1, &Budget::default())
    }
}

fn off_measure_identity(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0ff);
    let tries = 100;
    let mut leaves = 0u64;
    for t in 0..tries {
        let cover = random_trie(&mut rng)?;
        let n = cover.depth();
        let levels = cover.trie_levels();
        let sets: Vec<HashSet<u64>> = levels.iter().map(|l| l.iter().copied().collect()).collect();
        let mu = equal_split_measure(&cover)?;
        for &k in cover.cells() {
            let branches = (0..n)
                .filter(|&d| {
                    let node = k >> (n - d);
                    let next = &sets[d as usize + 1];
                    next.contains(&(2 * node)) && next.contains(&(2 * node + 1))
                })
                .count() as i64;
            if mu.mass(n, k).neg_log2_exact() != Some(branches) {
                return Ok((false, format!("trie {t}: leaf {k} mass {}", mu.mass(n, k))));
            }
            leaves += 1;
        }
        let b = billingsley_lower(&DyadicMeasure::Trie(mu), n as u64)?;
        let off = off_n(&cover)?;
        if b.exact() != Some(off) {
            return Ok((false, format!("trie {t}: billingsley {b:?} vs OFF {off}")));
        }
    }
    Ok((true, format!("{tries} tries, {leaves} leaves: mass and OFF identities exact")))
}

fn lower_density_check(_: &SuiteConfig) -> Result<(bool, String)> {
    let top = 1000u64;
    let free = PositionSet::from_positions((1..=top).filter(|p| p % 3 != 0))?;
    let prof = lower_density(&free, top);
    let target = Q::new(2, 3);
    let tol = Q::new(1, 50);
    if let Some(n) = (300..=top).find(|&n| {
        let d = prof.density(n);
        d < target - tol || d > target + tol
    }) {
        return Ok((false, format!("density {} at n={n}", prof.density(n))));
    }
    let spec = DigitSpec::from(RuleUnion::single(ZeroForcedRule::from_free(&free, top)?));
    let small = Budget::default();
    for n in 1..=top {
        let expect = BigUint::from(1u8) << prof.count(n);
        // carry-automaton count, independent of the rule's closed form
        if count_sumset_cells(&spec, 1, n)? != expect {
            return Ok((false, format!("box count differs at n={n}")));
        }
        if n <= 20 && spec.materialize(n as u32, 1, &small)?.len() as u64 != 1 << prof.count(n) {
            return Ok((false, format!("materialized count differs at n={n}")));
        }
    }
    let (lo, at) = prof.min_between(300, top);
    Ok((true, format!("min density on [300,{top}] is {lo} at n={at}; N_n = 2^free for n<={top}")))
}

fn mass_bound(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cfg.toy_schedule(cfg.i, 6)?;
    let w = 5000u64.min(s.covered_depth_u64());
    let mu = mu_i_measure(&s, w)?;
    let thresholds: Vec<u64> = (1..=3)
        .map(|k| s.gamma(k).and_then(|g| g.to_u64()).ok_or_else(|| Error::usage("schedule too short")))
        .collect::<Result<_>>()?;
    let alpha1 = cfg.alphas.get(1)?;
    let r = verify_mass_bound(&mu, alpha1, &[MassBound::Decaying { thresholds: thresholds.clone() }], 1..=w)?;
    let ok = r.holds(0);
    Ok((ok, format!(
        "mu^{}(I) <= (1/s)|I|^{alpha1} at every depth <= {w}, thresholds {thresholds:?}: {ok}",
        cfg.i
    )))
}

fn covering_certificate(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cfg.toy_schedule(cfg.i, 6)?;
    let p = s.eta(5).and_then(|e| e.to_u64()).ok_or_else(|| Error::usage("schedule too short"))?;
    let est = estimate_constants(&s, p + 1000)?;
    let mut parts = Vec::new();
    let mut ok = true;
    for j in 1..=cfg.i {
        let c = q_cover_certificate(&s, &est, j, p)?;
        ok &= c.verdict == CertificateVerdict::Below;
        parts.push(format!("j={j} beta={} {:?}", c.beta, c.verdict));
    }
    Ok((ok, format!("cover of Q at eta_5={p}: {}", parts.join(", "))))
}

fn midpoint_report(cfg: &SuiteConfig) -> Result<crate::convexity::MidpointReport> {
    let spec = cfg.final_set()?;
    midpoint_certify(
        &spec,
        cfg.j_max,
        cfg.depth,
        MidpointMode::Sampled { samples: cfg.samples, seed: cfg.seed },
        &cfg.budget(),
    )
}

fn midpoint_certification(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let r = midpoint_report(cfg)?;
    Ok((r.all_certified(), format!(
        "{}/{} pairs certified, {} also found by the carry automaton, j,k<={} depth {}",
        r.certified, r.checked, r.cover_level_passed, r.j_max, r.depth
    )))
}

fn dimension_targets(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let s = cfg.toy_schedule(cfg.i, 6)?;
    let depths: Vec<u64> = (1..=5)
        .map(|k| s.eta(k).and_then(|e| e.to_u64()).ok_or_else(|| Error::usage("schedule too short")))
        .collect::<Result<_>>()?;
    let tol = Q::new(3, 20);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut unions = Vec::new();
    for j in 1..=cfg.i {
        let e = componentwise_estimate(&s, j, &depths)?;
        let target = cfg.alphas.get(j)?;
        let hit = e.estimate.within(target, tol);
        ok &= hit;
        parts.push(format!("A_{j} in [{}, {}] vs {target}", e.estimate.lo, e.estimate.hi));
        unions.push(e.union_counts);
    }
    let increasing = unions.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b.1 > a.1));
    ok &= increasing;
    Ok((ok, format!(
        "depths {depths:?}: {}; union counts increase in j at every depth: {increasing}",
        parts.join(", ")
    )))
}

fn product_additivity(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9);
    let mut checked = 0;
    for n in 1..=20u32 {
        let m = rng.gen_range(1..=64usize);
        let cells: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect();
        let c = CellCover::from_unsorted(n, 1, cells, Exactness::Exact)?;
        for d0 in 1..=2u32 {
            let p = product_cover(&c, d0)?;
            let expect = BigUint::from(c.len()) * (BigUint::from(1u8) << (d0 * n));
            if p.box_count() != expect {
                return Ok((false, format!("n={n} d0={d0}: {} vs {expect}", p.box_count())));
            }
            if n <= 4 {
                // enumerate every box of the ambient grid
                let side = 1u64 << n;
                let mut count = 0u64;
                for k in 0..side {
                    for r in 0..side.pow(d0) {
                        let rest: Vec<u64> = (0..d0).map(|t| (r / side.pow(t)) % side).collect();
                        count += p.contains_box(k, &rest) as u64;
                    }
                }
                if BigUint::from(count) != expect {
                    return Ok((false, format!("n={n} d0={d0}: enumerated {count}")));
                }
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} products with d0<=2, n<=20 count |c|*2^(d0 n)")))
}

fn non_convexity(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let spec = cfg.final_set()?;
    let n = u32::try_from(cfg.depth).map_err(|_| Error::usage("depth too large"))?;
    let e = e_set(&spec, cfg.j_max, n, &cfg.budget())?;
    let hull = hull_gap(&e, cfg.j_max, cfg.depth)?;
    let mid = midpoint_report(cfg)?;
    let ok = hull.has_gaps() && mid.all_certified();
    let first = hull
        .gap_cells
        .first()
        .map(|(p, q)| format!("[{p}, {q})/{}", e.denominator()))
        .unwrap_or_else(|| "none".into());
    Ok((ok, format!(
        "{} gaps in the hull of E (j<={}, depth {}), first {first}; midpoints certified: {}",
        hull.gap_cells.len(),
        cfg.j_max,
        cfg.depth,
        mid.all_certified()
    )))
}

fn determinism(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let a = render_text(&run_checks(cfg)?);
    let b = render_text(&run_checks(cfg)?);
    Ok((a == b, format!("two runs render identically: {}", a == b)))
}
