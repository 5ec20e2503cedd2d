use std::fmt::Write as _;

use fracsum_core::convexity::{
    dyadic_average_cover, halving_density_check, hull_gap, midpoint_certify, ConvexityReport,
    DensityCheckReport, MidpointMode,
};
use fracsum_core::dimension::{dim_profile, sumset_dim_profile, write_dimension_csv};
use fracsum_core::measures::{mu_i_measure, verify_mass_bound, write_mass_report_csv, MassBound};
use fracsum_core::schedule::{build_interval_schedule, build_zeta, IntervalSchedule};
use fracsum_core::suite::{render_text, run_suite, Status, SuiteConfig};
use fracsum_core::sumset::{brute_sumset, e_set, sumset_cover_dp, sumset_runs};
use fracsum_core::{DigitSpec, Error, PositionSet, Result, RuleUnion, ZeroForcedRule, Q};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{csv_field, Output};

/// A finished command: its report and whether every check in it passed.
pub struct Outcome {
    pub output: Output,
    pub verified: bool,
}

fn suite_config(cfg: &RunConfig, depth: u64) -> Result<SuiteConfig> {
    Ok(SuiteConfig {
        alphas: cfg.alphas.clone(),
        growth_base: cfg.growth_base,
        i: cfg.i,
        i_max: cfg.imax,
        count: cfg.count,
        depth,
        j_max: cfg.jmax,
        samples: cfg.samples,
        seed: cfg.seed.unwrap_or(0),
        budget_cells: cfg.budget_cells,
    })
}

/// `toy` (the final set of the toy schedule), `rule:FILE` (forced
/// positions, one per line or `a..b` ranges) or `pattern:BITS` (a
/// repeating free/forced mask, `1` = free).
pub fn resolve_set(cfg: &RunConfig, set: &str, cutoff: u64) -> Result<DigitSpec> {
    if set == "toy" {
        return suite_config(cfg, cutoff)?.final_set();
    }
    if let Some(path) = set.strip_prefix("rule:") {
        let forced = PositionSet::parse(&std::fs::read_to_string(path)?)?;
        return Ok(DigitSpec::from(RuleUnion::single(ZeroForcedRule::new(forced, cutoff)?)));
    }
    if let Some(bits) = set.strip_prefix("pattern:") {
        let mask: Vec<bool> = bits
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::usage(format!("pattern {bits:?} must be 0s and 1s"))),
            })
            .collect::<Result<_>>()?;
        if mask.is_empty() {
            return Err(Error::usage("empty pattern"));
        }
        let free = PositionSet::from_positions(
            (1..=cutoff).filter(|p| mask[((p - 1) % mask.len() as u64) as usize]),
        )?;
        return Ok(DigitSpec::from(RuleUnion::single(ZeroForcedRule::from_free(&free, cutoff)?)));
    }
    Err(Error::usage(format!(
        "unknown set {set:?}; use toy, rule:FILE or pattern:BITS"
    )))
}

pub fn schedule(cfg: &RunConfig) -> Result<Outcome> {
    let growth = cfg.growth();
    let scheds: Vec<IntervalSchedule> = (1..=cfg.imax)
        .map(|i| build_interval_schedule(i, &cfg.alphas, cfg.count, growth))
        .collect::<Result<_>>()?;
    let mut failed = Vec::new();
    let mut checked = 0usize;
    for s in &scheds {
        for c in s.check_constraints() {
            checked += 1;
            if !c.passed {
                failed.push(format!("i={} {} s={}: {}", s.i, c.name, c.s, c.detail));
            }
        }
    }
    let zeta = if cfg.count >= 2 {
        Some(build_zeta(cfg.imax, &scheds, &[])?)
    } else {
        None
    };
    let mut csv = String::from("record,i,s,t,q,k,gamma,eta,d,zeta,s_i\n");
    let mut intervals = Vec::new();
    for s in &scheds {
        for e in &s.entries {
            let _ = writeln!(
                csv,
                "interval,{},{},{},{},{},{},{},{},,",
                s.i, e.s, e.loc.t, e.loc.q, e.loc.k, e.gamma, e.eta, e.d
            );
            intervals.push(json!({
                "i": s.i, "s": e.s, "t": e.loc.t, "q": e.loc.q, "k": e.loc.k,
                "gamma": e.gamma.to_string(), "eta": e.eta.to_string(), "d": e.d.to_string(),
            }));
        }
    }
    let mut zetas = Vec::new();
    let mut constraints = Vec::new();
    if let Some(z) = &zeta {
        for e in &z.entries {
            let _ = writeln!(csv, "zeta,{},,,,,,,,{},{}", e.i, e.zeta, e.s);
            zetas.push(json!({"i": e.i, "zeta": e.zeta.to_string(), "s_i": e.s.to_string()}));
        }
        for (i, c) in z.constraints() {
            checked += 1;
            if c.status.is_violated() {
                failed.push(format!("zeta i={i} {}", c.name));
            }
            constraints.push(json!({"i": i, "name": c.name, "status": c.status}));
        }
    }
    let _ = writeln!(csv, "# {checked} constraints checked, {} failed", failed.len());
    for f in &failed {
        eprintln!("constraint failed: {f}");
    }
    Ok(Outcome {
        verified: failed.is_empty(),
        output: Output {
            stem: "schedule",
            csv,
            json: json!({
                "intervals": intervals,
                "zeta": zetas,
                "zeta_constraints": constraints,
                "checked": checked,
                "failed": failed,
            }),
        },
    })
}

pub fn dim(cfg: &RunConfig, set: &str, j: Option<u64>) -> Result<Outcome> {
    let (a, b) = cfg.depth_range()?;
    let spec = resolve_set(cfg, set, b)?;
    let report = match j {
        None | Some(1) => dim_profile(&spec, a..=b, &cfg.budget())?,
        Some(j) => sumset_dim_profile(&spec, j, a..=b, &cfg.budget())?,
    };
    let mut buf = Vec::new();
    write_dimension_csv(&report, &mut buf)?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "depth": r.depth,
                "count": r.count.as_ref().map(|c| c.to_string()),
                "estimate_lo": r.estimate.map(|e| e.lo.to_string()),
                "estimate_hi": r.estimate.map(|e| e.hi.to_string()),
                "off": r.off.map(|q| q.to_string()),
                "method": r.method,
            })
        })
        .collect();
    Ok(Outcome {
        verified: true,
        output: Output {
            stem: "dim",
            csv: String::from_utf8(buf).expect("ascii csv"),
            json: json!({"set": set, "j": j.unwrap_or(1), "rows": rows}),
        },
    })
}

pub fn sumset(cfg: &RunConfig, set: &str, j: u64, oracle: bool) -> Result<Outcome> {
    let n = u32::try_from(cfg.depth).map_err(|_| Error::usage("depth too large"))?;
    let spec = resolve_set(cfg, set, cfg.depth)?;
    let budget = cfg.budget();
    let runs = sumset_runs(&spec, j, n, &budget)?;
    let mut csv = format!(
        "# {} sums K of {j} members at depth {n}; points K/({j}*2^{n})\nrun_lo,run_hi\n",
        runs.len()
    );
    for (lo, hi) in runs.runs() {
        let _ = writeln!(csv, "{lo},{hi}");
    }
    let mut verified = true;
    let mut oracle_json = Value::Null;
    if oracle {
        let cover = spec.materialize(n, 1, &budget)?;
        let dp = sumset_cover_dp(&spec, j, n, &budget)?;
        let bf = brute_sumset(&cover, j, &budget)?;
        let flat: Vec<u64> = runs.runs().iter().flat_map(|&(a, b)| a..=b).collect();
        verified = dp == bf && flat == bf.base_indices();
        let line = format!(
            "oracle: DP and brute force {} on {} sums",
            if verified { "agree" } else { "DISAGREE" },
            bf.len()
        );
        eprintln!("{line}");
        let _ = writeln!(csv, "# {line}");
        oracle_json = json!({"agree": verified, "brute_sums": bf.len(), "dp_sums": dp.len()});
    }
    let run_list: Vec<Value> = runs.runs().iter().map(|&(a, b)| json!([a.to_string(), b.to_string()])).collect();
    Ok(Outcome {
        verified,
        output: Output {
            stem: "sumset",
            csv,
            json: json!({"set": set, "j": j, "depth": n, "sums": runs.len(), "runs": run_list, "oracle": oracle_json}),
        },
    })
}

pub fn measure(cfg: &RunConfig) -> Result<Outcome> {
    let sched = build_interval_schedule(cfg.i, &cfg.alphas, cfg.count, cfg.growth())?;
    let gamma = |s: u64| -> Result<u64> {
        sched
            .gamma(s)
            .and_then(|g| u64::try_from(g).ok())
            .ok_or_else(|| Error::usage(format!("gamma_{s} is not available")))
    };
    let thresholds = (1..=3).map(gamma).collect::<Result<Vec<_>>>()?;
    let (a, b) = match cfg.depths {
        Some(r) => r,
        None => (1, 5000.min(sched.covered_depth_u64())),
    };
    let mu = mu_i_measure(&sched, b)?;
    let delta = cfg.alphas.get(1)?;
    let bounds = vec![
        MassBound::Decaying { thresholds },
        MassBound::Constant { c: Q::from_integer(1) },
    ];
    let r = verify_mass_bound(&mu, delta, &bounds, a..=b)?;
    let mut buf = Vec::new();
    write_mass_report_csv(&r, &mut buf)?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "depth": row.depth,
                "sup": row.sup.to_string(),
                "witness_index": row.witness.numer().to_string(),
                "verdicts": row.verdicts,
            })
        })
        .collect();
    let holds: Vec<bool> = (0..bounds.len()).map(|k| r.holds(k)).collect();
    Ok(Outcome {
        verified: holds.iter().all(|&h| h),
        output: Output {
            stem: "measure",
            csv: String::from_utf8(buf).expect("ascii csv"),
            json: json!({
                "i": cfg.i,
                "delta": delta.to_string(),
                "bounds": bounds,
                "holds": holds,
                "trend": r.trend,
                "rows": rows,
            }),
        },
    })
}

pub struct ConvexityArgs {
    pub set: String,
    pub exhaustive: Option<u64>,
    pub halving_depth: Option<u32>,
    pub r0_cells: u64,
}

pub fn convexity(cfg: &RunConfig, args: &ConvexityArgs) -> Result<Outcome> {
    let cutoff = cfg.depth.max(args.halving_depth.map_or(0, |m| m as u64));
    let spec = resolve_set(cfg, &args.set, cutoff)?;
    let budget = cfg.budget();
    let mode = match args.exhaustive {
        Some(max_pairs) => MidpointMode::Exhaustive { max_pairs },
        None => MidpointMode::Sampled {
            samples: cfg.samples,
            seed: cfg.seed()?,
        },
    };
    let mid = midpoint_certify(&spec, cfg.jmax, cfg.depth, mode, &budget)?;
    let n = u32::try_from(cfg.depth).map_err(|_| Error::usage("depth too large"))?;
    let e = e_set(&spec, cfg.jmax, n, &budget)?;
    let report: ConvexityReport = hull_gap(&e, cfg.jmax, cfg.depth)?.with_midpoint(mid);
    let density: Option<DensityCheckReport> = match args.halving_depth {
        None => None,
        Some(m) => {
            let base = dyadic_average_cover(&spec, &[1, 2], m, &budget)?;
            let next = dyadic_average_cover(&spec, &[1, 2, 4], m, &budget)?;
            Some(halving_density_check(&base, &[next], args.r0_cells)?)
        }
    };
    let mid = report.midpoint.as_ref().expect("midpoint attached");
    let rate = if mid.all_certified() {
        "100%".to_string()
    } else {
        format!("{}/{}", mid.certified, mid.checked)
    };
    eprintln!(
        "certified rate {rate}; {} gaps in the hull at j <= {}, depth {}",
        report.gap_cells.len(),
        cfg.jmax,
        cfg.depth
    );
    let mut csv = format!("# {}\n", report.caveat);
    csv.push_str("record,a,b,c,d,e,f\n");
    let verdict = match &mid.verdict {
        fracsum_core::convexity::MidpointVerdict::Certified => "certified".to_string(),
        fracsum_core::convexity::MidpointVerdict::Violated { x, y } => format!("violated {x} {y}"),
    };
    let _ = writeln!(
        csv,
        "midpoint,{},{},{},{},{},",
        mid.checked,
        mid.certified,
        mid.cover_level_passed,
        csv_field(&verdict),
        rate
    );
    if let Some(h) = &report.hull {
        let _ = writeln!(csv, "hull,{},{},{},,,", h.lo, h.hi, h.denominator);
    }
    for (p, q) in &report.gap_cells {
        let _ = writeln!(csv, "gap,{p},{q},{},,,", e.denominator());
    }
    if let Some(d) = &density {
        let _ = writeln!(csv, "density_base,{},{},{},,,", d.base_depth, d.base_point, d.r0);
        for r in &d.rows {
            let missing = r.missing.map(|m| m.to_string()).unwrap_or_default();
            let _ = writeln!(
                csv,
                "density,{},{},{},{},{},{missing}",
                r.n, r.k, r.center, r.count, r.target_lower
            );
        }
    }
    let verified = mid.all_certified() && density.as_ref().is_none_or(|d| d.passed());
    Ok(Outcome {
        verified,
        output: Output {
            stem: "convexity",
            csv,
            json: json!({
                "set": args.set,
                "report": report,
                "density": density,
            }),
        },
    })
}

pub fn report(cfg: &RunConfig) -> Result<Outcome> {
    let suite = SuiteConfig {
        seed: cfg.seed()?,
        ..suite_config(cfg, cfg.depth)?
    };
    let results = run_suite(&suite)?;
    for r in &results {
        eprintln!(
            "{} ({:.2}s)",
            render_text(std::slice::from_ref(r)).trim_end(),
            r.elapsed.as_secs_f64()
        );
    }
    let mut csv = String::from("id,name,status,detail\n");
    for r in &results {
        let _ = writeln!(csv, "{},{},{},{}", r.id, r.name, r.status.label(), csv_field(&r.detail));
    }
    Ok(Outcome {
        verified: results.iter().all(|r| r.status == Status::Pass),
        output: Output {
            stem: "report",
            csv,
            json: json!({ "criteria": results }),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;

    fn cfg() -> RunConfig {
        RunConfig::resolve(Settings::default()).unwrap()
    }

    #[test]
    fn pattern_sets() {
        let spec = resolve_set(&cfg(), "pattern:110", 30).unwrap();
        assert_eq!(spec.count_cells(30).unwrap(), (1u32 << 20).into());
        assert!(resolve_set(&cfg(), "pattern:12", 30).is_err());
        assert!(resolve_set(&cfg(), "nope", 30).is_err());
    }
}
