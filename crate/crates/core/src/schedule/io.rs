use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::intervals::IntervalSchedule;
use super::zeta::ZetaSchedule;
use crate::error::{Error, Result};

pub const SCHEDULE_FORMAT_HEADER: &str = "# fracsum-schedule v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum ScheduleRecord {
    Interval {
        i: u64,
        s: u64,
        t: u64,
        q: u64,
        k: u64,
        gamma: BigUint,
        eta: BigUint,
        d: BigUint,
    },
    Zeta {
        i: u64,
        zeta: BigUint,
        s_i: BigUint,
    },
}

/// Versioned text form: `#` header lines, then `i s t q k gamma eta d`
/// per schedule term and `i zeta s_i` per block length.
pub fn format_schedule(scheds: &[IntervalSchedule], zeta: Option<&ZetaSchedule>) -> String {
    let mut out = String::new();
    out.push_str(SCHEDULE_FORMAT_HEADER);
    out.push('\n');
    if let Some(first) = scheds.first() {
        let _ = writeln!(out, "# mode {}", first.mode.label());
        let _ = writeln!(out, "# alphas {}", first.alphas);
    }
    out.push_str("# i s t q k gamma eta d\n");
    for sched in scheds {
        for e in &sched.entries {
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {} {}",
                sched.i, e.s, e.loc.t, e.loc.q, e.loc.k, e.gamma, e.eta, e.d
            );
        }
    }
    if let Some(z) = zeta {
        out.push_str("# i zeta s_i\n");
        for e in &z.entries {
            let _ = writeln!(out, "{} {} {}", e.i, e.zeta, e.s);
        }
    }
    out
}

pub fn parse_schedule_records(text: &str) -> Result<Vec<ScheduleRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SCHEDULE_FORMAT_HEADER => {}
        _ => return Err(Error::parse("missing schedule format header")),
    }
    let mut out = Vec::new();
    for (no, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::parse(format!("schedule line {}: {line:?}", no + 2));
        let f: Vec<&str> = line.split_whitespace().collect();
        let int = |k: usize| f[k].parse::<u64>().map_err(|_| bad());
        let big = |k: usize| f[k].parse::<BigUint>().map_err(|_| bad());
        out.push(match f.len() {
            8 => ScheduleRecord::Interval {
                i: int(0)?,
                s: int(1)?,
                t: int(2)?,
                q: int(3)?,
                k: int(4)?,
                gamma: big(5)?,
                eta: big(6)?,
                d: big(7)?,
            },
            3 => ScheduleRecord::Zeta {
                i: int(0)?,
                zeta: big(1)?,
                s_i: big(2)?,
            },
            _ => return Err(bad()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_interval_schedule, build_zeta, AlphaSequence, GrowthMode};

    #[test]
    fn round_trip() {
        let a = AlphaSequence::parse("1/2,2/3").unwrap();
        let scheds: Vec<_> = (1..=2)
            .map(|i| build_interval_schedule(i, &a, 6, GrowthMode::Faithful).unwrap())
            .collect();
        let z = build_zeta(2, &scheds, &[]).unwrap();
        let text = format_schedule(&scheds, Some(&z));
        let recs = parse_schedule_records(&text).unwrap();
        assert_eq!(recs.len(), 14);
        let ScheduleRecord::Interval {
            i, s, gamma, eta, ..
        } = &recs[7]
        else {
            panic!()
        };
        assert_eq!((*i, *s), (2, 2));
        assert_eq!(gamma, &scheds[1].entries[1].gamma);
        assert_eq!(eta, &scheds[1].entries[1].eta);
        assert!(matches!(recs[13], ScheduleRecord::Zeta { i: 2, .. }));
        assert!(parse_schedule_records("1 2 3").is_err());
    }
}
