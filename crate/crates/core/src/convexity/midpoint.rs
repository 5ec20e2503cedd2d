use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DigitSpec, DigitString};
use crate::error::{Budget, Error, Result};
use crate::exact::text;
use crate::sumset::{multisets, sumset_contains, WitnessedPoint};

/// `(x + y)/2 ∈ A_m / m` with `m = 2jk`, shown by an explicit witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidpointCertificate {
    pub x: BigRational,
    pub y: BigRational,
    pub m: u64,
    pub witness: WitnessedPoint,
}

impl MidpointCertificate {
    pub fn midpoint(&self) -> BigRational {
        self.witness.scaled()
    }
}

/// For `x = a/j` and `y = b/k`, `k·a` is a sum of `jk` members (the
/// witness of `a` repeated `k` times) and `j·b` likewise, so
/// `(x+y)/2 = (k·a + j·b)/(2jk)`. Returns `None` if the combined witness
/// fails to check, which would contradict the construction.
pub fn certify_midpoint(
    spec: &DigitSpec,
    x: &WitnessedPoint,
    y: &WitnessedPoint,
) -> Option<MidpointCertificate> {
    let (j, k) = (x.j(), y.j());
    let mut summands: Vec<DigitString> = Vec::with_capacity((2 * j * k) as usize);
    for _ in 0..k {
        summands.extend(x.witness.iter().cloned());
    }
    for _ in 0..j {
        summands.extend(y.witness.iter().cloned());
    }
    let witness = WitnessedPoint::new(summands).ok()?;
    let half = BigRational::new(1.into(), 2.into());
    let target = (x.scaled() + y.scaled()) * half;
    if witness.scaled() != target || !witness.verify(spec) {
        return None;
    }
    Some(MidpointCertificate {
        x: x.scaled(),
        y: y.scaled(),
        m: 2 * j * k,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MidpointMode {
    /// Every pair of witnessed points from the depth-`n` cells, refused if
    /// more than `max_pairs`.
    Exhaustive { max_pairs: u64 },
    /// `samples` pairs from a seeded stream; pair `t` uses stream `t`, so
    /// the result does not depend on thread scheduling.
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MidpointVerdict {
    Certified,
    Violated {
        #[serde(serialize_with = "text::ratio")]
        x: BigRational,
        #[serde(serialize_with = "text::ratio")]
        y: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MidpointReport {
    pub j_max: u64,
    pub depth: u64,
    pub mode: MidpointMode,
    pub checked: u64,
    pub certified: u64,
    /// Pairs whose midpoint numerator was also found in the depth-`n`
    /// cover of `A_{2jk}` by the carry automaton (independent of the
    /// witness).
    pub cover_level_passed: u64,
    pub verdict: MidpointVerdict,
}

impl MidpointReport {
    pub fn all_certified(&self) -> bool {
        self.verdict == MidpointVerdict::Certified && self.certified == self.checked
    }
}

struct Outcome {
    cert: Option<MidpointCertificate>,
    cover_level: bool,
    pair: (BigRational, BigRational),
}

fn check_pair(spec: &DigitSpec, n: u64, x: &WitnessedPoint, y: &WitnessedPoint) -> Result<Outcome> {
    let cert = certify_midpoint(spec, x, y);
    let cover_level = match &cert {
        Some(c) => {
            let k: BigUint = c.witness.witness.iter().map(|d| d.numer().clone()).sum();
            sumset_contains(spec, c.m, n, &k)?
        }
        None => false,
    };
    Ok(Outcome {
        cert,
        cover_level,
        pair: (x.scaled(), y.scaled()),
    })
}

fn exhaustive_points(spec: &DigitSpec, j_max: u64, n: u64, max_pairs: u64, budget: &Budget) -> Result<Vec<WitnessedPoint>> {
    let depth = u32::try_from(n).map_err(|_| Error::usage("depth too large"))?;
    let cover = spec.materialize(depth, 1, budget)?;
    let cells: Vec<DigitString> = cover
        .cells()
        .iter()
        .map(|&c| DigitString::from_numer(n, BigUint::from(c)))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for j in 1..=j_max {
        let combos = multisets(cells.len(), j);
        if (points.len() + combos.len()) as u128 * (points.len() + combos.len()) as u128 > max_pairs as u128 {
            return Err(Error::Budget {
                what: "exhaustive midpoint pairs (use sampling)".into(),
                needed: format!("more than {max_pairs}"),
                budget: max_pairs,
            });
        }
        for c in combos {
            points.push(WitnessedPoint::new(c.iter().map(|&k| cells[k].clone()).collect())?);
        }
    }
    Ok(points)
}

/// Certifies `(x+y)/2 ∈ E` for witnessed `x ∈ A_j/j`, `y ∈ A_k/k`,
/// `j, k <= j_max`, at digit depth `n`.
pub fn midpoint_certify(
    spec: &DigitSpec,
    j_max: u64,
    n: u64,
    mode: MidpointMode,
    budget: &Budget,
) -> Result<MidpointReport> {
    if j_max == 0 || n == 0 {
        return Err(Error::usage("midpoint checks need j_max >= 1 and depth >= 1"));
    }
    let outcomes: Vec<Outcome> = match &mode {
        MidpointMode::Exhaustive { max_pairs } => {
            let pts = exhaustive_points(spec, j_max, n, *max_pairs, budget)?;
            let pairs: Vec<(usize, usize)> = (0..pts.len())
                .flat_map(|a| (a..pts.len()).map(move |b| (a, b)))
                .collect();
            pairs
                .par_iter()
                .map(|&(a, b)| check_pair(spec, n, &pts[a], &pts[b]))
                .collect::<Result<_>>()?
        }
        MidpointMode::Sampled { samples, seed } => (0..*samples)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(t);
                let j = rng.gen_range(1..=j_max);
                let k = rng.gen_range(1..=j_max);
                let x = WitnessedPoint::sample(spec, j, n, &mut rng)?;
                let y = WitnessedPoint::sample(spec, k, n, &mut rng)?;
                check_pair(spec, n, &x, &y)
            })
            .collect::<Result<_>>()?,
    };
    let certified = outcomes.iter().filter(|o| o.cert.is_some()).count() as u64;
    let cover_level_passed = outcomes.iter().filter(|o| o.cover_level).count() as u64;
    let verdict = match outcomes.iter().find(|o| o.cert.is_none() || !o.cover_level) {
        Some(o) => MidpointVerdict::Violated {
            x: o.pair.0.clone(),
            y: o.pair.1.clone(),
        },
        None => MidpointVerdict::Certified,
    };
    Ok(MidpointReport {
        j_max,
        depth: n,
        mode,
        checked: outcomes.len() as u64,
        certified,
        cover_level_passed,
        verdict,
    })
}
