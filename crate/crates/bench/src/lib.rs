//! Fixtures shared by the benchmarks.

use fracsum_core::suite::SuiteConfig;
use fracsum_core::{DigitSpec, PositionSet, RuleUnion, ZeroForcedRule};

/// The toy final set the acceptance suite uses, at `depth`.
pub fn toy_final_set(depth: u64) -> DigitSpec {
    SuiteConfig {
        depth,
        ..SuiteConfig::default()
    }
    .final_set()
    .expect("default toy schedules build")
}

/// Every third digit forced to zero, up to `cutoff`.
pub fn period_three(cutoff: u64) -> DigitSpec {
    let forced = PositionSet::from_positions((1..=cutoff).filter(|p| p % 3 == 0)).unwrap();
    RuleUnion::single(ZeroForcedRule::new(forced, cutoff).unwrap()).into()
}
