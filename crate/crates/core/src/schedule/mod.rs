//! Integer machinery behind the construction: the Z-partition of one
//! period, the interval schedule `(γ_s, η_s, d_s)`, the position sets Ξ, the
//! digit rules of `B^i_l` / `A^i`, and the block lengths `ζ_i` of the final set.

mod alpha;
mod empirical;
mod intervals;
mod io;
mod partition;
mod rules;
mod zeta;

pub use alpha::AlphaSequence;
pub use empirical::{estimate_constants, EmpiricalEstimates};
pub use intervals::{
    build_interval_schedule, ConstraintCheck, GrowthMode, IntervalSchedule, ScheduleEntry,
};
pub use io::{format_schedule, parse_schedule_records, ScheduleRecord, SCHEDULE_FORMAT_HEADER};
pub use partition::{locate, z_partition, Located, ZPartition};
pub use rules::{Diagnostic, RuleBuild};
pub use zeta::{
    build_zeta, final_a_spec, ConstraintStatus, ZetaConstraint, ZetaEntry, ZetaSchedule,
};
