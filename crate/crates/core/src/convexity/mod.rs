//! Midpoint convexity of `E = ∪ A_j/j` certified by explicit witnesses,
//! and finite-resolution evidence that `E` is nevertheless not convex.

mod essential;
mod halving;
mod hull;
mod midpoint;

pub use essential::{
    essential_convexity_explicit, essential_convexity_product, EssentialReport, EssentialVerdict,
    Halfspace, HullShape, MAX_EXPLICIT_DEPTH, MAX_HULL_CANDIDATES_3D,
};
pub use halving::{
    dyadic_average_cover, halving_density_check, DensityCheckReport, DensityCheckRow,
    MAX_GENERATIONS,
};
pub use hull::{hull_gap, truncation_caveat, ConvexityReport, IntervalHull};
pub use midpoint::{
    certify_midpoint, midpoint_certify, MidpointCertificate, MidpointMode, MidpointReport,
    MidpointVerdict,
};
