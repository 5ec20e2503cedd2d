//! Dimension estimators at finite depth: prefix densities, box counts,
//! `OFF_n`, Billingsley-type measure bounds and covering-sum certificates.
//! Every value is exact; logarithms of non-powers of two are bracketed.

mod boxcount;
mod certificate;
mod componentwise;
mod density;
mod off;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Q;

pub use boxcount::{
    box_count, box_estimate, dim_profile, sumset_dim_profile, write_dimension_csv, BoxCount,
    DimensionReport, DimensionRow,
};
pub use certificate::{
    cover_terms, covering_sum_certificate, q_cover_certificate, CertificateVerdict,
    CoveringCertificate,
};
pub use componentwise::{componentwise_estimate, ComponentEstimate, SumsetDimensionEstimate};
pub use density::{density_target, lower_density, DensityProfile, DensityTarget};
pub use off::{billingsley_lower, min_branch_count, off_n, off_rule};

/// An exact value `lo == hi`, or the enclosure `lo <= x <= hi` of a
/// logarithm that is not rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: Q,
    pub hi: Q,
}

impl Bracket {
    pub fn exact_value(q: Q) -> Self {
        Bracket { lo: q, hi: q }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn exact(&self) -> Option<Q> {
        self.is_exact().then_some(self.lo)
    }

    /// Enclosure is inside `[target − tol, target + tol]`.
    pub fn within(&self, target: Q, tol: Q) -> bool {
        self.lo >= target - tol && self.hi <= target + tol
    }

    /// Enclosure of the minimum of the enclosed values.
    pub fn min_of(items: impl IntoIterator<Item = Bracket>) -> Result<Bracket> {
        items
            .into_iter()
            .reduce(|a, b| Bracket {
                lo: a.lo.min(b.lo),
                hi: a.hi.min(b.hi),
            })
            .ok_or_else(|| Error::usage("no values to take the minimum of"))
    }

    pub fn max_of(items: impl IntoIterator<Item = Bracket>) -> Result<Bracket> {
        items
            .into_iter()
            .reduce(|a, b| Bracket {
                lo: a.lo.max(b.lo),
                hi: a.hi.max(b.hi),
            })
            .ok_or_else(|| Error::usage("no values to take the maximum of"))
    }
}
