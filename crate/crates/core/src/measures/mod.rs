//! Dyadic pre-measures on finite-depth tries: the equal-split construction,
//! the scheduled measures on `B^i_1` and `T^i_j`, block products, and exact
//! mass-bound sweeps.

mod io;
mod mass;
mod measure;

pub use io::{read_measure_text, write_measure_text};
pub use mass::{
    rectangle_product_bound, verify_mass_bound, write_mass_report_csv, MassBound, MassBoundReport,
    MassBoundRow, RectangleVerdict, SupTrend,
};
pub use measure::{
    block_product_measure, equal_split_measure, mu_i_measure, mu_ij_measure, zeta_product_measure,
    DyadicMeasure, ProductBlock, RuleMeasure, TrieMeasure,
};
