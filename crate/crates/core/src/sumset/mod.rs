//! Finite-depth `j`-fold sumsets `A_j`, their rescalings `A_j / j`, the
//! union `E`, and products with full cubes.

mod cover;
mod engine;
mod layout;
mod product;
mod rational;
mod shared;
mod witness;

pub use cover::{
    brute_sumset, count_layout, count_sumset_cells, read_sumset_text, sumset_contains,
    sumset_cover_dp, sumset_of_cover, sumset_of_layout, sumset_runs, write_sumset_text,
    SumsetCover, SumsetRuns, MAX_COUNT_DEPTH,
};
pub use layout::{multisets, AddendLayout, MAX_ADDENDS};
pub use product::{product_cover, ProductCover};
pub use rational::{
    e_set, read_rational_text, scale_down, scale_down_runs, write_rational_text, RationalCover,
};
pub use shared::{shared_zero_check, SharedZeroEntry, SharedZeroReport};
pub use witness::WitnessedPoint;
