//! Dyadic cells, digit strings, zero-forced digit rules and finite-depth
//! covers. Cells are half-open: `[k 2^-n, (k+1) 2^-n)`.

mod cell;
mod cover;
mod digits;
mod io;
mod rule;
mod spec;

pub use cell::DyadicCell;
pub use cover::{CellCover, Exactness};
pub use digits::DigitString;
pub use io::{read_cover_binary, read_cover_text, write_cover_binary, write_cover_text};
pub use rule::{RuleUnion, ZeroForcedRule};
pub use spec::{DigitSpec, SpecBlock};

/// Largest depth for which cell indices of a span-`span` cover fit in `u64`.
pub(crate) fn check_index_range(depth: u32, span: u64) -> crate::Result<u64> {
    if span == 0 {
        return Err(crate::Error::usage("cover span must be positive"));
    }
    if depth >= 64 {
        return Err(crate::Error::usage(format!(
            "depth {depth} too large for explicit cells (max 63)"
        )));
    }
    span.checked_mul(1u64 << depth).ok_or_else(|| {
        crate::Error::usage(format!(
            "span {span} at depth {depth} overflows 64-bit cell indices"
        ))
    })
}
