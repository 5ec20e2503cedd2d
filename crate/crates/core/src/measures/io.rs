use std::io::Write;

use num_bigint::BigUint;

use super::measure::TrieMeasure;
use crate::error::{Error, Result};
use crate::exact::Dyadic;

/// One line per node: `depth index num/2^k` (or an integer mass).
pub fn write_measure_text<W: Write>(m: &TrieMeasure, mut w: W) -> Result<()> {
    writeln!(w, "# depth index mass")?;
    for d in 0..=m.depth() {
        for (k, mass) in m.cells(d).iter().zip(m.masses(d)) {
            writeln!(w, "{d} {k} {mass}")?;
        }
    }
    Ok(())
}

fn parse_mass(tok: &str) -> Result<Dyadic> {
    let bad = || Error::parse(format!("bad mass {tok:?}"));
    let (num, k) = match tok.split_once("/2^") {
        Some((n, k)) => (n, k.parse::<u64>().map_err(|_| bad())?),
        None => (tok, 0),
    };
    let num: BigUint = num.parse().map_err(|_| bad())?;
    Ok(Dyadic::new(num, k))
}

pub fn read_measure_text(text: &str) -> Result<TrieMeasure> {
    let mut levels: Vec<Vec<u64>> = Vec::new();
    let mut masses: Vec<Vec<Dyadic>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::parse(format!("line {}: expected `depth index mass`", ln + 1));
        if tok.len() != 3 {
            return Err(bad());
        }
        let d: usize = tok[0].parse().map_err(|_| bad())?;
        let k: u64 = tok[1].parse().map_err(|_| bad())?;
        if d > levels.len() {
            return Err(Error::parse(format!(
                "line {}: depth {d} skips a level",
                ln + 1
            )));
        }
        if d == levels.len() {
            levels.push(Vec::new());
            masses.push(Vec::new());
        }
        levels[d].push(k);
        masses[d].push(parse_mass(tok[2])?);
    }
    TrieMeasure::new(levels, masses).map_err(|e| Error::parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::super::measure::equal_split_measure;
    use super::*;
    use crate::dyadic::{CellCover, Exactness};

    #[test]
    fn round_trip() {
        let c = CellCover::new(4, 1, vec![0, 1, 5, 12], Exactness::Exact).unwrap();
        let m = equal_split_measure(&c).unwrap();
        let mut buf = Vec::new();
        write_measure_text(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\n4 5 1/2^2\n"));
        assert_eq!(read_measure_text(&text).unwrap(), m);
        assert!(read_measure_text("0 0 1\n1 0 1/2^1\n").is_err());
    }
}
