use std::io::Write;

use super::{CellCover, Exactness};
use crate::error::{Error, Result};

const MAGIC_EXACT: &[u8; 4] = b"DCE1";
const MAGIC_OUTER: &[u8; 4] = b"DCO1";

/// `depth n span m` (plus ` outer` for outer covers), then one decimal
/// index per line.
pub fn write_cover_text<W: Write>(cover: &CellCover, mut w: W) -> Result<()> {
    write!(w, "depth {} span {}", cover.depth(), cover.span())?;
    if cover.exactness() == Exactness::Outer {
        write!(w, " outer")?;
    }
    writeln!(w)?;
    for k in cover.cells() {
        writeln!(w, "{k}")?;
    }
    Ok(())
}

pub fn read_cover_text(text: &str) -> Result<CellCover> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("empty cover file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let bad = || Error::parse(format!("bad cover header {header:?}"));
    if toks.len() < 4 || toks[0] != "depth" || toks[2] != "span" {
        return Err(bad());
    }
    let depth: u32 = toks[1].parse().map_err(|_| bad())?;
    let span: u64 = toks[3].parse().map_err(|_| bad())?;
    let exactness = match toks.get(4) {
        None => Exactness::Exact,
        Some(&"outer") => Exactness::Outer,
        Some(&"exact") => Exactness::Exact,
        Some(_) => return Err(bad()),
    };
    let cells = lines
        .map(|l| {
            l.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(format!("bad cell index {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    CellCover::new(depth, span, cells, exactness)
}

/// 16-byte header (magic, depth, span, count as little-endian u32) followed
/// by little-endian u64 indices.
pub fn write_cover_binary<W: Write>(cover: &CellCover, mut w: W) -> Result<()> {
    let span = u32::try_from(cover.span())
        .map_err(|_| Error::usage("span does not fit the binary header"))?;
    let count = u32::try_from(cover.len())
        .map_err(|_| Error::usage("cell count does not fit the binary header"))?;
    let magic = match cover.exactness() {
        Exactness::Exact => MAGIC_EXACT,
        Exactness::Outer => MAGIC_OUTER,
    };
    w.write_all(magic)?;
    w.write_all(&cover.depth().to_le_bytes())?;
    w.write_all(&span.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for k in cover.cells() {
        w.write_all(&k.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_cover_binary(bytes: &[u8]) -> Result<CellCover> {
    if bytes.len() < 16 {
        return Err(Error::parse("binary cover shorter than its header"));
    }
    let exactness = match &bytes[0..4] {
        m if m == MAGIC_EXACT => Exactness::Exact,
        m if m == MAGIC_OUTER => Exactness::Outer,
        _ => return Err(Error::parse("bad binary cover magic")),
    };
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let (depth, span, count) = (word(4), word(8) as u64, word(12) as usize);
    let body = &bytes[16..];
    if body.len() != count * 8 {
        return Err(Error::parse(format!(
            "binary cover announces {count} cells but carries {} bytes",
            body.len()
        )));
    }
    let cells = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    CellCover::new(depth, span, cells, exactness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_layout() {
        let c = CellCover::new(2, 1, vec![0, 2], Exactness::Exact).unwrap();
        let mut buf = Vec::new();
        write_cover_text(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "depth 2 span 1\n0\n2\n");
        assert!(read_cover_text("depth x span 1\n").is_err());
    }

    #[test]
    fn binary_header_is_sixteen_bytes() {
        let c = CellCover::new(3, 2, vec![1, 9], Exactness::Outer).unwrap();
        let mut buf = Vec::new();
        write_cover_binary(&c, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16);
        assert_eq!(&buf[0..4], b"DCO1");
        assert_eq!(&buf[4..8], &3u32.to_le_bytes());
        assert!(read_cover_binary(&buf[..20]).is_err());
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(depth in 1u32..20, raw in proptest::collection::vec(any::<u64>(), 0..50),
                                   outer in any::<bool>()) {
            let cells: Vec<u64> = raw.iter().map(|k| k % (1u64 << depth)).collect();
            let ex = if outer { Exactness::Outer } else { Exactness::Exact };
            let c = CellCover::from_unsorted(depth, 1, cells, ex).unwrap();
            let mut t = Vec::new();
            write_cover_text(&c, &mut t).unwrap();
            prop_assert_eq!(read_cover_text(std::str::from_utf8(&t).unwrap()).unwrap(), c.clone());
            let mut b = Vec::new();
            write_cover_binary(&c, &mut b).unwrap();
            prop_assert_eq!(read_cover_binary(&b).unwrap(), c);
        }
    }
}
