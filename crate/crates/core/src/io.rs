//! Stream file formats.
//!
//! * text: one decimal id per line, LF-terminated;
//! * binary: `b"HHS1"`, `n: u32 LE`, `m: u64 LE`, then `m` ids as `u32 LE`.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stream::{Item, Stream};

pub const MAGIC: &[u8; 4] = b"HHS1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    Text,
    Binary,
}

impl StreamFormat {
    /// `.hhs`/`.bin` files are binary, everything else text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("hhs") | Some("bin") => Self::Binary,
            _ => Self::Text,
        }
    }
}

pub fn write_text<W: Write>(stream: &Stream, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for item in stream {
        writeln!(w, "{item}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the text format. Without an explicit universe the largest id seen
/// is used (at least 1).
pub fn read_text<R: Read>(reader: R, universe: Option<u32>) -> Result<Stream> {
    let mut items = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let item: Item = trimmed
            .parse()
            .map_err(|e| Error::Format(format!("line {}: {trimmed:?}: {e}", lineno + 1)))?;
        items.push(item);
    }
    let universe = universe.unwrap_or_else(|| items.iter().copied().max().unwrap_or(1).max(1));
    Stream::new(items, universe)
}

pub fn write_binary<W: Write>(stream: &Stream, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    w.write_all(MAGIC)?;
    w.write_all(&stream.universe().to_le_bytes())?;
    w.write_all(&stream.len().to_le_bytes())?;
    for item in stream {
        w.write_all(&item.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(reader: R) -> Result<Stream> {
    let mut r = BufReader::new(reader);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut n = [0u8; 4];
    let mut m = [0u8; 8];
    r.read_exact(&mut n)
        .and_then(|_| r.read_exact(&mut m))
        .map_err(|_| Error::Format("truncated header".into()))?;
    let n = u32::from_le_bytes(n);
    let m = u64::from_le_bytes(m);
    let mut items = Vec::with_capacity(m.min(1 << 24) as usize);
    let mut buf = [0u8; 4];
    for k in 0..m {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format(format!("expected {m} items, found {k}")))?;
        items.push(u32::from_le_bytes(buf));
    }
    if r.read(&mut buf)? != 0 {
        return Err(Error::Format("trailing bytes after last item".into()));
    }
    Stream::new(items, n)
}

pub fn read_path(path: &Path, universe: Option<u32>) -> Result<Stream> {
    let file = std::fs::File::open(path)?;
    match StreamFormat::from_path(path) {
        StreamFormat::Binary => read_binary(file),
        StreamFormat::Text => read_text(file, universe),
    }
}

pub fn write_path(stream: &Stream, path: &Path, format: StreamFormat) -> Result<()> {
    let file = std::fs::File::create(path)?;
    match format {
        StreamFormat::Binary => write_binary(stream, file),
        StreamFormat::Text => write_text(stream, file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_layout_is_exact() {
        let s = Stream::new(vec![1, 258], 300).unwrap();
        let mut buf = Vec::new();
        write_binary(&s, &mut buf).unwrap();
        let mut expected = b"HHS1".to_vec();
        expected.extend([44, 1, 0, 0]);
        expected.extend([2, 0, 0, 0, 0, 0, 0, 0]);
        expected.extend([1, 0, 0, 0, 2, 1, 0, 0]);
        assert_eq!(buf, expected);
    }

    #[test]
    fn text_layout_is_exact() {
        let s = Stream::new(vec![5, 12, 5], 20).unwrap();
        let mut buf = Vec::new();
        write_text(&s, &mut buf).unwrap();
        assert_eq!(buf, b"5\n12\n5\n");
    }

    #[test]
    fn binary_rejects_corruption() {
        assert!(matches!(read_binary(&b"HHS2"[..]), Err(Error::Format(_))));
        assert!(matches!(read_binary(&b"HH"[..]), Err(Error::Format(_))));
        let mut buf = Vec::new();
        write_binary(&Stream::new(vec![1, 2, 3], 3).unwrap(), &mut buf).unwrap();
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
        buf.push(0);
        assert!(read_binary(&buf[..]).is_err());
    }

    #[test]
    fn binary_rejects_out_of_universe() {
        let mut buf = b"HHS1".to_vec();
        buf.extend(2u32.to_le_bytes());
        buf.extend(1u64.to_le_bytes());
        buf.extend(3u32.to_le_bytes());
        assert!(matches!(
            read_binary(&buf[..]),
            Err(Error::ItemOutOfRange { item: 3, .. })
        ));
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(matches!(
            read_text(&b"1\nx\n"[..], None),
            Err(Error::Format(_))
        ));
        assert!(read_text(&b"1\n0\n"[..], None).is_err());
        assert!(read_text(&b"1\n9\n"[..], Some(5)).is_err());
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(items in proptest::collection::vec(1u32..1000, 0..200)) {
            let s = Stream::new(items, 1000).unwrap();
            let mut bin = Vec::new();
            write_binary(&s, &mut bin).unwrap();
            prop_assert_eq!(read_binary(&bin[..]).unwrap(), s.clone());
            let mut txt = Vec::new();
            write_text(&s, &mut txt).unwrap();
            prop_assert_eq!(read_text(&txt[..], Some(1000)).unwrap(), s);
        }
    }
}
