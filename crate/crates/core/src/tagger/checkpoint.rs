//! Binary model file: all integers and floats little-endian.
//!
//! ```text
//! magic "TAGPROBE" | u32 version | u64 d | u64 K
//! K x (u32 len, utf-8 label)     class order, UNK first
//! u32 len, utf-8 fallback label
//! K*d f64 W (row-major) | K f64 b
//! u8 has_table, then optionally:
//!   u64 rows | rows x (u32 len, utf-8 word) | rows*d f64 vectors
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::{LabelVocab, LinearProbe, TaggerError};
use crate::io::EmbeddingTable;

const MAGIC: &[u8; 8] = b"TAGPROBE";
pub const CHECKPOINT_VERSION: u32 = 1;

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn put_floats(out: &mut Vec<u8>, xs: &[f64]) {
    for x in xs {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

/// Serializes the probe, its label vocabulary and an optional table.
pub fn write_model(
    w: &mut impl Write,
    probe: &LinearProbe,
    vocab: &LabelVocab,
    table: Option<&EmbeddingTable>,
) -> Result<(), TaggerError> {
    if vocab.len() != probe.classes() {
        return Err(TaggerError::DimensionMismatch {
            expected: probe.classes(),
            found: vocab.len(),
        });
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(probe.dim() as u64).to_le_bytes());
    out.extend_from_slice(&(probe.classes() as u64).to_le_bytes());
    for l in vocab.labels() {
        put_str(&mut out, l);
    }
    put_str(&mut out, vocab.fallback());
    put_floats(&mut out, probe.weights());
    put_floats(&mut out, probe.bias());
    match table {
        None => out.push(0),
        Some(t) => {
            if t.dim() != probe.dim() {
                return Err(TaggerError::DimensionMismatch {
                    expected: probe.dim(),
                    found: t.dim(),
                });
            }
            out.push(1);
            out.extend_from_slice(&(t.rows() as u64).to_le_bytes());
            for r in 0..t.rows() {
                put_str(&mut out, t.word(r));
            }
            put_floats(&mut out, t.as_slice());
        }
    }
    w.write_all(&out)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], TaggerError> {
        if self.bytes.len() < n {
            return Err(TaggerError::Checkpoint("truncated file".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, TaggerError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, TaggerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize, TaggerError> {
        let v = u64::from_le_bytes(self.take(8)?.try_into().unwrap());
        usize::try_from(v).map_err(|_| TaggerError::Checkpoint("size overflow".into()))
    }

    fn string(&mut self) -> Result<String, TaggerError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| TaggerError::Checkpoint("invalid utf-8".into()))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>, TaggerError> {
        let bytes = n
            .checked_mul(8)
            .ok_or_else(|| TaggerError::Checkpoint("size overflow".into()))?;
        Ok(self
            .take(bytes)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Inverse of [`write_model`].
pub fn read_model(r: &mut impl Read) -> Result<(LinearProbe, LabelVocab, Option<EmbeddingTable>), TaggerError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut rd = Reader { bytes: &bytes };
    if rd.take(MAGIC.len())? != MAGIC {
        return Err(TaggerError::Checkpoint("not a model file".into()));
    }
    let version = rd.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(TaggerError::Checkpoint(format!("unsupported version {}", version)));
    }
    let dim = rd.len()?;
    let classes = rd.len()?;
    if dim == 0 || classes == 0 {
        return Err(TaggerError::Checkpoint("empty dimensions".into()));
    }
    let labels = (0..classes).map(|_| rd.string()).collect::<Result<Vec<_>, _>>()?;
    let fallback = rd.string()?;
    let weights = rd.floats(classes * dim)?;
    let bias = rd.floats(classes)?;
    let probe = LinearProbe::from_parts(classes, dim, weights, bias)?;
    let table = match rd.u8()? {
        0 => None,
        1 => {
            let rows = rd.len()?;
            if rows == 0 {
                return Err(TaggerError::Checkpoint("table without UNK row".into()));
            }
            let words = (0..rows).map(|_| rd.string()).collect::<Result<Vec<_>, _>>()?;
            let data = rd.floats(rows * dim)?;
            let mut t = EmbeddingTable::new(dim);
            t.set_unk(&data[..dim]);
            for (r, w) in words.iter().enumerate().skip(1) {
                if !t.insert(w, &data[r * dim..(r + 1) * dim]) {
                    return Err(TaggerError::Checkpoint(format!("duplicate word {:?}", w)));
                }
            }
            Some(t)
        }
        _ => return Err(TaggerError::Checkpoint("bad table flag".into())),
    };
    if !rd.bytes.is_empty() {
        return Err(TaggerError::Checkpoint("trailing bytes".into()));
    }
    Ok((probe, LabelVocab::from_ordered(labels, fallback), table))
}

pub fn save_model(
    path: &Path,
    probe: &LinearProbe,
    vocab: &LabelVocab,
    table: Option<&EmbeddingTable>,
) -> Result<(), TaggerError> {
    let mut buf = Vec::new();
    write_model(&mut buf, probe, vocab, table)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(LinearProbe, LabelVocab, Option<EmbeddingTable>), TaggerError> {
    read_model(&mut fs::File::open(path)?)
}
