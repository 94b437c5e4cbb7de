//! Model persistence.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "EAUD" | version u32 | dim u32 | |V| u64
//! |V| × (token length u32 | UTF-8 bytes | count u64)
//! input matrix  |V| × dim f32, row-major
//! output matrix |V| × dim f32, row-major
//! ```

use std::io::{Read, Write};

use super::{EmbeddingModel, Matrix, TrainerConfig, Vocabulary};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"EAUD";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_binary<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(model.dim() as u32).to_le_bytes())?;
    w.write_all(&(model.vocab.len() as u64).to_le_bytes())?;
    for (word, count) in model.vocab.iter() {
        w.write_all(&(word.len() as u32).to_le_bytes())?;
        w.write_all(word.as_bytes())?;
        w.write_all(&count.to_le_bytes())?;
    }
    for m in [&model.input, &model.output] {
        let mut buf = Vec::with_capacity(m.as_slice().len() * 4);
        for v in m.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|_| Error::ModelFormat(format!("truncated while reading {what}")))?;
    Ok(buf)
}

fn read_matrix<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<Matrix<f32>> {
    let mut bytes = vec![0u8; rows * cols * 4];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::ModelFormat("truncated matrix data".into()))?;
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(Matrix::from_vec(rows, cols, data))
}

/// Reads a binary model. Trainer settings are not stored; the returned
/// model carries the default configuration with its own dimension.
pub fn read_binary<R: Read>(mut r: R) -> Result<EmbeddingModel> {
    let magic: [u8; 4] = read_exact(&mut r, "magic bytes")?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(read_exact(&mut r, "version")?);
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!("unsupported format version {version}")));
    }
    let dim = u32::from_le_bytes(read_exact(&mut r, "dimension")?) as usize;
    let n = u64::from_le_bytes(read_exact(&mut r, "vocabulary size")?);
    if dim == 0 {
        return Err(Error::ModelFormat("zero dimension".into()));
    }
    let n = usize::try_from(n).map_err(|_| Error::ModelFormat("vocabulary too large".into()))?;

    let mut entries = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let len = u32::from_le_bytes(read_exact(&mut r, "token length")?) as usize;
        let mut bytes = vec![0u8; len];
        r.read_exact(&mut bytes)
            .map_err(|_| Error::ModelFormat("truncated token".into()))?;
        let word = String::from_utf8(bytes).map_err(|_| Error::ModelFormat("token is not UTF-8".into()))?;
        let count = u64::from_le_bytes(read_exact(&mut r, "token count")?);
        entries.push((word, count));
    }
    let vocab = Vocabulary::from_counts(entries)?;
    let input = read_matrix(&mut r, n, dim)?;
    let output = read_matrix(&mut r, n, dim)?;
    let config = TrainerConfig {
        vector_dim: dim,
        ..TrainerConfig::default()
    };
    EmbeddingModel::from_parts(vocab, input, output, config)
}

/// word2vec text format: a `|V| dim` line, then one token and its input
/// vector per line.
pub fn write_text<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", model.vocab.len(), model.dim())?;
    for (i, (word, _)) in model.vocab.iter().enumerate() {
        write!(w, "{word}")?;
        for v in model.input.row(i) {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
