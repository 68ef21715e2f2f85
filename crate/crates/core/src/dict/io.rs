//! Dictionary persistence: a column-major little-endian binary container and
//! a CSV form (`n,d,label` header, one value line, then `n` matrix rows).
//! Both round-trip exactly.

use std::io::{BufRead, BufReader, Read, Write};

use nalgebra::DMatrix;

use super::Dictionary;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"SLDICT01";

pub fn write_binary<W: Write>(dict: &Dictionary, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(dict.n() as u64).to_le_bytes())?;
    out.write_all(&(dict.d() as u64).to_le_bytes())?;
    let label = dict.label().as_bytes();
    out.write_all(&(label.len() as u32).to_le_bytes())?;
    out.write_all(label)?;
    for v in dict.matrix().as_slice() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Dictionary> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad dictionary magic".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let d = u64::from_le_bytes(word) as usize;
    let mut short = [0u8; 4];
    input.read_exact(&mut short)?;
    let len = u32::from_le_bytes(short) as usize;
    let mut label = vec![0u8; len];
    input.read_exact(&mut label)?;
    let label = String::from_utf8(label).map_err(|e| Error::Format(e.to_string()))?;
    let total = n
        .checked_mul(d)
        .ok_or_else(|| Error::Format("dictionary shape overflows".into()))?;
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        input.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    Dictionary::new(DMatrix::from_vec(n, d, values), label)
}

/// 17 significant digits: enough for every f64 to parse back bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(dict: &Dictionary, mut out: W) -> Result<()> {
    if dict.label().contains([',', '\n', '\r']) {
        return Err(Error::Format("label must not contain commas or newlines".into()));
    }
    writeln!(out, "n,d,label")?;
    writeln!(out, "{},{},{}", dict.n(), dict.d(), dict.label())?;
    let m = dict.matrix();
    for i in 0..dict.n() {
        let row: Vec<String> = (0..dict.d()).map(|j| fmt_f64(m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Dictionary> {
    let mut lines = BufReader::new(input).lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format("unexpected end of dictionary csv".into()))?
            .map_err(Error::from)
    };
    if next()?.trim() != "n,d,label" {
        return Err(Error::Format("missing `n,d,label` header".into()));
    }
    let meta = next()?;
    let mut parts = meta.splitn(3, ',');
    let parse_dim = |s: Option<&str>| -> Result<usize> {
        s.ok_or_else(|| Error::Format("short metadata line".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Format(format!("bad dimension: {e}")))
    };
    let n = parse_dim(parts.next())?;
    let d = parse_dim(parts.next())?;
    let label = parts.next().unwrap_or("").to_string();
    let mut m = DMatrix::zeros(n, d);
    for i in 0..n {
        let line = next()?;
        let values: Vec<&str> = line.split(',').collect();
        if values.len() != d {
            return Err(Error::Format(format!("row {i} has {} entries, expected {d}", values.len())));
        }
        for (j, v) in values.iter().enumerate() {
            m[(i, j)] = v
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("row {i} column {j}: {e}")))?;
        }
    }
    Dictionary::new(m, label)
}
