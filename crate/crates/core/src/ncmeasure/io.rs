//! Text (JSON) and compact binary encodings of [`MatrixField`].
//!
//! Binary layout, little-endian: a 16-byte header `b"NCMF"`, `u8 d`, `u8 L`, `u16 m`,
//! two reserved `u32` zeros; then every cell in lexicographic order as `m²` row-major
//! entries, each written as `f64 re, f64 im`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::field::{GridSpec, MatrixField};
use crate::linalg::{Mat, C64};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NCMF";
pub const HEADER_LEN: usize = 16;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    spec: GridSpec,
    cells: Vec<Vec<[f64; 2]>>,
}

impl Serialize for MatrixField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.spec().m;
        let cells = self
            .cells()
            .iter()
            .map(|c| {
                let mut row = Vec::with_capacity(m * m);
                for i in 0..m {
                    for j in 0..m {
                        let z = c[(i, j)];
                        row.push([z.re, z.im]);
                    }
                }
                row
            })
            .collect();
        FieldDoc {
            spec: *self.spec(),
            cells,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = FieldDoc::deserialize(deserializer)?;
        let spec = GridSpec::new(doc.spec.d, doc.spec.level, doc.spec.m).map_err(serde::de::Error::custom)?;
        let m = spec.m;
        let mut cells = Vec::with_capacity(doc.cells.len());
        for (k, entries) in doc.cells.into_iter().enumerate() {
            if entries.len() != m * m {
                return Err(serde::de::Error::custom(format!(
                    "cell {k} has {} entries, expected {}",
                    entries.len(),
                    m * m
                )));
            }
            cells.push(Mat::from_row_iterator(
                m,
                m,
                entries.into_iter().map(|[re, im]| C64::new(re, im)),
            ));
        }
        MatrixField::new(spec, cells).map_err(serde::de::Error::custom)
    }
}

pub fn to_json(f: &MatrixField) -> Result<String> {
    Ok(serde_json::to_string(f)?)
}

pub fn from_json(text: &str) -> Result<MatrixField> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_binary<W: Write>(f: &MatrixField, mut out: W) -> Result<()> {
    let spec = f.spec();
    let mut header = [0u8; HEADER_LEN];
    header[..4].copy_from_slice(MAGIC);
    header[4] = spec.d as u8;
    header[5] = spec.level as u8;
    header[6..8].copy_from_slice(&(spec.m as u16).to_le_bytes());
    out.write_all(&header)?;
    let m = spec.m;
    let mut buf = Vec::with_capacity(16 * m * m);
    for c in f.cells() {
        buf.clear();
        for i in 0..m {
            for j in 0..m {
                let z = c[(i, j)];
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<MatrixField> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected NCMF".into()));
    }
    let d = header[4] as usize;
    let level = header[5] as u32;
    let m = u16::from_le_bytes([header[6], header[7]]) as usize;
    let spec = GridSpec::new(d, level, m)?;
    let mut cells = Vec::with_capacity(spec.n_cells());
    let mut buf = vec![0u8; 16 * m * m];
    for _ in 0..spec.n_cells() {
        input.read_exact(&mut buf)?;
        let entries = buf.chunks_exact(16).map(|ch| {
            let re = f64::from_le_bytes(ch[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(ch[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        });
        cells.push(Mat::from_row_iterator(m, m, entries));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    MatrixField::new(spec, cells)
}

pub fn to_binary(f: &MatrixField) -> Vec<u8> {
    let mut out = Vec::new();
    write_binary(f, &mut out).expect("writing to a Vec cannot fail");
    out
}
