//! Field serialization.
//!
//! A field file is one line of JSON (the [`FieldHeader`]) terminated by
//! `\n`, followed by the node values. With `"encoding": "csv"` the values are
//! written one per line in shortest round-trip decimal form. With
//! `"encoding": "f64le"` they are `count` IEEE-754 doubles, little-endian,
//! 8 bytes each, with no separators. Euclidean nodes are ordered row-major
//! (last axis fastest); sphere nodes by increasing colatitude.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::euclidean::{EuclideanField, GridSpec};
use super::sphere::SphereAxisymField;
use crate::error::{Error, Result};

pub const FIELD_SCHEMA: &str = "sigmak.field/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Csv,
    F64le,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldGrid {
    Euclidean { grid: GridSpec },
    SphereAxisym { intervals: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: String,
    pub n: usize,
    #[serde(flatten)]
    pub grid: FieldGrid,
    pub encoding: Encoding,
    pub count: usize,
    #[serde(default)]
    pub tolerances: serde_json::Map<String, serde_json::Value>,
}

fn write_values<W: Write>(mut w: W, header: &FieldHeader, values: &[f64]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    match header.encoding {
        Encoding::Csv => {
            for v in values {
                writeln!(w, "{v:?}")?;
            }
        }
        Encoding::F64le => {
            for v in values {
                w.write_all(&v.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

fn read_values<R: BufRead>(mut r: R) -> Result<(FieldHeader, Vec<f64>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim_end())?;
    if header.schema != FIELD_SCHEMA {
        return Err(Error::Parse(format!("unsupported field schema {}", header.schema)));
    }
    let values = match header.encoding {
        Encoding::Csv => {
            let mut out = Vec::with_capacity(header.count);
            for l in r.lines() {
                let l = l?;
                let t = l.trim();
                if t.is_empty() {
                    continue;
                }
                out.push(t.parse::<f64>().map_err(|e| Error::Parse(format!("value {t:?}: {e}")))?);
            }
            out
        }
        Encoding::F64le => {
            let mut bytes = Vec::new();
            r.read_to_end(&mut bytes)?;
            if bytes.len() != 8 * header.count {
                return Err(Error::Parse(format!("expected {} bytes, found {}", 8 * header.count, bytes.len())));
            }
            bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect()
        }
    };
    if values.len() != header.count {
        return Err(Error::Parse(format!("expected {} values, found {}", header.count, values.len())));
    }
    Ok((header, values))
}

pub fn write_euclidean<W: Write>(w: W, field: &EuclideanField, encoding: Encoding) -> Result<()> {
    let header = FieldHeader {
        schema: FIELD_SCHEMA.into(),
        n: field.n(),
        grid: FieldGrid::Euclidean { grid: field.grid.clone() },
        encoding,
        count: field.values.len(),
        tolerances: Default::default(),
    };
    write_values(w, &header, &field.values)
}

pub fn write_sphere<W: Write>(w: W, field: &SphereAxisymField, encoding: Encoding) -> Result<()> {
    let header = FieldHeader {
        schema: FIELD_SCHEMA.into(),
        n: field.n,
        grid: FieldGrid::SphereAxisym { intervals: field.intervals() },
        encoding,
        count: field.values.len(),
        tolerances: Default::default(),
    };
    write_values(w, &header, &field.values)
}

pub fn read_euclidean<R: BufRead>(r: R) -> Result<EuclideanField> {
    let (h, values) = read_values(r)?;
    match h.grid {
        FieldGrid::Euclidean { grid } => EuclideanField::signed(grid, values),
        _ => Err(Error::Parse("field file does not hold a Euclidean grid".into())),
    }
}

pub fn read_sphere<R: BufRead>(r: R) -> Result<SphereAxisymField> {
    let (h, values) = read_values(r)?;
    match h.grid {
        FieldGrid::SphereAxisym { intervals } if intervals + 1 == values.len() => SphereAxisymField::new(h.n, values),
        _ => Err(Error::Parse("field file does not hold a colatitude grid".into())),
    }
}
