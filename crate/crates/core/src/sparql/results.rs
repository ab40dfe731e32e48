//! Tabular query results, CSV export and the columnar binary cache.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binio::{self, ContainerError, Decoder, Encoder};
use crate::rdf::Term;
use crate::store::{decode_term, encode_term};

const TABLE_MAGIC: &[u8; 8] = b"VKGTABLE";
const TABLE_VERSION: u32 = 1;
const NULL_CODE: u32 = u32::MAX;

/// Solution sequence with named columns; `None` marks an unbound cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

/// Plain-value view used by JSON APIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablePreview {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
    pub total_rows: usize,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { columns, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of one column, or `None` if the column does not exist.
    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = Option<&Term>> + '_> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(move |r| r[i].as_ref()))
    }

    /// Projects onto `names` in that order. Unknown names are returned as the error.
    pub fn select_columns(&self, names: &[impl AsRef<str>]) -> Result<ResultTable, String> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n.as_ref()).ok_or_else(|| n.as_ref().to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ResultTable {
            columns: names.iter().map(|n| n.as_ref().to_string()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect(),
        })
    }

    /// First `limit` rows as plain values.
    pub fn preview(&self, limit: usize) -> TablePreview {
        TablePreview {
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .take(limit)
                .map(|r| r.iter().map(|c| c.as_ref().map(|t| t.value().to_string())).collect())
                .collect(),
            total_rows: self.rows.len(),
        }
    }

    /// CSV with a header row; cells hold the plain value, unbound cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.as_ref().map_or("", Term::value)))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut enc = Encoder::new();
        enc.u64(self.columns.len() as u64);
        enc.u64(self.rows.len() as u64);
        for (ci, name) in self.columns.iter().enumerate() {
            enc.str(name);
            let mut local: HashMap<&Term, u32> = HashMap::new();
            let mut terms = Vec::new();
            let codes: Vec<u32> = self
                .rows
                .iter()
                .map(|r| match &r[ci] {
                    None => NULL_CODE,
                    Some(t) => *local.entry(t).or_insert_with(|| {
                        terms.push(t);
                        (terms.len() - 1) as u32
                    }),
                })
                .collect();
            enc.u64(terms.len() as u64);
            for t in terms {
                encode_term(&mut enc, t);
            }
            for c in codes {
                enc.u32(c);
            }
        }
        let mut out = Vec::new();
        binio::write_container(&mut out, TABLE_MAGIC, TABLE_VERSION, &enc.into_bytes()).expect("writing to a Vec");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ResultTable, ContainerError> {
        let payload = binio::read_container(bytes, TABLE_MAGIC, TABLE_VERSION)?;
        let mut dec = Decoder::new(&payload);
        let n_cols = dec.len_prefix(8)?;
        let n_rows = dec.u64()? as usize;
        if n_cols > 0 && n_rows.saturating_mul(4 * n_cols) > dec.remaining() {
            return Err(ContainerError::Truncated);
        }
        let mut columns = Vec::with_capacity(n_cols);
        let mut rows = vec![Vec::with_capacity(n_cols); if n_cols == 0 { 0 } else { n_rows }];
        for _ in 0..n_cols {
            columns.push(dec.str()?);
            let n_terms = dec.len_prefix(2)?;
            let terms = (0..n_terms).map(|_| decode_term(&mut dec)).collect::<Result<Vec<_>, _>>()?;
            for row in rows.iter_mut() {
                let code = dec.u32()?;
                let cell = match code {
                    NULL_CODE => None,
                    c => Some(
                        terms
                            .get(c as usize)
                            .cloned()
                            .ok_or_else(|| ContainerError::Malformed(format!("cell code {c} out of range")))?,
                    ),
                };
                row.push(cell);
            }
        }
        dec.finish()?;
        Ok(ResultTable { columns, rows })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ContainerError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ResultTable, ContainerError> {
        let mut buf = Vec::new();
        io::Read::read_to_end(&mut BufReader::new(File::open(path)?), &mut buf)?;
        Self::from_bytes(&buf)
    }
}
