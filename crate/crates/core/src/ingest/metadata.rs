//! SRA run-metadata CSV reader.
//!
//! The SRA export has no fixed header, so the semantic columns are located
//! through a [`MetadataColumns`] mapping. The default mapping follows the
//! SRA "RunInfo" column order: run accession first, age second, disease and
//! fatality at 11/12, sex at 31.

use std::io::Read;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{IngestError, RecordError};

/// Where to find a semantic field: by zero-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataColumns {
    pub accession: ColumnRef,
    pub age: Option<ColumnRef>,
    pub sex: Option<ColumnRef>,
    pub disease: Option<ColumnRef>,
    pub fatality_status: Option<ColumnRef>,
}

impl Default for MetadataColumns {
    fn default() -> Self {
        Self {
            accession: ColumnRef::Index(0),
            age: Some(ColumnRef::Index(1)),
            sex: Some(ColumnRef::Index(31)),
            disease: Some(ColumnRef::Index(11)),
            fatality_status: Some(ColumnRef::Index(12)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataOptions {
    /// First row holds column names.
    pub has_header: bool,
    pub columns: MetadataColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatientMetadata {
    pub accession_id: String,
    pub age: Option<f64>,
    pub sex: Option<String>,
    pub disease: Option<String>,
    pub fatality_status: Option<String>,
    /// Every column of the row, keyed by header name or `col<N>`.
    pub extra: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

/// Parses the leading numeric token of an age cell such as `"65 (Age)"`.
pub fn parse_age(cell: &str) -> Option<f64> {
    let t = cell.trim_start();
    let end = t
        .char_indices()
        .find(|(i, c)| !(c.is_ascii_digit() || *c == '.' || (*i == 0 && (*c == '-' || *c == '+'))))
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    t[..end].parse::<f64>().ok().filter(|v| v.is_finite())
}

pub struct MetadataReader<R: Read> {
    records: csv::StringRecordsIntoIter<R>,
    headers: Option<Vec<String>>,
    columns: [Option<usize>; 5],
    warnings: Vec<Warning>,
    row_no: usize,
}

fn resolve(col: &ColumnRef, headers: Option<&[String]>) -> Result<usize, IngestError> {
    match col {
        ColumnRef::Index(i) => Ok(*i),
        ColumnRef::Name(name) => headers
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| IngestError::Config(format!("metadata column {name:?} not found"))),
    }
}

impl<R: Read> MetadataReader<R> {
    pub fn new(input: R, options: &MetadataOptions) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(options.has_header).flexible(true).from_reader(input);
        let headers = if options.has_header {
            let h = reader.headers().map_err(|e| IngestError::Config(format!("metadata header: {e}")))?;
            Some(h.iter().map(str::to_string).collect::<Vec<_>>())
        } else {
            None
        };
        let cols = &options.columns;
        let hdr = headers.as_deref();
        let opt = |c: &Option<ColumnRef>| c.as_ref().map(|c| resolve(c, hdr)).transpose();
        let columns = [
            Some(resolve(&cols.accession, hdr)?),
            opt(&cols.age)?,
            opt(&cols.sex)?,
            opt(&cols.disease)?,
            opt(&cols.fatality_status)?,
        ];
        Ok(Self {
            records: reader.into_records(),
            headers,
            columns,
            warnings: Vec::new(),
            row_no: usize::from(options.has_header),
        })
    }

    /// Warnings accumulated so far (unparseable ages, skipped rows).
    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn into_warnings(self) -> Vec<Warning> {
        self.warnings
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(Warning { line: self.row_no, message });
    }
}

impl<R: Read> Iterator for MetadataReader<R> {
    type Item = Result<PatientMetadata, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let row = match self.records.next()? {
                Ok(row) => row,
                Err(e) => {
                    self.row_no += 1;
                    return Some(Err(RecordError::new(self.row_no, e.to_string())));
                }
            };
            self.row_no += 1;
            let cell = |idx: Option<usize>| {
                idx.and_then(|i| row.get(i)).map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
            };
            let Some(accession_id) = cell(self.columns[0]) else {
                self.warn("empty accession; row skipped".into());
                continue;
            };
            let age = match cell(self.columns[1]) {
                None => None,
                Some(raw) => match parse_age(&raw) {
                    Some(a) if (0.0..=150.0).contains(&a) => Some(a),
                    Some(a) => {
                        self.warn(format!("age {a} out of range for {accession_id}"));
                        None
                    }
                    None => {
                        self.warn(format!("unparseable age {raw:?} for {accession_id}"));
                        None
                    }
                },
            };
            let extra = row
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let key =
                        self.headers.as_ref().and_then(|h| h.get(i).cloned()).unwrap_or_else(|| format!("col{i}"));
                    (key, v.to_string())
                })
                .collect();
            return Some(Ok(PatientMetadata {
                accession_id,
                age,
                sex: cell(self.columns[2]),
                disease: cell(self.columns[3]),
                fatality_status: cell(self.columns[4]),
                extra,
            }));
        }
    }
}
