//! CADD score TSV reader.

use std::io::BufRead;

use super::{IngestError, RecordError};

#[derive(Debug, Clone, PartialEq)]
pub struct CaddRecord {
    pub chrom: String,
    pub pos: u64,
    pub reference: String,
    pub alt: String,
    pub raw_score: f64,
    pub phred: f64,
}

/// Streams CADD records. Lines starting with `##` are skipped; the first
/// other line must be the `#Chrom` column header.
pub struct CaddReader<R> {
    input: R,
    line_no: usize,
    buf: String,
    raw_col: usize,
    phred_col: usize,
    min_cols: usize,
}

impl<R: BufRead> CaddReader<R> {
    pub fn new(mut input: R) -> Result<Self, IngestError> {
        let mut buf = String::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            if input.read_line(&mut buf)? == 0 {
                return Err(IngestError::MissingHeader("#Chrom"));
            }
            line_no += 1;
            let line = buf.trim_end_matches(['\n', '\r']);
            if line.starts_with("##") || line.is_empty() {
                continue;
            }
            if !line.starts_with("#Chrom") {
                return Err(IngestError::MissingHeader("#Chrom"));
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let find =
                |name: &str, default: usize| cols.iter().position(|c| c.eq_ignore_ascii_case(name)).unwrap_or(default);
            let raw_col = find("RawScore", 4);
            let phred_col = find("PHRED", 5);
            let min_cols = raw_col.max(phred_col).max(3) + 1;
            return Ok(Self { input, line_no, buf, raw_col, phred_col, min_cols });
        }
    }

    fn parse_line(&self, line: &str) -> Result<CaddRecord, RecordError> {
        let line_no = self.line_no;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < self.min_cols {
            return Err(RecordError::new(
                line_no,
                format!("expected at least {} columns, found {}", self.min_cols, cols.len()),
            ));
        }
        let pos: u64 =
            cols[1].parse().map_err(|_| RecordError::new(line_no, format!("non-integer Pos {:?}", cols[1])))?;
        if pos == 0 {
            return Err(RecordError::new(line_no, "Pos must be >= 1"));
        }
        let number = |idx: usize, name: &str| {
            cols[idx]
                .parse::<f64>()
                .map_err(|_| RecordError::new(line_no, format!("non-numeric {name} {:?}", cols[idx])))
        };
        let raw_score = number(self.raw_col, "RawScore")?;
        let phred = number(self.phred_col, "PHRED")?;
        if !(phred >= 0.0) || !raw_score.is_finite() || !phred.is_finite() {
            return Err(RecordError::new(line_no, format!("invalid PHRED {phred}")));
        }
        Ok(CaddRecord {
            chrom: cols[0].to_string(),
            pos,
            reference: cols[2].to_string(),
            alt: cols[3].to_string(),
            raw_score,
            phred,
        })
    }
}

impl<R: BufRead> Iterator for CaddReader<R> {
    type Item = Result<CaddRecord, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(RecordError::new(self.line_no + 1, e.to_string()))),
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let line = line.to_string();
            return Some(self.parse_line(&line));
        }
    }
}
