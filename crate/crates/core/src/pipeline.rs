//! File-level conversion: one input stream in, quads out.
//!
//! All three converters are strict: the first malformed record aborts the
//! file with its line number.

use std::borrow::Cow;
use std::io::{self, BufRead, Read};

use flate2::read::MultiGzDecoder;

use regex::Regex;
use thiserror::Error;

use crate::convert::{
    cadd_to_triples, metadata_to_quads, vcf_to_quads, ConvertError, MetadataPredicates, VcfConvertOptions,
};
use crate::ingest::metadata::Warning;
use crate::ingest::{CaddReader, IngestError, MetadataOptions, MetadataReader, VcfReader};
use crate::rdf::Quad;

pub const DEFAULT_ACCESSION_PATTERN: &str = "SRR[0-9]+";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{file}: {source}")]
    Ingest {
        file: String,
        #[source]
        source: IngestError,
    },
    #[error("{file}: line {line}: {message}")]
    Record { file: String, line: usize, message: String },
    #[error("{file}: {source}")]
    Convert {
        file: String,
        #[source]
        source: ConvertError,
    },
    #[error("{file}: no accession found in the file name (pattern {pattern})")]
    NoAccession { file: String, pattern: String },
}

/// Inflates gzip data; anything else is returned as is.
pub fn gunzip_if_needed(bytes: &[u8]) -> io::Result<Cow<'_, [u8]>> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        MultiGzDecoder::new(bytes).read_to_end(&mut out)?;
        Ok(Cow::Owned(out))
    } else {
        Ok(Cow::Borrowed(bytes))
    }
}

/// First match of `pattern` in the file's base name.
pub fn accession_from_name(name: &str, pattern: &Regex) -> Option<String> {
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    pattern.find(base).map(|m| m.as_str().to_string())
}

pub fn require_accession(name: &str, pattern: &Regex) -> Result<String, PipelineError> {
    accession_from_name(name, pattern)
        .ok_or_else(|| PipelineError::NoAccession { file: name.to_string(), pattern: pattern.as_str().to_string() })
}

/// Converts one annotated VCF into quads in the accession's graph.
pub fn convert_vcf(
    input: impl BufRead,
    file: &str,
    accession: &str,
    options: &VcfConvertOptions,
) -> Result<Vec<Quad>, PipelineError> {
    let mut reader = VcfReader::new(input).map_err(|source| PipelineError::Ingest { file: file.into(), source })?;
    let mut records = Vec::new();
    for r in reader.by_ref() {
        records.push(r.map_err(|e| PipelineError::Record { file: file.into(), line: e.line, message: e.message })?);
    }
    vcf_to_quads(&records, reader.header(), accession, options)
        .map_err(|source| PipelineError::Convert { file: file.into(), source })
}

/// Converts one CADD table into default-graph triples.
pub fn convert_cadd(input: impl BufRead, file: &str, accession: &str) -> Result<Vec<Quad>, PipelineError> {
    let reader = CaddReader::new(input).map_err(|source| PipelineError::Ingest { file: file.into(), source })?;
    let mut records = Vec::new();
    for r in reader {
        records.push(r.map_err(|e| PipelineError::Record { file: file.into(), line: e.line, message: e.message })?);
    }
    cadd_to_triples(&records, accession).map_err(|source| PipelineError::Convert { file: file.into(), source })
}

/// Converts a run-table CSV. Unparseable ages are reported as warnings.
pub fn convert_metadata(
    input: impl Read,
    file: &str,
    options: &MetadataOptions,
    predicates: &MetadataPredicates,
) -> Result<(Vec<Quad>, Vec<Warning>), PipelineError> {
    let mut reader =
        MetadataReader::new(input, options).map_err(|source| PipelineError::Ingest { file: file.into(), source })?;
    let mut rows = Vec::new();
    for r in reader.by_ref() {
        rows.push(r.map_err(|e| PipelineError::Record { file: file.into(), line: e.line, message: e.message })?);
    }
    Ok((metadata_to_quads(&rows, predicates), reader.into_warnings()))
}
