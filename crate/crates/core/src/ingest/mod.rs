//! Streaming readers for the three input formats.

use std::io;

use thiserror::Error;

pub mod ann;
pub mod cadd;
pub mod metadata;
pub mod vcf;

pub use ann::{join_ann_field, parse_ann_field, AnnAnnotation, AnnError};
pub use cadd::{CaddReader, CaddRecord};
pub use metadata::{ColumnRef, MetadataColumns, MetadataOptions, MetadataReader, PatientMetadata, Warning};
pub use vcf::{InfoValue, ValueType, VcfHeader, VcfReader, VcfRecord};

/// Fatal, stream-level failure.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("missing {0} header line")]
    MissingHeader(&'static str),
    #[error("{0}")]
    Config(String),
}

/// A single malformed data line. The caller decides whether to skip or abort.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

impl RecordError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}
