//! SnpEff `ANN` INFO value parsing.
//!
//! An `ANN` value is a comma-separated list of annotations, each a
//! pipe-separated field list starting with
//! `Allele | Annotation | Annotation_Impact | Gene_Name | Gene_ID | ...`.

use std::fmt;

use thiserror::Error;

/// Minimum number of pipe-delimited fields in one annotation.
pub const MIN_ANN_FIELDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnAnnotation {
    pub allele: String,
    pub annotation_effect: String,
    pub putative_impact: String,
    pub gene_name: String,
    pub gene_id: String,
    /// Feature type, feature ID, transcript biotype, rank, HGVS and
    /// position/distance fields, in source order. Empty tokens are kept.
    pub remaining_fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("annotation segment {segment} has {fields} pipe-separated fields (need at least {MIN_ANN_FIELDS})")]
pub struct AnnError {
    pub segment: usize,
    pub fields: usize,
}

impl AnnAnnotation {
    /// Parses one pipe-delimited annotation.
    pub fn parse_segment(segment: &str, index: usize) -> Result<Self, AnnError> {
        let mut fields = segment.split('|').map(str::to_string);
        let count = segment.split('|').count();
        if count < MIN_ANN_FIELDS {
            return Err(AnnError { segment: index, fields: count });
        }
        Ok(AnnAnnotation {
            allele: fields.next().unwrap(),
            annotation_effect: fields.next().unwrap(),
            putative_impact: fields.next().unwrap(),
            gene_name: fields.next().unwrap(),
            gene_id: fields.next().unwrap(),
            remaining_fields: fields.collect(),
        })
    }

    /// Field by its SnpEff name, for the sub-fields graph recipes can select.
    pub fn field(&self, name: &str) -> Option<&str> {
        match name {
            "allele" => Some(&self.allele),
            "annotation_effect" | "annotation" | "effect" => Some(&self.annotation_effect),
            "putative_impact" | "impact" => Some(&self.putative_impact),
            "gene_name" => Some(&self.gene_name),
            "gene_id" => Some(&self.gene_id),
            _ => None,
        }
    }
}

impl fmt::Display for AnnAnnotation {
    /// Re-joins the fields with pipes; inverse of [`AnnAnnotation::parse_segment`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}|{}|{}|{}",
            self.allele, self.annotation_effect, self.putative_impact, self.gene_name, self.gene_id
        )?;
        for field in &self.remaining_fields {
            write!(f, "|{field}")?;
        }
        Ok(())
    }
}

/// Splits a raw `ANN` value into its annotations, in order.
pub fn parse_ann_field(raw: &str) -> Result<Vec<AnnAnnotation>, AnnError> {
    raw.split(',').enumerate().map(|(i, seg)| AnnAnnotation::parse_segment(seg, i)).collect()
}

/// Joins annotations back into a raw `ANN` value.
pub fn join_ann_field(annotations: &[AnnAnnotation]) -> String {
    annotations.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
