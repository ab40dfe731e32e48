//! Record → RDF conversion.
//!
//! VCF records become quads in the accession's named graph using the
//! vcf2rdf vocabulary; CADD rows become default-graph triples under the
//! `http://sg.org/` ontology; metadata rows become quads about the SRA run.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CaddRecord, InfoValue, PatientMetadata, ValueType, VcfHeader, VcfRecord};
use crate::rdf::{format_decimal, rdf_ns, xsd, GraphName, Iri, Literal, Quad, Term};

pub mod link;
pub mod origin;
pub mod vocab;

pub use link::link_cadd_to_origins;
pub use origin::{origin_iri, OriginId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("invalid accession {0:?}: expected letters, digits, '.', '_' or '-'")]
    InvalidAccession(String),
}

/// Checks that an accession can name a graph and appear in IRIs.
pub fn validate_accession(accession: &str) -> Result<(), ConvertError> {
    let ok =
        !accession.is_empty() && accession.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if ok {
        Ok(())
    } else {
        Err(ConvertError::InvalidAccession(accession.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcfConvertOptions {
    /// Emit the first sample's FORMAT values. Off by default.
    #[serde(default)]
    pub emit_format: bool,
}

fn typed_value(value: &str, ty: Option<ValueType>) -> Literal {
    match ty {
        Some(ValueType::Integer) if value.parse::<i64>().is_ok() => Literal::typed(value, vocab::iri(xsd::INTEGER)),
        Some(ValueType::Float) if value.parse::<f64>().is_ok() => Literal::typed(value, vocab::iri(xsd::FLOAT)),
        _ => Literal::string(value),
    }
}

fn sequence_iri(seq: &str) -> Term {
    Iri::new(format!("{}{seq}", vocab::VCF_SEQUENCE_NS)).map(Term::Iri).unwrap_or_else(|_| Literal::string(seq).into())
}

/// Converts records of a single accession's VCF, one record at a time.
pub struct VcfConverter<'h> {
    header: &'h VcfHeader,
    accession: String,
    graph: GraphName,
    options: VcfConvertOptions,
}

impl<'h> VcfConverter<'h> {
    pub fn new(header: &'h VcfHeader, accession: &str, options: VcfConvertOptions) -> Result<Self, ConvertError> {
        validate_accession(accession)?;
        let graph = GraphName::Named(
            vocab::graph_iri(accession).ok_or_else(|| ConvertError::InvalidAccession(accession.into()))?,
        );
        Ok(Self { header, accession: accession.to_string(), graph, options })
    }

    pub fn graph(&self) -> &GraphName {
        &self.graph
    }

    /// Quads for the `ordinal`-th record of the file.
    pub fn convert(&self, record: &VcfRecord, ordinal: u64) -> Vec<Quad> {
        let origin = origin_iri(&self.accession, record, ordinal).to_iri();
        let mut out = Vec::with_capacity(8 + record.info.len());
        let mut push = |p: Iri, o: Term| {
            out.push(Quad::new(origin.clone(), p, o, self.graph.clone()));
        };

        let chromosome = Iri::new(format!("{}{}", vocab::VCF_CHROMOSOME_NS, record.chrom))
            .map(Term::Iri)
            .unwrap_or_else(|_| Literal::string(record.chrom.as_str()).into());
        push(vocab::iri(vocab::FALDO_REFERENCE), chromosome);
        push(
            vocab::iri(vocab::FALDO_POSITION),
            Literal::typed(record.pos.to_string(), vocab::iri(xsd::INTEGER)).into(),
        );
        push(vocab::iri(vocab::VCF_REF), sequence_iri(&record.reference));
        push(vocab::iri(vocab::VCF_ALT), sequence_iri(&record.alt_joined()));
        if let Some(q) = record.qual {
            push(vocab::iri(vocab::VCF_QUAL), Literal::float(q).into());
        }
        if let Some(id) = &record.id {
            push(vocab::iri(vocab::VCF_VARIANT_ID), Literal::string(id.as_str()).into());
        }
        if let Some(filter) = &record.filter {
            push(
                vocab::iri(&format!("{}{}", vocab::VCF_INFO_NS, vocab::FILTER_STATUS)),
                Literal::string(filter.as_str()).into(),
            );
        }
        for (key, value) in &record.info {
            let Some(pred) = vocab::info_predicate(&vocab::info_local_name(key)) else {
                continue;
            };
            let ty = self.header.info_type(key);
            let lit = match value {
                InfoValue::Flag => Literal::boolean(true),
                InfoValue::Value(_) if ty == Some(ValueType::Flag) => Literal::boolean(true),
                InfoValue::Value(v) if key == "ANN" => Literal::string(v.as_str()),
                InfoValue::Value(v) => typed_value(v, ty),
            };
            push(pred, lit.into());
        }
        if self.options.emit_format {
            if let Some(fmt) = &record.format {
                if let Some(sample) = fmt.samples.first() {
                    for (key, value) in fmt.keys.iter().zip(sample) {
                        if value == "." || value.is_empty() {
                            continue;
                        }
                        let pred = match vocab::format_alias(key) {
                            Some(alias) => vocab::info_predicate(alias),
                            None => Iri::new(format!("{}{key}", vocab::VCF_FORMAT_NS)).ok(),
                        };
                        if let Some(pred) = pred {
                            push(pred, typed_value(value, self.header.format_type(key)).into());
                        }
                    }
                }
            }
        }
        out
    }
}

/// Converts all records of one file; ordinals follow input order.
pub fn vcf_to_quads<'r>(
    records: impl IntoIterator<Item = &'r VcfRecord>,
    header: &VcfHeader,
    accession: &str,
    options: &VcfConvertOptions,
) -> Result<Vec<Quad>, ConvertError> {
    let conv = VcfConverter::new(header, accession, options.clone())?;
    Ok(records.into_iter().enumerate().flat_map(|(i, r)| conv.convert(r, i as u64)).collect())
}

/// Assigns `variant<k>` numbers per chromosome, 1-based in file order.
#[derive(Debug, Default)]
pub struct CaddNumbering {
    counters: HashMap<String, u64>,
}

impl CaddNumbering {
    pub fn next(&mut self, chrom: &str) -> u64 {
        let c = self.counters.entry(chrom.to_string()).or_insert(0);
        *c += 1;
        *c
    }
}

/// Triples for one CADD row, numbered `k` within its chromosome.
pub fn cadd_record_triples(accession: &str, record: &CaddRecord, k: u64) -> Vec<Quad> {
    let variant = Iri::new(format!("{}{accession}/{}/variant{k}", vocab::SG_NS, record.chrom));
    let Ok(variant) = variant else {
        return Vec::new();
    };
    let cadd = vocab::iri(&format!("{}/cadd", variant.as_str()));
    vec![
        Quad::triple(variant.clone(), vocab::iri(rdf_ns::TYPE), vocab::iri(vocab::CLASS_VARIANT)),
        Quad::triple(
            variant.clone(),
            vocab::iri(vocab::HAS_POS),
            Literal::typed(record.pos.to_string(), vocab::iri(xsd::INTEGER)),
        ),
        Quad::triple(variant.clone(), vocab::iri(vocab::HAS_REF_GENOME), Literal::string(record.reference.as_str())),
        Quad::triple(variant.clone(), vocab::iri(vocab::HAS_ALT_GENOME), Literal::string(record.alt.as_str())),
        Quad::triple(variant, vocab::iri(vocab::HAS_CADD_SCORES), cadd.clone()),
        Quad::triple(cadd.clone(), vocab::iri(vocab::HAS_RAW_SCORE), Literal::double(record.raw_score)),
        Quad::triple(cadd, vocab::iri(vocab::HAS_PHRED), Literal::double(record.phred)),
    ]
}

/// Converts one accession's CADD rows to default-graph triples.
pub fn cadd_to_triples<'r>(
    cadds: impl IntoIterator<Item = &'r CaddRecord>,
    accession: &str,
) -> Result<Vec<Quad>, ConvertError> {
    validate_accession(accession)?;
    let mut numbering = CaddNumbering::default();
    Ok(cadds
        .into_iter()
        .flat_map(|r| {
            let k = numbering.next(&r.chrom);
            cadd_record_triples(accession, r, k)
        })
        .collect())
}

/// Predicates used for patient attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataPredicates {
    pub age: String,
    pub sex: Option<String>,
    pub disease: Option<String>,
    pub fatality_status: Option<String>,
}

impl Default for MetadataPredicates {
    fn default() -> Self {
        Self {
            age: vocab::AGE.into(),
            sex: Some(vocab::HAS_SEX.into()),
            disease: Some(vocab::HAS_DISEASE.into()),
            fatality_status: Some(vocab::HAS_FATALITY_STATUS.into()),
        }
    }
}

/// Quads about each patient in the patient's own named graph. Rows with an
/// unusable accession are skipped.
pub fn metadata_to_quads<'m>(
    meta: impl IntoIterator<Item = &'m PatientMetadata>,
    predicates: &MetadataPredicates,
) -> Vec<Quad> {
    let mut out = Vec::new();
    for m in meta {
        if validate_accession(&m.accession_id).is_err() {
            continue;
        }
        let (Some(subject), Some(graph)) = (vocab::sra_subject(&m.accession_id), vocab::graph_iri(&m.accession_id))
        else {
            continue;
        };
        let graph = GraphName::Named(graph);
        let mut push = |pred: &str, obj: Literal| {
            if let Ok(p) = Iri::new(pred) {
                out.push(Quad::new(subject.clone(), p, obj, graph.clone()));
            }
        };
        if let Some(age) = m.age {
            push(&predicates.age, Literal::typed(format_decimal(age), vocab::iri(xsd::FLOAT)));
        }
        let attrs = [
            (&predicates.sex, &m.sex),
            (&predicates.disease, &m.disease),
            (&predicates.fatality_status, &m.fatality_status),
        ];
        for (pred, value) in attrs {
            if let (Some(p), Some(v)) = (pred, value) {
                push(p, Literal::string(v.as_str()));
            }
        }
    }
    out
}
