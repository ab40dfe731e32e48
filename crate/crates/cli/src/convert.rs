//! Offline file conversion to N-Quads or Turtle.

use std::path::Path;

use regex::Regex;
use variantkg_core::convert::{vocab, MetadataPredicates, VcfConvertOptions};
use variantkg_core::ingest::MetadataOptions;
use variantkg_core::pipeline::{self, gunzip_if_needed};
use variantkg_core::rdf::{serialize_nquads, serialize_turtle, xsd, GraphName, PrefixMap, Quad};

use crate::backend::{client_error, Res};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Vcf,
    Cadd,
    Metadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Syntax {
    Nq,
    Ttl,
}

pub struct Options {
    pub kind: Kind,
    pub accession: Option<String>,
    pub accession_pattern: String,
    pub metadata: MetadataOptions,
    pub vcf: VcfConvertOptions,
}

fn failed(e: impl std::fmt::Display) -> variantkg_service::ApiError {
    client_error("conversion_failed", e.to_string())
}

/// Converts one file; returns its quads and any warnings.
pub fn convert_file(path: &Path, opts: &Options) -> Res<(Vec<Quad>, Vec<String>)> {
    let name = path.display().to_string();
    let raw = std::fs::read(path).map_err(|e| client_error("io_error", format!("{name}: {e}")))?;
    let bytes = gunzip_if_needed(&raw).map_err(|e| failed(format!("{name}: {e}")))?;
    let accession = || -> Res<String> {
        if let Some(a) = &opts.accession {
            return Ok(a.clone());
        }
        let re = Regex::new(&opts.accession_pattern).map_err(|e| client_error("bad_pattern", e.to_string()))?;
        pipeline::require_accession(&name, &re).map_err(failed)
    };
    match opts.kind {
        Kind::Vcf => {
            Ok((pipeline::convert_vcf(&bytes[..], &name, &accession()?, &opts.vcf).map_err(failed)?, Vec::new()))
        }
        Kind::Cadd => Ok((pipeline::convert_cadd(&bytes[..], &name, &accession()?).map_err(failed)?, Vec::new())),
        Kind::Metadata => {
            let (quads, warnings) =
                pipeline::convert_metadata(&bytes[..], &name, &opts.metadata, &MetadataPredicates::default())
                    .map_err(failed)?;
            Ok((quads, warnings.iter().map(|w| format!("{name}: line {}: {}", w.line, w.message)).collect()))
        }
    }
}

pub fn prefixes() -> PrefixMap {
    let mut p = PrefixMap::new();
    for (label, ns) in [
        ("ns1", vocab::SG_NS),
        ("sg_variant", vocab::VCF2RDF_ROOT),
        ("sg_vcf", vocab::VCF_VARIANT_NS),
        ("sg_info", vocab::VCF_INFO_NS),
        ("faldo", vocab::FALDO_NS),
        ("xsd", xsd::NS),
    ] {
        p.insert(label, ns).expect("valid prefix");
    }
    p
}

/// Serializes quads. Turtle has no graphs, so it accepts quads from at most
/// one named graph and writes them as plain triples.
pub fn render(quads: Vec<Quad>, syntax: Syntax) -> Res<String> {
    match syntax {
        Syntax::Nq => Ok(serialize_nquads(&quads)),
        Syntax::Ttl => {
            let mut named = quads.iter().filter_map(|q| match &q.graph {
                GraphName::Named(g) => Some(g.as_str()),
                GraphName::Default => None,
            });
            if let Some(first) = named.next() {
                if let Some(other) = named.find(|g| *g != first) {
                    return Err(client_error(
                        "multiple_graphs",
                        format!("quads span graphs {first} and {other}; Turtle holds one graph, use --to nq"),
                    ));
                }
            }
            let triples: Vec<Quad> = quads.into_iter().map(|q| Quad { graph: GraphName::Default, ..q }).collect();
            serialize_turtle(&triples, &prefixes()).map_err(failed)
        }
    }
}
