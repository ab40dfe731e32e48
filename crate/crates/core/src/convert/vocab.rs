//! Fixed vocabulary of the variant knowledge graph.

use crate::rdf::Iri;

pub const FALDO_NS: &str = "http://biohackathon.org/resource/faldo#";
pub const FALDO_REFERENCE: &str = "http://biohackathon.org/resource/faldo#reference";
pub const FALDO_POSITION: &str = "http://biohackathon.org/resource/faldo#position";

pub const VCF2RDF_ROOT: &str = "sg://0.99.11/vcf2rdf/";
pub const VCF_VARIANT_NS: &str = "sg://0.99.11/vcf2rdf/variant/";
pub const VCF_REF: &str = "sg://0.99.11/vcf2rdf/variant/REF";
pub const VCF_ALT: &str = "sg://0.99.11/vcf2rdf/variant/ALT";
pub const VCF_QUAL: &str = "sg://0.99.11/vcf2rdf/variant/QUAL";
pub const VCF_FILTER: &str = "sg://0.99.11/vcf2rdf/variant/FILTER";
pub const VCF_VARIANT_ID: &str = "sg://0.99.11/vcf2rdf/variantId";
pub const VCF_INFO_NS: &str = "sg://0.99.11/vcf2rdf/info/";
pub const VCF_FORMAT_NS: &str = "sg://0.99.11/vcf2rdf/format/";
pub const VCF_FORMAT_GT_NS: &str = "sg://0.99.11/vcf2rdf/format/GT/";
pub const VCF_CHROMOSOME_NS: &str = "sg://0.99.11/vcf2rdf/chromosome/";
pub const VCF_SEQUENCE_NS: &str = "sg://0.99.11/vcf2rdf/sequence/";

pub const SG_NS: &str = "http://sg.org/";
pub const CLASS_VARIANT: &str = "http://sg.org/variant";
pub const CLASS_CHROMOSOME: &str = "http://sg.org/Chromosome";
pub const CLASS_CHROMOSOME_NUMBER: &str = "http://sg.org/chromosome_number";
pub const CLASS_CADD: &str = "http://sg.org/CADD";
pub const CLASS_ORIGIN: &str = "http://sg.org/Origin";
pub const CLASS_XREF_LINK: &str = "http://sg.org/xref_link";
pub const CLASS_URL_LINK: &str = "http://sg.org/url_link";
pub const CLASS_STUDY_ATTRIBUTE: &str = "http://sg.org/study_attribute";
pub const CLASS_RUN_ATTRIBUTE: &str = "http://sg.org/run_attribute";
pub const CLASS_EXPERIMENT_ATTRIBUTE: &str = "http://sg.org/experiment_attribute";
pub const HAS_POS: &str = "http://sg.org/has_pos";
pub const HAS_REF_GENOME: &str = "http://sg.org/has_ref_genome";
pub const HAS_ALT_GENOME: &str = "http://sg.org/has_alt_genome";
pub const HAS_CADD_SCORES: &str = "http://sg.org/has_cadd_scores";
pub const HAS_RAW_SCORE: &str = "http://sg.org/has_raw_score";
pub const HAS_PHRED: &str = "http://sg.org/has_phred";
/// Ontology-table spellings of the score predicates; registered, not emitted.
pub const RAW_SCORE: &str = "http://sg.org/raw_score";
pub const PHRED: &str = "http://sg.org/phred";
pub const HAS_CHROMOSOME_NUMBER: &str = "http://sg.org/has_chromosome_number";
pub const HAS_NUMBER: &str = "http://sg.org/has_number";
pub const HAS_VARIANT: &str = "http://sg.org/has_variant";
pub const HAS_VARIANT_ID: &str = "http://sg.org/has_variant_id";

/// Wikidata "age of a person".
pub const AGE: &str = "https://www.wikidata.org/wiki/Q11904283";
/// Wikidata "chromosome", the range of the Chromosome class.
pub const WIKIDATA_CHROMOSOME: &str = "https://www.wikidata.org/wiki/Q37748";
pub const HAS_SEX: &str = "http://sg.org/has_sex";
pub const HAS_DISEASE: &str = "http://sg.org/has_disease";
pub const HAS_FATALITY_STATUS: &str = "http://sg.org/has_fatality_status";

pub const GRAPH_SCHEME: &str = "sg://";
pub const SRA_TERM_PREFIX: &str = "https://www.ncbi.nlm.nih.gov/sra/?term=";

/// Every vocabulary constant, for validation.
pub const ALL: &[&str] = &[
    FALDO_NS,
    FALDO_REFERENCE,
    FALDO_POSITION,
    VCF2RDF_ROOT,
    VCF_VARIANT_NS,
    VCF_REF,
    VCF_ALT,
    VCF_QUAL,
    VCF_FILTER,
    VCF_VARIANT_ID,
    VCF_INFO_NS,
    VCF_FORMAT_NS,
    VCF_FORMAT_GT_NS,
    VCF_CHROMOSOME_NS,
    VCF_SEQUENCE_NS,
    SG_NS,
    CLASS_VARIANT,
    CLASS_CHROMOSOME,
    CLASS_CHROMOSOME_NUMBER,
    CLASS_CADD,
    CLASS_ORIGIN,
    CLASS_XREF_LINK,
    CLASS_URL_LINK,
    CLASS_STUDY_ATTRIBUTE,
    CLASS_RUN_ATTRIBUTE,
    CLASS_EXPERIMENT_ATTRIBUTE,
    HAS_POS,
    HAS_REF_GENOME,
    HAS_ALT_GENOME,
    HAS_CADD_SCORES,
    HAS_RAW_SCORE,
    HAS_PHRED,
    RAW_SCORE,
    PHRED,
    HAS_CHROMOSOME_NUMBER,
    HAS_NUMBER,
    HAS_VARIANT,
    HAS_VARIANT_ID,
    AGE,
    WIKIDATA_CHROMOSOME,
    HAS_SEX,
    HAS_DISEASE,
    HAS_FATALITY_STATUS,
    SRA_TERM_PREFIX,
];

/// INFO keys whose predicate local name differs from the upper-cased key.
const INFO_ALIASES: &[(&str, &str)] = &[
    ("AC", "ALLELE_COUNT"),
    ("AF", "ALLELE_FREQUENCY"),
    ("AN", "TOTAL_NUMBER_OF_ALLELES"),
    ("MQ", "RMS_MAPPING_QUALITY"),
    ("DP", "DEPTH"),
];

/// Per-sample FORMAT keys surfaced as `info/` predicates when FORMAT
/// emission is enabled.
const FORMAT_ALIASES: &[(&str, &str)] =
    &[("DP", "COMBINED_DEPTH"), ("GQ", "CONDITIONAL_GENOTYPE_QUALITY"), ("GT", "GENOTYPE")];

/// Local name of the `info/` predicate for a VCF INFO key.
pub fn info_local_name(key: &str) -> String {
    INFO_ALIASES.iter().find(|(k, _)| *k == key).map(|(_, v)| v.to_string()).unwrap_or_else(|| key.to_ascii_uppercase())
}

pub fn format_alias(key: &str) -> Option<&'static str> {
    FORMAT_ALIASES.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// Local name under `info/` that holds the FILTER column.
pub const FILTER_STATUS: &str = "FILTER_STATUS";

pub fn iri(s: &str) -> Iri {
    Iri::from_static(s)
}

pub fn info_predicate(local: &str) -> Option<Iri> {
    Iri::new(format!("{VCF_INFO_NS}{local}")).ok()
}

pub fn graph_iri(accession: &str) -> Option<Iri> {
    Iri::new(format!("{GRAPH_SCHEME}{accession}")).ok()
}

/// Accession from a `sg://<accession>` graph IRI.
pub fn accession_of_graph(graph: &str) -> Option<&str> {
    graph.strip_prefix(GRAPH_SCHEME).filter(|a| !a.is_empty() && !a.contains('/'))
}

pub fn sra_subject(accession: &str) -> Option<Iri> {
    Iri::new(format!("{SRA_TERM_PREFIX}{accession}")).ok()
}
