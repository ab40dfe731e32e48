//! The feature-retrieval query and the accession queries built on it.

use super::ast::{Projection, SelectItem};
use super::parse_query;
use crate::convert::vocab;

/// Placeholder replaced by the comma-separated accession graph IRIs.
pub const ACCESSION_LIST_PLACEHOLDER: &str = "accession_id_list";

/// Fetches every feature of the variants in the listed accession graphs.
pub const FEATURE_QUERY_TEMPLATE: &str = r##"PREFIX sg_biohackathon:<http://biohackathon.org/resource/faldo#>
PREFIX sg_variant:<sg://0.99.11/vcf2rdf/>
PREFIX sg_vcf:<sg://0.99.11/vcf2rdf/variant/>
PREFIX sg_info:<sg://0.99.11/vcf2rdf/info/>
PREFIX sg_format:<sg://0.99.11/vcf2rdf/format/>
PREFIX sg_format_gt:<sg://0.99.11/vcf2rdf/format/GT/>
PREFIX ns1:<http://sg.org/>

SELECT DISTINCT ?accession_id ?origin (COALESCE(?variant_id, "None") AS ?variant_id) ?chromosome ?position ?ref_genome ?alt_genome ?quality ?ann ?ann_split_1 ?filter_status ?allele_count ?allele_frequency ?total_number_of_alleles ?baseqranksum ?depth ?excesshet ?fs ?mleac ?mleaf ?RMS_mapping_quality ?qd ?readposranksum ?sor ?combined_depth ?conditional_genotype_quality ?genotype ?raw_score ?phred_score
WHERE {
  GRAPH ?accession_id {
    OPTIONAL { ?origin sg_variant:variantId ?variant_id . }
    BIND (COALESCE(?variant_id, "None") AS ?variant_id)
    ?origin sg_biohackathon:reference ?chromosome .
    ?origin sg_biohackathon:position ?position .
    ?origin sg_vcf:REF ?ref_genome .
    ?origin sg_vcf:ALT ?alt_genome .
    ?origin sg_vcf:QUAL ?quality .
    ?origin sg_info:ANN ?ann .
    BIND (IF(STRLEN(?ann) - STRLEN(REPLACE(?ann, ",", "")) = 0, ?ann, STRBEFORE(?ann, ",")) AS ?ann_split_1)
    OPTIONAL { ?origin sg_info:FILTER_STATUS ?filter_status . }
    OPTIONAL { ?origin sg_info:ALLELE_COUNT ?allele_count . }
    OPTIONAL { ?origin sg_info:ALLELE_FREQUENCY ?allele_frequency . }
    OPTIONAL { ?origin sg_info:TOTAL_NUMBER_OF_ALLELES ?total_number_of_alleles . }
    OPTIONAL { ?origin sg_info:BASEQRANKSUM ?baseqranksum . }
    OPTIONAL { ?origin sg_info:DEPTH ?depth . }
    OPTIONAL { ?origin sg_info:EXCESSHET ?excesshet . }
    OPTIONAL { ?origin sg_info:FS ?fs . }
    OPTIONAL { ?origin sg_info:MLEAC ?mleac . }
    OPTIONAL { ?origin sg_info:MLEAF ?mleaf . }
    OPTIONAL { ?origin sg_info:RMS_MAPPING_QUALITY ?RMS_mapping_quality . }
    OPTIONAL { ?origin sg_info:QD ?qd . }
    OPTIONAL { ?origin sg_info:READPOSRANKSUM ?readposranksum . }
    OPTIONAL { ?origin sg_info:SOR ?sor . }
    OPTIONAL { ?origin sg_info:COMBINED_DEPTH ?combined_depth . }
    OPTIONAL { ?origin sg_info:CONDITIONAL_GENOTYPE_QUALITY ?conditional_genotype_quality . }
    OPTIONAL { ?origin sg_info:GENOTYPE ?genotype . }
    OPTIONAL { ?origin sg_info:RAW_SCORE ?raw_score . }
    OPTIONAL { ?origin sg_info:PHRED_SCORE ?phred_score . }
  }
  ?origin sg_biohackathon:position ?position .
  OPTIONAL { ?variant <http://sg.org/has_pos> ?position . }
  ?origin sg_vcf:REF ?ref_genome .
  OPTIONAL { ?variant <http://sg.org/has_ref_genome> ?ref_genome . }
  ?origin sg_vcf:ALT ?alt_genome .
  OPTIONAL { ?variant <http://sg.org/has_alt_genome> ?alt_genome . }
  OPTIONAL { ?variant <http://sg.org/has_cadd_scores> ?cadd_scores . }
  OPTIONAL { ?cadd_scores <http://sg.org/has_raw_score> ?raw_score . }
  OPTIONAL { ?cadd_scores <http://sg.org/has_phred> ?phred_score . }
  FILTER (?accession_id IN (accession_id_list))
} ORDER BY ?variant_id
"##;

/// The feature query restricted to `accessions`.
pub fn feature_query(accessions: &[impl AsRef<str>]) -> String {
    let list: Vec<String> = accessions.iter().map(|a| format!("<{}{}>", vocab::GRAPH_SCHEME, a.as_ref())).collect();
    FEATURE_QUERY_TEMPLATE.replacen(ACCESSION_LIST_PLACEHOLDER, &list.join(", "), 1)
}

/// Output columns of the feature query, in projection order.
pub fn feature_columns() -> Vec<String> {
    let q = parse_query(&feature_query(&["X"])).expect("feature query parses");
    match q.projection {
        Projection::Items(items) => items.iter().map(SelectItem::var).map(str::to_string).collect(),
        Projection::All => Vec::new(),
    }
}

/// Columns identifying a row rather than describing the variant.
pub const KEY_COLUMNS: [&str; 2] = ["accession_id", "origin"];

/// Every named graph.
pub const ACCESSIONS_QUERY: &str = "SELECT DISTINCT ?g WHERE { GRAPH ?g { ?s ?p ?o } } ORDER BY ?g";

/// Graphs whose patient age lies in `[min, max]`; open bounds are omitted.
pub fn age_filter_query(min: Option<f64>, max: Option<f64>) -> String {
    let mut conds = Vec::new();
    if let Some(min) = min {
        conds.push(format!("?age >= {}", crate::rdf::format_decimal(min)));
    }
    if let Some(max) = max {
        conds.push(format!("?age <= {}", crate::rdf::format_decimal(max)));
    }
    let filter = if conds.is_empty() { String::new() } else { format!(" FILTER ({})", conds.join(" && ")) };
    format!("SELECT DISTINCT ?g WHERE {{ GRAPH ?g {{ ?patient <{}> ?age }}{filter} }} ORDER BY ?g", vocab::AGE)
}
