//! Variant knowledge-graph toolkit.
//!
//! The crate is organised along the data path:
//!
//! * [`ingest`] streams SnpEff-annotated VCF, CADD TSV and SRA metadata CSV.
//! * [`rdf`] holds the term algebra and the N-Quads / Turtle codecs.
//! * [`convert`] maps parsed records onto the variant ontology.
//! * [`store`] is a dictionary-encoded in-memory quad store with snapshots.
//! * [`sparql`] parses and evaluates the SPARQL subset used for feature retrieval.
//! * [`graph`] turns a result table into an integer-encoded node-classification graph.
//! * [`gnn`] trains GCN and GraphSAGE models on that graph.

pub mod binio;
pub mod convert;
pub mod gnn;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod rdf;
pub mod sparql;
pub mod store;
