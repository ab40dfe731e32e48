use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::ingest::VcfRecord;
use crate::rdf::Iri;

/// Per-variant subject `origin://<hash>@<ordinal>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OriginId {
    hash: String,
    ordinal: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed origin IRI {0:?}")]
pub struct OriginParseError(String);

impl OriginId {
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn ordinal(&self) -> u64 {
        self.ordinal
    }

    pub fn to_iri(&self) -> Iri {
        Iri::new(self.to_string()).expect("origin IRIs are always valid")
    }
}

impl fmt::Display for OriginId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "origin://{}@{}", self.hash, self.ordinal)
    }
}

impl FromStr for OriginId {
    type Err = OriginParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || OriginParseError(s.to_string());
        let body = s.strip_prefix("origin://").ok_or_else(err)?;
        let (hash, ordinal) = body.split_once('@').ok_or_else(err)?;
        let hex_ok = hash.len() == 32 && hash.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'));
        if !hex_ok {
            return Err(err());
        }
        let ordinal = ordinal.parse().map_err(|_| err())?;
        Ok(OriginId { hash: hash.to_string(), ordinal })
    }
}

/// Derives the origin of the `ordinal`-th record of an accession's VCF.
///
/// The hash is the first 128 bits of SHA-256 over
/// `accession \t chrom \t pos \t ref \t alt \t ordinal`.
pub fn origin_iri(accession: &str, record: &VcfRecord, ordinal: u64) -> OriginId {
    let key = format!(
        "{accession}\t{}\t{}\t{}\t{}\t{ordinal}",
        record.chrom,
        record.pos,
        record.reference,
        record.alt_joined()
    );
    let digest = Sha256::digest(key.as_bytes());
    let hash = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
    OriginId { hash, ordinal }
}
