//! Streaming VCF 4.x reader.
//!
//! The header is consumed eagerly by [`VcfReader::new`]; data lines are then
//! produced one at a time, so memory use is bounded by the longest record.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use indexmap::IndexMap;

use super::{IngestError, RecordError};

/// Declared type of an INFO or FORMAT field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Integer,
    Float,
    Flag,
    Character,
    String,
}

impl ValueType {
    fn parse(s: &str) -> Self {
        match s {
            "Integer" => ValueType::Integer,
            "Float" => ValueType::Float,
            "Flag" => ValueType::Flag,
            "Character" => ValueType::Character,
            _ => ValueType::String,
        }
    }
}

/// One `##INFO=<...>` or `##FORMAT=<...>` declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub id: String,
    pub number: String,
    pub ty: ValueType,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VcfHeader {
    /// Every `##` line, verbatim and without the leading `##`.
    pub meta_lines: Vec<String>,
    pub infos: IndexMap<String, FieldDecl>,
    pub formats: IndexMap<String, FieldDecl>,
    pub samples: Vec<String>,
}

impl VcfHeader {
    pub fn info_type(&self, key: &str) -> Option<ValueType> {
        self.infos.get(key).map(|d| d.ty)
    }

    pub fn format_type(&self, key: &str) -> Option<ValueType> {
        self.formats.get(key).map(|d| d.ty)
    }

    fn absorb_meta(&mut self, line: &str) {
        let body = &line[2..];
        if let Some(rest) = body.strip_prefix("INFO=<") {
            if let Some(decl) = parse_decl(rest) {
                self.infos.insert(decl.id.clone(), decl);
            }
        } else if let Some(rest) = body.strip_prefix("FORMAT=<") {
            if let Some(decl) = parse_decl(rest) {
                self.formats.insert(decl.id.clone(), decl);
            }
        }
        self.meta_lines.push(body.to_string());
    }
}

/// Parses the inside of `<ID=..,Number=..,Type=..,Description="..">`.
fn parse_decl(rest: &str) -> Option<FieldDecl> {
    let rest = rest.strip_suffix('>').unwrap_or(rest);
    let mut fields: IndexMap<String, String> = IndexMap::new();
    let mut chars = rest.chars().peekable();
    loop {
        let key: String = chars.by_ref().take_while(|c| *c != '=').collect();
        if key.is_empty() {
            break;
        }
        let mut value = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            let mut escaped = false;
            for c in chars.by_ref() {
                if escaped {
                    value.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '"' {
                    break;
                } else {
                    value.push(c);
                }
            }
            // swallow the separator after a quoted value
            if chars.peek() == Some(&',') {
                chars.next();
            }
        } else {
            value = chars.by_ref().take_while(|c| *c != ',').collect();
        }
        fields.insert(key.trim().to_string(), value);
    }
    Some(FieldDecl {
        id: fields.get("ID")?.clone(),
        number: fields.get("Number").cloned().unwrap_or_default(),
        ty: ValueType::parse(fields.get("Type").map(String::as_str).unwrap_or("String")),
        description: fields.get("Description").cloned().unwrap_or_default(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfoValue {
    /// Key present without `=`.
    Flag,
    Value(String),
}

impl InfoValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            InfoValue::Flag => None,
            InfoValue::Value(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormatSamples {
    pub keys: Vec<String>,
    /// One value list per sample, each as long as `keys`.
    pub samples: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VcfRecord {
    pub chrom: String,
    pub pos: u64,
    pub id: Option<String>,
    pub reference: String,
    pub alt: Vec<String>,
    pub qual: Option<f64>,
    pub filter: Option<String>,
    pub info: IndexMap<String, InfoValue>,
    pub format: Option<FormatSamples>,
}

impl VcfRecord {
    /// ALT alleles re-joined with commas, as written in the source line.
    pub fn alt_joined(&self) -> String {
        self.alt.join(",")
    }

    pub fn info_str(&self, key: &str) -> Option<&str> {
        self.info.get(key).and_then(InfoValue::as_str)
    }
}

/// Reader yielding one [`VcfRecord`] per data line.
pub struct VcfReader<R> {
    input: R,
    header: VcfHeader,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> VcfReader<R> {
    /// Consumes the header. A missing `#CHROM` line is fatal.
    pub fn new(mut input: R) -> Result<Self, IngestError> {
        let mut header = VcfHeader::default();
        let mut line_no = 0;
        let mut buf = String::new();
        loop {
            buf.clear();
            if input.read_line(&mut buf)? == 0 {
                return Err(IngestError::MissingHeader("#CHROM"));
            }
            line_no += 1;
            let line = buf.trim_end_matches(['\n', '\r']);
            if line.starts_with("##") {
                header.absorb_meta(line);
            } else if line.starts_with("#CHROM") {
                header.samples = line.split('\t').skip(9).map(str::to_string).collect();
                break;
            } else if line.is_empty() {
                continue;
            } else {
                return Err(IngestError::MissingHeader("#CHROM"));
            }
        }
        Ok(Self { input, header, line_no, buf })
    }

    pub fn header(&self) -> &VcfHeader {
        &self.header
    }

    pub fn into_header(self) -> VcfHeader {
        self.header
    }
}

impl VcfReader<BufReader<Box<dyn Read + Send>>> {
    /// Opens a plain or gzip/bgzip-compressed VCF, sniffing the gzip magic.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::new(BufReader::new(open_maybe_gzip(path.as_ref())?))
    }
}

/// Opens a file, transparently decompressing gzip input.
pub fn open_maybe_gzip(path: &Path) -> Result<Box<dyn Read + Send>, IngestError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let file = File::open(path)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(MultiGzDecoder::new(file)))
    } else {
        Ok(Box::new(file))
    }
}

impl<R: BufRead> Iterator for VcfReader<R> {
    type Item = Result<VcfRecord, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.line_no += 1;
                    return Some(Err(RecordError::new(self.line_no, e.to_string())));
                }
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.is_empty() {
                continue;
            }
            return Some(parse_record(line, self.header.samples.len(), self.line_no));
        }
    }
}

fn absent_if_dot(s: &str) -> Option<String> {
    (s != ".").then(|| s.to_string())
}

/// Parses one tab-separated data line.
pub fn parse_record(line: &str, n_samples: usize, line_no: usize) -> Result<VcfRecord, RecordError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() < 8 {
        return Err(RecordError::new(line_no, format!("expected at least 8 columns, found {}", cols.len())));
    }
    if n_samples > 0 && cols.len() != 9 + n_samples {
        return Err(RecordError::new(line_no, format!("expected {} columns, found {}", 9 + n_samples, cols.len())));
    }

    let pos: u64 = cols[1].parse().map_err(|_| RecordError::new(line_no, format!("non-integer POS {:?}", cols[1])))?;
    if pos == 0 {
        return Err(RecordError::new(line_no, "POS must be >= 1"));
    }
    let reference = cols[3];
    if reference.is_empty()
        || !reference.bytes().all(|b| matches!(b.to_ascii_uppercase(), b'A' | b'C' | b'G' | b'T' | b'N'))
    {
        return Err(RecordError::new(line_no, format!("invalid REF {reference:?}")));
    }
    let alt: Vec<String> = cols[4].split(',').map(str::to_string).collect();
    if alt.iter().any(String::is_empty) {
        return Err(RecordError::new(line_no, format!("empty ALT allele in {:?}", cols[4])));
    }
    let qual = match cols[5] {
        "." => None,
        q => Some(q.parse::<f64>().map_err(|_| RecordError::new(line_no, format!("non-numeric QUAL {q:?}")))?),
    };

    let mut info = IndexMap::new();
    if cols[7] != "." {
        for entry in cols[7].split(';').filter(|e| !e.is_empty()) {
            let (key, value) = match entry.split_once('=') {
                Some((k, v)) => (k, InfoValue::Value(v.to_string())),
                None => (entry, InfoValue::Flag),
            };
            if info.insert(key.to_string(), value).is_some() {
                return Err(RecordError::new(line_no, format!("duplicate INFO key {key:?}")));
            }
        }
    }

    let format = if cols.len() > 8 {
        let keys: Vec<String> = cols[8].split(':').map(str::to_string).collect();
        let mut samples = Vec::with_capacity(cols.len() - 9);
        for (i, sample) in cols[9..].iter().enumerate() {
            let values: Vec<String> = sample.split(':').map(str::to_string).collect();
            if values.len() != keys.len() {
                return Err(RecordError::new(
                    line_no,
                    format!("sample {i} has {} values for {} FORMAT keys", values.len(), keys.len()),
                ));
            }
            samples.push(values);
        }
        Some(FormatSamples { keys, samples })
    } else {
        None
    };

    Ok(VcfRecord {
        chrom: cols[0].to_string(),
        pos,
        id: absent_if_dot(cols[2]),
        reference: reference.to_string(),
        alt,
        qual,
        filter: absent_if_dot(cols[6]),
        info,
        format,
    })
}
