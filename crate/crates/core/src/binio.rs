//! Little-endian binary container used by every on-disk artifact.
//!
//! Layout: `magic (8 bytes) | version (u32) | payload length (u64) | payload | sha256(payload)`.

use std::io::{self, Read, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: [u8; 8] },
    #[error("unsupported version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checksum mismatch")]
    Checksum,
    #[error("truncated container")]
    Truncated,
    #[error("malformed payload: {0}")]
    Malformed(String),
}

/// Writes a checksummed container around `payload`.
pub fn write_container<W: Write>(mut out: W, magic: &[u8; 8], version: u32, payload: &[u8]) -> io::Result<()> {
    out.write_all(magic)?;
    out.write_all(&version.to_le_bytes())?;
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(payload)?;
    out.write_all(&Sha256::digest(payload))?;
    out.flush()
}

/// Reads and verifies a container, returning its payload.
pub fn read_container<R: Read>(mut input: R, magic: &[u8; 8], version: u32) -> Result<Vec<u8>, ContainerError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() < 20 {
        return Err(ContainerError::Truncated);
    }
    if &buf[..8] != magic {
        return Err(ContainerError::BadMagic { expected: *magic });
    }
    let found = u32::from_le_bytes(buf[8..12].try_into().unwrap());
    if found != version {
        return Err(ContainerError::Version { found, expected: version });
    }
    let len = u64::from_le_bytes(buf[12..20].try_into().unwrap()) as usize;
    let body = &buf[20..];
    if body.len() != len.saturating_add(32) {
        return Err(ContainerError::Truncated);
    }
    let (payload, sum) = body.split_at(len);
    if Sha256::digest(payload).as_slice() != sum {
        return Err(ContainerError::Checksum);
    }
    Ok(payload.to_vec())
}

/// Append-only payload encoder.
#[derive(Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }

    pub fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.buf.extend_from_slice(b);
    }

    pub fn f64s(&mut self, vs: &[f64]) {
        self.u64(vs.len() as u64);
        for v in vs {
            self.f64(*v);
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Cursor over a payload produced by [`Encoder`].
pub struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ContainerError> {
        let end = self.pos.checked_add(n).ok_or(ContainerError::Truncated)?;
        if end > self.buf.len() {
            return Err(ContainerError::Truncated);
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, ContainerError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, ContainerError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, ContainerError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn i64(&mut self) -> Result<i64, ContainerError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64, ContainerError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn bool(&mut self) -> Result<bool, ContainerError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(ContainerError::Malformed(format!("invalid bool byte {b}"))),
        }
    }

    /// Reads a length prefix and checks it against the remaining bytes.
    pub fn len_prefix(&mut self, elem_size: usize) -> Result<usize, ContainerError> {
        let n = self.u64()? as usize;
        if n.saturating_mul(elem_size.max(1)) > self.remaining() {
            return Err(ContainerError::Truncated);
        }
        Ok(n)
    }

    pub fn str(&mut self) -> Result<String, ContainerError> {
        let n = self.len_prefix(1)?;
        let b = self.take(n)?;
        String::from_utf8(b.to_vec()).map_err(|e| ContainerError::Malformed(e.to_string()))
    }

    pub fn bytes(&mut self) -> Result<Vec<u8>, ContainerError> {
        let n = self.len_prefix(1)?;
        Ok(self.take(n)?.to_vec())
    }

    pub fn f64s(&mut self) -> Result<Vec<f64>, ContainerError> {
        let n = self.len_prefix(8)?;
        (0..n).map(|_| self.f64()).collect()
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn finish(self) -> Result<(), ContainerError> {
        if self.remaining() != 0 {
            return Err(ContainerError::Malformed(format!("{} trailing bytes", self.remaining())));
        }
        Ok(())
    }
}
