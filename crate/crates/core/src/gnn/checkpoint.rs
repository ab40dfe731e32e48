use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::binio::{self, ContainerError, Decoder, Encoder};

use super::{GnnError, Layer, ModelConfig, ModelKind, ModelParams};

const CHECKPOINT_MAGIC: &[u8; 8] = b"VKGMODEL";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ModelConfig,
    pub params: ModelParams,
}

fn kind_tag(k: ModelKind) -> u8 {
    match k {
        ModelKind::Gcn => 0,
        ModelKind::Sage => 1,
    }
}

pub fn checkpoint_to_bytes(c: &Checkpoint) -> Vec<u8> {
    let cfg = &c.config;
    let mut enc = Encoder::new();
    enc.u8(kind_tag(cfg.model_kind));
    enc.u64(cfg.num_layers as u64);
    enc.u64(cfg.hidden_dim as u64);
    enc.f64(cfg.dropout);
    enc.f64(cfg.learning_rate);
    enc.u64(cfg.epochs as u64);
    enc.u64(cfg.seed);
    enc.bool(cfg.early_stopping_patience.is_some());
    enc.u64(cfg.early_stopping_patience.unwrap_or(0) as u64);
    enc.u8(kind_tag(c.params.kind));
    enc.u64(c.params.layers.len() as u64);
    for l in &c.params.layers {
        enc.u64(l.weight.nrows() as u64);
        enc.u64(l.weight.ncols() as u64);
        enc.f64s(&l.weight.iter().copied().collect::<Vec<_>>());
        enc.f64s(&l.bias.to_vec());
    }
    let mut out = Vec::new();
    binio::write_container(&mut out, CHECKPOINT_MAGIC, CHECKPOINT_VERSION, &enc.into_bytes())
        .expect("writing to a Vec");
    out
}

fn kind(dec: &mut Decoder<'_>) -> Result<ModelKind, ContainerError> {
    match dec.u8()? {
        0 => Ok(ModelKind::Gcn),
        1 => Ok(ModelKind::Sage),
        t => Err(ContainerError::Malformed(format!("unknown model kind {t}"))),
    }
}

pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<Checkpoint, GnnError> {
    let payload = binio::read_container(bytes, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?;
    let mut dec = Decoder::new(&payload);
    let model_kind = kind(&mut dec)?;
    let num_layers = dec.u64()? as usize;
    let hidden_dim = dec.u64()? as usize;
    let dropout = dec.f64()?;
    let learning_rate = dec.f64()?;
    let epochs = dec.u64()? as usize;
    let seed = dec.u64()?;
    let has_patience = dec.bool()?;
    let patience = dec.u64()? as usize;
    let config = ModelConfig {
        model_kind,
        num_layers,
        hidden_dim,
        dropout,
        learning_rate,
        epochs,
        seed,
        early_stopping_patience: has_patience.then_some(patience),
    };
    let params_kind = kind(&mut dec)?;
    let n = dec.len_prefix(16)?;
    let mut layers = Vec::with_capacity(n);
    for _ in 0..n {
        let rows = dec.u64()? as usize;
        let cols = dec.u64()? as usize;
        let w = dec.f64s()?;
        let b = dec.f64s()?;
        if b.len() != cols {
            return Err(ContainerError::Malformed("bias length".into()).into());
        }
        let weight = Array2::from_shape_vec((rows, cols), w).map_err(|e| ContainerError::Malformed(e.to_string()))?;
        layers.push(Layer { weight, bias: Array1::from(b) });
    }
    dec.finish()?;
    Ok(Checkpoint { config, params: ModelParams { kind: params_kind, layers } })
}

pub fn save_checkpoint(c: &Checkpoint, path: impl AsRef<Path>) -> Result<(), GnnError> {
    let mut w = BufWriter::new(File::create(path).map_err(ContainerError::Io)?);
    w.write_all(&checkpoint_to_bytes(c)).map_err(ContainerError::Io)?;
    w.flush().map_err(ContainerError::Io)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint, GnnError> {
    let mut buf = Vec::new();
    BufReader::new(File::open(path).map_err(ContainerError::Io)?).read_to_end(&mut buf).map_err(ContainerError::Io)?;
    checkpoint_from_bytes(&buf)
}
