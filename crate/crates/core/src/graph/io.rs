use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::binio::{self, ContainerError, Decoder, Encoder};

use super::{Dictionary, GraphError, Masks, MlGraph};

const GRAPH_MAGIC: &[u8; 8] = b"VKGGRAPH";
const GRAPH_VERSION: u32 = 1;

fn put_strs(enc: &mut Encoder, items: impl ExactSizeIterator<Item = impl AsRef<str>>) {
    enc.u64(items.len() as u64);
    for s in items {
        enc.str(s.as_ref());
    }
}

fn get_strs(dec: &mut Decoder<'_>) -> Result<Vec<String>, ContainerError> {
    let n = dec.len_prefix(8)?;
    (0..n).map(|_| dec.str()).collect()
}

fn put_mask(enc: &mut Encoder, m: &[bool]) {
    enc.bytes(&m.iter().map(|&b| b as u8).collect::<Vec<_>>());
}

fn get_mask(dec: &mut Decoder<'_>, n: usize) -> Result<Vec<bool>, ContainerError> {
    let b = dec.bytes()?;
    if b.len() != n || b.iter().any(|&x| x > 1) {
        return Err(ContainerError::Malformed("bad mask".into()));
    }
    Ok(b.into_iter().map(|x| x == 1).collect())
}

pub fn graph_to_bytes(g: &MlGraph) -> Vec<u8> {
    let mut enc = Encoder::new();
    enc.u64(g.num_nodes as u64);
    enc.str(&g.label_column);
    put_strs(&mut enc, g.feature_names.iter());
    enc.f64s(&g.features.iter().copied().collect::<Vec<_>>());
    enc.u64(g.labels.len() as u64);
    for &l in &g.labels {
        enc.u32(l as u32);
    }
    put_strs(&mut enc, g.class_names.iter());
    enc.u64(g.edges.len() as u64);
    for &(s, d) in &g.edges {
        enc.u32(s);
        enc.u32(d);
    }
    enc.f64s(&g.edge_weights);
    put_mask(&mut enc, &g.masks.train);
    put_mask(&mut enc, &g.masks.val);
    put_mask(&mut enc, &g.masks.test);
    enc.u64(g.dictionaries.len() as u64);
    for (col, dict) in &g.dictionaries {
        enc.str(col);
        put_strs(&mut enc, dict.values().collect::<Vec<_>>().iter());
    }
    enc.u64(g.source_rows.len() as u64);
    for &r in &g.source_rows {
        enc.u64(r as u64);
    }
    let mut out = Vec::new();
    binio::write_container(&mut out, GRAPH_MAGIC, GRAPH_VERSION, &enc.into_bytes()).expect("writing to a Vec");
    out
}

pub fn graph_from_bytes(bytes: &[u8]) -> Result<MlGraph, GraphError> {
    let payload = binio::read_container(bytes, GRAPH_MAGIC, GRAPH_VERSION)?;
    let mut dec = Decoder::new(&payload);
    let num_nodes = dec.u64()? as usize;
    let label_column = dec.str()?;
    let feature_names = get_strs(&mut dec)?;
    let cells = dec.f64s()?;
    if cells.len() != num_nodes.saturating_mul(feature_names.len()) {
        return Err(ContainerError::Malformed("feature matrix size".into()).into());
    }
    let features = Array2::from_shape_vec((num_nodes, feature_names.len()), cells)
        .map_err(|e| ContainerError::Malformed(e.to_string()))?;
    let n_labels = dec.len_prefix(4)?;
    let labels = (0..n_labels).map(|_| dec.u32().map(|l| l as usize)).collect::<Result<Vec<_>, _>>()?;
    let class_names = get_strs(&mut dec)?;
    let n_edges = dec.len_prefix(8)?;
    let edges = (0..n_edges).map(|_| Ok((dec.u32()?, dec.u32()?))).collect::<Result<Vec<_>, ContainerError>>()?;
    let edge_weights = dec.f64s()?;
    let masks = Masks {
        train: get_mask(&mut dec, num_nodes)?,
        val: get_mask(&mut dec, num_nodes)?,
        test: get_mask(&mut dec, num_nodes)?,
    };
    let n_dicts = dec.len_prefix(8)?;
    let mut dictionaries = Vec::with_capacity(n_dicts);
    for _ in 0..n_dicts {
        let col = dec.str()?;
        let values = get_strs(&mut dec)?;
        dictionaries.push((col, values.into_iter().collect::<Dictionary>()));
    }
    let n_rows = dec.len_prefix(8)?;
    let source_rows = (0..n_rows).map(|_| dec.u64().map(|r| r as usize)).collect::<Result<Vec<_>, _>>()?;
    dec.finish()?;
    let g = MlGraph {
        num_nodes,
        feature_names,
        features,
        labels,
        label_column,
        class_names,
        edges,
        edge_weights,
        masks,
        dictionaries,
        source_rows,
    };
    g.validate().map_err(ContainerError::Malformed)?;
    Ok(g)
}

pub fn export_graph(g: &MlGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let mut w = BufWriter::new(File::create(path).map_err(ContainerError::Io)?);
    w.write_all(&graph_to_bytes(g)).map_err(ContainerError::Io)?;
    w.flush().map_err(ContainerError::Io)?;
    Ok(())
}

pub fn import_graph(path: impl AsRef<Path>) -> Result<MlGraph, GraphError> {
    let mut buf = Vec::new();
    BufReader::new(File::open(path).map_err(ContainerError::Io)?).read_to_end(&mut buf).map_err(ContainerError::Io)?;
    graph_from_bytes(&buf)
}
