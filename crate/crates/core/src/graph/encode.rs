use ndarray::Array2;

use crate::rdf::Term;
use crate::sparql::ResultTable;

use super::{ClassBinning, Dictionary, GraphError, GraphRecipe};

/// Feature code for an unbound categorical cell.
pub const NULL_CATEGORY: f64 = -1.0;

pub struct EncodedFeatures {
    pub feature_names: Vec<String>,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub dictionaries: Vec<(String, Dictionary)>,
    /// Table row of each node; rows without a label get no node.
    pub source_rows: Vec<usize>,
}

fn numeric(t: &Term) -> Option<f64> {
    let l = t.as_literal()?;
    if l.is_numeric() {
        l.as_f64().filter(|v| v.is_finite())
    } else {
        None
    }
}

fn is_numeric_column<'a>(cells: impl Iterator<Item = Option<&'a Term>>) -> bool {
    let mut any = false;
    for t in cells.flatten() {
        if numeric(t).is_none() {
            return false;
        }
        any = true;
    }
    any
}

fn column(table: &ResultTable, name: &str) -> Result<usize, GraphError> {
    table.column_index(name).ok_or_else(|| GraphError::UnknownColumn(name.to_string()))
}

/// Encodes the recipe's feature and label columns.
///
/// Numeric columns pass through, with a `<col>__present` indicator when any
/// cell is unbound. Other columns are dictionary-encoded in first-seen order
/// with [`NULL_CATEGORY`] for unbound cells.
pub fn encode_features(table: &ResultTable, recipe: &GraphRecipe) -> Result<EncodedFeatures, GraphError> {
    let feature_idx = recipe.feature_columns.iter().map(|c| column(table, c)).collect::<Result<Vec<_>, _>>()?;
    let label_idx = column(table, &recipe.label_column)?;

    let source_rows: Vec<usize> = (0..table.len()).filter(|&r| table.rows[r][label_idx].is_some()).collect();
    if source_rows.is_empty() {
        return Err(GraphError::Recipe(format!("label column '{}' is entirely null", recipe.label_column)));
    }
    let label_cells = || source_rows.iter().map(|&r| table.rows[r][label_idx].as_ref());

    let binning = match &recipe.label_binning {
        Some(b) => Some(b.clone()),
        None if is_numeric_column(label_cells()) => Some(ClassBinning::default()),
        None => None,
    };
    let (labels, class_names) = match binning {
        Some(b) => {
            b.validate()?;
            let labels = label_cells()
                .map(|t| {
                    let t = t.expect("labelled row");
                    let v = numeric(t)
                        .ok_or_else(|| GraphError::Recipe(format!("label value '{}' is not numeric", t.value())))?;
                    b.class_of(v)
                        .ok_or_else(|| GraphError::Recipe(format!("label value {v} lies below the first bin boundary")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (labels, b.class_names())
        }
        None => {
            let mut dict = Dictionary::default();
            let labels = label_cells().map(|t| dict.encode(t.expect("labelled row").value())).collect();
            (labels, dict.values().map(str::to_string).collect())
        }
    };
    let mut observed = labels.clone();
    observed.sort_unstable();
    observed.dedup();
    if observed.len() < 2 {
        return Err(GraphError::Recipe(format!(
            "label column '{}' yields {} class(es); at least 2 are needed",
            recipe.label_column,
            observed.len()
        )));
    }

    let n = source_rows.len();
    let mut feature_names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut dictionaries = Vec::new();
    for (name, &ci) in recipe.feature_columns.iter().zip(&feature_idx) {
        let cells = || source_rows.iter().map(|&r| table.rows[r][ci].as_ref());
        if is_numeric_column(cells()) {
            feature_names.push(name.clone());
            cols.push(cells().map(|t| t.and_then(numeric).unwrap_or(0.0)).collect());
            if cells().any(|t| t.is_none()) {
                feature_names.push(format!("{name}__present"));
                cols.push(cells().map(|t| if t.is_some() { 1.0 } else { 0.0 }).collect());
            }
        } else {
            let mut dict = Dictionary::default();
            let codes = cells().map(|t| t.map_or(NULL_CATEGORY, |t| dict.encode(t.value()) as f64)).collect();
            feature_names.push(name.clone());
            cols.push(codes);
            dictionaries.push((name.clone(), dict));
        }
    }
    let mut features = Array2::zeros((n, cols.len()));
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            features[[i, j]] = v;
        }
    }
    Ok(EncodedFeatures { feature_names, features, labels, class_names, dictionaries, source_rows })
}
