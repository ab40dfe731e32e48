//! Human-readable output. JSON mode bypasses all of this.

use std::fmt::Write;

use serde_json::Value;
use variantkg_core::gnn::EpochEvent;
use variantkg_service::api::{EnrichSummary, GraphInfo, TableInfo, TableView, TrainResult};
use variantkg_service::JobRecord;

pub fn job_line(r: &JobRecord) -> String {
    let kind = serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    let state = serde_json::to_value(r.state).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    let mut out = format!("{:<8} {:<7} {:<9}", r.job_id, kind, state);
    if let Some(a) = &r.artifacts {
        for (k, v) in [("table", &a.table_id), ("graph", &a.graph_id), ("checkpoint", &a.checkpoint_id)] {
            if let Some(v) = v {
                let _ = write!(out, " {k}={v}");
            }
        }
    }
    if let Some(e) = &r.error {
        let _ = write!(out, " error={e}");
    }
    out
}

pub fn enrich(s: &EnrichSummary) -> String {
    let mut out = String::new();
    for a in &s.accessions {
        let _ = writeln!(
            out,
            "{:<14} files={:<2} quads_converted={:<8} quads_added={}",
            a.accession,
            a.files.len(),
            a.quads_converted,
            a.quads_added
        );
    }
    let _ = writeln!(out, "total: quads_converted={} quads_added={}", s.quads_converted, s.quads_added);
    let _ = writeln!(
        out,
        "store: {} quads, {} graphs, {} terms",
        s.store.quad_count, s.store.graph_count, s.store.term_count
    );
    for w in &s.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn table_info(t: &TableInfo) -> String {
    format!(
        "table {}: {} rows x {} columns\naccessions: {}\ncolumns: {}\n",
        t.table_id,
        t.rows,
        t.columns.len(),
        t.accessions.join(", "),
        t.columns.join(", ")
    )
}

fn tsv(columns: &[String], rows: &[Vec<Option<String>>]) -> String {
    let mut out = columns.join("\t");
    out.push('\n');
    for r in rows {
        out += &r.iter().map(|c| c.as_deref().unwrap_or("")).collect::<Vec<_>>().join("\t");
        out.push('\n');
    }
    out
}

pub fn table_view(v: &TableView) -> String {
    let mut out = tsv(&v.preview.columns, &v.preview.rows);
    if v.preview.rows.len() < v.preview.total_rows {
        let _ = writeln!(out, "({} of {} rows)", v.preview.rows.len(), v.preview.total_rows);
    }
    out
}

pub fn query(v: &Value) -> String {
    let columns: Vec<String> = serde_json::from_value(v["columns"].clone()).unwrap_or_default();
    let rows: Vec<Vec<Option<String>>> = serde_json::from_value(v["rows"].clone()).unwrap_or_default();
    tsv(&columns, &rows)
}

pub fn graph(g: &GraphInfo) -> String {
    let s = &g.summary;
    let mut out = format!("graph {} (table {})\n", g.graph_id, g.table_id);
    let _ = writeln!(out, "nodes: {}  edges: {}  features: {}", s.num_nodes, s.num_edges, s.num_features);
    let classes: Vec<String> = s.class_names.iter().zip(&s.class_counts).map(|(n, c)| format!("{n}={c}")).collect();
    let _ = writeln!(out, "label: {}  classes: {}", s.label_column, classes.join(" "));
    let _ = writeln!(out, "train/val/test: {}/{}/{}", s.train_nodes, s.val_nodes, s.test_nodes);
    if s.dropped_rows > 0 {
        let _ = writeln!(out, "rows without a label: {}", s.dropped_rows);
    }
    out
}

pub fn epoch(e: &EpochEvent) -> String {
    format!(
        "epoch {:>4}  train_loss {:.4}  val_loss {:.4}  val_acc {:.4}  rss {:.1} MiB",
        e.epoch,
        e.train_loss,
        e.val_loss,
        e.val_acc,
        e.rss_bytes as f64 / (1024.0 * 1024.0)
    )
}

pub fn train(t: &TrainResult) -> String {
    let r = &t.report;
    let mut out = format!("checkpoint {} (graph {})\n", t.checkpoint_id, t.graph_id);
    let _ = writeln!(out, "epochs run: {}{}", r.epochs_run, if r.stopped_early { " (stopped early)" } else { "" });
    if let (Some(tl), Some(vl), Some(va)) = (r.train_loss.last(), r.val_loss.last(), r.val_accuracy.last()) {
        let _ = writeln!(out, "final train_loss {tl:.4}  val_loss {vl:.4}  val_acc {va:.4}");
    }
    let _ = writeln!(out, "wall time: {:.2}s", r.wall_time_secs);
    out
}
