//! Directory-backed engine behind both the HTTP service and the CLI's local
//! mode.
//!
//! Layout under the root:
//!
//! ```text
//! store.snap              quad-store snapshot, rewritten after every load
//! tables/<id>.tbl|.json   cached feature tables and their descriptions
//! graphs/<id>.graph|.json ML graphs and their summaries
//! models/<id>.ckpt|.json  checkpoints and training reports
//! jobs/job-N.json         job records; train jobs also keep job-N.telemetry.json
//! ```
//!
//! Artifact ids are content hashes, so the same inputs give the same ids in
//! any workspace.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use regex::Regex;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use variantkg_core::convert::{vocab, MetadataPredicates};
use variantkg_core::gnn::{
    checkpoint_from_bytes, checkpoint_to_bytes, evaluate, train, Checkpoint, EpochEvent, Metrics,
};
use variantkg_core::graph::{assemble_graph, graph_from_bytes, graph_to_bytes, MlGraph};
use variantkg_core::pipeline::{
    accession_from_name, convert_cadd, convert_metadata, convert_vcf, gunzip_if_needed, DEFAULT_ACCESSION_PATTERN,
};
use variantkg_core::rdf::{Quad, Term};
use variantkg_core::sparql::feature::{age_filter_query, feature_columns, feature_query, KEY_COLUMNS};
use variantkg_core::sparql::{query, ResultTable};
use variantkg_core::store::{QuadStore, StoreStats};

use crate::api::*;
use crate::error::WsError;
use crate::jobs::{job_number, Artifacts, JobKind, JobRecord, JobState};

const SNAPSHOT: &str = "store.snap";

/// One uploaded file.
#[derive(Debug, Clone)]
pub struct Upload {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Upload {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Upload { name: name.into(), bytes: bytes.into() }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Upload { name, bytes: fs::read(path)? })
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnrichRequest {
    pub vcf: Vec<Upload>,
    pub cadd: Vec<Upload>,
    pub metadata: Vec<Upload>,
    pub options: EnrichOptions,
}

/// How a submitted job runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    /// On the calling thread; the returned record is terminal.
    Inline,
    /// On a worker thread; the returned record is still queued.
    Background,
}

/// Lowercase hex of the first 128 bits of SHA-256.
pub fn content_id(bytes: &[u8]) -> String {
    Sha256::digest(bytes)[..16].iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), WsError> {
    let text = serde_json::to_vec_pretty(v).map_err(WsError::internal)?;
    Ok(write_atomic(path, &text)?)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, WsError> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| WsError::Internal(format!("{}: {e}", path.display())))
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

struct JobTable {
    records: BTreeMap<u64, JobRecord>,
    next: u64,
}

struct PreparedEnrich {
    vcf: Vec<(Upload, String)>,
    cadd: Vec<(Upload, String)>,
    metadata: Vec<Upload>,
    options: EnrichOptions,
}

pub struct Workspace {
    root: PathBuf,
    store: RwLock<QuadStore>,
    /// Serializes store writers, including the snapshot that follows a load.
    writer: Mutex<()>,
    jobs: Mutex<JobTable>,
    telemetry: Mutex<HashMap<String, Vec<EpochEvent>>>,
}

impl Workspace {
    /// Opens or creates a workspace. Jobs left unfinished by an earlier
    /// process are marked failed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Arc<Self>, WsError> {
        let root = root.into();
        for dir in ["tables", "graphs", "models", "jobs"] {
            fs::create_dir_all(root.join(dir))?;
        }
        let snap = root.join(SNAPSHOT);
        let store = if snap.exists() {
            QuadStore::open(&snap).map_err(|e| WsError::Internal(format!("{}: {e}", snap.display())))?
        } else {
            QuadStore::new()
        };
        let mut records = BTreeMap::new();
        for entry in fs::read_dir(root.join("jobs"))? {
            let path = entry?.path();
            let Some(n) =
                path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(".json")).and_then(job_number)
            else {
                continue;
            };
            let mut rec: JobRecord = read_json(&path)?;
            if !rec.state.is_terminal() {
                rec.fail("interrupted before completion");
                write_json(&path, &rec)?;
            }
            records.insert(n, rec);
        }
        let next = records.keys().next_back().map_or(1, |n| n + 1);
        Ok(Arc::new(Workspace {
            root,
            store: RwLock::new(store),
            writer: Mutex::new(()),
            jobs: Mutex::new(JobTable { records, next }),
            telemetry: Mutex::new(HashMap::new()),
        }))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stats(&self) -> StoreStats {
        self.store.read().unwrap().stats()
    }

    // ---- jobs ----

    fn job_path(&self, id: &str) -> PathBuf {
        self.root.join("jobs").join(format!("{id}.json"))
    }

    fn create_job(&self, kind: JobKind) -> Result<JobRecord, WsError> {
        let mut jobs = self.jobs.lock().unwrap();
        let n = jobs.next;
        jobs.next += 1;
        let rec = JobRecord::new(format!("job-{n}"), kind);
        write_json(&self.job_path(&rec.job_id), &rec)?;
        jobs.records.insert(n, rec.clone());
        Ok(rec)
    }

    fn update_job(&self, id: &str, f: impl FnOnce(&mut JobRecord)) -> JobRecord {
        let n = job_number(id).expect("job id");
        let mut jobs = self.jobs.lock().unwrap();
        let rec = jobs.records.get_mut(&n).expect("known job");
        let before = rec.state;
        f(rec);
        if rec.state != before {
            // A failed write only loses persistence, not the in-memory record.
            let _ = write_json(&self.job_path(id), rec);
        }
        rec.clone()
    }

    pub fn job(&self, id: &str) -> Result<JobRecord, WsError> {
        let not_found = || WsError::NotFound { what: "job", id: id.to_string() };
        let n = job_number(id).ok_or_else(not_found)?;
        self.jobs.lock().unwrap().records.get(&n).cloned().ok_or_else(not_found)
    }

    pub fn jobs(&self) -> Vec<JobRecord> {
        self.jobs.lock().unwrap().records.values().cloned().collect()
    }

    fn run_job<T: Serialize>(
        &self,
        id: &str,
        work: impl FnOnce(&Self, &str) -> Result<(Artifacts, T), WsError>,
    ) -> JobRecord {
        self.update_job(id, |j| {
            j.start();
        });
        match work(self, id) {
            Ok((artifacts, result)) => match serde_json::to_value(result) {
                Ok(v) => self.update_job(id, |j| {
                    j.succeed(artifacts, v);
                }),
                Err(e) => self.update_job(id, |j| {
                    j.fail(e.to_string());
                }),
            },
            Err(e) => self.update_job(id, |j| {
                j.fail(e.to_api().to_string());
            }),
        }
    }

    fn dispatch<T: Serialize + 'static>(
        self: &Arc<Self>,
        kind: JobKind,
        exec: Exec,
        work: impl FnOnce(&Self, &str) -> Result<(Artifacts, T), WsError> + Send + 'static,
    ) -> Result<JobRecord, WsError> {
        let job = self.create_job(kind)?;
        match exec {
            Exec::Inline => Ok(self.run_job(&job.job_id, work)),
            Exec::Background => {
                let ws = Arc::clone(self);
                let id = job.job_id.clone();
                std::thread::spawn(move || {
                    ws.run_job(&id, work);
                });
                Ok(job)
            }
        }
    }

    // ---- enrichment ----

    fn prepare_enrich(&self, req: EnrichRequest) -> Result<PreparedEnrich, WsError> {
        if req.vcf.is_empty() && req.cadd.is_empty() && req.metadata.is_empty() {
            return Err(WsError::bad("no_files", "the upload contains no files"));
        }
        if req.vcf.is_empty() {
            return Err(WsError::bad("no_vcf", "at least one VCF file is required"));
        }
        let pattern = req.options.accession_pattern.as_deref().unwrap_or(DEFAULT_ACCESSION_PATTERN);
        let re = Regex::new(pattern).map_err(|e| WsError::bad("bad_pattern", format!("accession pattern: {e}")))?;
        let map = &req.options.accession_map;
        let mut missing = Vec::new();
        let mut resolve = |files: Vec<Upload>| -> Vec<(Upload, String)> {
            files
                .into_iter()
                .filter_map(|f| match map.get(&f.name).cloned().or_else(|| accession_from_name(&f.name, &re)) {
                    Some(acc) => Some((f, acc)),
                    None => {
                        missing.push(f.name);
                        None
                    }
                })
                .collect()
        };
        let vcf = resolve(req.vcf);
        let cadd = resolve(req.cadd);
        if !missing.is_empty() {
            return Err(WsError::BadRequest {
                code: "no_accession",
                message: format!("no accession in file name (pattern {pattern})"),
                details: Some(serde_json::json!({ "files": missing })),
            });
        }
        Ok(PreparedEnrich { vcf, cadd, metadata: req.metadata, options: req.options })
    }

    fn run_enrich(&self, job: &str, p: PreparedEnrich) -> Result<(Artifacts, EnrichSummary), WsError> {
        let mut per_acc: BTreeMap<String, (Vec<String>, Vec<Quad>)> = BTreeMap::new();
        let mut failures = Vec::new();
        let mut warnings = Vec::new();
        let total = (p.vcf.len() + p.cadd.len() + p.metadata.len()) as f64;
        let mut done = 0.0;
        let mut step = |ws: &Self| {
            done += 1.0;
            ws.update_job(job, |j| j.set_progress(0.9 * done / total));
        };
        for (kind, files) in [("vcf", &p.vcf), ("cadd", &p.cadd)] {
            for (f, acc) in files {
                let converted = gunzip_if_needed(&f.bytes).map_err(|e| e.to_string()).and_then(|bytes| {
                    let r = if kind == "vcf" {
                        convert_vcf(&bytes[..], &f.name, acc, &p.options.vcf)
                    } else {
                        convert_cadd(&bytes[..], &f.name, acc)
                    };
                    r.map_err(|e| e.to_string())
                });
                match converted {
                    Ok(quads) => {
                        let slot = per_acc.entry(acc.clone()).or_default();
                        slot.0.push(f.name.clone());
                        slot.1.extend(quads);
                    }
                    Err(message) => failures.push(serde_json::json!({ "file": f.name, "error": message })),
                }
                step(self);
            }
        }
        for f in &p.metadata {
            let converted = gunzip_if_needed(&f.bytes).map_err(|e| e.to_string()).and_then(|bytes| {
                convert_metadata(&bytes[..], &f.name, &p.options.metadata, &MetadataPredicates::default())
                    .map_err(|e| e.to_string())
            });
            match converted {
                Ok((quads, warns)) => {
                    warnings.extend(warns.iter().map(|w| format!("{}: line {}: {}", f.name, w.line, w.message)));
                    let mut by_acc: BTreeMap<String, Vec<Quad>> = BTreeMap::new();
                    for q in quads {
                        let acc = q
                            .graph
                            .named()
                            .and_then(|g| vocab::accession_of_graph(g.as_str()))
                            .unwrap_or("")
                            .to_string();
                        by_acc.entry(acc).or_default().push(q);
                    }
                    for (acc, quads) in by_acc {
                        let slot = per_acc.entry(acc).or_default();
                        if !slot.0.contains(&f.name) {
                            slot.0.push(f.name.clone());
                        }
                        slot.1.extend(quads);
                    }
                }
                Err(message) => failures.push(serde_json::json!({ "file": f.name, "error": message })),
            }
            step(self);
        }
        if !failures.is_empty() {
            return Err(WsError::BadRequest {
                code: "conversion_failed",
                message: format!("{} file(s) could not be converted", failures.len()),
                details: Some(serde_json::Value::Array(failures)),
            });
        }

        let _writer = self.writer.lock().unwrap();
        let mut accessions = Vec::new();
        let (mut converted, mut added) = (0, 0);
        let stats = {
            let mut store = self.store.write().unwrap();
            for (acc, (files, quads)) in per_acc {
                let before = store.len();
                let n = quads.len();
                store.bulk_load(quads).map_err(WsError::internal)?;
                let gained = store.len() - before;
                converted += n;
                added += gained;
                accessions.push(AccessionLoad { accession: acc, files, quads_converted: n, quads_added: gained });
            }
            store.stats()
        };
        {
            let store = self.store.read().unwrap();
            let snap = self.root.join(SNAPSHOT);
            let tmp = snap.with_extension("tmp");
            store.snapshot(&tmp).map_err(WsError::internal)?;
            fs::rename(tmp, snap)?;
        }
        Ok((
            Artifacts::default(),
            EnrichSummary { accessions, quads_converted: converted, quads_added: added, store: stats, warnings },
        ))
    }

    /// Validates the upload, then converts and loads it as an `enrich` job.
    /// A malformed file fails the whole job and nothing is loaded.
    pub fn submit_enrich(self: &Arc<Self>, req: EnrichRequest, exec: Exec) -> Result<JobRecord, WsError> {
        let prepared = self.prepare_enrich(req)?;
        self.dispatch(JobKind::Enrich, exec, move |ws, id| ws.run_enrich(id, prepared))
    }

    // ---- browsing ----

    /// Accessions with a named graph, optionally restricted to an age range.
    pub fn accessions(&self, q: AccessionQuery) -> Result<Vec<String>, WsError> {
        if let (Some(lo), Some(hi)) = (q.min_age, q.max_age) {
            if lo > hi {
                return Err(WsError::bad("bad_age_range", format!("min_age {lo} exceeds max_age {hi}")));
            }
        }
        let store = self.store.read().unwrap();
        let graphs: Vec<String> = if q.min_age.is_none() && q.max_age.is_none() {
            store.list_graphs().iter().map(|g| g.as_str().to_string()).collect()
        } else {
            let t = query(&age_filter_query(q.min_age, q.max_age), &store).map_err(WsError::internal)?;
            t.rows.iter().filter_map(|r| r[0].as_ref().map(|g| g.value().to_string())).collect()
        };
        Ok(graphs.iter().filter_map(|g| vocab::accession_of_graph(g)).map(str::to_string).collect())
    }

    /// Features the fetch step can return besides the key columns.
    pub fn feature_names() -> Vec<String> {
        feature_columns().into_iter().filter(|c| !KEY_COLUMNS.contains(&c.as_str())).collect()
    }

    fn check_fetch(&self, req: &FetchRequest) -> Result<(), WsError> {
        if let Some(names) = &req.feature_names {
            let valid = Self::feature_names();
            let unknown: Vec<&String> = names.iter().filter(|n| !valid.contains(n)).collect();
            if !unknown.is_empty() {
                return Err(WsError::BadRequest {
                    code: "unknown_feature",
                    message: format!(
                        "unknown feature name(s): {}",
                        unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                    ),
                    details: Some(serde_json::json!({ "unknown": unknown, "valid": valid })),
                });
            }
        }
        match (&req.accession_ids, &req.age_range) {
            (Some(ids), _) if ids.is_empty() => Err(WsError::bad("no_accessions", "accession_ids is empty")),
            (None, None) => Err(WsError::bad("no_accessions", "give accession_ids or age_range")),
            (_, Some(r)) => match (r.min, r.max) {
                (Some(lo), Some(hi)) if lo > hi => {
                    Err(WsError::bad("bad_age_range", format!("min age {lo} exceeds max age {hi}")))
                }
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Runs the feature query synchronously and caches the table.
    pub fn fetch(&self, req: &FetchRequest) -> Result<TableInfo, WsError> {
        self.check_fetch(req)?;
        let mut ids: Vec<String> = match &req.accession_ids {
            Some(ids) => ids.clone(),
            None => self.accessions(AccessionQuery::default())?,
        };
        if let Some(r) = req.age_range {
            let in_range = self.accessions(AccessionQuery { min_age: r.min, max_age: r.max })?;
            ids.retain(|a| in_range.contains(a));
        }
        ids.dedup();
        if ids.is_empty() {
            return Err(WsError::bad("no_accessions", "no accession matches the request"));
        }
        if let Some(bad) = ids.iter().find(|a| vocab::graph_iri(a).is_none() || a.contains(['>', ' '])) {
            return Err(WsError::bad("bad_accession", format!("invalid accession id '{bad}'")));
        }
        let mut table = {
            let store = self.store.read().unwrap();
            query(&feature_query(&ids), &store).map_err(WsError::internal)?
        };
        if let Some(names) = &req.feature_names {
            let mut keep: Vec<String> = KEY_COLUMNS.iter().map(|s| s.to_string()).collect();
            for n in names {
                if !keep.contains(n) {
                    keep.push(n.clone());
                }
            }
            table = table.select_columns(&keep).map_err(|c| WsError::bad("unknown_feature", c))?;
        }
        let bytes = table.to_bytes();
        let id = content_id(&bytes);
        write_atomic(&self.table_path(&id, "tbl"), &bytes)?;
        let info =
            TableInfo { table_id: id.clone(), accessions: ids, columns: table.columns.clone(), rows: table.len() };
        write_json(&self.table_path(&id, "json"), &info)?;
        Ok(info)
    }

    pub fn submit_fetch(self: &Arc<Self>, req: FetchRequest, exec: Exec) -> Result<JobRecord, WsError> {
        self.check_fetch(&req)?;
        self.dispatch(JobKind::Fetch, exec, move |ws, _| {
            let info = ws.fetch(&req)?;
            Ok((Artifacts { table_id: Some(info.table_id.clone()), ..Default::default() }, info))
        })
    }

    fn table_path(&self, id: &str, ext: &str) -> PathBuf {
        self.root.join("tables").join(format!("{id}.{ext}"))
    }

    pub fn table_info(&self, id: &str) -> Result<TableInfo, WsError> {
        let path = self.table_path(id, "json");
        if !valid_id(id) || !path.exists() {
            return Err(WsError::NotFound { what: "table", id: id.to_string() });
        }
        read_json(&path)
    }

    pub fn table(&self, id: &str) -> Result<ResultTable, WsError> {
        self.table_info(id)?;
        ResultTable::load(self.table_path(id, "tbl")).map_err(WsError::internal)
    }

    /// Runs an arbitrary query against the store.
    pub fn query(&self, text: &str) -> Result<ResultTable, WsError> {
        let store = self.store.read().unwrap();
        query(text, &store).map_err(|e| WsError::bad("bad_query", e.to_string()))
    }

    // ---- graphs ----

    fn graph_path(&self, id: &str, ext: &str) -> PathBuf {
        self.root.join("graphs").join(format!("{id}.{ext}"))
    }

    /// Builds and stores a graph from a cached table.
    pub fn build_graph(&self, req: &GraphRequest) -> Result<GraphInfo, WsError> {
        let table = self.table(&req.table_id)?;
        let (graph, summary) =
            assemble_graph(&table, &req.recipe).map_err(|e| WsError::bad("invalid_recipe", e.to_string()))?;
        let bytes = graph_to_bytes(&graph);
        let id = content_id(&bytes);
        write_atomic(&self.graph_path(&id, "graph"), &bytes)?;
        let info =
            GraphInfo { graph_id: id.clone(), table_id: req.table_id.clone(), recipe: req.recipe.clone(), summary };
        write_json(&self.graph_path(&id, "json"), &info)?;
        Ok(info)
    }

    /// Graph construction is quick, so it always runs inline; recipe errors
    /// surface as request errors rather than failed jobs.
    pub fn submit_build(self: &Arc<Self>, req: GraphRequest) -> Result<JobRecord, WsError> {
        let info = self.build_graph(&req)?;
        self.dispatch(JobKind::Build, Exec::Inline, move |_, _| {
            let artifacts = Artifacts {
                table_id: Some(info.table_id.clone()),
                graph_id: Some(info.graph_id.clone()),
                ..Default::default()
            };
            Ok((artifacts, info))
        })
    }

    pub fn graph_info(&self, id: &str) -> Result<GraphInfo, WsError> {
        let path = self.graph_path(id, "json");
        if !valid_id(id) || !path.exists() {
            return Err(WsError::NotFound { what: "graph", id: id.to_string() });
        }
        read_json(&path)
    }

    pub fn graph_bytes(&self, id: &str) -> Result<Vec<u8>, WsError> {
        self.graph_info(id)?;
        Ok(fs::read(self.graph_path(id, "graph"))?)
    }

    pub fn graph(&self, id: &str) -> Result<MlGraph, WsError> {
        graph_from_bytes(&self.graph_bytes(id)?).map_err(WsError::internal)
    }

    pub fn graphs(&self) -> Result<Vec<GraphInfo>, WsError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("graphs"))? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                out.push(read_json::<GraphInfo>(&path)?);
            }
        }
        out.sort_by(|a, b| a.graph_id.cmp(&b.graph_id));
        Ok(out)
    }

    // ---- training ----

    fn model_path(&self, id: &str, ext: &str) -> PathBuf {
        self.root.join("models").join(format!("{id}.{ext}"))
    }

    fn run_train(&self, job: &str, req: &TrainRequest) -> Result<(Artifacts, TrainResult), WsError> {
        let graph = self.graph(&req.graph_id)?;
        let epochs = req.config.epochs.max(1) as f64;
        self.telemetry.lock().unwrap().insert(job.to_string(), Vec::new());
        let mut sink = |e: &EpochEvent| {
            self.telemetry.lock().unwrap().entry(job.to_string()).or_default().push(e.clone());
            self.update_job(job, |j| j.set_progress(e.epoch as f64 / epochs));
        };
        let outcome = train(&graph, &req.config, &mut sink);
        let events = self.telemetry.lock().unwrap().get(job).cloned().unwrap_or_default();
        write_json(&self.root.join("jobs").join(format!("{job}.telemetry.json")), &events)?;
        let outcome = outcome.map_err(|e| WsError::bad("training_failed", e.to_string()))?;
        let bytes = checkpoint_to_bytes(&Checkpoint { config: req.config.clone(), params: outcome.params });
        let id = content_id(&bytes);
        write_atomic(&self.model_path(&id, "ckpt"), &bytes)?;
        let result = TrainResult { graph_id: req.graph_id.clone(), checkpoint_id: id.clone(), report: outcome.report };
        write_json(&self.model_path(&id, "json"), &result)?;
        let artifacts =
            Artifacts { graph_id: Some(req.graph_id.clone()), checkpoint_id: Some(id), ..Default::default() };
        Ok((artifacts, result))
    }

    /// Checks the config and graph, then trains as a `train` job.
    pub fn submit_train(self: &Arc<Self>, req: TrainRequest, exec: Exec) -> Result<JobRecord, WsError> {
        req.config.validate().map_err(|e| WsError::bad("invalid_config", e.to_string()))?;
        self.graph_info(&req.graph_id)?;
        self.dispatch(JobKind::Train, exec, move |ws, id| ws.run_train(id, &req))
    }

    fn train_job(&self, id: &str) -> Result<JobRecord, WsError> {
        let job = self.job(id)?;
        if job.kind != JobKind::Train {
            return Err(WsError::bad("wrong_job_kind", format!("{id} is not a training job")));
        }
        Ok(job)
    }

    /// Epoch events from `offset` on, in epoch order.
    pub fn telemetry(&self, id: &str, offset: usize) -> Result<TelemetryPage, WsError> {
        let job = self.train_job(id)?;
        let events = match self.telemetry.lock().unwrap().get(id) {
            Some(ev) => ev.get(offset..).map(<[_]>::to_vec).unwrap_or_default(),
            None => {
                let path = self.root.join("jobs").join(format!("{id}.telemetry.json"));
                let all: Vec<EpochEvent> = if path.exists() { read_json(&path)? } else { Vec::new() };
                all.get(offset..).map(<[_]>::to_vec).unwrap_or_default()
            }
        };
        let next_offset = offset + events.len();
        Ok(TelemetryPage { job_id: id.to_string(), state: job.state, events, next_offset })
    }

    fn succeeded_train(&self, id: &str) -> Result<TrainResult, WsError> {
        let job = self.train_job(id)?;
        if job.state != JobState::Succeeded {
            return Err(WsError::Conflict {
                code: "job_not_succeeded",
                message: format!("{id} is {:?}", job.state).to_lowercase(),
            });
        }
        serde_json::from_value(job.result.unwrap_or_default()).map_err(WsError::internal)
    }

    pub fn report(&self, id: &str) -> Result<TrainResult, WsError> {
        self.succeeded_train(id)
    }

    /// Test-mask metrics of a finished training job's checkpoint.
    pub fn infer(&self, id: &str) -> Result<Metrics, WsError> {
        let result = self.succeeded_train(id)?;
        let bytes = fs::read(self.model_path(&result.checkpoint_id, "ckpt"))?;
        let ck = checkpoint_from_bytes(&bytes).map_err(WsError::internal)?;
        let graph = self.graph(&result.graph_id)?;
        evaluate(&ck.params, &graph, &graph.masks.test).map_err(|e| WsError::bad("inference_failed", e.to_string()))
    }
}

/// Plain cell values of a table, for JSON output.
pub fn plain_rows(t: &ResultTable) -> Vec<Vec<Option<String>>> {
    t.rows.iter().map(|r| r.iter().map(|c| c.as_ref().map(Term::value).map(str::to_string)).collect()).collect()
}
