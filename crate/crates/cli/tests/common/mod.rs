//! Scripted pipeline runs shared by the CLI tests and the acceptance suite.
#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use reqwest::blocking::multipart::{Form, Part};
use reqwest::blocking::Client;
use serde_json::{json, Value};
use variantkg_service::{http, Workspace};

use crate::support::cohort::Cohort;

pub const BIN: &str = env!("CARGO_BIN_EXE_variantkg");

pub const FEATURES: [&str; 5] = ["quality", "qd", "ref_genome", "ann_split_1", "phred_score"];

pub fn recipe() -> Value {
    json!({ "feature_columns": ["quality", "qd", "ref_genome"], "label_column": "phred_score", "seed": 3 })
}

pub fn model_config() -> Value {
    json!({ "model_kind": "sage", "epochs": 30, "hidden_dim": 8, "seed": 1 })
}

pub struct CohortFiles {
    pub vcf: Vec<PathBuf>,
    pub cadd: Vec<PathBuf>,
    pub metadata: PathBuf,
}

pub fn write_cohort(cohort: &Cohort, dir: &Path) -> CohortFiles {
    let mut files = CohortFiles { vcf: Vec::new(), cadd: Vec::new(), metadata: dir.join("runs.csv") };
    for a in &cohort.accessions {
        let vcf = dir.join(a.vcf_filename());
        std::fs::write(&vcf, a.vcf_text()).unwrap();
        files.vcf.push(vcf);
        let cadd = dir.join(a.cadd_filename());
        std::fs::write(&cadd, a.cadd_text()).unwrap();
        files.cadd.push(cadd);
    }
    std::fs::write(&files.metadata, cohort.metadata_csv()).unwrap();
    files
}

/// Artifacts and metrics of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub quads_added: u64,
    pub accessions: Vec<String>,
    pub table_id: String,
    pub graph_id: String,
    pub checkpoint_id: String,
    pub test_nodes: u64,
    pub metrics: Value,
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("run variantkg")
}

/// Runs the CLI in JSON mode and decodes standard output; panics on failure.
pub fn cli_json(backend: &[&str], args: &[&str]) -> Value {
    let mut all: Vec<&str> = backend.to_vec();
    all.extend(["--format", "json"]);
    all.extend(args);
    let out = cli(&all);
    assert!(
        out.status.success(),
        "variantkg {all:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{all:?}: {e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn paths(ps: &[PathBuf]) -> Vec<String> {
    ps.iter().map(|p| p.display().to_string()).collect()
}

/// The scripted pipeline through the CLI. `backend` selects local or remote
/// mode; `scratch` receives the recipe and config files.
pub fn run_cli(backend: &[&str], files: &CohortFiles, scratch: &Path) -> Outcome {
    let vcf = paths(&files.vcf);
    let cadd = paths(&files.cadd);
    let metadata = files.metadata.display().to_string();
    let mut args = vec!["enrich", "--vcf"];
    args.extend(vcf.iter().map(String::as_str));
    args.push("--cadd");
    args.extend(cadd.iter().map(String::as_str));
    args.extend(["--metadata", &metadata]);
    let enrich = cli_json(backend, &args);
    assert_eq!(enrich["state"], "succeeded", "{enrich}");

    let accessions: Vec<String> = serde_json::from_value(cli_json(backend, &["accessions"])).unwrap();
    let listed = accessions.join(",");
    let features = FEATURES.join(",");
    let fetch = cli_json(backend, &["fetch", "--accessions", &listed, "--features", &features]);
    let table_id = fetch["artifacts"]["table_id"].as_str().unwrap().to_string();

    let recipe_path = scratch.join("recipe.json");
    std::fs::write(&recipe_path, recipe().to_string()).unwrap();
    let recipe_arg = recipe_path.display().to_string();
    let graph = cli_json(backend, &["graph", "--table", &table_id, "--recipe", &recipe_arg]);
    let graph_id = graph["artifacts"]["graph_id"].as_str().unwrap().to_string();

    let config_path = scratch.join("config.json");
    std::fs::write(&config_path, model_config().to_string()).unwrap();
    let config_arg = config_path.display().to_string();
    let train = cli_json(backend, &["train", "--graph", &graph_id, "--config", &config_arg]);
    let job = train["job_id"].as_str().unwrap().to_string();
    let metrics = cli_json(backend, &["infer", "--job", &job]);

    Outcome {
        quads_added: enrich["result"]["quads_added"].as_u64().unwrap(),
        accessions,
        table_id,
        graph_id,
        checkpoint_id: train["artifacts"]["checkpoint_id"].as_str().unwrap().to_string(),
        test_nodes: graph["result"]["summary"]["test_nodes"].as_u64().unwrap(),
        metrics,
    }
}

/// A service on a fresh workspace, reached over HTTP.
pub struct Service {
    pub dir: tempfile::TempDir,
    pub base: String,
    client: Client,
}

impl Service {
    pub fn start() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path()).unwrap();
        let addr = http::spawn(SocketAddr::from(([127, 0, 0, 1], 0)), ws).unwrap();
        Service { dir, base: format!("http://{addr}"), client: Client::new() }
    }

    fn check(resp: reqwest::blocking::Response) -> Value {
        let status = resp.status();
        let body: Value = resp.json().unwrap();
        assert!(status.is_success(), "HTTP {status}: {body}");
        body
    }

    pub fn get(&self, path: &str) -> Value {
        Self::check(self.client.get(format!("{}{path}", self.base)).send().unwrap())
    }

    pub fn post(&self, path: &str, body: &Value) -> Value {
        Self::check(self.client.post(format!("{}{path}", self.base)).json(body).send().unwrap())
    }

    pub fn wait(&self, job: &Value) -> Value {
        let id = job["job_id"].as_str().unwrap();
        let started = Instant::now();
        loop {
            let rec = self.get(&format!("/jobs/{id}"));
            match rec["state"].as_str() {
                Some("succeeded") => return rec,
                Some("failed") => panic!("{id} failed: {rec}"),
                _ => {}
            }
            assert!(started.elapsed() < Duration::from_secs(120), "{id} did not finish");
            std::thread::sleep(Duration::from_millis(20));
        }
    }

    /// The scripted pipeline through the HTTP API.
    pub fn run(&self, files: &CohortFiles) -> Outcome {
        let part = |p: &PathBuf| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            Part::bytes(std::fs::read(p).unwrap()).file_name(name)
        };
        let mut form = Form::new();
        for p in &files.vcf {
            form = form.part("vcf", part(p));
        }
        for p in &files.cadd {
            form = form.part("cadd", part(p));
        }
        form = form.part("metadata", part(&files.metadata));
        let job = Self::check(self.client.post(format!("{}/enrich", self.base)).multipart(form).send().unwrap());
        let enrich = self.wait(&job);

        let accessions: Vec<String> = serde_json::from_value(self.get("/accessions")).unwrap();
        let fetch = self.wait(&self.post("/fetch", &json!({ "accession_ids": accessions, "feature_names": FEATURES })));
        let table_id = fetch["artifacts"]["table_id"].as_str().unwrap().to_string();
        let graph = self.post("/graphs", &json!({ "table_id": table_id, "recipe": recipe() }));
        let graph_id = graph["artifacts"]["graph_id"].as_str().unwrap().to_string();
        let train = self.wait(&self.post("/train", &json!({ "graph_id": graph_id, "config": model_config() })));
        let job = train["job_id"].as_str().unwrap();
        let metrics = self.get(&format!("/inference/{job}"));

        Outcome {
            quads_added: enrich["result"]["quads_added"].as_u64().unwrap(),
            accessions,
            table_id,
            graph_id,
            checkpoint_id: train["artifacts"]["checkpoint_id"].as_str().unwrap().to_string(),
            test_nodes: graph["result"]["summary"]["test_nodes"].as_u64().unwrap(),
            metrics,
        }
    }
}

/// Every field of a Metrics payload is present and the counts add up.
pub fn check_metrics(m: &Value, test_nodes: u64, classes: usize) {
    let accuracy = m["accuracy"].as_f64().expect("accuracy");
    assert!((0.0..=1.0).contains(&accuracy));
    let per_class = m["per_class"].as_array().expect("per_class");
    assert_eq!(per_class.len(), classes);
    for c in per_class {
        for key in ["class", "name", "precision", "recall", "f1", "support"] {
            assert!(c.get(key).is_some(), "per_class entry without {key}: {c}");
        }
    }
    for avg in ["macro_avg", "weighted_avg"] {
        for key in ["precision", "recall", "f1", "support"] {
            assert!(m[avg].get(key).is_some(), "{avg} without {key}");
        }
        assert_eq!(m[avg]["support"].as_u64(), Some(test_nodes));
    }
    let support: u64 = per_class.iter().map(|c| c["support"].as_u64().unwrap()).sum();
    assert_eq!(support, test_nodes);
    let confusion = m["confusion"].as_array().expect("confusion");
    assert_eq!(confusion.len(), classes);
    let cells: u64 = confusion.iter().flat_map(|r| r.as_array().unwrap()).map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(cells, test_nodes);
    let diagonal: u64 = (0..classes).map(|i| confusion[i][i].as_u64().unwrap()).sum();
    assert!((accuracy - diagonal as f64 / test_nodes as f64).abs() < 1e-12);
}
