//! `variantkg`: enrich the variant knowledge graph, fetch feature tables,
//! build graphs and train node classifiers from the command line.
//!
//! Commands run against a local workspace directory (`--workspace`, or
//! `$VARIANTKG_WORKSPACE`, or `./variantkg-workspace`) or against a running
//! service (`--url`). Exit codes: 0 on success, 1 when a request or job
//! fails, 2 on usage errors.

mod backend;
mod config;
mod convert;
mod render;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use variantkg_core::pipeline::DEFAULT_ACCESSION_PATTERN;
use variantkg_service::api::{AccessionQuery, AgeRange, EnrichOptions, FetchRequest, GraphRequest, TrainRequest};
use variantkg_service::{ApiError, EnrichRequest, JobRecord, JobState, Upload, Workspace};

use backend::{client_error, Backend, Local, Remote, Res};

const WORKSPACE_ENV: &str = "VARIANTKG_WORKSPACE";

#[derive(Parser)]
#[command(name = "variantkg", version, about = "Variant knowledge-graph workbench")]
#[command(after_help = "Exit status: 0 on success, 1 if a request or job fails, 2 on usage errors.")]
struct Cli {
    /// Local workspace directory [default: $VARIANTKG_WORKSPACE or ./variantkg-workspace]
    #[arg(long, global = true, value_name = "DIR")]
    workspace: Option<PathBuf>,
    /// Base URL of a running service; replaces the local workspace
    #[arg(long, global = true, value_name = "URL", conflicts_with = "workspace")]
    url: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Upload VCF, CADD and run-table files into the knowledge graph
    Enrich(EnrichArgs),
    /// List loaded accessions, optionally by patient age
    Accessions {
        #[arg(long)]
        min_age: Option<f64>,
        #[arg(long)]
        max_age: Option<f64>,
    },
    /// List the feature columns a fetch can select
    Features,
    /// Run the feature query and store the result table
    Fetch(FetchArgs),
    /// Show a stored table
    Table {
        id: String,
        #[arg(long, default_value_t = 20)]
        limit: usize,
        /// Print the whole table as CSV
        #[arg(long)]
        csv: bool,
    },
    /// Run a SPARQL query against the store
    Query {
        /// Query text; `-` reads standard input
        #[arg(required_unless_present = "file")]
        text: Option<String>,
        #[arg(long, conflicts_with = "text")]
        file: Option<PathBuf>,
    },
    /// Build a graph from a table
    Graph(GraphArgs),
    /// List built graphs
    Graphs,
    /// Train a GCN or GraphSAGE model on a graph
    Train(TrainArgs),
    /// Show the report of a finished training job
    Report {
        #[arg(long)]
        job: String,
    },
    /// Evaluate a trained model on its graph's test nodes
    Infer {
        #[arg(long)]
        job: String,
    },
    /// Show one job
    Job { id: String },
    /// List jobs
    Jobs,
    /// Convert files to N-Quads or Turtle without touching a workspace
    Convert(ConvertArgs),
    /// Serve the HTTP API over the local workspace
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("inputs").required(true).multiple(true).args(["vcf", "cadd", "metadata"])))]
struct EnrichArgs {
    /// Annotated VCF files (plain or gzip)
    #[arg(long, num_args = 1..)]
    vcf: Vec<PathBuf>,
    /// CADD score tables
    #[arg(long, num_args = 1..)]
    cadd: Vec<PathBuf>,
    /// Run-table CSV files with patient metadata
    #[arg(long, num_args = 1..)]
    metadata: Vec<PathBuf>,
    /// JSON file with enrichment options; flags below override it
    #[arg(long)]
    options: Option<PathBuf>,
    /// Regex whose first match in a file name is the accession
    #[arg(long)]
    accession_pattern: Option<String>,
    /// Bind a file name to an accession, as NAME=ACCESSION
    #[arg(long = "map", value_parser = parse_binding)]
    map: Vec<(String, String)>,
    /// The run tables start with a header row
    #[arg(long)]
    metadata_header: bool,
    /// Also load the first sample's FORMAT values
    #[arg(long)]
    emit_format: bool,
}

#[derive(Args)]
struct FetchArgs {
    /// Comma-separated accession ids
    #[arg(long, value_delimiter = ',')]
    accessions: Option<Vec<String>>,
    #[arg(long)]
    min_age: Option<f64>,
    #[arg(long)]
    max_age: Option<f64>,
    /// Comma-separated feature columns; all when omitted
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EdgePolicyArg {
    GeneName,
    FullyConnected,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    table: String,
    /// JSON recipe file; flags below override it
    #[arg(long)]
    recipe: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<String>>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, value_enum)]
    edge_policy: Option<EdgePolicyArg>,
    /// Keep one edge per node pair instead of both directions
    #[arg(long)]
    directed: bool,
    /// Training share in percent
    #[arg(long)]
    train: Option<u32>,
    /// Validation share in percent; test gets the remainder
    #[arg(long)]
    val: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gene_column: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelArg {
    Gcn,
    Sage,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    graph: String,
    /// JSON model config file; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop after this many epochs without validation improvement
    #[arg(long)]
    patience: Option<usize>,
    /// Do not print per-epoch telemetry
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(value_enum)]
    kind: convert::Kind,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = convert::Syntax::Nq)]
    to: convert::Syntax,
    /// Output file; standard output when omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Accession for every input instead of the one in its file name
    #[arg(long)]
    accession: Option<String>,
    #[arg(long, default_value = DEFAULT_ACCESSION_PATTERN)]
    accession_pattern: String,
    #[arg(long)]
    metadata_header: bool,
    #[arg(long)]
    emit_format: bool,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=ACCESSION, got '{s}'"))?;
    Ok((k.to_string(), v.to_string()))
}

struct Out {
    format: Format,
}

impl Out {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce(&T) -> String) {
        let s = match self.format {
            Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
            Format::Text => text(value),
        };
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(s.as_bytes());
    }
}

fn read_uploads(paths: &[PathBuf]) -> Res<Vec<Upload>> {
    paths
        .iter()
        .map(|p| Upload::read(p).map_err(|e| client_error("io_error", format!("{}: {e}", p.display()))))
        .collect()
}

fn enrich_request(a: &EnrichArgs) -> Res<EnrichRequest> {
    let mut obj = config::read_object(a.options.as_deref())?;
    config::set(&mut obj, "accession_pattern", a.accession_pattern.as_ref());
    if !a.map.is_empty() {
        let mut map: BTreeMap<String, String> = match obj.get("accession_map") {
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| client_error("config_error", format!("options: key 'accession_map': {e}")))?,
            None => BTreeMap::new(),
        };
        map.extend(a.map.iter().cloned());
        config::set(&mut obj, "accession_map", Some(map));
    }
    let mut options: EnrichOptions = config::decode(obj, &EnrichOptions::default(), "options")?;
    options.metadata.has_header |= a.metadata_header;
    options.vcf.emit_format |= a.emit_format;
    Ok(EnrichRequest {
        vcf: read_uploads(&a.vcf)?,
        cadd: read_uploads(&a.cadd)?,
        metadata: read_uploads(&a.metadata)?,
        options,
    })
}

fn graph_request(a: &GraphArgs) -> Res<GraphRequest> {
    let mut obj = config::read_object(a.recipe.as_deref())?;
    config::set(&mut obj, "feature_columns", a.features.as_ref());
    config::set(&mut obj, "label_column", a.label.as_ref());
    config::set(
        &mut obj,
        "edge_policy",
        a.edge_policy.map(|p| match p {
            EdgePolicyArg::GeneName => "gene_name",
            EdgePolicyArg::FullyConnected => "fully_connected",
        }),
    );
    if a.directed {
        config::set(&mut obj, "bidirectional", Some(false));
    }
    if a.train.is_some() || a.val.is_some() {
        let mut split = match obj.get("split") {
            Some(Value::Object(m)) => m.clone(),
            _ => json!({ "train": 80, "val": 10 }).as_object().cloned().unwrap_or_default(),
        };
        config::set(&mut split, "train", a.train);
        config::set(&mut split, "val", a.val);
        obj.insert("split".into(), Value::Object(split));
    }
    config::set(&mut obj, "seed", a.seed);
    config::set(&mut obj, "gene_column", a.gene_column.as_ref());
    Ok(GraphRequest { table_id: a.table.clone(), recipe: config::recipe(obj)? })
}

fn train_request(a: &TrainArgs) -> Res<TrainRequest> {
    let mut obj = config::read_object(a.config.as_deref())?;
    config::set(&mut obj, "model_kind", a.model);
    config::set(&mut obj, "num_layers", a.layers);
    config::set(&mut obj, "hidden_dim", a.hidden);
    config::set(&mut obj, "dropout", a.dropout);
    config::set(&mut obj, "learning_rate", a.lr);
    config::set(&mut obj, "epochs", a.epochs);
    config::set(&mut obj, "seed", a.seed);
    config::set(&mut obj, "early_stopping_patience", a.patience);
    Ok(TrainRequest { graph_id: a.graph.clone(), config: config::model_config(obj)? })
}

/// A job that ended in failure becomes an error.
fn succeeded(rec: JobRecord) -> Res<JobRecord> {
    if rec.state == JobState::Succeeded {
        return Ok(rec);
    }
    Err(ApiError {
        code: "job_failed".into(),
        message: format!("{} failed: {}", rec.job_id, rec.error.as_deref().unwrap_or("unknown error")),
        details: Some(json!({ "job_id": rec.job_id })),
    })
}

fn result_of<T: serde::de::DeserializeOwned>(rec: &JobRecord) -> Res<T> {
    serde_json::from_value(rec.result.clone().unwrap_or(Value::Null))
        .map_err(|e| client_error("bad_response", format!("{}: {e}", rec.job_id)))
}

fn read_query(text: Option<&str>, file: Option<&Path>) -> Res<String> {
    let io = |e: std::io::Error| client_error("io_error", e.to_string());
    match (text, file) {
        (_, Some(f)) => std::fs::read_to_string(f).map_err(io),
        (Some("-"), None) => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(io)?;
            Ok(s)
        }
        (Some(t), None) => Ok(t.to_string()),
        (None, None) => Err(client_error("bad_request", "no query given")),
    }
}

fn workspace_path(cli: &Cli) -> PathBuf {
    cli.workspace
        .clone()
        .or_else(|| std::env::var_os(WORKSPACE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("variantkg-workspace"))
}

fn convert(a: &ConvertArgs, out: &Out) -> Res<()> {
    let opts = convert::Options {
        kind: a.kind,
        accession: a.accession.clone(),
        accession_pattern: a.accession_pattern.clone(),
        metadata: variantkg_core::ingest::MetadataOptions { has_header: a.metadata_header, ..Default::default() },
        vcf: variantkg_core::convert::VcfConvertOptions { emit_format: a.emit_format },
    };
    let mut quads = Vec::new();
    for p in &a.inputs {
        let (q, warnings) = convert::convert_file(p, &opts)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        quads.extend(q);
    }
    let count = quads.len();
    let text = convert::render(quads, a.to)?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| client_error("io_error", format!("{}: {e}", path.display())))?;
            out.emit(&json!({ "quads": count, "out": path }), |_| format!("{count} quads -> {}\n", path.display()));
        }
        None => {
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn serve(path: &Path, addr: SocketAddr) -> Res<()> {
    let ws = Workspace::open(path).map_err(|e| e.to_api())?;
    let io = |e: std::io::Error| client_error("io_error", e.to_string());
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(io)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(io)?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(io)?);
        variantkg_service::http::serve(listener, ws).await.map_err(io)
    })
}

fn run(cli: &Cli) -> Res<()> {
    let out = Out { format: cli.format };
    match &cli.command {
        Command::Convert(a) => return convert(a, &out),
        Command::Serve { addr } => {
            if cli.url.is_some() {
                return Err(client_error("bad_request", "serve runs on a local workspace; drop --url"));
            }
            return serve(&workspace_path(cli), *addr);
        }
        _ => {}
    }
    let backend: Box<dyn Backend> = match &cli.url {
        Some(url) => Box::new(Remote::new(url)?),
        None => Box::new(Local::open(&workspace_path(cli))?),
    };
    let b = backend.as_ref();
    match &cli.command {
        Command::Enrich(a) => {
            let rec = succeeded(backend::wait(b, b.enrich(enrich_request(a)?)?)?)?;
            let summary = result_of(&rec)?;
            out.emit(&rec, |r| format!("{}\n{}", render::job_line(r), render::enrich(&summary)));
        }
        Command::Accessions { min_age, max_age } => {
            let accs = b.accessions(AccessionQuery { min_age: *min_age, max_age: *max_age })?;
            out.emit(&accs, |a| a.iter().map(|s| format!("{s}\n")).collect());
        }
        Command::Features => {
            out.emit(&b.features()?, |f| f.iter().map(|s| format!("{s}\n")).collect());
        }
        Command::Fetch(a) => {
            let age_range =
                (a.min_age.is_some() || a.max_age.is_some()).then_some(AgeRange { min: a.min_age, max: a.max_age });
            let req =
                FetchRequest { accession_ids: a.accessions.clone(), age_range, feature_names: a.features.clone() };
            let rec = succeeded(backend::wait(b, b.fetch(req)?)?)?;
            let info = result_of(&rec)?;
            out.emit(&rec, |r| format!("{}\n{}", render::job_line(r), render::table_info(&info)));
        }
        Command::Table { id, limit, csv } => {
            if *csv {
                let text = b.table_csv(id)?;
                let _ = std::io::stdout().lock().write_all(text.as_bytes());
            } else {
                out.emit(&b.table(id, *limit)?, render::table_view);
            }
        }
        Command::Query { text, file } => {
            let q = read_query(text.as_deref(), file.as_deref())?;
            out.emit(&b.query(&q)?, render::query);
        }
        Command::Graph(a) => {
            let rec = succeeded(backend::wait(b, b.build_graph(graph_request(a)?)?)?)?;
            let info = result_of(&rec)?;
            out.emit(&rec, |r| format!("{}\n{}", render::job_line(r), render::graph(&info)));
        }
        Command::Graphs => {
            out.emit(&b.graphs()?, |gs| gs.iter().map(render::graph).collect::<Vec<_>>().join("\n"));
        }
        Command::Train(a) => {
            let rec = b.train(train_request(a)?)?;
            let show = cli.format == Format::Text && !a.quiet;
            let rec = backend::follow_training(b, rec, |e| {
                if show {
                    eprintln!("{}", render::epoch(e));
                }
            })?;
            let rec = succeeded(rec)?;
            let result = result_of(&rec)?;
            out.emit(&rec, |r| format!("{}\n{}", render::job_line(r), render::train(&result)));
        }
        Command::Report { job } => out.emit(&b.report(job)?, render::train),
        Command::Infer { job } => out.emit(&b.infer(job)?, |m| m.to_table()),
        Command::Job { id } => out.emit(&b.job(id)?, |r| render::job_line(r) + "\n"),
        Command::Jobs => out.emit(&b.jobs()?, |js| js.iter().map(|r| render::job_line(r) + "\n").collect()),
        Command::Convert(_) | Command::Serve { .. } => unreachable!(),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match cli.format {
                Format::Json => eprintln!("{}", serde_json::to_string_pretty(&e).expect("serializable")),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(1)
        }
    }
}
