//! The two ways of reaching a workspace: in-process or over HTTP.

use std::sync::Arc;
use std::time::Duration;

use reqwest::blocking::multipart::{Form, Part};
use reqwest::blocking::{Client, RequestBuilder};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use variantkg_core::gnn::Metrics;
use variantkg_service::api::{
    AccessionQuery, FetchRequest, GraphInfo, GraphRequest, TableView, TelemetryPage, TrainRequest, TrainResult,
};
use variantkg_service::workspace::plain_rows;
use variantkg_service::{ApiError, EnrichRequest, Exec, JobRecord, Workspace, WsError};

pub type Res<T> = Result<T, ApiError>;

pub fn client_error(code: &str, message: impl Into<String>) -> ApiError {
    ApiError { code: code.into(), message: message.into(), details: None }
}

/// Service operations as the CLI sees them. Job submissions may return a
/// record that is not yet terminal.
pub trait Backend {
    fn enrich(&self, req: EnrichRequest) -> Res<JobRecord>;
    fn accessions(&self, q: AccessionQuery) -> Res<Vec<String>>;
    fn features(&self) -> Res<Vec<String>>;
    fn fetch(&self, req: FetchRequest) -> Res<JobRecord>;
    fn table(&self, id: &str, limit: usize) -> Res<TableView>;
    fn table_csv(&self, id: &str) -> Res<String>;
    fn query(&self, text: &str) -> Res<Value>;
    fn build_graph(&self, req: GraphRequest) -> Res<JobRecord>;
    fn graphs(&self) -> Res<Vec<GraphInfo>>;
    fn train(&self, req: TrainRequest) -> Res<JobRecord>;
    fn telemetry(&self, job: &str, offset: usize) -> Res<TelemetryPage>;
    fn report(&self, job: &str) -> Res<TrainResult>;
    fn infer(&self, job: &str) -> Res<Metrics>;
    fn job(&self, id: &str) -> Res<JobRecord>;
    fn jobs(&self) -> Res<Vec<JobRecord>>;
}

pub struct Local {
    ws: Arc<Workspace>,
}

impl Local {
    pub fn open(path: &std::path::Path) -> Res<Self> {
        Ok(Local { ws: Workspace::open(path).map_err(|e| e.to_api())? })
    }
}

fn api<T>(r: Result<T, WsError>) -> Res<T> {
    r.map_err(|e| e.to_api())
}

impl Backend for Local {
    fn enrich(&self, req: EnrichRequest) -> Res<JobRecord> {
        api(self.ws.submit_enrich(req, Exec::Inline))
    }
    fn accessions(&self, q: AccessionQuery) -> Res<Vec<String>> {
        api(self.ws.accessions(q))
    }
    fn features(&self) -> Res<Vec<String>> {
        Ok(Workspace::feature_names())
    }
    fn fetch(&self, req: FetchRequest) -> Res<JobRecord> {
        api(self.ws.submit_fetch(req, Exec::Inline))
    }
    fn table(&self, id: &str, limit: usize) -> Res<TableView> {
        let info = api(self.ws.table_info(id))?;
        let t = api(self.ws.table(id))?;
        Ok(TableView { info, preview: t.preview(limit) })
    }
    fn table_csv(&self, id: &str) -> Res<String> {
        Ok(api(self.ws.table(id))?.to_csv_string())
    }
    fn query(&self, text: &str) -> Res<Value> {
        let t = api(self.ws.query(text))?;
        Ok(json!({ "columns": t.columns, "rows": plain_rows(&t) }))
    }
    fn build_graph(&self, req: GraphRequest) -> Res<JobRecord> {
        api(self.ws.submit_build(req))
    }
    fn graphs(&self) -> Res<Vec<GraphInfo>> {
        api(self.ws.graphs())
    }
    fn train(&self, req: TrainRequest) -> Res<JobRecord> {
        api(self.ws.submit_train(req, Exec::Inline))
    }
    fn telemetry(&self, job: &str, offset: usize) -> Res<TelemetryPage> {
        api(self.ws.telemetry(job, offset))
    }
    fn report(&self, job: &str) -> Res<TrainResult> {
        api(self.ws.report(job))
    }
    fn infer(&self, job: &str) -> Res<Metrics> {
        api(self.ws.infer(job))
    }
    fn job(&self, id: &str) -> Res<JobRecord> {
        api(self.ws.job(id))
    }
    fn jobs(&self) -> Res<Vec<JobRecord>> {
        Ok(self.ws.jobs())
    }
}

pub struct Remote {
    base: String,
    client: Client,
}

impl Remote {
    pub fn new(url: &str) -> Res<Self> {
        let client = Client::builder()
            .timeout(None::<Duration>)
            .build()
            .map_err(|e| client_error("client_error", e.to_string()))?;
        Ok(Remote { base: url.trim_end_matches('/').to_string(), client })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn send(&self, req: RequestBuilder) -> Res<reqwest::blocking::Response> {
        let resp = req.send().map_err(|e| client_error("unreachable", format!("{}: {e}", self.base)))?;
        if resp.status().is_success() {
            return Ok(resp);
        }
        let status = resp.status();
        let text = resp.text().unwrap_or_default();
        Err(serde_json::from_str(&text)
            .unwrap_or_else(|_| client_error("http_error", format!("HTTP {status}: {text}"))))
    }

    fn json<T: DeserializeOwned>(&self, req: RequestBuilder) -> Res<T> {
        let resp = self.send(req)?;
        resp.json().map_err(|e| client_error("bad_response", e.to_string()))
    }

    fn get<T: DeserializeOwned>(&self, path: &str) -> Res<T> {
        self.json(self.client.get(self.url(path)))
    }

    fn post<T: DeserializeOwned>(&self, path: &str, body: &impl serde::Serialize) -> Res<T> {
        self.json(self.client.post(self.url(path)).json(body))
    }
}

fn age_params(q: &AccessionQuery) -> String {
    let mut parts = Vec::new();
    if let Some(v) = q.min_age {
        parts.push(format!("min_age={v}"));
    }
    if let Some(v) = q.max_age {
        parts.push(format!("max_age={v}"));
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!("?{}", parts.join("&"))
    }
}

impl Backend for Remote {
    fn enrich(&self, req: EnrichRequest) -> Res<JobRecord> {
        let mut form = Form::new();
        for (field, files) in [("vcf", req.vcf), ("cadd", req.cadd), ("metadata", req.metadata)] {
            for f in files {
                form = form.part(field, Part::bytes(f.bytes).file_name(f.name));
            }
        }
        let options = serde_json::to_string(&req.options).map_err(|e| client_error("client_error", e.to_string()))?;
        form = form.text("options", options);
        self.json(self.client.post(self.url("/enrich")).multipart(form))
    }
    fn accessions(&self, q: AccessionQuery) -> Res<Vec<String>> {
        self.get(&format!("/accessions{}", age_params(&q)))
    }
    fn features(&self) -> Res<Vec<String>> {
        self.get("/features")
    }
    fn fetch(&self, req: FetchRequest) -> Res<JobRecord> {
        self.post("/fetch", &req)
    }
    fn table(&self, id: &str, limit: usize) -> Res<TableView> {
        self.get(&format!("/tables/{id}?limit={limit}"))
    }
    fn table_csv(&self, id: &str) -> Res<String> {
        self.send(self.client.get(self.url(&format!("/tables/{id}/csv"))))?
            .text()
            .map_err(|e| client_error("bad_response", e.to_string()))
    }
    fn query(&self, text: &str) -> Res<Value> {
        self.json(self.client.post(self.url("/query")).body(text.to_string()))
    }
    fn build_graph(&self, req: GraphRequest) -> Res<JobRecord> {
        self.post("/graphs", &req)
    }
    fn graphs(&self) -> Res<Vec<GraphInfo>> {
        self.get("/graphs")
    }
    fn train(&self, req: TrainRequest) -> Res<JobRecord> {
        self.post("/train", &req)
    }
    fn telemetry(&self, job: &str, offset: usize) -> Res<TelemetryPage> {
        self.get(&format!("/train/{job}/telemetry?offset={offset}"))
    }
    fn report(&self, job: &str) -> Res<TrainResult> {
        self.get(&format!("/train/{job}/report"))
    }
    fn infer(&self, job: &str) -> Res<Metrics> {
        self.get(&format!("/inference/{job}"))
    }
    fn job(&self, id: &str) -> Res<JobRecord> {
        self.get(&format!("/jobs/{id}"))
    }
    fn jobs(&self) -> Res<Vec<JobRecord>> {
        self.get("/jobs")
    }
}

/// Polls until the job is terminal.
pub fn wait(b: &dyn Backend, rec: JobRecord) -> Res<JobRecord> {
    let mut rec = rec;
    while !rec.state.is_terminal() {
        std::thread::sleep(Duration::from_millis(50));
        rec = b.job(&rec.job_id)?;
    }
    Ok(rec)
}

/// Streams a training job's telemetry into `on_event` until the job ends.
pub fn follow_training(
    b: &dyn Backend,
    rec: JobRecord,
    mut on_event: impl FnMut(&variantkg_core::gnn::EpochEvent),
) -> Res<JobRecord> {
    let mut offset = 0;
    loop {
        let page = b.telemetry(&rec.job_id, offset)?;
        page.events.iter().for_each(&mut on_event);
        offset = page.next_offset;
        if page.events.is_empty() {
            if page.state.is_terminal() {
                break;
            }
            std::thread::sleep(Duration::from_millis(100));
        }
    }
    wait(b, rec)
}
