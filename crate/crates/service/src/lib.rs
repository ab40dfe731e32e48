//! Workspace engine and HTTP/JSON service for the variant knowledge-graph
//! workbench.
//!
//! [`Workspace`] owns the quad store, the artifact directories and the job
//! registry; [`http::router`] exposes it over axum. The CLI uses the same
//! workspace directly in local mode.

pub mod api;
pub mod error;
pub mod http;
pub mod jobs;
pub mod workspace;

pub use error::{ApiError, WsError};
pub use jobs::{Artifacts, JobKind, JobRecord, JobState};
pub use workspace::{content_id, EnrichRequest, Exec, Upload, Workspace};
