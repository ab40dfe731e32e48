use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Enrich,
    Fetch,
    Build,
    Train,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Succeeded,
    Failed,
}

impl JobState {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobState::Succeeded | JobState::Failed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifacts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    pub kind: JobKind,
    pub state: JobState,
    pub progress: f64,
    #[serde(default)]
    pub error: Option<String>,
    /// Set only once the job has succeeded.
    #[serde(default)]
    pub artifacts: Option<Artifacts>,
    #[serde(default)]
    pub result: Option<serde_json::Value>,
}

impl JobRecord {
    pub fn new(job_id: String, kind: JobKind) -> Self {
        JobRecord { job_id, kind, state: JobState::Queued, progress: 0.0, error: None, artifacts: None, result: None }
    }

    /// Moves to `next` if that is a forward step; returns whether it moved.
    fn advance(&mut self, next: JobState) -> bool {
        let ok = match (self.state, next) {
            (JobState::Queued, JobState::Running) => true,
            (JobState::Queued | JobState::Running, JobState::Succeeded | JobState::Failed) => true,
            _ => false,
        };
        if ok {
            self.state = next;
        }
        ok
    }

    pub fn start(&mut self) -> bool {
        self.advance(JobState::Running)
    }

    pub fn succeed(&mut self, artifacts: Artifacts, result: serde_json::Value) -> bool {
        let moved = self.advance(JobState::Succeeded);
        if moved {
            self.progress = 1.0;
            self.artifacts = Some(artifacts);
            self.result = Some(result);
        }
        moved
    }

    pub fn fail(&mut self, error: impl Into<String>) -> bool {
        let moved = self.advance(JobState::Failed);
        if moved {
            self.error = Some(error.into());
        }
        moved
    }

    pub fn set_progress(&mut self, p: f64) {
        if !self.state.is_terminal() {
            self.progress = p.clamp(0.0, 1.0);
        }
    }
}

/// Numeric part of a `job-N` id.
pub fn job_number(id: &str) -> Option<u64> {
    id.strip_prefix("job-")?.parse().ok()
}
