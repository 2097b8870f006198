//! Failure reports and transcripts shared by the pipeline stages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("stage {stage} failed: {check} needs {needed}, achieved {achieved}{}", detail_suffix(.detail))]
pub struct StageFailure {
    pub stage: String,
    pub check: String,
    pub needed: f64,
    pub achieved: f64,
    pub rounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn detail_suffix(d: &Option<String>) -> String {
    d.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
}

impl StageFailure {
    pub fn new(stage: &str, check: &str, needed: f64, achieved: f64) -> Self {
        Self {
            stage: stage.into(),
            check: check.into(),
            needed,
            achieved,
            rounds: 0,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub stage: String,
    pub round: usize,
    pub status: String,
    pub detail: String,
}

/// Append-only transcript of a pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub entries: Vec<LogEntry>,
}

impl StageLog {
    pub fn push(&mut self, stage: &str, round: usize, status: &str, detail: impl Into<String>) {
        self.entries.push(LogEntry {
            stage: stage.into(),
            round,
            status: status.into(),
            detail: detail.into(),
        });
    }
}
