//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the topicflow library.
#[derive(Debug, Error)]
pub enum Error {
    /// Ingestion finished without a single valid record.
    #[error("no valid records ingested ({skipped} skipped)")]
    EmptyCorpus { skipped: usize },

    /// A configuration value failed validation. The message names the field.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A matrix column summed to zero during normalization.
    #[error("column {0} sums to zero; self_loop_weight must be > 0 so isolated nodes keep probability mass")]
    ZeroColumn(usize),

    /// A membership function was evaluated outside its [0, 1] domain.
    #[error("discourse value {0} lies outside [0, 1]")]
    DomainViolation(f64),

    /// A consecutive timepoint pair has no transition records.
    #[error("transition records missing for timepoint pair {0} -> {1}")]
    TimepointGap(usize, usize),

    /// A trace record does not fit the declared trace mode.
    #[error("malformed trace: {0}")]
    InvalidTrace(String),

    /// A stage artifact on disk is inconsistent (bad index sequence, unreadable dump).
    #[error("invalid artifact {path}: {reason}")]
    InvalidArtifact { path: String, reason: String },

    /// A pipeline stage failed; the stage name is preserved for exit reporting.
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
