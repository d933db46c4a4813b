use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate field: total spectral energy is zero")]
    DegenerateField,
    #[error("insufficient time resolution: {0}")]
    Resolution(String),
    #[error("not enough samples: {0}")]
    SampleSize(String),
    #[error("fitness has zero variance; correlation is undefined")]
    DegenerateFitness,
    #[error("no axis passes the selection rule: {0}")]
    EmptySelection(String),
    #[error("optimal genome has zero phase differences; nothing to project")]
    DegenerateOptimum,
    #[error("non-finite fitness {fitness} for trial {trial_id}")]
    NonFiniteFitness { trial_id: u64, fitness: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("trial store failure: {0}")]
    Store(String),
}
