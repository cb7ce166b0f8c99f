//! Parameter sweeps, Monte Carlo trials, CSV output and summaries.
//!
//! A sweep is described by an [`ExperimentConfig`] (JSON). Each grid point
//! builds and verifies a family (or, for adversary audits, plants covered
//! columns in random matrices) and runs `trials` independent trials. The seed of
//! trial `t` at grid point `g` is `derive_seed(master, g, t)`, so the output
//! does not depend on thread scheduling.

mod config;
mod records;
mod run;
mod summary;
mod svg;

use thiserror::Error;

pub use config::{Budget, ConstructionSettings, ExperimentConfig, Grid, GridPoint, GroundSize, Mode};
pub use records::{
    emit_csv, format_float, read_csv, read_csv_from, write_csv, Outcome, RecordWriter, TrialRecord, CSV_HEADER,
};
pub use run::{family_seed, run_experiment, run_experiment_with, run_to_csv, trial_seed};
pub use summary::{nearest_rank, summarize, write_summary_csv, GridSummary, SUMMARY_HEADER};
pub use svg::render_svg;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed record file: {0}")]
    Parse(String),
    #[error("records mix modes {} and {}", .0.as_str(), .1.as_str())]
    MixedModes(Mode, Mode),
    #[error("no records to summarize")]
    Empty,
}
