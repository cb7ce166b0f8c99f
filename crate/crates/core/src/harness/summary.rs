use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::config::Mode;
use super::records::{format_float, Outcome, TrialRecord};
use super::HarnessError;

/// Aggregates over the trials of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub mode: Mode,
    pub grid_index: usize,
    pub n: usize,
    pub k: usize,
    pub m: Option<usize>,
    pub d: Option<usize>,
    pub epsilon: Option<f64>,
    pub m2: Option<usize>,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_error: Option<f64>,
    pub p95_error: Option<f64>,
}

/// Nearest-rank percentile of unsorted `values`; `None` when empty.
pub fn nearest_rank(values: &[f64], percent: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((percent / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

fn is_success(r: &TrialRecord) -> bool {
    match r.outcome {
        Outcome::ExactSupport | Outcome::ConfusablePair => true,
        Outcome::AngularError => r.recovered_support == r.true_support,
        _ => false,
    }
}

/// One row per grid point, in grid order. Budget markers are ignored; a grid
/// point whose family could not be built reports zero trials.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<GridSummary>, HarnessError> {
    let first = records.first().ok_or(HarnessError::Empty)?;
    if let Some(other) = records.iter().find(|r| r.mode != first.mode) {
        return Err(HarnessError::MixedModes(first.mode, other.mode));
    }
    let mut groups: BTreeMap<usize, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.outcome != Outcome::BudgetExceeded) {
        groups.entry(r.grid_index).or_default().push(r);
    }
    Ok(groups
        .into_values()
        .map(|group| {
            let head = group[0];
            let trials: Vec<&TrialRecord> = group.iter().copied().filter(|r| r.trial.is_some()).collect();
            let successes = trials.iter().filter(|r| is_success(r)).count();
            let errors: Vec<f64> = trials.iter().filter_map(|r| r.angular_error).collect();
            GridSummary {
                mode: head.mode,
                grid_index: head.grid_index,
                n: head.n,
                k: head.k,
                m: head.m,
                d: head.d,
                epsilon: head.epsilon,
                m2: head.m2,
                trials: trials.len(),
                successes,
                success_rate: if trials.is_empty() {
                    0.0
                } else {
                    successes as f64 / trials.len() as f64
                },
                median_error: nearest_rank(&errors, 50.0),
                p95_error: nearest_rank(&errors, 95.0),
            }
        })
        .collect())
}

pub const SUMMARY_HEADER: [&str; 13] = [
    "mode",
    "grid_index",
    "n",
    "k",
    "m",
    "d",
    "epsilon",
    "m2",
    "trials",
    "successes",
    "success_rate",
    "median_error",
    "p95_error",
];

pub fn write_summary_csv<W: Write>(rows: &[GridSummary], sink: W) -> Result<(), HarnessError> {
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    let optf = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(sink);
    writer.write_record(SUMMARY_HEADER)?;
    for s in rows {
        writer.write_record([
            s.mode.as_str().to_string(),
            s.grid_index.to_string(),
            s.n.to_string(),
            s.k.to_string(),
            opt(s.m),
            opt(s.d),
            optf(s.epsilon),
            opt(s.m2),
            s.trials.to_string(),
            s.successes.to_string(),
            format_float(s.success_rate),
            optf(s.median_error),
            optf(s.p95_error),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
