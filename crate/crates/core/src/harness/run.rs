use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, GridPoint, GroundSize, Mode};
use super::records::{read_csv, write_csv, Outcome, RecordWriter, TrialRecord};
use super::HarnessError;
use crate::bounds::{confusable_pair_nonneg, confusable_pair_real, planted_covered_matrix};
use crate::constructions::{sample_random_ruff, ConstructionError, RandomRuffConfig, SampledFamily};
use crate::recovery::{angular_error, approx_recover, recover_support, ApproxConfig, GaussianMeasurements};
use crate::seed::derive_seed;
use crate::sensing::{generate_signal, matrix_from_family, measure, SensingMatrix};

/// Domain tag mixed into family seeds so they never collide with trial seeds.
const FAMILY_TAG: u64 = 0x6661_6D69_6C79;

type FamilyKey = (usize, usize, u64);

fn ground_bits(ground: GroundSize) -> u64 {
    match ground {
        GroundSize::Fixed(m) => m as u64,
        GroundSize::Multiplier(c) => c.to_bits() ^ (1 << 63),
    }
}

/// Seed of the `trial`-th trial at grid point `grid_index`.
pub fn trial_seed(master: u64, grid_index: usize, trial: usize) -> u64 {
    derive_seed(master, grid_index as u64, trial as u64)
}

/// Seed of the family shared by every grid point with the same `(n, k, ground)`.
pub fn family_seed(master: u64, n: usize, k: usize, ground: GroundSize) -> u64 {
    derive_seed(master ^ FAMILY_TAG, ((n as u64) << 32) | k as u64, ground_bits(ground))
}

fn build_family(config: &ExperimentConfig, point: &GridPoint) -> Result<SampledFamily, ConstructionError> {
    let c = &config.construction;
    let mut rc = RandomRuffConfig::new(
        point.n,
        point.k,
        c.alpha,
        family_seed(config.seed, point.n, point.k, point.ground),
    );
    rc.c_d = c.c_d;
    rc.max_retries = c.max_retries;
    rc.brute_force_budget = c.brute_force_budget;
    rc.d_override = c.d;
    match point.ground {
        GroundSize::Fixed(m) => rc.m_override = Some(m),
        GroundSize::Multiplier(c_m) => rc.c_m = c_m,
    }
    sample_random_ruff(&rc)
}

fn blank(config: &ExperimentConfig, point: &GridPoint, outcome: Outcome) -> TrialRecord {
    TrialRecord {
        mode: config.mode,
        grid_index: point.index,
        n: point.n,
        k: point.k,
        m: match point.ground {
            GroundSize::Fixed(m) => Some(m),
            GroundSize::Multiplier(_) => None,
        },
        d: None,
        alpha: None,
        epsilon: point.epsilon,
        m2: point.m2,
        trial: None,
        seed: None,
        value_model: None,
        outcome,
        angular_error: None,
        true_support: Vec::new(),
        recovered_support: Vec::new(),
        min_count_in: None,
        max_count_out: None,
        ties: None,
        verification: None,
        attempts: None,
    }
}

fn family_record(config: &ExperimentConfig, point: &GridPoint, sampled: &SampledFamily) -> TrialRecord {
    let mut r = blank(config, point, Outcome::ExactSupport);
    r.m = Some(sampled.params.m);
    r.d = Some(sampled.params.d);
    r.alpha = Some(sampled.params.alpha.to_string());
    r.verification = Some(sampled.path.to_string());
    r.attempts = Some(sampled.attempts);
    r
}

fn sweep_trial(
    config: &ExperimentConfig,
    point: &GridPoint,
    sampled: &SampledFamily,
    matrix: &SensingMatrix,
    trial: usize,
) -> TrialRecord {
    let seed = trial_seed(config.seed, point.index, trial);
    let model = config.value_models[trial % config.value_models.len()];
    let mut r = family_record(config, point, sampled);
    r.trial = Some(trial);
    r.seed = Some(seed);
    r.value_model = Some(model.to_string());
    let family = &sampled.family;

    let x = match generate_signal(point.n, point.k, model, Some(family), seed) {
        Ok(x) => x,
        Err(_) => {
            r.outcome = Outcome::RecoveryFailed;
            return r;
        }
    };
    r.true_support = x.support();
    let b = match measure(matrix, &x) {
        Ok(b) => b,
        Err(_) => {
            r.outcome = Outcome::RecoveryFailed;
            return r;
        }
    };
    let recovery = match recover_support(family, &b) {
        Ok(rec) => rec,
        Err(_) => {
            r.outcome = Outcome::RecoveryFailed;
            return r;
        }
    };
    let inside: BTreeSet<usize> = r.true_support.iter().copied().collect();
    let counts = &recovery.counts;
    r.min_count_in = inside.iter().map(|&j| counts[j - 1]).min();
    r.max_count_out = (1..=point.n)
        .filter(|j| !inside.contains(j))
        .map(|j| counts[j - 1])
        .max();
    r.ties = Some(recovery.ties.len());
    r.recovered_support = recovery.support.clone();
    r.outcome = if recovery.support == r.true_support {
        Outcome::ExactSupport
    } else {
        Outcome::WrongSupport
    };
    if config.mode != Mode::ApproxSweep {
        return r;
    }

    let (epsilon, m2) = (point.epsilon.unwrap_or(0.1), point.m2.unwrap_or(1));
    let mut approx = ApproxConfig::new(epsilon, m2, derive_seed(seed, 2, 0));
    approx.estimator = config.estimator;
    let mut gaussian = GaussianMeasurements::draw(point.n, m2, derive_seed(seed, 1, 0));
    let result = gaussian
        .sense(&x)
        .and_then(|_| approx_recover(family, &b, &gaussian, &approx))
        .and_then(|rec| angular_error(&x, &rec.estimate));
    match result {
        Ok(err) => {
            r.outcome = Outcome::AngularError;
            r.angular_error = Some(err);
        }
        Err(_) => r.outcome = Outcome::RecoveryFailed,
    }
    r
}

/// Alternates between a nonnegative and a signed planted matrix.
fn adversary_trial(config: &ExperimentConfig, point: &GridPoint, trial: usize) -> TrialRecord {
    let seed = trial_seed(config.seed, point.index, trial);
    let nonnegative = trial.is_multiple_of(2);
    let mut r = blank(config, point, Outcome::AdversaryFailed);
    r.trial = Some(trial);
    r.seed = Some(seed);
    r.value_model = Some(
        if nonnegative {
            "nonnegative-matrix"
        } else {
            "real-matrix"
        }
        .to_string(),
    );
    let m = match point.ground {
        GroundSize::Fixed(m) => m,
        GroundSize::Multiplier(_) => return r,
    };
    let pair = planted_covered_matrix(m, point.n, point.k, nonnegative, seed).and_then(|(a, witness)| {
        if nonnegative {
            confusable_pair_nonneg(&a, &witness, point.k)
        } else {
            confusable_pair_real(&a, &witness, point.k, config.adversary_epsilon, derive_seed(seed, 1, 0))
        }
    });
    if let Ok((x1, x2)) = pair {
        r.true_support = x2.support();
        r.recovered_support = x1.support();
        if r.true_support != r.recovered_support {
            r.outcome = Outcome::ConfusablePair;
        }
    }
    r
}

fn run_point(
    config: &ExperimentConfig,
    point: &GridPoint,
    families: &mut HashMap<FamilyKey, Result<SampledFamily, ConstructionError>>,
) -> Vec<TrialRecord> {
    if config.mode == Mode::AdversaryAudit {
        return (0..config.trials)
            .into_par_iter()
            .map(|t| adversary_trial(config, point, t))
            .collect();
    }
    let key = (point.n, point.k, ground_bits(point.ground));
    let built = families.entry(key).or_insert_with(|| build_family(config, point));
    let sampled = match built {
        Ok(s) => s,
        Err(err) => {
            let mut r = blank(config, point, Outcome::ConstructionFailed);
            if let ConstructionError::RetriesExhausted { attempts, path, .. } = err {
                r.attempts = Some(*attempts);
                r.verification = Some(path.to_string());
            }
            return vec![r];
        }
    };
    let matrix = matrix_from_family(&sampled.family);
    (0..config.trials)
        .into_par_iter()
        .map(|t| sweep_trial(config, point, sampled, &matrix, t))
        .collect()
}

/// Runs grid points in order, handing each point's records to `sink` as soon
/// as they are complete. Points listed in `skip` are not run. Returns `true`
/// when the budget stopped the sweep (after emitting a marker record).
pub fn run_experiment_with<F>(
    config: &ExperimentConfig,
    skip: &BTreeSet<usize>,
    mut sink: F,
) -> Result<bool, HarnessError>
where
    F: FnMut(Vec<TrialRecord>) -> Result<(), HarnessError>,
{
    config.validate()?;
    let start = Instant::now();
    let mut families = HashMap::new();
    let mut trials_run: u64 = 0;
    for point in config.grid_points() {
        if skip.contains(&point.index) {
            continue;
        }
        let over_trials = config
            .budget
            .max_trials
            .is_some_and(|cap| trials_run + config.trials as u64 > cap);
        let over_time = config
            .budget
            .max_seconds
            .is_some_and(|cap| start.elapsed().as_secs_f64() >= cap);
        if over_trials || over_time {
            sink(vec![blank(config, &point, Outcome::BudgetExceeded)])?;
            return Ok(true);
        }
        let records = run_point(config, &point, &mut families);
        trials_run += records.iter().filter(|r| r.trial.is_some()).count() as u64;
        sink(records)?;
    }
    Ok(false)
}

/// Every record of the sweep, ordered by grid point then trial index.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    let mut all = Vec::new();
    run_experiment_with(config, &BTreeSet::new(), |records| {
        all.extend(records);
        Ok(())
    })?;
    Ok(all)
}

fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by_key(|r| (r.grid_index, r.trial.map_or(0, |t| t + 1)));
}

/// Grid points whose records in `existing` are complete and consistent with `config`.
fn completed_points(config: &ExperimentConfig, existing: &[TrialRecord]) -> BTreeMap<usize, Vec<TrialRecord>> {
    let points = config.grid_points();
    let mut by_point: BTreeMap<usize, Vec<TrialRecord>> = BTreeMap::new();
    for r in existing {
        if r.outcome != Outcome::BudgetExceeded {
            by_point.entry(r.grid_index).or_default().push(r.clone());
        }
    }
    by_point.retain(|&index, records| {
        let Some(point) = points.get(index) else {
            return false;
        };
        let matches = records
            .iter()
            .all(|r| r.mode == config.mode && r.n == point.n && r.k == point.k && r.m2 == point.m2);
        let construction_failed = records.len() == 1 && records[0].outcome == Outcome::ConstructionFailed;
        let mut trials: Vec<usize> = records.iter().filter_map(|r| r.trial).collect();
        trials.sort_unstable();
        matches && (construction_failed || trials == (0..config.trials).collect::<Vec<_>>())
    });
    by_point
}

/// Runs the sweep into a CSV at `path`, flushing after every grid point.
///
/// With `resume`, complete grid points already present in `path` are kept and
/// only the rest are run. The finished file is identical to the output of an
/// uninterrupted run. Returns the final records.
pub fn run_to_csv(config: &ExperimentConfig, path: &Path, resume: bool) -> Result<Vec<TrialRecord>, HarnessError> {
    config.validate()?;
    let kept = if resume && path.exists() {
        completed_points(config, &read_csv(path)?)
    } else {
        BTreeMap::new()
    };
    let mut all: Vec<TrialRecord> = kept.values().flatten().cloned().collect();
    let skip: BTreeSet<usize> = kept.keys().copied().collect();

    let mut writer = RecordWriter::new(File::create(path)?)?;
    for r in &all {
        writer.write(r)?;
    }
    writer.flush()?;
    run_experiment_with(config, &skip, |records| {
        for r in &records {
            writer.write(r)?;
        }
        writer.flush()?;
        all.extend(records);
        Ok(())
    })?;
    drop(writer);

    sort_records(&mut all);
    write_csv(&all, File::create(path)?)?;
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn support_config(trials: usize) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"mode":"support-sweep","grid":{{"n":[12,16],"k":[2],"m":[200]}},"trials":{trials},"seed":5,
               "construction":{{"d":20}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn seeds_depend_on_every_input() {
        let s = trial_seed(1, 2, 3);
        assert_ne!(s, trial_seed(2, 2, 3));
        assert_ne!(s, trial_seed(1, 3, 3));
        assert_ne!(s, trial_seed(1, 2, 4));
        assert_ne!(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
    }

    #[test]
    fn verified_families_recover_every_support() {
        let records = run_experiment(&support_config(20)).unwrap();
        assert_eq!(records.len(), 40);
        for r in &records {
            assert_eq!(r.outcome, Outcome::ExactSupport, "{r:?}");
            assert!(r.verification.is_some() && r.attempts.is_some());
        }
        let indices: Vec<(usize, Option<usize>)> = records.iter().map(|r| (r.grid_index, r.trial)).collect();
        let mut sorted = indices.clone();
        sorted.sort();
        assert_eq!(indices, sorted);
    }

    #[test]
    fn impossible_construction_is_recorded_and_skipped() {
        let config = ExperimentConfig::from_json(
            r#"{"mode":"support-sweep","grid":{"n":[10],"k":[2],"m":[12,200]},"trials":3,"seed":9,
               "construction":{"d":6,"max_retries":2}}"#,
        )
        .unwrap();
        let records = run_experiment(&config).unwrap();
        assert_eq!(records[0].outcome, Outcome::ConstructionFailed);
        assert_eq!(records[0].attempts, Some(2));
        assert_eq!(records.len(), 4);
    }

    #[test]
    fn trial_budget_stops_with_marker() {
        let mut config = support_config(5);
        config.budget.max_trials = Some(7);
        let records = run_experiment(&config).unwrap();
        assert_eq!(records.len(), 6);
        assert_eq!(records[5].outcome, Outcome::BudgetExceeded);
        assert_eq!(records[5].grid_index, 1);
    }

    #[test]
    fn resume_reproduces_uninterrupted_output() {
        let dir = tempfile::tempdir().unwrap();
        let full = dir.path().join("full.csv");
        let partial = dir.path().join("partial.csv");
        let config = support_config(4);
        run_to_csv(&config, &full, false).unwrap();

        let mut limited = config.clone();
        limited.budget.max_trials = Some(4);
        let first = run_to_csv(&limited, &partial, false).unwrap();
        assert_eq!(first.last().unwrap().outcome, Outcome::BudgetExceeded);
        run_to_csv(&config, &partial, true).unwrap();
        assert_eq!(std::fs::read(&full).unwrap(), std::fs::read(&partial).unwrap());
    }

    #[test]
    fn adversary_audit_finds_pairs() {
        let config = ExperimentConfig::from_json(
            r#"{"mode":"adversary-audit","grid":{"n":[10],"k":[3],"m":[15]},"trials":10,"seed":3}"#,
        )
        .unwrap();
        let records = run_experiment(&config).unwrap();
        assert_eq!(records.len(), 10);
        assert!(
            records.iter().all(|r| r.outcome == Outcome::ConfusablePair),
            "{records:?}"
        );
    }
}
