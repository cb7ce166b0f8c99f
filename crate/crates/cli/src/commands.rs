use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use obcs::bounds::{
    confusable_pair_nonneg, confusable_pair_real, cover_report, extract_family, furedi_report, gv_reports,
    min_m_approx_report, min_m_support_report, planted_covered_matrix, regions_report, BoundReport, BoundsError,
};
use obcs::constructions::{
    design_from_code, lift_k1_params, reed_solomon_code, sample_random_ruff, ConstructionError, RandomRuffConfig,
};
use obcs::family::{family_stats, pairwise_certificate, verify_ruff, verify_uff, RuffParams, SetFamily, Verdict};
use obcs::harness::{self, ExperimentConfig, HarnessError, Outcome};
use obcs::recovery::{angular_error, approx_recover, ApproxConfig, GaussianMeasurements};
use obcs::seed::derive_seed;
use obcs::sensing::{
    self, generate_signal, matrix_from_family, measure_with_tolerance, SensingMatrix, SignPattern, SparseVector,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::{
    AdversaryArgs, Bounds, CliError, ExperimentArgs, MeasureArgs, RandomArgs, RecoverApproxArgs, RecoverSupportArgs,
    RsArgs, SummarizeArgs, VerifyArgs,
};

type CliResult = Result<(), CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn emit_json<T: Serialize>(value: &T, output: Option<&PathBuf>) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(CliError::usage)? + "\n";
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::usage),
    }
}

fn construction_error(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::RetriesExhausted { .. } | ConstructionError::VacuousLift { .. } => CliError::domain(e),
        other => CliError::usage(other),
    }
}

fn harness_error(e: HarnessError) -> CliError {
    CliError::usage(e)
}

pub fn construct_random(args: RandomArgs) -> CliResult {
    let mut config = RandomRuffConfig::new(args.n, args.k, args.alpha, args.seed);
    config.c_m = args.c_m;
    config.c_d = args.c_d;
    config.m_override = args.m;
    config.d_override = args.d;
    config.max_retries = args.retries;
    let sampled = sample_random_ruff(&config).map_err(construction_error)?;
    let p = &sampled.params;
    eprintln!(
        "n={} m={} d={} k={} alpha={} attempts={} verification={}",
        p.n, p.m, p.d, p.k, p.alpha, sampled.attempts, sampled.path
    );
    emit_json(&sampled.family, args.output.as_ref())
}

pub fn construct_rs(args: RsArgs) -> CliResult {
    let code = reed_solomon_code(args.q, args.deg, args.d).map_err(construction_error)?;
    let (family, mut params) = design_from_code(&code).map_err(construction_error)?;
    if let Some(k) = args.lift_k {
        params = lift_k1_params(&params, k).map_err(construction_error)?;
    }
    eprintln!(
        "n={} m={} d={} k={} alpha={} max_intersection={}",
        params.n,
        params.m,
        params.d,
        params.k,
        params.alpha,
        code.max_agreement()
    );
    emit_json(&family, args.output.as_ref())
}

pub fn verify(args: VerifyArgs) -> CliResult {
    let family: SetFamily = read_json(&args.family)?;
    let stats = if args.stats {
        Some(family_stats(&family).map_err(CliError::usage)?)
    } else {
        None
    };
    let (passed, report) = if args.uff {
        let verdict = verify_uff(&family, args.k).map_err(CliError::usage)?;
        (
            verdict.passed(),
            json!({ "check": "uff", "k": args.k, "result": verdict }),
        )
    } else {
        let d = family
            .uniform_size()
            .ok_or_else(|| CliError::usage("sets differ in size; use --uff for a plain check"))?;
        let params = RuffParams::new(family.n(), family.m(), d, args.k, args.alpha).map_err(CliError::usage)?;
        if args.certificate {
            let verdict = pairwise_certificate(&family, &params).map_err(CliError::usage)?;
            (
                verdict.certified(),
                json!({ "check": "pairwise-certificate", "params": params, "result": verdict }),
            )
        } else {
            let verdict = verify_ruff(&family, &params).map_err(CliError::usage)?;
            (
                verdict.passed(),
                json!({ "check": "brute-force", "params": params, "result": verdict }),
            )
        }
    };
    let mut report = report;
    if let Some(stats) = stats {
        report["stats"] = json!(stats);
    }
    emit_json(&report, None)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::domain("family does not verify"))
    }
}

pub fn measure(args: MeasureArgs) -> CliResult {
    let family: SetFamily = read_json(&args.family)?;
    let signal: SparseVector = match (&args.signal, args.k) {
        (Some(path), _) => read_json(path)?,
        (None, Some(k)) => {
            generate_signal(family.n(), k, args.model, Some(&family), args.seed).map_err(CliError::usage)?
        }
        (None, None) => return Err(CliError::usage("give --signal or --k")),
    };
    let a = matrix_from_family(&family);
    let pattern = measure_with_tolerance(&a, &signal, args.tau).map_err(CliError::usage)?;
    emit_json(&json!({ "signal": signal, "pattern": pattern }), None)
}

fn read_pattern(path: &Path) -> Result<SignPattern, CliError> {
    let value: serde_json::Value = read_json(path)?;
    let value = match value.get("pattern") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(value).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn recover_support(args: RecoverSupportArgs) -> CliResult {
    let family: SetFamily = read_json(&args.family)?;
    let pattern = read_pattern(&args.pattern)?;
    let recovery = obcs::recovery::recover_support(&family, &pattern).map_err(CliError::usage)?;
    emit_json(&recovery, None)
}

pub fn recover_approx(args: RecoverApproxArgs) -> CliResult {
    let family: SetFamily = read_json(&args.family)?;
    let signal: SparseVector = read_json(&args.signal)?;
    let b1 = sensing::measure(&matrix_from_family(&family), &signal).map_err(CliError::usage)?;
    let mut config = ApproxConfig::new(args.epsilon, args.m2, derive_seed(args.seed, 2, 0));
    config.estimator = args.estimator;
    let mut gaussian = GaussianMeasurements::draw(family.n(), args.m2, derive_seed(args.seed, 1, 0));
    gaussian.sense(&signal).map_err(CliError::usage)?;
    let recovery = approx_recover(&family, &b1, &gaussian, &config).map_err(CliError::domain)?;
    let error = angular_error(&signal, &recovery.estimate).ok();
    emit_json(
        &json!({ "support": recovery.support, "estimate": recovery.estimate, "angular_error": error }),
        None,
    )
}

pub fn bounds(which: Bounds) -> CliResult {
    let report: Result<Vec<BoundReport>, BoundsError> = match which {
        Bounds::Furedi { m, k } => furedi_report(m, k).map(|r| vec![r]),
        Bounds::MinM { n, k } => min_m_support_report(n, k).map(|r| vec![r]),
        Bounds::Regions { m, k } => regions_report(m, k).map(|r| vec![r]),
        Bounds::Cover { k, epsilon, c } => cover_report(k, epsilon, c).map(|r| vec![r]),
        Bounds::ApproxLb { k, epsilon, c } => min_m_approx_report(k, epsilon, c).map(|r| vec![r]),
        Bounds::Gv { n, k, epsilon } => gv_reports(n, k, epsilon),
    };
    let report = report.map_err(CliError::usage)?;
    if report.len() == 1 {
        emit_json(&report[0], None)
    } else {
        emit_json(&report, None)
    }
}

pub fn adversary(args: AdversaryArgs) -> CliResult {
    if args.k == 0 {
        return Err(CliError::usage("k must be at least 1"));
    }
    let (a, witness) = match (&args.matrix, args.planted) {
        (_, Some((m, n))) => planted_covered_matrix(m, n, args.k, !args.signed, args.seed).map_err(CliError::usage)?,
        (Some(path), None) => {
            let a: SensingMatrix = read_json(path)?;
            let family = extract_family(&a);
            if args.k > a.n() {
                return Err(CliError::usage(format!("k = {} exceeds n = {}", args.k, a.n())));
            }
            match verify_uff(&family, args.k - 1).map_err(CliError::usage)? {
                Verdict::Fail { witness } => (a, witness),
                Verdict::Pass => {
                    return Err(CliError::domain(format!(
                        "no column is covered by {} others; the matrix separates these supports",
                        args.k - 1
                    )))
                }
            }
        }
        (None, None) => return Err(CliError::usage("give --matrix or --planted")),
    };
    let use_nonneg = a.is_nonnegative() && !args.real;
    let pair = if use_nonneg {
        confusable_pair_nonneg(&a, &witness, args.k)
    } else {
        confusable_pair_real(&a, &witness, args.k, args.epsilon, args.seed)
    };
    let (x1, x2) = pair.map_err(CliError::domain)?;
    let pattern = sensing::measure(&a, &x1).map_err(CliError::usage)?;
    emit_json(
        &json!({
            "construction": if use_nonneg { "nonnegative" } else { "real" },
            "witness": witness,
            "x1": x1,
            "x2": x2,
            "pattern": pattern,
        }),
        None,
    )
}

fn write_svg(records: &[harness::TrialRecord], path: &Path) -> CliResult {
    let summary = harness::summarize(records).map_err(harness_error)?;
    fs::write(path, harness::render_svg(&summary)).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn experiment(args: ExperimentArgs) -> CliResult {
    let text =
        fs::read_to_string(&args.config).map_err(|e| CliError::usage(format!("{}: {e}", args.config.display())))?;
    let config = ExperimentConfig::from_json(&text).map_err(harness_error)?;
    let records = harness::run_to_csv(&config, &args.output, args.resume).map_err(harness_error)?;
    if let Some(svg) = &args.svg {
        write_svg(&records, svg)?;
    }
    let trials = records.iter().filter(|r| r.trial.is_some()).count();
    let failed_points = records
        .iter()
        .filter(|r| r.outcome == Outcome::ConstructionFailed)
        .count();
    eprintln!(
        "{} records ({trials} trials, {failed_points} grid points without a family) written to {}",
        records.len(),
        args.output.display()
    );
    if records.last().is_some_and(|r| r.outcome == Outcome::BudgetExceeded) {
        eprintln!("budget reached; rerun with --resume and a larger budget to continue");
    }
    Ok(())
}

pub fn summarize(args: SummarizeArgs) -> CliResult {
    let records =
        harness::read_csv(&args.input).map_err(|e| CliError::usage(format!("{}: {e}", args.input.display())))?;
    let summary = harness::summarize(&records).map_err(harness_error)?;
    match &args.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            harness::write_summary_csv(&summary, file).map_err(harness_error)?;
        }
        None => harness::write_summary_csv(&summary, std::io::stdout().lock()).map_err(harness_error)?,
    }
    if let Some(svg) = &args.svg {
        fs::write(svg, harness::render_svg(&summary))
            .map_err(|e| CliError::usage(format!("{}: {e}", svg.display())))?;
    }
    Ok(())
}
