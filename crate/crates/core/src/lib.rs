//! Universal one-bit compressive sensing built on robust union-free families.
//!
//! A family `B_1, .., B_n` of `d`-subsets of `[m]` becomes the 0-1 sensing
//! matrix `A_ij = 1[i in B_j]`. When the family is an `(n, m, d, k, 1/2)`
//! robust union-free family, the support of every `k`-sparse real signal is
//! recovered from `sign(Ax)` by a majority vote over each set.
//!
//! Indices of sets, signal coordinates and ground-set elements are 1-based
//! throughout, matching the JSON file formats.
//!
//! Modules:
//! - [`family`]: set families and exact verifiers.
//! - [`constructions`]: Las Vegas sampling and Reed-Solomon designs.
//! - [`sensing`]: signals, matrices and the measurement map.
//! - [`recovery`]: support recovery and two-stage approximate recovery.
//! - [`bounds`]: bound evaluators and lower-bound adversaries.
//! - [`harness`]: parameter sweeps, CSV output and summaries.

pub mod bounds;
pub mod constructions;
pub mod family;
pub mod fraction;
pub mod harness;
pub mod recovery;
pub mod seed;
pub mod sensing;

pub use bounds::{BoundReport, BoundValue, BoundsError};
pub use constructions::{
    design_from_code, lift_k1_params, reed_solomon_code, sample_random_ruff, Code, ConstructionError, RandomRuffConfig,
    SampledFamily, VerificationPath,
};
pub use family::{
    family_stats, pairwise_certificate, verify_ruff, verify_uff, CertificateVerdict, FamilyError, FamilyStats,
    RuffParams, SetFamily, Verdict, ViolationWitness,
};
pub use fraction::Fraction;
pub use harness::{emit_csv, run_experiment, summarize, ExperimentConfig, HarnessError, Outcome, TrialRecord};
pub use recovery::{
    angular_error, approx_recover, gaussian_stage, recover_support, ApproxConfig, ApproxRecovery, Estimator,
    GaussianMeasurements, RecoveryError, SupportRecovery,
};
pub use sensing::{
    generate_signal, matrix_from_family, measure, measure_with_tolerance, SensingError, SensingMatrix, SignPattern,
    SparseVector, ValueModel,
};
