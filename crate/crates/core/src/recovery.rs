//! Exact support recovery by majority vote over each set, and two-stage
//! approximate recovery (support first, then Gaussian sign measurements on the
//! recovered coordinates).

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{FamilyError, SetFamily};
use crate::seed;
use crate::sensing::{SensingError, SignPattern, SparseVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoveryError {
    #[error("pattern has length {found}, family ground set has size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot recover the direction of a zero vector")]
    ZeroSignal,
    #[error("net decoding is limited to at most 3 coordinates, got {0}")]
    NetTooLarge(usize),
    #[error("recovered support is empty but {0} second-stage signs are nonzero")]
    Inconsistent(usize),
    #[error("second-stage estimate vanished")]
    DegenerateEstimate,
}

/// Outcome of the majority rule, with per-set diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRecovery {
    /// Recovered indices, ascending, 1-based.
    pub support: Vec<usize>,
    /// `|B_j ∩ supp(b)|` for `j = 1..=n`.
    pub counts: Vec<usize>,
    /// Indices with a count of exactly `d / 2`. These never occur for a verified
    /// family and a valid pattern.
    pub ties: Vec<usize>,
}

/// Returns `{ j : |B_j ∩ supp(b)| > d/2 }`.
pub fn recover_support(family: &SetFamily, b: &SignPattern) -> Result<SupportRecovery, RecoveryError> {
    if b.len() != family.m() {
        return Err(RecoveryError::LengthMismatch {
            expected: family.m(),
            found: b.len(),
        });
    }
    let d = match family.sets().first() {
        Some(first) => first.len(),
        None => 0,
    };
    family.check_uniform(d)?;

    let nonzero = b.values();
    let counts: Vec<usize> = family
        .sets()
        .iter()
        .map(|set| set.iter().filter(|&&i| nonzero[i as usize - 1] != 0).count())
        .collect();
    let support = (1..=family.n()).filter(|&j| 2 * counts[j - 1] > d).collect();
    let ties = (1..=family.n()).filter(|&j| 2 * counts[j - 1] == d).collect();
    Ok(SupportRecovery { support, counts, ties })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Normalized average of `y_i * g_i`.
    Linear,
    /// Grid point on the unit sphere agreeing with the most signs.
    #[serde(alias = "net")]
    NetDecode,
}

impl std::str::FromStr for Estimator {
    type Err = RecoveryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Estimator::Linear),
            "net" | "net-decode" => Ok(Estimator::NetDecode),
            other => Err(RecoveryError::InvalidConfig(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    pub epsilon: f64,
    pub m2: usize,
    pub estimator: Estimator,
    pub net_resolution: f64,
    pub seed: u64,
}

impl ApproxConfig {
    pub fn new(epsilon: f64, m2: usize, seed: u64) -> Self {
        Self {
            epsilon,
            m2,
            estimator: Estimator::Linear,
            net_resolution: epsilon.min(0.01),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), RecoveryError> {
        if !(self.epsilon > 0.0 && self.epsilon < 2.0) {
            return Err(RecoveryError::InvalidConfig(format!(
                "epsilon {} must lie in (0, 2)",
                self.epsilon
            )));
        }
        if self.m2 == 0 {
            return Err(RecoveryError::InvalidConfig("m2 must be at least 1".into()));
        }
        if !(self.net_resolution > 0.0 && self.net_resolution <= self.epsilon) {
            return Err(RecoveryError::InvalidConfig(format!(
                "net resolution {} must lie in (0, epsilon]",
                self.net_resolution
            )));
        }
        Ok(())
    }
}

/// `m2` standard Gaussian rows over all `n` coordinates and, once a signal has
/// been sensed, their signs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasurements {
    n: usize,
    rows: Vec<f64>,
    signs: Vec<i8>,
}

impl GaussianMeasurements {
    /// Draws the rows before any signal is known.
    pub fn draw(n: usize, m2: usize, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let rows = (0..n * m2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Self {
            n,
            rows,
            signs: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m2(&self) -> usize {
        self.rows.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.n..(r + 1) * self.n]
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Records `sign(<g_r, x>)` for every row.
    pub fn sense(&mut self, x: &SparseVector) -> Result<(), RecoveryError> {
        if x.dim() != self.n {
            return Err(SensingError::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            }
            .into());
        }
        self.signs = (0..self.m2())
            .map(|r| {
                let row = self.row(r);
                let dot: f64 = x.entries().iter().map(|&(j, v)| row[j - 1] * v).sum();
                sign(dot)
            })
            .collect();
        Ok(())
    }

    /// Rows restricted to the given 1-based columns, row-major.
    pub fn restricted_rows(&self, columns: &[usize]) -> Vec<f64> {
        (0..self.m2())
            .flat_map(|r| {
                let row = self.row(r);
                columns.iter().map(move |&j| row[j - 1])
            })
            .collect()
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Estimates the direction of `x` from `m2` fresh Gaussian sign measurements.
pub fn gaussian_stage(x: &[f64], config: &ApproxConfig) -> Result<Vec<f64>, RecoveryError> {
    config.validate()?;
    let s = x.len();
    if s == 0 || x.iter().all(|&v| v == 0.0) {
        return Err(RecoveryError::ZeroSignal);
    }
    if config.estimator == Estimator::NetDecode && s > 3 {
        return Err(RecoveryError::NetTooLarge(s));
    }
    let mut rng = seed::rng(config.seed);
    let rows: Vec<f64> = (0..s * config.m2)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let signs: Vec<i8> = rows
        .chunks_exact(s)
        .map(|g| sign(g.iter().zip(x).map(|(a, b)| a * b).sum()))
        .collect();
    estimate_direction(&rows, &signs, s, config)
}

/// Unit-norm estimate from row-major `rows` (width `s`) and their signs.
pub fn estimate_direction(
    rows: &[f64],
    signs: &[i8],
    s: usize,
    config: &ApproxConfig,
) -> Result<Vec<f64>, RecoveryError> {
    match config.estimator {
        Estimator::Linear => {
            let mut acc = vec![0.0; s];
            for (g, &y) in rows.chunks_exact(s).zip(signs) {
                for (a, &v) in acc.iter_mut().zip(g) {
                    *a += y as f64 * v;
                }
            }
            let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(RecoveryError::DegenerateEstimate);
            }
            Ok(acc.into_iter().map(|v| v / norm).collect())
        }
        Estimator::NetDecode => {
            if s > 3 {
                return Err(RecoveryError::NetTooLarge(s));
            }
            let grid = sphere_grid(s, config.net_resolution);
            let scores: Vec<usize> = grid
                .par_iter()
                .map(|u| {
                    rows.chunks_exact(s)
                        .zip(signs)
                        .filter(|(g, &y)| sign(g.iter().zip(u).map(|(a, b)| a * b).sum()) == y)
                        .count()
                })
                .collect();
            let best = scores
                .iter()
                .enumerate()
                .fold(0, |best, (i, &sc)| if sc > scores[best] { i } else { best });
            Ok(grid[best].clone())
        }
    }
}

/// Points of the unit sphere in `R^s` (`s <= 3`) at roughly `step` spacing.
pub fn sphere_grid(s: usize, step: f64) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match s {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => {
            let count = (2.0 * PI / step).ceil() as usize;
            (0..count)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
        3 => {
            let rings = (PI / step).ceil() as usize;
            let mut points = Vec::new();
            for r in 0..=rings {
                let polar = PI * r as f64 / rings as f64;
                let around = ((2.0 * PI * polar.sin()) / step).ceil().max(1.0) as usize;
                for a in 0..around {
                    let az = 2.0 * PI * a as f64 / around as f64;
                    points.push(vec![polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]);
                }
            }
            points
        }
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRecovery {
    pub support: SupportRecovery,
    /// Unit-norm estimate, or the zero vector when nothing was recovered.
    pub estimate: SparseVector,
}

/// Stage one recovers the support from `b1`; stage two estimates the direction
/// from the Gaussian rows restricted to that support. The Gaussian rows are
/// drawn over all coordinates before stage one runs.
pub fn approx_recover(
    family: &SetFamily,
    b1: &SignPattern,
    gaussian: &GaussianMeasurements,
    config: &ApproxConfig,
) -> Result<ApproxRecovery, RecoveryError> {
    config.validate()?;
    if gaussian.n() != family.n() {
        return Err(SensingError::DimensionMismatch {
            expected: family.n(),
            found: gaussian.n(),
        }
        .into());
    }
    let support = recover_support(family, b1)?;
    let n = family.n();
    if support.support.is_empty() {
        let nonzero = gaussian.signs().iter().filter(|&&y| y != 0).count();
        if nonzero > 0 {
            return Err(RecoveryError::Inconsistent(nonzero));
        }
        return Ok(ApproxRecovery {
            support,
            estimate: SparseVector::zero(n),
        });
    }
    let columns = &support.support;
    let rows = gaussian.restricted_rows(columns);
    let direction = estimate_direction(&rows, gaussian.signs(), columns.len(), config)?;
    let entries = columns
        .iter()
        .copied()
        .zip(direction)
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let estimate = SparseVector::new(n, entries)?;
    Ok(ApproxRecovery { support, estimate })
}

/// `|| x/||x|| - xhat/||xhat|| ||_2`, in `[0, 2]`.
pub fn angular_error(x: &SparseVector, xhat: &SparseVector) -> Result<f64, RecoveryError> {
    if x.dim() != xhat.dim() {
        return Err(SensingError::DimensionMismatch {
            expected: x.dim(),
            found: xhat.dim(),
        }
        .into());
    }
    let u = x.normalized().ok_or(RecoveryError::ZeroSignal)?;
    let v = xhat.normalized().ok_or(RecoveryError::ZeroSignal)?;
    let mut indices: Vec<usize> = u.support().into_iter().chain(v.support()).collect();
    indices.sort_unstable();
    indices.dedup();
    let sq: f64 = indices.iter().map(|&i| (u.get(i) - v.get(i)).powi(2)).sum();
    Ok(sq.sqrt())
}
