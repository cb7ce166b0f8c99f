//! Exact evaluators for the measurement bounds, and the confusable-pair
//! constructions that turn a covered column into two signals with different
//! supports and identical sign patterns.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::family::{SetFamily, ViolationWitness};
use crate::seed;
use crate::sensing::{measure, SensingError, SensingMatrix, SparseVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("matrix has negative entries; use the real-valued construction")]
    NotNonnegative,
    #[error("could not push every covered row at least {epsilon} away from zero after {attempts} draws")]
    Degenerate { epsilon: f64, attempts: u32 },
    #[error("constructed signals measure differently at row {row}")]
    PatternMismatch { row: usize },
    #[error(transparent)]
    Sensing(#[from] SensingError),
}

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Upper bound on the size of a union-free family of subsets of `[m]` at arity
/// `k >= 2`: `k + C(m, t)` with `t = ceil((m - k) / C(k + 1, 2))`.
pub fn furedi_max_n(m: u64, k: u64) -> Result<BigUint, BoundsError> {
    if k < 2 {
        return Err(BoundsError::Precondition(format!("need k >= 2, got {k}")));
    }
    if m < k {
        return Err(BoundsError::Precondition(format!("need m >= k, got m = {m}, k = {k}")));
    }
    let pairs = k * (k + 1) / 2;
    let t = (m - k).div_ceil(pairs);
    Ok(binomial(m, t) + k)
}

/// Smallest `m` with `furedi_max_n(m, k) >= n`: a lower bound on the rows of
/// any support-recovery matrix for `n` coordinates.
pub fn min_m_support(n: u64, k: u64) -> Result<u64, BoundsError> {
    if k < 2 || n <= k {
        return Err(BoundsError::Precondition(format!(
            "need n > k >= 2, got n = {n}, k = {k}"
        )));
    }
    let target = BigUint::from(n);
    let mut m = k;
    while furedi_max_n(m, k)? < target {
        m += 1;
    }
    Ok(m)
}

/// `2^k * C(m, k)`, the number of regions `m` hyperplanes cut `R^k` into at most.
pub fn regions_upper(m: u64, k: u64) -> Result<BigUint, BoundsError> {
    if k == 0 {
        return Err(BoundsError::Precondition("need k >= 1".into()));
    }
    if m < 2 * k {
        return Err(BoundsError::Precondition(format!("need m >= 2k, got m = {m}, k = {k}")));
    }
    Ok(binomial(m, k) << (k as usize))
}

/// `(c / epsilon)^k`, the size of an `epsilon`-separated subset of the sphere.
pub fn cover_lower(k: u64, epsilon: f64, c: f64) -> Result<f64, BoundsError> {
    if epsilon.is_nan() || epsilon <= 0.0 || c.is_nan() || c <= 0.0 {
        return Err(BoundsError::Precondition(format!(
            "need epsilon > 0 and c > 0, got {epsilon} and {c}"
        )));
    }
    Ok((c / epsilon).powi(k as i32))
}

/// Relative slack for comparisons between exact counts and powers of decimal
/// inputs such as `epsilon = 0.01`.
const REAL_SLACK: f64 = 1e-12;

/// Smallest `m >= 2k` with `2^k * C(m, k) >= (c / epsilon)^k`.
pub fn min_m_approx(k: u64, epsilon: f64, c: f64) -> Result<u64, BoundsError> {
    if k == 0 {
        return Err(BoundsError::Precondition("need k >= 1".into()));
    }
    let target = k as f64 * (cover_lower(1, epsilon, c)?).ln();
    let log_regions = |m: u64| -> f64 {
        let log_binom: f64 = (0..k).map(|i| ((m - i) as f64 / (i + 1) as f64).ln()).sum();
        k as f64 * std::f64::consts::LN_2 + log_binom
    };
    let mut m = 2 * k;
    while log_regions(m) < target - REAL_SLACK * target.abs().max(1.0) {
        m += 1;
    }
    Ok(m)
}

/// Packing count `M = C(n, k) / C(n, floor(epsilon * k))` and the implied
/// `m >= ceil(log2 M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GvCount {
    pub ratio: BigRational,
    /// `max(1, floor(epsilon * k))`.
    pub lower_index: u64,
    pub implied_m: u64,
}

pub fn gv_count(n: u64, k: u64, epsilon: f64) -> Result<GvCount, BoundsError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) || k == 0 || k > n {
        return Err(BoundsError::Precondition(format!(
            "need 0 < epsilon*k <= k <= n, got n = {n}, k = {k}, epsilon = {epsilon}"
        )));
    }
    let lower_index = ((epsilon * k as f64 + REAL_SLACK).floor() as u64).clamp(1, k);
    let num = binomial(n, k);
    let den = binomial(n, lower_index);
    // smallest m with 2^m * den >= num
    let mut implied_m = 0u64;
    while (den.clone() << (implied_m as usize)) < num {
        implied_m += 1;
    }
    let ratio = BigRational::new(num.into(), den.into());
    Ok(GvCount {
        ratio,
        lower_index,
        implied_m,
    })
}

/// Column supports `B_j = { i : A_ij != 0 }`.
pub fn extract_family(a: &SensingMatrix) -> SetFamily {
    let sets = (1..=a.n())
        .map(|j| {
            a.column(j)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, _)| i as u32 + 1)
                .collect()
        })
        .collect();
    SetFamily::new(a.m(), sets).expect("row indices are in range")
}

fn check_witness(family: &SetFamily, witness: &ViolationWitness, k: usize) -> Result<(), BoundsError> {
    let n = family.n();
    let bad = |msg: String| Err(BoundsError::InvalidWitness(msg));
    if k == 0 {
        return bad("sparsity k must be at least 1".into());
    }
    if witness.others.len() > k - 1 {
        return bad(format!(
            "{} others exceed arity k - 1 = {}",
            witness.others.len(),
            k - 1
        ));
    }
    let mut all = witness.others.clone();
    all.push(witness.j0);
    if all.iter().any(|&j| j == 0 || j > n) {
        return bad(format!("indices must lie in 1..={n}"));
    }
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return bad("indices must be distinct".into());
    }
    let covered = witness.recompute_overlap(family);
    if covered != family.set(witness.j0).len() {
        return bad(format!(
            "column {} is not covered by the union of {:?}",
            witness.j0, witness.others
        ));
    }
    Ok(())
}

fn confirm_same_pattern(a: &SensingMatrix, x1: &SparseVector, x2: &SparseVector) -> Result<(), BoundsError> {
    let (b1, b2) = (measure(a, x1)?, measure(a, x2)?);
    match b1.values().iter().zip(b2.values()).position(|(u, v)| u != v) {
        Some(row) => Err(BoundsError::PatternMismatch { row: row + 1 }),
        None => Ok(()),
    }
}

/// For a nonnegative matrix whose column `j0` is covered by `k - 1` others:
/// `x1` is the indicator of the others and `x2` adds `j0`.
pub fn confusable_pair_nonneg(
    a: &SensingMatrix,
    witness: &ViolationWitness,
    k: usize,
) -> Result<(SparseVector, SparseVector), BoundsError> {
    if !a.is_nonnegative() {
        return Err(BoundsError::NotNonnegative);
    }
    check_witness(&extract_family(a), witness, k)?;
    let x1 = SparseVector::new(a.n(), witness.others.iter().map(|&j| (j, 1.0)).collect())?;
    let x2 = SparseVector::new(
        a.n(),
        witness.others.iter().chain([&witness.j0]).map(|&j| (j, 1.0)).collect(),
    )?;
    confirm_same_pattern(a, &x1, &x2)?;
    Ok((x1, x2))
}

/// Attempts before a real-valued construction is declared degenerate.
pub const CONFUSABLE_RETRIES: u32 = 64;

/// For any matrix with entries in `[-1, 1]` whose column `j0` is covered by
/// `k - 1` others: `x1` lives on the others and keeps every covered row well
/// away from zero; `x2 = x1 + epsilon * e_j0` cannot flip any of those signs.
///
/// Each retry redraws `x1` and doubles its scale. Rows are pushed beyond
/// `2 * epsilon` so that rounding in the perturbed sums cannot reach zero.
pub fn confusable_pair_real(
    a: &SensingMatrix,
    witness: &ViolationWitness,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<(SparseVector, SparseVector), BoundsError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(BoundsError::Precondition(format!("epsilon {epsilon} must be positive")));
    }
    let family = extract_family(a);
    check_witness(&family, witness, k)?;
    let mut covered: Vec<u32> = witness
        .others
        .iter()
        .flat_map(|&j| family.set(j).iter().copied())
        .collect();
    covered.sort_unstable();
    covered.dedup();

    let mut rng = seed::rng(seed);
    let mut scale = 1.0f64;
    for _ in 0..CONFUSABLE_RETRIES {
        let entries: Vec<(usize, f64)> = witness
            .others
            .iter()
            .map(|&j| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                (j, scale * sign * rng.random_range(0.5..1.5))
            })
            .collect();
        let x1 = SparseVector::new(a.n(), entries)?;
        let ax1 = a.apply(&x1)?;
        if covered.iter().all(|&i| ax1[i as usize - 1].abs() > 2.0 * epsilon) {
            let mut entries2 = x1.entries().to_vec();
            entries2.push((witness.j0, epsilon));
            let x2 = SparseVector::new(a.n(), entries2)?;
            confirm_same_pattern(a, &x1, &x2)?;
            return Ok((x1, x2));
        }
        scale *= 2.0;
    }
    Err(BoundsError::Degenerate {
        epsilon,
        attempts: CONFUSABLE_RETRIES,
    })
}

/// A random `m x n` matrix whose column `j0` is covered by `k - 1` other
/// columns, together with that planted witness.
///
/// Entries are nonzero with probability 0.3 and uniform in `[-1, 1]` (or
/// `[0, 1]` when `nonnegative`); column `j0` keeps a random subset of the rows
/// touched by the others and may end up empty.
pub fn planted_covered_matrix(
    m: usize,
    n: usize,
    k: usize,
    nonnegative: bool,
    seed: u64,
) -> Result<(SensingMatrix, ViolationWitness), BoundsError> {
    if k == 0 || k > n || m == 0 {
        return Err(BoundsError::Precondition(format!(
            "need 1 <= k <= n and m >= 1, got m = {m}, n = {n}, k = {k}"
        )));
    }
    let mut rng = seed::rng(seed);
    let entry = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        let v: f64 = rng.random_range(0.05..=1.0);
        if nonnegative || rng.random::<bool>() {
            v
        } else {
            -v
        }
    };
    let mut rows = vec![vec![0.0; n]; m];
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            if rng.random_bool(0.3) {
                *v = entry(&mut rng);
            }
        }
    }
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_iter().collect();
    let j0 = picked.pop().expect("k >= 1");
    let mut others = picked;
    others.sort_unstable();
    for row in rows.iter_mut() {
        let touched = others.iter().any(|&j| row[j] != 0.0);
        row[j0] = if touched && rng.random_bool(0.6) {
            entry(&mut rng)
        } else {
            0.0
        };
    }
    let a = SensingMatrix::from_rows(n, &rows)?;
    let witness = ViolationWitness {
        j0: j0 + 1,
        others: others.iter().map(|&j| j + 1).collect(),
        overlap: a.column(j0 + 1).iter().filter(|&&v| v != 0.0).count(),
    };
    Ok((a, witness))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundValue {
    Integer { value: String },
    Rational { numer: String, denom: String },
    Real { value: f64 },
}

/// A self-describing bound evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, Value>,
    pub value: BoundValue,
    pub formula_ref: String,
}

fn report(name: &str, inputs: Value, value: BoundValue, formula: &str) -> BoundReport {
    let inputs = match inputs {
        Value::Object(map) => map.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    BoundReport {
        name: name.to_string(),
        inputs,
        value,
        formula_ref: formula.to_string(),
    }
}

fn integer(v: impl ToString) -> BoundValue {
    BoundValue::Integer { value: v.to_string() }
}

pub fn furedi_report(m: u64, k: u64) -> Result<BoundReport, BoundsError> {
    Ok(report(
        "furedi_max_n",
        json!({ "m": m, "k": k }),
        integer(furedi_max_n(m, k)?),
        "n <= k + C(m, t), t = ceil((m - k) / C(k + 1, 2))",
    ))
}

pub fn min_m_support_report(n: u64, k: u64) -> Result<BoundReport, BoundsError> {
    Ok(report(
        "min_m_support",
        json!({ "n": n, "k": k }),
        integer(min_m_support(n, k)?),
        "min m such that k + C(m, ceil((m - k) / C(k + 1, 2))) >= n",
    ))
}

pub fn regions_report(m: u64, k: u64) -> Result<BoundReport, BoundsError> {
    Ok(report(
        "regions_upper",
        json!({ "m": m, "k": k }),
        integer(regions_upper(m, k)?),
        "2^k * C(m, k)",
    ))
}

pub fn cover_report(k: u64, epsilon: f64, c: f64) -> Result<BoundReport, BoundsError> {
    Ok(report(
        "cover_lower",
        json!({ "k": k, "epsilon": epsilon, "c": c }),
        BoundValue::Real {
            value: cover_lower(k, epsilon, c)?,
        },
        "(c / epsilon)^k",
    ))
}

pub fn min_m_approx_report(k: u64, epsilon: f64, c: f64) -> Result<BoundReport, BoundsError> {
    Ok(report(
        "min_m_approx",
        json!({ "k": k, "epsilon": epsilon, "c": c }),
        integer(min_m_approx(k, epsilon, c)?),
        "min m >= 2k such that 2^k * C(m, k) >= (c / epsilon)^k",
    ))
}

pub fn gv_reports(n: u64, k: u64, epsilon: f64) -> Result<Vec<BoundReport>, BoundsError> {
    let gv = gv_count(n, k, epsilon)?;
    let inputs = json!({ "n": n, "k": k, "epsilon": epsilon, "lower_index": gv.lower_index });
    Ok(vec![
        report(
            "gv_count",
            inputs.clone(),
            BoundValue::Rational {
                numer: gv.ratio.numer().to_string(),
                denom: gv.ratio.denom().to_string(),
            },
            "M = C(n, k) / C(n, max(1, floor(epsilon * k)))",
        ),
        report(
            "gv_min_m",
            inputs,
            integer(gv.implied_m),
            "min m such that 2^m >= C(n, k) / C(n, max(1, floor(epsilon * k)))",
        ),
    ])
}

impl GvCount {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::INFINITY)
    }
}
