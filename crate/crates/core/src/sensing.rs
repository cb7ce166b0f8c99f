//! Sparse signals, sensing matrices and the one-bit measurement map
//! `x -> sign(Ax)` with `sign(0) = 0`.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::SetFamily;
use crate::seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensingError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid sign pattern: value {0} is not -1, 0 or 1")]
    InvalidPattern(i64),
    #[error("sparsity {k} exceeds dimension {n}")]
    SparsityExceedsDimension { k: usize, n: usize },
    #[error("adversarial-cancel needs the set family behind the matrix")]
    MissingFamily,
    #[error("invalid value model: {0}")]
    BadModel(String),
}

/// A vector in `R^dim` stored as sorted `(index, value)` pairs with 1-based
/// indices and nonzero values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

#[derive(Deserialize)]
struct RawSignal {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl TryFrom<RawSignal> for SparseVector {
    type Error = SensingError;

    fn try_from(raw: RawSignal) -> Result<Self, Self::Error> {
        SparseVector::new(raw.dim, raw.entries)
    }
}

impl SparseVector {
    /// Sorts entries by index; rejects out-of-range or repeated indices and
    /// zero or non-finite values.
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self, SensingError> {
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SensingError::InvalidSignal(format!("index {} repeated", w[0].0)));
            }
        }
        for &(i, v) in &entries {
            if i == 0 || i > dim {
                return Err(SensingError::InvalidSignal(format!("index {i} outside 1..={dim}")));
            }
            if v == 0.0 || !v.is_finite() {
                return Err(SensingError::InvalidSignal(format!(
                    "value {v} at index {i} must be nonzero and finite"
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// Keeps the nonzero coordinates of a dense vector.
    pub fn from_dense(values: &[f64]) -> Result<Self, SensingError> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i + 1, v))
            .collect();
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn l0(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn norm2(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Ratio of the largest to the smallest nonzero magnitude.
    pub fn condition_number(&self) -> Option<f64> {
        let mags = self.entries.iter().map(|&(_, v)| v.abs());
        let max = mags
            .clone()
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))?;
        let min = mags.fold(f64::INFINITY, f64::min);
        Some(max / min)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            dense[i - 1] = v;
        }
        dense
    }

    /// `c * x`; scaling by zero gives the zero vector.
    pub fn scaled(&self, c: f64) -> SparseVector {
        if c == 0.0 {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, v)| (i, c * v)).collect(),
        }
    }

    /// `x / ||x||_2`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<SparseVector> {
        let norm = self.norm2();
        (norm > 0.0).then(|| self.scaled(1.0 / norm))
    }
}

/// An `m x n` real matrix with entries in `[-1, 1]`.
///
/// Stored column-major so that measuring a sparse signal touches only the
/// columns on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    m: usize,
    n: usize,
    columns: Vec<f64>,
    family: Option<SetFamily>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDocument {
    m: usize,
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for SensingMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixDocument {
            m: self.m,
            n: self.n,
            rows: self.rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SensingMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = MatrixDocument::deserialize(deserializer)?;
        if doc.rows.len() != doc.m {
            return Err(serde::de::Error::custom(format!(
                "matrix declares m = {} but lists {} rows",
                doc.m,
                doc.rows.len()
            )));
        }
        SensingMatrix::from_rows(doc.n, &doc.rows).map_err(serde::de::Error::custom)
    }
}

impl SensingMatrix {
    /// Builds a matrix from rows of length `n`; entries must lie in `[-1, 1]`.
    pub fn from_rows(n: usize, rows: &[Vec<f64>]) -> Result<Self, SensingError> {
        let m = rows.len();
        let mut columns = vec![0.0; m * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SensingError::InvalidMatrix(format!(
                    "row {} has length {}, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(SensingError::InvalidMatrix(format!(
                        "entry ({}, {}) = {v} outside [-1, 1]",
                        i + 1,
                        j + 1
                    )));
                }
                columns[j * m + i] = v;
            }
        }
        Ok(Self {
            m,
            n,
            columns,
            family: None,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `A_ij` with 1-based `i`, `j`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[(j - 1) * self.m + (i - 1)]
    }

    /// Column `j` (1-based) as a slice of length `m`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[(j - 1) * self.m..j * self.m]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (1..=self.m)
            .map(|i| (1..=self.n).map(|j| self.value(i, j)).collect())
            .collect()
    }

    /// The family this matrix was derived from, if any.
    pub fn family(&self) -> Option<&SetFamily> {
        self.family.as_ref()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.columns.iter().all(|&v| v >= 0.0)
    }

    /// `Ax`, summing the support entries of each row in index order.
    pub fn apply(&self, x: &SparseVector) -> Result<Vec<f64>, SensingError> {
        if x.dim() != self.n {
            return Err(SensingError::DimensionMismatch {
                expected: self.n,
                found: x.dim(),
            });
        }
        let mut acc = vec![0.0; self.m];
        for &(j, v) in x.entries() {
            for (a, &col) in acc.iter_mut().zip(self.column(j)) {
                if col != 0.0 {
                    *a += col * v;
                }
            }
        }
        Ok(acc)
    }
}

/// The 0-1 incidence matrix `A_ij = 1` iff `i` is in `B_j`.
pub fn matrix_from_family(family: &SetFamily) -> SensingMatrix {
    let (m, n) = (family.m(), family.n());
    let mut columns = vec![0.0; m * n];
    for (j, set) in family.sets().iter().enumerate() {
        for &i in set {
            columns[j * m + (i as usize - 1)] = 1.0;
        }
    }
    SensingMatrix {
        m,
        n,
        columns,
        family: Some(family.clone()),
    }
}

/// Element of `{-1, 0, +1}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct SignPattern {
    values: Vec<i8>,
}

#[derive(Deserialize)]
struct RawPattern {
    values: Vec<i64>,
}

impl TryFrom<RawPattern> for SignPattern {
    type Error = SensingError;

    fn try_from(raw: RawPattern) -> Result<Self, Self::Error> {
        let values = raw
            .values
            .into_iter()
            .map(|v| match v {
                -1..=1 => Ok(v as i8),
                other => Err(SensingError::InvalidPattern(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(SignPattern { values })
    }
}

impl SignPattern {
    pub fn new(values: Vec<i8>) -> Result<Self, SensingError> {
        if let Some(&bad) = values.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(SensingError::InvalidPattern(bad as i64));
        }
        Ok(Self { values })
    }

    pub fn zeros(m: usize) -> Self {
        Self { values: vec![0; m] }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_nonzero(&self, i: usize) -> bool {
        self.values[i - 1] != 0
    }

    pub fn negated(&self) -> SignPattern {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Three-valued sign with a zero band `|v| <= tau`.
pub fn sign_with_tolerance(v: f64, tau: f64) -> i8 {
    if v.abs() <= tau {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// `sign(Ax)` with `sign(0) = 0`.
pub fn measure(a: &SensingMatrix, x: &SparseVector) -> Result<SignPattern, SensingError> {
    measure_with_tolerance(a, x, 0.0)
}

/// `sign(Ax)` where inner products with `|<a_i, x>| <= tau` read as 0.
pub fn measure_with_tolerance(a: &SensingMatrix, x: &SparseVector, tau: f64) -> Result<SignPattern, SensingError> {
    if tau.is_nan() || tau < 0.0 {
        return Err(SensingError::InvalidSignal(format!(
            "zero tolerance {tau} must be >= 0"
        )));
    }
    let values = a.apply(x)?.into_iter().map(|v| sign_with_tolerance(v, tau)).collect();
    Ok(SignPattern { values })
}

/// Measures many signals in parallel, preserving order.
pub fn measure_many(a: &SensingMatrix, signals: &[SparseVector]) -> Result<Vec<SignPattern>, SensingError> {
    signals.par_iter().map(|x| measure(a, x)).collect()
}

/// How nonzero values are drawn for a generated signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueModel {
    /// Every value is 1.
    UnitPositive,
    /// Random sign times a magnitude uniform in `[0.5, 1.5)`.
    RandomSigns,
    /// Small integers chosen to zero out as many rows shared by two or more
    /// support columns as possible.
    AdversarialCancel,
    /// Random signs with magnitudes spanning exactly `[1, K]`.
    ConditionNumber(f64),
}

impl fmt::Display for ValueModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueModel::UnitPositive => f.write_str("unit-positive"),
            ValueModel::RandomSigns => f.write_str("random-signs"),
            ValueModel::AdversarialCancel => f.write_str("adversarial-cancel"),
            ValueModel::ConditionNumber(k) => write!(f, "condition-number:{k}"),
        }
    }
}

impl FromStr for ValueModel {
    type Err = SensingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit-positive" => Ok(ValueModel::UnitPositive),
            "random-signs" | "random-signs-uniform" => Ok(ValueModel::RandomSigns),
            "adversarial-cancel" => Ok(ValueModel::AdversarialCancel),
            other => {
                let k = other
                    .strip_prefix("condition-number:")
                    .or_else(|| other.strip_prefix("condition-number="))
                    .and_then(|k| k.parse::<f64>().ok())
                    .ok_or_else(|| SensingError::BadModel(other.to_string()))?;
                Ok(ValueModel::ConditionNumber(k))
            }
        }
    }
}

/// A signal in `R^n` with a uniformly random `k`-subset support and values
/// drawn from `model`. `family` is required for [`ValueModel::AdversarialCancel`].
pub fn generate_signal(
    n: usize,
    k: usize,
    model: ValueModel,
    family: Option<&SetFamily>,
    seed: u64,
) -> Result<SparseVector, SensingError> {
    if k > n {
        return Err(SensingError::SparsityExceedsDimension { k, n });
    }
    let mut rng = seed::rng(seed);
    let mut support: Vec<usize> = index::sample(&mut rng, n, k).into_iter().map(|i| i + 1).collect();
    support.sort_unstable();
    signal_on_support(n, &support, model, family, &mut rng)
}

/// Draws values on a fixed support (1-based, sorted or not).
pub fn signal_on_support(
    n: usize,
    support: &[usize],
    model: ValueModel,
    family: Option<&SetFamily>,
    rng: &mut ChaCha8Rng,
) -> Result<SparseVector, SensingError> {
    let s = support.len();
    let values: Vec<f64> = match model {
        ValueModel::UnitPositive => vec![1.0; s],
        ValueModel::RandomSigns => (0..s).map(|_| random_sign(rng) * rng.random_range(0.5..1.5)).collect(),
        ValueModel::ConditionNumber(k) => {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(SensingError::BadModel(format!(
                    "condition number {k} must be finite and >= 1"
                )));
            }
            let mut mags: Vec<f64> = (0..s)
                .map(|i| match i {
                    0 => 1.0,
                    1 => k,
                    _ => (rng.random::<f64>() * k.ln()).exp().clamp(1.0, k),
                })
                .collect();
            mags.shuffle(rng);
            mags.into_iter().map(|m| random_sign(rng) * m).collect()
        }
        ValueModel::AdversarialCancel => {
            let family = family.ok_or(SensingError::MissingFamily)?;
            if family.n() != n {
                return Err(SensingError::DimensionMismatch {
                    expected: n,
                    found: family.n(),
                });
            }
            let sign = random_sign(rng);
            cancelling_values(family, support)
                .into_iter()
                .map(|v| sign * v as f64)
                .collect()
        }
    };
    SparseVector::new(n, support.iter().copied().zip(values).collect())
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

const CANCEL_CANDIDATES: [i64; 6] = [1, -1, 2, -2, 3, -3];

/// Supports up to this size are searched exhaustively over the candidates;
/// larger ones are assigned greedily.
const EXHAUSTIVE_CANCEL_LIMIT: usize = 5;

/// Integer values on `support` maximizing the number of rows, among those
/// covered by two or more support columns, whose inner product is exactly 0.
/// Ties go to the first assignment in candidate order.
fn cancelling_values(family: &SetFamily, support: &[usize]) -> Vec<i64> {
    let s = support.len();
    // For each row, which support positions cover it.
    let mut cover: std::collections::BTreeMap<u32, Vec<usize>> = std::collections::BTreeMap::new();
    for (pos, &j) in support.iter().enumerate() {
        for &row in family.set(j) {
            cover.entry(row).or_default().push(pos);
        }
    }
    let shared: Vec<Vec<usize>> = cover.into_values().filter(|c| c.len() >= 2).collect();
    let zeros = |values: &[i64], upto: usize| {
        shared
            .iter()
            .filter(|cols| cols.iter().all(|&c| c < upto))
            .filter(|cols| cols.iter().map(|&c| values[c]).sum::<i64>() == 0)
            .count()
    };

    let mut values = vec![CANCEL_CANDIDATES[0]; s];
    if s <= EXHAUSTIVE_CANCEL_LIMIT {
        let mut best = (zeros(&values, s), values.clone());
        let mut digits = vec![0usize; s];
        'outer: loop {
            let mut i = s;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < CANCEL_CANDIDATES.len() {
                    break;
                }
                digits[i] = 0;
            }
            for (v, &d) in values.iter_mut().zip(&digits) {
                *v = CANCEL_CANDIDATES[d];
            }
            let score = zeros(&values, s);
            if score > best.0 {
                best = (score, values.clone());
            }
        }
        best.1
    } else {
        for pos in 1..s {
            let mut best = (0, CANCEL_CANDIDATES[0]);
            for (ci, &cand) in CANCEL_CANDIDATES.iter().enumerate() {
                values[pos] = cand;
                let score = zeros(&values, pos + 1);
                if ci == 0 || score > best.0 {
                    best = (score, cand);
                }
            }
            values[pos] = best.1;
        }
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SetFamily {
        SetFamily::new(6, vec![vec![1, 2, 3], vec![3, 4, 5], vec![1, 5, 6]]).unwrap()
    }

    #[test]
    fn incidence_matrix() {
        let a = matrix_from_family(&triangle());
        let expected = vec![
            vec![1.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(a.rows(), expected);
        assert_eq!(a.family(), Some(&triangle()));
    }

    #[test]
    fn disjoint_columns_are_orthogonal() {
        let f = SetFamily::new(6, vec![vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let a = matrix_from_family(&f);
        for i in 1..=3 {
            for j in (i + 1)..=3 {
                let dot: f64 = a.column(i).iter().zip(a.column(j)).map(|(x, y)| x * y).sum();
                assert_eq!(dot, 0.0);
            }
        }
    }

    #[test]
    fn measure_examples() {
        let a = matrix_from_family(&triangle());
        let x = SparseVector::new(3, vec![(2, -2.0)]).unwrap();
        let b = measure(&a, &x).unwrap();
        assert_eq!(b.values(), &[0, 0, -1, -1, -1, 0]);
        assert_eq!(b.support(), vec![3, 4, 5]);
        assert_eq!(measure(&a, &SparseVector::zero(3)).unwrap(), SignPattern::zeros(6));
        assert!(matches!(
            measure(&a, &SparseVector::zero(4)),
            Err(SensingError::DimensionMismatch { expected: 3, found: 4 })
        ));
    }

    #[test]
    fn scalar_sign() {
        assert_eq!(sign_with_tolerance(-3.2, 0.0), -1);
        assert_eq!(sign_with_tolerance(0.0, 0.0), 0);
        assert_eq!(sign_with_tolerance(2.5, 0.0), 1);
        assert_eq!(sign_with_tolerance(0.05, 0.1), 0);
    }

    #[test]
    fn tolerance_band() {
        let a = matrix_from_family(&triangle());
        let x = SparseVector::new(3, vec![(1, 1.0), (2, -0.999)]).unwrap();
        assert_eq!(measure(&a, &x).unwrap().values()[2], 1);
        assert_eq!(measure_with_tolerance(&a, &x, 0.01).unwrap().values()[2], 0);
        assert!(measure_with_tolerance(&a, &x, -1.0).is_err());
    }

    #[test]
    fn signal_validation() {
        assert!(SparseVector::new(3, vec![(0, 1.0)]).is_err());
        assert!(SparseVector::new(3, vec![(4, 1.0)]).is_err());
        assert!(SparseVector::new(3, vec![(1, 0.0)]).is_err());
        assert!(SparseVector::new(3, vec![(1, 1.0), (1, 2.0)]).is_err());
        let x = SparseVector::new(3, vec![(3, -4.0), (1, 2.0)]).unwrap();
        assert_eq!(x.support(), vec![1, 3]);
        assert_eq!(x.condition_number(), Some(2.0));
        assert_eq!(SparseVector::zero(3).condition_number(), None);
        let json = serde_json::to_string(&SparseVector::zero(5)).unwrap();
        assert_eq!(json, r#"{"dim":5,"entries":[]}"#);
        assert_eq!(serde_json::from_str::<SparseVector>(&json).unwrap().dim(), 5);
    }

    #[test]
    fn pattern_json() {
        let b: SignPattern = serde_json::from_str(r#"{"values":[-1,0,1]}"#).unwrap();
        assert_eq!(b.values(), &[-1, 0, 1]);
        assert!(serde_json::from_str::<SignPattern>(r#"{"values":[2]}"#).is_err());
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"values":[-1,0,1]}"#);
    }

    #[test]
    fn matrix_json_and_range() {
        let a: SensingMatrix = serde_json::from_str(r#"{"m":2,"n":2,"rows":[[1,0.5],[0,0]]}"#).unwrap();
        assert_eq!(a.value(1, 2), 0.5);
        assert!(serde_json::from_str::<SensingMatrix>(r#"{"m":1,"n":1,"rows":[[1.5]]}"#).is_err());
        assert!(serde_json::from_str::<SensingMatrix>(r#"{"m":2,"n":1,"rows":[[1]]}"#).is_err());
    }

    #[test]
    fn unit_positive_signal() {
        let x = generate_signal(5, 2, ValueModel::UnitPositive, None, 11).unwrap();
        assert_eq!(x.l0(), 2);
        assert!(x.entries().iter().all(|&(_, v)| v == 1.0));
        assert_eq!(x, generate_signal(5, 2, ValueModel::UnitPositive, None, 11).unwrap());
        assert!(matches!(
            generate_signal(3, 4, ValueModel::UnitPositive, None, 0),
            Err(SensingError::SparsityExceedsDimension { k: 4, n: 3 })
        ));
    }

    #[test]
    fn condition_number_is_exact() {
        for seed in 0..20 {
            let x = generate_signal(30, 3, ValueModel::ConditionNumber(1e6), None, seed).unwrap();
            assert_eq!(x.condition_number(), Some(1e6));
        }
    }

    #[test]
    fn adversarial_cancel_zeroes_shared_row() {
        let f = triangle();
        let mut rng = seed::rng(0);
        let x = signal_on_support(3, &[1, 2], ValueModel::AdversarialCancel, Some(&f), &mut rng).unwrap();
        // Row 3 lies in B1 ∩ B2; x1 = -x2 cancels it.
        assert_eq!(x.get(1), -x.get(2));
        assert_eq!(x.get(1).abs(), 1.0);
        let b = measure(&matrix_from_family(&f), &x).unwrap();
        assert_eq!(b.values()[2], 0);
        assert!(matches!(
            generate_signal(3, 2, ValueModel::AdversarialCancel, None, 0),
            Err(SensingError::MissingFamily)
        ));
    }

    #[test]
    fn model_parsing() {
        assert_eq!("unit-positive".parse::<ValueModel>().unwrap(), ValueModel::UnitPositive);
        assert_eq!(
            "condition-number:1e6".parse::<ValueModel>().unwrap(),
            ValueModel::ConditionNumber(1e6)
        );
        assert!("gaussian".parse::<ValueModel>().is_err());
        let json = serde_json::to_string(&ValueModel::ConditionNumber(10.0)).unwrap();
        assert_eq!(json, r#"{"condition-number":10.0}"#);
    }
}
