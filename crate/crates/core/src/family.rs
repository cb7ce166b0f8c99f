//! Set families and exact verification of the union-free properties.
//!
//! Sets are indexed `1..=n` and hold elements of the ground set `1..=m`, stored
//! sorted. A family is an `(n, m, d, k, alpha)` robust union-free family when
//! every set has size `d` and for all distinct `j0, j1, .., jk`
//!
//! ```text
//! |B_j0 ∩ (B_j1 ∪ .. ∪ B_jk)| < alpha * |B_j0|
//! ```
//!
//! With `alpha = 1` this is the plain union-free condition (no set is covered
//! by the union of `k` others).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraction::Fraction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("family declares n = {declared} but lists {actual} sets")]
    CountMismatch { declared: usize, actual: usize },
    #[error("set {set} contains element {element} outside the ground set 1..={m}")]
    ElementOutOfRange { set: usize, element: u32, m: usize },
    #[error("set {set} contains element {element} more than once")]
    DuplicateElement { set: usize, element: u32 },
    #[error("{what} mismatch: parameters say {expected}, family has {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("set {index} has size {size}, expected uniform size {expected}")]
    NonUniform { index: usize, size: usize, expected: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("union arity k = {k} out of range for a family of {n} sets")]
    ArityOutOfRange { k: usize, n: usize },
    #[error("family is empty")]
    Empty,
}

/// `n` subsets of the ground set `1..=m`, each stored as a sorted list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct SetFamily {
    n: usize,
    m: usize,
    sets: Vec<Vec<u32>>,
}

#[derive(Deserialize)]
struct RawFamily {
    n: usize,
    m: usize,
    sets: Vec<Vec<u32>>,
}

impl TryFrom<RawFamily> for SetFamily {
    type Error = FamilyError;

    fn try_from(raw: RawFamily) -> Result<Self, Self::Error> {
        SetFamily::with_count(raw.n, raw.m, raw.sets)
    }
}

impl SetFamily {
    /// Builds a family over `1..=m`; each set is sorted, and must be
    /// duplicate-free with every element in range.
    pub fn new(m: usize, sets: Vec<Vec<u32>>) -> Result<Self, FamilyError> {
        let mut sets = sets;
        for (j, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            for w in set.windows(2) {
                if w[0] == w[1] {
                    return Err(FamilyError::DuplicateElement {
                        set: j + 1,
                        element: w[0],
                    });
                }
            }
            if let Some(&bad) = set.iter().find(|&&e| e == 0 || e as usize > m) {
                return Err(FamilyError::ElementOutOfRange {
                    set: j + 1,
                    element: bad,
                    m,
                });
            }
        }
        Ok(Self { n: sets.len(), m, sets })
    }

    /// Like [`SetFamily::new`] but also checks a declared set count.
    pub fn with_count(n: usize, m: usize, sets: Vec<Vec<u32>>) -> Result<Self, FamilyError> {
        if n != sets.len() {
            return Err(FamilyError::CountMismatch {
                declared: n,
                actual: sets.len(),
            });
        }
        Self::new(m, sets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// Set `B_j` for `j` in `1..=n`.
    pub fn set(&self, j: usize) -> &[u32] {
        &self.sets[j - 1]
    }

    /// The common set size, if all sets have the same size.
    pub fn uniform_size(&self) -> Option<usize> {
        let first = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == first).then_some(first)
    }

    /// Checks every set has size `d`, reporting the first offender.
    pub fn check_uniform(&self, d: usize) -> Result<(), FamilyError> {
        match self.sets.iter().position(|s| s.len() != d) {
            Some(j) => Err(FamilyError::NonUniform {
                index: j + 1,
                size: self.sets[j].len(),
                expected: d,
            }),
            None => Ok(()),
        }
    }
}

/// Size of the intersection of two sorted lists.
pub fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Parameters `(n, m, d, k, alpha)` of a robust union-free family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuffParams {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub alpha: Fraction,
}

impl RuffParams {
    pub fn new(n: usize, m: usize, d: usize, k: usize, alpha: Fraction) -> Result<Self, FamilyError> {
        let params = Self { n, m, d, k, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        if self.d == 0 || self.d > self.m {
            return Err(FamilyError::InvalidParams(format!(
                "need 1 <= d <= m, got d = {}, m = {}",
                self.d, self.m
            )));
        }
        if self.k == 0 || self.k + 1 > self.n {
            return Err(FamilyError::InvalidParams(format!(
                "need 1 <= k <= n - 1, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if self.alpha.is_zero() || self.alpha.gt_one() {
            return Err(FamilyError::InvalidParams(format!(
                "need 0 < alpha <= 1, got alpha = {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Smallest overlap that violates the strict bound: `ceil(alpha * d)`.
    pub fn violation_threshold(&self) -> usize {
        self.alpha.ceil_scaled(self.d as u64) as usize
    }

    fn check_family(&self, family: &SetFamily) -> Result<(), FamilyError> {
        self.validate()?;
        if family.n() != self.n {
            return Err(FamilyError::DimensionMismatch {
                what: "n",
                expected: self.n,
                found: family.n(),
            });
        }
        if family.m() != self.m {
            return Err(FamilyError::DimensionMismatch {
                what: "m",
                expected: self.m,
                found: family.m(),
            });
        }
        family.check_uniform(self.d)
    }
}

/// A tuple `(j0; others)` where `|B_j0 ∩ ∪ others|` reaches the forbidden threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub j0: usize,
    pub others: Vec<usize>,
    pub overlap: usize,
}

impl ViolationWitness {
    /// Recomputes `|B_j0 ∩ ∪ others|` from scratch.
    pub fn recompute_overlap(&self, family: &SetFamily) -> usize {
        let mut union: Vec<u32> = self
            .others
            .iter()
            .flat_map(|&j| family.set(j).iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        intersection_len(family.set(self.j0), &union)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: ViolationWitness },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&ViolationWitness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail { witness } => Some(witness),
        }
    }
}

/// Exhaustive robust union-free check.
///
/// On failure the witness is lexicographically least: smallest `j0`, then the
/// smallest sorted `others` tuple.
pub fn verify_ruff(family: &SetFamily, params: &RuffParams) -> Result<Verdict, FamilyError> {
    params.check_family(family)?;
    let threshold = params.violation_threshold();
    Ok(find_violation(family, params.k, |_| threshold))
}

/// Exhaustive union-free check at arity `k`; set sizes may differ.
///
/// `k = 0` is accepted and fails exactly on empty sets.
pub fn verify_uff(family: &SetFamily, k: usize) -> Result<Verdict, FamilyError> {
    if family.n() == 0 {
        return Err(FamilyError::Empty);
    }
    if k + 1 > family.n() {
        return Err(FamilyError::ArityOutOfRange { k, n: family.n() });
    }
    Ok(find_violation(family, k, |j0| family.sets[j0].len()))
}

fn find_violation(family: &SetFamily, k: usize, threshold: impl Fn(usize) -> usize + Sync) -> Verdict {
    let found = (0..family.n())
        .into_par_iter()
        .find_map_first(|j0| search_from(family, j0, k, threshold(j0)));
    match found {
        Some(witness) => Verdict::Fail { witness },
        None => Verdict::Pass,
    }
}

/// Searches all `k`-subsets of the other sets for a union hitting at least
/// `threshold` elements of `B_j0`, in lexicographic order.
///
/// Every other set is first reduced to a bitmask over the positions of `B_j0`,
/// so a union is an OR and an overlap is a popcount.
fn search_from(family: &SetFamily, j0: usize, k: usize, threshold: usize) -> Option<ViolationWitness> {
    let n = family.n();
    let candidates: Vec<usize> = (0..n).filter(|&j| j != j0).collect();
    let make_witness = |chosen: &[usize], overlap: usize| ViolationWitness {
        j0: j0 + 1,
        others: chosen.iter().map(|&c| candidates[c] + 1).collect(),
        overlap,
    };
    if threshold == 0 {
        let chosen: Vec<usize> = (0..k).collect();
        let witness = make_witness(&chosen, 0);
        let overlap = witness.recompute_overlap(family);
        return Some(ViolationWitness { overlap, ..witness });
    }

    let base = &family.sets[j0];
    let words = base.len().div_ceil(64);
    let mut masks = vec![0u64; candidates.len() * words];
    let mut weights = Vec::with_capacity(candidates.len());
    for (c, &j) in candidates.iter().enumerate() {
        let mask = &mut masks[c * words..(c + 1) * words];
        weights.push(fill_position_mask(base, &family.sets[j], mask));
    }

    // top[r] = sum of the r largest weights; bounds any completion with r more picks.
    let mut sorted = weights.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut top = vec![0usize; k + 1];
    for r in 1..=k {
        top[r] = top[r - 1] + sorted[r - 1];
    }
    if top[k] < threshold {
        return None;
    }

    let mut search = Search {
        masks: &masks,
        words,
        k,
        threshold,
        top: &top,
        ncand: candidates.len(),
        stack: vec![0u64; (k + 1) * words],
        chosen: Vec::with_capacity(k),
    };
    search
        .descend(0, 0)
        .map(|(chosen, overlap)| make_witness(&chosen, overlap))
}

/// Marks the positions of `base` present in `other`; returns how many.
fn fill_position_mask(base: &[u32], other: &[u32], mask: &mut [u64]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < base.len() && j < other.len() {
        match base[i].cmp(&other[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                mask[i / 64] |= 1u64 << (i % 64);
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

struct Search<'a> {
    masks: &'a [u64],
    words: usize,
    k: usize,
    threshold: usize,
    top: &'a [usize],
    ncand: usize,
    stack: Vec<u64>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn union_size(&self, chosen: &[usize]) -> usize {
        let w = self.words;
        (0..w)
            .map(|i| {
                chosen
                    .iter()
                    .fold(0u64, |acc, &c| acc | self.masks[c * w + i])
                    .count_ones() as usize
            })
            .sum()
    }

    fn descend(&mut self, level: usize, start: usize) -> Option<(Vec<usize>, usize)> {
        let w = self.words;
        let remaining_after = self.k - level - 1;
        for c in start..=(self.ncand - (self.k - level)) {
            let (lower, upper) = self.stack.split_at_mut((level + 1) * w);
            let acc = &lower[level * w..];
            let next = &mut upper[..w];
            let mask = &self.masks[c * w..(c + 1) * w];
            let mut covered = 0usize;
            for ((dst, &a), &b) in next.iter_mut().zip(acc).zip(mask) {
                *dst = a | b;
                covered += dst.count_ones() as usize;
            }
            if covered >= self.threshold {
                // Any completion violates; the smallest one is lexicographically least.
                let mut chosen = self.chosen.clone();
                chosen.push(c);
                chosen.extend(c + 1..c + 1 + remaining_after);
                let overlap = self.union_size(&chosen);
                return Some((chosen, overlap));
            }
            if remaining_after == 0 || covered + self.top[remaining_after] < self.threshold {
                continue;
            }
            self.chosen.push(c);
            if let Some(found) = self.descend(level + 1, c + 1) {
                return Some(found);
            }
            self.chosen.pop();
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CertificateVerdict {
    Certified { max_overlap: usize },
    Inconclusive { pair: (usize, usize), overlap: usize },
}

impl CertificateVerdict {
    pub fn certified(&self) -> bool {
        matches!(self, CertificateVerdict::Certified { .. })
    }
}

/// Sufficient pairwise condition: `max |B_i ∩ B_j| < alpha * d / k` implies the
/// family is an `(n, m, d, k, alpha)` robust union-free family.
pub fn pairwise_certificate(family: &SetFamily, params: &RuffParams) -> Result<CertificateVerdict, FamilyError> {
    params.check_family(family)?;
    let worst = max_pairwise_overlap(family);
    let (overlap, pair) = worst.unwrap_or((0, (0, 0)));
    let scaled = (overlap * params.k) as u64;
    if params.alpha.cmp_scaled(scaled, params.d as u64) == Ordering::Less {
        Ok(CertificateVerdict::Certified { max_overlap: overlap })
    } else {
        Ok(CertificateVerdict::Inconclusive { pair, overlap })
    }
}

/// Largest pairwise intersection and the lexicographically first pair attaining it.
pub fn max_pairwise_overlap(family: &SetFamily) -> Option<(usize, (usize, usize))> {
    let n = family.n();
    (0..n)
        .into_par_iter()
        .filter_map(|i| {
            ((i + 1)..n)
                .map(|j| (intersection_len(&family.sets[i], &family.sets[j]), (i + 1, j + 1)))
                .fold(None, |best: Option<(usize, (usize, usize))>, cur| match best {
                    Some(b) if b.0 >= cur.0 => Some(b),
                    _ => Some(cur),
                })
        })
        .reduce_with(|a, b| match a.0.cmp(&b.0) {
            Ordering::Less => b,
            Ordering::Greater => a,
            Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub n: usize,
    pub m: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub mean_size: f64,
    pub max_pairwise_intersection: usize,
    /// Number of unordered pairs per intersection size.
    pub pairwise_histogram: BTreeMap<usize, u64>,
}

pub fn family_stats(family: &SetFamily) -> Result<FamilyStats, FamilyError> {
    if family.n() == 0 {
        return Err(FamilyError::Empty);
    }
    let sizes = family.sets.iter().map(Vec::len);
    let min_size = sizes.clone().min().unwrap_or(0);
    let max_size = sizes.clone().max().unwrap_or(0);
    let mean_size = sizes.sum::<usize>() as f64 / family.n() as f64;

    let n = family.n();
    let histogram = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local = BTreeMap::new();
            for j in (i + 1)..n {
                *local
                    .entry(intersection_len(&family.sets[i], &family.sets[j]))
                    .or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, count) in b {
                *a.entry(key).or_insert(0) += count;
            }
            a
        });
    Ok(FamilyStats {
        n,
        m: family.m(),
        min_size,
        max_size,
        mean_size,
        max_pairwise_intersection: histogram.keys().next_back().copied().unwrap_or(0),
        pairwise_histogram: histogram,
    })
}
