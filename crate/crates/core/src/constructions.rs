//! Robust union-free families from random sampling and from Reed-Solomon codes.

use std::collections::HashSet;

use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    max_pairwise_overlap, pairwise_certificate, verify_ruff, CertificateVerdict, FamilyError, RuffParams, SetFamily,
    Verdict,
};
use crate::fraction::Fraction;
use crate::seed;

/// Largest code size [`reed_solomon_code`] will materialize.
pub const MAX_CODEWORDS: usize = 1 << 24;

/// Default work budget, in `n^(k+1) * d` set-element probes, for exhaustive
/// verification of sampled families.
pub const DEFAULT_BRUTE_FORCE_BUDGET: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("set size d = {d} exceeds ground set size m = {m}")]
    SetLargerThanGround { d: usize, m: usize },
    #[error(
        "no verified family after {attempts} attempts (best overlap seen {best_overlap}, must stay below {limit} via {path})"
    )]
    RetriesExhausted {
        attempts: u32,
        best_overlap: usize,
        limit: String,
        path: VerificationPath,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("field size q = {0} is not prime")]
    NotPrime(u64),
    #[error("need 1 <= D <= d <= q, got D = {deg_bound}, d = {points}, q = {q}")]
    BadCodeShape { q: u64, deg_bound: usize, points: usize },
    #[error("q^D = {q}^{deg_bound} codewords exceeds the limit of {MAX_CODEWORDS}")]
    TooManyCodewords { q: u64, deg_bound: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("lifting needs a k = 1 family, got k = {0}")]
    LiftNeedsK1(usize),
    #[error("lifted robustness {alpha} exceeds 1; the lifted guarantee is vacuous")]
    VacuousLift { alpha: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// How a family was accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerificationPath {
    BruteForce,
    PairwiseCertificate,
}

impl std::fmt::Display for VerificationPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerificationPath::BruteForce => "brute-force",
            VerificationPath::PairwiseCertificate => "pairwise-certificate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRuffConfig {
    pub n: usize,
    pub k: usize,
    pub alpha: Fraction,
    /// `m = ceil(c_m * k^2 * ln n / alpha^2)` unless `m_override` is set.
    pub c_m: f64,
    /// `d = ceil(c_d * k * ln n / alpha)` unless `d_override` is set.
    pub c_d: f64,
    pub max_retries: u32,
    pub seed: u64,
    pub brute_force_budget: f64,
    #[serde(default)]
    pub m_override: Option<usize>,
    #[serde(default)]
    pub d_override: Option<usize>,
}

impl RandomRuffConfig {
    pub fn new(n: usize, k: usize, alpha: Fraction, seed: u64) -> Self {
        Self {
            n,
            k,
            alpha,
            c_m: 100.0,
            c_d: 10.0,
            max_retries: 10,
            seed,
            brute_force_budget: DEFAULT_BRUTE_FORCE_BUDGET,
            m_override: None,
            d_override: None,
        }
    }

    fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |msg: String| Err(ConstructionError::InvalidConfig(msg));
        if !(self.c_m > 0.0 && self.c_m.is_finite()) || !(self.c_d > 0.0 && self.c_d.is_finite()) {
            return bad(format!(
                "c_m and c_d must be positive, got {} and {}",
                self.c_m, self.c_d
            ));
        }
        if self.max_retries == 0 {
            return bad("max_retries must be at least 1".into());
        }
        if self.n < 2 || self.k == 0 || self.k >= self.n {
            return bad(format!("need 1 <= k <= n - 1, got n = {}, k = {}", self.n, self.k));
        }
        if self.alpha.is_zero() || self.alpha.gt_one() {
            return bad(format!("need 0 < alpha <= 1, got {}", self.alpha));
        }
        Ok(())
    }

    /// Ground set size `m`.
    pub fn derived_m(&self) -> usize {
        self.m_override.unwrap_or_else(|| {
            let (k, a) = (self.k as f64, self.alpha.to_f64());
            (self.c_m * k * k * (self.n as f64).ln() / (a * a)).ceil() as usize
        })
    }

    /// Set size `d`.
    pub fn derived_d(&self) -> usize {
        self.d_override.unwrap_or_else(|| {
            let (k, a) = (self.k as f64, self.alpha.to_f64());
            (self.c_d * k * (self.n as f64).ln() / a).ceil() as usize
        })
    }

    /// Estimated exhaustive verification cost `n^(k+1) * d`.
    pub fn brute_force_cost(&self) -> f64 {
        (self.n as f64).powi(self.k as i32 + 1) * self.derived_d() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFamily {
    pub family: SetFamily,
    pub params: RuffParams,
    pub attempts: u32,
    pub path: VerificationPath,
}

/// Las Vegas sampling: draw `n` independent uniform `d`-subsets of `[m]` per
/// attempt and return the first family that verifies.
///
/// Attempt `i` uses seed `config.seed ^ i`.
pub fn sample_random_ruff(config: &RandomRuffConfig) -> Result<SampledFamily, ConstructionError> {
    config.validate()?;
    let (m, d) = (config.derived_m(), config.derived_d());
    if d > m {
        return Err(ConstructionError::SetLargerThanGround { d, m });
    }
    let params = RuffParams::new(config.n, m, d, config.k, config.alpha)?;
    let path = if config.brute_force_cost() <= config.brute_force_budget {
        VerificationPath::BruteForce
    } else {
        VerificationPath::PairwiseCertificate
    };

    let mut best_overlap = usize::MAX;
    for attempt in 0..config.max_retries {
        let family = sample_uniform_family(config.n, m, d, config.seed ^ attempt as u64);
        let overlap = match path {
            VerificationPath::BruteForce => match verify_ruff(&family, &params)? {
                Verdict::Pass => None,
                Verdict::Fail { witness } => Some(witness.overlap),
            },
            VerificationPath::PairwiseCertificate => match pairwise_certificate(&family, &params)? {
                CertificateVerdict::Certified { .. } => None,
                CertificateVerdict::Inconclusive { overlap, .. } => Some(overlap),
            },
        };
        match overlap {
            None => {
                return Ok(SampledFamily {
                    family,
                    params,
                    attempts: attempt + 1,
                    path,
                })
            }
            Some(o) => best_overlap = best_overlap.min(o),
        }
    }
    let limit = match path {
        VerificationPath::BruteForce => format!("alpha*d = {}*{}", config.alpha, d),
        VerificationPath::PairwiseCertificate => format!("alpha*d/k = {}*{}/{}", config.alpha, d, config.k),
    };
    Err(ConstructionError::RetriesExhausted {
        attempts: config.max_retries,
        best_overlap,
        limit,
        path,
    })
}

/// `n` independent uniformly random `d`-subsets of `1..=m`.
pub fn sample_uniform_family(n: usize, m: usize, d: usize, seed: u64) -> SetFamily {
    let mut rng = seed::rng(seed);
    let sets = (0..n)
        .map(|_| {
            let mut set: Vec<u32> = index::sample(&mut rng, m, d)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            set.sort_unstable();
            set
        })
        .collect();
    SetFamily::new(m, sets).expect("sampled sets are in range and duplicate-free")
}

/// A block code over the alphabet `0..q` with a known bound on the number of
/// positions where two distinct codewords agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    q: u64,
    length: usize,
    codewords: Vec<Vec<u32>>,
    max_agreement: usize,
}

impl Code {
    /// Checks word lengths, symbols and distinctness. The agreement bound is
    /// taken on trust; see [`Code::exhaustive_max_agreement`].
    pub fn new(
        q: u64,
        length: usize,
        codewords: Vec<Vec<u32>>,
        max_agreement: usize,
    ) -> Result<Self, ConstructionError> {
        if let Some(pos) = codewords.iter().position(|w| w.len() != length) {
            return Err(ConstructionError::InvalidCode(format!(
                "codeword {pos} does not have length {length}"
            )));
        }
        if let Some(pos) = codewords.iter().position(|w| w.iter().any(|&s| s as u64 >= q)) {
            return Err(ConstructionError::InvalidCode(format!(
                "codeword {pos} has a symbol >= q = {q}"
            )));
        }
        let mut seen = HashSet::with_capacity(codewords.len());
        if let Some(pos) = codewords.iter().position(|w| !seen.insert(w.as_slice())) {
            return Err(ConstructionError::InvalidCode(format!("codeword {pos} is repeated")));
        }
        Ok(Self {
            q,
            length,
            codewords,
            max_agreement,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn codewords(&self) -> &[Vec<u32>] {
        &self.codewords
    }

    pub fn max_agreement(&self) -> usize {
        self.max_agreement
    }

    /// `delta = max_agreement / length`; the relative distance is `1 - delta`.
    pub fn delta(&self) -> f64 {
        self.max_agreement as f64 / self.length as f64
    }

    /// `log |C| / (length * log q)`.
    pub fn rate(&self) -> f64 {
        (self.codewords.len() as f64).ln() / (self.length as f64 * (self.q as f64).ln())
    }

    /// Largest agreement over all pairs of distinct codewords, computed pairwise.
    pub fn exhaustive_max_agreement(&self) -> usize {
        let words = &self.codewords;
        let mut best = 0;
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                best = best.max(a.iter().zip(b).filter(|(x, y)| x == y).count());
            }
        }
        best
    }
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Evaluations of every polynomial of degree `< deg_bound` over the prime
/// field `GF(q)` at the points `0, 1, .., points - 1`.
///
/// Codeword `t` is the polynomial whose coefficient of `x^i` is the `i`-th
/// base-`q` digit of `t` (least significant first), so constants come first.
pub fn reed_solomon_code(q: u64, deg_bound: usize, points: usize) -> Result<Code, ConstructionError> {
    if !is_prime(q) {
        return Err(ConstructionError::NotPrime(q));
    }
    if deg_bound == 0 || deg_bound > points || points as u64 > q {
        return Err(ConstructionError::BadCodeShape { q, deg_bound, points });
    }
    let count = (q as usize)
        .checked_pow(deg_bound as u32)
        .filter(|&c| c <= MAX_CODEWORDS)
        .ok_or(ConstructionError::TooManyCodewords { q, deg_bound })?;

    let mut coeffs = vec![0u64; deg_bound];
    let codewords = (0..count)
        .map(|t| {
            let mut rest = t as u64;
            for c in coeffs.iter_mut() {
                *c = rest % q;
                rest /= q;
            }
            (0..points as u64)
                .map(|x| coeffs.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % q) as u32)
                .collect()
        })
        .collect();
    Ok(Code {
        q,
        length: points,
        codewords,
        max_agreement: deg_bound - 1,
    })
}

/// One set `{(i, c(i))}` per codeword over the ground set `[d] x [q]`, flattened
/// by `(i, s) -> (i - 1) * q + s + 1` with `i` 1-based.
///
/// The returned alpha is `(max_agreement + 1) / d`, the smallest fraction with
/// denominator `d` strictly above every pairwise intersection. For a one-word
/// code the parameters are returned as-is and describe a vacuous design.
pub fn design_from_code(code: &Code) -> Result<(SetFamily, RuffParams), ConstructionError> {
    if code.codewords.is_empty() {
        return Err(ConstructionError::InvalidCode("code has no codewords".into()));
    }
    let (q, d) = (code.q as usize, code.length);
    if code.max_agreement >= d {
        return Err(ConstructionError::InvalidCode(format!(
            "agreement bound {} must be below the length {d}",
            code.max_agreement
        )));
    }
    let m = q * d;
    let sets = code
        .codewords
        .iter()
        .map(|word| {
            word.iter()
                .enumerate()
                .map(|(i, &s)| (i * q + s as usize + 1) as u32)
                .collect()
        })
        .collect();
    let family = SetFamily::new(m, sets)?;
    let params = RuffParams {
        n: family.n(),
        m,
        d,
        k: 1,
        alpha: Fraction::new(code.max_agreement as u64 + 1, d as u64).expect("d > 0"),
    };
    Ok((family, params))
}

/// A `(n, m, d, 1, alpha0)` family is also `(n, m, d, k, k * alpha0)`: the
/// overlap with a union of `k` sets is at most the sum of `k` pairwise overlaps.
pub fn lift_k1_params(params: &RuffParams, k_target: usize) -> Result<RuffParams, ConstructionError> {
    if params.k != 1 {
        return Err(ConstructionError::LiftNeedsK1(params.k));
    }
    let alpha = params
        .alpha
        .mul_int(k_target as u64)
        .ok_or_else(|| ConstructionError::InvalidConfig("alpha * k overflows".into()))?;
    if alpha.gt_one() {
        return Err(ConstructionError::VacuousLift {
            alpha: alpha.to_string(),
        });
    }
    Ok(RuffParams::new(params.n, params.m, params.d, k_target, alpha)?)
}

/// Exhaustively checks that no two sets of a code design share `t` or more
/// points, by confirming that codewords are pairwise distinct on every
/// `t`-subset of coordinates. Costs `C(d, t) * |C|` instead of `|C|^2`.
pub fn design_has_no_shared_t_points(code: &Code, t: usize) -> bool {
    let d = code.length;
    if t == 0 {
        return code.codewords.len() <= 1;
    }
    if t > d {
        return true;
    }
    let mut positions: Vec<usize> = (0..t).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(code.codewords.len());
    loop {
        seen.clear();
        for word in &code.codewords {
            let key: Vec<u32> = positions.iter().map(|&p| word[p]).collect();
            if !seen.insert(key) {
                return false;
            }
        }
        // next t-combination of 0..d
        let mut i = t;
        while i > 0 && positions[i - 1] == d - t + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        positions[i - 1] += 1;
        for j in i..t {
            positions[j] = positions[j - 1] + 1;
        }
    }
}

/// Max pairwise intersection of a family, or 0 for a single set.
pub fn max_intersection(family: &SetFamily) -> usize {
    max_pairwise_overlap(family).map_or(0, |(o, _)| o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{family_stats, verify_ruff};

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&q| is_prime(q)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn constant_code() {
        let code = reed_solomon_code(3, 1, 3).unwrap();
        assert_eq!(code.codewords(), &[vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]]);
        assert_eq!(code.max_agreement(), 0);
        let (family, params) = design_from_code(&code).unwrap();
        assert_eq!(family.m(), 9);
        assert_eq!(family.sets(), &[vec![1, 4, 7], vec![2, 5, 8], vec![3, 6, 9]]);
        assert_eq!(params.alpha, Fraction::new(1, 3).unwrap());
        assert_eq!(family_stats(&family).unwrap().max_pairwise_intersection, 0);
    }

    #[test]
    fn rs_5_2_5_design() {
        let code = reed_solomon_code(5, 2, 5).unwrap();
        assert_eq!(code.codewords().len(), 25);
        // 300 pairs checked one by one.
        assert_eq!(code.exhaustive_max_agreement(), 1);
        let (family, params) = design_from_code(&code).unwrap();
        assert_eq!((params.n, params.m, params.d, params.k), (25, 25, 5, 1));
        assert_eq!(params.alpha, Fraction::new(2, 5).unwrap());
        assert_eq!(family_stats(&family).unwrap().max_pairwise_intersection, 1);
        assert!(verify_ruff(&family, &params).unwrap().passed());
        assert!(design_has_no_shared_t_points(&code, 2));
        assert!(!design_has_no_shared_t_points(&code, 1));
    }

    #[test]
    fn rs_errors() {
        assert_eq!(reed_solomon_code(4, 1, 3), Err(ConstructionError::NotPrime(4)));
        assert!(matches!(
            reed_solomon_code(5, 3, 2),
            Err(ConstructionError::BadCodeShape { .. })
        ));
        assert!(matches!(
            reed_solomon_code(5, 2, 6),
            Err(ConstructionError::BadCodeShape { .. })
        ));
        assert!(matches!(
            reed_solomon_code(5, 0, 2),
            Err(ConstructionError::BadCodeShape { .. })
        ));
    }

    #[test]
    fn single_codeword_design() {
        let code = Code::new(3, 2, vec![vec![0, 2]], 0).unwrap();
        let (family, params) = design_from_code(&code).unwrap();
        assert_eq!(family.n(), 1);
        assert_eq!(family.sets(), &[vec![1, 6]]);
        assert_eq!(params.k, 1);
    }

    #[test]
    fn code_validation() {
        assert!(Code::new(2, 2, vec![vec![0, 1], vec![0, 1]], 0).is_err());
        assert!(Code::new(2, 2, vec![vec![0, 2]], 0).is_err());
        assert!(Code::new(2, 2, vec![vec![0]], 0).is_err());
    }

    #[test]
    fn lifting() {
        let base = RuffParams::new(25, 25, 5, 1, Fraction::new(2, 5).unwrap()).unwrap();
        let lifted = lift_k1_params(&base, 2).unwrap();
        assert_eq!((lifted.k, lifted.alpha), (2, Fraction::new(4, 5).unwrap()));
        assert_eq!(lift_k1_params(&base, 1).unwrap(), base);
        let half = RuffParams::new(25, 25, 5, 1, Fraction::HALF).unwrap();
        assert!(matches!(
            lift_k1_params(&half, 3),
            Err(ConstructionError::VacuousLift { .. })
        ));
        assert_eq!(lift_k1_params(&lifted, 2), Err(ConstructionError::LiftNeedsK1(2)));
    }

    #[test]
    fn lifted_rs_design_verifies() {
        let code = reed_solomon_code(5, 2, 5).unwrap();
        let (family, params) = design_from_code(&code).unwrap();
        let lifted = lift_k1_params(&params, 2).unwrap();
        assert!(verify_ruff(&family, &lifted).unwrap().passed());
    }

    #[test]
    fn sampler_is_deterministic() {
        let mut config = RandomRuffConfig::new(20, 2, Fraction::HALF, 7);
        config.c_m = 60.0;
        config.c_d = 8.0;
        let a = sample_random_ruff(&config).unwrap();
        let b = sample_random_ruff(&config).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        let m = (60.0 * 4.0 * 20f64.ln() / 0.25).ceil() as usize;
        assert_eq!(a.params.m, m);
        assert_eq!(a.path, VerificationPath::BruteForce);
        assert!(a.family.sets().iter().all(|s| s.len() == a.params.d));
    }

    #[test]
    fn identical_full_sets_exhaust_retries() {
        let mut config = RandomRuffConfig::new(2, 1, Fraction::ONE, 3);
        config.c_m = 5.0;
        config.c_d = 5.0;
        config.max_retries = 4;
        assert_eq!(config.derived_m(), config.derived_d());
        match sample_random_ruff(&config) {
            Err(ConstructionError::RetriesExhausted {
                attempts, best_overlap, ..
            }) => {
                assert_eq!(attempts, 4);
                assert_eq!(best_overlap, config.derived_d());
            }
            other => panic!("expected exhausted retries, got {other:?}"),
        }
    }

    #[test]
    fn sampler_config_errors() {
        let mut config = RandomRuffConfig::new(10, 2, Fraction::HALF, 0);
        config.max_retries = 0;
        assert!(matches!(
            sample_random_ruff(&config),
            Err(ConstructionError::InvalidConfig(_))
        ));
        let mut config = RandomRuffConfig::new(10, 2, Fraction::HALF, 0);
        config.m_override = Some(5);
        config.d_override = Some(6);
        assert_eq!(
            sample_random_ruff(&config),
            Err(ConstructionError::SetLargerThanGround { d: 6, m: 5 })
        );
    }
}
