//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use obcs::family::{SetFamily, ViolationWitness};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Calls `visit` on every `k`-subset of `pool` in lexicographic order until it returns `true`.
pub fn first_combination(pool: &[usize], k: usize, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        pool: &[usize],
        k: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.len() == k {
            return visit(chosen);
        }
        for i in start..pool.len() {
            chosen.push(pool[i]);
            if rec(pool, k, i + 1, chosen, visit) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    rec(pool, k, 0, &mut Vec::new(), visit)
}

/// Plain enumeration of every `(j0, k others)` with set unions, no pruning.
/// Returns the lexicographically least tuple whose overlap reaches `threshold(j0)`.
pub fn naive_violation(family: &SetFamily, k: usize, threshold: impl Fn(usize) -> usize) -> Option<ViolationWitness> {
    let n = family.n();
    for j0 in 1..=n {
        let target: BTreeSet<u32> = family.set(j0).iter().copied().collect();
        let pool: Vec<usize> = (1..=n).filter(|&j| j != j0).collect();
        let mut found = None;
        first_combination(&pool, k, &mut |others| {
            let union: BTreeSet<u32> = others.iter().flat_map(|&j| family.set(j).iter().copied()).collect();
            let overlap = target.intersection(&union).count();
            if overlap >= threshold(j0) {
                found = Some(ViolationWitness {
                    j0,
                    others: others.to_vec(),
                    overlap,
                });
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// `ceil(p / q * d)` by integer arithmetic.
pub fn ceil_threshold(p: u64, q: u64, d: usize) -> usize {
    (p * d as u64).div_ceil(q) as usize
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform `d`-subsets of `1..=m`.
pub fn uniform_family(rng: &mut ChaCha8Rng, n: usize, m: usize, d: usize) -> SetFamily {
    let sets = (0..n)
        .map(|_| index::sample(rng, m, d).into_iter().map(|i| i as u32 + 1).collect())
        .collect();
    SetFamily::new(m, sets).unwrap()
}

/// Like [`uniform_family`], but with probability 1/2 one set is rebuilt from
/// elements of `k` other sets so that a violation is likely.
pub fn planted_uniform_family(rng: &mut ChaCha8Rng, n: usize, m: usize, d: usize, k: usize) -> SetFamily {
    let family = uniform_family(rng, n, m, d);
    if !rng.random_bool(0.5) {
        return family;
    }
    let mut sets: Vec<Vec<u32>> = family.sets().to_vec();
    let picked: Vec<usize> = index::sample(rng, n, k + 1).into_vec();
    let pool: BTreeSet<u32> = picked[1..].iter().flat_map(|&j| sets[j].iter().copied()).collect();
    let pool: Vec<u32> = pool.into_iter().collect();
    let take = rng.random_range(1..=d.min(pool.len()));
    let mut new_set: BTreeSet<u32> = index::sample(rng, pool.len(), take)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    while new_set.len() < d {
        new_set.insert(rng.random_range(1..=m as u32));
    }
    sets[picked[0]] = new_set.into_iter().collect();
    SetFamily::new(m, sets).unwrap()
}

/// Sets of random sizes in `0..=m`, with an optional planted covered set.
pub fn planted_free_family(rng: &mut ChaCha8Rng, n: usize, m: usize, k: usize) -> SetFamily {
    let mut sets: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            let size = rng.random_range(1..=m.div_ceil(4));
            let mut s: Vec<u32> = index::sample(rng, m, size).into_iter().map(|i| i as u32 + 1).collect();
            s.sort_unstable();
            s
        })
        .collect();
    if k > 0 && rng.random_bool(0.5) {
        let picked: Vec<usize> = index::sample(rng, n, k + 1).into_vec();
        let pool: Vec<u32> = picked[1..]
            .iter()
            .flat_map(|&j| sets[j].iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        sets[picked[0]] = pool.into_iter().filter(|_| rng.random_bool(0.7)).collect();
    }
    SetFamily::new(m, sets).unwrap()
}

/// `A x` computed densely, row by row.
pub fn dense_product(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn signs(values: &[f64]) -> Vec<i8> {
    values
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect()
}
