mod common;

use std::collections::BTreeSet;

use common::{dense_product, signs};
use obcs::bounds::{confusable_pair_nonneg, confusable_pair_real, planted_covered_matrix};
use obcs::constructions::{design_from_code, design_has_no_shared_t_points, reed_solomon_code};
use obcs::family::verify_ruff;
use obcs::Fraction;

/// Direct evaluation of `sum_i c_i x^i mod q` with the digits of `t` as coefficients.
fn eval(q: u64, deg_bound: usize, t: u64, x: u64) -> u64 {
    let mut rest = t;
    let mut acc = 0u64;
    let mut power = 1u64;
    for _ in 0..deg_bound {
        acc = (acc + (rest % q) * power) % q;
        rest /= q;
        power = power * x % q;
    }
    acc
}

#[test]
fn designs_match_direct_evaluation() {
    for q in [2u64, 3, 5, 7] {
        for deg in 1..=3usize {
            for d in deg..=q as usize {
                let code = reed_solomon_code(q, deg, d).unwrap();
                let (family, params) = design_from_code(&code).unwrap();
                assert_eq!(family.n() as u64, q.pow(deg as u32));
                assert_eq!(family.m(), q as usize * d);
                let sets: Vec<BTreeSet<u32>> = (0..family.n() as u64)
                    .map(|t| (0..d as u64).map(|i| (i * q + eval(q, deg, t, i) + 1) as u32).collect())
                    .collect();
                for (j, set) in sets.iter().enumerate() {
                    assert_eq!(family.set(j + 1), set.iter().copied().collect::<Vec<_>>().as_slice());
                }
                let mut worst = 0;
                for a in 0..sets.len() {
                    for b in a + 1..sets.len() {
                        worst = worst.max(sets[a].intersection(&sets[b]).count());
                    }
                }
                if sets.len() > 1 {
                    assert_eq!(worst, deg - 1, "q={q} deg={deg} d={d}");
                }
                assert!(design_has_no_shared_t_points(&code, deg));
                assert_eq!(
                    design_has_no_shared_t_points(&code, deg - 1),
                    deg == 1 && sets.len() == 1
                );
                assert_eq!(params.alpha, Fraction::new(deg as u64, d as u64).unwrap());
                assert!(verify_ruff(&family, &params).unwrap().passed());
            }
        }
    }
}

#[test]
fn planted_matrices_give_confusable_pairs() {
    for seed in 0..300u64 {
        let (m, n, k) = (
            5 + (seed % 21) as usize,
            2 + (seed % 14) as usize,
            1 + (seed % 4) as usize,
        );
        if k > n {
            continue;
        }
        for nonnegative in [true, false] {
            let (a, witness) = planted_covered_matrix(m, n, k, nonnegative, seed).unwrap();
            let pairs = if nonnegative {
                vec![
                    confusable_pair_nonneg(&a, &witness, k).unwrap(),
                    confusable_pair_real(&a, &witness, k, 0.25, seed).unwrap(),
                ]
            } else {
                vec![confusable_pair_real(&a, &witness, k, 0.25, seed).unwrap()]
            };
            let rows = a.rows();
            for (x1, x2) in pairs {
                assert_ne!(x1.support(), x2.support());
                assert!(x1.l0() <= k && x2.l0() <= k);
                let (b1, b2) = (
                    signs(&dense_product(&rows, &x1.to_dense())),
                    signs(&dense_product(&rows, &x2.to_dense())),
                );
                assert_eq!(b1, b2, "seed {seed}");
            }
        }
    }
}
