use num_bigint::BigUint;
use obcs::bounds::{binomial, furedi_max_n, gv_count, min_m_approx, min_m_support, regions_upper};
use proptest::prelude::*;

fn pascal(rows: usize) -> Vec<Vec<u128>> {
    let mut table = vec![vec![1u128]];
    for n in 1..=rows {
        let prev = &table[n - 1];
        let mut row = vec![1u128; n + 1];
        for k in 1..n {
            row[k] = prev[k - 1] + prev[k];
        }
        table.push(row);
    }
    table
}

fn choose(table: &[Vec<u128>], n: u64, k: u64) -> u128 {
    if k > n {
        0
    } else {
        table[n as usize][k as usize]
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn binomials_match_pascal() {
    let table = pascal(120);
    for n in 0..=120u64 {
        for k in 0..=n + 2 {
            assert_eq!(binomial(n, k), BigUint::from(choose(&table, n, k)), "C({n},{k})");
        }
    }
}

#[test]
fn furedi_and_inverse_match_direct_search() {
    let table = pascal(120);
    for k in 2..=4u64 {
        let pairs = k * (k + 1) / 2;
        let direct = |m: u64| choose(&table, m, (m - k).div_ceil(pairs)) + k as u128;
        for m in k..=100 {
            assert_eq!(furedi_max_n(m, k).unwrap(), BigUint::from(direct(m)), "m={m} k={k}");
        }
        for n in (k + 1)..=2000 {
            let expected = (k..).find(|&m| direct(m) >= n as u128).unwrap();
            assert_eq!(min_m_support(n, k).unwrap(), expected, "n={n} k={k}");
        }
    }
}

#[test]
fn regions_match_pascal() {
    let table = pascal(120);
    for m in 0..=60u64 {
        for k in 1..=6u64 {
            if m < 2 * k {
                assert!(regions_upper(m, k).is_err());
                continue;
            }
            let expected = choose(&table, m, k) << k;
            assert_eq!(regions_upper(m, k).unwrap(), BigUint::from(expected));
        }
    }
}

#[test]
fn approx_threshold_matches_integer_search() {
    // With c = 1 and epsilon = 1/r the cover size r^k is an integer.
    let table = pascal(120);
    for k in 1..=4u64 {
        for r in [2u64, 3, 4, 5, 8, 10] {
            let target = (r as u128).pow(k as u32);
            let expected = (2 * k..).find(|&m| (choose(&table, m, k) << k) >= target).unwrap();
            assert_eq!(min_m_approx(k, 1.0 / r as f64, 1.0).unwrap(), expected, "k={k} r={r}");
        }
    }
}

proptest! {
    #[test]
    fn gv_count_matches_reduced_fraction(n in 2u64..=60, k_frac in 0.0f64..1.0, tenths in 1u32..=10) {
        let table = pascal(60);
        let k = ((n as f64 * k_frac) as u64).clamp(1, n);
        let epsilon = tenths as f64 / 10.0;
        let lower = ((tenths as u64 * k) / 10).clamp(1, k);
        let (num, den) = (choose(&table, n, k), choose(&table, n, lower));
        let g = gcd(num, den);
        let got = gv_count(n, k, epsilon).unwrap();
        prop_assert_eq!(got.lower_index, lower);
        prop_assert_eq!(got.ratio.numer().to_string(), (num / g).to_string());
        prop_assert_eq!(got.ratio.denom().to_string(), (den / g).to_string());
        let implied = (0u64..).find(|&m| den << m >= num).unwrap();
        prop_assert_eq!(got.implied_m, implied);
    }
}
