mod common;

use common::{ceil_threshold, naive_violation, planted_free_family, planted_uniform_family, rng};
use obcs::family::{pairwise_certificate, verify_ruff, verify_uff, CertificateVerdict, RuffParams, Verdict};
use obcs::Fraction;
use proptest::prelude::*;

fn alpha_strategy() -> impl Strategy<Value = (u64, u64)> {
    (1u64..=6).prop_flat_map(|q| (1..=q, Just(q)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ruff_matches_enumeration(seed: u64, n in 2usize..=10, m in 4usize..=18, d_frac in 0.1f64..0.9, k in 1usize..=3, (p, q) in alpha_strategy()) {
        prop_assume!(k < n);
        let d = ((m as f64 * d_frac).ceil() as usize).clamp(1, m);
        let family = planted_uniform_family(&mut rng(seed), n, m, d, k);
        let params = RuffParams::new(n, m, d, k, Fraction::new(p, q).unwrap()).unwrap();
        let expected = naive_violation(&family, k, |_| ceil_threshold(p, q, d));
        let got = verify_ruff(&family, &params).unwrap();
        prop_assert_eq!(got.witness().cloned(), expected);
    }

    #[test]
    fn uff_matches_enumeration(seed: u64, n in 1usize..=10, m in 1usize..=16, k in 0usize..=3) {
        prop_assume!(k < n);
        let family = planted_free_family(&mut rng(seed), n, m, k);
        let expected = naive_violation(&family, k, |j0| family.set(j0).len());
        let got = verify_uff(&family, k).unwrap();
        prop_assert_eq!(got.witness().cloned(), expected);
    }

    #[test]
    fn alpha_one_ruff_is_uff(seed: u64, n in 2usize..=9, m in 4usize..=16, d in 1usize..=8, k in 1usize..=3) {
        prop_assume!(k < n && d <= m);
        let family = planted_uniform_family(&mut rng(seed), n, m, d, k);
        let params = RuffParams::new(n, m, d, k, Fraction::ONE).unwrap();
        prop_assert_eq!(verify_ruff(&family, &params).unwrap(), verify_uff(&family, k).unwrap());
    }

    #[test]
    fn passing_is_monotone(seed: u64, n in 3usize..=9, m in 6usize..=16, d in 2usize..=8, k in 2usize..=3, (p, q) in alpha_strategy()) {
        prop_assume!(k < n && d <= m);
        let family = planted_uniform_family(&mut rng(seed), n, m, d, k);
        let alpha = Fraction::new(p, q).unwrap();
        let params = RuffParams::new(n, m, d, k, alpha).unwrap();
        if verify_ruff(&family, &params).unwrap().passed() {
            let smaller_k = RuffParams { k: k - 1, ..params };
            prop_assert!(verify_ruff(&family, &smaller_k).unwrap().passed());
            let larger_alpha = RuffParams { alpha: Fraction::new((p + 1).min(q), q).unwrap(), ..params };
            prop_assert!(verify_ruff(&family, &larger_alpha).unwrap().passed());
        }
    }

    #[test]
    fn certificate_implies_pass(seed: u64, n in 2usize..=10, m in 8usize..=20, d in 1usize..=6, k in 1usize..=3, (p, q) in alpha_strategy()) {
        prop_assume!(k < n && d <= m);
        let family = planted_uniform_family(&mut rng(seed), n, m, d, k);
        let params = RuffParams::new(n, m, d, k, Fraction::new(p, q).unwrap()).unwrap();
        if let CertificateVerdict::Certified { .. } = pairwise_certificate(&family, &params).unwrap() {
            prop_assert!(verify_ruff(&family, &params).unwrap().passed());
        }
    }

    #[test]
    fn witnesses_recompute(seed: u64, n in 2usize..=10, m in 4usize..=16, d in 1usize..=8, k in 1usize..=3) {
        prop_assume!(k < n && d <= m);
        let family = planted_uniform_family(&mut rng(seed), n, m, d, k);
        let params = RuffParams::new(n, m, d, k, Fraction::HALF).unwrap();
        if let Verdict::Fail { witness } = verify_ruff(&family, &params).unwrap() {
            prop_assert_eq!(witness.others.len(), k);
            prop_assert!(!witness.others.contains(&witness.j0));
            prop_assert_eq!(witness.recompute_overlap(&family), witness.overlap);
            prop_assert!(witness.overlap >= params.violation_threshold());
        }
    }
}
