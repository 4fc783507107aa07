use opstrata::matcore::{expm, inverse, GaugeNorm, ToleranceConfig};
use opstrata::random;
use opstrata::strata::{
    act, continuity_report, index_range, mp_map, stratum_index, transitivity_witness, GroupPair,
};
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn disjoint_cover(s in any::<u64>(), m in 1usize..6, n in 1usize..6, ra in 0usize..6, rb in 0usize..6) {
        let mut r = random::rng(s);
        let a = random::with_rank(&mut r, m, n, ra.min(m.min(n)), 0.3, 2.0);
        let b = random::with_rank(&mut r, m, n, rb.min(m.min(n)), 0.3, 2.0);
        let k = stratum_index(&b, &a, &tol()).unwrap();
        let range = index_range(&a, &tol()).unwrap();
        prop_assert!(range.contains(k));
        let hits = (range.k_min..=range.k_max).filter(|&j| j == k).count();
        prop_assert_eq!(hits, 1);
        prop_assert_eq!(k, ra.min(m.min(n)) as i64 - rb.min(m.min(n)) as i64);
    }

    #[test]
    fn action_invariance(s in any::<u64>(), m in 1usize..6, n in 1usize..6, ra in 0usize..6, rb in 0usize..6) {
        let mut r = random::rng(s);
        let a = random::with_rank(&mut r, m, n, ra.min(m.min(n)), 0.3, 2.0);
        let b = random::with_rank(&mut r, m, n, rb.min(m.min(n)), 0.3, 2.0);
        let g = expm(&random::direction(&mut r, m, m, 1.0));
        let k = expm(&random::direction(&mut r, n, n, 1.0));
        let gk = GroupPair::new(g, k, &tol()).unwrap();
        let moved = act(&gk, &b).unwrap();
        prop_assert_eq!(stratum_index(&moved, &a, &tol()).unwrap(), stratum_index(&b, &a, &tol()).unwrap());
    }

    #[test]
    fn mp_is_an_involution(s in any::<u64>(), m in 1usize..6, n in 1usize..6, ra in 0usize..6) {
        let mut r = random::rng(s);
        let a = random::with_rank(&mut r, m, n, ra.min(m.min(n)), 0.3, 2.0);
        let x = random::direction(&mut r, m, m, 0.2);
        let y = random::direction(&mut r, n, n, 0.2);
        let b = &(&expm(&x) * &a) * &inverse(&expm(&y)).unwrap();
        let bp = mp_map(&b, &a, &tol()).unwrap();
        let ap = opstrata::pinv::pinv(&a, &tol()).unwrap();
        prop_assert!(mp_map(&bp, &ap, &tol()).unwrap().dist(&b) <= 1e-8 * (1.0 + b.frobenius()));
    }

    #[test]
    fn transitivity(s in any::<u64>(), m in 1usize..6, n in 1usize..6, ra in 0usize..6) {
        let mut r = random::rng(s);
        let k = ra.min(m.min(n));
        let b1 = random::with_rank(&mut r, m, n, k, 0.3, 2.0);
        let b2 = random::with_rank(&mut r, m, n, k, 0.3, 2.0);
        let gk = transitivity_witness(&b1, &b2, &tol()).unwrap();
        prop_assert!(act(&gk, &b1).unwrap().dist(&b2) <= 1e-8 * (1.0 + b2.frobenius()));
    }

    #[test]
    fn continuity_equivalence(s in any::<u64>(), n in 2usize..6, ra in 1usize..5, jump in any::<bool>()) {
        let mut r = random::rng(s);
        let k = ra.min(n - 1);
        let b = random::with_rank(&mut r, n, n, k, 0.5, 2.0);
        let seq = if jump {
            random::jump_family(&mut r, &b, 50, 1.0, &tol()).unwrap()
        } else {
            random::in_stratum_family(&mut r, &b, 50, 0.5)
        };
        let rep = continuity_report(&b, &seq, 25, GaugeNorm::TRACE, &tol()).unwrap();
        prop_assert!(rep.consistent, "{:?}", rep.verdicts);
        prop_assert_eq!(rep.verdicts.index_zero, !jump);
    }
}
