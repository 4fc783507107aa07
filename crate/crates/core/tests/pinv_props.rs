use opstrata::matcore::{expm, gauge_norm, svd, ComplexMatrix, GaugeNorm, ToleranceConfig};
use opstrata::pinv::{moore_penrose, penrose_residual, pinv, same_rank_bound, wedin_residual};
use opstrata::random;
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn sample(seed: u64, m: usize, n: usize, r: usize) -> ComplexMatrix {
    random::with_rank(&mut random::rng(seed), m, n, r.min(m.min(n)), 0.2, 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinv_identities(seed in any::<u64>(), m in 1usize..7, n in 1usize..7, r in 0usize..7) {
        let a = sample(seed, m, n, r);
        let ap = pinv(&a, &tol()).unwrap();
        let scale = 1.0 + a.frobenius();
        prop_assert!(pinv(&ap, &tol()).unwrap().dist(&a) <= 1e-9 * scale);
        prop_assert!(pinv(&a.adjoint(), &tol()).unwrap().dist(&ap.adjoint()) <= 1e-9 * (1.0 + ap.frobenius()));
        prop_assert!(penrose_residual(&a, &ap) <= 1e-9 * scale * (1.0 + ap.frobenius()));
    }

    #[test]
    fn reduced_minimum_modulus_agrees(seed in any::<u64>(), m in 1usize..7, n in 1usize..7, r in 1usize..7) {
        let a = sample(seed, m, n, r);
        let g = moore_penrose(&a, &tol()).unwrap().gamma;
        let g_adj = moore_penrose(&a.adjoint(), &tol()).unwrap().gamma;
        let modulus = opstrata::polar::polar_decompose(&a, &tol()).unwrap().modulus;
        let g_mod = moore_penrose(&modulus, &tol()).unwrap().gamma;
        prop_assert!((g - g_adj).abs() <= 1e-9 * (1.0 + g));
        prop_assert!((g - g_mod).abs() <= 1e-9 * (1.0 + g));
    }

    #[test]
    fn wedin_residual_under_group_action(seed in any::<u64>(), m in 1usize..6, n in 1usize..6, r in 0usize..6) {
        let mut rg = random::rng(seed ^ 0x5eed);
        let a = sample(seed, m, n, r);
        let g = expm(&random::direction(&mut rg, m, m, 0.5));
        let k = expm(&random::direction(&mut rg, n, n, 0.5));
        let b = &(&g * &a) * &opstrata::matcore::inverse(&k).unwrap();
        let res = wedin_residual(&a, &b, GaugeNorm::FROBENIUS, &tol()).unwrap();
        let scale = 1.0 + gauge_norm(&pinv(&a, &tol()).unwrap(), GaugeNorm::Operator)
            + gauge_norm(&pinv(&b, &tol()).unwrap(), GaugeNorm::Operator);
        prop_assert!(res <= 1e-8 * scale, "residual {}", res);
    }

    #[test]
    fn same_rank_bound_holds(seed in any::<u64>(), n in 1usize..6, r in 1usize..6, frac in 0.05f64..0.95) {
        let mut rg = random::rng(seed ^ 0xb0b);
        let a = sample(seed, n, n, r);
        let gamma = svd(&a, &tol()).unwrap().sigma_min_nonzero();
        // perturb inside the range so the nullity is unchanged
        let s = svd(&a, &tol()).unwrap();
        let ur = s.u.column_range(0, s.rank);
        let vr = s.v().column_range(0, s.rank);
        let core = random::direction(&mut rg, s.rank, s.rank, frac * gamma);
        let b = &a + &(&(&ur * &core) * &vr.adjoint());
        let rep = same_rank_bound(&a, &b, &tol()).unwrap();
        prop_assert!(rep.hypothesis_met);
        prop_assert!(rep.actual <= rep.bound * (1.0 + 1e-9));
    }
}
