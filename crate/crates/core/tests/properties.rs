use hom_negativity::generators::{
    haar_unitary_2, random_local_unitary, random_mixed, random_pure, random_separable_with,
    rng_from_seed, werner,
};
use hom_negativity::interferometer::{
    outcome_distribution, sample_batched, ConfigId, Configuration, OutcomeDistribution,
};
use hom_negativity::invariants::{invariants_from_decomposition, invariants_from_g};
use hom_negativity::multicopy::{cyclically_equivalent, dense, g_exact, g_from_tensor, g_table};
use hom_negativity::negativity::{
    coeffs_from_g, coeffs_from_moments, det_pt_from_moments, solve_negativity, witness,
    WitnessObservables,
};
use hom_negativity::qstate::{
    correlation_tensor, kron2, negativity_oracle, partial_transpose, partial_transpose_matrix,
    pauli_decompose, pt_determinant, pt_moments, DensityMatrix,
};
use hom_negativity::{Observable, Pairing};
use proptest::prelude::*;

/// Observables whose pairs never mix the two parties; only these survive
/// independent unitaries on each qubit.
const SAME_PARTY: [Observable; 7] = [
    Observable::G13,
    Observable::G24,
    Observable::G13_24,
    Observable::G13_46,
    Observable::G13_46_57,
    Observable::G24_35_68,
    Observable::G13_46_57_28,
];

fn state_strategy() -> impl Strategy<Value = DensityMatrix> {
    prop_oneof![
        any::<u64>().prop_map(random_mixed),
        any::<u64>().prop_map(random_pure),
        (0.0..=1.0f64).prop_map(|p| werner(p).unwrap()),
        (any::<u64>(), 1usize..5)
            .prop_map(|(s, k)| random_separable_with(&mut rng_from_seed(s), k)),
    ]
}

/// Any valid pairing on up to four copies.
fn pairing_strategy() -> impl Strategy<Value = Pairing> {
    (1usize..=4, any::<u64>(), 0usize..=4).prop_map(|(k, seed, m)| {
        let mut qubits: Vec<usize> = (1..=2 * k).collect();
        let mut s = seed;
        for i in (1..qubits.len()).rev() {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            qubits.swap(i, (s >> 33) as usize % (i + 1));
        }
        let m = m.min(k);
        let pairs: Vec<_> = qubits.chunks(2).take(m).map(|c| (c[0], c[1])).collect();
        Pairing::new(k, &pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partial_transpose_is_an_involution_preserving_trace(rho in state_strategy()) {
        let pt = partial_transpose(&rho);
        let back = partial_transpose_matrix(&pt);
        prop_assert!((back - rho.matrix()).norm() < 1e-15);
        prop_assert!((pt.trace() - rho.matrix().trace()).norm() < 1e-15);
        // the partial transpose keeps the purity
        let purity = (rho.matrix() * rho.matrix()).trace().re;
        prop_assert!((pt_moments(&rho).pi2 - purity).abs() < 1e-14);
    }

    #[test]
    fn g_values_are_probabilities(rho in state_strategy(), pairing in pairing_strategy()) {
        let g = g_exact(&rho, &pairing);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&g));
    }

    #[test]
    fn contraction_matches_dense_trace(seed in any::<u64>(), pairing in pairing_strategy()) {
        let rho = random_mixed(seed);
        prop_assume!(pairing.n_copies() <= 3);
        let a = g_exact(&rho, &pairing);
        let b = dense::g_exact_dense(&rho, &pairing);
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn g_is_invariant_under_cyclic_shift_and_copy_permutation(
        rho in state_strategy(),
        pairing in pairing_strategy(),
        half in 0usize..4,
        perm_seed in any::<u64>(),
    ) {
        let t = correlation_tensor(&rho);
        let g = g_from_tensor(&t, &pairing);
        let shifted = pairing.shifted(2 * half);
        prop_assert!(cyclically_equivalent(&pairing, &shifted));
        prop_assert!((g_from_tensor(&t, &shifted) - g).abs() < 1e-12);

        let k = pairing.n_copies();
        let mut perm: Vec<usize> = (1..=k).collect();
        let mut s = perm_seed;
        for i in (1..k).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted = pairing.permute_copies(&perm).unwrap();
        prop_assert!((g_from_tensor(&t, &permuted) - g).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_invariants_and_same_party_g(rho in state_strategy(), seed in any::<u64>()) {
        let u = random_local_unitary(&mut rng_from_seed(seed));
        let rotated = rho.conjugate_by(&u);
        let (g0, g1) = (g_table(&rho), g_table(&rotated));
        for o in SAME_PARTY {
            prop_assert!((g0.get(o).unwrap() - g1.get(o).unwrap()).abs() < 1e-10, "{o}");
        }
        let i0 = invariants_from_decomposition(&pauli_decompose(&rho));
        let i1 = invariants_from_decomposition(&pauli_decompose(&rotated));
        prop_assert!(i0.max_abs_diff(&i1) < 1e-10);
        prop_assert!(i0.max_abs_diff(&invariants_from_g(&g1)) < 1e-9);
        prop_assert!((negativity_oracle(&rho) - negativity_oracle(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn symmetric_local_unitaries_preserve_every_g(rho in state_strategy(), seed in any::<u64>()) {
        let v = haar_unitary_2(&mut rng_from_seed(seed));
        let rotated = rho.conjugate_by(&kron2(&v, &v));
        for (a, b) in g_table(&rho).values().iter().zip(g_table(&rotated).values()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn both_invariant_routes_agree(rho in state_strategy()) {
        let a = invariants_from_decomposition(&pauli_decompose(&rho));
        let b = invariants_from_g(&g_table(&rho));
        prop_assert!(a.max_abs_diff(&b) < 1e-9, "{a:?} vs {b:?}");
    }

    #[test]
    fn quartic_root_is_the_oracle_negativity(rho in state_strategy()) {
        let g = g_table(&rho);
        let n = solve_negativity(&coeffs_from_g(&g)).unwrap();
        prop_assert!((n - negativity_oracle(&rho)).abs() < 1e-8);
        let m = pt_moments(&rho);
        let via_moments = coeffs_from_moments(&m, det_pt_from_moments(&m));
        prop_assert!(via_moments.max_abs_diff(&coeffs_from_g(&g)) < 1e-9);
    }

    #[test]
    fn quartic_vanishes_at_the_negativity(rho in state_strategy()) {
        let c = coeffs_from_g(&g_table(&rho));
        let n = negativity_oracle(&rho);
        if n > 0.0 {
            prop_assert!(c.eval(n).abs() < 1e-9);
        }
        // 48 det(rho^Gamma + x/2) is positive once x/2 exceeds -lambda_min
        prop_assert!(c.eval(n + 0.1) > 0.0);
    }

    #[test]
    fn witness_agrees_with_determinant_and_eigenvalues(rho in state_strategy()) {
        let w = witness(&WitnessObservables::from(&g_table(&rho)));
        let det = pt_determinant(&rho);
        prop_assert!((w.det_pt - det).abs() < 1e-9);
        if det.abs() > 1e-10 {
            prop_assert_eq!(w.entangled, negativity_oracle(&rho) > 0.0);
        }
    }

    #[test]
    fn separable_mixtures_have_zero_negativity(seed in any::<u64>(), terms in 1usize..6) {
        let rho = random_separable_with(&mut rng_from_seed(seed), terms);
        prop_assert_eq!(solve_negativity(&coeffs_from_g(&g_table(&rho))).unwrap(), 0.0);
        prop_assert!(!witness(&pt_moments(&rho)).entangled);
    }

    #[test]
    fn outcome_marginals_match_pair_expectations(rho in state_strategy()) {
        for cfg in Configuration::all() {
            let dist = outcome_distribution(&rho, &cfg);
            prop_assert!((dist.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(dist.probs.iter().all(|&p| p >= 0.0));
        }
        // rows mapped to the same observable have equal marginals
        let a = outcome_distribution(&rho, &Configuration::canonical(ConfigId::A));
        let aass = a.marginal("aass".parse().unwrap());
        let ssaa = a.marginal("ssaa".parse().unwrap());
        prop_assert!((aass - ssaa).abs() < 1e-12);
        prop_assert!((aass - g_exact(&rho, &Observable::G13_46.pairing())).abs() < 1e-12);
    }

    #[test]
    fn sampled_counts_sum_to_z(seed in any::<u64>(), z in 1u64..5000, batch in 1u64..700) {
        let dist = outcome_distribution(&random_mixed(seed), &Configuration::canonical(ConfigId::C));
        let rec = sample_batched(&dist, z, seed, batch).unwrap();
        prop_assert_eq!(rec.counts.iter().sum::<u64>(), z);
        let again = sample_batched(&dist, z, seed, batch).unwrap();
        prop_assert_eq!(rec.counts, again.counts);
    }

    #[test]
    fn zero_probability_outcomes_never_fire(seed in any::<u64>(), mask in 0u32..0xFFFF) {
        let mut probs = [0.0; 16];
        for (i, p) in probs.iter_mut().enumerate() {
            if mask & (1 << i) != 0 { *p = 1.0 + i as f64; }
        }
        prop_assume!(mask != 0);
        let total: f64 = probs.iter().sum();
        let dist = OutcomeDistribution { config: ConfigId::A, probs: probs.map(|p| p / total) };
        let rec = sample_batched(&dist, 10_000, seed, 1000).unwrap();
        for i in 0..16 {
            if mask & (1 << i) == 0 {
                prop_assert_eq!(rec.counts[i], 0);
            }
        }
    }

    #[test]
    fn state_json_round_trips(rho in state_strategy()) {
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        prop_assert_eq!(back.matrix(), rho.matrix());
    }
}
