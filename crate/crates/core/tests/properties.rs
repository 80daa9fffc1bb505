use entangle::linalg::{random_unitary, trace_norm_hermitian};
use entangle::measures::{concurrence_minors, concurrence_purity, concurrence_schmidt, tangle_pure};
use entangle::oracles::{random_density, random_pure, wootters_concurrence};
use entangle::phc::phc_measure;
use entangle::states::{schmidt, PartialTrace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=4, 1usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concurrence_formulas_agree((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure(&mut rng, da, db);
        let c = concurrence_purity(&psi);
        prop_assert!((c - concurrence_minors(&psi).unwrap()).abs() < 1e-10);
        prop_assert!((c - concurrence_schmidt(&schmidt(&psi, 1e-14))).abs() < 1e-10);
        prop_assert!((tangle_pure(&psi) - c * c).abs() < 1e-10);
        prop_assert!((phc_measure(&psi).unwrap() - c).abs() < 1e-10);
    }

    #[test]
    fn local_unitaries_preserve_concurrence((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure(&mut rng, da, db);
        let (u, v) = (random_unitary(&mut rng, da), random_unitary(&mut rng, db));
        let moved = psi.apply_local(&u, &v).unwrap();
        prop_assert!((concurrence_purity(&psi) - concurrence_purity(&moved)).abs() < 1e-10);
    }

    #[test]
    fn reduced_states_share_spectrum((da, db) in dims(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_pure(&mut rng, da, db).density();
        let (pa, pb) = (rho.partial_trace_b().unwrap(), rho.partial_trace_a().unwrap());
        prop_assert!((pa.purity() - pb.purity()).abs() < 1e-12);
        let ta: f64 = pa.eigenvalues().iter().sum();
        prop_assert!((ta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wootters_is_bounded_and_unitarily_invariant(k in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(&mut rng, 2, 2, k);
        let c = wootters_concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        let (u, v) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 2));
        let moved = rho.apply_local(&u, &v).unwrap();
        prop_assert!((wootters_concurrence(&moved).unwrap() - c).abs() < 1e-10);
        prop_assert!((trace_norm_hermitian(rho.entries()) - 1.0).abs() < 1e-10);
    }
}
