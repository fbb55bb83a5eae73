use proptest::prelude::*;

use probe_core::channels::Channel;
use probe_core::linalg::{tensor, DensityMatrix};
use probe_core::measures::{avsk, lqu_two_qubit, lqu_two_qubit_scaled, separable_cap, Spectrum};
use probe_core::moments::{lqu_bounds, second_moment, variance};
use probe_core::states::{haar_unitary, make_state, random_density, random_separable, RandomSeed, StateFamily};

fn state(dims: (usize, usize), rank: usize, seed: u64) -> DensityMatrix {
    let r = 1 + rank % (dims.0 * dims.1);
    random_density(dims.0, dims.1, r, RandomSeed::new(seed)).unwrap()
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3)), Just((2, 1))]
}

fn spectrum(n: usize) -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(-5.0f64..5.0, n).prop_map(|v| Spectrum::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_and_scale((na, nb) in dims(), rank in 0usize..9, seed in any::<u64>(),
                       eta in -10.0f64..10.0, values in prop::collection::vec(-3.0f64..3.0, 3)) {
        let rho = state((na, nb), rank, seed);
        let spec = Spectrum::new(values[..na].to_vec()).unwrap();
        let base = avsk(&rho, &spec).unwrap();
        let tol = 1e-12 * (1.0 + eta * eta) * (1.0 + base);
        prop_assert!((avsk(&rho, &spec.shifted(eta)).unwrap() - base).abs() <= tol);
        prop_assert!((avsk(&rho, &spec.scaled(eta)).unwrap() - eta * eta * base).abs() <= tol);
    }

    #[test]
    fn local_unitary_invariance((na, nb) in dims(), rank in 0usize..9, seed in any::<u64>()) {
        let rho = state((na, nb), rank, seed);
        let spec = Spectrum::new((0..na).map(|k| k as f64).collect()).unwrap();
        let s = RandomSeed::new(seed).with_stream(7);
        let u = tensor(&haar_unitary(na, s.derive(0)), &haar_unitary(nb, s.derive(1)));
        let rotated = rho.conjugate(&u).unwrap();
        prop_assert!((avsk(&rotated, &spec).unwrap() - avsk(&rho, &spec).unwrap()).abs() < 1e-9);
        prop_assert!((second_moment(&rotated, &spec).unwrap() - second_moment(&rho, &spec).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn convexity((na, nb) in dims(), r1 in 0usize..9, r2 in 0usize..9, seed in any::<u64>(), p in 0.0f64..1.0) {
        let a = state((na, nb), r1, seed);
        let b = state((na, nb), r2, seed.wrapping_add(1));
        let spec = Spectrum::new((0..na).map(|k| k as f64).collect()).unwrap();
        let mix = DensityMatrix::mixture(&[p, 1.0 - p], &[a.clone(), b.clone()]).unwrap();
        let rhs = p * avsk(&a, &spec).unwrap() + (1.0 - p) * avsk(&b, &spec).unwrap();
        prop_assert!(avsk(&mix, &spec).unwrap() <= rhs + 1e-9);
    }

    #[test]
    fn channels_on_b_do_not_increase(rank in 0usize..4, seed in any::<u64>(), p in 0.0f64..1.0, g in 0.0f64..1.0) {
        let rho = state((2, 2), rank, seed);
        let spec = Spectrum::sigma_z();
        let base = avsk(&rho, &spec).unwrap();
        let base_lqu = lqu_two_qubit(&rho).unwrap();
        for ch in [Channel::depolarizing(2, p).unwrap(), Channel::amplitude_damping(g).unwrap()] {
            let out = ch.apply_on_b(&rho).unwrap();
            prop_assert!(avsk(&out, &spec).unwrap() <= base + 1e-9);
            prop_assert!(lqu_two_qubit(&out).unwrap() <= base_lqu + 1e-9);
        }
    }

    #[test]
    fn ordering_variance_and_bounds(rank in 0usize..4, seed in any::<u64>(), spec in spectrum(2)) {
        let rho = state((2, 2), rank, seed);
        let av = avsk(&rho, &spec).unwrap();
        prop_assert!(lqu_two_qubit_scaled(&rho, &spec).unwrap() <= av + 1e-9 * (1.0 + av));
        prop_assert!(second_moment(&rho, &spec).unwrap() >= av * av - 1e-9 * (1.0 + av * av));
        // bounds are stated for σ_z
        let sz = Spectrum::sigma_z();
        let (lo, hi) = lqu_bounds(avsk(&rho, &sz).unwrap(), variance(&rho, &sz).unwrap());
        let lqu = lqu_two_qubit(&rho).unwrap();
        prop_assert!(lo <= lqu + 1e-6 && lqu <= hi + 1e-6, "{lo} {lqu} {hi}");
    }

    #[test]
    fn separable_states_stay_under_the_cap((na, nb) in dims(), terms in 1usize..8, seed in any::<u64>()) {
        let rho = random_separable(na, nb, terms, RandomSeed::new(seed)).unwrap();
        let spec = Spectrum::new((0..na).map(|k| (k * k) as f64).collect()).unwrap();
        prop_assert!(avsk(&rho, &spec).unwrap() <= separable_cap(&spec) + 1e-9);
    }

    #[test]
    fn werner_and_isotropic_average_equals_minimum(t in 0.0f64..1.0) {
        let sz = Spectrum::sigma_z();
        for fam in [StateFamily::Werner { dim: 2, q: t }, StateFamily::Isotropic { dim: 2, fidelity: t }] {
            let rho = make_state(&fam).unwrap();
            prop_assert!((avsk(&rho, &sz).unwrap() - lqu_two_qubit(&rho).unwrap()).abs() < 1e-9);
            prop_assert!(variance(&rho, &sz).unwrap().abs() < 1e-12);
        }
    }
}
