use proptest::prelude::*;

use qot_core::coupling::{Convention, CouplingProblem, CouplingSet};
use qot_core::metrology;
use qot_core::random::{random_density, random_hermitian, rng_from_seed, QotRng};
use qot_core::wasserstein::{
    distance_squared, mean_shift_correction, tilde_distance_squared, wasserstein_variance, CostSpec,
};
use qot_core::{DensityMatrix, HermitianOperator};

fn instance(seed: u64, observables: usize) -> (DensityMatrix, DensityMatrix, Vec<HermitianOperator>) {
    let mut rng: QotRng = rng_from_seed(seed);
    let rho = random_density(&mut rng, 2);
    let sigma = random_density(&mut rng, 2);
    let obs = (0..observables).map(|_| random_hermitian(&mut rng, 2)).collect();
    (rho, sigma, obs)
}

fn qfi_sum(rho: &DensityMatrix, obs: &[HermitianOperator]) -> f64 {
    obs.iter().map(|h| metrology::qfi(rho, h).unwrap()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn distance_grows_as_the_set_shrinks(seed in any::<u64>(), n in 1usize..3) {
        let (rho, sigma, obs) = instance(seed, n);
        let spec = CostSpec::new(obs, Convention::Dpt).unwrap();
        let g = distance_squared(&rho, &sigma, &spec, CouplingSet::General).unwrap().value;
        let p = distance_squared(&rho, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        let cq = distance_squared(&rho, &sigma, &spec, CouplingSet::ClassicalQuantum).unwrap().value;
        let prod = distance_squared(&rho, &sigma, &spec, CouplingSet::Product).unwrap().value;
        prop_assert!(g <= p + 1e-7);
        prop_assert!(p <= cq + 1e-7);
        prop_assert!(cq <= prod + 1e-7);
    }

    #[test]
    fn separable_distance_is_bounded_by_fisher_information(seed in any::<u64>(), n in 1usize..3) {
        let (rho, sigma, obs) = instance(seed, n);
        let spec = CostSpec::new(obs.clone(), Convention::Gmpc).unwrap();
        let d = distance_squared(&rho, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        let bound = (qfi_sum(&rho, &obs) + qfi_sum(&sigma, &obs)) / 8.0;
        prop_assert!(d >= bound - 1e-6, "{} < {}", d, bound);
        let tilde = tilde_distance_squared(&rho, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        prop_assert!(tilde >= bound - 1e-6);
        let shift = mean_shift_correction(&rho, &sigma, &spec).unwrap();
        prop_assert!((d - tilde - shift).abs() < 1e-12);
    }

    #[test]
    fn separable_distance_dominates_mean_of_self_distances(seed in any::<u64>()) {
        let (rho, sigma, obs) = instance(seed, 1);
        let spec = CostSpec::new(obs, Convention::Gmpc).unwrap();
        let cross = distance_squared(&rho, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        let a = distance_squared(&rho, &rho, &spec, CouplingSet::Ppt).unwrap().value;
        let b = distance_squared(&sigma, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        prop_assert!(cross >= 0.5 * (a + b) - 1e-6);
    }

    #[test]
    fn variance_is_sandwiched(seed in any::<u64>(), n in 1usize..3) {
        let (rho, sigma, obs) = instance(seed, n);
        let spec = CostSpec::new(obs.clone(), Convention::Gmpc).unwrap();
        let v = wasserstein_variance(&rho, &sigma, &spec, CouplingSet::Ppt).unwrap().value;
        let mut lower = 0.0;
        let mut upper = 0.0;
        for h in &obs {
            let (vr, vs) = (metrology::variance(&rho, h).unwrap(), metrology::variance(&sigma, h).unwrap());
            let (mr, ms) = (metrology::expectation(&rho, h).unwrap(), metrology::expectation(&sigma, h).unwrap());
            lower += 0.5 * (vr + vs);
            upper += vr + vs + mr * mr + ms * ms;
        }
        prop_assert!(v >= lower - 1e-6 && v <= upper + 1e-6);
    }

    #[test]
    fn gmpc_distance_is_symmetric(seed in any::<u64>()) {
        let (rho, sigma, obs) = instance(seed, 1);
        let spec = CostSpec::new(obs, Convention::Gmpc).unwrap();
        for set in [CouplingSet::General, CouplingSet::Ppt] {
            let a = distance_squared(&rho, &sigma, &spec, set).unwrap().value;
            let b = distance_squared(&sigma, &rho, &spec, set).unwrap().value;
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn optimal_couplings_are_feasible(seed in any::<u64>()) {
        let (rho, sigma, obs) = instance(seed, 1);
        for conv in [Convention::Dpt, Convention::Gmpc] {
            let spec = CostSpec::new(obs.clone(), conv).unwrap();
            for set in [CouplingSet::General, CouplingSet::Ppt, CouplingSet::QuantumClassical] {
                let r = distance_squared(&rho, &sigma, &spec, set).unwrap();
                let coupling = r.coupling.unwrap();
                let problem = CouplingProblem::build(&rho, &sigma, set, conv).unwrap();
                prop_assert!(problem.violation(coupling.matrix()).unwrap() < 1e-7);
                prop_assert!((spec.evaluate(coupling.matrix()) - r.value).abs() < 1e-7);
            }
        }
    }
}
