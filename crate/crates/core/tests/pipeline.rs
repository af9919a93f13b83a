use proptest::prelude::*;
use qnr_core::number_theory::{is_prime, jacobi, qnr_set_bruteforce};
use qnr_core::qnr::{
    build_instance, predicted_final, run_pipeline, sample_qnr, verify, SamplePath,
};
use qnr_core::SimOptions;

fn primes_1_mod_8(bound: u64) -> Vec<u64> {
    (9..bound).step_by(8).filter(|&p| is_prime(p)).collect()
}

#[test]
fn verify_sweep_below_4096() {
    for p in primes_1_mod_8(4096) {
        let r = verify(p, &SimOptions::default()).unwrap();
        assert!(r.passed, "p = {p}: {:?}", r.first_failure());
        assert_eq!(r.qnr_count, Some(((p - 1) / 2) as usize));
    }
}

#[test]
fn classical_primes_are_reported() {
    for p in (3..500u64)
        .step_by(2)
        .filter(|&p| is_prime(p) && p % 8 != 1)
    {
        let r = verify(p, &SimOptions::default()).unwrap();
        assert_eq!(r.path, SamplePath::Classical);
        assert!(r.passed);
        assert_eq!(jacobi(r.classical_value.unwrap() as i64, p), Ok(-1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn final_state_matches_closed_form(idx in 0usize..200) {
        let primes = primes_1_mod_8(1 << 14);
        let p = primes[idx % primes.len()];
        let opts = SimOptions::default();
        let (inst, plan) = build_instance(p, &opts).unwrap();
        let state = run_pipeline(&inst, &plan, &opts).unwrap();
        let pred = predicted_final(&inst, &plan);
        prop_assert!(state.max_deviation(&qnr_core::statevector::StateVector::from_amplitudes(pred.amplitudes.clone()).unwrap()) < 1e-10);
        prop_assert!(pred.closed_form_gap < 1e-12);
        prop_assert!((pred.qnr_probability() - 2.0 / (p - 1) as f64).abs() < 1e-12);
        let even = state.amplitude(plan.even_qnr.indices()[0]);
        let odd = state.amplitude(plan.odd_qnr.indices()[0]);
        prop_assert!((even - odd.conj()).norm() < 1e-12);
    }

    #[test]
    fn samples_are_nonresidues(idx in 0usize..40, seed in any::<u64>()) {
        let p = primes_1_mod_8(2048)[idx % 40];
        let oracle = qnr_set_bruteforce(p);
        let s = sample_qnr(p, seed, 200, &SimOptions::default()).unwrap();
        prop_assert!(s.samples.iter().all(|a| oracle.binary_search(a).is_ok()));
    }
}
