//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p qnr-cli --test acceptance -- --nocapture` to see
//! the lines.

use std::time::{Duration, Instant};

use clap::Parser;
use qnr_cli::cli::{run, Cli};
use qnr_cli::report::sample_report;
use qnr_cli::stats::SIGNIFICANCE;
use qnr_core::amplify::{amplify_known_set, grover_iteration};
use qnr_core::number_theory::{is_prime, power_residue_indicator, qnr_set_bruteforce};
use qnr_core::qnr::{build_instance, rotated_state, run_pipeline, sample_qnr, Schedule};
use qnr_core::statevector::{draw_rng, Indicator, StateVector};
use qnr_core::{Complex64, SimOptions};
use rand_core::RngCore;

/// Seed for the uniformity criterion.
const UNIFORMITY_SEED: u64 = 7;

fn report(id: u32, name: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] AC{id:<2} {name}: {detail}");
    assert!(passed, "AC{id} {name}: {detail}");
}

fn opts() -> SimOptions {
    SimOptions::default()
}

fn primes_1_mod_8(bound: u64) -> Vec<u64> {
    (9..bound).step_by(8).filter(|&p| is_prime(p)).collect()
}

#[test]
fn ac01_worked_example_41() {
    let start = Instant::now();
    let (inst, plan) = build_instance(41, &opts()).unwrap();
    let rotated = rotated_state(&inst, &plan, &opts()).unwrap();
    let final_state = run_pipeline(&inst, &plan, &opts()).unwrap();
    let elapsed = start.elapsed();

    let theta_err = (plan.theta - (-3.0f64 / 5.0).acos()).abs();
    let even_err = plan
        .even_qnr
        .indices()
        .iter()
        .map(|&x| (rotated.amplitude(x) - Complex64::new(-3.0 / 40.0, 0.1)).norm())
        .fold(0.0, f64::max);
    let odd_err = plan
        .odd_qnr
        .indices()
        .iter()
        .map(|&x| (rotated.amplitude(x) - Complex64::new(-3.0 / 40.0, -0.1)).norm())
        .fold(0.0, f64::max);
    let mean_err = (rotated.mean() - Complex64::new(1.0 / 16.0, 0.0)).norm();
    let prob_err = qnr_set_bruteforce(41)
        .iter()
        .map(|&x| (final_state.probability(x as usize) - 1.0 / 20.0).abs())
        .fold(0.0, f64::max);
    let worst = theta_err
        .max(even_err)
        .max(odd_err)
        .max(mean_err)
        .max(prob_err);
    report(
        1,
        "p=41 worked example",
        worst <= 1e-10 && elapsed < Duration::from_millis(10),
        &format!("max error {worst:.1e} (tol 1e-10), runtime {elapsed:?} (< 10 ms)"),
    );
}

#[test]
fn ac02_03_07_sweep_below_4096() {
    let start = Instant::now();
    let primes = primes_1_mod_8(4096);
    let (mut worst_non_qnr, mut worst_prob, mut worst_sum, mut worst_sched) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut support_ok = true;
    for &p in &primes {
        let (inst, plan) = build_instance(p, &opts()).unwrap();
        let two_step = run_pipeline(&inst, &plan, &opts()).unwrap();
        let direct = run_pipeline(
            &inst,
            &plan.clone().with_schedule(Schedule::Direct),
            &opts(),
        )
        .unwrap();
        let oracle = qnr_set_bruteforce(p);
        let support: Vec<u64> = (0..two_step.len())
            .filter(|&x| two_step.amplitude(x).norm() > 1e-10)
            .map(|x| x as u64)
            .collect();
        support_ok &= support == oracle;
        let expected = 2.0 / (p - 1) as f64;
        for x in 0..two_step.len() {
            if oracle.binary_search(&(x as u64)).is_ok() {
                worst_prob = worst_prob.max((two_step.probability(x) - expected).abs());
            } else {
                worst_non_qnr = worst_non_qnr.max(two_step.amplitude(x).norm());
            }
        }
        let sum: f64 = two_step.probabilities().sum();
        worst_sum = worst_sum.max((sum - 1.0).abs());
        worst_sched = worst_sched.max(two_step.max_deviation(&direct));
    }
    let elapsed = start.elapsed();
    report(
        2,
        "support exactness sweep",
        support_ok
            && worst_non_qnr < 1e-10
            && worst_prob <= 1e-10
            && elapsed < Duration::from_secs(60),
        &format!(
            "{} primes, support = brute force: {support_ok}, max non-QNR |a| {worst_non_qnr:.1e}, \
             max |P - 2/(p-1)| {worst_prob:.1e}, runtime {elapsed:?}",
            primes.len()
        ),
    );
    report(
        3,
        "probability conservation",
        worst_sum <= 1e-10,
        &format!("max |sum P - 1| {worst_sum:.1e} (tol 1e-10)"),
    );
    report(
        7,
        "schedule equivalence",
        worst_sched <= 1e-12,
        &format!("max per-amplitude gap {worst_sched:.1e} (tol 1e-12)"),
    );
}

#[test]
fn ac04_lemma_parity_split() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in (5..10_000u64).step_by(4).filter(|&p| is_prime(p)) {
        let set = qnr_set_bruteforce(p);
        let even = set.iter().filter(|&&a| a % 2 == 0).count() as u64;
        let odd = set.len() as u64 - even;
        if even != (p - 1) / 4 || odd != (p - 1) / 4 {
            bad.push(p);
        }
        checked += 1;
    }
    report(
        4,
        "even/odd nonresidue split",
        bad.is_empty(),
        &format!("{checked} primes p = 1 mod 4 below 10^4, violations {bad:?}"),
    );
}

#[test]
fn ac05_inversion_routes() {
    let mut rng = draw_rng(5, 0);
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let n = 1 + (trial % 10) as u32;
        let raw: Vec<Complex64> = (0..1usize << n)
            .map(|_| {
                let re = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                let im = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(re, im)
            })
            .collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state = StateVector::from_amplitudes(raw.iter().map(|a| a / norm).collect()).unwrap();
        let mut direct = state.clone();
        direct.invert_about_mean();
        let mut composite = state;
        composite.invert_about_mean_via_hadamard();
        worst = worst.max(direct.max_deviation(&composite));
    }
    report(
        5,
        "inversion route equivalence",
        worst <= 1e-12,
        &format!("100 random states n <= 10, max gap {worst:.1e} (tol 1e-12)"),
    );
}

#[test]
fn ac06_four_state_grover() {
    let marked = Indicator::new(2, vec![2]).unwrap();
    let mut state = StateVector::uniform(2).unwrap();
    grover_iteration(&mut state, &marked).unwrap();
    let err = (state.probability(2) - 1.0).abs();
    report(
        6,
        "4-state Grover",
        err <= 1e-12,
        &format!("|P(2) - 1| = {err:.1e} (tol 1e-12)"),
    );
}

#[test]
fn ac08_deterministic_single_marked() {
    let start = Instant::now();
    let mut rng = draw_rng(8, 0);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for n in 3..=10u32 {
        for _ in 0..20 {
            let omega = (rng.next_u64() % (1 << n)) as usize;
            let marked = Indicator::new(n, vec![omega]).unwrap();
            let (_, state) = amplify_known_set(&marked, 1, &opts()).unwrap();
            let success = state.probability(2 * omega) + state.probability(2 * omega + 1);
            worst = worst.max((success - 1.0).abs());
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        8,
        "deterministic single-marked Grover",
        worst <= 1e-9 && elapsed < Duration::from_secs(30),
        &format!("{runs} runs, max |P - 1| {worst:.1e} (tol 1e-9), runtime {elapsed:?}"),
    );
}

#[test]
fn ac09_cubic_nonresidues_13() {
    // oracle: complement of the cubes mod 13
    let cubes: Vec<usize> = (1..13usize).map(|x| x * x * x % 13).collect();
    let oracle: Vec<usize> = (1..13).filter(|a| !cubes.contains(a)).collect();
    let marked = Indicator::from_predicate(4, |x| {
        (1..13).contains(&x) && power_residue_indicator(x as u64, 13, 3).unwrap()
    });
    let (_, state) = amplify_known_set(&marked, 8, &opts()).unwrap();
    let probs: Vec<f64> = (0..16)
        .map(|x| state.probability(2 * x) + state.probability(2 * x + 1))
        .collect();
    let support: Vec<usize> = (0..16).filter(|&x| probs[x] > 1e-10).collect();
    let amp_err = (0..32)
        .map(|y| {
            let expect = if oracle.contains(&(y >> 1)) {
                (1.0f64 / 16.0).sqrt()
            } else {
                0.0
            };
            (state.amplitude(y).norm() - expect).abs()
        })
        .fold(0.0, f64::max);
    report(
        9,
        "known-size set sampling (cubic nonresidues of 13)",
        support == oracle && oracle.len() == 8 && amp_err <= 1e-9,
        &format!("support {support:?}, max amplitude error {amp_err:.1e} (tol 1e-9)"),
    );
}

#[test]
fn ac10_sampling_uniformity() {
    let r = sample_report(41, UNIFORMITY_SEED, 100_000, &opts(), false).unwrap();
    let chi = r.chi_square.clone().unwrap();
    let all_qnr = r.samples.iter().all(|a| qnr_set_bruteforce(41).contains(a));
    let p7 = sample_qnr(7, 1, 10, &opts()).unwrap().samples;
    let p13 = sample_qnr(13, 1, 10, &opts()).unwrap().samples;
    let classical_ok = p7.iter().all(|&a| a == 6) && p13.iter().all(|&a| a == 2);
    report(
        10,
        "sampling uniformity",
        chi.degrees_of_freedom == 19 && chi.passes(SIGNIFICANCE) && all_qnr && classical_ok,
        &format!(
            "seed {UNIFORMITY_SEED}: chi2 = {:.3}, df {}, p-value {:.4} (> {SIGNIFICANCE}); \
             p=7 -> 6, p=13 -> 2: {classical_ok}",
            chi.statistic, chi.degrees_of_freedom, chi.p_value
        ),
    );
}

#[test]
fn ac11_reproducibility() {
    let sequential = sample_qnr(41, 1234, 20_000, &opts()).unwrap().samples;
    let mut outputs = Vec::new();
    for threads in [1, 2, 4, 8] {
        let threads = threads.to_string();
        let cli = Cli::parse_from([
            "qnr",
            "sample",
            "--prime",
            "41",
            "--seed",
            "1234",
            "--count",
            "20000",
            "--threads",
            &threads,
        ]);
        let mut out = Vec::new();
        run(&cli, &mut out).unwrap();
        outputs.push(out);
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let parsed: serde_json::Value = serde_json::from_slice(&outputs[0]).unwrap();
    let samples: Vec<u64> = serde_json::from_value(parsed["samples"].clone()).unwrap();
    report(
        11,
        "reproducibility across thread counts",
        identical && samples == sequential,
        &format!(
            "1/2/4/8 threads byte-identical: {identical}, matches sequential draw: {}",
            samples == sequential
        ),
    );
}
