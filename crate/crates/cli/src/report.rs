//! Machine-readable reports. Every report is wrapped in an [`Envelope`] that
//! carries the schema version.

use std::collections::BTreeMap;
use std::time::Instant;

use qnr_core::amplify::{amplify_known_set, grover_iteration, optimal_iterations};
use qnr_core::number_theory::{is_prime, jacobi, qnr_set};
use qnr_core::qnr::{verify, QnrSampler, SamplePath, VerificationReport};
use qnr_core::statevector::{draw_rng, Indicator, MeasurementTable, StateVector};
use qnr_core::SimOptions;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stats::{chi_square_uniform, ChiSquare};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub report: T,
}

impl<T> Envelope<T> {
    pub fn new(report: T) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            report,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub value: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub p: u64,
    pub path: SamplePath,
    pub seed: u64,
    pub count: usize,
    pub samples: Vec<u64>,
    pub frequencies: Vec<FrequencyRow>,
    pub chi_square: Option<ChiSquare>,
    /// Wall-clock time; only filled in when timing is requested so that
    /// reports stay byte-identical across runs.
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSampleReport {
    pub source: String,
    pub bits: u32,
    pub size: usize,
    pub seed: u64,
    pub count: usize,
    pub pre_iterations: usize,
    pub final_theta: f64,
    pub samples: Vec<u64>,
    pub frequencies: Vec<FrequencyRow>,
    pub chi_square: Option<ChiSquare>,
    pub elapsed_ms: Option<f64>,
}

/// Counts `samples` over `categories`, keeping zero rows. Errors if a sample
/// falls outside the categories.
pub fn frequency_table(categories: &[u64], samples: &[u64]) -> Result<Vec<FrequencyRow>, CliError> {
    let mut counts: BTreeMap<u64, u64> = categories.iter().map(|&v| (v, 0)).collect();
    for s in samples {
        *counts.get_mut(s).ok_or_else(|| {
            CliError::Internal(format!("sample {s} is outside the marked set"))
        })? += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(value, count)| FrequencyRow { value, count })
        .collect())
}

fn chi_square_of(rows: &[FrequencyRow]) -> Option<ChiSquare> {
    let counts: Vec<u64> = rows.iter().map(|r| r.count).collect();
    chi_square_uniform(&counts)
}

/// Draws `0..count` in parallel. Draw `i` depends only on `(seed, i)`, so the
/// result does not depend on the thread count.
pub fn parallel_draws(sampler: &QnrSampler, seed: u64, count: usize) -> Result<Vec<u64>, CliError> {
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| sampler.draw(seed, i))
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn sample_report(
    p: u64,
    seed: u64,
    count: usize,
    opts: &SimOptions,
    timing: bool,
) -> Result<SampleReport, CliError> {
    if count == 0 {
        return Err(CliError::InvalidInput("--count must be at least 1".into()));
    }
    let start = Instant::now();
    let sampler = QnrSampler::new(p, opts)?;
    let samples = parallel_draws(&sampler, seed, count)?;
    for &a in &samples {
        if jacobi(a as i64, p)? != -1 {
            return Err(CliError::Internal(format!(
                "sample {a} is a residue mod {p}"
            )));
        }
    }
    let (frequencies, chi_square) = match sampler.path() {
        SamplePath::Classical => (frequency_table(&samples[..1], &samples)?, None),
        SamplePath::Quantum => {
            let rows = frequency_table(&qnr_set(p), &samples)?;
            let chi = chi_square_of(&rows);
            (rows, chi)
        }
    };
    Ok(SampleReport {
        p,
        path: sampler.path(),
        seed,
        count,
        samples,
        frequencies,
        chi_square,
        elapsed_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn set_sample_report(
    source: String,
    marked: &Indicator,
    size: usize,
    seed: u64,
    count: usize,
    opts: &SimOptions,
    timing: bool,
) -> Result<SetSampleReport, CliError> {
    if count == 0 {
        return Err(CliError::InvalidInput("--count must be at least 1".into()));
    }
    let start = Instant::now();
    let (plan, state) = amplify_known_set(marked, size, opts)?;
    let table = MeasurementTable::new(&state)?;
    let samples: Vec<u64> = (0..count as u64)
        .into_par_iter()
        .map(|i| (table.sample(&mut draw_rng(seed, i)) >> 1) as u64)
        .collect();
    let categories: Vec<u64> = marked.indices().iter().map(|&x| x as u64).collect();
    let frequencies = frequency_table(&categories, &samples)?;
    let chi_square = chi_square_of(&frequencies);
    Ok(SetSampleReport {
        source,
        bits: marked.n(),
        size,
        seed,
        count,
        pre_iterations: plan.pre_iterations,
        final_theta: plan.final_theta,
        samples,
        frequencies,
        chi_square,
        elapsed_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Primes `p ≡ 1 (mod 8)` below `bound`, ascending.
pub fn sweep_primes(bound: u64) -> Vec<u64> {
    (9..bound).step_by(8).filter(|&p| is_prime(p)).collect()
}

/// Verifies every prime from [`sweep_primes`] in parallel. Reports come back
/// in ascending order of `p`.
pub fn verify_sweep(bound: u64, opts: &SimOptions) -> Result<Vec<VerificationReport>, CliError> {
    Ok(sweep_primes(bound)
        .into_par_iter()
        .map(|p| verify(p, opts))
        .collect::<Result<Vec<_>, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoStage {
    Initial,
    Grover,
    FinalRotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub iteration: usize,
    pub stage: DemoStage,
    pub target_probability: f64,
    pub target_amplitude: [f64; 2],
    pub other_amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverDemoReport {
    pub bits: u32,
    pub target: usize,
    pub deterministic: bool,
    /// Register actually simulated; one more than `bits` when deterministic.
    pub simulated_bits: u32,
    pub iterations: Vec<DemoRow>,
    pub final_theta: Option<f64>,
    pub success_probability: f64,
    pub seed: Option<u64>,
    pub outcome: Option<usize>,
}

fn demo_row(
    state: &StateVector,
    iteration: usize,
    stage: DemoStage,
    targets: &Indicator,
) -> DemoRow {
    let t = targets.indices()[0];
    let other = (0..state.len())
        .find(|&x| !targets.contains(x))
        .unwrap_or(0);
    let (a, b) = (state.amplitude(t), state.amplitude(other));
    DemoRow {
        iteration,
        stage,
        target_probability: targets
            .indices()
            .iter()
            .map(|&x| state.probability(x))
            .sum(),
        target_amplitude: [a.re, a.im],
        other_amplitude: [b.re, b.im],
    }
}

/// Grover search for `target`, recording the state after every iteration.
/// The deterministic variant runs on the register with one extra low bit and
/// finishes with the `±θ` rotation.
pub fn grover_demo(
    bits: u32,
    target: usize,
    deterministic: bool,
    seed: Option<u64>,
    opts: &SimOptions,
) -> Result<GroverDemoReport, CliError> {
    if bits == 0 || bits >= usize::BITS || target >> bits != 0 {
        return Err(CliError::InvalidInput(format!(
            "target {target} is out of range for {bits} bits"
        )));
    }
    let marked = Indicator::new(bits, vec![target])?;
    let mut rows = Vec::new();
    if deterministic {
        let (plan, final_state) = amplify_known_set(&marked, 1, opts)?;
        let pair = plan.plus.union(&plan.minus)?;
        let mut state = StateVector::uniform_capped(bits + 1, opts.max_qubits)?;
        rows.push(demo_row(&state, 0, DemoStage::Initial, &pair));
        for i in 1..=plan.pre_iterations {
            grover_iteration(&mut state, &pair)?;
            rows.push(demo_row(&state, i, DemoStage::Grover, &pair));
        }
        rows.push(demo_row(
            &final_state,
            plan.pre_iterations + 1,
            DemoStage::FinalRotation,
            &pair,
        ));
        let outcome = match seed {
            Some(s) => Some(final_state.measure(&mut draw_rng(s, 0))? >> 1),
            None => None,
        };
        Ok(GroverDemoReport {
            bits,
            target,
            deterministic,
            simulated_bits: bits + 1,
            success_probability: rows.last().map(|r| r.target_probability).unwrap_or(0.0),
            iterations: rows,
            final_theta: Some(plan.final_theta),
            seed,
            outcome,
        })
    } else {
        let mut state = StateVector::uniform_capped(bits, opts.max_qubits)?;
        rows.push(demo_row(&state, 0, DemoStage::Initial, &marked));
        let t = optimal_iterations(1 << bits, 1)?;
        for i in 1..=t {
            grover_iteration(&mut state, &marked)?;
            rows.push(demo_row(&state, i, DemoStage::Grover, &marked));
        }
        let outcome = match seed {
            Some(s) => Some(state.measure(&mut draw_rng(s, 0))?),
            None => None,
        };
        Ok(GroverDemoReport {
            bits,
            target,
            deterministic,
            simulated_bits: bits,
            success_probability: state.probability(target),
            iterations: rows,
            final_theta: None,
            seed,
            outcome,
        })
    }
}
