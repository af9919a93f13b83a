//! Exact sampling of quadratic nonresidues modulo `p ≡ 1 (mod 8)`.
//!
//! Starting from the uniform superposition over `N = 2^n > p` states, the even
//! nonresidues below `p` are rotated by `θ` and the odd ones by `-θ`, with
//! `cos θ = 1 - N/(p-1)`. The imaginary parts cancel in the mean, the real
//! part lands on `1/(2√N)`, and one inversion about the mean sends every
//! amplitude that was `1/√N` to zero. The nonresidues end at
//! `(1 - e^{±iθ})/√N`, each with probability `2/(p-1)`.
//!
//! The `[jacobi(x, p) = -1]` and `[x < p]` ancillas are not materialized; both
//! are evaluated classically per basis index, which gives the same reduced
//! state after uncomputation.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::number_theory::{jacobi, qnr_set_bruteforce, qnr_shortcut, OddPrimeInstance};
use crate::statevector::{draw_rng, phase, Indicator, MeasurementTable, StateVector};
use crate::{Error, Result, SimOptions, IDENTITY_TOLERANCE};

/// Largest tolerated distance of the pre-inversion mean from `1/(2√N)`.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// Order in which the `±θ` rotations are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Schedule {
    /// `-2θ` on odd nonresidues, then `+θ` on all of them.
    #[default]
    TwoStep,
    /// `+θ` on even nonresidues, `-θ` on odd ones.
    Direct,
}

/// Rotation angle and the marked sets it is applied to.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPlan {
    pub theta: f64,
    pub cos_theta: f64,
    pub even_qnr: Indicator,
    pub odd_qnr: Indicator,
    pub schedule: Schedule,
    /// Jacobi nonresidues in `p..N`; never rotated.
    pub nonresidues_above_p: usize,
    /// Jacobi residues in `p..N`; never rotated.
    pub residues_above_p: usize,
}

impl RotationPlan {
    pub fn all_qnr(&self) -> Indicator {
        self.even_qnr
            .union(&self.odd_qnr)
            .expect("parity halves share a register")
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }
}

/// `cos θ = 1 - N/(p-1)`, computed from exact integers.
pub fn rotation_cosine(inst: &OddPrimeInstance) -> Result<f64> {
    let (pm1, size) = (inst.p() - 1, inst.size());
    // N/2 < p < N with both N and p - 1 even gives N <= 2(p - 1)
    let cos = (pm1 as f64 - size as f64) / pm1 as f64;
    if !(-1.0..=1.0).contains(&cos) {
        return Err(Error::ArgumentOutOfArccosDomain(cos));
    }
    Ok(cos)
}

/// Validates `p`, derives the register and builds the parity-split rotation
/// plan. Primes outside `1 (mod 8)` are rejected with
/// [`Error::WrongResidueClass`]; use [`qnr_shortcut`] for those.
pub fn build_instance(p: u64, opts: &SimOptions) -> Result<(OddPrimeInstance, RotationPlan)> {
    let inst = OddPrimeInstance::new(p)?;
    if inst.residue_class_mod8() != 1 {
        return Err(Error::WrongResidueClass {
            p,
            residue: inst.residue_class_mod8(),
        });
    }
    opts.check_qubits(inst.n())?;
    let cos_theta = rotation_cosine(&inst)?;

    let n = inst.n();
    let pu = p as usize;
    let jacobi_nr = Indicator::from_predicate(n, |x| jacobi(x as i64, p) == Ok(-1));
    let below_p = |x: usize| x < pu;
    let marked = Indicator::new(
        n,
        jacobi_nr
            .indices()
            .iter()
            .copied()
            .filter(|&x| below_p(x))
            .collect(),
    )?;
    let nonresidues_above_p = jacobi_nr.len() - marked.len();
    let residues_above_p = (pu..1usize << n)
        .filter(|&x| jacobi(x as i64, p) == Ok(1))
        .count();

    let (even_qnr, odd_qnr) = marked.split_parity();
    let expected = ((p - 1) / 4) as usize;
    if even_qnr.len() != expected || odd_qnr.len() != expected {
        return Err(Error::ParitySplit {
            even: even_qnr.len(),
            odd: odd_qnr.len(),
            expected,
        });
    }

    let plan = RotationPlan {
        theta: libm::acos(cos_theta),
        cos_theta,
        even_qnr,
        odd_qnr,
        schedule: Schedule::TwoStep,
        nonresidues_above_p,
        residues_above_p,
    };
    Ok((inst, plan))
}

/// The state after the phase rotations and before inversion.
pub fn rotated_state(
    inst: &OddPrimeInstance,
    plan: &RotationPlan,
    opts: &SimOptions,
) -> Result<StateVector> {
    let mut state = StateVector::uniform_capped(inst.n(), opts.max_qubits)?;
    match plan.schedule {
        Schedule::TwoStep => {
            state.phase_rotate(&plan.odd_qnr, -2.0 * plan.theta)?;
            state.phase_rotate(&plan.all_qnr(), plan.theta)?;
        }
        Schedule::Direct => {
            state.phase_rotate(&plan.even_qnr, plan.theta)?;
            state.phase_rotate(&plan.odd_qnr, -plan.theta)?;
        }
    }
    Ok(state)
}

/// Target of the pre-inversion mean, `1/(2√N)`.
pub fn target_mean(inst: &OddPrimeInstance) -> f64 {
    0.5 / libm::sqrt(inst.size() as f64)
}

/// Runs the whole pipeline and returns the post-inversion state.
///
/// Fails with [`Error::MeanOffTarget`] if the rotated state's mean is not
/// `1/(2√N) + 0i` within [`MEAN_TOLERANCE`].
pub fn run_pipeline(
    inst: &OddPrimeInstance,
    plan: &RotationPlan,
    opts: &SimOptions,
) -> Result<StateVector> {
    let mut state = rotated_state(inst, plan, opts)?;
    let mean = state.mean();
    let target = target_mean(inst);
    if (mean - Complex64::new(target, 0.0)).norm() > MEAN_TOLERANCE {
        return Err(Error::MeanOffTarget {
            re: mean.re,
            im: mean.im,
            target,
        });
    }
    state.invert_about_mean();
    Ok(state)
}

/// Closed-form final state.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedFinalState {
    /// `(1 - e^{iθ})/√N`.
    pub even_amplitude: Complex64,
    /// `(1 - e^{-iθ})/√N`.
    pub odd_amplitude: Complex64,
    /// Largest gap between the exponential form and
    /// `√N/(p-1) ∓ i√(2p-2-N)/(p-1)`.
    pub closed_form_gap: f64,
    pub amplitudes: Vec<Complex64>,
}

impl PredictedFinalState {
    /// Probability of each nonresidue, `|even_amplitude|²`.
    pub fn qnr_probability(&self) -> f64 {
        self.even_amplitude.norm_sqr()
    }
}

pub fn predicted_final(inst: &OddPrimeInstance, plan: &RotationPlan) -> PredictedFinalState {
    let size = inst.size() as f64;
    let pm1 = (inst.p() - 1) as f64;
    let inv_sqrt = 1.0 / libm::sqrt(size);
    let one = Complex64::new(1.0, 0.0);
    let even_amplitude = (one - phase(plan.theta)) * inv_sqrt;
    let odd_amplitude = (one - phase(-plan.theta)) * inv_sqrt;

    let re = libm::sqrt(size) / pm1;
    let im = libm::sqrt(2.0 * pm1 - size) / pm1;
    let closed_form_gap = (even_amplitude - Complex64::new(re, -im))
        .norm()
        .max((odd_amplitude - Complex64::new(re, im)).norm());

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); inst.size() as usize];
    for &x in plan.even_qnr.indices() {
        amplitudes[x] = even_amplitude;
    }
    for &x in plan.odd_qnr.indices() {
        amplitudes[x] = odd_amplitude;
    }
    PredictedFinalState {
        even_amplitude,
        odd_amplitude,
        closed_form_gap,
        amplitudes,
    }
}

/// Whether a prime went through the simulation or a residue-class shortcut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SamplePath {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: alloc::string::String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
        }
    }

    fn holds(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: if passed { 0.0 } else { 1.0 },
            threshold: 0.0,
        }
    }
}

/// Outcome of checking one prime against its oracles.
///
/// Quantum metrics are `None` on the classical path.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub p: u64,
    pub n: u32,
    pub size: u64,
    pub path: SamplePath,
    pub theta: Option<f64>,
    pub classical_value: Option<u64>,
    pub tolerance: f64,
    pub max_deviation: Option<f64>,
    pub max_non_qnr_amplitude: Option<f64>,
    pub pre_inversion_mean: Option<[f64; 2]>,
    pub target_mean: Option<f64>,
    pub probability_sum: Option<f64>,
    pub qnr_count: Option<usize>,
    pub nonresidues_above_p: Option<usize>,
    pub residues_above_p: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Runs the pipeline for `p` and checks it against the closed form, the
/// brute-force nonresidue set and the alternative rotation schedule.
///
/// Failed checks are recorded in the report. Errors are returned only for
/// invalid input (composite `p`, `p` over the qubit cap).
pub fn verify(p: u64, opts: &SimOptions) -> Result<VerificationReport> {
    let tol = opts.tolerance;
    let inst = OddPrimeInstance::new(p)?;
    if let Some(value) = qnr_shortcut(p)? {
        let ok = jacobi(value as i64, p)? == -1;
        return Ok(VerificationReport {
            p,
            n: inst.n(),
            size: inst.size(),
            path: SamplePath::Classical,
            theta: None,
            classical_value: Some(value),
            tolerance: tol,
            max_deviation: None,
            max_non_qnr_amplitude: None,
            pre_inversion_mean: None,
            target_mean: None,
            probability_sum: None,
            qnr_count: None,
            nonresidues_above_p: None,
            residues_above_p: None,
            checks: vec![Check::holds("shortcut_is_nonresidue", ok)],
            passed: ok,
        });
    }

    let (inst, plan) = match build_instance(p, opts) {
        Err(Error::ParitySplit {
            even,
            odd,
            expected,
        }) => {
            let mut report = empty_quantum_report(&inst, tol);
            report.checks.push(Check::at_most(
                "parity_split",
                (even.abs_diff(expected) + odd.abs_diff(expected)) as f64,
                0.0,
            ));
            report.passed = false;
            return Ok(report);
        }
        other => other?,
    };
    let mut report = empty_quantum_report(&inst, tol);
    report.theta = Some(plan.theta);
    report.nonresidues_above_p = Some(plan.nonresidues_above_p);
    report.residues_above_p = Some(plan.residues_above_p);
    report.checks.push(Check::holds("parity_split", true));

    let target = target_mean(&inst);
    let mut state = rotated_state(&inst, &plan, opts)?;
    let mean = state.mean();
    report.pre_inversion_mean = Some([mean.re, mean.im]);
    report.target_mean = Some(target);
    report.checks.push(Check::at_most(
        "mean_on_target",
        (mean - Complex64::new(target, 0.0)).norm(),
        tol,
    ));
    report.checks.push(Check::at_most(
        "mean_is_real",
        mean.im.abs(),
        IDENTITY_TOLERANCE,
    ));
    state.invert_about_mean();

    let predicted = predicted_final(&inst, &plan);
    report.checks.push(Check::at_most(
        "closed_forms_agree",
        predicted.closed_form_gap,
        IDENTITY_TOLERANCE,
    ));
    let max_dev = state
        .amplitudes()
        .iter()
        .zip(&predicted.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    report.max_deviation = Some(max_dev);
    report
        .checks
        .push(Check::at_most("amplitudes_match_prediction", max_dev, tol));

    let all_qnr = plan.all_qnr();
    let max_non_qnr = (0..state.len())
        .filter(|&x| !all_qnr.contains(x))
        .map(|x| state.amplitude(x).norm())
        .fold(0.0, f64::max);
    report.max_non_qnr_amplitude = Some(max_non_qnr);
    report.checks.push(Check::at_most(
        "non_qnr_amplitudes_vanish",
        max_non_qnr,
        tol,
    ));

    let support: Vec<u64> = (0..state.len())
        .filter(|&x| state.amplitude(x).norm() > tol)
        .map(|x| x as u64)
        .collect();
    let oracle = qnr_set_bruteforce(p);
    report.qnr_count = Some(support.len());
    report
        .checks
        .push(Check::holds("support_equals_bruteforce", support == oracle));

    let expected_prob = 2.0 / (p - 1) as f64;
    let magnitude_err = all_qnr
        .indices()
        .iter()
        .map(|&x| (state.probability(x) - expected_prob).abs())
        .fold(0.0, f64::max);
    report
        .checks
        .push(Check::at_most("uniform_magnitude", magnitude_err, tol));

    let prob_sum = state.norm_sqr();
    report.probability_sum = Some(prob_sum);
    report.checks.push(Check::at_most(
        "probability_sum",
        (prob_sum - 1.0).abs(),
        tol,
    ));

    let other = match plan.schedule {
        Schedule::TwoStep => Schedule::Direct,
        Schedule::Direct => Schedule::TwoStep,
    };
    let mut alt = rotated_state(&inst, &plan.clone().with_schedule(other), opts)?;
    alt.invert_about_mean();
    report.checks.push(Check::at_most(
        "schedule_equivalence",
        state.max_deviation(&alt),
        IDENTITY_TOLERANCE,
    ));

    let reference = state.amplitude(plan.even_qnr.indices()[0]);
    let conj_gap = plan
        .even_qnr
        .indices()
        .iter()
        .map(|&x| (state.amplitude(x) - reference).norm())
        .chain(
            plan.odd_qnr
                .indices()
                .iter()
                .map(|&x| (state.amplitude(x) - reference.conj()).norm()),
        )
        .fold(0.0, f64::max);
    report.checks.push(Check::at_most(
        "conjugate_pairing",
        conj_gap,
        IDENTITY_TOLERANCE,
    ));

    report.passed = report.checks.iter().all(|c| c.passed);
    Ok(report)
}

fn empty_quantum_report(inst: &OddPrimeInstance, tol: f64) -> VerificationReport {
    VerificationReport {
        p: inst.p(),
        n: inst.n(),
        size: inst.size(),
        path: SamplePath::Quantum,
        theta: None,
        classical_value: None,
        tolerance: tol,
        max_deviation: None,
        max_non_qnr_amplitude: None,
        pre_inversion_mean: None,
        target_mean: None,
        probability_sum: None,
        qnr_count: None,
        nonresidues_above_p: None,
        residues_above_p: None,
        checks: Vec::new(),
        passed: false,
    }
}

/// Prepared sampler for one prime. Draw `i` under seed `s` is a pure function
/// of `(s, i)`.
#[derive(Debug, Clone)]
pub struct QnrSampler {
    p: u64,
    source: Source,
}

#[derive(Debug, Clone)]
enum Source {
    Classical(u64),
    Quantum(MeasurementTable),
}

impl QnrSampler {
    pub fn new(p: u64, opts: &SimOptions) -> Result<Self> {
        let source = match qnr_shortcut(p)? {
            Some(value) => Source::Classical(value),
            None => {
                let (inst, plan) = build_instance(p, opts)?;
                let state = run_pipeline(&inst, &plan, opts)?;
                Source::Quantum(MeasurementTable::new(&state)?)
            }
        };
        Ok(Self { p, source })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn path(&self) -> SamplePath {
        match self.source {
            Source::Classical(_) => SamplePath::Classical,
            Source::Quantum(_) => SamplePath::Quantum,
        }
    }

    /// Observation number `index` under `seed`, checked to be a nonresidue.
    pub fn draw(&self, seed: u64, index: u64) -> Result<u64> {
        let value = match &self.source {
            Source::Classical(v) => return Ok(*v),
            Source::Quantum(table) => table.sample(&mut draw_rng(seed, index)) as u64,
        };
        if jacobi(value as i64, self.p)? != -1 {
            return Err(Error::SampleOutsideSupport(value));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QnrSamples {
    pub path: SamplePath,
    pub samples: Vec<u64>,
}

/// `count` nonresidues of `p`. Primes with a residue-class shortcut return the
/// shortcut value every time.
pub fn sample_qnr(p: u64, seed: u64, count: usize, opts: &SimOptions) -> Result<QnrSamples> {
    let sampler = QnrSampler::new(p, opts)?;
    let samples = (0..count as u64)
        .map(|i| sampler.draw(seed, i))
        .collect::<Result<_>>()?;
    Ok(QnrSamples {
        path: sampler.path(),
        samples,
    })
}
