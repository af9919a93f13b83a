//! Grover iterations and their exact, deterministic variants.
//!
//! A marked set is split into two equal halves that are rotated by `+θ` and
//! `-θ` just before a final inversion about the mean. The imaginary parts
//! cancel in the mean, and `θ` is chosen so the mean sits at half the
//! unmarked amplitude; the inversion then sends every unmarked amplitude to
//! zero.
//!
//! An arbitrary marked set is split by adding one low bit to the register, so
//! each marked `x` becomes the pair `2x` (rotated `+θ`) and `2x + 1`
//! (rotated `-θ`). If fewer than a quarter of the states are marked, ordinary
//! Grover iterations run first until the marked probability peaks.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::statevector::{draw_rng, Indicator, StateVector};
use crate::{Error, Result, SimOptions, IDENTITY_TOLERANCE};

/// Slack allowed on `|cos θ| <= 1` before an angle counts as infeasible.
const COS_SLACK: f64 = 1e-12;

/// How many times the pre-iteration count is decremented when no final
/// angle exists.
const RETRIES: usize = 2;

/// Sign flip on marked states followed by inversion about the mean.
pub fn grover_iteration(state: &mut StateVector, marked: &Indicator) -> Result<()> {
    state.flip_sign(marked)?;
    state.invert_about_mean();
    Ok(())
}

/// Iteration count `t` maximizing `sin²((2t+1)φ)` with `sin φ = √(k/M)`.
///
/// Ties go to the smaller `t`.
pub fn optimal_iterations(total: usize, marked: usize) -> Result<usize> {
    if marked == 0 {
        return Err(Error::EmptyMarkedSet);
    }
    if marked > total {
        return Err(Error::CountMismatch {
            expected: total,
            found: marked,
        });
    }
    let phi = libm::asin(libm::sqrt(marked as f64 / total as f64));
    let success = |t: usize| {
        let s = libm::sin((2 * t + 1) as f64 * phi);
        s * s
    };
    let guess = libm::round(PI / (4.0 * phi) - 0.5).max(0.0) as usize;
    let mut best = guess.saturating_sub(1);
    for t in best + 1..=guess + 1 {
        if success(t) > success(best) + IDENTITY_TOLERANCE {
            best = t;
        }
    }
    Ok(best)
}

/// Final angle for two marked states with real amplitude `m` among `total`
/// states whose other amplitudes are all `u`.
pub fn solve_final_theta(m: f64, u: f64, total: usize) -> Result<f64> {
    solve_final_theta_for(m, u, total, 2)
}

/// Final angle for `marked` states of amplitude `m` (half rotated `+θ`, half
/// `-θ`) among `total` states whose other amplitudes are all `u`.
///
/// Solves `(marked·m·cos θ + (total - marked)·u) / total = u/2`, i.e.
/// `cos θ = u(2·marked - total) / (2·marked·m)`.
pub fn solve_final_theta_for(m: f64, u: f64, total: usize, marked: usize) -> Result<f64> {
    if u == 0.0 {
        return Ok(PI / 2.0);
    }
    let k = marked as f64;
    let cos = u * (2.0 * k - total as f64) / (2.0 * k * m);
    acos_checked(cos)
}

fn acos_checked(cos: f64) -> Result<f64> {
    if !cos.is_finite() || cos.abs() > 1.0 + COS_SLACK {
        return Err(Error::InfeasibleAngle(cos));
    }
    Ok(libm::acos(cos.clamp(-1.0, 1.0)))
}

/// Parameters of one exact amplification run.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationPlan {
    /// States in the simulated register.
    pub total: usize,
    /// Marked states in the simulated register.
    pub marked: usize,
    pub pre_iterations: usize,
    pub final_theta: f64,
    /// Rotated by `+final_theta`.
    pub plus: Indicator,
    /// Rotated by `-final_theta`.
    pub minus: Indicator,
}

/// Amplifies `plus ∪ minus` so that, after the final inversion, only those
/// states carry amplitude, each with probability `1/|plus ∪ minus|`.
pub fn amplify_pairs(
    plus: &Indicator,
    minus: &Indicator,
    opts: &SimOptions,
) -> Result<(AmplificationPlan, StateVector)> {
    let n = plus.n();
    let marked = plus.union(minus)?;
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    if plus.len() != minus.len() || marked.len() != plus.len() + minus.len() {
        return Err(Error::UnbalancedPairing {
            plus: plus.len(),
            minus: minus.len(),
        });
    }
    opts.check_qubits(n)?;
    let total = 1usize << n;
    let k = marked.len();

    let (pre_iterations, final_theta, mut state) = if 4 * k >= total {
        // one step from the uniform state: cos θ = 1 - M/(2k)
        let cos = (2 * k) as f64 - total as f64;
        let theta = acos_checked(cos / (2 * k) as f64)?;
        (0, theta, StateVector::uniform_capped(n, opts.max_qubits)?)
    } else {
        pre_iterate(&marked, opts)?
    };

    state.phase_rotate(plus, final_theta)?;
    state.phase_rotate(minus, -final_theta)?;
    state.invert_about_mean();
    let plan = AmplificationPlan {
        total,
        marked: k,
        pre_iterations,
        final_theta,
        plus: plus.clone(),
        minus: minus.clone(),
    };
    Ok((plan, state))
}

/// Grover iterations up to the peak, then the angle that finishes exactly.
/// Steps back at most [`RETRIES`] times if no angle exists at the peak.
fn pre_iterate(marked: &Indicator, opts: &SimOptions) -> Result<(usize, f64, StateVector)> {
    let n = marked.n();
    let total = 1usize << n;
    let unmarked_probe = (0..total)
        .find(|&x| !marked.contains(x))
        .expect("fewer than a quarter marked");
    let peak = optimal_iterations(total, marked.len())?;
    let mut last = Error::InfeasibleAngle(f64::NAN);
    for t in (peak.saturating_sub(RETRIES)..=peak).rev() {
        let mut state = StateVector::uniform_capped(n, opts.max_qubits)?;
        for _ in 0..t {
            grover_iteration(&mut state, marked)?;
        }
        if let Some((index, a)) = state
            .amplitudes()
            .iter()
            .enumerate()
            .find(|(_, a)| a.im.abs() > IDENTITY_TOLERANCE)
        {
            return Err(Error::NonRealAmplitude { index, imag: a.im });
        }
        let m = state.amplitude(marked.indices()[0]).re;
        let u = state.amplitude(unmarked_probe).re;
        match solve_final_theta_for(m, u, total, marked.len()) {
            Ok(theta) => return Ok((t, theta, state)),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Final state for sampling uniformly from `marked` (of declared size `k`)
/// on an `n + 1` qubit register whose low bit pairs the halves.
pub fn amplify_known_set(
    marked: &Indicator,
    k: usize,
    opts: &SimOptions,
) -> Result<(AmplificationPlan, StateVector)> {
    if marked.len() != k {
        return Err(Error::CountMismatch {
            expected: k,
            found: marked.len(),
        });
    }
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    opts.check_qubits(marked.n() + 1)?;
    let (plus, minus) = marked.augment();
    amplify_pairs(&plus, &minus, opts)
}

/// One uniform draw from a marked set of known size `k`.
pub fn deterministic_known_set_sample(
    marked: &Indicator,
    k: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<usize> {
    let (_, state) = amplify_known_set(marked, k, opts)?;
    Ok(state.measure(&mut draw_rng(seed, 0))? >> 1)
}

/// `count` independent uniform draws from a marked set of known size `k`.
pub fn known_set_samples(
    marked: &Indicator,
    k: usize,
    seed: u64,
    count: usize,
    opts: &SimOptions,
) -> Result<Vec<usize>> {
    let (_, state) = amplify_known_set(marked, k, opts)?;
    let table = crate::statevector::MeasurementTable::new(&state)?;
    Ok((0..count as u64)
        .map(|i| table.sample(&mut draw_rng(seed, i)) >> 1)
        .collect())
}

/// Grover search for a single marked `omega` that succeeds with certainty.
pub fn deterministic_single_marked(
    n: u32,
    omega: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<usize> {
    let marked = Indicator::new(n, alloc::vec![omega])?;
    deterministic_known_set_sample(&marked, 1, seed, opts)
}
