//! Exact amplitude amplification on a statevector simulator.
//!
//! The crate samples quadratic nonresidues modulo a prime `p ≡ 1 (mod 8)` by
//! rotating the phases of the even and odd nonresidues by `±θ` so that a single
//! inversion about the mean annihilates every other basis state. The same
//! construction gives a deterministic Grover search for one marked state and
//! exact uniform sampling from any marked set of known size.
//!
//! Modules:
//!
//! - [`number_theory`]: Jacobi symbols, primality, residue shortcuts and the
//!   brute-force oracles the simulations are checked against.
//! - [`statevector`]: complex amplitude vectors with the Walsh–Hadamard
//!   transform, phase rotations, inversion about the mean and measurement.
//! - [`qnr`]: instance construction, the nonresidue pipeline, its closed-form
//!   prediction, verification and sampling.
//! - [`amplify`]: Grover iterations and the deterministic variants built on a
//!   final `±θ` rotation.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature for
//! `std::error::Error` interop and `serde` for report serialization.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod amplify;
mod error;
pub mod number_theory;
pub mod qnr;
pub mod statevector;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default cap on simulated qubits (2^26 amplitudes, 1 GiB).
pub const DEFAULT_MAX_QUBITS: u32 = 26;

/// Default pass/fail tolerance on amplitudes and probabilities.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Tolerance for checks that are algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Simulation limits shared by the high-level entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub max_qubits: u32,
    pub tolerance: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl SimOptions {
    pub(crate) fn check_qubits(&self, n: u32) -> Result<()> {
        if n > self.max_qubits {
            Err(Error::QubitCapExceeded {
                requested: n,
                cap: self.max_qubits,
            })
        } else {
            Ok(())
        }
    }
}
