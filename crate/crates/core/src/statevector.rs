//! Complex amplitude vectors over `2^n` basis states.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result, DEFAULT_MAX_QUBITS};

/// Largest deviation of the norm from 1 that [`measure`](StateVector::measure) accepts.
pub const MEASURE_NORM_TOLERANCE: f64 = 1e-6;

/// Norm tolerance for [`StateVector::from_amplitudes`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Amplitudes of an `n`-qubit register; index `x` is the basis state `|x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: u32,
    amplitudes: Vec<Complex64>,
}

/// A set of marked basis indices, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Indicator {
    n: u32,
    marked: Vec<usize>,
}

impl Indicator {
    pub fn new(n: u32, mut marked: Vec<usize>) -> Result<Self> {
        marked.sort_unstable();
        marked.dedup();
        if let Some(&index) = marked.last() {
            if n >= usize::BITS || index >> n != 0 {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        Ok(Self { n, marked })
    }

    pub fn from_predicate(n: u32, mut pred: impl FnMut(usize) -> bool) -> Self {
        let marked = (0..1usize << n).filter(|&x| pred(x)).collect();
        Self { n, marked }
    }

    pub fn empty(n: u32) -> Self {
        Self {
            n,
            marked: Vec::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.marked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marked.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.marked.binary_search(&x).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.marked
    }

    /// Splits on the low bit: `(even, odd)`.
    pub fn split_parity(&self) -> (Indicator, Indicator) {
        let (even, odd) = self.marked.iter().partition(|&&x| x & 1 == 0);
        (
            Indicator {
                n: self.n,
                marked: even,
            },
            Indicator {
                n: self.n,
                marked: odd,
            },
        )
    }

    pub fn union(&self, other: &Indicator) -> Result<Indicator> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut marked = self.marked.clone();
        marked.extend_from_slice(&other.marked);
        Indicator::new(self.n, marked)
    }

    /// Doubles the space with a new low bit: `x` becomes `2x` and `2x + 1`.
    /// Returns the two halves `(2x, 2x + 1)`.
    pub fn augment(&self) -> (Indicator, Indicator) {
        let n = self.n + 1;
        let low = self.marked.iter().map(|&x| x << 1).collect();
        let high = self.marked.iter().map(|&x| (x << 1) | 1).collect();
        (Indicator { n, marked: low }, Indicator { n, marked: high })
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn check_qubits(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if n > cap {
        return Err(Error::QubitCapExceeded { requested: n, cap });
    }
    Ok(())
}

/// `e^{i·angle}`.
pub fn phase(angle: f64) -> Complex64 {
    let (s, c) = libm::sincos(angle);
    Complex64::new(c, s)
}

impl StateVector {
    /// Equal superposition, `H^{⊗n}|0⟩`, under the default qubit cap.
    pub fn uniform(n: u32) -> Result<Self> {
        Self::uniform_capped(n, DEFAULT_MAX_QUBITS)
    }

    pub fn uniform_capped(n: u32, max_qubits: u32) -> Result<Self> {
        check_qubits(n, max_qubits)?;
        let len = 1usize << n;
        let amp = Complex64::new(libm::sqrt(1.0 / len as f64), 0.0);
        Ok(Self {
            n,
            amplitudes: vec![amp; len],
        })
    }

    /// The basis state `|index⟩`.
    pub fn basis(n: u32, index: usize) -> Result<Self> {
        check_qubits(n, DEFAULT_MAX_QUBITS)?;
        if index >> n != 0 {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// squared norm within [`NORM_TOLERANCE`] of 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidLength(len));
        }
        let state = Self {
            n: len.trailing_zeros(),
            amplitudes,
        };
        let norm = state.norm_sqr();
        if libm::fabs(norm - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        self.amplitudes[x]
    }

    pub fn probability(&self, x: usize) -> f64 {
        self.amplitudes[x].norm_sqr()
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes.iter().map(|a| a.norm_sqr())
    }

    /// `Σ |α_x|²`, compensated.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for a in &self.amplitudes {
            acc.add(a.norm_sqr());
        }
        acc.value()
    }

    /// Arithmetic mean of the amplitudes, compensated in each component.
    pub fn mean(&self) -> Complex64 {
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for a in &self.amplitudes {
            re.add(a.re);
            im.add(a.im);
        }
        let len = self.amplitudes.len() as f64;
        Complex64::new(re.value() / len, im.value() / len)
    }

    /// In-place Walsh–Hadamard transform `H^{⊗n}`. Involutive.
    pub fn walsh_hadamard(&mut self) {
        let len = self.amplitudes.len();
        let mut half = 1;
        while half < len {
            for block in self.amplitudes.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            half <<= 1;
        }
        let scale = libm::sqrt(1.0 / len as f64);
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }

    pub fn negate_zero(&mut self) {
        self.amplitudes[0] = -self.amplitudes[0];
    }

    /// Multiplies every amplitude by `-1`.
    pub fn negate_global(&mut self) {
        for a in &mut self.amplitudes {
            *a = -*a;
        }
    }

    /// `α_x ↦ 2ᾱ − α_x`, with `ᾱ` taken from the state before the map.
    pub fn invert_about_mean(&mut self) {
        let twice_mean = self.mean() * 2.0;
        for a in &mut self.amplitudes {
            *a = twice_mean - *a;
        }
    }

    /// The same map as [`invert_about_mean`](Self::invert_about_mean), built
    /// from `H^{⊗n}`, a sign flip on `|0⟩`, `H^{⊗n}` and a global `-1`.
    pub fn invert_about_mean_via_hadamard(&mut self) {
        self.walsh_hadamard();
        self.negate_zero();
        self.walsh_hadamard();
        self.negate_global();
    }

    fn check_indicator(&self, marked: &Indicator) -> Result<()> {
        if marked.n != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: marked.n,
            });
        }
        Ok(())
    }

    /// `α_x ↦ e^{i·angle} α_x` on marked `x`.
    pub fn phase_rotate(&mut self, marked: &Indicator, angle: f64) -> Result<()> {
        self.check_indicator(marked)?;
        let w = phase(angle);
        for &x in &marked.marked {
            self.amplitudes[x] *= w;
        }
        Ok(())
    }

    /// Exact sign flip on marked `x`; `phase_rotate` by `π` without rounding
    /// in the imaginary part.
    pub fn flip_sign(&mut self, marked: &Indicator) -> Result<()> {
        self.check_indicator(marked)?;
        for &x in &marked.marked {
            self.amplitudes[x] = -self.amplitudes[x];
        }
        Ok(())
    }

    /// Draws one basis index with probability `|α_x|²`. The state is left as is.
    pub fn measure<R: RngCore>(&self, rng: &mut R) -> Result<usize> {
        Ok(MeasurementTable::new(self)?.sample(rng))
    }

    /// Largest per-amplitude distance to `other`.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Cumulative distribution of a state's outcome probabilities, for repeated
/// inverse-CDF draws.
#[derive(Debug, Clone)]
pub struct MeasurementTable {
    cumulative: Vec<f64>,
}

impl MeasurementTable {
    pub fn new(state: &StateVector) -> Result<Self> {
        let norm = state.norm_sqr();
        if libm::fabs(norm - 1.0) > MEASURE_NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        let mut total = 0.0;
        let cumulative = state
            .probabilities()
            .map(|p| {
                total += p;
                total
            })
            .collect();
        Ok(Self { cumulative })
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty state");
        let target = unit_f64(rng) * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Uniform draw from `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Generator for draw number `index` under `seed`. Each index gets its own
/// ChaCha stream, so draws can be computed in any order or in parallel.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
