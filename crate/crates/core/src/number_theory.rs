//! Classical modular arithmetic.
//!
//! Residues are always represented in `1..p`, so "even" and "odd" refer to
//! those representatives.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Largest accepted prime for instance construction.
pub const MAX_PRIME: u64 = 1 << 63;

/// A validated odd prime with the register size derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OddPrimeInstance {
    p: u64,
    n: u32,
}

impl OddPrimeInstance {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_PRIME {
            return Err(Error::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        // least n with 2^n > p
        let n = u64::BITS - p.leading_zeros();
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Qubit count: the least `n` with `2^n > p`.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Register size `N = 2^n`; `N/2 < p < N`.
    pub fn size(&self) -> u64 {
        1 << self.n
    }

    /// Number of nonresidues (and of residues) in `1..p`.
    pub fn k(&self) -> u64 {
        (self.p - 1) / 2
    }

    pub fn residue_class_mod8(&self) -> u64 {
        self.p & 7
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for the full `u64` range.
///
/// Miller–Rabin with the first twelve prime bases, which has no
/// counterexamples below 3.3·10^24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Jacobi symbol `(a/m)` for odd positive `m`, by the binary algorithm.
///
/// Returns `-1`, `0` or `1`; zero exactly when `gcd(a, m) > 1`. For prime `m`
/// this is the Legendre symbol.
pub fn jacobi(a: i64, m: u64) -> Result<i8> {
    if m == 0 || m & 1 == 0 {
        return Err(Error::InvalidModulus(m));
    }
    let mut a = (a as i128).rem_euclid(m as i128) as u64;
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos & 1 == 1 && matches!(m & 7, 3 | 5) {
            sign = -sign;
        }
        if a & 3 == 3 && m & 3 == 3 {
            sign = -sign;
        }
        core::mem::swap(&mut a, &mut m);
        a %= m;
    }
    Ok(if m == 1 { sign } else { 0 })
}

fn jacobi_unsigned(a: u64, m: u64) -> i8 {
    debug_assert!(m & 1 == 1);
    // a < m < 2^63 on every internal call
    jacobi(a as i64, m).unwrap_or(0)
}

/// A nonresidue read off the residue class of `p`, when one exists.
///
/// `p ≡ 3 (mod 4)` gives `p - 1`; `p ≡ 5 (mod 8)` gives 2; `p ≡ 1 (mod 8)` has
/// no shortcut and returns `None`.
pub fn qnr_shortcut(p: u64) -> Result<Option<u64>> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    let inst = OddPrimeInstance::new(p)?;
    Ok(match inst.residue_class_mod8() {
        3 | 7 => Some(p - 1),
        5 => Some(2),
        _ => None,
    })
}

/// Nonresidues in `1..p` found by listing every square. Uses no Jacobi calls.
pub fn qnr_set_bruteforce(p: u64) -> Vec<u64> {
    let len = p as usize;
    let mut square = vec![false; len];
    for x in 1..p {
        square[mul_mod(x, x, p) as usize] = true;
    }
    (1..p).filter(|&a| !square[a as usize]).collect()
}

/// Nonresidues in `1..p` by Jacobi symbol.
pub fn qnr_set(p: u64) -> Vec<u64> {
    (1..p).filter(|&a| jacobi_unsigned(a, p) == -1).collect()
}

/// Counts of even and odd nonresidues in `1..p`. Both equal `(p - 1)/4`.
pub fn parity_counts(p: u64) -> Result<(u64, u64)> {
    let inst = OddPrimeInstance::new(p)?;
    if inst.p() & 3 != 1 {
        return Err(Error::NotOneModFour(p));
    }
    Ok(qnr_set(p).into_iter().fold((0, 0), |(even, odd), a| {
        if a & 1 == 0 {
            (even + 1, odd)
        } else {
            (even, odd + 1)
        }
    }))
}

/// Whether `a` is a `degree`-th power nonresidue mod `p`, i.e.
/// `a^((p-1)/degree) ≢ 1 (mod p)`.
pub fn power_residue_indicator(a: u64, p: u64, degree: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if degree == 0 || !(p - 1).is_multiple_of(degree) {
        return Err(Error::DegreeNotDivisor { degree, p });
    }
    let a = a % p;
    if a == 0 {
        return Err(Error::NotCoprime { a, p });
    }
    Ok(pow_mod(a, (p - 1) / degree, p) != 1)
}

/// All `degree`-th power nonresidues in `1..p`.
pub fn power_nonresidues(p: u64, degree: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for a in 1..p {
        if power_residue_indicator(a, p, degree)? {
            out.push(a);
        }
    }
    Ok(out)
}
