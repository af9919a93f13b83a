use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} must be odd and positive")]
    InvalidModulus(u64),
    #[error("{0} is above the supported range (2^63)")]
    OutOfRange(u64),
    #[error("p = 2 has no quadratic nonresidues")]
    EvenPrime,
    #[error("p = {p} is {residue} mod 8, the quantum path needs p = 1 mod 8")]
    WrongResidueClass { p: u64, residue: u64 },
    #[error("p = {0} is not 1 mod 4")]
    NotOneModFour(u64),
    #[error("{degree} does not divide p - 1 for p = {p}")]
    DegreeNotDivisor { degree: u64, p: u64 },
    #[error("{a} is not coprime to {p}")]
    NotCoprime { a: u64, p: u64 },
    #[error("cos(theta) = {0} is outside [-1, 1]")]
    ArgumentOutOfArccosDomain(f64),
    #[error("{requested} qubits requested, cap is {cap}")]
    QubitCapExceeded { requested: u32, cap: u32 },
    #[error("qubit count must be at least 1, got {0}")]
    InvalidQubitCount(u32),
    #[error("basis index {index} does not fit in {n} qubits")]
    IndexOutOfRange { index: usize, n: u32 },
    #[error("indicator is over {found} qubits, state has {expected}")]
    QubitMismatch { expected: u32, found: u32 },
    #[error("amplitude vector length {0} is not a power of two")]
    InvalidLength(usize),
    #[error("state norm squared is {0}, expected 1")]
    NotNormalized(f64),
    #[error("pre-inversion mean is {re}{im:+}i, target {target}")]
    MeanOffTarget { re: f64, im: f64, target: f64 },
    #[error("nonresidue parity split is {even}/{odd}, expected {expected} each")]
    ParitySplit {
        even: usize,
        odd: usize,
        expected: usize,
    },
    #[error("marked set has {found} elements, {expected} were declared")]
    CountMismatch { expected: usize, found: usize },
    #[error("marked set is empty")]
    EmptyMarkedSet,
    #[error("rotation halves have {plus} and {minus} elements")]
    UnbalancedPairing { plus: usize, minus: usize },
    #[error("amplitude at {index} has imaginary part {imag}")]
    NonRealAmplitude { index: usize, imag: f64 },
    #[error("no final rotation exists: cos(theta) = {0}")]
    InfeasibleAngle(f64),
    #[error("sampled {0}, which is not a nonresidue")]
    SampleOutsideSupport(u64),
}
