//! Operator-valued arithmetic functions on a truncated Fock space.
//!
//! The crate has four layers:
//!
//! * [`arith`] — exact classical number theory (multiplicative functions,
//!   divisor machinery, CRT, scalar convolutions). Everything else is
//!   checked against this layer.
//! * [`fock`] — finite-truncation operators on the number basis
//!   `{|0>, ..., |D-1>}`: congruence projectors, rotated operators,
//!   phase shifts, Ramanujan-type operators and generalized number
//!   operators.
//! * [`conv`] — Dirichlet / lcm / unitary convolution lifted to
//!   operator sequences, plus the multiplicativity verifiers.
//! * [`berezin`] — the Hardy-space side: reproducing-kernel states,
//!   Berezin symbols (numeric and closed form), radial-limit schedules
//!   and the zeta-operator machinery.

pub mod arith;
pub mod berezin;
pub mod conv;
pub mod fock;
pub mod report;

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("argument must be >= 1")]
    NonPositive,
    #[error("residue {j} out of range for modulus {n}")]
    ResidueOutOfRange { j: u64, n: u64 },
    #[error("congruence residue {residue} not reduced modulo {modulus}")]
    UnreducedResidue { residue: u64, modulus: u64 },
    #[error("modulus must be >= 1")]
    ZeroModulus,
    #[error("empty congruence system")]
    EmptySystem,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("truncation dimension {dim} too small, need at least {required}")]
    DimTooSmall { dim: usize, required: usize },
    #[error("point must lie strictly inside the unit disc (|lambda| = {modulus})")]
    OutsideDisc { modulus: f64 },
    #[error("Re(s) must exceed 1 (got {0})")]
    ZetaDomain(f64),
    #[error("schedule radii must be nonempty, strictly increasing and inside (0,1)")]
    BadSchedule,
}

pub type Result<T> = std::result::Result<T, Error>;
