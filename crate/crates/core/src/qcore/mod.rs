//! Dense statevector engine for registers of up to eight qubits.
//!
//! Basis indices are big-endian: qubit 0 is the most significant bit, so the
//! amplitude of `|01101⟩` lives at index `0b01101`. Every operation is a pure
//! function of its inputs; measurements take an explicit unit-interval sample
//! (sampled mode) or return every non-degenerate branch (exhaustive mode).

mod density;
mod gate;
mod measure;
mod state;

pub use density::{reduced_density, DensityMatrix};
pub use gate::{apply_1q, apply_2q, Matrix, Matrix2, Matrix4};
pub use measure::{
    measure_bell_pair, measure_bell_pair_branches, measure_qubit, measure_qubit_branches,
    BasisOutcome, Branch, SingleQubitBasis,
};
pub use state::{equal_up_to_global_phase, fidelity_pure, permute_qubits, tensor, StateVector};

pub use num_complex::Complex64 as Amplitude;

/// Largest register the engine will allocate.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for normalization, unitarity and equality checks.
pub const TOL: f64 = 1e-12;

/// Smallest eigenvalue accepted for a positive semidefinite density matrix.
pub const PSD_FLOOR: f64 = -1e-10;

/// Branches below this probability are never renormalized.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

#[inline]
pub(crate) fn real(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

/// Full register indices grouped by the values of `targets`.
///
/// `table[rest][sub]` is the index whose target bits (in the order given)
/// spell `sub` and whose remaining bits (in ascending qubit order) spell `rest`.
pub(crate) fn index_table(num_qubits: usize, targets: &[usize]) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..num_qubits).filter(|q| !targets.contains(q)).collect();
    let k = targets.len();
    let m = others.len();
    let bit = |q: usize| num_qubits - 1 - q;
    (0..1usize << m)
        .map(|rest| {
            let base = others.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if rest >> (m - 1 - pos) & 1 == 1 {
                    acc | 1 << bit(q)
                } else {
                    acc
                }
            });
            (0..1usize << k)
                .map(|sub| {
                    targets.iter().enumerate().fold(base, |acc, (pos, &q)| {
                        if sub >> (k - 1 - pos) & 1 == 1 {
                            acc | 1 << bit(q)
                        } else {
                            acc
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub(crate) fn check_targets(num_qubits: usize, targets: &[usize]) -> crate::Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= num_qubits {
            return Err(crate::Error::IndexOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if targets[..i].contains(&q) {
            return Err(crate::Error::DuplicateQubit(q));
        }
    }
    Ok(())
}
