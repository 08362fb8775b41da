use std::fmt;

use super::{check_targets, index_table, real, Amplitude, MAX_QUBITS, TOL};
use crate::{Error, Result};

/// Normalized pure state of `1..=8` qubits.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Builds a state from raw amplitudes. The length must be a power of two
    /// and the squared norm must be 1 within [`TOL`].
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        let s = Self::from_raw(amps)?;
        let norm_sqr = s.norm_sqr();
        if (norm_sqr - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(s)
    }

    /// Builds a state from raw amplitudes, rescaling them to unit norm.
    pub fn normalized(amps: Vec<Amplitude>) -> Result<Self> {
        let mut s = Self::from_raw(amps)?;
        let norm_sqr = s.norm_sqr();
        if norm_sqr < super::DEGENERATE_PROBABILITY {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let scale = norm_sqr.sqrt().recip();
        s.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(s)
    }

    /// Real amplitudes, renormalized. Convenient for literal states.
    pub fn from_reals(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().copied().map(real).collect())
    }

    fn from_raw(amps: Vec<Amplitude>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                actual: len,
            });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { num_qubits, amps })
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, amps: Vec<Amplitude>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { num_qubits, amps }
    }

    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        if index >= 1 << num_qubits {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut amps = vec![Amplitude::default(); 1 << num_qubits];
        amps[index] = real(1.0);
        Ok(Self { num_qubits, amps })
    }

    /// Single qubit `α|0⟩ + β|1⟩`; must already be normalized.
    pub fn qubit(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        tensor(&[self.clone(), other.clone()])
    }

    /// Global phase multiplication.
    pub fn scaled(&self, factor: Amplitude) -> StateVector {
        Self {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Partial inner product `⟨ket|_targets |self⟩`: removes the target qubits,
    /// leaving the remaining ones in ascending order.
    ///
    /// Used to discard qubits whose state is known after a measurement. The
    /// result is renormalized; a negligible overlap is an error.
    pub fn contract(&self, targets: &[usize], ket: &StateVector) -> Result<StateVector> {
        check_targets(self.num_qubits, targets)?;
        if ket.num_qubits != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: targets.len(),
                actual: ket.num_qubits,
            });
        }
        if targets.len() == self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits - 1,
                actual: targets.len(),
            });
        }
        let table = index_table(self.num_qubits, targets);
        let amps: Vec<Amplitude> = table
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&ket.amps)
                    .map(|(&i, k)| k.conj() * self.amps[i])
                    .sum()
            })
            .collect();
        StateVector::normalized(amps).map_err(|e| match e {
            Error::NotNormalized { norm_sqr } => Error::DegenerateBranch {
                probability: norm_sqr,
            },
            other => other,
        })
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector[{}q]", self.num_qubits)?;
        let mut list = f.debug_map();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 1e-24 {
                list.entry(
                    &format_args!("{:0width$b}", i, width = self.num_qubits),
                    &format_args!("{:+.6}{:+.6}i", a.re, a.im),
                );
            }
        }
        list.finish()
    }
}

/// Kronecker product in argument order.
pub fn tensor(parts: &[StateVector]) -> Result<StateVector> {
    let total: usize = parts.iter().map(|p| p.num_qubits).sum();
    if total > MAX_QUBITS {
        return Err(Error::CapacityExceeded {
            requested: total,
            max: MAX_QUBITS,
        });
    }
    if parts.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let mut amps = vec![real(1.0)];
    for p in parts {
        amps = amps
            .iter()
            .flat_map(|a| p.amps.iter().map(move |b| a * b))
            .collect();
    }
    Ok(StateVector {
        num_qubits: total,
        amps,
    })
}

/// Relabels qubits: input qubit `i` becomes output qubit `perm[i]`.
pub fn permute_qubits(s: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let n = s.num_qubits;
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
    }
    let mut amps = vec![Amplitude::default(); s.amps.len()];
    for (i, a) in s.amps.iter().enumerate() {
        let j = (0..n).fold(0usize, |acc, q| {
            let b = i >> (n - 1 - q) & 1;
            acc | b << (n - 1 - perm[q])
        });
        amps[j] = *a;
    }
    Ok(StateVector {
        num_qubits: n,
        amps,
    })
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity_pure(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    Ok(s1.inner(s2)?.norm_sqr())
}

pub fn equal_up_to_global_phase(s1: &StateVector, s2: &StateVector, tol: f64) -> Result<bool> {
    Ok(fidelity_pure(s1, s2)? >= 1.0 - tol)
}
