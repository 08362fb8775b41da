//! Labelled qubit register used by the protocol runners.
//!
//! Qubits are addressed by role label; measured qubits are contracted away
//! so that the register stays within the engine's capacity when ancillas are
//! attached later. Measuring every remaining qubit keeps them, collapsed.

use crate::bell::BellKind;
use crate::qcore::{
    apply_1q, apply_2q, measure_bell_pair, measure_bell_pair_branches, measure_qubit,
    measure_qubit_branches, reduced_density, tensor, BasisOutcome, Matrix2, Matrix4,
    SingleQubitBasis, StateVector,
};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Register {
    labels: Vec<&'static str>,
    state: StateVector,
}

impl Register {
    pub fn new(labels: Vec<&'static str>, state: StateVector) -> Self {
        debug_assert_eq!(labels.len(), state.num_qubits());
        Register { labels, state }
    }

    fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| *l == label)
            .ok_or(Error::IndexOutOfRange {
                index: usize::MAX,
                num_qubits: self.labels.len(),
            })
    }

    fn collapse(
        &self,
        targets: &[usize],
        collapsed: StateVector,
        ket: &StateVector,
    ) -> Result<Register> {
        if targets.len() == self.labels.len() {
            return Ok(Register {
                labels: self.labels.clone(),
                state: collapsed,
            });
        }
        let rest = collapsed.contract(targets, ket)?;
        Ok(self.removing(targets, rest))
    }

    fn removing(&self, targets: &[usize], state: StateVector) -> Register {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| !targets.contains(i))
            .map(|(_, l)| *l)
            .collect();
        Register { labels, state }
    }

    pub fn attach(&self, label: &'static str, ket: &StateVector) -> Result<Register> {
        let mut labels = self.labels.clone();
        labels.push(label);
        Ok(Register {
            labels,
            state: tensor(&[self.state.clone(), ket.clone()])?,
        })
    }

    pub fn apply_1q(&self, label: &str, u: &Matrix2) -> Result<Register> {
        let q = self.index(label)?;
        Ok(Register {
            labels: self.labels.clone(),
            state: apply_1q(&self.state, q, u)?,
        })
    }

    pub fn apply_2q(&self, first: &str, second: &str, u: &Matrix4) -> Result<Register> {
        let (q1, q2) = (self.index(first)?, self.index(second)?);
        Ok(Register {
            labels: self.labels.clone(),
            state: apply_2q(&self.state, q1, q2, u)?,
        })
    }

    /// Sampled single-qubit measurement; the measured qubit is discarded.
    pub fn measure(
        &self,
        label: &str,
        basis: &SingleQubitBasis,
        sample: f64,
    ) -> Result<(BasisOutcome, f64, Register)> {
        let q = self.index(label)?;
        let b = measure_qubit(&self.state, q, basis, sample)?;
        let reg = self.collapse(&[q], b.state, &basis.ket_state(b.outcome))?;
        Ok((b.outcome, b.probability, reg))
    }

    pub fn measure_all(
        &self,
        label: &str,
        basis: &SingleQubitBasis,
    ) -> Result<Vec<(BasisOutcome, f64, Register)>> {
        let q = self.index(label)?;
        measure_qubit_branches(&self.state, q, basis)?
            .into_iter()
            .map(|b| {
                let reg = self.collapse(&[q], b.state, &basis.ket_state(b.outcome))?;
                Ok((b.outcome, b.probability, reg))
            })
            .collect()
    }

    /// Sampled Bell measurement of `(first, second)`; both are discarded.
    pub fn measure_bell(
        &self,
        first: &str,
        second: &str,
        sample: f64,
    ) -> Result<(BellKind, f64, Register)> {
        let (q1, q2) = (self.index(first)?, self.index(second)?);
        let b = measure_bell_pair(&self.state, q1, q2, sample)?;
        let reg = self.collapse(&[q1, q2], b.state, &b.outcome.state())?;
        Ok((b.outcome, b.probability, reg))
    }

    pub fn measure_bell_all(
        &self,
        first: &str,
        second: &str,
    ) -> Result<Vec<(BellKind, f64, Register)>> {
        let (q1, q2) = (self.index(first)?, self.index(second)?);
        measure_bell_pair_branches(&self.state, q1, q2)?
            .into_iter()
            .map(|b| {
                let reg = self.collapse(&[q1, q2], b.state, &b.outcome.state())?;
                Ok((b.outcome, b.probability, reg))
            })
            .collect()
    }

    /// `⟨ψ|ρ|ψ⟩` for the single qubit `label`.
    pub fn fidelity(&self, label: &str, psi: &StateVector) -> Result<f64> {
        let q = self.index(label)?;
        reduced_density(&self.state, &[q])?.expectation(psi)
    }
}
