use serde::{Deserialize, Serialize};

use super::{
    check_targets, index_table, real, Amplitude, StateVector, DEGENERATE_PROBABILITY, TOL,
};
use crate::bell::BellKind;
use crate::{Error, Result};

/// Orthonormal single-qubit basis `{|a⟩, |b⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitBasis {
    ket_a: [Amplitude; 2],
    ket_b: [Amplitude; 2],
}

impl SingleQubitBasis {
    pub fn new(ket_a: [Amplitude; 2], ket_b: [Amplitude; 2]) -> Result<Self> {
        let dot = |u: &[Amplitude; 2], v: &[Amplitude; 2]| -> Amplitude {
            u[0].conj() * v[0] + u[1].conj() * v[1]
        };
        let residual = [
            (dot(&ket_a, &ket_a) - real(1.0)).norm(),
            (dot(&ket_b, &ket_b) - real(1.0)).norm(),
            dot(&ket_a, &ket_b).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !residual.is_finite() || residual > TOL {
            return Err(Error::InvalidBasis { residual });
        }
        Ok(Self { ket_a, ket_b })
    }

    /// `{|0⟩, |1⟩}`.
    pub fn computational() -> Self {
        Self {
            ket_a: [real(1.0), real(0.0)],
            ket_b: [real(0.0), real(1.0)],
        }
    }

    /// `{|+⟩, |−⟩}`.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            ket_a: [real(h), real(h)],
            ket_b: [real(h), real(-h)],
        }
    }

    /// `|a⟩ = cosθ|0⟩ + e^{iφ} sinθ|1⟩`, `|b⟩ = sinθ|0⟩ − e^{iφ} cosθ|1⟩`.
    ///
    /// `θ = π/4, φ = 0` gives `{|+⟩, |−⟩}`.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        let phase = Amplitude::from_polar(1.0, phi);
        Self::new(
            [real(theta.cos()), phase * theta.sin()],
            [real(theta.sin()), -phase * theta.cos()],
        )
    }

    pub fn ket(&self, outcome: BasisOutcome) -> [Amplitude; 2] {
        match outcome {
            BasisOutcome::A => self.ket_a,
            BasisOutcome::B => self.ket_b,
        }
    }

    pub fn ket_state(&self, outcome: BasisOutcome) -> StateVector {
        StateVector::from_parts_unchecked(1, self.ket(outcome).to_vec())
    }
}

/// Which basis vector a single-qubit measurement selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisOutcome {
    A,
    B,
}

impl BasisOutcome {
    pub const ALL: [BasisOutcome; 2] = [BasisOutcome::A, BasisOutcome::B];
}

/// One measurement branch: the outcome, its probability and the
/// renormalized post-measurement state (measured qubits stay in place).
#[derive(Clone, Debug)]
pub struct Branch<O> {
    pub outcome: O,
    pub probability: f64,
    pub state: StateVector,
}

/// Projects `targets` onto `ket`, returning the unnormalized amplitudes.
fn project(s: &StateVector, targets: &[usize], ket: &[Amplitude]) -> Vec<Amplitude> {
    let mut amps = vec![Amplitude::default(); s.amps().len()];
    for row in index_table(s.num_qubits(), targets) {
        let overlap: Amplitude = row
            .iter()
            .zip(ket)
            .map(|(&i, k)| k.conj() * s.amps()[i])
            .sum();
        for (&i, k) in row.iter().zip(ket) {
            amps[i] = k * overlap;
        }
    }
    amps
}

fn branches<O: Copy>(
    s: &StateVector,
    targets: &[usize],
    outcomes: &[(O, Vec<Amplitude>)],
) -> Vec<(O, f64, Vec<Amplitude>)> {
    outcomes
        .iter()
        .map(|(o, ket)| {
            let amps = project(s, targets, ket);
            let p = amps.iter().map(|a| a.norm_sqr()).sum();
            (*o, p, amps)
        })
        .collect()
}

fn finish<O>(num_qubits: usize, outcome: O, probability: f64, amps: Vec<Amplitude>) -> Branch<O> {
    let scale = probability.sqrt().recip();
    Branch {
        outcome,
        probability,
        state: StateVector::from_parts_unchecked(
            num_qubits,
            amps.into_iter().map(|a| a * scale).collect(),
        ),
    }
}

fn exhaustive<O: Copy>(
    s: &StateVector,
    targets: &[usize],
    outcomes: &[(O, Vec<Amplitude>)],
) -> Vec<Branch<O>> {
    branches(s, targets, outcomes)
        .into_iter()
        .filter(|(_, p, _)| *p >= DEGENERATE_PROBABILITY)
        .map(|(o, p, amps)| finish(s.num_qubits(), o, p, amps))
        .collect()
}

fn sampled<O: Copy>(
    s: &StateVector,
    targets: &[usize],
    outcomes: &[(O, Vec<Amplitude>)],
    sample: f64,
) -> Result<Branch<O>> {
    let all = branches(s, targets, outcomes);
    let mut cumulative = 0.0;
    let last = all.len() - 1;
    for (k, (o, p, amps)) in all.into_iter().enumerate() {
        cumulative += p;
        if sample < cumulative || k == last {
            if p < DEGENERATE_PROBABILITY {
                return Err(Error::DegenerateBranch { probability: p });
            }
            return Ok(finish(s.num_qubits(), o, p, amps));
        }
    }
    unreachable!("outcome list is never empty")
}

fn basis_outcomes(basis: &SingleQubitBasis) -> [(BasisOutcome, Vec<Amplitude>); 2] {
    BasisOutcome::ALL.map(|o| (o, basis.ket(o).to_vec()))
}

fn bell_outcomes() -> [(BellKind, Vec<Amplitude>); 4] {
    BellKind::ALL.map(|k| (k, k.state().amps().to_vec()))
}

/// Measures qubit `q` in `basis`. Outcome `a` is selected iff
/// `sample < P(a)`.
pub fn measure_qubit(
    s: &StateVector,
    q: usize,
    basis: &SingleQubitBasis,
    sample: f64,
) -> Result<Branch<BasisOutcome>> {
    check_targets(s.num_qubits(), &[q])?;
    sampled(s, &[q], &basis_outcomes(basis), sample)
}

/// Every non-degenerate branch of [`measure_qubit`].
pub fn measure_qubit_branches(
    s: &StateVector,
    q: usize,
    basis: &SingleQubitBasis,
) -> Result<Vec<Branch<BasisOutcome>>> {
    check_targets(s.num_qubits(), &[q])?;
    Ok(exhaustive(s, &[q], &basis_outcomes(basis)))
}

/// Projects `(q1, q2)` onto the Bell basis. Outcomes are ordered as
/// [`BellKind::ALL`] when mapping `sample` onto the cumulative distribution.
pub fn measure_bell_pair(
    s: &StateVector,
    q1: usize,
    q2: usize,
    sample: f64,
) -> Result<Branch<BellKind>> {
    check_targets(s.num_qubits(), &[q1, q2])?;
    sampled(s, &[q1, q2], &bell_outcomes(), sample)
}

pub fn measure_bell_pair_branches(
    s: &StateVector,
    q1: usize,
    q2: usize,
) -> Result<Vec<Branch<BellKind>>> {
    check_targets(s.num_qubits(), &[q1, q2])?;
    Ok(exhaustive(s, &[q1, q2], &bell_outcomes()))
}
