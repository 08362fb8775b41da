use nalgebra::DMatrix;

use super::{check_targets, index_table, Amplitude, StateVector, PSD_FLOOR, TOL};
use crate::{Error, Result};

/// Density matrix of a (sub)register, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<Amplitude>,
}

impl DensityMatrix {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(ρ²)`. For Hermitian ρ this is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (i..d).map(move |j| (i, j)))
            .map(|(i, j)| (self.get(i, j) - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order (Hermitian part only).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `⟨ψ|ρ|ψ⟩`; the fidelity of ρ with the pure state ψ.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: psi.num_qubits(),
            });
        }
        let d = self.dim();
        let a = psi.amps();
        let v: Amplitude = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| a[i].conj() * self.get(i, j) * a[j])
            .sum();
        Ok(v.re)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let h = self.hermiticity_residual();
        if h > TOL {
            return Err(format!("not Hermitian (residual {h:e})"));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(format!("trace {tr} != 1"));
        }
        let min = self.eigenvalues()[0];
        if min < PSD_FLOOR {
            return Err(format!("negative eigenvalue {min:e}"));
        }
        Ok(())
    }
}

/// Partial trace over every qubit not in `keep`. The kept qubits appear in
/// the order given.
pub fn reduced_density(s: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    check_targets(s.num_qubits(), keep)?;
    let d = 1usize << keep.len();
    let amps = s.amps();
    let mut entries = vec![Amplitude::default(); d * d];
    for row in index_table(s.num_qubits(), keep) {
        for j in 0..d {
            let x = amps[row[j]];
            if x == Amplitude::default() {
                continue;
            }
            for k in 0..d {
                entries[j * d + k] += x * amps[row[k]].conj();
            }
        }
    }
    Ok(DensityMatrix {
        num_qubits: keep.len(),
        entries,
    })
}
