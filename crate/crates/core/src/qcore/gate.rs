use std::ops::Mul;

use super::{check_targets, index_table, real, Amplitude, StateVector, TOL};
use crate::{Error, Result};

/// Square complex matrix acting on `log2(N)` qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Amplitude; N]; N]);

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zeros() -> Self {
        Matrix([[Amplitude::default(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = real(1.0);
        }
        m
    }

    pub fn from_reals(rows: [[f64; N]; N]) -> Self {
        Matrix(rows.map(|r| r.map(real)))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |(M M†) - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() < TOL
    }

    pub fn apply(&self, v: &[Amplitude; N]) -> [Amplitude; N] {
        let mut out = [Amplitude::default(); N];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(v).map(|(m, x)| m * x).sum();
        }
        out
    }

    pub fn scaled(&self, factor: Amplitude) -> Self {
        Matrix(self.0.map(|r| r.map(|x| x * factor)))
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Matrix<N>;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

impl Matrix2 {
    /// `self ⊗ other`, with `self` on the first (more significant) qubit.
    pub fn kron(&self, other: &Matrix2) -> Matrix4 {
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[i >> 1][j >> 1] * other.0[i & 1][j & 1];
            }
        }
        m
    }
}

fn apply_gate<const N: usize>(
    s: &StateVector,
    targets: &[usize],
    u: &Matrix<N>,
) -> Result<StateVector> {
    check_targets(s.num_qubits(), targets)?;
    let residual = u.unitarity_residual();
    if residual >= TOL {
        return Err(Error::NonUnitary { residual });
    }
    let mut amps = s.amps().to_vec();
    for row in index_table(s.num_qubits(), targets) {
        let mut v = [Amplitude::default(); N];
        for (x, &i) in v.iter_mut().zip(&row) {
            *x = amps[i];
        }
        for (y, &i) in u.apply(&v).iter().zip(&row) {
            amps[i] = *y;
        }
    }
    Ok(StateVector::from_parts_unchecked(s.num_qubits(), amps))
}

pub fn apply_1q(s: &StateVector, q: usize, u: &Matrix2) -> Result<StateVector> {
    apply_gate(s, &[q], u)
}

/// `q1` indexes the first tensor factor of `u`'s basis, `q2` the second.
pub fn apply_2q(s: &StateVector, q1: usize, q2: usize, u: &Matrix4) -> Result<StateVector> {
    apply_gate(s, &[q1, q2], u)
}
