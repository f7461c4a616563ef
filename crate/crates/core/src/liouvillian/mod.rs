//! The Lindblad generator
//!
//! ```text
//! L(rho) = -i[H, rho] + sum_l g_l (2 c_l rho c_l† - c_l†c_l rho - rho c_l†c_l)
//! ```
//!
//! as a direct action, as a superoperator on column-major vectorized density
//! matrices, and through its spectrum and stationary kernel.

mod eigs;
mod spectrum;
mod superop;

pub use eigs::{eigs_near_zero, RitzPair, ShiftInvertOptions};
pub use spectrum::{
    relaxation_time, spectrum, spectrum_with, stationary_space, stationary_space_with, EigenCluster, SpectrumMode,
    SpectrumOptions, SpectrumReport, StationarySpace,
};
pub use superop::{build_superoperator, Storage, SuperMatrix, Superoperator, DENSE_LIMIT};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I};
use crate::operator::{CompositeSpace, Operator, QuasiLocalOperator, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub operator: Operator,
    pub rate: f64,
}

/// Optional Hamiltonian plus weighted jump operators on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladProcess {
    space: CompositeSpace,
    hamiltonian: Option<Operator>,
    jumps: Vec<Jump>,
}

impl LindbladProcess {
    /// Validates nonnegative rates, a common space, and a hermitian
    /// Hamiltonian (relative tolerance `tol`).
    pub fn new(
        space: &CompositeSpace,
        hamiltonian: Option<Operator>,
        jumps: Vec<(Operator, f64)>,
        tol: f64,
    ) -> Result<Self> {
        if let Some(h) = &hamiltonian {
            if h.space() != space {
                return Err(Error::InvalidSpace("hamiltonian lives on a different space".into()));
            }
            if !h.is_hermitian(tol) {
                return Err(Error::NotHermitian(linalg::hermitian_deviation(h.matrix())));
            }
        }
        let mut out = Vec::with_capacity(jumps.len());
        for (index, (op, rate)) in jumps.into_iter().enumerate() {
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::NegativeRate { index, rate });
            }
            if op.space() != space {
                return Err(Error::InvalidSpace(format!("jump {index} lives on a different space")));
            }
            out.push(Jump { operator: op, rate });
        }
        Ok(Self {
            space: space.clone(),
            hamiltonian,
            jumps: out,
        })
    }

    /// Purely dissipative process with the default tolerance.
    pub fn dissipative(space: &CompositeSpace, jumps: Vec<(Operator, f64)>) -> Result<Self> {
        Self::new(space, None, jumps, DEFAULT_TOL)
    }

    pub fn uniform(space: &CompositeSpace, ops: Vec<Operator>, rate: f64) -> Result<Self> {
        Self::dissipative(space, ops.into_iter().map(|o| (o, rate)).collect())
    }

    pub fn from_local(
        space: &CompositeSpace,
        hamiltonian: Option<Operator>,
        jumps: &[(QuasiLocalOperator, f64)],
    ) -> Result<Self> {
        let ops = jumps.iter().map(|(q, g)| (q.embed(), *g)).collect();
        Self::new(space, hamiltonian, ops, DEFAULT_TOL)
    }

    pub fn with_hamiltonian(mut self, h: Operator, tol: f64) -> Result<Self> {
        if h.space() != &self.space {
            return Err(Error::InvalidSpace("hamiltonian lives on a different space".into()));
        }
        if !h.is_hermitian(tol) {
            return Err(Error::NotHermitian(linalg::hermitian_deviation(h.matrix())));
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn hamiltonian(&self) -> Option<&Operator> {
        self.hamiltonian.as_ref()
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn jump_operators(&self) -> Vec<Operator> {
        self.jumps.iter().map(|j| j.operator.clone()).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.jumps.iter().map(|j| j.rate).collect()
    }

    /// `P = sum_l g_l c_l† c_l`.
    pub fn p_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut p = CMatrix::zeros((d, d));
        for j in &self.jumps {
            let c = j.operator.matrix();
            p = p + linalg::dagger(c).dot(c).mapv(|z| z * j.rate);
        }
        p
    }

    /// `Q = P - iH`.
    pub fn q_matrix(&self) -> CMatrix {
        let p = self.p_matrix();
        match &self.hamiltonian {
            Some(h) => p - h.matrix().mapv(|z| z * I),
            None => p,
        }
    }

    /// Process with every operator conjugated, `X -> V X V†`.
    pub fn conjugated(&self, v: &Operator) -> Result<Self> {
        let h = self.hamiltonian.as_ref().map(|h| h.conjugate_by(v)).transpose()?;
        let jumps = self
            .jumps
            .iter()
            .map(|j| Ok((j.operator.conjugate_by(v)?, j.rate)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.space, h, jumps, 1e-8)
    }

    pub fn is_hermitian_jump_set(&self, tol: f64) -> bool {
        self.jumps.iter().all(|j| j.operator.is_hermitian(tol))
    }
}

/// Evaluates `L(sigma)` by direct matrix products.
pub fn apply_generator(process: &LindbladProcess, sigma: &CMatrix) -> Result<CMatrix> {
    let d = process.dim();
    if sigma.dim() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.nrows(),
        });
    }
    let mut out = CMatrix::zeros((d, d));
    if let Some(h) = &process.hamiltonian {
        let comm = linalg::commutator(h.matrix(), sigma);
        out = out - comm.mapv(|z| z * I);
    }
    for j in &process.jumps {
        if j.rate == 0.0 {
            continue;
        }
        let c = j.operator.matrix();
        let cd = linalg::dagger(c);
        let cdc = cd.dot(c);
        let term = c.dot(sigma).dot(&cd).mapv(|z| z * 2.0) - cdc.dot(sigma) - sigma.dot(&cdc);
        out = out + term.mapv(|z| z * j.rate);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, real as c64, C64, ONE};
    use crate::operator::{pauli_z, sigma_minus};

    fn qubit() -> CompositeSpace {
        CompositeSpace::qubits(1).unwrap()
    }

    #[test]
    fn decay_of_excited_state() {
        let s = qubit();
        let p = LindbladProcess::uniform(&s, vec![Operator::new(s.clone(), sigma_minus()).unwrap()], 1.0).unwrap();
        let mut rho = CMatrix::zeros((2, 2));
        rho[(1, 1)] = ONE;
        let out = apply_generator(&p, &rho).unwrap();
        let mut want = CMatrix::zeros((2, 2));
        want[(0, 0)] = c64(2.0);
        want[(1, 1)] = c64(-2.0);
        assert!(max_abs(&(out - want)) < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = qubit();
        let sm = Operator::new(s.clone(), sigma_minus()).unwrap();
        assert!(matches!(
            LindbladProcess::dissipative(&s, vec![(sm.clone(), -1.0)]),
            Err(Error::NegativeRate { index: 0, .. })
        ));
        assert!(matches!(
            LindbladProcess::new(&s, Some(sm.clone()), vec![], 1e-10),
            Err(Error::NotHermitian(_))
        ));
        let p = LindbladProcess::uniform(&s, vec![sm], 1.0).unwrap();
        assert!(apply_generator(&p, &CMatrix::zeros((3, 3))).is_err());
    }

    #[test]
    fn hamiltonian_term() {
        let s = qubit();
        let h = Operator::new(s.clone(), pauli_z()).unwrap();
        let p = LindbladProcess::new(&s, Some(h), vec![], 1e-12).unwrap();
        let mut sigma = CMatrix::zeros((2, 2));
        sigma[(0, 1)] = ONE;
        // -i[Z, |0><1|] = -2i |0><1|
        let out = apply_generator(&p, &sigma).unwrap();
        assert!((out[(0, 1)] - C64::new(0.0, -2.0)).norm() < 1e-15);
    }
}
