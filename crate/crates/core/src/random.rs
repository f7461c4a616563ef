//! Seeded random matrices and states for tests, probes and demos.

use ndarray_linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::operator::{CompositeSpace, DensityMatrix, Operator, QuasiLocalOperator, StateVector};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_shape_fn(dim, |_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Complex Ginibre matrix.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_shape_fn((rows, cols), |_| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary via the phase-corrected QR of a Ginibre matrix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> Result<CMatrix> {
    let g = gaussian_matrix(dim, dim, rng);
    let (q, r) = g.qr()?;
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        q.column_mut(j).mapv_inplace(|z| z * phase);
    }
    Ok(q)
}

/// Unitary from a seeded circuit: `depth` layers of Haar single-qubit gates
/// followed by a brick of CZ gates.
pub fn gate_sequence_unitary(n_qubits: usize, depth: usize, rng: &mut impl Rng) -> Result<Operator> {
    let space = CompositeSpace::qubits(n_qubits)?;
    let mut u = Operator::identity(&space);
    let mut cz = linalg::identity(4);
    cz[(3, 3)] = c(-1.0, 0.0);
    for layer in 0..depth {
        for q in 0..n_qubits {
            let g = QuasiLocalOperator::on_site(&space, q, haar_unitary(2, rng)?)?.embed();
            u = g.dot(&u)?;
        }
        let start = layer % 2;
        for q in (start..n_qubits.saturating_sub(1)).step_by(2) {
            let g = QuasiLocalOperator::new(&space, vec![q, q + 1], cz.clone())?.embed();
            u = g.dot(&u)?;
        }
    }
    Ok(u)
}

pub fn random_state(space: &CompositeSpace, rng: &mut impl Rng) -> Result<StateVector> {
    StateVector::normalized(space, gaussian_vector(space.total_dim(), rng))
}

/// Full-rank random density matrix `G G† / tr(G G†)`.
pub fn random_density_matrix(space: &CompositeSpace, rng: &mut impl Rng) -> Result<DensityMatrix> {
    let d = space.total_dim();
    let g = gaussian_matrix(d, d, rng);
    let w = g.dot(&linalg::dagger(&g));
    let tr = linalg::trace(&w).re;
    DensityMatrix::new(space, w.mapv(|z| z / tr), 1e-9)
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> CMatrix {
    linalg::hermitian_part(&gaussian_matrix(dim, dim, rng))
}
