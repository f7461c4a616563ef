use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I};
use crate::operator::{CompositeSpace, CsrMatrix};

use super::LindbladProcess;

/// Largest Hilbert dimension for which a dense `D² × D²` superoperator is built.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Storage {
    /// Dense up to [`DENSE_LIMIT`], sparse above.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SuperMatrix {
    Dense(CMatrix),
    Sparse(CsrMatrix),
}

/// Matrix of the generator acting on column-major `vec(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    space: CompositeSpace,
    matrix: SuperMatrix,
}

impl Superoperator {
    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn hilbert_dim(&self) -> usize {
        self.space.total_dim()
    }

    /// `D²`.
    pub fn dim(&self) -> usize {
        let d = self.hilbert_dim();
        d * d
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.matrix
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.matrix, SuperMatrix::Sparse(_))
    }

    pub fn scale(&self) -> f64 {
        match &self.matrix {
            SuperMatrix::Dense(m) => linalg::max_abs(m),
            SuperMatrix::Sparse(m) => m.max_abs(),
        }
    }

    pub fn apply_vec(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(match &self.matrix {
            SuperMatrix::Dense(m) => m.dot(v),
            SuperMatrix::Sparse(m) => m.matvec(v),
        })
    }

    /// Applies the superoperator to a `D × D` matrix.
    pub fn apply(&self, sigma: &CMatrix) -> Result<CMatrix> {
        let d = self.hilbert_dim();
        if sigma.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: sigma.nrows(),
            });
        }
        let out = self.apply_vec(&linalg::vec_col(sigma))?;
        Ok(linalg::unvec_col(out.view(), d))
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.matrix {
            SuperMatrix::Dense(m) => m.clone(),
            SuperMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match &self.matrix {
            SuperMatrix::Dense(m) => CsrMatrix::from_dense(m),
            SuperMatrix::Sparse(m) => m.clone(),
        }
    }
}

/// `M = -i(1⊗H - Hᵀ⊗1) + sum g (2 c̄⊗c - 1⊗c†c - (c†c)ᵀ⊗1)`.
pub fn build_superoperator(process: &LindbladProcess, storage: Storage) -> Result<Superoperator> {
    let d = process.dim();
    let dense = match storage {
        Storage::Auto => d <= DENSE_LIMIT,
        Storage::Dense => {
            if d > DENSE_LIMIT {
                return Err(Error::DimensionOverflow {
                    dim: d,
                    limit: DENSE_LIMIT,
                });
            }
            true
        }
        Storage::Sparse => false,
    };
    let matrix = if dense {
        SuperMatrix::Dense(build_dense(process))
    } else {
        SuperMatrix::Sparse(build_sparse(process)?)
    };
    Ok(Superoperator {
        space: process.space().clone(),
        matrix,
    })
}

fn build_dense(process: &LindbladProcess) -> CMatrix {
    let d = process.dim();
    let id = linalg::identity(d);
    let mut m = CMatrix::zeros((d * d, d * d));
    if let Some(h) = process.hamiltonian() {
        let h = h.matrix();
        let left = linalg::kron(&id, h);
        let right = linalg::kron(&h.t().to_owned(), &id);
        m = m + (left - right).mapv(|z| z * -I);
    }
    for j in process.jumps() {
        if j.rate == 0.0 {
            continue;
        }
        let c = j.operator.matrix();
        let cdc = linalg::dagger(c).dot(c);
        let term = linalg::kron(&c.mapv(|z| z.conj()), c).mapv(|z| z * 2.0)
            - linalg::kron(&id, &cdc)
            - linalg::kron(&cdc.t().to_owned(), &id);
        m = m + term.mapv(|z| z * j.rate);
    }
    m
}

fn build_sparse(process: &LindbladProcess) -> Result<CsrMatrix> {
    let d = process.dim();
    let id = CsrMatrix::identity(d);
    let mut terms: Vec<(C64, CsrMatrix)> = Vec::new();
    if let Some(h) = process.hamiltonian() {
        let h = CsrMatrix::from_dense(h.matrix());
        terms.push((-I, id.kron(&h)));
        terms.push((I, h.transpose().kron(&id)));
    }
    for j in process.jumps() {
        if j.rate == 0.0 {
            continue;
        }
        let c = CsrMatrix::from_dense(j.operator.matrix());
        let cdc = c.dagger().matmul(&c)?;
        let g = C64::new(j.rate, 0.0);
        terms.push((g * 2.0, c.conj().kron(&c)));
        terms.push((-g, id.kron(&cdc)));
        terms.push((-g, cdc.transpose().kron(&id)));
    }
    if terms.is_empty() {
        return Ok(CsrMatrix::zeros(d * d, d * d));
    }
    let refs: Vec<(C64, &CsrMatrix)> = terms.iter().map(|(s, m)| (*s, m)).collect();
    CsrMatrix::linear_combination(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::apply_generator;
    use crate::operator::{pauli_x, pauli_z, sigma_minus, Operator, QuasiLocalOperator};
    use crate::random;

    fn random_process(seed: u64) -> LindbladProcess {
        let mut rng = random::rng(seed);
        let s = CompositeSpace::new(vec![2, 3]).unwrap();
        let h = Operator::new(s.clone(), random::random_hermitian(6, &mut rng)).unwrap();
        let jumps = (0..3)
            .map(|k| {
                (
                    Operator::new(s.clone(), random::gaussian_matrix(6, 6, &mut rng)).unwrap(),
                    0.3 + k as f64,
                )
            })
            .collect();
        LindbladProcess::new(&s, Some(h), jumps, 1e-10).unwrap()
    }

    #[test]
    fn superoperator_matches_direct_action() {
        let p = random_process(3);
        let mut rng = random::rng(9);
        for storage in [Storage::Dense, Storage::Sparse] {
            let m = build_superoperator(&p, storage).unwrap();
            for _ in 0..3 {
                let sigma = random::gaussian_matrix(6, 6, &mut rng);
                let a = m.apply(&sigma).unwrap();
                let b = apply_generator(&p, &sigma).unwrap();
                assert!(linalg::max_abs(&(a - b)) < 1e-11);
            }
        }
    }

    #[test]
    fn trace_preservation() {
        // vec(1)† M = 0
        let p = random_process(5);
        let m = build_superoperator(&p, Storage::Dense).unwrap().to_dense();
        let one = linalg::vec_col(&linalg::identity(6));
        let row = one.mapv(|z| z.conj()).dot(&m);
        assert!(row.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sigma_minus_superoperator() {
        let s = CompositeSpace::qubits(1).unwrap();
        let p = LindbladProcess::uniform(&s, vec![Operator::new(s.clone(), sigma_minus()).unwrap()], 1.0).unwrap();
        let m = build_superoperator(&p, Storage::Auto).unwrap();
        assert!(!m.is_sparse());
        let mut ev: Vec<f64> = linalg::eigvals(&m.to_dense()).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ev.iter().zip([0.0, -1.0, -1.0, -2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_limit() {
        let s = CompositeSpace::qubits(7).unwrap();
        let jumps = vec![(QuasiLocalOperator::on_site(&s, 0, pauli_x()).unwrap(), 1.0)];
        let p = LindbladProcess::from_local(&s, None, &jumps).unwrap();
        assert!(matches!(
            build_superoperator(&p, Storage::Dense),
            Err(Error::DimensionOverflow { dim: 128, .. })
        ));
        assert!(build_superoperator(&p, Storage::Auto).unwrap().is_sparse());
    }

    #[test]
    fn empty_process_is_zero() {
        let s = CompositeSpace::qubits(1).unwrap();
        let p = LindbladProcess::dissipative(&s, vec![]).unwrap();
        for st in [Storage::Dense, Storage::Sparse] {
            let m = build_superoperator(&p, st).unwrap();
            assert_eq!(m.scale(), 0.0);
        }
        let h = Operator::new(s.clone(), pauli_z()).unwrap();
        let p = LindbladProcess::new(&s, Some(h), vec![], 1e-12).unwrap();
        let m = build_superoperator(&p, Storage::Sparse).unwrap();
        assert_eq!(m.to_sparse().nnz(), 2);
    }
}
