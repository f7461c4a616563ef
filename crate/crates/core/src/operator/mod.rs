//! Operator algebra on composite Hilbert spaces.
//!
//! Site 0 is the most significant tensor factor throughout, so the basis
//! index of `|i_0 ... i_{n-1}>` is the mixed-radix numeral `i_0 ... i_{n-1}`.

mod local;
mod space;
mod sparse;
mod state;
pub mod textio;

pub use local::*;
pub use space::CompositeSpace;
pub use sparse::CsrMatrix;
pub use state::{DensityMatrix, StateVector};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Default comparison tolerance, relative to the largest entry magnitude.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: CompositeSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: &CompositeSpace) -> Self {
        Self {
            matrix: linalg::identity(space.total_dim()),
            space: space.clone(),
        }
    }

    pub fn zeros(space: &CompositeSpace) -> Self {
        let d = space.total_dim();
        Self {
            matrix: CMatrix::zeros((d, d)),
            space: space.clone(),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: linalg::dagger(&self.matrix),
        }
    }

    fn check_same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::InvalidSpace(format!(
                "operators live on different spaces {:?} and {:?}",
                self.space.local_dims(),
                other.space.local_dims()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: self.matrix.dot(&other.matrix),
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> Operator {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.mapv(|z| z * s),
        }
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Operator> {
        self.check_same_space(u)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: u.matrix.dot(&self.matrix).dot(&linalg::dagger(&u.matrix)),
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<linalg::CVector> {
        if psi.space() != &self.space {
            return Err(Error::InvalidSpace("state and operator spaces differ".into()));
        }
        Ok(self.matrix.dot(psi.amplitudes()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermitian_deviation(&self.matrix) <= tol * linalg::max_abs(&self.matrix)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let g = linalg::dagger(&self.matrix).dot(&self.matrix);
        linalg::max_abs(&(g - linalg::identity(self.dim())))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.space == other.space && linalg::approx_eq(&self.matrix, &other.matrix, tol)
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        CsrMatrix::from_dense(&self.matrix)
    }

    /// Sites on which the operator acts non-trivially: site `k` is dropped
    /// when the operator equals `tr_k(A)/d_k ⊗ 1_k` within `tol` (relative).
    pub fn support(&self, tol: f64) -> Vec<usize> {
        let scale = linalg::max_abs(&self.matrix);
        (0..self.space.n_sites())
            .filter(|&k| {
                let rest = self.space.complement(&[k]);
                if rest.is_empty() {
                    // single-site space: identity-proportional means trivial
                    let d = self.dim() as f64;
                    let avg = linalg::trace(&self.matrix) / d;
                    let diff = &self.matrix - &linalg::identity(self.dim()).mapv(|z| z * avg);
                    return linalg::max_abs(&diff) > tol * scale;
                }
                let reduced = partial_trace_matrix(&self.space, &self.matrix, &rest)
                    .expect("complement is a valid site list")
                    .mapv(|z| z / self.space.local_dim(k) as f64);
                let q = QuasiLocalOperator {
                    local: reduced,
                    sites: rest,
                    space: self.space.clone(),
                };
                let back = q.embed_matrix();
                linalg::max_abs(&(&self.matrix - &back)) > tol * scale
            })
            .collect()
    }
}

/// An operator given by a local matrix on a few sites, identity elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiLocalOperator {
    local: CMatrix,
    sites: Vec<usize>,
    space: CompositeSpace,
}

impl QuasiLocalOperator {
    pub fn new(space: &CompositeSpace, sites: Vec<usize>, local: CMatrix) -> Result<Self> {
        let sub = space.subspace(&sites)?;
        let d = sub.total_dim();
        if local.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: local.nrows(),
            });
        }
        Ok(Self {
            local,
            sites,
            space: space.clone(),
        })
    }

    /// A single-site operator.
    pub fn on_site(space: &CompositeSpace, site: usize, local: CMatrix) -> Result<Self> {
        Self::new(space, vec![site], local)
    }

    pub fn local(&self) -> &CMatrix {
        &self.local
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn embed(&self) -> Operator {
        Operator {
            matrix: self.embed_matrix(),
            space: self.space.clone(),
        }
    }

    pub fn embed_sparse(&self) -> CsrMatrix {
        let d = self.space.total_dim();
        CsrMatrix::from_triplets(d, d, self.embedded_entries())
    }

    fn embed_matrix(&self) -> CMatrix {
        let d = self.space.total_dim();
        let mut m = CMatrix::zeros((d, d));
        for (r, c, v) in self.embedded_entries() {
            m[(r, c)] = v;
        }
        m
    }

    fn embedded_entries(&self) -> Vec<(usize, usize, C64)> {
        let local_off = self.space.offsets(&self.sites);
        let env_off = self.space.offsets(&self.space.complement(&self.sites));
        let mut out = Vec::new();
        for ((i, j), &v) in self.local.indexed_iter() {
            if v == linalg::ZERO {
                continue;
            }
            for &e in &env_off {
                out.push((local_off[i] + e, local_off[j] + e, v));
            }
        }
        out
    }
}

/// Full-space operator equal to `local` on its sites and identity elsewhere.
pub fn embed(local: &QuasiLocalOperator) -> Operator {
    local.embed()
}

/// Kronecker product on the concatenated space; `a` supplies the leading sites.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator {
        space: a.space.concat(&b.space),
        matrix: linalg::kron(&a.matrix, &b.matrix),
    }
}

/// Partial trace of any square matrix on `space`, keeping the listed sites.
pub fn partial_trace_matrix(space: &CompositeSpace, m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    space.check_sites(keep)?;
    let d = space.total_dim();
    if m.dim() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.nrows(),
        });
    }
    let keep_off = space.offsets(keep);
    let env_off = space.offsets(&space.complement(keep));
    let k = keep_off.len();
    Ok(CMatrix::from_shape_fn((k, k), |(i, j)| {
        env_off.iter().map(|&e| m[(keep_off[i] + e, keep_off[j] + e)]).sum()
    }))
}

/// Reduced density matrix on the kept sites.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let space = rho.space().subspace(keep)?;
    let m = partial_trace_matrix(rho.space(), rho.matrix(), keep)?;
    Ok(DensityMatrix::from_matrix_unchecked(space, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, ONE, ZERO};

    #[test]
    fn sigma_minus_on_second_qubit() {
        let s = CompositeSpace::qubits(2).unwrap();
        let op = QuasiLocalOperator::on_site(&s, 1, sigma_minus()).unwrap().embed();
        let mut want = CMatrix::zeros((4, 4));
        want[(0, 1)] = ONE;
        want[(2, 3)] = ONE;
        assert_eq!(op.matrix(), &want);
    }

    #[test]
    fn identity_local_embeds_to_identity() {
        let s = CompositeSpace::new(vec![2, 3, 2]).unwrap();
        let op = QuasiLocalOperator::new(&s, vec![0, 1], linalg::identity(6))
            .unwrap()
            .embed();
        assert_eq!(op.matrix(), &linalg::identity(12));
        assert!(op.support(1e-12).is_empty());
    }

    #[test]
    fn embed_matches_triple_kron() {
        let s = CompositeSpace::qubits(3).unwrap();
        let zx = linalg::kron(&pauli_z(), &pauli_x());
        let op = QuasiLocalOperator::new(&s, vec![0, 1], zx).unwrap().embed();
        let brute = linalg::kron(&linalg::kron(&pauli_z(), &pauli_x()), &linalg::identity(2));
        assert!(max_abs(&(op.matrix() - &brute)) < 1e-15);
        assert_eq!(op.support(1e-12), vec![0, 1]);
    }

    #[test]
    fn embed_on_nonadjacent_sites() {
        let s = CompositeSpace::qubits(3).unwrap();
        let zx = linalg::kron(&pauli_z(), &pauli_x());
        let op = QuasiLocalOperator::new(&s, vec![0, 2], zx).unwrap().embed();
        let brute = linalg::kron(&linalg::kron(&pauli_z(), &linalg::identity(2)), &pauli_x());
        assert!(max_abs(&(op.matrix() - &brute)) < 1e-15);
        assert_eq!(op.support(1e-12), vec![0, 2]);
    }

    #[test]
    fn embed_errors() {
        let s = CompositeSpace::qubits(2).unwrap();
        assert!(matches!(
            QuasiLocalOperator::on_site(&s, 2, sigma_minus()),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            QuasiLocalOperator::new(&s, vec![0, 1], sigma_minus()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(QuasiLocalOperator::new(&s, vec![1, 0], linalg::identity(4)).is_err());
    }

    #[test]
    fn kron_basics() {
        let q = CompositeSpace::qubits(1).unwrap();
        let id = Operator::identity(&q);
        assert_eq!(kron(&id, &id).matrix(), &linalg::identity(4));
        let sm = Operator::new(q.clone(), sigma_minus()).unwrap();
        let both = kron(&sm, &sm);
        let ket11 = StateVector::basis(both.space(), 3).unwrap();
        let out = both.apply(&ket11).unwrap();
        assert_eq!(out[0], ONE);
        assert!(out.iter().skip(1).all(|&z| z == ZERO));
    }

    #[test]
    fn partial_trace_examples() {
        let s = CompositeSpace::qubits(2).unwrap();
        let rho = StateVector::basis(&s, 0).unwrap().projector();
        let red = partial_trace(&rho, &[0]).unwrap();
        let mut want = CMatrix::zeros((2, 2));
        want[(0, 0)] = ONE;
        assert_eq!(red.matrix(), &want);

        let h = 1.0 / 2f64.sqrt();
        let bell = StateVector::new(&s, vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)].into(), 1e-12).unwrap();
        let red = partial_trace(&bell.projector(), &[0]).unwrap();
        assert!(max_abs(&(red.matrix() - &linalg::identity(2).mapv(|z| z * 0.5))) < 1e-15);
        assert!(partial_trace(&bell.projector(), &[]).is_err());
        assert!(partial_trace(&bell.projector(), &[2]).is_err());
    }

    #[test]
    fn support_of_scaled_identity_on_single_site_space() {
        let s = CompositeSpace::single(3).unwrap();
        let op = Operator::new(s.clone(), linalg::identity(3).mapv(|z| z * 2.0)).unwrap();
        assert!(op.support(1e-12).is_empty());
        let op = Operator::new(s, spin1_z()).unwrap();
        assert_eq!(op.support(1e-12), vec![0]);
    }
}
