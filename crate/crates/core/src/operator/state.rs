use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, ONE};

use super::CompositeSpace;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: CompositeSpace,
    amplitudes: CVector,
}

impl StateVector {
    /// Wraps amplitudes that must already have unit norm within `tol`.
    pub fn new(space: &CompositeSpace, amplitudes: CVector, tol: f64) -> Result<Self> {
        check_len(space, amplitudes.len())?;
        let n = linalg::norm(amplitudes.view());
        if (n - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("norm {n} differs from 1")));
        }
        Ok(Self {
            space: space.clone(),
            amplitudes,
        })
    }

    /// Rescales nonzero amplitudes to unit norm.
    pub fn normalized(space: &CompositeSpace, amplitudes: CVector) -> Result<Self> {
        check_len(space, amplitudes.len())?;
        let n = linalg::norm(amplitudes.view());
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            space: space.clone(),
            amplitudes: amplitudes.mapv(|z| z / n),
        })
    }

    pub fn basis(space: &CompositeSpace, index: usize) -> Result<Self> {
        if index >= space.total_dim() {
            return Err(Error::InvalidState(format!(
                "basis index {index} outside dimension {}",
                space.total_dim()
            )));
        }
        let mut a = CVector::zeros(space.total_dim());
        a[index] = ONE;
        Ok(Self {
            space: space.clone(),
            amplitudes: a,
        })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &StateVector) -> linalg::C64 {
        linalg::inner(self.amplitudes.view(), other.amplitudes.view())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            space: self.space.clone(),
            matrix: linalg::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

fn check_len(space: &CompositeSpace, len: usize) -> Result<()> {
    if len != space.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: len,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity within `tol`.
    pub fn new(space: &CompositeSpace, matrix: CMatrix, tol: f64) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::eigvalsh(&matrix)?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            space: space.clone(),
            matrix,
        })
    }

    pub(crate) fn from_matrix_unchecked(space: CompositeSpace, matrix: CMatrix) -> Self {
        Self { space, matrix }
    }

    pub fn maximally_mixed(space: &CompositeSpace) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            matrix: linalg::identity(d).mapv(|z| z / d as f64),
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

    pub fn trace(&self) -> linalg::C64 {
        linalg::trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity_with(&self, psi: &StateVector) -> f64 {
        let a = psi.amplitudes();
        linalg::inner(a.view(), self.matrix.dot(a).view()).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::eigvalsh(&self.matrix)?[0])
    }
}
