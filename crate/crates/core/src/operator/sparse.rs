//! Compressed sparse row storage for large operators and superoperators.

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != ZERO {
                indptr[r + 1] += 1;
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let triplets = m
            .indexed_iter()
            .filter(|(_, &v)| v != ZERO)
            .map(|((i, j), &v)| (i, j, v))
            .collect();
        Self::from_triplets(m.nrows(), m.ncols(), triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: vec![],
            values: vec![],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows)
            .flat_map(move |r| (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k])))
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        self.iter().collect()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros((self.nrows, self.ncols));
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn dagger(&self) -> Self {
        self.transpose().conj()
    }

    /// `sum_k c_k A_k` over equally shaped matrices.
    pub fn linear_combination(terms: &[(C64, &CsrMatrix)]) -> Result<Self> {
        let (nrows, ncols) = match terms.first() {
            Some((_, m)) => (m.nrows, m.ncols),
            None => return Err(Error::InvalidArgument("empty linear combination".into())),
        };
        let mut trip = Vec::new();
        for (c, m) in terms {
            if m.nrows != nrows || m.ncols != ncols {
                return Err(Error::DimensionMismatch {
                    expected: nrows,
                    found: m.nrows,
                });
            }
            trip.extend(m.iter().map(|(r, col, v)| (r, col, c * v)));
        }
        Ok(Self::from_triplets(nrows, ncols, trip))
    }

    /// Kronecker product, `self` as the more significant factor.
    pub fn kron(&self, other: &CsrMatrix) -> Self {
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                trip.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, trip)
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut trip = Vec::new();
        for (r, k, a) in self.iter() {
            for idx in other.indptr[k]..other.indptr[k + 1] {
                trip.push((r, other.indices[idx], a * other.values[idx]));
            }
        }
        Ok(Self::from_triplets(self.nrows, other.ncols, trip))
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn matvec(&self, x: &CVector) -> CVector {
        let mut y = CVector::zeros(self.nrows);
        self.matvec_into(x.as_slice().expect("contiguous"), y.as_slice_mut().expect("contiguous"));
        y
    }

    pub(crate) fn to_faer(&self) -> Result<SparseColMat<usize, C64>> {
        let trip: Vec<Triplet<usize, usize, C64>> = self.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|e| Error::Linalg(format!("sparse assembly: {e:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron, max_abs};

    fn sample(n: usize, m: usize, seed: usize) -> CMatrix {
        CMatrix::from_shape_fn((n, m), |(i, j)| {
            let k = (i * 31 + j * 17 + seed) % 7;
            if k < 3 {
                ZERO
            } else {
                c(k as f64 - 4.0, (i + j) as f64 * 0.5)
            }
        })
    }

    #[test]
    fn dense_round_trip_and_products() {
        let a = sample(4, 3, 1);
        let b = sample(3, 5, 2);
        let sa = CsrMatrix::from_dense(&a);
        let sb = CsrMatrix::from_dense(&b);
        assert_eq!(sa.to_dense(), a);
        assert!(max_abs(&(sa.matmul(&sb).unwrap().to_dense() - a.dot(&b))) < 1e-14);
        assert!(max_abs(&(sa.kron(&sb).to_dense() - kron(&a, &b))) < 1e-14);
        let x = CVector::from_shape_fn(3, |i| c(i as f64, 1.0));
        assert!(crate::linalg::max_abs_vec(&(sa.matvec(&x) - a.dot(&x))) < 1e-14);
        assert_eq!(sa.dagger().to_dense(), crate::linalg::dagger(&a));
    }

    #[test]
    fn duplicates_sum_and_cancel() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, c(1.0, 0.0)),
                (0, 0, c(-1.0, 0.0)),
                (1, 0, c(2.0, 0.0)),
                (1, 0, c(1.0, 0.0)),
            ],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.to_dense()[(1, 0)], c(3.0, 0.0));
    }
}
