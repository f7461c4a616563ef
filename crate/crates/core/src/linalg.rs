//! Dense complex linear-algebra helpers shared by every module.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use ndarray_linalg::{EigVals, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64;

use crate::error::Result;

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::eye(n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(v: ArrayView1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hilbert-Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.dot(b) - b.dot(a)
}

/// Relative closeness: `max|a - b| <= tol * max(max|a|, max|b|)`.
pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let scale = max_abs(a).max(max_abs(b));
    max_abs(&(a - b)) <= tol * scale
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - &dagger(m)))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

/// Kronecker product with `a` as the more significant factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
            .assign(&b.mapv(|y| x * y));
    }
    out
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Column-major stacking of a square matrix.
pub fn vec_col(m: &CMatrix) -> CVector {
    m.t().iter().copied().collect()
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: ArrayView1<C64>, dim: usize) -> CMatrix {
    CMatrix::from_shape_fn((dim, dim), |(i, j)| v[j * dim + i])
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    CMatrix::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j].conj())
}

pub fn eigvals(m: &CMatrix) -> Result<Vec<C64>> {
    Ok(m.eigvals()?.to_vec())
}

/// Eigen-decomposition of a hermitian matrix, ascending eigenvalues.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let h = hermitian_part(m);
    let (vals, vecs) = h.eigh(UPLO::Lower)?;
    Ok((vals.to_vec(), vecs))
}

pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.0)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    Ok(m.inv()?)
}

/// Numerical null space of a (possibly rectangular) matrix.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis vectors as columns.
    pub basis: CMatrix,
    /// All singular values, descending, padded with zeros to the column count.
    pub singular_values: Vec<f64>,
    /// Relative singular values that fell inside the ambiguity band.
    pub ambiguous: Vec<f64>,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.basis.columns().into_iter().map(|c| c.to_owned()).collect()
    }
}

/// Relative band inside which a singular value makes the rank decision
/// ambiguous.
pub const AMBIGUITY_BAND: (f64, f64) = (1e-12, 1e-8);

/// Null space from a full SVD; singular values below `rel_tol * s_max` count
/// as zero. A zero matrix has the whole space as its null space.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Result<NullSpace> {
    let ncols = m.ncols();
    if m.nrows() == 0 || max_abs(m) == 0.0 {
        return Ok(NullSpace {
            basis: identity(ncols),
            singular_values: vec![0.0; ncols],
            ambiguous: vec![],
        });
    }
    let (_, sv, vt) = m.svd(false, true)?;
    let vt = vt.expect("requested right singular vectors");
    let mut singular_values = sv.to_vec();
    singular_values.resize(ncols, 0.0);
    let smax = singular_values[0];
    let rank = singular_values.iter().filter(|&&s| s > rel_tol * smax).count();
    let ambiguous = singular_values
        .iter()
        .map(|&s| s / smax)
        .filter(|&r| r >= AMBIGUITY_BAND.0 && r <= AMBIGUITY_BAND.1)
        .collect();
    let basis = vt.slice(s![rank.., ..]).t().mapv(|z| z.conj());
    Ok(NullSpace {
        basis,
        singular_values,
        ambiguous,
    })
}

/// Right singular vectors whose singular value is at most `abs_tol`.
pub fn null_space_abs(m: &CMatrix, abs_tol: f64) -> Result<CMatrix> {
    let ncols = m.ncols();
    if m.nrows() == 0 || max_abs(m) <= abs_tol {
        return Ok(identity(ncols));
    }
    let (_, sv, vt) = m.svd(false, true)?;
    let vt = vt.expect("requested right singular vectors");
    let rank = sv.iter().filter(|&&s| s > abs_tol).count();
    Ok(vt.slice(s![rank.., ..]).t().mapv(|z| z.conj()))
}

/// Stacks matrices vertically (all must share a column count).
pub fn vstack(blocks: &[&CMatrix], ncols: usize) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros((rows, ncols));
    let mut r = 0;
    for b in blocks {
        out.slice_mut(s![r..r + b.nrows(), ..]).assign(b);
        r += b.nrows();
    }
    out
}

/// Incrementally built orthonormal basis (modified Gram-Schmidt with one
/// reorthogonalization pass).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<CVector>,
    rank_tol: f64,
}

impl OrthoBasis {
    pub fn new(dim: usize, rank_tol: f64) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
            rank_tol,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() >= self.dim
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<CVector> {
        self.vectors
    }

    /// Removes the components along the basis from `v` in place.
    pub fn project_out(&self, v: &mut CVector) {
        for _ in 0..2 {
            for q in &self.vectors {
                let c = inner(q.view(), v.view());
                v.scaled_add(-c, q);
            }
        }
    }

    /// Adds the normalized component of `v` orthogonal to the basis when it
    /// exceeds `rank_tol` relative to `|v|`. Returns whether it was added.
    pub fn push(&mut self, v: &CVector) -> bool {
        if self.is_full() {
            return false;
        }
        let n0 = norm(v.view());
        if n0 == 0.0 {
            return false;
        }
        let mut w = v.clone();
        self.project_out(&mut w);
        let n1 = norm(w.view());
        if n1 <= self.rank_tol * n0 {
            return false;
        }
        w.mapv_inplace(|z| z / n1);
        self.vectors.push(w);
        true
    }

    pub fn as_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros((self.dim, self.vectors.len()));
        for (j, v) in self.vectors.iter().enumerate() {
            m.column_mut(j).assign(v);
        }
        m
    }
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm1 = a
        .axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.mapv(|z| z / 2f64.powi(squarings));
    let id = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let sc = |m: &CMatrix, x: f64| m.mapv(|z| z * x);
    let u_inner = a6.dot(&(sc(&a6, B[13]) + sc(&a4, B[11]) + sc(&a2, B[9])))
        + sc(&a6, B[7])
        + sc(&a4, B[5])
        + sc(&a2, B[3])
        + sc(&id, B[1]);
    let u = a.dot(&u_inner);
    let v = a6.dot(&(sc(&a6, B[12]) + sc(&a4, B[10]) + sc(&a2, B[8])))
        + sc(&a6, B[6])
        + sc(&a4, B[4])
        + sc(&a2, B[2])
        + sc(&id, B[0]);
    let mut r = inverse(&(&v - &u))?.dot(&(&v + &u));
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}
