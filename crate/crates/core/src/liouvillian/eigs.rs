//! Block Krylov Rayleigh–Ritz on the shift-inverted operator `(A - σ)⁻¹`,
//! targeting the eigenvalues of `A` closest to `σ`.

use faer::linalg::solvers::Solve;
use faer::Mat;
use ndarray::Array2;
use ndarray_linalg::Eig;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, OrthoBasis, C64};
use crate::operator::CsrMatrix;
use crate::random;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInvertOptions {
    /// Number of wanted eigenvalues.
    pub nev: usize,
    /// Block width of the Krylov iteration.
    pub block: usize,
    /// Blocks per restart cycle.
    pub depth: usize,
    pub max_restarts: usize,
    /// Residual tolerance relative to the largest matrix entry.
    pub tol: f64,
    /// Real shift. Defaults to `1e-3` times the largest entry.
    pub shift: Option<f64>,
    pub seed: u64,
}

impl Default for ShiftInvertOptions {
    fn default() -> Self {
        Self {
            nev: 8,
            block: 16,
            depth: 6,
            max_restarts: 60,
            tol: 1e-9,
            shift: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: C64,
    pub vector: CVector,
    /// `‖A x - θ x‖` relative to the largest matrix entry.
    pub residual: f64,
}

struct ShiftedSolver {
    lu: faer::sparse::linalg::solvers::Lu<usize, C64>,
}

impl ShiftedSolver {
    fn new(a: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.nrows();
        let shifted = CsrMatrix::linear_combination(&[
            (C64::new(1.0, 0.0), a),
            (C64::new(-shift, 0.0), &CsrMatrix::identity(n)),
        ])?;
        let lu = shifted
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Linalg(format!("sparse LU: {e:?}")))?;
        Ok(Self { lu })
    }

    fn solve(&self, block: &[CVector]) -> Vec<CVector> {
        let n = block.first().map_or(0, |v| v.len());
        let mut rhs = Mat::<C64>::from_fn(n, block.len(), |i, j| block[j][i]);
        self.lu.solve_in_place(rhs.as_mut());
        (0..block.len())
            .map(|j| CVector::from_shape_fn(n, |i| rhs[(i, j)]))
            .collect()
    }
}

/// Eigenpairs of the square sparse matrix `a` nearest the shift, sorted by
/// distance to it. Returns `NoConvergence` with the residuals of the wanted
/// pairs when the restart budget is exhausted.
pub fn eigs_near_zero(a: &CsrMatrix, opts: &ShiftInvertOptions) -> Result<Vec<RitzPair>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    if n == 0 || opts.nev == 0 {
        return Ok(Vec::new());
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok((0..opts.nev.min(n))
            .map(|k| {
                let mut v = CVector::zeros(n);
                v[k] = C64::new(1.0, 0.0);
                RitzPair {
                    value: C64::new(0.0, 0.0),
                    vector: v,
                    residual: 0.0,
                }
            })
            .collect());
    }
    let nev = opts.nev.min(n);
    let block = opts.block.max(nev).min(n);
    let shift = opts.shift.unwrap_or(1e-3 * scale);
    let solver = ShiftedSolver::new(a, shift)?;
    let mut rng = random::rng(opts.seed);

    let mut start: Vec<CVector> = (0..block).map(|_| random::gaussian_vector(n, &mut rng)).collect();
    let mut last_residuals = Vec::new();
    for _ in 0..=opts.max_restarts {
        let mut basis = OrthoBasis::new(n, 1e-12);
        let mut current: Vec<CVector> = start.iter().filter_map(|v| push(&mut basis, v)).collect();
        for _ in 0..opts.depth {
            if current.is_empty() || basis.is_full() {
                break;
            }
            let next = solver.solve(&current);
            current = next.iter().filter_map(|v| push(&mut basis, v)).collect();
        }
        let q = basis.as_matrix();
        let m = q.ncols();
        let aq = CMatrix::from_shape_fn((n, m), |_| C64::new(0.0, 0.0));
        let mut aq = aq;
        for j in 0..m {
            let col = a.matvec(&q.column(j).to_owned());
            aq.column_mut(j).assign(&col);
        }
        let g: CMatrix = linalg::dagger(&q).dot(&aq);
        let (vals, vecs): (ndarray::Array1<C64>, Array2<C64>) = g.eig()?;
        let mut order: Vec<usize> = (0..m).collect();
        let target = C64::new(shift, 0.0);
        order.sort_by(|&i, &j| (vals[i] - target).norm().total_cmp(&(vals[j] - target).norm()));

        let mut pairs = Vec::with_capacity(block.min(m));
        for &k in order.iter().take(block.min(m)) {
            let y = vecs.column(k);
            let mut x = q.dot(&y);
            let nx = linalg::norm(x.view());
            x.mapv_inplace(|z| z / nx);
            let ax = aq.dot(&y).mapv(|z| z / nx);
            let r = &ax - &x.mapv(|z| z * vals[k]);
            pairs.push(RitzPair {
                value: vals[k],
                vector: x,
                residual: linalg::norm(r.view()) / scale,
            });
        }
        last_residuals = pairs.iter().take(nev).map(|p| p.residual).collect();
        if m == n || last_residuals.iter().all(|&r| r <= opts.tol) {
            pairs.truncate(nev);
            return Ok(pairs);
        }
        start = pairs.into_iter().map(|p| p.vector).collect();
        while start.len() < block {
            start.push(random::gaussian_vector(n, &mut rng));
        }
    }
    let worst = last_residuals.iter().cloned().fold(0.0, f64::max);
    Err(Error::NoConvergence {
        iterations: opts.max_restarts + 1,
        worst,
        residuals: last_residuals,
    })
}

fn push(basis: &mut OrthoBasis, v: &CVector) -> Option<CVector> {
    if basis.push(v) {
        basis.vectors().last().cloned()
    } else {
        None
    }
}
