use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, OrthoBasis, C64};
use crate::operator::textio::fmt_f64;

use super::eigs::{eigs_near_zero, ShiftInvertOptions};
use super::superop::{SuperMatrix, Superoperator, DENSE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumMode {
    /// Every eigenvalue, from a dense decomposition.
    #[default]
    Full,
    /// Only the eigenvalues nearest zero, by sparse shift-invert iteration.
    GapOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    /// Single-linkage clustering radius relative to the largest entry.
    pub cluster_rel: f64,
    /// `|λ|` below this times the largest entry counts as zero.
    pub zero_rel: f64,
    /// Relative singular value cut for the dense kernel.
    pub kernel_rel: f64,
    pub eigs: ShiftInvertOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            cluster_rel: 1e-8,
            zero_rel: 1e-8,
            kernel_rel: 1e-10,
            eigs: ShiftInvertOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub mode: SpectrumMode,
    /// Sorted by descending real part, ties by ascending imaginary part.
    pub clusters: Vec<EigenCluster>,
    pub eigenvalues: Vec<C64>,
    pub kernel_dim: usize,
    /// Hilbert–Schmidt orthonormal kernel, normalized to a state when one-dimensional.
    pub kernel_basis: Vec<CMatrix>,
    /// Smallest `-Re λ` outside the kernel.
    pub gap: Option<f64>,
    /// Nonzero eigenvalues with vanishing real part.
    pub imaginary_eigenvalues: Vec<C64>,
    /// Eigenvalues with real part above the zero tolerance.
    pub growing_eigenvalues: Vec<C64>,
    pub zero_tol: f64,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `re,im,multiplicity` rows, one per cluster.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,multiplicity\n");
        for c in &self.clusters {
            let re = if c.value.re.abs() <= self.zero_tol {
                0.0
            } else {
                c.value.re
            };
            let im = if c.value.im.abs() <= self.zero_tol {
                0.0
            } else {
                c.value.im
            };
            let _ = writeln!(out, "{},{},{}", fmt_f64(re), fmt_f64(im), c.multiplicity);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySpace {
    pub states: Vec<CMatrix>,
    /// Singular values inside the ambiguity band, if any.
    pub ambiguous: Vec<f64>,
}

impl StationarySpace {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

pub fn spectrum(superop: &Superoperator, mode: SpectrumMode) -> Result<SpectrumReport> {
    spectrum_with(superop, mode, &SpectrumOptions::default())
}

pub fn spectrum_with(superop: &Superoperator, mode: SpectrumMode, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    match mode {
        SpectrumMode::Full => full_spectrum(superop, opts),
        SpectrumMode::GapOnly => gap_spectrum(superop, opts),
    }
}

/// `1 / gap`.
pub fn relaxation_time(report: &SpectrumReport) -> Result<f64> {
    match report.gap {
        Some(g) if g > 0.0 => Ok(1.0 / g),
        _ => Err(Error::NoGap),
    }
}

pub fn stationary_space(superop: &Superoperator) -> Result<StationarySpace> {
    stationary_space_with(superop, &SpectrumOptions::default())
}

pub fn stationary_space_with(superop: &Superoperator, opts: &SpectrumOptions) -> Result<StationarySpace> {
    match superop.matrix() {
        SuperMatrix::Dense(m) => dense_kernel(superop.hilbert_dim(), m, opts.kernel_rel),
        SuperMatrix::Sparse(_) => Ok(gap_spectrum(superop, opts)?.into_stationary()),
    }
}

impl SpectrumReport {
    fn into_stationary(self) -> StationarySpace {
        StationarySpace {
            states: self.kernel_basis,
            ambiguous: Vec::new(),
        }
    }
}

fn dense_kernel(d: usize, m: &CMatrix, rel: f64) -> Result<StationarySpace> {
    let ns = linalg::null_space(m, rel)?;
    let vectors = ns.vectors();
    let states = kernel_matrices(d, vectors);
    Ok(StationarySpace {
        states,
        ambiguous: ns.ambiguous.clone(),
    })
}

fn kernel_matrices(d: usize, vectors: Vec<CVector>) -> Vec<CMatrix> {
    let mut states: Vec<CMatrix> = vectors.iter().map(|v| linalg::unvec_col(v.view(), d)).collect();
    if states.len() == 1 {
        states[0] = normalize_state(&states[0]);
    }
    states
}

/// Removes the arbitrary phase of a one-dimensional kernel and scales to unit trace.
fn normalize_state(m: &CMatrix) -> CMatrix {
    let tr = linalg::trace(m);
    let fixed = if tr.norm() > 1e-12 {
        m.mapv(|z| z / tr)
    } else {
        m.clone()
    };
    let h = linalg::hermitian_part(&fixed);
    let t = linalg::trace(&h).re;
    if t.abs() > 1e-12 {
        h.mapv(|z| z / t)
    } else {
        h
    }
}

fn full_spectrum(superop: &Superoperator, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let d = superop.hilbert_dim();
    let dense;
    let m = match superop.matrix() {
        SuperMatrix::Dense(m) => m,
        SuperMatrix::Sparse(s) => {
            if d > DENSE_LIMIT {
                return Err(Error::DimensionOverflow {
                    dim: d,
                    limit: DENSE_LIMIT,
                });
            }
            dense = s.to_dense();
            &dense
        }
    };
    let scale = linalg::max_abs(m);
    let eigenvalues = linalg::eigvals(m)?;
    let kernel = dense_kernel(d, m, opts.kernel_rel)?;
    let mut warnings = Vec::new();
    for s in &kernel.ambiguous {
        warnings.push(format!("ambiguous kernel singular value {}", fmt_f64(*s)));
    }
    let zero_tol = opts.zero_rel * scale;
    let near_zero = eigenvalues.iter().filter(|z| z.norm() <= zero_tol).count();
    if near_zero != kernel.dim() {
        warnings.push(format!(
            "algebraic multiplicity of 0 is {near_zero} but the kernel has dimension {}",
            kernel.dim()
        ));
    }
    Ok(assemble(
        SpectrumMode::Full,
        eigenvalues,
        kernel.states,
        opts.cluster_rel * scale,
        zero_tol,
        warnings,
    ))
}

fn gap_spectrum(superop: &Superoperator, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let d = superop.hilbert_dim();
    let a = superop.to_sparse();
    let n = a.nrows();
    let scale = a.max_abs();
    let zero_tol = opts.zero_rel * scale;
    let mut eopts = opts.eigs.clone();
    loop {
        let pairs = eigs_near_zero(&a, &eopts)?;
        let kernel: Vec<&CVector> = pairs
            .iter()
            .filter(|p| p.value.norm() <= zero_tol)
            .map(|p| &p.vector)
            .collect();
        let exhausted = eopts.nev >= n;
        if kernel.len() < pairs.len() || exhausted {
            let mut ortho = OrthoBasis::new(n, 1e-8);
            for v in &kernel {
                ortho.push(v);
            }
            let mut warnings = Vec::new();
            if ortho.len() < kernel.len() {
                warnings.push(format!(
                    "{} zero Ritz values span only {} dimensions",
                    kernel.len(),
                    ortho.len()
                ));
            }
            let states = kernel_matrices(d, ortho.into_vectors());
            let eigenvalues = pairs.iter().map(|p| p.value).collect();
            return Ok(assemble(
                SpectrumMode::GapOnly,
                eigenvalues,
                states,
                opts.cluster_rel * scale,
                zero_tol,
                warnings,
            ));
        }
        eopts.nev = (eopts.nev * 2).min(n);
        eopts.block = eopts.block.max(eopts.nev);
    }
}

fn assemble(
    mode: SpectrumMode,
    mut eigenvalues: Vec<C64>,
    kernel_basis: Vec<CMatrix>,
    radius: f64,
    zero_tol: f64,
    warnings: Vec<String>,
) -> SpectrumReport {
    sort_eigenvalues(&mut eigenvalues);
    let clusters = cluster(&eigenvalues, radius);
    let mut gap: Option<f64> = None;
    let mut imaginary = Vec::new();
    let mut growing = Vec::new();
    for c in &clusters {
        let z = c.value;
        if z.re > zero_tol {
            growing.push(z);
        } else if z.re.abs() <= zero_tol {
            if z.im.abs() > zero_tol {
                imaginary.push(z);
            }
        } else {
            gap = Some(gap.map_or(-z.re, |g: f64| g.min(-z.re)));
        }
    }
    SpectrumReport {
        mode,
        clusters,
        eigenvalues,
        kernel_dim: kernel_basis.len(),
        kernel_basis,
        gap,
        imaginary_eigenvalues: imaginary,
        growing_eigenvalues: growing,
        zero_tol,
        warnings,
    }
}

fn sort_eigenvalues(v: &mut [C64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

/// Single-linkage clusters within `radius`, represented by their mean.
fn cluster(values: &[C64], radius: f64) -> Vec<EigenCluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(C64, usize)> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push((C64::new(0.0, 0.0), 0));
        }
        let g = &mut groups[slot[r]];
        g.0 += values[i];
        g.1 += 1;
    }
    let mut out: Vec<EigenCluster> = groups
        .into_iter()
        .map(|(s, k)| EigenCluster {
            value: s / k as f64,
            multiplicity: k,
        })
        .collect();
    out.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}
