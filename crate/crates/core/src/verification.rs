//! Stationarity of pure states, dark spaces, and uniqueness certificates.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, OrthoBasis, C64};
use crate::liouvillian::{apply_generator, build_superoperator, stationary_space, LindbladProcess, Storage};
use crate::operator::textio::fmt_f64;
use crate::operator::{Operator, StateVector};
use crate::random;

/// Residuals of the two pure-state stationarity conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Verdict {
    pub stationary: bool,
    /// `⟨Φ|Q†|Φ⟩`.
    pub lambda: C64,
    /// `‖Q†Φ - λΦ‖`.
    pub eigen_residual: f64,
    /// `⟨Φ|c_l|Φ⟩`.
    pub lambdas: Vec<C64>,
    /// `‖c_l Φ - λ_l Φ‖`.
    pub jump_residuals: Vec<f64>,
    /// `|sum g_l |λ_l|² - Re λ|`.
    pub balance_residual: f64,
    /// Largest entry of `L(|Φ⟩⟨Φ|)`.
    pub generator_residual: f64,
    pub tol: f64,
}

impl Theorem1Verdict {
    /// Whether the verdict agrees with the direct generator test.
    pub fn consistent(&self) -> bool {
        self.stationary == (self.generator_residual < self.tol)
    }
}

pub fn check_theorem1(process: &LindbladProcess, phi: &StateVector, tol: f64) -> Result<Theorem1Verdict> {
    if phi.space() != process.space() {
        return Err(Error::InvalidSpace("state and process live on different spaces".into()));
    }
    let v = phi.amplitudes();
    let qd = linalg::dagger(&process.q_matrix());
    let chi = qd.dot(v);
    let lambda = linalg::inner(v.view(), chi.view());
    let eigen_residual = linalg::norm((&chi - &v.mapv(|z| z * lambda)).view());
    let mut lambdas = Vec::new();
    let mut jump_residuals = Vec::new();
    let mut weighted = 0.0;
    for j in process.jumps() {
        let w = j.operator.matrix().dot(v);
        let l = linalg::inner(v.view(), w.view());
        jump_residuals.push(linalg::norm((&w - &v.mapv(|z| z * l)).view()));
        weighted += j.rate * l.norm_sqr();
        lambdas.push(l);
    }
    let balance_residual = (weighted - lambda.re).abs();
    let generator_residual = linalg::max_abs(&apply_generator(process, phi.projector().matrix())?);
    let stationary = eigen_residual < tol && balance_residual < tol && jump_residuals.iter().all(|&r| r < tol);
    Ok(Theorem1Verdict {
        stationary,
        lambda,
        eigen_residual,
        lambdas,
        jump_residuals,
        balance_residual,
        generator_residual,
        tol,
    })
}

/// Dark vectors sharing one Hamiltonian eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct DarkGroup {
    pub energy: f64,
    pub states: Vec<StateVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkSpace {
    pub groups: Vec<DarkGroup>,
}

impl DarkSpace {
    /// Dark vectors from different energies form a set, not a subspace.
    pub fn is_subspace(&self) -> bool {
        self.groups.len() <= 1
    }

    pub fn dim(&self) -> usize {
        self.groups.iter().map(|g| g.states.len()).sum()
    }

    pub fn states(&self) -> Vec<StateVector> {
        self.groups.iter().flat_map(|g| g.states.iter().cloned()).collect()
    }
}

/// Joint kernel of the jumps, split into eigenspaces of the Hamiltonian.
pub fn dark_space(process: &LindbladProcess, tol: f64) -> Result<DarkSpace> {
    let space = process.space();
    let d = process.dim();
    let mats: Vec<&CMatrix> = process.jumps().iter().map(|j| j.operator.matrix()).collect();
    let w = if mats.is_empty() {
        linalg::identity(d)
    } else {
        linalg::null_space(&linalg::vstack(&mats, d), tol)?.basis
    };
    let to_states = |m: &CMatrix| -> Result<Vec<StateVector>> {
        m.columns()
            .into_iter()
            .map(|c| StateVector::normalized(space, c.to_owned()))
            .collect()
    };
    if w.ncols() == 0 {
        return Ok(DarkSpace { groups: Vec::new() });
    }
    let Some(h) = process.hamiltonian() else {
        return Ok(DarkSpace {
            groups: vec![DarkGroup {
                energy: 0.0,
                states: to_states(&w)?,
            }],
        });
    };
    let h = h.matrix();
    let hw = h.dot(&w);
    let reduced = linalg::dagger(&w).dot(&hw);
    let (evals, _) = linalg::eigh(&reduced)?;
    let scale = linalg::max_abs(h).max(1.0);
    let mut energies: Vec<f64> = Vec::new();
    for e in evals {
        if energies.last().is_none_or(|&l| (e - l).abs() > 1e-8 * scale) {
            energies.push(e);
        }
    }
    let mut groups = Vec::new();
    for e in energies {
        let shifted = &hw - &w.mapv(|z| z * e);
        let y = linalg::null_space_abs(&shifted, 1e-8 * scale)?;
        if y.ncols() == 0 {
            continue;
        }
        let vecs = w.dot(&y);
        let resid = linalg::max_abs(&(h.dot(&vecs) - vecs.mapv(|z| z * e)));
        if resid > 1e-8 * scale {
            continue;
        }
        groups.push(DarkGroup {
            energy: e,
            states: to_states(&vecs)?,
        });
    }
    Ok(DarkSpace { groups })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMethod {
    KernelDimension,
    KrylovReachability,
    InvariantProbe,
}

impl CertificateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::KernelDimension => "kernel-dimension",
            Self::KrylovReachability => "krylov-reachability",
            Self::InvariantProbe => "invariant-probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Unique,
    NotUnique,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unique => "unique",
            Self::NotUnique => "not-unique",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessCertificate {
    pub method: CertificateMethod,
    pub verdict: Verdict,
    pub total_dim: usize,
    /// Reached span, kernel or witness dimension depending on the method.
    pub dimension: usize,
    pub degree: Option<usize>,
    pub witness: Vec<CVector>,
    pub residual: Option<f64>,
    pub notes: Vec<String>,
}

impl UniquenessCertificate {
    /// `key: value` lines.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method: {}", self.method.as_str());
        let _ = writeln!(s, "verdict: {}", self.verdict.as_str());
        let _ = writeln!(s, "total_dim: {}", self.total_dim);
        let _ = writeln!(s, "dimension: {}", self.dimension);
        if let Some(d) = self.degree {
            let _ = writeln!(s, "degree: {d}");
        }
        if let Some(r) = self.residual {
            let _ = writeln!(s, "residual: {}", fmt_f64(r));
        }
        if !self.witness.is_empty() {
            let _ = writeln!(s, "witness_dim: {}", self.witness.len());
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Kernel dimension of the generator: one means a unique stationary state.
pub fn kernel_dimension_certificate(process: &LindbladProcess, storage: Storage) -> Result<UniquenessCertificate> {
    let superop = build_superoperator(process, storage)?;
    let kernel = stationary_space(&superop)?;
    let mut notes: Vec<String> = kernel
        .ambiguous
        .iter()
        .map(|s| format!("ambiguous singular value {}", fmt_f64(*s)))
        .collect();
    let verdict = if !kernel.ambiguous.is_empty() {
        Verdict::Inconclusive
    } else {
        match kernel.dim() {
            1 => Verdict::Unique,
            0 => {
                notes.push("empty numerical kernel".into());
                Verdict::Inconclusive
            }
            _ => Verdict::NotUnique,
        }
    };
    Ok(UniquenessCertificate {
        method: CertificateMethod::KernelDimension,
        verdict,
        total_dim: process.dim(),
        dimension: kernel.dim(),
        degree: None,
        witness: Vec::new(),
        residual: None,
        notes,
    })
}

pub const RANK_TOL: f64 = 1e-10;

/// Closes `{Ψ}` under the adjoint jumps. Full dimension certifies uniqueness;
/// a stall or an exhausted degree budget is inconclusive.
pub fn krylov_reachability(jumps: &[Operator], psi: &StateVector, max_degree: Option<usize>) -> UniquenessCertificate {
    let d = psi.dim();
    let max_degree = max_degree.unwrap_or(4 * d).max(1);
    let adjoints: Vec<CMatrix> = jumps.iter().map(|c| linalg::dagger(c.matrix())).collect();
    let scale = adjoints.iter().map(linalg::max_abs).fold(0.0, f64::max);
    let mut basis = OrthoBasis::new(d, RANK_TOL);
    basis.push(psi.amplitudes());
    let mut frontier = vec![basis.vectors()[0].clone()];
    let mut degree = 0;
    let mut note = None;
    while !basis.is_full() {
        if degree == max_degree {
            note = Some("degree budget exhausted".to_string());
            break;
        }
        degree += 1;
        let mut next = Vec::new();
        for v in &frontier {
            for a in &adjoints {
                let w = a.dot(v);
                if linalg::norm(w.view()) <= RANK_TOL * scale {
                    continue;
                }
                if basis.push(&w) {
                    next.push(basis.vectors().last().expect("just pushed").clone());
                }
            }
        }
        if next.is_empty() {
            note = Some("span stalled".to_string());
            break;
        }
        frontier = next;
    }
    let verdict = if basis.is_full() {
        Verdict::Unique
    } else {
        Verdict::Inconclusive
    };
    UniquenessCertificate {
        method: CertificateMethod::KrylovReachability,
        verdict,
        total_dim: d,
        dimension: basis.len(),
        degree: Some(degree),
        witness: Vec::new(),
        residual: None,
        notes: note.into_iter().collect(),
    }
}

/// Searches for a nonzero subspace orthogonal to the dark span and invariant
/// under every jump. Random closures under the projected jumps are each
/// shrunk to their largest invariant subspace, and a deterministic pass
/// computes the largest invariant subspace of the whole complement. Any
/// nonzero witness refutes the sufficient condition for uniqueness.
pub fn invariant_subspace_probe(
    jumps: &[Operator],
    dark: &[StateVector],
    trials: usize,
    seed: u64,
) -> Result<UniquenessCertificate> {
    let d = match (jumps.first(), dark.first()) {
        (Some(c), _) => c.dim(),
        (None, Some(s)) => s.dim(),
        (None, None) => {
            return Err(Error::InvalidArgument("need at least one jump or dark state".into()));
        }
    };
    invariant_subspace_probe_dim(d, jumps, dark, trials, seed)
}

/// As [`invariant_subspace_probe`] with an explicit Hilbert dimension, so that
/// both lists may be empty.
pub fn invariant_subspace_probe_dim(
    d: usize,
    jumps: &[Operator],
    dark: &[StateVector],
    trials: usize,
    seed: u64,
) -> Result<UniquenessCertificate> {
    let mut dark_basis = OrthoBasis::new(d, RANK_TOL);
    for s in dark {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        dark_basis.push(s.amplitudes());
    }
    let mut complement = OrthoBasis::new(d, 1e-8);
    for v in dark_basis.vectors() {
        complement.push(v);
    }
    let k = complement.len();
    for i in 0..d {
        let mut e = CVector::zeros(d);
        e[i] = C64::new(1.0, 0.0);
        complement.push(&e);
    }
    let comp: Vec<CVector> = complement.vectors()[k..].to_vec();
    let comp_dim = comp.len();
    let mats: Vec<CMatrix> = jumps.iter().map(|c| c.matrix().clone()).collect();
    let project = |v: &CVector| -> CVector {
        let mut w = v.clone();
        dark_basis.project_out(&mut w);
        w
    };

    let mut witness = OrthoBasis::new(d, 1e-8);
    let mut rng = random::rng(seed);
    let mut found_random = 0;
    if comp_dim > 0 {
        for _ in 0..trials {
            let start = project(&random::gaussian_vector(d, &mut rng));
            let mut closure = OrthoBasis::new(d, RANK_TOL);
            closure.push(&start);
            let mut frontier = closure.vectors().to_vec();
            while !frontier.is_empty() && closure.len() < comp_dim {
                let mut next = Vec::new();
                for v in &frontier {
                    for c in &mats {
                        let w = project(&c.dot(v));
                        if closure.push(&w) {
                            next.push(closure.vectors().last().expect("just pushed").clone());
                        }
                    }
                }
                frontier = next;
            }
            let inv = largest_invariant(&mats, closure.vectors())?;
            if !inv.is_empty() {
                found_random += 1;
                for v in &inv {
                    witness.push(v);
                }
            }
        }
    }
    let maximal = largest_invariant(&mats, &comp)?;
    for v in &maximal {
        witness.push(v);
    }
    let witness = witness.into_vectors();
    let residual = invariance_residual(&mats, &witness);
    let mut notes = vec![
        format!("random_hits: {found_random}/{trials}"),
        format!("maximal_invariant_dim: {}", maximal.len()),
    ];
    let verdict = if witness.is_empty() {
        notes.push("no invariant subspace orthogonal to the dark span".into());
        Verdict::Inconclusive
    } else {
        Verdict::NotUnique
    };
    Ok(UniquenessCertificate {
        method: CertificateMethod::InvariantProbe,
        verdict,
        total_dim: d,
        dimension: witness.len(),
        degree: None,
        witness,
        residual: Some(residual),
        notes,
    })
}

/// Largest subspace of `span(start)` mapped into itself by every matrix:
/// iterates `T <- {x in T : c x in T for all c}` to a fixed point.
fn largest_invariant(mats: &[CMatrix], start: &[CVector]) -> Result<Vec<CVector>> {
    let Some(first) = start.first() else {
        return Ok(Vec::new());
    };
    let d = first.len();
    let mut basis = CMatrix::zeros((d, start.len()));
    for (j, v) in start.iter().enumerate() {
        basis.column_mut(j).assign(v);
    }
    loop {
        let r = basis.ncols();
        if r == 0 || mats.is_empty() {
            break;
        }
        let proj_out = linalg::identity(d) - basis.dot(&linalg::dagger(&basis));
        let blocks: Vec<CMatrix> = mats.iter().map(|c| proj_out.dot(&c.dot(&basis))).collect();
        let refs: Vec<&CMatrix> = blocks.iter().collect();
        let stacked = linalg::vstack(&refs, r);
        let scale = mats.iter().map(linalg::max_abs).fold(0.0, f64::max);
        if linalg::max_abs(&stacked) <= 1e-10 * scale {
            break;
        }
        let y = linalg::null_space_abs(&stacked, 1e-9 * scale)?;
        if y.ncols() == r {
            break;
        }
        basis = basis.dot(&y);
    }
    Ok(basis.columns().into_iter().map(|c| c.to_owned()).collect())
}

fn invariance_residual(mats: &[CMatrix], vectors: &[CVector]) -> f64 {
    let Some(first) = vectors.first() else {
        return 0.0;
    };
    let d = first.len();
    let mut b = CMatrix::zeros((d, vectors.len()));
    for (j, v) in vectors.iter().enumerate() {
        b.column_mut(j).assign(v);
    }
    let proj_out = linalg::identity(d) - b.dot(&linalg::dagger(&b));
    mats.iter()
        .map(|c| linalg::max_abs(&proj_out.dot(&c.dot(&b))))
        .fold(0.0, f64::max)
}
