//! Time evolution: closed form for conjugated lowering processes, a general
//! propagator, and gap-versus-size scans.

use std::fmt::Write as _;

use crate::constructors::{graph_state_jumps, qudit_ladder_jumps, sigma_minus_jumps, GraphSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::liouvillian::{
    apply_generator, build_superoperator, relaxation_time, spectrum_with, LindbladProcess, SpectrumMode,
    SpectrumOptions, Storage, Superoperator, DENSE_LIMIT,
};
use crate::operator::textio::fmt_f64;
use crate::operator::{DensityMatrix, Operator, QuasiLocalOperator, StateVector};

/// Per-site eigen-operators of the lowering dissipator: `|0⟩⟨0|`, `σx`, `σy`, `σz`.
pub fn site_eigenbasis() -> [CMatrix; 4] {
    use crate::operator::{pauli_x, pauli_y, pauli_z};
    let mut p0 = CMatrix::zeros((2, 2));
    p0[(0, 0)] = C64::new(1.0, 0.0);
    [p0, pauli_x(), pauli_y(), pauli_z()]
}

/// Eigenvalue of site label `i` at rate `g`.
pub fn site_eigenvalue(label: usize, g: f64) -> f64 {
    match label {
        0 => 0.0,
        1 | 2 => -g,
        _ => -2.0 * g,
    }
}

/// A product element `σ_{i_1} ⊗ ... ⊗ σ_{i_n}` with its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticBasisElement {
    pub labels: Vec<usize>,
    pub eigenvalue: f64,
}

impl AnalyticBasisElement {
    pub fn new(labels: Vec<usize>, rates: &[f64]) -> Result<Self> {
        if labels.len() != rates.len() || labels.iter().any(|&l| l > 3) {
            return Err(Error::InvalidArgument("labels must be one of 0..4 per site".into()));
        }
        let eigenvalue = labels.iter().zip(rates).map(|(&l, &g)| site_eigenvalue(l, g)).sum();
        Ok(Self { labels, eigenvalue })
    }

    pub fn matrix(&self) -> CMatrix {
        let basis = site_eigenbasis();
        self.labels
            .iter()
            .fold(linalg::identity(1), |acc, &l| linalg::kron(&acc, &basis[l]))
    }
}

/// Applies a 4×4 map to the (row, column) pair of every site of a `2ⁿ × 2ⁿ`
/// array stored as site-interleaved slots `4^(n-1-k) * (2 r_k + c_k)`.
fn per_site_transform(data: &mut [C64], n: usize, map: &[[C64; 4]; 4], site: usize) {
    let stride = 1usize << (2 * (n - 1 - site));
    let block = stride * 4;
    for base in (0..data.len()).step_by(block) {
        for off in 0..stride {
            let idx = |p: usize| base + off + p * stride;
            let x = [data[idx(0)], data[idx(1)], data[idx(2)], data[idx(3)]];
            for (i, row) in map.iter().enumerate() {
                data[idx(i)] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            }
        }
    }
}

fn to_slots(m: &CMatrix, n: usize) -> Vec<C64> {
    let d = 1usize << n;
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            out[slot_index(r, c, n)] = m[(r, c)];
        }
    }
    out
}

fn from_slots(data: &[C64], n: usize) -> CMatrix {
    let d = 1usize << n;
    CMatrix::from_shape_fn((d, d), |(r, c)| data[slot_index(r, c, n)])
}

fn slot_index(r: usize, c: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, k| {
        let rb = (r >> (n - 1 - k)) & 1;
        let cb = (c >> (n - 1 - k)) & 1;
        acc * 4 + 2 * rb + cb
    })
}

/// Closed-form evolution under the jumps `U σ₋^(k) U†` with rates `g_k`.
pub fn analytic_evolve(u: &Operator, rates: &[f64], rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    if !u.is_unitary(1e-10) {
        return Err(Error::NotUnitary(u.unitarity_deviation()));
    }
    let space = u.space();
    if space.local_dims().iter().any(|&d| d != 2) {
        return Err(Error::InvalidSpace("closed form needs qubits".into()));
    }
    let n = space.n_sites();
    if rates.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rates.len(),
        });
    }
    if let Some((index, &rate)) = rates.iter().enumerate().find(|(_, g)| !(**g >= 0.0)) {
        return Err(Error::NegativeRate { index, rate });
    }
    if rho0.space() != space {
        return Err(Error::InvalidSpace("initial state lives on a different space".into()));
    }
    // column i of `b` holds basis element i in slot order p = 2r + c
    let basis = site_eigenbasis();
    let mut b = CMatrix::zeros((4, 4));
    for (i, e) in basis.iter().enumerate() {
        for p in 0..4 {
            b[(p, i)] = e[(p / 2, p % 2)];
        }
    }
    let dual = linalg::inverse(&b)?;
    let as_array = |m: &CMatrix| -> [[C64; 4]; 4] {
        let mut a = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m[(i, j)];
            }
        }
        a
    };
    let (to_coeff, to_entries) = (as_array(&dual), as_array(&b));

    let rotated = linalg::dagger(u.matrix()).dot(rho0.matrix()).dot(u.matrix());
    let mut coeff = to_slots(&rotated, n);
    for k in 0..n {
        per_site_transform(&mut coeff, n, &to_coeff, k);
    }
    let eig: Vec<f64> = (0..coeff.len())
        .map(|idx| {
            (0..n)
                .map(|k| site_eigenvalue((idx >> (2 * (n - 1 - k))) & 3, rates[k]))
                .sum()
        })
        .collect();
    times
        .iter()
        .map(|&t| {
            let mut data: Vec<C64> = coeff.iter().zip(&eig).map(|(a, l)| a * (l * t).exp()).collect();
            for k in 0..n {
                per_site_transform(&mut data, n, &to_entries, k);
            }
            let m = u.matrix().dot(&from_slots(&data, n)).dot(&linalg::dagger(u.matrix()));
            Ok(DensityMatrix::from_matrix_unchecked(
                space.clone(),
                linalg::hermitian_part(&m),
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub trace: Vec<f64>,
    pub purity: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    /// `t,fidelity,trace,purity,min_eig`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,fidelity,trace,purity,min_eig\n");
        for i in 0..self.times.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f64(self.times[i]),
                fmt_f64(self.fidelity[i]),
                fmt_f64(self.trace[i]),
                fmt_f64(self.purity[i]),
                fmt_f64(self.min_eig[i])
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Largest Hilbert dimension propagated by the matrix exponential.
    pub dense_limit: usize,
    /// Bound on `stiffness · Δt` for the Runge–Kutta integrator.
    pub step_bound: f64,
    /// Force this many Runge–Kutta substeps per sample.
    pub substeps: Option<usize>,
    /// Minimum eigenvalue below which the run aborts.
    pub positivity_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dense_limit: DENSE_LIMIT,
            step_bound: 0.05,
            substeps: None,
            positivity_tol: 1e-6,
        }
    }
}

pub fn numeric_evolve(
    process: &LindbladProcess,
    rho0: &DensityMatrix,
    target: &StateVector,
    t_max: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    numeric_evolve_with(process, rho0, target, t_max, n_steps, &EvolveOptions::default())
}

pub fn numeric_evolve_with(
    process: &LindbladProcess,
    rho0: &DensityMatrix,
    target: &StateVector,
    t_max: f64,
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_max > 0.0) || n_steps == 0 {
        return Err(Error::InvalidArgument("need t_max > 0 and n_steps >= 1".into()));
    }
    if rho0.space() != process.space() || target.space() != process.space() {
        return Err(Error::InvalidSpace(
            "states and process live on different spaces".into(),
        ));
    }
    let d = process.dim();
    let dt = t_max / n_steps as f64;
    let mut stepper: Box<dyn FnMut(&CMatrix) -> Result<CMatrix>> = if d <= opts.dense_limit {
        let m = build_superoperator(process, Storage::Dense)?;
        let prop = linalg::expm(&m.to_dense().mapv(|z| z * dt))?;
        Box::new(move |rho: &CMatrix| Ok(linalg::unvec_col(prop.dot(&linalg::vec_col(rho)).view(), d)))
    } else {
        let superop = build_superoperator(process, Storage::Sparse)?;
        let kappa = stiffness(process);
        let sub = opts
            .substeps
            .unwrap_or_else(|| ((kappa * dt / opts.step_bound).ceil() as usize).max(1));
        let h = dt / sub as f64;
        Box::new(move |rho: &CMatrix| rk4(&superop, rho, h, sub))
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        fidelity: Vec::new(),
        trace: Vec::new(),
        purity: Vec::new(),
        min_eig: Vec::new(),
        states: Vec::new(),
    };
    let mut rho = rho0.matrix().clone();
    for step in 0..=n_steps {
        let t = step as f64 * dt;
        if step > 0 {
            rho = linalg::hermitian_part(&stepper(&rho)?);
        }
        let state = DensityMatrix::from_matrix_unchecked(process.space().clone(), rho.clone());
        let min_eig = state.min_eigenvalue()?;
        if min_eig < -opts.positivity_tol {
            return Err(Error::PositivityViolation { t, min_eig, dt });
        }
        traj.times.push(t);
        traj.fidelity.push(state.fidelity_with(target));
        traj.trace.push(state.trace().re);
        traj.purity.push(state.purity());
        traj.min_eig.push(min_eig);
        traj.states.push(state);
    }
    Ok(traj)
}

/// Upper estimate of the generator's spectral radius.
fn stiffness(process: &LindbladProcess) -> f64 {
    let norm2 = |m: &CMatrix| {
        let rows = m
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let cols = m
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        (rows * cols).sqrt()
    };
    let h = process.hamiltonian().map_or(0.0, |h| norm2(h.matrix()));
    let jumps = process
        .jumps()
        .iter()
        .map(|j| j.rate * norm2(j.operator.matrix()).powi(2))
        .sum::<f64>();
    h.max(jumps).max(f64::MIN_POSITIVE)
}

fn rk4(superop: &Superoperator, rho: &CMatrix, h: f64, steps: usize) -> Result<CMatrix> {
    let mut x = rho.clone();
    let hc = C64::new(h, 0.0);
    for _ in 0..steps {
        let k1 = superop.apply(&x)?;
        let k2 = superop.apply(&(&x + &k1.mapv(|z| z * hc * 0.5)))?;
        let k3 = superop.apply(&(&x + &k2.mapv(|z| z * hc * 0.5)))?;
        let k4 = superop.apply(&(&x + &k3.mapv(|z| z * hc)))?;
        x = x + (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * hc / 6.0);
    }
    Ok(x)
}

/// One RK4 step of the direct generator action; used to cross-check the
/// superoperator path.
pub fn rk4_direct(process: &LindbladProcess, rho: &CMatrix, h: f64) -> Result<CMatrix> {
    let hc = C64::new(h, 0.0);
    let k1 = apply_generator(process, rho)?;
    let k2 = apply_generator(process, &(rho + &k1.mapv(|z| z * hc * 0.5)))?;
    let k3 = apply_generator(process, &(rho + &k2.mapv(|z| z * hc * 0.5)))?;
    let k4 = apply_generator(process, &(rho + &k3.mapv(|z| z * hc)))?;
    Ok(rho + &(k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * hc / 6.0))
}

/// How the per-site rates of a lowering family depend on the site.
#[derive(Debug, Clone, PartialEq)]
pub enum RateRule {
    Uniform(f64),
    /// `g_k = scale · (k + 1)`.
    Increasing(f64),
    /// Explicit rates, the first `n` of which are used.
    List(Vec<f64>),
}

impl RateRule {
    pub fn rates(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Self::Uniform(g) => Ok(vec![*g; n]),
            Self::Increasing(s) => Ok((0..n).map(|k| s * (k + 1) as f64).collect()),
            Self::List(v) => {
                if v.len() < n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: v.len(),
                    });
                }
                Ok(v[..n].to_vec())
            }
        }
    }
}

/// Process families parametrized by system size.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanFamily {
    SigmaMinus(RateRule),
    LinearCluster(RateRule),
    QuditLadder { d: usize, rates: RateRule },
}

impl ScanFamily {
    pub fn build(&self, n: usize) -> Result<LindbladProcess> {
        let (jumps, rule): (Vec<QuasiLocalOperator>, &RateRule) = match self {
            Self::SigmaMinus(r) => (sigma_minus_jumps(n)?, r),
            Self::LinearCluster(r) => (graph_state_jumps(&GraphSpec::path(n)?)?, r),
            Self::QuditLadder { d, rates } => (qudit_ladder_jumps(n, *d)?, rates),
        };
        let rates = rule.rates(n)?;
        let space = jumps[0].space().clone();
        let pairs: Vec<_> = jumps.into_iter().zip(rates).collect();
        LindbladProcess::from_local(&space, None, &pairs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Largest Hilbert dimension handled by a full dense spectrum.
    pub dense_max: usize,
    /// Largest Hilbert dimension handled at all.
    pub sparse_max: usize,
    pub spectrum: SpectrumOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            dense_max: 16,
            sparse_max: 256,
            spectrum: SpectrumOptions::default(),
        }
    }
}

#[derive(Debug)]
pub struct ScanRow {
    pub n: usize,
    pub result: Result<(f64, f64)>,
}

/// Gap and relaxation time for each size; failures are kept per row.
pub fn gap_scan<F>(build: F, sizes: &[usize], opts: &ScanOptions) -> Vec<ScanRow>
where
    F: Fn(usize) -> Result<LindbladProcess>,
{
    sizes
        .iter()
        .map(|&n| ScanRow {
            n,
            result: scan_one(&build, n, opts),
        })
        .collect()
}

pub fn gap_scan_family(family: &ScanFamily, sizes: &[usize], opts: &ScanOptions) -> Vec<ScanRow> {
    gap_scan(|n| family.build(n), sizes, opts)
}

fn scan_one<F>(build: &F, n: usize, opts: &ScanOptions) -> Result<(f64, f64)>
where
    F: Fn(usize) -> Result<LindbladProcess>,
{
    let process = build(n)?;
    let d = process.dim();
    if d > opts.sparse_max {
        return Err(Error::DimensionOverflow {
            dim: d,
            limit: opts.sparse_max,
        });
    }
    let (storage, mode) = if d <= opts.dense_max {
        (Storage::Dense, SpectrumMode::Full)
    } else {
        (Storage::Sparse, SpectrumMode::GapOnly)
    };
    let superop = build_superoperator(&process, storage)?;
    let report = spectrum_with(&superop, mode, &opts.spectrum)?;
    let tau = relaxation_time(&report)?;
    Ok((1.0 / tau, tau))
}

/// `n,gap,relaxation_time`; failed rows carry `nan`.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from("n,gap,relaxation_time\n");
    for r in rows {
        match &r.result {
            Ok((g, t)) => {
                let _ = writeln!(s, "{},{},{}", r.n, fmt_f64(*g), fmt_f64(*t));
            }
            Err(_) => {
                let _ = writeln!(s, "{},nan,nan", r.n);
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::stationary_space;
    use crate::operator::{embed, CompositeSpace};
    use crate::random;

    fn lowering_process(u: &Operator, rates: &[f64]) -> LindbladProcess {
        let n = rates.len();
        let jumps: Vec<(Operator, f64)> = sigma_minus_jumps(n)
            .unwrap()
            .iter()
            .zip(rates)
            .map(|(c, &g)| (embed(c).conjugate_by(u).unwrap(), g))
            .collect();
        LindbladProcess::dissipative(u.space(), jumps).unwrap()
    }

    #[test]
    fn eigen_operators() {
        let s = CompositeSpace::qubits(1).unwrap();
        let p = lowering_process(&Operator::identity(&s), &[0.8]);
        for (i, e) in site_eigenbasis().iter().enumerate() {
            let l = apply_generator(&p, e).unwrap();
            let want = e.mapv(|z| z * site_eigenvalue(i, 0.8));
            assert!(linalg::max_abs(&(l - want)) < 1e-14);
        }
        let el = AnalyticBasisElement::new(vec![3, 1], &[1.0, 0.5]).unwrap();
        assert_eq!(el.eigenvalue, -2.5);
        let s2 = CompositeSpace::qubits(2).unwrap();
        let p2 = lowering_process(&Operator::identity(&s2), &[1.0, 0.5]);
        let m = el.matrix();
        let l = apply_generator(&p2, &m).unwrap();
        assert!(linalg::max_abs(&(l - m.mapv(|z| z * -2.5))) < 1e-14);
    }

    #[test]
    fn slot_transform_round_trip() {
        let mut rng = random::rng(4);
        let m = random::gaussian_matrix(8, 8, &mut rng);
        assert!(linalg::max_abs(&(from_slots(&to_slots(&m, 3), 3) - &m)) == 0.0);
    }

    #[test]
    fn excited_population_decays_at_twice_the_rate() {
        let s = CompositeSpace::qubits(1).unwrap();
        let rho0 = StateVector::basis(&s, 1).unwrap().projector();
        let times = [0.0, 0.3, 1.0, 2.5];
        let out = analytic_evolve(&Operator::identity(&s), &[1.0], &rho0, &times).unwrap();
        for (r, t) in out.iter().zip(times) {
            assert!((r.matrix()[(1, 1)].re - (-2.0 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn dark_state_is_constant() {
        let s = CompositeSpace::qubits(3).unwrap();
        let rho0 = StateVector::basis(&s, 0).unwrap().projector();
        let out = analytic_evolve(&Operator::identity(&s), &[1.0, 2.0, 0.5], &rho0, &[0.0, 1.0, 7.0]).unwrap();
        for r in out {
            assert!(linalg::max_abs(&(r.matrix() - rho0.matrix())) < 1e-15);
        }
    }

    #[test]
    fn analytic_matches_propagator() {
        for n in 1..=3 {
            let s = CompositeSpace::qubits(n).unwrap();
            let mut rng = random::rng(20 + n as u64);
            let u = random::gate_sequence_unitary(n, 3, &mut rng).unwrap();
            let rates: Vec<f64> = (0..n).map(|k| 0.5 + 0.4 * k as f64).collect();
            let rho0 = random::random_density_matrix(&s, &mut rng).unwrap();
            let p = lowering_process(&u, &rates);
            let m = build_superoperator(&p, Storage::Dense).unwrap().to_dense();
            let times = [0.1, 1.0, 5.0];
            let out = analytic_evolve(&u, &rates, &rho0, &times).unwrap();
            for (r, t) in out.iter().zip(times) {
                let prop = linalg::expm(&m.mapv(|z| z * t)).unwrap();
                let want = linalg::unvec_col(prop.dot(&linalg::vec_col(rho0.matrix())).view(), 1 << n);
                assert!(linalg::max_abs(&(r.matrix() - want)) < 1e-10);
            }
        }
    }

    #[test]
    fn zero_generator_keeps_state() {
        let s = CompositeSpace::qubits(2).unwrap();
        let p = LindbladProcess::dissipative(&s, vec![]).unwrap();
        let rho0 = random::random_density_matrix(&s, &mut random::rng(3)).unwrap();
        let target = StateVector::basis(&s, 0).unwrap();
        let tr = numeric_evolve(&p, &rho0, &target, 2.0, 4).unwrap();
        for st in &tr.states {
            assert!(linalg::max_abs(&(st.matrix() - rho0.matrix())) < 1e-14);
        }
    }

    #[test]
    fn graph_process_converges() {
        let g = GraphSpec::path(2).unwrap();
        let jumps: Vec<_> = graph_state_jumps(&g).unwrap().into_iter().map(|c| (c, 1.0)).collect();
        let p = LindbladProcess::from_local(&g.space(), None, &jumps).unwrap();
        let target = crate::constructors::graph_state(&g).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(&g.space());
        let tr = numeric_evolve(&p, &rho0, &target, 5.0, 10).unwrap();
        assert!(*tr.fidelity.last().unwrap() > 0.99);
        assert!(tr.trace.iter().all(|t| (t - 1.0).abs() < 1e-9));
        assert!(tr.min_eig.iter().all(|&e| e > -1e-9));
        assert!(tr.to_csv().starts_with("t,fidelity,trace,purity,min_eig\n0,0.25,1,"));
    }

    #[test]
    fn rk4_path_agrees_and_converges() {
        let s = CompositeSpace::qubits(2).unwrap();
        let mut rng = random::rng(8);
        let u = random::gate_sequence_unitary(2, 2, &mut rng).unwrap();
        let p = lowering_process(&u, &[1.0, 0.7]);
        let rho0 = random::random_density_matrix(&s, &mut rng).unwrap();
        let target = StateVector::normalized(&s, u.matrix().column(0).to_owned()).unwrap();
        let exact = numeric_evolve(&p, &rho0, &target, 2.0, 4).unwrap();
        let run = |sub| {
            let opts = EvolveOptions {
                dense_limit: 0,
                substeps: Some(sub),
                ..Default::default()
            };
            numeric_evolve_with(&p, &rho0, &target, 2.0, 4, &opts).unwrap()
        };
        let err = |t: &Trajectory| {
            t.states
                .iter()
                .zip(&exact.states)
                .map(|(a, b)| linalg::max_abs(&(a.matrix() - b.matrix())))
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(&run(20)), err(&run(40)));
        assert!(e2 < 1e-8);
        assert!(e1 / e2 > 12.0, "{e1} {e2}");
        let h = rk4_direct(&p, rho0.matrix(), 0.01).unwrap();
        let sup = build_superoperator(&p, Storage::Sparse).unwrap();
        let h2 = rk4(&sup, rho0.matrix(), 0.01, 1).unwrap();
        assert!(linalg::max_abs(&(h - h2)) < 1e-14);
    }

    #[test]
    fn long_time_limit_is_stationary_state() {
        let s = CompositeSpace::qubits(2).unwrap();
        let mut rng = random::rng(12);
        let u = random::gate_sequence_unitary(2, 3, &mut rng).unwrap();
        let p = lowering_process(&u, &[1.0, 1.0]);
        let kernel = stationary_space(&build_superoperator(&p, Storage::Dense).unwrap()).unwrap();
        let target = StateVector::normalized(&s, u.matrix().column(0).to_owned()).unwrap();
        assert!(linalg::approx_eq(&kernel.states[0], target.projector().matrix(), 1e-9));
        let rho0 = random::random_density_matrix(&s, &mut rng).unwrap();
        let tr = numeric_evolve(&p, &rho0, &target, 10.0, 5).unwrap();
        assert!(1.0 - tr.fidelity.last().unwrap() < 1e-6);
    }

    #[test]
    fn scans() {
        let rows = gap_scan_family(
            &ScanFamily::SigmaMinus(RateRule::Uniform(1.0)),
            &[2, 3, 4, 5],
            &ScanOptions::default(),
        );
        for r in &rows {
            let (g, t) = r.result.as_ref().unwrap();
            assert!((g - 1.0).abs() < 1e-8 && (t - 1.0).abs() < 1e-8, "n={} {g}", r.n);
        }
        let rows = gap_scan_family(
            &ScanFamily::SigmaMinus(RateRule::Increasing(1.0)),
            &[2, 3],
            &ScanOptions::default(),
        );
        assert!(rows.iter().all(|r| (r.result.as_ref().unwrap().0 - 1.0).abs() < 1e-8));
        let rows = gap_scan_family(
            &ScanFamily::SigmaMinus(RateRule::List(vec![0.5, 2.0])),
            &[2, 3, 9],
            &ScanOptions::default(),
        );
        assert!((rows[0].result.as_ref().unwrap().1 - 2.0).abs() < 1e-8);
        assert!(rows[1].result.is_err() && rows[2].result.is_err());
        let csv = scan_csv(&rows);
        assert!(csv.starts_with("n,gap,relaxation_time\n2,"));
        assert!(csv.ends_with("3,nan,nan\n9,nan,nan\n"));
    }
}
