//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use darkstate::constructors::{conjugated_jumps, graph_state, graph_state_jumps, sigma_minus_jumps, GraphSpec};
use darkstate::dynamics::{analytic_evolve, gap_scan_family, numeric_evolve, RateRule, ScanFamily, ScanOptions};
use darkstate::linalg::{self, CMatrix, C64};
use darkstate::liouvillian::{
    apply_generator, build_superoperator, relaxation_time, spectrum, stationary_space, LindbladProcess, SpectrumMode,
    SpectrumReport, Storage,
};
use darkstate::models::fermi::hubbard_sector;
use darkstate::models::{
    aklt_bond_term, aklt_ground_space, aklt_process, bec_process, eta_dagger_between, eta_process, AkltVariant,
    Boundary, SpinChainSpec,
};
use darkstate::operator::{embed, pauli_z, CompositeSpace, DensityMatrix, Operator, QuasiLocalOperator, StateVector};
use darkstate::random;
use darkstate::verification::{dark_space, krylov_reachability, Verdict};

const EIG_TOL: f64 = 1e-12;
const CLUSTER_TOL: f64 = 1e-8;
const RELAX_TOL: f64 = 1e-10;
const GAP_TOL: f64 = 1e-6;
const FIDELITY_TOL: f64 = 1e-10;
const AKLT_FIDELITY_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-9;
const PROPAGATOR_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;
const POSITIVE_RE_TOL: f64 = 1e-8;
const COARSE_RADIUS: f64 = 1e-3;
const PAIR_TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lowering(n: usize, rates: &[f64]) -> LindbladProcess {
    let jumps: Vec<_> = sigma_minus_jumps(n)
        .unwrap()
        .into_iter()
        .zip(rates.iter().copied())
        .collect();
    LindbladProcess::from_local(&CompositeSpace::qubits(n).unwrap(), None, &jumps).unwrap()
}

fn dense_spectrum(p: &LindbladProcess) -> SpectrumReport {
    spectrum(&build_superoperator(p, Storage::Dense).unwrap(), SpectrumMode::Full).unwrap()
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    v
}

fn kernel_fidelity(kernel: &CMatrix, psi: &StateVector) -> f64 {
    let rho = DensityMatrix::new(psi.space(), kernel.clone(), 1e-6).map_err(|e| e.to_string());
    match rho {
        Ok(r) => r.fidelity_with(psi),
        Err(_) => 0.0,
    }
}

fn c1_decay_spectrum() -> Outcome {
    let p = lowering(1, &[1.0]);
    let m = build_superoperator(&p, Storage::Dense).unwrap();
    let ev = sorted(linalg::eigvals(&m.to_dense()).unwrap());
    let want = [0.0, -1.0, -1.0, -2.0];
    let err = ev
        .iter()
        .zip(want)
        .map(|(a, w)| (a - C64::new(w, 0.0)).norm())
        .fold(0.0, f64::max);
    ensure(err < EIG_TOL, format!("max deviation {err:e}"))?;
    Ok(format!("eigenvalues {{0, -1, -1, -2}}, max deviation {err:.1e}"))
}

fn c2_product_law() -> Outcome {
    let all_rates = [1.0, 0.5, 2.0, 0.75];
    let mut details = Vec::new();
    for n in 2..=4 {
        let rates = &all_rates[..n];
        let report = dense_spectrum(&lowering(n, rates));
        // sumset over site labels |0⟩⟨0|, σx, σy, σz
        let mut want = vec![0.0];
        for &g in rates {
            want = want.iter().flat_map(|&s| [s, s - g, s - g, s - 2.0 * g]).collect();
        }
        want.sort_by(|a, b| b.total_cmp(a));
        let got = sorted(report.eigenvalues.clone());
        ensure(got.len() == want.len(), "eigenvalue count")?;
        let err = got
            .iter()
            .zip(&want)
            .map(|(a, w)| (a - C64::new(*w, 0.0)).norm())
            .fold(0.0, f64::max);
        ensure(err < CLUSTER_TOL, format!("n={n}: deviation {err:e}"))?;
        ensure(
            report.kernel_dim == 1,
            format!("n={n}: kernel dim {}", report.kernel_dim),
        )?;
        details.push(format!("n={n} dev {err:.1e}"));
    }
    Ok(details.join(", "))
}

fn c3_relaxation_law() -> Outcome {
    let mut details = Vec::new();
    for rates in [vec![1.0, 1.0], vec![0.5, 2.0], vec![3.0, 1.0, 2.0]] {
        let report = dense_spectrum(&lowering(rates.len(), &rates));
        let t = relaxation_time(&report).map_err(|e| e.to_string())?;
        let want = 1.0 / rates.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure((t - want).abs() < RELAX_TOL, format!("rates {rates:?}: T = {t}"))?;
        details.push(format!("T{rates:?}={t}"));
    }
    let rows = gap_scan_family(
        &ScanFamily::SigmaMinus(RateRule::Uniform(1.0)),
        &[2, 3, 4, 5, 6],
        &ScanOptions::default(),
    );
    for r in &rows {
        let (gap, _) = r.result.as_ref().map_err(|e| format!("n={}: {e}", r.n))?;
        ensure((gap - 1.0).abs() < GAP_TOL, format!("n={}: gap {gap}", r.n))?;
    }
    details.push("gap 1 for n=2..6".into());
    Ok(details.join(", "))
}

fn graph_process(n: usize, rates: &[f64]) -> (LindbladProcess, StateVector, Vec<Operator>) {
    let g = GraphSpec::path(n).unwrap();
    let locals = graph_state_jumps(&g).unwrap();
    let ops: Vec<Operator> = locals.iter().map(embed).collect();
    let jumps: Vec<_> = locals.into_iter().zip(rates.iter().copied()).collect();
    let p = LindbladProcess::from_local(&g.space(), None, &jumps).unwrap();
    (p, graph_state(&g).unwrap(), ops)
}

fn c4_graph_uniqueness() -> Outcome {
    let mut details = Vec::new();
    for n in 2..=6 {
        let rates: Vec<f64> = (0..n).map(|k| 1.0 + 0.25 * ((k * 3) % n) as f64).collect();
        let gmin = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let (p, psi, ops) = graph_process(n, &rates);
        let (storage, mode) = if n <= 4 {
            (Storage::Dense, SpectrumMode::Full)
        } else {
            (Storage::Sparse, SpectrumMode::GapOnly)
        };
        let report = spectrum(&build_superoperator(&p, storage).unwrap(), mode).map_err(|e| e.to_string())?;
        ensure(
            report.kernel_dim == 1,
            format!("n={n}: kernel dim {}", report.kernel_dim),
        )?;
        let f = kernel_fidelity(&report.kernel_basis[0], &psi);
        ensure(f > 1.0 - FIDELITY_TOL, format!("n={n}: fidelity {f}"))?;
        let gap = report.gap.ok_or(format!("n={n}: no gap"))?;
        ensure((gap - gmin).abs() < GAP_TOL, format!("n={n}: gap {gap} vs {gmin}"))?;
        if n >= 5 {
            let cert = krylov_reachability(&ops, &psi, None);
            ensure(
                cert.verdict == Verdict::Unique,
                format!("n={n}: krylov {}", cert.verdict.as_str()),
            )?;
        }
        details.push(format!("n={n} gap {gap:.9}"));
    }
    Ok(details.join(", "))
}

fn c5_dynamics() -> Outcome {
    let (p, psi, _) = graph_process(2, &[1.0, 1.0]);
    let rho0 = DensityMatrix::maximally_mixed(p.space());
    let traj = numeric_evolve(&p, &rho0, &psi, 5.0, 50).map_err(|e| e.to_string())?;
    let f = *traj.fidelity.last().unwrap();
    ensure(f >= 0.99, format!("fidelity at t=5 is {f}"))?;
    let tdev = traj.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    ensure(tdev < TRACE_TOL, format!("trace deviation {tdev:e}"))?;

    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let s = CompositeSpace::qubits(n).unwrap();
        let mut rng = random::rng(100 + n as u64);
        let u = random::gate_sequence_unitary(n, 3, &mut rng).unwrap();
        let rates: Vec<f64> = (0..n).map(|k| 0.6 + 0.5 * k as f64).collect();
        let base: Vec<Operator> = sigma_minus_jumps(n).unwrap().iter().map(embed).collect();
        let conj = conjugated_jumps(&u, &base, 1e-10).unwrap();
        let p = LindbladProcess::dissipative(&s, conj.into_iter().zip(rates.iter().copied()).collect()).unwrap();
        let rho0 = random::random_density_matrix(&s, &mut rng).unwrap();
        let target = StateVector::normalized(&s, u.matrix().column(0).to_owned()).unwrap();
        let traj = numeric_evolve(&p, &rho0, &target, 5.0, 50).map_err(|e| e.to_string())?;
        let exact = analytic_evolve(&u, &rates, &rho0, &traj.times).map_err(|e| e.to_string())?;
        for (a, b) in traj.states.iter().zip(&exact) {
            worst = worst.max(linalg::max_abs(&(a.matrix() - b.matrix())));
        }
    }
    ensure(worst < PROPAGATOR_TOL, format!("propagator mismatch {worst:e}"))?;
    Ok(format!(
        "fidelity(5) = {f:.6}, trace dev {tdev:.1e}, analytic vs numeric {worst:.1e}"
    ))
}

fn c6_hermitian_control() -> Outcome {
    let s = CompositeSpace::qubits(2).unwrap();
    let jumps: Vec<_> = (0..2)
        .map(|k| (QuasiLocalOperator::on_site(&s, k, pauli_z()).unwrap(), 1.0))
        .collect();
    let p = LindbladProcess::from_local(&s, None, &jumps).unwrap();
    let kernel = stationary_space(&build_superoperator(&p, Storage::Dense).unwrap()).unwrap();
    ensure(kernel.dim() > 1, format!("kernel dim {}", kernel.dim()))?;
    // distance of 1/2 from the kernel span
    let id = linalg::identity(4).mapv(|z| z * 0.5);
    let mut rest = id.clone();
    for k in &kernel.states {
        let c = linalg::hs_inner(k, &id);
        rest = rest - k.mapv(|z| z * c);
    }
    let dist = linalg::frobenius(&rest);
    ensure(dist < RESIDUAL_TOL, format!("identity outside kernel by {dist:e}"))?;
    Ok(format!("kernel dim {}, identity distance {dist:.1e}", kernel.dim()))
}

fn c7_aklt() -> Outcome {
    let ev = linalg::eigvalsh(&aklt_bond_term()).unwrap();
    let err = ev
        .iter()
        .enumerate()
        .map(|(i, e)| (e - if i < 4 { -2.0 / 3.0 } else { 4.0 / 3.0 }).abs())
        .fold(0.0, f64::max);
    ensure(err < EIG_TOL, format!("bond spectrum deviation {err:e}"))?;
    let mut details = vec![format!("bond spectrum dev {err:.1e}")];

    for n in [3, 4] {
        let spec = SpinChainSpec::new(n, Boundary::Periodic).unwrap();
        let p = aklt_process(&spec, AkltVariant::Ladder, 1.0).unwrap();
        let (storage, mode) = if n == 3 {
            (Storage::Dense, SpectrumMode::Full)
        } else {
            (Storage::Sparse, SpectrumMode::GapOnly)
        };
        let start = Instant::now();
        let report = spectrum(&build_superoperator(&p, storage).unwrap(), mode).map_err(|e| format!("n={n}: {e}"))?;
        ensure(
            report.kernel_dim == 1,
            format!("n={n}: kernel dim {}", report.kernel_dim),
        )?;
        let (_, gs) = aklt_ground_space(&spec).unwrap();
        ensure(gs.len() == 1, format!("n={n}: ground space dim {}", gs.len()))?;
        let f = kernel_fidelity(&report.kernel_basis[0], &gs[0]);
        ensure(f > 1.0 - AKLT_FIDELITY_TOL, format!("n={n}: fidelity {f}"))?;
        details.push(format!(
            "n={n} kernel 1, fidelity {f:.12} ({:.1}s)",
            start.elapsed().as_secs_f64()
        ));
    }

    let open = SpinChainSpec::new(3, Boundary::Open).unwrap();
    let p = aklt_process(&open, AkltVariant::Ladder, 1.0).unwrap();
    let d = dark_space(&p, 1e-10).unwrap().dim();
    ensure(d == 4, format!("open chain dark space {d}"))?;
    details.push("open n=3 dark dim 4".into());

    let spec = SpinChainSpec::new(3, Boundary::Periodic).unwrap();
    let twirl = aklt_process(&spec, AkltVariant::Twirl { n_twirl: 9 }, 1.0).unwrap();
    let k = stationary_space(&build_superoperator(&twirl, Storage::Dense).unwrap()).unwrap();
    details.push(format!("twirl(9) kernel dim {}", k.dim()));
    Ok(details.join(", "))
}

fn c8_bec() -> Outcome {
    let mut details = Vec::new();
    for (m, n) in [(2, 2), (3, 2), (3, 3)] {
        let model = bec_process(m, n, Boundary::Periodic, 1.0, 0.5, 1.0).unwrap();
        let ds = dark_space(&model.process, 1e-10).unwrap();
        ensure(ds.dim() == 1, format!("(M,N)=({m},{n}): dark dim {}", ds.dim()))?;
        let f = ds.states()[0].fidelity(&model.target);
        ensure(f > 1.0 - FIDELITY_TOL, format!("({m},{n}): fidelity {f}"))?;
        let v = model.target.amplitudes();
        let r = linalg::norm((model.h0.matrix().dot(v) - v.mapv(|z| z * (-2.0 * n as f64))).view());
        ensure(r < RESIDUAL_TOL, format!("({m},{n}): hopping residual {r:e}"))?;
        let cert = krylov_reachability(&model.process.jump_operators(), &model.target, None);
        ensure(
            cert.verdict == Verdict::Unique,
            format!("({m},{n}): krylov {}", cert.verdict.as_str()),
        )?;
        details.push(format!("({m},{n}) ok"));
    }
    Ok(details.join(", "))
}

fn c9_eta() -> Outcome {
    let (j, u) = (1.0, 0.7);
    let mut details = Vec::new();
    let mut literal_worst: f64 = 0.0;
    for (m, n) in [(2, 1), (4, 1), (4, 2)] {
        let model = eta_process(m, n, j, u, 1.0).unwrap();
        let v = model.target.amplitudes();
        let worst = model
            .families
            .iter()
            .flatten()
            .map(|c| linalg::norm(c.matrix().dot(v).view()))
            .fold(0.0, f64::max);
        ensure(worst < RESIDUAL_TOL, format!("({m},{n}): jump residual {worst:e}"))?;
        let dim = dark_space(&model.process, 1e-10).unwrap().dim();
        ensure(dim == 1, format!("({m},{n}): dark dim {dim}"))?;
        let e = linalg::norm((model.hubbard.matrix().dot(v) - v.mapv(|z| z * (n as f64 * u))).view());
        ensure(e < RESIDUAL_TOL, format!("({m},{n}): energy residual {e:e}"))?;

        // η† between sectors (n-1) -> n and n -> n+1
        for k in [n - 1, n] {
            if k + 1 > m {
                continue;
            }
            let eta = eta_dagger_between(m, k).unwrap();
            let h_lo = hubbard_sector(m, k, k, Boundary::Periodic, j, u).unwrap();
            let h_hi = hubbard_sector(m, k + 1, k + 1, Boundary::Periodic, j, u).unwrap();
            let h_eta = h_hi.dot(&eta) - eta.dot(&h_lo);
            let r = linalg::max_abs(&(&h_eta - &eta.mapv(|z| z * u)));
            ensure(r < RESIDUAL_TOL, format!("M={m} sector {k}: [H, η†] - Uη† = {r:e}"))?;
            literal_worst = literal_worst.max(linalg::max_abs(&(h_eta.mapv(|z| -z) - eta.mapv(|z| z * u))));
        }
        details.push(format!("({m},{n}) ok"));
    }
    details.push(format!(
        "[H,η†]=Uη† holds; written order [η†,H]=Uη† off by {literal_worst:.3}"
    ));
    Ok(details.join(", "))
}

// Defective eigenvalues split by roughly eps^(1/k); group them and compare centroids.
fn coarse_groups(values: &[C64]) -> Vec<(C64, usize)> {
    let mut label: Vec<usize> = (0..values.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..values.len() {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= COARSE_RADIUS {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, (C64, usize)> = Default::default();
    for (i, v) in values.iter().enumerate() {
        let e = groups.entry(root(&mut label, i)).or_insert((C64::new(0.0, 0.0), 0));
        e.0 += v;
        e.1 += 1;
    }
    groups.into_values().map(|(s, k)| (s / k as f64, k)).collect()
}

struct Shipped {
    name: &'static str,
    process: LindbladProcess,
    constructed: bool,
}

fn shipped_processes() -> Vec<Shipped> {
    use darkstate::constructors::{global_ladder_jump, graph_basis, qudit_ladder_jumps};
    let mut out = Vec::new();
    out.push(Shipped {
        name: "sigma-minus n=3",
        process: lowering(3, &[1.0, 0.5, 2.0]),
        constructed: true,
    });
    let s2 = CompositeSpace::qubits(2).unwrap();
    let u = random::gate_sequence_unitary(2, 3, &mut random::rng(5)).unwrap();
    let base: Vec<Operator> = sigma_minus_jumps(2).unwrap().iter().map(embed).collect();
    out.push(Shipped {
        name: "conjugated sigma-minus n=2",
        process: LindbladProcess::uniform(&s2, conjugated_jumps(&u, &base, 1e-10).unwrap(), 1.0).unwrap(),
        constructed: true,
    });
    out.push(Shipped {
        name: "graph path n=3",
        process: graph_process(3, &[1.0, 1.0, 1.0]).0,
        constructed: true,
    });
    let q: Vec<_> = qudit_ladder_jumps(2, 3)
        .unwrap()
        .into_iter()
        .map(|c| (c, 1.0))
        .collect();
    out.push(Shipped {
        name: "qudit ladder n=2 d=3",
        process: LindbladProcess::from_local(q[0].0.space(), None, &q).unwrap(),
        constructed: true,
    });
    let g = GraphSpec::path(2).unwrap();
    let c = global_ladder_jump(&graph_basis(&g).unwrap(), 1e-10).unwrap();
    out.push(Shipped {
        name: "global ladder 2-path",
        process: LindbladProcess::uniform(&g.space(), vec![c], 1.0).unwrap(),
        constructed: true,
    });
    let spec = SpinChainSpec::new(3, Boundary::Periodic).unwrap();
    out.push(Shipped {
        name: "aklt ladder n=3",
        process: aklt_process(&spec, AkltVariant::Ladder, 1.0).unwrap(),
        constructed: false,
    });
    out.push(Shipped {
        name: "aklt twirl n=3",
        process: aklt_process(&spec, AkltVariant::Twirl { n_twirl: 9 }, 1.0).unwrap(),
        constructed: false,
    });
    out.push(Shipped {
        name: "bec M=3 N=2",
        process: bec_process(3, 2, Boundary::Periodic, 1.0, 0.5, 1.0).unwrap().process,
        constructed: false,
    });
    out.push(Shipped {
        name: "eta M=4 N=1",
        process: eta_process(4, 1, 1.0, 0.7, 1.0).unwrap().process,
        constructed: false,
    });
    let zs: Vec<_> = (0..2)
        .map(|k| (QuasiLocalOperator::on_site(&s2, k, pauli_z()).unwrap(), 1.0))
        .collect();
    out.push(Shipped {
        name: "hermitian sigma-z n=2",
        process: LindbladProcess::from_local(&s2, None, &zs).unwrap(),
        constructed: false,
    });
    out
}

fn c10_properties() -> Outcome {
    let mut rng = random::rng(2024);
    let mut checked = 0;
    for s in shipped_processes() {
        let d = s.process.dim();
        for _ in 0..100 {
            let sigma = random::gaussian_matrix(d, d, &mut rng);
            let l = apply_generator(&s.process, &sigma).unwrap();
            let tr = linalg::trace(&l).norm();
            ensure(tr < RESIDUAL_TOL, format!("{}: |tr L(σ)| = {tr:e}", s.name))?;
            let ld = apply_generator(&s.process, &linalg::dagger(&sigma)).unwrap();
            let herm = linalg::max_abs(&(ld - linalg::dagger(&l)));
            ensure(herm < RESIDUAL_TOL, format!("{}: L(σ†) - L(σ)† = {herm:e}", s.name))?;
        }
        let report = dense_spectrum(&s.process);
        let max_re = report.max_real_part();
        ensure(max_re <= POSITIVE_RE_TOL, format!("{}: max Re λ = {max_re:e}", s.name))?;
        let groups = coarse_groups(&report.eigenvalues);
        for (centre, count) in groups.iter().filter(|(c, _)| c.im.abs() > report.zero_tol) {
            let partner = groups
                .iter()
                .find(|(o, k)| (o - centre.conj()).norm() <= PAIR_TOL && k == count);
            ensure(partner.is_some(), format!("{}: unpaired eigenvalue {centre}", s.name))?;
        }
        if s.constructed {
            ensure(
                report.imaginary_eigenvalues.is_empty(),
                format!(
                    "{}: purely imaginary eigenvalues {:?}",
                    s.name, report.imaginary_eigenvalues
                ),
            )?;
        }
        checked += 1;
    }
    Ok(format!("{checked} processes"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("single-qubit decay spectrum", c1_decay_spectrum),
        ("product-spectrum law", c2_product_law),
        ("relaxation-time law", c3_relaxation_law),
        ("graph-state uniqueness", c4_graph_uniqueness),
        ("preparation dynamics", c5_dynamics),
        ("hermitian no-go control", c6_hermitian_control),
        ("AKLT", c7_aklt),
        ("BEC", c8_bec),
        ("eta-condensate", c9_eta),
        ("property suites", c10_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
