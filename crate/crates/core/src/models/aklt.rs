use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::liouvillian::LindbladProcess;
use crate::operator::{
    clock, shift, spin1_minus, spin1_x, spin1_y, spin1_z, CompositeSpace, Operator, QuasiLocalOperator, StateVector,
};

use super::{chain_bonds, Boundary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinChainSpec {
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl SpinChainSpec {
    pub fn new(n_sites: usize, boundary: Boundary) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidArgument("spin chain needs at least two sites".into()));
        }
        Ok(Self { n_sites, boundary })
    }

    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::uniform(self.n_sites, 3).expect("valid chain")
    }

    pub fn bonds(&self) -> Vec<(usize, usize)> {
        chain_bonds(self.n_sites, self.boundary)
    }
}

fn spin_dot() -> CMatrix {
    linalg::kron(&spin1_x(), &spin1_x()) + linalg::kron(&spin1_y(), &spin1_y()) + linalg::kron(&spin1_z(), &spin1_z())
}

/// `h = S·S + (S·S)²/3` on two spin-1 sites.
pub fn aklt_bond_term() -> CMatrix {
    let s = spin_dot();
    let s2 = s.dot(&s);
    s + s2.mapv(|z| z / 3.0)
}

/// `P = (2/3 + h)/2`, the projector onto total spin 2.
pub fn aklt_projector() -> CMatrix {
    (linalg::identity(9).mapv(|z| z * (2.0 / 3.0)) + aklt_bond_term()).mapv(|z| z * 0.5)
}

fn swap9() -> CMatrix {
    let mut p = CMatrix::zeros((9, 9));
    for a in 0..3 {
        for b in 0..3 {
            p[(3 * b + a, 3 * a + b)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Places a two-site matrix written for `(a, b)` on the chain, reordering the
/// factors when `a > b`.
fn bond_operator(space: &CompositeSpace, (a, b): (usize, usize), m: &CMatrix) -> Result<QuasiLocalOperator> {
    if a < b {
        QuasiLocalOperator::new(space, vec![a, b], m.clone())
    } else {
        let p = swap9();
        QuasiLocalOperator::new(space, vec![b, a], p.dot(m).dot(&p))
    }
}

/// Total Hamiltonian and its bond terms.
pub fn aklt_hamiltonian(spec: &SpinChainSpec) -> Result<(Operator, Vec<QuasiLocalOperator>)> {
    let space = spec.space();
    let h = aklt_bond_term();
    let terms = spec
        .bonds()
        .into_iter()
        .map(|bond| bond_operator(&space, bond, &h))
        .collect::<Result<Vec<_>>>()?;
    let mut total = Operator::zeros(&space);
    for t in &terms {
        total = total.add(&t.embed())?;
    }
    Ok((total, terms))
}

/// Coupled two-spin bases: the spin-2 multiplet ordered `m = -2..2`, and the
/// spin-0 state followed by the spin-1 multiplet ordered `m = -1..1`.
pub fn aklt_coupled_basis() -> (Vec<CVector>, Vec<CVector>) {
    let lower = linalg::kron(&spin1_minus(), &linalg::identity(3)) + linalg::kron(&linalg::identity(3), &spin1_minus());
    let ket = |m1: i32, m2: i32| {
        let mut v = CVector::zeros(9);
        v[(3 * (1 - m1) + (1 - m2)) as usize] = C64::new(1.0, 0.0);
        v
    };
    let normalize = |v: CVector| {
        let n = linalg::norm(v.view());
        v.mapv(|z| z / n)
    };
    let ladder = |top: CVector, j: i32| -> Vec<CVector> {
        let mut out = vec![top];
        for _ in 0..2 * j {
            let next = normalize(lower.dot(out.last().expect("nonempty")));
            out.push(next);
        }
        out.reverse();
        out
    };
    // highest weight of spin J inside the m = J subspace, orthogonal to the
    // higher multiplets, with positive amplitude on |m1 = +1⟩
    let highest = |j: i32, higher: &[CVector]| -> CVector {
        let m = j;
        let candidates: Vec<CVector> = (-1..=1)
            .rev()
            .filter(|m1| (-1..=1).contains(&(m - m1)))
            .map(|m1| ket(m1, m - m1))
            .collect();
        let mut basis = linalg::OrthoBasis::new(9, 1e-10);
        for h in higher {
            basis.push(h);
        }
        let start = basis.len();
        for c in &candidates {
            basis.push(c);
        }
        let mut v = basis.vectors()[start].clone();
        let lead = linalg::inner(ket(1, m - 1).view(), v.view());
        let phase = lead / lead.norm();
        v.mapv_inplace(|z| z / phase);
        v
    };
    let j2 = ladder(ket(1, 1), 2);
    let j1_top = highest(1, &[j2[3].clone()]);
    let j1 = ladder(j1_top, 1);
    let j0 = highest(0, &[j2[2].clone(), j1[1].clone()]);
    let mut psi = vec![j0];
    psi.extend(j1);
    (j2, psi)
}

/// `c = sum_{i<=4} |Ψ_i⟩⟨Φ_i| + |Φ_4⟩⟨Φ_5|`.
pub fn aklt_ladder_jump() -> CMatrix {
    let (phi, psi) = aklt_coupled_basis();
    let mut c = CMatrix::zeros((9, 9));
    for i in 0..4 {
        c = c + linalg::outer(&psi[i], &phi[i]);
    }
    c + linalg::outer(&phi[3], &phi[4])
}

/// Two-qutrit Weyl operators `X^r Z^p ⊗ X^s Z^q`. Element `α` has base-3
/// digits `(p, q, r, s)`, so the first nine are the pure shifts.
pub fn twirl_unitaries(count: usize) -> Vec<CMatrix> {
    let x = shift(3);
    let z = clock(3);
    let pow = |m: &CMatrix, k: usize| (0..k).fold(linalg::identity(3), |acc, _| acc.dot(m));
    (0..count.min(81))
        .map(|alpha| {
            let (p, q, r, s) = (alpha / 27, (alpha / 9) % 3, (alpha / 3) % 3, alpha % 3);
            let a = pow(&x, r).dot(&pow(&z, p));
            let b = pow(&x, s).dot(&pow(&z, q));
            linalg::kron(&a, &b)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkltVariant {
    /// One ladder jump per bond.
    Ladder,
    /// `U^α P` for the first `n_twirl` Weyl unitaries, per bond.
    Twirl { n_twirl: usize },
}

pub fn aklt_process(spec: &SpinChainSpec, variant: AkltVariant, rate: f64) -> Result<LindbladProcess> {
    let space = spec.space();
    let locals: Vec<CMatrix> = match variant {
        AkltVariant::Ladder => vec![aklt_ladder_jump()],
        AkltVariant::Twirl { n_twirl } => {
            if n_twirl == 0 || n_twirl > 81 {
                return Err(Error::InvalidArgument("n_twirl must lie in 1..=81".into()));
            }
            let p = aklt_projector();
            twirl_unitaries(n_twirl).iter().map(|u| u.dot(&p)).collect()
        }
    };
    let mut jumps = Vec::new();
    for bond in spec.bonds() {
        for m in &locals {
            jumps.push((bond_operator(&space, bond, m)?, rate));
        }
    }
    LindbladProcess::from_local(&space, None, &jumps)
}

/// Lowest eigenvalue of the chain Hamiltonian and an orthonormal basis of its
/// eigenspace (degeneracy tolerance `1e-8`).
pub fn aklt_ground_space(spec: &SpinChainSpec) -> Result<(f64, Vec<StateVector>)> {
    let (h, _) = aklt_hamiltonian(spec)?;
    let (vals, vecs) = linalg::eigh(h.matrix())?;
    let e0 = vals[0];
    let states = vals
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v - e0 < 1e-8)
        .map(|(i, _)| StateVector::normalized(h.space(), vecs.column(i).to_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok((e0, states))
}

/// `sum_k S_k^α` for `axis` 0, 1, 2 = x, y, z.
pub fn total_spin(spec: &SpinChainSpec, axis: usize) -> Result<Operator> {
    let local = match axis {
        0 => spin1_x(),
        1 => spin1_y(),
        2 => spin1_z(),
        _ => return Err(Error::InvalidArgument(format!("axis {axis}"))),
    };
    let space = spec.space();
    let mut total = Operator::zeros(&space);
    for k in 0..spec.n_sites {
        total = total.add(&QuasiLocalOperator::on_site(&space, k, local.clone())?.embed())?;
    }
    Ok(total)
}
