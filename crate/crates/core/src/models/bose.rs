use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::liouvillian::LindbladProcess;
use crate::operator::{CompositeSpace, CsrMatrix, Operator, StateVector};

use super::{chain_bonds, check_size, distinct_bonds, fock_dump, restrict, Boundary};

/// Occupation vectors of `n` bosons on `m` sites in descending
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoseFockBasis {
    m: usize,
    n: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl BoseFockBasis {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one site".into()));
        }
        check_size(binomial(n + m - 1, m - 1), "bosonic sector")?;
        let mut states = Vec::new();
        let mut cur = vec![0; m];
        fill(&mut cur, 0, n, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { m, n, states, index })
    }

    pub fn n_sites(&self) -> usize {
        self.m
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Positions in the truncated product space with per-site cutoff `cutoff`.
    pub fn full_indices(&self, cutoff: usize) -> Vec<usize> {
        self.states
            .iter()
            .map(|s| s.iter().fold(0, |acc, &k| acc * (cutoff + 1) + k))
            .collect()
    }

    pub fn dump(&self) -> String {
        fock_dump(self.states.iter().map(|s| s.iter().copied()))
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        CompositeSpace::single(self.len())
    }
}

fn fill(cur: &mut Vec<usize>, site: usize, left: usize, out: &mut Vec<Vec<usize>>) {
    if site + 1 == cur.len() {
        cur[site] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[site] = k;
        fill(cur, site + 1, left - k, out);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Annihilators `a_0..a_{m-1}` on the product space with occupations
/// `0..=cutoff` per site, site 0 most significant.
pub fn bose_annihilators(m: usize, cutoff: usize) -> Result<Vec<CsrMatrix>> {
    let d = cutoff + 1;
    let total = (0..m)
        .try_fold(1usize, |acc, _| acc.checked_mul(d))
        .filter(|&t| t <= 1 << 20);
    let total = total.ok_or_else(|| Error::BasisOverflow(format!("{d}^{m} truncated states")))?;
    let mut local = Vec::new();
    for k in 1..d {
        local.push((k - 1, k, C64::new((k as f64).sqrt(), 0.0)));
    }
    let a = CsrMatrix::from_triplets(d, d, local);
    Ok((0..m)
        .map(|i| {
            let left = CsrMatrix::identity(d.pow(i as u32));
            let right = CsrMatrix::identity(total / d.pow(i as u32 + 1));
            left.kron(&a).kron(&right)
        })
        .collect())
}

/// `(sum_j a_j†)^N |vac⟩` normalized: amplitudes `N! / sqrt(prod n_j!)`.
pub fn bec_state(m: usize, n: usize) -> Result<StateVector> {
    if m < 2 || n == 0 {
        return Err(Error::InvalidArgument("need M >= 2 sites and N >= 1 particles".into()));
    }
    let basis = BoseFockBasis::new(m, n)?;
    let ln_fact = |k: usize| (1..=k).map(|x| (x as f64).ln()).sum::<f64>();
    let amps = CVector::from_iter(basis.states().iter().map(|s| {
        let ln = ln_fact(n) - 0.5 * s.iter().map(|&k| ln_fact(k)).sum::<f64>();
        C64::new(ln.exp(), 0.0)
    }));
    StateVector::normalized(&basis.space()?, amps)
}

#[derive(Debug, Clone)]
pub struct BecModel {
    pub basis: BoseFockBasis,
    pub process: LindbladProcess,
    /// Hopping part `-J sum_bonds (a_i† a_j + h.c.)`.
    pub h0: Operator,
    /// `U/2 sum_i a_i†² a_i²`.
    pub h_int: Operator,
    pub target: StateVector,
}

/// Jumps `c_ij = (a_i† + a_j†)(a_i - a_j)` on each distinct bond, restricted
/// to the `N`-particle sector.
pub fn bec_process(m: usize, n: usize, boundary: Boundary, j: f64, u_int: f64, rate: f64) -> Result<BecModel> {
    let target = bec_state(m, n)?;
    let basis = BoseFockBasis::new(m, n)?;
    let space = basis.space()?;
    let a = bose_annihilators(m, n)?;
    let ad: Vec<CsrMatrix> = a.iter().map(|x| x.dagger()).collect();
    let idx = basis.full_indices(n);
    let one = C64::new(1.0, 0.0);
    let sector = |op: &CsrMatrix| restrict(op, &idx, &idx);

    let mut jumps = Vec::new();
    for (i, k) in distinct_bonds(m, boundary) {
        let plus = CsrMatrix::linear_combination(&[(one, &ad[i]), (one, &ad[k])])?;
        let minus = CsrMatrix::linear_combination(&[(one, &a[i]), (-one, &a[k])])?;
        jumps.push((Operator::new(space.clone(), sector(&plus.matmul(&minus)?))?, rate));
    }
    let mut h0 = CMatrix::zeros((basis.len(), basis.len()));
    for (i, k) in chain_bonds(m, boundary) {
        let hop = ad[i].matmul(&a[k])?;
        let hop = CsrMatrix::linear_combination(&[(one, &hop), (one, &hop.dagger())])?;
        h0 = h0 + sector(&hop).mapv(|z| z * -j);
    }
    let mut h_int = CMatrix::zeros((basis.len(), basis.len()));
    for i in 0..m {
        let pair = ad[i].matmul(&ad[i])?.matmul(&a[i])?.matmul(&a[i])?;
        h_int = h_int + sector(&pair).mapv(|z| z * (0.5 * u_int));
    }
    let process = LindbladProcess::dissipative(&space, jumps)?;
    Ok(BecModel {
        h0: Operator::new(space.clone(), h0)?,
        h_int: Operator::new(space, h_int)?,
        basis,
        process,
        target,
    })
}
