use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::liouvillian::LindbladProcess;
use crate::operator::{CompositeSpace, CsrMatrix, Operator, StateVector};

use super::{chain_bonds, check_size, distinct_bonds, fock_dump, restrict, Boundary};

/// Two-species fermion modes on `m` sites, ordered `(↑0, ↓0, ↑1, ↓1, ...)`.
/// A Fock state is `prod_{modes ascending} f†_mode |0⟩`; its full-space index
/// has bit `mode` set for each occupied mode.
#[derive(Debug, Clone)]
pub struct FermiModes {
    m: usize,
    annihilators: Vec<CsrMatrix>,
}

pub const UP: usize = 0;
pub const DOWN: usize = 1;

impl FermiModes {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || 2 * m > 16 {
            return Err(Error::BasisOverflow(format!("{m} sites exceed the full Fock budget")));
        }
        let n_modes = 2 * m;
        let dim = 1usize << n_modes;
        let annihilators = (0..n_modes)
            .map(|mode| {
                let trip = (0..dim)
                    .filter(|s| s >> mode & 1 == 1)
                    .map(|s| {
                        let below = (s & ((1 << mode) - 1)).count_ones();
                        let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                        (s & !(1 << mode), s, C64::new(sign, 0.0))
                    })
                    .collect();
                CsrMatrix::from_triplets(dim, dim, trip)
            })
            .collect();
        Ok(Self { m, annihilators })
    }

    pub fn n_sites(&self) -> usize {
        self.m
    }

    pub fn mode(site: usize, spin: usize) -> usize {
        2 * site + spin
    }

    pub fn f(&self, spin: usize, site: usize) -> &CsrMatrix {
        &self.annihilators[Self::mode(site, spin)]
    }

    pub fn fd(&self, spin: usize, site: usize) -> CsrMatrix {
        self.f(spin, site).dagger()
    }

    pub fn number(&self, spin: usize, site: usize) -> CsrMatrix {
        self.fd(spin, site).matmul(self.f(spin, site)).expect("square")
    }

    pub fn full_dim(&self) -> usize {
        1 << (2 * self.m)
    }

    /// `f†_↑l f†_↓l`.
    pub fn doublon_creator(&self, site: usize) -> CsrMatrix {
        self.fd(UP, site).matmul(&self.fd(DOWN, site)).expect("square")
    }

    /// `η† = M^{-1/2} sum_l (-1)^l f†_↑l f†_↓l`.
    pub fn eta_dagger(&self) -> Result<CsrMatrix> {
        let s = 1.0 / (self.m as f64).sqrt();
        let terms: Vec<(C64, CsrMatrix)> = (0..self.m)
            .map(|l| (C64::new(if l % 2 == 0 { s } else { -s }, 0.0), self.doublon_creator(l)))
            .collect();
        let refs: Vec<(C64, &CsrMatrix)> = terms.iter().map(|(c, m)| (*c, m)).collect();
        CsrMatrix::linear_combination(&refs)
    }

    /// `-J sum_{bonds, σ} (f†_σl f_σl' + h.c.) + U sum_l n_↑l n_↓l`.
    pub fn hubbard(&self, boundary: Boundary, j: f64, u: f64) -> Result<CsrMatrix> {
        let mut terms: Vec<(C64, CsrMatrix)> = Vec::new();
        for (a, b) in chain_bonds(self.m, boundary) {
            for spin in [UP, DOWN] {
                let hop = self.fd(spin, a).matmul(self.f(spin, b))?;
                terms.push((C64::new(-j, 0.0), hop.dagger()));
                terms.push((C64::new(-j, 0.0), hop));
            }
        }
        for l in 0..self.m {
            terms.push((C64::new(u, 0.0), self.number(UP, l).matmul(&self.number(DOWN, l))?));
        }
        if terms.is_empty() {
            return Ok(CsrMatrix::zeros(self.full_dim(), self.full_dim()));
        }
        let refs: Vec<(C64, &CsrMatrix)> = terms.iter().map(|(c, m)| (*c, m)).collect();
        CsrMatrix::linear_combination(&refs)
    }
}

/// Fixed `(N↑, N↓)` sector. Each species' site configurations are ordered by
/// descending occupation vector (site 0 most significant); the sector index
/// is `i_up * n_down_configs + i_down`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermiFockBasis {
    m: usize,
    n_up: usize,
    n_down: usize,
    up: Vec<u32>,
    down: Vec<u32>,
}

impl FermiFockBasis {
    pub fn new(m: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if n_up > m || n_down > m {
            return Err(Error::InvalidArgument(format!(
                "cannot place ({n_up}, {n_down}) fermions on {m} sites"
            )));
        }
        if m > 16 {
            return Err(Error::BasisOverflow(format!("{m} sites")));
        }
        let configs = |k: usize| -> Vec<u32> {
            let mut v: Vec<u32> = (0..1u32 << m).filter(|c| c.count_ones() as usize == k).collect();
            // site l is bit (m - 1 - l), so descending integers are descending occupation vectors
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        };
        let (up, down) = (configs(n_up), configs(n_down));
        check_size(up.len() * down.len(), "fermionic sector")?;
        Ok(Self {
            m,
            n_up,
            n_down,
            up,
            down,
        })
    }

    pub fn len(&self) -> usize {
        self.up.len() * self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    /// `(n_↑, n_↓)` per site.
    pub fn occupations(&self, index: usize) -> Vec<(usize, usize)> {
        let (u, d) = (self.up[index / self.down.len()], self.down[index % self.down.len()]);
        (0..self.m)
            .map(|l| {
                let bit = self.m - 1 - l;
                ((u >> bit & 1) as usize, (d >> bit & 1) as usize)
            })
            .collect()
    }

    pub fn full_index(&self, index: usize) -> usize {
        self.occupations(index)
            .iter()
            .enumerate()
            .map(|(l, &(nu, nd))| (nu << FermiModes::mode(l, UP)) | (nd << FermiModes::mode(l, DOWN)))
            .sum()
    }

    pub fn full_indices(&self) -> Vec<usize> {
        (0..self.len()).map(|i| self.full_index(i)).collect()
    }

    /// Mode occupations in the order `n_↑0 n_↓0 n_↑1 ...`.
    pub fn dump(&self) -> String {
        fock_dump((0..self.len()).map(|i| self.occupations(i).into_iter().flat_map(|(u, d)| [u, d])))
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        CompositeSpace::single(self.len())
    }
}

fn check_eta_args(m: usize, n: usize) -> Result<()> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::InvalidArgument(
            "the η-condensate needs an even number of sites".into(),
        ));
    }
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!("pair number {n} outside 1..={m}")));
    }
    Ok(())
}

/// `(η†)^N |0⟩` normalized, on the `(N, N)` sector.
pub fn eta_state(m: usize, n: usize) -> Result<StateVector> {
    check_eta_args(m, n)?;
    let modes = FermiModes::new(m)?;
    let eta = modes.eta_dagger()?;
    let mut v = CVector::zeros(modes.full_dim());
    v[0] = C64::new(1.0, 0.0);
    for _ in 0..n {
        v = eta.matvec(&v);
    }
    let basis = FermiFockBasis::new(m, n, n)?;
    let amps = CVector::from_iter(basis.full_indices().iter().map(|&i| v[i]));
    StateVector::normalized(&basis.space()?, amps)
}

/// `η†` as a matrix from sector `(N, N)` to sector `(N+1, N+1)`.
pub fn eta_dagger_between(m: usize, n: usize) -> Result<CMatrix> {
    let modes = FermiModes::new(m)?;
    let from = FermiFockBasis::new(m, n, n)?;
    let to = FermiFockBasis::new(m, n + 1, n + 1)?;
    Ok(restrict(&modes.eta_dagger()?, &to.full_indices(), &from.full_indices()))
}

/// `H_FH` on sector `(n_up, n_down)`.
pub fn hubbard_sector(m: usize, n_up: usize, n_down: usize, boundary: Boundary, j: f64, u: f64) -> Result<CMatrix> {
    let modes = FermiModes::new(m)?;
    let basis = FermiFockBasis::new(m, n_up, n_down)?;
    let idx = basis.full_indices();
    Ok(restrict(&modes.hubbard(boundary, j, u)?, &idx, &idx))
}

#[derive(Debug, Clone)]
pub struct EtaModel {
    pub basis: FermiFockBasis,
    pub process: LindbladProcess,
    /// Jumps grouped by family, one entry per distinct bond.
    pub families: [Vec<Operator>; 4],
    pub hubbard: Operator,
    pub target: StateVector,
}

/// The four jump families on every distinct periodic bond, on the `(N, N)`
/// sector, with `H_FH` for tunneling `j` and interaction `u`.
pub fn eta_process(m: usize, n: usize, j: f64, u: f64, rate: f64) -> Result<EtaModel> {
    check_eta_args(m, n)?;
    let target = eta_state(m, n)?;
    let modes = FermiModes::new(m)?;
    let basis = FermiFockBasis::new(m, n, n)?;
    let space = basis.space()?;
    let idx = basis.full_indices();
    let one = C64::new(1.0, 0.0);
    let full_id = CsrMatrix::identity(modes.full_dim());
    let sum = |a: &CsrMatrix, b: &CsrMatrix, s: f64| CsrMatrix::linear_combination(&[(one, a), (C64::new(s, 0.0), b)]);
    let sector = |op: &CsrMatrix| Operator::new(space.clone(), restrict(op, &idx, &idx));

    let mut families: [Vec<Operator>; 4] = Default::default();
    for (l, k) in distinct_bonds(m, Boundary::Periodic) {
        let (el, ek) = (modes.doublon_creator(l), modes.doublon_creator(k));
        let c1 = sum(&el, &ek, -1.0)?.matmul(&sum(&el.dagger(), &ek.dagger(), 1.0)?)?;

        let hop_down = |a: usize, b: usize| modes.fd(DOWN, a).matmul(modes.f(DOWN, b));
        let c2 = sum(
            &modes.number(UP, l).matmul(&hop_down(l, k)?)?,
            &modes.number(UP, k).matmul(&hop_down(k, l)?)?,
            1.0,
        )?;

        let hole = |site: usize| sum(&full_id, &modes.number(DOWN, site), -1.0);
        let c3 = sum(&modes.fd(UP, l), &modes.fd(UP, k), 1.0)?
            .matmul(&sum(modes.f(UP, l), modes.f(UP, k), 1.0)?)?
            .matmul(&hole(l)?)?
            .matmul(&hole(k)?)?;

        let c4 = sum(&hop_down(l, k)?, &hop_down(k, l)?, 1.0)?
            .matmul(&modes.number(UP, l))?
            .matmul(&modes.number(UP, k))?;

        for (fam, op) in families.iter_mut().zip([c1, c2, c3, c4]) {
            fam.push(sector(&op)?);
        }
    }
    let jumps = families
        .iter()
        .flat_map(|f| f.iter().map(|o| (o.clone(), rate)))
        .collect();
    let process = LindbladProcess::dissipative(&space, jumps)?;
    let hubbard = sector(&modes.hubbard(Boundary::Periodic, j, u)?)?;
    Ok(EtaModel {
        basis,
        process,
        families,
        hubbard,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn anticommutators() {
        for m in 1..=3 {
            let modes = FermiModes::new(m).unwrap();
            let d = modes.full_dim();
            for a in 0..2 * m {
                for b in 0..2 * m {
                    let fa = &modes.annihilators[a];
                    let fb = &modes.annihilators[b];
                    let anti = fa.matmul(&fb.dagger()).unwrap().to_dense() + fb.dagger().matmul(fa).unwrap().to_dense();
                    let want = if a == b {
                        linalg::identity(d)
                    } else {
                        CMatrix::zeros((d, d))
                    };
                    assert!(linalg::max_abs(&(anti - want)) < 1e-14);
                    let ff = fa.matmul(fb).unwrap().to_dense() + fb.matmul(fa).unwrap().to_dense();
                    assert!(linalg::max_abs(&ff) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sector_basis() {
        let b = FermiFockBasis::new(2, 1, 1).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.occupations(0), vec![(1, 1), (0, 0)]);
        assert_eq!(b.occupations(1), vec![(1, 0), (0, 1)]);
        assert_eq!(b.dump(), "1 1 0 0\n1 0 0 1\n0 1 1 0\n0 0 1 1\n");
        assert!(FermiFockBasis::new(2, 3, 0).is_err());
    }

    #[test]
    fn two_site_eta_state() {
        let psi = eta_state(2, 1).unwrap();
        let r = 0.5f64.sqrt();
        let want = [r, 0.0, 0.0, -r];
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert!((a - C64::new(w, 0.0)).norm() < 1e-14);
        }
        assert!(eta_state(3, 1).is_err());
        assert!(eta_state(2, 3).is_err());
    }

    #[test]
    fn four_site_pairs_have_checkerboard_signs() {
        let (m, n) = (4, 2);
        let psi = eta_state(m, n).unwrap();
        let b = FermiFockBasis::new(m, n, n).unwrap();
        let norm = 1.0 / 6f64.sqrt();
        for i in 0..b.len() {
            let occ = b.occupations(i);
            let amp = psi.amplitudes()[i];
            if occ.iter().all(|&(u, d)| u == d) {
                let sign: i32 = occ
                    .iter()
                    .enumerate()
                    .filter(|(_, &(u, _))| u == 1)
                    .map(|(l, _)| if l % 2 == 0 { 1 } else { -1 })
                    .product();
                assert!((amp - C64::new(sign as f64 * norm, 0.0)).norm() < 1e-14);
            } else {
                assert!(amp.norm() == 0.0);
            }
        }
    }

    #[test]
    fn jumps_annihilate_target() {
        for (m, n) in [(2, 1), (4, 1), (4, 2)] {
            let model = eta_process(m, n, 1.0, 0.7, 1.0).unwrap();
            for j in model.process.jumps() {
                assert!(linalg::max_abs_vec(&j.operator.matrix().dot(model.target.amplitudes())) < 1e-12);
            }
        }
    }

    #[test]
    fn energy_of_condensate() {
        let (m, n, u) = (4, 2, 0.7);
        let model = eta_process(m, n, 1.0, u, 1.0).unwrap();
        let v = model.target.amplitudes();
        let r = model.hubbard.matrix().dot(v) - v.mapv(|z| z * (n as f64 * u));
        assert!(linalg::max_abs_vec(&r) < 1e-10);
    }
}
