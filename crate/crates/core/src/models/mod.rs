//! Ready-made lattice processes: the AKLT spin-1 chain, a driven bosonic
//! lattice with a condensate dark state, and the fermionic η-condensate.

pub mod aklt;
pub mod bose;
pub mod fermi;

pub use aklt::{
    aklt_bond_term, aklt_coupled_basis, aklt_ground_space, aklt_hamiltonian, aklt_ladder_jump, aklt_process,
    aklt_projector, total_spin, twirl_unitaries, AkltVariant, SpinChainSpec,
};
pub use bose::{bec_process, bec_state, bose_annihilators, BecModel, BoseFockBasis};
pub use fermi::{eta_dagger_between, eta_process, eta_state, EtaModel, FermiFockBasis, FermiModes};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operator::CsrMatrix;

/// Largest sector handled by the Fock-space models.
pub const BASIS_LIMIT: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Bonds `(i, i+1)`, wrapping when periodic. A periodic two-site chain has
/// both `(0, 1)` and `(1, 0)`.
pub fn chain_bonds(m: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Periodic if m >= 2 => (0..m).map(|i| (i, (i + 1) % m)).collect(),
        _ => (1..m).map(|i| (i - 1, i)).collect(),
    }
}

/// Distinct unordered bonds, in first-appearance order.
pub fn distinct_bonds(m: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (a, b) in chain_bonds(m, boundary) {
        let key = (a.min(b), a.max(b));
        if !out.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key) {
            out.push((a, b));
        }
    }
    out
}

/// Dense block `op[rows, cols]` of a full-space sparse operator.
pub(crate) fn restrict(op: &CsrMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    let mut col_pos = vec![usize::MAX; op.ncols()];
    for (j, &c) in cols.iter().enumerate() {
        col_pos[c] = j;
    }
    let mut row_pos = vec![usize::MAX; op.nrows()];
    for (i, &r) in rows.iter().enumerate() {
        row_pos[r] = i;
    }
    let mut out = CMatrix::zeros((rows.len(), cols.len()));
    for (r, c, v) in op.iter() {
        let (i, j) = (row_pos[r], col_pos[c]);
        if i != usize::MAX && j != usize::MAX {
            out[(i, j)] += v;
        }
    }
    out
}

pub(crate) fn check_size(size: usize, what: &str) -> Result<()> {
    if size > BASIS_LIMIT {
        return Err(Error::BasisOverflow(format!(
            "{what} has {size} states, limit {BASIS_LIMIT}"
        )));
    }
    Ok(())
}

/// One line per basis state with space-separated occupations.
pub fn fock_dump<I, R>(rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = usize>,
{
    let mut s = String::new();
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|n| n.to_string()).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonds() {
        assert_eq!(chain_bonds(2, Boundary::Periodic), vec![(0, 1), (1, 0)]);
        assert_eq!(distinct_bonds(2, Boundary::Periodic), vec![(0, 1)]);
        assert_eq!(chain_bonds(3, Boundary::Open), vec![(0, 1), (1, 2)]);
        assert_eq!(chain_bonds(3, Boundary::Periodic), vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(fock_dump(vec![vec![2, 0], vec![1, 1]]), "2 0\n1 1\n");
    }
}
