//! Jump-operator families with a prescribed pure dark state: single-site
//! lowering operators, their unitary conjugates, graph-state stabilizer jumps,
//! qudit ladders and a single global ladder.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::operator::{
    jordan_ladder, pauli_x, pauli_z, sigma_minus, CompositeSpace, Operator, QuasiLocalOperator, StateVector,
};

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n_vertices {
                    return Err(Error::SiteOutOfRange {
                        site: v,
                        n_sites: n_vertices,
                    });
                }
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidArgument(format!("duplicate edge {a} {b}")));
            }
        }
        Ok(Self { n_vertices, edges: set })
    }

    /// Linear cluster `0 - 1 - ... - n-1`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        Self::new(n, &edges)
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument("a ring needs at least three vertices".into()));
        }
        let edges: Vec<_> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Sorted neighborhood `N_k`.
    pub fn neighbors(&self, k: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == k {
                    Some(b)
                } else if b == k {
                    Some(a)
                } else {
                    None
                }
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn space(&self) -> CompositeSpace {
        CompositeSpace::qubits(self.n_vertices).expect("nonzero vertex count")
    }

    fn check_vertex(&self, k: usize) -> Result<()> {
        if k >= self.n_vertices {
            return Err(Error::SiteOutOfRange {
                site: k,
                n_sites: self.n_vertices,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n_vertices)?;
        for (a, b) in &self.edges {
            writeln!(f, "edge {a} {b}")?;
        }
        Ok(())
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    /// `n <vertices>` followed by `edge a b` lines; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok.as_slice() {
                ["n", v] if n.is_none() => {
                    n = Some(v.parse::<usize>().map_err(|_| parse_err("bad vertex count"))?);
                }
                ["n", _] => return Err(parse_err("vertex count given twice")),
                ["edge", a, b] if n.is_some() => {
                    let a = a.parse::<usize>().map_err(|_| parse_err("bad vertex"))?;
                    let b = b.parse::<usize>().map_err(|_| parse_err("bad vertex"))?;
                    edges.push((a, b));
                }
                ["edge", ..] if n.is_none() => return Err(parse_err("edge before vertex count")),
                _ => return Err(parse_err("expected `n <vertices>` or `edge a b`")),
            }
        }
        let n = n.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing vertex count".into(),
        })?;
        Self::new(n, &edges)
    }
}

/// Label `i_0 ... i_{n-1}` of a graph basis state, site 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphBasisLabel(pub Vec<bool>);

impl GraphBasisLabel {
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Big-endian bits of `index`.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self((0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn flipped(&self, k: usize) -> Self {
        let mut bits = self.0.clone();
        bits[k] = !bits[k];
        Self(bits)
    }
}

/// `d_k = σ₋` on every site of an `n`-qubit register.
pub fn sigma_minus_jumps(n: usize) -> Result<Vec<QuasiLocalOperator>> {
    let space = CompositeSpace::qubits(n)?;
    (0..n)
        .map(|k| QuasiLocalOperator::on_site(&space, k, sigma_minus()))
        .collect()
}

/// `{U c U†}` for each base jump.
pub fn conjugated_jumps(u: &Operator, base: &[Operator], tol: f64) -> Result<Vec<Operator>> {
    if !u.is_unitary(tol) {
        return Err(Error::NotUnitary(u.unitarity_deviation()));
    }
    base.iter().map(|c| c.conjugate_by(u)).collect()
}

/// Stabilizer generators `U_k = X_k prod_{b in N_k} Z_b`.
pub fn graph_stabilizers(g: &GraphSpec) -> Result<Vec<QuasiLocalOperator>> {
    (0..g.n_vertices).map(|k| stabilizer(g, k)).collect()
}

fn stabilizer(g: &GraphSpec, k: usize) -> Result<QuasiLocalOperator> {
    g.check_vertex(k)?;
    let mut sites = g.neighbors(k);
    sites.push(k);
    sites.sort_unstable();
    let local = sites.iter().fold(linalg::identity(1), |acc, &s| {
        let f = if s == k { pauli_x() } else { pauli_z() };
        linalg::kron(&acc, &f)
    });
    QuasiLocalOperator::new(&g.space(), sites, local)
}

/// `c_k = ½(1 + U_k) Z_k`, supported on `{k} ∪ N_k`.
pub fn graph_state_jumps(g: &GraphSpec) -> Result<Vec<QuasiLocalOperator>> {
    let space = g.space();
    (0..g.n_vertices)
        .map(|k| {
            let u = stabilizer(g, k)?;
            let sites = u.sites().to_vec();
            let pos = sites.iter().position(|&s| s == k).expect("vertex in its own support");
            let dim = 1usize << sites.len();
            let zk = sites.iter().enumerate().fold(linalg::identity(1), |acc, (i, _)| {
                let f = if i == pos { pauli_z() } else { linalg::identity(2) };
                linalg::kron(&acc, &f)
            });
            let proj = (linalg::identity(dim) + u.local()).mapv(|z| z * 0.5);
            QuasiLocalOperator::new(&space, sites, proj.dot(&zk))
        })
        .collect()
}

/// Graph state with real positive `|0...0⟩` amplitude: `(-1)^{#edges inside x} / 2^{n/2}`.
pub fn graph_state(g: &GraphSpec) -> Result<StateVector> {
    graph_basis_state(g, &GraphBasisLabel::zeros(g.n_vertices))
}

/// `|Ψ_i⟩ = Z^{i} |Ψ_0⟩`.
pub fn graph_basis_state(g: &GraphSpec, label: &GraphBasisLabel) -> Result<StateVector> {
    let n = g.n_vertices;
    if label.0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: label.0.len(),
        });
    }
    let space = g.space();
    let dim = space.total_dim();
    let norm = (dim as f64).sqrt().recip();
    let bit = |x: usize, k: usize| (x >> (n - 1 - k)) & 1;
    let amps = CVector::from_shape_fn(dim, |x| {
        let mut parity = g.edges().filter(|&(a, b)| bit(x, a) & bit(x, b) == 1).count();
        parity += (0..n).filter(|&k| label.0[k] && bit(x, k) == 1).count();
        C64::new(if parity % 2 == 0 { norm } else { -norm }, 0.0)
    });
    StateVector::new(&space, amps, 1e-12)
}

/// Unitary whose column `i` is the graph basis state with big-endian label `i`.
pub fn graph_basis_unitary(g: &GraphSpec) -> Result<Operator> {
    let space = g.space();
    let dim = space.total_dim();
    let mut u = CMatrix::zeros((dim, dim));
    for i in 0..dim {
        let psi = graph_basis_state(g, &GraphBasisLabel::from_index(g.n_vertices, i))?;
        u.column_mut(i).assign(psi.amplitudes());
    }
    Operator::new(space, u)
}

/// Jumps `V c_k V†` for the stabilizer state `V|G⟩`.
pub fn stabilizer_state_jumps(g: &GraphSpec, v: &Operator, tol: f64) -> Result<Vec<Operator>> {
    if v.space() != &g.space() {
        return Err(Error::InvalidSpace(
            "local unitary does not act on the graph register".into(),
        ));
    }
    let base: Vec<Operator> = graph_state_jumps(g)?.iter().map(|c| c.embed()).collect();
    conjugated_jumps(v, &base, tol)
}

/// `J_d = sum_j |j-1⟩⟨j|` on each of `n` sites.
pub fn qudit_ladder_jumps(n: usize, d: usize) -> Result<Vec<QuasiLocalOperator>> {
    let space = CompositeSpace::uniform(n, d)?;
    (0..n)
        .map(|k| QuasiLocalOperator::on_site(&space, k, jordan_ladder(d)))
        .collect()
}

/// `C = sum_i |φ_i⟩⟨φ_{i+1}|` over an ordered orthonormal basis whose first
/// element is the target state.
pub fn global_ladder_jump(basis: &[StateVector], tol: f64) -> Result<Operator> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
    let space = first.space().clone();
    let dim = space.total_dim();
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.len(),
        });
    }
    let mut m = CMatrix::zeros((dim, dim));
    for (i, v) in basis.iter().enumerate() {
        if v.space() != &space {
            return Err(Error::InvalidSpace(format!(
                "basis element {i} lives on a different space"
            )));
        }
        m.column_mut(i).assign(v.amplitudes());
    }
    let gram = linalg::dagger(&m).dot(&m);
    let dev = linalg::max_abs(&(gram - linalg::identity(dim)));
    if dev > tol {
        return Err(Error::NotOrthonormal(dev));
    }
    let mut c = CMatrix::zeros((dim, dim));
    for i in 0..dim - 1 {
        c = c + linalg::outer(basis[i].amplitudes(), basis[i + 1].amplitudes());
    }
    Operator::new(space, c)
}

/// Computational basis in index order.
pub fn computational_basis(space: &CompositeSpace) -> Vec<StateVector> {
    (0..space.total_dim())
        .map(|i| StateVector::basis(space, i).expect("index in range"))
        .collect()
}

/// Graph basis ordered by binary label.
pub fn graph_basis(g: &GraphSpec) -> Result<Vec<StateVector>> {
    (0..1usize << g.n_vertices)
        .map(|i| graph_basis_state(g, &GraphBasisLabel::from_index(g.n_vertices, i)))
        .collect()
}
