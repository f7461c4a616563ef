//! Turns a validated configuration into a process and its designed target.

use darkstate::constructors::{
    conjugated_jumps, graph_state, graph_state_jumps, qudit_ladder_jumps, sigma_minus_jumps, GraphSpec,
};
use darkstate::liouvillian::LindbladProcess;
use darkstate::models::{
    aklt_ground_space, aklt_process, bec_process, eta_process, AkltVariant, Boundary, SpinChainSpec,
};
use darkstate::operator::{embed, pauli_z, CompositeSpace, Operator, QuasiLocalOperator, StateVector};
use darkstate::{random, Error, Result};

use crate::config::{BoundaryKind, Constructor, Rates, Validated};

pub struct Built {
    pub process: LindbladProcess,
    /// The state the process is designed to prepare, when there is exactly one.
    pub target: Option<StateVector>,
}

enum Jumps {
    Local(Vec<QuasiLocalOperator>),
    Global(Vec<Operator>),
}

struct Base {
    space: CompositeSpace,
    hamiltonian: Option<Operator>,
    jumps: Jumps,
    target: Option<StateVector>,
}

impl Jumps {
    fn len(&self) -> usize {
        match self {
            Jumps::Local(v) => v.len(),
            Jumps::Global(v) => v.len(),
        }
    }
}

fn boundary(b: BoundaryKind) -> Boundary {
    match b {
        BoundaryKind::Periodic => Boundary::Periodic,
        BoundaryKind::Open => Boundary::Open,
    }
}

fn unit_rate(p: LindbladProcess, target: Option<StateVector>) -> Base {
    Base {
        space: p.space().clone(),
        hamiltonian: p.hamiltonian().cloned(),
        jumps: Jumps::Global(p.jump_operators()),
        target,
    }
}

fn base(v: &Validated) -> Result<Base> {
    let sys = &v.config.system;
    let pr = &v.config.process;
    let n = match &v.graph {
        Some(g) => g.n_vertices(),
        None => sys
            .sites
            .ok_or_else(|| Error::InvalidArgument("system.sites is required".into()))?,
    };
    let particles = || {
        sys.particles
            .ok_or_else(|| Error::InvalidArgument("system.particles is required".into()))
    };
    let j = pr.hopping.unwrap_or(1.0);
    let u = pr.interaction.unwrap_or(1.0);
    Ok(match pr.constructor {
        Constructor::SigmaMinus => {
            let space = CompositeSpace::qubits(n)?;
            Base {
                target: Some(StateVector::basis(&space, 0)?),
                space,
                hamiltonian: None,
                jumps: Jumps::Local(sigma_minus_jumps(n)?),
            }
        }
        Constructor::SigmaZ => {
            let space = CompositeSpace::qubits(n)?;
            let jumps = (0..n)
                .map(|k| QuasiLocalOperator::on_site(&space, k, pauli_z()))
                .collect::<Result<_>>()?;
            Base {
                space,
                hamiltonian: None,
                jumps: Jumps::Local(jumps),
                target: None,
            }
        }
        Constructor::ConjugatedSigmaMinus => {
            let space = CompositeSpace::qubits(n)?;
            let mut rng = random::rng(v.config.task.seed);
            let unitary = random::gate_sequence_unitary(n, pr.depth.unwrap_or(3), &mut rng)?;
            let lowering: Vec<Operator> = sigma_minus_jumps(n)?.iter().map(embed).collect();
            let jumps = conjugated_jumps(&unitary, &lowering, 1e-10)?;
            Base {
                target: Some(StateVector::normalized(&space, unitary.matrix().column(0).to_owned())?),
                space,
                hamiltonian: None,
                jumps: Jumps::Global(jumps),
            }
        }
        Constructor::Graph => {
            let g = match &v.graph {
                Some(g) => g.clone(),
                None => GraphSpec::path(n)?,
            };
            Base {
                space: g.space(),
                hamiltonian: None,
                jumps: Jumps::Local(graph_state_jumps(&g)?),
                target: Some(graph_state(&g)?),
            }
        }
        Constructor::QuditLadder => {
            let d = sys.local_dim.unwrap_or(2);
            let space = CompositeSpace::uniform(n, d)?;
            Base {
                target: Some(StateVector::basis(&space, 0)?),
                space,
                hamiltonian: None,
                jumps: Jumps::Local(qudit_ladder_jumps(n, d)?),
            }
        }
        Constructor::AkltLadder | Constructor::AkltTwirl => {
            let spec = SpinChainSpec::new(n, boundary(sys.boundary))?;
            let variant = match pr.constructor {
                Constructor::AkltTwirl => AkltVariant::Twirl {
                    n_twirl: pr.n_twirl.unwrap_or(9),
                },
                _ => AkltVariant::Ladder,
            };
            let (_, ground) = aklt_ground_space(&spec)?;
            let target = if ground.len() == 1 {
                ground.into_iter().next()
            } else {
                None
            };
            unit_rate(aklt_process(&spec, variant, 1.0)?, target)
        }
        Constructor::Bec => {
            let model = bec_process(n, particles()?, boundary(sys.boundary), j, u, 1.0)?;
            unit_rate(model.process, Some(model.target))
        }
        Constructor::Eta => {
            if sys.boundary != BoundaryKind::Periodic {
                return Err(Error::InvalidArgument(
                    "the eta process is defined on periodic chains".into(),
                ));
            }
            let model = eta_process(n, particles()?, j, u, 1.0)?;
            unit_rate(model.process, Some(model.target))
        }
    })
}

pub fn jump_count(v: &Validated) -> Result<usize> {
    Ok(base(v)?.jumps.len())
}

pub fn build(v: &Validated) -> Result<Built> {
    let b = base(v)?;
    let count = b.jumps.len();
    let rates = match &v.config.process.rates {
        Rates::Uniform(g) => vec![*g; count],
        Rates::List(list) if list.len() == count => list.clone(),
        Rates::List(list) => {
            return Err(Error::DimensionMismatch {
                expected: count,
                found: list.len(),
            })
        }
    };
    let process = match b.jumps {
        Jumps::Local(ops) => {
            let pairs: Vec<_> = ops.into_iter().zip(rates).collect();
            let p = LindbladProcess::from_local(&b.space, None, &pairs)?;
            match b.hamiltonian {
                Some(h) => p.with_hamiltonian(h, 1e-10)?,
                None => p,
            }
        }
        Jumps::Global(ops) => {
            LindbladProcess::new(&b.space, b.hamiltonian, ops.into_iter().zip(rates).collect(), 1e-10)?
        }
    };
    Ok(Built {
        process,
        target: b.target,
    })
}
