use super::assembly::{Problem, TransientTerm};
use super::bc::BoundaryConditions;
use super::dofs::DofMap;
use super::newton::{newton_solve, NewtonOptions, NewtonReport};
use super::state::NodalState;
use crate::error::{Error, Result};
use crate::material::Model;
use crate::mesh::Mesh;

/// Statistics of one (possibly subdivided) time step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub substeps: usize,
    pub halvings: u32,
    pub max_iterations: usize,
    pub clamp_events: usize,
}

/// Backward Euler time integrator with lumped capacities.
pub struct TransientSolver<'a> {
    pub mesh: &'a Mesh,
    pub model: &'a Model,
    pub bcs: &'a BoundaryConditions,
    pub dofs: DofMap,
    pub newton: NewtonOptions,
    pub max_halvings: u32,
}

impl<'a> TransientSolver<'a> {
    pub fn new(mesh: &'a Mesh, model: &'a Model, bcs: &'a BoundaryConditions) -> Result<Self> {
        let dofs = DofMap::new(mesh, &bcs.constraints(mesh, model.interface.perfect))?;
        Ok(Self {
            mesh,
            model,
            bcs,
            dofs,
            newton: NewtonOptions::default(),
            max_halvings: 5,
        })
    }

    fn single(&self, state: &NodalState, dt: f64) -> Result<(NodalState, NewtonReport)> {
        let t1 = state.time + dt;
        let mut next = state.clone();
        next.time = t1;
        self.bcs.apply(self.mesh, &mut next, t1);
        let mut problem = Problem::new(self.mesh, self.model, &self.dofs).with_loads(self.bcs, t1);
        problem.transient = Some(TransientTerm { dt, previous: state });
        let report = newton_solve(&problem, &mut next, &self.newton)?;
        Ok((next, report))
    }

    fn advance(&self, state: &NodalState, dt: f64, depth: u32, rep: &mut StepReport) -> Result<NodalState> {
        match self.single(state, dt) {
            Ok((next, r)) => {
                rep.substeps += 1;
                rep.max_iterations = rep.max_iterations.max(r.iterations);
                rep.clamp_events += r.clamp_events;
                Ok(next)
            }
            Err(e) if e.is_numerical() && depth < self.max_halvings => {
                log::warn!("step t = {} s, dt = {dt} s failed ({e}); halving", state.time);
                rep.halvings = rep.halvings.max(depth + 1);
                let mid = self.advance(state, dt / 2.0, depth + 1, rep)?;
                self.advance(&mid, dt / 2.0, depth + 1, rep)
            }
            Err(e) if e.is_numerical() => Err(Error::StepFailed {
                time: state.time,
                halvings: depth,
                source: Box::new(e),
            }),
            Err(e) => Err(e),
        }
    }

    /// Advances `state` by `dt`, halving the step on Newton failure up to
    /// `max_halvings` times.
    pub fn step(&self, state: &NodalState, dt: f64) -> Result<(NodalState, StepReport)> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let mut rep = StepReport::default();
        let next = self.advance(state, dt, 0, &mut rep)?;
        Ok((next, rep))
    }
}

/// Steady solve with the given boundary conditions, starting from `initial`.
///
/// Boundary data is evaluated at `initial.time`. When plain Newton fails the
/// solve falls back to pseudo-time continuation: implicit steps with a
/// geometrically growing step until the steady iteration converges.
pub fn solve_steady(
    mesh: &Mesh,
    model: &Model,
    bcs: &BoundaryConditions,
    initial: &NodalState,
    opts: &NewtonOptions,
) -> Result<(NodalState, NewtonReport)> {
    let dofs = DofMap::new(mesh, &bcs.constraints(mesh, model.interface.perfect))?;
    let mut state = initial.clone();
    bcs.apply(mesh, &mut state, initial.time);
    let problem = Problem::new(mesh, model, &dofs).with_loads(bcs, initial.time);
    let first = {
        let mut s = state.clone();
        newton_solve(&problem, &mut s, opts).map(|r| (s, r))
    };
    let err = match first {
        Ok(done) => return Ok(done),
        Err(e) if e.is_numerical() => e,
        Err(e) => return Err(e),
    };
    log::info!("steady Newton failed ({err}); continuing in pseudo-time");
    let mut dt = PSEUDO_DT0;
    while dt < PSEUDO_DT_MAX {
        let mut next = state.clone();
        let mut stepped = Problem::new(mesh, model, &dofs).with_loads(bcs, initial.time);
        stepped.transient = Some(TransientTerm { dt, previous: &state });
        match newton_solve(&stepped, &mut next, opts) {
            Ok(_) => {
                state = next;
                dt *= 4.0;
            }
            Err(e) if e.is_numerical() => {
                dt *= 0.25;
                if dt < PSEUDO_DT_MIN {
                    return Err(err);
                }
            }
            Err(e) => return Err(e),
        }
        let mut s = state.clone();
        if let Ok(r) = newton_solve(&problem, &mut s, &NewtonOptions { max_iter: 6, ..*opts }) {
            return Ok((s, r));
        }
    }
    let report = newton_solve(&problem, &mut state, opts)?;
    Ok((state, report))
}

const PSEUDO_DT0: f64 = 600.0;
const PSEUDO_DT_MIN: f64 = 1e-2;
const PSEUDO_DT_MAX: f64 = 1e13;
