use super::assembly::Problem;
use super::linear::SparseLu;
use super::state::NodalState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Tolerance on the row-scaled residual relative to `1 + ‖u‖∞` per field.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional bound on a single update `[|Δθ|, |Δφ|]` (uniform damping).
    pub max_step: Option<[f64; 2]>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 25,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    /// Number of linear solves performed.
    pub iterations: usize,
    /// Scaled residual before each iteration and at exit.
    pub history: Vec<f64>,
    /// Element evaluations that clamped `φ`, summed over iterations.
    pub clamp_events: usize,
}

/// Newton–Raphson with the consistent tangent.
///
/// `state` holds the solver field values on entry (with Dirichlet data already
/// written) and the converged values on exit. Convergence is declared when for
/// both fields `max_i |R_i| / |K_ii| ≤ tol·(1 + ‖u‖∞)`. An update whose
/// trial state leaves the admissible domain is halved, at most
/// `MAX_BACKTRACKS` times.
pub fn newton_solve(problem: &Problem, state: &mut NodalState, opts: &NewtonOptions) -> Result<NewtonReport> {
    let dofs = problem.dofs;
    let mut vars = dofs.vars_from(state);
    dofs.write_nodes(&vars, state);
    let mut report = NewtonReport::default();
    let mut sys = problem.assemble(state, false)?;
    for it in 0..=opts.max_iter {
        report.clamp_events += sys.clamped;
        if sys.clamped > 0 {
            log::warn!("{} element evaluations clamped relative humidity", sys.clamped);
        }
        let norms = [norm(&state.theta), norm(&state.phi)];
        let mut scaled = [0.0f64; 2];
        for (e, r) in sys.residual.iter().enumerate() {
            let f = dofs.equation_field(e);
            let d = sys.diagonal[e].abs().max(f64::MIN_POSITIVE);
            scaled[f] = scaled[f].max(r.abs() / d);
        }
        let measure = (scaled[0] / (1.0 + norms[0])).max(scaled[1] / (1.0 + norms[1]));
        if !measure.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it,
                history: report.history,
            });
        }
        report.history.push(measure);
        log::debug!("newton iteration {it}: scaled residual {measure:e}");
        if measure <= opts.tol {
            report.iterations = it;
            return Ok(report);
        }
        if it == opts.max_iter {
            break;
        }
        let rhs: Vec<f64> = sys.residual.iter().map(|r| -r).collect();
        let lu = SparseLu::new(dofs.num_equations(), &sys.triplets)?;
        let delta = lu.solve(&rhs)?;
        let mut scale = 1.0;
        if let Some(cap) = opts.max_step {
            let mut big = [0.0f64; 2];
            for (e, d) in delta.iter().enumerate() {
                let f = dofs.equation_field(e);
                big[f] = big[f].max(d.abs());
            }
            for f in 0..2 {
                if big[f] > cap[f] {
                    scale = f64::min(scale, cap[f] / big[f]);
                }
            }
        }
        // step halving while the trial state leaves the admissible domain
        let mut backtracks = 0;
        loop {
            let mut trial = vars.clone();
            dofs.add_increment(&mut trial, &delta, scale);
            let mut trial_state = state.clone();
            dofs.write_nodes(&trial, &mut trial_state);
            match problem.assemble(&trial_state, false) {
                Ok(next) => {
                    vars = trial;
                    *state = trial_state;
                    sys = next;
                    break;
                }
                Err(e) if e.is_numerical() && backtracks < MAX_BACKTRACKS => {
                    log::debug!("newton step rejected ({e}), halving");
                    backtracks += 1;
                    scale *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        history: report.history,
    })
}

const MAX_BACKTRACKS: usize = 12;

fn norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
