//! Manufactured-solution and self-convergence studies shared by the property
//! tests and the acceptance harness.

use masonry_ham::fem::{solve_steady, BoundaryConditions, Dirichlet, Field, NewtonOptions, NodalState, TransientSolver};
use masonry_ham::material::{local_coefficients, HygroState, MaterialParams, Model};
use masonry_ham::mesh::{BoundaryMarker, Mesh};
use std::f64::consts::PI;
use std::sync::Arc;

fn bump(x: [f64; 2]) -> (f64, [f64; 2]) {
    let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    let (cx, cy) = ((PI * x[0]).cos(), (PI * x[1]).cos());
    (sx * sy, [PI * cx * sy, PI * sx * cy])
}

fn exact(x: [f64; 2]) -> [f64; 2] {
    let (b, _) = bump(x);
    [20.0 + 5.0 * b, 0.5 + 0.2 * b]
}

fn flux(model: &Model, x: [f64; 2]) -> [[f64; 2]; 2] {
    let (b, g) = bump(x);
    let s = HygroState::new(20.0 + 5.0 * b, 0.5 + 0.2 * b);
    let k = local_coefficients(&model.brick, s, model).unwrap().k;
    let grad = [[5.0 * g[0], 5.0 * g[1]], [0.2 * g[0], 0.2 * g[1]]];
    let mut f = [[0.0; 2]; 2];
    for i in 0..2 {
        for d in 0..2 {
            f[i][d] = k[i][0] * grad[0][d] + k[i][1] * grad[1][d];
        }
    }
    f
}

/// Lumped L² nodal errors `[θ, φ]` of the steady coupled solve on an `n × n`
/// unit square with the manufactured source.
pub fn steady_error(n: usize) -> [f64; 2] {
    let mesh = super::unit_square(n);
    let model = Model::homogeneous(MaterialParams::brick());
    let m2 = model.clone();
    let source = Arc::new(move |x: [f64; 2]| {
        let h = 1e-5;
        let mut s = [0.0; 2];
        for d in 0..2 {
            let (mut xp, mut xm) = (x, x);
            xp[d] += h;
            xm[d] -= h;
            let (fp, fm) = (flux(&m2, xp), flux(&m2, xm));
            for i in 0..2 {
                s[i] -= (fp[i][d] - fm[i][d]) / (2.0 * h);
            }
        }
        s
    });
    let mut bcs = super::all_faces(|x| exact(x)[0], |x| exact(x)[1]);
    bcs.source = Some(source);
    let opts = NewtonOptions {
        tol: 1e-12,
        ..NewtonOptions::default()
    };
    let (s, _) = solve_steady(&mesh, &model, &bcs, &NodalState::uniform(mesh.num_nodes(), 20.0, 0.5), &opts).unwrap();
    lumped_error(&mesh, &s, |x| exact(x))
}

fn lumped_error(mesh: &Mesh, s: &NodalState, f: impl Fn([f64; 2]) -> [f64; 2]) -> [f64; 2] {
    let mut mass = vec![0.0; mesh.num_nodes()];
    for t in 0..mesh.triangles.len() {
        let a = mesh.triangle_area(t);
        for &n in &mesh.triangles[t].nodes {
            mass[n] += a / 3.0;
        }
    }
    let mut e = [0.0; 2];
    for (n, x) in mesh.nodes.iter().enumerate() {
        let u = f(*x);
        e[0] += mass[n] * (s.theta[n] - u[0]).powi(2);
        e[1] += mass[n] * (s.phi[n] - u[1]).powi(2);
    }
    [e[0].sqrt(), e[1].sqrt()]
}

/// Observed orders `log2(e_k / e_{k+1})` for a halving sequence of errors.
pub fn orders(errors: &[[f64; 2]]) -> Vec<[f64; 2]> {
    errors
        .windows(2)
        .map(|w| [(w[0][0] / w[1][0]).log2(), (w[0][1] / w[1][1]).log2()])
        .collect()
}

pub fn spatial_orders() -> Vec<[f64; 2]> {
    let errors: Vec<[f64; 2]> = [8, 16, 32, 64].iter().map(|&n| steady_error(n)).collect();
    orders(&errors)
}

const HORIZON: f64 = 1e4;

fn ramp(t: f64) -> f64 {
    0.5 * (1.0 - (PI * t / HORIZON).cos())
}

/// Final state of a two-layer slab driven by smooth boundary ramps, using
/// `steps` equal backward Euler steps.
pub fn ramp_run(steps: usize) -> NodalState {
    let mesh = super::bilayer(0.05, 0.05, 0.02, 0.01);
    let model = Model::default();
    let bcs = BoundaryConditions::default()
        .with_dirichlet(Dirichlet {
            marker: BoundaryMarker::Left,
            field: Field::Theta,
            value: Arc::new(|_, t| 20.0 + 10.0 * ramp(t)),
        })
        .with_dirichlet(Dirichlet {
            marker: BoundaryMarker::Left,
            field: Field::Phi,
            value: Arc::new(|_, t| 0.5 + 0.3 * ramp(t)),
        })
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Theta, 20.0))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Phi, 0.5));
    let mut solver = TransientSolver::new(&mesh, &model, &bcs).unwrap();
    solver.newton.tol = 1e-12;
    let dt = HORIZON / steps as f64;
    let mut s = NodalState::uniform(mesh.num_nodes(), 20.0, 0.5);
    for _ in 0..steps {
        s = solver.step(&s, dt).unwrap().0;
    }
    s
}

pub fn temporal_orders() -> Vec<[f64; 2]> {
    let reference = ramp_run(4096);
    let errors: Vec<[f64; 2]> = [16, 32, 64, 128].iter().map(|&n| ramp_run(n).max_abs_diff(&reference)).collect();
    orders(&errors)
}
