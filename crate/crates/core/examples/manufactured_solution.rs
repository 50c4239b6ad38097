//! Spatial convergence of the coupled steady solver on a manufactured
//! solution with frozen coefficients.
//!
//! `cargo run --release --example manufactured_solution`

use std::f64::consts::PI;
use std::sync::Arc;

use masonry_ham::fem::{solve_steady, BoundaryConditions, Field, NewtonOptions, NodalState};
use masonry_ham::material::{local_coefficients, HygroState, Linearization};
use masonry_ham::mesh::{Layout, Rect};
use masonry_ham::{MaterialParams, Model};

const AMP: [f64; 2] = [5.0, 0.2];
const BASE: [f64; 2] = [20.0, 0.5];

fn exact(x: [f64; 2]) -> [f64; 2] {
    let b = (PI * x[0]).sin() * (PI * x[1]).sin();
    [BASE[0] + AMP[0] * b, BASE[1] + AMP[1] * b]
}

fn error(n: usize, model: &Model, k: [[f64; 2]; 2]) -> masonry_ham::Result<[f64; 2]> {
    let mesh = Layout {
        width: 1.0,
        height: 1.0,
        bricks: vec![Rect::new(0.0, 0.0, 1.0, 1.0)],
    }
    .mesh(1.0 / n as f64, false)?;
    let mut bcs = BoundaryConditions::default()
        .everywhere(Field::Theta, Arc::new(|x, _| exact(x)[0]))
        .everywhere(Field::Phi, Arc::new(|x, _| exact(x)[1]));
    // −∇·(k∇u) for u = A sin(πx) sin(πy)
    bcs.source = Some(Arc::new(move |x: [f64; 2]| {
        let b = 2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin();
        [
            b * (k[0][0] * AMP[0] + k[0][1] * AMP[1]),
            b * (k[1][0] * AMP[0] + k[1][1] * AMP[1]),
        ]
    }));
    let init = NodalState::uniform(mesh.num_nodes(), BASE[0], BASE[1]);
    let (s, _) = solve_steady(&mesh, model, &bcs, &init, &NewtonOptions::default())?;
    let mut mass = vec![0.0; mesh.num_nodes()];
    for t in 0..mesh.triangles.len() {
        for &v in &mesh.triangles[t].nodes {
            mass[v] += mesh.triangle_area(t) / 3.0;
        }
    }
    let mut e = [0.0; 2];
    for (v, x) in mesh.nodes.iter().enumerate() {
        let u = exact(*x);
        e[0] += mass[v] * (s.theta[v] - u[0]).powi(2);
        e[1] += mass[v] * (s.phi[v] - u[1]).powi(2);
    }
    Ok([e[0].sqrt(), e[1].sqrt()])
}

fn main() -> masonry_ham::Result<()> {
    let reference = HygroState::new(BASE[0], BASE[1]);
    let model = Model::homogeneous(MaterialParams::brick()).with_linearization(Linearization::Frozen(reference));
    let k = local_coefficients(&model.brick, reference, &model)?.k;
    println!("   n    L2(theta)     L2(phi)      order");
    let mut last: Option<[f64; 2]> = None;
    for n in [4, 8, 16, 32, 64] {
        let e = error(n, &model, k)?;
        match last {
            Some(p) => println!("{n:4}  {:.4e}  {:.4e}   {:.3}/{:.3}", e[0], e[1], (p[0] / e[0]).log2(), (p[1] / e[1]).log2()),
            None => println!("{n:4}  {:.4e}  {:.4e}", e[0], e[1]),
        }
        last = Some(e);
    }
    Ok(())
}
