#![allow(dead_code)]

use masonry_ham::fem::{BoundaryConditions, Field, NodalState};
use masonry_ham::material::{Coupling, HygroState, Linearization, MaterialParams, Model};
use masonry_ham::mesh::{BoundaryMarker, Layout, Mesh, Rect};
use std::sync::Arc;

/// Two-layer bar along x: brick on `[0, l1]`, mortar on `[l1, l1 + l2]`.
pub fn bilayer(l1: f64, l2: f64, height: f64, h: f64) -> Mesh {
    Layout {
        width: l1 + l2,
        height,
        bricks: vec![Rect::new(0.0, 0.0, l1, height)],
    }
    .mesh(h, false)
    .unwrap()
}

pub fn unit_square(n: usize) -> Mesh {
    Layout {
        width: 1.0,
        height: 1.0,
        bricks: vec![Rect::new(0.0, 0.0, 1.0, 1.0)],
    }
    .mesh(1.0 / n as f64, false)
    .unwrap()
}

pub fn frozen(model: Model, theta: f64, phi: f64) -> Model {
    model.with_linearization(Linearization::Frozen(HygroState::new(theta, phi)))
}

pub fn decoupled() -> Model {
    Model::default().with_coupling(Coupling::Decoupled)
}

pub fn homogeneous(p: MaterialParams) -> Model {
    Model::homogeneous(p)
}

/// Dirichlet on left/right faces for both fields.
pub fn left_right(theta: (f64, f64), phi: (f64, f64)) -> BoundaryConditions {
    BoundaryConditions::default()
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Left, Field::Theta, theta.0))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Theta, theta.1))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Left, Field::Phi, phi.0))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Phi, phi.1))
}

/// Dirichlet data `g(x)` on the whole boundary for both fields.
pub fn all_faces(theta: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static, phi: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> BoundaryConditions {
    BoundaryConditions::default()
        .everywhere(Field::Theta, Arc::new(move |x, _| theta(x)))
        .everywhere(Field::Phi, Arc::new(move |x, _| phi(x)))
}

pub fn nodes_on(mesh: &Mesh, marker: BoundaryMarker) -> Vec<usize> {
    let mut v: Vec<usize> = mesh
        .boundary
        .iter()
        .filter(|e| e.marker == marker)
        .flat_map(|e| e.nodes)
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn uniform(mesh: &Mesh, theta: f64, phi: f64) -> NodalState {
    NodalState::uniform(mesh.num_nodes(), theta, phi)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub mod convergence;
pub mod identification;
