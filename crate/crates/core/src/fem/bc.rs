use std::collections::BTreeSet;
use std::sync::Arc;

use super::dofs::Constraints;
use super::state::{Field, NodalState};
use crate::mesh::{BoundaryMarker, Mesh};

/// Boundary value `g(x, t)`.
pub type ScalarFn = Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;
/// Body source `s(x) = [heat W·m⁻³, moisture kg·m⁻³·s⁻¹]`.
pub type SourceFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;

#[derive(Clone)]
pub struct Dirichlet {
    pub marker: BoundaryMarker,
    pub field: Field,
    pub value: ScalarFn,
}

/// Surface film condition: outward flux `h·(u − u_ambient(t))` in the
/// primary variable.
#[derive(Clone)]
pub struct Robin {
    pub marker: BoundaryMarker,
    pub field: Field,
    pub coefficient: f64,
    pub ambient: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

#[derive(Clone, Default)]
pub struct BoundaryConditions {
    pub dirichlet: Vec<Dirichlet>,
    pub robin: Vec<Robin>,
    pub source: Option<SourceFn>,
}

impl BoundaryConditions {
    pub fn constant(marker: BoundaryMarker, field: Field, value: f64) -> Dirichlet {
        Dirichlet {
            marker,
            field,
            value: Arc::new(move |_, _| value),
        }
    }

    pub fn with_dirichlet(mut self, d: Dirichlet) -> Self {
        self.dirichlet.push(d);
        self
    }

    /// Prescribes `g(x, t)` on every boundary face for one field.
    pub fn everywhere(mut self, field: Field, g: ScalarFn) -> Self {
        for marker in BoundaryMarker::ALL {
            self.dirichlet.push(Dirichlet {
                marker,
                field,
                value: g.clone(),
            });
        }
        self
    }

    /// Nodes carrying Dirichlet data, per field.
    pub fn dirichlet_nodes(&self, mesh: &Mesh) -> [Vec<usize>; 2] {
        let mut out = [BTreeSet::new(), BTreeSet::new()];
        for d in &self.dirichlet {
            for e in mesh.boundary.iter().filter(|e| e.marker == d.marker) {
                out[d.field.index()].extend(e.nodes);
            }
        }
        out.map(|s| s.into_iter().collect())
    }

    pub fn constraints(&self, mesh: &Mesh, perfect_contact: bool) -> Constraints {
        Constraints {
            perfect_contact,
            periodic: false,
            pins: vec![],
            dirichlet: self.dirichlet_nodes(mesh),
        }
    }

    /// Writes the Dirichlet values at time `t` into `state`; later entries
    /// win at shared corner nodes.
    pub fn apply(&self, mesh: &Mesh, state: &mut NodalState, t: f64) {
        for d in &self.dirichlet {
            let values = state.field_mut(d.field);
            for e in mesh.boundary.iter().filter(|e| e.marker == d.marker) {
                for n in e.nodes {
                    values[n] = (d.value)(mesh.nodes[n], t);
                }
            }
        }
    }
}
