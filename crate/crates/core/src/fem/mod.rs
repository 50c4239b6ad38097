//! Finite-element core: linear triangles for the coupled heat and moisture
//! balance, zero-thickness interface elements, Newton–Raphson with a
//! consistent tangent, backward Euler in time.

mod assembly;
mod bc;
mod dofs;
pub mod element;
mod linear;
mod newton;
mod state;
mod transient;

pub use assembly::{Problem, RobinLoad, System, TransientTerm};
pub(crate) use assembly::combine;
pub use bc::{BoundaryConditions, Dirichlet, Robin, ScalarFn, SourceFn};
pub use dofs::{Constraints, DofMap};
pub use element::{bulk_element, centroid_coefficients, gather, gradient_operator, interface_element, ElementMatrix, InterfaceMatrix};
pub use linear::{solve_sparse, SparseLu};
pub use newton::{newton_solve, NewtonOptions, NewtonReport};
pub use state::{Background, Field, NodalState};
pub use transient::{solve_steady, StepReport, TransientSolver};
