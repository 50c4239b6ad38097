//! Steady brick–mortar slab under the first experiment's temperatures:
//! finite-element heat flux and interface jump against the series-resistance
//! formula.
//!
//! `cargo run --release --example composite_slab`

use masonry_ham::fem::{solve_steady, BoundaryConditions, DofMap, Field, NewtonOptions, NodalState, Problem};
use masonry_ham::material::{Coupling, InterfaceParams};
use masonry_ham::mesh::{BoundaryMarker, Layout, Rect};
use masonry_ham::Model;

fn main() -> masonry_ham::Result<()> {
    let (lb, lm, height) = (0.05, 0.05, 0.02);
    let mesh = Layout {
        width: lb + lm,
        height,
        bricks: vec![Rect::new(0.0, 0.0, lb, height)],
    }
    .mesh(0.005, false)?;
    let (t_int, t_ext, phi) = (24.5, -9.5, 0.5);
    let bcs = BoundaryConditions::default()
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Left, Field::Theta, t_int))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Theta, t_ext))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Left, Field::Phi, phi))
        .with_dirichlet(BoundaryConditions::constant(BoundaryMarker::Right, Field::Phi, phi));

    println!("alpha_int     q_FE [W/m2]   q_series      rel.err   jump_FE [K]   q/alpha");
    for alpha in [1e2, 1e3, 1e4, 1e5] {
        let model = Model::default()
            .with_coupling(Coupling::Decoupled)
            .with_interface(InterfaceParams::imperfect(alpha, 5.25e-9));
        let init = NodalState::uniform(mesh.num_nodes(), 10.0, phi);
        let (s, _) = solve_steady(&mesh, &model, &bcs, &init, &NewtonOptions::default())?;
        let l_b = model.brick.thermal_conductivity(phi)?;
        let l_m = model.mortar.thermal_conductivity(phi)?;
        let q = (t_int - t_ext) / (lb / l_b + 1.0 / alpha + lm / l_m);

        let dofs = DofMap::new(&mesh, &bcs.constraints(&mesh, false))?;
        let r = Problem::new(&mesh, &model, &dofs).nodal_residual(&s)?;
        let left: f64 = mesh
            .boundary
            .iter()
            .filter(|e| e.marker == BoundaryMarker::Left)
            .flat_map(|e| e.nodes)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|n| r[n][0])
            .sum();
        let q_fe = left / height;
        let seg = &mesh.interfaces[0];
        let jump = s.theta[seg.nodes[0]] - s.theta[seg.nodes[2]];
        println!(
            "{alpha:9.0e}  {q_fe:12.6}  {q:12.6}  {:9.2e}  {jump:11.4e}  {:.4e}",
            ((q_fe - q) / q).abs(),
            q / alpha
        );
    }
    Ok(())
}
