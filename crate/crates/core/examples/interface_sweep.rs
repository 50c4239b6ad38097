//! Sensitivity of the macroscopic conductivities to the interface
//! coefficients, the humidity gradient and the initial humidity.
//!
//! `cargo run --release --example interface_sweep [-- sweep.csv]`
//!
//! Plot with `python3 scripts/plot_sweep.py sweep.csv`.

use std::fs::File;

use masonry_ham::homogenization::{fluctuation_options, sweep, write_sweep_csv, BcKind, MacroLoadCase};
use masonry_ham::material::InterfaceParams;
use masonry_ham::mesh::{generate_puc, PucSpec};
use masonry_ham::Model;

fn main() -> masonry_ham::Result<()> {
    let mesh = generate_puc(&PucSpec::default())?;
    let mut cases = Vec::new();
    for phi0 in [0.3, 0.5, 0.8] {
        for g in [0.0, 0.25, 0.5, 1.0] {
            cases.push(MacroLoadCase::centered(&mesh, 20.0, phi0, BcKind::Dirichlet).with_gradients([10.0, 0.0], [g, 0.0]));
        }
    }
    let interfaces: Vec<InterfaceParams> = [(1e4, 5.25e-9), (1e5, 5.25e-9), (1e6, 5.25e-9), (1e5, 5.25e-10), (1e5, 5.25e-8)]
        .iter()
        .map(|&(a, b)| InterfaceParams::imperfect(a, b))
        .collect();
    let rows = sweep(&mesh, &cases, &interfaces, &Model::default(), &fluctuation_options());

    println!("phi0  grad_phi   alpha     beta       K_tt11      K_pp11");
    for r in &rows {
        match &r.result {
            Ok(k) => println!(
                "{:.1}   {:5.2}   {:7.0e}  {:8.2e}   {:.5}   {:.5e}",
                r.load.phi0,
                r.load.grad_phi[0],
                r.interface.alpha_int,
                r.interface.beta_int,
                k.theta_theta()[0][0],
                k.phi_phi()[0][0]
            ),
            Err(e) => println!("case {} failed: {e}", r.case),
        }
    }
    if let Some(path) = std::env::args().nth(1) {
        write_sweep_csv(&rows, File::create(&path)?)?;
        println!("written to {path}");
    }
    Ok(())
}
