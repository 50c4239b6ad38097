//! Macroscopic 4-block conductivity of the running-bond cell under
//! Dirichlet and periodic fluctuation conditions.
//!
//! `cargo run --release --example homogenize_puc`

use masonry_ham::homogenization::{homogenize, BcKind, MacroLoadCase};
use masonry_ham::mesh::{generate_puc, PucSpec};
use masonry_ham::Model;

fn print_block(name: &str, b: [[f64; 2]; 2]) {
    println!("  {name}: [[{:+.4e}, {:+.4e}], [{:+.4e}, {:+.4e}]]", b[0][0], b[0][1], b[1][0], b[1][1]);
}

fn main() -> masonry_ham::Result<()> {
    let mesh = generate_puc(&PucSpec::default())?;
    let model = Model::default();
    for bc in [BcKind::Dirichlet, BcKind::Periodic] {
        let lc = MacroLoadCase::centered(&mesh, 20.0, 0.5, bc).with_gradients([10.0, 0.0], [0.5, 0.0]);
        let r = homogenize(&mesh, &lc, &model)?;
        println!("{} (Newton iterations {}):", bc.name(), r.iterations);
        print_block("K_tt", r.theta_theta());
        print_block("K_tp", r.theta_phi());
        print_block("K_pt", r.phi_theta());
        print_block("K_pp", r.phi_phi());
        print_block("volume-averaged k_tt", r.local_block(0, 0));
        println!(
            "  mean flux [q, g] = [{:+.4e}, {:+.4e}, {:+.4e}, {:+.4e}], Hill-Mandel residual {:.1e}",
            r.mean_flux[0], r.mean_flux[1], r.mean_flux[2], r.mean_flux[3], r.hill_mandel
        );
    }
    Ok(())
}
