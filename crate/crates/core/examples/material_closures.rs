//! Künzel closures of brick and mortar across the hygroscopic range, and the
//! interface transfer laws.
//!
//! `cargo run --release --example material_closures`

use masonry_ham::material::{
    capillary_pressure, interface_fluxes, local_coefficients, saturation_pressure, HygroState, InterfaceParams,
    KELVIN_OFFSET,
};
use masonry_ham::{MaterialParams, Model, Phase};

fn main() -> masonry_ham::Result<()> {
    let model = Model::default();
    let c = model.constants;
    let theta = 20.0;
    let ps = saturation_pressure(theta)?;
    println!("p_sat({theta} °C) = {:.2} Pa, dp_sat/dθ = {:.3} Pa/K", ps.value, ps.derivative);
    println!("p_sat(-10 °C) = {:.2} Pa (ice branch)", saturation_pressure(-10.0)?.value);

    for phase in Phase::ALL {
        let p: &MaterialParams = model.phase(phase);
        println!("\n{} (b = {:.4})", phase.name(), p.shape_factor()?);
        println!("  phi    w[kg/m3]  D_w[m2/s]   delta_p     lambda   k_tt      k_pp      cap_t      cap_p");
        for phi in [0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95] {
            let w = p.retention(phi)?.w;
            let lc = local_coefficients(p, HygroState::new(theta, phi), &model)?;
            println!(
                "  {phi:.2}  {w:8.3}  {:.3e}  {:.3e}  {:.4}  {:.4e}  {:.4e}  {:.4e}  {:.4e}",
                p.liquid_diffusivity(w),
                p.vapor_permeability(theta, &c)?,
                p.thermal_conductivity(phi)?,
                lc.k[0][0],
                lc.k[1][1],
                lc.cap[0],
                lc.cap[1],
            );
        }
    }

    let t = theta + KELVIN_OFFSET;
    println!("\ncapillary pressure at 20 °C: p_c(0.5) = {:.4e} Pa, p_c(0.95) = {:.4e} Pa",
        capillary_pressure(t, 0.5, &c)?,
        capillary_pressure(t, 0.95, &c)?
    );

    let ip = InterfaceParams::default();
    let f = interface_fluxes(HygroState::new(21.0, 0.6), HygroState::new(20.0, 0.55), &ip, &c)?;
    println!(
        "interface (alpha = {:e}, beta = {:e}): q_int = {:.1} W/m2, g_w,int = {:.3e} kg/(m2 s)",
        ip.alpha_int, ip.beta_int, f.heat, f.liquid
    );
    Ok(())
}
