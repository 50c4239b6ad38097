use super::closures::{saturation_pressure, vapor_permeability_unchecked};
use super::{Coupling, HygroState, Linearization, MaterialParams, Model, KELVIN_OFFSET, PHI_MIN};
use crate::error::Result;

/// Conductivity and capacity coefficients of the coupled balance equations at
/// one material point, with their partial derivatives.
///
/// Row/column 0 is temperature, 1 is relative humidity:
/// `k[0][0] = λ + h_v·δ_p·p_sat'·φ`, `k[0][1] = h_v·δ_p·p_sat`,
/// `k[1][0] = δ_p·p_sat'·φ`, `k[1][1] = D_φ + δ_p·p_sat`;
/// `cap = [dH/dθ, dw/dφ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalCoefficients {
    pub k: [[f64; 2]; 2],
    pub dk_dtheta: [[f64; 2]; 2],
    pub dk_dphi: [[f64; 2]; 2],
    pub cap: [f64; 2],
    pub dcap_dtheta: [f64; 2],
    pub dcap_dphi: [f64; 2],
    /// Set when `φ` had to be clamped into `[PHI_MIN, 1]`.
    pub clamped: bool,
}

/// Evaluates [`LocalCoefficients`] for one phase at `state` under the model's
/// coupling and linearization options.
pub fn local_coefficients(p: &MaterialParams, state: HygroState, model: &Model) -> Result<LocalCoefficients> {
    match model.linearization {
        Linearization::Current => evaluate(p, state, model),
        Linearization::Frozen(reference) => {
            let mut c = evaluate(p, reference, model)?;
            c.dk_dtheta = [[0.0; 2]; 2];
            c.dk_dphi = [[0.0; 2]; 2];
            c.dcap_dtheta = [0.0; 2];
            c.dcap_dphi = [0.0; 2];
            c.clamped = false;
            Ok(c)
        }
    }
}

fn evaluate(p: &MaterialParams, state: HygroState, model: &Model) -> Result<LocalCoefficients> {
    let consts = &model.constants;
    let theta = state.theta;
    let clamped = !(PHI_MIN..=1.0).contains(&state.phi);
    let phi = state.phi.clamp(PHI_MIN, 1.0);
    // derivatives vanish where the clamp is active
    let sphi = if clamped { 0.0 } else { 1.0 };

    let sat = saturation_pressure(theta)?;
    let b = p.shape_factor()?;
    let r = p.retention_with(b, phi);
    let (ps, dps, d2ps) = (sat.value, sat.derivative, sat.second_derivative);

    let delta = vapor_permeability_unchecked(theta, p.mu, consts);
    let ddelta = 0.81 * delta / (theta + KELVIN_OFFSET);

    let dw = p.liquid_diffusivity(r.w);
    let d_phi = dw * r.dw_dphi;
    let dd_phi = dw * (1000f64.ln() * r.dw_dphi * r.dw_dphi / p.w_f + r.d2w_dphi2);

    let lambda = p.lambda0 * (1.0 + p.b_tcs * r.w / p.rho_s);
    let dlambda = p.lambda0 * p.b_tcs * r.dw_dphi / p.rho_s;

    let hv = consts.evaporation_enthalpy;
    let mut c = LocalCoefficients {
        clamped,
        ..Default::default()
    };
    c.cap = [p.rho_s * p.c_s + r.w * consts.water_specific_heat, r.dw_dphi];
    c.dcap_dphi = [sphi * r.dw_dphi * consts.water_specific_heat, sphi * r.d2w_dphi2];

    c.k[1][1] = d_phi + delta * ps;
    c.dk_dtheta[1][1] = ddelta * ps + delta * dps;
    c.dk_dphi[1][1] = sphi * dd_phi;

    match model.coupling {
        Coupling::Full => {
            let dvt = ddelta * dps + delta * d2ps;
            c.k[0][0] = lambda + hv * delta * dps * phi;
            c.k[0][1] = hv * delta * ps;
            c.k[1][0] = delta * dps * phi;
            c.dk_dtheta[0][0] = hv * dvt * phi;
            c.dk_dtheta[0][1] = hv * (ddelta * ps + delta * dps);
            c.dk_dtheta[1][0] = dvt * phi;
            c.dk_dphi[0][0] = sphi * (dlambda + hv * delta * dps);
            c.dk_dphi[1][0] = sphi * delta * dps;
        }
        Coupling::Decoupled => {
            c.k[0][0] = lambda;
            c.dk_dphi[0][0] = sphi * dlambda;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{saturation_pressure, PhysicalConstants};

    fn fd_check(model: &Model, p: &MaterialParams, s: HygroState) {
        let c = local_coefficients(p, s, model).unwrap();
        let h = 1e-6;
        let ct = |dt: f64, dp: f64| {
            local_coefficients(p, HygroState::new(s.theta + dt, s.phi + dp), model).unwrap()
        };
        let (tp, tm, pp, pm) = (ct(h, 0.0), ct(-h, 0.0), ct(0.0, h), ct(0.0, -h));
        for i in 0..2 {
            for j in 0..2 {
                let fdt = (tp.k[i][j] - tm.k[i][j]) / (2.0 * h);
                let fdp = (pp.k[i][j] - pm.k[i][j]) / (2.0 * h);
                let scale = c.k[i][j].abs().max(1e-30);
                assert!((fdt - c.dk_dtheta[i][j]).abs() <= 1e-5 * scale.max(fdt.abs()), "{i}{j} θ");
                assert!((fdp - c.dk_dphi[i][j]).abs() <= 1e-5 * scale.max(fdp.abs()), "{i}{j} φ");
            }
            let fdp = (pp.cap[i] - pm.cap[i]) / (2.0 * h);
            assert!((fdp - c.dcap_dphi[i]).abs() <= 1e-5 * fdp.abs().max(1e-30));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let model = Model::default();
        for p in [MaterialParams::brick(), MaterialParams::mortar()] {
            for &(t, f) in &[(20.0, 0.5), (-9.5, 0.3), (24.5, 0.95), (5.0, 0.8), (60.0, 0.1)] {
                fd_check(&model, &p, HygroState::new(t, f));
                fd_check(&model.with_coupling(Coupling::Decoupled), &p, HygroState::new(t, f));
            }
        }
    }

    #[test]
    fn full_coupling_entries() {
        let model = Model::default();
        let p = MaterialParams::brick();
        let s = HygroState::new(20.0, 0.5);
        let c = local_coefficients(&p, s, &model).unwrap();
        let consts = PhysicalConstants::default();
        let sat = saturation_pressure(20.0).unwrap();
        let delta = p.vapor_permeability(20.0, &consts).unwrap();
        let lambda = p.thermal_conductivity(0.5).unwrap();
        let dphi = p.liquid_conductivity(0.5).unwrap();
        let hv = consts.evaporation_enthalpy;
        let close = |a: f64, b: f64| ((a - b) / b).abs() < 1e-13;
        assert!(close(c.k[0][0], lambda + hv * delta * sat.derivative * 0.5));
        assert!(close(c.k[0][1], hv * delta * sat.value));
        assert!(close(c.k[1][0], delta * sat.derivative * 0.5));
        assert!(close(c.k[1][1], dphi + delta * sat.value));
        assert!(close(c.cap[0], p.heat_capacity(20.0, 0.5, &consts).unwrap()));
        assert!(close(c.cap[1], p.retention(0.5).unwrap().dw_dphi));
    }

    #[test]
    fn coupling_scales_with_evaporation_enthalpy() {
        let mut model = Model::default();
        let p = MaterialParams::mortar();
        let s = HygroState::new(15.0, 0.6);
        let c1 = local_coefficients(&p, s, &model).unwrap();
        model.constants.evaporation_enthalpy *= 3.0;
        let c3 = local_coefficients(&p, s, &model).unwrap();
        assert!(((c3.k[0][1] / c1.k[0][1]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn clamping_is_flagged() {
        let model = Model::default();
        let p = MaterialParams::brick();
        let c = local_coefficients(&p, HygroState::new(20.0, -0.1), &model).unwrap();
        assert!(c.clamped);
        assert_eq!(c.dk_dphi[1][1], 0.0);
        let c = local_coefficients(&p, HygroState::new(20.0, 1.2), &model).unwrap();
        assert!(c.clamped);
        assert!(!local_coefficients(&p, HygroState::new(20.0, 0.5), &model).unwrap().clamped);
        assert!(local_coefficients(&p, HygroState::new(120.0, 0.5), &model).is_err());
    }

    #[test]
    fn frozen_ignores_state() {
        let reference = HygroState::new(10.0, 0.4);
        let model = Model::default().with_linearization(Linearization::Frozen(reference));
        let p = MaterialParams::brick();
        let a = local_coefficients(&p, HygroState::new(30.0, 0.9), &model).unwrap();
        let b = local_coefficients(&p, reference, &Model::default()).unwrap();
        assert_eq!(a.k, b.k);
        assert_eq!(a.cap, b.cap);
        assert_eq!(a.dk_dphi, [[0.0; 2]; 2]);
    }
}
