use super::closures::capillary_pressure;
use super::{HygroState, InterfaceParams, PhysicalConstants, KELVIN_OFFSET};
use crate::error::{Error, Result};

/// Heat and liquid water flux densities across an imperfect interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFlux {
    /// `q_int = −α_int(θ₂ − θ₁)`, W·m⁻².
    pub heat: f64,
    /// `g_w,int = −β_int(p_c2 − p_c1)`, kg·m⁻²·s⁻¹.
    pub liquid: f64,
}

/// Interface laws for side states `s1`, `s2`; each side's capillary pressure
/// uses its own temperature. Vapour transfer across the interface is zero.
pub fn interface_fluxes(
    s1: HygroState,
    s2: HygroState,
    ip: &InterfaceParams,
    c: &PhysicalConstants,
) -> Result<InterfaceFlux> {
    if ip.perfect {
        return Err(Error::PerfectContact);
    }
    let pc1 = capillary_pressure(s1.theta + KELVIN_OFFSET, s1.phi, c)?;
    let pc2 = capillary_pressure(s2.theta + KELVIN_OFFSET, s2.phi, c)?;
    Ok(InterfaceFlux {
        heat: -ip.alpha_int * (s2.theta - s1.theta),
        liquid: -ip.beta_int * (pc2 - pc1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let c = PhysicalConstants::default();
        let ip = InterfaceParams::imperfect(1e5, 5.25e-9);
        let s = HygroState::new(12.0, 0.7);
        let f = interface_fluxes(s, s, &ip, &c).unwrap();
        assert_eq!((f.heat, f.liquid), (0.0, 0.0));

        let f = interface_fluxes(HygroState::new(20.0, 0.5), HygroState::new(21.0, 0.5), &ip, &c).unwrap();
        assert_eq!(f.heat, -1e5);

        let f = interface_fluxes(HygroState::new(20.0, 0.5), HygroState::new(20.0, 0.6), &ip, &c).unwrap();
        assert!(f.liquid > 0.0);
        assert!(((f.liquid - 0.1296058896436105) / 0.1296058896436105).abs() < 1e-10);

        assert!(matches!(
            interface_fluxes(s, s, &InterfaceParams::perfect(), &c),
            Err(Error::PerfectContact)
        ));
    }

    proptest! {
        #[test]
        fn antisymmetric(t1 in -40.0f64..80.0, t2 in -40.0f64..80.0, p1 in 0.01f64..1.0, p2 in 0.01f64..1.0,
                         a in 1.0f64..1e8, b in 1e-12f64..1e-6) {
            let c = PhysicalConstants::default();
            let ip = InterfaceParams::imperfect(a, b);
            let s1 = HygroState::new(t1, p1);
            let s2 = HygroState::new(t2, p2);
            let f = interface_fluxes(s1, s2, &ip, &c).unwrap();
            let g = interface_fluxes(s2, s1, &ip, &c).unwrap();
            prop_assert_eq!(f.heat, -g.heat);
            prop_assert_eq!(f.liquid, -g.liquid);
        }
    }
}
