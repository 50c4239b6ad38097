use super::{invalid, MaterialParams, PhysicalConstants, KELVIN_OFFSET, THETA_MAX, THETA_MIN};
use crate::error::{Error, Result};

/// Water vapour saturation pressure and its temperature derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationPressure {
    /// `p_sat`, Pa.
    pub value: f64,
    /// `dp_sat/dθ`, Pa·K⁻¹.
    pub derivative: f64,
    /// `d²p_sat/dθ²`, Pa·K⁻².
    pub second_derivative: f64,
}

/// Magnus-form saturation pressure with separate branches over water and ice.
///
/// Valid on `[-40, 80]` °C.
pub fn saturation_pressure(theta: f64) -> Result<SaturationPressure> {
    if !(THETA_MIN..=THETA_MAX).contains(&theta) {
        return Err(Error::TemperatureOutOfRange {
            value: theta,
            min: THETA_MIN,
            max: THETA_MAX,
        });
    }
    let (a, t0) = if theta >= 0.0 {
        (17.08, 234.18)
    } else {
        (22.44, 272.44)
    };
    let s = t0 + theta;
    let value = 611.0 * (a * theta / s).exp();
    let g1 = a * t0 / (s * s);
    let g2 = -2.0 * a * t0 / (s * s * s);
    Ok(SaturationPressure {
        value,
        derivative: value * g1,
        second_derivative: value * (g1 * g1 + g2),
    })
}

/// Kelvin capillary pressure `p_c = −(ρʷRT/M_w)·ln φ` with `T` in kelvin.
pub fn capillary_pressure(t_kelvin: f64, phi: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::HumidityDomain(phi));
    }
    if !(t_kelvin > 0.0) {
        return Err(invalid("temperature", t_kelvin, "absolute temperature must be positive"));
    }
    Ok(-c.kelvin_factor() * t_kelvin * phi.ln())
}

/// `(∂p_c/∂θ, ∂p_c/∂φ)` of the Kelvin law; `θ` may be °C or K since only
/// differences enter.
pub fn capillary_pressure_derivatives(t_kelvin: f64, phi: f64, c: &PhysicalConstants) -> Result<(f64, f64)> {
    if !(phi > 0.0) {
        return Err(Error::HumidityDomain(phi));
    }
    let k = c.kelvin_factor();
    Ok((-k * phi.ln(), -k * t_kelvin / phi))
}

/// Water content on the sorption isotherm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retention {
    /// `w`, kg·m⁻³.
    pub w: f64,
    /// `dw/dφ`, kg·m⁻³.
    pub dw_dphi: f64,
    /// `d²w/dφ²`, kg·m⁻³.
    pub d2w_dphi2: f64,
}

impl MaterialParams {
    /// Retention shape factor `b` fixed by `w(0.8) = w80`.
    pub fn shape_factor(&self) -> Result<f64> {
        let b = 0.8 * (self.w80 - self.w_f) / (self.w80 - 0.8 * self.w_f);
        if b > 1.0 && b.is_finite() {
            Ok(b)
        } else {
            Err(invalid(
                "w80",
                self.w80,
                "retention shape factor b must exceed 1 (requires w80 < 0.8·w_f)",
            ))
        }
    }

    /// `w(φ) = w_f(b−1)φ/(b−φ)`.
    pub fn retention(&self, phi: f64) -> Result<Retention> {
        let b = self.shape_factor()?;
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::HumidityDomain(phi));
        }
        Ok(self.retention_with(b, phi))
    }

    pub(crate) fn retention_with(&self, b: f64, phi: f64) -> Retention {
        let d = b - phi;
        let k = self.w_f * (b - 1.0);
        Retention {
            w: k * phi / d,
            dw_dphi: k * b / (d * d),
            d2w_dphi2: 2.0 * k * b / (d * d * d),
        }
    }

    /// Liquid water diffusivity `D_w = 3.8(A/w_f)²·1000^(w/w_f − 1)`, m²·s⁻¹.
    pub fn liquid_diffusivity(&self, w: f64) -> f64 {
        let r = self.a / self.w_f;
        3.8 * r * r * 1000f64.powf(w / self.w_f - 1.0)
    }

    /// Liquid conduction coefficient `D_φ = D_w·dw/dφ`, kg·m⁻¹·s⁻¹.
    pub fn liquid_conductivity(&self, phi: f64) -> Result<f64> {
        let r = self.retention(phi)?;
        Ok(self.liquid_diffusivity(r.w) * r.dw_dphi)
    }

    /// Vapour permeability `δ_p = 2·10⁻⁷·T^0.81/(p_amb·μ)`, kg·m⁻¹·s⁻¹·Pa⁻¹.
    pub fn vapor_permeability(&self, theta: f64, c: &PhysicalConstants) -> Result<f64> {
        check_theta(theta)?;
        Ok(vapor_permeability_unchecked(theta, self.mu, c))
    }

    /// `λ = λ₀(1 + b_tcs·w/ρ_s)`, W·m⁻¹·K⁻¹.
    pub fn thermal_conductivity(&self, phi: f64) -> Result<f64> {
        let r = self.retention(phi)?;
        Ok(self.lambda0 * (1.0 + self.b_tcs * r.w / self.rho_s))
    }

    /// `dH/dθ = ρ_s·c_s + w·c_w`, J·m⁻³·K⁻¹.
    pub fn heat_capacity(&self, theta: f64, phi: f64, c: &PhysicalConstants) -> Result<f64> {
        check_theta(theta)?;
        let r = self.retention(phi)?;
        Ok(self.rho_s * self.c_s + r.w * c.water_specific_heat)
    }
}

pub(crate) fn vapor_permeability_unchecked(theta: f64, mu: f64, c: &PhysicalConstants) -> f64 {
    2.0e-7 * (theta + KELVIN_OFFSET).powf(0.81) / (c.ambient_pressure * mu)
}

fn check_theta(theta: f64) -> Result<()> {
    if (THETA_MIN..=THETA_MAX).contains(&theta) {
        Ok(())
    } else {
        Err(Error::TemperatureOutOfRange {
            value: theta,
            min: THETA_MIN,
            max: THETA_MAX,
        })
    }
}
