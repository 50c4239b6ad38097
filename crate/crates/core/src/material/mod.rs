//! Künzel hygrothermal closures and brick–mortar interface laws.
//!
//! Every function here is a pure function of the local state `(θ, φ)` and the
//! parameter set, so evaluation is safe from any number of threads.

mod closures;
mod coefficients;
pub mod config;
mod interface;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use closures::{
    capillary_pressure, capillary_pressure_derivatives, saturation_pressure, Retention,
    SaturationPressure,
};
pub use coefficients::{local_coefficients, LocalCoefficients};
pub use interface::{interface_fluxes, InterfaceFlux};

/// Lower end of the validated temperature range, °C.
pub const THETA_MIN: f64 = -40.0;
/// Upper end of the validated temperature range, °C.
pub const THETA_MAX: f64 = 80.0;
/// Offset between °C and K.
pub const KELVIN_OFFSET: f64 = 273.15;
/// Smallest relative humidity used when evaluating closures.
pub const PHI_MIN: f64 = 1e-6;

/// Local hygrothermal state: temperature in °C and relative humidity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HygroState {
    pub theta: f64,
    pub phi: f64,
}

impl HygroState {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }
}

/// Material phase of a bulk element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Brick,
    Mortar,
}

impl Phase {
    pub const ALL: [Phase; 2] = [Phase::Brick, Phase::Mortar];

    pub fn index(self) -> usize {
        match self {
            Phase::Brick => 0,
            Phase::Mortar => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Brick => "brick",
            Phase::Mortar => "mortar",
        }
    }

    pub fn parse(s: &str) -> Result<Phase> {
        match s {
            "brick" => Ok(Phase::Brick),
            "mortar" => Ok(Phase::Mortar),
            other => Err(Error::Parse(format!("unknown phase `{other}`"))),
        }
    }
}

/// Physical constants entering the closures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Universal gas constant, J·mol⁻¹·K⁻¹.
    pub gas_constant: f64,
    /// Molar mass of water, kg·mol⁻¹.
    pub molar_mass_water: f64,
    /// Intrinsic density of liquid water, kg·m⁻³.
    pub water_density: f64,
    /// Evaporation enthalpy of water, J·kg⁻¹.
    pub evaporation_enthalpy: f64,
    /// Specific heat of liquid water, J·kg⁻¹·K⁻¹.
    pub water_specific_heat: f64,
    /// Ambient (total) pressure, Pa.
    pub ambient_pressure: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            gas_constant: 8.314,
            molar_mass_water: 0.018,
            water_density: 1000.0,
            evaporation_enthalpy: 2.5e6,
            water_specific_heat: 4190.0,
            ambient_pressure: 101_325.0,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gas_constant", self.gas_constant),
            ("molar_mass_water", self.molar_mass_water),
            ("water_density", self.water_density),
            ("evaporation_enthalpy", self.evaporation_enthalpy),
            ("water_specific_heat", self.water_specific_heat),
            ("ambient_pressure", self.ambient_pressure),
        ];
        for (name, value) in fields {
            positive(name, value)?;
        }
        Ok(())
    }

    /// `ρʷ·R/M_w`, the Kelvin prefactor per kelvin, Pa·K⁻¹.
    pub fn kelvin_factor(&self) -> f64 {
        self.water_density * self.gas_constant / self.molar_mass_water
    }
}

/// Künzel parameters of one porous phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Dry thermal conductivity, W·m⁻¹·K⁻¹.
    pub lambda0: f64,
    /// Thermal conductivity supplement, -.
    pub b_tcs: f64,
    /// Water vapour diffusion resistance factor, -.
    pub mu: f64,
    /// Free water saturation, kg·m⁻³.
    pub w_f: f64,
    /// Water content at φ = 0.8, kg·m⁻³.
    pub w80: f64,
    /// Water absorption coefficient, kg·m⁻²·s⁻⁰·⁵.
    pub a: f64,
    /// Dry bulk density, kg·m⁻³.
    pub rho_s: f64,
    /// Dry specific heat capacity, J·kg⁻¹·K⁻¹.
    pub c_s: f64,
}

impl MaterialParams {
    /// Brick parameters identified from the wall-sample experiments
    /// (`rho_s`, `c_s` are literature-typical defaults).
    pub fn brick() -> Self {
        Self {
            lambda0: 0.25,
            b_tcs: 10.0,
            mu: 16.80,
            w_f: 229.30,
            w80: 141.68,
            a: 0.51,
            rho_s: 1690.0,
            c_s: 840.0,
        }
    }

    /// Lime mortar parameters identified from the wall-sample experiments
    /// (`rho_s`, `c_s` are literature-typical defaults).
    pub fn mortar() -> Self {
        Self {
            lambda0: 0.45,
            b_tcs: 9.0,
            mu: 9.63,
            w_f: 160.0,
            w80: 22.72,
            a: 0.82,
            rho_s: 1730.0,
            c_s: 840.0,
        }
    }

    /// Checks the parameter invariants, including monotonicity of the
    /// retention curve (shape factor `b > 1`).
    pub fn validate(&self) -> Result<()> {
        positive("lambda0", self.lambda0)?;
        if !(self.b_tcs >= 0.0 && self.b_tcs.is_finite()) {
            return Err(invalid("b_tcs", self.b_tcs, "must be non-negative"));
        }
        if !(self.mu >= 1.0 && self.mu.is_finite()) {
            return Err(invalid("mu", self.mu, "must be at least 1"));
        }
        positive("w_f", self.w_f)?;
        positive("w80", self.w80)?;
        if self.w80 >= self.w_f {
            return Err(invalid("w80", self.w80, "must be below w_f"));
        }
        positive("a", self.a)?;
        positive("rho_s", self.rho_s)?;
        positive("c_s", self.c_s)?;
        self.shape_factor().map(|_| ())
    }
}

/// Brick–mortar interface coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceParams {
    /// Internal heat transfer coefficient, W·m⁻²·K⁻¹.
    pub alpha_int: f64,
    /// Internal interface permeability, kg·m⁻²·s⁻¹·Pa⁻¹.
    pub beta_int: f64,
    /// Perfect contact: both fields continuous across the interface.
    pub perfect: bool,
}

impl InterfaceParams {
    pub fn imperfect(alpha_int: f64, beta_int: f64) -> Self {
        Self {
            alpha_int,
            beta_int,
            perfect: false,
        }
    }

    pub fn perfect() -> Self {
        Self {
            perfect: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.perfect {
            positive("alpha_int", self.alpha_int)?;
            positive("beta_int", self.beta_int)?;
        }
        Ok(())
    }
}

impl Default for InterfaceParams {
    fn default() -> Self {
        Self::imperfect(1.0e5, 5.25e-9)
    }
}

/// Which transport couplings enter the local conductivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// Latent heat transport and thermally driven vapour diffusion included.
    #[default]
    Full,
    /// Heat conduction `λ(φ)` and moisture transport `D_φ + δ_p·p_sat` only.
    Decoupled,
}

/// Where the closures are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linearization {
    /// At the current local state (nonlinear problem).
    #[default]
    Current,
    /// At a fixed reference state; the problem becomes linear.
    Frozen(HygroState),
}

/// Complete constitutive description of a brick–mortar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub brick: MaterialParams,
    pub mortar: MaterialParams,
    pub interface: InterfaceParams,
    pub constants: PhysicalConstants,
    pub coupling: Coupling,
    pub linearization: Linearization,
}

impl Default for Model {
    fn default() -> Self {
        Self {
            brick: MaterialParams::brick(),
            mortar: MaterialParams::mortar(),
            interface: InterfaceParams::default(),
            constants: PhysicalConstants::default(),
            coupling: Coupling::Full,
            linearization: Linearization::Current,
        }
    }
}

impl Model {
    /// Same material in both phases.
    pub fn homogeneous(params: MaterialParams) -> Self {
        Self {
            brick: params,
            mortar: params,
            ..Self::default()
        }
    }

    pub fn phase(&self, phase: Phase) -> &MaterialParams {
        match phase {
            Phase::Brick => &self.brick,
            Phase::Mortar => &self.mortar,
        }
    }

    pub fn phase_mut(&mut self, phase: Phase) -> &mut MaterialParams {
        match phase {
            Phase::Brick => &mut self.brick,
            Phase::Mortar => &mut self.mortar,
        }
    }

    pub fn with_interface(mut self, interface: InterfaceParams) -> Self {
        self.interface = interface;
        self
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_linearization(mut self, linearization: Linearization) -> Self {
        self.linearization = linearization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.brick.validate().map_err(|e| prefix("brick", e))?;
        self.mortar.validate().map_err(|e| prefix("mortar", e))?;
        self.interface.validate()?;
        self.constants.validate()
    }
}

fn prefix(phase: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter {
            name,
            value,
            reason,
        } => Error::InvalidParameter {
            name: format!("{phase}.{name}"),
            value,
            reason,
        },
        other => other,
    }
}

pub(crate) fn invalid(name: &str, value: f64, reason: &str) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        value,
        reason: reason.to_string(),
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, value, "must be strictly positive"))
    }
}
