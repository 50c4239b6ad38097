//! Declarative parameter files (TOML) and parameter provenance.
//!
//! Keys and units are documented in `docs/config-schema.md`.

use serde::{Deserialize, Serialize};

use super::{Coupling, MaterialParams, Model, Phase};
use crate::error::{Error, Result};

/// Origin of a resolved parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Identified value of the reference wall sample.
    Paper,
    /// Documented built-in default that was not identified experimentally.
    Default,
    /// Supplied by the user.
    User,
}

/// One resolved parameter with its unit and origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRecord {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    pub lambda0: Option<f64>,
    pub b_tcs: Option<f64>,
    pub mu: Option<f64>,
    pub w_f: Option<f64>,
    pub w80: Option<f64>,
    #[serde(alias = "A")]
    pub a: Option<f64>,
    pub rho_s: Option<f64>,
    pub c_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSection {
    pub alpha_int: Option<f64>,
    pub beta_int: Option<f64>,
    pub perfect: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub gas_constant: Option<f64>,
    pub molar_mass_water: Option<f64>,
    pub water_density: Option<f64>,
    pub evaporation_enthalpy: Option<f64>,
    pub water_specific_heat: Option<f64>,
    pub ambient_pressure: Option<f64>,
}

/// Material section of a run configuration; every key is optional and falls
/// back to the built-in parameter set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default)]
    pub brick: PhaseSection,
    #[serde(default)]
    pub mortar: PhaseSection,
    #[serde(default)]
    pub interface: InterfaceSection,
    #[serde(default)]
    pub constants: ConstantsSection,
    pub coupling: Option<Coupling>,
}

/// A validated [`Model`] plus the provenance of every parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedModel {
    pub model: Model,
    pub parameters: Vec<ParameterRecord>,
}

const PHASE_KEYS: [(&str, &str, bool); 8] = [
    ("lambda0", "W/(m K)", true),
    ("b_tcs", "-", true),
    ("mu", "-", true),
    ("w_f", "kg/m3", true),
    ("w80", "kg/m3", true),
    ("a", "kg/(m2 s0.5)", true),
    ("rho_s", "kg/m3", false),
    ("c_s", "J/(kg K)", false),
];

const CONSTANT_KEYS: [(&str, &str); 6] = [
    ("gas_constant", "J/(mol K)"),
    ("molar_mass_water", "kg/mol"),
    ("water_density", "kg/m3"),
    ("evaporation_enthalpy", "J/kg"),
    ("water_specific_heat", "J/(kg K)"),
    ("ambient_pressure", "Pa"),
];

impl PhaseSection {
    fn get(&self, key: &str) -> Option<f64> {
        match key {
            "lambda0" => self.lambda0,
            "b_tcs" => self.b_tcs,
            "mu" => self.mu,
            "w_f" => self.w_f,
            "w80" => self.w80,
            "a" => self.a,
            "rho_s" => self.rho_s,
            "c_s" => self.c_s,
            _ => None,
        }
    }
}

impl ConstantsSection {
    fn get(&self, key: &str) -> Option<f64> {
        match key {
            "gas_constant" => self.gas_constant,
            "molar_mass_water" => self.molar_mass_water,
            "water_density" => self.water_density,
            "evaporation_enthalpy" => self.evaporation_enthalpy,
            "water_specific_heat" => self.water_specific_heat,
            "ambient_pressure" => self.ambient_pressure,
            _ => None,
        }
    }
}

impl MaterialConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Applies the overrides to the built-in parameter set and validates.
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let mut model = Model::default();
        let mut parameters = Vec::new();
        for (phase, section) in [(Phase::Brick, &self.brick), (Phase::Mortar, &self.mortar)] {
            for (key, unit, identified) in PHASE_KEYS {
                let name = format!("{}.{key}", phase.name());
                let (value, provenance) = match section.get(key) {
                    Some(v) => (v, Provenance::User),
                    None => (
                        model.get(&name)?,
                        if identified { Provenance::Paper } else { Provenance::Default },
                    ),
                };
                model.set(&name, value)?;
                parameters.push(ParameterRecord {
                    name,
                    value,
                    unit: unit.to_string(),
                    provenance,
                });
            }
        }
        if let Some(p) = self.interface.perfect {
            model.interface.perfect = p;
        }
        for (key, unit, given) in [
            ("alpha_int", "W/(m2 K)", self.interface.alpha_int),
            ("beta_int", "kg/(m2 s Pa)", self.interface.beta_int),
        ] {
            let name = format!("interface.{key}");
            let (value, provenance) = match given {
                Some(v) => (v, Provenance::User),
                None => (model.get(&name)?, Provenance::Paper),
            };
            model.set(&name, value)?;
            parameters.push(ParameterRecord {
                name,
                value,
                unit: unit.to_string(),
                provenance,
            });
        }
        for (key, unit) in CONSTANT_KEYS {
            let name = format!("constants.{key}");
            let (value, provenance) = match self.constants.get(key) {
                Some(v) => (v, Provenance::User),
                None => (model.get(&name)?, Provenance::Default),
            };
            model.set(&name, value)?;
            parameters.push(ParameterRecord {
                name,
                value,
                unit: unit.to_string(),
                provenance,
            });
        }
        if let Some(c) = self.coupling {
            model.coupling = c;
        }
        model.validate()?;
        Ok(ResolvedModel { model, parameters })
    }
}

impl Model {
    /// Reads a parameter by dotted name, e.g. `brick.lambda0`,
    /// `interface.alpha_int`, `constants.evaporation_enthalpy`.
    pub fn get(&self, name: &str) -> Result<f64> {
        let (group, key) = split(name)?;
        match group {
            "brick" | "mortar" => {
                let p = self.phase(Phase::parse(group)?);
                phase_field(key).map(|f| *f_ref(p, f)).ok_or_else(|| unknown(name))
            }
            "interface" => match key {
                "alpha_int" => Ok(self.interface.alpha_int),
                "beta_int" => Ok(self.interface.beta_int),
                _ => Err(unknown(name)),
            },
            "constants" => {
                let c = &self.constants;
                match key {
                    "gas_constant" => Ok(c.gas_constant),
                    "molar_mass_water" => Ok(c.molar_mass_water),
                    "water_density" => Ok(c.water_density),
                    "evaporation_enthalpy" => Ok(c.evaporation_enthalpy),
                    "water_specific_heat" => Ok(c.water_specific_heat),
                    "ambient_pressure" => Ok(c.ambient_pressure),
                    _ => Err(unknown(name)),
                }
            }
            _ => Err(unknown(name)),
        }
    }

    /// Writes a parameter by dotted name (no validation).
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let (group, key) = split(name)?;
        match group {
            "brick" | "mortar" => {
                let f = phase_field(key).ok_or_else(|| unknown(name))?;
                *f_mut(self.phase_mut(Phase::parse(group)?), f) = value;
            }
            "interface" => match key {
                "alpha_int" => self.interface.alpha_int = value,
                "beta_int" => self.interface.beta_int = value,
                _ => return Err(unknown(name)),
            },
            "constants" => {
                let c = &mut self.constants;
                let slot = match key {
                    "gas_constant" => &mut c.gas_constant,
                    "molar_mass_water" => &mut c.molar_mass_water,
                    "water_density" => &mut c.water_density,
                    "evaporation_enthalpy" => &mut c.evaporation_enthalpy,
                    "water_specific_heat" => &mut c.water_specific_heat,
                    "ambient_pressure" => &mut c.ambient_pressure,
                    _ => return Err(unknown(name)),
                };
                *slot = value;
            }
            _ => return Err(unknown(name)),
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Field {
    Lambda0,
    Btcs,
    Mu,
    Wf,
    W80,
    A,
    RhoS,
    Cs,
}

fn phase_field(key: &str) -> Option<Field> {
    Some(match key {
        "lambda0" => Field::Lambda0,
        "b_tcs" => Field::Btcs,
        "mu" => Field::Mu,
        "w_f" => Field::Wf,
        "w80" => Field::W80,
        "a" | "A" => Field::A,
        "rho_s" => Field::RhoS,
        "c_s" => Field::Cs,
        _ => return None,
    })
}

fn f_ref(p: &MaterialParams, f: Field) -> &f64 {
    match f {
        Field::Lambda0 => &p.lambda0,
        Field::Btcs => &p.b_tcs,
        Field::Mu => &p.mu,
        Field::Wf => &p.w_f,
        Field::W80 => &p.w80,
        Field::A => &p.a,
        Field::RhoS => &p.rho_s,
        Field::Cs => &p.c_s,
    }
}

fn f_mut(p: &mut MaterialParams, f: Field) -> &mut f64 {
    match f {
        Field::Lambda0 => &mut p.lambda0,
        Field::Btcs => &mut p.b_tcs,
        Field::Mu => &mut p.mu,
        Field::Wf => &mut p.w_f,
        Field::W80 => &mut p.w80,
        Field::A => &mut p.a,
        Field::RhoS => &mut p.rho_s,
        Field::Cs => &mut p.c_s,
    }
}

fn split(name: &str) -> Result<(&str, &str)> {
    name.split_once('.').ok_or_else(|| unknown(name))
}

fn unknown(name: &str) -> Error {
    Error::Config(format!("unknown parameter `{name}`"))
}

impl Default for ResolvedModel {
    fn default() -> Self {
        MaterialConfig::default().resolve().expect("built-in parameters are valid")
    }
}
