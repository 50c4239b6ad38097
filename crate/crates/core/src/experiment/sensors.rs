use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::Phase;
use crate::mesh::{Mesh, WallSpec};

/// Sensor accuracy bands used for jump flags and residual normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorAccuracy {
    /// Temperature accuracy below 0 °C, K.
    pub theta_below_zero: f64,
    /// Temperature accuracy from 0 °C upwards, K.
    pub theta: f64,
    pub phi: f64,
}

impl Default for SensorAccuracy {
    fn default() -> Self {
        Self {
            theta_below_zero: 0.4,
            theta: 0.1,
            phi: 0.02,
        }
    }
}

impl SensorAccuracy {
    pub fn theta_at(&self, theta: f64) -> f64 {
        if theta < 0.0 {
            self.theta_below_zero
        } else {
            self.theta
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub x: [f64; 2],
    /// Side of an interface the probe reads; required for jump-pair members.
    #[serde(default)]
    pub phase: Option<Phase>,
}

/// Two probes straddling one interface. Jumps are `mortar − brick`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpPair {
    pub name: String,
    pub brick: String,
    pub mortar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub probes: Vec<Probe>,
    #[serde(default)]
    pub pairs: Vec<JumpPair>,
    #[serde(default)]
    pub accuracy: SensorAccuracy,
}

fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

impl SensorLayout {
    pub fn probe(&self, name: &str) -> Option<&Probe> {
        self.probes.iter().find(|p| p.name == name)
    }

    /// Probes along the mid-height of the lower course plus jump pairs on the
    /// head joint faces and on the bed joint, for the given wall geometry.
    pub fn wall_default(spec: &WallSpec) -> Self {
        let y = spec.brick_height / 2.0;
        let head0 = spec.brick_length;
        let head1 = head0 + spec.joint;
        let w = spec.width();
        let mut probes: Vec<Probe> = [0.25, 0.5, 0.75]
            .iter()
            .enumerate()
            .map(|(i, f)| Probe {
                name: format!("S{}", i + 1),
                x: [f * head0, y],
                phase: Some(Phase::Brick),
            })
            .collect();
        probes.push(Probe {
            name: "S4".into(),
            x: [0.5 * (head1 + w), y],
            phase: Some(Phase::Brick),
        });
        let mut pairs = Vec::new();
        let mut pair = |name: &str, x: [f64; 2]| {
            for (suffix, phase) in [("b", Phase::Brick), ("m", Phase::Mortar)] {
                probes.push(Probe {
                    name: format!("{name}{suffix}"),
                    x,
                    phase: Some(phase),
                });
            }
            pairs.push(JumpPair {
                name: name.into(),
                brick: format!("{name}b"),
                mortar: format!("{name}m"),
            });
        };
        pair("J1", [head0, y]);
        pair("J2", [head1, y]);
        if spec.courses > 1 {
            pair("J3", [0.5 * head0, spec.brick_height]);
        }
        Self {
            probes,
            pairs,
            accuracy: SensorAccuracy::default(),
        }
    }

    /// Checks probe names, locations and that each jump pair straddles one
    /// interface segment within one element size.
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        for (i, p) in self.probes.iter().enumerate() {
            if self.probes[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::Sensor(format!("duplicate probe name `{}`", p.name)));
            }
            if mesh.locate(p.x, p.phase).is_none() {
                return Err(Error::Sensor(format!("probe `{}` at {:?} lies outside the mesh", p.name, p.x)));
            }
        }
        for pair in &self.pairs {
            let get = |name: &str, phase: Phase| -> Result<&Probe> {
                let p = self
                    .probe(name)
                    .ok_or_else(|| Error::Sensor(format!("pair `{}`: missing probe `{name}`", pair.name)))?;
                if p.phase != Some(phase) {
                    return Err(Error::Sensor(format!(
                        "pair `{}`: probe `{name}` must be tagged {}",
                        pair.name,
                        phase.name()
                    )));
                }
                Ok(p)
            };
            let b = get(&pair.brick, Phase::Brick)?;
            let m = get(&pair.mortar, Phase::Mortar)?;
            let seg_dist = |s: usize, x: [f64; 2]| {
                let seg = mesh.interfaces[s];
                dist_to_segment(x, mesh.nodes[seg.nodes[0]], mesh.nodes[seg.nodes[1]])
            };
            let Some(sb) = (0..mesh.interfaces.len()).min_by(|&u, &v| seg_dist(u, b.x).total_cmp(&seg_dist(v, b.x))) else {
                return Err(Error::Sensor(format!("pair `{}`: the mesh has no interfaces", pair.name)));
            };
            let reach = mesh.segment_length(sb);
            if seg_dist(sb, b.x) > reach || seg_dist(sb, m.x) > reach {
                return Err(Error::Sensor(format!(
                    "pair `{}`: probes are not within one element of a common interface segment",
                    pair.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_wall_sample;

    #[test]
    fn default_layout_is_valid() {
        let spec = WallSpec::default();
        let mesh = generate_wall_sample(&spec).unwrap();
        let l = SensorLayout::wall_default(&spec);
        l.validate(&mesh).unwrap();
        assert_eq!(l.pairs.len(), 3);
    }

    #[test]
    fn pair_far_from_interface_is_rejected() {
        let spec = WallSpec::default();
        let mesh = generate_wall_sample(&spec).unwrap();
        let mut l = SensorLayout::wall_default(&spec);
        l.probes.iter_mut().find(|p| p.name == "J1b").unwrap().x = [0.05, 0.03];
        assert!(matches!(l.validate(&mesh), Err(Error::Sensor(_))));
        let mut l = SensorLayout::wall_default(&spec);
        l.probes.retain(|p| p.name != "J2m");
        assert!(l.validate(&mesh).unwrap_err().to_string().contains("J2m"));
    }

    #[test]
    fn accuracy_band_depends_on_temperature() {
        let a = SensorAccuracy::default();
        assert_eq!(a.theta_at(-5.0), 0.4);
        assert_eq!(a.theta_at(5.0), 0.1);
    }
}
