use std::fmt;

use super::{dist, signed_area, Mesh};
use crate::material::Phase;

const COINCIDENT_TOL: f64 = 1e-12;
const PERIOD_TOL: f64 = 1e-10;

/// One violated mesh invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NodeIndex { entity: String, node: usize },
    NonPositiveArea { triangle: usize, area: f64 },
    NonCoincidentPair { segment: usize, distance: f64 },
    InterfacePhase { segment: usize, node: usize, expected: Phase },
    PeriodicMismatch { pair: usize, dx: f64, dy: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeIndex { entity, node } => write!(f, "{entity} references missing node {node}"),
            Violation::NonPositiveArea { triangle, area } => {
                write!(f, "triangle {triangle} has non-positive signed area {area:e}")
            }
            Violation::NonCoincidentPair { segment, distance } => {
                write!(f, "interface segment {segment} has node pair {distance:e} m apart")
            }
            Violation::InterfacePhase { segment, node, expected } => write!(
                f,
                "interface segment {segment}: node {node} is not attached to a {} triangle",
                expected.name()
            ),
            Violation::PeriodicMismatch { pair, dx, dy } => {
                write!(f, "periodic pair {pair} is off its image by ({dx:e}, {dy:e}) m")
            }
        }
    }
}

/// Result of [`validate`]; empty iff every invariant holds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the mesh invariants; never fails.
pub fn validate(mesh: &Mesh) -> ValidationReport {
    let mut out = Vec::new();
    let n = mesh.nodes.len();
    let mut refs_ok = true;
    let mut check = |entity: String, nodes: &[usize], out: &mut Vec<Violation>| {
        for &node in nodes {
            if node >= n {
                out.push(Violation::NodeIndex {
                    entity: entity.clone(),
                    node,
                });
                refs_ok = false;
            }
        }
    };
    for (t, tri) in mesh.triangles.iter().enumerate() {
        check(format!("triangle {t}"), &tri.nodes, &mut out);
    }
    for (s, seg) in mesh.interfaces.iter().enumerate() {
        check(format!("interface segment {s}"), &seg.nodes, &mut out);
    }
    for (e, edge) in mesh.boundary.iter().enumerate() {
        check(format!("boundary edge {e}"), &edge.nodes, &mut out);
    }
    for (p, pair) in mesh.periodic.iter().enumerate() {
        check(format!("periodic pair {p}"), &[pair.master, pair.slave], &mut out);
    }
    if !refs_ok {
        return ValidationReport { violations: out };
    }

    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = tri.nodes;
        let area = signed_area(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
        if !(area > 0.0) {
            out.push(Violation::NonPositiveArea { triangle: t, area });
        }
    }

    let phases = mesh.node_phases();
    for (s, seg) in mesh.interfaces.iter().enumerate() {
        let [a1, b1, a2, b2] = seg.nodes;
        for (p, q) in [(a1, a2), (b1, b2)] {
            let d = dist(mesh.nodes[p], mesh.nodes[q]);
            if !(d < COINCIDENT_TOL) {
                out.push(Violation::NonCoincidentPair { segment: s, distance: d });
            }
        }
        for (node, expected) in [(a1, Phase::Brick), (b1, Phase::Brick), (a2, Phase::Mortar), (b2, Phase::Mortar)] {
            if phases[node] != Some(expected) {
                out.push(Violation::InterfacePhase {
                    segment: s,
                    node,
                    expected,
                });
            }
        }
    }

    if let Some(period) = mesh.period {
        for (p, pair) in mesh.periodic.iter().enumerate() {
            let m = mesh.nodes[pair.master];
            let s = mesh.nodes[pair.slave];
            let mut shift = [0.0, 0.0];
            shift[pair.axis.min(1)] = period[pair.axis.min(1)];
            let dx = s[0] - m[0] - shift[0];
            let dy = s[1] - m[1] - shift[1];
            if dx.abs() > PERIOD_TOL || dy.abs() > PERIOD_TOL || pair.axis > 1 {
                out.push(Violation::PeriodicMismatch { pair: p, dx, dy });
            }
        }
    } else if !mesh.periodic.is_empty() {
        out.push(Violation::PeriodicMismatch {
            pair: 0,
            dx: f64::NAN,
            dy: f64::NAN,
        });
    }
    ValidationReport { violations: out }
}
