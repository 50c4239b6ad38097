//! Triangulated wall-sample and periodic-unit-cell geometries with
//! zero-thickness brick–mortar interface segments.

mod io;
mod layout;
mod puc;
mod validate;
mod wall;

use serde::{Deserialize, Serialize};

use crate::material::Phase;

pub use layout::{Layout, Rect};
pub use puc::{generate_puc, PucSpec};
pub use validate::{validate, Violation, ValidationReport};
pub use wall::{generate_wall_sample, WallSpec};

/// Linear triangle with counter-clockwise node order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub phase: Phase,
}

/// Zero-thickness interface segment.
///
/// `nodes = [a1, b1, a2, b2]`: `a1`/`a2` and `b1`/`b2` are coincident pairs at
/// the segment ends; side 1 is brick, side 2 is mortar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSegment {
    pub nodes: [usize; 4],
    /// Index of the brick rectangle the segment bounds.
    pub id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMarker {
    Left,
    Right,
    Bottom,
    Top,
}

impl BoundaryMarker {
    pub const ALL: [BoundaryMarker; 4] = [
        BoundaryMarker::Left,
        BoundaryMarker::Right,
        BoundaryMarker::Bottom,
        BoundaryMarker::Top,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryMarker::Left => "left",
            BoundaryMarker::Right => "right",
            BoundaryMarker::Bottom => "bottom",
            BoundaryMarker::Top => "top",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            BoundaryMarker::Left => [-1.0, 0.0],
            BoundaryMarker::Right => [1.0, 0.0],
            BoundaryMarker::Bottom => [0.0, -1.0],
            BoundaryMarker::Top => [0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub marker: BoundaryMarker,
    pub normal: [f64; 2],
}

/// Node on a left/bottom face tied to its image on the right/top face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPair {
    pub master: usize,
    pub slave: usize,
    /// 0 for the x period, 1 for the y period.
    pub axis: usize,
}

/// Immutable 2D mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<Triangle>,
    pub interfaces: Vec<InterfaceSegment>,
    pub boundary: Vec<BoundaryEdge>,
    pub periodic: Vec<PeriodicPair>,
    /// Cell periods `[W, H]` when the mesh is a periodic unit cell.
    pub period: Option<[f64; 2]>,
    /// Axis-aligned extent `[x_min, y_min, x_max, y_max]`.
    pub bounds: [f64; 4],
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Signed area of triangle `t`.
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].nodes;
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn phase_area(&self, phase: Phase) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].phase == phase)
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t].nodes;
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]
    }

    pub fn segment_length(&self, s: usize) -> f64 {
        let [a, b, _, _] = self.interfaces[s].nodes;
        dist(self.nodes[a], self.nodes[b])
    }

    pub fn width(&self) -> f64 {
        self.bounds[2] - self.bounds[0]
    }

    pub fn height(&self) -> f64 {
        self.bounds[3] - self.bounds[1]
    }

    /// Phase of the triangles using each node (`None` for orphan nodes).
    pub fn node_phases(&self) -> Vec<Option<Phase>> {
        let mut out = vec![None; self.nodes.len()];
        for t in &self.triangles {
            for &n in &t.nodes {
                out[n] = Some(t.phase);
            }
        }
        out
    }

    /// Finds the triangle of `phase` (any phase if `None`) containing `p`
    /// and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: [f64; 2], phase: Option<Phase>) -> Option<(usize, [f64; 3])> {
        let tol = 1e-12;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for (t, tri) in self.triangles.iter().enumerate() {
            if phase.is_some_and(|ph| ph != tri.phase) {
                continue;
            }
            let [a, b, c] = tri.nodes;
            let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
            let area = signed_area(pa, pb, pc);
            let l = [
                signed_area(p, pb, pc) / area,
                signed_area(pa, p, pc) / area,
                signed_area(pa, pb, p) / area,
            ];
            let worst = l.iter().cloned().fold(f64::INFINITY, f64::min);
            if worst >= -tol {
                return Some((t, l));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((t, l, worst));
            }
        }
        // tolerate points a hair outside the phase region
        best.filter(|b| b.2 > -1e-6).map(|b| (b.0, b.1))
    }

    /// Same mesh with node coordinates rotated by +90° about the origin and
    /// translated back into the first quadrant. Periodic pairs and boundary
    /// markers are relabelled accordingly.
    pub fn rotated_quarter_turn(&self) -> Mesh {
        let [x0, y0, x1, y1] = self.bounds;
        let nodes = self
            .nodes
            .iter()
            .map(|&[x, y]| [y1 - y, x - x0])
            .collect::<Vec<_>>();
        let boundary = self
            .boundary
            .iter()
            .map(|e| {
                let marker = match e.marker {
                    BoundaryMarker::Left => BoundaryMarker::Bottom,
                    BoundaryMarker::Bottom => BoundaryMarker::Right,
                    BoundaryMarker::Right => BoundaryMarker::Top,
                    BoundaryMarker::Top => BoundaryMarker::Left,
                };
                BoundaryEdge {
                    nodes: e.nodes,
                    marker,
                    normal: marker.outward_normal(),
                }
            })
            .collect();
        // (x, y) -> (y1 - y, x - x0): the old bottom face becomes the new right face
        let periodic = self
            .periodic
            .iter()
            .map(|p| {
                if p.axis == 0 {
                    PeriodicPair {
                        master: p.master,
                        slave: p.slave,
                        axis: 1,
                    }
                } else {
                    PeriodicPair {
                        master: p.slave,
                        slave: p.master,
                        axis: 0,
                    }
                }
            })
            .collect();
        Mesh {
            nodes,
            triangles: self.triangles.clone(),
            interfaces: self.interfaces.clone(),
            boundary,
            periodic,
            period: self.period.map(|[w, h]| [h, w]),
            bounds: [0.0, 0.0, y1 - y0, x1 - x0],
        }
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
