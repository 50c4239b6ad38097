use serde::{Deserialize, Serialize};

use super::layout::{positive, Layout, Rect};
use super::Mesh;
use crate::error::{Error, Result};

/// Running-bond (half-overlap) periodic unit cell.
///
/// The cell is `(l + t_h) × 2(h_b + t_b)`: one whole brick in the lower course
/// and a brick split by the vertical cell faces in the upper course.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PucSpec {
    pub brick_length: f64,
    pub brick_height: f64,
    pub bed_joint: f64,
    pub head_joint: f64,
    pub target_size: f64,
}

impl Default for PucSpec {
    fn default() -> Self {
        Self {
            brick_length: 0.29,
            brick_height: 0.065,
            bed_joint: 0.01,
            head_joint: 0.01,
            target_size: 0.01,
        }
    }
}

impl PucSpec {
    pub fn period(&self) -> [f64; 2] {
        [
            self.brick_length + self.head_joint,
            2.0 * (self.brick_height + self.bed_joint),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        positive("brick_length", self.brick_length)?;
        positive("brick_height", self.brick_height)?;
        positive("target_size", self.target_size)?;
        for (name, t) in [("bed_joint", self.bed_joint), ("head_joint", self.head_joint)] {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Geometry(format!("{name} must be non-negative, got {t}")));
            }
        }
        if self.bed_joint >= self.brick_height {
            return Err(Error::Geometry(format!(
                "bed_joint {} must be thinner than brick_height {}",
                self.bed_joint, self.brick_height
            )));
        }
        if self.head_joint >= self.brick_length {
            return Err(Error::Geometry(format!(
                "head_joint {} must be thinner than brick_length {}",
                self.head_joint, self.brick_length
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<Layout> {
        self.validate()?;
        let [w, h] = self.period();
        let (th, tb, hb) = (self.head_joint, self.bed_joint, self.brick_height);
        let y0 = tb / 2.0;
        let y1 = h / 2.0 + tb / 2.0;
        let mut bricks = vec![Rect::new(th / 2.0, y0, w - th / 2.0, y0 + hb)];
        if th > 0.0 {
            bricks.push(Rect::new(0.0, y1, w / 2.0 - th / 2.0, y1 + hb));
            bricks.push(Rect::new(w / 2.0 + th / 2.0, y1, w, y1 + hb));
        } else {
            bricks.push(Rect::new(0.0, y1, w, y1 + hb));
        }
        if tb == 0.0 && th == 0.0 {
            bricks = vec![Rect::new(0.0, 0.0, w, h)];
        }
        Ok(Layout {
            width: w,
            height: h,
            bricks,
        })
    }

    /// Analytic mortar volume fraction.
    pub fn mortar_fraction(&self) -> f64 {
        let [w, h] = self.period();
        1.0 - 2.0 * self.brick_length * self.brick_height / (w * h)
    }
}

/// Meshes the running-bond unit cell with periodic node pairing.
pub fn generate_puc(spec: &PucSpec) -> Result<Mesh> {
    spec.layout()?.mesh(spec.target_size, true)
}
