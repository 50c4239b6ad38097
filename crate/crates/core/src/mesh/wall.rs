use serde::{Deserialize, Serialize};

use super::layout::{positive, Layout, Rect};
use super::Mesh;
use crate::error::{Error, Result};

/// Laboratory wall block seen in a horizontal cut: courses of a header
/// (`brick_width`) and a stretcher (`brick_length`) separated by a head joint,
/// alternating sides course by course, with bed joints between courses.
/// Heat and moisture flow along `x`; `x = 0` is the interior face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WallSpec {
    pub brick_length: f64,
    pub brick_width: f64,
    pub brick_height: f64,
    pub joint: f64,
    pub courses: usize,
    pub target_size: f64,
}

impl Default for WallSpec {
    fn default() -> Self {
        Self {
            brick_length: 0.29,
            brick_width: 0.14,
            brick_height: 0.065,
            joint: 0.01,
            courses: 2,
            target_size: 0.022,
        }
    }
}

impl WallSpec {
    pub fn width(&self) -> f64 {
        self.brick_length + self.joint + self.brick_width
    }

    pub fn height(&self) -> f64 {
        self.courses as f64 * self.brick_height + (self.courses.saturating_sub(1)) as f64 * self.joint
    }

    pub fn layout(&self) -> Result<Layout> {
        positive("brick_length", self.brick_length)?;
        positive("brick_width", self.brick_width)?;
        positive("brick_height", self.brick_height)?;
        positive("target_size", self.target_size)?;
        if !(self.joint >= 0.0 && self.joint.is_finite()) {
            return Err(Error::Geometry(format!("joint must be non-negative, got {}", self.joint)));
        }
        if self.courses == 0 {
            return Err(Error::Geometry("courses must be at least 1".into()));
        }
        let w = self.width();
        let mut bricks = Vec::new();
        for c in 0..self.courses {
            let y0 = c as f64 * (self.brick_height + self.joint);
            let y1 = y0 + self.brick_height;
            let first = if c % 2 == 0 { self.brick_length } else { self.brick_width };
            bricks.push(Rect::new(0.0, y0, first, y1));
            bricks.push(Rect::new(first + self.joint, y0, w, y1));
        }
        Ok(Layout {
            width: w,
            height: self.height(),
            bricks,
        })
    }
}

/// Meshes the wall block (no periodic pairing).
pub fn generate_wall_sample(spec: &WallSpec) -> Result<Mesh> {
    spec.layout()?.mesh(spec.target_size, false)
}
