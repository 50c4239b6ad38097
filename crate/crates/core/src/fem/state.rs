use serde::{Deserialize, Serialize};

use crate::material::{HygroState, PHI_MIN};

/// Primary field selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Theta,
    Phi,
}

impl Field {
    pub const BOTH: [Field; 2] = [Field::Theta, Field::Phi];

    pub fn index(self) -> usize {
        match self {
            Field::Theta => 0,
            Field::Phi => 1,
        }
    }
}

/// Temperature (°C) and relative humidity at every mesh node.
///
/// In fluctuation mode the same layout stores `θ*`, `φ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalState {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub time: f64,
}

impl NodalState {
    pub fn uniform(n: usize, theta: f64, phi: f64) -> Self {
        Self {
            theta: vec![theta; n],
            phi: vec![phi; n],
            time: 0.0,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::uniform(n, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn at(&self, n: usize) -> HygroState {
        HygroState::new(self.theta[n], self.phi[n])
    }

    pub fn field(&self, f: Field) -> &[f64] {
        match f {
            Field::Theta => &self.theta,
            Field::Phi => &self.phi,
        }
    }

    pub fn field_mut(&mut self, f: Field) -> &mut [f64] {
        match f {
            Field::Theta => &mut self.theta,
            Field::Phi => &mut self.phi,
        }
    }

    /// Clamps `φ` into `[PHI_MIN, 1]`, returning the number of clamped nodes.
    pub fn clamp_phi(&mut self) -> usize {
        let mut n = 0;
        for p in &mut self.phi {
            if *p < PHI_MIN || *p > 1.0 {
                log::warn!("relative humidity {p} clamped into [{PHI_MIN}, 1]");
                *p = p.clamp(PHI_MIN, 1.0);
                n += 1;
            }
        }
        n
    }

    /// Max-norm distance between two states, per field.
    pub fn max_abs_diff(&self, other: &NodalState) -> [f64; 2] {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        [d(&self.theta, &other.theta), d(&self.phi, &other.phi)]
    }
}

/// Affine macroscopic background `Θ₀ + ∇Θ·(x − x₀)`, `Φ₀ + ∇Φ·(x − x₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub theta0: f64,
    pub phi0: f64,
    /// `[∂Θ/∂x, ∂Θ/∂y, ∂Φ/∂x, ∂Φ/∂y]`.
    pub grad: [f64; 4],
    pub x0: [f64; 2],
}

impl Background {
    pub fn at(&self, x: [f64; 2]) -> [f64; 2] {
        let dx = x[0] - self.x0[0];
        let dy = x[1] - self.x0[1];
        [
            self.theta0 + self.grad[0] * dx + self.grad[1] * dy,
            self.phi0 + self.grad[2] * dx + self.grad[3] * dy,
        ]
    }
}
