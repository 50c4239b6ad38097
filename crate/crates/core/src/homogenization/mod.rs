//! Steady first-order homogenization of a periodic unit cell.
//!
//! A macroscopic state `Θ₀, Φ₀` and gradients `∇Θ, ∇Φ` define an affine
//! background; the fluctuation problem is solved on the cell and the inner
//! unknowns are condensed out to the 4×4 macroscopic conductivity, ordered
//! `[θx, θy, φx, φy]`.

mod sweep;

pub use sweep::{sweep, write_sweep_csv, SweepRow, SWEEP_SCHEMA_VERSION};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{
    centroid_coefficients, combine, gather, gradient_operator, newton_solve, Background, Constraints, DofMap,
    NewtonOptions, NewtonReport, NodalState, Problem, SparseLu,
};
use crate::material::{Model, Phase};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    #[default]
    Dirichlet,
    Periodic,
}

impl BcKind {
    pub fn name(self) -> &'static str {
        match self {
            BcKind::Dirichlet => "dirichlet",
            BcKind::Periodic => "periodic",
        }
    }
}

/// Macroscopic state and gradients imposed on the cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroLoadCase {
    pub theta0: f64,
    pub phi0: f64,
    pub grad_theta: [f64; 2],
    pub grad_phi: [f64; 2],
    pub x0: [f64; 2],
    #[serde(default)]
    pub bc: BcKind,
}

impl MacroLoadCase {
    /// Zero gradients with the reference point at the centre of the cell.
    pub fn centered(mesh: &Mesh, theta0: f64, phi0: f64, bc: BcKind) -> Self {
        let [x0, y0, x1, y1] = mesh.bounds;
        Self {
            theta0,
            phi0,
            grad_theta: [0.0; 2],
            grad_phi: [0.0; 2],
            x0: [(x0 + x1) / 2.0, (y0 + y1) / 2.0],
            bc,
        }
    }

    pub fn with_gradients(mut self, grad_theta: [f64; 2], grad_phi: [f64; 2]) -> Self {
        self.grad_theta = grad_theta;
        self.grad_phi = grad_phi;
        self
    }

    /// `[Θx, Θy, Φx, Φy]`.
    pub fn gradient(&self) -> [f64; 4] {
        [self.grad_theta[0], self.grad_theta[1], self.grad_phi[0], self.grad_phi[1]]
    }

    pub fn background(&self) -> Background {
        Background {
            theta0: self.theta0,
            phi0: self.phi0,
            grad: self.gradient(),
            x0: self.x0,
        }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if !(self.phi0 > 0.0 && self.phi0 <= 1.0) {
            return Err(Error::Config(format!("Phi0 must lie in (0, 1], got {}", self.phi0)));
        }
        let all = [self.theta0, self.grad_theta[0], self.grad_theta[1], self.grad_phi[0], self.grad_phi[1]];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("load case contains non-finite values".into()));
        }
        let [x0, y0, x1, y1] = mesh.bounds;
        let tol = 1e-12 * (x1 - x0).max(y1 - y0);
        if self.x0[0] < x0 - tol || self.x0[0] > x1 + tol || self.x0[1] < y0 - tol || self.x0[1] > y1 + tol {
            return Err(Error::Config(format!("reference point {:?} lies outside the cell", self.x0)));
        }
        Ok(())
    }
}

/// Background field and fluctuation constraints of one load case.
#[derive(Debug, Clone)]
pub struct MacroLoad {
    pub background: Background,
    pub constraints: Constraints,
}

/// Dirichlet: zero fluctuations on the whole boundary. Periodic: equal
/// fluctuations on opposite faces and one pinned corner node.
pub fn apply_macro_load(mesh: &Mesh, lc: &MacroLoadCase, perfect_contact: bool) -> Result<MacroLoad> {
    lc.validate(mesh)?;
    let mut constraints = Constraints {
        perfect_contact,
        ..Constraints::default()
    };
    match lc.bc {
        BcKind::Dirichlet => {
            let mut nodes: Vec<usize> = mesh.boundary.iter().flat_map(|e| e.nodes).collect();
            nodes.sort_unstable();
            nodes.dedup();
            constraints.dirichlet = [nodes.clone(), nodes];
        }
        BcKind::Periodic => {
            if mesh.periodic.is_empty() {
                return Err(Error::Config("periodic boundary conditions need a mesh with periodic pairs".into()));
            }
            constraints.periodic = true;
            let [x0, y0, _, _] = mesh.bounds;
            let corner = (0..mesh.num_nodes())
                .min_by(|&a, &b| {
                    let d = |n: usize| (mesh.nodes[n][0] - x0).hypot(mesh.nodes[n][1] - y0);
                    d(a).total_cmp(&d(b))
                })
                .ok_or_else(|| Error::Mesh("empty mesh".into()))?;
            constraints.pins = vec![corner];
        }
    }
    Ok(MacroLoad {
        background: lc.background(),
        constraints,
    })
}

/// Converged fluctuation field of one load case.
#[derive(Debug, Clone)]
pub struct Fluctuations {
    pub values: NodalState,
    pub dofs: DofMap,
    pub background: Background,
    pub report: NewtonReport,
}

/// Newton options used for the cell problem unless overridden.
pub fn fluctuation_options() -> NewtonOptions {
    NewtonOptions {
        tol: 1e-12,
        ..NewtonOptions::default()
    }
}

pub fn solve_fluctuations(mesh: &Mesh, lc: &MacroLoadCase, model: &Model, opts: &NewtonOptions) -> Result<Fluctuations> {
    let load = apply_macro_load(mesh, lc, model.interface.perfect)?;
    let dofs = DofMap::new(mesh, &load.constraints)?;
    let mut values = NodalState::zeros(mesh.num_nodes());
    let mut problem = Problem::new(mesh, model, &dofs);
    problem.background = Some(load.background);
    let report = newton_solve(&problem, &mut values, opts)?;
    Ok(Fluctuations {
        values,
        dofs,
        background: load.background,
        report,
    })
}

/// Condensed and averaged conductivities of one load case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroConductivity {
    pub load: MacroLoadCase,
    /// `K^M`, rows and columns `[θx, θy, φx, φy]`.
    pub k_macro: [[f64; 4]; 4],
    /// Volume averages `K^m` of the local coefficients.
    pub k_local: [[f64; 4]; 4],
    /// Volume-averaged local flux `[q_x, q_y, g_x, g_y]`.
    pub mean_flux: [f64; 4],
    /// Volume average of the fluctuation gradient, interface jumps included.
    pub mean_fluctuation_gradient: [f64; 4],
    /// Per-field relative mismatch between `mean_flux` and `−K^M·∇`.
    pub hill_mandel: f64,
    pub iterations: usize,
}

impl MacroConductivity {
    /// 2×2 block `(i, j)` with 0 = θ, 1 = φ.
    pub fn block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        block_of(&self.k_macro, i, j)
    }

    pub fn local_block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        block_of(&self.k_local, i, j)
    }

    pub fn theta_theta(&self) -> [[f64; 2]; 2] {
        self.block(0, 0)
    }

    pub fn theta_phi(&self) -> [[f64; 2]; 2] {
        self.block(0, 1)
    }

    pub fn phi_theta(&self) -> [[f64; 2]; 2] {
        self.block(1, 0)
    }

    pub fn phi_phi(&self) -> [[f64; 2]; 2] {
        self.block(1, 1)
    }
}

fn block_of(k: &[[f64; 4]; 4], i: usize, j: usize) -> [[f64; 2]; 2] {
    [
        [k[2 * i][2 * j], k[2 * i][2 * j + 1]],
        [k[2 * i + 1][2 * j], k[2 * i + 1][2 * j + 1]],
    ]
}

/// Outward unit normal of the brick side of each interface segment.
fn brick_normals(mesh: &Mesh) -> Result<Vec<[f64; 2]>> {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &mesh.triangles {
        if t.phase != Phase::Brick {
            continue;
        }
        for a in 0..3 {
            let (p, q) = (t.nodes[a], t.nodes[(a + 1) % 3]);
            edges.insert((p.min(q), p.max(q)), t.nodes[(a + 2) % 3]);
        }
    }
    mesh.interfaces
        .iter()
        .enumerate()
        .map(|(s, seg)| {
            let (a, b) = (seg.nodes[0], seg.nodes[1]);
            let c = *edges
                .get(&(a.min(b), a.max(b)))
                .ok_or_else(|| Error::Mesh(format!("interface segment {s} has no brick triangle on side 1")))?;
            let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
            let t = [pb[0] - pa[0], pb[1] - pa[1]];
            let len = t[0].hypot(t[1]);
            let mut n = [t[1] / len, -t[0] / len];
            if n[0] * (pc[0] - pa[0]) + n[1] * (pc[1] - pa[1]) > 0.0 {
                n = [-n[0], -n[1]];
            }
            Ok(n)
        })
        .collect()
}

/// Condenses the inner unknowns with the secant operator at the converged
/// fluctuation state:
/// `K^M = (Σ A·k⊗I − M_row·K⁻¹·M_col) / |Ω|`.
pub fn condense(mesh: &Mesh, lc: &MacroLoadCase, model: &Model, fl: &Fluctuations) -> Result<MacroConductivity> {
    let dofs = &fl.dofs;
    let neq = dofs.num_equations();
    let mut problem = Problem::new(mesh, model, dofs);
    problem.background = Some(fl.background);
    let sys = problem.assemble(&fl.values, true)?;

    let area_total = mesh.total_area();
    let mut k_sum = [[0.0; 4]; 4];
    let mut k_avg = [[0.0; 4]; 4];
    let mut flux = [0.0; 4];
    let mut grad_r = [0.0; 4];
    let mut m_col = vec![vec![0.0; neq]; 4];
    let mut m_row = vec![vec![0.0; neq]; 4];
    for t in 0..mesh.triangles.len() {
        let tri = mesh.triangles[t];
        let p = tri.nodes.map(|n| mesh.nodes[n]);
        let (b, area) = gradient_operator(p)?;
        let input = gather(mesh, t, &fl.values, Some(&fl.background));
        let c = centroid_coefficients(model, model.phase(tri.phase), &input.totals).map_err(|e| Error::Element {
            element: t,
            source: Box::new(e),
        })?;
        for i in 0..2 {
            for j in 0..2 {
                for d in 0..2 {
                    k_sum[2 * i + d][2 * j + d] += area * c.k[i][j];
                }
            }
        }
        let mut g = [[0.0; 2]; 2];
        for f in 0..2 {
            for d in 0..2 {
                let gr: f64 = (0..3).map(|a| b[d][a] * input.values[a][f]).sum();
                grad_r[2 * f + d] += area * gr;
                g[f][d] = input.macro_grad[2 * f + d] + gr;
            }
        }
        for i in 0..2 {
            for d in 0..2 {
                flux[2 * i + d] -= area * (c.k[i][0] * g[0][d] + c.k[i][1] * g[1][d]);
            }
        }
        // column (j, d): residual of a unit macroscopic gradient
        // row (i, d): sensitivity of the mean flux to the nodal values
        for j in 0..2 {
            for d in 0..2 {
                let mut rc = [0.0; 6];
                let mut rr = [0.0; 6];
                for a in 0..3 {
                    for i in 0..2 {
                        rc[2 * a + i] = area * b[d][a] * c.k[i][j];
                        rr[2 * a + i] = area * c.k[j][i] * b[d][a];
                    }
                }
                for (e, v) in combine::<6>(dofs, &tri.nodes, &rc, None).r {
                    m_col[2 * j + d][e] += v;
                }
                for (e, v) in combine::<6>(dofs, &tri.nodes, &rr, None).r {
                    m_row[2 * j + d][e] += v;
                }
            }
        }
    }
    if !model.interface.perfect {
        let normals = brick_normals(mesh)?;
        for (s, seg) in mesh.interfaces.iter().enumerate() {
            let len = mesh.segment_length(s);
            let v = |n: usize, f: usize| fl.values.field(crate::fem::Field::BOTH[f])[n];
            for f in 0..2 {
                let jump = 0.5 * len * ((v(seg.nodes[2], f) - v(seg.nodes[0], f)) + (v(seg.nodes[3], f) - v(seg.nodes[1], f)));
                for d in 0..2 {
                    grad_r[2 * f + d] += jump * normals[s][d];
                }
            }
        }
    }

    let sol = if neq > 0 {
        SparseLu::new(neq, &sys.triplets)?.solve_columns(&m_col)?
    } else {
        vec![vec![]; 4]
    };
    let mut k_macro = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let schur: f64 = m_row[r].iter().zip(&sol[c]).map(|(a, b)| a * b).sum();
            k_macro[r][c] = (k_sum[r][c] - schur) / area_total;
            k_avg[r][c] = k_sum[r][c] / area_total;
        }
    }
    for v in flux.iter_mut().chain(grad_r.iter_mut()) {
        *v /= area_total;
    }
    let grad = lc.gradient();
    let mut hill_mandel = 0.0f64;
    for f in 0..2 {
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for d in 0..2 {
            let predicted: f64 = -(0..4).map(|c| k_macro[2 * f + d][c] * grad[c]).sum::<f64>();
            diff = diff.max((flux[2 * f + d] - predicted).abs());
            scale = scale.max(flux[2 * f + d].abs()).max(predicted.abs());
        }
        if scale > 0.0 {
            hill_mandel = hill_mandel.max(diff / scale);
        }
    }
    Ok(MacroConductivity {
        load: *lc,
        k_macro,
        k_local: k_avg,
        mean_flux: flux,
        mean_fluctuation_gradient: grad_r,
        hill_mandel,
        iterations: fl.report.iterations,
    })
}

/// Fluctuation solve followed by condensation.
pub fn homogenize(mesh: &Mesh, lc: &MacroLoadCase, model: &Model) -> Result<MacroConductivity> {
    homogenize_with(mesh, lc, model, &fluctuation_options())
}

pub fn homogenize_with(mesh: &Mesh, lc: &MacroLoadCase, model: &Model, opts: &NewtonOptions) -> Result<MacroConductivity> {
    let fl = solve_fluctuations(mesh, lc, model, opts)?;
    condense(mesh, lc, model, &fl)
}
