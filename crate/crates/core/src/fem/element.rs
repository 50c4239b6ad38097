//! Element-level residuals and tangents.
//!
//! Local unknowns are ordered node-major: `[θ₁, φ₁, θ₂, φ₂, …]`.

use super::state::Background;
use crate::error::{Error, Result};
use crate::material::{local_coefficients, HygroState, InterfaceParams, LocalCoefficients, Model, KELVIN_OFFSET};
use crate::mesh::Mesh;

/// Constant gradient operator of a linear triangle: `B[d][a] = ∂N_a/∂x_d`.
pub fn gradient_operator(p: [[f64; 2]; 3]) -> Result<([[f64; 3]; 2], f64)> {
    let area = crate::mesh::signed_area(p[0], p[1], p[2]);
    if !(area > 0.0) {
        return Err(Error::Geometry(format!("triangle with non-positive area {area:e}")));
    }
    let mut b = [[0.0; 3]; 2];
    for a in 0..3 {
        let (j, k) = ((a + 1) % 3, (a + 2) % 3);
        b[0][a] = (p[j][1] - p[k][1]) / (2.0 * area);
        b[1][a] = (p[k][0] - p[j][0]) / (2.0 * area);
    }
    Ok((b, area))
}

/// Residual and tangent of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrix {
    pub r: [f64; 6],
    pub k: [[f64; 6]; 6],
    pub clamped: bool,
}

/// Transient data for the lumped capacity term.
#[derive(Debug, Clone, Copy)]
pub struct Capacity {
    pub dt: f64,
    pub previous: [HygroState; 3],
}

/// Everything the bulk element needs besides geometry and material.
#[derive(Debug, Clone, Copy, Default)]
pub struct ElementInput {
    /// Solver field values at the nodes (fluctuations in homogenization mode).
    pub values: [[f64; 2]; 3],
    /// Total states at the nodes (background + values).
    pub totals: [HygroState; 3],
    /// Imposed macroscopic gradient `[Θx, Θy, Φx, Φy]`.
    pub macro_grad: [f64; 4],
}

/// Coefficients at the centroid state of an element.
pub fn centroid_coefficients(
    model: &Model,
    params: &crate::material::MaterialParams,
    totals: &[HygroState; 3],
) -> Result<LocalCoefficients> {
    let theta = (totals[0].theta + totals[1].theta + totals[2].theta) / 3.0;
    let phi = (totals[0].phi + totals[1].phi + totals[2].phi) / 3.0;
    local_coefficients(params, HygroState::new(theta, phi), model)
}

/// Gradients `(∇θ, ∇φ)` of the element.
pub fn element_gradients(b: &[[f64; 3]; 2], input: &ElementInput) -> [[f64; 2]; 2] {
    let mut g = [[0.0; 2]; 2];
    for f in 0..2 {
        for d in 0..2 {
            g[f][d] = input.macro_grad[2 * f + d] + (0..3).map(|a| b[d][a] * input.values[a][f]).sum::<f64>();
        }
    }
    g
}

/// Conductive residual and consistent tangent of a triangle, plus optional
/// lumped capacity and a body source `s(x) = [heat, moisture]` integrated with
/// the edge-midpoint rule.
pub fn bulk_element(
    mesh: &Mesh,
    t: usize,
    model: &Model,
    input: &ElementInput,
    capacity: Option<&Capacity>,
    source: Option<&(dyn Fn([f64; 2]) -> [f64; 2] + Sync)>,
    secant: bool,
) -> Result<ElementMatrix> {
    let tri = mesh.triangles[t];
    let p = [mesh.nodes[tri.nodes[0]], mesh.nodes[tri.nodes[1]], mesh.nodes[tri.nodes[2]]];
    let (b, area) = gradient_operator(p)?;
    let params = model.phase(tri.phase);
    let c = centroid_coefficients(model, params, &input.totals)?;
    let g = element_gradients(&b, input);

    // j[i] = Σ_j k_ij ∇u_j
    let mut j = [[0.0; 2]; 2];
    for i in 0..2 {
        for d in 0..2 {
            j[i][d] = c.k[i][0] * g[0][d] + c.k[i][1] * g[1][d];
        }
    }
    let mut out = ElementMatrix {
        r: [0.0; 6],
        k: [[0.0; 6]; 6],
        clamped: c.clamped,
    };
    for a in 0..3 {
        for i in 0..2 {
            out.r[2 * a + i] = area * (b[0][a] * j[i][0] + b[1][a] * j[i][1]);
        }
    }
    // (∂k/∂u_j · g)_i
    let mut dj = [[[0.0; 2]; 2]; 2];
    if !secant {
        for i in 0..2 {
            for jf in 0..2 {
                let dk = if jf == 0 { &c.dk_dtheta } else { &c.dk_dphi };
                for d in 0..2 {
                    dj[i][jf][d] = dk[i][0] * g[0][d] + dk[i][1] * g[1][d];
                }
            }
        }
    }
    for a in 0..3 {
        for bb in 0..3 {
            let bab = b[0][a] * b[0][bb] + b[1][a] * b[1][bb];
            for i in 0..2 {
                for jf in 0..2 {
                    let lin = (b[0][a] * dj[i][jf][0] + b[1][a] * dj[i][jf][1]) / 3.0;
                    out.k[2 * a + i][2 * bb + jf] = area * (bab * c.k[i][jf] + lin);
                }
            }
        }
    }

    if let Some(cap) = capacity {
        let m = area / 3.0 / cap.dt;
        for a in 0..3 {
            let s = input.totals[a];
            let cn = local_coefficients(params, s, model)?;
            let dv = [s.theta - cap.previous[a].theta, s.phi - cap.previous[a].phi];
            for i in 0..2 {
                out.r[2 * a + i] += m * cn.cap[i] * dv[i];
                out.k[2 * a + i][2 * a] += m * cn.dcap_dtheta[i] * dv[i];
                out.k[2 * a + i][2 * a + 1] += m * cn.dcap_dphi[i] * dv[i];
                out.k[2 * a + i][2 * a + i] += m * cn.cap[i];
            }
            out.clamped |= cn.clamped;
        }
    }

    if let Some(src) = source {
        let mid = |u: usize, v: usize| [(p[u][0] + p[v][0]) / 2.0, (p[u][1] + p[v][1]) / 2.0];
        let s = [src(mid(0, 1)), src(mid(1, 2)), src(mid(2, 0))];
        // N_a = 1/2 at the midpoints of the two edges touching node a
        let touching = [(0, 2), (0, 1), (1, 2)];
        for a in 0..3 {
            let (e1, e2) = touching[a];
            for i in 0..2 {
                out.r[2 * a + i] -= area / 3.0 * 0.5 * (s[e1][i] + s[e2][i]);
            }
        }
    }
    Ok(out)
}

/// Residual and tangent of an interface segment, local order
/// `[a1, b1, a2, b2] × [θ, φ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceMatrix {
    pub r: [f64; 8],
    pub k: [[f64; 8]; 8],
}

/// Heat flow `α(θ₁ − θ₂)` and liquid flow `β(p_c2 − p_c1)` from side 1 to
/// side 2, integrated with two Gauss points. With `secant`, the Kelvin law is
/// replaced by its exact secant split so that the residual equals `k·u`.
pub fn interface_element(
    length: f64,
    states: &[HygroState; 4],
    ip: &InterfaceParams,
    model: &Model,
    secant: bool,
) -> Result<InterfaceMatrix> {
    let c = model.constants.kelvin_factor();
    let mut out = InterfaceMatrix {
        r: [0.0; 8],
        k: [[0.0; 8]; 8],
    };
    let g = 0.5 / 3f64.sqrt();
    for xi in [0.5 - g, 0.5 + g] {
        let n = [1.0 - xi, xi];
        let w = 0.5 * length;
        let side = |s: usize| {
            let (a, b) = (states[2 * s], states[2 * s + 1]);
            HygroState::new(n[0] * a.theta + n[1] * b.theta, n[0] * a.phi + n[1] * b.phi)
        };
        let (s1, s2) = (side(0), side(1));
        if !(s1.phi > 0.0) || !(s2.phi > 0.0) {
            return Err(Error::HumidityDomain(s1.phi.min(s2.phi)));
        }
        let (t1, t2) = (s1.theta + KELVIN_OFFSET, s2.theta + KELVIN_OFFSET);
        let (l1, l2) = (s1.phi.ln(), s2.phi.ln());
        let fh = ip.alpha_int * (s1.theta - s2.theta);
        let fm = -ip.beta_int * c * (t2 * l2 - t1 * l1);
        // dF/d[θ1, φ1, θ2, φ2]
        let dfh = [ip.alpha_int, 0.0, -ip.alpha_int, 0.0];
        let dfm = if secant {
            let dphi = s2.phi - s1.phi;
            let sphi = if dphi.abs() > 1e-10 * s1.phi.max(s2.phi) {
                -c * t2 * (l2 - l1) / dphi
            } else {
                -c * t2 * 2.0 / (s1.phi + s2.phi)
            };
            let stheta = -c * l1;
            let b = ip.beta_int;
            [-b * stheta, -b * sphi, b * stheta, b * sphi]
        } else {
            let b = ip.beta_int;
            [b * c * l1, b * c * t1 / s1.phi, -b * c * l2, -b * c * t2 / s2.phi]
        };
        for (sd, sign) in [(0usize, 1.0), (1, -1.0)] {
            for a in 0..2 {
                let row = 2 * (2 * sd + a);
                out.r[row] += sign * w * n[a] * fh;
                out.r[row + 1] += sign * w * n[a] * fm;
                for sd2 in 0..2 {
                    for bb in 0..2 {
                        let col = 2 * (2 * sd2 + bb);
                        let f = sign * w * n[a] * n[bb];
                        out.k[row][col] += f * dfh[2 * sd2];
                        out.k[row][col + 1] += f * dfh[2 * sd2 + 1];
                        out.k[row + 1][col] += f * dfm[2 * sd2];
                        out.k[row + 1][col + 1] += f * dfm[2 * sd2 + 1];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Bulk input for triangle `t` from nodal values and an optional background.
pub fn gather(mesh: &Mesh, t: usize, values: &super::NodalState, background: Option<&Background>) -> ElementInput {
    let nodes = mesh.triangles[t].nodes;
    let mut input = ElementInput::default();
    for (a, &n) in nodes.iter().enumerate() {
        let v = [values.theta[n], values.phi[n]];
        let bg = background.map_or([0.0, 0.0], |b| b.at(mesh.nodes[n]));
        input.values[a] = v;
        input.totals[a] = HygroState::new(bg[0] + v[0], bg[1] + v[1]);
    }
    if let Some(b) = background {
        input.macro_grad = b.grad;
    }
    input
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{Coupling, MaterialParams};
    use crate::mesh::{Layout, Rect};

    fn unit_triangle_mesh() -> Mesh {
        Mesh {
            nodes: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![crate::mesh::Triangle {
                nodes: [0, 1, 2],
                phase: crate::material::Phase::Brick,
            }],
            interfaces: vec![],
            boundary: vec![],
            periodic: vec![],
            period: None,
            bounds: [0.0, 0.0, 1.0, 1.0],
        }
    }

    #[test]
    fn classical_heat_stiffness() {
        let mesh = unit_triangle_mesh();
        let mut p = MaterialParams::brick();
        p.lambda0 = 1.0;
        p.b_tcs = 0.0;
        let model = Model::homogeneous(p).with_coupling(Coupling::Decoupled);
        let s = HygroState::new(20.0, 0.5);
        let input = ElementInput {
            values: [[20.0, 0.5]; 3],
            totals: [s; 3],
            macro_grad: [0.0; 4],
        };
        let e = bulk_element(&mesh, 0, &model, &input, None, None, false).unwrap();
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((e.k[2 * a][2 * b] - expect[a][b]).abs() < 1e-14);
                assert_eq!(e.k[2 * a][2 * b + 1], 0.0);
            }
        }
    }

    #[test]
    fn uniform_state_rows_sum_to_zero() {
        let mesh = Layout {
            width: 1.0,
            height: 1.0,
            bricks: vec![Rect::new(0.0, 0.0, 1.0, 1.0)],
        }
        .mesh(0.5, false)
        .unwrap();
        let model = Model::default();
        let s = HygroState::new(15.0, 0.6);
        for t in 0..mesh.triangles.len() {
            let input = ElementInput {
                values: [[15.0, 0.6]; 3],
                totals: [s; 3],
                macro_grad: [0.0; 4],
            };
            let e = bulk_element(&mesh, t, &model, &input, None, None, false).unwrap();
            for row in 0..6 {
                for f in 0..2 {
                    let sum: f64 = (0..3).map(|b| e.k[row][2 * b + f]).sum();
                    assert!(sum.abs() < 1e-12 * e.k[row][row].abs().max(1e-30));
                }
                assert!(e.r[row].abs() < 1e-20);
            }
        }
    }

    #[test]
    fn interface_equal_states_give_zero_force() {
        let s = HygroState::new(20.0, 0.5);
        let e = interface_element(0.01, &[s; 4], &InterfaceParams::default(), &Model::default(), false).unwrap();
        assert!(e.r.iter().all(|&r| r == 0.0));
        // opposite nodal forces on the two sides
        let st = [
            HygroState::new(20.0, 0.5),
            HygroState::new(21.0, 0.55),
            HygroState::new(19.0, 0.6),
            HygroState::new(20.5, 0.52),
        ];
        let e = interface_element(0.01, &st, &InterfaceParams::default(), &Model::default(), false).unwrap();
        let s1: f64 = e.r[0] + e.r[2];
        let s2: f64 = e.r[4] + e.r[6];
        assert_eq!(s1, -s2);
        let m1: f64 = e.r[1] + e.r[3];
        let m2: f64 = e.r[5] + e.r[7];
        assert_eq!(m1, -m2);
    }

    #[test]
    fn interface_tangent_matches_fd_and_secant_is_exact() {
        let st = [
            HygroState::new(20.0, 0.5),
            HygroState::new(21.0, 0.55),
            HygroState::new(19.0, 0.6),
            HygroState::new(20.5, 0.52),
        ];
        let ip = InterfaceParams::default();
        let model = Model::default();
        let e = interface_element(0.02, &st, &ip, &model, false).unwrap();
        for col in 0..8 {
            let h = 1e-6;
            let mut sp = st;
            let mut sm = st;
            let (n, f) = (col / 2, col % 2);
            if f == 0 {
                sp[n].theta += h;
                sm[n].theta -= h;
            } else {
                sp[n].phi += h;
                sm[n].phi -= h;
            }
            let rp = interface_element(0.02, &sp, &ip, &model, false).unwrap().r;
            let rm = interface_element(0.02, &sm, &ip, &model, false).unwrap().r;
            for row in 0..8 {
                let fd = (rp[row] - rm[row]) / (2.0 * h);
                assert!((fd - e.k[row][col]).abs() <= 1e-6 * e.k[row][col].abs().max(1e-9), "{row} {col}");
            }
        }
        // secant: r = k_s·(u − u_ref) with a common background, here u_ref = 0 jump
        let sec = interface_element(0.02, &st, &ip, &model, true).unwrap();
        let u: Vec<f64> = st.iter().flat_map(|s| [s.theta, s.phi]).collect();
        for row in 0..8 {
            let ku: f64 = (0..8).map(|c| sec.k[row][c] * u[c]).sum();
            assert!((ku - sec.r[row]).abs() <= 1e-9 * sec.r[row].abs().max(1e-12), "{row}");
        }
    }
}
