use rayon::prelude::*;

use super::bc::{BoundaryConditions, SourceFn};
use super::dofs::DofMap;
use super::element::{bulk_element, gather, interface_element, Capacity};
use super::state::{Background, NodalState};
use crate::error::{Error, Result};
use crate::material::{HygroState, Model};
use crate::mesh::Mesh;

/// Transient term data: previous total state and step size.
#[derive(Debug, Clone, Copy)]
pub struct TransientTerm<'a> {
    pub dt: f64,
    pub previous: &'a NodalState,
}

/// Robin load resolved at the current time.
#[derive(Debug, Clone, Copy)]
pub struct RobinLoad {
    pub edge: usize,
    pub field: usize,
    pub coefficient: f64,
    pub ambient: f64,
}

/// One discrete problem: mesh, material, unknown map and load terms.
#[derive(Clone)]
pub struct Problem<'a> {
    pub mesh: &'a Mesh,
    pub model: &'a Model,
    pub dofs: &'a DofMap,
    pub background: Option<Background>,
    pub transient: Option<TransientTerm<'a>>,
    pub source: Option<SourceFn>,
    pub robin: Vec<RobinLoad>,
}

/// Assembled residual and tangent over the free equations.
#[derive(Debug, Clone, Default)]
pub struct System {
    pub residual: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub diagonal: Vec<f64>,
    pub clamped: usize,
}

/// Locally combined contributions of one element.
#[derive(Debug, Default)]
pub(crate) struct LocalRows {
    pub r: Vec<(usize, f64)>,
    pub k: Vec<(usize, usize, f64)>,
}

/// Maps local rows/cols (node-major `[θ, φ]` per node) onto free equations,
/// summing inside the element first so that equal and opposite interface
/// contributions cancel exactly in shared rows.
pub(crate) fn combine<const N: usize>(
    dofs: &DofMap,
    nodes: &[usize],
    r: &[f64; N],
    k: Option<&[[f64; N]; N]>,
) -> LocalRows {
    let mut eqs: Vec<usize> = Vec::with_capacity(2 * N);
    let mut map: Vec<([usize; 2], usize)> = Vec::with_capacity(N);
    for i in 0..N {
        let (e, n) = dofs.node_equations(nodes[i / 2], i % 2);
        map.push((e, n));
        eqs.extend_from_slice(&e[..n]);
    }
    eqs.sort_unstable();
    eqs.dedup();
    let pos = |e: usize| eqs.binary_search(&e).unwrap();
    let m = eqs.len();
    let mut rr = vec![0.0; m];
    let mut kk = vec![0.0; m * m];
    for i in 0..N {
        let (ei, ni) = map[i];
        for &e in &ei[..ni] {
            let pi = pos(e);
            rr[pi] += r[i];
            if let Some(k) = k {
                for j in 0..N {
                    let (ej, nj) = map[j];
                    for &f in &ej[..nj] {
                        kk[pi * m + pos(f)] += k[i][j];
                    }
                }
            }
        }
    }
    let mut out = LocalRows::default();
    for (a, &ea) in eqs.iter().enumerate() {
        out.r.push((ea, rr[a]));
        if k.is_some() {
            for (b, &eb) in eqs.iter().enumerate() {
                let v = kk[a * m + b];
                if v != 0.0 {
                    out.k.push((ea, eb, v));
                }
            }
        }
    }
    out
}

impl<'a> Problem<'a> {
    pub fn new(mesh: &'a Mesh, model: &'a Model, dofs: &'a DofMap) -> Self {
        Self {
            mesh,
            model,
            dofs,
            background: None,
            transient: None,
            source: None,
            robin: Vec::new(),
        }
    }

    /// Loads from `bcs` that enter the residual (source, Robin) at time `t`.
    pub fn with_loads(mut self, bcs: &BoundaryConditions, t: f64) -> Self {
        self.source = bcs.source.clone();
        self.robin.clear();
        for r in &bcs.robin {
            for (i, e) in self.mesh.boundary.iter().enumerate() {
                if e.marker == r.marker {
                    self.robin.push(RobinLoad {
                        edge: i,
                        field: r.field.index(),
                        coefficient: r.coefficient,
                        ambient: (r.ambient)(t),
                    });
                }
            }
        }
        self
    }

    pub fn total(&self, values: &NodalState, n: usize) -> HygroState {
        let bg = self.background.map_or([0.0, 0.0], |b| b.at(self.mesh.nodes[n]));
        HygroState::new(bg[0] + values.theta[n], bg[1] + values.phi[n])
    }

    fn bulk_local(&self, t: usize, values: &NodalState, secant: bool) -> Result<super::element::ElementMatrix> {
        let input = gather(self.mesh, t, values, self.background.as_ref());
        let cap = self.transient.map(|tr| {
            let nodes = self.mesh.triangles[t].nodes;
            Capacity {
                dt: tr.dt,
                previous: nodes.map(|n| tr.previous.at(n)),
            }
        });
        let src = self.source.as_deref().map(|s| s as &(dyn Fn([f64; 2]) -> [f64; 2] + Sync));
        bulk_element(self.mesh, t, self.model, &input, cap.as_ref(), src, secant).map_err(|e| Error::Element {
            element: t,
            source: Box::new(e),
        })
    }

    fn interface_local(&self, s: usize, values: &NodalState, secant: bool) -> Result<super::element::InterfaceMatrix> {
        let seg = self.mesh.interfaces[s];
        let states = seg.nodes.map(|n| self.total(values, n));
        interface_element(self.mesh.segment_length(s), &states, &self.model.interface, self.model, secant).map_err(|e| {
            Error::InterfaceElement {
                segment: s,
                source: Box::new(e),
            }
        })
    }

    fn robin_local(&self, load: &RobinLoad, values: &NodalState) -> ([usize; 2], [f64; 4], [[f64; 4]; 4]) {
        let e = &self.mesh.boundary[load.edge];
        let [a, b] = e.nodes;
        let len = crate::mesh::dist(self.mesh.nodes[a], self.mesh.nodes[b]);
        let f = load.field;
        let ua = self.total(values, a);
        let ub = self.total(values, b);
        let (va, vb) = if f == 0 { (ua.theta, ub.theta) } else { (ua.phi, ub.phi) };
        let h = load.coefficient;
        let mut r = [0.0; 4];
        let mut k = [[0.0; 4]; 4];
        r[f] = h * len * ((2.0 * va + vb) / 6.0 - load.ambient / 2.0);
        r[2 + f] = h * len * ((va + 2.0 * vb) / 6.0 - load.ambient / 2.0);
        k[f][f] = h * len / 3.0;
        k[f][2 + f] = h * len / 6.0;
        k[2 + f][f] = h * len / 6.0;
        k[2 + f][2 + f] = h * len / 3.0;
        ([a, b], r, k)
    }

    /// Residual and tangent over the free equations. With `secant`, the
    /// coefficient derivatives are dropped and the Kelvin interface law is
    /// split exactly, so that the residual is linear in the unknowns at the
    /// frozen coefficients.
    pub fn assemble(&self, values: &NodalState, secant: bool) -> Result<System> {
        let dofs = self.dofs;
        let bulk: Vec<Result<(LocalRows, bool)>> = (0..self.mesh.triangles.len())
            .into_par_iter()
            .map(|t| {
                let e = self.bulk_local(t, values, secant)?;
                let nodes = self.mesh.triangles[t].nodes;
                Ok((combine::<6>(dofs, &nodes, &e.r, Some(&e.k)), e.clamped))
            })
            .collect();
        let iface: Vec<Result<LocalRows>> = if self.model.interface.perfect {
            Vec::new()
        } else {
            (0..self.mesh.interfaces.len())
                .into_par_iter()
                .map(|s| {
                    let e = self.interface_local(s, values, secant)?;
                    Ok(combine::<8>(dofs, &self.mesh.interfaces[s].nodes, &e.r, Some(&e.k)))
                })
                .collect()
        };
        let mut sys = System {
            residual: vec![0.0; dofs.num_equations()],
            diagonal: vec![0.0; dofs.num_equations()],
            ..Default::default()
        };
        let push = |rows: LocalRows, sys: &mut System| {
            for (e, v) in rows.r {
                sys.residual[e] += v;
            }
            for (i, j, v) in rows.k {
                if i == j {
                    sys.diagonal[i] += v;
                }
                sys.triplets.push((i, j, v));
            }
        };
        for b in bulk {
            let (rows, clamped) = b?;
            sys.clamped += clamped as usize;
            push(rows, &mut sys);
        }
        for i in iface {
            push(i?, &mut sys);
        }
        for load in &self.robin {
            let (nodes, r, k) = self.robin_local(load, values);
            push(combine::<4>(dofs, &nodes, &r, Some(&k)), &mut sys);
        }
        Ok(sys)
    }

    /// Per-node residual `[θ, φ]` before any constraint is applied. At fixed
    /// nodes it is the reaction (net outflow through the boundary).
    pub fn nodal_residual(&self, values: &NodalState) -> Result<Vec<[f64; 2]>> {
        let mut out = vec![[0.0; 2]; self.mesh.num_nodes()];
        for t in 0..self.mesh.triangles.len() {
            let e = self.bulk_local(t, values, false)?;
            for (a, &n) in self.mesh.triangles[t].nodes.iter().enumerate() {
                out[n][0] += e.r[2 * a];
                out[n][1] += e.r[2 * a + 1];
            }
        }
        if !self.model.interface.perfect {
            for s in 0..self.mesh.interfaces.len() {
                let e = self.interface_local(s, values, false)?;
                for (a, &n) in self.mesh.interfaces[s].nodes.iter().enumerate() {
                    out[n][0] += e.r[2 * a];
                    out[n][1] += e.r[2 * a + 1];
                }
            }
        }
        for load in &self.robin {
            let (nodes, r, _) = self.robin_local(load, values);
            for (a, &n) in nodes.iter().enumerate() {
                out[n][0] += r[2 * a];
                out[n][1] += r[2 * a + 1];
            }
        }
        Ok(out)
    }
}
