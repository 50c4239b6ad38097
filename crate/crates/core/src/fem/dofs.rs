//! Map from nodal values to solver unknowns.
//!
//! Coincident brick/mortar node pairs are parametrized by the brick value `s`
//! and the jump `d = mortar − brick`; the brick node carries `s`, the mortar
//! node `s + d`. Perfect contact fixes every jump to zero, periodic ties merge
//! variables into one class, Dirichlet data and pins fix classes.

use std::collections::BTreeSet;

use super::state::{Field, NodalState};
use crate::error::{Error, Result};
use crate::material::Phase;
use crate::mesh::Mesh;

/// Which variables are tied or fixed.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    /// Continuity across every interface segment.
    pub perfect_contact: bool,
    /// Tie the mesh's periodic pairs.
    pub periodic: bool,
    /// Nodes whose (primary) variable is fixed in both fields.
    pub pins: Vec<usize>,
    /// Nodes with prescribed values, per field (every copy at the location).
    pub dirichlet: [Vec<usize>; 2],
}

#[derive(Debug, Clone)]
pub struct DofMap {
    /// Per node: primary class and, for mortar copies, jump class.
    node_vars: Vec<(usize, Option<usize>)>,
    /// Per class: (representative brick/single node, mortar node if a jump class).
    rep: Vec<(usize, Option<usize>)>,
    forced_zero: Vec<bool>,
    eq: Vec<[Option<usize>; 2]>,
    eq_field: Vec<usize>,
    neq: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

impl DofMap {
    pub fn new(mesh: &Mesh, c: &Constraints) -> Result<Self> {
        let n = mesh.num_nodes();
        let phases = mesh.node_phases();
        // partner[n] = coincident node of the other phase
        let mut partner = vec![usize::MAX; n];
        for seg in &mesh.interfaces {
            let [a1, b1, a2, b2] = seg.nodes;
            for (p, q) in [(a1, a2), (b1, b2)] {
                if (partner[p] != usize::MAX && partner[p] != q) || (partner[q] != usize::MAX && partner[q] != p) {
                    return Err(Error::Mesh(format!("node {p} or {q} belongs to two different interface pairs")));
                }
                partner[p] = q;
                partner[q] = p;
            }
        }
        // raw variables: one per brick/single node, one jump per mortar copy
        let mut raw_of_node = vec![(usize::MAX, None); n];
        let mut raw_rep: Vec<(usize, Option<usize>)> = Vec::new();
        for node in 0..n {
            let is_copy = partner[node] != usize::MAX && phases[node] == Some(Phase::Mortar);
            if !is_copy {
                raw_of_node[node].0 = raw_rep.len();
                raw_rep.push((node, None));
            }
        }
        for node in 0..n {
            if partner[node] != usize::MAX && phases[node] == Some(Phase::Mortar) {
                let brick = partner[node];
                raw_of_node[node] = (raw_of_node[brick].0, Some(raw_rep.len()));
                raw_rep.push((brick, Some(node)));
            }
        }
        let mut uf = UnionFind((0..raw_rep.len()).collect());
        if c.periodic {
            if mesh.periodic.is_empty() {
                return Err(Error::Config("periodic conditions requested on a mesh without periodic pairs".into()));
            }
            for p in &mesh.periodic {
                let (m, s) = (raw_of_node[p.master], raw_of_node[p.slave]);
                uf.union(m.0, s.0);
                match (m.1, s.1) {
                    (Some(a), Some(b)) => uf.union(a, b),
                    (None, None) => {}
                    _ => {
                        return Err(Error::Mesh(format!(
                            "periodic pair ({}, {}) joins an interface node to a plain node",
                            p.master, p.slave
                        )))
                    }
                }
            }
        }
        // compact classes
        let mut class_of_raw = vec![usize::MAX; raw_rep.len()];
        let mut rep = Vec::new();
        for r in 0..raw_rep.len() {
            let root = uf.find(r);
            if class_of_raw[root] == usize::MAX {
                class_of_raw[root] = rep.len();
                rep.push(raw_rep[root]);
            }
            class_of_raw[r] = class_of_raw[root];
        }
        let node_vars: Vec<(usize, Option<usize>)> = raw_of_node
            .iter()
            .map(|&(p, j)| (class_of_raw[p], j.map(|j| class_of_raw[j])))
            .collect();
        let nclass = rep.len();

        let mut fixed = vec![[false; 2]; nclass];
        let mut forced_zero = vec![false; nclass];
        if c.perfect_contact {
            for (k, r) in rep.iter().enumerate() {
                if r.1.is_some() {
                    fixed[k] = [true, true];
                    forced_zero[k] = true;
                }
            }
        }
        for &node in &c.pins {
            let cls = node_vars.get(node).ok_or_else(|| Error::Config(format!("pin node {node} out of range")))?;
            fixed[cls.0] = [true, true];
        }
        for f in 0..2 {
            for &node in &c.dirichlet[f] {
                let &(p, _) = node_vars
                    .get(node)
                    .ok_or_else(|| Error::Config(format!("Dirichlet node {node} out of range")))?;
                fixed[p][f] = true;
                // every copy at the location
                let others = [node, if partner[node] == usize::MAX { node } else { partner[node] }];
                for o in others {
                    if let Some(j) = node_vars[o].1 {
                        fixed[j][f] = true;
                    }
                }
            }
        }
        let mut eq = vec![[None; 2]; nclass];
        let mut eq_field = Vec::new();
        for k in 0..nclass {
            for f in 0..2 {
                if !fixed[k][f] {
                    eq[k][f] = Some(eq_field.len());
                    eq_field.push(f);
                }
            }
        }
        Ok(Self {
            node_vars,
            rep,
            forced_zero,
            neq: eq_field.len(),
            eq,
            eq_field,
        })
    }

    /// Number of free equations.
    pub fn num_equations(&self) -> usize {
        self.neq
    }

    pub fn num_classes(&self) -> usize {
        self.rep.len()
    }

    /// Field index (0 = θ, 1 = φ) of an equation.
    pub fn equation_field(&self, e: usize) -> usize {
        self.eq_field[e]
    }

    /// Free equations a nodal unknown contributes to.
    pub fn node_equations(&self, node: usize, field: usize) -> ([usize; 2], usize) {
        let (p, j) = self.node_vars[node];
        let mut out = [0; 2];
        let mut k = 0;
        for c in std::iter::once(p).chain(j) {
            if let Some(e) = self.eq[c][field] {
                out[k] = e;
                k += 1;
            }
        }
        (out, k)
    }

    /// Variable values (per class, per field) representing `state`.
    pub fn vars_from(&self, state: &NodalState) -> [Vec<f64>; 2] {
        let mut out = [vec![0.0; self.rep.len()], vec![0.0; self.rep.len()]];
        for f in Field::BOTH {
            let v = state.field(f);
            for (k, &(brick, mortar)) in self.rep.iter().enumerate() {
                out[f.index()][k] = match mortar {
                    None => v[brick],
                    Some(_) if self.forced_zero[k] => 0.0,
                    Some(m) => v[m] - v[brick],
                };
            }
        }
        out
    }

    /// Writes the nodal values represented by `vars` into `state`.
    pub fn write_nodes(&self, vars: &[Vec<f64>; 2], state: &mut NodalState) {
        for f in Field::BOTH {
            let v = &vars[f.index()];
            let out = state.field_mut(f);
            for (node, &(p, j)) in self.node_vars.iter().enumerate() {
                out[node] = v[p] + j.map_or(0.0, |j| v[j]);
            }
        }
    }

    /// Adds a solution increment (indexed by equation) to `vars`.
    pub fn add_increment(&self, vars: &mut [Vec<f64>; 2], delta: &[f64], scale: f64) {
        for (k, eqs) in self.eq.iter().enumerate() {
            for f in 0..2 {
                if let Some(e) = eqs[f] {
                    vars[f][k] += scale * delta[e];
                }
            }
        }
    }

    /// `(class, field, equation)` for every free unknown.
    pub fn free(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.eq
            .iter()
            .enumerate()
            .flat_map(|(k, e)| (0..2).filter_map(move |f| e[f].map(|eq| (k, f, eq))))
    }

    /// True for interface jump variables.
    pub fn is_jump_class(&self, class: usize) -> bool {
        self.rep[class].1.is_some()
    }

    pub fn fixed_nodes(&self, field: usize) -> BTreeSet<usize> {
        (0..self.node_vars.len())
            .filter(|&n| self.eq[self.node_vars[n].0][field].is_none())
            .collect()
    }
}
