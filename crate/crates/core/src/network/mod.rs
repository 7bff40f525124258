//! Graph-with-boundary data model.
//!
//! Vertices and edges are addressed internally by dense indices; the string
//! ids supplied by the caller are kept for reporting and serialization. Each
//! edge has a stored reference direction `tail -> head`, and every signed
//! quantity on edges (orientations, 1-forms, currents) is relative to it.

mod chains;
mod orientation;
mod validate;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use chains::{chain_spaces, ChainSpaces};
pub use orientation::{
    enumerate_compatible_orientations, enumerate_compatible_orientations_capped, is_compatible,
    is_compatible_with, orientation_from_function, Orientation, DEFAULT_ENUMERATION_CAP,
};
pub use validate::{validate_network, ValidationReport, Violation};
pub(crate) use orientation::topological_order;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    /// The endpoint opposite to `v`.
    pub fn other(&self, v: usize) -> usize {
        if v == self.tail {
            self.head
        } else {
            self.tail
        }
    }
}

/// A finite multigraph with a designated, ordered set of boundary vertices.
///
/// Construction only enforces structural well-formedness (unique ids, known
/// endpoints, no self-loops). Connectivity and the boundary-path condition
/// are checked by [`validate_network`].
#[derive(Debug, Clone)]
pub struct Network {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
    incidence: Vec<Vec<usize>>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl Network {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        boundary: Vec<String>,
    ) -> Result<Self> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate vertex id {v}")));
            }
        }
        let lookup = |id: &str| {
            vertex_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::InvalidNetwork(format!("unknown vertex id {id}")))
        };
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut out_edges = Vec::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (k, (id, tail, head)) in edges.into_iter().enumerate() {
            let t = lookup(&tail)?;
            let h = lookup(&head)?;
            if t == h {
                return Err(Error::InvalidNetwork(format!("edge {id} is a self-loop")));
            }
            if edge_index.insert(id.clone(), k).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate edge id {id}")));
            }
            incidence[t].push(k);
            incidence[h].push(k);
            out_edges.push(Edge { id, tail: t, head: h });
        }
        let mut is_boundary = vec![false; vertices.len()];
        let mut bidx = Vec::with_capacity(boundary.len());
        for b in &boundary {
            let i = lookup(b)?;
            if is_boundary[i] {
                return Err(Error::InvalidNetwork(format!("boundary vertex {b} listed twice")));
            }
            is_boundary[i] = true;
            bidx.push(i);
        }
        Ok(Network {
            vertices,
            edges: out_edges,
            boundary: bidx,
            is_boundary,
            incidence,
            vertex_index,
            edge_index,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_ids(vertices: &[&str], edges: &[(&str, &str, &str)], boundary: &[&str]) -> Result<Self> {
        Network::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges
                .iter()
                .map(|(id, t, h)| (id.to_string(), t.to_string(), h.to_string()))
                .collect(),
            boundary.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// Non-boundary vertices in index order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.is_boundary[v]).collect()
    }

    /// Edges incident to `v`, in input order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// `f(head) - f(tail)` for every edge.
    pub fn differential(&self, f: &[f64]) -> Vec<f64> {
        self.edges.iter().map(|e| f[e.head] - f[e.tail]).collect()
    }
}

/// Dirichlet data: one value per boundary vertex, aligned with
/// [`Network::boundary`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValues(Vec<f64>);

impl BoundaryValues {
    pub fn new(net: &Network, values: Vec<f64>) -> Result<Self> {
        if values.len() != net.boundary().len() {
            return Err(Error::InvalidInput(format!(
                "expected {} boundary values, got {}",
                net.boundary().len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("boundary values must be finite".into()));
        }
        Ok(BoundaryValues(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// True when values at distinct boundary vertices are pairwise distinct.
    pub fn are_distinct(&self) -> bool {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v.windows(2).all(|w| w[0] != w[1])
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The set of vertices with prescribed values. Every other vertex is free.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    fixed: Vec<Option<f64>>,
}

impl ConstraintSet {
    /// The ordinary Dirichlet constraint set: `B` with values `u`.
    pub fn from_boundary(net: &Network, u: &BoundaryValues) -> Self {
        let mut fixed = vec![None; net.vertex_count()];
        for (&b, &val) in net.boundary().iter().zip(u.values()) {
            fixed[b] = Some(val);
        }
        ConstraintSet { fixed }
    }

    /// Arbitrary fixed vertices given as `(vertex index, value)` pairs.
    pub fn new(net: &Network, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut fixed = vec![None; net.vertex_count()];
        for &(v, val) in pairs {
            if v >= fixed.len() || !val.is_finite() {
                return Err(Error::InvalidInput(format!("bad fixed vertex {v}")));
            }
            fixed[v] = Some(val);
        }
        Ok(ConstraintSet { fixed })
    }

    pub fn value(&self, v: usize) -> Option<f64> {
        self.fixed[v]
    }

    pub fn is_fixed(&self, v: usize) -> bool {
        self.fixed[v].is_some()
    }

    pub fn fixed_vertices(&self) -> Vec<usize> {
        (0..self.fixed.len()).filter(|&v| self.fixed[v].is_some()).collect()
    }

    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.fixed.len()).filter(|&v| self.fixed[v].is_none()).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.fixed.len()
    }

    /// `max - min` over the fixed values (0 when fewer than two are fixed).
    pub fn spread(&self) -> f64 {
        let vals: Vec<f64> = self.fixed.iter().flatten().copied().collect();
        if vals.len() < 2 {
            return 0.0;
        }
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

fn check_positive(net: &Network, values: &[f64], what: &str) -> Result<()> {
    if values.len() != net.edge_count() {
        return Err(Error::InvalidInput(format!(
            "expected {} {what}, got {}",
            net.edge_count(),
            values.len()
        )));
    }
    for (e, &x) in values.iter().enumerate() {
        if x == 0.0 && what == "energy" {
            return Err(Error::ZeroEnergy(net.edge(e).id.clone()));
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::NonPositive(format!("{what} on edge {}", net.edge(e).id)));
        }
    }
    Ok(())
}

/// Strictly positive edge energies.
#[derive(Debug, Clone, PartialEq)]
pub struct Energies(Vec<f64>);

impl Energies {
    pub fn new(net: &Network, values: Vec<f64>) -> Result<Self> {
        check_positive(net, &values, "energy")?;
        Ok(Energies(values))
    }

    pub fn uniform(net: &Network, value: f64) -> Result<Self> {
        Energies::new(net, vec![value; net.edge_count()])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Strictly positive edge conductances.
#[derive(Debug, Clone, PartialEq)]
pub struct Conductances(Vec<f64>);

impl Conductances {
    pub fn new(net: &Network, values: Vec<f64>) -> Result<Self> {
        check_positive(net, &values, "conductance")?;
        Ok(Conductances(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Uniformly rescaled copy.
    pub fn scaled(&self, factor: f64) -> Conductances {
        Conductances(self.0.iter().map(|c| c * factor).collect())
    }
}
