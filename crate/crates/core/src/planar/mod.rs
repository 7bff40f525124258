//! Planar embeddings, duals, conjugates and rectangle tilings.
//!
//! Half-edge `2e` runs along edge `e` from tail to head and `2e + 1` runs
//! back. Faces are traced keeping the face on the left, so bounded faces
//! come out counter-clockwise and the outer face clockwise.

mod smith;
mod tiling;

use std::collections::VecDeque;

use crate::enharmonic::EnharmonicSolution;
use crate::error::{Error, Result};
use crate::network::{Energies, Network};

pub use smith::{render_svg, smith_diagram, smith_diagram_from, Rect, SmithDiagram, SvgOptions};
pub use tiling::{
    network_signature, retile_with_areas, tiling_to_network, CrossPolicy, RectTiling, Signature, Tile, TilingNetwork,
};

/// A rotation system on a network together with its traced faces.
#[derive(Debug, Clone)]
pub struct PlanarEmbedding {
    net: Network,
    rotation: Vec<Vec<usize>>,
    slot: Vec<usize>,
    next: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    outer: usize,
}

fn origin(net: &Network, he: usize) -> usize {
    let e = net.edge(he / 2);
    if he % 2 == 0 {
        e.tail
    } else {
        e.head
    }
}

impl PlanarEmbedding {
    /// Builds an embedding from counter-clockwise edge orders. The outer face
    /// is the longest face containing every boundary vertex.
    pub fn new(net: &Network, rotation: Vec<Vec<usize>>) -> Result<Self> {
        let mut emb = Self::trace(net, rotation)?;
        let candidates: Vec<usize> = (0..emb.faces.len())
            .filter(|&f| net.boundary().iter().all(|&b| emb.face_vertices(f).contains(&b)))
            .collect();
        let best = candidates
            .iter()
            .copied()
            .max_by(|&a, &b| emb.faces[a].len().cmp(&emb.faces[b].len()).then(b.cmp(&a)))
            .ok_or_else(|| {
                let missing = net.boundary().iter().find(|&&b| !emb.face_vertices(0).contains(&b)).copied().unwrap_or(0);
                Error::BoundaryNotOnOuterFace(net.vertex_id(missing).to_string())
            })?;
        emb.outer = best;
        Ok(emb)
    }

    /// Builds an embedding whose outer face is the one to the left of
    /// half-edge `he`.
    pub fn with_outer_half_edge(net: &Network, rotation: Vec<Vec<usize>>, he: usize) -> Result<Self> {
        let mut emb = Self::trace(net, rotation)?;
        if he >= emb.face_of.len() {
            return Err(Error::InvalidInput(format!("half-edge {he} out of range")));
        }
        emb.outer = emb.face_of[he];
        emb.check_boundary()?;
        Ok(emb)
    }

    /// Rotation from straight-line vertex positions; the outer face is the
    /// one with negative signed area.
    pub fn from_coordinates(net: &Network, coords: &[(f64, f64)]) -> Result<Self> {
        if coords.len() != net.vertex_count() {
            return Err(Error::InvalidInput("one coordinate pair per vertex required".into()));
        }
        let rotation = (0..net.vertex_count())
            .map(|v| {
                let mut inc: Vec<(f64, usize)> = net
                    .incident(v)
                    .iter()
                    .map(|&e| {
                        let w = net.edge(e).other(v);
                        ((coords[w].1 - coords[v].1).atan2(coords[w].0 - coords[v].0), e)
                    })
                    .collect();
                inc.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                inc.into_iter().map(|(_, e)| e).collect()
            })
            .collect();
        let mut emb = Self::trace(net, rotation)?;
        let area = |f: &Vec<usize>| -> f64 {
            f.iter()
                .map(|&he| {
                    let (a, b) = (coords[origin(net, he)], coords[origin(net, he ^ 1)]);
                    a.0 * b.1 - b.0 * a.1
                })
                .sum::<f64>()
                / 2.0
        };
        emb.outer = (0..emb.faces.len())
            .min_by(|&a, &b| area(&emb.faces[a]).total_cmp(&area(&emb.faces[b])))
            .unwrap_or(0);
        emb.check_boundary()?;
        Ok(emb)
    }

    fn trace(net: &Network, rotation: Vec<Vec<usize>>) -> Result<Self> {
        let n = net.vertex_count();
        let m = net.edge_count();
        if rotation.len() != n {
            return Err(Error::InvalidInput("rotation system must list every vertex".into()));
        }
        let mut slot = vec![usize::MAX; 2 * m];
        for (v, rot) in rotation.iter().enumerate() {
            let mut expected = net.incident(v).to_vec();
            let mut given = rot.clone();
            expected.sort_unstable();
            given.sort_unstable();
            if expected != given {
                return Err(Error::InvalidInput(format!(
                    "rotation at {} must list each incident edge once",
                    net.vertex_id(v)
                )));
            }
            for (i, &e) in rot.iter().enumerate() {
                let he = if net.edge(e).tail == v { 2 * e } else { 2 * e + 1 };
                slot[he] = i;
            }
        }
        let mut next = vec![0; 2 * m];
        for he in 0..2 * m {
            let v = origin(net, he ^ 1);
            let deg = rotation[v].len();
            let e2 = rotation[v][(slot[he ^ 1] + deg - 1) % deg];
            next[he] = if net.edge(e2).tail == v { 2 * e2 } else { 2 * e2 + 1 };
        }
        let mut face_of = vec![usize::MAX; 2 * m];
        let mut faces = Vec::new();
        for start in 0..2 * m {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut cycle = Vec::new();
            let mut he = start;
            while face_of[he] == usize::MAX {
                face_of[he] = faces.len();
                cycle.push(he);
                he = next[he];
            }
            faces.push(cycle);
        }
        let euler = n as i64 - m as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(Error::NotPlanar { euler });
        }
        Ok(PlanarEmbedding { net: net.clone(), rotation, slot, next, face_of, faces, outer: 0 })
    }

    fn check_boundary(&self) -> Result<()> {
        let outer = self.face_vertices(self.outer);
        for &b in self.net.boundary() {
            if !outer.contains(&b) {
                return Err(Error::BoundaryNotOnOuterFace(self.net.vertex_id(b).to_string()));
            }
        }
        Ok(())
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Faces as half-edge cycles.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn outer_face(&self) -> usize {
        self.outer
    }

    /// Face to the left of half-edge `he`.
    pub fn face_of(&self, he: usize) -> usize {
        self.face_of[he]
    }

    pub fn origin(&self, he: usize) -> usize {
        origin(&self.net, he)
    }

    pub fn next_half_edge(&self, he: usize) -> usize {
        self.next[he]
    }

    /// Position of half-edge `he` in the rotation at its origin.
    pub fn rotation_slot(&self, he: usize) -> usize {
        self.slot[he]
    }

    /// Vertices on face `f` in walk order (repeats possible).
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&he| origin(&self.net, he)).collect()
    }

    /// Boundary vertices in the order of their first appearance on the
    /// clockwise outer walk.
    pub fn boundary_cyclic_order(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for v in self.face_vertices(self.outer) {
            if self.net.is_boundary(v) && !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }
}

/// The part of the outer face between two consecutive terminal rays.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterArc {
    /// Terminal whose ray starts the arc on the clockwise walk.
    pub from_terminal: usize,
    /// Terminal whose ray ends it.
    pub to_terminal: usize,
}

/// Dual network: one vertex per bounded face, then one per outer arc.
#[derive(Debug, Clone)]
pub struct DualNetwork {
    /// Primal face index of each bounded-face dual vertex.
    pub bounded_faces: Vec<usize>,
    pub arcs: Vec<OuterArc>,
    /// Dual vertex to the left of each edge traversed tail to head.
    pub left: Vec<usize>,
    /// Dual vertex to the right of each edge traversed tail to head.
    pub right: Vec<usize>,
}

impl DualNetwork {
    pub fn vertex_count(&self) -> usize {
        self.bounded_faces.len() + self.arcs.len()
    }

    /// Dual vertex index of outer arc `k`.
    pub fn arc_vertex(&self, k: usize) -> usize {
        self.bounded_faces.len() + k
    }

    pub fn vertex_label(&self, d: usize) -> String {
        if d < self.bounded_faces.len() {
            format!("f{d}")
        } else {
            format!("arc{}", d - self.bounded_faces.len())
        }
    }
}

/// Dual with rays at the boundary vertices.
pub fn build_dual(emb: &PlanarEmbedding) -> Result<DualNetwork> {
    build_dual_with_terminals(emb, emb.network().boundary())
}

/// Dual with rays at an arbitrary set of outer-face vertices.
pub fn build_dual_with_terminals(emb: &PlanarEmbedding, terminals: &[usize]) -> Result<DualNetwork> {
    let net = emb.network();
    let walk = &emb.faces[emb.outer];
    let mut starts: Vec<(usize, usize)> = Vec::new();
    for (pos, &he) in walk.iter().enumerate() {
        let v = emb.origin(he);
        if terminals.contains(&v) && !starts.iter().any(|&(_, t)| t == v) {
            starts.push((pos, v));
        }
    }
    if let Some(&t) = terminals.iter().find(|t| !starts.iter().any(|&(_, s)| s == **t)) {
        return Err(Error::BoundaryNotOnOuterFace(net.vertex_id(t).to_string()));
    }
    if starts.len() < 2 {
        return Err(Error::InvalidInput("at least two terminals are required".into()));
    }
    let mut bounded_faces = Vec::new();
    let mut face_vertex = vec![usize::MAX; emb.faces.len()];
    for f in 0..emb.faces.len() {
        if f != emb.outer {
            face_vertex[f] = bounded_faces.len();
            bounded_faces.push(f);
        }
    }
    let k = starts.len();
    let arcs: Vec<OuterArc> =
        (0..k).map(|i| OuterArc { from_terminal: starts[i].1, to_terminal: starts[(i + 1) % k].1 }).collect();
    let mut arc_of = vec![usize::MAX; 2 * net.edge_count()];
    let mut current = k - 1;
    for (pos, &he) in walk.iter().enumerate() {
        if let Some(i) = starts.iter().position(|&(p, _)| p == pos) {
            current = i;
        }
        arc_of[he] = current;
    }
    let nb = bounded_faces.len();
    let side = |he: usize| {
        let f = emb.face_of[he];
        if f == emb.outer {
            nb + arc_of[he]
        } else {
            face_vertex[f]
        }
    };
    let left = (0..net.edge_count()).map(|e| side(2 * e)).collect();
    let right = (0..net.edge_count()).map(|e| side(2 * e + 1)).collect();
    Ok(DualNetwork { bounded_faces, arcs, left, right })
}

/// Function on dual vertices with `(g(t) - g(s)) (f(y) - f(x)) = E_xy`, where
/// `s`, `t` are the left and right faces of `x -> y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateFunction {
    pub g: Vec<f64>,
    pub base: usize,
}

/// Conjugate of a solution with rays at the boundary vertices, anchored at
/// the arc following the lowest boundary vertex on the clockwise walk.
pub fn conjugate(emb: &PlanarEmbedding, solution: &EnharmonicSolution) -> Result<(DualNetwork, ConjugateFunction)> {
    let net = emb.network();
    let dual = build_dual(emb)?;
    let low = *net
        .boundary()
        .iter()
        .min_by(|&&a, &&b| solution.h[a].total_cmp(&solution.h[b]))
        .ok_or(Error::InvalidInput("empty boundary".into()))?;
    let base_arc = dual.arcs.iter().position(|a| a.from_terminal == low).unwrap();
    let energies = Energies::new(net, solution.energies.clone())?;
    let g = conjugate_with(emb, &dual, &solution.h, &energies, dual.arc_vertex(base_arc))?;
    Ok((dual, g))
}

/// Integrates `E / df` across primal edges starting from `g(base) = 0`.
pub fn conjugate_with(
    emb: &PlanarEmbedding,
    dual: &DualNetwork,
    f: &[f64],
    energies: &Energies,
    base: usize,
) -> Result<ConjugateFunction> {
    let net = emb.network();
    let nd = dual.vertex_count();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nd];
    for e in 0..net.edge_count() {
        adj[dual.left[e]].push((e, dual.right[e]));
        adj[dual.right[e]].push((e, dual.left[e]));
    }
    let jump = |e: usize| -> Result<f64> {
        let edge = net.edge(e);
        let df = f[edge.head] - f[edge.tail];
        if df == 0.0 {
            return Err(Error::ZeroDifference(edge.id.clone()));
        }
        Ok(energies.values()[e] / df)
    };
    let mut g = vec![f64::NAN; nd];
    g[base] = 0.0;
    let mut queue = VecDeque::from([base]);
    while let Some(s) = queue.pop_front() {
        for &(e, t) in &adj[s] {
            if g[t].is_nan() {
                let j = jump(e)?;
                g[t] = if dual.left[e] == s { g[s] + j } else { g[s] - j };
                queue.push_back(t);
            }
        }
    }
    let tol = 1e-9 * energies.total();
    let mut worst = 0.0f64;
    for e in 0..net.edge_count() {
        let defect = (g[dual.right[e]] - g[dual.left[e]] - jump(e)?).abs();
        worst = worst.max(if defect.is_nan() { f64::INFINITY } else { defect });
    }
    if worst > tol {
        let lap = {
            let mut out = vec![0.0; net.vertex_count()];
            for e in 0..net.edge_count() {
                let edge = net.edge(e);
                let q = energies.values()[e] / (f[edge.tail] - f[edge.head]);
                out[edge.tail] += q;
                out[edge.head] -= q;
            }
            out
        };
        let v = net
            .interior()
            .into_iter()
            .max_by(|&a, &b| lap[a].abs().total_cmp(&lap[b].abs()))
            .unwrap_or(0);
        return Err(Error::NotIntegrable { vertex: net.vertex_id(v).to_string(), defect: worst });
    }
    Ok(ConjugateFunction { g, base })
}
