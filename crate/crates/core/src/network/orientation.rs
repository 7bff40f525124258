use crate::error::{Error, Result};

use super::{BoundaryValues, ConstraintSet, Network};

/// Default edge-count cap for [`enumerate_compatible_orientations`].
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Per-edge sign relative to the stored direction: `+1` means the edge is
/// directed tail -> head (the tail carries the larger value).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation(Vec<i8>);

impl Orientation {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("orientation signs must be +1 or -1".into()));
        }
        Ok(Orientation(signs))
    }

    /// All edges in their stored direction.
    pub fn forward(edge_count: usize) -> Self {
        Orientation(vec![1; edge_count])
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn sign(&self, e: usize) -> f64 {
        f64::from(self.0[e])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(from, to)` of edge `e` under this orientation.
    pub fn directed(&self, net: &Network, e: usize) -> (usize, usize) {
        let edge = net.edge(e);
        if self.0[e] > 0 {
            (edge.tail, edge.head)
        } else {
            (edge.head, edge.tail)
        }
    }

    /// Compact `+-` rendering in edge order.
    pub fn to_sign_string(&self) -> String {
        self.0.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }

    pub fn from_sign_string(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidInput(format!("bad orientation character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(Orientation)
    }
}

/// Orientation from larger to smaller values: `sgn(h(tail) - h(head))`.
pub fn orientation_from_function(net: &Network, h: &[f64]) -> Result<Orientation> {
    net.edges()
        .iter()
        .map(|e| {
            let d = h[e.tail] - h[e.head];
            if d > 0.0 {
                Ok(1)
            } else if d < 0.0 {
                Ok(-1)
            } else {
                Err(Error::ZeroDifference(e.id.clone()))
            }
        })
        .collect::<Result<Vec<i8>>>()
        .map(Orientation)
}

/// Compatibility with ordinary Dirichlet data `u` on `B`.
pub fn is_compatible(net: &Network, u: &BoundaryValues, sigma: &Orientation) -> bool {
    is_compatible_with(net, &ConstraintSet::from_boundary(net, u), sigma)
}

/// Compatibility with a general constraint set: acyclic, no free sink or
/// source, and a directed path between fixed vertices `a ~> b` only when
/// `value(a) > value(b)`.
pub fn is_compatible_with(net: &Network, constraints: &ConstraintSet, sigma: &Orientation) -> bool {
    if sigma.len() != net.edge_count() {
        return false;
    }
    let n = net.vertex_count();
    let mut out_adj = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for e in 0..net.edge_count() {
        let (a, b) = sigma.directed(net, e);
        out_adj[a].push(b);
        outdeg[a] += 1;
        indeg[b] += 1;
    }
    for v in 0..n {
        if !constraints.is_fixed(v) && (indeg[v] == 0 || outdeg[v] == 0) {
            return false;
        }
    }
    if topological_order(&out_adj).is_none() {
        return false;
    }
    for a in constraints.fixed_vertices() {
        let ua = constraints.value(a).unwrap();
        let reach = reachable(&out_adj, a);
        for b in constraints.fixed_vertices() {
            if b != a && reach[b] && ua <= constraints.value(b).unwrap() {
                return false;
            }
        }
    }
    true
}

pub(crate) fn topological_order(out_adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = out_adj.len();
    let mut indeg = vec![0usize; n];
    for succ in out_adj {
        for &w in succ {
            indeg[w] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &out_adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn reachable(out_adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; out_adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &out_adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// All orientations compatible with `u`, each once.
///
/// Order is lexicographic in the per-edge signs with `+1` ranked before
/// `-1`, i.e. the stored direction is tried first on every edge.
pub fn enumerate_compatible_orientations(net: &Network, u: &BoundaryValues) -> Result<Vec<Orientation>> {
    enumerate_compatible_orientations_capped(net, u, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_compatible_orientations_capped(
    net: &Network,
    u: &BoundaryValues,
    cap: usize,
) -> Result<Vec<Orientation>> {
    if net.edge_count() > cap {
        return Err(Error::TooLarge { edges: net.edge_count(), cap });
    }
    let constraints = ConstraintSet::from_boundary(net, u);
    let mut search = Search::new(net, &constraints);
    search.run(0);
    Ok(search.found)
}

/// Depth-first sign assignment with incremental pruning.
struct Search<'a> {
    net: &'a Network,
    constraints: &'a ConstraintSet,
    signs: Vec<i8>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    unassigned: Vec<usize>,
    found: Vec<Orientation>,
}

impl<'a> Search<'a> {
    fn new(net: &'a Network, constraints: &'a ConstraintSet) -> Self {
        let n = net.vertex_count();
        Search {
            net,
            constraints,
            signs: vec![0; net.edge_count()],
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            unassigned: (0..n).map(|v| net.incident(v).len()).collect(),
            found: Vec::new(),
        }
    }

    fn run(&mut self, e: usize) {
        if e == self.net.edge_count() {
            let sigma = Orientation(self.signs.clone());
            debug_assert!(is_compatible_with(self.net, self.constraints, &sigma));
            self.found.push(sigma);
            return;
        }
        let edge = self.net.edge(e);
        let (tail, head) = (edge.tail, edge.head);
        for sign in [1i8, -1] {
            let (from, to) = if sign > 0 { (tail, head) } else { (head, tail) };
            if self.reaches(to, from) {
                continue;
            }
            self.out_adj[from].push(to);
            self.in_adj[to].push(from);
            self.unassigned[tail] -= 1;
            self.unassigned[head] -= 1;
            self.signs[e] = sign;
            if self.endpoint_ok(from) && self.endpoint_ok(to) && self.boundary_ok(from, to) {
                self.run(e + 1);
            }
            self.signs[e] = 0;
            self.unassigned[tail] += 1;
            self.unassigned[head] += 1;
            self.out_adj[from].pop();
            self.in_adj[to].pop();
        }
    }

    fn reaches(&self, start: usize, target: usize) -> bool {
        if start == target {
            return true;
        }
        let mut seen = vec![false; self.out_adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.out_adj[v] {
                if w == target {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// A free vertex whose edges are all assigned needs an in- and an out-edge.
    fn endpoint_ok(&self, v: usize) -> bool {
        self.constraints.is_fixed(v)
            || self.unassigned[v] > 0
            || (!self.in_adj[v].is_empty() && !self.out_adj[v].is_empty())
    }

    /// The new arc `from -> to` must not create a path between fixed vertices
    /// that runs uphill or level.
    fn boundary_ok(&self, from: usize, to: usize) -> bool {
        let upstream = self.collect(from, &self.in_adj);
        let downstream = self.collect(to, &self.out_adj);
        for &a in &upstream {
            let Some(ua) = self.constraints.value(a) else { continue };
            for &b in &downstream {
                if let Some(ub) = self.constraints.value(b) {
                    if ua <= ub {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn collect(&self, start: usize, adj: &[Vec<usize>]) -> Vec<usize> {
        let mut seen = vec![false; adj.len()];
        let mut stack = vec![start];
        let mut out = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                    out.push(w);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> (Network, BoundaryValues) {
        let net = Network::from_ids(&["v0", "m", "v1"], &[("e1", "v0", "m"), ("e2", "m", "v1")], &["v0", "v1"]).unwrap();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        (net, u)
    }

    #[test]
    fn monotone_function_orients_toward_low_end() {
        let (net, _) = path();
        let sigma = orientation_from_function(&net, &[0.0, 0.5, 1.0]).unwrap();
        // e1 = v0 -> m with h(v0) < h(m): directed m -> v0, against storage.
        assert_eq!(sigma.signs(), &[-1, -1]);
        assert_eq!(sigma.directed(&net, 0), (1, 0));
        assert_eq!(sigma.directed(&net, 1), (2, 1));
    }

    #[test]
    fn equal_endpoint_values_rejected() {
        let (net, _) = path();
        let err = orientation_from_function(&net, &[0.0, 0.5, 0.5]).unwrap_err();
        assert_eq!(err, Error::ZeroDifference("e2".into()));
    }

    #[test]
    fn interior_sink_is_incompatible() {
        let (net, u) = path();
        assert!(is_compatible(&net, &u, &Orientation::new(vec![-1, -1]).unwrap()));
        // both edges pointing at m
        assert!(!is_compatible(&net, &u, &Orientation::new(vec![1, -1]).unwrap()));
        // flowing uphill from v0 to v1
        assert!(!is_compatible(&net, &u, &Orientation::new(vec![1, 1]).unwrap()));
    }

    #[test]
    fn path_has_one_orientation_and_cap_is_enforced() {
        let (net, u) = path();
        let all = enumerate_compatible_orientations(&net, &u).unwrap();
        assert_eq!(all, vec![Orientation::new(vec![-1, -1]).unwrap()]);
        let err = enumerate_compatible_orientations_capped(&net, &u, 1).unwrap_err();
        assert_eq!(err, Error::TooLarge { edges: 2, cap: 1 });
    }

    #[test]
    fn sign_string_round_trip() {
        let s = Orientation::from_sign_string("+-+").unwrap();
        assert_eq!(s.to_sign_string(), "+-+");
        assert!(Orientation::from_sign_string("+x").is_err());
    }
}
