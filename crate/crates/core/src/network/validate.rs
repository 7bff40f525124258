use std::collections::VecDeque;

use super::Network;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewBoundaryVertices(usize),
    Disconnected { unreached: Vec<String> },
    /// The edge lies on no simple path between two distinct boundary vertices.
    EdgeOffBoundaryPath(String),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::TooFewBoundaryVertices(n) => write!(f, "boundary has {n} vertices, need at least 2"),
            Violation::Disconnected { unreached } => write!(f, "graph is disconnected; unreachable: {}", unreached.join(", ")),
            Violation::EdgeOffBoundaryPath(e) => write!(f, "edge {e} lies on no simple boundary-to-boundary path"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Ids of edges reported as off every boundary path.
    pub fn failing_edges(&self) -> Vec<&str> {
        self.violations
            .iter()
            .filter_map(|v| match v {
                Violation::EdgeOffBoundaryPath(e) => Some(e.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// Checks connectivity, `|B| >= 2`, and that every edge lies on a simple path
/// joining two distinct boundary vertices.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut violations = Vec::new();
    if net.boundary().len() < 2 {
        violations.push(Violation::TooFewBoundaryVertices(net.boundary().len()));
    }
    let unreached = unreachable_from_first(net);
    if !unreached.is_empty() {
        violations.push(Violation::Disconnected {
            unreached: unreached.iter().map(|&v| net.vertex_id(v).to_string()).collect(),
        });
    }
    if net.boundary().len() >= 2 {
        for e in 0..net.edge_count() {
            if !edge_on_boundary_path(net, e) {
                violations.push(Violation::EdgeOffBoundaryPath(net.edge(e).id.clone()));
            }
        }
    }
    ValidationReport { violations }
}

fn unreachable_from_first(net: &Network) -> Vec<usize> {
    let n = net.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &e in net.incident(v) {
            let w = net.edge(e).other(v);
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..n).filter(|&v| !seen[v]).collect()
}

/// Menger test: edge `xy` lies on a simple `B`-to-`B` path iff there are two
/// vertex-disjoint paths, one from `x` and one from `y`, ending in `B`, that
/// avoid the edge itself. Solved as a unit-capacity flow with split vertices.
pub(crate) fn edge_on_boundary_path(net: &Network, e: usize) -> bool {
    let edge = net.edge(e);
    let n = net.vertex_count();
    // Node layout: v_in = 2v, v_out = 2v + 1, source = 2n, sink = 2n + 1.
    let source = 2 * n;
    let sink = 2 * n + 1;
    let mut flow = FlowGraph::new(2 * n + 2);
    for v in 0..n {
        flow.add(2 * v, 2 * v + 1, 1);
        if net.is_boundary(v) {
            flow.add(2 * v + 1, sink, 1);
        }
    }
    for (k, other) in net.edges().iter().enumerate() {
        if k == e {
            continue;
        }
        flow.add(2 * other.tail + 1, 2 * other.head, 1);
        flow.add(2 * other.head + 1, 2 * other.tail, 1);
    }
    flow.add(source, 2 * edge.tail, 1);
    flow.add(source, 2 * edge.head, 1);
    flow.max_flow(source, sink, 2) == 2
}

struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, a: usize, b: usize, c: i32) {
        self.adj[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.adj[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    /// Edmonds-Karp, stopping once `limit` units are routed.
    fn max_flow(&mut self, s: usize, t: usize, limit: i32) -> i32 {
        let mut total = 0;
        while total < limit {
            let mut parent = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            while let Some(v) = queue.pop_front() {
                for &arc in &self.adj[v] {
                    let w = self.to[arc];
                    if self.cap[arc] > 0 && parent[w] == usize::MAX && w != s {
                        parent[w] = arc;
                        if w == t {
                            reached = true;
                            break;
                        }
                        queue.push_back(w);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                break;
            }
            let mut w = t;
            while w != s {
                let arc = parent[w];
                self.cap[arc] -= 1;
                self.cap[arc ^ 1] += 1;
                w = self.to[arc ^ 1];
            }
            total += 1;
        }
        total
    }
}
