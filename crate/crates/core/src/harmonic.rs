//! The classical linear Dirichlet problem and the conductance-to-energy map.

use crate::error::{Error, Result};
use crate::linalg::SparseSym;
use crate::network::{BoundaryValues, Conductances, ConstraintSet, Network};

/// Harmonic extension of boundary data together with its current 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub h: Vec<f64>,
    /// `omega[e] = c_e * (h(head) - h(tail))`.
    pub omega: Vec<f64>,
}

/// Solves `sum_y c_xy (h(x) - h(y)) = 0` at every interior vertex with
/// `h = u` on the boundary.
pub fn solve_dirichlet(net: &Network, u: &BoundaryValues, c: &Conductances) -> Result<HarmonicSolution> {
    solve_constrained(net, &ConstraintSet::from_boundary(net, u), c.values())
}

/// Weighted-Laplacian solve with an arbitrary fixed set. `weights` must be
/// positive; they need not satisfy the [`Conductances`] checks otherwise.
pub fn solve_constrained(net: &Network, constraints: &ConstraintSet, weights: &[f64]) -> Result<HarmonicSolution> {
    let h = laplace_solve(net, constraints, weights, None)?;
    let omega = current_flow_from(net, weights, &h);
    Ok(HarmonicSolution { h, omega })
}

/// Solves `L_w h = rhs` on the free vertices, where `L_w` is the weighted
/// Laplacian and fixed vertices take their prescribed values. With
/// `rhs = None` the right-hand side is zero.
pub(crate) fn laplace_solve(
    net: &Network,
    constraints: &ConstraintSet,
    weights: &[f64],
    rhs: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = net.vertex_count();
    let free = constraints.free_vertices();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }
    let mut a = SparseSym::new(free.len());
    let mut b = vec![0.0; free.len()];
    if let Some(r) = rhs {
        for (k, &v) in free.iter().enumerate() {
            b[k] = r[v];
        }
    }
    for (e, edge) in net.edges().iter().enumerate() {
        let w = weights[e];
        let (s, t) = (slot[edge.tail], slot[edge.head]);
        match (s != usize::MAX, t != usize::MAX) {
            (true, true) => {
                a.diag[s] += w;
                a.diag[t] += w;
                a.off.push((s, t, -w));
            }
            (true, false) => {
                a.diag[s] += w;
                b[s] += w * constraints.value(edge.head).unwrap();
            }
            (false, true) => {
                a.diag[t] += w;
                b[t] += w * constraints.value(edge.tail).unwrap();
            }
            (false, false) => {}
        }
    }
    if free.iter().any(|&v| a.diag[slot[v]] == 0.0) {
        return Err(Error::SingularSystem);
    }
    let x = a.solve(&b)?;
    let mut h: Vec<f64> = (0..n).map(|v| constraints.value(v).unwrap_or(0.0)).collect();
    for (k, &v) in free.iter().enumerate() {
        h[v] = x[k];
    }
    Ok(h)
}

fn current_flow_from(net: &Network, c: &[f64], h: &[f64]) -> Vec<f64> {
    net.differential(h).iter().zip(c).map(|(d, c)| c * d).collect()
}

/// Current 1-form `omega = c * dh`, relative to stored edge directions.
pub fn current_flow(net: &Network, c: &Conductances, solution: &HarmonicSolution) -> Vec<f64> {
    current_flow_from(net, c.values(), &solution.h)
}

/// `E_e = c_e (h(x) - h(y))^2`. Entries may be zero.
pub fn psi(net: &Network, u: &BoundaryValues, c: &Conductances) -> Result<Vec<f64>> {
    let sol = solve_dirichlet(net, u, c)?;
    Ok(energies_of(net, c.values(), &sol.h))
}

pub(crate) fn energies_of(net: &Network, c: &[f64], h: &[f64]) -> Vec<f64> {
    net.differential(h).iter().zip(c).map(|(d, c)| c * d * d).collect()
}

/// Net current leaving each boundary vertex into the network, aligned with
/// [`Network::boundary`]. Current runs from high to low potential.
pub fn boundary_currents(net: &Network, omega: &[f64]) -> Vec<f64> {
    net.boundary()
        .iter()
        .map(|&b| {
            net.incident(b)
                .iter()
                .map(|&e| if net.edge(e).head == b { omega[e] } else { -omega[e] })
                .sum()
        })
        .collect()
}

/// `sum_y w_xy (h(x) - h(y))` at every vertex.
pub fn laplacian(net: &Network, weights: &[f64], h: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; net.vertex_count()];
    for (e, edge) in net.edges().iter().enumerate() {
        let flow = weights[e] * (h[edge.tail] - h[edge.head]);
        out[edge.tail] += flow;
        out[edge.head] -= flow;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Network {
        Network::from_ids(&["v0", "m", "v1"], &[("e1", "v0", "m"), ("e2", "m", "v1")], &["v0", "v1"]).unwrap()
    }

    #[test]
    fn path_balance() {
        let net = path();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        let c = Conductances::new(&net, vec![1.0, 2.0]).unwrap();
        let sol = solve_dirichlet(&net, &u, &c).unwrap();
        assert!((sol.h[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!(sol.omega.iter().all(|w| (w - 2.0 / 3.0).abs() < 1e-15));
        let e = psi(&net, &u, &c).unwrap();
        assert!((e[0] - 4.0 / 9.0).abs() < 1e-15 && (e[1] - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn single_edge() {
        let net = Network::from_ids(&["a", "b"], &[("e", "a", "b")], &["a", "b"]).unwrap();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        let sol = solve_dirichlet(&net, &u, &Conductances::new(&net, vec![5.0]).unwrap()).unwrap();
        assert_eq!(sol.h, vec![0.0, 1.0]);
        assert_eq!(sol.omega, vec![5.0]);
        assert_eq!(psi(&net, &u, &Conductances::new(&net, vec![3.0]).unwrap()).unwrap(), vec![3.0]);
    }

    #[test]
    fn currents_leave_the_high_terminal() {
        let net = path();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        let c = Conductances::new(&net, vec![1.0, 2.0]).unwrap();
        let sol = solve_dirichlet(&net, &u, &c).unwrap();
        let i = boundary_currents(&net, &sol.omega);
        assert!((i[0] + 2.0 / 3.0).abs() < 1e-15 && (i[1] - 2.0 / 3.0).abs() < 1e-15);
    }
}
