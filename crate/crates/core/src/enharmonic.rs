//! The fixed-energy inverse problem.
//!
//! For an orientation `σ` compatible with the constraints, the functions
//! inducing `σ` form an open polytope. On it the log-objective
//! `Σ E_e log|h(x) - h(y)|` is strictly concave and tends to `-∞` at the
//! boundary, so it has a unique maximizer. That maximizer is the enharmonic
//! function: the gradient of the objective is the enharmonic Laplacian.

use std::thread;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::harmonic::laplace_solve;
use crate::network::{
    enumerate_compatible_orientations, BoundaryValues, Conductances, ConstraintSet, Energies, Network, Orientation,
};
use crate::network::topological_order;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Residual tolerance in units of `Σ E / (max fixed - min fixed)`.
    pub relative_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iterations: 200, relative_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnharmonicSolution {
    pub h: Vec<f64>,
    pub sigma: Orientation,
    pub energies: Vec<f64>,
    pub conductances: Vec<f64>,
    pub log_objective: f64,
    /// Infinity norm of the enharmonic Laplacian over free vertices.
    pub residual: f64,
    pub iterations: usize,
}

fn gaps(net: &Network, h: &[f64]) -> Result<Vec<f64>> {
    net.edges()
        .iter()
        .map(|e| {
            let d = h[e.tail] - h[e.head];
            if d == 0.0 {
                Err(Error::ZeroDifference(e.id.clone()))
            } else {
                Ok(d)
            }
        })
        .collect()
}

/// `Σ_e E_e log|h(tail) - h(head)|`.
pub fn log_objective(net: &Network, energies: &Energies, h: &[f64]) -> Result<f64> {
    Ok(gaps(net, h)?.iter().zip(energies.values()).map(|(d, e)| e * d.abs().ln()).sum())
}

/// The enharmonic Laplacian `Lh(x) = Σ_{y~x} E_xy / (h(x) - h(y))` at every
/// free vertex, in [`ConstraintSet::free_vertices`] order.
pub fn residual(net: &Network, constraints: &ConstraintSet, energies: &Energies, h: &[f64]) -> Result<Vec<f64>> {
    let full = enharmonic_laplacian(net, energies, h)?;
    Ok(constraints.free_vertices().into_iter().map(|v| full[v]).collect())
}

fn enharmonic_laplacian(net: &Network, energies: &Energies, h: &[f64]) -> Result<Vec<f64>> {
    let d = gaps(net, h)?;
    let mut out = vec![0.0; net.vertex_count()];
    for (k, edge) in net.edges().iter().enumerate() {
        let q = energies.values()[k] / d[k];
        out[edge.tail] += q;
        out[edge.head] -= q;
    }
    Ok(out)
}

/// Hessian of [`log_objective`] in the free coordinates: the negative of the
/// weighted Laplacian with weights `E_e / dh_e²`.
pub fn hessian(net: &Network, constraints: &ConstraintSet, energies: &Energies, h: &[f64]) -> Result<DMatrix<f64>> {
    let d = gaps(net, h)?;
    let free = constraints.free_vertices();
    let mut slot = vec![usize::MAX; net.vertex_count()];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }
    let mut m = DMatrix::zeros(free.len(), free.len());
    for (k, edge) in net.edges().iter().enumerate() {
        let w = energies.values()[k] / (d[k] * d[k]);
        let (s, t) = (slot[edge.tail], slot[edge.head]);
        if s != usize::MAX {
            m[(s, s)] -= w;
        }
        if t != usize::MAX {
            m[(t, t)] -= w;
        }
        if s != usize::MAX && t != usize::MAX {
            m[(s, t)] += w;
            m[(t, s)] += w;
        }
    }
    Ok(m)
}

/// `c_e = E_e / (h(x) - h(y))²`.
pub fn conductances_of(net: &Network, energies: &Energies, h: &[f64]) -> Result<Conductances> {
    let d = gaps(net, h)?;
    Conductances::new(net, d.iter().zip(energies.values()).map(|(d, e)| e / (d * d)).collect())
}

/// A point of the open polytope of functions inducing `σ`, with unit edge
/// lengths and the midpoint of the feasible band.
pub fn initial_point(net: &Network, constraints: &ConstraintSet, sigma: &Orientation) -> Result<Vec<f64>> {
    initial_point_with(net, constraints, sigma, &vec![1.0; net.edge_count()], 0.5)
}

/// Interior point from longest-path bounds.
///
/// With edge lengths `ℓ > 0` and a scale `t`, let `U` be the largest and `Lo`
/// the smallest function that respects the fixed values and drops by at
/// least `t ℓ_e` along every directed edge. The largest admissible `t` is
/// `min (u(a) - u(b)) / L(a, b)` over fixed pairs joined by a directed path
/// of maximal length `L`. Any blend `λ U + (1 - λ) Lo` then drops by at least
/// `t ℓ_e` on each edge.
pub fn initial_point_with(
    net: &Network,
    constraints: &ConstraintSet,
    sigma: &Orientation,
    lengths: &[f64],
    lambda: f64,
) -> Result<Vec<f64>> {
    let n = net.vertex_count();
    let mut out_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut in_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in 0..net.edge_count() {
        let (a, b) = sigma.directed(net, e);
        out_adj[a].push((b, lengths[e]));
        in_adj[b].push((a, lengths[e]));
    }
    let plain: Vec<Vec<usize>> = out_adj.iter().map(|s| s.iter().map(|&(w, _)| w).collect()).collect();
    let order = topological_order(&plain).ok_or(Error::Infeasible)?;

    let fixed = constraints.fixed_vertices();
    let mut t = f64::INFINITY;
    for &a in &fixed {
        let mut longest = vec![f64::NEG_INFINITY; n];
        longest[a] = 0.0;
        for &v in &order {
            if longest[v] == f64::NEG_INFINITY {
                continue;
            }
            for &(w, l) in &out_adj[v] {
                longest[w] = longest[w].max(longest[v] + l);
            }
        }
        let ua = constraints.value(a).unwrap();
        for &b in &fixed {
            if b != a && longest[b] > 0.0 {
                let drop = ua - constraints.value(b).unwrap();
                if drop <= 0.0 {
                    return Err(Error::Infeasible);
                }
                t = t.min(drop / longest[b]);
            }
        }
    }
    if !t.is_finite() {
        t = 1.0;
    }

    let mut upper = vec![f64::INFINITY; n];
    for &v in &order {
        let mut val = constraints.value(v).unwrap_or(f64::INFINITY);
        for &(p, l) in &in_adj[v] {
            val = val.min(upper[p] - t * l);
        }
        upper[v] = val;
    }
    let mut lower = vec![f64::NEG_INFINITY; n];
    for &v in order.iter().rev() {
        let mut val = constraints.value(v).unwrap_or(f64::NEG_INFINITY);
        for &(q, l) in &out_adj[v] {
            val = val.max(lower[q] + t * l);
        }
        lower[v] = val;
    }
    let mut h = vec![0.0; n];
    for v in 0..n {
        if !upper[v].is_finite() || !lower[v].is_finite() {
            return Err(Error::Infeasible);
        }
        h[v] = match constraints.value(v) {
            Some(x) => x,
            None => lambda * upper[v] + (1.0 - lambda) * lower[v],
        };
    }
    for e in 0..net.edge_count() {
        let (a, b) = sigma.directed(net, e);
        if !(h[a] > h[b]) {
            return Err(Error::Infeasible);
        }
    }
    Ok(h)
}

/// Maximizes the log-objective over the polytope of `σ`.
pub fn solve_enharmonic(
    net: &Network,
    constraints: &ConstraintSet,
    energies: &Energies,
    sigma: &Orientation,
) -> Result<EnharmonicSolution> {
    let start = initial_point(net, constraints, sigma)?;
    solve_enharmonic_from(net, constraints, energies, sigma, start, SolverOptions::default())
}

/// Damped Newton iteration from a given interior point of the polytope.
pub fn solve_enharmonic_from(
    net: &Network,
    constraints: &ConstraintSet,
    energies: &Energies,
    sigma: &Orientation,
    start: Vec<f64>,
    options: SolverOptions,
) -> Result<EnharmonicSolution> {
    if energies.values().len() != net.edge_count() || sigma.len() != net.edge_count() {
        return Err(Error::InvalidInput("energy and orientation lengths must match the edge count".into()));
    }
    let mut h = start;
    for (v, x) in h.iter_mut().enumerate() {
        if let Some(val) = constraints.value(v) {
            *x = val;
        }
    }
    let oriented = |h: &[f64]| (0..net.edge_count()).all(|e| {
        let (a, b) = sigma.directed(net, e);
        h[a] > h[b]
    });
    if !oriented(&h) {
        return Err(Error::Infeasible);
    }
    let spread = constraints.spread();
    let scale = if spread > 0.0 { energies.total() / spread } else { energies.total() };
    let tol = options.relative_tolerance * scale;
    let free = constraints.free_vertices();
    let zero_fixed = ConstraintSet::new(net, &constraints.fixed_vertices().into_iter().map(|v| (v, 0.0)).collect::<Vec<_>>())?;

    let mut phi = log_objective(net, energies, &h)?;
    let mut grad = enharmonic_laplacian(net, energies, &h)?;
    let mut res = free.iter().fold(0.0f64, |m, &v| m.max(grad[v].abs()));
    let mut iterations = 0;
    while res > tol {
        if iterations == options.max_iterations {
            return Err(Error::NoConvergence { iterations, residual: res });
        }
        iterations += 1;
        let d = gaps(net, &h)?;
        let weights: Vec<f64> = d.iter().zip(energies.values()).map(|(d, e)| e / (d * d)).collect();
        // Newton direction: L_w p = ∇φ with p = 0 on fixed vertices.
        let p = laplace_solve(net, &zero_fixed, &weights, Some(&grad))?;
        let mut alpha_max = f64::INFINITY;
        for (k, edge) in net.edges().iter().enumerate() {
            let rate = p[edge.tail] - p[edge.head];
            if rate * d[k] < 0.0 {
                alpha_max = alpha_max.min(-d[k] / rate);
            }
        }
        let slope: f64 = free.iter().map(|&v| grad[v] * p[v]).sum();
        let mut alpha = (0.9 * alpha_max).min(1.0);
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = h.iter().zip(&p).map(|(x, dx)| x + alpha * dx).collect();
            if oriented(&trial) {
                let phi_t = log_objective(net, energies, &trial)?;
                if phi_t >= phi + 1e-4 * alpha * slope {
                    accepted = Some((trial, phi_t));
                    break;
                }
                let g_t = enharmonic_laplacian(net, energies, &trial)?;
                let res_t = free.iter().fold(0.0f64, |m, &v| m.max(g_t[v].abs()));
                // Near the optimum φ is flat to roundoff; accept steps that
                // still shrink the gradient.
                if res_t < res && phi_t >= phi - 1e-12 * phi.abs().max(1.0) {
                    accepted = Some((trial, phi_t));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, phi_t)) = accepted else {
            return Err(Error::NoConvergence { iterations, residual: res });
        };
        h = trial;
        phi = phi_t;
        grad = enharmonic_laplacian(net, energies, &h)?;
        res = free.iter().fold(0.0f64, |m, &v| m.max(grad[v].abs()));
    }
    let conductances = conductances_of(net, energies, &h)?.values().to_vec();
    Ok(EnharmonicSolution {
        h,
        sigma: sigma.clone(),
        energies: energies.values().to_vec(),
        conductances,
        log_objective: phi,
        residual: res,
        iterations,
    })
}

/// One solution per compatible orientation, in enumeration order.
pub fn solve_all(net: &Network, u: &BoundaryValues, energies: &Energies) -> Result<Vec<EnharmonicSolution>> {
    solve_all_parallel(net, u, energies, 1)
}

/// As [`solve_all`], spreading orientations over `threads` worker threads.
/// The output order does not depend on the thread count.
pub fn solve_all_parallel(
    net: &Network,
    u: &BoundaryValues,
    energies: &Energies,
    threads: usize,
) -> Result<Vec<EnharmonicSolution>> {
    let constraints = ConstraintSet::from_boundary(net, u);
    let sigmas = enumerate_compatible_orientations(net, u)?;
    let threads = threads.max(1).min(sigmas.len().max(1));
    if threads == 1 {
        return sigmas.iter().map(|s| solve_enharmonic(net, &constraints, energies, s)).collect();
    }
    let chunk = sigmas.len().div_ceil(threads);
    let results: Vec<Result<Vec<EnharmonicSolution>>> = thread::scope(|scope| {
        let handles: Vec<_> = sigmas
            .chunks(chunk)
            .map(|part| {
                let constraints = &constraints;
                scope.spawn(move || part.iter().map(|s| solve_enharmonic(net, constraints, energies, s)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(sigmas.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> (Network, ConstraintSet) {
        let net = Network::from_ids(&["v0", "m", "v1"], &[("e1", "v0", "m"), ("e2", "m", "v1")], &["v0", "v1"]).unwrap();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        let cs = ConstraintSet::from_boundary(&net, &u);
        (net, cs)
    }

    #[test]
    fn objective_and_residual_by_hand() {
        let (net, cs) = path();
        let e = Energies::new(&net, vec![1.0, 1.0]).unwrap();
        let h = [0.0, 0.5, 1.0];
        assert!((log_objective(&net, &e, &h).unwrap() - 2.0 * 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(residual(&net, &cs, &e, &h).unwrap(), vec![0.0]);
        let e2 = Energies::new(&net, vec![1.0, 2.0]).unwrap();
        assert!((residual(&net, &cs, &e2, &h).unwrap()[0] + 2.0).abs() < 1e-15);
        let single = Network::from_ids(&["a", "b"], &[("e", "a", "b")], &["a", "b"]).unwrap();
        assert_eq!(log_objective(&single, &Energies::uniform(&single, 1.0).unwrap(), &[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn path_closed_form() {
        let (net, cs) = path();
        let sigma = Orientation::new(vec![-1, -1]).unwrap();
        let e = Energies::new(&net, vec![1.0, 2.0]).unwrap();
        let sol = solve_enharmonic(&net, &cs, &e, &sigma).unwrap();
        assert!((sol.h[1] - 1.0 / 3.0).abs() < 1e-12);
        let c = conductances_of(&net, &Energies::uniform(&net, 1.0).unwrap(), &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(c.values(), &[4.0, 4.0]);
    }

    #[test]
    fn initial_point_is_strictly_inside() {
        let (net, cs) = path();
        let sigma = Orientation::new(vec![-1, -1]).unwrap();
        let h = initial_point(&net, &cs, &sigma).unwrap();
        assert!(h[1] > 0.0 && h[1] < 1.0);
        let wrong = Orientation::new(vec![1, 1]).unwrap();
        assert_eq!(initial_point(&net, &cs, &wrong).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn zero_energy_rejected() {
        let (net, _) = path();
        assert_eq!(Energies::new(&net, vec![1.0, 0.0]).unwrap_err(), Error::ZeroEnergy("e2".into()));
    }
}
