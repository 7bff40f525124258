//! The logarithmic Jacobian of the conductance-to-energy map.
//!
//! `J_ij = ∂ log E_i / ∂ log c_j`. At a point with no vanishing energy, edge
//! space splits as `span{d1_v / dh : v interior} ⊕ span{γ / ω : γ ∈ W_cyc}`
//! and `J` acts as `-1` on the first summand and `+1` on the second. The
//! summands are not orthogonal in general, so `J` is an oblique reflection.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::harmonic::{psi, solve_dirichlet};
use crate::linalg::rank;
use crate::network::{chain_spaces, BoundaryValues, Conductances, Network};

/// Default central-difference step in log coordinates.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct JlogReport {
    pub predicted: DMatrix<f64>,
    pub finite_difference: DMatrix<f64>,
    /// `max |J_pred - J_fd|`.
    pub max_deviation: f64,
    /// `max |J_pred² - I|`.
    pub involution_defect: f64,
    /// Multiplicities of the eigenvalues `-1` and `+1` of `J_pred`.
    pub multiplicity_minus: usize,
    pub multiplicity_plus: usize,
    pub det_predicted: f64,
    pub det_finite_difference: f64,
}

/// Reflection through `span{γ/ω}` along `span{d1_v/dh}`.
pub fn predicted_jlog(net: &Network, u: &BoundaryValues, c: &Conductances) -> Result<DMatrix<f64>> {
    let sol = solve_dirichlet(net, u, c)?;
    let dh = net.differential(&sol.h);
    let scale = dh.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (e, &d) in dh.iter().enumerate() {
        if d.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroEnergy(net.edge(e).id.clone()));
        }
    }
    let cs = chain_spaces(net);
    let m = net.edge_count();
    let mut basis = DMatrix::zeros(m, m);
    let mut signs = Vec::with_capacity(m);
    for (j, col) in cs.d.column_iter().enumerate() {
        for e in 0..m {
            basis[(e, j)] = col[e] / dh[e];
        }
        signs.push(-1.0);
    }
    let k = cs.dim_cob();
    for (j, col) in cs.cyc.column_iter().enumerate() {
        for e in 0..m {
            basis[(e, k + j)] = col[e] / sol.omega[e];
        }
        signs.push(1.0);
    }
    let inverse = basis.clone().try_inverse().ok_or(Error::SingularSystem)?;
    Ok(basis * DMatrix::from_diagonal(&DVector::from_vec(signs)) * inverse)
}

/// The orthogonal reading `P_cyc - P_cob`. It agrees with [`predicted_jlog`]
/// only when the two decompositions coincide, e.g. for uniform `dh` and `ω`.
pub fn orthogonal_jlog(net: &Network) -> DMatrix<f64> {
    let cs = chain_spaces(net);
    cs.p_cyc() - cs.p_cob()
}

fn log_energies(net: &Network, u: &BoundaryValues, log_c: &[f64]) -> Result<Vec<f64>> {
    let c = Conductances::new(net, log_c.iter().map(|x| x.exp()).collect())?;
    Ok(psi(net, u, &c)?.into_iter().map(f64::ln).collect())
}

/// Central differences of `log ∘ Ψ ∘ exp` at `log c`.
pub fn fd_jlog(net: &Network, u: &BoundaryValues, c: &Conductances, step: f64) -> Result<DMatrix<f64>> {
    let m = net.edge_count();
    let base: Vec<f64> = c.values().iter().map(|x| x.ln()).collect();
    let mut out = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut plus = base.clone();
        plus[j] += step;
        let mut minus = base.clone();
        minus[j] -= step;
        let ep = log_energies(net, u, &plus)?;
        let em = log_energies(net, u, &minus)?;
        for i in 0..m {
            out[(i, j)] = (ep[i] - em[i]) / (2.0 * step);
        }
    }
    Ok(out)
}

/// Central-difference Jacobian `∂E_i/∂c_j` with relative step `step · c_j`.
pub fn fd_dpsi(net: &Network, u: &BoundaryValues, c: &Conductances, step: f64) -> Result<DMatrix<f64>> {
    let m = net.edge_count();
    let mut out = DMatrix::zeros(m, m);
    for j in 0..m {
        let delta = step * c.values()[j];
        let mut plus = c.values().to_vec();
        plus[j] += delta;
        let mut minus = c.values().to_vec();
        minus[j] -= delta;
        let ep = psi(net, u, &Conductances::new(net, plus)?)?;
        let em = psi(net, u, &Conductances::new(net, minus)?)?;
        for i in 0..m {
            out[(i, j)] = (ep[i] - em[i]) / (2.0 * delta);
        }
    }
    Ok(out)
}

/// `(-1)^{|V|-|B|} ∏ dh²` against the determinant of [`fd_dpsi`].
pub fn det_dpsi_check(net: &Network, u: &BoundaryValues, c: &Conductances) -> Result<(f64, f64)> {
    let sol = solve_dirichlet(net, u, c)?;
    let sign = if (net.vertex_count() - net.boundary().len()) % 2 == 0 { 1.0 } else { -1.0 };
    let predicted = sign * net.differential(&sol.h).iter().map(|d| d * d).product::<f64>();
    let fd = fd_dpsi(net, u, c, FD_STEP)?.determinant();
    Ok((predicted, fd))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn jlog_report(net: &Network, u: &BoundaryValues, c: &Conductances) -> Result<JlogReport> {
    let predicted = predicted_jlog(net, u, c)?;
    let finite_difference = fd_jlog(net, u, c, FD_STEP)?;
    let m = net.edge_count();
    let id = DMatrix::identity(m, m);
    let (det_predicted, det_finite_difference) = det_dpsi_check(net, u, c)?;
    Ok(JlogReport {
        max_deviation: max_abs(&(&predicted - &finite_difference)),
        involution_defect: max_abs(&(&predicted * &predicted - &id)),
        multiplicity_minus: m - rank(&(&predicted + &id), 1e-8),
        multiplicity_plus: m - rank(&(&predicted - &id), 1e-8),
        predicted,
        finite_difference,
        det_predicted,
        det_finite_difference,
    })
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
    fn path_at_equal_conductances_swaps_edges() {
        let (net, u) = path();
        let j = predicted_jlog(&net, &u, &Conductances::new(&net, vec![1.0, 1.0]).unwrap()).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(max_abs(&(j - expected)) < 1e-14);
    }

    #[test]
    fn path_at_one_two_matches_symbolic_derivative() {
        // E1 = c1 c2² / (c1 + c2)², E2 = c2 c1² / (c1 + c2)².
        let (net, u) = path();
        let j = predicted_jlog(&net, &u, &Conductances::new(&net, vec![1.0, 2.0]).unwrap()).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0, -1.0 / 3.0]);
        assert!(max_abs(&(&j - expected)) < 1e-14);
        assert!(max_abs(&(j - orthogonal_jlog(&net))) > 0.3);
    }

    #[test]
    fn single_edge_is_identity() {
        let net = Network::from_ids(&["a", "b"], &[("e", "a", "b")], &["a", "b"]).unwrap();
        let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
        let report = jlog_report(&net, &u, &Conductances::new(&net, vec![3.0]).unwrap()).unwrap();
        assert!((report.predicted[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((report.det_predicted - 1.0).abs() < 1e-15);
        assert_eq!((report.multiplicity_minus, report.multiplicity_plus), (0, 1));
    }

    #[test]
    fn path_determinant() {
        let (net, u) = path();
        let (pred, fd) = det_dpsi_check(&net, &u, &Conductances::new(&net, vec![1.0, 2.0]).unwrap()).unwrap();
        assert!((pred + 4.0 / 81.0).abs() < 1e-15);
        assert!(((fd - pred) / pred).abs() < 1e-6);
    }
}
