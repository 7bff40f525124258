use nalgebra::{DMatrix, DVector};

use crate::linalg::orthonormalize;

use super::Network;

/// Edge-space decomposition `R^E = W_cob ⊕ W_cyc`.
///
/// `d` has one column per interior vertex `v`, holding the 1-form `d1_v`
/// (`+1` on edges whose head is `v`, `-1` where `v` is the tail). `W_cob` is
/// its column space and `W_cyc` the orthogonal complement, i.e. the 1-forms
/// with zero divergence at every interior vertex.
#[derive(Debug, Clone)]
pub struct ChainSpaces {
    pub interior: Vec<usize>,
    pub d: DMatrix<f64>,
    pub cob: DMatrix<f64>,
    pub cyc: DMatrix<f64>,
}

pub fn chain_spaces(net: &Network) -> ChainSpaces {
    let m = net.edge_count();
    let interior = net.interior();
    let mut d = DMatrix::zeros(m, interior.len());
    for (col, &v) in interior.iter().enumerate() {
        for &e in net.incident(v) {
            let edge = net.edge(e);
            d[(e, col)] += if edge.head == v { 1.0 } else { -1.0 };
        }
    }
    let cols: Vec<DVector<f64>> = d.column_iter().map(|c| c.into_owned()).collect();
    let cob = orthonormalize(&[], &cols, 1e-10);
    let unit: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            let mut v = DVector::zeros(m);
            v[i] = 1.0;
            v
        })
        .collect();
    let cyc = orthonormalize(&cob, &unit, 1e-8);
    ChainSpaces { interior, d, cob: stack(m, &cob), cyc: stack(m, &cyc) }
}

fn stack(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

impl ChainSpaces {
    pub fn dim_cob(&self) -> usize {
        self.cob.ncols()
    }

    pub fn dim_cyc(&self) -> usize {
        self.cyc.ncols()
    }

    /// Orthogonal projector onto `W_cob`.
    pub fn p_cob(&self) -> DMatrix<f64> {
        &self.cob * self.cob.transpose()
    }

    /// Orthogonal projector onto `W_cyc`.
    pub fn p_cyc(&self) -> DMatrix<f64> {
        &self.cyc * self.cyc.transpose()
    }

    /// Divergence `d^T w` of a 1-form at each interior vertex.
    pub fn divergence(&self, w: &[f64]) -> Vec<f64> {
        (self.d.transpose() * DVector::from_column_slice(w)).as_slice().to_vec()
    }
}
