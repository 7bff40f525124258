//! Small worked examples with known answers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{square_problem, BoundarySpec, EnergyMode};
use crate::network::{BoundaryValues, Energies, Network};
use crate::numtheory::RationalPolynomial;
use crate::planar::{PlanarEmbedding, RectTiling, Tile};

/// An expected quantity and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownAnswer {
    pub quantity: String,
    pub values: Vec<f64>,
    pub source: String,
}

impl KnownAnswer {
    fn new(quantity: &str, values: Vec<f64>, source: &str) -> Self {
        KnownAnswer { quantity: quantity.into(), values, source: source.into() }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub net: Network,
    pub u: BoundaryValues,
    pub energies: Energies,
    /// Counter-clockwise edge order around every vertex.
    pub rotation: Option<Vec<Vec<usize>>>,
    pub known: Vec<KnownAnswer>,
}

impl Fixture {
    pub fn embedding(&self) -> Option<Result<PlanarEmbedding>> {
        self.rotation.as_ref().map(|r| PlanarEmbedding::new(&self.net, r.clone()))
    }

    pub fn known(&self, quantity: &str) -> Option<&KnownAnswer> {
        self.known.iter().find(|k| k.quantity == quantity)
    }
}

/// Names accepted by [`by_name`].
pub const FIXTURE_NAMES: &[&str] = &["path", "small-graph", "jacobi", "star", "grid"];

/// Fixture by name with default parameters: `path` has two edges, `jacobi`
/// is `(2, 1, 1)`, `star` uses anchors `(0, 1, 6)` and `grid` is `4 × 4`.
pub fn by_name(name: &str) -> Result<Fixture> {
    match name {
        "path" => make_path(2),
        "small-graph" => Ok(make_small_graph()),
        "jacobi" => make_jacobi(2, 1.0, 1.0),
        "star" => make_star(&[0.0, 1.0, 6.0], &[2.0 / 3.0, 1.0 / 5.0, 2.0 / 15.0]),
        "grid" => make_grid(4),
        other => Err(Error::InvalidInput(format!("unknown fixture {other:?}"))),
    }
}

fn owned(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Path `v0 - m1 - ... - v1` with `k` unit-energy edges and `u = (0, 1)`.
pub fn make_path(k: usize) -> Result<Fixture> {
    if k == 0 {
        return Err(Error::InvalidInput("a path needs at least one edge".into()));
    }
    let mut vertices = vec!["v0".to_string()];
    if k == 2 {
        vertices.push("m".into());
    } else {
        vertices.extend((1..k).map(|i| format!("m{i}")));
    }
    vertices.push("v1".into());
    let edges = (0..k).map(|i| (format!("e{}", i + 1), vertices[i].clone(), vertices[i + 1].clone())).collect();
    let net = Network::new(vertices, edges, owned(&["v0", "v1"]))?;
    let u = BoundaryValues::new(&net, vec![0.0, 1.0])?;
    let energies = Energies::uniform(&net, 1.0)?;
    let rotation = (0..net.vertex_count()).map(|v| net.incident(v).to_vec()).collect();
    let known = vec![KnownAnswer::new(
        "h",
        (0..=k).map(|i| i as f64 / k as f64).collect(),
        "equal energies force equal drops along the path",
    )];
    Ok(Fixture { name: format!("path{k}"), net, u, energies, rotation: Some(rotation), known })
}

/// Four vertices and five edges: `v0` at the bottom, `v1` at the top, `x`
/// and `y` in between, with the middle edge `c` joining them.
pub fn make_small_graph() -> Fixture {
    let net = Network::from_ids(
        &["v0", "y", "v1", "x"],
        &[("a", "v1", "x"), ("b", "v1", "y"), ("c", "x", "y"), ("d", "x", "v0"), ("e", "y", "v0")],
        &["v0", "v1"],
    )
    .expect("small graph is well formed");
    let u = BoundaryValues::new(&net, vec![0.0, 1.0]).unwrap();
    let energies = Energies::uniform(&net, 1.0).unwrap();
    let idx = |e: &str| net.edge_index(e).unwrap();
    // v0 (0,0), y (2,3), v1 (0,6), x (-2,3)
    let rotation = vec![
        vec![idx("e"), idx("d")],
        vec![idx("b"), idx("c"), idx("e")],
        vec![idx("a"), idx("b")],
        vec![idx("c"), idx("a"), idx("d")],
    ];
    let s5 = 5f64.sqrt();
    let known = vec![
        KnownAnswer::new("solution-count", vec![2.0], "two compatible orientations"),
        KnownAnswer::new("interior-values", vec![0.5 - s5 / 10.0, 0.5 + s5 / 10.0], "roots of 5z^2 - 5z + 1"),
        KnownAnswer::new(
            "outer-conductances",
            vec![(15.0 - 5.0 * s5) / 2.0, (15.0 + 5.0 * s5) / 2.0],
            "c_a = c_e at either solution",
        ),
    ];
    Fixture { name: "small-graph".into(), net, u, energies, rotation: Some(rotation), known }
}

/// A hand-drawn tiling of `[0, 6]²` whose adjacency is the small graph,
/// with the two interior segments at heights 1.66 and 4.34.
pub fn small_graph_tiling() -> RectTiling {
    let t = |id: &str, x0, y0, x1, y1| Tile { id: id.into(), x0, y0, x1, y1 };
    RectTiling::new(
        [0.0, 0.0, 6.0, 6.0],
        vec![
            t("a", 0.0, 4.34, 4.34, 6.0),
            t("b", 4.34, 1.66, 6.0, 6.0),
            t("c", 1.66, 1.66, 4.34, 4.34),
            t("d", 0.0, 0.0, 1.66, 4.34),
            t("e", 1.66, 0.0, 6.0, 1.66),
        ],
    )
    .expect("small graph tiling is valid")
}

/// The complete graph on `v0, v1, w1..wn` without the edge `v0 v1`. Spokes
/// at `v0` carry energy `a`, spokes at `v1` carry `b`, the rest carry 2.
pub fn make_jacobi(n: usize, a: f64, b: f64) -> Result<Fixture> {
    if n == 0 || !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidInput("need n >= 1 and positive a, b".into()));
    }
    let mut vertices = owned(&["v0", "v1"]);
    vertices.extend((1..=n).map(|i| format!("w{i}")));
    let mut edges = Vec::new();
    let mut values = Vec::new();
    for i in 1..=n {
        edges.push((format!("s0_{i}"), format!("w{i}"), "v0".to_string()));
        values.push(a);
        edges.push((format!("s1_{i}"), "v1".to_string(), format!("w{i}")));
        values.push(b);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            edges.push((format!("w{i}_{j}"), format!("w{j}"), format!("w{i}")));
            values.push(2.0);
        }
    }
    let net = Network::new(vertices, edges, owned(&["v0", "v1"]))?;
    let u = BoundaryValues::new(&net, vec![0.0, 1.0])?;
    let energies = Energies::new(&net, values)?;
    let known = vec![KnownAnswer::new(
        "interior-values",
        jacobi_roots(n, a - 1.0, b - 1.0)?.into_iter().map(|x| (1.0 - x) / 2.0).rev().collect(),
        "Jacobi polynomial roots x mapped by (1 - x) / 2",
    )];
    Ok(Fixture { name: format!("jacobi-{n}"), net, u, energies, rotation: None, known })
}

/// Roots of the Jacobi polynomial `P^{(alpha, beta)}_n`, ascending, as the
/// eigenvalues of its symmetric tridiagonal recurrence matrix.
pub fn jacobi_roots(n: usize, alpha: f64, beta: f64) -> Result<Vec<f64>> {
    if n == 0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::InvalidInput("need n >= 1 and alpha, beta > -1".into()));
    }
    let (al, be) = (alpha, beta);
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + al + be;
        m[(k, k)] = if s == 0.0 { (be - al) / (al + be + 2.0) } else { (be * be - al * al) / (s * (s + 2.0)) };
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + al + be;
            let off = if k == 0 {
                // the factor j + alpha + beta cancels against s - 1
                (4.0 * (1.0 + al) * (1.0 + be) / (s * s * (s + 1.0))).sqrt()
            } else {
                (4.0 * j * (j + al) * (j + be) * (j + al + be) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
            };
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let mut roots: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Star with leaves `l0..ld` fixed at `anchors` and centre `z`; edge `e{k}`
/// runs from leaf `k` to the centre with the given energy.
pub fn make_star(anchors: &[f64], energies: &[f64]) -> Result<Fixture> {
    if anchors.len() < 2 || anchors.len() != energies.len() {
        return Err(Error::InvalidInput("need at least two anchors and one energy per anchor".into()));
    }
    if anchors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("anchors must be strictly increasing".into()));
    }
    let d = anchors.len();
    let mut vertices: Vec<String> = (0..d).map(|k| format!("l{k}")).collect();
    vertices.push("z".into());
    let edges = (0..d).map(|k| (format!("e{k}"), format!("l{k}"), "z".to_string())).collect();
    let boundary = (0..d).map(|k| format!("l{k}")).collect();
    let net = Network::new(vertices, edges, boundary)?;
    let u = BoundaryValues::new(&net, anchors.to_vec())?;
    let energies = Energies::new(&net, energies.to_vec())?;
    let mut rotation: Vec<Vec<usize>> = (0..d).map(|k| vec![k]).collect();
    rotation.push((0..d).collect());
    Ok(Fixture { name: format!("star-{d}"), net, u, energies, rotation: Some(rotation), known: Vec::new() })
}

/// `n × n` lattice on `[0, n]²` with unit energies, `u(0,0) = 0`, `u(n,n) = 1`.
pub fn make_grid(n: usize) -> Result<Fixture> {
    let p = square_problem(n, &BoundarySpec::Corners, EnergyMode::Unit)?;
    let emb = p.embedding()?;
    let fixed = p.constraints.fixed_vertices();
    let values = fixed.iter().map(|&v| p.constraints.value(v).unwrap()).collect();
    let u = BoundaryValues::new(&p.net, values)?;
    let known = vec![KnownAnswer::new("edge-count", vec![(2 * n * (n + 1)) as f64], "2n(n+1) lattice edges")];
    Ok(Fixture {
        name: format!("grid-{n}"),
        rotation: Some(emb.rotation().to_vec()),
        net: p.net,
        u,
        energies: p.energies,
        known,
    })
}

/// Degree-12 minimal polynomial of the interior values of a 14-edge example
/// whose graph is only given pictorially; ascending integer coefficients.
pub const MEDIUM_GRAPH_COEFFICIENTS: [i64; 13] = [
    551124,
    -28041714,
    629396649,
    -8223166134,
    69535433439,
    -400501165895,
    1610724560815,
    -4560532680000,
    9034493949125,
    -12235337185000,
    10776143400000,
    -5554584000000,
    1270080000000,
];

pub fn medium_graph_polynomial() -> RationalPolynomial {
    RationalPolynomial::from_integers(&MEDIUM_GRAPH_COEFFICIENTS).expect("nonzero polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_roots() {
        let r = jacobi_roots(3, 0.0, 0.0).unwrap();
        let s = (0.6f64).sqrt();
        for (x, y) in r.iter().zip([-s, 0.0, s]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn fixtures_build() {
        for name in FIXTURE_NAMES {
            let f = by_name(name).unwrap();
            if let Some(emb) = f.embedding() {
                emb.unwrap();
            }
        }
        assert_eq!(make_grid(4).unwrap().net.edge_count(), 40);
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn medium_polynomial_has_degree_twelve() {
        assert_eq!(medium_graph_polynomial().degree(), 12);
    }
}
