//! Square-lattice discretizations with the south/west orientation.
//!
//! A lattice point `(i ε, j ε)` of a region becomes vertex `v{i}_{j}`.
//! Horizontal edges `x{i}_{j}` join `(i, j)` to `(i+1, j)` and vertical edges
//! `y{i}_{j}` join `(i, j)` to `(i, j+1)`; both are stored with the east or
//! north endpoint as tail, so the all-`+1` orientation points south and west.

use std::collections::HashMap;
use std::sync::Arc;
use std::thread;

use crate::enharmonic::{solve_enharmonic, EnharmonicSolution};
use crate::error::{Error, Result};
use crate::network::{ConstraintSet, Energies, Network, Orientation};
use crate::planar::{build_dual_with_terminals, conjugate_with, ConjugateFunction, DualNetwork, PlanarEmbedding};

/// A closed planar region that can be sampled on a lattice.
pub trait Region {
    fn contains(&self, x: f64, y: f64) -> bool;
    /// `[x0, y0, x1, y1]`.
    fn bbox(&self) -> [f64; 4];
}

/// Simply connected polygon with four marked vertices `a, b, c, d` in
/// counter-clockwise order; the boundary runs NE from `a` to `b`, NW to `c`,
/// SW to `d` and SE back to `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourArcDomain {
    points: Vec<(f64, f64)>,
    marks: [usize; 4],
}

impl FourArcDomain {
    pub fn new(points: Vec<(f64, f64)>, a: usize, b: usize, c: usize, d: usize) -> Result<Self> {
        let n = points.len();
        if n < 3 || [a, b, c, d].iter().any(|&k| k >= n) {
            return Err(Error::InvalidInput("polygon needs three vertices and valid marks".into()));
        }
        let dom = FourArcDomain { points, marks: [a, b, c, d] };
        if dom.signed_area() <= 0.0 {
            return Err(Error::InvalidInput("polygon must be counter-clockwise".into()));
        }
        let marks = dom.marks;
        for i in 0..4 {
            for j in i + 1..4 {
                let (p, q) = (dom.points[marks[i]], dom.points[marks[j]]);
                if marks[i] == marks[j] || (p.0 == q.0 && p.1 == q.1) {
                    return Err(Error::InfeasibleOrientation("marked points must be distinct".into()));
                }
            }
        }
        // (sign of dx, sign of dy) allowed along each arc
        let dirs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        let names = ["ab", "bc", "cd", "da"];
        let scale = dom.size();
        let mut k = marks[0];
        for arc in 0..4 {
            let end = marks[(arc + 1) % 4];
            let mut steps = 0;
            while k != end {
                let next = (k + 1) % n;
                let (dx, dy) = (dom.points[next].0 - dom.points[k].0, dom.points[next].1 - dom.points[k].1);
                if dx * dirs[arc].0 < -1e-12 * scale || dy * dirs[arc].1 < -1e-12 * scale {
                    return Err(Error::InfeasibleOrientation(format!("arc {} is not monotone", names[arc])));
                }
                k = next;
                steps += 1;
                if steps > n {
                    return Err(Error::InfeasibleOrientation("marks are not in counter-clockwise order".into()));
                }
            }
        }
        Ok(dom)
    }

    /// `[0,1]²` with `a = (1,0)`, `b = (1,1)`, `c = (0,1)`, `d = (0,0)`.
    pub fn unit_square() -> Self {
        FourArcDomain::new(vec![(1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)], 0, 1, 2, 3).unwrap()
    }

    /// `|x - cx| + |y - cy| <= r`, marked at its south, east, north and west tips.
    pub fn diamond(cx: f64, cy: f64, r: f64) -> Self {
        FourArcDomain::new(vec![(cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)], 0, 1, 2, 3).unwrap()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn marks(&self) -> [usize; 4] {
        self.marks
    }

    fn signed_area(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % n]);
                p.0 * q.1 - q.0 * p.1
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    fn size(&self) -> f64 {
        let b = self.bbox();
        (b[2] - b[0]).max(b[3] - b[1])
    }
}

impl Region for FourArcDomain {
    fn contains(&self, x: f64, y: f64) -> bool {
        let tol = 1e-9 * self.size();
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let (p, q) = (self.points[i], self.points[(i + 1) % n]);
            let (ex, ey) = (q.0 - p.0, q.1 - p.1);
            let len2 = ex * ex + ey * ey;
            let t = (((x - p.0) * ex + (y - p.1) * ey) / len2).clamp(0.0, 1.0);
            let (dx, dy) = (x - p.0 - t * ex, y - p.1 - t * ey);
            if dx * dx + dy * dy <= tol * tol {
                return true;
            }
            if (p.1 > y) != (q.1 > y) && x < p.0 + (y - p.1) * ex / ey {
                inside = !inside;
            }
        }
        inside
    }

    fn bbox(&self) -> [f64; 4] {
        let xs = self.points.iter().map(|p| p.0);
        let ys = self.points.iter().map(|p| p.1);
        [
            xs.clone().fold(f64::INFINITY, f64::min),
            ys.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.fold(f64::NEG_INFINITY, f64::max),
        ]
    }
}

/// Closed disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Region for Disk {
    fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.cx).powi(2) + (y - self.cy).powi(2) <= self.r * self.r * (1.0 + 1e-12)
    }

    fn bbox(&self) -> [f64; 4] {
        [self.cx - self.r, self.cy - self.r, self.cx + self.r, self.cy + self.r]
    }
}

/// Lattice graph of a region at mesh size `eps`, with an empty boundary.
#[derive(Debug, Clone)]
pub struct Grid {
    pub eps: f64,
    /// Lattice indices `(i, j)` of each vertex.
    pub cells: Vec<(i64, i64)>,
    pub coords: Vec<(f64, f64)>,
    /// `true` for horizontal edges.
    pub horizontal: Vec<bool>,
    /// Lattice index of the south/west endpoint of each edge.
    pub edge_cells: Vec<(i64, i64)>,
    lookup: HashMap<(i64, i64), usize>,
    edge_lookup: HashMap<(i64, i64, bool), usize>,
    edge_list: Vec<(String, usize, usize)>,
}

impl Grid {
    pub fn vertex_at(&self, i: i64, j: i64) -> Option<usize> {
        self.lookup.get(&(i, j)).copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    /// Edges at an interior vertex, in the order east, west, north, south;
    /// missing edges are skipped.
    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.cells[v];
        [(i, j, true), (i - 1, j, true), (i, j, false), (i, j - 1, false)]
            .into_iter()
            .filter_map(|key| self.edge_lookup.get(&key).copied())
    }

    pub fn edge_count(&self) -> usize {
        self.edge_list.len()
    }

    /// Network on the lattice graph with the given boundary vertices.
    pub fn network(&self, boundary: &[usize]) -> Result<Network> {
        let ids: Vec<String> = self.cells.iter().map(|(i, j)| format!("v{i}_{j}")).collect();
        Network::new(
            ids.clone(),
            self.edge_list.iter().map(|(id, t, h)| (id.clone(), ids[*t].clone(), ids[*h].clone())).collect(),
            boundary.iter().map(|&b| ids[b].clone()).collect(),
        )
    }

    /// Vertices missing at least one lattice neighbour.
    pub fn frame(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&v| {
                let (i, j) = self.cells[v];
                [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|(di, dj)| self.vertex_at(i + di, j + dj).is_none())
            })
            .collect()
    }
}

/// Lattice points of `region` and nearest-neighbour edges whose midpoints
/// lie in the region; only the largest connected component is kept.
pub fn build_grid(region: &dyn Region, eps: f64) -> Result<Grid> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput("mesh size must be positive".into()));
    }
    let [x0, y0, x1, y1] = region.bbox();
    let lo = |a: f64| (a / eps - 1e-9).ceil() as i64;
    let hi = |a: f64| (a / eps + 1e-9).floor() as i64;
    let mut points = Vec::new();
    for j in lo(y0)..=hi(y1) {
        for i in lo(x0)..=hi(x1) {
            if region.contains(i as f64 * eps, j as f64 * eps) {
                points.push((i, j));
            }
        }
    }
    let present: HashMap<(i64, i64), usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    let mut raw_edges = Vec::new();
    for (k, &(i, j)) in points.iter().enumerate() {
        for (di, dj, horiz) in [(1, 0, true), (0, 1, false)] {
            if let Some(&w) = present.get(&(i + di, j + dj)) {
                let (mx, my) = ((i as f64 + di as f64 / 2.0) * eps, (j as f64 + dj as f64 / 2.0) * eps);
                if region.contains(mx, my) {
                    adj[k].push(w);
                    adj[w].push(k);
                    raw_edges.push((k, w, horiz));
                }
            }
        }
    }
    // largest component
    let mut comp = vec![usize::MAX; points.len()];
    let mut best = (0, usize::MAX);
    let mut ncomp = 0;
    for s in 0..points.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    stack.push(w);
                }
            }
        }
        if size > best.0 {
            best = (size, ncomp);
        }
        ncomp += 1;
    }
    if best.0 == 0 {
        return Err(Error::EmptyGrid);
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut cells = Vec::new();
    for (k, &p) in points.iter().enumerate() {
        if comp[k] == best.1 {
            remap[k] = cells.len();
            cells.push(p);
        }
    }
    let mut edge_list = Vec::new();
    let mut horizontal = Vec::new();
    let mut edge_cells = Vec::new();
    for (a, b, horiz) in raw_edges {
        if comp[a] != best.1 {
            continue;
        }
        let (i, j) = points[a];
        let id = if horiz { format!("x{i}_{j}") } else { format!("y{i}_{j}") };
        // tail is the east/north endpoint
        edge_list.push((id, remap[b], remap[a]));
        horizontal.push(horiz);
        edge_cells.push((i, j));
    }
    let coords = cells.iter().map(|&(i, j)| (i as f64 * eps, j as f64 * eps)).collect();
    let lookup = cells.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let edge_lookup =
        edge_cells.iter().zip(&horizontal).enumerate().map(|(e, (&(i, j), &hz))| ((i, j, hz), e)).collect();
    Ok(Grid { eps, cells, coords, horizontal, edge_cells, lookup, edge_lookup, edge_list })
}

/// Boundary data for a grid.
#[derive(Clone)]
pub enum BoundarySpec {
    /// Value 0 at the vertex minimizing `i + j`, 1 at the one maximizing it.
    Corners,
    /// Every frame vertex fixed to `f0(x, y)`.
    Full(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
    /// Value 1 on the Pareto-maximal vertices, 0 on the Pareto-minimal ones,
    /// everything else free.
    FourArc,
}

impl std::fmt::Debug for BoundarySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundarySpec::Corners => write!(f, "Corners"),
            BoundarySpec::Full(_) => write!(f, "Full"),
            BoundarySpec::FourArc => write!(f, "FourArc"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyMode {
    #[default]
    Unit,
    /// `ε²` per edge.
    EpsSquared,
}

/// A grid with constraints, energies and the south/west orientation.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub grid: Grid,
    pub net: Network,
    pub constraints: ConstraintSet,
    pub energies: Energies,
    pub sigma: Orientation,
}

fn pareto(grid: &Grid, maximal: bool) -> Vec<usize> {
    let s = if maximal { 1 } else { -1 };
    // a vertex is dominated iff some vertex lies weakly beyond it in both
    // coordinates; scan columns for the extreme row
    let mut col_extreme: HashMap<i64, i64> = HashMap::new();
    for &(i, j) in &grid.cells {
        let e = col_extreme.entry(i).or_insert(j);
        if s * j > s * *e {
            *e = j;
        }
    }
    (0..grid.cells.len())
        .filter(|&v| {
            let (i, j) = grid.cells[v];
            !col_extreme.iter().any(|(&ci, &cj)| {
                (s * ci >= s * i && s * cj > s * j) || (s * ci > s * i && s * cj >= s * j)
            })
        })
        .collect()
}

impl GridProblem {
    pub fn new(grid: Grid, spec: &BoundarySpec, energy: EnergyMode) -> Result<Self> {
        let fixed: Vec<(usize, f64)> = match spec {
            BoundarySpec::Corners => {
                let key = |v: &usize| grid.cells[*v].0 + grid.cells[*v].1;
                let low = (0..grid.vertex_count()).min_by_key(key).unwrap();
                let high = (0..grid.vertex_count()).rev().max_by_key(key).unwrap();
                if low == high {
                    return Err(Error::EmptyGrid);
                }
                vec![(low, 0.0), (high, 1.0)]
            }
            BoundarySpec::Full(f0) => grid.frame().into_iter().map(|v| (v, f0(grid.coords[v].0, grid.coords[v].1))).collect(),
            BoundarySpec::FourArc => {
                let top = pareto(&grid, true);
                let bottom = pareto(&grid, false);
                if top.iter().any(|v| bottom.contains(v)) {
                    return Err(Error::InfeasibleOrientation("a vertex lies on both fixed arcs".into()));
                }
                top.into_iter().map(|v| (v, 1.0)).chain(bottom.into_iter().map(|v| (v, 0.0))).collect()
            }
        };
        let boundary: Vec<usize> = fixed.iter().map(|&(v, _)| v).collect();
        let net = grid.network(&boundary)?;
        let constraints = ConstraintSet::new(&net, &fixed)?;
        let e = match energy {
            EnergyMode::Unit => 1.0,
            EnergyMode::EpsSquared => grid.eps * grid.eps,
        };
        let energies = Energies::uniform(&net, e)?;
        let sigma = Orientation::forward(net.edge_count());
        for v in constraints.free_vertices() {
            let (mut has_in, mut has_out) = (false, false);
            for &k in net.incident(v) {
                if net.edge(k).head == v {
                    has_in = true;
                } else {
                    has_out = true;
                }
            }
            if !(has_in && has_out) {
                return Err(Error::InfeasibleOrientation(format!(
                    "free vertex {} is a south/west sink or source",
                    net.vertex_id(v)
                )));
            }
        }
        Ok(GridProblem { grid, net, constraints, energies, sigma })
    }

    pub fn solve(&self) -> Result<EnharmonicSolution> {
        solve_enharmonic(&self.net, &self.constraints, &self.energies, &self.sigma)
    }

    pub fn embedding(&self) -> Result<PlanarEmbedding> {
        PlanarEmbedding::from_coordinates(&self.net, &self.grid.coords)
    }
}

/// The `n × n` subdivision of the unit square with the given boundary.
pub fn square_problem(n: usize, spec: &BoundarySpec, energy: EnergyMode) -> Result<GridProblem> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    GridProblem::new(build_grid(&FourArcDomain::unit_square(), 1.0 / n as f64)?, spec, energy)
}

/// Side of the common evaluation lattice.
pub const SAMPLE_SIDE: usize = 64;

/// Bilinear interpolation of grid values at a physical point; `None` when a
/// corner of the surrounding cell is missing.
pub fn interpolate(grid: &Grid, f: &[f64], x: f64, y: f64) -> Option<f64> {
    let (gx, gy) = (x / grid.eps, y / grid.eps);
    let snap = |g: f64| if (g - g.round()).abs() < 1e-9 { g.round() } else { g };
    let (gx, gy) = (snap(gx), snap(gy));
    let (i, j) = (gx.floor() as i64, gy.floor() as i64);
    let (tx, ty) = (gx - i as f64, gy - j as f64);
    let at = |di: i64, dj: i64| -> Option<f64> {
        let w = match (di, dj) {
            (0, 0) => (1.0 - tx) * (1.0 - ty),
            (1, 0) => tx * (1.0 - ty),
            (0, 1) => (1.0 - tx) * ty,
            _ => tx * ty,
        };
        if w == 0.0 {
            return Some(0.0);
        }
        grid.vertex_at(i + di, j + dj).map(|v| w * f[v])
    };
    Some(at(0, 0)? + at(1, 0)? + at(0, 1)? + at(1, 1)?)
}

/// Where the enharmonic PDE residual is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampling {
    /// Grid nodes nearest a fixed physical lattice with the given spacing
    /// relative to the bounding box.
    Lattice(f64),
    /// Every interior node.
    AllNodes,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Lattice(0.1)
    }
}

/// RMS of the central-difference estimate of `f_xx/f_x² + f_yy/f_y²`.
pub fn pde_residual(grid: &Grid, f: &[f64], sampling: Sampling) -> Result<f64> {
    let interior = |v: usize| {
        let (i, j) = grid.cells[v];
        [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().all(|(di, dj)| grid.vertex_at(i + di, j + dj).is_some())
    };
    let nodes: Vec<usize> = match sampling {
        Sampling::AllNodes => (0..grid.vertex_count()).filter(|&v| interior(v)).collect(),
        Sampling::Lattice(spacing) => {
            let x0 = grid.coords.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let x1 = grid.coords.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let y0 = grid.coords.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let y1 = grid.coords.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            let steps = (1.0 / spacing).round() as i64;
            let mut out = Vec::new();
            for l in 0..=steps {
                for k in 0..=steps {
                    let x = x0 + (x1 - x0) * k as f64 / steps as f64;
                    let y = y0 + (y1 - y0) * l as f64 / steps as f64;
                    let (i, j) = ((x / grid.eps).round() as i64, (y / grid.eps).round() as i64);
                    if let Some(v) = grid.vertex_at(i, j) {
                        if interior(v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
            }
            out
        }
    };
    if nodes.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let h = grid.eps;
    let mut sum = 0.0;
    for &v in &nodes {
        let (i, j) = grid.cells[v];
        let at = |di: i64, dj: i64| f[grid.vertex_at(i + di, j + dj).unwrap()];
        let fx = (at(1, 0) - at(-1, 0)) / (2.0 * h);
        let fy = (at(0, 1) - at(0, -1)) / (2.0 * h);
        if fx.abs() < 1e-12 || fy.abs() < 1e-12 {
            return Err(Error::DegenerateGradient { x: grid.coords[v].0, y: grid.coords[v].1 });
        }
        let fxx = (at(1, 0) - 2.0 * f[v] + at(-1, 0)) / (h * h);
        let fyy = (at(0, 1) - 2.0 * f[v] + at(0, -1)) / (h * h);
        let r = fxx / (fx * fx) + fyy / (fy * fy);
        sum += r * r;
    }
    Ok((sum / nodes.len() as f64).sqrt())
}

/// Cauchy-Riemann defects `f_x g_y + 1` and `f_y g_x - 1` (RMS), with
/// products scaled by `ε² / E`.
///
/// Derivatives are centred at primal vertices: `f` from its two lattice
/// neighbours, `g` from the four surrounding cells. Only vertices with all
/// four neighbours and four bounded cells contribute.
pub fn cr_residual(grid: &Grid, dual: &DualNetwork, f: &[f64], g: &[f64], energies: &Energies) -> Result<(f64, f64)> {
    let nb = dual.bounded_faces.len();
    // cell (i, j) has south-west corner (i, j); it lies right of x{i}_{j}
    let mut cell: HashMap<(i64, i64), usize> = HashMap::new();
    for (e, &(i, j)) in grid.edge_cells.iter().enumerate() {
        if grid.horizontal[e] {
            if dual.right[e] < nb {
                cell.insert((i, j), dual.right[e]);
            }
            if dual.left[e] < nb {
                cell.insert((i, j - 1), dual.left[e]);
            }
        }
    }
    let eps = grid.eps;
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for v in 0..grid.vertex_count() {
        let (i, j) = grid.cells[v];
        let nbrs: Option<Vec<usize>> =
            [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().map(|(di, dj)| grid.vertex_at(i + di, j + dj)).collect();
        let cells: Option<Vec<usize>> =
            [(-1, -1), (0, -1), (-1, 0), (0, 0)].iter().map(|(di, dj)| cell.get(&(i + di, j + dj)).copied()).collect();
        let (Some(nbrs), Some(c)) = (nbrs, cells) else { continue };
        let fx = (f[nbrs[0]] - f[nbrs[1]]) / (2.0 * eps);
        let fy = (f[nbrs[2]] - f[nbrs[3]]) / (2.0 * eps);
        if fx.abs() < 1e-12 || fy.abs() < 1e-12 {
            return Err(Error::DegenerateGradient { x: grid.coords[v].0, y: grid.coords[v].1 });
        }
        let gx = (g[c[1]] + g[c[3]] - g[c[0]] - g[c[2]]) / (2.0 * eps);
        let gy = (g[c[2]] + g[c[3]] - g[c[0]] - g[c[1]]) / (2.0 * eps);
        let local: f64 = grid
            .incident_edges(v)
            .map(|e| energies.values()[e])
            .sum::<f64>()
            / 4.0;
        let scale = eps * eps / local;
        sx += (fx * gy * scale + 1.0).powi(2);
        sy += (fy * gx * scale - 1.0).powi(2);
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(((sx / n as f64).sqrt(), (sy / n as f64).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub eps: f64,
    pub vertices: usize,
    pub edges: usize,
    pub iterations: usize,
    pub residual: f64,
    /// `None` when the grid has no interior sample node.
    pub pde_residual: Option<f64>,
    /// Values on the `SAMPLE_SIDE²` lattice over the region's bounding box,
    /// row by row from the bottom; `NaN` outside the grid.
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub levels: Vec<LevelReport>,
    /// Sup-distance between successive levels over commonly defined samples.
    pub sup_distances: Vec<f64>,
}

fn solve_level(region: &dyn Region, spec: &BoundarySpec, energy: EnergyMode, eps: f64) -> Result<LevelReport> {
    let problem = GridProblem::new(build_grid(region, eps)?, spec, energy)?;
    let sol = problem.solve()?;
    let [x0, y0, x1, y1] = region.bbox();
    let m = SAMPLE_SIDE - 1;
    let mut samples = Vec::with_capacity(SAMPLE_SIDE * SAMPLE_SIDE);
    for l in 0..SAMPLE_SIDE {
        for k in 0..SAMPLE_SIDE {
            let x = x0 + (x1 - x0) * k as f64 / m as f64;
            let y = y0 + (y1 - y0) * l as f64 / m as f64;
            samples.push(interpolate(&problem.grid, &sol.h, x, y).unwrap_or(f64::NAN));
        }
    }
    let pde = match pde_residual(&problem.grid, &sol.h, Sampling::default()) {
        Ok(r) => Some(r),
        Err(Error::EmptyGrid) => None,
        Err(e) => return Err(e),
    };
    Ok(LevelReport {
        eps,
        vertices: problem.net.vertex_count(),
        edges: problem.net.edge_count(),
        iterations: sol.iterations,
        residual: sol.residual,
        pde_residual: pde,
        samples,
    })
}

/// Solves the region at every mesh size and compares successive levels.
pub fn solve_grid_sequence<R: Region + Sync>(
    region: &R,
    spec: &BoundarySpec,
    energy: EnergyMode,
    eps_list: &[f64],
    threads: usize,
) -> Result<ScalingReport> {
    let levels: Vec<Result<LevelReport>> = if threads <= 1 {
        eps_list.iter().map(|&eps| solve_level(region, spec, energy, eps)).collect()
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = eps_list
                .iter()
                .map(|&eps| scope.spawn(move || solve_level(region, spec, energy, eps)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("grid level panicked")).collect()
        })
    };
    let levels = levels.into_iter().collect::<Result<Vec<_>>>()?;
    let sup_distances = levels
        .windows(2)
        .map(|w| {
            w[0].samples
                .iter()
                .zip(&w[1].samples)
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ScalingReport { levels, sup_distances })
}

/// Result of the discrete map of a four-arc domain onto a rectangle.
#[derive(Debug, Clone)]
pub struct RiemannMap {
    pub problem: GridProblem,
    pub solution: EnharmonicSolution,
    pub dual: DualNetwork,
    pub conjugate: ConjugateFunction,
    /// Dual vertices outside the free arcs `ab` and `cd`.
    pub v_ab: usize,
    pub v_cd: usize,
    /// `|g(v_cd) - g(v_ab)|`.
    pub r_eps: f64,
    /// `(x, y)` image of every primal vertex: `x` is minus the mean of `g`
    /// over the adjacent dual vertices, `y` is `f`.
    pub mapped: Vec<(f64, f64)>,
    /// Whether every mapped point lies in `[-δ, R+δ] × [-δ, 1+δ]`, `δ = 5ε`.
    pub within_bounds: bool,
}

pub fn riemann_map(domain: &FourArcDomain, eps: f64) -> Result<RiemannMap> {
    let problem = GridProblem::new(build_grid(domain, eps)?, &BoundarySpec::FourArc, EnergyMode::EpsSquared)?;
    let solution = problem.solve()?;
    let emb = problem.embedding()?;
    let terminals = problem.constraints.fixed_vertices();
    let dual = build_dual_with_terminals(&emb, &terminals)?;
    let value = |v: usize| problem.constraints.value(v).unwrap();
    let find = |from: f64, to: f64| {
        dual.arcs
            .iter()
            .position(|a| value(a.from_terminal) == from && value(a.to_terminal) == to)
            .map(|k| dual.arc_vertex(k))
            .ok_or_else(|| Error::InfeasibleOrientation("fixed arcs are not separated by free arcs".into()))
    };
    let v_ab = find(1.0, 0.0)?;
    let v_cd = find(0.0, 1.0)?;
    let conjugate = conjugate_with(&emb, &dual, &solution.h, &problem.energies, v_ab)?;
    let r_eps = (conjugate.g[v_cd] - conjugate.g[v_ab]).abs();

    let net = &problem.net;
    let mut sum = vec![0.0; net.vertex_count()];
    let mut count = vec![0usize; net.vertex_count()];
    for (e, edge) in net.edges().iter().enumerate() {
        for d in [dual.left[e], dual.right[e]] {
            for v in [edge.tail, edge.head] {
                sum[v] += conjugate.g[d];
                count[v] += 1;
            }
        }
    }
    let mapped: Vec<(f64, f64)> = (0..net.vertex_count()).map(|v| (-sum[v] / count[v] as f64, solution.h[v])).collect();
    let delta = 5.0 * eps;
    let within_bounds = mapped
        .iter()
        .all(|&(x, y)| x >= -delta && x <= r_eps + delta && y >= -delta && y <= 1.0 + delta);
    Ok(RiemannMap { problem, solution, dual, conjugate, v_ab, v_cd, r_eps, mapped, within_bounds })
}
