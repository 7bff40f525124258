use std::collections::HashSet;

use crate::enharmonic::solve_enharmonic;
use crate::error::{Error, Result};
use crate::network::{BoundaryValues, ConstraintSet, Energies, Network, Orientation};

use super::{smith_diagram, PlanarEmbedding, SmithDiagram};

#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub id: String,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

/// Axis-aligned rectangles exactly covering `bounds = [x0, y0, x1, y1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectTiling {
    pub bounds: [f64; 4],
    pub tiles: Vec<Tile>,
}

/// What to do where four tiles meet at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossPolicy {
    #[default]
    Reject,
    /// Treat the horizontal segment as two segments at slightly different
    /// heights, so the vertical line runs through.
    HorizontalSplit,
    /// Treat the vertical line as offset, so the horizontal segment stays whole.
    VerticalSplit,
}

/// Per-segment `(tiles above, tiles below)` id sets, sorted. Two tilings with
/// equal signatures have the same adjacency network.
pub type Signature = Vec<(Vec<String>, Vec<String>)>;

impl RectTiling {
    pub fn new(bounds: [f64; 4], tiles: Vec<Tile>) -> Result<Self> {
        let t = RectTiling { bounds, tiles };
        t.check()?;
        Ok(t)
    }

    pub fn from_diagram(diagram: &SmithDiagram) -> Result<Self> {
        RectTiling::new(
            [diagram.x0, diagram.y0, diagram.x0 + diagram.width, diagram.y0 + diagram.height],
            diagram
                .rects
                .iter()
                .map(|r| Tile { id: r.id.clone(), x0: r.x0, y0: r.y0, x1: r.x1, y1: r.y1 })
                .collect(),
        )
    }

    fn size(&self) -> f64 {
        (self.bounds[2] - self.bounds[0]).max(self.bounds[3] - self.bounds[1])
    }

    fn check(&self) -> Result<()> {
        let [bx0, by0, bx1, by1] = self.bounds;
        if !(bx1 > bx0 && by1 > by0) {
            return Err(Error::NotATiling("bounds are empty".into()));
        }
        let tol = 1e-9 * self.size();
        let mut ids = HashSet::new();
        let mut area = 0.0;
        for t in &self.tiles {
            if !ids.insert(t.id.as_str()) {
                return Err(Error::NotATiling(format!("duplicate tile id {}", t.id)));
            }
            if !(t.x1 - t.x0 > tol && t.y1 - t.y0 > tol) {
                return Err(Error::NotATiling(format!("tile {} is degenerate", t.id)));
            }
            if t.x0 < bx0 - tol || t.y0 < by0 - tol || t.x1 > bx1 + tol || t.y1 > by1 + tol {
                return Err(Error::NotATiling(format!("tile {} leaves the bounds", t.id)));
            }
            area += (t.x1 - t.x0) * (t.y1 - t.y0);
        }
        let total = (bx1 - bx0) * (by1 - by0);
        if (area - total).abs() > 1e-9 * total {
            return Err(Error::NotATiling(format!("tile areas sum to {area}, bounds have {total}")));
        }
        for (i, a) in self.tiles.iter().enumerate() {
            for b in &self.tiles[i + 1..] {
                let w = a.x1.min(b.x1) - a.x0.max(b.x0);
                let h = a.y1.min(b.y1) - a.y0.max(b.y0);
                if w > tol && h > tol {
                    return Err(Error::NotATiling(format!("tiles {} and {} overlap", a.id, b.id)));
                }
            }
        }
        Ok(())
    }
}

/// Network read off a tiling: one vertex per maximal horizontal segment and
/// one edge per tile, running from its top segment to its bottom segment.
#[derive(Debug, Clone)]
pub struct TilingNetwork {
    pub net: Network,
    pub embedding: PlanarEmbedding,
    pub u: BoundaryValues,
    pub sigma: Orientation,
    pub energies: Energies,
    /// `(y, x0, x1)` of each segment, aligned with the vertices.
    pub segments: Vec<(f64, f64, f64)>,
}

impl TilingNetwork {
    pub fn signature(&self) -> Signature {
        let h: Vec<f64> = self.segments.iter().map(|s| s.0).collect();
        network_signature(&self.net, &h)
    }
}

/// Signature of a network with potential `h`: at each vertex, the edges
/// leaving upward and the edges leaving downward.
pub fn network_signature(net: &Network, h: &[f64]) -> Signature {
    let mut sig: Signature = (0..net.vertex_count())
        .map(|v| {
            let mut above = Vec::new();
            let mut below = Vec::new();
            for &e in net.incident(v) {
                let w = net.edge(e).other(v);
                if h[w] > h[v] {
                    above.push(net.edge(e).id.clone());
                } else {
                    below.push(net.edge(e).id.clone());
                }
            }
            above.sort();
            below.sort();
            (above, below)
        })
        .collect();
    sig.sort();
    sig
}

pub fn tiling_to_network(tiling: &RectTiling, policy: CrossPolicy) -> Result<TilingNetwork> {
    tiling.check()?;
    let tol = 1e-9 * tiling.size();
    let tiles = &tiling.tiles;

    let mut levels: Vec<f64> = tiles.iter().flat_map(|t| [t.y0, t.y1]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let level_of = |y: f64| levels.iter().position(|&l| (l - y).abs() <= tol).unwrap();

    // Segments per level as (x0, x1), split at cross points when asked.
    let mut segments: Vec<(usize, f64, f64)> = Vec::new();
    for (li, &y) in levels.iter().enumerate() {
        let lower: Vec<&Tile> = tiles.iter().filter(|t| level_of(t.y1) == li).collect();
        let upper: Vec<&Tile> = tiles.iter().filter(|t| level_of(t.y0) == li).collect();
        let mut spans: Vec<(f64, f64)> = lower.iter().chain(&upper).map(|t| (t.x0, t.x1)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in spans {
            match merged.last_mut() {
                Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        for (a, b) in merged {
            let ends = |ts: &[&Tile]| -> Vec<f64> { ts.iter().flat_map(|t| [t.x0, t.x1]).collect() };
            let (le, ue) = (ends(&lower), ends(&upper));
            let mut cuts: Vec<f64> = le
                .iter()
                .copied()
                .filter(|&x| x > a + tol && x < b - tol && ue.iter().any(|&z| (z - x).abs() <= tol))
                .collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|p, q| (*p - *q).abs() <= tol);
            if let Some(&x) = cuts.first() {
                match policy {
                    CrossPolicy::Reject => return Err(Error::CrossPoint { x, y }),
                    CrossPolicy::VerticalSplit => cuts.clear(),
                    CrossPolicy::HorizontalSplit => {}
                }
            }
            let mut start = a;
            for x in cuts {
                segments.push((li, start, x));
                start = x;
            }
            segments.push((li, start, b));
        }
    }
    segments.sort_by(|p, q| p.0.cmp(&q.0).then(p.1.total_cmp(&q.1)));

    let find = |y: f64, x0: f64, x1: f64| -> usize {
        let li = level_of(y);
        let mid = (x0 + x1) / 2.0;
        segments.iter().position(|&(l, a, b)| l == li && a - tol <= mid && mid <= b + tol).unwrap()
    };
    let tops: Vec<usize> = tiles.iter().map(|t| find(t.y1, t.x0, t.x1)).collect();
    let bottoms: Vec<usize> = tiles.iter().map(|t| find(t.y0, t.x0, t.x1)).collect();

    let [bx0, by0, bx1, by1] = tiling.bounds;
    let bottom = find(by0, bx0, bx1);
    let top = find(by1, bx0, bx1);
    let names: Vec<String> = (0..segments.len()).map(|k| format!("s{k}")).collect();
    let net = Network::new(
        names.clone(),
        tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.clone(), names[tops[i]].clone(), names[bottoms[i]].clone()))
            .collect(),
        vec![names[bottom].clone(), names[top].clone()],
    )?;

    let mid = |i: usize| (tiles[i].x0 + tiles[i].x1) / 2.0;
    let rotation: Vec<Vec<usize>> = (0..segments.len())
        .map(|s| {
            let mut up: Vec<usize> = (0..tiles.len()).filter(|&i| bottoms[i] == s).collect();
            let mut down: Vec<usize> = (0..tiles.len()).filter(|&i| tops[i] == s).collect();
            up.sort_by(|&a, &b| mid(b).total_cmp(&mid(a)));
            down.sort_by(|&a, &b| mid(a).total_cmp(&mid(b)));
            up.into_iter().chain(down).collect()
        })
        .collect();
    let west = (0..tiles.len())
        .filter(|&i| bottoms[i] == bottom)
        .min_by(|&a, &b| tiles[a].x0.total_cmp(&tiles[b].x0))
        .ok_or_else(|| Error::NotATiling("no tile rests on the bottom edge".into()))?;
    let embedding = PlanarEmbedding::with_outer_half_edge(&net, rotation, 2 * west + 1)?;

    let u = BoundaryValues::new(&net, vec![by0, by1])?;
    let sigma = Orientation::forward(net.edge_count());
    let energies = Energies::new(&net, tiles.iter().map(|t| (t.x1 - t.x0) * (t.y1 - t.y0)).collect())?;
    let segments = segments.iter().map(|&(l, a, b)| (levels[l], a, b)).collect();
    Ok(TilingNetwork { net, embedding, u, sigma, energies, segments })
}

/// An isotopic tiling whose tile areas are `areas` (in tile order). The
/// bottom and top of the bounds keep their heights; the width follows.
pub fn retile_with_areas(tiling: &RectTiling, areas: &[f64], policy: CrossPolicy) -> Result<SmithDiagram> {
    let tn = tiling_to_network(tiling, policy)?;
    let energies = Energies::new(&tn.net, areas.to_vec())?;
    let constraints = ConstraintSet::from_boundary(&tn.net, &tn.u);
    let sol = solve_enharmonic(&tn.net, &constraints, &energies, &tn.sigma)?;
    let mut diagram = smith_diagram(&tn.embedding, &sol)?;
    let shift = tiling.bounds[0] - diagram.x0;
    for r in &mut diagram.rects {
        r.x0 += shift;
        r.x1 += shift;
    }
    diagram.x0 += shift;
    Ok(diagram)
}
