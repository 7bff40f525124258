use std::fmt::Write as _;

use crate::enharmonic::EnharmonicSolution;
use crate::error::Result;

use super::{conjugate, ConjugateFunction, DualNetwork, PlanarEmbedding};

#[derive(Debug, Clone, PartialEq)]
pub struct Rect {
    pub id: String,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// One rectangle per edge: heights are potential drops, widths are the
/// conjugate jumps (currents), areas are the energies.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithDiagram {
    pub rects: Vec<Rect>,
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

pub fn smith_diagram(emb: &PlanarEmbedding, solution: &EnharmonicSolution) -> Result<SmithDiagram> {
    let (dual, g) = conjugate(emb, solution)?;
    Ok(smith_diagram_from(emb, &dual, &solution.h, &g))
}

pub fn smith_diagram_from(emb: &PlanarEmbedding, dual: &DualNetwork, f: &[f64], g: &ConjugateFunction) -> SmithDiagram {
    let net = emb.network();
    let rects: Vec<Rect> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (gs, gt) = (g.g[dual.left[e]], g.g[dual.right[e]]);
            let (fa, fb) = (f[edge.tail], f[edge.head]);
            Rect { id: edge.id.clone(), x0: gs.min(gt), x1: gs.max(gt), y0: fa.min(fb), y1: fa.max(fb) }
        })
        .collect();
    let x0 = rects.iter().map(|r| r.x0).fold(f64::INFINITY, f64::min);
    let x1 = rects.iter().map(|r| r.x1).fold(f64::NEG_INFINITY, f64::max);
    let y0 = rects.iter().map(|r| r.y0).fold(f64::INFINITY, f64::min);
    let y1 = rects.iter().map(|r| r.y1).fold(f64::NEG_INFINITY, f64::max);
    SmithDiagram { rects, x0, y0, width: x1 - x0, height: y1 - y0 }
}

impl SmithDiagram {
    pub fn total_area(&self) -> f64 {
        self.rects.iter().map(Rect::area).sum()
    }

    /// Largest overlap area between any two rectangles.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.rects.iter().enumerate() {
            for b in &self.rects[i + 1..] {
                let w = a.x1.min(b.x1) - a.x0.max(b.x0);
                let h = a.y1.min(b.y1) - a.y0.max(b.y0);
                if w > 0.0 && h > 0.0 {
                    worst = worst.max(w * h);
                }
            }
        }
        worst
    }

    /// Distinct heights of horizontal segments, ascending.
    pub fn horizontal_levels(&self, tol: f64) -> Vec<f64> {
        let mut ys: Vec<f64> = self.rects.iter().flat_map(|r| [r.y0, r.y1]).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup_by(|a, b| (*a - *b).abs() <= tol);
        ys
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SvgOptions {
    /// Rescale the bounding rectangle to `[0,1]²`.
    pub unit_square: bool,
    pub labels: bool,
}

fn num(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 document with one `rect` per tile; larger `y` is drawn higher.
pub fn render_svg(diagram: &SmithDiagram, options: SvgOptions) -> String {
    let (sx, sy) = if options.unit_square && diagram.width > 0.0 && diagram.height > 0.0 {
        (1.0 / diagram.width, 1.0 / diagram.height)
    } else {
        (1.0, 1.0)
    };
    let w = diagram.width * sx;
    let h = diagram.height * sy;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">",
        num(w),
        num(h),
        num(400.0 * w / w.max(h)),
        num(400.0 * h / w.max(h))
    );
    let _ = writeln!(
        out,
        "<g fill=\"#dde6f0\" stroke=\"#203040\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\">"
    );
    for r in &diagram.rects {
        let x = (r.x0 - diagram.x0) * sx;
        let y = (diagram.y0 + diagram.height - r.y1) * sy;
        let _ = writeln!(
            out,
            "<rect id=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" vector-effect=\"non-scaling-stroke\"/>",
            escape(&r.id),
            num(x),
            num(y),
            num(r.width() * sx),
            num(r.height() * sy)
        );
    }
    out.push_str("</g>\n");
    if options.labels {
        let size = 0.04 * w.min(h);
        let _ = writeln!(out, "<g font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">", num(size));
        for r in &diagram.rects {
            let cx = ((r.x0 + r.x1) / 2.0 - diagram.x0) * sx;
            let cy = (diagram.y0 + diagram.height - (r.y0 + r.y1) / 2.0) * sy;
            let _ = writeln!(out, "<text x=\"{}\" y=\"{}\">{}</text>", num(cx), num(cy), escape(&r.id));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
