//! Graphviz and SVG renderings.

use std::fmt::Write as _;

use crate::reeb::ReebGraph;
use crate::slicer::{ArcKind, PlanarRegion};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

pub fn color_hex(color: usize) -> &'static str {
    PALETTE[(color.max(1) - 1) % PALETTE.len()]
}

/// Directed Reeb graph; nodes are labelled `v{i}@{level}`.
pub fn reeb_dot(g: &ReebGraph) -> String {
    let mut out = String::from("digraph reeb {\n  rankdir=BT;\n");
    for (i, v) in g.vertices.iter().enumerate() {
        let _ = writeln!(out, "  v{i} [label=\"v{i}@{}\"];", v.level);
    }
    for &(a, b) in &g.edges {
        let (lo, hi) = if g.vertices[a].level <= g.vertices[b].level { (a, b) } else { (b, a) };
        let _ = writeln!(out, "  v{lo} -> v{hi};");
    }
    out.push_str("}\n");
    out
}

/// Boundary loops drawn arc by arc in their color, corners as dots.
pub fn region_svg(r: &PlanarRegion) -> String {
    let step = r.scale / 200.0;
    let paths: Vec<(usize, Vec<[f64; 2]>)> = r
        .loops
        .iter()
        .flat_map(|l| l.arcs.iter())
        .map(|a| {
            let min = match a.kind {
                ArcKind::Segment => 1,
                ArcKind::Circular { .. } if a.closed => 64,
                ArcKind::Circular { .. } => 8,
            };
            let mut pts = a.sample(step, min);
            pts.push(if a.closed { a.start } else { a.end });
            (a.color, pts)
        })
        .collect();
    let all = paths.iter().flat_map(|p| p.1.iter());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if !lo[0].is_finite() {
        lo = [0.0; 2];
        hi = [1.0; 2];
    }
    let margin = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let (w, h) = (hi[0] - lo[0] + 2.0 * margin, hi[1] - lo[1] + 2.0 * margin);
    let stroke = 0.004 * w.max(h);
    // flip y so the picture has the usual orientation
    let tx = |p: &[f64; 2]| (p[0] - lo[0] + margin, hi[1] - p[1] + margin);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.6} {h:.6}\" width=\"800\" height=\"{:.0}\">\n",
        800.0 * h / w
    );
    for (color, pts) in &paths {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = tx(p);
            let _ = write!(d, "{}{x:.6} {y:.6} ", if i == 0 { "M" } else { "L" });
        }
        let _ = writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{stroke:.6}\"/>",
            d.trim_end(),
            color_hex(*color)
        );
    }
    for c in r.distinct_corners() {
        let (x, y) = tx(&c.point);
        let _ = writeln!(out, "  <circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"{:.6}\" fill=\"black\"/>", 2.5 * stroke);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reeb::reeb_graph_of;

    #[test]
    fn dot_edges_point_upward() {
        // octahedron, height = z
        let values = [1.0, -1.0, 0.0, 0.0, 0.0, 0.0];
        let tris = [[0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 2], [1, 3, 2], [1, 4, 3], [1, 5, 4], [1, 2, 5]];
        let g = reeb_graph_of(&values, &tris);
        let dot = reeb_dot(&g);
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), g.edges.len());
        for line in dot.lines().filter(|l| l.contains("->")) {
            let ids: Vec<usize> =
                line.split("->").map(|s| s.trim().trim_start_matches('v').trim_end_matches(';').parse().unwrap()).collect();
            assert!(g.vertices[ids[0]].level <= g.vertices[ids[1]].level);
        }
    }

    #[test]
    fn palette_is_fixed() {
        assert_eq!(color_hex(1), "#1f77b4");
        assert_eq!(color_hex(2), "#d62728");
        assert_eq!(color_hex(3), "#2ca02c");
    }
}
