//! Boundary tracing of a planar line/circle arrangement region.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use super::curve::{classify, intersect, Contact, Geom, Primitive, SliceCurve};
use super::{normalize_angle, point_in_polylines, Arc, ArcKind, Corner, Loop, PlanarRegion, SlicePlane, Tangency};
use crate::arrangement::ArrangementSpec;
use crate::error::{Error, Result};
use crate::polynomial::{eval_grad, Polynomial};

struct Piece {
    prim: usize,
    from: Option<usize>,
    to: Option<usize>,
    /// Oriented parameter range (line parameter or angle).
    t0: f64,
    t1: f64,
}

struct Ctx<'a> {
    prims: Vec<Primitive>,
    restricted: &'a [Polynomial],
    grads: Vec<Vec<Polynomial>>,
    scale: f64,
    tol_val: f64,
}

impl Ctx<'_> {
    fn closed_member(&self, p: [f64; 2]) -> bool {
        self.restricted.iter().all(|g| g.eval_unchecked(&p) >= -self.tol_val)
    }

    fn point(&self, piece: &Piece, s: f64) -> [f64; 2] {
        let t = piece.t0 + s * (piece.t1 - piece.t0);
        match &self.prims[piece.prim].geom {
            Geom::Line(l) => l.at(t),
            Geom::Circle(c) => c.at(t),
        }
    }

    fn length(&self, piece: &Piece) -> f64 {
        let dt = (piece.t1 - piece.t0).abs();
        match &self.prims[piece.prim].geom {
            Geom::Line(_) => dt,
            Geom::Circle(c) => dt * c.radius(),
        }
    }

    /// Whether the curve piece through `m` bounds the region, and if so
    /// whether the region lies on the side of increasing parameter's left.
    fn boundary_side(&self, prim: usize, m: [f64; 2]) -> Option<[f64; 2]> {
        let src = self.prims[prim].source;
        for (k, g) in self.restricted.iter().enumerate() {
            if k != src && g.eval_unchecked(&m) < -self.tol_val {
                return None;
            }
        }
        let gr = eval_grad(&self.grads[src], &m);
        Some([gr[0], gr[1]])
    }
}

pub(super) fn build(spec: &ArrangementSpec, plane: SlicePlane, restricted: Vec<Polynomial>) -> Result<PlanarRegion> {
    let mut prims = Vec::new();
    for (j, g) in restricted.iter().enumerate() {
        match classify(j, g)? {
            SliceCurve::Free => {}
            SliceCurve::Empty => return Err(Error::EmptyRegion),
            SliceCurve::Curves(gs) => {
                for geom in gs {
                    prims.push(Primitive { geom, source: j, color: spec.colors.color_of(j) });
                }
            }
        }
    }
    if prims.is_empty() {
        return Err(Error::UnboundedRegion { index: 0 });
    }
    let mut scale: f64 = 1.0;
    for p in &prims {
        let s = match &p.geom {
            Geom::Line(l) => {
                let b = l.base_point();
                b[0].hypot(b[1])
            }
            Geom::Circle(c) => c.cu.hypot(c.cv) + c.radius(),
        };
        scale = scale.max(s);
    }
    let grads = restricted.iter().map(|g| g.grad()).collect();
    let ctx = Ctx { prims, restricted: &restricted, grads, scale, tol_val: 1e-9 * scale * scale };
    let merge_tol = 1e-9 * scale;

    // arrangement vertices inside the closed region
    let mut verts: Vec<[f64; 2]> = Vec::new();
    let mut tangencies = Vec::new();
    let add_vertex = |p: [f64; 2], verts: &mut Vec<[f64; 2]>| -> usize {
        if let Some(i) = verts.iter().position(|v| (v[0] - p[0]).hypot(v[1] - p[1]) <= merge_tol) {
            return i;
        }
        verts.push(p);
        verts.len() - 1
    };
    for i in 0..ctx.prims.len() {
        for k in i + 1..ctx.prims.len() {
            match intersect(&ctx.prims[i].geom, &ctx.prims[k].geom, 1e-12) {
                Contact::Disjoint => {}
                Contact::Tangent(p) => {
                    if ctx.closed_member(p) {
                        add_vertex(p, &mut verts);
                        let sources = [ctx.prims[i].source, ctx.prims[k].source];
                        if sources[0] != sources[1] {
                            tangencies.push(Tangency { point: p, sources });
                        }
                    }
                }
                Contact::Crossing(p, q) => {
                    for r in [p, q] {
                        if ctx.closed_member(r) {
                            add_vertex(r, &mut verts);
                        }
                    }
                }
            }
        }
    }

    // split primitives into boundary pieces
    let mut pieces: Vec<Piece> = Vec::new();
    for (pi, prim) in ctx.prims.iter().enumerate() {
        let on: Vec<usize> = (0..verts.len())
            .filter(|&v| prim.geom.distance(verts[v]) <= 1e-8 * scale)
            .collect();
        match &prim.geom {
            Geom::Line(l) => {
                let mut ts: Vec<(f64, usize)> = on.iter().map(|&v| (l.param(verts[v]), v)).collect();
                ts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut bounds: Vec<(f64, Option<usize>)> = vec![(f64::NEG_INFINITY, None)];
                bounds.extend(ts.iter().map(|&(t, v)| (t, Some(v))));
                bounds.push((f64::INFINITY, None));
                for w in bounds.windows(2) {
                    let ((ta, va), (tb, vb)) = (w[0], w[1]);
                    let tm = match (ta.is_finite(), tb.is_finite()) {
                        (true, true) => 0.5 * (ta + tb),
                        (false, true) => tb - scale,
                        (true, false) => ta + scale,
                        (false, false) => 0.0,
                    };
                    let m = l.at(tm);
                    let Some(gr) = ctx.boundary_side(pi, m) else { continue };
                    if va.is_none() || vb.is_none() {
                        return Err(Error::UnboundedRegion { index: prim.source });
                    }
                    let d = l.direction();
                    let forward = gr[0] * -d[1] + gr[1] * d[0] > 0.0;
                    let (from, to, t0, t1) = if forward { (va, vb, ta, tb) } else { (vb, va, tb, ta) };
                    pieces.push(Piece { prim: pi, from, to, t0, t1 });
                }
            }
            Geom::Circle(c) => {
                let mut ts: Vec<(f64, usize)> =
                    on.iter().map(|&v| (normalize_angle(c.angle(verts[v])), v)).collect();
                ts.sort_by(|a, b| a.0.total_cmp(&b.0));
                let spans: Vec<(f64, f64, Option<usize>, Option<usize>)> = if ts.is_empty() {
                    vec![(0.0, TAU, None, None)]
                } else {
                    (0..ts.len())
                        .map(|i| {
                            let (ta, va) = ts[i];
                            let (tb, vb) = if i + 1 < ts.len() { ts[i + 1] } else { (ts[0].0 + TAU, ts[0].1) };
                            (ta, tb, Some(va), Some(vb))
                        })
                        .collect()
                };
                for (ta, tb, va, vb) in spans {
                    let m = c.at(0.5 * (ta + tb));
                    let Some(gr) = ctx.boundary_side(pi, m) else { continue };
                    let inward = gr[0] * (c.cu - m[0]) + gr[1] * (c.cv - m[1]) > 0.0;
                    let (from, to, t0, t1) = if inward { (va, vb, ta, tb) } else { (vb, va, tb, ta) };
                    pieces.push(Piece { prim: pi, from, to, t0, t1 });
                }
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::EmptyRegion);
    }

    let loops_pieces = trace(&ctx, &pieces, &verts)?;

    // assemble loops of arcs
    let mut raw_loops: Vec<(Vec<Arc>, Vec<usize>)> = Vec::new();
    for lp in loops_pieces {
        let n = lp.len();
        let is_corner = |i: usize| pieces[lp[i]].prim != pieces[lp[(i + n - 1) % n]].prim;
        let first = (0..n).find(|&i| is_corner(i));
        let arcs_and_corners = match first {
            None => {
                let arc = make_arc(&ctx, &pieces, &lp, &verts, true);
                (vec![arc], vec![])
            }
            Some(f) => {
                let rot: Vec<usize> = (0..n).map(|i| lp[(f + i) % n]).collect();
                let mut arcs = Vec::new();
                let mut corner_vertices = Vec::new();
                let mut group = vec![rot[0]];
                for &p in &rot[1..] {
                    if pieces[p].prim == pieces[group[0]].prim {
                        group.push(p);
                    } else {
                        corner_vertices.push(pieces[group[0]].from.unwrap());
                        arcs.push(make_arc(&ctx, &pieces, &group, &verts, false));
                        group = vec![p];
                    }
                }
                corner_vertices.push(pieces[group[0]].from.unwrap());
                arcs.push(make_arc(&ctx, &pieces, &group, &verts, false));
                (arcs, corner_vertices)
            }
        };
        raw_loops.push(arcs_and_corners);
    }

    let mut loops: Vec<(Loop, Vec<usize>)> = raw_loops
        .into_iter()
        .map(|(arcs, cv)| {
            let area: f64 = arcs.iter().map(|a| a.area_term()).sum();
            (Loop { arcs, corners: vec![], outer: area > 0.0, component: 0, signed_area: area }, cv)
        })
        .collect();
    let leftmost = |l: &Loop| {
        let pts = l.polyline(scale / 64.0);
        pts.into_iter().fold([f64::INFINITY, f64::INFINITY], |m, p| {
            if p[0] < m[0] || (p[0] == m[0] && p[1] < m[1]) {
                p
            } else {
                m
            }
        })
    };
    loops.sort_by(|(a, _), (b, _)| {
        b.outer.cmp(&a.outer).then_with(|| {
            let (pa, pb) = (leftmost(a), leftmost(b));
            pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1]))
        })
    });

    let outer_count = loops.iter().filter(|(l, _)| l.outer).count();
    let outer_polys: Vec<Vec<[f64; 2]>> =
        loops[..outer_count].iter().map(|(l, _)| l.polyline(scale / 256.0)).collect();
    for i in 0..loops.len() {
        if loops[i].0.outer {
            loops[i].0.component = i;
            continue;
        }
        let probe = loops[i].0.arcs[0].point_at(0.5);
        let mut best: Option<(f64, usize)> = None;
        for (k, poly) in outer_polys.iter().enumerate() {
            if point_in_polylines(std::slice::from_ref(poly), probe) {
                let area = loops[k].0.signed_area;
                if best.map_or(true, |(a, _)| area < a) {
                    best = Some((area, k));
                }
            }
        }
        loops[i].0.component = best.map_or(0, |b| b.1);
    }

    let mut corners = Vec::new();
    let mut out_loops = Vec::new();
    for (mut l, cv) in loops {
        let m = l.arcs.len();
        for (k, &v) in cv.iter().enumerate() {
            let prev = &l.arcs[(k + m - 1) % m];
            let next = &l.arcs[k];
            let p = verts[v];
            let mut sources: BTreeSet<usize> = restricted
                .iter()
                .enumerate()
                .filter(|(_, g)| g.eval_unchecked(&p).abs() <= ctx.tol_val)
                .map(|(j, _)| j)
                .collect();
            sources.insert(prev.source);
            sources.insert(next.source);
            let colors = sources.iter().map(|&j| spec.colors.color_of(j)).collect();
            l.corners.push(corners.len());
            corners.push(Corner { point: p, vertex: v, sources, colors });
        }
        out_loops.push(l);
    }

    let holes = out_loops.len() - outer_count;
    Ok(PlanarRegion {
        plane,
        loops: out_loops,
        corners,
        tangencies,
        euler_char: outer_count as i64 - holes as i64,
        components: outer_count,
        l2: spec.l2(),
        scale,
        restricted,
    })
}

fn make_arc(ctx: &Ctx, pieces: &[Piece], group: &[usize], verts: &[[f64; 2]], closed: bool) -> Arc {
    let first = &pieces[group[0]];
    let last = &pieces[*group.last().unwrap()];
    let prim = &ctx.prims[first.prim];
    let start = first.from.map_or_else(|| ctx.point(first, 0.0), |v| verts[v]);
    let end = last.to.map_or_else(|| ctx.point(last, 1.0), |v| verts[v]);
    let kind = match &prim.geom {
        Geom::Line(_) => ArcKind::Segment,
        Geom::Circle(c) => {
            let sweep: f64 = group.iter().map(|&p| pieces[p].t1 - pieces[p].t0).sum();
            let start_angle = if first.from.is_some() { c.angle(start) } else { first.t0 };
            ArcKind::Circular { center: [c.cu, c.cv], radius: c.radius(), start_angle, sweep }
        }
    };
    Arc { kind, source: prim.source, color: prim.color, start, end, closed }
}

/// Follows pieces into closed loops, keeping the region on the left.
fn trace(ctx: &Ctx, pieces: &[Piece], verts: &[[f64; 2]]) -> Result<Vec<Vec<usize>>> {
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (i, p) in pieces.iter().enumerate() {
        if let Some(v) = p.from {
            outgoing[v].push(i);
        }
    }
    let probe = |piece: &Piece, at_end: bool| -> [f64; 2] {
        let len = ctx.length(piece).max(1e-300);
        let f = (1e-4 * ctx.scale / len).min(0.25);
        ctx.point(piece, if at_end { 1.0 - f } else { f })
    };
    let mut used = vec![false; pieces.len()];
    let mut loops = Vec::new();
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        if pieces[start].from.is_none() {
            loops.push(vec![start]);
            continue;
        }
        let mut lp = vec![start];
        let mut cur = start;
        loop {
            let v = pieces[cur].to.expect("open piece in a vertex chain");
            let vp = verts[v];
            let back = probe(&pieces[cur], true);
            let ref_angle = (back[1] - vp[1]).atan2(back[0] - vp[0]);
            let mut best: Option<(f64, usize)> = None;
            for &c in &outgoing[v] {
                if used[c] && c != start {
                    continue;
                }
                let q = probe(&pieces[c], false);
                let ang = (q[1] - vp[1]).atan2(q[0] - vp[0]);
                let mut cw = (ref_angle - ang).rem_euclid(TAU);
                if cw < 1e-12 {
                    cw = TAU;
                }
                if best.map_or(true, |(b, _)| cw < b) {
                    best = Some((cw, c));
                }
            }
            let Some((_, next)) = best else {
                return Err(Error::InvalidInput(format!(
                    "slice boundary does not close at ({:.6}, {:.6})",
                    vp[0], vp[1]
                )));
            };
            if next == start {
                break;
            }
            used[next] = true;
            lp.push(next);
            cur = next;
            if lp.len() > pieces.len() {
                return Err(Error::InvalidInput("slice boundary tracing did not terminate".into()));
            }
        }
        loops.push(lp);
    }
    Ok(loops)
}
