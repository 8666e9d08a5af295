//! Color-labeled triangulation of a slice region.
//!
//! Boundary arcs are subdivided (at least two pieces per arc, so no segment
//! joins two corners), interior grid points are added, and a constrained
//! Delaunay triangulation is restricted to the region by parity across the
//! constraint edges. Interior edges whose
//! endpoints share an active color are split until none remain: such an edge
//! would be glued to itself across two sheets and pinch the doubled surface.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use spade::handles::FixedVertexHandle;
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{ArcKind, PlanarRegion, SlicePlane};
use crate::error::{Error, Result};
use crate::polynomial::from_f64;

pub type ColorMask = u32;

#[derive(Clone, Debug, Serialize)]
pub struct LabeledMesh {
    pub plane: SlicePlane,
    pub l2: usize,
    pub vertices: Vec<[f64; 2]>,
    /// Bit `c - 1` set when color `c` vanishes at the vertex.
    pub active: Vec<ColorMask>,
    pub sources: Vec<Vec<usize>>,
    /// Counter-clockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<[usize; 2]>,
}

impl LabeledMesh {
    pub fn active_colors(&self, v: usize) -> Vec<usize> {
        (0..self.l2).filter(|c| self.active[v] >> c & 1 == 1).map(|c| c + 1).collect()
    }

    pub fn lift(&self, v: usize) -> Vec<f64> {
        self.plane.lift(self.vertices[v])
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }

    pub fn euler_char(&self) -> i64 {
        let used: BTreeSet<usize> = self.triangles.iter().flatten().copied().collect();
        used.len() as i64 - self.edges().len() as i64 + self.triangles.len() as i64
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| tri_area(&self.vertices, t)).sum()
    }
}

fn tri_area(p: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (p[t[0]], p[t[1]], p[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Triangulates `region` with boundary spacing and interior grid spacing `density`.
pub fn triangulate(region: &PlanarRegion, density: f64) -> Result<LabeledMesh> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(Error::InvalidInput(format!("density must be positive, got {density}")));
    }
    struct Entry {
        point: [f64; 2],
        active: ColorMask,
        sources: Vec<usize>,
        /// Arrangement vertex id for corners.
        corner: Option<usize>,
        /// Interior sample of a straight arc.
        straight: bool,
    }
    let mut loop_entries: Vec<Vec<Entry>> = Vec::new();
    for lp in &region.loops {
        let mut entries = Vec::new();
        for (k, arc) in lp.arcs.iter().enumerate() {
            let samples = arc.sample(density, if arc.closed { 16 } else { 2 });
            let straight = matches!(arc.kind, ArcKind::Segment);
            let interior = if arc.closed {
                &samples[..]
            } else {
                let corner = &region.corners[lp.corners[k]];
                entries.push(Entry {
                    point: corner.point,
                    active: corner.colors.iter().fold(0, |m, c| m | 1 << (c - 1)),
                    sources: corner.sources.iter().copied().collect(),
                    corner: Some(corner.vertex),
                    straight: false,
                });
                &samples[1..]
            };
            for &p in interior {
                entries.push(Entry { point: p, active: 1 << (arc.color - 1), sources: vec![arc.source], corner: None, straight });
            }
        }
        drop_outward_samples(&mut entries, |e| (e.point, e.straight, e.corner.map(|_| e.active)));
        loop_entries.push(entries);
    }

    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut active: Vec<ColorMask> = Vec::new();
    let mut sources: Vec<Vec<usize>> = Vec::new();
    let mut corner_ids: HashMap<usize, usize> = HashMap::new();
    let mut loops_ids: Vec<Vec<usize>> = Vec::new();
    for entries in loop_entries {
        let mut ids = Vec::new();
        for e in entries {
            let mut push = |e: Entry| {
                vertices.push(e.point);
                active.push(e.active);
                sources.push(e.sources);
                vertices.len() - 1
            };
            let id = match e.corner {
                Some(v) => match corner_ids.get(&v) {
                    Some(&id) => id,
                    None => {
                        let id = push(e);
                        corner_ids.insert(v, id);
                        id
                    }
                },
                None => push(e),
            };
            ids.push(id);
        }
        loops_ids.push(ids);
    }
    let nb = vertices.len();
    let polylines: Vec<Vec<[f64; 2]>> =
        loops_ids.iter().map(|ids| ids.iter().map(|&i| vertices[i]).collect()).collect();
    let mut segments = Vec::new();
    for ids in &loops_ids {
        for k in 0..ids.len() {
            segments.push([ids[k], ids[(k + 1) % ids.len()]]);
        }
    }

    add_grid_points(&polylines, &segments, &vertices.clone(), density, &mut vertices);
    let n_steiner = vertices.len() - nb;
    active.extend(std::iter::repeat_n(0, n_steiner));
    sources.extend(std::iter::repeat(Vec::new()).take(n_steiner));

    let mut cdt = Cdt::new();
    let mut handles: Vec<FixedVertexHandle> = Vec::with_capacity(vertices.len());
    let mut by_handle: HashMap<usize, usize> = HashMap::new();
    for (i, p) in vertices.iter().enumerate() {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::InvalidInput(format!("triangulation insert failed: {e:?}")))?;
        if by_handle.insert(h.index(), i).is_some() {
            return Err(Error::InvalidInput(format!(
                "coincident mesh vertices at ({:.6}, {:.6}); lower the density",
                p[0], p[1]
            )));
        }
        handles.push(h);
    }
    let mut boundary: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in &segments {
        let (ha, hb) = (handles[s[0]], handles[s[1]]);
        if !cdt.can_add_constraint(ha, hb) {
            return Err(Error::InvalidInput("slice boundary self-intersects after subdivision".into()));
        }
        cdt.add_constraint(ha, hb);
        boundary.insert((s[0].min(s[1]), s[0].max(s[1])));
    }

    let mut triangles;
    let mut rounds = 0;
    loop {
        triangles = Vec::new();
        for face in inside_faces(&cdt) {
            let mut t = face.vertices().map(|v| by_handle[&v.fix().index()]);
            if tri_area(&vertices, &t) < 0.0 {
                t.swap(1, 2);
            }
            triangles.push(t);
        }
        let mut bad = BTreeSet::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]));
                if active[a] & active[b] != 0 && !boundary.contains(&(a, b)) {
                    bad.insert((a, b));
                }
            }
        }
        if bad.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > 32 {
            return Err(Error::InvalidInput("mesh refinement did not converge".into()));
        }
        for (a, b) in bad {
            let m = [0.5 * (vertices[a][0] + vertices[b][0]), 0.5 * (vertices[a][1] + vertices[b][1])];
            let h = cdt
                .insert(Point2::new(m[0], m[1]))
                .map_err(|e| Error::InvalidInput(format!("triangulation insert failed: {e:?}")))?;
            if by_handle.contains_key(&h.index()) {
                continue;
            }
            by_handle.insert(h.index(), vertices.len());
            vertices.push(m);
            active.push(0);
            sources.push(Vec::new());
        }
    }
    triangles.sort();

    Ok(LabeledMesh {
        plane: region.plane.clone(),
        l2: region.l2,
        vertices,
        active,
        sources,
        triangles,
        boundary_edges: boundary.into_iter().map(|(a, b)| [a, b]).collect(),
    })
}

type Cdt = ConstrainedDelaunayTriangulation<Point2<f64>>;

/// Faces enclosed by an odd number of constraint loops, found by flooding
/// from the hull and flipping parity across constraint edges. Unlike a point
/// test this stays correct for triangles of vanishing width.
fn inside_faces(cdt: &Cdt) -> Vec<spade::handles::FaceHandle<'_, spade::handles::InnerTag, Point2<f64>, (), spade::CdtEdge<()>, ()>> {
    let mut parity: HashMap<usize, bool> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    for face in cdt.inner_faces() {
        for e in face.adjacent_edges() {
            if e.rev().face().is_outer() && !parity.contains_key(&face.fix().index()) {
                parity.insert(face.fix().index(), e.is_constraint_edge());
                queue.push_back(face);
            }
        }
    }
    while let Some(face) = queue.pop_front() {
        let p = parity[&face.fix().index()];
        for e in face.adjacent_edges() {
            if let Some(next) = e.rev().face().as_inner() {
                if !parity.contains_key(&next.fix().index()) {
                    parity.insert(next.fix().index(), p ^ e.is_constraint_edge());
                    queue.push_back(next);
                }
            }
        }
    }
    cdt.inner_faces().filter(|f| parity.get(&f.fix().index()).copied().unwrap_or(false)).collect()
}

/// Sign of the turn `a -> b -> c`, computed exactly.
fn turn(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> std::cmp::Ordering {
    let q = |p: [f64; 2]| [from_f64(p[0]).unwrap(), from_f64(p[1]).unwrap()];
    let (a, b, c) = (q(a), q(b), q(c));
    let cross = (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0]);
    cross.cmp(&num_traits::Zero::zero())
}

/// Samples of a straight arc are collinear only up to rounding. A sample
/// bulging to the outside would form a zero-area triangle with its neighbours
/// inside the region, joining two boundary points of one color by an interior
/// edge that cannot be split. Such samples are dropped. `info` gives the
/// point, whether it is a straight-arc sample, and the color mask of corners.
fn drop_outward_samples<E>(entries: &mut Vec<E>, info: impl Fn(&E) -> ([f64; 2], bool, Option<ColorMask>)) {
    loop {
        let n = entries.len();
        let mut drop = None;
        for k in 0..n {
            let (b, straight, _) = info(&entries[k]);
            if !straight || n <= 3 {
                continue;
            }
            let (a, _, ca) = info(&entries[(k + n - 1) % n]);
            let (c, _, cc) = info(&entries[(k + 1) % n]);
            // never leave a bare segment between corners glued along two colors
            if let (Some(x), Some(y)) = (ca, cc) {
                if (x & y).count_ones() > 1 {
                    continue;
                }
            }
            if turn(a, b, c) == std::cmp::Ordering::Greater {
                drop = Some(k);
                break;
            }
        }
        match drop {
            Some(k) => {
                entries.remove(k);
            }
            None => return,
        }
    }
}

/// Interior grid points at least `density / 2` away from the boundary.
fn add_grid_points(
    polylines: &[Vec<[f64; 2]>],
    segments: &[[usize; 2]],
    bpts: &[[f64; 2]],
    h: f64,
    out: &mut Vec<[f64; 2]>,
) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in bpts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
    let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
    let margin = 0.5 * h;
    // bucket segments by grid cell, padded by the margin
    let mut buckets: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let cell = |x: f64, k: usize| (((x - lo[k]) / h).floor().max(0.0)) as usize;
    for (si, s) in segments.iter().enumerate() {
        let (a, b) = (bpts[s[0]], bpts[s[1]]);
        let (x0, x1) = (cell(a[0].min(b[0]) - margin, 0), cell(a[0].max(b[0]) + margin, 0));
        let (y0, y1) = (cell(a[1].min(b[1]) - margin, 1), cell(a[1].max(b[1]) + margin, 1));
        for i in x0..=x1 {
            for j in y0..=y1 {
                buckets.entry((i, j)).or_default().push(si);
            }
        }
    }
    for j in 0..ny {
        let y = lo[1] + (j as f64 + 0.5) * h;
        let mut xs: Vec<f64> = Vec::new();
        for poly in polylines {
            let n = poly.len();
            for i in 0..n {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                if (a[1] > y) != (b[1] > y) {
                    xs.push(a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        for i in 0..nx {
            let x = lo[0] + (i as f64 + 0.5) * h;
            let crossings = xs.iter().filter(|&&c| c > x).count();
            if crossings % 2 == 0 {
                continue;
            }
            let near = buckets.get(&(cell(x, 0), cell(y, 1))).map_or(false, |segs| {
                segs.iter().any(|&si| seg_dist([x, y], bpts[segments[si][0]], bpts[segments[si][1]]) < margin)
            });
            if !near {
                out.push([x, y]);
            }
        }
    }
}
