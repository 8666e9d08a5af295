//! Sign-vector doubling of a labeled slice mesh into a closed surface.
//!
//! Over a point where the colors in `A` vanish, the fiber of the lifted
//! variety is `{±1}^{l2 - |A|}`. A copy of the mesh is made for every sign
//! vector and copies are identified at each vertex along the vanishing
//! colors. Odd-parity copies are reflected so the result is oriented.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::arrangement::{parity, LiftedSystem, SignVector};
use crate::error::{Error, Result};
use crate::slicer::{LabeledMesh, PlanarRegion};

#[derive(Clone, Debug)]
pub struct DoubledSurface {
    pub base: LabeledMesh,
    pub l2: usize,
    /// `(base vertex, sign vector with the active colors cleared)`.
    pub vertices: Vec<(usize, SignVector)>,
    pub triangles: Vec<[usize; 3]>,
    /// `(base triangle, sign vector)` for each triangle.
    pub origin: Vec<(usize, SignVector)>,
    /// Ambient coordinates `(x, y)` per vertex once embedded.
    pub embedded: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceInvariants {
    pub chi: i64,
    pub orientable: bool,
    pub components: usize,
    pub genus: Option<i64>,
}

pub fn build_double(mesh: &LabeledMesh, l2: usize) -> Result<DoubledSurface> {
    if l2 == 0 || l2 > 16 {
        return Err(Error::InvalidInput(format!("unsupported color count {l2}")));
    }
    let full: u32 = (1u32 << l2) - 1;
    for (v, &m) in mesh.active.iter().enumerate() {
        if m & !full != 0 {
            return Err(Error::InvalidInput(format!("vertex {v} carries a color above {l2}")));
        }
    }
    let mut index: HashMap<(usize, SignVector), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut id = |v: usize, s: SignVector, vertices: &mut Vec<(usize, SignVector)>| -> usize {
        let key = (v, s & !mesh.active[v]);
        *index.entry(key).or_insert_with(|| {
            vertices.push(key);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(mesh.triangles.len() << l2);
    let mut origin = Vec::with_capacity(triangles.capacity());
    for s in 0..(1u32 << l2) {
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let (a, b, c) = (id(t[0], s, &mut vertices), id(t[1], s, &mut vertices), id(t[2], s, &mut vertices));
            triangles.push(if parity(s) > 0 { [a, b, c] } else { [a, c, b] });
            origin.push((ti, s));
        }
    }
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut bad: Vec<((usize, usize), usize)> = count.into_iter().filter(|&(_, c)| c != 2).collect();
    bad.sort();
    if let Some(&((a, b), c)) = bad.first() {
        let (ba, bb) = (vertices[a].0, vertices[b].0);
        return Err(Error::NonManifold { a: ba.min(bb), b: ba.max(bb), count: c });
    }
    Ok(DoubledSurface { base: mesh.clone(), l2, vertices, triangles, origin, embedded: None })
}

/// Euler characteristic, components, orientability and genus of a closed
/// triangulated surface.
pub fn invariants_of(triangles: &[[usize; 3]]) -> SurfaceInvariants {
    let mut vset = BTreeMap::new();
    for t in triangles {
        for &v in t {
            let next = vset.len();
            vset.entry(v).or_insert(next);
        }
    }
    // directed edge occurrences per undirected edge: (triangle, forward?)
    let mut edges: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push((ti, a < b));
        }
    }
    let chi = vset.len() as i64 - edges.len() as i64 + triangles.len() as i64;

    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); triangles.len()];
    for occ in edges.values() {
        for i in 0..occ.len() {
            for j in 0..occ.len() {
                if i != j {
                    // consistent orientation traverses the shared edge in opposite directions
                    adj[occ[i].0].push((occ[j].0, occ[i].1 == occ[j].1));
                }
            }
        }
    }
    let mut flip: Vec<Option<bool>> = vec![None; triangles.len()];
    let mut components = 0;
    let mut orientable = true;
    for seed in 0..triangles.len() {
        if flip[seed].is_some() {
            continue;
        }
        components += 1;
        flip[seed] = Some(false);
        let mut queue = VecDeque::from([seed]);
        while let Some(t) = queue.pop_front() {
            let ft = flip[t].unwrap();
            for &(u, must_flip) in &adj[t] {
                let want = ft ^ must_flip;
                match flip[u] {
                    None => {
                        flip[u] = Some(want);
                        queue.push_back(u);
                    }
                    Some(f) if f != want => orientable = false,
                    _ => {}
                }
            }
        }
    }
    let genus = (orientable && components == 1 && chi % 2 == 0).then(|| (2 - chi) / 2);
    SurfaceInvariants { chi, orientable, components, genus }
}

pub fn surface_invariants(s: &DoubledSurface) -> SurfaceInvariants {
    invariants_of(&s.triangles)
}

/// Euler characteristic of the doubled surface from the stratification of
/// the region alone: open face, open arcs, corners.
pub fn chi_stratified(region: &PlanarRegion, l2: usize) -> i64 {
    let full = 1i64 << l2;
    let half = full / 2;
    let mut chi = full * region.euler_char;
    for lp in &region.loops {
        for arc in &lp.arcs {
            if !arc.closed {
                chi -= half;
            }
        }
    }
    for c in region.distinct_corners() {
        chi += full >> c.colors.len();
    }
    chi
}

/// Connected components of the doubled surface predicted from the region:
/// a component whose boundary sees `k` colors is covered by `2^{l2-k}` sheets.
pub fn predicted_components(region: &PlanarRegion, l2: usize) -> usize {
    (0..region.loops.len())
        .filter(|&i| region.loops[i].outer)
        .map(|c| 1usize << (l2 - region.component_colors(c).len()))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    /// Largest `|F_i(x) - y_i^2|` over all vertices and colors.
    pub max_residual: f64,
    /// The `x` part of every vertex equals its base point bit for bit.
    pub projection_exact: bool,
}

/// Places every vertex on the lifted variety: `y_i = σ_i sqrt(F_i(x))`, with
/// `F_i` clamped at zero.
pub fn embed(s: &mut DoubledSurface, ls: &LiftedSystem) -> Result<EmbeddingReport> {
    if ls.base.l2() != s.l2 {
        return Err(Error::InvalidInput("lifted system and surface disagree on colors".into()));
    }
    for (i, &d) in ls.base.colors.sphere_dims().iter().enumerate() {
        if d != 0 {
            return Err(Error::UnsupportedSphereDim { color: i + 1, dim: d });
        }
    }
    let base_points: Vec<Vec<f64>> = (0..s.base.vertices.len()).map(|v| s.base.lift(v)).collect();
    let mut coords = Vec::with_capacity(s.vertices.len());
    let mut max_residual: f64 = 0.0;
    for &(v, sig) in &s.vertices {
        let x = &base_points[v];
        let mut p = x.clone();
        for k in 0..ls.color_polys.len() {
            // tested per factor: the product scales rounding by the other factors
            for j in ls.base.colors.fiber(k + 1) {
                let f = ls.base.polys[j].eval_unchecked(x);
                if f < -1e-9 {
                    return Err(Error::Embedding { vertex: v, color: k + 1, value: f });
                }
            }
            let val = ls.color_value(k + 1, x);
            // active sign bits are cleared in the key, so both sheets share this root
            let r = val.max(0.0).sqrt();
            let y = if sig >> k & 1 == 1 { -r } else { r };
            max_residual = max_residual.max((val - y * y).abs());
            p.push(y);
        }
        coords.push(p);
    }
    let projection_exact = s
        .vertices
        .iter()
        .zip(&coords)
        .all(|(&(v, _), p)| p[..ls.base.n] == base_points[v][..]);
    s.embedded = Some(coords);
    Ok(EmbeddingReport { max_residual, projection_exact })
}
