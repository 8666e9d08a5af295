//! Reeb graph of a height function on a triangulated surface.
//!
//! The function is linear on triangles with exact vertex values. Level sets
//! are tracked combinatorially: at each distinct value the level set is made
//! of vertices at that value and edges crossing it; between consecutive values
//! it is made of the spanning edges. Components are glued through triangles.

use std::collections::HashMap;

use serde::Serialize;

use crate::doubler::DoubledSurface;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReebVertex {
    pub level: f64,
    pub degree_up: usize,
    pub degree_down: usize,
    pub is_extremal: bool,
    /// Critical plateaus of the height function merged into this vertex.
    pub critical_cluster_count: usize,
}

impl ReebVertex {
    pub fn degree(&self) -> usize {
        self.degree_up + self.degree_down
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReebGraph {
    pub vertices: Vec<ReebVertex>,
    /// Directed from lower to upper level.
    pub edges: Vec<(usize, usize)>,
    pub components: usize,
    pub betti1: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReebStats {
    pub vertices: usize,
    pub edges: usize,
    pub betti1: i64,
    pub extremal_degrees: Vec<usize>,
    pub interior_degrees: Vec<usize>,
    pub interior_clusters: Vec<usize>,
}

impl ReebGraph {
    pub fn stats(&self) -> ReebStats {
        let mut extremal_degrees = Vec::new();
        let mut interior = Vec::new();
        for v in &self.vertices {
            if v.is_extremal {
                extremal_degrees.push(v.degree());
            } else {
                interior.push((v.degree(), v.critical_cluster_count));
            }
        }
        extremal_degrees.sort_unstable();
        interior.sort_unstable();
        ReebStats {
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            betti1: self.betti1,
            extremal_degrees,
            interior_degrees: interior.iter().map(|x| x.0).collect(),
            interior_clusters: interior.iter().map(|x| x.1).collect(),
        }
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Reeb graph of the embedded surface with respect to ambient coordinate `axis`.
pub fn reeb_graph(s: &DoubledSurface, axis: usize) -> Result<ReebGraph> {
    let coords = s
        .embedded
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("surface must be embedded before computing a Reeb graph".into()))?;
    let dim = coords.first().map_or(0, |c| c.len());
    if axis >= dim {
        return Err(Error::InvalidInput(format!("axis {axis} outside ambient dimension {dim}")));
    }
    let values: Vec<f64> = coords.iter().map(|c| c[axis]).collect();
    Ok(reeb_graph_of(&values, &s.triangles))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Elem {
    Vert(usize),
    Edge(usize),
}

/// Reeb graph of the piecewise-linear function with the given vertex values.
pub fn reeb_graph_of(values: &[f64], triangles: &[[usize; 3]]) -> ReebGraph {
    // distinct levels; -0.0 and 0.0 are the same level
    let values: Vec<f64> = values.iter().map(|&v| v + 0.0).collect();
    let mut levels: Vec<f64> = triangles.iter().flatten().map(|&v| values[v]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let lv: HashMap<usize, usize> = triangles
        .iter()
        .flatten()
        .map(|&v| (v, levels.binary_search_by(|x| x.total_cmp(&values[v])).unwrap()))
        .collect();
    let lvl = |v: usize| lv[&v];

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut tri_edges: Vec<[usize; 3]> = Vec::with_capacity(triangles.len());
    for t in triangles {
        let mut te = [0; 3];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            te[k] = *edge_index.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            });
        }
        tri_edges.push(te);
    }
    let nverts = values.len();

    // plateaus and their PL criticality
    let mut plat = Dsu::new(nverts);
    for &(a, b) in &edges {
        if lvl(a) == lvl(b) {
            plat.union(a, b);
        }
    }
    let mut mu_low: HashMap<usize, i64> = HashMap::new();
    let mut mu_up: HashMap<usize, i64> = HashMap::new();
    let mut has_lower: HashMap<usize, bool> = HashMap::new();
    let mut has_upper: HashMap<usize, bool> = HashMap::new();
    let mut account = |simplex: &[usize], sign: i64, plat: &mut Dsu| {
        let top = *simplex.iter().max_by_key(|&&v| lvl(v)).unwrap();
        let bot = *simplex.iter().min_by_key(|&&v| lvl(v)).unwrap();
        *mu_low.entry(plat.find(top)).or_default() += sign;
        *mu_up.entry(plat.find(bot)).or_default() += sign;
    };
    let used: Vec<usize> = {
        let mut u: Vec<usize> = lv.keys().copied().collect();
        u.sort_unstable();
        u
    };
    for &v in &used {
        account(&[v], 1, &mut plat);
    }
    for &(a, b) in &edges {
        account(&[a, b], -1, &mut plat);
        if lvl(a) != lvl(b) {
            let (lo, hi) = if lvl(a) < lvl(b) { (a, b) } else { (b, a) };
            has_upper.insert(plat.find(lo), true);
            has_lower.insert(plat.find(hi), true);
        }
    }
    for t in triangles {
        account(t, 1, &mut plat);
    }
    let mut critical: HashMap<usize, bool> = HashMap::new();
    for &v in &used {
        let p = plat.find(v);
        critical.entry(p).or_insert_with(|| {
            !has_lower.get(&p).copied().unwrap_or(false)
                || !has_upper.get(&p).copied().unwrap_or(false)
                || mu_low.get(&p).copied().unwrap_or(0) != 0
                || mu_up.get(&p).copied().unwrap_or(0) != 0
        });
    }

    // level nodes and arcs, sweeping upward
    let m = levels.len();
    let emin = |e: usize| lvl(edges[e].0).min(lvl(edges[e].1));
    let emax = |e: usize| lvl(edges[e].0).max(lvl(edges[e].1));
    let mut order: Vec<usize> = (0..triangles.len()).collect();
    let tmin = |t: usize| triangles[t].iter().map(|&v| lvl(v)).min().unwrap();
    let tmax = |t: usize| triangles[t].iter().map(|&v| lvl(v)).max().unwrap();
    order.sort_by_key(|&t| tmin(t));

    // node data: level, clusters; arcs: (down node, up node)
    let mut node_level: Vec<usize> = Vec::new();
    let mut node_clusters: Vec<usize> = Vec::new();
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut prev_nodes: HashMap<Elem, usize> = HashMap::new();
    let mut active: Vec<usize> = Vec::new();
    let mut next = 0;
    for k in 0..m {
        while next < order.len() && tmin(order[next]) <= k {
            active.push(order[next]);
            next += 1;
        }
        active.retain(|&t| tmax(t) >= k);

        // level set at k
        let mut elems: HashMap<Elem, usize> = HashMap::new();
        let mut list: Vec<Elem> = Vec::new();
        let mut slot = |e: Elem, list: &mut Vec<Elem>| -> usize {
            *elems.entry(e).or_insert_with(|| {
                list.push(e);
                list.len() - 1
            })
        };
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &t in &active {
            let mut here: Vec<usize> = Vec::new();
            for &v in &triangles[t] {
                if lvl(v) == k {
                    here.push(slot(Elem::Vert(v), &mut list));
                }
            }
            for &e in &tri_edges[t] {
                if emin(e) < k && emax(e) > k {
                    here.push(slot(Elem::Edge(e), &mut list));
                }
            }
            for w in here.windows(2) {
                pairs.push((w[0], w[1]));
            }
        }
        let mut dsu = Dsu::new(list.len());
        for (a, b) in pairs {
            dsu.union(a, b);
        }
        let mut root_node: HashMap<usize, usize> = HashMap::new();
        let mut cur_nodes: HashMap<Elem, usize> = HashMap::new();
        for (i, &e) in list.iter().enumerate() {
            let r = dsu.find(i);
            let node = *root_node.entry(r).or_insert_with(|| {
                node_level.push(k);
                node_clusters.push(0);
                node_level.len() - 1
            });
            cur_nodes.insert(e, node);
        }
        // count critical plateaus per node
        let mut seen_plateaus: HashMap<usize, ()> = HashMap::new();
        for &e in &list {
            if let Elem::Vert(v) = e {
                let p = plat.find(v);
                if critical[&p] && seen_plateaus.insert(p, ()).is_none() {
                    node_clusters[cur_nodes[&e]] += 1;
                }
            }
        }

        // arcs of the interval (k-1, k)
        if k > 0 {
            let mut span: HashMap<usize, usize> = HashMap::new();
            let mut span_list: Vec<usize> = Vec::new();
            let mut span_pairs = Vec::new();
            for &t in &active {
                if tmin(t) <= k - 1 && tmax(t) >= k {
                    let here: Vec<usize> = tri_edges[t]
                        .iter()
                        .filter(|&&e| emin(e) <= k - 1 && emax(e) >= k)
                        .map(|&e| {
                            *span.entry(e).or_insert_with(|| {
                                span_list.push(e);
                                span_list.len() - 1
                            })
                        })
                        .collect();
                    for w in here.windows(2) {
                        span_pairs.push((w[0], w[1]));
                    }
                }
            }
            let mut dsu = Dsu::new(span_list.len());
            for (a, b) in span_pairs {
                dsu.union(a, b);
            }
            let mut done: HashMap<usize, ()> = HashMap::new();
            for (i, &e) in span_list.iter().enumerate() {
                let r = dsu.find(i);
                if done.insert(r, ()).is_some() {
                    continue;
                }
                let (a, b) = edges[e];
                let (lo, hi) = if lvl(a) < lvl(b) { (a, b) } else { (b, a) };
                let down = if lvl(lo) == k - 1 { prev_nodes[&Elem::Vert(lo)] } else { prev_nodes[&Elem::Edge(e)] };
                let up = if lvl(hi) == k { cur_nodes[&Elem::Vert(hi)] } else { cur_nodes[&Elem::Edge(e)] };
                arcs.push((down, up));
            }
        }
        prev_nodes = cur_nodes;
    }

    // contract regular nodes
    let nn = node_level.len();
    let mut ups: Vec<Vec<usize>> = vec![Vec::new(); nn];
    let mut downs: Vec<Vec<usize>> = vec![Vec::new(); nn];
    for (i, &(d, u)) in arcs.iter().enumerate() {
        ups[d].push(i);
        downs[u].push(i);
    }
    let is_vertex: Vec<bool> =
        (0..nn).map(|n| node_clusters[n] > 0 || ups[n].len() != 1 || downs[n].len() != 1).collect();
    let mut vid: Vec<Option<usize>> = vec![None; nn];
    let mut vertices = Vec::new();
    for n in 0..nn {
        if is_vertex[n] {
            vid[n] = Some(vertices.len());
            vertices.push(ReebVertex {
                level: levels[node_level[n]],
                degree_up: ups[n].len(),
                degree_down: downs[n].len(),
                is_extremal: ups[n].is_empty() || downs[n].is_empty(),
                critical_cluster_count: node_clusters[n],
            });
        }
    }
    let mut out_edges = Vec::new();
    for n in 0..nn {
        let Some(from) = vid[n] else { continue };
        for &a in &ups[n] {
            let mut cur = arcs[a].1;
            while !is_vertex[cur] {
                cur = arcs[ups[cur][0]].1;
            }
            out_edges.push((from, vid[cur].unwrap()));
        }
    }
    let mut dsu = Dsu::new(vertices.len());
    for &(a, b) in &out_edges {
        dsu.union(a, b);
    }
    let components = (0..vertices.len()).filter(|&v| dsu.find(v) == v).count();
    let betti1 = out_edges.len() as i64 - vertices.len() as i64 + components as i64;
    ReebGraph { vertices, edges: out_edges, components, betti1 }
}
