//! Two-dimensional slices of the region and their triangulation.

pub mod curve;
pub mod mesh;
mod region;

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::arrangement::ArrangementSpec;
use crate::error::{Error, Result};
use crate::polynomial::{from_f64, Polynomial};

pub use mesh::{triangulate, LabeledMesh};

/// Affine plane obtained by fixing all but two coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlicePlane {
    pub n: usize,
    /// `(axis, value)`, 0-based axes.
    pub fixed: Vec<(usize, f64)>,
    pub free: [usize; 2],
}

impl SlicePlane {
    pub fn new(n: usize, fixed: &[(usize, f64)]) -> Result<Self> {
        if n < 2 || fixed.len() + 2 != n {
            return Err(Error::InvalidInput(format!(
                "slicing R^{n} needs {} fixed coordinates, got {}",
                n.saturating_sub(2),
                fixed.len()
            )));
        }
        let mut seen = vec![false; n];
        for &(axis, v) in fixed {
            if axis >= n || seen[axis] {
                return Err(Error::InvalidInput(format!("bad slice axis {axis}")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite slice value {v}")));
            }
            seen[axis] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
        let mut fixed = fixed.to_vec();
        fixed.sort_by_key(|f| f.0);
        Ok(Self { n, fixed, free: [free[0], free[1]] })
    }

    /// Point of `R^n` with plane coordinates `p`.
    pub fn lift(&self, p: [f64; 2]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for &(axis, v) in &self.fixed {
            x[axis] = v;
        }
        x[self.free[0]] = p[0];
        x[self.free[1]] = p[1];
        x
    }

    /// Restriction of `p` to the plane, as a polynomial in the two free
    /// coordinates (in increasing axis order).
    pub fn restrict(&self, p: &Polynomial) -> Result<Polynomial> {
        let fixed = self
            .fixed
            .iter()
            .map(|&(axis, v)| Ok((axis, from_f64(v)?)))
            .collect::<Result<Vec<_>>>()?;
        p.substitute(&fixed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ArcKind {
    Segment,
    Circular { center: [f64; 2], radius: f64, start_angle: f64, sweep: f64 },
}

/// Maximal smooth piece of the boundary; the region lies to its left.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub kind: ArcKind,
    pub source: usize,
    pub color: usize,
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// A full closed curve with no corner on it.
    pub closed: bool,
}

impl Arc {
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        if s <= 0.0 {
            return self.start;
        }
        if s >= 1.0 && !self.closed {
            return self.end;
        }
        match &self.kind {
            ArcKind::Segment => [
                self.start[0] + s * (self.end[0] - self.start[0]),
                self.start[1] + s * (self.end[1] - self.start[1]),
            ],
            ArcKind::Circular { center, radius, start_angle, sweep } => {
                let t = start_angle + s * sweep;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            }
        }
    }

    pub fn length(&self) -> f64 {
        match &self.kind {
            ArcKind::Segment => (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1]),
            ArcKind::Circular { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// `∮ (x dy - y dx) / 2` along the arc.
    fn area_term(&self) -> f64 {
        match &self.kind {
            ArcKind::Segment => 0.5 * (self.start[0] * self.end[1] - self.end[0] * self.start[1]),
            ArcKind::Circular { center, radius, start_angle, sweep } => {
                let (a, b) = (*start_angle, start_angle + sweep);
                0.5 * (radius * radius * sweep
                    + radius * (center[0] * (b.sin() - a.sin()) - center[1] * (b.cos() - a.cos())))
            }
        }
    }

    /// Points along the arc from `start` (inclusive) to `end` (exclusive),
    /// spaced at most `max_len` apart, with at least `min_segments` pieces.
    pub fn sample(&self, max_len: f64, min_segments: usize) -> Vec<[f64; 2]> {
        let k = ((self.length() / max_len).ceil() as usize).max(min_segments).max(1);
        (0..k).map(|i| self.point_at(i as f64 / k as f64)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corner {
    pub point: [f64; 2],
    /// Arrangement vertex id; pinch points shared by two loops share it.
    pub vertex: usize,
    pub sources: BTreeSet<usize>,
    pub colors: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Loop {
    pub arcs: Vec<Arc>,
    /// `corners[k]` indexes `PlanarRegion::corners` and sits at the start of `arcs[k]`.
    pub corners: Vec<usize>,
    pub outer: bool,
    pub component: usize,
    pub signed_area: f64,
}

impl Loop {
    /// Closed polyline through the loop (last point not repeated).
    pub fn polyline(&self, max_len: f64) -> Vec<[f64; 2]> {
        self.arcs.iter().flat_map(|a| a.sample(max_len, if a.closed { 16 } else { 2 })).collect()
    }
}

/// Tangential contact of two boundary curves inside the closed region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tangency {
    pub point: [f64; 2],
    pub sources: [usize; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanarRegion {
    pub plane: SlicePlane,
    pub loops: Vec<Loop>,
    pub corners: Vec<Corner>,
    pub tangencies: Vec<Tangency>,
    pub euler_char: i64,
    pub components: usize,
    pub l2: usize,
    /// Characteristic length of the slice.
    pub scale: f64,
    #[serde(skip)]
    pub restricted: Vec<Polynomial>,
}

impl PlanarRegion {
    pub fn arc_count(&self) -> usize {
        self.loops.iter().map(|l| l.arcs.len()).sum()
    }

    /// Corners with distinct arrangement vertices.
    pub fn distinct_corners(&self) -> Vec<&Corner> {
        let mut seen = BTreeSet::new();
        self.corners.iter().filter(|c| seen.insert(c.vertex)).collect()
    }

    /// Colors appearing on the boundary of region component `c`.
    pub fn component_colors(&self, c: usize) -> BTreeSet<usize> {
        self.loops
            .iter()
            .filter(|l| l.component == c)
            .flat_map(|l| l.arcs.iter().map(|a| a.color))
            .collect()
    }

    pub fn in_closure(&self, p: [f64; 2], tol: f64) -> bool {
        self.restricted.iter().all(|g| g.eval_unchecked(&p) >= -tol)
    }
}

/// Slice of a region in `R^3` at `x_axis = value`.
pub fn slice_region(spec: &ArrangementSpec, axis: usize, value: f64) -> Result<PlanarRegion> {
    if spec.n != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: spec.n });
    }
    slice_region_at(spec, &[(axis, value)])
}

/// Slice with `n - 2` coordinates fixed. For `n = 2` pass no fixed coordinates.
pub fn slice_region_at(spec: &ArrangementSpec, fixed: &[(usize, f64)]) -> Result<PlanarRegion> {
    let plane = SlicePlane::new(spec.n, fixed)?;
    let restricted = spec.polys.iter().map(|p| plane.restrict(p)).collect::<Result<Vec<_>>>()?;
    region::build(spec, plane, restricted)
}

pub(crate) fn normalize_angle(t: f64) -> f64 {
    t.rem_euclid(TAU)
}

/// Even-odd test against a set of closed polylines.
pub fn point_in_polylines(polys: &[Vec<[f64; 2]>], p: [f64; 2]) -> bool {
    let mut inside = false;
    for poly in polys {
        let n = poly.len();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
    }
    inside
}
