//! Singular values of a coordinate projection restricted to the closed region.
//!
//! The closed form handles one height-dependent hypersurface that is a round
//! cylinder over a plane containing the projection axis, with the remaining
//! hypersurfaces vertical. A critical value is then `u ± sqrt(r² - ρ²)` where
//! `ρ` is the distance, along the cylinder's second coordinate, from the
//! cylinder axis to a critical point of that coordinate on a stratum of the
//! vertical arrangement. The sampled route sweeps slices and bisects changes
//! of their combinatorial type.

use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::ArrangementSpec;
use crate::error::{Error, Result};
use crate::interval::feasible;
use crate::polynomial::{from_f64, to_f64, Polynomial};
use crate::slicer::curve::{classify, intersect, Contact, Geom, SliceCurve};
use crate::slicer::{slice_region, slice_region_at};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfSpace {
    /// Keep `x_axis >= threshold`.
    pub axis: usize,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValue {
    pub value: f64,
    pub witness: Vec<f64>,
    pub active: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValueReport {
    pub axis: usize,
    pub clip: Option<HalfSpace>,
    pub values: Vec<SingularValue>,
    pub image_interval: [f64; 2],
}

impl SingularValueReport {
    pub fn value_list(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.value).collect()
    }
}

struct Cap {
    index: usize,
    other: usize,
    u: f64,
    v: f64,
    r2: f64,
}

fn vars_of(p: &Polynomial, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| p.involves(i)).collect()
}

fn round_cap(spec: &ArrangementSpec, j: usize, axis: usize) -> Result<Cap> {
    let g = &spec.polys[j];
    let vars = vars_of(g, spec.n);
    let unsupported = || {
        Error::UnsupportedStratum(format!(
            "hypersurface {j} is not a bounded round cylinder over a plane containing axis {axis}"
        ))
    };
    if vars.len() != 2 || g.degree() != 2 {
        return Err(unsupported());
    }
    let k = if vars[0] == axis { vars[1] } else { vars[0] };
    let mono = |pairs: &[(usize, u32)]| {
        let mut m = vec![0u32; spec.n];
        for &(i, e) in pairs {
            m[i] = e;
        }
        g.coefficient(&m)
    };
    let (aa, kk, ak) = (mono(&[(axis, 2)]), mono(&[(k, 2)]), mono(&[(axis, 1), (k, 1)]));
    if aa != kk || !num_traits::Zero::is_zero(&ak) || !num_traits::Signed::is_negative(&aa) {
        return Err(unsupported());
    }
    let alpha = to_f64(&aa);
    let (d, e, f) = (to_f64(&mono(&[(axis, 1)])), to_f64(&mono(&[(k, 1)])), to_f64(&mono(&[])));
    let (u, v) = (-d / (2.0 * alpha), -e / (2.0 * alpha));
    let r2 = u * u + v * v - f / alpha;
    if !(r2 > 0.0) {
        return Err(unsupported());
    }
    Ok(Cap { index: j, other: k, u, v, r2 })
}

/// Candidate points of the vertical arrangement: fixed `(axis, value)` pairs.
fn vertical_candidates(spec: &ArrangementSpec, cap: &Cap) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = spec.n;
    let k = cap.other;
    let vertical: Vec<usize> = (0..spec.l1()).filter(|&j| j != cap.index).collect();
    let mut out = vec![vec![(k, cap.v)]];
    let touching_k: Vec<usize> = vertical.iter().copied().filter(|&j| spec.polys[j].involves(k)).collect();
    if touching_k.is_empty() {
        return Ok(out);
    }
    let mut partners: Vec<usize> =
        touching_k.iter().flat_map(|&j| vars_of(&spec.polys[j], n)).filter(|&i| i != k).collect();
    partners.sort_unstable();
    partners.dedup();
    if partners.len() > 1 {
        return Err(Error::UnsupportedStratum("vertical hypersurfaces through the cylinder coordinate span more than a plane".into()));
    }
    let Some(&m) = partners.first() else {
        // univariate in x_k: the endpoints of the feasible set
        let uni: Vec<Polynomial> = touching_k
            .iter()
            .map(|&j| {
                let others: Vec<(usize, crate::polynomial::Rational)> =
                    (0..n).filter(|&i| i != k).map(|i| (i, crate::polynomial::int(0))).collect();
                spec.polys[j].substitute(&others)
            })
            .collect::<Result<_>>()?;
        for iv in feasible(&uni)? {
            for t in iv {
                if t.is_finite() {
                    out.push(vec![(k, t)]);
                }
            }
        }
        return Ok(out);
    };
    let plane_polys: Vec<usize> =
        vertical.iter().copied().filter(|&j| spec.polys[j].involves(k) || spec.polys[j].involves(m)).collect();
    for &j in &plane_polys {
        if vars_of(&spec.polys[j], n).iter().any(|&i| i != k && i != m) {
            return Err(Error::UnsupportedStratum(format!(
                "hypersurface {j} couples the cylinder plane to further coordinates"
            )));
        }
    }
    let (lo, hi) = (k.min(m), k.max(m));
    let kpos = if k == lo { 0 } else { 1 };
    let zeros: Vec<(usize, crate::polynomial::Rational)> =
        (0..n).filter(|&i| i != lo && i != hi).map(|i| (i, crate::polynomial::int(0))).collect();
    let mut geoms = Vec::new();
    for &j in &plane_polys {
        let g2 = spec.polys[j].substitute(&zeros)?;
        match classify(j, &g2)? {
            SliceCurve::Curves(gs) => geoms.extend(gs),
            SliceCurve::Empty => return Err(Error::EmptyRegion),
            SliceCurve::Free => {}
        }
    }
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for i in 0..geoms.len() {
        for q in i + 1..geoms.len() {
            match intersect(&geoms[i], &geoms[q], 1e-12) {
                Contact::Disjoint => {}
                Contact::Tangent(p) => pts.push(p),
                Contact::Crossing(p, r) => pts.extend([p, r]),
            }
        }
        match &geoms[i] {
            Geom::Circle(c) => {
                let r = c.radius();
                let center = [c.cu, c.cv];
                for s in [-1.0, 1.0] {
                    let mut p = center;
                    p[kpos] += s * r;
                    pts.push(p);
                }
            }
            Geom::Line(l) => {
                // a line of constant x_k is critical for x_k along its whole length
                let coef_m = if kpos == 0 { l.b } else { l.a };
                if coef_m == 0.0 {
                    let coef_k = if kpos == 0 { l.a } else { l.b };
                    out.push(vec![(k, -l.c / coef_k)]);
                }
            }
        }
    }
    let axes = [lo, hi];
    for p in pts {
        let x: Vec<(usize, f64)> = vec![(axes[0], p[0]), (axes[1], p[1])];
        out.push(x);
    }
    Ok(out)
}

/// A point of the closed region extending the fixed coordinates, if one exists.
pub fn find_feasible(spec: &ArrangementSpec, fixed: &[(usize, f64)]) -> Result<Option<Vec<f64>>> {
    let n = spec.n;
    let free: Vec<usize> = (0..n).filter(|i| !fixed.iter().any(|f| f.0 == *i)).collect();
    let mut x = vec![0.0; n];
    for &(i, v) in fixed {
        x[i] = v;
    }
    match free.len() {
        0 => Ok(spec.in_closure(&x, 1e-9).then_some(x)),
        1 => {
            let subs = fixed.iter().map(|&(i, v)| Ok((i, from_f64(v)?))).collect::<Result<Vec<_>>>()?;
            let uni = spec.polys.iter().map(|p| p.substitute(&subs)).collect::<Result<Vec<_>>>()?;
            let set = feasible(&uni)?;
            let Some(iv) = set.first() else { return Ok(None) };
            x[free[0]] = match (iv[0].is_finite(), iv[1].is_finite()) {
                (true, true) => 0.5 * (iv[0] + iv[1]),
                (true, false) => iv[0] + 1.0,
                (false, true) => iv[1] - 1.0,
                (false, false) => 0.0,
            };
            Ok(Some(x))
        }
        2 => match slice_region_at(spec, fixed) {
            Ok(region) => {
                let p = region.loops[0].arcs[0].start;
                Ok(Some(region.plane.lift(p)))
            }
            Err(Error::EmptyRegion) => Ok(None),
            Err(e) => Err(e),
        },
        _ => Err(Error::UnsupportedStratum("witness completion needs at most two free coordinates".into())),
    }
}

/// Closed-form singular values of `x_axis` on the closed region.
pub fn singular_values(spec: &ArrangementSpec, axis: usize, clip: Option<HalfSpace>) -> Result<SingularValueReport> {
    if axis >= spec.n {
        return Err(Error::InvalidInput(format!("axis {axis} outside R^{}", spec.n)));
    }
    if let Some(h) = clip {
        if h.axis != axis {
            return Err(Error::UnsupportedStratum("clipping along a different axis".into()));
        }
    }
    let height: Vec<usize> = (0..spec.l1()).filter(|&j| spec.polys[j].involves(axis)).collect();
    if height.len() != 1 {
        return Err(Error::UnsupportedStratum(format!(
            "closed form needs exactly one hypersurface depending on axis {axis}, found {}",
            height.len()
        )));
    }
    let cap = round_cap(spec, height[0], axis)?;
    let mut values: Vec<SingularValue> = Vec::new();
    for cand in vertical_candidates(spec, &cap)? {
        let t = cand.iter().find(|c| c.0 == cap.other).map(|c| c.1).unwrap();
        let rho2 = (t - cap.v) * (t - cap.v);
        if rho2 > cap.r2 * (1.0 + 1e-12) {
            continue;
        }
        let s = (cap.r2 - rho2).max(0.0).sqrt();
        for c in [cap.u - s, cap.u + s] {
            let mut fixed = cand.clone();
            fixed.push((axis, c));
            let Some(w) = find_feasible(spec, &fixed)? else { continue };
            if !spec.in_closure(&w, 1e-9) {
                continue;
            }
            if values.iter().any(|v| (v.value - c).abs() <= 1e-9 * (1.0 + c.abs())) {
                continue;
            }
            let active = (0..spec.l1()).filter(|&j| spec.polys[j].eval_unchecked(&w).abs() <= 1e-9).collect();
            values.push(SingularValue { value: c, witness: w, active });
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyRegion);
    }
    values.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut image = [values[0].value, values[values.len() - 1].value];
    if let Some(h) = clip {
        if h.threshold > image[1] {
            return Err(Error::InvalidInput(format!("clip threshold {} lies above the image", h.threshold)));
        }
        values.retain(|v| v.value > h.threshold + 1e-9 * (1.0 + h.threshold.abs()));
        image[0] = image[0].max(h.threshold);
    }
    Ok(SingularValueReport { axis, clip, values, image_interval: image })
}

fn slice_signature(spec: &ArrangementSpec, axis: usize, c: f64) -> Result<String> {
    match slice_region(spec, axis, c) {
        Ok(r) => {
            let mut corner_colors: Vec<Vec<usize>> =
                r.distinct_corners().iter().map(|c| c.colors.iter().copied().collect()).collect();
            corner_colors.sort();
            let arc_colors: Vec<usize> = {
                let mut v: Vec<usize> = r.loops.iter().flat_map(|l| l.arcs.iter().map(|a| a.color)).collect();
                v.sort_unstable();
                v
            };
            Ok(format!(
                "c{} e{} l{} a{:?} k{:?} t{}",
                r.components,
                r.euler_char,
                r.loops.len(),
                arc_colors,
                corner_colors,
                r.tangencies.len()
            ))
        }
        Err(Error::EmptyRegion) => Ok("empty".into()),
        Err(e) => Err(e),
    }
}

/// Values in `range` where the combinatorial type of the slice changes,
/// located by a uniform sweep of `steps` slices and bisection. Three
/// dimensional arrangements only.
pub fn singular_values_sampled(
    spec: &ArrangementSpec,
    axis: usize,
    clip: Option<HalfSpace>,
    range: [f64; 2],
    steps: usize,
) -> Result<Vec<f64>> {
    if spec.n != 3 {
        return Err(Error::UnsupportedStratum("sampled singular values need n = 3".into()));
    }
    if steps < 2 || !(range[0] < range[1]) {
        return Err(Error::InvalidInput("sweep needs at least two steps over a non-empty range".into()));
    }
    let h = (range[1] - range[0]) / steps as f64;
    let cs: Vec<f64> = (0..steps).map(|i| range[0] + (i as f64 + 0.5) * h).collect();
    let sigs = cs.par_iter().map(|&c| slice_signature(spec, axis, c)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..steps - 1 {
        if sigs[i] == sigs[i + 1] {
            continue;
        }
        let (mut lo, mut hi) = (cs[i], cs[i + 1]);
        let stop = 1e-11 * (range[1] - range[0]);
        while hi - lo > stop {
            let mid = 0.5 * (lo + hi);
            // slices this close to a critical value may be too thin to trace
            let same = matches!(slice_signature(spec, axis, mid), Ok(s) if s == sigs[i]);
            if same {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    if let Some(hs) = clip {
        out.retain(|&v| v > hs.threshold + 1e-9 * (1.0 + hs.threshold.abs()));
    }
    Ok(out)
}
