//! Sampled checks of the arrangement hypotheses and of the smoothness of
//! the lifted variety.
//!
//! Evidence is sampled: a Halton sequence over a bounding box, boundary
//! points found by Newton projection and joint refinement, plus any exactly
//! known corner points supplied by the caller.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{lifted_system, ArrangementSpec, LiftedSystem};
use crate::error::{Error, Result};
use crate::polynomial::{eval_grad, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn diagonal(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct SamplingConfig {
    pub boundary_samples: usize,
    pub bbox: BoundingBox,
    pub seed: u64,
    pub tol_zero: f64,
    pub tol_rank: f64,
    /// Exactly known boundary points checked in addition to the samples.
    pub corners: Vec<Vec<f64>>,
}

impl SamplingConfig {
    pub fn new(bbox: BoundingBox) -> Self {
        Self { boundary_samples: 10_000, bbox, seed: 0, tol_zero: 1e-9, tol_rank: 1e-6, corners: vec![] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Cond1,
    Cond2,
    Cond3a,
    Cond3b,
    MNonsingular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub condition: Condition,
    pub point: Vec<f64>,
    pub active: Vec<usize>,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub cond1_ok: bool,
    pub cond2_ok: Vec<bool>,
    pub cond3a_ok: bool,
    pub cond3b_ok: bool,
    pub m_nonsingular_ok: bool,
    pub witnesses: Vec<Witness>,
    pub samples_used: usize,
    pub interior_points: usize,
    pub boundary_points: usize,
    pub min_transversality_measure: f64,
    pub min_lift_measure: f64,
    pub warnings: Vec<String>,
    /// Always "sampled": the checks refute or support, they do not prove.
    pub evidence: String,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.cond1_ok && self.cond2_ok.iter().all(|&b| b) && self.cond3a_ok && self.cond3b_ok && self.m_nonsingular_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transversality {
    pub active: Vec<usize>,
    pub sigma_min: f64,
    pub ok: bool,
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    r
}

/// Halton point `index` scaled into the box.
pub fn halton_point(bbox: &BoundingBox, index: u64) -> Vec<f64> {
    (0..bbox.dim())
        .map(|k| bbox.lo[k] + radical_inverse(index, PRIMES[k % PRIMES.len()]) * (bbox.hi[k] - bbox.lo[k]))
        .collect()
}

/// Smallest singular value of the rows normalized to unit length; 1 for no rows.
fn sigma_min_normalized(rows: &[Vec<f64>]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    let ncols = rows[0].len();
    if rows.len() > ncols {
        return 0.0;
    }
    let mut m = DMatrix::<f64>::zeros(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for (k, v) in r.iter().enumerate() {
            m[(i, k)] = v / norm;
        }
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

struct Cache {
    grads: Vec<Vec<Polynomial>>,
}

impl Cache {
    fn new(spec: &ArrangementSpec) -> Self {
        Self { grads: spec.polys.iter().map(|p| p.grad()).collect() }
    }
}

fn active_set(spec: &ArrangementSpec, x: &[f64], tol: f64) -> Vec<usize> {
    (0..spec.l1()).filter(|&j| spec.polys[j].eval_unchecked(x).abs() <= tol).collect()
}

pub fn transversality_at(spec: &ArrangementSpec, x: &[f64], tol_rank: f64) -> Result<Transversality> {
    if x.len() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: x.len() });
    }
    let active = active_set(spec, x, crate::arrangement::DEFAULT_TOL);
    let rows: Vec<Vec<f64>> = active.iter().map(|&j| eval_grad(&spec.polys[j].grad(), x)).collect();
    let sigma_min = sigma_min_normalized(&rows);
    let ok = active.len() <= spec.n && sigma_min >= tol_rank;
    Ok(Transversality { active, sigma_min, ok })
}

/// Damped Gauss-Newton on `f_j = 0, j in active`, minimum-norm steps.
pub fn refine_on_active(spec: &ArrangementSpec, x: &[f64], active: &[usize], iters: usize) -> Vec<f64> {
    let cache = Cache::new(spec);
    refine(spec, &cache, x, active, iters)
}

fn refine(spec: &ArrangementSpec, cache: &Cache, x0: &[f64], active: &[usize], iters: usize) -> Vec<f64> {
    let n = spec.n;
    let mut x = x0.to_vec();
    if active.is_empty() {
        return x;
    }
    for _ in 0..iters {
        let f = DVector::from_iterator(active.len(), active.iter().map(|&j| spec.polys[j].eval_unchecked(&x)));
        if f.amax() < 1e-15 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(active.len(), n);
        for (r, &j) in active.iter().enumerate() {
            for (k, g) in eval_grad(&cache.grads[j], &x).into_iter().enumerate() {
                jac[(r, k)] = g;
            }
        }
        let jjt = &jac * jac.transpose();
        let lambda = 1e-12 * jjt.diagonal().amax().max(1e-300);
        let lhs = jjt + DMatrix::<f64>::identity(active.len(), active.len()) * lambda;
        let Some(mu) = lhs.lu().solve(&f) else { break };
        let step = jac.transpose() * mu;
        for k in 0..n {
            x[k] -= step[k];
        }
    }
    x
}

/// `(point, adheres to the open region)` for a candidate boundary point.
fn adheres(spec: &ArrangementSpec, cache: &Cache, x: &[f64], active: &[usize], scale: f64) -> bool {
    let eps = 1e-6 * scale;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let mut sum = vec![0.0; spec.n];
    for &j in active {
        let g = eval_grad(&cache.grads[j], x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for k in 0..spec.n {
                sum[k] += g[k] / norm;
            }
        }
    }
    dirs.push(sum.clone());
    // a few fixed perturbations for degenerate configurations
    for k in 0..spec.n {
        for s in [1.0, -1.0] {
            let mut d = sum.clone();
            d[k] += s;
            dirs.push(d);
        }
    }
    dirs.iter().any(|d| {
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return false;
        }
        let y: Vec<f64> = (0..spec.n).map(|k| x[k] + eps * d[k] / norm).collect();
        spec.polys.iter().all(|p| p.eval_unchecked(&y) > 0.0)
    })
}

fn boundary_candidate(spec: &ArrangementSpec, cache: &Cache, x: &[f64], scale: f64) -> Option<Vec<f64>> {
    let n = spec.n;
    let dist = |j: usize, x: &[f64]| {
        let g = eval_grad(&cache.grads[j], x);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        spec.polys[j].eval_unchecked(x).abs() / norm.max(1e-300)
    };
    let best = (0..spec.l1()).min_by(|&a, &b| dist(a, x).total_cmp(&dist(b, x)))?;
    let mut y = refine(spec, cache, x, &[best], 40);
    if spec.polys[best].eval_unchecked(&y).abs() > 1e-10 * scale * scale {
        return None;
    }
    // pull onto nearby hypersurfaces as well to reach lower strata
    let near: Vec<usize> = (0..spec.l1()).filter(|&j| j == best || dist(j, &y) < 0.02 * scale).collect();
    if near.len() > 1 && near.len() <= n {
        let z = refine(spec, cache, &y, &near, 40);
        if near.iter().all(|&j| spec.polys[j].eval_unchecked(&z).abs() <= 1e-12 * scale * scale) {
            y = z;
        }
    }
    y.iter().all(|v| v.is_finite()).then_some(y)
}

pub fn validate(spec: &ArrangementSpec, cfg: &SamplingConfig) -> Result<ValidationReport> {
    if cfg.boundary_samples == 0 {
        return Err(Error::InvalidInput("boundary_samples must be at least 1".into()));
    }
    if !(cfg.tol_zero > 0.0) || !(cfg.tol_rank > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    if cfg.bbox.dim() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: cfg.bbox.dim() });
    }
    let ls = lifted_system(spec)?;
    let cache = Cache::new(spec);
    let color_grads: Vec<Vec<Polynomial>> = ls.color_polys.iter().map(|p| p.grad()).collect();
    let scale = cfg.bbox.diagonal().max(1.0);
    let offset = cfg.seed.wrapping_mul(7919).wrapping_add(1);
    let samples: Vec<Vec<f64>> =
        (0..cfg.boundary_samples as u64).map(|i| halton_point(&cfg.bbox, offset + i)).collect();

    let mut warnings = Vec::new();
    let interior: Vec<&Vec<f64>> =
        samples.iter().filter(|x| spec.polys.iter().all(|p| p.eval_unchecked(x) > cfg.tol_zero)).collect();
    let near_face = interior.iter().any(|x| {
        (0..spec.n).any(|k| {
            let w = cfg.bbox.hi[k] - cfg.bbox.lo[k];
            x[k] - cfg.bbox.lo[k] < 0.01 * w || cfg.bbox.hi[k] - x[k] < 0.01 * w
        })
    });
    if near_face {
        warnings.push("interior samples reach the bounding box face; the region may be unbounded".into());
    }

    let mut points: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|x| boundary_candidate(spec, &cache, x, scale))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .filter(|y| spec.in_closure(y, cfg.tol_zero))
        .collect();
    let n_sampled = points.len();
    points.extend(cfg.corners.iter().cloned());

    let mut witnesses = Vec::new();
    let mut cond2 = vec![false; spec.l1()];
    let mut cond1 = !interior.is_empty();
    if interior.is_empty() {
        witnesses.push(Witness {
            condition: Condition::Cond1,
            point: samples[0].clone(),
            active: vec![],
            value: 0.0,
            detail: "no sample lies strictly inside the region".into(),
        });
    }
    let (mut ok3a, mut ok3b, mut ok_m) = (true, true, true);
    let mut min_t = f64::INFINITY;
    let mut min_lift = f64::INFINITY;

    struct PointCheck {
        active: Vec<usize>,
        sigma: f64,
        adherent: bool,
        lift_sigma: f64,
    }
    let checks: Vec<PointCheck> = points
        .par_iter()
        .map(|x| {
            let active = active_set(spec, x, cfg.tol_zero);
            let rows: Vec<Vec<f64>> = active.iter().map(|&j| eval_grad(&cache.grads[j], x)).collect();
            let sigma = if active.len() > spec.n { 0.0 } else { sigma_min_normalized(&rows) };
            PointCheck {
                adherent: adheres(spec, &cache, x, &active, scale),
                lift_sigma: lift_sigma(&ls, &color_grads, x),
                active,
                sigma,
            }
        })
        .collect();

    let push = |w: Witness, witnesses: &mut Vec<Witness>| {
        if witnesses.iter().filter(|o| o.condition == w.condition).count() < 16 {
            witnesses.push(w);
        }
    };
    // worst transversality point first so it is always reported
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| checks[a].sigma.total_cmp(&checks[b].sigma));
    for &i in &order {
        let (x, c) = (&points[i], &checks[i]);
        for &j in &c.active {
            cond2[j] = true;
        }
        if c.active.is_empty() {
            continue;
        }
        min_t = min_t.min(c.sigma);
        if c.sigma < cfg.tol_rank || c.active.len() > spec.n {
            ok3a = false;
            push(
                Witness {
                    condition: Condition::Cond3a,
                    point: x.clone(),
                    active: c.active.clone(),
                    value: c.sigma,
                    detail: "active gradients are not independent".into(),
                },
                &mut witnesses,
            );
        }
        let colors: BTreeSet<usize> = c.active.iter().map(|&j| spec.colors.color_of(j)).collect();
        if colors.len() != c.active.len() {
            ok3b = false;
            push(
                Witness {
                    condition: Condition::Cond3b,
                    point: x.clone(),
                    active: c.active.clone(),
                    value: (c.active.len() - colors.len()) as f64,
                    detail: "two active hypersurfaces share a color".into(),
                },
                &mut witnesses,
            );
        }
        if !c.adherent {
            cond1 = false;
            push(
                Witness {
                    condition: Condition::Cond1,
                    point: x.clone(),
                    active: c.active.clone(),
                    value: 0.0,
                    detail: "zero of an active hypersurface does not adhere to the open region".into(),
                },
                &mut witnesses,
            );
        }
        min_lift = min_lift.min(c.lift_sigma);
        if c.lift_sigma < cfg.tol_rank {
            ok_m = false;
            push(
                Witness {
                    condition: Condition::MNonsingular,
                    point: x.clone(),
                    active: c.active.clone(),
                    value: c.lift_sigma,
                    detail: "lifted equations lose rank".into(),
                },
                &mut witnesses,
            );
        }
    }
    for x in &interior {
        min_lift = min_lift.min(lift_sigma(&ls, &color_grads, x));
    }
    if min_lift < cfg.tol_rank && ok_m {
        ok_m = false;
        push(
            Witness {
                condition: Condition::MNonsingular,
                point: interior[0].clone(),
                active: vec![],
                value: min_lift,
                detail: "lifted equations lose rank at an interior sample".into(),
            },
            &mut witnesses,
        );
    }
    for (j, &found) in cond2.iter().enumerate() {
        if !found {
            push(
                Witness {
                    condition: Condition::Cond2,
                    point: vec![],
                    active: vec![j],
                    value: 0.0,
                    detail: format!("no point of hypersurface {j} found on the closed region"),
                },
                &mut witnesses,
            );
        }
    }
    Ok(ValidationReport {
        cond1_ok: cond1,
        cond2_ok: cond2,
        cond3a_ok: ok3a,
        cond3b_ok: ok3b,
        m_nonsingular_ok: ok_m,
        witnesses,
        samples_used: samples.len() + cfg.corners.len(),
        interior_points: interior.len(),
        boundary_points: n_sampled + cfg.corners.len(),
        min_transversality_measure: if min_t.is_finite() { min_t } else { 1.0 },
        min_lift_measure: if min_lift.is_finite() { min_lift } else { 1.0 },
        warnings,
        evidence: "sampled".into(),
    })
}

/// Smallest normalized singular value of the Jacobian of the lifted
/// equations at the all-positive lift of `x`.
fn lift_sigma(ls: &LiftedSystem, color_grads: &[Vec<Polynomial>], x: &[f64]) -> f64 {
    let n = ls.base.n;
    let mut rows = Vec::new();
    for k in 0..ls.color_polys.len() {
        let color = k + 1;
        let mut row = vec![0.0; ls.ambient_dim];
        let g = eval_grad(&color_grads[k], x);
        row[..n].copy_from_slice(&g);
        let y = ls.color_value(color, x).max(0.0).sqrt();
        // the lift puts all of |y_i| on the first fiber coordinate
        row[ls.y_offset(color)] = -2.0 * y;
        rows.push(row);
    }
    sigma_min_normalized(&rows)
}
