//! Preset arrangements with resolved geometry, exact corners and expected
//! invariants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{ArrangementSpec, ColorMap, ParamMeta};
use crate::doubler::{build_double, chi_stratified, surface_invariants, SurfaceInvariants};
use crate::error::{Error, Result};
use crate::interval::feasible;
use crate::polynomial::{int, rat, to_f64, Polynomial, Rational};
use crate::reeb::ReebStats;
use crate::slicer::{slice_region_at, triangulate, SlicePlane};
use crate::validator::BoundingBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Thm2,
    Thm3,
    CaseA,
    CaseB,
    CaseC,
    #[serde(rename = "problem3_n4")]
    Problem3N4,
    PaperLiteralThm2,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Thm2,
        Preset::Thm3,
        Preset::CaseA,
        Preset::CaseB,
        Preset::CaseC,
        Preset::Problem3N4,
        Preset::PaperLiteralThm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Thm2 => "thm2",
            Preset::Thm3 => "thm3",
            Preset::CaseA => "case_a",
            Preset::CaseB => "case_b",
            Preset::CaseC => "case_c",
            Preset::Problem3N4 => "problem3_n4",
            Preset::PaperLiteralThm2 => "paper_literal_thm2",
        }
    }

    /// Accepts `case_a`, `caseA`, `case-a` and the like.
    pub fn from_name(s: &str) -> Result<Self> {
        let mut key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        if key == "thm2literal" || key == "literal" {
            key = "paperliteralthm2".into();
        }
        Preset::ALL
            .into_iter()
            .find(|p| p.name().replace('_', "") == key)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Parameter(format!("unknown scenario '{s}' (known: {})", names.join(", ")))
            })
    }

    pub fn default_l(self) -> usize {
        match self {
            Preset::Thm2 | Preset::Thm3 | Preset::PaperLiteralThm2 => 4,
            Preset::CaseA => 3,
            Preset::CaseB => 4,
            Preset::CaseC => 5,
            Preset::Problem3N4 => 2,
        }
    }

    fn is_family(self) -> bool {
        matches!(self, Preset::Thm2 | Preset::Thm3 | Preset::PaperLiteralThm2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Line,
    Circle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    pub preset: Preset,
    /// Number of hypersurfaces for the theorem families.
    pub l: usize,
    pub a: Rational,
    pub b: Rational,
    pub s1: Option<Rational>,
    pub s2: Option<Rational>,
    pub p: Option<Vec<Rational>>,
    pub variant: Variant,
    pub density: f64,
    pub seed: u64,
}

impl ScenarioParams {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            l: preset.default_l(),
            a: int(0),
            b: int(1),
            s1: None,
            s2: None,
            p: None,
            variant: Variant::Line,
            density: 0.05,
            seed: 0,
        }
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = l;
        self
    }

    /// Fills in default plane positions and bite centers and checks the
    /// construction inequalities.
    pub fn resolve(&self) -> Result<ParamMeta> {
        let (a, b) = (self.a.clone(), self.b.clone());
        if a >= b {
            return Err(Error::Parameter("violated: a < b".into()));
        }
        let h = &b - &a;
        if !self.preset.is_family() {
            if self.l != self.preset.default_l() {
                return Err(Error::Parameter(format!(
                    "{} is defined for l = {} only",
                    self.preset.name(),
                    self.preset.default_l()
                )));
            }
            let s1 = self.s1.clone().unwrap_or_else(|| int(-3) * &h);
            let s2 = self.s2.clone().unwrap_or_else(|| int(3) * &h);
            if s1 >= s2 {
                return Err(Error::Parameter("violated: s1 < s2".into()));
            }
            let radius = matches!(self.preset, Preset::Problem3N4).then(|| (&s2 - &s1) / int(2));
            return Ok(ParamMeta { a, b, s1, s2, p: vec![], radius });
        }
        if self.l < 3 {
            return Err(Error::Parameter(format!("violated: l >= 3 (got {})", self.l)));
        }
        let k = self.l - 3;
        let half_span = int(2 * k as i64 + 2) * &h;
        let s1 = self.s1.clone().unwrap_or_else(|| -half_span.clone());
        let s2 = self.s2.clone().unwrap_or(half_span);
        let p = match &self.p {
            Some(p) => p.clone(),
            None => (0..k)
                .map(|j| (rat(-5 * (k as i64 - 1), 4) + rat(5 * j as i64, 2)) * &h)
                .collect(),
        };
        if p.len() != k {
            return Err(Error::Parameter(format!("expected {k} bite centers, got {}", p.len())));
        }
        if &s2 - &s1 <= int(2 * k as i64) * &h {
            return Err(Error::Parameter("violated: s2 - s1 > 2(l-3)(b-a)".into()));
        }
        if s1 >= s2 {
            return Err(Error::Parameter("violated: s1 < s2".into()));
        }
        for w in p.windows(2) {
            if &w[1] - &w[0] <= int(2) * &h {
                return Err(Error::Parameter("violated: p_{j+1} - p_j > 2(b-a)".into()));
            }
        }
        if let (Some(first), Some(last)) = (p.first(), p.last()) {
            if first - &s1 <= h {
                return Err(Error::Parameter("violated: p_1 - s1 > b-a".into()));
            }
            if &s2 - last <= h {
                return Err(Error::Parameter("violated: s2 - p_{l-3} > b-a".into()));
            }
        }
        let radius = Some(if self.preset == Preset::Thm3 { &h / int(2) } else { h.clone() });
        Ok(ParamMeta { a, b, s1, s2, p, radius })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Paper,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn paper<T>(value: T) -> Option<Expected<T>> {
    Some(Expected { value, provenance: Provenance::Paper })
}

fn derived<T>(value: T) -> Option<Expected<T>> {
    Some(Expected { value, provenance: Provenance::Derived })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpectedResults {
    pub validation_pass: Option<Expected<bool>>,
    pub slice_components: Option<Expected<usize>>,
    pub genus: Option<Expected<i64>>,
    pub reeb_betti1: Option<Expected<i64>>,
    pub reeb_profile: Option<Expected<ReebStats>>,
    pub singular_values: Option<Expected<Vec<f64>>>,
    pub singular_values_clipped: Option<Expected<Vec<f64>>>,
    pub image_clipped: Option<Expected<[f64; 2]>>,
    pub interior_fiber_genus: Option<Expected<i64>>,
}

/// Exactly known point of a stratum of dimension zero in a slice or in space.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCorner {
    pub point: Vec<Rational>,
    pub active: Vec<usize>,
}

impl ExactCorner {
    pub fn to_f64(&self) -> Vec<f64> {
        self.point.iter().map(to_f64).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub params: ScenarioParams,
    pub resolved: ParamMeta,
    pub spec: ArrangementSpec,
    pub expected: ExpectedResults,
    pub bbox: BoundingBox,
    pub corners: Vec<ExactCorner>,
    /// Reference slice: fixed `(axis, value)` pairs.
    pub slice: Vec<(usize, f64)>,
    pub reeb_axis: usize,
    pub height_axis: usize,
    pub clip: Option<f64>,
    /// Target points for the fiber survey (`problem3_n4` only).
    pub fiber_axes: Option<[usize; 2]>,
    pub fiber_grid: Vec<[f64; 2]>,
}

struct Vars {
    n: usize,
}

impl Vars {
    fn x(&self, i: usize) -> Polynomial {
        Polynomial::var(self.n, i)
    }
    fn c(&self, r: &Rational) -> Polynomial {
        Polynomial::constant(self.n, r.clone())
    }
    /// `(x_i - r)^2`
    fn sq(&self, i: usize, r: &Rational) -> Polynomial {
        let d = &self.x(i) - &self.c(r);
        &d * &d
    }
}

fn bite(v: &Vars, p: &Rational, cy: &Rational, r: &Rational) -> Polynomial {
    &(&v.sq(0, p) + &v.sq(1, cy)) - &v.c(&(r * r))
}

/// `r^2 - x_i^2 - (x_j - c)^2`
fn cylinder(v: &Vars, i: usize, j: usize, c: &Rational, r: &Rational) -> Polynomial {
    &(&v.c(&(r * r)) - &v.sq(i, &int(0))) - &v.sq(j, c)
}

fn theorem_family(meta: &ParamMeta, preset: Preset, l: usize) -> Result<ArrangementSpec> {
    let v = Vars { n: 3 };
    let h = &meta.b - &meta.a;
    let (center, r) = match preset {
        Preset::Thm3 => ((&meta.a + &meta.b) / int(2), &h / int(2)),
        _ => (meta.a.clone(), h.clone()),
    };
    let mut polys = vec![
        &v.x(0) - &v.c(&meta.s1),
        &v.c(&meta.s2) - &v.x(0),
        cylinder(&v, 1, 2, &center, &r),
    ];
    for p in &meta.p {
        polys.push(match preset {
            Preset::PaperLiteralThm2 => bite(&v, p, &int(0), &h),
            _ => bite(&v, p, &r, &r),
        });
    }
    let colors = (0..l).map(|j| if j == 2 { 2 } else { 1 }).collect();
    Ok(ArrangementSpec::new(3, polys, ColorMap::with_point_fibers(colors)?)?.with_meta(meta.clone()))
}

/// Bites centered on the midline with radius `b - a`, as literally printed.
/// Each bite touches the cylinder tangentially, so transversality fails there.
pub fn paper_literal_thm2(params: &ScenarioParams) -> Result<ArrangementSpec> {
    let mut p = params.clone();
    p.preset = Preset::PaperLiteralThm2;
    let meta = p.resolve()?;
    theorem_family(&meta, Preset::PaperLiteralThm2, p.l)
}

fn cut_curves(meta: &ParamMeta, variant: Variant) -> (Polynomial, Polynomial) {
    let v = Vars { n: 3 };
    let h = &meta.b - &meta.a;
    let mid = (&meta.s1 + &meta.s2) / int(2);
    let w = &mid - &meta.s1;
    match variant {
        Variant::Line => (
            &(&v.c(&h) * &(&v.x(0) - &v.c(&meta.s1))) - &(&v.c(&w) * &v.x(1)),
            &(&v.c(&h) * &(&v.c(&meta.s2) - &v.x(0))) + &(&v.c(&w) * &v.x(1)),
        ),
        Variant::Circle => {
            // center on the perpendicular bisector of (s1, 0) and (mid, h), beyond
            // both required bounds; the region lies outside the disk
            let t = std::cmp::max(&w / (int(2) * &h), &h / (int(2) * &w)) + int(1);
            let (mx, my) = ((&meta.s1 + &mid) / int(2), &h / int(2));
            let (cx, cy) = (&mx - &t * &h, &my + &t * &w);
            let r2 = (&meta.s1 - &cx) * (&meta.s1 - &cx) + &cy * &cy;
            let f4 = &(&v.sq(0, &cx) + &v.sq(1, &cy)) - &v.c(&r2);
            // point reflection through (mid, 0)
            let (dx, dy) = (int(2) * &mid - &cx, -cy);
            let f5 = &(&v.sq(0, &dx) + &v.sq(1, &dy)) - &v.c(&r2);
            (f4, f5)
        }
    }
}

fn bbox_for(meta: &ParamMeta, preset: Preset) -> BoundingBox {
    let f = |r: &Rational| to_f64(r);
    let (a, b) = (f(&meta.a), f(&meta.b));
    let h = b - a;
    let (s1, s2) = (f(&meta.s1), f(&meta.s2));
    let m = 0.05 * (s2 - s1).max(h);
    match preset {
        Preset::Thm3 => BoundingBox::new(vec![s1 - m, -h / 2.0 - m, a - m], vec![s2 + m, h / 2.0 + m, b + m]),
        Preset::Problem3N4 => {
            let r = (s2 - s1) / 2.0;
            BoundingBox::new(
                vec![s1 - m, -h - m, -r - m, a - h - m],
                vec![s2 + m, h + m, r + m, a + h + m],
            )
        }
        _ => BoundingBox::new(vec![s1 - m, -h - m, a - h - m], vec![s2 + m, h + m, b + m]),
    }
}

fn exact_corners(spec: &ArrangementSpec, points: Vec<Vec<Rational>>) -> Result<Vec<ExactCorner>> {
    points
        .into_iter()
        .map(|point| {
            let mut active = Vec::new();
            for (j, p) in spec.polys.iter().enumerate() {
                if num_traits::Zero::is_zero(&p.eval_exact(&point)?) {
                    active.push(j);
                }
            }
            Ok(ExactCorner { point, active })
        })
        .collect()
}

fn thm2_profile(k: usize) -> ReebStats {
    ReebStats {
        vertices: 2 * k + 2,
        edges: 3 * k + 2,
        betti1: k as i64 + 1,
        extremal_degrees: vec![2, 2],
        interior_degrees: vec![3; 2 * k],
        interior_clusters: vec![1; 2 * k],
    }
}

pub fn make_scenario(params: &ScenarioParams) -> Result<Scenario> {
    if !(params.density > 0.0) {
        return Err(Error::Parameter(format!("density must be positive, got {}", params.density)));
    }
    let meta = params.resolve()?;
    let preset = params.preset;
    let (a, b) = (meta.a.clone(), meta.b.clone());
    let h = &b - &a;
    let (af, bf) = (to_f64(&a), to_f64(&b));
    let mid = (&meta.s1 + &meta.s2) / int(2);
    let mut expected = ExpectedResults::default();
    let mut slice = vec![(2, af)];
    let mut clip = Some(af);
    let mut fiber_axes = None;
    let mut fiber_grid = Vec::new();
    let pt = |x: &Rational, y: &Rational, z: &Rational| vec![x.clone(), y.clone(), z.clone()];

    let (spec, corner_points) = match preset {
        Preset::Thm2 | Preset::Thm3 | Preset::PaperLiteralThm2 => {
            let spec = theorem_family(&meta, preset, params.l)?;
            let k = params.l - 3;
            let (level, top) = if preset == Preset::Thm3 { ((&a + &b) / int(2), &h / int(2)) } else { (a.clone(), h.clone()) };
            let mut pts = vec![
                pt(&meta.s1, &-top.clone(), &level),
                pt(&meta.s1, &top, &level),
                pt(&meta.s2, &-top.clone(), &level),
                pt(&meta.s2, &top, &level),
            ];
            for p in &meta.p {
                if preset == Preset::PaperLiteralThm2 {
                    pts.push(pt(p, &h, &level));
                    pts.push(pt(p, &-h.clone(), &level));
                } else {
                    pts.push(pt(&(p - &top), &top, &level));
                    pts.push(pt(&(p + &top), &top, &level));
                }
            }
            match preset {
                Preset::Thm2 => {
                    expected.validation_pass = paper(true);
                    expected.genus = paper(params.l as i64 - 2);
                    expected.reeb_betti1 = paper(params.l as i64 - 2);
                    expected.reeb_profile = derived(thm2_profile(k));
                    expected.singular_values = derived(vec![2.0 * af - bf, bf]);
                    expected.singular_values_clipped = paper(vec![bf]);
                    expected.image_clipped = paper([af, bf]);
                }
                Preset::Thm3 => {
                    slice = vec![(2, to_f64(&level))];
                    clip = None;
                    expected.validation_pass = derived(true);
                    expected.genus = derived(params.l as i64 - 2);
                    expected.reeb_betti1 = derived(params.l as i64 - 2);
                    expected.reeb_profile = derived(thm2_profile(k));
                    expected.singular_values = paper(vec![af, bf]);
                }
                _ => {
                    expected.validation_pass = derived(false);
                    expected.slice_components = derived(params.l - 2);
                }
            }
            (spec, pts)
        }
        Preset::CaseA | Preset::CaseB | Preset::CaseC => {
            let v = Vars { n: 3 };
            let mut polys = vec![
                &v.x(0) - &v.c(&meta.s1),
                &v.c(&meta.s2) - &v.x(0),
                cylinder(&v, 1, 2, &a, &h),
            ];
            let (f4, f5) = cut_curves(&meta, params.variant);
            let mut colors = vec![1, 1, 2];
            if preset != Preset::CaseA {
                polys.push(f4);
                colors.push(3);
            }
            if preset == Preset::CaseC {
                polys.push(f5);
                colors.push(3);
            }
            let spec = ArrangementSpec::new(3, polys, ColorMap::with_point_fibers(colors)?)?.with_meta(meta.clone());
            let zero = int(0);
            let nh = -h.clone();
            let mut pts = vec![pt(&meta.s1, &nh, &a)];
            match preset {
                Preset::CaseA => {
                    pts.extend([pt(&meta.s1, &h, &a), pt(&meta.s2, &nh, &a), pt(&meta.s2, &h, &a)]);
                    expected.genus = paper(1);
                    expected.reeb_betti1 = paper(1);
                    expected.reeb_profile = paper(ReebStats {
                        vertices: 2,
                        edges: 2,
                        betti1: 1,
                        extremal_degrees: vec![2, 2],
                        interior_degrees: vec![],
                        interior_clusters: vec![],
                    });
                }
                Preset::CaseB => {
                    pts.extend([
                        pt(&meta.s2, &nh, &a),
                        pt(&meta.s2, &h, &a),
                        pt(&mid, &h, &a),
                        pt(&meta.s1, &zero, &a),
                        pt(&meta.s1, &zero, &(&a + &h)),
                        pt(&meta.s1, &zero, &(&a - &h)),
                    ]);
                    expected.genus = paper(2);
                    expected.reeb_betti1 = paper(2);
                    expected.reeb_profile = paper(ReebStats {
                        vertices: 5,
                        edges: 6,
                        betti1: 2,
                        extremal_degrees: vec![2, 2, 2],
                        interior_degrees: vec![3, 3],
                        interior_clusters: vec![1, 1],
                    });
                }
                _ => {
                    pts.extend([
                        pt(&mid, &nh, &a),
                        pt(&meta.s2, &zero, &a),
                        pt(&meta.s2, &h, &a),
                        pt(&mid, &h, &a),
                        pt(&meta.s1, &zero, &a),
                        pt(&meta.s1, &zero, &(&a + &h)),
                        pt(&meta.s1, &zero, &(&a - &h)),
                        pt(&meta.s2, &zero, &(&a + &h)),
                        pt(&meta.s2, &zero, &(&a - &h)),
                    ]);
                    expected.genus = paper(3);
                    expected.reeb_betti1 = paper(1);
                    expected.reeb_profile = paper(ReebStats {
                        vertices: 4,
                        edges: 4,
                        betti1: 1,
                        extremal_degrees: vec![2, 2],
                        interior_degrees: vec![2, 2],
                        interior_clusters: vec![2, 2],
                    });
                }
            }
            expected.validation_pass = paper(true);
            expected.singular_values = derived(vec![2.0 * af - bf, bf]);
            expected.singular_values_clipped = derived(vec![bf]);
            expected.image_clipped = derived([af, bf]);
            (spec, pts)
        }
        Preset::Problem3N4 => {
            let v = Vars { n: 4 };
            let r1 = meta.radius.clone().expect("radius resolved");
            let f1 = &(&v.c(&(&r1 * &r1)) - &v.sq(0, &mid)) - &v.sq(2, &int(0));
            let f2 = &(&v.c(&(&h * &h)) - &v.sq(1, &int(0))) - &v.sq(3, &a);
            let spec =
                ArrangementSpec::new(4, vec![f1, f2], ColorMap::with_point_fibers(vec![1, 2])?)?.with_meta(meta.clone());
            let z = int(0);
            let mut pts = Vec::new();
            for x1 in [&meta.s1, &meta.s2] {
                for x2 in [&h, &-h.clone()] {
                    pts.push(vec![x1.clone(), x2.clone(), z.clone(), a.clone()]);
                }
            }
            slice = vec![(2, 0.0), (3, af)];
            clip = None;
            fiber_axes = Some([2, 3]);
            let (r1f, hf) = (to_f64(&r1), to_f64(&h));
            // 5x5 interior grid, then image-boundary probes and one point outside
            for i in 1..=5 {
                for j in 1..=5 {
                    let (s, t) = (i as f64 / 3.0 - 1.0, j as f64 / 3.0 - 1.0);
                    fiber_grid.push([s * r1f, af + t * hf]);
                }
            }
            fiber_grid.extend([[r1f, af], [0.0, af - hf], [-r1f, af + hf], [2.0 * r1f, af]]);
            expected.validation_pass = derived(true);
            expected.interior_fiber_genus = derived(1);
            expected.singular_values = derived(vec![-r1f, r1f]);
            (spec, pts)
        }
    };
    let corners = exact_corners(&spec, corner_points)?;
    Ok(Scenario {
        params: params.clone(),
        bbox: bbox_for(&meta, preset),
        resolved: meta,
        spec,
        expected,
        corners,
        slice,
        reeb_axis: 0,
        height_axis: 2,
        clip,
        fiber_axes,
        fiber_grid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberKind {
    Surface { invariants: SurfaceInvariants, chi_stratified: i64 },
    /// One factor interval has collapsed to a point.
    Circle,
    /// Both factor intervals have collapsed.
    Point,
    OutsideImage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub point: [f64; 2],
    pub fiber: FiberKind,
}

/// Fibers of the projection to the coordinates `axes` for a region that is a
/// product over the two remaining coordinates.
pub fn fiber_survey(
    spec: &ArrangementSpec,
    axes: [usize; 2],
    grid: &[[f64; 2]],
    density: f64,
) -> Result<Vec<FiberReport>> {
    if spec.n != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: spec.n });
    }
    grid.par_iter()
        .map(|&c| {
            let plane = SlicePlane::new(4, &[(axes[0], c[0]), (axes[1], c[1])])?;
            let restricted: Vec<Polynomial> =
                spec.polys.iter().map(|p| plane.restrict(p)).collect::<Result<_>>()?;
            let mut degenerate = 0;
            for free in 0..2 {
                let other = 1 - free;
                let mut uni = Vec::new();
                for (j, g) in restricted.iter().enumerate() {
                    if g.involves(free) && g.involves(other) {
                        return Err(Error::UnsupportedCurve {
                            index: j,
                            reason: "fiber survey needs a product region".into(),
                        });
                    }
                    if g.involves(free) || !g.involves(other) {
                        uni.push(g.substitute(&[(other, int(0))])?);
                    }
                }
                let set = feasible(&uni)?;
                if set.is_empty() {
                    return Ok(FiberReport { point: c, fiber: FiberKind::OutsideImage });
                }
                if set.iter().all(|iv| iv[0] == iv[1]) {
                    degenerate += 1;
                }
            }
            let fiber = match degenerate {
                0 => {
                    let region = slice_region_at(spec, &[(axes[0], c[0]), (axes[1], c[1])])?;
                    let mesh = triangulate(&region, density)?;
                    let surface = build_double(&mesh, spec.l2())?;
                    FiberKind::Surface {
                        invariants: surface_invariants(&surface),
                        chi_stratified: chi_stratified(&region, spec.l2()),
                    }
                }
                1 => FiberKind::Circle,
                _ => FiberKind::Point,
            };
            Ok(FiberReport { point: c, fiber })
        })
        .collect()
}
