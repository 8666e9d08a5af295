//! Runs a configuration end to end and assembles the report.

use std::collections::BTreeSet;

use crate::arrangement::{lifted_system, ArrangementSpec};
use crate::doubler::{build_double, chi_stratified, embed, predicted_components, surface_invariants, DoubledSurface};
use crate::error::{Error, Result};
use crate::io::config::{Action, PipelineConfig};
use crate::io::emit::{reeb_dot, region_svg};
use crate::io::off::OffMesh;
use crate::io::report::*;
use crate::reeb::reeb_graph;
use crate::scenarios::{fiber_survey, make_scenario, ExpectedResults, Scenario};
use crate::singular::{singular_values, singular_values_sampled, HalfSpace};
use crate::slicer::mesh::triangulate;
use crate::slicer::{slice_region_at, PlanarRegion};
use crate::validator::{validate, BoundingBox, SamplingConfig};

/// Steps of the sampled singular-value sweep.
const SWEEP_STEPS: usize = 256;

pub struct Outcome {
    pub report: ScenarioReport,
    /// 0, or 2 for a `strict` run whose results contradict stated expectations.
    pub exit_code: i32,
}

struct Target {
    name: String,
    scenario: Option<Scenario>,
    spec: ArrangementSpec,
    bbox: Option<BoundingBox>,
    corners: Vec<Vec<f64>>,
    slice: Option<Vec<(usize, f64)>>,
    reeb_axis: usize,
    singular_axis: usize,
    clip: Option<f64>,
    density: f64,
    seed: u64,
    expected: ExpectedResults,
}

fn target(cfg: &PipelineConfig) -> Result<Target> {
    let o = &cfg.options;
    if let Some(ov) = &cfg.scenario {
        let mut params = ov.to_params()?;
        if let Some(d) = o.density {
            params.density = d;
        }
        if let Some(s) = o.seed {
            params.seed = s;
        }
        let sc = make_scenario(&params)?;
        return Ok(Target {
            name: params.preset.name().into(),
            spec: sc.spec.clone(),
            bbox: Some(sc.bbox.clone()),
            corners: sc.corners.iter().map(|c| c.to_f64()).collect(),
            slice: Some(o.slice.clone().unwrap_or_else(|| sc.slice.clone())),
            reeb_axis: o.reeb_axis.unwrap_or(sc.reeb_axis),
            singular_axis: o.singular_axis.unwrap_or(sc.height_axis),
            clip: o.clip.or(sc.clip),
            density: params.density,
            seed: params.seed,
            expected: sc.expected.clone(),
            scenario: Some(sc),
        });
    }
    let inline = cfg.arrangement.as_ref().ok_or_else(|| Error::Config("no arrangement given".into()))?;
    let spec = inline.to_spec()?;
    Ok(Target {
        name: "inline".into(),
        bbox: inline.bounding_box(),
        corners: vec![],
        slice: o.slice.clone(),
        reeb_axis: o.reeb_axis.unwrap_or(0),
        singular_axis: o.singular_axis.unwrap_or(spec.n - 1),
        clip: o.clip,
        density: o.density.unwrap_or(0.05),
        seed: o.seed.unwrap_or(0),
        expected: ExpectedResults::default(),
        scenario: None,
        spec,
    })
}

fn closure(actions: &[Action]) -> Vec<Action> {
    let mut set: BTreeSet<Action> = actions.iter().copied().collect();
    if set.contains(&Action::Reeb) {
        set.insert(Action::Double);
    }
    if set.contains(&Action::Double) {
        set.insert(Action::Slice);
    }
    set.into_iter().collect()
}

fn singular(t: &Target) -> Result<SingularSummary> {
    let axis = t.singular_axis;
    let clip = t.clip.map(|threshold| HalfSpace { axis, threshold });
    let mut out = SingularSummary { axis, ..Default::default() };
    match singular_values(&t.spec, axis, None) {
        Ok(r) => {
            out.closed_form = Some(r);
            if let Some(h) = clip {
                out.clipped = Some(singular_values(&t.spec, axis, Some(h))?);
            }
        }
        Err(Error::UnsupportedStratum(msg)) => {
            out.closed_form_error = Some(msg);
            if t.spec.n == 3 {
                let bbox = t.bbox.as_ref().ok_or_else(|| Error::Config("sampled singular values need a bbox".into()))?;
                let range = [bbox.lo[axis], bbox.hi[axis]];
                let values = singular_values_sampled(&t.spec, axis, clip, range, SWEEP_STEPS)?;
                out.sampled = Some(values);
            }
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

pub fn run(cfg: &PipelineConfig) -> Result<Outcome> {
    cfg.check()?;
    let t = target(cfg)?;
    let actions = closure(&cfg.actions);
    let has = |a: Action| actions.contains(&a);
    let spec = &t.spec;
    let mut report = ScenarioReport {
        schema: SCHEMA.into(),
        scenario: t.name.clone(),
        parameters: t.scenario.as_ref().map(|s| ParamsEcho::new(&s.params, &s.resolved)),
        arrangement: ArrangementEcho {
            n: spec.n,
            l1: spec.l1(),
            l2: spec.l2(),
            hypersurfaces: spec
                .polys
                .iter()
                .enumerate()
                .map(|(j, p)| HypersurfaceEcho { color: spec.colors.color_of(j), polynomial: p.to_string() })
                .collect(),
        },
        actions: actions.clone(),
        validation: None,
        slice: None,
        surface: None,
        reeb: None,
        singular: None,
        fiber_survey: None,
        comparisons: vec![],
        strict_failures: vec![],
    };

    if has(Action::Validate) {
        let bbox = t.bbox.clone().ok_or_else(|| Error::Config("validation needs a bbox".into()))?;
        let mut sc = SamplingConfig::new(bbox);
        sc.seed = t.seed;
        sc.corners = t.corners.clone();
        if let Some(s) = cfg.options.samples {
            sc.boundary_samples = s;
        }
        if let Some(tol) = cfg.options.tol {
            sc.tol_rank = tol;
        }
        report.validation = Some(validate(spec, &sc)?);
    }

    let mut region: Option<PlanarRegion> = None;
    let mut surface: Option<DoubledSurface> = None;
    if has(Action::Slice) {
        let fixed = t.slice.clone().ok_or_else(|| Error::Config("slicing needs fixed coordinates".into()))?;
        let r = slice_region_at(spec, &fixed)?;
        report.slice = Some(SliceSummary {
            fixed,
            components: r.components,
            euler_char: r.euler_char,
            loops: r.loops.len(),
            arcs: r.arc_count(),
            corners: r.distinct_corners().len(),
            tangencies: r.tangencies.len(),
            chi_stratified: chi_stratified(&r, spec.l2()),
            predicted_components: predicted_components(&r, spec.l2()),
            region: r.clone(),
        });
        region = Some(r);
    }
    if has(Action::Double) {
        let r = region.as_ref().expect("slice precedes doubling");
        let mesh = triangulate(r, t.density)?;
        let mut s = build_double(&mesh, spec.l2())?;
        let embedding = embed(&mut s, &lifted_system(spec)?)?;
        let invariants = surface_invariants(&s);
        let chi_s = chi_stratified(r, spec.l2());
        report.surface = Some(SurfaceSummary {
            density: t.density,
            base_vertices: mesh.vertices.len(),
            base_triangles: mesh.triangles.len(),
            base_euler_char: mesh.euler_char(),
            vertices: s.vertices.len(),
            triangles: s.triangles.len(),
            chi_matches_stratified: invariants.chi == chi_s,
            components_match_prediction: invariants.components == predicted_components(r, spec.l2()),
            invariants,
            chi_stratified: chi_s,
            embedding,
        });
        surface = Some(s);
    }
    if has(Action::Reeb) {
        let s = surface.as_ref().expect("doubling precedes the Reeb graph");
        let g = reeb_graph(s, t.reeb_axis)?;
        let inv = &report.surface.as_ref().expect("surface summary").invariants;
        let bound = match (inv.orientable, inv.components, inv.genus) {
            (true, 1, Some(genus)) => Some(g.betti1 <= genus),
            _ => None,
        };
        report.reeb = Some(ReebSummary { axis: t.reeb_axis, stats: g.stats(), betti1_at_most_genus: bound, graph: g });
    }
    if has(Action::Singular) {
        report.singular = Some(singular(&t)?);
    }
    if has(Action::FiberSurvey) {
        let sc = t.scenario.as_ref().filter(|s| s.fiber_axes.is_some()).ok_or_else(|| {
            Error::Config("fiber survey needs a scenario with fiber axes (problem3_n4)".into())
        })?;
        report.fiber_survey = Some(fiber_survey(spec, sc.fiber_axes.unwrap(), &sc.fiber_grid, t.density)?);
    }

    report.comparisons = compare(&t.expected, &report);
    for c in &report.comparisons {
        if c.provenance == crate::scenarios::Provenance::Paper && !c.matches {
            report.strict_failures.push(format!("{}: expected {} but computed {}", c.field, c.expected, c.computed));
        }
    }
    if let Some(v) = &report.validation {
        if !v.all_ok() {
            let first = v.witnesses.first().map(|w| format!(" ({:?} at {:?})", w.condition, w.point)).unwrap_or_default();
            report.strict_failures.push(format!("validation: hypotheses fail{first}"));
        }
    }

    let out = &cfg.outputs;
    if let Some(p) = &out.mesh {
        let s = surface.as_ref().ok_or_else(|| Error::Config("--mesh needs the double action".into()))?;
        OffMesh::from_surface(s).write(p)?;
    }
    if let Some(p) = &out.dot {
        let g = report.reeb.as_ref().ok_or_else(|| Error::Config("--dot needs the reeb action".into()))?;
        std::fs::write(p, reeb_dot(&g.graph))?;
    }
    if let Some(p) = &out.svg {
        let r = region.as_ref().ok_or_else(|| Error::Config("--svg needs the slice action".into()))?;
        std::fs::write(p, region_svg(r))?;
    }
    if let Some(p) = &out.report {
        std::fs::write(p, report.to_json())?;
    }
    let exit_code = if cfg.options.strict && !report.strict_failures.is_empty() { 2 } else { 0 };
    Ok(Outcome { report, exit_code })
}
