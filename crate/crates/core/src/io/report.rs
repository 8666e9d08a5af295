//! The JSON scenario report.

use serde::Serialize;
use serde_json::{json, Value};

use crate::arrangement::ParamMeta;
use crate::doubler::{EmbeddingReport, SurfaceInvariants};
use crate::io::config::Action;
use crate::polynomial::format_rational;
use crate::reeb::{ReebGraph, ReebStats};
use crate::scenarios::{Expected, ExpectedResults, FiberKind, FiberReport, Provenance, ScenarioParams, Variant};
use crate::singular::SingularValueReport;
use crate::slicer::PlanarRegion;
use crate::validator::ValidationReport;

pub const SCHEMA: &str = "momentforge-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct ParamsEcho {
    pub l: usize,
    pub a: String,
    pub b: String,
    pub s1: String,
    pub s2: String,
    pub p: Vec<String>,
    pub radius: Option<String>,
    pub variant: Variant,
    pub density: f64,
    pub seed: u64,
}

impl ParamsEcho {
    pub fn new(params: &ScenarioParams, meta: &ParamMeta) -> Self {
        Self {
            l: params.l,
            a: format_rational(&meta.a),
            b: format_rational(&meta.b),
            s1: format_rational(&meta.s1),
            s2: format_rational(&meta.s2),
            p: meta.p.iter().map(format_rational).collect(),
            radius: meta.radius.as_ref().map(format_rational),
            variant: params.variant,
            density: params.density,
            seed: params.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypersurfaceEcho {
    pub color: usize,
    pub polynomial: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrangementEcho {
    pub n: usize,
    pub l1: usize,
    pub l2: usize,
    pub hypersurfaces: Vec<HypersurfaceEcho>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceSummary {
    pub fixed: Vec<(usize, f64)>,
    pub components: usize,
    pub euler_char: i64,
    pub loops: usize,
    pub arcs: usize,
    pub corners: usize,
    pub tangencies: usize,
    pub chi_stratified: i64,
    pub predicted_components: usize,
    pub region: PlanarRegion,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceSummary {
    pub density: f64,
    pub base_vertices: usize,
    pub base_triangles: usize,
    pub base_euler_char: i64,
    pub vertices: usize,
    pub triangles: usize,
    pub invariants: SurfaceInvariants,
    pub chi_stratified: i64,
    pub chi_matches_stratified: bool,
    pub components_match_prediction: bool,
    pub embedding: EmbeddingReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReebSummary {
    pub axis: usize,
    pub stats: ReebStats,
    /// `betti1 <= genus`, when the surface is orientable and connected.
    pub betti1_at_most_genus: Option<bool>,
    pub graph: ReebGraph,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SingularSummary {
    pub axis: usize,
    pub closed_form: Option<SingularValueReport>,
    pub clipped: Option<SingularValueReport>,
    /// Present when the closed form does not apply.
    pub closed_form_error: Option<String>,
    /// Sweep-and-bisect values, reported only as sampled evidence.
    pub sampled: Option<Vec<f64>>,
}

impl SingularSummary {
    fn unclipped(&self) -> Option<(Vec<f64>, f64)> {
        match (&self.closed_form, &self.sampled) {
            (Some(r), _) => Some((r.value_list(), 1e-9)),
            (None, Some(v)) => Some((v.clone(), 1e-6)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub field: String,
    pub expected: Value,
    pub computed: Value,
    pub provenance: Provenance,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub schema: String,
    pub scenario: String,
    pub parameters: Option<ParamsEcho>,
    pub arrangement: ArrangementEcho,
    pub actions: Vec<Action>,
    pub validation: Option<ValidationReport>,
    pub slice: Option<SliceSummary>,
    pub surface: Option<SurfaceSummary>,
    pub reeb: Option<ReebSummary>,
    pub singular: Option<SingularSummary>,
    pub fiber_survey: Option<Vec<FiberReport>>,
    pub comparisons: Vec<Comparison>,
    /// Reasons a `--strict` run exits with status 2.
    pub strict_failures: Vec<String>,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn comparison(&self, field: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.field == field)
    }
}

fn lists_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

fn push<T: Serialize, C: Serialize>(out: &mut Vec<Comparison>, field: &str, e: &Option<Expected<T>>, computed: Option<C>, ok: impl FnOnce(&T, &C) -> bool) {
    if let (Some(e), Some(c)) = (e, computed) {
        out.push(Comparison {
            field: field.into(),
            expected: json!(e.value),
            computed: json!(c),
            provenance: e.provenance,
            matches: ok(&e.value, &c),
        });
    }
}

/// Expected-versus-computed rows for every expectation whose quantity was computed.
pub fn compare(expected: &ExpectedResults, r: &ScenarioReport) -> Vec<Comparison> {
    let mut out = Vec::new();
    push(&mut out, "validation_pass", &expected.validation_pass, r.validation.as_ref().map(|v| v.all_ok()), |e, c| e == c);
    push(&mut out, "slice_components", &expected.slice_components, r.slice.as_ref().map(|s| s.components), |e, c| e == c);
    push(&mut out, "genus", &expected.genus, r.surface.as_ref().map(|s| s.invariants.genus), |e, c| Some(*e) == *c);
    push(&mut out, "reeb_betti1", &expected.reeb_betti1, r.reeb.as_ref().map(|g| g.stats.betti1), |e, c| e == c);
    push(&mut out, "reeb_profile", &expected.reeb_profile, r.reeb.as_ref().map(|g| g.stats.clone()), |e, c| e == c);
    if let Some(s) = &r.singular {
        let un = s.unclipped();
        push(&mut out, "singular_values", &expected.singular_values, un.clone().map(|u| u.0), |e, c| {
            lists_close(c, e, un.as_ref().map_or(1e-9, |u| u.1))
        });
        let clipped = s.clipped.as_ref();
        push(&mut out, "singular_values_clipped", &expected.singular_values_clipped, clipped.map(|c| c.value_list()), |e, c| {
            lists_close(c, e, 1e-9)
        });
        push(&mut out, "image_clipped", &expected.image_clipped, clipped.map(|c| c.image_interval), |e, c| lists_close(c, e, 1e-9));
    }
    if let Some(fibers) = &r.fiber_survey {
        let mut genera: Vec<Option<i64>> = fibers
            .iter()
            .filter_map(|f| match &f.fiber {
                FiberKind::Surface { invariants, .. } => Some(invariants.genus),
                _ => None,
            })
            .collect();
        genera.sort();
        genera.dedup();
        push(&mut out, "interior_fiber_genus", &expected.interior_fiber_genus, Some(genera), |e, c| c.as_slice() == [Some(*e)]);
    }
    out
}
