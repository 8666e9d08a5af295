use momentforge::polynomial::to_f64;
use momentforge::scenarios::{make_scenario, Preset, ScenarioParams};
use momentforge::validator::{refine_on_active, transversality_at, validate, Condition, SamplingConfig};

fn config(preset: Preset) -> (momentforge::scenarios::Scenario, SamplingConfig) {
    let sc = make_scenario(&ScenarioParams::new(preset)).unwrap();
    let mut cfg = SamplingConfig::new(sc.bbox.clone());
    cfg.corners = sc.corners.iter().map(|c| c.to_f64()).collect();
    (sc, cfg)
}

#[test]
fn literal_preset_fails_transversality_at_the_tangency() {
    let (sc, cfg) = config(Preset::PaperLiteralThm2);
    let rep = validate(&sc.spec, &cfg).unwrap();
    assert!(!rep.cond3a_ok);
    assert!(!rep.all_ok());
    let m = &sc.resolved;
    let (a, h) = (to_f64(&m.a), to_f64(&m.b) - to_f64(&m.a));
    let targets: Vec<[f64; 3]> = m.p.iter().flat_map(|p| [[to_f64(p), h, a], [to_f64(p), -h, a]]).collect();
    let hit = rep.witnesses.iter().filter(|w| w.condition == Condition::Cond3a).find(|w| {
        targets.iter().any(|t| t.iter().zip(&w.point).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() < 1e-3)
    });
    let w = hit.expect("a cond3a witness near (p, +-(b-a), a)");
    assert_eq!(w.active.len(), 2);
    // the two gradients are parallel there
    let t = transversality_at(&sc.spec, &w.point, 1e-6).unwrap();
    assert!(t.sigma_min < 1e-6, "sigma {}", t.sigma_min);
}

#[test]
fn resolved_presets_pass() {
    for preset in [Preset::Thm2, Preset::Thm3, Preset::CaseA, Preset::CaseB, Preset::CaseC, Preset::Problem3N4] {
        let (sc, cfg) = config(preset);
        let rep = validate(&sc.spec, &cfg).unwrap();
        assert!(rep.all_ok(), "{}: {:?}", preset.name(), rep.witnesses.first());
        assert!(rep.samples_used >= 10_000);
        assert!(rep.min_transversality_measure > 1e-6, "{}", preset.name());
        assert_eq!(rep.evidence, "sampled");
    }
}

#[test]
fn validation_is_deterministic_per_seed() {
    let (sc, mut cfg) = config(Preset::CaseB);
    cfg.boundary_samples = 2000;
    let a = validate(&sc.spec, &cfg).unwrap();
    let b = validate(&sc.spec, &cfg).unwrap();
    assert_eq!(a.min_transversality_measure, b.min_transversality_measure);
    assert_eq!(a.boundary_points, b.boundary_points);
    cfg.seed = 3;
    let c = validate(&sc.spec, &cfg).unwrap();
    assert!(c.all_ok());
}

#[test]
fn refinement_lands_on_the_stratum() {
    let (sc, _) = config(Preset::Thm2);
    let spec = &sc.spec;
    // near the edge where the cylinder meets a bite
    let p = to_f64(&sc.resolved.p[0]);
    let x0 = [p - 0.97, 0.93, 0.21];
    let active = [2, 3];
    let x = refine_on_active(spec, &x0, &active, 20);
    for &j in &active {
        assert!(spec.polys[j].eval_unchecked(&x).abs() <= 1e-10, "f{j} = {}", spec.polys[j].eval_unchecked(&x));
    }
    let d: f64 = x.iter().zip(&x0).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    assert!(d < 0.2);
}
