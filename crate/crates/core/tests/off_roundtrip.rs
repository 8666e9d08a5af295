use momentforge::arrangement::lifted_system;
use momentforge::doubler::{build_double, embed, invariants_of, surface_invariants};
use momentforge::io::off::OffMesh;
use momentforge::scenarios::{make_scenario, Preset, ScenarioParams};
use momentforge::slicer::mesh::triangulate;
use momentforge::slicer::slice_region_at;

#[test]
fn torus_survives_an_off_round_trip() {
    for preset in [Preset::CaseA, Preset::Problem3N4, Preset::CaseC] {
        let sc = make_scenario(&ScenarioParams::new(preset)).unwrap();
        let region = slice_region_at(&sc.spec, &sc.slice).unwrap();
        let mesh = triangulate(&region, 0.15).unwrap();
        let mut s = build_double(&mesh, sc.spec.l2()).unwrap();
        embed(&mut s, &lifted_system(&sc.spec).unwrap()).unwrap();
        let before = surface_invariants(&s);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.off");
        let off = OffMesh::from_surface(&s);
        off.write(&path).unwrap();
        let back = OffMesh::read(&path).unwrap();
        assert_eq!(back, off, "coordinates survive bit for bit");
        let after = invariants_of(&back.triangles);
        assert_eq!(after, before);
        assert_eq!(back.vertices[0].len(), sc.spec.n + sc.spec.l2());
    }
}

#[test]
fn off_header_counts() {
    let sc = make_scenario(&ScenarioParams::new(Preset::CaseA)).unwrap();
    let region = slice_region_at(&sc.spec, &sc.slice).unwrap();
    let s = build_double(&triangulate(&region, 0.3).unwrap(), 2).unwrap();
    let text = OffMesh::from_surface(&s).to_off_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(lines.next().unwrap(), format!("{} {} 0", s.vertices.len(), s.triangles.len()));
    let v = s.vertices.len() as i64;
    let f = s.triangles.len() as i64;
    assert_eq!(v - 3 * f / 2 + f, 0, "torus");
}
