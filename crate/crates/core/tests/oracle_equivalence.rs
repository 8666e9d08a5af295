//! Random labeled planar regions: the mesh, the doubled surface and the
//! closed-form counts must agree.

mod common;

#[test]
fn random_regions_agree_with_oracles() {
    let stats = common::check_random_regions(20240611, 200).unwrap_or_else(|e| panic!("{e}"));
    assert!(stats.multi_component > 10, "generator should exercise split regions");
    for &(b1, genus) in &stats.betti_genus {
        assert!(b1 <= genus, "betti1 {b1} > genus {genus}");
    }
}
