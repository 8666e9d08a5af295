//! Random labeled planar regions shared by the oracle and acceptance suites.

use std::collections::BTreeMap;

use momentforge::arrangement::{lifted_system, ArrangementSpec, ColorMap};
use momentforge::doubler::{build_double, chi_stratified, embed, predicted_components, surface_invariants};
use momentforge::reeb::reeb_graph;
use momentforge::polynomial::{int, rat, Polynomial, Rational};
use momentforge::slicer::mesh::triangulate;
use momentforge::slicer::slice_region_at;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn x() -> Polynomial {
    Polynomial::var(2, 0)
}
fn y() -> Polynomial {
    Polynomial::var(2, 1)
}
fn c(r: Rational) -> Polynomial {
    Polynomial::constant(2, r)
}

/// `(x - cx)^2 + (y - cy)^2 - r^2`: non-negative outside the disk.
fn outside_disk(cx: Rational, cy: Rational, r: Rational) -> Polynomial {
    let dx = &x() - &c(cx);
    let dy = &y() - &c(cy);
    &(&(&dx * &dx) + &(&dy * &dy)) - &c(&r * &r)
}

/// A rectangle `[0, w] x [0, 2]` of unit cells. Cells may carry a bite from
/// the top or bottom edge and a hole in the middle; thin vertical bands
/// between cells split the rectangle. Features are separated by construction,
/// so every contact is a transversal crossing.
pub fn random_region(rng: &mut ChaCha8Rng) -> (ArrangementSpec, usize) {
    let w = rng.gen_range(2..=6i64);
    let mut polys = vec![x(), &c(int(w)) - &x(), y(), &c(int(2)) - &y()];
    for cell in 0..w {
        let cx = rat(2 * cell + 1, 2);
        let radii = [rat(1, 4), rat(3, 10), rat(2, 5)];
        if rng.gen_bool(0.5) {
            polys.push(outside_disk(cx.clone(), int(2), radii[rng.gen_range(0..3)].clone()));
        } else if cell == w - 1 && rng.gen_bool(0.5) {
            // slanted cut of the top right corner
            let (u, v) = (rat(rng.gen_range(4..=9), 20), rat(rng.gen_range(4..=9), 20));
            let lhs = &(&(&c(int(w)) - &x()) * &c(v.clone())) + &(&(&c(int(2)) - &y()) * &c(u.clone()));
            polys.push(&lhs - &c(&u * &v));
        }
        if rng.gen_bool(0.4) {
            polys.push(outside_disk(cx.clone(), int(0), radii[rng.gen_range(0..3)].clone()));
        } else if cell == 0 && rng.gen_bool(0.5) {
            // slanted cut of the bottom left corner: x / u + y / v >= 1
            let (u, v) = (rat(rng.gen_range(4..=9), 20), rat(rng.gen_range(4..=9), 20));
            let lhs = &(&x() * &c(v.clone())) + &(&y() * &c(u.clone()));
            polys.push(&lhs - &c(&u * &v));
        }
        if rng.gen_bool(0.3) {
            polys.push(outside_disk(cx, int(1), rat(1, 5)));
        }
    }
    for k in 1..w {
        if rng.gen_bool(0.25) {
            let d = &x() - &c(int(k));
            polys.push(&(&d * &d) - &c(rat(1, 400)));
        }
    }
    let l2 = rng.gen_range(1..=3usize).min(polys.len());
    let mut colors: Vec<usize> = (0..polys.len()).map(|_| rng.gen_range(1..=l2)).collect();
    // every color in use
    for (i, col) in (1..=l2).enumerate() {
        colors[i] = col;
    }
    let spec = ArrangementSpec::new(2, polys, ColorMap::with_point_fibers(colors).unwrap()).unwrap();
    (spec, l2)
}

pub struct RandomRegionStats {
    pub multi_component: usize,
    /// `(betti1, genus)` of the Reeb graph of `x` on each connected surface.
    pub betti_genus: Vec<(i64, i64)>,
}

/// Checks `count` seeded random regions against the closed-form counts.
pub fn check_random_regions(seed: u64, count: usize) -> Result<RandomRegionStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut multi_component = 0;
    let mut betti_genus = Vec::new();
    for case in 0..count {
        let (spec, l2) = random_region(&mut rng);
        let region = slice_region_at(&spec, &[]).map_err(|e| format!("case {case}: {e}"))?;
        let density = [0.07, 0.1, 0.15, 0.2, 0.3][rng.gen_range(0..5)];
        let mesh = triangulate(&region, density).map_err(|e| format!("case {case}: {e}"))?;
        if mesh.euler_char() != region.euler_char {
            return Err(format!("case {case}: mesh chi {} vs region {}", mesh.euler_char(), region.euler_char));
        }
        let mut s = build_double(&mesh, l2).map_err(|e| format!("case {case}: {e}"))?;
        let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &s.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edge_use.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if !edge_use.values().all(|&n| n == 2) {
            return Err(format!("case {case}: surface not closed"));
        }
        let inv = surface_invariants(&s);
        if inv.chi != chi_stratified(&region, l2) {
            return Err(format!("case {case}: chi {} vs stratified {}", inv.chi, chi_stratified(&region, l2)));
        }
        if inv.components != predicted_components(&region, l2) {
            return Err(format!("case {case}: components {} vs {}", inv.components, predicted_components(&region, l2)));
        }
        if !inv.orientable {
            return Err(format!("case {case}: not orientable"));
        }
        if region.components > 1 {
            multi_component += 1;
        }
        if let (1, Some(genus)) = (inv.components, inv.genus) {
            let ls = lifted_system(&spec).map_err(|e| e.to_string())?;
            embed(&mut s, &ls).map_err(|e| format!("case {case}: {e}"))?;
            let g = reeb_graph(&s, 0).map_err(|e| format!("case {case}: {e}"))?;
            betti_genus.push((g.betti1, genus));
        }
    }
    Ok(RandomRegionStats { multi_component, betti_genus })
}
