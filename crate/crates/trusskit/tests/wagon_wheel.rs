mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trusskit::geometry::Point;
use trusskit::lattice::{self, HoleSpec, PatchSpec};
use trusskit::rigidity::elongations_of;
use trusskit::truss::Truss;
use trusskit::wagon::*;

fn row_on(t: &Truss<f64>, row: &WagonWheelRow<f64>, lam: &[f64]) -> f64 {
    // lam is in active-edge order
    let order = t.active_edges();
    row.elongation_row(t).iter().map(|(id, c)| c * lam[order.iter().position(|x| x == id).unwrap()]).sum()
}

#[test]
fn regular_hexagon_row() {
    let t = hexstar();
    let c = t.interior_vertices().unwrap()[0];
    let row = wagon_row(&t, c).unwrap();
    let scale = 2.0 / 3f64.sqrt();
    let s = t.star_of(c).unwrap();
    for e in &s.radial {
        assert!((row.coefficients[e] + scale).abs() < 1e-12);
    }
    for e in &s.circumferential {
        assert!((row.coefficients[e] - scale).abs() < 1e-12);
    }
    assert_eq!(row.regular_form(1e-9).unwrap().values().filter(|v| **v == 1).count(), 6);
}

#[test]
fn affine_hexagon_row_annihilates() {
    let t = hexstar();
    let m = [[1.3, 0.4], [-0.2, 0.8]];
    let pos: Vec<Point<f64>> =
        t.vertices().iter().map(|p| Point::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)).collect();
    let d = t.with_positions(pos).unwrap();
    let c = d.interior_vertices().unwrap()[0];
    let row = wagon_row(&d, c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u: Vec<f64> = (0..14).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lam = elongations_of(&d, &u).unwrap();
    assert!(row_on(&d, &row, &lam).abs() < 1e-12);
    assert!(row.regular_form(1e-9).is_none());
}

#[test]
fn necessity_on_random_trusses() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let size = rng.gen_range(6..30);
        let t = random_jittered_disk(&mut rng, size);
        let u: Vec<f64> = (0..2 * t.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lam = elongations_of(&t, &u).unwrap();
        let scale = lam.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for row in wagon_rows(&t, &t.interior_vertices().unwrap()).unwrap() {
            let mag: f64 = row.coefficients.values().map(|c| c.abs()).sum();
            assert!(row_on(&t, &row, &lam).abs() < 1e-9 * mag * scale);
        }
    }
}

#[test]
fn basis_checks() {
    let r = wagon_basis_check(&rhombus(2), 1e-9).unwrap();
    assert_eq!((r.rows, r.rank, r.c), (4, 4, 4));
    assert!(r.spans_left_null);
    let h = wagon_basis_check(&hexstar(), 1e-9).unwrap();
    assert_eq!((h.rows, h.rank, h.c), (1, 1, 1));
    assert!(h.spans_left_null);
    let annulus: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell {
        k: 5,
        holes: vec![HoleSpec::HexagonCenters { centers: vec![(3, 3)] }],
    })
    .unwrap();
    let top = annulus.topology().unwrap();
    let a = wagon_basis_check(&annulus, 1e-9).unwrap();
    assert_eq!(a.rank, top.v_i);
    assert_eq!(a.c, top.v_i + 3);
    assert!(!a.spans_left_null);
}

#[test]
fn lattice_values_of_single_star() {
    let t = rhombus(3);
    let coords = lattice::lattice_coords(&t).unwrap();
    let v = coords.iter().position(|p| *p == (2, 2)).unwrap();
    let cs = curve_sum(&t, &[v]).unwrap();
    let unit = 2.0 / 3f64.sqrt();
    for e in &cs.edges {
        assert!((e.sigma - e.class.lattice_value() as f64 * unit).abs() < 1e-12);
        assert!(matches!(e.class, EdgeClass::Boundary | EdgeClass::UniqueIncoming));
    }
}

#[test]
fn isthmus_and_spine_classes() {
    // opposite apexes of one bar make an isthmus, adjacent ones a spine
    let t = rhombus(4);
    let coords = lattice::lattice_coords(&t).unwrap();
    let at = |p: (i64, i64)| coords.iter().position(|q| *q == p).unwrap();
    let cs = curve_sum(&t, &[at((2, 2)), at((3, 3))]).unwrap();
    assert!(cs.edges.iter().any(|e| e.class == EdgeClass::Isthmus));
    let cs = curve_sum(&t, &[at((2, 2)), at((3, 2))]).unwrap();
    assert!(cs.edges.iter().any(|e| e.class == EdgeClass::Spine));
    for e in &cs.edges {
        assert!((e.sigma - e.closed_form).abs() < 1e-12);
    }
}

#[test]
fn curve_sum_verdicts() {
    let t = rhombus(2);
    let region = t.interior_vertices().unwrap();
    let cs = curve_sum(&t, &region).unwrap();
    let mut rates = vec![0.0; t.num_edges()];
    for e in &cs.edges {
        if e.class != EdgeClass::Boundary {
            rates[e.edge] = 1.0;
        }
    }
    let rep = curve_sum_verdict(&t, &region, &rates, 1e-9).unwrap();
    assert!(rep.value < 0.0);
    assert_eq!(rep.verdict, Verdict::Incompatible);
    assert!(rep.sign_pattern);

    let zero = curve_sum_verdict(&t, &region, &vec![0.0; t.num_edges()], 1e-9).unwrap();
    assert_eq!(zero.value, 0.0);
    assert_eq!(zero.verdict, Verdict::Undetermined);

    // a dilation stretches every bar by its own length: L = 1
    let ones = vec![1.0; t.num_edges()];
    let dil = curve_sum_verdict(&t, &region, &ones, 1e-9).unwrap();
    assert!(dil.value.abs() < 1e-12);
    for row in wagon_rows(&t, &region).unwrap() {
        assert!(row.apply(&ones).abs() < 1e-12);
    }
}

#[test]
fn telescoping_identity() {
    // the rows over a region are the sum of rows over any split of it
    let t = rhombus(4);
    let inner = t.interior_vertices().unwrap();
    let (a, b) = inner.split_at(7);
    let whole = curve_sum(&t, &inner).unwrap();
    let pa = curve_sum(&t, a).unwrap();
    let pb = curve_sum(&t, b).unwrap();
    for e in &whole.edges {
        assert!((e.sigma - pa.sigma(e.edge) - pb.sigma(e.edge)).abs() < 1e-12);
    }
}

#[test]
fn empty_region_rejected() {
    assert!(curve_sum(&hexstar(), &[]).is_err());
}
