mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trusskit::geometry::Point;
use trusskit::linalg;
use trusskit::rigidity::*;
use trusskit::truss::{Edge, Truss};
use trusskit::Error;

fn triangle() -> Truss<f64> {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.3, 0.9)];
    Truss::new(p, vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)], None).unwrap()
}

#[test]
fn unit_edge_row() {
    let t = Truss::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], vec![Edge::new(0, 1)], None).unwrap();
    let a = assemble_rigidity(&t).unwrap();
    assert_eq!(a.matrix.row(0).iter().copied().collect::<Vec<f64>>(), vec![-1.0, 0.0, 1.0, 0.0]);
}

#[test]
fn rigid_motions_in_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = random_jittered_disk(&mut rng, 12);
    let a = assemble_rigidity(&t).unwrap().matrix;
    let g = gauge_rows(&t);
    for k in 0..3 {
        let u: DVector<f64> = g.row(k).transpose();
        assert!((&a * u).norm() < 1e-12);
    }
}

#[test]
fn triangle_and_hexstar_counts() {
    let r = analyze(&triangle(), 1e-9).unwrap();
    assert_eq!((r.nullity, r.c, r.maxwell), (3, 0, 0));
    assert!(r.is_inf_rigid && r.is_generic);
    let h = analyze(&hexstar(), 1e-9).unwrap();
    assert_eq!(h.c, 1);
    assert_eq!(h.maxwell, 1);
    assert!(h.is_inf_rigid);
    assert_eq!(h.tolerance, 1e-9);
    assert!(h.sigma_kept > 1e3 * h.sigma_dropped.max(1e-300) || h.sigma_dropped == 0.0);
}

#[test]
fn collinear_extra_vertex_is_non_generic() {
    let t = hexstar();
    let c = t.interior_vertices().unwrap()[0];
    let s = t.star_of(c).unwrap();
    let (p, q) = (s.neighbors[0], s.neighbors[1]);
    let mid = t.vertex(p).add(t.vertex(q)).scale(0.5);
    let mut pos = t.vertices().to_vec();
    pos.push(mid);
    let mut edges = t.edges().to_vec();
    edges.push(Edge::new(p, 7));
    edges.push(Edge::new(7, q));
    let x = Truss::new(pos, edges, None).unwrap();
    let r = analyze(&x, 1e-9).unwrap();
    assert_eq!(r.nullity, 4);
    assert_eq!(r.c, 2);
    assert_eq!(r.maxwell, 1);
    assert!(!r.is_generic);
    assert_eq!(r.flex_basis.len(), 1);
    // the flex moves the extra vertex across the collinear bars
    let f = &r.flex_basis[0];
    let d = x.vertex(q).sub(x.vertex(p));
    let along = f[14] * d.x + f[15] * d.y;
    assert!(along.abs() < 1e-9);
    assert!(f[14].hypot(f[15]) > 0.1);
}

#[test]
fn compatibility_bases() {
    assert_eq!(compatibility_basis(&triangle(), BasisMethod::LeftNull, 1e-9).unwrap().rows.nrows(), 0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let t = random_jittered_disk(&mut rng, 25);
        let a = assemble_rigidity(&t).unwrap().matrix;
        let b1 = compatibility_basis(&t, BasisMethod::LeftNull, 1e-9).unwrap();
        let b2 = compatibility_basis(&t, BasisMethod::Projector, 1e-9).unwrap();
        let c = analyze(&t, 1e-9).unwrap().c;
        assert_eq!(b1.rows.nrows(), c);
        assert_eq!(b2.rows.nrows(), c);
        let mut stacked = DMatrix::zeros(2 * c, a.nrows());
        stacked.view_mut((0, 0), (c, a.nrows())).copy_from(&b1.rows);
        stacked.view_mut((c, 0), (c, a.nrows())).copy_from(&b2.rows);
        assert_eq!(linalg::rank(&stacked, 1e-9), c);
        assert!((&b1.rows * &a).norm() / a.norm() < 1e-9);
        assert!((&b2.rows * &a).norm() / a.norm() < 1e-9);
    }
}

#[test]
fn projector_needs_rigidity() {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let edges = (0..4).map(|i| Edge::new(i, (i + 1) % 4)).collect();
    let square = Truss::new(p, edges, None).unwrap();
    assert!(compatibility_basis(&square, BasisMethod::Projector, 1e-9).is_err());
}

#[test]
fn prescribed_elongations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = random_jittered_disk(&mut rng, 20);
    let n = 2 * t.num_vertices();
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lam = elongations_of(&t, &u).unwrap();
    let sol = solve_prescribed_elongations(&t, &lam, [0.0; 3], 1e-9).unwrap();
    assert!(sol.compatible);
    assert!(sol.residual < 1e-10);
    let back = elongations_of(&t, &sol.displacement).unwrap();
    for (x, y) in back.iter().zip(&lam) {
        assert!((x - y).abs() < 1e-10);
    }
    // the difference is a rigid motion
    let diff = DVector::from_iterator(n, u.iter().zip(&sol.displacement).map(|(a, b)| a - b));
    let a = assemble_rigidity(&t).unwrap().matrix;
    assert!((&a * diff).norm() < 1e-9);

    // perturb a bar that carries a self-stress
    let b = compatibility_basis(&t, BasisMethod::LeftNull, 1e-9).unwrap().rows;
    let k = (0..b.ncols()).max_by(|i, j| b.column(*i).norm().total_cmp(&b.column(*j).norm())).unwrap();
    let mut bad = lam.clone();
    bad[k] += 1.0;
    let sol = solve_prescribed_elongations(&t, &bad, [0.0; 3], 1e-9).unwrap();
    assert!(!sol.compatible);
    let dist = (&b * DVector::from_vec(bad)).norm();
    assert!((sol.residual - dist).abs() < 1e-9);
}

#[test]
fn dilation_on_hexstar() {
    let t = hexstar();
    let u: Vec<f64> = t.vertices().iter().flat_map(|p| [p.x, p.y]).collect();
    let lam = elongations_of(&t, &u).unwrap();
    for l in &lam {
        assert!((l - 1.0).abs() < 1e-12);
    }
    let b = compatibility_basis(&t, BasisMethod::LeftNull, 1e-9).unwrap().rows;
    assert!((&b * DVector::from_vec(lam)).norm() < 1e-12);
}

#[test]
fn flexible_solve_refused() {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let edges = (0..4).map(|i| Edge::new(i, (i + 1) % 4)).collect();
    let square = Truss::new(p, edges, None).unwrap();
    assert_eq!(
        solve_prescribed_elongations(&square, &[0.0; 4], [0.0; 3], 1e-9).unwrap_err(),
        Error::NotRigid { nullity: 4 }
    );
}

#[test]
fn works_in_single_precision() {
    let t: Truss<f32> = trusskit::lattice::gen_patch(&trusskit::lattice::PatchSpec::Rhombus { n: 2 }).unwrap();
    let r = analyze(&t, 1e-5f32).unwrap();
    assert_eq!(r.c, 4);
    assert!(r.is_inf_rigid);
}
