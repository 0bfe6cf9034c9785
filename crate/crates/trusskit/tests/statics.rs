mod common;

use common::*;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trusskit::geometry::Point;
use trusskit::linalg;
use trusskit::rigidity::{analyze, gauge_rows};
use trusskit::statics::*;
use trusskit::truss::{Edge, Truss};
use trusskit::Error;

fn bar() -> Truss<f64> {
    Truss::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], vec![Edge::new(0, 1)], None).unwrap()
}

#[test]
fn single_bar_stiffness() {
    let k = stiffness(&bar(), &[2.0]).unwrap();
    assert_eq!(linalg::rank(&k, 1e-9), 1);
    assert_eq!(k[(0, 0)], 2.0);
    assert_eq!(k[(0, 2)], -2.0);
}

#[test]
fn stiffness_kills_rigid_motions() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..5 {
        let t = random_jittered_disk(&mut rng, 15);
        let springs: Vec<f64> = (0..t.num_active()).map(|_| rng.gen_range(0.5..3.0)).collect();
        let k = stiffness(&t, &springs).unwrap();
        let g = gauge_rows(&t);
        for r in 0..3 {
            let u: DVector<f64> = g.row(r).transpose();
            assert!((&k * u).norm() < 1e-10);
        }
        let zero_modes = k.ncols() - linalg::rank(&k, 1e-9);
        assert_eq!(zero_modes, analyze(&t, 1e-9).unwrap().nullity);
        assert!((&k - k.transpose()).norm() < 1e-12);
    }
}

#[test]
fn zero_load_zero_response() {
    let t = hexstar();
    let springs = vec![1.0; t.num_active()];
    let s = solve_elongation_form(&t, &springs, &vec![0.0; 14], 1e-9).unwrap();
    assert!(s.elongations.iter().all(|x| x.abs() < 1e-14));
    assert_eq!(s.energy, 0.0);
}

#[test]
fn symmetric_triangle_under_squeeze() {
    let h = 3f64.sqrt() / 2.0;
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
    let t = Truss::new(p, vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)], None).unwrap();
    // pull the base corners apart
    let load = [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    for s in [
        solve_displacement_form(&t, &[1.0; 3], &load, 1e-9).unwrap(),
        solve_elongation_form(&t, &[1.0; 3], &load, 1e-9).unwrap(),
    ] {
        assert!((s.elongations[0] - 1.0).abs() < 1e-12);
        assert!(s.elongations[1].abs() < 1e-12);
        assert!(s.elongations[2].abs() < 1e-12);
        assert!(s.force_residual < 1e-12);
    }
}

#[test]
fn both_forms_agree_on_hexstar() {
    let t = hexstar();
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let springs: Vec<f64> = (0..12).map(|_| rng.gen_range(0.5..2.0)).collect();
    let load = balanced_load(&t, &mut rng);
    let a = solve_displacement_form(&t, &springs, &load, 1e-9).unwrap();
    let b = solve_elongation_form(&t, &springs, &load, 1e-9).unwrap();
    for (x, y) in a.elongations.iter().zip(&b.elongations) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(b.compatibility_residual < 1e-10);
    assert!((a.energy - b.energy).abs() < 1e-10);
}

#[test]
fn bad_inputs() {
    let t = bar();
    assert_eq!(stiffness(&t, &[0.0]).unwrap_err(), Error::BadSpring(0));
    assert!(matches!(stiffness(&t, &[1.0, 1.0]).unwrap_err(), Error::LengthMismatch { .. }));
    assert!(matches!(solve_elongation_form(&t, &[1.0], &[1.0, 0.0, 1.0, 0.0], 1e-9).unwrap_err(), Error::Unbalanced(_)));
    // a loose square cannot carry a pull along its diagonal
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let sq = Truss::new(p, (0..4).map(|i| Edge::new(i, (i + 1) % 4)).collect(), None).unwrap();
    let shear = [-1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0];
    assert!(matches!(solve_displacement_form(&sq, &[1.0; 4], &shear, 1e-9).unwrap_err(), Error::ExcitesFlex(_)));
}
