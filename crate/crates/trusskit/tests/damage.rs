mod common;

use std::collections::BTreeSet;

use common::*;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trusskit::damage::*;
use trusskit::geometry::Point;
use trusskit::lattice::{self, HoleSpec, PatchSpec, Tri};
use trusskit::rigidity::{analyze, assemble_rigidity};
use trusskit::truss::{Edge, Truss};

#[test]
fn ne_spoke_of_single_hexagon() {
    let t = rhombus(1);
    let ne = t.lattice_edge((1, 1), (1, 2)).unwrap();
    let rep = assess_damage(&t, &[ne], None, 1e-9).unwrap();
    assert!(rep.recoverable);
    assert_eq!((rep.original_c, rep.reduced_c), (1, 0));
}

#[test]
fn corner_with_two_links() {
    // a triangle hanging off a rigid strip by its apex
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.9), Point::new(1.5, 0.9)];
    let edges = vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0), Edge::new(1, 3), Edge::new(2, 3)];
    let t = Truss::new(p, edges, None).unwrap();
    let rep = assess_damage(&t, &[4], None, 1e-9).unwrap();
    assert!(!rep.recoverable);
    assert_eq!(rep.flexes.len(), 1);
    // the freed corner carries the motion
    let f: &Vec<f64> = &rep.flexes[0];
    assert!(f[6].hypot(f[7]) > 1e-3);
}

#[test]
fn reconstructs_removed_elongations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = random_jittered_disk(&mut rng, 25);
    let a = assemble_rigidity(&t).unwrap().matrix;
    let u = DVector::from_fn(2 * t.num_vertices(), |_, _| rng.gen_range(-1.0..1.0));
    let lam = &a * &u;
    // a bar whose removal keeps the truss rigid
    let victim = (0..t.num_edges())
        .find(|id| analyze(&t.remove_edges(&[*id]).unwrap().0, 1e-9).unwrap().is_inf_rigid)
        .unwrap();
    let survivors: Vec<f64> = (0..t.num_edges()).filter(|i| *i != victim).map(|i| lam[i]).collect();
    let rep = assess_damage(&t, &[victim], Some(&survivors), 1e-9).unwrap();
    let (id, val) = rep.reconstructed.unwrap()[0];
    assert_eq!(id, victim);
    assert!((val - lam[victim]).abs() < 1e-10);
}

fn cell7() -> Truss<f64> {
    lattice::gen_patch(&PatchSpec::Cell { k: 7, holes: vec![] }).unwrap()
}

fn loss_of(tris: &BTreeSet<Tri>) -> HoleLossReport {
    let z = cell7();
    let faces = faces_of_triangles(&z, tris).unwrap();
    hole_loss(&z, &faces, 1e-9).unwrap()
}

#[test]
fn small_hole_losses() {
    let tri = loss_of(&[Tri::down(3, 3)].into_iter().collect());
    assert_eq!((tri.loss, tri.formula_loss), (0, 0));
    let rh = loss_of(&lattice::edge_triangles((3, 3), (3, 4)).into_iter().collect());
    assert_eq!((rh.loss, rh.formula_loss), (1, 1));
    let hex = loss_of(&lattice::hexagon_triangles((4, 4)).into_iter().collect());
    assert_eq!((hex.loss, hex.boundary_length, hex.hole_interior), (4, 6, 1));
}

#[test]
fn collared_holes_meet_the_formula() {
    // parallelograms and larger hexagons have gentle boundaries
    let z = cell7();
    let shapes = [lattice::parallelogram_triangles((2, 2), 3, 2), lattice::big_hexagon_triangles((4, 4), 2)];
    for tris in shapes {
        let rep = hole_loss(&z, &faces_of_triangles(&z, &tris).unwrap(), 1e-9).unwrap();
        assert!(rep.loss >= rep.boundary_length as i64 - 3);
        assert_eq!(rep.loss, rep.formula_loss);
    }
}

#[test]
fn hole_touching_outer_boundary() {
    let z = cell7();
    let tris: BTreeSet<Tri> = [Tri::up(0, 0)].into_iter().collect();
    let faces = faces_of_triangles(&z, &tris).unwrap();
    assert!(hole_loss(&z, &faces, 1e-9).is_err());
}

#[test]
fn isoperimetric_values() {
    assert_eq!(isoperimetric(6).unwrap().max_interior, 1);
    assert_eq!(isoperimetric(12).unwrap().max_interior, 7);
    let b = isoperimetric(4).unwrap();
    assert_eq!((b.loss_lower, b.loss_upper), (1, 1));
    assert!(isoperimetric(2).is_err());
    assert_eq!(brute_force_max_interior(6).unwrap(), 1);
}

#[test]
fn thinning_counts() {
    let one = ne_thinning::<f64>(1, 0, 0, 1e-9).unwrap();
    assert_eq!(one.removed.len(), 1);
    assert!(one.rigid);
    assert_eq!(one.c, 0);
    let three = ne_thinning::<f64>(3, 8, 1, 1e-9).unwrap();
    assert_eq!(three.removed.len(), 9);
    assert!(three.rigid);
    assert_eq!(three.c, 0);
    assert_eq!(three.further.len(), 8);
    assert!(three.further.iter().all(|(_, n)| *n >= 4));
}

#[test]
fn ac_values_and_ordering() {
    let spec = |holes| PeriodicCellSpec { k: 13, holes };
    let small: Vec<HoleSpec> = [2, 6, 10]
        .iter()
        .flat_map(|a| [2, 6, 10].iter().map(move |b| HoleSpec::Parallelogram { at: (*a, *b), na: 1, nb: 1 }))
        .collect();
    let a = asymptotic_compatibility(&spec(small), &[], 1e-9).unwrap();
    let b = asymptotic_compatibility(&spec(vec![HoleSpec::Parallelogram { at: (5, 5), na: 3, nb: 3 }]), &[], 1e-9).unwrap();
    let c = asymptotic_compatibility(&spec(vec![HoleSpec::Parallelogram { at: (2, 6), na: 9, nb: 1 }]), &[], 1e-9).unwrap();
    assert_eq!(a.hole_sizes, vec![4; 9]);
    assert_eq!(b.hole_sizes, vec![16]);
    assert_eq!(c.hole_sizes, vec![20]);
    assert!(a.formula > b.formula && b.formula > c.formula);
    assert!((asymptotic_compatibility(&spec(vec![]), &[], 1e-9).unwrap().formula - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    assert_eq!(ac_formula(13, 9, 4).unwrap(), a.formula);
}

#[test]
fn ac_empirical_approaches_formula() {
    let spec = PeriodicCellSpec { k: 5, holes: vec![HoleSpec::HexagonCenters { centers: vec![(3, 3)] }] };
    let rep = asymptotic_compatibility(&spec, &[1, 2, 3], 1e-9).unwrap();
    let gaps: Vec<f64> = rep.empirical.iter().map(|s| (rep.formula - s.ratio).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[1] / rep.formula < 0.1);
}

#[test]
fn multi_hole_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..10 {
        let (t, g) = random_holed(&mut rng, 8, 1 + i % 2);
        let top = t.topology().unwrap();
        assert_eq!(top.g, g);
        assert_eq!(analyze(&t, 1e-9).unwrap().c, 3 * g + top.v_i);
    }
}

#[test]
fn hexagon_hole_hosts() {
    for p in 1..=2 {
        let (k, hole) = hexagon_hole_host(p);
        let z: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell { k, holes: vec![] }).unwrap();
        let tris = hole.footprints().remove(0);
        let rep = hole_loss(&z, &faces_of_triangles(&z, &tris).unwrap(), 1e-9).unwrap();
        let v1 = 3 * p * p - 3 * p + 1;
        assert_eq!(rep.hole_interior, v1);
        assert_eq!(rep.loss, (v1 + 6 * p) as i64 - 3);
    }
}
