mod common;

use std::collections::BTreeSet;

use common::*;
use trusskit::geometry::Point;
use trusskit::lattice::{self, HoleSpec, PatchSpec};
use trusskit::truss::{Edge, Truss};
use trusskit::Error;

fn triangle() -> Truss<f64> {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.8)];
    Truss::new(p, vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)], None).unwrap()
}

#[test]
fn hexstar_counts_and_identity() {
    let t = hexstar();
    let top = t.topology().unwrap();
    assert_eq!((top.v, top.e, top.f), (7, 12, 6));
    assert_eq!((top.v_i, top.v_b, top.e_i, top.e_b), (1, 6, 6, 6));
    assert_eq!(3 * top.chi, top.e_b as i64 - top.e_i as i64 + 3 * top.v_i as i64);
}

#[test]
fn rhombus_link_counts() {
    for n in 1..=6usize {
        let t = rhombus(n);
        assert_eq!(t.num_edges(), 3 * n * n + 8 * n + 1);
    }
    let top = rhombus(2).topology().unwrap();
    assert_eq!((top.e, top.v, top.v_i), (29, 14, 4));
}

#[test]
fn generated_edges_have_unit_length() {
    for spec in [PatchSpec::Hexstar, PatchSpec::Rhombus { n: 3 }, PatchSpec::Hexagon { side: 2 }] {
        let t: Truss<f64> = lattice::gen_patch(&spec).unwrap();
        for id in 0..t.num_edges() {
            assert!((t.length(id) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn single_triangle_topology() {
    let top = triangle().topology().unwrap();
    assert_eq!(top.chi, 1);
    assert_eq!(top.v_i, 0);
    assert_eq!(top.e_b, 3);
    assert_eq!(top.g, 0);
}

#[test]
fn holed_cell_has_two_loops() {
    let t: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell {
        k: 5,
        holes: vec![HoleSpec::HexagonCenters { centers: vec![(3, 3)] }],
    })
    .unwrap();
    let top = t.topology().unwrap();
    assert_eq!(top.g, 1);
    assert_eq!(top.boundary_loops.len(), 2);
    assert_eq!(top.chi, 0);
}

#[test]
fn stars() {
    let t = hexstar();
    let c = t.interior_vertices().unwrap()[0];
    assert_eq!(t.star_of(c).unwrap().neighbors.len(), 6);
    let boundary = (0..7).find(|v| *v != c).unwrap();
    assert_eq!(t.star_of(boundary).unwrap_err(), Error::NotInterior(boundary));

    let r = rhombus(2);
    for v in r.interior_vertices().unwrap() {
        let s = r.star_of(v).unwrap();
        assert_eq!(s.neighbors.len(), 6);
        let all: BTreeSet<usize> = s.radial.iter().chain(&s.circumferential).copied().collect();
        assert_eq!(all.len(), 12);
        for (i, e) in s.radial.iter().enumerate() {
            assert_eq!(r.edge(*e).other(v), s.neighbors[i]);
        }
    }
}

#[test]
fn remove_and_restore() {
    let t = hexstar();
    let (cut, flags) = t.remove_edges(&[3]).unwrap();
    assert!(!flags.disconnected);
    assert!(cut.edge(3).removed);
    let back = cut.restore_edges(&[3]).unwrap();
    assert_eq!(back.edges(), t.edges());
    assert_eq!(cut.remove_edges(&[3]).unwrap_err(), Error::AlreadyRemoved(3));
    assert_eq!(t.restore_edges(&[3]).unwrap_err(), Error::NotRemoved(3));
}

#[test]
fn removing_a_triangle_updates_counts() {
    let t = rhombus(4);
    let before = t.topology().unwrap();
    let ids = [
        t.lattice_edge((2, 2), (3, 2)).unwrap(),
        t.lattice_edge((3, 2), (2, 3)).unwrap(),
        t.lattice_edge((2, 3), (2, 2)).unwrap(),
    ];
    let (cut, _) = t.remove_edges(&ids).unwrap();
    let after = cut.topology().unwrap();
    assert_eq!(after.e, before.e - 3);
    // the triangle and its three neighbours lose an edge
    assert_eq!(after.f, before.f - 4);
    assert_eq!(after.g, 1);
}

#[test]
fn disconnection_is_a_flag() {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
    let t = Truss::new(p, vec![Edge::new(0, 1), Edge::new(1, 2)], None).unwrap();
    let (_, flags) = t.remove_edges(&[1]).unwrap();
    assert!(flags.disconnected);
}

#[test]
fn construction_errors() {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    assert_eq!(
        Truss::new(p.clone(), vec![Edge::new(0, 2)], None).unwrap_err(),
        Error::MissingVertex { edge: 0, vertex: 2 }
    );
    assert_eq!(Truss::new(p.clone(), vec![Edge::new(1, 1)], None).unwrap_err(), Error::SelfLoop { edge: 0, vertex: 1 });
    assert_eq!(
        Truss::new(p.clone(), vec![Edge::new(0, 1), Edge::new(1, 0)], None).unwrap_err(),
        Error::DuplicateEdge { edge: 1, other: 0 }
    );
    let mut doubled = Edge::new(1, 0);
    doubled.bigon = true;
    assert!(Truss::new(p, vec![Edge::new(0, 1), doubled], None).is_ok());
}

#[test]
fn inferred_faces_match_stored() {
    let t = rhombus(2);
    let stored: BTreeSet<[usize; 3]> = t.faces().unwrap().into_iter().map(sorted).collect();
    let bare = Truss::new(t.vertices().to_vec(), t.edges().to_vec(), None).unwrap();
    let inferred: BTreeSet<[usize; 3]> = bare.faces().unwrap().into_iter().map(sorted).collect();
    assert_eq!(stored, inferred);
}

fn sorted(mut f: [usize; 3]) -> [usize; 3] {
    f.sort();
    f
}

#[test]
fn crossing_edges_refuse_inference() {
    let p = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
    let edges = vec![Edge::new(0, 1), Edge::new(2, 3), Edge::new(0, 2), Edge::new(1, 3)];
    let t = Truss::new(p, edges, None).unwrap();
    assert!(matches!(t.faces().unwrap_err(), Error::CrossingEdges(_, _)));
}

#[test]
fn periodic_tilings() {
    let cell: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell { k: 2, holes: vec![] }).unwrap();
    let one = lattice::gen_periodic(&cell, 1).unwrap();
    assert_eq!(one.num_vertices(), cell.num_vertices());
    assert_eq!(one.num_edges(), cell.num_edges());
    let two = lattice::gen_periodic(&cell, 2).unwrap();
    let direct = rhombus(4);
    assert_eq!(two.num_vertices(), direct.num_vertices());
    assert_eq!(two.num_edges(), direct.num_edges());

    let holed: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell {
        k: 5,
        holes: vec![HoleSpec::HexagonCenters { centers: vec![(3, 3)] }],
    })
    .unwrap();
    assert_eq!(lattice::gen_periodic(&holed, 3).unwrap().topology().unwrap().g, 9);
}

#[test]
fn misaligned_cell_rejected() {
    let t: Truss<f64> = lattice::gen_patch(&PatchSpec::Hexagon { side: 2 }).unwrap();
    assert_eq!(lattice::gen_periodic(&t, 2).unwrap_err(), Error::CellMisaligned);
}
