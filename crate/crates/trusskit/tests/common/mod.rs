#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use trusskit::btp::BtpNode;
use trusskit::geometry::Point;
use trusskit::lattice::{self, HoleSpec, Tri};
use trusskit::truss::{Edge, Truss};

pub fn neighbours(t: &Tri) -> [Tri; 3] {
    if t.up {
        [Tri::down(t.a, t.b), Tri::down(t.a - 1, t.b), Tri::down(t.a, t.b - 1)]
    } else {
        [Tri::up(t.a, t.b), Tri::up(t.a + 1, t.b), Tri::up(t.a, t.b + 1)]
    }
}

/// Grows a random triangulated disk of `size` lattice triangles.
pub fn random_disk(rng: &mut ChaCha8Rng, size: usize) -> BTreeSet<Tri> {
    let mut set = BTreeSet::new();
    set.insert(Tri::up(0, 0));
    let mut stalls = 0;
    while set.len() < size && stalls < 10_000 {
        let frontier: Vec<Tri> = set
            .iter()
            .flat_map(neighbours)
            .filter(|n| !set.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cand = frontier[rng.gen_range(0..frontier.len())];
        set.insert(cand);
        if is_disk(&set) {
            stalls = 0;
        } else {
            set.remove(&cand);
            stalls += 1;
        }
    }
    set
}

pub fn is_disk(set: &BTreeSet<Tri>) -> bool {
    match lattice::truss_from_triangles::<f64>(set).and_then(|t| t.topology()) {
        Ok(top) => top.chi == 1 && top.boundary_loops.len() == 1,
        Err(_) => false,
    }
}

/// Same combinatorics with every vertex moved by up to `amount` in each coordinate.
pub fn jitter(t: &Truss<f64>, rng: &mut ChaCha8Rng, amount: f64) -> Truss<f64> {
    let pos: Vec<Point<f64>> = t
        .vertices()
        .iter()
        .map(|p| Point::new(p.x + rng.gen_range(-amount..amount), p.y + rng.gen_range(-amount..amount)))
        .collect();
    let edges: Vec<Edge<f64>> = t.edges().iter().map(|e| Edge::new(e.a, e.b)).collect();
    Truss::new(pos, edges, t.stored_faces().map(|f| f.to_vec())).unwrap()
}

pub fn random_jittered_disk(rng: &mut ChaCha8Rng, size: usize) -> Truss<f64> {
    let tris = random_disk(rng, size);
    let t = lattice::truss_from_triangles::<f64>(&tris).unwrap();
    jitter(&t, rng, 0.15)
}

/// Cell of side `k` with `holes` random hexagon holes.
pub fn random_holed(rng: &mut ChaCha8Rng, k: usize, holes: usize) -> (Truss<f64>, usize) {
    loop {
        let centers: Vec<(i64, i64)> =
            (0..holes).map(|_| (rng.gen_range(2..k as i64), rng.gen_range(2..k as i64))).collect();
        let spec = vec![HoleSpec::HexagonCenters { centers }];
        if let Ok((tris, _)) = lattice::cell_triangles(k, &spec) {
            let t = lattice::truss_from_triangles::<f64>(&tris).unwrap();
            return (jitter(&t, rng, 0.1), holes);
        }
    }
}

/// Smallest max-distance between `a` and `b` over proper and improper rigid motions.
pub fn procrustes(a: &[Point<f64>], b: &[Point<f64>]) -> f64 {
    let centroid = |p: &[Point<f64>]| {
        let n = p.len() as f64;
        p.iter().fold(Point::origin(), |s, q| s.add(*q)).scale(1.0 / n)
    };
    let ca = centroid(a);
    let cb = centroid(b);
    let mut best = f64::INFINITY;
    for reflect in [false, true] {
        let bb: Vec<Point<f64>> = b
            .iter()
            .map(|p| {
                let q = p.sub(cb);
                if reflect {
                    Point::new(q.x, -q.y)
                } else {
                    q
                }
            })
            .collect();
        let aa: Vec<Point<f64>> = a.iter().map(|p| p.sub(ca)).collect();
        let (mut s, mut c) = (0.0, 0.0);
        for (p, q) in aa.iter().zip(&bb) {
            c += p.dot(*q);
            s += q.cross(*p);
        }
        let th = s.atan2(c);
        let worst = aa.iter().zip(&bb).map(|(p, q)| q.rotate(th).dist(*p)).fold(0.0, f64::max);
        best = best.min(worst);
    }
    best
}

fn map_points(node: &BtpNode<f64>, f: &dyn Fn(Point<f64>) -> Point<f64>) -> BtpNode<f64> {
    match node {
        BtpNode::Segment { a, b } => BtpNode::Segment { a: f(*a), b: f(*b) },
        BtpNode::Bigon { s, t, pins } => {
            BtpNode::Bigon { s: Box::new(map_points(s, f)), t: Box::new(map_points(t, f)), pins: *pins }
        }
        BtpNode::Triangle { parts, ends } => {
            BtpNode::Triangle { parts: parts.iter().map(|p| map_points(p, f)).collect(), ends: *ends }
        }
        BtpNode::Prism { p, q, legs, p_anchor, q_anchor, leg_ends } => BtpNode::Prism {
            p: Box::new(map_points(p, f)),
            q: Box::new(map_points(q, f)),
            legs: legs.iter().map(|l| map_points(l, f)).collect(),
            p_anchor: *p_anchor,
            q_anchor: *q_anchor,
            leg_ends: *leg_ends,
        },
        BtpNode::Pin { t, v1, v2 } => BtpNode::Pin { t: Box::new(map_points(t, f)), v1: *v1, v2: *v2 },
    }
}

/// Similarity of the plane sending `p0 -> q0` and `p1 -> q1`, applied to the tree.
pub fn place(node: &BtpNode<f64>, p0: Point<f64>, p1: Point<f64>, q0: Point<f64>, q1: Point<f64>) -> BtpNode<f64> {
    let d = p1.sub(p0);
    let e = q1.sub(q0);
    let den = d.dot(d);
    // complex ratio e / d
    let (ar, ai) = ((e.x * d.x + e.y * d.y) / den, (e.y * d.x - e.x * d.y) / den);
    let f = move |z: Point<f64>| {
        let w = z.sub(p0);
        Point::new(ar * w.x - ai * w.y, ar * w.y + ai * w.x).add(q0)
    };
    map_points(node, &f)
}

fn positions(node: &BtpNode<f64>) -> Vec<Point<f64>> {
    trusskit::btp::assembled_positions(node).unwrap()
}

/// Two vertices with well separated positions.
fn two_distinct(rng: &mut ChaCha8Rng, pos: &[Point<f64>]) -> (usize, usize) {
    loop {
        let a = rng.gen_range(0..pos.len());
        let b = rng.gen_range(0..pos.len());
        if a != b && pos[a].dist(pos[b]) > 0.2 {
            return (a, b);
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point<f64> {
    Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn spread_triple(rng: &mut ChaCha8Rng) -> [Point<f64>; 3] {
    loop {
        let z = [random_point(rng), random_point(rng), random_point(rng)];
        let area = (z[1].sub(z[0])).cross(z[2].sub(z[0])).abs();
        if area > 0.5 && z[0].dist(z[1]) > 0.5 && z[1].dist(z[2]) > 0.5 && z[2].dist(z[0]) > 0.5 {
            return z;
        }
    }
}

/// Random construction tree of bounded depth with generic geometry.
pub fn random_btp(rng: &mut ChaCha8Rng, depth: usize) -> BtpNode<f64> {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..5) };
    match choice {
        0 => loop {
            let (a, b) = (random_point(rng), random_point(rng));
            if a.dist(b) > 0.5 {
                return BtpNode::Segment { a, b };
            }
        },
        1 => {
            let s = random_btp(rng, depth - 1);
            let ps = positions(&s);
            let (s0, s1) = two_distinct(rng, &ps);
            let t = random_btp(rng, depth - 1);
            let pt = positions(&t);
            let (t0, t1) = two_distinct(rng, &pt);
            let t = place(&t, pt[t0], pt[t1], ps[s0], ps[s1]);
            BtpNode::Bigon { s: Box::new(s), t: Box::new(t), pins: [[s0, t0], [s1, t1]] }
        }
        2 => {
            let z = spread_triple(rng);
            let mut parts = Vec::new();
            let mut ends = [[0; 2]; 3];
            for i in 0..3 {
                let p = random_btp(rng, depth - 1);
                let pp = positions(&p);
                let (a, b) = two_distinct(rng, &pp);
                parts.push(place(&p, pp[a], pp[b], z[i], z[(i + 1) % 3]));
                ends[i] = [a, b];
            }
            BtpNode::Triangle { parts, ends }
        }
        3 => {
            let p = random_btp(rng, depth - 1);
            let q = random_btp(rng, depth - 1);
            let (pp, pq) = (positions(&p), positions(&q));
            if pp.len() < 3 || pq.len() < 3 {
                return random_btp(rng, depth);
            }
            let pick3 = |rng: &mut ChaCha8Rng, pos: &[Point<f64>]| loop {
                let i = [rng.gen_range(0..pos.len()), rng.gen_range(0..pos.len()), rng.gen_range(0..pos.len())];
                let ok = (0..3).all(|k| pos[i[k]].dist(pos[i[(k + 1) % 3]]) > 0.2);
                let area = pos[i[1]].sub(pos[i[0]]).cross(pos[i[2]].sub(pos[i[0]])).abs();
                if ok && area > 0.05 {
                    return i;
                }
            };
            let pa = pick3(rng, &pp);
            let qa = pick3(rng, &pq);
            // move q off to a random place with a random similarity
            let off = Point::new(rng.gen_range(3.0..5.0), rng.gen_range(-1.0..1.0));
            let q = place(&q, pq[qa[0]], pq[qa[1]], pq[qa[0]].add(off), pq[qa[1]].add(off).add(random_point(rng).scale(0.2)));
            let pq = positions(&q);
            let mut legs = Vec::new();
            let mut leg_ends = [[0; 2]; 3];
            for i in 0..3 {
                let l = random_btp(rng, depth - 1);
                let pl = positions(&l);
                let (a, b) = two_distinct(rng, &pl);
                legs.push(place(&l, pl[a], pl[b], pp[pa[i]], pq[qa[i]]));
                leg_ends[i] = [a, b];
            }
            BtpNode::Prism { p: Box::new(p), q: Box::new(q), legs, p_anchor: pa, q_anchor: qa, leg_ends }
        }
        _ => {
            // a bigon of a piece with its own copy, then one more coincident pair pinned
            let s = random_btp(rng, depth - 1);
            let ps = positions(&s);
            if ps.len() < 3 {
                return random_btp(rng, depth);
            }
            let (s0, s1) = two_distinct(rng, &ps);
            let n = ps.len();
            let third = loop {
                let v = rng.gen_range(0..n);
                if v != s0 && v != s1 && ps[v].dist(ps[s0]) > 0.2 && ps[v].dist(ps[s1]) > 0.2 {
                    break v;
                }
            };
            let bigon = BtpNode::Bigon { s: Box::new(s.clone()), t: Box::new(s), pins: [[s0, s0], [s1, s1]] };
            // copy vertices follow the originals with the two pinned ones merged away
            let copy_index = |v: usize| n + v - [s0, s1].iter().filter(|p| **p < v).count();
            BtpNode::Pin { t: Box::new(bigon), v1: third, v2: copy_index(third) }
        }
    }
}

pub fn rhombus(n: usize) -> Truss<f64> {
    lattice::gen_patch(&lattice::PatchSpec::Rhombus { n }).unwrap()
}

pub fn hexstar() -> Truss<f64> {
    lattice::gen_patch(&lattice::PatchSpec::Hexstar).unwrap()
}

/// Random load with zero net force and torque.
pub fn balanced_load(t: &Truss<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = 2 * t.num_vertices();
    let f = nalgebra::DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let g = trusskit::rigidity::gauge_rows(t).transpose();
    let coef = (g.transpose() * &g).try_inverse().unwrap() * (g.transpose() * &f);
    (f - g * coef).iter().copied().collect()
}
