//! Prescribed-length problems: curvature atoms, peel orders and planar development.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;
use crate::truss::{orient_faces, Mesh, Truss};

/// Raw cosines further than this outside [-1, 1] are rejected rather than clamped.
const CLAMP_SLACK: f64 = 1e-12;

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Side lengths of a face-based complex, keyed by vertex pair.
fn length_table<T: Real>(t: &Truss<T>) -> HashMap<(usize, usize), T> {
    t.active_edges().into_iter().map(|id| (t.edge(id).key(), t.length(id))).collect()
}

/// Angle opposite side `a` in a triangle with sides `a`, `b`, `c`.
pub fn law_of_cosines<T: Real>(a: T, b: T, c: T) -> Option<T> {
    let raw = (b * b + c * c - a * a) / (T::lit(2.0) * b * c);
    let slack = T::lit(CLAMP_SLACK);
    if raw > T::one() + slack || raw < -T::one() - slack || !raw.is_finite() {
        return None;
    }
    Some(raw.max(-T::one()).min(T::one()).acos())
}

fn strict_triangle<T: Real>(a: T, b: T, c: T) -> bool {
    a < b + c && b < c + a && c < a + b
}

/// Corner angles of face `f`, in the order of its vertices.
fn face_angles<T: Real>(f: [usize; 3], fi: usize, len: &HashMap<(usize, usize), T>) -> Result<[T; 3]> {
    let side = |a: usize, b: usize| len.get(&pair(a, b)).copied().ok_or(Error::DegenerateFace(fi));
    let (l01, l12, l20) = (side(f[0], f[1])?, side(f[1], f[2])?, side(f[2], f[0])?);
    if !strict_triangle(l01, l12, l20) {
        return Err(Error::DegenerateFace(fi));
    }
    let a0 = law_of_cosines(l12, l01, l20).ok_or(Error::DegenerateFace(fi))?;
    let a1 = law_of_cosines(l20, l01, l12).ok_or(Error::DegenerateFace(fi))?;
    let a2 = law_of_cosines(l01, l12, l20).ok_or(Error::DegenerateFace(fi))?;
    Ok([a0, a1, a2])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport<T> {
    /// `2 pi` minus the angle sum, per interior vertex.
    pub atoms: BTreeMap<usize, T>,
    pub max_abs: T,
    pub flat: bool,
}

/// Angle sums at every vertex touched by a face.
fn angle_sums<T: Real>(faces: &[[usize; 3]], len: &HashMap<(usize, usize), T>) -> Result<BTreeMap<usize, T>> {
    let mut sums = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        let ang = face_angles(*f, fi, len)?;
        for k in 0..3 {
            *sums.entry(f[k]).or_insert_with(T::zero) += ang[k];
        }
    }
    Ok(sums)
}

pub fn curvature_atoms<T: Real>(t: &Truss<T>, tol: T) -> Result<CurvatureReport<T>> {
    let faces = t.faces()?;
    if faces.is_empty() {
        return Err(Error::NoFaces);
    }
    let len = length_table(t);
    let sums = angle_sums(&faces, &len)?;
    let interior = t.interior_vertices()?;
    let two_pi = T::two_pi();
    let atoms: BTreeMap<usize, T> = interior.iter().map(|v| (*v, two_pi - sums[v])).collect();
    let max_abs = atoms.values().fold(T::zero(), |m, k| m.max(k.abs()));
    Ok(CurvatureReport { atoms, max_abs, flat: max_abs <= tol })
}

/// Sum over the single boundary loop of `pi` minus the corner angle sum.
pub fn turning_angle_sum<T: Real>(t: &Truss<T>) -> Result<T> {
    let topo = t.topology()?;
    if topo.boundary_loops.len() != 1 {
        return Err(Error::NotSimplyBounded);
    }
    let faces = t.faces()?;
    let sums = angle_sums(&faces, &length_table(t))?;
    Ok(topo.boundary_loops[0].iter().fold(T::zero(), |acc, v| acc + T::pi() - sums[v]))
}

/// Face indices in attachment order: each face after the first meets the union
/// of its predecessors in one edge (bringing a new vertex) or in two edges.
pub fn peel_order(faces: &[[usize; 3]]) -> Result<Vec<usize>> {
    if faces.is_empty() {
        return Err(Error::NoFaces);
    }
    check_disk(faces)?;
    let nv = faces.iter().flat_map(|f| f.iter()).max().copied().unwrap_or(0) + 1;
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for f in faces {
        for k in 0..3 {
            *count.entry(pair(f[k], f[(k + 1) % 3])).or_default() += 1;
        }
    }
    let mut bcount = vec![0usize; nv];
    for (&(a, b), &c) in &count {
        if c == 1 {
            bcount[a] += 1;
            bcount[b] += 1;
        }
    }
    let mut present = vec![true; faces.len()];
    let mut removed = Vec::with_capacity(faces.len());
    for _ in 1..faces.len() {
        let boundary_sides = |f: &[usize; 3], count: &HashMap<(usize, usize), usize>| -> Vec<usize> {
            (0..3).filter(|&k| count[&pair(f[k], f[(k + 1) % 3])] == 1).collect()
        };
        let mut pick = None;
        for (fi, f) in faces.iter().enumerate() {
            if present[fi] && boundary_sides(f, &count).len() == 2 {
                pick = Some(fi);
                break;
            }
        }
        if pick.is_none() {
            for (fi, f) in faces.iter().enumerate() {
                if !present[fi] {
                    continue;
                }
                let bs = boundary_sides(f, &count);
                if bs.len() == 1 && bcount[f[(bs[0] + 2) % 3]] == 0 {
                    pick = Some(fi);
                    break;
                }
            }
        }
        let fi = pick.ok_or(Error::NotDisk)?;
        present[fi] = false;
        removed.push(fi);
        let f = faces[fi];
        for k in 0..3 {
            let p = pair(f[k], f[(k + 1) % 3]);
            let c = count.get_mut(&p).unwrap();
            if *c == 1 {
                bcount[p.0] -= 1;
                bcount[p.1] -= 1;
            }
            *c -= 1;
            if *c == 1 {
                bcount[p.0] += 1;
                bcount[p.1] += 1;
            }
        }
    }
    let last = (0..faces.len()).find(|&i| present[i]).ok_or(Error::NotDisk)?;
    removed.push(last);
    removed.reverse();
    Ok(removed)
}

fn check_disk(faces: &[[usize; 3]]) -> Result<()> {
    let nv = faces.iter().flat_map(|f| f.iter()).max().copied().unwrap_or(0) + 1;
    let mut used = vec![false; nv];
    let mut pairs = std::collections::BTreeSet::new();
    for f in faces {
        for k in 0..3 {
            used[f[k]] = true;
            pairs.insert(pair(f[k], f[(k + 1) % 3]));
        }
    }
    let v = used.iter().filter(|u| **u).count() as i64;
    let chi = faces.len() as i64 - pairs.len() as i64 + v;
    let mut oriented = faces.to_vec();
    let dummy = vec![Point::<f64>::origin(); nv];
    orient_faces(&mut oriented, &dummy);
    let mesh = Mesh::new(nv, oriented).map_err(|_| Error::NotDisk)?;
    let loops = mesh.boundary_loops().map_err(|_| Error::NotDisk)?;
    if chi != 1 || loops.len() != 1 {
        return Err(Error::NotDisk);
    }
    for vtx in 0..nv {
        if used[vtx] {
            mesh.link(vtx).map_err(|_| Error::NotDisk)?;
        }
    }
    Ok(())
}

/// Pins edge `edge` to the positive x-axis starting at the origin; the first
/// face on it lies above the axis unless `flip`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub edge: usize,
    pub flip: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Development<T> {
    pub positions: Vec<Point<T>>,
    /// Attachment order as indices into the truss faces.
    pub order: Vec<usize>,
    /// Largest disagreement found at two-edge attachments.
    pub max_mismatch: T,
}

/// Third corner `r` of a triangle with `p -> q -> r` counter-clockwise.
fn apex<T: Real>(p: Point<T>, q: Point<T>, lpq: T, lpr: T, lqr: T) -> Point<T> {
    let d = q.sub(p);
    let base = d.norm();
    let u = d.scale(T::one() / base);
    let perp = Point::new(-u.y, u.x);
    let x = (lpq * lpq + lpr * lpr - lqr * lqr) / (T::lit(2.0) * lpq);
    let y = (lpr * lpr - x * x).max(T::zero()).sqrt();
    // rescale along the placed base in case it differs slightly from lpq
    p.add(u.scale(x * base / lpq)).add(perp.scale(y))
}

/// Places a flat length-prescribed triangulated disk in the plane, face by face.
pub fn develop<T: Real>(t: &Truss<T>, seed: Option<Seed>, tol: T) -> Result<Development<T>> {
    let faces = t.faces()?;
    if faces.is_empty() {
        return Err(Error::NoFaces);
    }
    let len = length_table(t);
    // validates every face before any placement
    for (fi, f) in faces.iter().enumerate() {
        face_angles(*f, fi, &len)?;
    }
    let order = peel_order(&faces)?;
    let curv = curvature_atoms(t, tol)?;
    if let Some((v, k)) = curv.atoms.iter().find(|(_, k)| k.abs() > tol) {
        return Err(Error::NotFlat { vertex: *v, curvature: k.as_f64() });
    }
    let mut oriented = faces.clone();
    let dummy = vec![Point::<f64>::origin(); t.num_vertices()];
    orient_faces(&mut oriented, &dummy);
    let l = |a: usize, b: usize| len[&pair(a, b)];
    let n = t.num_vertices();
    let mut pos: Vec<Option<Point<T>>> = vec![None; n];
    let first = oriented[order[0]];
    pos[first[0]] = Some(Point::origin());
    pos[first[1]] = Some(Point::new(l(first[0], first[1]), T::zero()));
    let p2 = apex(
        pos[first[0]].unwrap(),
        pos[first[1]].unwrap(),
        l(first[0], first[1]),
        l(first[0], first[2]),
        l(first[1], first[2]),
    );
    pos[first[2]] = Some(p2);
    let mut mismatches: Vec<(usize, T)> = Vec::new();
    for &fi in &order[1..] {
        let f = oriented[fi];
        let missing: Vec<usize> = (0..3).filter(|&k| pos[f[k]].is_none()).collect();
        match missing.len() {
            1 => {
                let k = missing[0];
                let (p, q, r) = (f[(k + 1) % 3], f[(k + 2) % 3], f[k]);
                let at = apex(pos[p].unwrap(), pos[q].unwrap(), l(p, q), l(p, r), l(q, r));
                pos[r] = Some(at);
            }
            0 => {
                let mut worst = T::zero();
                for k in 0..3 {
                    let (p, q, r) = (f[(k + 1) % 3], f[(k + 2) % 3], f[k]);
                    let cand = apex(pos[p].unwrap(), pos[q].unwrap(), l(p, q), l(p, r), l(q, r));
                    worst = worst.max(cand.dist(pos[r].unwrap()));
                }
                mismatches.push((fi, worst));
            }
            _ => return Err(Error::NotDisk),
        }
    }
    let mut positions: Vec<Point<T>> = Vec::with_capacity(n);
    for p in &pos {
        positions.push(p.ok_or(Error::NotDisk)?);
    }
    let diam = diameter(&positions);
    let mut max_mismatch = T::zero();
    for (fi, m) in &mismatches {
        if *m > tol * diam.max(T::machine_eps()) {
            return Err(Error::PlacementMismatch { face: *fi, mismatch: m.as_f64() });
        }
        max_mismatch = max_mismatch.max(*m);
    }
    if let Some(s) = seed {
        positions = apply_seed(t, &faces, positions, s)?;
    }
    Ok(Development { positions, order, max_mismatch })
}

fn apply_seed<T: Real>(t: &Truss<T>, faces: &[[usize; 3]], pos: Vec<Point<T>>, s: Seed) -> Result<Vec<Point<T>>> {
    if s.edge >= t.num_edges() || t.edge(s.edge).removed {
        return Err(Error::UnknownEdge(s.edge));
    }
    let e = t.edge(s.edge);
    let origin = pos[e.a];
    let theta = pos[e.b].sub(origin).angle();
    let mut out: Vec<Point<T>> = pos.iter().map(|p| p.sub(origin).rotate(-theta)).collect();
    if let Some(f) = faces.iter().find(|f| f.contains(&e.a) && f.contains(&e.b)) {
        let third = f.iter().copied().find(|v| *v != e.a && *v != e.b).unwrap();
        let above = out[third].y > T::zero();
        if above == s.flip {
            for p in out.iter_mut() {
                p.y = -p.y;
            }
        }
    }
    Ok(out)
}

pub fn diameter<T: Real>(pos: &[Point<T>]) -> T {
    let mut d = T::zero();
    for (i, p) in pos.iter().enumerate() {
        for q in &pos[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Polynomial in squared spoke lengths `p` and squared rim lengths `q` that
/// vanishes when a 3-star with those lengths lies flat in the plane.
pub fn three_star_poly<T: Real>(p: [T; 3], q12: T, q23: T, q31: T) -> T {
    let two = T::lit(2.0);
    let a = p[0] + p[1] - q12;
    let b = p[1] + p[2] - q23;
    let c = p[2] + p[0] - q31;
    two * p[2] * a * a + two * p[0] * b * b + two * p[1] * c * c - two * a * b * c - T::lit(8.0) * p[0] * p[1] * p[2]
}
