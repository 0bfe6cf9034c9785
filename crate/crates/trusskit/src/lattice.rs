//! Patches of the triangular lattice: stars, rhombi, periodicity cells with holes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::truss::{Edge, LatticePoint, Truss};

/// Unit triangle of the lattice. `up` has corners (a,b), (a+1,b), (a,b+1);
/// the other has (a+1,b), (a+1,b+1), (a,b+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tri {
    pub a: i64,
    pub b: i64,
    pub up: bool,
}

impl Tri {
    pub fn up(a: i64, b: i64) -> Self {
        Tri { a, b, up: true }
    }

    pub fn down(a: i64, b: i64) -> Self {
        Tri { a, b, up: false }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [LatticePoint; 3] {
        let (a, b) = (self.a, self.b);
        if self.up {
            [(a, b), (a + 1, b), (a, b + 1)]
        } else {
            [(a + 1, b), (a + 1, b + 1), (a, b + 1)]
        }
    }

    pub fn translate(&self, da: i64, db: i64) -> Self {
        Tri { a: self.a + da, b: self.b + db, up: self.up }
    }

    /// The unit triangle with the given corners, if they form one.
    pub fn from_corners(p: [LatticePoint; 3]) -> Option<Tri> {
        let mut s = p;
        s.sort();
        for t in [Tri::up(s[0].0, s[0].1), Tri::down(s[0].0, s[0].1 - 1)] {
            let mut c = t.corners();
            c.sort();
            if c == s {
                return Some(t);
            }
        }
        None
    }
}

/// Lattice steps to the six neighbours, counter-clockwise from e1.
pub const DIRECTIONS: [LatticePoint; 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Hex distance between lattice points.
pub fn lattice_distance(p: LatticePoint, q: LatticePoint) -> i64 {
    let (da, db) = (p.0 - q.0, p.1 - q.1);
    (da.abs() + db.abs() + (da + db).abs()) / 2
}

/// The six triangles around a lattice point.
pub fn hexagon_triangles(c: LatticePoint) -> [Tri; 6] {
    let (a, b) = c;
    [
        Tri::up(a, b),
        Tri::down(a - 1, b),
        Tri::up(a - 1, b),
        Tri::down(a - 1, b - 1),
        Tri::up(a, b - 1),
        Tri::down(a, b - 1),
    ]
}

/// Triangles of the regular hexagon of side `p` centred at `c`.
pub fn big_hexagon_triangles(c: LatticePoint, p: i64) -> BTreeSet<Tri> {
    let mut out = BTreeSet::new();
    for a in c.0 - p - 1..=c.0 + p {
        for b in c.1 - p - 1..=c.1 + p {
            for t in [Tri::up(a, b), Tri::down(a, b)] {
                if t.corners().iter().all(|q| lattice_distance(*q, c) <= p) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

/// Triangles of the `na x nb` parallelogram with lowest corner `at`.
pub fn parallelogram_triangles(at: LatticePoint, na: usize, nb: usize) -> BTreeSet<Tri> {
    let mut out = BTreeSet::new();
    for i in 0..na as i64 {
        for j in 0..nb as i64 {
            out.insert(Tri::up(at.0 + i, at.1 + j));
            out.insert(Tri::down(at.0 + i, at.1 + j));
        }
    }
    out
}

/// Union of hexagons centred at `(k, l)`, `1 <= k, l <= n`.
pub fn rhombus_triangles(n: usize) -> BTreeSet<Tri> {
    let mut out = BTreeSet::new();
    for k in 1..=n as i64 {
        for l in 1..=n as i64 {
            out.extend(hexagon_triangles((k, l)));
        }
    }
    out
}

/// Triangles adjacent to a lattice edge.
pub fn edge_triangles(p: LatticePoint, q: LatticePoint) -> Vec<Tri> {
    let mut out = Vec::new();
    for c in [p, q] {
        for t in hexagon_triangles(c) {
            let cs = t.corners();
            if cs.contains(&p) && cs.contains(&q) && !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoleSpec {
    /// Explicit triangles.
    Triangles { triangles: Vec<Tri> },
    /// Each listed lattice edge is removed together with its two triangles.
    Edges { edges: Vec<(LatticePoint, LatticePoint)> },
    /// Unit hexagons removed around each listed centre.
    HexagonCenters { centers: Vec<LatticePoint> },
    /// `na x nb` parallelogram of unit rhombi.
    Parallelogram { at: LatticePoint, na: usize, nb: usize },
    /// Regular hexagon of side `side`.
    Hexagon { center: LatticePoint, side: usize },
}

impl HoleSpec {
    /// Connected hole footprints described by this entry.
    pub fn footprints(&self) -> Vec<BTreeSet<Tri>> {
        match self {
            HoleSpec::Triangles { triangles } => vec![triangles.iter().copied().collect()],
            HoleSpec::Edges { edges } => edges.iter().map(|(p, q)| edge_triangles(*p, *q).into_iter().collect()).collect(),
            HoleSpec::HexagonCenters { centers } => {
                centers.iter().map(|c| hexagon_triangles(*c).into_iter().collect()).collect()
            }
            HoleSpec::Parallelogram { at, na, nb } => vec![parallelogram_triangles(*at, *na, *nb)],
            HoleSpec::Hexagon { center, side } => vec![big_hexagon_triangles(*center, *side as i64)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatchSpec {
    /// One vertex with its six neighbours.
    Hexstar,
    /// `n x n` rhombus of hexagons.
    Rhombus { n: usize },
    /// `k x k` periodicity cell with holes cut out.
    Cell { k: usize, holes: Vec<HoleSpec> },
    /// `na x nb` parallelogram of unit rhombi.
    Parallelogram { na: usize, nb: usize },
    /// Regular hexagon of side `side`.
    Hexagon { side: usize },
}

pub fn vertices_of(tris: &BTreeSet<Tri>) -> BTreeSet<LatticePoint> {
    tris.iter().flat_map(|t| t.corners()).collect()
}

/// Builds a truss from lattice triangles. Vertices are ordered by row then column.
pub fn truss_from_triangles<T: Real>(tris: &BTreeSet<Tri>) -> Result<Truss<T>> {
    if tris.is_empty() {
        return Err(Error::InvalidParameter("empty patch".into()));
    }
    let mut pts: Vec<LatticePoint> = vertices_of(tris).into_iter().collect();
    pts.sort_by_key(|p| (p.1, p.0));
    let index: BTreeMap<LatticePoint, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut pairs = BTreeSet::new();
    let mut faces = Vec::with_capacity(tris.len());
    for t in tris {
        let c = t.corners().map(|p| index[&p]);
        for k in 0..3 {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            pairs.insert((a.min(b), a.max(b)));
        }
        faces.push(c);
    }
    faces.sort();
    let edges = pairs.into_iter().map(|(a, b)| Edge::new(a, b)).collect();
    Truss::from_lattice(pts, edges, Some(faces))
}

/// Triangles of a cell with its holes removed, with hole validation.
pub fn cell_triangles(k: usize, holes: &[HoleSpec]) -> Result<(BTreeSet<Tri>, Vec<BTreeSet<Tri>>)> {
    let base = rhombus_triangles(k);
    let interior: BTreeSet<LatticePoint> =
        (1..=k as i64).flat_map(|a| (1..=k as i64).map(move |b| (a, b))).collect();
    let footprints: Vec<BTreeSet<Tri>> = holes.iter().flat_map(|h| h.footprints()).collect();
    let mut used: BTreeSet<LatticePoint> = BTreeSet::new();
    let mut out = base.clone();
    for fp in &footprints {
        if fp.is_empty() || !fp.is_subset(&base) {
            return Err(Error::HoleOutOfRange);
        }
        let vs = vertices_of(fp);
        if !vs.is_subset(&interior) {
            return Err(Error::HoleTouchesBoundary);
        }
        if vs.iter().any(|v| used.contains(v)) {
            return Err(Error::OverlappingHoles);
        }
        used.extend(vs);
        for t in fp {
            out.remove(t);
        }
    }
    Ok((out, footprints))
}

pub fn gen_patch<T: Real>(spec: &PatchSpec) -> Result<Truss<T>> {
    let tris = match spec {
        PatchSpec::Hexstar => hexagon_triangles((0, 0)).into_iter().collect(),
        PatchSpec::Rhombus { n } => {
            if *n == 0 {
                return Err(Error::InvalidParameter("rhombus size must be positive".into()));
            }
            rhombus_triangles(*n)
        }
        PatchSpec::Cell { k, holes } => {
            if *k == 0 {
                return Err(Error::InvalidParameter("cell size must be positive".into()));
            }
            cell_triangles(*k, holes)?.0
        }
        PatchSpec::Parallelogram { na, nb } => {
            if *na == 0 || *nb == 0 {
                return Err(Error::InvalidParameter("parallelogram sides must be positive".into()));
            }
            parallelogram_triangles((0, 0), *na, *nb)
        }
        PatchSpec::Hexagon { side } => {
            if *side == 0 {
                return Err(Error::InvalidParameter("hexagon side must be positive".into()));
            }
            big_hexagon_triangles((0, 0), *side as i64)
        }
    };
    truss_from_triangles(&tris)
}

/// Lattice coordinates of a truss, recovered from positions when not stored.
pub fn lattice_coords<T: Real>(t: &Truss<T>) -> Result<Vec<LatticePoint>> {
    if let Some(l) = t.lattice() {
        return Ok(l.to_vec());
    }
    let h = T::lit(3.0).sqrt() * T::lit(0.5);
    let tol = T::lit(1e-9);
    t.vertices()
        .iter()
        .map(|p| {
            let b = p.y / h;
            let a = p.x - b * T::lit(0.5);
            let (ra, rb) = (a.round(), b.round());
            if (a - ra).abs() > tol || (b - rb).abs() > tol {
                return Err(Error::NotLattice);
            }
            Ok((ra.as_f64() as i64, rb.as_f64() as i64))
        })
        .collect()
}

/// Triangles of a lattice truss, from its faces.
pub fn triangles_of<T: Real>(t: &Truss<T>) -> Result<BTreeSet<Tri>> {
    let coords = lattice_coords(t)?;
    let mut out = BTreeSet::new();
    for f in t.faces()? {
        let tri = Tri::from_corners(f.map(|v| coords[v])).ok_or(Error::NotLattice)?;
        out.insert(tri);
    }
    Ok(out)
}

/// Tiles an `n x n` block of translates of a `k x k` cell by `k*e1` and `k*e2`,
/// merging the vertices and bars of overlapping boundary strips.
pub fn gen_periodic<T: Real>(cell: &Truss<T>, n: usize) -> Result<Truss<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tiling size must be positive".into()));
    }
    let coords = lattice_coords(cell)?;
    let amin = coords.iter().map(|p| p.0).min().ok_or(Error::NotLattice)?;
    let bmin = coords.iter().map(|p| p.1).min().ok_or(Error::NotLattice)?;
    let amax = coords.iter().map(|p| p.0).max().unwrap();
    let k = (amax - amin - 1).max(1) as usize;
    let shift = |p: LatticePoint| (p.0 - amin, p.1 - bmin);
    // the outer boundary must be that of the undamaged cell
    let template: Truss<T> = truss_from_triangles(&rhombus_triangles(k))?;
    let outer = |t: &Truss<T>, c: &[LatticePoint]| -> Result<BTreeSet<LatticePoint>> {
        let topo = t.topology()?;
        let mut best: Option<(usize, BTreeSet<LatticePoint>)> = None;
        for lp in topo.boundary_loops {
            let set: BTreeSet<LatticePoint> = lp.iter().map(|v| c[*v]).collect();
            if best.as_ref().map_or(true, |(n, _)| lp.len() > *n) {
                best = Some((lp.len(), set));
            }
        }
        Ok(best.map(|b| b.1).unwrap_or_default())
    };
    let tl = template.lattice().unwrap().to_vec();
    let want = outer(&template, &tl)?;
    let shifted: Vec<LatticePoint> = coords.iter().map(|p| shift(*p)).collect();
    let got = outer(cell, &shifted)?;
    if want != got {
        return Err(Error::CellMisaligned);
    }
    let mut tris = BTreeSet::new();
    for t in triangles_of(cell)? {
        let t = t.translate(-amin, -bmin);
        for i in 0..n as i64 {
            for j in 0..n as i64 {
                tris.insert(t.translate(i * k as i64, j * k as i64));
            }
        }
    }
    truss_from_triangles(&tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hexstar_counts() {
        let t: Truss<f64> = gen_patch(&PatchSpec::Hexstar).unwrap();
        let r = t.topology().unwrap();
        assert_eq!((r.v, r.e, r.f, r.v_i), (7, 12, 6, 1));
    }

    #[test]
    fn rhombus_edge_formula() {
        for n in 1..6usize {
            let t: Truss<f64> = gen_patch(&PatchSpec::Rhombus { n }).unwrap();
            assert_eq!(t.num_edges(), 3 * n * n + 8 * n + 1);
            assert_eq!(t.topology().unwrap().v_i, n * n);
        }
    }

    #[test]
    fn tri_roundtrip() {
        for t in [Tri::up(2, -1), Tri::down(-3, 4)] {
            assert_eq!(Tri::from_corners(t.corners()), Some(t));
        }
        assert_eq!(Tri::from_corners([(0, 0), (2, 0), (0, 1)]), None);
    }

    #[test]
    fn hole_touching_boundary_rejected() {
        let h = HoleSpec::HexagonCenters { centers: vec![(1, 1)] };
        assert_eq!(cell_triangles(3, &[h]).unwrap_err(), Error::HoleTouchesBoundary);
    }

    #[test]
    fn overlapping_holes_rejected() {
        let h = HoleSpec::Edges { edges: vec![((2, 2), (3, 2)), ((3, 2), (4, 2))] };
        assert_eq!(cell_triangles(5, &[h]).unwrap_err(), Error::OverlappingHoles);
    }
}
