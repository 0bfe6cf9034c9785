//! Trusses, their faces, topology counts and vertex stars.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segments_cross, signed_area2, Point};
use crate::scalar::Real;

/// Integer coordinates `(a, b)` of the lattice point `a*e1 + b*e2`.
pub type LatticePoint = (i64, i64);

pub fn lattice_to_point<T: Real>(p: LatticePoint) -> Point<T> {
    let a = T::lit(p.0 as f64);
    let b = T::lit(p.1 as f64);
    Point::new(a + b * T::lit(0.5), b * T::lit(3.0).sqrt() * T::lit(0.5))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    /// Prescribed length; when absent the distance between endpoints is used.
    pub length: Option<T>,
    pub removed: bool,
    /// Set on the later copy of a doubled bar.
    pub bigon: bool,
}

impl<T> Edge<T> {
    pub fn new(a: usize, b: usize) -> Self {
        Edge { a, b, length: None, removed: false, bigon: false }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.a.min(self.b), self.a.max(self.b))
    }

    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug)]
pub struct Truss<T> {
    vertices: Vec<Point<T>>,
    lattice: Option<Vec<LatticePoint>>,
    edges: Vec<Edge<T>>,
    faces: Option<Vec<[usize; 3]>>,
    pinned: bool,
}

/// Outcome flags of an edge removal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct RemovalReport {
    pub disconnected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub v_i: usize,
    pub v_b: usize,
    pub e_i: usize,
    pub e_b: usize,
    pub chi: i64,
    /// Number of holes.
    pub g: usize,
    pub boundary_loops: Vec<Vec<usize>>,
    pub interior_vertices: Vec<usize>,
}

/// Star neighbourhood of an interior vertex, neighbours counter-clockwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub neighbors: Vec<usize>,
    /// `radial[i]` joins the centre to `neighbors[i]`.
    pub radial: Vec<usize>,
    /// `circumferential[i]` joins `neighbors[i]` to `neighbors[i+1]`.
    pub circumferential: Vec<usize>,
}

impl<T: Real> Truss<T> {
    pub fn new(vertices: Vec<Point<T>>, edges: Vec<Edge<T>>, faces: Option<Vec<[usize; 3]>>) -> Result<Self> {
        let t = Truss { vertices, lattice: None, edges, faces, pinned: false };
        t.validate()?;
        Ok(t)
    }

    /// Builds a truss on the triangular lattice; positions derive from the integer coordinates.
    pub fn from_lattice(points: Vec<LatticePoint>, edges: Vec<Edge<T>>, faces: Option<Vec<[usize; 3]>>) -> Result<Self> {
        let vertices = points.iter().map(|p| lattice_to_point(*p)).collect();
        let mut t = Truss::new(vertices, edges, faces)?;
        t.lattice = Some(points);
        Ok(t)
    }

    /// Allows zero-length bars, which then contribute zero rows.
    pub fn with_pinned(mut self, pinned: bool) -> Self {
        self.pinned = pinned;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for (id, e) in self.edges.iter().enumerate() {
            for v in [e.a, e.b] {
                if v >= n {
                    return Err(Error::MissingVertex { edge: id, vertex: v });
                }
            }
            if e.a == e.b {
                return Err(Error::SelfLoop { edge: id, vertex: e.a });
            }
            if let Some(l) = e.length {
                if !(l > T::zero()) || !l.is_finite() {
                    return Err(Error::BadLength { edge: id });
                }
            }
            match seen.get(&e.key()) {
                Some(&other) if !e.bigon => return Err(Error::DuplicateEdge { edge: id, other }),
                Some(_) => {}
                None => {
                    seen.insert(e.key(), id);
                }
            }
        }
        if let Some(faces) = &self.faces {
            for (fi, f) in faces.iter().enumerate() {
                if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                    return Err(Error::DegenerateFaceIndex { face: fi });
                }
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    if a >= n || b >= n || !seen.contains_key(&(a.min(b), a.max(b))) {
                        return Err(Error::FaceWithoutEdge { face: fi });
                    }
                }
            }
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point<T> {
        self.vertices[i]
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<T> {
        &self.edges[id]
    }

    pub fn lattice(&self) -> Option<&[LatticePoint]> {
        self.lattice.as_deref()
    }

    pub fn stored_faces(&self) -> Option<&[[usize; 3]]> {
        self.faces.as_deref()
    }

    pub fn is_pinned(&self) -> bool {
        self.pinned
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Ids of non-removed edges, ascending.
    pub fn active_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| !self.edges[i].removed).collect()
    }

    pub fn num_active(&self) -> usize {
        self.edges.iter().filter(|e| !e.removed).count()
    }

    /// Euclidean distance between the endpoints of edge `id`.
    pub fn geometric_length(&self, id: usize) -> T {
        let e = &self.edges[id];
        self.vertices[e.a].dist(self.vertices[e.b])
    }

    /// Prescribed length if present, otherwise the geometric one.
    pub fn length(&self, id: usize) -> T {
        self.edges[id].length.unwrap_or_else(|| self.geometric_length(id))
    }

    /// First active edge joining `a` and `b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|e| !e.removed && e.key() == key)
    }

    /// Vertex id of a lattice point, if present.
    pub fn lattice_vertex(&self, p: LatticePoint) -> Option<usize> {
        self.lattice.as_ref()?.iter().position(|q| *q == p)
    }

    /// Active edge joining two lattice points.
    pub fn lattice_edge(&self, p: LatticePoint, q: LatticePoint) -> Option<usize> {
        self.edge_between(self.lattice_vertex(p)?, self.lattice_vertex(q)?)
    }

    pub fn active_neighbors(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (id, e) in self.edges.iter().enumerate() {
            if !e.removed {
                adj[e.a].push((e.b, id));
                adj[e.b].push((e.a, id));
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n <= 1 {
            return true;
        }
        let adj = self.active_neighbors();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Flags edges as removed. Disconnection is reported, not rejected.
    pub fn remove_edges(&self, ids: &[usize]) -> Result<(Truss<T>, RemovalReport)> {
        let mut t = self.clone();
        for &id in ids {
            let e = t.edges.get_mut(id).ok_or(Error::UnknownEdge(id))?;
            if e.removed {
                return Err(Error::AlreadyRemoved(id));
            }
            e.removed = true;
        }
        let report = RemovalReport { disconnected: !t.is_connected() };
        Ok((t, report))
    }

    pub fn restore_edges(&self, ids: &[usize]) -> Result<Truss<T>> {
        let mut t = self.clone();
        for &id in ids {
            let e = t.edges.get_mut(id).ok_or(Error::UnknownEdge(id))?;
            if !e.removed {
                return Err(Error::NotRemoved(id));
            }
            e.removed = false;
        }
        Ok(t)
    }

    /// Flips the removal flag of one edge.
    pub fn toggle_edge(&self, id: usize) -> Result<Truss<T>> {
        let e = self.edges.get(id).ok_or(Error::UnknownEdge(id))?;
        if e.removed {
            self.restore_edges(&[id])
        } else {
            Ok(self.remove_edges(&[id])?.0)
        }
    }

    /// Replaces prescribed lengths, one per edge id.
    pub fn with_lengths(&self, lengths: &[T]) -> Result<Truss<T>> {
        if lengths.len() != self.edges.len() {
            return Err(Error::LengthMismatch { expected: self.edges.len(), got: lengths.len() });
        }
        let mut t = self.clone();
        for (e, l) in t.edges.iter_mut().zip(lengths) {
            e.length = Some(*l);
        }
        t.validate()?;
        Ok(t)
    }

    /// Same combinatorics with new positions; lattice coordinates are dropped.
    pub fn with_positions(&self, positions: Vec<Point<T>>) -> Result<Truss<T>> {
        if positions.len() != self.vertices.len() {
            return Err(Error::LengthMismatch { expected: self.vertices.len(), got: positions.len() });
        }
        let mut t = self.clone();
        t.vertices = positions;
        t.lattice = None;
        Ok(t)
    }

    /// Triangular faces whose three sides are active, stored or inferred from the embedding.
    pub fn faces(&self) -> Result<Vec<[usize; 3]>> {
        match &self.faces {
            Some(fs) => {
                let active: BTreeSet<(usize, usize)> =
                    self.edges.iter().filter(|e| !e.removed).map(|e| e.key()).collect();
                Ok(fs
                    .iter()
                    .filter(|f| {
                        (0..3).all(|k| {
                            let (a, b) = (f[k], f[(k + 1) % 3]);
                            active.contains(&(a.min(b), a.max(b)))
                        })
                    })
                    .copied()
                    .collect())
            }
            None => self.infer_faces(),
        }
    }

    /// Traces the bounded triangular faces of the straight-line embedding.
    pub fn infer_faces(&self) -> Result<Vec<[usize; 3]>> {
        let tol = T::lit(1e-12) * self.diameter().max(T::one());
        let active = self.active_edges();
        for (i, &p) in active.iter().enumerate() {
            let ep = &self.edges[p];
            for &q in &active[i + 1..] {
                let eq = &self.edges[q];
                if ep.key() == eq.key() {
                    continue;
                }
                let shared = ep.a == eq.a || ep.a == eq.b || ep.b == eq.a || ep.b == eq.b;
                let (a, b, c, d) = (
                    self.vertices[ep.a],
                    self.vertices[ep.b],
                    self.vertices[eq.a],
                    self.vertices[eq.b],
                );
                if !shared && segments_cross(a, b, c, d, tol) {
                    return Err(Error::CrossingEdges(p, q));
                }
                if shared {
                    // collinear overlap of edges sharing an endpoint
                    let (s, u, w) = if ep.a == eq.a {
                        (a, b, d)
                    } else if ep.a == eq.b {
                        (a, b, c)
                    } else if ep.b == eq.a {
                        (b, a, d)
                    } else {
                        (b, a, c)
                    };
                    let (du, dw) = (u.sub(s), w.sub(s));
                    if du.cross(dw).abs() <= tol * du.norm().max(dw.norm()) && du.dot(dw) > T::zero() {
                        return Err(Error::CrossingEdges(p, q));
                    }
                }
            }
        }
        let n = self.vertices.len();
        let mut rot: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pairs = BTreeSet::new();
        for &id in &active {
            pairs.insert(self.edges[id].key());
        }
        for &(a, b) in &pairs {
            rot[a].push(b);
            rot[b].push(a);
        }
        for (v, nb) in rot.iter_mut().enumerate() {
            let c = self.vertices[v];
            nb.sort_by(|&p, &q| {
                let ap = self.vertices[p].sub(c).angle();
                let aq = self.vertices[q].sub(c).angle();
                ap.partial_cmp(&aq).unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = Vec::new();
        for &(a, b) in &pairs {
            for (u0, v0) in [(a, b), (b, a)] {
                if visited.contains(&(u0, v0)) {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut u, mut v) = (u0, v0);
                loop {
                    visited.insert((u, v));
                    cycle.push(u);
                    let nb = &rot[v];
                    let pos = nb.iter().position(|&w| w == u).expect("twin present");
                    let w = nb[(pos + nb.len() - 1) % nb.len()];
                    u = v;
                    v = w;
                    if (u, v) == (u0, v0) || cycle.len() > pairs.len() * 2 + 2 {
                        break;
                    }
                }
                if cycle.len() == 3 {
                    let (p, q, r) = (self.vertices[cycle[0]], self.vertices[cycle[1]], self.vertices[cycle[2]]);
                    if signed_area2(p, q, r) > T::zero() {
                        faces.push([cycle[0], cycle[1], cycle[2]]);
                    }
                }
            }
        }
        faces.sort();
        Ok(faces)
    }

    pub fn diameter(&self) -> T {
        let mut lo = Point::new(T::max_value().unwrap(), T::max_value().unwrap());
        let mut hi = Point::new(T::min_value().unwrap(), T::min_value().unwrap());
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if self.vertices.is_empty() {
            T::zero()
        } else {
            hi.dist(lo)
        }
    }

    pub(crate) fn mesh(&self) -> Result<Mesh> {
        let mut faces = self.faces()?;
        orient_faces(&mut faces, &self.vertices);
        Mesh::new(self.vertices.len(), faces)
    }

    pub fn topology(&self) -> Result<TopologyReport> {
        let mesh = self.mesh()?;
        let adj = self.active_neighbors();
        let e = self.num_active();
        let mut e_i = 0;
        for id in self.active_edges() {
            if mesh.pair_faces.get(&self.edges[id].key()).map_or(0, |f| f.len()) == 2 {
                e_i += 1;
            }
        }
        let mut interior = Vec::new();
        for v in 0..self.vertices.len() {
            if let Link::Cycle(cyc) = mesh.link(v)? {
                if adj[v].iter().all(|(w, _)| cyc.contains(w)) {
                    interior.push(v);
                }
            }
        }
        let loops = mesh.boundary_loops()?;
        let v = self.vertices.len();
        let f = mesh.faces.len();
        Ok(TopologyReport {
            v,
            e,
            f,
            v_i: interior.len(),
            v_b: v - interior.len(),
            e_i,
            e_b: e - e_i,
            chi: f as i64 - e as i64 + v as i64,
            g: loops.len().saturating_sub(1),
            boundary_loops: loops,
            interior_vertices: interior,
        })
    }

    /// Interior vertex ids, ascending.
    pub fn interior_vertices(&self) -> Result<Vec<usize>> {
        Ok(self.topology()?.interior_vertices)
    }

    pub fn star_of(&self, v: usize) -> Result<Star> {
        Ok(self.stars_of(&[v])?.pop().expect("one star"))
    }

    /// Stars of several vertices, sharing one face traversal.
    pub fn stars_of(&self, vs: &[usize]) -> Result<Vec<Star>> {
        let mesh = self.mesh()?;
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for id in self.active_edges() {
            index.entry(self.edges[id].key()).or_insert(id);
        }
        let lookup = |a: usize, b: usize| index.get(&(a.min(b), a.max(b))).copied();
        let mut out = Vec::with_capacity(vs.len());
        for &v in vs {
            if v >= self.vertices.len() {
                return Err(Error::UnknownVertex(v));
            }
            let mut cyc = match mesh.link(v)? {
                Link::Cycle(c) => c,
                _ => return Err(Error::NotInterior(v)),
            };
            let c = self.vertices[v];
            let mut area = T::zero();
            for i in 0..cyc.len() {
                let p = self.vertices[cyc[i]];
                let q = self.vertices[cyc[(i + 1) % cyc.len()]];
                area += signed_area2(c, p, q);
            }
            if area < T::zero() {
                cyc.reverse();
            }
            let k = cyc.len();
            let mut radial = Vec::with_capacity(k);
            let mut circ = Vec::with_capacity(k);
            for i in 0..k {
                radial.push(lookup(v, cyc[i]).ok_or(Error::NotInterior(v))?);
                circ.push(lookup(cyc[i], cyc[(i + 1) % k]).ok_or(Error::NotInterior(v))?);
            }
            out.push(Star { center: v, neighbors: cyc, radial, circumferential: circ });
        }
        Ok(out)
    }
}

/// Orients faces consistently across shared edges, then makes each connected
/// piece counter-clockwise with respect to `pos` in total signed area.
pub(crate) fn orient_faces<T: Real>(faces: &mut [[usize; 3]], pos: &[Point<T>]) {
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_pair.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let has_directed = |f: &[usize; 3], a: usize, b: usize| (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b);
    let mut seen = vec![false; faces.len()];
    for root in 0..faces.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root];
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(fi) = queue.pop_front() {
            let f = faces[fi];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                for &g in &by_pair[&(a.min(b), a.max(b))] {
                    if seen[g] {
                        continue;
                    }
                    if has_directed(&faces[g], a, b) {
                        faces[g].swap(1, 2);
                    }
                    seen[g] = true;
                    comp.push(g);
                    queue.push_back(g);
                }
            }
        }
        let area = comp.iter().fold(T::zero(), |acc, &fi| {
            let f = faces[fi];
            acc + signed_area2(pos[f[0]], pos[f[1]], pos[f[2]])
        });
        if area < T::zero() {
            for &fi in &comp {
                faces[fi].swap(1, 2);
            }
        }
    }
}

pub(crate) enum Link {
    Empty,
    Path,
    Cycle(Vec<usize>),
}

/// Face incidence structure of a 2-complex.
pub(crate) struct Mesh {
    pub faces: Vec<[usize; 3]>,
    pub pair_faces: HashMap<(usize, usize), Vec<usize>>,
    pub vert_faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(n: usize, faces: Vec<[usize; 3]>) -> Result<Mesh> {
        let mut pair_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut vert_faces = vec![Vec::new(); n];
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let list = pair_faces.entry((a.min(b), a.max(b))).or_default();
                list.push(fi);
                if list.len() > 2 {
                    return Err(Error::NonManifoldEdge { a: a.min(b), b: a.max(b) });
                }
                vert_faces[f[k]].push(fi);
            }
        }
        Ok(Mesh { faces, pair_faces, vert_faces })
    }

    /// Link of `v`, ordered along the path or cycle.
    pub fn link(&self, v: usize) -> Result<Link> {
        let fs = &self.vert_faces[v];
        if fs.is_empty() {
            return Ok(Link::Empty);
        }
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &fi in fs {
            let f = self.faces[fi];
            let others: Vec<usize> = f.iter().copied().filter(|&x| x != v).collect();
            adj.entry(others[0]).or_default().push(others[1]);
            adj.entry(others[1]).or_default().push(others[0]);
        }
        let start = adj
            .iter()
            .find(|(_, nb)| nb.len() == 1)
            .map(|(k, _)| *k)
            .unwrap_or_else(|| *adj.keys().next().unwrap());
        let mut order = vec![start];
        let mut prev = None;
        let mut cur = start;
        loop {
            let next = adj[&cur].iter().copied().find(|&w| Some(w) != prev);
            match next {
                None => break,
                Some(w) if w == start => break,
                Some(w) if order.contains(&w) => return Err(Error::PinchedVertex(v)),
                Some(w) => {
                    prev = Some(cur);
                    cur = w;
                    order.push(w);
                }
            }
        }
        if order.len() != adj.len() {
            return Err(Error::PinchedVertex(v));
        }
        let closed = adj.values().all(|nb| nb.len() == 2);
        if closed && order.len() >= 3 {
            Ok(Link::Cycle(order))
        } else {
            Ok(Link::Path)
        }
    }

    /// Boundary cycles oriented with the faces on their left.
    pub fn boundary_loops(&self) -> Result<Vec<Vec<usize>>> {
        let mut next: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(a, b), fs) in &self.pair_faces {
            if fs.len() == 1 {
                let f = self.faces[fs[0]];
                let pos = f.iter().position(|&x| x == a).unwrap();
                let (u, w) = if f[(pos + 1) % 3] == b { (a, b) } else { (b, a) };
                next.entry(u).or_default().push(w);
            }
        }
        for (&v, out) in &next {
            if out.len() > 1 {
                return Err(Error::NonSimpleBoundary(v));
            }
        }
        let mut used = BTreeSet::new();
        let mut loops = Vec::new();
        for &s in next.keys() {
            if used.contains(&s) {
                continue;
            }
            let mut lp = vec![s];
            used.insert(s);
            let mut cur = next[&s][0];
            while cur != s {
                if !used.insert(cur) {
                    return Err(Error::NonSimpleBoundary(cur));
                }
                lp.push(cur);
                cur = *next.get(&cur).and_then(|o| o.first()).ok_or(Error::NonSimpleBoundary(cur))?;
            }
            loops.push(lp);
        }
        Ok(loops)
    }
}
