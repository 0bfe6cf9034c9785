//! Trusses built from rigid pieces by bigon, triangle, prism and pin joins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{signed_area2, Point};
use crate::scalar::Real;
use crate::truss::{Edge, Truss};

/// Construction tree. Vertex ids inside a join refer to the assembled child.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BtpNode<T> {
    /// One bar between two distinct points.
    Segment { a: Point<T>, b: Point<T> },
    /// Two pieces sharing two points: `pins[k] = [vertex of s, vertex of t]`.
    Bigon { s: Box<BtpNode<T>>, t: Box<BtpNode<T>>, pins: [[usize; 2]; 2] },
    /// Three pieces in a cycle; `ends[i] = [start, end]` of part `i`, whose end
    /// is joined to the start of part `i + 1`.
    Triangle { parts: Vec<BtpNode<T>>, ends: [[usize; 2]; 3] },
    /// Two pieces `p`, `q` joined by three legs; leg `i` runs from
    /// `p_anchor[i]` to `q_anchor[i]` through its own `leg_ends[i]`.
    Prism {
        p: Box<BtpNode<T>>,
        q: Box<BtpNode<T>>,
        legs: Vec<BtpNode<T>>,
        p_anchor: [usize; 3],
        q_anchor: [usize; 3],
        leg_ends: [[usize; 2]; 3],
    },
    /// Identifies two distinct coincident vertices of one piece.
    Pin { t: Box<BtpNode<T>>, v1: usize, v2: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BtpWarning {
    /// Prism legs parallel or concurrent; the joint determinant vanishes.
    DegeneratePrism { determinant: f64 },
}

#[derive(Clone, Debug)]
pub struct BtpAssembly<T: Real> {
    pub truss: Truss<T>,
    pub degenerate: bool,
    pub warnings: Vec<BtpWarning>,
}

#[derive(Clone, Debug)]
struct Raw<T> {
    pos: Vec<Point<T>>,
    edges: Vec<(usize, usize)>,
}

struct Ctx {
    warnings: Vec<BtpWarning>,
}

/// Expected compatibility count of the assembly.
pub fn predicted_compat<T>(node: &BtpNode<T>) -> i64 {
    match node {
        BtpNode::Segment { .. } => 0,
        BtpNode::Bigon { s, t, .. } => predicted_compat(s) + predicted_compat(t) + 1,
        BtpNode::Triangle { parts, .. } => parts.iter().map(predicted_compat).sum(),
        BtpNode::Prism { p, q, legs, .. } => {
            predicted_compat(p) + predicted_compat(q) + legs.iter().map(predicted_compat).sum::<i64>()
        }
        BtpNode::Pin { t, .. } => predicted_compat(t) + 2,
    }
}

/// Determinant deciding whether three legs joining `z1..z3` to `z4..z6` lock the pieces.
pub fn prism_determinant<T: Real>(z: [Point<T>; 6]) -> T {
    let row = |i: usize| {
        let (a, b) = (z[i], z[i + 3]);
        [a.x - b.x, a.y - b.y, a.x * b.y - b.x * a.y]
    };
    let (r0, r1, r2) = (row(0), row(1), row(2));
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

fn coincidence_tol<T: Real>(pts: &[Point<T>]) -> T {
    let scale = pts.iter().fold(T::one(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
    T::lit(1e-9) * scale
}

/// Disjoint union of parts, then identification of the listed global pairs.
fn join<T: Real>(parts: Vec<Raw<T>>, pins: &[(usize, usize, usize, usize)]) -> Result<Raw<T>> {
    let mut offsets = Vec::with_capacity(parts.len());
    let mut pos = Vec::new();
    let mut edges = Vec::new();
    for p in &parts {
        offsets.push(pos.len());
        for (a, b) in &p.edges {
            edges.push((a + pos.len(), b + pos.len()));
        }
        pos.extend(p.pos.iter().copied());
    }
    let mut pairs = Vec::new();
    for &(pa, va, pb, vb) in pins {
        if va >= parts[pa].pos.len() {
            return Err(Error::UnknownVertex(va));
        }
        if vb >= parts[pb].pos.len() {
            return Err(Error::UnknownVertex(vb));
        }
        pairs.push((offsets[pa] + va, offsets[pb] + vb));
    }
    identify(Raw { pos, edges }, &pairs)
}

fn identify<T: Real>(raw: Raw<T>, pairs: &[(usize, usize)]) -> Result<Raw<T>> {
    let n = raw.pos.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let tol = coincidence_tol(&raw.pos);
    for &(a, b) in pairs {
        if raw.pos[a].dist(raw.pos[b]) > tol {
            return Err(Error::PinMismatch(a, b));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut pos = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if new_id[r] == usize::MAX {
            new_id[r] = pos.len();
            pos.push(raw.pos[r]);
        }
        new_id[v] = new_id[r];
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (k, (a, b)) in raw.edges.iter().enumerate() {
        let (na, nb) = (new_id[*a], new_id[*b]);
        if na == nb {
            return Err(Error::ZeroLength { edge: k });
        }
        edges.push((na, nb));
    }
    Ok(Raw { pos, edges })
}

fn build<T: Real>(node: &BtpNode<T>, ctx: &mut Ctx) -> Result<Raw<T>> {
    match node {
        BtpNode::Segment { a, b } => {
            if a.dist(*b) <= coincidence_tol(&[*a, *b]) {
                return Err(Error::ZeroLength { edge: 0 });
            }
            Ok(Raw { pos: vec![*a, *b], edges: vec![(0, 1)] })
        }
        BtpNode::Bigon { s, t, pins } => {
            if pins[0] == pins[1] || pins[0][0] == pins[1][0] || pins[0][1] == pins[1][1] {
                return Err(Error::RepeatedPin);
            }
            let (rs, rt) = (build(s, ctx)?, build(t, ctx)?);
            join(vec![rs, rt], &[(0, pins[0][0], 1, pins[0][1]), (0, pins[1][0], 1, pins[1][1])])
        }
        BtpNode::Triangle { parts, ends } => {
            if parts.len() != 3 {
                return Err(Error::InvalidParameter("triangle join needs three parts".into()));
            }
            let raws: Vec<Raw<T>> = parts.iter().map(|p| build(p, ctx)).collect::<Result<_>>()?;
            let mut anchors = [Point::origin(); 3];
            for i in 0..3 {
                anchors[i] = *raws[i].pos.get(ends[i][0]).ok_or(Error::UnknownVertex(ends[i][0]))?;
            }
            let scale = anchors[0].dist(anchors[1]).max(anchors[1].dist(anchors[2])).max(T::machine_eps());
            if signed_area2(anchors[0], anchors[1], anchors[2]).abs() <= T::lit(1e-9) * scale * scale {
                return Err(Error::CollinearAnchors);
            }
            let pins: Vec<(usize, usize, usize, usize)> =
                (0..3).map(|i| (i, ends[i][1], (i + 1) % 3, ends[(i + 1) % 3][0])).collect();
            join(raws, &pins)
        }
        BtpNode::Prism { p, q, legs, p_anchor, q_anchor, leg_ends } => {
            if legs.len() != 3 {
                return Err(Error::InvalidParameter("prism join needs three legs".into()));
            }
            let mut raws = vec![build(p, ctx)?, build(q, ctx)?];
            for l in legs {
                raws.push(build(l, ctx)?);
            }
            let mut z = [Point::origin(); 6];
            for i in 0..3 {
                z[i] = *raws[0].pos.get(p_anchor[i]).ok_or(Error::UnknownVertex(p_anchor[i]))?;
                z[i + 3] = *raws[1].pos.get(q_anchor[i]).ok_or(Error::UnknownVertex(q_anchor[i]))?;
            }
            let det = prism_determinant(z);
            let scale = z.iter().fold(T::one(), |m, p| m.max(p.x.abs()).max(p.y.abs()));
            if det.abs() <= T::lit(1e-9) * scale.powi(4) {
                ctx.warnings.push(BtpWarning::DegeneratePrism { determinant: det.as_f64() });
            }
            let mut pins = Vec::new();
            for i in 0..3 {
                pins.push((2 + i, leg_ends[i][0], 0, p_anchor[i]));
                pins.push((2 + i, leg_ends[i][1], 1, q_anchor[i]));
            }
            join(raws, &pins)
        }
        BtpNode::Pin { t, v1, v2 } => {
            if v1 == v2 {
                return Err(Error::RepeatedPin);
            }
            let raw = build(t, ctx)?;
            if *v1 >= raw.pos.len() || *v2 >= raw.pos.len() {
                return Err(Error::UnknownVertex((*v1).max(*v2)));
            }
            identify(raw, &[(*v1, *v2)])
        }
    }
}

/// Assembles the tree. Doubled bars are kept and flagged as bigons.
pub fn assemble<T: Real>(node: &BtpNode<T>) -> Result<BtpAssembly<T>> {
    let mut ctx = Ctx { warnings: Vec::new() };
    let raw = build(node, &mut ctx)?;
    let mut seen = std::collections::HashSet::new();
    let edges = raw
        .edges
        .iter()
        .map(|&(a, b)| {
            let mut e = Edge::new(a, b);
            e.bigon = !seen.insert((a.min(b), a.max(b)));
            e
        })
        .collect();
    let truss = Truss::new(raw.pos, edges, None)?;
    let degenerate = !ctx.warnings.is_empty();
    Ok(BtpAssembly { truss, degenerate, warnings: ctx.warnings })
}

/// Positions of the assembled vertices, without building a truss.
pub fn assembled_positions<T: Real>(node: &BtpNode<T>) -> Result<Vec<Point<T>>> {
    let mut ctx = Ctx { warnings: Vec::new() };
    Ok(build(node, &mut ctx)?.pos)
}
