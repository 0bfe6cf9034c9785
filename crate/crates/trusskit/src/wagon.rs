//! Wagon-wheel compatibility rows and curve sums over regions of interior vertices.
//!
//! Rows act on length rates `L`; [`WagonWheelRow::elongation_row`] rescales
//! them to act on elongations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{corner_angle, line_distance, Point};
use crate::linalg;
use crate::rigidity::assemble_rigidity;
use crate::scalar::Real;
use crate::truss::{Star, Truss};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorGeometry<T> {
    /// Angle at the centre.
    pub alpha: T,
    /// Angle at the leading neighbour.
    pub beta: T,
    /// Angle at the trailing neighbour.
    pub gamma: T,
    /// Distance from the centre to the circumferential edge.
    pub h: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WagonWheelRow<T> {
    pub center: usize,
    pub star: Star,
    pub sectors: Vec<SectorGeometry<T>>,
    /// Coefficients on `L`, keyed by edge id.
    pub coefficients: BTreeMap<usize, T>,
}

impl<T: Real> WagonWheelRow<T> {
    /// Coefficients on elongations `lambda = l * L`.
    pub fn elongation_row(&self, t: &Truss<T>) -> BTreeMap<usize, T> {
        self.coefficients.iter().map(|(id, c)| (*id, *c / t.geometric_length(*id))).collect()
    }

    /// `+1` on rim and `-1` on spokes when the star is a regular unit hexagon.
    pub fn regular_form(&self, tol: T) -> Option<BTreeMap<usize, i8>> {
        if self.sectors.len() != 6 {
            return None;
        }
        let scale = T::lit(2.0) / T::lit(3.0).sqrt();
        let mut out = BTreeMap::new();
        for (id, c) in &self.coefficients {
            let s = *c / scale;
            if (s - T::one()).abs() <= tol {
                out.insert(*id, 1);
            } else if (s + T::one()).abs() <= tol {
                out.insert(*id, -1);
            } else {
                return None;
            }
        }
        Some(out)
    }

    pub fn apply(&self, rates: &[T]) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, (id, c)| acc + *c * rates[*id])
    }
}

fn row_from_star<T: Real>(t: &Truss<T>, star: Star) -> Result<WagonWheelRow<T>> {
    let c = t.vertex(star.center);
    let k = star.neighbors.len();
    let pos: Vec<Point<T>> = star.neighbors.iter().map(|v| t.vertex(*v)).collect();
    let mut sectors = Vec::with_capacity(k);
    let tol = T::lit(1e-12);
    for i in 0..k {
        let (p, q) = (pos[i], pos[(i + 1) % k]);
        let alpha = corner_angle(p, c, q);
        let beta = corner_angle(c, p, q);
        let gamma = corner_angle(c, q, p);
        let h = c.dist(p) * beta.sin();
        if alpha.sin() < tol || h <= tol * c.dist(p) {
            return Err(Error::DegenerateSector { center: star.center, sector: i });
        }
        sectors.push(SectorGeometry { alpha, beta, gamma, h });
    }
    let mut coefficients = BTreeMap::new();
    for i in 0..k {
        let prev = &sectors[(i + k - 1) % k];
        let cur = &sectors[i];
        *coefficients.entry(star.circumferential[i]).or_insert_with(T::zero) += T::one() / cur.h;
        *coefficients.entry(star.radial[i]).or_insert_with(T::zero) -=
            cur.beta.cos() / cur.h + prev.gamma.cos() / prev.h;
    }
    Ok(WagonWheelRow { center: star.center, star, sectors, coefficients })
}

pub fn wagon_row<T: Real>(t: &Truss<T>, v: usize) -> Result<WagonWheelRow<T>> {
    row_from_star(t, t.star_of(v)?)
}

pub fn wagon_rows<T: Real>(t: &Truss<T>, vs: &[usize]) -> Result<Vec<WagonWheelRow<T>>> {
    t.stars_of(vs)?.into_iter().map(|s| row_from_star(t, s)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WagonBasisReport<T> {
    pub rows: usize,
    pub rank: usize,
    pub c: usize,
    /// Largest `|row . column|` over wagon rows and columns of `A`.
    pub annihilation: T,
    pub spans_left_null: bool,
}

/// Stacks the wagon rows of all interior vertices (in elongation form) and compares with `c`.
pub fn wagon_basis_check<T: Real>(t: &Truss<T>, tol: T) -> Result<WagonBasisReport<T>> {
    let interior = t.interior_vertices()?;
    let rows = wagon_rows(t, &interior)?;
    let rm = assemble_rigidity(t)?;
    let col: HashMap<usize, usize> = rm.edge_order.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let mut b = DMatrix::zeros(rows.len(), rm.edge_order.len());
    for (r, row) in rows.iter().enumerate() {
        for (id, c) in row.elongation_row(t) {
            b[(r, col[&id])] = c;
        }
    }
    let prod = &b * &rm.matrix;
    let annihilation = prod.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let rank = linalg::rank(&b, tol);
    let c = rm.edge_order.len() - linalg::rank(&rm.matrix, tol);
    let scale = b.iter().fold(T::zero(), |m, x| m.max(x.abs())) * rm.matrix.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    Ok(WagonBasisReport {
        rows: rows.len(),
        rank,
        c,
        annihilation,
        spans_left_null: rank == c && annihilation <= T::lit(1e-8) * scale.max(T::one()),
    })
}

/// Position of an edge relative to a region, by which of its endpoints and
/// opposite vertices lie in the region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    /// Only one opposite vertex inside.
    Boundary,
    /// Only one endpoint inside.
    UniqueIncoming,
    /// Both opposite vertices inside, neither endpoint.
    Isthmus,
    /// One endpoint and one opposite vertex inside.
    ExtremeIncoming,
    /// Both endpoints inside, neither opposite vertex.
    Spine,
    /// One endpoint and both opposite vertices inside.
    MiddleIncoming,
    /// Both endpoints and one opposite vertex inside.
    Parallel,
    /// All four inside.
    Interior,
    /// None inside.
    Outside,
}

impl EdgeClass {
    /// Coefficient on a unit triangular lattice, in units of `2/sqrt(3)`.
    pub fn lattice_value(self) -> i32 {
        match self {
            EdgeClass::Boundary => 1,
            EdgeClass::UniqueIncoming => -1,
            EdgeClass::Isthmus => 2,
            EdgeClass::ExtremeIncoming => 0,
            EdgeClass::Spine => -2,
            EdgeClass::MiddleIncoming => 1,
            EdgeClass::Parallel => -1,
            EdgeClass::Interior | EdgeClass::Outside => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSumEdge<T> {
    pub edge: usize,
    pub class: EdgeClass,
    /// Summed wagon-row coefficient.
    pub sigma: T,
    /// Coefficient from the local closed form.
    pub closed_form: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSum<T> {
    pub region: Vec<usize>,
    /// Every active edge with at least one of its four vertices in the region.
    pub edges: Vec<CurveSumEdge<T>>,
}

impl<T: Real> CurveSum<T> {
    /// `sum sigma_e L_e` with `rates` indexed by edge id.
    pub fn apply(&self, rates: &[T]) -> T {
        self.edges.iter().fold(T::zero(), |acc, e| acc + e.sigma * rates[e.edge])
    }

    pub fn sigma(&self, edge: usize) -> T {
        self.edges.iter().find(|e| e.edge == edge).map_or(T::zero(), |e| e.sigma)
    }
}

/// Endpoints and opposite vertices of every active edge with faces.
fn edge_apexes<T: Real>(t: &Truss<T>) -> Result<HashMap<usize, Vec<usize>>> {
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for f in t.faces()? {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_pair.entry((a.min(b), a.max(b))).or_default().push(f[(k + 2) % 3]);
        }
    }
    let mut out = HashMap::new();
    for id in t.active_edges() {
        out.insert(id, by_pair.get(&t.edge(id).key()).cloned().unwrap_or_default());
    }
    Ok(out)
}

fn classify(ends: [bool; 2], apexes: &[bool]) -> EdgeClass {
    let ne = ends.iter().filter(|x| **x).count();
    let na = apexes.iter().filter(|x| **x).count();
    match (ne, na) {
        (0, 0) => EdgeClass::Outside,
        (0, 1) => EdgeClass::Boundary,
        (1, 0) => EdgeClass::UniqueIncoming,
        (0, 2) => EdgeClass::Isthmus,
        (1, 1) => EdgeClass::ExtremeIncoming,
        (2, 0) => EdgeClass::Spine,
        (1, 2) => EdgeClass::MiddleIncoming,
        (2, 1) => EdgeClass::Parallel,
        _ => EdgeClass::Interior,
    }
}

fn closed_form<T: Real>(
    class: EdgeClass,
    e0: Point<T>,
    e2: Point<T>,
    apex_in: &[Point<T>],
    apex_out: &[Point<T>],
) -> T {
    let l = e0.dist(e2);
    let d = |p: Point<T>| line_distance(p, e0, e2);
    match class {
        EdgeClass::Boundary => T::one() / d(apex_in[0]),
        EdgeClass::Isthmus => T::one() / d(apex_in[0]) + T::one() / d(apex_in[1]),
        EdgeClass::Spine => -(T::one() / d(apex_out[0]) + T::one() / d(apex_out[1])),
        EdgeClass::Parallel => -T::one() / d(apex_out[0]),
        EdgeClass::UniqueIncoming => {
            let b1 = corner_angle(e0, e2, apex_out[0]);
            let g1 = corner_angle(e0, e2, apex_out[1]);
            -(b1.cos() / (l * b1.sin()) + g1.cos() / (l * g1.sin()))
        }
        EdgeClass::ExtremeIncoming => {
            let a1 = corner_angle(apex_in[0], e0, e2);
            let g1 = corner_angle(e0, e2, apex_out[0]);
            a1.cos() / (l * a1.sin()) - g1.cos() / (l * g1.sin())
        }
        EdgeClass::MiddleIncoming => {
            let a1 = corner_angle(apex_in[0], e0, e2);
            let a2 = corner_angle(apex_in[1], e0, e2);
            a1.cos() / (l * a1.sin()) + a2.cos() / (l * a2.sin())
        }
        EdgeClass::Interior | EdgeClass::Outside => T::zero(),
    }
}

/// Sums the wagon rows of `region` and classifies every touched edge.
pub fn curve_sum<T: Real>(t: &Truss<T>, region: &[usize]) -> Result<CurveSum<T>> {
    let set: BTreeSet<usize> = region.iter().copied().collect();
    if set.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let list: Vec<usize> = set.iter().copied().collect();
    let rows = wagon_rows(t, &list)?;
    let mut sigma: BTreeMap<usize, T> = BTreeMap::new();
    for row in &rows {
        for (id, c) in &row.coefficients {
            *sigma.entry(*id).or_insert_with(T::zero) += *c;
        }
    }
    let apexes = edge_apexes(t)?;
    let mut edges = Vec::new();
    for id in t.active_edges() {
        let e = t.edge(id);
        let ap = &apexes[&id];
        let ends = [set.contains(&e.a), set.contains(&e.b)];
        let ap_in: Vec<bool> = ap.iter().map(|v| set.contains(v)).collect();
        let class = classify(ends, &ap_in);
        if class == EdgeClass::Outside {
            continue;
        }
        // orient so that e0 is an endpoint inside the region when there is one
        let (e0, e2) = if ends[0] || !ends[1] { (e.a, e.b) } else { (e.b, e.a) };
        let inside: Vec<Point<T>> = ap.iter().filter(|v| set.contains(v)).map(|v| t.vertex(*v)).collect();
        let outside: Vec<Point<T>> = ap.iter().filter(|v| !set.contains(v)).map(|v| t.vertex(*v)).collect();
        let cf = closed_form(class, t.vertex(e0), t.vertex(e2), &inside, &outside);
        edges.push(CurveSumEdge {
            edge: id,
            class,
            sigma: sigma.get(&id).copied().unwrap_or_else(T::zero),
            closed_form: cf,
        });
    }
    Ok(CurveSum { region: list, edges })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The curve sum is nonzero, so no compatible deformation exists.
    Incompatible,
    /// The curve sum vanishes; this test says nothing.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport<T> {
    pub verdict: Verdict,
    /// Value of the curve-sum functional on the given rates.
    pub value: T,
    /// Rates vanish on boundary-class edges and are positive on the rest of the double layer.
    pub sign_pattern: bool,
    pub witness: CurveSum<T>,
}

/// Applies the curve sum of `region` to rates `L` (indexed by edge id).
pub fn curve_sum_verdict<T: Real>(t: &Truss<T>, region: &[usize], rates: &[T], tol: T) -> Result<VerdictReport<T>> {
    if rates.len() != t.num_edges() {
        return Err(Error::LengthMismatch { expected: t.num_edges(), got: rates.len() });
    }
    let cs = curve_sum(t, region)?;
    let value = cs.apply(rates);
    let scale = cs.edges.iter().fold(T::zero(), |m, e| m + (e.sigma * rates[e.edge]).abs());
    let sign_pattern = cs.edges.iter().all(|e| match e.class {
        EdgeClass::Boundary => rates[e.edge] == T::zero(),
        EdgeClass::Interior => true,
        _ => rates[e.edge] > T::zero(),
    });
    let verdict = if value.abs() > tol * scale.max(T::one()) {
        Verdict::Incompatible
    } else {
        Verdict::Undetermined
    };
    Ok(VerdictReport { verdict, value, sign_pattern, witness: cs })
}
