//! Damage: recoverability after bar removal, losses from holes, isoperimetric
//! bounds, thinning of rhombi and asymptotic compatibility of periodic lattices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::corner_angle;
use crate::lattice::{self, lattice_distance, HoleSpec, PatchSpec, DIRECTIONS};
use crate::linalg;
use crate::rigidity::{analyze, assemble_rigidity, solve_prescribed_elongations};
use crate::scalar::Real;
use crate::truss::{Edge, Truss};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DamageReport<T> {
    pub removed: Vec<usize>,
    pub recoverable: bool,
    pub original_c: usize,
    pub reduced_c: usize,
    pub nullity: usize,
    pub disconnected: bool,
    /// Non-rigid flexes of the damaged truss.
    pub flexes: Vec<Vec<T>>,
    /// Elongations of the removed bars implied by the survivors, when supplied.
    pub reconstructed: Option<Vec<(usize, T)>>,
}

/// Removes `removed` and decides whether the survivors still determine the
/// deformation. `survivors` are elongations of the remaining active bars in
/// ascending id order.
pub fn assess_damage<T: Real>(
    t: &Truss<T>,
    removed: &[usize],
    survivors: Option<&[T]>,
    tol: T,
) -> Result<DamageReport<T>> {
    let original = analyze(t, tol)?;
    let (reduced, flags) = t.remove_edges(removed)?;
    let after = analyze(&reduced, tol)?;
    let recoverable = after.is_inf_rigid;
    let reconstructed = match survivors {
        Some(lam) if recoverable => {
            let sol = solve_prescribed_elongations(&reduced, lam, [T::zero(); 3], tol)?;
            if !sol.compatible {
                return Err(Error::Incompatible { residual: sol.residual.as_f64() });
            }
            let full = assemble_rigidity(t)?;
            let u = nalgebra::DVector::from_vec(sol.displacement);
            let mut out = Vec::new();
            for &id in removed {
                let row = full.edge_order.iter().position(|x| *x == id).ok_or(Error::UnknownEdge(id))?;
                out.push((id, full.matrix.row(row).transpose().dot(&u)));
            }
            Some(out)
        }
        _ => None,
    };
    Ok(DamageReport {
        removed: removed.to_vec(),
        recoverable,
        original_c: original.c,
        reduced_c: after.c,
        nullity: after.nullity,
        disconnected: flags.disconnected,
        flexes: after.flex_basis,
        reconstructed,
    })
}

/// Truss spanned by `faces` (plus bars of `t` lying in no face when `keep_bare`),
/// with vertices renumbered in increasing order of their old ids.
pub fn sub_truss<T: Real>(t: &Truss<T>, faces: &[[usize; 3]], keep_bare: bool) -> Result<(Truss<T>, Vec<usize>)> {
    let mut pairs = BTreeSet::new();
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    if keep_bare {
        let all: BTreeSet<(usize, usize)> = t
            .faces()?
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k].min(f[(k + 1) % 3]), f[k].max(f[(k + 1) % 3]))))
            .collect();
        for id in t.active_edges() {
            if !all.contains(&t.edge(id).key()) {
                pairs.insert(t.edge(id).key());
            }
        }
    }
    let old: Vec<usize> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect::<BTreeSet<_>>().into_iter().collect();
    let map: HashMap<usize, usize> = old.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edges = pairs
        .iter()
        .map(|(a, b)| {
            let mut e = Edge::new(map[a], map[b]);
            if let Some(id) = t.edge_between(*a, *b) {
                e.length = t.edge(id).length;
            }
            e
        })
        .collect();
    let new_faces = faces.iter().map(|f| f.map(|v| map[&v])).collect();
    let sub = match t.lattice() {
        Some(l) => Truss::from_lattice(old.iter().map(|v| l[*v]).collect(), edges, Some(new_faces))?,
        None => Truss::new(old.iter().map(|v| t.vertex(*v)).collect(), edges, Some(new_faces))?,
    };
    Ok((sub, old))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleLossReport {
    pub c_filled: usize,
    pub c_holed: usize,
    pub loss: i64,
    /// Number of links on the hole boundary.
    pub boundary_length: usize,
    /// Vertices strictly inside the hole.
    pub hole_interior: usize,
    /// `hole_interior + boundary_length - 3`.
    pub formula_loss: i64,
    /// Hole boundary turns by at most 60 degrees everywhere, never three times in a row.
    pub collared: bool,
}

/// Compatibility lost by cutting the faces `hole` (indices into `z.faces()`) out of `z`.
pub fn hole_loss<T: Real>(z: &Truss<T>, hole: &[usize], tol: T) -> Result<HoleLossReport> {
    let faces = z.faces()?;
    let set: BTreeSet<usize> = hole.iter().copied().collect();
    if set.is_empty() || set.iter().any(|f| *f >= faces.len()) {
        return Err(Error::InvalidParameter("hole faces out of range".into()));
    }
    let hole_faces: Vec<[usize; 3]> = set.iter().map(|f| faces[*f]).collect();
    let kept: Vec<[usize; 3]> = (0..faces.len()).filter(|f| !set.contains(f)).map(|f| faces[f]).collect();
    let (y, y_ids) = sub_truss(z, &hole_faces, false)?;
    let ytopo = y.topology()?;
    if ytopo.boundary_loops.len() != 1 || ytopo.chi != 1 || ytopo.boundary_loops[0].len() < 3 {
        return Err(Error::NotSimplyBounded);
    }
    let ztopo = z.topology()?;
    let z_interior: BTreeSet<usize> = ztopo.interior_vertices.iter().copied().collect();
    let gamma: Vec<usize> = ytopo.boundary_loops[0].iter().map(|v| y_ids[*v]).collect();
    if gamma.iter().any(|v| !z_interior.contains(v)) {
        return Err(Error::HoleTouchesBoundary);
    }
    let (x, _) = sub_truss(z, &kept, true)?;
    let c_filled = analyze(z, tol)?.c;
    let c_holed = analyze(&x, tol)?.c;
    let l1 = gamma.len();
    let v1 = ytopo.v_i;
    // turning of the hole boundary, from the corner angles of the hole faces
    let mut inner_angle: BTreeMap<usize, T> = BTreeMap::new();
    for f in &hole_faces {
        for k in 0..3 {
            let ang = corner_angle(z.vertex(f[(k + 2) % 3]), z.vertex(f[k]), z.vertex(f[(k + 1) % 3]));
            *inner_angle.entry(f[k]).or_insert_with(T::zero) += ang;
        }
    }
    let sixty = T::pi() / T::lit(3.0);
    let eps = T::lit(1e-9);
    let turns: Vec<T> = gamma.iter().map(|v| T::pi() - inner_angle[v]).collect();
    let at_limit: Vec<bool> = turns.iter().map(|t| (*t - sixty).abs() <= eps).collect();
    let within = turns.iter().all(|t| *t <= sixty + eps);
    let run = (0..l1).any(|i| at_limit[i] && at_limit[(i + 1) % l1] && at_limit[(i + 2) % l1]);
    Ok(HoleLossReport {
        c_filled,
        c_holed,
        loss: c_filled as i64 - c_holed as i64,
        boundary_length: l1,
        hole_interior: v1,
        formula_loss: v1 as i64 + l1 as i64 - 3,
        collared: within && !run,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoBounds {
    /// Most lattice points a closed curve of this length can enclose.
    pub max_interior: i64,
    pub loss_lower: i64,
    pub loss_upper: i64,
}

/// Bounds for a hole whose boundary has `l` links.
pub fn isoperimetric(l: usize) -> Result<IsoBounds> {
    if l < 3 {
        return Err(Error::InvalidParameter("boundary length must be at least 3".into()));
    }
    let l = l as i64;
    Ok(IsoBounds {
        max_interior: (l * l - 6 * l + 12).div_euclid(12),
        loss_lower: l - 3,
        loss_upper: (l * l + 6 * l - 24).div_euclid(12),
    })
}

/// Largest number of lattice points strictly inside a simple closed lattice
/// curve with exactly `l` links, by enumeration.
pub fn brute_force_max_interior(l: usize) -> Result<i64> {
    if !(3..=10).contains(&l) {
        return Err(Error::InvalidParameter("enumeration supports lengths 3..=10".into()));
    }
    fn walk(path: &mut Vec<(i64, i64)>, visited: &mut BTreeSet<(i64, i64)>, l: usize, best: &mut i64) {
        let cur = *path.last().unwrap();
        let steps_left = l - (path.len() - 1);
        for d in DIRECTIONS {
            let nxt = (cur.0 + d.0, cur.1 + d.1);
            if nxt == (0, 0) {
                if steps_left == 1 && path.len() >= 3 {
                    let mut twice = 0i64;
                    for i in 0..path.len() {
                        let (p, q) = (path[i], path[(i + 1) % path.len()]);
                        twice += p.0 * q.1 - q.0 * p.1;
                    }
                    // triangles = |twice|; interior points from the lattice Pick relation
                    let interior = (twice.abs() - l as i64 + 2) / 2;
                    *best = (*best).max(interior);
                }
                continue;
            }
            if steps_left <= 1 || visited.contains(&nxt) || lattice_distance(nxt, (0, 0)) > (steps_left - 1) as i64 {
                continue;
            }
            visited.insert(nxt);
            path.push(nxt);
            walk(path, visited, l, best);
            path.pop();
            visited.remove(&nxt);
        }
    }
    let mut best = -1;
    let mut path = vec![(0, 0), (1, 0)];
    let mut visited: BTreeSet<(i64, i64)> = path.iter().copied().collect();
    walk(&mut path, &mut visited, l, &mut best);
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct ThinningReport<T: Real> {
    pub truss: Truss<T>,
    pub removed: Vec<usize>,
    pub rigid: bool,
    pub c: usize,
    /// Nullity after removing each probed extra edge.
    pub further: Vec<(usize, usize)>,
}

/// Removes the north-east spoke of every hexagon of `rhombus(n)` and probes
/// further removals: all remaining bars for `n <= 2`, `samples` random ones otherwise.
pub fn ne_thinning<T: Real>(n: usize, samples: usize, seed: u64, tol: T) -> Result<ThinningReport<T>> {
    let full: Truss<T> = lattice::gen_patch(&PatchSpec::Rhombus { n })?;
    let mut removed = Vec::new();
    for k in 1..=n as i64 {
        for l in 1..=n as i64 {
            removed.push(full.lattice_edge((k, l), (k, l + 1)).ok_or(Error::NotLattice)?);
        }
    }
    removed.sort();
    let (thin, _) = full.remove_edges(&removed)?;
    let rep = analyze(&thin, tol)?;
    let mut probe = thin.active_edges();
    if n > 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        probe.shuffle(&mut rng);
        probe.truncate(samples);
        probe.sort();
    }
    let further = probe
        .par_iter()
        .map(|&id| {
            let (t2, _) = thin.remove_edges(&[id])?;
            Ok((id, analyze(&t2, tol)?.nullity))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThinningReport { truss: thin, removed, rigid: rep.is_inf_rigid, c: rep.c, further })
}

/// Periodic cell described either by hole geometry or by `(h, m)` counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicCellSpec {
    pub k: usize,
    pub holes: Vec<HoleSpec>,
}

/// Limit of compatibility count per unit area for `k x k` cells with `h`
/// holes each swallowing `m` interior vertices.
pub fn ac_formula(k: usize, h: usize, m: usize) -> Result<f64> {
    let loss: f64 = if h == 0 { 0.0 } else { h as f64 * (m as f64 - 3.0) };
    ac_from_loss(k, loss, h * m)
}

fn ac_from_loss(k: usize, loss: f64, removed: usize) -> Result<f64> {
    let k2 = (k * k) as f64;
    if k == 0 || removed >= k * k {
        return Err(Error::InvalidParameter("holes must leave interior vertices in the cell".into()));
    }
    Ok((k2 - loss) / (3f64.sqrt() / 2.0 * k2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcSample {
    pub n: usize,
    pub c: usize,
    pub area: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcReport {
    pub formula: f64,
    /// `(h, m)` per hole footprint found in the cell.
    pub hole_sizes: Vec<usize>,
    pub empirical: Vec<AcSample>,
}

/// Interior vertices swallowed by each hole footprint of a cell.
pub fn hole_sizes(spec: &PeriodicCellSpec) -> Result<Vec<usize>> {
    let (_, fps) = lattice::cell_triangles(spec.k, &spec.holes)?;
    Ok(fps.iter().map(|fp| lattice::vertices_of(fp).len()).collect())
}

/// Formula value and, for each `n`, the measured `c / area` of an `n x n` tiling.
pub fn asymptotic_compatibility(spec: &PeriodicCellSpec, empirical_n: &[usize], tol: f64) -> Result<AcReport> {
    let sizes = hole_sizes(spec)?;
    let loss: f64 = sizes.iter().map(|m| *m as f64 - 3.0).sum();
    let formula = ac_from_loss(spec.k, loss, sizes.iter().sum())?;
    let cell: Truss<f64> = lattice::gen_patch(&PatchSpec::Cell { k: spec.k, holes: spec.holes.clone() })?;
    let empirical = empirical_n
        .par_iter()
        .map(|&n| {
            let omega = lattice::gen_periodic(&cell, n)?;
            let c = empirical_c(&omega, tol)?;
            let nk = (n * spec.k) as f64;
            let area = nk * (nk + 1.0) * 3f64.sqrt() / 2.0;
            Ok(AcSample { n, c, area, ratio: c as f64 / area })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AcReport { formula, hole_sizes: sizes, empirical })
}

fn empirical_c(t: &Truss<f64>, tol: f64) -> Result<usize> {
    let a = assemble_rigidity(t)?;
    Ok(a.edge_order.len() - linalg::rank(&a.matrix, tol))
}

/// Regular-hexagon hole of side `p` inside a cell large enough to hold it.
pub fn hexagon_hole_host(p: usize) -> (usize, HoleSpec) {
    let k = 2 * p + 3;
    let c = (p + 2) as i64;
    (k, HoleSpec::Hexagon { center: (c, c), side: p })
}

/// Face indices of `t` whose lattice triangles are listed.
pub fn faces_of_triangles<T: Real>(t: &Truss<T>, tris: &BTreeSet<lattice::Tri>) -> Result<Vec<usize>> {
    let coords = lattice::lattice_coords(t)?;
    let mut out = Vec::new();
    for (fi, f) in t.faces()?.iter().enumerate() {
        if let Some(tri) = lattice::Tri::from_corners(f.map(|v| coords[v])) {
            if tris.contains(&tri) {
                out.push(fi);
            }
        }
    }
    Ok(out)
}
