//! Linear (prescribed-elongation) rigidity: the rigidity matrix, rank counts,
//! flexes, compatibility bases and prescribed-elongation solves.
//!
//! Elongations are `lambda = l * L` per edge, with `L` the rate of change of
//! length; `A U = lambda` for nodal displacements `U`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, FullSvd};
use crate::scalar::Real;
use crate::truss::Truss;

#[derive(Clone, Debug)]
pub struct RigidityMatrix<T: Real> {
    /// `e x 2v`, one row per active edge in ascending id order.
    pub matrix: DMatrix<T>,
    pub edge_order: Vec<usize>,
}

/// Rows with `V_i - V_j` in the `i` slots and `V_j - V_i` in the `j` slots.
pub fn assemble_rigidity<T: Real>(t: &Truss<T>) -> Result<RigidityMatrix<T>> {
    let order = t.active_edges();
    if order.is_empty() {
        return Err(Error::Empty);
    }
    let n = t.num_vertices();
    let mut a = DMatrix::zeros(order.len(), 2 * n);
    for (row, &id) in order.iter().enumerate() {
        let e = t.edge(id);
        let d = t.vertex(e.a).sub(t.vertex(e.b));
        if d.x == T::zero() && d.y == T::zero() && !t.is_pinned() {
            return Err(Error::ZeroLength { edge: id });
        }
        a[(row, 2 * e.a)] = d.x;
        a[(row, 2 * e.a + 1)] = d.y;
        a[(row, 2 * e.b)] = -d.x;
        a[(row, 2 * e.b + 1)] = -d.y;
    }
    Ok(RigidityMatrix { matrix: a, edge_order: order })
}

/// Rigid-motion gauge rows: x-translation, y-translation, rotation.
pub fn gauge_rows<T: Real>(t: &Truss<T>) -> DMatrix<T> {
    let n = t.num_vertices();
    let mut g = DMatrix::zeros(3, 2 * n);
    for (i, p) in t.vertices().iter().enumerate() {
        g[(0, 2 * i)] = T::one();
        g[(1, 2 * i + 1)] = T::one();
        g[(2, 2 * i)] = -p.y;
        g[(2, 2 * i + 1)] = p.x;
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport<T> {
    pub rank: usize,
    pub nullity: usize,
    /// Compatibility count `e - rank`.
    pub c: usize,
    /// Maxwell number `e - 2v + 3`.
    pub maxwell: i64,
    pub is_inf_rigid: bool,
    pub is_generic: bool,
    /// Orthonormal non-rigid flexes, each of length `2v`.
    pub flex_basis: Vec<Vec<T>>,
    pub tolerance: T,
    /// Smallest singular value counted in the rank.
    pub sigma_kept: T,
    /// Largest singular value treated as zero.
    pub sigma_dropped: T,
    pub v: usize,
    pub e: usize,
}

pub fn analyze<T: Real>(t: &Truss<T>, tol: T) -> Result<AnalysisReport<T>> {
    let rm = assemble_rigidity(t)?;
    let svd = FullSvd::new(&rm.matrix);
    let rank = svd.rank(tol);
    let (sigma_kept, sigma_dropped) = svd.gap(tol);
    let v = t.num_vertices();
    let e = rm.edge_order.len();
    let nullity = 2 * v - rank;
    let null = svd.null_space(tol);
    let flex_basis = nontrivial_flexes(t, &null, tol);
    let maxwell = e as i64 - 2 * v as i64 + 3;
    let c = e - rank;
    Ok(AnalysisReport {
        rank,
        nullity,
        c,
        maxwell,
        is_inf_rigid: nullity == 3,
        is_generic: c as i64 == maxwell,
        flex_basis,
        tolerance: tol,
        sigma_kept,
        sigma_dropped,
        v,
        e,
    })
}

/// Removes rigid motions from a null-space basis and re-orthonormalises.
fn nontrivial_flexes<T: Real>(t: &Truss<T>, null: &DMatrix<T>, tol: T) -> Vec<Vec<T>> {
    if null.ncols() == 0 {
        return Vec::new();
    }
    let q = linalg::orth(&gauge_rows(t).transpose(), tol);
    let proj = null - &q * (q.transpose() * null);
    let keep = null.ncols().saturating_sub(q.ncols());
    if keep == 0 {
        return Vec::new();
    }
    let svd = FullSvd::new(&proj.transpose());
    (0..keep).map(|k| svd.v.column(k).iter().copied().collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMethod {
    /// Orthonormal left null space of `A`.
    LeftNull,
    /// Rows of the projector complementary to the gauge-augmented matrix.
    Projector,
}

#[derive(Clone, Debug)]
pub struct CompatibilityBasis<T: Real> {
    /// `c x e`; row `k` annihilates the columns of `A`.
    pub rows: DMatrix<T>,
    pub edge_order: Vec<usize>,
    pub method: BasisMethod,
}

pub fn compatibility_basis<T: Real>(t: &Truss<T>, method: BasisMethod, tol: T) -> Result<CompatibilityBasis<T>> {
    let rm = assemble_rigidity(t)?;
    let e = rm.edge_order.len();
    let rows = match method {
        BasisMethod::LeftNull => linalg::left_null_space(&rm.matrix, tol).transpose(),
        BasisMethod::Projector => {
            let at = augmented(&rm.matrix, &gauge_rows(t));
            if linalg::rank(&at, tol) < at.ncols() {
                return Err(Error::AugmentedSingular);
            }
            let inv = (at.transpose() * &at).try_inverse().ok_or(Error::AugmentedSingular)?;
            let m = at.nrows();
            let proj = DMatrix::<T>::identity(m, m) - &at * inv * at.transpose();
            let cols = proj.columns(0, e).into_owned();
            linalg::row_basis(&cols, tol)
        }
    };
    Ok(CompatibilityBasis { rows, edge_order: rm.edge_order, method })
}

fn augmented<T: Real>(a: &DMatrix<T>, g: &DMatrix<T>) -> DMatrix<T> {
    let (e, n) = a.shape();
    let mut out = DMatrix::zeros(e + g.nrows(), n);
    out.view_mut((0, 0), (e, n)).copy_from(a);
    out.view_mut((e, 0), (g.nrows(), n)).copy_from(g);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElongationSolution<T> {
    /// Nodal displacements `(u_0, v_0, u_1, ...)`.
    pub displacement: Vec<T>,
    /// `|A U - lambda|`.
    pub residual: T,
    pub compatible: bool,
}

/// Solves `A U = lambda` with the gauge rows fixed to `gauge`.
/// Incompatible elongations give the least-squares fit with `compatible = false`.
pub fn solve_prescribed_elongations<T: Real>(
    t: &Truss<T>,
    lambda: &[T],
    gauge: [T; 3],
    tol: T,
) -> Result<ElongationSolution<T>> {
    let rm = assemble_rigidity(t)?;
    let e = rm.edge_order.len();
    if lambda.len() != e {
        return Err(Error::LengthMismatch { expected: e, got: lambda.len() });
    }
    let at = augmented(&rm.matrix, &gauge_rows(t));
    if linalg::rank(&at, tol) < at.ncols() {
        let nullity = 2 * t.num_vertices() - linalg::rank(&rm.matrix, tol);
        return Err(Error::NotRigid { nullity });
    }
    let mut rhs = DVector::zeros(e + 3);
    for (k, l) in lambda.iter().enumerate() {
        rhs[k] = *l;
    }
    for k in 0..3 {
        rhs[e + k] = gauge[k];
    }
    let u = linalg::lstsq(&at, &rhs, tol);
    let lam = DVector::from_column_slice(lambda);
    let residual = (&rm.matrix * &u - &lam).norm();
    let scale = T::one() + lam.norm();
    Ok(ElongationSolution {
        displacement: u.iter().copied().collect(),
        residual,
        compatible: residual <= tol * scale * T::from_usize_lossy(e),
    })
}

/// `A U`, in active-edge order.
pub fn elongations_of<T: Real>(t: &Truss<T>, displacement: &[T]) -> Result<Vec<T>> {
    let rm = assemble_rigidity(t)?;
    if displacement.len() != rm.matrix.ncols() {
        return Err(Error::LengthMismatch { expected: rm.matrix.ncols(), got: displacement.len() });
    }
    let u = DVector::from_column_slice(displacement);
    Ok((&rm.matrix * u).iter().copied().collect())
}

/// Converts rates `L` to elongations `lambda = l * L` in active-edge order.
pub fn rates_to_elongations<T: Real>(t: &Truss<T>, rates: &[T]) -> Vec<T> {
    t.active_edges().iter().zip(rates).map(|(id, r)| t.geometric_length(*id) * *r).collect()
}
