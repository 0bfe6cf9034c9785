//! Rank-revealing helpers on top of nalgebra's SVD.
//!
//! Numerical rank uses the threshold `tol * sigma_max * max(rows, cols)`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// Default relative tolerance for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Singular value decomposition with values sorted in decreasing order and
/// the full right factor (`v` is `cols x cols`).
#[derive(Clone, Debug)]
pub struct FullSvd<T: Real> {
    /// Left singular vectors paired with `values` (`rows x k`).
    pub u: DMatrix<T>,
    pub values: Vec<T>,
    /// Right singular vectors as columns, complete orthonormal basis.
    pub v: DMatrix<T>,
    pub rows: usize,
    pub cols: usize,
}

impl<T: Real> FullSvd<T> {
    pub fn new(a: &DMatrix<T>) -> Self {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return FullSvd {
                u: DMatrix::zeros(m, 0),
                values: Vec::new(),
                v: DMatrix::identity(n, n),
                rows: m,
                cols: n,
            };
        }
        // Zero rows are appended so that the thin factorisation carries a full V.
        let padded;
        let work = if m < n {
            padded = {
                let mut p = DMatrix::zeros(n, n);
                p.view_mut((0, 0), (m, n)).copy_from(a);
                p
            };
            &padded
        } else {
            a
        };
        let svd = work.clone().svd(true, true);
        let u_all = svd.u.expect("u requested");
        let vt = svd.v_t.expect("v requested");
        let k = svd.singular_values.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[j]
                .partial_cmp(&svd.singular_values[i])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let kept = k.min(m);
        let mut u = DMatrix::zeros(m, kept);
        let mut v = DMatrix::zeros(n, n);
        let mut values = Vec::with_capacity(kept);
        for (dst, &src) in order.iter().enumerate() {
            for r in 0..n {
                v[(r, dst)] = vt[(src, r)];
            }
            if dst < kept {
                values.push(svd.singular_values[src]);
                for r in 0..m {
                    u[(r, dst)] = u_all[(r, src)];
                }
            }
        }
        FullSvd { u, values, v, rows: m, cols: n }
    }

    pub fn threshold(&self, tol: T) -> T {
        let smax = self.values.first().copied().unwrap_or_else(T::zero);
        tol * smax * T::from_usize_lossy(self.rows.max(self.cols))
    }

    pub fn rank(&self, tol: T) -> usize {
        let thr = self.threshold(tol);
        if self.values.first().map_or(true, |s| *s <= T::zero()) {
            return 0;
        }
        self.values.iter().filter(|s| **s > thr).count()
    }

    /// Orthonormal basis of the null space, as columns.
    pub fn null_space(&self, tol: T) -> DMatrix<T> {
        let r = self.rank(tol);
        self.v.columns(r, self.cols - r).into_owned()
    }

    /// Smallest retained and largest discarded singular values.
    pub fn gap(&self, tol: T) -> (T, T) {
        let r = self.rank(tol);
        let kept = if r > 0 { self.values[r - 1] } else { T::zero() };
        let dropped = self.values.get(r).copied().unwrap_or_else(T::zero);
        (kept, dropped)
    }
}

pub fn rank<T: Real>(a: &DMatrix<T>, tol: T) -> usize {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0;
    }
    let s = a.clone().singular_values();
    let smax = s.iter().copied().fold(T::zero(), |x, y| x.max(y));
    if smax <= T::zero() {
        return 0;
    }
    let thr = tol * smax * T::from_usize_lossy(m.max(n));
    s.iter().filter(|x| **x > thr).count()
}

/// Orthonormal basis of `{x : A x = 0}` as columns.
pub fn null_space<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    FullSvd::new(a).null_space(tol)
}

/// Orthonormal basis of `{y : y^T A = 0}` as columns.
pub fn left_null_space<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    null_space(&a.transpose(), tol)
}

/// Minimum-norm least-squares solution of `A x = b`.
pub fn lstsq<T: Real>(a: &DMatrix<T>, b: &DVector<T>, tol: T) -> DVector<T> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return DVector::zeros(n);
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u");
    let vt = svd.v_t.as_ref().expect("v");
    let smax = svd.singular_values.iter().copied().fold(T::zero(), |x, y| x.max(y));
    let thr = tol * smax * T::from_usize_lossy(m.max(n));
    let mut x = DVector::zeros(n);
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > thr && *s > T::zero() {
            let coef = u.column(k).dot(b) / *s;
            x.axpy(coef, &vt.row(k).transpose(), T::one());
        }
    }
    x
}

/// Orthonormal basis of the column span of `a`, as columns.
pub fn orth<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let svd = FullSvd::new(&a.transpose());
    let r = svd.rank(tol);
    svd.v.columns(0, r).into_owned()
}

/// Orthonormal basis for the row space of `a`, returned as rows.
pub fn row_basis<T: Real>(a: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let svd = FullSvd::new(a);
    let r = svd.rank(tol);
    svd.v.columns(0, r).transpose()
}
