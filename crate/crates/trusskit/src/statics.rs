//! Linear statics with Hookean bars: stiffness `K = A^T C A`, solved either for
//! displacements or directly for elongations under the compatibility constraint.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rigidity::{assemble_rigidity, gauge_rows, BasisMethod, compatibility_basis};
use crate::scalar::Real;
use crate::truss::Truss;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticsSolution<T> {
    /// Nodal displacements; empty for the elongation form.
    pub displacement: Vec<T>,
    /// Bar elongations in active-edge order.
    pub elongations: Vec<T>,
    /// Stored energy `lambda^T C lambda / 2`.
    pub energy: T,
    /// `|A^T C lambda - F|`.
    pub force_residual: T,
    /// `|B lambda|`.
    pub compatibility_residual: T,
}

/// Spring constants in active-edge order.
fn spring_diag<T: Real>(t: &Truss<T>, springs: &[T]) -> Result<DVector<T>> {
    let n = t.num_active();
    if springs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: springs.len() });
    }
    for (id, c) in t.active_edges().into_iter().zip(springs) {
        if !(*c > T::zero()) {
            return Err(Error::BadSpring(id));
        }
    }
    Ok(DVector::from_column_slice(springs))
}

pub fn stiffness<T: Real>(t: &Truss<T>, springs: &[T]) -> Result<DMatrix<T>> {
    let a = assemble_rigidity(t)?.matrix;
    let c = spring_diag(t, springs)?;
    let ca = DMatrix::from_diagonal(&c) * &a;
    Ok(a.transpose() * ca)
}

/// Net force and torque of a load relative to its size.
fn check_balance<T: Real>(t: &Truss<T>, f: &DVector<T>, tol: T) -> Result<()> {
    let g = gauge_rows(t);
    let net = (&g * f).norm();
    let scale = f.norm() * (T::one() + t.diameter());
    if net > tol.sqrt() * scale.max(T::machine_eps()) {
        return Err(Error::Unbalanced(net.as_f64()));
    }
    Ok(())
}

fn finish<T: Real>(t: &Truss<T>, c: &DVector<T>, lam: DVector<T>, u: Vec<T>, f: &DVector<T>, tol: T) -> Result<StaticsSolution<T>> {
    let a = assemble_rigidity(t)?.matrix;
    let clam = c.component_mul(&lam);
    let force_residual = (a.transpose() * &clam - f).norm();
    let b = compatibility_basis(t, BasisMethod::LeftNull, tol)?.rows;
    let compatibility_residual = if b.nrows() == 0 { T::zero() } else { (&b * &lam).norm() };
    let energy = lam.dot(&clam) * T::lit(0.5);
    Ok(StaticsSolution {
        displacement: u,
        elongations: lam.iter().copied().collect(),
        energy,
        force_residual,
        compatibility_residual,
    })
}

/// Solves `K U = F` with the gauge rows pinned to zero, then `lambda = A U`.
pub fn solve_displacement_form<T: Real>(t: &Truss<T>, springs: &[T], load: &[T], tol: T) -> Result<StaticsSolution<T>> {
    let c = spring_diag(t, springs)?;
    let f = load_vector(t, load)?;
    check_balance(t, &f, tol)?;
    let a = assemble_rigidity(t)?.matrix;
    let k = a.transpose() * DMatrix::from_diagonal(&c) * &a;
    let g = gauge_rows(t);
    let n = k.ncols();
    let mut sys = DMatrix::zeros(n + 3, n);
    sys.view_mut((0, 0), (n, n)).copy_from(&k);
    sys.view_mut((n, 0), (3, n)).copy_from(&g);
    let mut rhs = DVector::zeros(n + 3);
    rhs.rows_mut(0, n).copy_from(&f);
    let u = linalg::lstsq(&sys, &rhs, tol);
    let res = (&k * &u - &f).norm();
    if res > tol.sqrt() * f.norm().max(T::one()) {
        return Err(Error::ExcitesFlex(res.as_f64()));
    }
    let lam = &a * &u;
    finish(t, &c, lam, u.iter().copied().collect(), &f, tol)
}

/// Solves `A^T C lambda = F` together with `B lambda = 0` for the elongations.
pub fn solve_elongation_form<T: Real>(t: &Truss<T>, springs: &[T], load: &[T], tol: T) -> Result<StaticsSolution<T>> {
    let c = spring_diag(t, springs)?;
    let f = load_vector(t, load)?;
    check_balance(t, &f, tol)?;
    let a = assemble_rigidity(t)?.matrix;
    let b = compatibility_basis(t, BasisMethod::LeftNull, tol)?.rows;
    let (e, n) = a.shape();
    let atc = a.transpose() * DMatrix::from_diagonal(&c);
    let mut sys = DMatrix::zeros(n + b.nrows(), e);
    sys.view_mut((0, 0), (n, e)).copy_from(&atc);
    if b.nrows() > 0 {
        sys.view_mut((n, 0), (b.nrows(), e)).copy_from(&b);
    }
    let mut rhs = DVector::zeros(n + b.nrows());
    rhs.rows_mut(0, n).copy_from(&f);
    let lam = linalg::lstsq(&sys, &rhs, tol);
    let res = (&atc * &lam - &f).norm();
    if res > tol.sqrt() * f.norm().max(T::one()) {
        return Err(Error::ExcitesFlex(res.as_f64()));
    }
    finish(t, &c, lam, Vec::new(), &f, tol)
}

fn load_vector<T: Real>(t: &Truss<T>, load: &[T]) -> Result<DVector<T>> {
    let n = 2 * t.num_vertices();
    if load.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: load.len() });
    }
    Ok(DVector::from_column_slice(load))
}
