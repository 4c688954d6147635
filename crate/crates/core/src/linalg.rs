//! Dense real matrix helpers that nalgebra only offers with `std`.

use nalgebra::{DMatrix, DVector};

use crate::math;

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|v| math::abs(*v)).fold(0.0, f64::max) * n as f64;
    let mut s = 0;
    while norm / (1u64 << s) as f64 > 0.25 && s < 60 {
        s += 1;
    }
    let b = a / (1u64 << s) as f64;
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..20 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman-Beavers iteration, `None` when the
/// iteration breaks down (eigenvalues on the closed negative axis).
pub fn sqrtm(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse()?;
        let zi = z.clone().try_inverse()?;
        let y1 = (&y + zi) * 0.5;
        let z1 = (&z + yi) * 0.5;
        let delta = (&y1 - &y).norm();
        y = y1;
        z = z1;
        if !y.iter().all(|v| v.is_finite()) {
            return None;
        }
        if delta <= 1e-15 * y.norm().max(1.0) {
            return Some(y);
        }
    }
    let check = (&y * &y - a).norm() <= 1e-10 * a.norm().max(1.0);
    check.then_some(y)
}

/// Principal logarithm by inverse scaling and squaring.
pub fn logm(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut m = a.clone();
    let mut k = 0u32;
    while (&m - &id).norm() > 0.1 {
        if k > 50 {
            return None;
        }
        m = sqrtm(&m)?;
        k += 1;
    }
    // log(I + x) = x - x^2/2 + x^3/3 - ...
    let x = &m - &id;
    let mut pow = x.clone();
    let mut sum = x.clone();
    for j in 2..40 {
        pow = &pow * &x;
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        sum += &pow * (sign / j as f64);
    }
    Some(sum * (1u64 << k) as f64)
}

/// Gram-Schmidt on the columns, keeping each column's direction.
pub fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = a.clone();
    for j in 0..q.ncols() {
        for i in 0..j {
            let proj = q.column(i).dot(&q.column(j));
            let qi = q.column(i).clone_owned();
            q.column_mut(j).axpy(-proj, &qi, 1.0);
        }
        let nrm = q.column(j).norm();
        if nrm > 0.0 {
            q.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
    q
}

/// Singular values, largest first.
pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let mut s = a.clone().svd(false, false).singular_values;
    s.as_mut_slice().sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Orthonormal basis of the orthogonal complement of the column span.
pub fn complement(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut proj = DMatrix::<f64>::identity(n, n);
    if a.ncols() > 0 {
        let svd = a.clone().svd(true, false);
        let u = svd.u.unwrap();
        let smax = svd.singular_values.max();
        for (j, s) in svd.singular_values.iter().enumerate() {
            if *s > tol * smax {
                let c = u.column(j);
                proj -= &c * c.transpose();
            }
        }
    }
    let eig = proj.symmetric_eigen();
    let cols: alloc::vec::Vec<_> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.5)
        .map(|(j, _)| eig.eigenvectors.column(j).clone_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
