//! Maps `R^d -> R^d` bundled with their Jacobians.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use super::DegreeError;
use crate::math;

pub type EvalFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
pub type JacobianFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Where a map is defined.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Whole,
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Ball { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                math::norm(&d) < *radius
            }
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v > *l && *v < *h),
        }
    }

    /// A bounded box to draw probe points from; `[-1, 1]^d` for the whole space.
    pub fn probe_box(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Whole => (alloc::vec![-1.0; dim], alloc::vec![1.0; dim]),
            Domain::Ball { center, radius } => {
                let h = radius / math::sqrt(dim as f64);
                (
                    center.iter().map(|c| c - h).collect(),
                    center.iter().map(|c| c + h).collect(),
                )
            }
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }
}

/// A C^1 map with an analytic Jacobian. Cheap to clone.
#[derive(Clone)]
pub struct MapWithJacobian {
    dim: usize,
    eval: Arc<EvalFn>,
    jacobian: Arc<JacobianFn>,
    domain: Domain,
}

impl fmt::Debug for MapWithJacobian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapWithJacobian")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl MapWithJacobian {
    pub fn new<F, J>(dim: usize, eval: F, jacobian: J) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        MapWithJacobian {
            dim,
            eval: Arc::new(eval),
            jacobian: Arc::new(jacobian),
            domain: Domain::Whole,
        }
    }

    /// `x -> m x + b`.
    pub fn affine(m: DMatrix<f64>, b: Vec<f64>) -> Self {
        assert!(m.is_square() && b.len() == m.nrows());
        let dim = m.nrows();
        let m2 = m.clone();
        MapWithJacobian::new(
            dim,
            move |x| {
                let mut y = b.clone();
                for i in 0..dim {
                    for j in 0..dim {
                        y[i] += m[(i, j)] * x[j];
                    }
                }
                y
            },
            move |_| m2.clone(),
        )
    }

    pub fn linear(m: DMatrix<f64>) -> Self {
        let d = m.nrows();
        MapWithJacobian::affine(m, alloc::vec![0.0; d])
    }

    pub fn identity(dim: usize) -> Self {
        MapWithJacobian::linear(DMatrix::identity(dim, dim))
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        (self.jacobian)(x)
    }

    /// `self ∘ inner`, on the domain of `inner`.
    pub fn compose(&self, inner: &MapWithJacobian) -> MapWithJacobian {
        assert_eq!(self.dim, inner.dim);
        let (a, b) = (self.clone(), inner.clone());
        let (a2, b2) = (self.clone(), inner.clone());
        MapWithJacobian::new(
            self.dim,
            move |x| a.eval(&b.eval(x)),
            move |x| a2.jacobian(&b2.eval(x)) * b2.jacobian(x),
        )
        .with_domain(inner.domain.clone())
    }

    /// Largest relative gap between the Jacobian and central differences of
    /// `eval`, over `probes` quasi-random points of the domain.
    pub fn jacobian_mismatch(&self, probes: usize) -> f64 {
        let d = self.dim;
        let (lo, hi) = self.domain.probe_box(d);
        let mut worst: f64 = 0.0;
        let mut found = 0;
        let mut i = 0;
        while found < probes && i < 50 * probes {
            let u = math::halton(i, d);
            i += 1;
            let x: Vec<f64> = (0..d).map(|k| lo[k] + u[k] * (hi[k] - lo[k])).collect();
            if !self.domain.contains(&x) {
                continue;
            }
            found += 1;
            let j = self.jacobian(&x);
            let scale = j.iter().map(|v| math::abs(*v)).fold(1.0, f64::max);
            for k in 0..d {
                let h = 1e-6 * (1.0 + math::abs(x[k]));
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let (fp, fm) = (self.eval(&xp), self.eval(&xm));
                for r in 0..d {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    worst = worst.max(math::abs(fd - j[(r, k)]) / scale);
                }
            }
        }
        worst
    }

    /// Checks the Jacobian against central differences at 20 probe points.
    pub fn verify_jacobian(&self) -> Result<(), DegreeError> {
        let gap = self.jacobian_mismatch(20);
        if gap <= 1e-5 {
            Ok(())
        } else {
            Err(DegreeError::JacobianMismatch(gap))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> MapWithJacobian {
        MapWithJacobian::new(
            2,
            |p| alloc::vec![p[0] * p[0] - p[1] * p[1], 2.0 * p[0] * p[1]],
            |p| DMatrix::from_row_slice(2, 2, &[2.0 * p[0], -2.0 * p[1], 2.0 * p[1], 2.0 * p[0]]),
        )
    }

    #[test]
    fn analytic_jacobian_passes() {
        assert!(square().verify_jacobian().is_ok());
    }

    #[test]
    fn wrong_jacobian_is_caught() {
        let bad = MapWithJacobian::new(
            1,
            |p| alloc::vec![p[0] * p[0]],
            |_| DMatrix::from_element(1, 1, 1.0),
        );
        assert!(matches!(bad.verify_jacobian(), Err(DegreeError::JacobianMismatch(_))));
    }

    #[test]
    fn composition_chains_jacobians() {
        let f = square();
        let g = f.compose(&MapWithJacobian::linear(DMatrix::from_row_slice(
            2,
            2,
            &[1.0, 2.0, -1.0, 0.5],
        )));
        assert!(g.verify_jacobian().is_ok());
    }
}
