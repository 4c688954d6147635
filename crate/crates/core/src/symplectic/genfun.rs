//! Generating functions `S(x, y)` of graph-type symplectic maps, with the
//! convention `xi = -∂_x S`, `xi' = ∂_y S`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use super::SymplecticError;
use crate::degree::{BoxWindow, MapWithJacobian};
use crate::math;

type ValueFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync;
type MixedFn = dyn Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync;

const DEGENERATE_DET: f64 = 1e-10;

#[derive(Clone)]
pub struct GeneratingFunction {
    n: usize,
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
    mixed: Arc<MixedFn>,
}

impl fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingFunction").field("n", &self.n).finish_non_exhaustive()
    }
}

impl GeneratingFunction {
    /// `gradient` returns `(∂_x S, ∂_y S)`. The mixed Hessian is taken by
    /// central differences of the `y`-gradient; use [`Self::with_mixed_hessian`]
    /// to supply it exactly.
    pub fn new<V, G>(n: usize, value: V, gradient: G) -> Self
    where
        V: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        let gradient: Arc<GradientFn> = Arc::new(gradient);
        let g = gradient.clone();
        let mixed = move |x: &[f64], y: &[f64]| {
            let h = 1e-6;
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let (_, gp) = g(&xp, y);
                let (_, gm) = g(&xm, y);
                for j in 0..n {
                    // row: x index, column: y index
                    m[(i, j)] = (gp[j] - gm[j]) / (2.0 * h);
                }
            }
            m
        };
        GeneratingFunction { n, value: Arc::new(value), gradient, mixed: Arc::new(mixed) }
    }

    /// Replaces the mixed Hessian `∂²S/∂x_i∂y_j`.
    pub fn with_mixed_hessian<M>(mut self, mixed: M) -> Self
    where
        M: Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.mixed = Arc::new(mixed);
        self
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.value)(x, y)
    }

    pub fn gradient(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.gradient)(x, y)
    }

    pub fn mixed_hessian(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        (self.mixed)(x, y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GfReport {
    pub points: usize,
    /// Largest distance between `(x, y; -∂_x S, -∂_y S)` and the twisted
    /// graph point of `phi` over the same `(x, xi)`.
    pub max_discrepancy: f64,
    pub min_mixed_det: f64,
    pub min_graph_det: f64,
    /// The sheaf of the epigraph `{s >= S}` is simple along its conormal:
    /// every value and gradient is finite and the graph condition holds.
    pub simple: bool,
}

/// Compares the microsupport of the epigraph of `s` with the twisted graph
/// of `phi` on a `per_axis^{2n}` grid over `window` (coordinates `(x, y)`).
pub fn gf_quantization_check(
    s: &GeneratingFunction,
    phi: &MapWithJacobian,
    window: &BoxWindow,
    per_axis: usize,
) -> Result<GfReport, SymplecticError> {
    let n = s.half_dim();
    if phi.dim() != 2 * n {
        return Err(SymplecticError::DimensionMismatch { expected: 2 * n, found: phi.dim() });
    }
    if window.dim() != 2 * n {
        return Err(SymplecticError::DimensionMismatch { expected: 2 * n, found: window.dim() });
    }
    let mut report = GfReport {
        points: 0,
        max_discrepancy: 0.0,
        min_mixed_det: f64::INFINITY,
        min_graph_det: f64::INFINITY,
        simple: true,
    };
    for p in window.grid(per_axis) {
        let (x, y) = p.split_at(n);
        let mixed = math::abs(s.mixed_hessian(x, y).determinant());
        if !(mixed >= DEGENERATE_DET) {
            return Err(SymplecticError::DegenerateGF(alloc::format!(
                "mixed Hessian determinant {mixed:e} at {p:?}"
            )));
        }
        let (sx, sy) = s.gradient(x, y);
        let xi: Vec<f64> = sx.iter().map(|v| -v).collect();
        let z: Vec<f64> = x.iter().chain(&xi).copied().collect();
        let graph = math::abs(phi.jacobian(&z).view((0, n), (n, n)).determinant());
        if !(graph >= DEGENERATE_DET) {
            return Err(SymplecticError::DegenerateGF(alloc::format!(
                "map is not of graph type at {z:?}: det dx'/dxi = {graph:e}"
            )));
        }
        let img = phi.eval(&z);
        let gap: Vec<f64> = (0..n)
            .map(|i| img[i] - y[i])
            .chain((0..n).map(|i| img[n + i] - sy[i]))
            .collect();
        let d = math::norm(&gap);
        report.simple &= s.value(x, y).is_finite() && d.is_finite();
        report.max_discrepancy = report.max_discrepancy.max(d);
        report.min_mixed_det = report.min_mixed_det.min(mixed);
        report.min_graph_det = report.min_graph_det.min(graph);
        report.points += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rotation() -> MapWithJacobian {
        MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]))
    }

    fn window() -> BoxWindow {
        BoxWindow::cube(2, 1.0)
    }

    #[test]
    fn bilinear_generates_quarter_turn() {
        let s = GeneratingFunction::new(1, |x, y| -x[0] * y[0], |x, y| (vec![-y[0]], vec![-x[0]]));
        let rep = gf_quantization_check(&s, &rotation(), &window(), 11).unwrap();
        assert_eq!(rep.points, 121);
        assert!(rep.max_discrepancy <= 1e-10);
        assert!(rep.simple);
        assert!((rep.min_mixed_det - 1.0).abs() < 1e-6);
    }

    #[test]
    fn perturbation_is_reported() {
        let k = 1e-3;
        let s = GeneratingFunction::new(
            1,
            move |x, y| -x[0] * y[0] + k * x[0] * y[0] * y[0],
            move |x, y| (vec![-y[0] + k * y[0] * y[0]], vec![-x[0] + 2.0 * k * x[0] * y[0]]),
        );
        let rep = gf_quantization_check(&s, &rotation(), &window(), 11).unwrap();
        let want = window()
            .grid(11)
            .map(|p| math::norm(&[k * p[1] * p[1], 2.0 * k * p[0] * p[1]]))
            .fold(0.0, f64::max);
        assert!(rep.max_discrepancy > 0.0);
        assert!((rep.max_discrepancy - want).abs() <= 1e-12);
    }

    #[test]
    fn identity_has_no_generating_function() {
        let s = GeneratingFunction::new(1, |x, y| -x[0] * y[0], |x, y| (vec![-y[0]], vec![-x[0]]));
        let err = gf_quantization_check(&s, &MapWithJacobian::identity(2), &window(), 5).unwrap_err();
        assert!(matches!(err, SymplecticError::DegenerateGF(_)));
    }

    #[test]
    fn degenerate_function_rejected() {
        let s = GeneratingFunction::new(1, |x, _| x[0] * x[0], |x, _| (vec![2.0 * x[0]], vec![0.0]));
        let err = gf_quantization_check(&s, &rotation(), &window(), 5).unwrap_err();
        assert!(matches!(err, SymplecticError::DegenerateGF(_)));
    }
}
