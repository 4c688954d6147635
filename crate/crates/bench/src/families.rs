//! Map sequences `phi_n` and their limits for each scenario family.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rigidity_core::degree::MapWithJacobian;

use crate::config::{FamilyKind, ScenarioConfig};
use crate::expr::Expr;
use crate::BenchError;

/// `phi_1 .. phi_N` and the limit map.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub maps: Vec<MapWithJacobian>,
    pub limit: MapWithJacobian,
}

type Planar = dyn Fn(f64, f64) -> ([f64; 2], [f64; 4]) + Send + Sync;

/// Applies a planar map to every pair `(x_i, xi_i)` of `R^{2k}`.
fn diagonal(k: usize, f: Arc<Planar>) -> MapWithJacobian {
    let g = f.clone();
    MapWithJacobian::new(
        2 * k,
        move |z| {
            let mut out = vec![0.0; 2 * k];
            for i in 0..k {
                let (v, _) = f(z[i], z[k + i]);
                out[i] = v[0];
                out[k + i] = v[1];
            }
            out
        },
        move |z| {
            let mut j = DMatrix::zeros(2 * k, 2 * k);
            for i in 0..k {
                let (_, m) = g(z[i], z[k + i]);
                j[(i, i)] = m[0];
                j[(i, k + i)] = m[1];
                j[(k + i, i)] = m[2];
                j[(k + i, k + i)] = m[3];
            }
            j
        },
    )
}

fn rotation(theta: f64) -> Arc<Planar> {
    let (c, s) = (theta.cos(), theta.sin());
    Arc::new(move |x, xi| ([c * x + s * xi, -s * x + c * xi], [c, s, -s, c]))
}

fn shear(s: f64) -> Arc<Planar> {
    Arc::new(move |x, xi| ([x + s * xi, xi], [1.0, s, 0.0, 1.0]))
}

/// Unit rotation after `xi -> xi + sin(m x)/m^2`.
fn kicked_rotation(m: f64) -> Arc<Planar> {
    let (c, s) = (1f64.cos(), 1f64.sin());
    Arc::new(move |x, xi| {
        let k = (m * x).sin() / (m * m);
        let dk = (m * x).cos() / m;
        let p = xi + k;
        (
            [c * x + s * p, -s * x + c * p],
            [c + s * dk, s, -s + c * dk, c],
        )
    })
}

fn stretched(map: MapWithJacobian, k: usize, defect: f64) -> MapWithJacobian {
    if defect == 0.0 {
        return map;
    }
    let diag = DMatrix::from_fn(2 * k, 2 * k, |i, j| {
        if i != j {
            0.0
        } else if i < k {
            1.0
        } else {
            1.0 + defect
        }
    });
    MapWithJacobian::linear(diag).compose(&map)
}

/// Builds the sequence described by the configuration.
pub fn build(cfg: &ScenarioConfig) -> Result<Sequence, BenchError> {
    let k = cfg.scenario.half_dim;
    let count = cfg.scenario.sequence_length;
    let defect = cfg.scenario.defect;
    let index = |n: usize| n as f64;
    let (maps, limit): (Vec<MapWithJacobian>, MapWithJacobian) = match cfg.scenario.family {
        FamilyKind::LinearRotation => (
            (1..=count).map(|n| diagonal(k, rotation(1.0 + 1.0 / index(n)))).collect(),
            diagonal(k, rotation(1.0)),
        ),
        FamilyKind::Shear => (
            (1..=count).map(|n| diagonal(k, shear(1.0 + 1.0 / index(n)))).collect(),
            diagonal(k, shear(1.0)),
        ),
        FamilyKind::OscillatoryHamiltonian => (
            (1..=count).map(|n| diagonal(k, kicked_rotation(index(n)))).collect(),
            diagonal(k, rotation(1.0)),
        ),
        FamilyKind::Custom => {
            let c = cfg.custom.as_ref().ok_or_else(|| {
                BenchError::InvalidConfig("family custom needs a [custom] section".into())
            })?;
            let mut maps = Vec::with_capacity(count);
            for n in 1..=count {
                maps.push(Hamiltonian::parse(&c.hamiltonian, k, index(n))?.time_one(c.flow_steps));
            }
            (maps, Hamiltonian::parse(&c.limit, k, f64::INFINITY)?.time_one(c.flow_steps))
        }
    };
    Ok(Sequence {
        maps: maps.into_iter().map(|m| stretched(m, k, defect)).collect(),
        limit,
    })
}

/// A Hamiltonian with symbolic first and second derivatives; `n` is fixed
/// at construction.
#[derive(Debug, Clone)]
struct Hamiltonian {
    k: usize,
    grad: Arc<Vec<Expr>>,
    hess: Arc<Vec<Vec<Expr>>>,
}

fn variable_names(k: usize) -> Vec<&'static str> {
    if k == 1 {
        vec!["x", "xi", "n"]
    } else {
        vec!["x1", "x2", "xi1", "xi2", "n"]
    }
}

impl Hamiltonian {
    fn parse(src: &str, k: usize, n: f64) -> Result<Hamiltonian, BenchError> {
        let names = variable_names(k);
        let h = Expr::parse(src, &names)
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?
            .substitute(2 * k, n);
        let grad: Vec<Expr> = (0..2 * k).map(|i| h.derivative(i)).collect();
        let hess = grad.iter().map(|g| (0..2 * k).map(|j| g.derivative(j)).collect()).collect();
        let out = Hamiltonian { k, grad: Arc::new(grad), hess: Arc::new(hess) };
        let probe = vec![0.1; 2 * k];
        if !out.field(&probe).iter().all(|v| v.is_finite()) {
            return Err(BenchError::InvalidConfig(format!("{src:?} is not finite near the origin")));
        }
        Ok(out)
    }

    /// `X = (dH/dxi, -dH/dx)`.
    fn field(&self, z: &[f64]) -> DVector<f64> {
        let k = self.k;
        DVector::from_fn(2 * k, |i, _| {
            if i < k {
                self.grad[k + i].eval(z)
            } else {
                -self.grad[i - k].eval(z)
            }
        })
    }

    /// Derivative of the field.
    fn field_jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let k = self.k;
        DMatrix::from_fn(2 * k, 2 * k, |i, j| {
            if i < k {
                self.hess[k + i][j].eval(z)
            } else {
                -self.hess[i - k][j].eval(z)
            }
        })
    }

    /// Classical RK4 on the flow and its variational equation.
    fn flow(&self, z: &[f64], steps: usize, with_jacobian: bool) -> (Vec<f64>, DMatrix<f64>) {
        let d = 2 * self.k;
        let dt = 1.0 / steps as f64;
        let mut y = DVector::from_column_slice(z);
        let mut m = DMatrix::<f64>::identity(d, d);
        let rhs = |y: &DVector<f64>, m: &DMatrix<f64>| {
            let v = self.field(y.as_slice());
            let dm = if with_jacobian { self.field_jacobian(y.as_slice()) * m } else { m.clone() };
            (v, dm)
        };
        for _ in 0..steps {
            let (k1, l1) = rhs(&y, &m);
            let (k2, l2) = rhs(&(&y + &k1 * (dt / 2.0)), &(&m + &l1 * (dt / 2.0)));
            let (k3, l3) = rhs(&(&y + &k2 * (dt / 2.0)), &(&m + &l2 * (dt / 2.0)));
            let (k4, l4) = rhs(&(&y + &k3 * dt), &(&m + &l3 * dt));
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            if with_jacobian {
                m += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (dt / 6.0);
            }
        }
        (y.as_slice().to_vec(), m)
    }

    fn time_one(&self, steps: usize) -> MapWithJacobian {
        let (a, b) = (self.clone(), self.clone());
        MapWithJacobian::new(
            2 * self.k,
            move |z| a.flow(z, steps, false).0,
            move |z| b.flow(z, steps, true).1,
        )
    }
}
