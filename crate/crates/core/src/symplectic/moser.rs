//! Turning a nearly symplectic map into a symplectic one: mollify, then
//! correct by the time-one flow of Moser's vector field.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use super::{ball_points, omega, symplectic_residual, SymplecticError, SymplecticSpace};
use crate::degree::{Domain, MapWithJacobian};
use crate::linalg;
use crate::math;

/// Modulus of continuity of the differential: a bound on
/// `|dphi(x) - dphi(y)|` for `|x - y| <= delta`.
pub type Modulus = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct MoserConfig {
    pub modulus: Arc<Modulus>,
    /// Gauss nodes for the radial homotopy integral.
    pub quad_nodes: usize,
    /// Kernel nodes per axis for the mollifier.
    pub kernel_nodes: usize,
    /// Runge-Kutta steps on `t in [0, 1]`.
    pub flow_steps: usize,
    /// Largest input residual accepted.
    pub residual_gate: f64,
    pub min_width: f64,
    /// Smallest singular value allowed for the interpolated form.
    pub omega_floor: f64,
    /// Points used for the residual and distance reports.
    pub check_points: usize,
}

impl fmt::Debug for MoserConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoserConfig")
            .field("quad_nodes", &self.quad_nodes)
            .field("kernel_nodes", &self.kernel_nodes)
            .field("flow_steps", &self.flow_steps)
            .field("residual_gate", &self.residual_gate)
            .field("min_width", &self.min_width)
            .field("omega_floor", &self.omega_floor)
            .field("check_points", &self.check_points)
            .finish_non_exhaustive()
    }
}

impl MoserConfig {
    /// Defaults with a Lipschitz modulus `delta -> lip * delta`.
    pub fn lipschitz(lip: f64) -> Self {
        MoserConfig {
            modulus: Arc::new(move |d| lip * d),
            quad_nodes: 8,
            kernel_nodes: 4,
            flow_steps: 2,
            residual_gate: 1e-2,
            min_width: 1e-6,
            omega_floor: 1e-6,
            check_points: 32,
        }
    }
}

/// Everything needed to evaluate the corrected map.
struct Field {
    phi: MapWithJacobian,
    omega: DMatrix<f64>,
    kernel: Vec<(Vec<f64>, f64)>,
    quad: (Vec<f64>, Vec<f64>),
    steps: usize,
}

impl Field {
    fn mollified(&self, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        for (s, w) in &self.kernel {
            let p: Vec<f64> = x.iter().zip(s).map(|(a, b)| a - b).collect();
            for (o, v) in out.iter_mut().zip(self.phi.eval(&p)) {
                *o += w * v;
            }
        }
        out
    }

    fn mollified_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        let mut out = DMatrix::zeros(d, d);
        for (s, w) in &self.kernel {
            let p: Vec<f64> = x.iter().zip(s).map(|(a, b)| a - b).collect();
            out += self.phi.jacobian(&p) * *w;
        }
        out
    }

    /// The pulled-back form minus the standard one, as a matrix.
    fn beta(&self, x: &[f64]) -> DMatrix<f64> {
        let j = self.mollified_jacobian(x);
        j.transpose() * &self.omega * j - &self.omega
    }

    /// Radial homotopy primitive `sigma_x(v) = ∫ t beta_{tx}(x, v) dt`, as the
    /// vector `s` with `sigma_x(v) = s . v`.
    fn sigma(&self, x: &[f64]) -> DVector<f64> {
        let xv = DVector::from_column_slice(x);
        let mut s = DVector::zeros(x.len());
        let (nodes, weights) = &self.quad;
        for (t, w) in nodes.iter().zip(weights) {
            let p: Vec<f64> = x.iter().map(|v| t * v).collect();
            s += self.beta(&p).transpose() * &xv * (t * w);
        }
        s
    }

    fn omega_t(&self, t: f64, x: &[f64]) -> DMatrix<f64> {
        let j = self.mollified_jacobian(x);
        let pulled = j.transpose() * &self.omega * j;
        &self.omega * (1.0 - t) + pulled * t
    }

    /// Solves `omega_t(X, .) = -sigma`.
    fn vector_field(&self, t: f64, x: &[f64]) -> DVector<f64> {
        let s = self.sigma(x);
        let ot = self.omega_t(t, x);
        ot.transpose().lu().solve(&(-s)).unwrap_or_else(|| DVector::zeros(x.len()))
    }

    fn flow(&self, x: &[f64]) -> Vec<f64> {
        let h = 1.0 / self.steps as f64;
        let mut y = DVector::from_column_slice(x);
        for k in 0..self.steps {
            let t = k as f64 * h;
            let k1 = self.vector_field(t, y.as_slice());
            let k2 = self.vector_field(t + h / 2.0, (&y + &k1 * (h / 2.0)).as_slice());
            let k3 = self.vector_field(t + h / 2.0, (&y + &k2 * (h / 2.0)).as_slice());
            let k4 = self.vector_field(t + h, (&y + &k3 * h).as_slice());
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        y.as_slice().to_vec()
    }

    fn flow_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        let mut j = DMatrix::zeros(d, d);
        for k in 0..d {
            let h = 1e-5 * (1.0 + math::abs(x[k]));
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (self.flow(&xp), self.flow(&xm));
            for r in 0..d {
                j[(r, k)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }
}

/// Result of [`moser_correct`].
#[derive(Clone)]
pub struct MoserOutput {
    /// The corrected map, defined on `B_{r2}` with `r2 = (3r + R)/4`.
    pub psi: MapWithJacobian,
    /// Mollifier half-width.
    pub width: f64,
    pub residual_before: f64,
    pub residual_after: f64,
    /// Sampled `sup |phi - psi|` on `B_r`.
    pub distance: f64,
    field: Arc<Field>,
}

impl fmt::Debug for MoserOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoserOutput")
            .field("width", &self.width)
            .field("residual_before", &self.residual_before)
            .field("residual_after", &self.residual_after)
            .field("distance", &self.distance)
            .finish_non_exhaustive()
    }
}

impl MoserOutput {
    /// Largest gap between the exterior derivative of the primitive (central
    /// differences) and the form it should equal, over the given points.
    pub fn primitive_error(&self, points: &[Vec<f64>]) -> f64 {
        let f = &self.field;
        let mut worst: f64 = 0.0;
        for p in points {
            let d = p.len();
            let beta = f.beta(p);
            let mut ds = DMatrix::zeros(d, d);
            for k in 0..d {
                let h = 1e-4;
                let mut xp = p.clone();
                let mut xm = p.clone();
                xp[k] += h;
                xm[k] -= h;
                let g = (f.sigma(&xp) - f.sigma(&xm)) / (2.0 * h);
                for i in 0..d {
                    ds[(i, k)] = g[i];
                }
            }
            // (d sigma)_{ki} = ∂_k s_i - ∂_i s_k
            let dsig = ds.transpose() - &ds;
            worst = worst.max((dsig - beta).amax());
        }
        worst
    }

    /// The mollified map before correction.
    pub fn mollified(&self, x: &[f64]) -> Vec<f64> {
        self.field.mollified(x)
    }
}

/// Mollifier nodes: a tensor Gauss rule weighted by `(1 - s^2)^3`,
/// scaled to half-width `width`, weights summing to 1.
fn kernel(dim: usize, per_axis: usize, width: f64) -> Vec<(Vec<f64>, f64)> {
    let (nodes, weights) = math::gauss_legendre(per_axis);
    let axis: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&weights)
        .map(|(t, w)| {
            let s = 2.0 * t - 1.0;
            let b = 1.0 - s * s;
            (s, w * b * b * b)
        })
        .collect();
    let total = per_axis.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut sum = 0.0;
    for mut idx in 0..total {
        let mut p = Vec::with_capacity(dim);
        let mut w = 1.0;
        for _ in 0..dim {
            let (s, ws) = axis[idx % per_axis];
            idx /= per_axis;
            p.push(width * s);
            w *= ws;
        }
        sum += w;
        out.push((p, w));
    }
    for (_, w) in out.iter_mut() {
        *w /= sum;
    }
    out
}

/// Approximates a `C^1` nearly symplectic map on `B_R` by a symplectic one
/// on `B_{r2}`, `r < r2 < R`.
pub fn moser_correct(
    phi: &MapWithJacobian,
    r: f64,
    big_r: f64,
    eps: f64,
    cfg: &MoserConfig,
) -> Result<MoserOutput, SymplecticError> {
    let space = SymplecticSpace::of_dim(phi.dim())?;
    let d = space.dim();
    if !(r > 0.0 && big_r > r && eps > 0.0) {
        return Err(SymplecticError::PreconditionViolated("0 < r < R and eps > 0".into()));
    }
    let gate_pts = ball_points(d, big_r, cfg.check_points);
    let before = symplectic_residual(phi, &gate_pts)?;
    if before > cfg.residual_gate {
        return Err(SymplecticError::DegenerateOmegaT(format!(
            "input residual {:e} exceeds the gate {:e}",
            before, cfg.residual_gate
        )));
    }

    let r1 = 0.5 * (big_r + r);
    let r2 = 0.5 * (r1 + r);
    let mut width = 0.5 * (big_r - r1);
    while (cfg.modulus)(width) > eps / 4.0 {
        width *= 0.5;
        if width < cfg.min_width {
            return Err(SymplecticError::MollificationTooCoarse { min_width: cfg.min_width });
        }
    }

    let field = Arc::new(Field {
        phi: phi.clone(),
        omega: omega(space.half_dim()),
        kernel: kernel(d, cfg.kernel_nodes, width),
        quad: math::gauss_legendre(cfg.quad_nodes),
        steps: cfg.flow_steps,
    });

    for p in ball_points(d, r1, cfg.check_points) {
        for k in 0..=4 {
            let s = linalg::singular_values(&field.omega_t(k as f64 / 4.0, &p));
            if s[d - 1] < cfg.omega_floor {
                return Err(SymplecticError::DegenerateOmegaT(format!(
                    "smallest singular value {:e} at t = {}",
                    s[d - 1],
                    k as f64 / 4.0
                )));
            }
        }
    }

    let (fe, fj) = (field.clone(), field.clone());
    let psi = MapWithJacobian::new(
        d,
        move |x| fe.mollified(&fe.flow(x)),
        move |x| fj.mollified_jacobian(&fj.flow(x)) * fj.flow_jacobian(x),
    )
    .with_domain(Domain::Ball { center: alloc::vec![0.0; d], radius: r2 });

    let pts = ball_points(d, r, cfg.check_points);
    let after = symplectic_residual(&psi, &pts)?;
    let mut distance: f64 = 0.0;
    for p in &pts {
        let gap: Vec<f64> = phi.eval(p).iter().zip(psi.eval(p)).map(|(a, b)| a - b).collect();
        distance = distance.max(math::norm(&gap));
    }
    Ok(MoserOutput {
        psi,
        width,
        residual_before: before,
        residual_after: after,
        distance,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn kernel_is_a_symmetric_probability() {
        let k = kernel(2, 4, 0.1);
        let total: f64 = k.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let mean: f64 = k.iter().map(|(p, w)| p[0] * w).sum();
        assert!(mean.abs() < 1e-16);
        assert!(k.iter().all(|(p, _)| p.iter().all(|v| v.abs() < 0.1)));
    }

    #[test]
    fn identity_is_left_alone() {
        let out = moser_correct(&MapWithJacobian::identity(2), 0.5, 1.0, 1e-3, &MoserConfig::lipschitz(1.0))
            .unwrap();
        assert!(out.residual_after <= 1e-8);
        assert!(out.distance <= 1e-8);
    }

    #[test]
    fn noise_is_corrected() {
        let noisy = MapWithJacobian::new(
            2,
            |p| {
                vec![
                    p[0] + p[1] + 1e-3 * math::sin(2.0 * p[0]),
                    p[1] + 1e-3 * math::sin(p[0] + p[1]),
                ]
            },
            |p| {
                let c = math::cos(p[0] + p[1]);
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[1.0 + 2e-3 * math::cos(2.0 * p[0]), 1.0, 1e-3 * c, 1.0 + 1e-3 * c],
                )
            },
        );
        let out = moser_correct(&noisy, 0.5, 1.0, 1e-2, &MoserConfig::lipschitz(0.01)).unwrap();
        assert!(out.residual_before > 1e-3);
        assert!(out.residual_after <= out.residual_before / 100.0, "{:?}", out);
        assert!(out.distance <= 1e-2);
        let probes = ball_points(2, 0.4, 5);
        assert!(out.primitive_error(&probes) <= 1e-6);
    }

    #[test]
    fn far_from_symplectic_is_rejected() {
        let big = MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
        assert!(matches!(
            moser_correct(&big, 0.5, 1.0, 1e-2, &MoserConfig::lipschitz(1.0)),
            Err(SymplecticError::DegenerateOmegaT(_))
        ));
        let steep = MoserConfig::lipschitz(1e9);
        assert!(matches!(
            moser_correct(&MapWithJacobian::identity(2), 0.5, 1.0, 1e-3, &steep),
            Err(SymplecticError::MollificationTooCoarse { .. })
        ));
    }
}
