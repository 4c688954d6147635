//! Writing a symplectic map as the time-one map of a compactly supported
//! Hamiltonian isotopy.
//!
//! The map is split as `phi = tau + P ∘ phi_hat` with `P = dphi_0`, so that
//! `phi_hat(0) = 0` and `dphi_hat_0 = I`. The affine part is joined to the
//! identity by `A_t = exp(tL) + t tau` with `L = log P`. The nonlinear part is
//! first made the identity near 0 by blending its type-II generating function
//! `f(x, eta)` (`xi = ∂_x f`, `x' = ∂_eta f`) with `<x, eta>`, then joined to
//! the identity by the rescaling `psi_t(x) = t^{-1} phi_hat'(t x)`. The
//! Hamiltonian of `A_t ∘ psi_t` is recovered by radial integration and cut
//! off outside a box that contains every trajectory starting in `B_r`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use super::{ball_points, omega, SymplecticError, SymplecticSpace};
use crate::degree::MapWithJacobian;
use crate::linalg;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct IsotopyConfig {
    /// Gauss nodes for radial integrals.
    pub quad_nodes: usize,
    /// Runge-Kutta steps per unit time.
    pub steps: usize,
    /// Points used to test a blend width.
    pub blend_samples: usize,
    pub min_blend: f64,
    /// Points and times used to bound the trajectories of `B_r`.
    pub hull_samples: usize,
    pub hull_times: usize,
}

impl Default for IsotopyConfig {
    fn default() -> Self {
        IsotopyConfig {
            quad_nodes: 32,
            steps: 200,
            blend_samples: 200,
            min_blend: 1e-6,
            hull_samples: 200,
            hull_times: 21,
        }
    }
}

fn smoothstep(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if u >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let (u2, u3) = (u * u, u * u * u);
        (
            u3 * (10.0 - 15.0 * u + 6.0 * u2),
            30.0 * u2 * (1.0 - u) * (1.0 - u),
            60.0 * u * (1.0 - u) * (1.0 - 2.0 * u),
        )
    }
}

fn split(v: &[f64], n: usize) -> (&[f64], &[f64]) {
    (&v[..n], &v[n..])
}

fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

/// `phi_hat` with its generating function blended to `<x, eta>` on the ball
/// of radius `width` (in `(x, eta)` coordinates).
struct Blended {
    n: usize,
    phi_hat: MapWithJacobian,
    width: f64,
    quad: (Vec<f64>, Vec<f64>),
    /// `phi_hat` is the identity on the samples, so the blend is skipped.
    trivial: bool,
}

/// Generating-function data at one point `(x, eta)`.
struct ChartPoint {
    /// `(xi - eta, x' - x)`: the gradient of `f - <x, eta>`.
    grad_g: DVector<f64>,
    /// Hessian of `f`.
    hess_f: DMatrix<f64>,
}

impl Blended {
    /// Solves `Xi(x, xi) = eta` for `xi`.
    fn chart(&self, x: &[f64], eta: &[f64]) -> Option<ChartPoint> {
        let n = self.n;
        let mut xi = eta.to_vec();
        let mut done = false;
        for _ in 0..60 {
            let p = join(x, &xi);
            let img = self.phi_hat.eval(&p);
            let res: Vec<f64> = img[n..].iter().zip(eta).map(|(a, b)| a - b).collect();
            if math::norm(&res) <= 1e-15 * (1.0 + math::norm(eta)) {
                done = true;
                break;
            }
            let j = self.phi_hat.jacobian(&p);
            let d = j.view((n, n), (n, n)).clone_owned();
            let step = d.lu().solve(&DVector::from_vec(res))?;
            for (v, s) in xi.iter_mut().zip(step.iter()) {
                *v -= s;
            }
        }
        let p = join(x, &xi);
        let img = self.phi_hat.eval(&p);
        if !done {
            let res: Vec<f64> = img[n..].iter().zip(eta).map(|(a, b)| a - b).collect();
            if math::norm(&res) > 1e-12 * (1.0 + math::norm(eta)) {
                return None;
            }
        }
        let j = self.phi_hat.jacobian(&p);
        let (a, b) = (j.view((0, 0), (n, n)), j.view((0, n), (n, n)));
        let (c, d) = (j.view((n, 0), (n, n)), j.view((n, n), (n, n)));
        let dinv = d.clone_owned().try_inverse()?;
        let xi_x = -&dinv * c;
        let mut hess = DMatrix::zeros(2 * n, 2 * n);
        hess.view_mut((0, 0), (n, n)).copy_from(&xi_x);
        hess.view_mut((0, n), (n, n)).copy_from(&dinv);
        hess.view_mut((n, 0), (n, n)).copy_from(&(a + b * &xi_x));
        hess.view_mut((n, n), (n, n)).copy_from(&(b * &dinv));
        let mut grad = DVector::zeros(2 * n);
        for i in 0..n {
            grad[i] = xi[i] - eta[i];
            grad[n + i] = img[i] - x[i];
        }
        Some(ChartPoint { grad_g: grad, hess_f: hess })
    }

    /// `g = f - <x, eta>` by radial integration of its gradient.
    fn remainder(&self, w: &[f64]) -> Option<f64> {
        let n = self.n;
        let (nodes, weights) = &self.quad;
        let mut acc = 0.0;
        for (t, wt) in nodes.iter().zip(weights) {
            let p: Vec<f64> = w.iter().map(|v| t * v).collect();
            let (x, eta) = split(&p, n);
            let cp = self.chart(x, eta)?;
            acc += wt * cp.grad_g.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        }
        Some(acc)
    }

    /// Gradient and Hessian of the blended generating function at `(x, eta)`.
    fn blended_derivatives(&self, w: &[f64]) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let n = self.n;
        let mut swap = DMatrix::zeros(2 * n, 2 * n);
        let mut lin = DVector::zeros(2 * n);
        for i in 0..n {
            swap[(i, n + i)] = 1.0;
            swap[(n + i, i)] = 1.0;
            lin[i] = w[n + i];
            lin[n + i] = w[i];
        }
        let rho = math::norm(w);
        if rho <= self.width {
            return Some((lin, swap));
        }
        let (x, eta) = split(w, n);
        let cp = self.chart(x, eta)?;
        if rho >= 2.0 * self.width {
            return Some((lin + cp.grad_g, cp.hess_f));
        }
        let (chi, d1, d2) = smoothstep(rho / self.width - 1.0);
        let unit = DVector::from_iterator(2 * n, w.iter().map(|v| v / rho));
        let grad_chi = &unit * (d1 / self.width);
        let proj = &unit * unit.transpose();
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        let hess_chi = &proj * (d2 / (self.width * self.width))
            + (id - &proj) * (d1 / (self.width * rho));
        let g = self.remainder(w)?;
        let hess_g = &cp.hess_f - &swap;
        let grad = lin + &cp.grad_g * chi + &grad_chi * g;
        let hess = swap
            + hess_g * chi
            + &grad_chi * cp.grad_g.transpose()
            + &cp.grad_g * grad_chi.transpose()
            + hess_chi * g;
        Some((grad, hess))
    }

    /// The blended map and its Jacobian.
    fn eval(&self, p: &[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> {
        let n = self.n;
        if self.trivial || math::norm(p) < self.width {
            return Some((p.to_vec(), DMatrix::identity(2 * n, 2 * n)));
        }
        let img = self.phi_hat.eval(p);
        let (x, xi) = split(p, n);
        if math::norm(&join(x, &img[n..])) >= 2.0 * self.width {
            return Some((img, self.phi_hat.jacobian(p)));
        }
        let mut eta = img[n..].to_vec();
        let mut found = None;
        for _ in 0..60 {
            let w = join(x, &eta);
            let (grad, hess) = self.blended_derivatives(&w)?;
            let res: Vec<f64> = (0..n).map(|i| grad[i] - xi[i]).collect();
            let fxe = hess.view((0, n), (n, n)).clone_owned();
            if math::norm(&res) <= 1e-14 * (1.0 + math::norm(xi)) {
                found = Some((grad, hess));
                break;
            }
            let step = fxe.lu().solve(&DVector::from_vec(res))?;
            for (v, s) in eta.iter_mut().zip(step.iter()) {
                *v -= s;
            }
        }
        let (grad, hess) = found?;
        let fxx = hess.view((0, 0), (n, n));
        let inv = hess.view((0, n), (n, n)).clone_owned().try_inverse()?;
        let fex = hess.view((n, 0), (n, n));
        let fee = hess.view((n, n), (n, n));
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        j.view_mut((0, 0), (n, n)).copy_from(&(fex - fee * &inv * fxx));
        j.view_mut((0, n), (n, n)).copy_from(&(fee * &inv));
        j.view_mut((n, 0), (n, n)).copy_from(&(-&inv * fxx));
        j.view_mut((n, n), (n, n)).copy_from(&inv);
        let out: Vec<f64> = (0..n).map(|i| grad[n + i]).chain(eta.iter().copied()).collect();
        Some((out, j))
    }

    fn eval_or_raw(&self, p: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        self.eval(p).unwrap_or_else(|| (self.phi_hat.eval(p), self.phi_hat.jacobian(p)))
    }

    /// `psi_t^{-1}(w)` for `psi_t(x) = t^{-1} phi_hat'(t x)`, by Newton from `w`.
    fn rescaled_inverse(&self, t: f64, w: &[f64]) -> Vec<f64> {
        let mut x = w.to_vec();
        for _ in 0..40 {
            let p: Vec<f64> = x.iter().map(|v| t * v).collect();
            let (img, j) = self.eval_or_raw(&p);
            let res: Vec<f64> = img.iter().zip(w).map(|(a, b)| a / t - b).collect();
            if math::norm(&res) <= 1e-15 * (1.0 + math::norm(w)) {
                break;
            }
            let Some(step) = j.lu().solve(&DVector::from_vec(res)) else {
                break;
            };
            for (v, s) in x.iter_mut().zip(step.iter()) {
                *v -= s;
            }
        }
        x
    }

    /// Velocity field of `psi_t` at the point `w`.
    fn velocity(&self, t: f64, w: &[f64]) -> DVector<f64> {
        let d = w.len();
        if t <= 0.0 {
            return DVector::zeros(d);
        }
        let x = self.rescaled_inverse(t, w);
        let p: Vec<f64> = x.iter().map(|v| t * v).collect();
        let (img, j) = self.eval_or_raw(&p);
        let jp = &j * DVector::from_column_slice(&p);
        DVector::from_iterator(d, (0..d).map(|i| (jp[i] - img[i]) / (t * t)))
    }
}

/// Product cutoff: 1 on the inner box, 0 outside the outer box.
#[derive(Debug, Clone, PartialEq)]
struct Cutoff {
    inner_lo: Vec<f64>,
    inner_hi: Vec<f64>,
    outer_lo: Vec<f64>,
    outer_hi: Vec<f64>,
}

impl Cutoff {
    fn axis(&self, i: usize, v: f64) -> (f64, f64) {
        let (a, b) = (self.inner_lo[i], self.inner_hi[i]);
        let (lo, hi) = (self.outer_lo[i], self.outer_hi[i]);
        if v <= lo || v >= hi {
            (0.0, 0.0)
        } else if v < a {
            let (s, ds, _) = smoothstep((v - lo) / (a - lo));
            (s, ds / (a - lo))
        } else if v > b {
            let (s, ds, _) = smoothstep((hi - v) / (hi - b));
            (s, -ds / (hi - b))
        } else {
            (1.0, 0.0)
        }
    }

    fn value_and_gradient(&self, z: &[f64]) -> (f64, DVector<f64>) {
        let d = z.len();
        let parts: Vec<(f64, f64)> = (0..d).map(|i| self.axis(i, z[i])).collect();
        let value: f64 = parts.iter().map(|p| p.0).product();
        let grad = DVector::from_iterator(
            d,
            (0..d).map(|i| {
                parts
                    .iter()
                    .enumerate()
                    .map(|(k, p)| if k == i { p.1 } else { p.0 })
                    .product::<f64>()
            }),
        );
        (value, grad)
    }
}

/// A Hamiltonian `H(z, t)`, zero outside `support x [0, 1]`, with its flow.
#[derive(Clone)]
pub struct HamiltonianIsotopy {
    n: usize,
    omega: DMatrix<f64>,
    generator: DMatrix<f64>,
    tau: DVector<f64>,
    blend: Arc<Blended>,
    cutoff: Cutoff,
    steps: usize,
}

impl fmt::Debug for HamiltonianIsotopy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianIsotopy")
            .field("n", &self.n)
            .field("generator", &self.generator)
            .field("tau", &self.tau)
            .field("blend_width", &self.blend.width)
            .field("support", &(&self.cutoff.outer_lo, &self.cutoff.outer_hi))
            .field("steps", &self.steps)
            .finish()
    }
}

impl HamiltonianIsotopy {
    pub fn half_dim(&self) -> usize {
        self.n
    }

    /// The box `C` outside which `H` vanishes.
    pub fn support(&self) -> (&[f64], &[f64]) {
        (&self.cutoff.outer_lo, &self.cutoff.outer_hi)
    }

    /// The box on which `H` is not cut off.
    pub fn core(&self) -> (&[f64], &[f64]) {
        (&self.cutoff.inner_lo, &self.cutoff.inner_hi)
    }

    pub fn blend_width(&self) -> f64 {
        self.blend.width
    }

    /// The Hamiltonian matrix `L` with `exp(L) = dphi_0`.
    pub fn linear_generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn steps_per_unit_time(&self) -> usize {
        self.steps
    }

    fn affine_inverse(&self, t: f64, z: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let back = linalg::expm(&(&self.generator * (-t)));
        let shifted = DVector::from_column_slice(z) - &self.tau * t;
        ((&back * shifted).as_slice().to_vec(), back)
    }

    /// Hamiltonian of the affine path, and its gradient.
    fn affine_part(&self, t: f64, z: &[f64]) -> (f64, DVector<f64>) {
        let zv = DVector::from_column_slice(z);
        let ol = &self.omega * &self.generator;
        let shift = &self.omega * (&self.tau - &self.generator * &self.tau * t);
        let grad = &ol * &zv + &shift;
        let val = 0.5 * zv.dot(&(&ol * &zv)) + zv.dot(&shift);
        (val, grad)
    }

    /// `h(w) = -∫ omega(Y(sw), w) ds` for the rescaled family's velocity `Y`.
    fn rescaled_part(&self, t: f64, w: &[f64]) -> f64 {
        let wv = DVector::from_column_slice(w);
        let ow = &self.omega * &wv;
        let (nodes, weights) = &self.blend.quad;
        let mut acc = 0.0;
        for (s, wt) in nodes.iter().zip(weights) {
            let p: Vec<f64> = w.iter().map(|v| s * v).collect();
            acc -= wt * self.blend.velocity(t, &p).dot(&ow);
        }
        acc
    }

    pub fn hamiltonian(&self, z: &[f64], t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        let (chi, _) = self.cutoff.value_and_gradient(z);
        if chi == 0.0 {
            return 0.0;
        }
        let (ha, _) = self.affine_part(t, z);
        let (w, _) = self.affine_inverse(t, z);
        chi * (ha + self.rescaled_part(t, &w))
    }

    pub fn gradient(&self, z: &[f64], t: f64) -> Vec<f64> {
        let d = z.len();
        if !(0.0..=1.0).contains(&t) {
            return vec![0.0; d];
        }
        let (chi, grad_chi) = self.cutoff.value_and_gradient(z);
        if chi == 0.0 && grad_chi.iter().all(|g| *g == 0.0) {
            return vec![0.0; d];
        }
        let (ha, grad_a) = self.affine_part(t, z);
        let (w, back) = self.affine_inverse(t, z);
        let y = self.blend.velocity(t, &w);
        let grad_h = back.transpose() * (&self.omega * y);
        let mut grad = (grad_a + grad_h) * chi;
        if grad_chi.iter().any(|g| *g != 0.0) {
            grad += grad_chi * (ha + self.rescaled_part(t, &w));
        }
        grad.as_slice().to_vec()
    }

    /// `X = -Ω ∇H`.
    pub fn vector_field(&self, z: &[f64], t: f64) -> DVector<f64> {
        -(&self.omega * DVector::from_vec(self.gradient(z, t)))
    }

    /// Integrates the flow from `t0` to `t1` with classical Runge-Kutta.
    pub fn flow(&self, z: &[f64], t0: f64, t1: f64) -> Vec<f64> {
        let steps = ((math::abs(t1 - t0) * self.steps as f64) as usize).max(1);
        let h = (t1 - t0) / steps as f64;
        let mut y = DVector::from_column_slice(z);
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            let k1 = self.vector_field(y.as_slice(), t);
            let k2 = self.vector_field((&y + &k1 * (h / 2.0)).as_slice(), t + h / 2.0);
            let k3 = self.vector_field((&y + &k2 * (h / 2.0)).as_slice(), t + h / 2.0);
            let k4 = self.vector_field((&y + &k3 * h).as_slice(), t + h);
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        y.as_slice().to_vec()
    }

    pub fn time_one(&self, z: &[f64]) -> Vec<f64> {
        self.flow(z, 0.0, 1.0)
    }

    /// `Phi_t(x) = A_t(psi_t(x))`, evaluated directly rather than by flowing.
    pub fn isotopy_at(&self, x: &[f64], t: f64) -> Vec<f64> {
        let t = t.clamp(0.0, 1.0);
        let inner = if t == 0.0 {
            x.to_vec()
        } else {
            let p: Vec<f64> = x.iter().map(|v| t * v).collect();
            self.blend.eval_or_raw(&p).0.iter().map(|v| v / t).collect()
        };
        let fwd = linalg::expm(&(&self.generator * t));
        (fwd * DVector::from_vec(inner) + &self.tau * t).as_slice().to_vec()
    }
}

/// Builds a compactly supported Hamiltonian isotopy whose time-one map is
/// within `eps` of `phi` on `B_r`.
pub fn ham_isotopy_from_map(
    phi: &MapWithJacobian,
    r: f64,
    eps: f64,
    cfg: &IsotopyConfig,
) -> Result<HamiltonianIsotopy, SymplecticError> {
    let space = SymplecticSpace::of_dim(phi.dim())?;
    let (n, d) = (space.half_dim(), space.dim());
    if !(r > 0.0 && eps > 0.0) {
        return Err(SymplecticError::PreconditionViolated("r > 0 and eps > 0".into()));
    }
    let o = omega(n);
    let zero = vec![0.0; d];
    let tau = DVector::from_vec(phi.eval(&zero));
    let p = phi.jacobian(&zero);
    if (p.transpose() * &o * &p - &o).amax() > 1e-8 {
        return Err(SymplecticError::PreconditionViolated("dphi_0 is not symplectic".into()));
    }
    let pinv = p.clone().try_inverse().ok_or(SymplecticError::SingularDifferential)?;
    let log = linalg::logm(&p).ok_or(SymplecticError::NoLinearPath)?;
    let sym = (&o * &log + (&o * &log).transpose()) * 0.5;
    let generator = -(&o * sym);

    let (pe, pj, te, pie, pij) = (phi.clone(), phi.clone(), tau.clone(), pinv.clone(), pinv.clone());
    let phi_hat = MapWithJacobian::new(
        d,
        move |z| {
            let v = DVector::from_vec(pe.eval(z)) - &te;
            (&pie * v).as_slice().to_vec()
        },
        move |z| &pij * pj.jacobian(z),
    );

    let budget = eps / (2.0 * linalg::singular_values(&p)[0]);
    // an affine map has phi_hat = id exactly; detect it on samples
    let trivial = ball_points(d, 4.0 * r, cfg.blend_samples).iter().all(|z| {
        let img = phi_hat.eval(z);
        let off: Vec<f64> = img.iter().zip(z).map(|(a, b)| a - b).collect();
        let jac = phi_hat.jacobian(z) - DMatrix::<f64>::identity(d, d);
        math::norm(&off) <= 1e-13 * (1.0 + math::norm(z)) && jac.amax() <= 1e-13
    });
    let quad = math::gauss_legendre(cfg.quad_nodes);
    let mut width = 0.5 * r;
    let mut chart_failed = false;
    let blend = loop {
        if width < cfg.min_blend {
            return Err(if chart_failed {
                SymplecticError::GraphConditionFailed("momentum block singular near 0".into())
            } else {
                SymplecticError::BlendWidthNotFound { min_width: cfg.min_blend, budget }
            });
        }
        let cand = Blended { n, phi_hat: phi_hat.clone(), width, quad: quad.clone(), trivial };
        let mut ok = true;
        for z in ball_points(d, 3.0 * width, cfg.blend_samples) {
            match cand.eval(&z) {
                None => {
                    chart_failed = true;
                    ok = false;
                    break;
                }
                Some((img, j)) => {
                    let raw = phi_hat.eval(&z);
                    let gap: Vec<f64> = img.iter().zip(&raw).map(|(a, b)| a - b).collect();
                    let fxe = j.view((n, n), (n, n)).determinant();
                    if math::norm(&gap) >= budget || math::abs(fxe) < 0.1 {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            break cand;
        }
        width *= 0.5;
    };

    let mut iso = HamiltonianIsotopy {
        n,
        omega: o,
        generator,
        tau,
        blend: Arc::new(blend),
        cutoff: Cutoff { inner_lo: vec![], inner_hi: vec![], outer_lo: vec![], outer_hi: vec![] },
        steps: cfg.steps,
    };

    let mut starts = ball_points(d, r, cfg.hull_samples);
    starts.extend(
        ball_points(d, 1.0, cfg.hull_samples)
            .into_iter()
            .filter(|p| math::norm(p) > 1e-9)
            .map(|p| {
                let s = r / math::norm(&p);
                p.iter().map(|v| v * s).collect::<Vec<f64>>()
            }),
    );
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in &starts {
        for k in 0..cfg.hull_times {
            let t = k as f64 / (cfg.hull_times - 1).max(1) as f64;
            for (i, v) in iso.isotopy_at(x, t).iter().enumerate() {
                lo[i] = lo[i].min(*v);
                hi[i] = hi[i].max(*v);
            }
        }
    }
    let extent = (0..d).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    let pad = 0.1 * extent + 0.05 * r;
    let margin = 0.5 * extent + 0.1 * r;
    let inner_lo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
    let inner_hi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
    iso.cutoff = Cutoff {
        outer_lo: inner_lo.iter().map(|v| v - margin).collect(),
        outer_hi: inner_hi.iter().map(|v| v + margin).collect(),
        inner_lo,
        inner_hi,
    };

    let pts = ball_points(d, r, cfg.hull_samples);
    for x in &pts {
        let gap: Vec<f64> = iso.isotopy_at(x, 1.0).iter().zip(phi.eval(x)).map(|(a, b)| a - b).collect();
        if math::norm(&gap) > eps {
            return Err(SymplecticError::BlendWidthNotFound { min_width: cfg.min_blend, budget });
        }
    }
    Ok(iso)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> IsotopyConfig {
        IsotopyConfig::default()
    }

    fn sup_gap(iso: &HamiltonianIsotopy, phi: &MapWithJacobian, r: f64, count: usize) -> f64 {
        ball_points(2, r, count)
            .iter()
            .map(|x| {
                let g: Vec<f64> = iso.time_one(x).iter().zip(phi.eval(x)).map(|(a, b)| a - b).collect();
                math::norm(&g)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_gives_zero_hamiltonian() {
        let iso = ham_isotopy_from_map(&MapWithJacobian::identity(2), 0.5, 1e-3, &cfg()).unwrap();
        for p in ball_points(2, 0.5, 20) {
            for t in [0.1, 0.5, 1.0] {
                assert_eq!(iso.hamiltonian(&p, t), 0.0);
                assert_eq!(iso.gradient(&p, t), vec![0.0, 0.0]);
            }
        }
    }

    #[test]
    fn rotation_recovers_quadratic() {
        let c = 0.3;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, c, -c, 0.0]);
        let phi = MapWithJacobian::linear(linalg::expm(&a));
        let iso = ham_isotopy_from_map(&phi, 0.5, 1e-3, &cfg()).unwrap();
        for p in ball_points(2, 0.5, 30) {
            let q = 0.5 * c * (p[0] * p[0] + p[1] * p[1]);
            let h = iso.hamiltonian(&p, 0.5);
            assert!((h - q).abs() <= 1e-3 * q.abs().max(1e-3), "{} vs {}", h, q);
        }
        assert!(sup_gap(&iso, &phi, 0.5, 30) <= 1e-4);
    }

    #[test]
    fn shear_recovers_half_momentum_square() {
        let phi = MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        let iso = ham_isotopy_from_map(&phi, 0.5, 1e-3, &cfg()).unwrap();
        for p in ball_points(2, 0.5, 30) {
            let want = 0.5 * p[1] * p[1];
            assert!((iso.hamiltonian(&p, 0.7) - want).abs() <= 1e-3);
        }
        assert!(sup_gap(&iso, &phi, 0.5, 30) <= 1e-4);
    }

    #[test]
    fn vanishes_outside_the_box() {
        let phi = MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        let iso = ham_isotopy_from_map(&phi, 0.5, 1e-3, &cfg()).unwrap();
        let (lo, hi) = iso.support();
        let far = [hi[0] + 0.01, 0.0];
        let below = [lo[0] - 1.0, lo[1] - 1.0];
        for t in [0.0, 0.3, 1.0, 1.5] {
            assert_eq!(iso.hamiltonian(&far, t), 0.0);
            assert_eq!(iso.hamiltonian(&below, t), 0.0);
        }
        assert_eq!(iso.hamiltonian(&[0.1, 0.1], 1.5), 0.0);
        assert_eq!(iso.flow(&far, 0.0, 1.0), far.to_vec());
    }

    #[test]
    fn nonlinear_kick_map() {
        // (x, xi) -> (x + xi', xi') with xi' = xi + k sin x
        let k = 0.2;
        let phi = MapWithJacobian::new(
            2,
            move |p| {
                let m = p[1] + k * math::sin(p[0]);
                vec![p[0] + m, m]
            },
            move |p| {
                let c = k * math::cos(p[0]);
                DMatrix::from_row_slice(2, 2, &[1.0 + c, 1.0, c, 1.0])
            },
        );
        let eps = 1e-3;
        let iso = ham_isotopy_from_map(&phi, 0.5, eps, &cfg()).unwrap();
        assert!(iso.blend_width() > 0.0);
        assert!(sup_gap(&iso, &phi, 0.5, 10) <= eps + 1e-4);
    }
}
