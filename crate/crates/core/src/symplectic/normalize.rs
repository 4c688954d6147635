//! Linear normalization of a map near a fixed point, and the bookkeeping of
//! graph windows under small perturbations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{lagrangian_complement, omega, SymplecticError, SymplecticSpace};
use crate::degree::{Domain, MapWithJacobian};
use crate::linalg;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizeConfig {
    /// Grid points per axis for the window checks.
    pub grid_per_axis: usize,
    /// Largest radius tried when the map is defined everywhere.
    pub r_cap: f64,
    pub bisection_steps: usize,
    /// `|det ∂x'/∂xi|` must stay above this fraction of its value at 0.
    pub det_floor: f64,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig { grid_per_axis: 20, r_cap: 1.0, bisection_steps: 40, det_floor: 0.1 }
    }
}

/// Symplectic charts `u`, `v` with slope bound `A` and radius `r0` such that
/// `psi = v ∘ phi ∘ u` has a graph that projects well onto the base.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationData {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub a: f64,
    pub r0: f64,
    /// The linear map `V^2 -> V^{*2}` whose graph is the tangent space of the
    /// graph of `psi` at 0.
    pub w: DMatrix<f64>,
    /// Grid points per axis used to certify `r0`.
    pub grid_per_axis: usize,
}

impl NormalizationData {
    pub fn psi(&self, phi: &MapWithJacobian) -> MapWithJacobian {
        MapWithJacobian::linear(self.v.clone())
            .compose(&phi.compose(&MapWithJacobian::linear(self.u.clone())))
    }

    /// Symplectic residuals of `u` and `v`.
    pub fn chart_residuals(&self) -> (f64, f64) {
        let o = omega(self.u.nrows() / 2);
        let res = |m: &DMatrix<f64>| (m.transpose() * &o * m - &o).amax();
        (res(&self.u), res(&self.v))
    }

    /// Re-runs the window checks at `r` on the certification grid.
    pub fn check(&self, phi: &MapWithJacobian, r: f64) -> bool {
        let psi = self.psi(phi);
        let det0 = base_det(&psi.jacobian(&alloc::vec![0.0; psi.dim()]));
        window_ok(&psi, self.a, r, det0, self.grid_per_axis, 0.1)
    }
}

/// Upper-right `n x n` block determinant: `det ∂x'/∂xi`.
fn base_det(j: &DMatrix<f64>) -> f64 {
    let n = j.nrows() / 2;
    j.view((0, n), (n, n)).determinant()
}

/// Grid points of `B_r^V x B_{Ar}^{V*}`.
fn product_grid(n: usize, r: f64, ar: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let d = 2 * n;
    let total = per_axis.pow(d as u32);
    let mut out = Vec::new();
    for mut idx in 0..total {
        let mut p = Vec::with_capacity(d);
        for k in 0..d {
            let h = if k < n { r } else { ar };
            let i = idx % per_axis;
            idx /= per_axis;
            p.push(-h + (i as f64 + 0.5) * 2.0 * h / per_axis as f64);
        }
        if math::norm(&p[..n]) < r && math::norm(&p[n..]) < ar {
            out.push(p);
        }
    }
    out
}

/// The graph bound and base-projection checks at radius `r0`.
fn window_ok(
    psi: &MapWithJacobian,
    a: f64,
    r0: f64,
    det0: f64,
    per_axis: usize,
    det_floor: f64,
) -> bool {
    let n = psi.dim() / 2;
    for p in product_grid(n, r0, a * r0, per_axis) {
        if !psi.domain().contains(&p) {
            return false;
        }
        let img = psi.eval(&p);
        let base: Vec<f64> = p[..n].iter().chain(&img[..n]).copied().collect();
        let fiber: Vec<f64> = p[n..].iter().chain(&img[n..]).copied().collect();
        let (b, f) = (math::norm(&base), math::norm(&fiber));
        if b < r0 && f < a * r0 && f > a * b + 1e-12 {
            return false;
        }
        let det = base_det(&psi.jacobian(&p));
        if det * det0 <= 0.0 || math::abs(det) < det_floor * math::abs(det0) {
            return false;
        }
    }
    true
}

/// Largest radius allowed by the domain of `phi` for `B_r x B_{Ar}`.
fn domain_radius(domain: &Domain, n: usize, a: f64, cap: f64) -> f64 {
    match domain {
        Domain::Whole => cap,
        Domain::Ball { center, radius } => {
            let room = radius - math::norm(center);
            cap.min(room / math::sqrt(1.0 + a * a))
        }
        Domain::Box { lo, hi } => {
            let mut r = cap;
            for k in 0..2 * n {
                let room = (-lo[k]).min(hi[k]);
                r = r.min(if k < n { room } else { room / a });
            }
            r
        }
    }
}

/// Normalizes `phi` (with `phi(0) = 0`) so that its graph is transverse to
/// the fibers: `u` is the identity, `v` sends a Lagrangian complement of
/// `L = dphi_0(V x 0)` to `V x 0`, `A = 2 ||w||` and `r0` is the largest
/// radius (by bisection on a sample grid) where the window checks hold.
pub fn gen_pos_normalize(
    phi: &MapWithJacobian,
    cfg: &NormalizeConfig,
) -> Result<NormalizationData, SymplecticError> {
    let space = SymplecticSpace::of_dim(phi.dim())?;
    let n = space.half_dim();
    let d = 2 * n;
    let zero = alloc::vec![0.0; d];
    let off = math::norm(&phi.eval(&zero));
    if off > 1e-10 {
        return Err(SymplecticError::NotCentered(off));
    }
    let j0 = phi.jacobian(&zero);
    let s = linalg::singular_values(&j0);
    if s[d - 1] <= 1e-12 * s[0].max(1.0) {
        return Err(SymplecticError::SingularDifferential);
    }

    let u = DMatrix::<f64>::identity(d, d);
    let l = j0.columns(0, n).clone_owned();
    let lp = lagrangian_complement(&l)?;
    // [L' | Ω L'] is symplectic and orthogonal and sends V x 0 to L'.
    let mut m = DMatrix::zeros(d, d);
    m.columns_mut(0, n).copy_from(&lp);
    m.columns_mut(n, n).copy_from(&(omega(n) * &lp));
    let v = m.transpose();

    let dpsi = &v * &j0 * &u;
    let (pa, pb) = (dpsi.view((0, 0), (n, n)), dpsi.view((0, n), (n, n)));
    let (pc, pd) = (dpsi.view((n, 0), (n, n)), dpsi.view((n, n), (n, n)));
    // base (x, x') = B (x, xi) and fiber (xi, xi') = F (x, xi); w = F B^{-1}
    let mut b = DMatrix::zeros(d, d);
    let mut f = DMatrix::zeros(d, d);
    for i in 0..n {
        b[(i, i)] = 1.0;
        f[(i, n + i)] = 1.0;
        for k in 0..n {
            b[(n + i, k)] = pa[(i, k)];
            b[(n + i, n + k)] = pb[(i, k)];
            f[(n + i, k)] = pc[(i, k)];
            f[(n + i, n + k)] = pd[(i, k)];
        }
    }
    let binv = b.try_inverse().ok_or(SymplecticError::SingularDifferential)?;
    let w = &f * binv;
    let wn = linalg::singular_values(&w)[0];
    let a = 2.0 * wn.max(1e-12);

    let data = NormalizationData { u, v, a, r0: 0.0, w, grid_per_axis: cfg.grid_per_axis };
    let psi = data.psi(phi);
    let det0 = base_det(&dpsi);
    let ok = |r: f64| window_ok(&psi, a, r, det0, cfg.grid_per_axis, cfg.det_floor);
    let r_max = domain_radius(phi.domain(), n, a, cfg.r_cap);
    let r0 = if ok(r_max) {
        r_max
    } else {
        let (mut lo, mut hi) = (0.0, r_max);
        for _ in 0..cfg.bisection_steps {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if !(r0 > 0.0) {
        return Err(SymplecticError::PreconditionViolated(
            "no radius satisfies the graph bound".into(),
        ));
    }
    Ok(NormalizationData { r0, ..data })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowCheckReport {
    /// Sampled `sup d(psi, psi1)` over `B_{r0} x B_{A r0}`.
    pub hypothesis_sup: f64,
    /// Samples that landed in the left-hand window.
    pub lhs_samples: usize,
    /// Left-hand samples that miss the right-hand side.
    pub violations: usize,
}

impl WindowCheckReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

fn require(ok: bool, name: &str) -> Result<(), SymplecticError> {
    if ok {
        Ok(())
    } else {
        Err(SymplecticError::PreconditionViolated(String::from(name)))
    }
}

/// Samples of a product of balls, drawn quasi-randomly from its bounding box.
fn product_samples(n: usize, r: f64, ar: f64, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count && i < 100 * count {
        let u = math::halton(i, 2 * n);
        i += 1;
        let p: Vec<f64> = (0..2 * n)
            .map(|k| {
                let h = if k < n { r } else { ar };
                h * (2.0 * u[k] - 1.0)
            })
            .collect();
        if math::norm(&p[..n]) < r && math::norm(&p[n..]) < ar {
            out.push(p);
        }
    }
    out
}

/// Checks that a perturbation `psi1` of `psi` keeps the windowed graph in
/// the `eps`-tube of the graph of `psi` with fibers in `B_{2Ar}`.
pub fn graph_window_check(
    psi: &MapWithJacobian,
    psi1: &MapWithJacobian,
    r0: f64,
    a: f64,
    r: f64,
    eps: f64,
    samples: usize,
) -> Result<WindowCheckReport, SymplecticError> {
    let n = SymplecticSpace::of_dim(psi.dim())?.half_dim();
    if psi1.dim() != psi.dim() {
        return Err(SymplecticError::DimensionMismatch { expected: psi.dim(), found: psi1.dim() });
    }
    require(a > 0.0 && r0 > 0.0, "A > 0 and r0 > 0")?;
    require(0.0 < r && r < r0 / 4.0, "0 < r < r0/4")?;
    require(0.0 < eps && eps < a * r / (a + 1.0), "0 < eps < A r/(A+1)")?;
    require(r + eps < r0, "r + eps < r0")?;
    require(a * r0 / 2.0 + eps < a * r0, "A r0/2 + eps < A r0")?;
    require(a * (r + eps) + eps < 2.0 * a * r, "A(r + eps) + eps < 2 A r")?;

    let gap = |p: &[f64]| {
        let d: Vec<f64> = psi.eval(p).iter().zip(psi1.eval(p)).map(|(x, y)| x - y).collect();
        math::norm(&d)
    };
    let mut sup: f64 = 0.0;
    for p in product_samples(n, r0, a * r0, samples) {
        sup = sup.max(gap(&p));
    }
    if sup >= eps {
        return Err(SymplecticError::PreconditionViolated(format!(
            "d(psi, psi1) < eps on the window (sampled sup {:e})",
            sup
        )));
    }

    let mut lhs = 0;
    let mut violations = 0;
    for p in product_samples(n, r, a * r0 / 2.0, samples) {
        let img = psi1.eval(&p);
        let base: Vec<f64> = p[..n].iter().chain(&img[..n]).copied().collect();
        let fiber: Vec<f64> = p[n..].iter().chain(&img[n..]).copied().collect();
        if !(math::norm(&base) < r && math::norm(&fiber) < a * r0 / 2.0) {
            continue;
        }
        lhs += 1;
        let in_u = math::norm(&p[..n]) < r0 && math::norm(&p[n..]) < a * r0;
        let near = gap(&p) < eps;
        let small = math::norm(&fiber) < 2.0 * a * r;
        if !(in_u && near && small) {
            violations += 1;
        }
    }
    Ok(WindowCheckReport { hypothesis_sup: sup, lhs_samples: lhs, violations })
}
