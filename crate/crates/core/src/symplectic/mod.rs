//! Numerical symplectic geometry on `T*R^n = R^{2n}`.
//!
//! Coordinates are `(x_1..x_n, xi_1..xi_n)` and the form is
//! `omega = sum dxi_i ∧ dx_i`, so `omega(u, v) = u^T Ω v` with
//! `Ω = [[0, -I], [I, 0]]`. Hamiltonian vector fields satisfy
//! `ι_X omega = -dH`, which gives `X = -Ω ∇H = (∂H/∂xi, -∂H/∂x)`.

mod genfun;
mod hamiltonian;
mod moser;
mod normalize;

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use thiserror::Error;

pub use genfun::{gf_quantization_check, GeneratingFunction, GfReport};
pub use hamiltonian::{ham_isotopy_from_map, HamiltonianIsotopy, IsotopyConfig};
pub use moser::{moser_correct, MoserConfig, MoserOutput};
pub use normalize::{
    gen_pos_normalize, graph_window_check, NormalizationData, NormalizeConfig, WindowCheckReport,
};

use crate::degree::MapWithJacobian;
use crate::linalg;
use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error("phase space dimension {0} is odd")]
    OddDimension(usize),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis does not have full column rank")]
    RankDeficientBasis,
    #[error("sigma must be nonzero")]
    ZeroSigma,
    #[error("conormal element needs sigma > 0, got {0}")]
    NonPositiveSigma(f64),
    #[error("subspace is not Lagrangian (defect {0:e})")]
    NotLagrangian(f64),
    #[error("differential at the origin is singular")]
    SingularDifferential,
    #[error("map does not fix the origin (|phi(0)| = {0:e})")]
    NotCentered(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("interpolated form is degenerate: {0}")]
    DegenerateOmegaT(String),
    #[error("no mollification width >= {min_width:e} meets the C^1 budget")]
    MollificationTooCoarse { min_width: f64 },
    #[error("generating-function chart is degenerate: {0}")]
    GraphConditionFailed(String),
    #[error("no blend width >= {min_width:e} keeps the map within {budget:e}")]
    BlendWidthNotFound { min_width: f64, budget: f64 },
    #[error("linear part has no real Hamiltonian logarithm")]
    NoLinearPath,
    #[error("generating function is degenerate: {0}")]
    DegenerateGF(String),
    #[error("graph sample {index} is off the graph by {gap:e}")]
    SampleOffGraph { index: usize, gap: f64 },
}

/// The standard symplectic space of half-dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticSpace {
    n: usize,
}

impl SymplecticSpace {
    pub fn new(n: usize) -> Self {
        SymplecticSpace { n }
    }

    /// From a phase-space dimension, which must be even.
    pub fn of_dim(dim: usize) -> Result<Self, SymplecticError> {
        if dim % 2 == 1 {
            Err(SymplecticError::OddDimension(dim))
        } else {
            Ok(SymplecticSpace { n: dim / 2 })
        }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega(&self) -> DMatrix<f64> {
        omega(self.n)
    }

    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|i| u[n + i] * v[i] - u[i] * v[n + i]).sum()
    }

    /// Max-abs defects of `Ω^T = -Ω` and `Ω^2 = -I`.
    pub fn defects(&self) -> (f64, f64) {
        let o = self.omega();
        let d = self.dim();
        let anti = (o.transpose() + &o).amax();
        let sq = (&o * &o + DMatrix::<f64>::identity(d, d)).amax();
        (anti, sq)
    }
}

pub(crate) fn omega(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        o[(i, n + i)] = -1.0;
        o[(n + i, i)] = 1.0;
    }
    o
}

/// `max |J^T Ω J - Ω|` over the points.
pub fn symplectic_residual(
    phi: &MapWithJacobian,
    points: &[Vec<f64>],
) -> Result<f64, SymplecticError> {
    let space = SymplecticSpace::of_dim(phi.dim())?;
    let o = space.omega();
    let mut worst: f64 = 0.0;
    for p in points {
        if p.len() != phi.dim() {
            return Err(SymplecticError::DimensionMismatch { expected: phi.dim(), found: p.len() });
        }
        let j = phi.jacobian(p);
        worst = worst.max((j.transpose() * &o * &j - &o).amax());
    }
    Ok(worst)
}

/// Rank threshold for singular values, relative to the largest.
pub const RANK_TOL: f64 = 1e-10;

fn check_basis(w: &DMatrix<f64>, space: &SymplecticSpace) -> Result<(), SymplecticError> {
    if w.nrows() != space.dim() {
        return Err(SymplecticError::DimensionMismatch { expected: space.dim(), found: w.nrows() });
    }
    if w.ncols() == 0 {
        return Ok(());
    }
    if w.ncols() > w.nrows() {
        return Err(SymplecticError::RankDeficientBasis);
    }
    let s = linalg::singular_values(w);
    if s[s.len() - 1] <= RANK_TOL * s[0] {
        return Err(SymplecticError::RankDeficientBasis);
    }
    Ok(())
}

/// Whether the column span `W` contains its symplectic orthogonal.
///
/// `W^⊥ω = Ω W^⊥`, so `W` is coisotropic iff `Ω` vanishes on the Euclidean
/// complement `W^⊥`.
pub fn coisotropic_check(w: &DMatrix<f64>, space: &SymplecticSpace) -> Result<bool, SymplecticError> {
    check_basis(w, space)?;
    let perp = linalg::complement(w, RANK_TOL);
    if perp.ncols() == 0 {
        return Ok(true);
    }
    let restricted = perp.transpose() * space.omega() * &perp;
    Ok(restricted.amax() <= 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhoLift {
    pub coisotropic_s: bool,
    pub coisotropic_lift: bool,
    pub equal: bool,
}

/// Compares coisotropy of a linear `S ⊂ T*R^n` with that of its preimage
/// under the linearized homogenization `(x, s; xi, sigma) -> (x; xi/sigma)`
/// at a point with fiber coordinates `(xi0, sigma0)`.
///
/// The lift lives in `T*R^{n+1}` with coordinates `(x, s, xi, sigma)`.
pub fn rho_lift_check(
    s: &DMatrix<f64>,
    sigma0: f64,
    xi0: &[f64],
) -> Result<RhoLift, SymplecticError> {
    if sigma0 == 0.0 {
        return Err(SymplecticError::ZeroSigma);
    }
    let space = SymplecticSpace::of_dim(s.nrows())?;
    let n = space.half_dim();
    if xi0.len() != n {
        return Err(SymplecticError::DimensionMismatch { expected: n, found: xi0.len() });
    }
    check_basis(s, &space)?;
    let coisotropic_s = coisotropic_check(s, &space)?;

    // d rho (X, S; Ξ, Σ) = (X; Ξ/σ0 - ξ0 Σ/σ0^2). A vector (a; b) of S lifts
    // to (a, 0; σ0 b, 0); the kernel is spanned by ∂_s and (0, 0; ξ0/σ0, 1).
    let m = n + 1;
    let k = s.ncols();
    let mut lift = DMatrix::zeros(2 * m, k + 2);
    for c in 0..k {
        for i in 0..n {
            lift[(i, c)] = s[(i, c)];
            lift[(m + i, c)] = sigma0 * s[(n + i, c)];
        }
    }
    lift[(n, k)] = 1.0;
    for i in 0..n {
        lift[(m + i, k + 1)] = xi0[i] / sigma0;
    }
    lift[(m + n, k + 1)] = 1.0;
    let coisotropic_lift = coisotropic_check(&lift, &SymplecticSpace::new(m))?;
    Ok(RhoLift {
        coisotropic_s,
        coisotropic_lift,
        equal: coisotropic_s == coisotropic_lift,
    })
}

/// An orthonormal basis of `Ω L`, a Lagrangian subspace transverse to `L`.
pub fn lagrangian_complement(l: &DMatrix<f64>) -> Result<DMatrix<f64>, SymplecticError> {
    let space = SymplecticSpace::of_dim(l.nrows())?;
    let n = space.half_dim();
    if l.ncols() != n {
        return Err(SymplecticError::NotLagrangian(f64::INFINITY));
    }
    check_basis(l, &space).map_err(|_| SymplecticError::NotLagrangian(f64::INFINITY))?;
    let q = linalg::orthonormalize(l);
    let defect = (q.transpose() * space.omega() * &q).amax();
    if defect > 1e-9 {
        return Err(SymplecticError::NotLagrangian(defect));
    }
    Ok(linalg::orthonormalize(&(space.omega() * &q)))
}

/// One point of a graph, `(x', xi') = phi(x, xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub x_img: Vec<f64>,
    pub xi_img: Vec<f64>,
}

impl GraphSample {
    /// The point `(x, x'; xi, -xi')` of the twisted graph in `T*R^{2n}`.
    pub fn twisted(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(4 * self.x.len());
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.x_img);
        v.extend_from_slice(&self.xi);
        v.extend(self.xi_img.iter().map(|t| -t));
        v
    }
}

/// The twisted graph `{(x, x'; xi, -xi')}` of a map on `T*R^n`.
#[derive(Debug, Clone)]
pub struct TwistedGraph {
    n: usize,
    phi: MapWithJacobian,
    samples: Vec<GraphSample>,
}

impl TwistedGraph {
    /// Samples the graph at the given phase-space points.
    pub fn new(phi: MapWithJacobian, points: &[Vec<f64>]) -> Result<Self, SymplecticError> {
        let n = SymplecticSpace::of_dim(phi.dim())?.half_dim();
        let samples = points
            .iter()
            .map(|p| {
                let img = phi.eval(p);
                GraphSample {
                    x: p[..n].to_vec(),
                    xi: p[n..].to_vec(),
                    x_img: img[..n].to_vec(),
                    xi_img: img[n..].to_vec(),
                }
            })
            .collect();
        Ok(TwistedGraph { n, phi, samples })
    }

    /// Takes precomputed samples, checking each against `phi` to `1e-10`.
    pub fn from_samples(
        phi: MapWithJacobian,
        samples: Vec<GraphSample>,
    ) -> Result<Self, SymplecticError> {
        let n = SymplecticSpace::of_dim(phi.dim())?.half_dim();
        for (index, s) in samples.iter().enumerate() {
            let p: Vec<f64> = s.x.iter().chain(&s.xi).copied().collect();
            let img = phi.eval(&p);
            let gap = img
                .iter()
                .zip(s.x_img.iter().chain(&s.xi_img))
                .map(|(a, b)| math::abs(a - b))
                .fold(0.0, f64::max);
            if gap > 1e-10 {
                return Err(SymplecticError::SampleOffGraph { index, gap });
            }
        }
        Ok(TwistedGraph { n, phi, samples })
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &MapWithJacobian {
        &self.phi
    }

    pub fn samples(&self) -> &[GraphSample] {
        &self.samples
    }
}

/// A covector `(x, s; xi, sigma)` on `R^n x R` with `sigma > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConormalElement {
    pub x: Vec<f64>,
    pub s: f64,
    pub xi: Vec<f64>,
    pub sigma: f64,
}

impl ConormalElement {
    pub fn new(x: Vec<f64>, s: f64, xi: Vec<f64>, sigma: f64) -> Result<Self, SymplecticError> {
        if !(sigma > 0.0) {
            return Err(SymplecticError::NonPositiveSigma(sigma));
        }
        if x.len() != xi.len() {
            return Err(SymplecticError::DimensionMismatch { expected: x.len(), found: xi.len() });
        }
        Ok(ConormalElement { x, s, xi, sigma })
    }

    /// `(x; xi / sigma)`.
    pub fn rho(&self) -> Vec<f64> {
        self.x.iter().copied().chain(self.xi.iter().map(|v| v / self.sigma)).collect()
    }
}

/// Quasi-random points of the open ball `B_radius(0)` in `R^dim`.
pub(crate) fn ball_points(dim: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count && i < count * 1000 {
        let u = math::halton(i, dim);
        i += 1;
        let p: Vec<f64> = u.iter().map(|v| radius * (2.0 * v - 1.0)).collect();
        if math::norm(&p) < radius {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn standard_form_is_sound() {
        let s = SymplecticSpace::new(2);
        assert_eq!(s.defects(), (0.0, 0.0));
        let (u, v) = ([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]);
        // omega(e_x, e_xi) = -1 and omega(e_xi, e_x) = 1
        assert_eq!(s.form(&u, &v), -1.0);
        assert_eq!(s.form(&v, &u), 1.0);
        let o = s.omega();
        let dv = DMatrix::from_column_slice(4, 1, &v);
        let du = DMatrix::from_column_slice(4, 1, &u);
        assert_eq!((dv.transpose() * o * du)[(0, 0)], 1.0);
    }

    #[test]
    fn residual_examples() {
        let pts = ball_points(2, 1.0, 10);
        let rot = MapWithJacobian::linear(m(2, 2, &[0.6, -0.8, 0.8, 0.6]));
        assert!(symplectic_residual(&rot, &pts).unwrap() < 1e-14);
        let stretch = MapWithJacobian::linear(m(2, 2, &[1.0, 0.0, 0.0, 2.0]));
        assert!((symplectic_residual(&stretch, &pts).unwrap() - 1.0).abs() < 1e-15);
        let shear = MapWithJacobian::linear(m(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        assert_eq!(symplectic_residual(&shear, &pts).unwrap(), 0.0);
        let odd = MapWithJacobian::identity(3);
        assert_eq!(symplectic_residual(&odd, &[]), Err(SymplecticError::OddDimension(3)));
    }

    #[test]
    fn coisotropic_examples() {
        let s1 = SymplecticSpace::new(1);
        assert!(coisotropic_check(&m(2, 1, &[0.3, -1.2]), &s1).unwrap());
        let s2 = SymplecticSpace::new(2);
        assert!(!coisotropic_check(&m(4, 1, &[1.0, 0.0, 0.0, 0.0]), &s2).unwrap());
        let hyper = m(4, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert!(coisotropic_check(&hyper, &s2).unwrap());
        let bad = m(4, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(coisotropic_check(&bad, &s2), Err(SymplecticError::RankDeficientBasis));
    }

    #[test]
    fn rho_lift_examples() {
        let full = DMatrix::identity(4, 4);
        let r = rho_lift_check(&full, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!((r.coisotropic_s, r.coisotropic_lift, r.equal), (true, true, true));
        // graph of the symmetric map x -> diag(1, 2) x
        let lag = m(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 2.0]);
        let r = rho_lift_check(&lag, 1.0, &[0.0, 0.0]).unwrap();
        assert!(r.coisotropic_s && r.coisotropic_lift && r.equal);
        let line = m(4, 1, &[1.0, 0.0, 0.0, 0.0]);
        let r = rho_lift_check(&line, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!((r.coisotropic_s, r.coisotropic_lift, r.equal), (false, false, true));
        assert_eq!(rho_lift_check(&line, 0.0, &[0.0, 0.0]), Err(SymplecticError::ZeroSigma));
    }

    #[test]
    fn complement_examples() {
        let l = m(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let c = lagrangian_complement(&l).unwrap();
        let want = m(4, 2, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!((c - want).amax() < 1e-15);

        let c = lagrangian_complement(&m(2, 1, &[1.0, 1.0])).unwrap();
        let h = 1.0 / math::sqrt(2.0);
        assert!((c - m(2, 1, &[-h, h])).amax() < 1e-15);
        let both = m(2, 2, &[1.0, -1.0, 1.0, 1.0]);
        assert!((both.determinant() - 2.0).abs() < 1e-15);

        let not_lag = m(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(lagrangian_complement(&not_lag), Err(SymplecticError::NotLagrangian(_))));
    }

    #[test]
    fn twisted_graph_samples() {
        let j = MapWithJacobian::linear(m(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let g = TwistedGraph::new(j.clone(), &[vec![1.0, 2.0]]).unwrap();
        assert_eq!(g.samples()[0].twisted(), vec![1.0, 2.0, 2.0, 1.0]);
        let off = GraphSample { x: vec![1.0], xi: vec![2.0], x_img: vec![2.0], xi_img: vec![-0.5] };
        assert!(matches!(
            TwistedGraph::from_samples(j, vec![off]),
            Err(SymplecticError::SampleOffGraph { index: 0, .. })
        ));
    }

    #[test]
    fn conormal_elements() {
        let c = ConormalElement::new(vec![1.0], 0.0, vec![3.0], 2.0).unwrap();
        assert_eq!(c.rho(), vec![1.0, 1.5]);
        assert_eq!(
            ConormalElement::new(vec![1.0], 0.0, vec![3.0], 0.0),
            Err(SymplecticError::NonPositiveSigma(0.0))
        );
    }
}
