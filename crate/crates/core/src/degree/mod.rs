//! Topological degree of maps `R^d -> R^d` (`d <= 4`) by signed preimage
//! count at a regular value, with the restriction, slice and stability
//! properties as executable checks.
//!
//! Properness is checked by sampling the boundary of a box window, which is
//! an under-verification: a map can dip into the target ball between
//! samples. Reports carry the sample count so callers can say so.

mod map;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use map::{Domain, EvalFn, JacobianFn, MapWithJacobian};

use crate::math;
use crate::symplectic::TwistedGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error("dimension {0} is not supported (expected 1..=4)")]
    UnsupportedDimension(usize),
    #[error("invalid degree query: {0}")]
    InvalidQuery(String),
    #[error("preimage {point:?} has Jacobian determinant {det:e}")]
    NearCriticalValue { point: Vec<f64>, det: f64 },
    #[error("window boundary point {point:?} maps into the target ball (distance {distance})")]
    PropernessViolation { point: Vec<f64>, distance: f64 },
    #[error("sampled sup distance {sup} is not below {bound}")]
    HypothesisUnverified { sup: f64, bound: f64 },
    #[error("graph point over {point:?} has fiber norm {fiber} >= {bound}")]
    WindowBoundViolated { point: Vec<f64>, fiber: f64, bound: f64 },
    #[error("Jacobian disagrees with finite differences (relative gap {0:e})")]
    JacobianMismatch(f64),
    #[error("stability hypothesis holds but degrees differ ({deg_f} vs {deg_g})")]
    StabilityMismatch { deg_f: i64, deg_g: i64 },
}

/// Axis-aligned box `[lo, hi]` searched for preimages.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxWindow {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxWindow {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, DegreeError> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(DegreeError::InvalidQuery("window needs lo < hi in every axis".into()));
        }
        Ok(BoxWindow { lo, hi })
    }

    /// `[-h, h]^d`.
    pub fn cube(dim: usize, h: f64) -> Self {
        BoxWindow { lo: vec![-h; dim], hi: vec![h; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains_closed(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| v >= l && v <= h)
    }

    fn contains_padded(&self, x: &[f64], pad: f64) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
            let w = pad * (h - l);
            *v >= l - w && *v <= h + w
        })
    }

    /// Centers of an `s^d` grid of cells.
    pub fn grid(&self, s: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
        let d = self.dim();
        let total = s.pow(d as u32);
        (0..total).map(move |mut idx| {
            let mut p = Vec::with_capacity(d);
            for k in 0..d {
                let i = idx % s;
                idx /= s;
                p.push(self.lo[k] + (i as f64 + 0.5) * (self.hi[k] - self.lo[k]) / s as f64);
            }
            p
        })
    }

    /// Quasi-random points spread over the faces of the box.
    fn boundary(&self, count: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
        let d = self.dim();
        let count = if d == 1 { 2 } else { count };
        (0..count).map(move |k| {
            let face = k % (2 * d);
            let (axis, upper) = (face / 2, face % 2 == 1);
            let u = math::halton(k / (2 * d), d.saturating_sub(1));
            let mut p = Vec::with_capacity(d);
            let mut j = 0;
            for a in 0..d {
                if a == axis {
                    p.push(if upper { self.hi[a] } else { self.lo[a] });
                } else {
                    p.push(self.lo[a] + u[j] * (self.hi[a] - self.lo[a]));
                    j += 1;
                }
            }
            p
        })
    }
}

/// Open ball `B_radius(center)` in the target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl TargetBall {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        TargetBall { center, radius }
    }

    fn distance(&self, y: &[f64]) -> f64 {
        let d: Vec<f64> = y.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        math::norm(&d)
    }
}

#[derive(Debug, Clone)]
pub struct DegreeQuery {
    pub map: MapWithJacobian,
    pub target: TargetBall,
    pub regular_value: Vec<f64>,
    pub window: BoxWindow,
}

impl DegreeQuery {
    pub fn new(
        map: MapWithJacobian,
        target: TargetBall,
        regular_value: Vec<f64>,
        window: BoxWindow,
    ) -> Self {
        DegreeQuery { map, target, regular_value, window }
    }

    fn validate(&self) -> Result<(), DegreeError> {
        let d = self.map.dim();
        if d == 0 || d > 4 {
            return Err(DegreeError::UnsupportedDimension(d));
        }
        if self.target.center.len() != d || self.regular_value.len() != d || self.window.dim() != d
        {
            return Err(DegreeError::InvalidQuery("dimension mismatch".into()));
        }
        if !(self.target.radius > 0.0) {
            return Err(DegreeError::InvalidQuery("target radius must be positive".into()));
        }
        if self.target.distance(&self.regular_value) >= self.target.radius {
            return Err(DegreeError::InvalidQuery("regular value outside the target ball".into()));
        }
        Ok(())
    }
}

/// Search and tolerance settings. Defaults: `40^d` seeds, residual `1e-10`,
/// dedup `1e-7`, determinant floor `1e-8`, 2000 boundary samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeConfig {
    pub seeds_per_axis: usize,
    pub polish_tol: f64,
    pub dedup_tol: f64,
    pub det_tol: f64,
    pub boundary_samples: usize,
    pub max_newton_steps: usize,
}

impl Default for DegreeConfig {
    fn default() -> Self {
        DegreeConfig {
            seeds_per_axis: 40,
            polish_tol: 1e-10,
            dedup_tol: 1e-7,
            det_tol: 1e-8,
            boundary_samples: 2000,
            max_newton_steps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preimage {
    pub point: Vec<f64>,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub degree: i64,
    /// Sorted lexicographically.
    pub preimages: Vec<Preimage>,
    pub boundary_samples: usize,
    /// Smallest distance from a sampled boundary image to the target center,
    /// minus the target radius.
    pub boundary_margin: f64,
}

/// Signed preimage count of `q.regular_value`.
pub fn degree(q: &DegreeQuery, cfg: &DegreeConfig) -> Result<i64, DegreeError> {
    degree_report(q, cfg).map(|r| r.degree)
}

pub fn degree_report(q: &DegreeQuery, cfg: &DegreeConfig) -> Result<DegreeReport, DegreeError> {
    q.validate()?;
    signed_count(&q.map, &q.target, &q.regular_value, &q.window, &|_| true, cfg)
}

fn residual(map: &MapWithJacobian, x: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let r: Vec<f64> = map.eval(x).iter().zip(y).map(|(a, b)| a - b).collect();
    let n = math::norm(&r);
    (r, n)
}

/// Damped Newton from `x0`; `None` if it stalls or leaves the padded window.
fn polish(
    map: &MapWithJacobian,
    y: &[f64],
    x0: Vec<f64>,
    window: &BoxWindow,
    cfg: &DegreeConfig,
) -> Option<Vec<f64>> {
    let mut x = x0;
    let (mut r, mut rn) = residual(map, &x, y);
    for _ in 0..cfg.max_newton_steps {
        if rn < cfg.polish_tol {
            return Some(x);
        }
        let j = map.jacobian(&x);
        let step = j.lu().solve(&DVector::from_vec(r.clone()))?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            let (rc, rcn) = residual(map, &cand, y);
            if rcn < rn {
                x = cand;
                r = rc;
                rn = rcn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || !window.contains_padded(&x, 0.5) {
            return None;
        }
    }
    (rn < cfg.polish_tol).then_some(x)
}

fn signed_count(
    map: &MapWithJacobian,
    target: &TargetBall,
    y: &[f64],
    window: &BoxWindow,
    admissible: &dyn Fn(&[f64]) -> bool,
    cfg: &DegreeConfig,
) -> Result<DegreeReport, DegreeError> {
    let mut margin = f64::INFINITY;
    let mut samples = 0;
    for p in window.boundary(cfg.boundary_samples) {
        if !admissible(&p) {
            continue;
        }
        samples += 1;
        let dist = target.distance(&map.eval(&p));
        margin = margin.min(dist - target.radius);
        if dist < target.radius {
            return Err(DegreeError::PropernessViolation { point: p, distance: dist });
        }
    }

    let mut roots: Vec<Vec<f64>> = Vec::new();
    for seed in window.grid(cfg.seeds_per_axis) {
        let Some(x) = polish(map, y, seed, window, cfg) else {
            continue;
        };
        if !window.contains_closed(&x) || !admissible(&x) {
            continue;
        }
        let dup = roots.iter().any(|r| {
            let d: Vec<f64> = r.iter().zip(&x).map(|(a, b)| a - b).collect();
            math::norm(&d) < cfg.dedup_tol
        });
        if !dup {
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));

    let mut preimages = Vec::with_capacity(roots.len());
    let mut deg = 0i64;
    for point in roots {
        let det = map.jacobian(&point).determinant();
        if math::abs(det) < cfg.det_tol {
            return Err(DegreeError::NearCriticalValue { point, det });
        }
        deg += if det > 0.0 { 1 } else { -1 };
        preimages.push(Preimage { point, det });
    }
    Ok(DegreeReport { degree: deg, preimages, boundary_samples: samples, boundary_margin: margin })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOutcome {
    pub deg_f: i64,
    pub deg_g: i64,
    pub certified_equal: bool,
    pub sampled_sup: f64,
}

/// Degrees of two maps that stay within `r/2` of each other on `window`.
///
/// `f` is counted over `B_r(center)` and `g` over `B_{r/2}(center)`, both at
/// the regular value `center`. The distance bound is sampled on the seed
/// grid and the window boundary; if it fails, the degrees are not computed.
pub fn degree_stability(
    f: &MapWithJacobian,
    g: &MapWithJacobian,
    center: &[f64],
    r: f64,
    big_r: f64,
    window: &BoxWindow,
    cfg: &DegreeConfig,
) -> Result<StabilityOutcome, DegreeError> {
    if !(r > 0.0 && r < big_r) {
        return Err(DegreeError::InvalidQuery("need 0 < r < R".into()));
    }
    if f.dim() != g.dim() {
        return Err(DegreeError::InvalidQuery("maps of different dimensions".into()));
    }
    let gap = |p: &[f64]| {
        let d: Vec<f64> = f.eval(p).iter().zip(g.eval(p)).map(|(a, b)| a - b).collect();
        math::norm(&d)
    };
    let mut sup: f64 = 0.0;
    for p in window.grid(cfg.seeds_per_axis).chain(window.boundary(cfg.boundary_samples)) {
        sup = sup.max(gap(&p));
    }
    if sup >= r / 2.0 {
        return Err(DegreeError::HypothesisUnverified { sup, bound: r / 2.0 });
    }
    let qf = DegreeQuery::new(
        f.clone(),
        TargetBall::new(center.to_vec(), r),
        center.to_vec(),
        window.clone(),
    );
    let qg = DegreeQuery::new(
        g.clone(),
        TargetBall::new(center.to_vec(), r / 2.0),
        center.to_vec(),
        window.clone(),
    );
    let deg_f = degree(&qf, cfg)?;
    let deg_g = degree(&qg, cfg)?;
    if deg_f != deg_g {
        return Err(DegreeError::StabilityMismatch { deg_f, deg_g });
    }
    Ok(StabilityOutcome { deg_f, deg_g, certified_equal: true, sampled_sup: sup })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceReport {
    pub times: Vec<f64>,
    pub degrees: Vec<i64>,
    pub all_equal: bool,
}

/// Degrees of the slices `f_t` of a fibered family at `t_points` evenly
/// spaced times in `[0, 1]`, with a common target, value and window.
pub fn slice_degree_invariance(
    family: &dyn Fn(f64) -> MapWithJacobian,
    target: &TargetBall,
    regular_value: &[f64],
    window: &BoxWindow,
    t_points: usize,
    cfg: &DegreeConfig,
) -> Result<SliceReport, DegreeError> {
    let n = t_points.max(2);
    let mut times = Vec::with_capacity(n);
    let mut degrees = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let q = DegreeQuery::new(family(t), target.clone(), regular_value.to_vec(), window.clone());
        degrees.push(degree(&q, cfg)?);
        times.push(t);
    }
    let all_equal = degrees.windows(2).all(|w| w[0] == w[1]);
    Ok(SliceReport { times, degrees, all_equal })
}

/// Samples per axis used to check the fiber bound of the windowed graph.
pub const GRAPH_WINDOW_SAMPLES: usize = 24;

/// Degree of the base projection `(x; xi) -> (x, x')` of the windowed twisted
/// graph `Λ ∩ (B_r × B_{3Ar})` onto `B_r`, at the value `0`.
///
/// The fiber bound "base in `B_r` and fiber in `B_{3Ar}` imply fiber in
/// `B_{2Ar}`" is sampled first; it is what makes the windowed projection
/// proper.
pub fn graph_projection_degree(
    graph: &TwistedGraph,
    r: f64,
    a: f64,
    cfg: &DegreeConfig,
) -> Result<i64, DegreeError> {
    if !(r > 0.0 && a > 0.0) {
        return Err(DegreeError::InvalidQuery("need r > 0 and A > 0".into()));
    }
    let n = graph.half_dim();
    if n == 0 || 2 * n > 4 {
        return Err(DegreeError::UnsupportedDimension(2 * n));
    }
    let phi = graph.phi().clone();
    let fiber = move |p: &[f64], img: &[f64]| {
        let v: Vec<f64> = p[n..].iter().chain(img[n..].iter()).copied().collect();
        math::norm(&v)
    };
    let base_of = move |p: &[f64], img: &[f64]| {
        let v: Vec<f64> = p[..n].iter().chain(img[..n].iter()).copied().collect();
        math::norm(&v)
    };

    let mut lo = vec![-r; 2 * n];
    let mut hi = vec![r; 2 * n];
    for k in n..2 * n {
        lo[k] = -3.0 * a * r;
        hi[k] = 3.0 * a * r;
    }
    let window = BoxWindow { lo, hi };

    for p in window.grid(GRAPH_WINDOW_SAMPLES) {
        let img = phi.eval(&p);
        let (b, fb) = (base_of(&p, &img), fiber(&p, &img));
        if b < r && fb < 3.0 * a * r && fb >= 2.0 * a * r {
            return Err(DegreeError::WindowBoundViolated { point: p, fiber: fb, bound: 2.0 * a * r });
        }
    }

    let phi_e = phi.clone();
    let phi_j = phi.clone();
    let base = MapWithJacobian::new(
        2 * n,
        move |p| {
            let img = phi_e.eval(p);
            p[..n].iter().chain(img[..n].iter()).copied().collect()
        },
        move |p| {
            let j = phi_j.jacobian(p);
            let mut out = DMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                out[(i, i)] = 1.0;
                for k in 0..2 * n {
                    out[(n + i, k)] = j[(i, k)];
                }
            }
            out
        },
    );
    let phi_a = phi.clone();
    let admissible = move |p: &[f64]| {
        let img = phi_a.eval(p);
        math::norm(&p[..n]) < r && fiber(p, &img) < 3.0 * a * r
    };
    let target = TargetBall::new(vec![0.0; 2 * n], r);
    let y = vec![0.0; 2 * n];
    signed_count(&base, &target, &y, &window, &admissible, cfg).map(|rep| rep.degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn complex_power(k: u32) -> MapWithJacobian {
        let pow = move |x: f64, y: f64, k: u32| {
            let (mut re, mut im) = (1.0, 0.0);
            for _ in 0..k {
                let t = re * x - im * y;
                im = re * y + im * x;
                re = t;
            }
            (re, im)
        };
        MapWithJacobian::new(
            2,
            move |p| {
                let (re, im) = pow(p[0], p[1], k);
                vec![re, im]
            },
            move |p| {
                // d/dz z^k = k z^{k-1}, as a real 2x2 block
                let (re, im) = pow(p[0], p[1], k - 1);
                let (a, b) = (k as f64 * re, k as f64 * im);
                DMatrix::from_row_slice(2, 2, &[a, -b, b, a])
            },
        )
    }

    fn cfg() -> DegreeConfig {
        DegreeConfig::default()
    }

    #[test]
    fn identity_has_degree_one() {
        let q = DegreeQuery::new(
            MapWithJacobian::identity(2),
            TargetBall::new(vec![0.0, 0.0], 1.0),
            vec![0.0, 0.0],
            BoxWindow::cube(2, 2.0),
        );
        assert_eq!(degree(&q, &cfg()).unwrap(), 1);
    }

    #[test]
    fn complex_square_has_degree_two() {
        let q = DegreeQuery::new(
            complex_power(2),
            TargetBall::new(vec![1.0, 0.0], 0.5),
            vec![1.0, 0.0],
            BoxWindow::cube(2, 2.0),
        );
        let rep = degree_report(&q, &cfg()).unwrap();
        assert_eq!(rep.degree, 2);
        assert_eq!(rep.preimages.len(), 2);
        assert!((rep.preimages[0].point[0] + 1.0).abs() < 1e-9);
        assert!((rep.preimages[1].point[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reflection_has_degree_minus_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let q = DegreeQuery::new(
            MapWithJacobian::linear(m),
            TargetBall::new(vec![0.3, 0.4], 0.5),
            vec![0.3, 0.4],
            BoxWindow::cube(2, 2.0),
        );
        assert_eq!(degree(&q, &cfg()).unwrap(), -1);
    }

    #[test]
    fn critical_value_is_rejected() {
        let q = DegreeQuery::new(
            complex_power(2),
            TargetBall::new(vec![0.0, 0.0], 0.5),
            vec![0.0, 0.0],
            BoxWindow::cube(2, 2.0),
        );
        assert!(matches!(degree(&q, &cfg()), Err(DegreeError::NearCriticalValue { .. })));
    }

    #[test]
    fn small_window_is_not_proper() {
        let q = DegreeQuery::new(
            MapWithJacobian::identity(2),
            TargetBall::new(vec![0.0, 0.0], 1.0),
            vec![0.0, 0.0],
            BoxWindow::cube(2, 0.5),
        );
        assert!(matches!(degree(&q, &cfg()), Err(DegreeError::PropernessViolation { .. })));
    }

    #[test]
    fn dimension_five_is_rejected() {
        let q = DegreeQuery::new(
            MapWithJacobian::identity(5),
            TargetBall::new(vec![0.0; 5], 1.0),
            vec![0.0; 5],
            BoxWindow::cube(5, 2.0),
        );
        assert_eq!(degree(&q, &cfg()), Err(DegreeError::UnsupportedDimension(5)));
    }

    #[test]
    fn one_dimensional_cubic() {
        // x^3 - x hits 0.1 three times, signs + - +
        let f = MapWithJacobian::new(
            1,
            |p| vec![p[0] * p[0] * p[0] - p[0]],
            |p| DMatrix::from_element(1, 1, 3.0 * p[0] * p[0] - 1.0),
        );
        let q = DegreeQuery::new(
            f,
            TargetBall::new(vec![0.1], 0.2),
            vec![0.1],
            BoxWindow::cube(1, 2.0),
        );
        let rep = degree_report(&q, &cfg()).unwrap();
        assert_eq!(rep.preimages.len(), 3);
        assert_eq!(rep.degree, 1);
    }

    #[test]
    fn stability_examples() {
        let w = BoxWindow::cube(2, 2.0);
        let id = MapWithJacobian::identity(2);
        let wiggle = MapWithJacobian::new(
            2,
            |p| vec![p[0] + 0.01 * math::sin(p[1]), p[1] + 0.01 * math::sin(p[0])],
            |p| {
                DMatrix::from_row_slice(2, 2, &[1.0, 0.01 * math::cos(p[1]), 0.01 * math::cos(p[0]), 1.0])
            },
        );
        let out = degree_stability(&id, &wiggle, &[0.0, 0.0], 1.0, 2.0, &w, &cfg()).unwrap();
        assert_eq!((out.deg_f, out.deg_g, out.certified_equal), (1, 1, true));

        let sq = complex_power(2);
        let shifted =
            MapWithJacobian::affine(DMatrix::identity(2, 2), vec![0.05, 0.0]).compose(&sq);
        let out = degree_stability(&sq, &shifted, &[1.0, 0.0], 0.5, 1.0, &w, &cfg()).unwrap();
        assert_eq!((out.deg_f, out.deg_g, out.certified_equal), (2, 2, true));

        let conj = MapWithJacobian::new(
            2,
            |p| vec![p[0] * p[0] - p[1] * p[1], -2.0 * p[0] * p[1]],
            |p| DMatrix::from_row_slice(2, 2, &[2.0 * p[0], -2.0 * p[1], -2.0 * p[1], -2.0 * p[0]]),
        );
        let r = degree_stability(&sq, &conj, &[1.0, 0.0], 0.5, 1.0, &w, &cfg());
        assert!(matches!(r, Err(DegreeError::HypothesisUnverified { .. })));
    }

    #[test]
    fn slices_of_families() {
        let w = BoxWindow::cube(2, 2.0);
        let rot = |t: f64| {
            let (c, s) = (math::cos(6.0 * t), math::sin(6.0 * t));
            MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
        };
        let rep = slice_degree_invariance(
            &rot,
            &TargetBall::new(vec![0.0, 0.0], 1.0),
            &[0.0, 0.0],
            &w,
            11,
            &cfg(),
        )
        .unwrap();
        assert!(rep.all_equal && rep.degrees.iter().all(|d| *d == 1));
        assert_eq!(rep.times.len(), 11);

        let push = |t: f64| {
            MapWithJacobian::affine(DMatrix::identity(2, 2), vec![0.1 * t, 0.0])
                .compose(&complex_power(2))
        };
        let rep = slice_degree_invariance(
            &push,
            &TargetBall::new(vec![1.0, 0.0], 0.5),
            &[1.0, 0.0],
            &w,
            11,
            &cfg(),
        )
        .unwrap();
        assert!(rep.all_equal && rep.degrees[0] == 2);
    }
}
