//! Cones in `R^n` and the regions built from them.
//!
//! Points are slices `[x_1, .., x_n]`; the last coordinate is the axis of
//! the round cones and `x'` denotes the first `n - 1` coordinates.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;

mod params;
mod poly;
mod region;

pub use params::{
    cutoff_params, split_radius, verify_cutoff_params, window_ladder, CutoffParams, Window,
    WindowLadder, LADDER_MU, SPLIT_DIRECTIONS,
};
pub use poly::{PolyhedralCone, POLY_TOL};
pub use region::{region_contains, s_gamma_x, Region, SGammaX, W_SWEEP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConesError {
    #[error("covector must be nonzero")]
    ZeroCovector,
    #[error("invalid region parameters: {0}")]
    InvalidRegionParameters(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("facet and generator descriptions disagree")]
    InconsistentDescriptions,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
}

/// Which nappe a round cone is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `x_n <= -c |x'|`
    Down,
    /// `x_n >= c |x'|`
    Up,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Down => -1.0,
            Orientation::Up => 1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Down => Orientation::Up,
            Orientation::Up => Orientation::Down,
        }
    }
}

/// `{x : s x_n >= c |x'|}` with `s = -1` for `Down`.
///
/// The slope is kept as a ratio `rise / run` so that taking the polar twice
/// returns the same value bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct RoundCone {
    pub(crate) dim: usize,
    rise: f64,
    run: f64,
    pub(crate) orientation: Orientation,
}

impl PartialEq for RoundCone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.orientation == other.orientation
            && self.rise * other.run == other.rise * self.run
    }
}

impl RoundCone {
    pub fn new(dim: usize, slope: f64, orientation: Orientation) -> Result<Self, ConesError> {
        if dim == 0 {
            return Err(ConesError::InvalidCone("dimension must be positive".into()));
        }
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(ConesError::InvalidCone(alloc::format!(
                "slope must be positive and finite, got {slope}"
            )));
        }
        Ok(Self {
            dim,
            rise: slope,
            run: 1.0,
            orientation,
        })
    }

    pub fn down(dim: usize, slope: f64) -> Result<Self, ConesError> {
        Self::new(dim, slope, Orientation::Down)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slope(&self) -> f64 {
        self.rise / self.run
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn polar(&self) -> Self {
        Self {
            rise: self.run,
            run: self.rise,
            ..*self
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            orientation: self.orientation.flip(),
            ..*self
        }
    }

    /// Angle between the axis direction and the boundary, in `(0, pi/2)`.
    pub fn half_angle(&self) -> f64 {
        math::atan2(self.run, self.rise)
    }

    /// Signed height `s x_n - c |x'|`; nonnegative exactly on the cone.
    pub fn height(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        self.orientation.sign() * x[n - 1] - self.slope() * math::norm(&x[..n - 1])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.height(x) >= -1e-12 * math::norm(x).max(1.0)
    }

    /// Distance from `x` to the boundary surface `s x_n = c |x'|`.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let r = math::norm(x);
        if n == 1 {
            return r;
        }
        // angle of x from the axis, measured in its meridian half-plane
        let axial = self.orientation.sign() * x[n - 1];
        let radial = math::norm(&x[..n - 1]);
        let theta = math::atan2(radial, axial);
        let gap = math::abs(theta - self.half_angle());
        r * math::sin(gap.min(core::f64::consts::FRAC_PI_2))
    }
}

/// A closed convex cone, round or polyhedral.
#[derive(Debug, Clone, PartialEq)]
pub enum Cone {
    Round(RoundCone),
    Polyhedral(PolyhedralCone),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match self {
            Cone::Round(c) => c.dim(),
            Cone::Polyhedral(p) => p.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Cone::Round(c) => c.contains(x),
            Cone::Polyhedral(p) => p.contains(x),
        }
    }
}

/// Polar cone `{xi : <v, xi> >= 0 for all v in gamma}`.
pub fn polar(cone: &Cone) -> Cone {
    match cone {
        Cone::Round(c) => Cone::Round(c.polar()),
        Cone::Polyhedral(p) => Cone::Polyhedral(p.polar()),
    }
}

pub fn antipode(cone: &Cone) -> Cone {
    match cone {
        Cone::Round(c) => Cone::Round(c.antipode()),
        Cone::Polyhedral(p) => Cone::Polyhedral(p.antipode()),
    }
}

/// `gamma` contains no line.
pub fn is_proper(cone: &Cone) -> bool {
    match cone {
        Cone::Round(_) => true,
        Cone::Polyhedral(p) => p.is_proper(),
    }
}

pub fn interior_nonempty(cone: &Cone) -> bool {
    match cone {
        Cone::Round(_) => true,
        Cone::Polyhedral(p) => p.interior_nonempty(),
    }
}

/// A conic set in a single cotangent fiber.
#[derive(Debug, Clone, PartialEq)]
pub enum ConicSet {
    /// The boundary surface of a round cone.
    RoundBoundary(RoundCone),
    /// A finite union of rays.
    Rays(Vec<Vec<f64>>),
    Polyhedral(PolyhedralCone),
}

/// Whether `d(xi, C) < eps |xi|`.
pub fn thicken_contains(set: &ConicSet, eps: f64, xi: &[f64]) -> Result<bool, ConesError> {
    let r = math::norm(xi);
    if r == 0.0 {
        return Err(ConesError::ZeroCovector);
    }
    let d = match set {
        ConicSet::RoundBoundary(c) => {
            check_dim(c.dim(), xi.len())?;
            c.boundary_distance(xi)
        }
        ConicSet::Rays(rays) => {
            let mut best = r;
            for ray in rays {
                check_dim(ray.len(), xi.len())?;
                let n = math::norm(ray);
                if n == 0.0 {
                    continue;
                }
                let t = math::dot(ray, xi) / n;
                if t > 0.0 {
                    best = best.min(math::sqrt((r * r - t * t).max(0.0)));
                }
            }
            best
        }
        ConicSet::Polyhedral(p) => {
            check_dim(p.dim(), xi.len())?;
            p.distance(xi)
        }
    };
    Ok(d < eps * r)
}

fn check_dim(expected: usize, found: usize) -> Result<(), ConesError> {
    if expected == found {
        Ok(())
    } else {
        Err(ConesError::DimensionMismatch { expected, found })
    }
}

/// Optional label on a sampled ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RayTag {
    Plus,
    Minus,
}

/// Finitely many unit covectors over one basepoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSample {
    basepoint: Vec<f64>,
    rays: Vec<Vec<f64>>,
    tags: Vec<Option<RayTag>>,
}

impl ConicSample {
    /// Rays are rescaled to unit length; zero rays are rejected.
    pub fn new(basepoint: Vec<f64>, rays: Vec<Vec<f64>>) -> Result<Self, ConesError> {
        let tags = alloc::vec![None; rays.len()];
        Self::with_tags(basepoint, rays, tags)
    }

    pub fn with_tags(
        basepoint: Vec<f64>,
        rays: Vec<Vec<f64>>,
        tags: Vec<Option<RayTag>>,
    ) -> Result<Self, ConesError> {
        if tags.len() != rays.len() {
            return Err(ConesError::DimensionMismatch {
                expected: rays.len(),
                found: tags.len(),
            });
        }
        let dim = basepoint.len();
        let mut unit = Vec::with_capacity(rays.len());
        for r in rays {
            check_dim(dim, r.len())?;
            let n = math::norm(&r);
            if n == 0.0 {
                return Err(ConesError::ZeroCovector);
            }
            unit.push(r.iter().map(|x| x / n).collect());
        }
        Ok(Self {
            basepoint,
            rays: unit,
            tags,
        })
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    pub fn tags(&self) -> &[Option<RayTag>] {
        &self.tags
    }

    pub fn dim(&self) -> usize {
        self.basepoint.len()
    }
}

/// Convex conic hull of a sample, with facets and extreme generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicHull {
    pub basepoint: Vec<f64>,
    pub cone: PolyhedralCone,
}

impl ConicHull {
    pub fn contains(&self, xi: &[f64]) -> bool {
        self.cone.contains(xi)
    }

    /// The extreme generators as a sample over the same basepoint.
    pub fn as_sample(&self) -> ConicSample {
        ConicSample {
            basepoint: self.basepoint.clone(),
            rays: self.cone.generators().to_vec(),
            tags: alloc::vec![None; self.cone.generators().len()],
        }
    }
}

/// Fiberwise conic hull; the flag is false iff the hull contains a line.
pub fn conv_conic(sample: &ConicSample) -> Result<(ConicHull, bool), ConesError> {
    let cone = PolyhedralCone::from_generators(sample.dim(), &sample.rays)?;
    let proper = cone.is_proper();
    Ok((
        ConicHull {
            basepoint: sample.basepoint.clone(),
            cone,
        },
        proper,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn round_polar_inverts_slope() {
        let c = RoundCone::down(3, 2.0).unwrap();
        let p = c.polar();
        assert_eq!(p.slope(), 0.5);
        assert_eq!(p.orientation(), Orientation::Down);
        assert_eq!(c.antipode().orientation(), Orientation::Up);
        assert!(RoundCone::down(2, 0.0).is_err());
    }

    #[test]
    fn half_line_polar() {
        let h = Cone::Round(RoundCone::down(1, 1.0).unwrap());
        assert!(polar(&h).contains(&[-1.0]));
        assert!(!polar(&h).contains(&[1.0]));
        let p = Cone::Polyhedral(PolyhedralCone::from_generators(1, &[vec![-1.0]]).unwrap());
        let q = polar(&p);
        assert!(q.contains(&[-3.0]) && !q.contains(&[3.0]));
    }

    #[test]
    fn properness() {
        let half = PolyhedralCone::from_normals(2, &[vec![0.0, -1.0]]).unwrap();
        assert!(!is_proper(&Cone::Polyhedral(half)));
        let ray = PolyhedralCone::from_generators(2, &[vec![1.0, 0.0]]).unwrap();
        assert!(!interior_nonempty(&Cone::Polyhedral(ray)));
    }

    #[test]
    fn thickening_of_a_ray() {
        let set = ConicSet::Rays(vec![vec![1.0, 0.0]]);
        let th = 0.3f64;
        let xi = [th.cos(), th.sin()];
        assert!(thicken_contains(&set, 0.3, &xi).unwrap());
        assert!(!thicken_contains(&set, 0.29, &xi).unwrap());
        assert!(thicken_contains(&set, 1e-6, &[2.0, 0.0]).unwrap());
        assert!(!thicken_contains(&set, 0.1, &[-1.0, 0.1]).unwrap());
        assert_eq!(
            thicken_contains(&set, 0.1, &[0.0, 0.0]),
            Err(ConesError::ZeroCovector)
        );
    }

    #[test]
    fn thickening_of_round_boundary() {
        let c = RoundCone::down(2, 1.0).unwrap();
        let set = ConicSet::RoundBoundary(c);
        assert!(thicken_contains(&set, 1e-9, &[1.0, -1.0]).unwrap());
        assert!(thicken_contains(&set, 1e-9, &[-1.0, -1.0]).unwrap());
        assert!(!thicken_contains(&set, 0.5, &[0.0, -1.0]).unwrap());
        assert!(thicken_contains(&set, 0.8, &[0.0, -1.0]).unwrap());
    }

    #[test]
    fn hulls() {
        let s = ConicSample::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (h, proper) = conv_conic(&s).unwrap();
        assert!(proper);
        assert!(h.contains(&[1.0, 1.0]));
        assert!(!h.contains(&[-1.0, 1.0]));

        let s = ConicSample::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let (h, proper) = conv_conic(&s).unwrap();
        assert!(!proper);
        assert!(h.contains(&[-5.0, 0.0]));
        assert!(!h.contains(&[0.0, 1.0]));

        let s = ConicSample::new(
            vec![0.0; 3],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let (h, proper) = conv_conic(&s).unwrap();
        assert!(proper);
        assert_eq!(h.cone.normals().len(), 3);
    }
}
