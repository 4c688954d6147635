//! Parameter chains: slopes and margins for the cut-off, the split radius,
//! and the four nested windows.

use alloc::format;

use super::region::{region_contains, Region};
use super::ConesError;
use crate::math;

use core::f64::consts::{FRAC_PI_2, PI};

/// Directions marched by [`split_radius`].
pub const SPLIT_DIRECTIONS: usize = 720;

/// Shrink factors of the four windows.
pub const LADDER_MU: [f64; 4] = [0.04, 0.03, 0.02, 0.01];

const VERIFY_SAMPLES: usize = 10_000;

/// Slope `c` and margin `eps` for a pair `c1 < c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParams {
    pub c: f64,
    pub eps: f64,
}

impl CutoffParams {
    /// The slope `c + eps/2` used for the translated double cones.
    pub fn c_prime(&self) -> f64 {
        self.c + self.eps / 2.0
    }
}

fn check_slopes(c1: f64, c2: f64) -> Result<(), ConesError> {
    if c1 > 0.0 && c2 > c1 && c2.is_finite() {
        Ok(())
    } else {
        Err(ConesError::InvalidRegionParameters(format!(
            "need 0 < c1 < c2, got c1 = {c1}, c2 = {c2}"
        )))
    }
}

/// Picks `c` with polar boundary angle halfway between those of `c1` and `c2`,
/// and `eps` as the chord of half the remaining angular margin.
pub fn cutoff_params(c1: f64, c2: f64) -> Result<CutoffParams, ConesError> {
    check_slopes(c1, c2)?;
    let a1 = math::atan(c1);
    let a2 = math::atan(c2);
    let alpha = 0.5 * (a1 + a2);
    let margin = 0.5 * (a2 - a1);
    Ok(CutoffParams {
        c: math::tan(alpha),
        eps: 2.0 * math::sin(margin / 4.0),
    })
}

/// Checks that every direction within `eps` of the boundary of the polar of
/// the slope-`c` cone lies between the polars of the `c2` and `c1` cones.
///
/// Directions are parametrized in the meridian plane by their angle from the
/// polar axis; uniform samples are supplemented by samples packed against the
/// two admissible edges and the thickening edges.
pub fn verify_cutoff_params(c1: f64, c2: f64, c: f64, eps: f64) -> bool {
    if check_slopes(c1, c2).is_err() || !(c > 0.0) || !(eps > 0.0) {
        return false;
    }
    let a1 = math::atan(c1);
    let a2 = math::atan(c2);
    let alpha = math::atan(c);
    let ok = |theta: f64| {
        if !(0.0..=PI).contains(&theta) {
            return true;
        }
        let gap = math::abs(theta - alpha).min(FRAC_PI_2);
        let thick = math::sin(gap) < eps;
        !thick || (a1 <= theta && theta <= a2)
    };
    for k in 0..=VERIFY_SAMPLES {
        if !ok(PI * k as f64 / VERIFY_SAMPLES as f64) {
            return false;
        }
    }
    let reach = if eps < 1.0 { math::asin(eps) } else { FRAC_PI_2 };
    let edges = [a1, a2, alpha - reach, alpha + reach];
    let per = VERIFY_SAMPLES / (2 * edges.len());
    for e in edges {
        for k in 0..per {
            let off = math::powi(10.0, -((k % 16) as i32)) * (1.0 + (k / 16) as f64) * 1e-1;
            if !ok(e - off) || !ok(e + off) {
                return false;
            }
        }
    }
    true
}

/// Largest radius of a ball at the origin inside the planar `W` region built
/// from `cutoff_params(c1, c2)`, `c' = c + eps/2` and `delta = eps r / 4`.
pub fn split_radius(c1: f64, c2: f64, r: f64) -> Result<f64, ConesError> {
    let p = cutoff_params(c1, c2)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(ConesError::InvalidRegionParameters(format!(
            "r must be positive and finite, got {r}"
        )));
    }
    let w = Region::W {
        c: p.c,
        c_prime: p.c_prime(),
        r,
        delta: p.eps * r / 4.0,
        eps: p.eps,
    };
    let inside = |x: f64, y: f64| region_contains(&w, &[x, y]).unwrap_or(false);
    if !inside(0.0, 0.0) {
        return Ok(0.0);
    }
    let step = r / 4096.0;
    let mut best = r;
    for k in 0..SPLIT_DIRECTIONS {
        let th = 2.0 * PI * k as f64 / SPLIT_DIRECTIONS as f64;
        let (dy, dx) = (math::sin(th), math::cos(th));
        let mut lo = 0.0;
        let mut hi = None;
        let mut t = step;
        while t < best {
            if !inside(t * dx, t * dy) {
                hi = Some(t);
                break;
            }
            lo = t;
            t += step;
        }
        let Some(mut hi) = hi else {
            continue;
        };
        while hi - lo > 1e-7 * hi {
            let mid = 0.5 * (lo + hi);
            if inside(mid * dx, mid * dy) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(hi);
    }
    Ok(best)
}

/// One window `B(0, ball_radius) x (center - half_width, center + half_width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    /// The slice interval it was shrunk from.
    pub slice: (f64, f64),
    pub center: f64,
    pub half_width: f64,
    pub ball_radius: f64,
    pub shrink: f64,
}

impl Window {
    pub fn contains(&self, x: &[f64]) -> bool {
        let n = x.len();
        math::norm(&x[..n - 1]) < self.ball_radius
            && math::abs(x[n - 1] - self.center) < self.half_width
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Four nested boxes around the vertical axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowLadder {
    pub r1: f64,
    pub c1: f64,
    pub rho: f64,
    pub windows: [Window; 4],
}

impl WindowLadder {
    /// Membership in window `index`, counted from 1.
    pub fn contains(&self, index: usize, x: &[f64]) -> bool {
        !x.is_empty() && (1..=4).contains(&index) && self.windows[index - 1].contains(x)
    }

    /// Smallest gap between the closure of a window and the boundary of the
    /// next one; positive when the closures nest.
    pub fn nesting_margin(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..3 {
            let (a, b) = (&self.windows[i], &self.windows[i + 1]);
            let (alo, ahi) = a.interval();
            let (blo, bhi) = b.interval();
            m = m
                .min(b.ball_radius - a.ball_radius)
                .min(bhi - ahi)
                .min(alo - blo);
        }
        m
    }
}

/// Builds the ladder from the slices `(-r1/8, -r1/16)`, `(-r1/4, 0)`,
/// `(-r1/2, r1/2)` and `(-r1, r1)`.
pub fn window_ladder(r1: f64, c1: f64) -> Result<WindowLadder, ConesError> {
    if !(r1 > 0.0 && r1.is_finite() && c1 > 0.0 && c1.is_finite()) {
        return Err(ConesError::InvalidRegionParameters(format!(
            "need r1, c1 > 0, got r1 = {r1}, c1 = {c1}"
        )));
    }
    let slices = [
        (-r1 / 8.0, -r1 / 16.0),
        (-r1 / 4.0, 0.0),
        (-r1 / 2.0, r1 / 2.0),
        (-r1, r1),
    ];
    let min_half = slices
        .iter()
        .map(|(a, b)| 0.5 * (b - a))
        .fold(f64::INFINITY, f64::min);
    let rho = 0.5 * min_half / c1;
    let mut windows = [Window {
        slice: (0.0, 0.0),
        center: 0.0,
        half_width: 0.0,
        ball_radius: 0.0,
        shrink: 0.0,
    }; 4];
    for (i, (lo, hi)) in slices.into_iter().enumerate() {
        let mu = LADDER_MU[i];
        windows[i] = Window {
            slice: (lo, hi),
            center: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo) * (1.0 - mu),
            ball_radius: (i + 1) as f64 * rho / 8.0,
            shrink: mu,
        };
    }
    Ok(WindowLadder {
        r1,
        c1,
        rho,
        windows,
    })
}
