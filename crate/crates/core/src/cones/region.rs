//! The regions `Z`, `W`, `U`, balls, ladder windows, and the conormal
//! arrangement of a round cone translated to a point.

use alloc::format;
use alloc::vec::Vec;

use super::params::WindowLadder;
use super::{ConesError, Orientation, RoundCone};
use crate::math;

/// Number of off-meridian angles sampled on `[0, pi]` by the `W` test in
/// dimension three and higher.
pub const W_SWEEP: usize = 721;

const SLACK: f64 = 1e-12;

/// A region of `R^n`, `n >= 1`, with `x_n` the last coordinate.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// `|x'| < r` and `-delta - c|x'| < x_n <= delta + c|x'|`.
    Z { c: f64, r: f64, delta: f64 },
    /// Points of `Z(c, r, delta)` whose slope-`c_prime` double cone meets the
    /// boundary of `Z` inside the cylinder, with conormals `eps`-close.
    W {
        c: f64,
        c_prime: f64,
        r: f64,
        delta: f64,
        eps: f64,
    },
    /// `|x'| < r` and `-s < x_n < s - c|x'|`.
    U { c: f64, r: f64, s: f64 },
    /// Open ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Window `index` (1 to 4) of a ladder.
    Window { ladder: WindowLadder, index: usize },
}

fn bad(msg: impl Into<alloc::string::String>) -> ConesError {
    ConesError::InvalidRegionParameters(msg.into())
}

fn pos(name: &str, v: f64) -> Result<(), ConesError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Region {
    pub fn validate(&self) -> Result<(), ConesError> {
        match self {
            Region::Z { c, r, delta } => {
                pos("c", *c)?;
                pos("r", *r)?;
                pos("delta", *delta)
            }
            Region::W {
                c,
                c_prime,
                r,
                delta,
                eps,
            } => {
                pos("c", *c)?;
                pos("r", *r)?;
                pos("delta", *delta)?;
                pos("eps", *eps)?;
                if !(c_prime > c) || !c_prime.is_finite() {
                    return Err(bad(format!("need c' > c, got c = {c}, c' = {c_prime}")));
                }
                Ok(())
            }
            Region::U { c, r, s } => {
                pos("c", *c)?;
                pos("r", *r)?;
                pos("s", *s)?;
                if !(*r < *s / *c) {
                    return Err(bad(format!("need r < s/c, got r = {r}, s/c = {}", s / c)));
                }
                Ok(())
            }
            Region::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(bad("ball center is empty"));
                }
                pos("radius", *radius)
            }
            Region::Window { index, .. } => {
                if (1..=4).contains(index) {
                    Ok(())
                } else {
                    Err(bad(format!("window index {index} outside 1..=4")))
                }
            }
        }
    }

    /// Smallest slack over the defining strict inequalities of a `W` region;
    /// positive exactly on members. `None` for other kinds.
    pub fn w_slack(&self, x: &[f64]) -> Result<Option<f64>, ConesError> {
        self.validate()?;
        match self {
            Region::W {
                c,
                c_prime,
                r,
                delta,
                eps,
            } => {
                if x.len() < 2 {
                    return Err(bad("W regions need dimension at least 2"));
                }
                Ok(Some(w_slack(*c, *c_prime, *r, *delta, *eps, x)))
            }
            _ => Ok(None),
        }
    }
}

/// Exact membership test.
pub fn region_contains(region: &Region, x: &[f64]) -> Result<bool, ConesError> {
    region.validate()?;
    if x.is_empty() {
        return Err(bad("empty point"));
    }
    let n = x.len();
    let p = math::norm(&x[..n - 1]);
    let h = x[n - 1];
    Ok(match region {
        Region::Z { c, r, delta } => in_z(*c, *r, *delta, p, h),
        Region::W { .. } => region.w_slack(x)?.unwrap_or(-1.0) > 0.0,
        Region::U { c, r, s } => p < *r && -*s < h && h < *s - c * p,
        Region::Ball { center, radius } => {
            if center.len() != n {
                return Err(ConesError::DimensionMismatch {
                    expected: center.len(),
                    found: n,
                });
            }
            let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
            math::norm(&d) < *radius
        }
        Region::Window { ladder, index } => ladder.contains(*index, x),
    })
}

fn in_z(c: f64, r: f64, delta: f64, p: f64, h: f64) -> bool {
    let top = delta + c * p;
    p < r && h > -delta - c * p && h <= top + SLACK * top.abs().max(1.0)
}

/// First `t > 0` with `sigma * (h - delta_sign) + c' t = c |x' + t u|`, where the
/// left side grows strictly faster than the right.
///
/// `a` is the signed offset `h - delta` (upper boundary) or `-(h + delta)`
/// (lower boundary after reflection), `p` the radial coordinate of `x'` and
/// `pu` its component along `u`.
fn nappe_hit(a: f64, p: f64, pu: f64, c: f64, cp: f64) -> f64 {
    let f = |t: f64| a + cp * t - c * math::sqrt((p * p + 2.0 * t * pu + t * t).max(0.0));
    // quadratic from squaring; keep the root where a + c't >= 0
    let qa = cp * cp - c * c;
    let qb = 2.0 * (a * cp - c * c * pu);
    let qc = a * a - c * c * p * p;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
    let sq = math::sqrt(disc);
    let mut best = f64::NAN;
    let mut best_res = f64::INFINITY;
    for t in [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)] {
        if t > 0.0 && a + cp * t >= -1e-12 * a.abs().max(1.0) {
            let res = f(t).abs();
            if res < best_res {
                best = t;
                best_res = res;
            }
        }
    }
    if best.is_finite() && best_res <= 1e-9 * (a.abs() + p + 1.0) {
        return best;
    }
    // bisection fallback: f(0) < 0 and f grows at rate >= c' - c
    let mut lo = 0.0;
    let mut hi = -f(0.0) / (cp - c) + 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sine of the angle between two vectors, or `None` when the angle is at
/// least a right angle.
fn acute_sine(a: &[f64; 3], b: &[f64; 3]) -> Option<f64> {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let na = math::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    let nb = math::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    let cos = dot / (na * nb);
    if cos <= 0.0 {
        None
    } else {
        Some(math::sqrt((1.0 - cos * cos).max(0.0)))
    }
}

fn w_slack(c: f64, cp: f64, r: f64, delta: f64, eps: f64, x: &[f64]) -> f64 {
    let n = x.len();
    let p = math::norm(&x[..n - 1]);
    let h = x[n - 1];
    let scale = r.max(delta).max(1.0);

    // inside Z, strictly below the closed upper boundary
    let mut slack = [
        (r - p) / scale,
        (h + delta + c * p) / scale,
        (delta + c * p - h) / scale,
        // the apexes (0, +-delta) stay off the closed double cone at x
        ((delta - h).abs() - cp * p) / scale,
        ((delta + h).abs() - cp * p) / scale,
        // the intersection stays inside the cylinder
        (r - (delta + cp * p + h.abs()) / (cp - c)) / scale,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    if slack <= 0.0 {
        return slack;
    }

    // reduced frame: x' = (p, 0), direction u = (cos phi, sin phi)
    let phis: Vec<f64> = if n == 2 {
        alloc::vec![0.0, core::f64::consts::PI]
    } else if p == 0.0 {
        alloc::vec![0.0]
    } else {
        (0..W_SWEEP)
            .map(|k| core::f64::consts::PI * k as f64 / (W_SWEEP - 1) as f64)
            .collect()
    };
    let mut worst: f64 = 0.0;
    for phi in phis {
        let (su, cu) = (math::sin(phi), math::cos(phi));
        let pu = p * cu;
        for upper in [true, false] {
            // lower boundary handled by reflecting x_n
            let a = if upper { h - delta } else { -(h + delta) };
            let t = nappe_hit(a, p, pu, c, cp);
            let y = [p + t * cu, t * su];
            let ny = math::sqrt(y[0] * y[0] + y[1] * y[1]);
            if ny == 0.0 {
                return -1.0;
            }
            let s = if upper { 1.0 } else { -1.0 };
            let eta = [s * cp * cu, s * cp * su, -1.0];
            let nu = [s * c * y[0] / ny, s * c * y[1] / ny, -1.0];
            match acute_sine(&eta, &nu) {
                Some(v) => worst = worst.max(v),
                None => return -1.0,
            }
        }
    }
    slack = slack.min(eps - worst);
    slack
}

/// Conormal arrangement of a round cone translated to `x`: pairs `(y; eta)`
/// with `y` on either nappe through `x` and `eta` on the boundary of the
/// antipodal polar cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SGammaX {
    apex: Vec<f64>,
    cone: RoundCone,
}

/// Builds the arrangement for `x` and `gamma`.
pub fn s_gamma_x(x: &[f64], gamma: &RoundCone) -> Result<SGammaX, ConesError> {
    if x.len() != gamma.dim() {
        return Err(ConesError::DimensionMismatch {
            expected: gamma.dim(),
            found: x.len(),
        });
    }
    Ok(SGammaX {
        apex: x.to_vec(),
        cone: *gamma,
    })
}

const ARR_TOL: f64 = 1e-9;

impl SGammaX {
    pub fn apex(&self) -> &[f64] {
        &self.apex
    }

    pub fn cone(&self) -> &RoundCone {
        &self.cone
    }

    pub fn contains(&self, y: &[f64], eta: &[f64]) -> Result<bool, ConesError> {
        let n = self.cone.dim();
        if y.len() != n || eta.len() != n {
            return Err(ConesError::DimensionMismatch {
                expected: n,
                found: if y.len() != n { y.len() } else { eta.len() },
            });
        }
        if math::norm(eta) == 0.0 {
            return Ok(false);
        }
        Ok(match self.cone.orientation() {
            Orientation::Down => self.contains_down(y, eta),
            Orientation::Up => {
                let neg: Vec<f64> = eta.iter().map(|v| -v).collect();
                self.contains_down(y, &neg)
            }
        })
    }

    /// The fiber over the apex is the boundary of the antipodal polar cone;
    /// over a smooth boundary point it is a single ray.
    fn contains_down(&self, y: &[f64], eta: &[f64]) -> bool {
        let n = self.cone.dim();
        let c = self.cone.slope();
        let z: Vec<f64> = y.iter().zip(&self.apex).map(|(a, b)| a - b).collect();
        let zn = math::norm(&z);
        let scale = zn.max(1.0);
        if zn <= ARR_TOL * scale {
            let mut polar_up = self.cone.polar();
            polar_up.orientation = Orientation::Up;
            return polar_up.boundary_distance(eta) <= ARR_TOL * math::norm(eta);
        }
        let rad = math::norm(&z[..n - 1]);
        if rad <= ARR_TOL * scale {
            return false;
        }
        let h = z[n - 1];
        let mut ray: Vec<f64> = z[..n - 1].iter().map(|v| c * v / rad).collect();
        if (h + c * rad).abs() <= ARR_TOL * scale {
            // down nappe, boundary of x + gamma
            ray.push(1.0);
        } else if (h - c * rad).abs() <= ARR_TOL * scale {
            // up nappe, boundary of x - gamma
            for v in ray.iter_mut() {
                *v = -*v;
            }
            ray.push(1.0);
        } else {
            return false;
        }
        parallel(&ray, eta)
    }
}

fn parallel(a: &[f64], b: &[f64]) -> bool {
    let na = math::norm(a);
    let nb = math::norm(b);
    let cos = math::dot(a, b) / (na * nb);
    cos > 0.0 && 1.0 - cos <= ARR_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_and_u_membership() {
        let z = Region::Z {
            c: 1.0,
            r: 2.0,
            delta: 0.5,
        };
        assert!(region_contains(&z, &[0.0, 0.0]).unwrap());
        assert!(!region_contains(&z, &[0.0, -1.5]).unwrap());
        assert!(region_contains(&z, &[0.0, 0.5]).unwrap());
        assert!(!region_contains(&z, &[0.0, -0.5]).unwrap());
        assert!(!region_contains(&z, &[2.0, 0.0]).unwrap());

        let u = Region::U {
            c: 1.0,
            r: 1.0,
            s: 2.0,
        };
        assert!(region_contains(&u, &[0.0, 0.0]).unwrap());
        assert!(!region_contains(&u, &[0.0, 2.0]).unwrap());
        let bad_u = Region::U {
            c: 1.0,
            r: 3.0,
            s: 2.0,
        };
        assert!(matches!(
            region_contains(&bad_u, &[0.0, 0.0]),
            Err(ConesError::InvalidRegionParameters(_))
        ));
    }

    #[test]
    fn origin_in_w_with_standard_choice() {
        for &(c, r, eps) in &[(1.0, 1.0, 0.1), (0.3, 5.0, 0.02), (2.0, 0.5, 0.4)] {
            let w = Region::W {
                c,
                c_prime: c + eps / 2.0,
                r,
                delta: eps * r / 4.0,
                eps,
            };
            assert!(region_contains(&w, &[0.0, 0.0]).unwrap());
            assert!(region_contains(&w, &[0.0, 0.0, 0.0]).unwrap());
        }
    }

    #[test]
    fn w_rejects_large_delta() {
        let w = Region::W {
            c: 1.0,
            c_prime: 1.05,
            r: 1.0,
            delta: 0.06,
            eps: 0.1,
        };
        assert!(!region_contains(&w, &[0.0, 0.0]).unwrap());
    }

    #[test]
    fn nappe_root_solves_equation() {
        let (a, p, pu, c, cp) = (-0.3, 0.2, -0.1, 1.0, 1.4);
        let t = nappe_hit(a, p, pu, c, cp);
        let lhs = a + cp * t;
        let rhs = c * (p * p + 2.0 * t * pu + t * t).sqrt();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn arrangement_fibers() {
        let g = RoundCone::down(2, 1.0).unwrap();
        let s = s_gamma_x(&[0.0, 0.0], &g).unwrap();
        // apex: boundary of the upward cone of slope 1
        assert!(s.contains(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(s.contains(&[0.0, 0.0], &[-1.0, 1.0]).unwrap());
        assert!(!s.contains(&[0.0, 0.0], &[0.0, 1.0]).unwrap());
        // off both nappes
        assert!(!s.contains(&[0.0, 1.0], &[0.0, 1.0]).unwrap());
        // down nappe at (1, -1): ray (1, 1)
        assert!(s.contains(&[1.0, -1.0], &[2.0, 2.0]).unwrap());
        assert!(!s.contains(&[1.0, -1.0], &[-1.0, -1.0]).unwrap());
        // up nappe at (1, 1): ray (-1, 1)
        assert!(s.contains(&[1.0, 1.0], &[-1.0, 1.0]).unwrap());
        let up = s_gamma_x(&[0.0, 0.0], &g.antipode()).unwrap();
        assert!(up.contains(&[1.0, 1.0], &[1.0, -1.0]).unwrap());
        assert!(!up.contains(&[1.0, 1.0], &[-1.0, 1.0]).unwrap());
    }
}
