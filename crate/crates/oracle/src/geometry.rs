//! Small planar and spatial geometry references.

/// Whether `y + cone(g0, g1)` meets the convex polygon with the given
/// vertices (in order). The cone must be pointed with angle below pi.
pub fn polygon_meets_cone(poly: &[[f64; 2]], g0: [f64; 2], g1: [f64; 2], y: [f64; 2]) -> bool {
    let shifted: Vec<[f64; 2]> = poly.iter().map(|p| [p[0] - y[0], p[1] - y[1]]).collect();
    let cross = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
    // orient the cone counterclockwise from g0 to g1
    let (g0, g1) = if cross(g0, g1) >= 0.0 { (g0, g1) } else { (g1, g0) };
    let in_cone = |p: [f64; 2]| cross(g0, p) >= -1e-12 && cross(p, g1) >= -1e-12;
    if shifted.iter().any(|&p| in_cone(p)) {
        return true;
    }
    if point_in_polygon(&shifted, [0.0, 0.0]) {
        return true;
    }
    let n = shifted.len();
    for i in 0..n {
        let (a, b) = (shifted[i], shifted[(i + 1) % n]);
        for g in [g0, g1] {
            if ray_hits_segment(g, a, b) {
                return true;
            }
        }
    }
    false
}

fn point_in_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return poly[0] == p;
    }
    let mut sign = 0.0f64;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if c.abs() < 1e-12 {
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

/// Ray from the origin along `g` against the segment `[a, b]`.
fn ray_hits_segment(g: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    // solve t g = a + s (b - a), t >= 0, s in [0, 1]
    let d = [b[0] - a[0], b[1] - a[1]];
    let det = g[0] * (-d[1]) - g[1] * (-d[0]);
    if det.abs() < 1e-15 {
        return false;
    }
    let t = (a[0] * (-d[1]) - a[1] * (-d[0])) / det;
    let s = (g[0] * a[1] - g[1] * a[0]) / det;
    t >= -1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s)
}

/// Boundary slope of the polar of `{x_n <= -c |x'|}`, found by bisection on
/// the height `t` of `xi = (1, t)` with the linear minimum over the two
/// meridian generators `(+-1, -c)` as the feasibility test.
pub fn round_polar_slope(c: f64) -> f64 {
    let feasible = |t: f64| {
        let gens = [[1.0, -c], [-1.0, -c]];
        gens.iter().map(|g| g[0] + g[1] * t).fold(f64::INFINITY, f64::min) >= 0.0
    };
    let (mut lo, mut hi) = (-1e6, 0.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    -0.5 * (lo + hi)
}

/// Facets of `cone(rays)` in `R^3` by checking every pair cross product.
pub fn facets_3d(rays: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut out: Vec<[f64; 3]> = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            let n = cross(rays[i], rays[j]);
            let len = dot(n, n).sqrt();
            if len < 1e-12 {
                continue;
            }
            let n = [n[0] / len, n[1] / len, n[2] / len];
            for cand in [n, [-n[0], -n[1], -n[2]]] {
                if rays.iter().all(|&r| dot(cand, r) <= 1e-12)
                    && !out.iter().any(|o| (0..3).all(|k| (o[k] - cand[k]).abs() < 1e-9))
                {
                    out.push(cand);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_quadrant() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let down = ([-1.0, 0.0], [0.0, -1.0]);
        assert!(polygon_meets_cone(&sq, down.0, down.1, [2.0, 2.0]));
        assert!(polygon_meets_cone(&sq, down.0, down.1, [0.5, 0.5]));
        assert!(!polygon_meets_cone(&sq, down.0, down.1, [-0.5, 2.0]));
    }

    #[test]
    fn polar_slope() {
        assert!((round_polar_slope(2.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orthant() {
        let f = facets_3d(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(f.len(), 3);
    }
}
