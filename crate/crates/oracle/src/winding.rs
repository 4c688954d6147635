//! Degree of planar and 1-D maps from boundary data.

use std::f64::consts::PI;

/// Winding number of `f` along the boundary of the box `[lo, hi]` around `y`,
/// summing principal angle increments over `steps` points per side.
pub fn box_winding<F>(f: F, y: [f64; 2], lo: [f64; 2], hi: [f64; 2], steps: usize) -> i64
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let corners = [
        [lo[0], lo[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
        [lo[0], hi[1]],
        [lo[0], lo[1]],
    ];
    let angle = |p: [f64; 2]| {
        let v = f(p);
        (v[1] - y[1]).atan2(v[0] - y[0])
    };
    let mut total = 0.0;
    let mut prev = angle(corners[0]);
    for side in corners.windows(2) {
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            let p = [
                side[0][0] + t * (side[1][0] - side[0][0]),
                side[0][1] + t * (side[1][1] - side[0][1]),
            ];
            let a = angle(p);
            let mut da = a - prev;
            while da > PI {
                da -= 2.0 * PI;
            }
            while da < -PI {
                da += 2.0 * PI;
            }
            total += da;
            prev = a;
        }
    }
    (total / (2.0 * PI)).round() as i64
}

/// Degree of `f: [a, b] -> R` over `y` from the endpoint signs.
pub fn interval_degree<F: Fn(f64) -> f64>(f: F, y: f64, a: f64, b: f64) -> i64 {
    let s = |v: f64| if v > y { 1 } else { -1 };
    (s(f(b)) - s(f(a))) / 2
}
