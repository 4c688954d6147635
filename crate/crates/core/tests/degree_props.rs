//! Degree properties, checked against a boundary winding-number oracle.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidity_core::degree::{
    degree, degree_stability, BoxWindow, DegreeConfig, DegreeError, DegreeQuery, MapWithJacobian,
    TargetBall,
};
use rigidity_oracle::winding::{box_winding, interval_degree};

/// A planar polynomial map as monomials `x^i y^j` with coefficients `(u, v)`.
#[derive(Debug, Clone)]
struct Poly {
    terms: Vec<(u32, u32, f64, f64)>,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Poly {
    /// `z^m` in real coordinates.
    fn power(m: u32) -> Poly {
        let terms = (0..=m)
            .map(|k| {
                // i^k cycles 1, i, -1, -i
                let c = binom(m, k);
                let (u, v) = match k % 4 {
                    0 => (c, 0.0),
                    1 => (0.0, c),
                    2 => (-c, 0.0),
                    _ => (0.0, -c),
                };
                (m - k, k, u, v)
            })
            .collect();
        Poly { terms }
    }

    fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for &(i, j, u, v) in &self.terms {
            let m = p[0].powi(i as i32) * p[1].powi(j as i32);
            out[0] += u * m;
            out[1] += v * m;
        }
        out
    }

    fn jacobian(&self, p: [f64; 2]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(2, 2);
        for &(i, k, u, v) in &self.terms {
            let dx = if i == 0 { 0.0 } else { i as f64 * p[0].powi(i as i32 - 1) * p[1].powi(k as i32) };
            let dy = if k == 0 { 0.0 } else { k as f64 * p[0].powi(i as i32) * p[1].powi(k as i32 - 1) };
            j[(0, 0)] += u * dx;
            j[(0, 1)] += u * dy;
            j[(1, 0)] += v * dx;
            j[(1, 1)] += v * dy;
        }
        j
    }

    fn map(&self) -> MapWithJacobian {
        let (a, b) = (self.clone(), self.clone());
        MapWithJacobian::new(
            2,
            move |p| a.eval([p[0], p[1]]).to_vec(),
            move |p| b.jacobian([p[0], p[1]]),
        )
    }
}

/// `z^m` plus lower-order real terms with coefficients in `[-0.3, 0.3]`.
fn poly_strategy() -> impl Strategy<Value = Poly> {
    (1u32..=3).prop_flat_map(|m| {
        let lower: Vec<(u32, u32)> =
            (0..m).flat_map(|deg| (0..=deg).map(move |j| (deg - j, j))).collect();
        let k = lower.len();
        prop::collection::vec((-0.3f64..0.3, -0.3f64..0.3), k).prop_map(move |cs| {
            let mut p = Poly::power(m);
            for (&(i, j), (u, v)) in lower.iter().zip(cs) {
                p.terms.push((i, j, u, v));
            }
            p
        })
    })
}

const H: f64 = 3.0;

fn window() -> BoxWindow {
    BoxWindow::cube(2, H)
}

fn oracle(p: &Poly, y: [f64; 2]) -> i64 {
    box_winding(|q| p.eval(q), y, [-H, -H], [H, H], 4000)
}

fn count(map: MapWithJacobian, center: [f64; 2], radius: f64, y: [f64; 2]) -> Result<i64, DegreeError> {
    let q = DegreeQuery::new(map, TargetBall::new(center.to_vec(), radius), y.to_vec(), window());
    degree(&q, &DegreeConfig::default())
}

#[test]
fn powers_have_degree_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 1..=4u32 {
        let p = Poly::power(k);
        for _ in 0..10 {
            let rho: f64 = rng.random_range(0.3..1.5);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let y = [rho * th.cos(), rho * th.sin()];
            let d = count(p.map(), y, 0.2, y).unwrap();
            assert_eq!(d, k as i64);
            assert_eq!(oracle(&p, y), k as i64);
        }
    }
}

#[test]
fn higher_dimensional_products() {
    // (z^2, t^3 + t) on R^3 and (z^2, w^3) on R^4
    let sq = Poly::power(2);
    let cu = Poly::power(3);
    let (s1, s2) = (sq.clone(), sq.clone());
    let f3 = MapWithJacobian::new(
        3,
        move |p| {
            let a = s1.eval([p[0], p[1]]);
            vec![a[0], a[1], p[2] * p[2] * p[2] + p[2]]
        },
        move |p| {
            let mut j = DMatrix::zeros(3, 3);
            j.view_mut((0, 0), (2, 2)).copy_from(&s2.jacobian([p[0], p[1]]));
            j[(2, 2)] = 3.0 * p[2] * p[2] + 1.0;
            j
        },
    );
    let y = vec![0.5, 0.2, 0.1];
    let q = DegreeQuery::new(f3, TargetBall::new(y.clone(), 0.3), y, BoxWindow::cube(3, 2.0));
    let cfg = DegreeConfig { seeds_per_axis: 14, ..DegreeConfig::default() };
    assert_eq!(degree(&q, &cfg).unwrap(), 2 * interval_degree(|t| t * t * t + t, 0.1, -2.0, 2.0));

    let (a1, a2, b1, b2) = (sq.clone(), sq, cu.clone(), cu);
    let f4 = MapWithJacobian::new(
        4,
        move |p| {
            let a = a1.eval([p[0], p[1]]);
            let b = b1.eval([p[2], p[3]]);
            vec![a[0], a[1], b[0], b[1]]
        },
        move |p| {
            let mut j = DMatrix::zeros(4, 4);
            j.view_mut((0, 0), (2, 2)).copy_from(&a2.jacobian([p[0], p[1]]));
            j.view_mut((2, 2), (2, 2)).copy_from(&b2.jacobian([p[2], p[3]]));
            j
        },
    );
    let y = vec![0.6, 0.3, -0.4, 0.5];
    let q = DegreeQuery::new(f4, TargetBall::new(y.clone(), 0.2), y, BoxWindow::cube(4, 1.6));
    let cfg = DegreeConfig { seeds_per_axis: 10, boundary_samples: 4000, ..DegreeConfig::default() };
    assert_eq!(degree(&q, &cfg).unwrap(), 6);
}

#[test]
fn interval_maps_match_endpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let c: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let f = move |x: f64| s * x * x * x + c[2] * x * x + c[1] * x + c[0];
        let df = move |x: f64| 3.0 * s * x * x + 2.0 * c[2] * x + c[1];
        let map = MapWithJacobian::new(1, move |p| vec![f(p[0])], move |p| DMatrix::from_element(1, 1, df(p[0])));
        let y: f64 = rng.random_range(-0.5..0.5);
        let q = DegreeQuery::new(map, TargetBall::new(vec![0.0], 1.0), vec![y], BoxWindow::cube(1, 4.0));
        match degree(&q, &DegreeConfig::default()) {
            Ok(d) => assert_eq!(d, interval_degree(f, y, -4.0, 4.0)),
            Err(DegreeError::NearCriticalValue { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

fn reflect(map: &MapWithJacobian) -> MapWithJacobian {
    map.compose(&MapWithJacobian::linear(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn degree_does_not_depend_on_the_regular_value(
        p in poly_strategy(),
        cx in -1.0f64..1.0, cy in -1.0f64..1.0,
        a in (-0.45f64..0.45, -0.45f64..0.45),
        b in (-0.45f64..0.45, -0.45f64..0.45),
    ) {
        let c = [cx, cy];
        let y1 = [cx + a.0 / 1.5, cy + a.1 / 1.5];
        let y2 = [cx + b.0 / 1.5, cy + b.1 / 1.5];
        let d1 = count(p.map(), c, 0.5, y1);
        let d2 = count(p.map(), c, 0.5, y2);
        prop_assume!(!matches!(d1, Err(DegreeError::NearCriticalValue { .. })));
        prop_assume!(!matches!(d2, Err(DegreeError::NearCriticalValue { .. })));
        let (d1, d2) = (d1.unwrap(), d2.unwrap());
        prop_assert_eq!(d1, d2);
        prop_assert_eq!(d1, oracle(&p, y1));
    }

    #[test]
    fn reflection_negates_degree(p in poly_strategy(), cx in -1.0f64..1.0, cy in -1.0f64..1.0) {
        let c = [cx, cy];
        let d = count(p.map(), c, 0.5, c);
        let e = count(reflect(&p.map()), c, 0.5, c);
        prop_assume!(d.is_ok() && e.is_ok());
        prop_assert_eq!(d.unwrap(), -e.unwrap());
    }

    #[test]
    fn nearby_maps_share_degree(
        p in poly_strategy(),
        cx in -0.5f64..0.5, cy in -0.5f64..0.5,
        delta in 0.0f64..0.2,
    ) {
        let f = p.map();
        let (pe, pj) = (p.clone(), p.clone());
        let g = MapWithJacobian::new(
            2,
            move |q| {
                let a = pe.eval([q[0], q[1]]);
                vec![a[0] + delta * (3.0 * q[0] + q[1]).sin(), a[1] + delta * (q[0] - 2.0 * q[1]).cos()]
            },
            move |q| {
                let mut j = pj.jacobian([q[0], q[1]]);
                let s = (3.0 * q[0] + q[1]).cos();
                let t = -(q[0] - 2.0 * q[1]).sin();
                j[(0, 0)] += 3.0 * delta * s;
                j[(0, 1)] += delta * s;
                j[(1, 0)] += delta * t;
                j[(1, 1)] -= 2.0 * delta * t;
                j
            },
        );
        let out = degree_stability(&f, &g, &[cx, cy], 1.0, 2.0, &window(), &DegreeConfig::default());
        prop_assume!(!matches!(out, Err(DegreeError::NearCriticalValue { .. })));
        let out = out.unwrap();
        prop_assert!(out.certified_equal);
        prop_assert_eq!(out.deg_f, out.deg_g);
        prop_assert_eq!(out.deg_f, oracle(&p, [cx, cy]));
    }
}
