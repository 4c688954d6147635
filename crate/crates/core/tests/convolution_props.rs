//! Convex cut-off against a planar reference, and direction splitting.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidity_core::barcode::{Bar, Barcode, Endpoint};
use rigidity_core::cones::PolyhedralCone;
use rigidity_core::convolution::{
    cutoff_cone_check, cutoff_convex, min_mixed_bar_length, p_cutoff_bar, split_by_direction,
    ConvexIndicator, CutoffTarget, HalfLineCone1D,
};
use rigidity_oracle::geometry::polygon_meets_cone;

fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    // convex polygon as points on a circle, counterclockwise
    let k = rng.random_range(3..7);
    let cx = rng.random_range(-1.0..1.0);
    let cy = rng.random_range(-1.0..1.0);
    let rad = rng.random_range(0.2..1.5);
    let mut angles: Vec<f64> = (0..k)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    angles
        .iter()
        .map(|t| [cx + rad * t.cos(), cy + rad * t.sin()])
        .collect()
}

fn indicator(poly: &[[f64; 2]]) -> ConvexIndicator {
    let n = poly.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        // outward normal of a counterclockwise edge
        let nrm = [q[1] - p[1], p[0] - q[0]];
        a.push(nrm.to_vec());
        b.push(nrm[0] * p[0] + nrm[1] * p[1]);
    }
    ConvexIndicator::new(a, b, 0).unwrap()
}

#[test]
fn minkowski_matches_planar_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut cases = 0;
    while cases < 30 {
        let poly = random_polygon(&mut rng);
        if poly.len() < 3 {
            continue;
        }
        cases += 1;
        let t0: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let t1 = t0 + rng.random_range(0.3..2.8);
        let g0 = [t0.cos(), t0.sin()];
        let g1 = [t1.cos(), t1.sin()];
        let gamma = PolyhedralCone::from_generators(2, &[g0.to_vec(), g1.to_vec()]).unwrap();
        let b = indicator(&poly);
        let out = cutoff_convex(&b, &gamma).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let y = [-4.0 + 8.0 * i as f64 / 19.0, -4.0 + 8.0 * j as f64 / 19.0];
                let expect = polygon_meets_cone(&poly, g0, g1, y);
                // skip sample points within rounding of the boundary
                let near = out
                    .rows()
                    .iter()
                    .zip(out.offsets())
                    .any(|(r, o)| (r[0] * y[0] + r[1] * y[1] - o).abs() < 1e-6);
                if !near {
                    assert_eq!(out.contains(&y), expect, "{poly:?} {g0:?} {g1:?} {y:?}");
                }
            }
        }
        // every inward normal of the output lies in the antipodal polar
        for (a, _) in out.facets().unwrap() {
            for g in gamma.generators() {
                assert!(a[0] * g[0] + a[1] * g[1] >= -1e-9);
            }
        }
        let report = cutoff_cone_check(&CutoffTarget::Convex(b, gamma)).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
    }
}

#[test]
fn point_gives_antipodal_cone() {
    let pt = ConvexIndicator::from_box(&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], 0).unwrap();
    let g = PolyhedralCone::from_generators(
        3,
        &[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0], vec![-1.0, -1.0, -1.0]],
    )
    .unwrap();
    let out = cutoff_convex(&pt, &g).unwrap();
    let anti = g.antipode();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let margin = anti.normals().iter().map(|a| {
            (a[0] * x[0] + a[1] * x[1] + a[2] * x[2]).abs()
        }).fold(f64::INFINITY, f64::min);
        if margin > 1e-6 {
            assert_eq!(out.contains(&x), anti.contains(&x));
        }
    }
}

#[test]
fn segment_matches_bar_table() {
    let seg = ConvexIndicator::from_box(&[0.0], &[1.0], 0).unwrap();
    let left = PolyhedralCone::from_generators(1, &[vec![-1.0]]).unwrap();
    let out = cutoff_convex(&seg, &left).unwrap();
    let bar = Bar::new(Endpoint::closed(0.0), Endpoint::closed(1.0), 0).unwrap();
    let p = p_cutoff_bar(&Barcode::on_line(vec![bar]).unwrap(), HalfLineCone1D::Left).unwrap();
    let image = p.bars()[0];
    for k in -20..200 {
        let x = k as f64 * 0.05;
        assert_eq!(out.contains(&[x]), image.contains(x), "{x}");
    }
}

fn random_barcode(rng: &mut ChaCha8Rng) -> Barcode {
    let n = rng.random_range(1..6);
    let mut bars = Vec::new();
    for _ in 0..n {
        let a = rng.random_range(-10.0..10.0);
        let b = a + rng.random_range(0.05..5.0);
        let (l, r) = match rng.random_range(0..6) {
            0 => (Endpoint::closed(a), Endpoint::open(b)),
            1 => (Endpoint::closed(a), Endpoint::closed(b)),
            2 => (Endpoint::open(a), Endpoint::open(b)),
            3 => (Endpoint::open(a), Endpoint::closed(b)),
            4 => (Endpoint::closed(a), Endpoint::PosInfinity),
            _ => (Endpoint::NegInfinity, Endpoint::closed(b)),
        };
        bars.push(Bar::new(l, r, rng.random_range(-1..2)).unwrap());
    }
    Barcode::on_line(bars).unwrap()
}

#[test]
fn short_windows_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let bc = random_barcode(&mut rng);
        let m = min_mixed_bar_length(&bc);
        let len = if m.is_finite() { 0.999 * m } else { 3.0 };
        for k in 0..200 {
            let lo = -12.0 + 0.12 * k as f64;
            let Ok(sub) = bc.restrict(lo, lo + len) else {
                continue;
            };
            assert!(split_by_direction(&sub).is_ok(), "{:?} on ({lo}, {})", bc, lo + len);
        }
    }
}

proptest! {
    #[test]
    fn bars_pass_cone_check(a in -5.0f64..5.0, w in 0.01f64..5.0, kind in 0usize..6, d in -2i32..3) {
        let b = a + w;
        let (l, r) = match kind {
            0 => (Endpoint::closed(a), Endpoint::open(b)),
            1 => (Endpoint::closed(a), Endpoint::closed(b)),
            2 => (Endpoint::open(a), Endpoint::open(b)),
            3 => (Endpoint::open(a), Endpoint::closed(b)),
            4 => (Endpoint::closed(a), Endpoint::closed(a)),
            _ => (Endpoint::open(a), Endpoint::PosInfinity),
        };
        let bc = Barcode::on_line(vec![Bar::new(l, r, d).unwrap()]).unwrap();
        for g in [HalfLineCone1D::Left, HalfLineCone1D::Right] {
            let rep = cutoff_cone_check(&CutoffTarget::Bars(bc.clone(), g)).unwrap();
            prop_assert!(rep.passed());
        }
    }
}
