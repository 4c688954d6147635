//! Bar tables of the cut-off functors against the cellular kernel oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidity_core::barcode::{Bar, BarShape, Barcode, Endpoint};
use rigidity_core::convolution::{
    cone_u_bar, cone_v_bar, p_cutoff_bar, q_cutoff_bar, HalfLineCone1D,
};
use rigidity_oracle::cutoff::{ranks_of_bars, CutoffOracle, Side};
use rigidity_oracle::line::{End, Interval};
use rigidity_oracle::linalg::Fp;

fn end(e: Endpoint) -> End {
    match e {
        Endpoint::Finite { value, closed } => End::At(value, closed),
        _ => End::Inf,
    }
}

fn interval(bar: &Bar) -> Interval {
    Interval::new(end(bar.left()), end(bar.right()))
}

fn bar_of_shape(shape: BarShape, a: f64, b: f64) -> Bar {
    use Endpoint::*;
    let (l, r) = match shape {
        BarShape::ClosedOpen => (Endpoint::closed(a), Endpoint::open(b)),
        BarShape::Closed => (Endpoint::closed(a), Endpoint::closed(b)),
        BarShape::Open => (Endpoint::open(a), Endpoint::open(b)),
        BarShape::OpenClosed => (Endpoint::open(a), Endpoint::closed(b)),
        BarShape::Point => (Endpoint::closed(a), Endpoint::closed(a)),
        BarShape::ClosedRay => (Endpoint::closed(a), PosInfinity),
        BarShape::OpenRay => (Endpoint::open(a), PosInfinity),
        BarShape::RayOpen => (NegInfinity, Endpoint::open(b)),
        BarShape::RayClosed => (NegInfinity, Endpoint::closed(b)),
        BarShape::Full => (NegInfinity, PosInfinity),
    };
    Bar::new(l, r, 0).unwrap()
}

#[test]
fn tables_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let f = Fp(2);
    for shape in BarShape::ALL {
        for _ in 0..50 {
            let a: f64 = rng.random_range(-10.0..10.0);
            let b = a + rng.random_range(0.01..10.0);
            let bar = bar_of_shape(shape, a, b);
            let bc = Barcode::on_line(vec![bar]).unwrap();
            for (side, gamma) in [
                (Side::Left, HalfLineCone1D::Left),
                (Side::Right, HalfLineCone1D::Right),
            ] {
                let o = CutoffOracle::new(interval(&bar), side, f);
                let ranks = |out: Barcode| {
                    let bars: Vec<(Interval, i32)> =
                        out.bars().iter().map(|b| (interval(b), b.degree())).collect();
                    ranks_of_bars(o.line(), &bars)
                };
                let what = format!("{} {:?}", bar.describe(), gamma);
                assert_eq!(ranks(p_cutoff_bar(&bc, gamma).unwrap()), o.p(), "P {what}");
                assert_eq!(ranks(q_cutoff_bar(&bc, gamma).unwrap()), o.q(), "Q {what}");
                assert_eq!(ranks(cone_u_bar(&bc, gamma).unwrap()), o.cone_u(), "cone(u) {what}");
                assert_eq!(ranks(cone_v_bar(&bc, gamma).unwrap()), o.cone_v(), "cone(v) {what}");
            }
        }
    }
}

fn random_barcode(rng: &mut ChaCha8Rng, plus_only: bool) -> Barcode {
    let n = rng.random_range(0..6);
    let mut bars = Vec::new();
    for _ in 0..n {
        let shape = BarShape::ALL[rng.random_range(0..10)];
        let a = rng.random_range(-5i32..5) as f64;
        let b = a + rng.random_range(1i32..4) as f64;
        let mut bar = bar_of_shape(shape, a, b).with_degree(rng.random_range(-2..3));
        if plus_only && !bar.is_plus() {
            bar = Bar::closed_open(a, b, bar.degree()).unwrap();
        }
        bars.push(bar);
    }
    Barcode::on_line(bars).unwrap()
}

#[test]
fn projector_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let bc = random_barcode(&mut rng, false);
        for g in [HalfLineCone1D::Left, HalfLineCone1D::Right] {
            let once = p_cutoff_bar(&bc, g).unwrap();
            assert_eq!(p_cutoff_bar(&once, g).unwrap(), once);
            let q = q_cutoff_bar(&bc, g).unwrap();
            assert_eq!(q_cutoff_bar(&q, g).unwrap(), q);
        }
    }
}

#[test]
fn plus_barcodes_are_fixed_by_left_cutoff() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let bc = random_barcode(&mut rng, true);
        assert_eq!(p_cutoff_bar(&bc, HalfLineCone1D::Left).unwrap(), bc);
        assert_eq!(q_cutoff_bar(&bc, HalfLineCone1D::Left).unwrap(), bc);
        assert!(cone_u_bar(&bc, HalfLineCone1D::Left).unwrap().is_empty());
    }
}
