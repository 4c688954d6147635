//! Zigzag decomposition against the limit/colimit rank oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rigidity_core::barcode::{
    decompose, microsupport_profile, rank_invariants, Bar, Endpoint, ZigzagPresentation,
};
use rigidity_core::{FieldConfig, Matrix};
use rigidity_oracle::linalg::{Fp, Mat};
use rigidity_oracle::zigzag::Zigzag;

const LINE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, f: &FieldConfig) -> Matrix {
    let p = f.characteristic();
    let data = (0..rows * cols).map(|_| rng.random_range(0..p)).collect();
    Matrix::from_vec(rows, cols, data)
}

fn random_presentation(rng: &mut ChaCha8Rng, f: FieldConfig) -> ZigzagPresentation {
    let k = rng.random_range(0..=5);
    let pts: Vec<f64> = (0..k).map(|i| i as f64).collect();
    let dims: Vec<usize> = (0..2 * k + 1).map(|_| rng.random_range(0..=3)).collect();
    let mut lambda = Vec::new();
    let mut rho = Vec::new();
    for m in 0..k {
        lambda.push(random_matrix(rng, dims[2 * m], dims[2 * m + 1], &f));
        rho.push(random_matrix(rng, dims[2 * m + 2], dims[2 * m + 1], &f));
    }
    ZigzagPresentation::new(LINE, pts, dims, lambda, rho, f).unwrap()
}

fn to_oracle(pres: &ZigzagPresentation) -> Zigzag {
    let conv = |m: &Matrix| Mat {
        rows: m.rows(),
        cols: m.cols(),
        a: (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j) as u64).collect())
            .collect(),
    };
    let mut arrows = Vec::new();
    for m in 0..pres.critical_points().len() {
        arrows.push(conv(&pres.lambda()[m]));
        arrows.push(conv(&pres.rho()[m]));
    }
    Zigzag {
        dims: pres.stalk_dims().to_vec(),
        arrows,
    }
}

#[test]
fn ranks_match_oracle_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let f = if case % 2 == 0 {
            FieldConfig::GF2
        } else {
            FieldConfig::GF3
        };
        let pres = random_presentation(&mut rng, f);
        let ours = rank_invariants(&pres);
        let oracle = to_oracle(&pres).ranks(Fp(f.characteristic() as u64));
        assert_eq!(ours, oracle, "case {case}");

        let bc = decompose(&pres).unwrap();
        let again = ZigzagPresentation::from_bars(
            LINE,
            pres.critical_points().to_vec(),
            bc.bars(),
            f,
        )
        .unwrap();
        assert_eq!(rank_invariants(&again), ours, "round trip, case {case}");
    }
}

#[test]
fn profile_matches_bar_ends() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let f = if case % 2 == 0 {
            FieldConfig::GF2
        } else {
            FieldConfig::GF3
        };
        let pres = random_presentation(&mut rng, f);
        let bc = decompose(&pres).unwrap();
        let prof = microsupport_profile(&pres).unwrap();
        assert_eq!(prof, bc.profile(), "case {case}");

        let all_plus = bc.bars().iter().all(|b| b.is_plus());
        assert_eq!(all_plus, !prof.has_minus(), "case {case}");

        let mut ends = bc.endpoints();
        ends.dedup();
        assert_eq!(ends, prof.points(), "case {case}");
        for bar in bc.bars().iter().filter(|b| b.is_plus()) {
            for (x, _, _) in bar.endpoint_flags() {
                let e = prof.entries().iter().find(|e| e.point == x).unwrap();
                assert!(e.plus);
            }
        }
    }
}

/// `0 -> k_(a,s) -> k_(a,b) -> k_[s,b) -> 0` on the critical set `{s}`, with
/// the stalk maps written out: each node map commutes with the zigzag arrows
/// and each node sequence is exact.
#[test]
fn exchange_triangle_is_exact() {
    let f = FieldConfig::GF2;
    let amb = (-1.0, 1.0);
    let s = 0.0;
    let open = Bar::new(Endpoint::NegInfinity, Endpoint::open(s), 0).unwrap();
    let closed = Bar::new(Endpoint::closed(s), Endpoint::PosInfinity, 0).unwrap();
    let pa = ZigzagPresentation::from_bars(amb, vec![s], &[open], f).unwrap();
    let pi = ZigzagPresentation::from_bars(amb, vec![s], &[Bar::full(0)], f).unwrap();
    let pb = ZigzagPresentation::from_bars(amb, vec![s], &[closed], f).unwrap();
    for node in 0..3 {
        let (da, di, db) = (
            pa.stalk_dims()[node],
            pi.stalk_dims()[node],
            pb.stalk_dims()[node],
        );
        assert_eq!(da + db, di, "additivity at node {node}");
    }
    // identity where both stalks are nonzero
    let inc = |node: usize| Matrix::from_vec(1, pa.stalk_dims()[node], vec![1; pa.stalk_dims()[node]]);
    let proj = |node: usize| Matrix::from_vec(pb.stalk_dims()[node], 1, vec![1; pb.stalk_dims()[node]]);
    // lambda at s: P -> E_0, rho: P -> E_1
    let lam = |p: &ZigzagPresentation| p.lambda()[0].clone();
    let rh = |p: &ZigzagPresentation| p.rho()[0].clone();
    assert_eq!(lam(&pi).mul(&inc(1), &f), inc(0).mul(&lam(&pa), &f));
    assert_eq!(rh(&pi).mul(&inc(1), &f), inc(2).mul(&rh(&pa), &f));
    assert_eq!(lam(&pb).mul(&proj(1), &f), proj(0).mul(&lam(&pi), &f));
    assert_eq!(rh(&pb).mul(&proj(1), &f), proj(2).mul(&rh(&pi), &f));
    for node in 0..3 {
        let comp = proj(node).mul(&inc(node), &f);
        assert!((0..comp.rows()).all(|i| (0..comp.cols()).all(|j| comp.get(i, j) == 0)));
        let im = inc(node).rank(&f);
        let ker = pi.stalk_dims()[node] - proj(node).rank(&f);
        assert_eq!(im, ker, "exact at node {node}");
    }
}
