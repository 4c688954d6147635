//! Coisotropy of integer subspaces by exact rank computations mod a prime.

use crate::linalg::{Fp, Mat};

/// Prime used for the exact rank tests.
pub const PRIME: Fp = Fp(10007);

/// Whether the span of the integer columns `w` of `Z^{2n}` contains its
/// symplectic orthogonal for `ω(u, v) = Σ u_ξ v_x − u_x v_ξ`.
pub fn coisotropic(w: &[Vec<i64>]) -> bool {
    let f = PRIME;
    let d = w[0].len();
    let n = d / 2;
    // row j of the constraint matrix is ω(w_j, ·)
    let mut c = Mat::zero(w.len(), d);
    for (j, col) in w.iter().enumerate() {
        for i in 0..n {
            c.a[j][i] = f.norm(col[n + i]);
            c.a[j][n + i] = f.norm(-col[i]);
        }
    }
    let orth = c.null_space(f);
    let cols: Vec<Vec<u64>> = w.iter().map(|v| v.iter().map(|x| f.norm(*x)).collect()).collect();
    let base = Mat::from_cols(d, &cols);
    let r = base.rank(f);
    if orth.is_empty() {
        return true;
    }
    base.hstack(&Mat::from_cols(d, &orth)).rank(f) == r
}
