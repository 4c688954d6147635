//! Bounded cochain complexes over GF(p), chain maps, cones and cohomology.

use crate::linalg::{independent, Fp, Mat};

/// Lowest degree tracked.
pub const LO: i32 = -4;
/// Number of degrees tracked.
pub const LEN: usize = 12;

fn idx(n: i32) -> Option<usize> {
    let k = n - LO;
    (0..LEN as i32).contains(&k).then_some(k as usize)
}

/// `d[k]` goes from degree `LO + k` to `LO + k + 1`.
#[derive(Debug, Clone)]
pub struct Complex {
    pub dims: Vec<usize>,
    pub d: Vec<Mat>,
}

impl Complex {
    pub fn zero() -> Complex {
        Complex {
            dims: vec![0; LEN],
            d: (0..LEN).map(|_| Mat::zero(0, 0)).collect(),
        }
    }

    /// Complex concentrated in degrees `0..dims.len()`.
    pub fn from_degree_zero(dims: &[usize], diffs: Vec<Mat>) -> Complex {
        let mut c = Complex::zero();
        let base = (-LO) as usize;
        for (k, &n) in dims.iter().enumerate() {
            c.dims[base + k] = n;
        }
        for k in 0..LEN {
            let next = if k + 1 < LEN { c.dims[k + 1] } else { 0 };
            c.d[k] = Mat::zero(next, c.dims[k]);
        }
        for (k, m) in diffs.into_iter().enumerate() {
            assert_eq!((m.rows, m.cols), (c.dims[base + k + 1], c.dims[base + k]));
            c.d[base + k] = m;
        }
        c
    }

    pub fn dim(&self, n: i32) -> usize {
        idx(n).map_or(0, |k| self.dims[k])
    }

    pub fn diff(&self, n: i32) -> Mat {
        match idx(n) {
            Some(k) => self.d[k].clone(),
            None => Mat::zero(self.dim(n + 1), self.dim(n)),
        }
    }

    pub fn check(&self, f: Fp) {
        for n in LO..LO + LEN as i32 - 1 {
            let dd = self.diff(n + 1).mul(&self.diff(n), f);
            assert!(dd.is_zero(), "d^2 != 0 at degree {}", n);
        }
    }

    fn assert_bounded(&self) {
        assert_eq!(self.dims[0], 0, "complex touches the lowest tracked degree");
        assert_eq!(self.dims[LEN - 1], 0, "complex touches the highest tracked degree");
    }

    /// Basis of `H^n` as representative cocycles, together with a basis of the
    /// coboundaries; coordinates are read off by solving against both.
    pub fn cohomology(&self, n: i32, f: Fp) -> Cohomology {
        let dim = self.dim(n);
        let z = self.diff(n).null_space(f);
        let prev = self.diff(n - 1);
        let b_cols: Vec<Vec<u64>> = (0..prev.cols).map(|j| prev.col(j)).collect();
        let b = independent(&b_cols, dim, f);
        let mut all = b.clone();
        let mut reps = Vec::new();
        for v in z {
            let mut trial = all.clone();
            trial.push(v.clone());
            if Mat::from_cols(dim, &trial).rank(f) == trial.len() {
                all = trial;
                reps.push(v);
            }
        }
        Cohomology {
            dim,
            boundaries: b,
            reps,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cohomology {
    dim: usize,
    boundaries: Vec<Vec<u64>>,
    pub reps: Vec<Vec<u64>>,
}

impl Cohomology {
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a cocycle.
    pub fn coords(&self, z: &[u64], f: Fp) -> Vec<u64> {
        let mut cols = self.boundaries.clone();
        cols.extend(self.reps.iter().cloned());
        let x = Mat::from_cols(self.dim, &cols)
            .solve(z, f)
            .expect("vector is not a cocycle");
        x[self.boundaries.len()..].to_vec()
    }
}

/// Degree-wise matrices `m[k]: A^{LO+k} -> B^{LO+k}`.
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub m: Vec<Mat>,
}

impl ChainMap {
    pub fn at(&self, n: i32) -> &Mat {
        &self.m[idx(n).expect("degree out of range")]
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap {
            m: c.dims.iter().map(|&n| Mat::eye(n)).collect(),
        }
    }

    pub fn check(&self, a: &Complex, b: &Complex, f: Fp) {
        for n in LO..LO + LEN as i32 - 1 {
            let lhs = b.diff(n).mul(self.at(n), f);
            let rhs = self.at(n + 1).mul(&a.diff(n), f);
            assert_eq!(lhs, rhs, "not a chain map at degree {}", n);
        }
    }

    pub fn compose(&self, first: &ChainMap, f: Fp) -> ChainMap {
        ChainMap {
            m: self.m.iter().zip(&first.m).map(|(a, b)| a.mul(b, f)).collect(),
        }
    }

    /// Induced map on `H^n`.
    pub fn on_cohomology(&self, n: i32, ha: &Cohomology, hb: &Cohomology, f: Fp) -> Mat {
        let cols: Vec<Vec<u64>> = ha
            .reps
            .iter()
            .map(|z| hb.coords(&self.at(n).apply(z, f), f))
            .collect();
        Mat::from_cols(hb.rank(), &cols)
    }
}

fn block2(top_left: &Mat, top_right: &Mat, bot_left: &Mat, bot_right: &Mat) -> Mat {
    let rows = top_left.rows + bot_left.rows;
    let cols = top_left.cols + top_right.cols;
    let mut m = Mat::zero(rows, cols);
    for i in 0..top_left.rows {
        for j in 0..top_left.cols {
            m.a[i][j] = top_left.a[i][j];
        }
        for j in 0..top_right.cols {
            m.a[i][top_left.cols + j] = top_right.a[i][j];
        }
    }
    for i in 0..bot_left.rows {
        for j in 0..bot_left.cols {
            m.a[top_left.rows + i][j] = bot_left.a[i][j];
        }
        for j in 0..bot_right.cols {
            m.a[top_left.rows + i][bot_left.cols + j] = bot_right.a[i][j];
        }
    }
    m
}

fn negate(m: &Mat, f: Fp) -> Mat {
    let mut out = m.clone();
    for r in out.a.iter_mut() {
        for x in r.iter_mut() {
            *x = f.neg(*x);
        }
    }
    out
}

/// Mapping cone: `C^n = A^{n+1} + B^n`, `d(a, b) = (-da, g a + db)`.
pub fn cone(a: &Complex, b: &Complex, g: &ChainMap, f: Fp) -> Complex {
    a.assert_bounded();
    b.assert_bounded();
    let mut c = Complex::zero();
    for k in 0..LEN {
        let n = LO + k as i32;
        c.dims[k] = a.dim(n + 1) + b.dim(n);
    }
    for k in 0..LEN {
        let n = LO + k as i32;
        let gm = if idx(n + 1).is_some() {
            g.at(n + 1).clone()
        } else {
            Mat::zero(b.dim(n + 1), a.dim(n + 1))
        };
        c.d[k] = block2(
            &negate(&a.diff(n + 1), f),
            &Mat::zero(a.dim(n + 2), b.dim(n)),
            &gm,
            &b.diff(n),
        );
    }
    c
}

/// Shift `C[s]^n = C^{n+s}` with differential multiplied by `(-1)^s`.
pub fn shift(c: &Complex, s: i32, f: Fp) -> Complex {
    let mut out = Complex::zero();
    for k in 0..LEN {
        let n = LO + k as i32;
        out.dims[k] = c.dim(n + s);
    }
    for k in 0..LEN {
        let n = LO + k as i32;
        let d = c.diff(n + s);
        out.d[k] = if s.rem_euclid(2) == 1 { negate(&d, f) } else { d };
    }
    out
}

pub fn shift_map(g: &ChainMap, a: &Complex, b: &Complex, s: i32) -> ChainMap {
    ChainMap {
        m: (0..LEN)
            .map(|k| {
                let n = LO + k as i32 + s;
                match idx(n) {
                    Some(j) => g.m[j].clone(),
                    None => Mat::zero(b.dim(n), a.dim(n)),
                }
            })
            .collect(),
    }
}

/// `fiber(g) = cone(g)[-1]`.
pub fn fiber(a: &Complex, b: &Complex, g: &ChainMap, f: Fp) -> Complex {
    shift(&cone(a, b, g, f), -1, f)
}

/// Map of cones induced by a commutative square `beta g = g2 alpha`.
pub fn cone_map(
    a: &Complex,
    b: &Complex,
    a2: &Complex,
    b2: &Complex,
    alpha: &ChainMap,
    beta: &ChainMap,
) -> ChainMap {
    ChainMap {
        m: (0..LEN)
            .map(|k| {
                let n = LO + k as i32;
                let al = if idx(n + 1).is_some() {
                    alpha.at(n + 1).clone()
                } else {
                    Mat::zero(a2.dim(n + 1), a.dim(n + 1))
                };
                block2(
                    &al,
                    &Mat::zero(a2.dim(n + 1), b.dim(n)),
                    &Mat::zero(b2.dim(n), a.dim(n + 1)),
                    beta.at(n),
                )
            })
            .collect(),
    }
}

pub fn fiber_map(
    a: &Complex,
    b: &Complex,
    a2: &Complex,
    b2: &Complex,
    alpha: &ChainMap,
    beta: &ChainMap,
) -> ChainMap {
    let cm = cone_map(a, b, a2, b2, alpha, beta);
    // cone(g)[-1]^n = cone(g)^{n-1}
    ChainMap {
        m: (0..LEN)
            .map(|k| {
                let n = LO + k as i32 - 1;
                match idx(n) {
                    Some(j) => cm.m[j].clone(),
                    None => Mat::zero(a2.dim(n + 1) + b2.dim(n), a.dim(n + 1) + b.dim(n)),
                }
            })
            .collect(),
    }
}

pub fn direct_sum(a: &Complex, b: &Complex) -> Complex {
    let mut c = Complex::zero();
    for k in 0..LEN {
        c.dims[k] = a.dims[k] + b.dims[k];
        let n = LO + k as i32;
        c.d[k] = block2(
            &a.diff(n),
            &Mat::zero(a.dim(n + 1), b.dim(n)),
            &Mat::zero(b.dim(n + 1), a.dim(n)),
            &b.diff(n),
        );
    }
    c
}

/// `(g, h): X -> A + B`.
pub fn pair_map(g: &ChainMap, h: &ChainMap) -> ChainMap {
    ChainMap {
        m: g
            .m
            .iter()
            .zip(&h.m)
            .map(|(x, y)| {
                let mut out = Mat::zero(x.rows + y.rows, x.cols);
                for i in 0..x.rows {
                    out.a[i].copy_from_slice(&x.a[i]);
                }
                for i in 0..y.rows {
                    out.a[x.rows + i].copy_from_slice(&y.a[i]);
                }
                out
            })
            .collect(),
    }
}

/// `g + h: A + B -> X + Y` block-diagonal.
pub fn diag_map(g: &ChainMap, h: &ChainMap) -> ChainMap {
    ChainMap {
        m: g
            .m
            .iter()
            .zip(&h.m)
            .map(|(x, y)| block2(x, &Mat::zero(x.rows, y.cols), &Mat::zero(y.rows, x.cols), y))
            .collect(),
    }
}
