//! Dense matrices over GF(p) as `Vec<Vec<u64>>`, column-oriented helpers.

/// Prime field arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp(pub u64);

impl Fp {
    pub fn norm(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b % self.0) % self.0
    }
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }
    pub fn neg(self, a: u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }
    /// Inverse by brute-force search; `p` is small.
    pub fn inv(self, a: u64) -> u64 {
        (1..self.0).find(|&b| a * b % self.0 == 1).expect("zero has no inverse")
    }
}

/// `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Vec<u64>>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![vec![0; cols]; rows],
        }
    }

    pub fn eye(n: usize) -> Mat {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.a[i][i] = 1;
        }
        m
    }

    pub fn from_cols(rows: usize, cols: &[Vec<u64>]) -> Mat {
        let mut m = Mat::zero(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.a[i][j] = c[i];
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.a[i][j]).collect()
    }

    pub fn mul(&self, o: &Mat, f: Fp) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut out = Mat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.a[i][k];
                if x == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    out.a[i][j] = f.add(out.a[i][j], f.mul(x, o.a[k][j]));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64], f: Fp) -> Vec<u64> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, k| f.add(acc, f.mul(self.a[i][k], v[k]))))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Gaussian elimination in place on a copy; returns (echelon, pivot columns).
    fn echelon(&self, f: Fp) -> (Vec<Vec<u64>>, Vec<usize>) {
        let mut a = self.a.clone();
        let mut piv = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(r, p);
            let inv = f.inv(a[r][c]);
            for x in a[r].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for i in 0..self.rows {
                if i != r && a[i][c] != 0 {
                    let t = a[i][c];
                    for k in 0..self.cols {
                        a[i][k] = f.sub(a[i][k], f.mul(t, a[r][k]));
                    }
                }
            }
            piv.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        (a, piv)
    }

    pub fn rank(&self, f: Fp) -> usize {
        self.echelon(f).1.len()
    }

    /// Null space basis vectors.
    pub fn null_space(&self, f: Fp) -> Vec<Vec<u64>> {
        let (a, piv) = self.echelon(f);
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !piv.contains(c)) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = f.neg(a[r][free]);
            }
            out.push(v);
        }
        out
    }

    /// Some `x` with `self x = b`, if one exists.
    pub fn solve(&self, b: &[u64], f: Fp) -> Option<Vec<u64>> {
        let mut aug = Mat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.a[i][..self.cols].copy_from_slice(&self.a[i]);
            aug.a[i][self.cols] = b[i];
        }
        let (e, piv) = aug.echelon(f);
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &pc) in piv.iter().enumerate() {
            x[pc] = e[r][self.cols];
        }
        Some(x)
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut m = Mat::zero(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            m.a[i][..self.cols].copy_from_slice(&self.a[i]);
            m.a[i][self.cols..].copy_from_slice(&o.a[i]);
        }
        m
    }
}

/// Greedy subset of `vecs` forming a basis of their span.
pub fn independent(vecs: &[Vec<u64>], dim: usize, f: Fp) -> Vec<Vec<u64>> {
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    for v in vecs {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if Mat::from_cols(dim, &trial).rank(f) == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_null() {
        let f = Fp(3);
        let m = Mat {
            rows: 2,
            cols: 3,
            a: vec![vec![1, 1, 0], vec![0, 1, 1]],
        };
        assert_eq!(m.rank(f), 2);
        let n = m.null_space(f);
        assert_eq!(n.len(), 1);
        assert!(m.apply(&n[0], f).iter().all(|&x| x == 0));
        let x = m.solve(&[1, 2], f).unwrap();
        assert_eq!(m.apply(&x, f), vec![1, 2]);
    }
}
