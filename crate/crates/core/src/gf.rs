//! Exact dense linear algebra over a prime field GF(p).
//!
//! Matrices are small (zigzag stalks of dimension a handful), so everything is
//! row-major `Vec<u32>` with Gaussian elimination.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Errors raised when building a field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
}

/// Coefficient field GF(p). Defaults to GF(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldConfig {
    p: u32,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { p: 2 }
    }
}

impl FieldConfig {
    pub const GF2: FieldConfig = FieldConfig { p: 2 };
    pub const GF3: FieldConfig = FieldConfig { p: 3 };

    pub fn new(p: u32) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Maps an integer into the field.
    pub fn elem(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse via Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        let mut base = a as u64 % self.p as u64;
        let mut e = self.p as u64 - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            e >>= 1;
        }
        acc as u32
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Row-major matrix with entries in GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing entries mod p.
    ///
    /// An empty `rows` slice gives a `0 x cols` matrix.
    pub fn from_rows(field: &FieldConfig, rows: &[&[i64]], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row");
            for (j, &v) in r.iter().enumerate() {
                m.data[i * cols + j] = field.elem(v);
            }
        }
        m
    }

    /// Builds a matrix from already-reduced entries in row-major order.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, f: &FieldConfig) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    /// Sub-block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut out = Matrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j));
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: &FieldConfig) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col));
            for j in 0..m.cols {
                let v = f.mul(m.get(row, j), inv);
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(row, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &FieldConfig) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of the null space, as the columns of a `cols x k` matrix.
    pub fn kernel(&self, f: &FieldConfig) -> Matrix {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.cols, free.len());
        for (idx, &fc) in free.iter().enumerate() {
            k.set(fc, idx, 1);
            for (prow, &pc) in pivots.iter().enumerate() {
                k.set(pc, idx, f.neg(r.get(prow, fc)));
            }
        }
        k
    }

    /// Whether the matrix is square and invertible.
    pub fn is_bijective(&self, f: &FieldConfig) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }
}

/// A subspace of `F^n`, stored as independent basis columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self {
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: Matrix::identity(n),
        }
    }

    /// Column span of `m`, reduced to an independent basis.
    pub fn span(m: &Matrix, f: &FieldConfig) -> Self {
        let (r, pivots) = m.transpose().rref(f);
        let mut basis = Matrix::zeros(m.rows(), pivots.len());
        for i in 0..pivots.len() {
            for j in 0..m.rows() {
                basis.set(j, i, r.get(i, j));
            }
        }
        Self { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Image under `m`.
    pub fn image(&self, m: &Matrix, f: &FieldConfig) -> Subspace {
        Subspace::span(&m.mul(&self.basis, f), f)
    }

    /// Preimage `{x : m x in self}`.
    pub fn preimage(&self, m: &Matrix, f: &FieldConfig) -> Subspace {
        let n = m.cols();
        let mut neg = self.basis.clone();
        for v in neg.data.iter_mut() {
            *v = f.neg(*v);
        }
        let k = m.hcat(&neg).kernel(f);
        Subspace::span(&k.block(0, n, 0, k.cols()), f)
    }

    pub fn sum(&self, other: &Subspace, f: &FieldConfig) -> Subspace {
        Subspace::span(&self.basis.hcat(&other.basis), f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(FieldConfig::new(2).is_ok());
        assert!(FieldConfig::new(7).is_ok());
        assert_eq!(FieldConfig::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(FieldConfig::new(1), Err(FieldError::NotPrime(1)));
    }

    #[test]
    fn inverses() {
        let f = FieldConfig::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn rank_and_kernel() {
        let f = FieldConfig::GF3;
        let m = Matrix::from_rows(&f, &[&[1, 2, 0], &[2, 1, 0]], 3);
        // rows are proportional mod 3
        assert_eq!(m.rank(&f), 1);
        let k = m.kernel(&f);
        assert_eq!(k.cols(), 2);
        let z = m.mul(&k, &f);
        assert!(z.data.iter().all(|&v| v == 0));
    }

    #[test]
    fn preimage_of_zero_is_kernel() {
        let f = FieldConfig::GF2;
        let m = Matrix::from_rows(&f, &[&[1, 1]], 2);
        let pre = Subspace::zero(1).preimage(&m, &f);
        assert_eq!(pre.dim(), 1);
        let pre_full = Subspace::full(1).preimage(&m, &f);
        assert_eq!(pre_full.dim(), 2);
    }
}
