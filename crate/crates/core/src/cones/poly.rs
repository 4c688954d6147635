//! Polyhedral cones with both descriptions kept in sync.
//!
//! `{x : a_i . x <= 0}` for the facet normals `a_i`, and `cone(g_j)` for the
//! generators. The conversion is brute-force facet enumeration over subsets of
//! generators, which is fine for the small dimensions used here.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::ConesError;
use crate::math;

/// Relative tolerance for rank and sign decisions.
pub const POLY_TOL: f64 = 1e-9;

/// A closed convex polyhedral cone in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    dim: usize,
    normals: Vec<Vec<f64>>,
    generators: Vec<Vec<f64>>,
}

impl PolyhedralCone {
    /// Conic hull of `generators`; zero vectors are dropped.
    pub fn from_generators(dim: usize, generators: &[Vec<f64>]) -> Result<Self, ConesError> {
        let gens = normalized(dim, generators)?;
        let normals = facets_of(dim, &gens);
        Ok(Self {
            dim,
            normals,
            generators: gens,
        })
    }

    /// Intersection of the half-spaces `a . x <= 0`.
    pub fn from_normals(dim: usize, normals: &[Vec<f64>]) -> Result<Self, ConesError> {
        let ns = normalized(dim, normals)?;
        let neg: Vec<Vec<f64>> = ns.iter().map(|a| negate(a)).collect();
        // facets {b . xi <= 0} of the polar cone(-a_i) give the cone as cone(-b_j)
        let generators: Vec<Vec<f64>> = facets_of(dim, &neg).iter().map(|b| negate(b)).collect();
        let normals = facets_of(dim, &generators);
        Ok(Self {
            dim,
            normals,
            generators,
        })
    }

    /// Both descriptions supplied; fails unless they describe the same cone.
    pub fn from_descriptions(
        dim: usize,
        normals: &[Vec<f64>],
        generators: &[Vec<f64>],
    ) -> Result<Self, ConesError> {
        let a = Self::from_normals(dim, normals)?;
        let b = Self::from_generators(dim, generators)?;
        if a.same_cone(&b) {
            Ok(b)
        } else {
            Err(ConesError::InconsistentDescriptions)
        }
    }

    /// The whole space.
    pub fn full(dim: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            gens.push(e.clone());
            e[i] = -1.0;
            gens.push(e);
        }
        Self {
            dim,
            normals: Vec::new(),
            generators: gens,
        }
    }

    /// The origin alone.
    pub fn origin(dim: usize) -> Self {
        let mut p = Self::full(dim);
        core::mem::swap(&mut p.normals, &mut p.generators);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit facet normals (outward, `a . x <= 0` on the cone).
    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    /// Unit generators.
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Polar cone `{xi : <v, xi> >= 0 for all v}`: the descriptions swap with a sign.
    pub fn polar(&self) -> Self {
        Self {
            dim: self.dim,
            normals: self.generators.iter().map(|g| negate(g)).collect(),
            generators: self.normals.iter().map(|a| negate(a)).collect(),
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            dim: self.dim,
            normals: self.normals.iter().map(|a| negate(a)).collect(),
            generators: self.generators.iter().map(|g| negate(g)).collect(),
        }
    }

    /// `gamma` meets `-gamma` only at the origin.
    pub fn is_proper(&self) -> bool {
        rank(self.dim, &self.normals) == self.dim
    }

    pub fn interior_nonempty(&self) -> bool {
        rank(self.dim, &self.generators) == self.dim
    }

    /// Membership with a relative slack.
    pub fn contains(&self, x: &[f64]) -> bool {
        let scale = math::norm(x).max(1.0);
        self.normals
            .iter()
            .all(|a| math::dot(a, x) <= POLY_TOL * scale)
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, x: &[f64]) -> bool {
        if !self.interior_nonempty() {
            return false;
        }
        let scale = math::norm(x);
        scale > 0.0
            && self
                .normals
                .iter()
                .all(|a| math::dot(a, x) < -POLY_TOL * scale)
    }

    /// Euclidean distance from `x` to the cone.
    pub fn distance(&self, x: &[f64]) -> f64 {
        distance_to_hull(self.dim, &self.generators, x)
    }

    /// Same point set, compared through both descriptions.
    pub fn same_cone(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
    }
}

fn negate(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn normalized(dim: usize, vs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, ConesError> {
    let mut out = Vec::with_capacity(vs.len());
    for v in vs {
        if v.len() != dim {
            return Err(ConesError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let n = math::norm(v);
        if n > 0.0 {
            out.push(v.iter().map(|x| x / n).collect());
        }
    }
    Ok(dedup(out))
}

fn dedup(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let dup = out.iter().any(|w| {
            w.iter()
                .zip(&v)
                .all(|(a, b)| math::abs(a - b) <= 1e-9)
        });
        if !dup {
            out.push(v);
        }
    }
    out
}

fn gram(dim: usize, vs: &[Vec<f64>]) -> DMatrix<f64> {
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for v in vs {
        let col = DVector::from_column_slice(v);
        g += &col * col.transpose();
    }
    g
}

/// Orthonormal bases of the span of `vs` and of its orthogonal complement.
fn span_split(dim: usize, vs: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    if dim == 0 {
        return (Vec::new(), Vec::new());
    }
    let g = gram(dim, vs);
    let eig = g.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let thresh = POLY_TOL * top.max(1.0);
    let mut span = Vec::new();
    let mut comp = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().cloned().collect();
        if l > thresh {
            span.push(v);
        } else {
            comp.push(v);
        }
    }
    (span, comp)
}

pub(crate) fn rank(dim: usize, vs: &[Vec<f64>]) -> usize {
    span_split(dim, vs).0.len()
}

fn project(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    basis.iter().map(|b| math::dot(b, v)).collect()
}

fn lift(basis: &[Vec<f64>], y: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (b, &c) in basis.iter().zip(y) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Calls `f` on every `k`-subset of `0..m`, in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + m - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Outward facet normals of `cone(gens)`, including `+-` pairs for the
/// directions orthogonal to the span.
fn facets_of(dim: usize, gens: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (span, comp) = span_split(dim, gens);
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in &comp {
        out.push(p.clone());
        out.push(negate(p));
    }
    let d = span.len();
    if d == 0 {
        return out;
    }
    let ys: Vec<Vec<f64>> = gens.iter().map(|g| project(&span, g)).collect();
    let mut local: Vec<Vec<f64>> = Vec::new();
    if d == 1 {
        let pos = ys.iter().any(|y| y[0] > POLY_TOL);
        let neg = ys.iter().any(|y| y[0] < -POLY_TOL);
        match (pos, neg) {
            (true, false) => local.push(vec![-1.0]),
            (false, true) => local.push(vec![1.0]),
            _ => {}
        }
    } else {
        for_each_subset(ys.len(), d - 1, |sub| {
            let rows: Vec<Vec<f64>> = sub.iter().map(|&i| ys[i].clone()).collect();
            let (s, c) = span_split(d, &rows);
            if s.len() != d - 1 || c.len() != 1 {
                return;
            }
            let a = &c[0];
            let vals: Vec<f64> = ys.iter().map(|y| math::dot(a, y)).collect();
            if vals.iter().all(|&v| v <= POLY_TOL) {
                local.push(a.clone());
            } else if vals.iter().all(|&v| v >= -POLY_TOL) {
                local.push(negate(a));
            }
        });
    }
    for a in dedup(local.into_iter().map(|a| canon(&a)).collect()) {
        let lifted = lift(&span, &a, dim);
        out.push(canon(&lifted));
    }
    dedup(out)
}

/// Unit length with tiny entries flushed, for stable deduplication.
fn canon(v: &[f64]) -> Vec<f64> {
    let n = math::norm(v);
    v.iter()
        .map(|x| {
            let y = x / n;
            if math::abs(y) < 1e-13 {
                0.0
            } else {
                y
            }
        })
        .collect()
}

/// Distance from `x` to `cone(gens)` by least squares over generator subsets.
pub(crate) fn distance_to_hull(dim: usize, gens: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut best = math::norm(x);
    let kmax = dim.min(gens.len());
    for k in 1..=kmax {
        for_each_subset(gens.len(), k, |sub| {
            let m = DMatrix::from_fn(dim, k, |r, c| gens[sub[c]][r]);
            let mtm = m.transpose() * &m;
            let Some(inv) = mtm.try_inverse() else {
                return;
            };
            if inv.iter().any(|v| !v.is_finite()) {
                return;
            }
            let rhs = m.transpose() * DVector::from_column_slice(x);
            let coef = inv * rhs;
            if coef.iter().any(|&c| c < -POLY_TOL) {
                return;
            }
            let p = &m * coef;
            let r = DVector::from_column_slice(x) - p;
            let d = r.norm();
            if d < best {
                best = d;
            }
        });
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = s;
        v
    }

    #[test]
    fn subsets_enumerated() {
        let mut n = 0;
        for_each_subset(5, 2, |_| n += 1);
        assert_eq!(n, 10);
        let mut n = 0;
        for_each_subset(3, 3, |_| n += 1);
        assert_eq!(n, 1);
        let mut n = 0;
        for_each_subset(3, 0, |_| n += 1);
        assert_eq!(n, 1);
    }

    #[test]
    fn orthant_facets() {
        let c = PolyhedralCone::from_generators(3, &[e(3, 0, 1.), e(3, 1, 1.), e(3, 2, 1.)])
            .unwrap();
        assert_eq!(c.normals().len(), 3);
        assert!(c.is_proper());
        assert!(c.interior_nonempty());
        assert!(c.contains(&[1.0, 2.0, 3.0]));
        assert!(!c.contains(&[1.0, -2.0, 3.0]));
    }

    #[test]
    fn line_and_half_plane() {
        let line = PolyhedralCone::from_generators(2, &[e(2, 0, 1.), e(2, 0, -1.)]).unwrap();
        assert!(!line.is_proper());
        assert!(!line.interior_nonempty());
        assert_eq!(line.normals().len(), 2);

        let half =
            PolyhedralCone::from_generators(2, &[e(2, 0, 1.), e(2, 0, -1.), e(2, 1, 1.)]).unwrap();
        assert_eq!(half.normals().len(), 1);
        assert!(!half.is_proper());
        assert!(half.interior_nonempty());
    }

    #[test]
    fn normals_to_generators() {
        let q = PolyhedralCone::from_normals(2, &[e(2, 0, -1.), e(2, 1, -1.)]).unwrap();
        assert_eq!(q.generators().len(), 2);
        assert!(q.contains(&[0.3, 0.7]));
        let full = PolyhedralCone::from_normals(3, &[]).unwrap();
        assert_eq!(full.generators().len(), 6);
        assert!(!full.is_proper());
    }

    #[test]
    fn polar_round_trip() {
        let c = PolyhedralCone::from_generators(2, &[vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap();
        let pp = c.polar().polar();
        assert!(pp.same_cone(&c));
        assert!(PolyhedralCone::full(3).polar().same_cone(&PolyhedralCone::origin(3)));
    }

    #[test]
    fn distances() {
        let ray = PolyhedralCone::from_generators(2, &[e(2, 0, 1.)]).unwrap();
        assert!((ray.distance(&[1.0, 1.0]) - 1.0).abs() < 1e-12);
        assert!((ray.distance(&[-1.0, 1.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_descriptions_rejected() {
        let r = PolyhedralCone::from_descriptions(2, &[e(2, 1, -1.)], &[e(2, 0, 1.)]);
        assert_eq!(r, Err(ConesError::InconsistentDescriptions));
    }
}
