//! Stratifications of the real line by finitely many points.

use std::collections::BTreeMap;

use crate::complex::LO;
use crate::linalg::Fp;
use crate::poset::Poset;

/// An end of an interval: infinite, or a finite value with a closedness flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum End {
    Inf,
    At(f64, bool),
}

/// Interval of the line; `lo = Inf` means unbounded below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: End,
    pub hi: End,
}

impl Interval {
    pub fn new(lo: End, hi: End) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        let l = match self.lo {
            End::Inf => true,
            End::At(v, c) => x > v || (c && x == v),
        };
        let r = match self.hi {
            End::Inf => true,
            End::At(v, c) => x < v || (c && x == v),
        };
        l && r
    }

    pub fn endpoints(&self) -> Vec<f64> {
        [self.lo, self.hi]
            .iter()
            .filter_map(|e| match e {
                End::At(v, _) => Some(*v),
                End::Inf => None,
            })
            .collect()
    }

    pub fn mirror(&self) -> Interval {
        let flip = |e: End| match e {
            End::Inf => End::Inf,
            End::At(v, c) => End::At(-v, c),
        };
        Interval {
            lo: flip(self.hi),
            hi: flip(self.lo),
        }
    }
}

/// Cells of the line cut at sorted points: cell `2i` is the open interval left
/// of `pts[i]` (or right of the last point), cell `2i + 1` is `pts[i]`.
#[derive(Debug, Clone)]
pub struct Line {
    pub pts: Vec<f64>,
}

impl Line {
    pub fn new(mut pts: Vec<f64>) -> Line {
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Line { pts }
    }

    pub fn cells(&self) -> usize {
        2 * self.pts.len() + 1
    }

    /// A point inside the cell.
    pub fn rep(&self, c: usize) -> f64 {
        let m = self.pts.len();
        if c % 2 == 1 {
            return self.pts[c / 2];
        }
        let i = c / 2;
        match (m, i) {
            (0, _) => 0.0,
            (_, 0) => self.pts[0] - 1.0,
            (_, i) if i == m => self.pts[m - 1] + 1.0,
            (_, i) => 0.5 * (self.pts[i - 1] + self.pts[i]),
        }
    }

    /// `a` lies in the closure of `b`.
    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || (a % 2 == 1 && (b + 1 == a || b == a + 1))
    }

    pub fn poset(&self) -> Poset {
        let n = self.cells();
        Poset::new((0..n).map(|a| (0..n).map(|b| self.le(a, b)).collect()).collect())
    }

    /// Range of cells covered by the interval, if nonempty.
    pub fn span(&self, iv: &Interval) -> Option<(usize, usize)> {
        let inside: Vec<usize> = (0..self.cells()).filter(|&c| iv.contains(self.rep(c))).collect();
        Some((*inside.first()?, *inside.last()?))
    }
}

/// `H^q((u0, u1); k_I[d])` by cellular cohomology.
pub fn sections(iv: &Interval, d: i32, u0: f64, u1: f64, f: Fp) -> BTreeMap<i32, usize> {
    let mut pts = iv.endpoints();
    pts.push(u0);
    pts.push(u1);
    let line = Line::new(pts);
    let poset = line.poset();
    let inside = |c: usize| {
        let x = line.rep(c);
        x > u0 && x < u1
    };
    let supp = |c: usize| iv.contains(line.rep(c));
    let cx = poset.cochains(&inside, &supp, f).complex;
    let mut out = BTreeMap::new();
    for n in LO..LO + crate::complex::LEN as i32 {
        let h = cx.cohomology(n, f).rank();
        if h > 0 {
            out.insert(n - d, h);
        }
    }
    out
}
