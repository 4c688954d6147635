//! Cut-off functors on the line, computed from their kernels.
//!
//! The plane `R_x x R_y` is cut by the grid `E x E` (`E` the bar endpoints)
//! and by the diagonal. Cells are `(X, Y, rel)` with `X`, `Y` line cells and
//! `rel` the position of `x` relative to `y`. For a bar `I` and the cone `g`
//! (left: `(-inf, 0]`, right: `[0, inf)`):
//!
//! * `P(k_I)` is `Rq2_*` of `k_S`, `S = {x in I, x - y in g}`; sections over
//!   `R x st(tau)` give the value at the line cell `tau`;
//! * `Q(k_I)` is `Rq2_!` of `RGamma_A(k_{I x R})[1]` with `A = {y - x in g}`;
//!   the `!` is realized as the fiber of restriction to neighbourhoods of
//!   `x = +inf` and `x = -inf`;
//! * `u: P -> id` comes from `k_S -> k_{S cap diagonal}` and `v: id -> Q` from
//!   `RGamma_diagonal -> RGamma_A`.

use std::collections::BTreeMap;

use crate::complex::{
    cone, cone_map, diag_map, direct_sum, fiber, fiber_map, pair_map, ChainMap, Complex, LEN, LO,
};
use crate::line::{Interval, Line};
use crate::linalg::Fp;
use crate::poset::{Cochains, Poset};
use crate::zigzag::Zigzag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Lt,
    Eq,
    Gt,
}

/// Result of a functor: rank invariants per cohomological degree, on the
/// line cut at the bar endpoints.
pub type Ranks = BTreeMap<i32, BTreeMap<(usize, usize), usize>>;

struct Grid {
    line: Line,
    cells: Vec<(usize, usize, Rel)>,
    poset: Poset,
}

impl Grid {
    fn new(line: Line) -> Grid {
        let n = line.cells();
        let mut cells = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x == y && x % 2 == 0 {
                    for r in [Rel::Lt, Rel::Eq, Rel::Gt] {
                        cells.push((x, y, r));
                    }
                } else {
                    let r = match x.cmp(&y) {
                        std::cmp::Ordering::Less => Rel::Lt,
                        std::cmp::Ordering::Equal => Rel::Eq,
                        std::cmp::Ordering::Greater => Rel::Gt,
                    };
                    cells.push((x, y, r));
                }
            }
        }
        let compat = |r: Rel, r2: Rel| match r2 {
            Rel::Lt => r != Rel::Gt,
            Rel::Gt => r != Rel::Lt,
            Rel::Eq => r == Rel::Eq,
        };
        let le = cells
            .iter()
            .map(|&(x, y, r)| {
                cells
                    .iter()
                    .map(|&(x2, y2, r2)| line.le(x, x2) && line.le(y, y2) && compat(r, r2))
                    .collect()
            })
            .collect();
        Grid {
            poset: Poset::new(le),
            line,
            cells,
        }
    }
}

/// Values on each line cell and restriction maps from each point cell to its
/// left and right neighbours.
struct LineObject {
    v: Vec<Complex>,
    left: Vec<ChainMap>,
    right: Vec<ChainMap>,
}

impl LineObject {
    fn zigzag(&self, q: i32, f: Fp) -> Zigzag {
        let h: Vec<_> = self.v.iter().map(|c| c.cohomology(q, f)).collect();
        let mut arrows = Vec::new();
        for t in 0..self.v.len() - 1 {
            let p = if t % 2 == 0 { t + 1 } else { t };
            let m = if t % 2 == 0 {
                self.left[p / 2].on_cohomology(q, &h[p], &h[t], f)
            } else {
                self.right[p / 2].on_cohomology(q, &h[p], &h[t + 1], f)
            };
            arrows.push(m);
        }
        Zigzag {
            dims: h.iter().map(|x| x.rank()).collect(),
            arrows,
        }
    }

    fn ranks(&self, f: Fp) -> Ranks {
        let mut out = Ranks::new();
        for q in LO..LO + LEN as i32 {
            let z = self.zigzag(q, f);
            if z.dims.iter().any(|&d| d > 0) {
                out.insert(q, z.ranks(f));
            }
        }
        out
    }
}

/// `cone(C(W; H) -> C(W \ R; H))`, i.e. `RGamma_R(W; H)[1]`.
struct Dc {
    w: Cochains,
    wr: Cochains,
    d: Complex,
}

/// The oracle for one bar.
pub struct CutoffOracle {
    grid: Grid,
    bar: Interval,
    side: Side,
    f: Fp,
}

impl CutoffOracle {
    pub fn new(bar: Interval, side: Side, f: Fp) -> CutoffOracle {
        CutoffOracle::with_points(bar, bar.endpoints(), side, f)
    }

    /// Uses a stratification by `pts` (which must contain the bar endpoints).
    pub fn with_points(bar: Interval, pts: Vec<f64>, side: Side, f: Fp) -> CutoffOracle {
        CutoffOracle {
            grid: Grid::new(Line::new(pts)),
            bar,
            side,
            f,
        }
    }

    pub fn line(&self) -> &Line {
        &self.grid.line
    }

    fn in_bar(&self, c: usize) -> bool {
        let (x, _, _) = self.grid.cells[c];
        self.bar.contains(self.grid.line.rep(x))
    }

    fn rel(&self, c: usize) -> Rel {
        self.grid.cells[c].2
    }

    /// `x - y` in the cone.
    fn in_kernel(&self, c: usize) -> bool {
        match self.side {
            Side::Left => self.rel(c) != Rel::Gt,
            Side::Right => self.rel(c) != Rel::Lt,
        }
    }

    /// `y - x` in the cone.
    fn in_a(&self, c: usize) -> bool {
        match self.side {
            Side::Left => self.rel(c) != Rel::Lt,
            Side::Right => self.rel(c) != Rel::Gt,
        }
    }

    fn over(&self, tau: usize, c: usize) -> bool {
        self.grid.line.le(tau, self.grid.cells[c].1)
    }

    fn object(
        &self,
        build: &dyn Fn(usize) -> Complex,
        restrict: &dyn Fn(usize, usize) -> ChainMap,
    ) -> LineObject {
        let n = self.grid.line.cells();
        let v = (0..n).map(build).collect();
        let k = self.grid.line.pts.len();
        LineObject {
            v,
            left: (0..k).map(|m| restrict(2 * m + 1, 2 * m)).collect(),
            right: (0..k).map(|m| restrict(2 * m + 1, 2 * m + 2)).collect(),
        }
    }

    fn p_cochains(&self, tau: usize, diag_only: bool) -> Cochains {
        let w = |c: usize| self.over(tau, c);
        let s = |c: usize| {
            self.in_bar(c) && if diag_only { self.rel(c) == Rel::Eq } else { self.in_kernel(c) }
        };
        self.grid.poset.cochains(&w, &s, self.f)
    }

    fn p_map(&self, from: &Cochains, to: &Cochains, diag_only: bool) -> ChainMap {
        let t = |c: usize| {
            self.in_bar(c) && if diag_only { self.rel(c) == Rel::Eq } else { self.in_kernel(c) }
        };
        self.grid.poset.map(from, to, &t)
    }

    /// `P(k_I)`.
    pub fn p(&self) -> Ranks {
        self.p_object(false).ranks(self.f)
    }

    /// `k_I` itself, through the diagonal part of the kernel.
    pub fn identity_via_p(&self) -> Ranks {
        self.p_object(true).ranks(self.f)
    }

    fn p_object(&self, diag_only: bool) -> LineObject {
        self.object(
            &|tau| self.p_cochains(tau, diag_only).complex,
            &|a, b| {
                self.p_map(&self.p_cochains(a, diag_only), &self.p_cochains(b, diag_only), diag_only)
            },
        )
    }

    /// `cone(u: P(k_I) -> k_I)`.
    pub fn cone_u(&self) -> Ranks {
        let f = self.f;
        let parts = |tau: usize| {
            let p = self.p_cochains(tau, false);
            let id = self.p_cochains(tau, true);
            let u = self.p_map(&p, &id, true);
            (p, id, u)
        };
        self.object(
            &|tau| {
                let (p, id, u) = parts(tau);
                cone(&p.complex, &id.complex, &u, f)
            },
            &|a, b| {
                let (pa, ia, _) = parts(a);
                let (pb, ib, _) = parts(b);
                let alpha = self.p_map(&pa, &pb, false);
                let beta = self.p_map(&ia, &ib, true);
                cone_map(&pa.complex, &ia.complex, &pb.complex, &ib.complex, &alpha, &beta)
            },
        )
        .ranks(f)
    }

    fn h(&self, c: usize) -> bool {
        self.in_bar(c)
    }

    fn dc(&self, w: &dyn Fn(usize) -> bool, removed: &dyn Fn(usize) -> bool) -> Dc {
        let f = self.f;
        let h = |c: usize| self.h(c);
        let cw = self.grid.poset.cochains(w, &h, f);
        let wr = |c: usize| w(c) && !removed(c);
        let cwr = self.grid.poset.cochains(&wr, &h, f);
        let res = self.grid.poset.map(&cw, &cwr, &h);
        let d = cone(&cw.complex, &cwr.complex, &res, f);
        Dc { w: cw, wr: cwr, d }
    }

    fn dmap(&self, from: &Dc, to: &Dc) -> ChainMap {
        let h = |c: usize| self.h(c);
        let alpha = self.grid.poset.map(&from.w, &to.w, &h);
        let beta = self.grid.poset.map(&from.wr, &to.wr, &h);
        cone_map(&from.w.complex, &from.wr.complex, &to.w.complex, &to.wr.complex, &alpha, &beta)
    }

    /// Pieces of `Q` (or of the identity when `diag_only`) over the cell `tau`.
    fn q_parts(&self, tau: usize, diag_only: bool) -> (Dc, Dc, Dc, Complex, Complex) {
        let f = self.f;
        let last = self.grid.line.cells() - 1;
        let removed = |c: usize| {
            if diag_only {
                self.rel(c) == Rel::Eq
            } else {
                self.in_a(c)
            }
        };
        let u = self.dc(&|c| self.over(tau, c), &removed);
        let np = self.dc(
            &|c| self.over(tau, c) && self.grid.cells[c].0 == last && self.rel(c) == Rel::Gt,
            &removed,
        );
        let nm = self.dc(
            &|c| self.over(tau, c) && self.grid.cells[c].0 == 0 && self.rel(c) == Rel::Lt,
            &removed,
        );
        let target = direct_sum(&np.d, &nm.d);
        let g = pair_map(&self.dmap(&u, &np), &self.dmap(&u, &nm));
        let v = fiber(&u.d, &target, &g, f);
        (u, np, nm, target, v)
    }

    fn q_restrict(&self, a: usize, b: usize, diag_only: bool) -> ChainMap {
        let (ua, pa, ma, ta, _) = self.q_parts(a, diag_only);
        let (ub, pb, mb, tb, _) = self.q_parts(b, diag_only);
        let alpha = self.dmap(&ua, &ub);
        let beta = diag_map(&self.dmap(&pa, &pb), &self.dmap(&ma, &mb));
        fiber_map(&ua.d, &ta, &ub.d, &tb, &alpha, &beta)
    }

    fn q_object(&self, diag_only: bool) -> LineObject {
        self.object(&|tau| self.q_parts(tau, diag_only).4, &|a, b| {
            self.q_restrict(a, b, diag_only)
        })
    }

    /// `Q(k_I)`.
    pub fn q(&self) -> Ranks {
        self.q_object(false).ranks(self.f)
    }

    /// `k_I` itself, through `RGamma` of the diagonal.
    pub fn identity_via_q(&self) -> Ranks {
        self.q_object(true).ranks(self.f)
    }

    /// `v` over the cell `tau`.
    fn v_map(&self, tau: usize) -> (Complex, Complex, ChainMap) {
        let (ud, pd, md, td, vd) = self.q_parts(tau, true);
        let (ua, pa, ma, ta, va) = self.q_parts(tau, false);
        let alpha = self.dmap(&ud, &ua);
        let beta = diag_map(&self.dmap(&pd, &pa), &self.dmap(&md, &ma));
        (vd, va, fiber_map(&ud.d, &td, &ua.d, &ta, &alpha, &beta))
    }

    /// `cone(v: k_I -> Q(k_I))`.
    pub fn cone_v(&self) -> Ranks {
        let f = self.f;
        self.object(
            &|tau| {
                let (a, b, v) = self.v_map(tau);
                cone(&a, &b, &v, f)
            },
            &|a, b| {
                let (xa, ya, _) = self.v_map(a);
                let (xb, yb, _) = self.v_map(b);
                let alpha = self.q_restrict(a, b, true);
                let beta = self.q_restrict(a, b, false);
                cone_map(&xa, &ya, &xb, &yb, &alpha, &beta)
            },
        )
        .ranks(f)
    }

    /// Self-check of the complexes and chain maps built for the cell `tau`.
    pub fn check(&self, tau: usize) {
        let f = self.f;
        let (a, b, v) = self.v_map(tau);
        a.check(f);
        b.check(f);
        v.check(&a, &b, f);
        let p = self.p_cochains(tau, false);
        let id = self.p_cochains(tau, true);
        self.p_map(&p, &id, true).check(&p.complex, &id.complex, f);
    }
}

/// Rank invariants of shifted bars on the given line: `bars` are
/// `(interval, shift d)` and land in cohomological degree `-d`.
pub fn ranks_of_bars(line: &Line, bars: &[(Interval, i32)]) -> Ranks {
    let n = line.cells();
    let mut by_degree: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
    for (iv, d) in bars {
        if let Some(span) = line.span(iv) {
            by_degree.entry(-d).or_default().push(span);
        }
    }
    by_degree
        .into_iter()
        .map(|(q, spans)| (q, crate::zigzag::ranks_of_spans(n, &spans)))
        .collect()
}

/// Bars (as node spans with shift) recovered from rank invariants.
pub fn spans_of(line: &Line, r: &Ranks) -> Vec<((usize, usize), i32)> {
    let n = line.cells();
    let mut out = Vec::new();
    for (&q, rk) in r {
        for s in crate::zigzag::spans_of_ranks(n, rk) {
            out.push((s, -q));
        }
    }
    out
}

