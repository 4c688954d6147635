//! Rank invariants of zigzag modules from global limits and colimits.
//!
//! Nodes alternate `E_0, P_1, E_1, ...`; arrow `t` joins nodes `t` and `t + 1`
//! and points left (`P -> E`) for even `t`, right for odd `t`.

use std::collections::BTreeMap;

use crate::linalg::{Fp, Mat};

/// A zigzag module: stalk dimensions and one matrix per arrow, mapping the
/// point node to its neighbouring stratum node.
#[derive(Debug, Clone)]
pub struct Zigzag {
    pub dims: Vec<usize>,
    pub arrows: Vec<Mat>,
}

impl Zigzag {
    fn ends(&self, t: usize) -> (usize, usize) {
        if t % 2 == 0 {
            (t + 1, t)
        } else {
            (t, t + 1)
        }
    }

    /// Rank of `lim -> colim` of the restriction to nodes `i..=j`: the number
    /// of interval summands covering `i..=j`.
    pub fn rank(&self, i: usize, j: usize, f: Fp) -> usize {
        let offs: Vec<usize> = (i..=j)
            .scan(0, |acc, t| {
                let o = *acc;
                *acc += self.dims[t];
                Some(o)
            })
            .collect();
        let total: usize = (i..=j).map(|t| self.dims[t]).sum();
        let off = |t: usize| offs[t - i];
        // limit: x_target = M x_source on every arrow
        let mut rows: Vec<Vec<u64>> = Vec::new();
        // colimit relations: e_source(v) - e_target(M v)
        let mut rel: Vec<Vec<u64>> = Vec::new();
        for t in i..j {
            let (s, r) = self.ends(t);
            let m = &self.arrows[t];
            for a in 0..self.dims[r] {
                let mut row = vec![0; total];
                row[off(r) + a] = 1;
                for b in 0..self.dims[s] {
                    row[off(s) + b] = f.sub(row[off(s) + b], m.a[a][b]);
                }
                rows.push(row);
            }
            for b in 0..self.dims[s] {
                let mut v = vec![0; total];
                v[off(s) + b] = 1;
                for a in 0..self.dims[r] {
                    v[off(r) + a] = f.sub(v[off(r) + a], m.a[a][b]);
                }
                rel.push(v);
            }
        }
        let cons = Mat {
            rows: rows.len(),
            cols: total,
            a: rows,
        };
        let lim = if cons.rows == 0 {
            (0..total)
                .map(|k| {
                    let mut v = vec![0; total];
                    v[k] = 1;
                    v
                })
                .collect()
        } else {
            cons.null_space(f)
        };
        // lim -> colim factors through any single node; use node i
        let lim: Vec<Vec<u64>> = lim
            .into_iter()
            .map(|mut v| {
                for x in v.iter_mut().skip(self.dims[i]) {
                    *x = 0;
                }
                v
            })
            .collect();
        let r = Mat::from_cols(total, &rel);
        let both = r.hstack(&Mat::from_cols(total, &lim));
        both.rank(f) - r.rank(f)
    }

    pub fn ranks(&self, f: Fp) -> BTreeMap<(usize, usize), usize> {
        let n = self.dims.len();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                out.insert((i, j), self.rank(i, j, f));
            }
        }
        out
    }
}

/// Rank invariants of a direct sum of interval modules given by node spans.
pub fn ranks_of_spans(n: usize, spans: &[(usize, usize)]) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let c = spans.iter().filter(|&&(a, b)| a <= i && j <= b).count();
            out.insert((i, j), c);
        }
    }
    out
}

/// Interval spans recovered from rank invariants by inclusion-exclusion.
pub fn spans_of_ranks(n: usize, rk: &BTreeMap<(usize, usize), usize>) -> Vec<(usize, usize)> {
    let get = |i: isize, j: usize| -> isize {
        if i < 0 || j >= n {
            0
        } else {
            rk[&(i as usize, j)] as isize
        }
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let ii = i as isize;
            let m = get(ii, j) - get(ii - 1, j) - get(ii, j + 1) + get(ii - 1, j + 1);
            assert!(m >= 0);
            for _ in 0..m {
                out.push((i, j));
            }
        }
    }
    out
}
