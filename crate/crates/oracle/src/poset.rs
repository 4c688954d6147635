//! Derived limits over finite posets via order-complex cochains.
//!
//! A sheaf constructible for a regular cell decomposition is a functor on the
//! face poset (`c <= c'` when `c` lies in the closure of `c'`). Sections over
//! an open union of cells `W` are `R lim` over the cells of `W`, computed with
//! `C^n = sum over chains c_0 < ... < c_n in W of F(c_n)`.
//!
//! Only sheaves of the form `k_S` (stalk `k` on the cells of `S`, identity
//! generization maps inside `S`) are needed.

use std::collections::BTreeMap;

use crate::complex::{ChainMap, Complex};
use crate::linalg::{Fp, Mat};

pub struct Poset {
    pub le: Vec<Vec<bool>>,
    chains: Vec<Vec<usize>>,
}

/// Cochains of `k_S` over `W`, with the chain basis kept for building maps.
pub struct Cochains {
    pub complex: Complex,
    basis: Vec<Vec<usize>>,
    pos: Vec<BTreeMap<usize, usize>>,
}

impl Poset {
    pub fn new(le: Vec<Vec<bool>>) -> Poset {
        let n = le.len();
        let mut chains: Vec<Vec<usize>> = (0..n).map(|c| vec![c]).collect();
        let mut frontier = chains.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for ch in &frontier {
                let last = *ch.last().unwrap();
                for c in 0..n {
                    if c != last && le[last][c] {
                        let mut e = ch.clone();
                        e.push(c);
                        next.push(e);
                    }
                }
            }
            chains.extend(next.iter().cloned());
            frontier = next;
        }
        Poset { le, chains }
    }

    pub fn len(&self) -> usize {
        self.le.len()
    }

    pub fn is_empty(&self) -> bool {
        self.le.is_empty()
    }

    pub fn cochains(&self, w: &dyn Fn(usize) -> bool, s: &dyn Fn(usize) -> bool, f: Fp) -> Cochains {
        let top = self.chains.iter().map(|c| c.len()).max().unwrap_or(1);
        let mut basis: Vec<Vec<usize>> = vec![Vec::new(); top];
        for (k, ch) in self.chains.iter().enumerate() {
            if ch.iter().all(|&c| w(c)) && s(*ch.last().unwrap()) {
                basis[ch.len() - 1].push(k);
            }
        }
        let pos: Vec<BTreeMap<usize, usize>> = basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, &k)| (k, i)).collect())
            .collect();
        let lookup: BTreeMap<&Vec<usize>, usize> =
            self.chains.iter().enumerate().map(|(k, c)| (c, k)).collect();
        let mut diffs = Vec::new();
        for n in 0..top.saturating_sub(1) {
            let mut d = Mat::zero(basis[n + 1].len(), basis[n].len());
            for (row, &k) in basis[n + 1].iter().enumerate() {
                let ch = &self.chains[k];
                for omit in 0..ch.len() {
                    let mut face = ch.clone();
                    face.remove(omit);
                    let fk = lookup[&face];
                    let Some(&col) = pos[n].get(&fk) else {
                        // last cell outside S: zero generization map
                        continue;
                    };
                    let sign = if omit % 2 == 0 { 1 } else { f.0 - 1 };
                    d.a[row][col] = f.add(d.a[row][col], sign);
                }
            }
            diffs.push(d);
        }
        let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();
        let complex = Complex::from_degree_zero(&dims, diffs);
        Cochains {
            complex,
            basis,
            pos,
        }
    }

    /// Restriction to a smaller open set composed with a stalk map
    /// `k_S -> k_T`, nonzero exactly on the cells of `T`.
    pub fn map(&self, from: &Cochains, to: &Cochains, t: &dyn Fn(usize) -> bool) -> ChainMap {
        let mut id = ChainMap::identity(&Complex::zero());
        for k in 0..id.m.len() {
            id.m[k] = Mat::zero(to.complex.dims[k], from.complex.dims[k]);
        }
        let base = (-crate::complex::LO) as usize;
        for n in 0..to.basis.len() {
            for (row, &k) in to.basis[n].iter().enumerate() {
                if !t(*self.chains[k].last().unwrap()) {
                    continue;
                }
                if let Some(&col) = from.pos.get(n).and_then(|p| p.get(&k)) {
                    id.m[base + n].a[row][col] = 1;
                }
            }
        }
        id
    }
}
