//! Zigzag data of a constructible sheaf and its interval decomposition.
//!
//! With critical points `s_1 < ... < s_k` the line splits into nodes
//! `E_0, P_1, E_1, ..., P_k, E_k` (open strata and points). Node `2m` is the
//! stratum `E_m`, node `2m - 1` is the point `s_m`. Each point carries two
//! generization maps `lambda_m: P_m -> E_{m-1}` and `rho_m: P_m -> E_m`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{Bar, Barcode, BarcodeError, Endpoint, MicrosupportProfile1D, ProfileEntry};
use crate::gf::{FieldConfig, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq)]
pub struct ZigzagPresentation {
    ambient: (f64, f64),
    critical_points: Vec<f64>,
    stalk_dims: Vec<usize>,
    lambda: Vec<Matrix>,
    rho: Vec<Matrix>,
    field: FieldConfig,
}

impl ZigzagPresentation {
    /// `stalk_dims` lists the `2k + 1` node dimensions in left-to-right order.
    /// `lambda[m]` has shape `dim E_m x dim P_{m+1}` and `rho[m]` has shape
    /// `dim E_{m+1} x dim P_{m+1}` (zero-based `m`).
    pub fn new(
        ambient: (f64, f64),
        critical_points: Vec<f64>,
        stalk_dims: Vec<usize>,
        lambda: Vec<Matrix>,
        rho: Vec<Matrix>,
        field: FieldConfig,
    ) -> Result<Self, BarcodeError> {
        let bad = |s: alloc::string::String| Err(BarcodeError::InvalidPresentation(s));
        let (a, b) = ambient;
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(BarcodeError::InvalidAmbient);
        }
        let k = critical_points.len();
        if critical_points.windows(2).any(|w| w[0] >= w[1]) {
            return bad("critical points must be strictly increasing".into());
        }
        if critical_points.iter().any(|&s| !(s > a && s < b)) {
            return bad("critical point outside the ambient interval".into());
        }
        if stalk_dims.len() != 2 * k + 1 {
            return bad(format!(
                "expected {} stalk dimensions, got {}",
                2 * k + 1,
                stalk_dims.len()
            ));
        }
        if lambda.len() != k || rho.len() != k {
            return bad("one lambda and one rho per critical point".into());
        }
        for m in 0..k {
            let p = stalk_dims[2 * m + 1];
            let (l, r) = (&lambda[m], &rho[m]);
            if l.rows() != stalk_dims[2 * m] || l.cols() != p {
                return bad(format!("lambda at point {} has wrong shape", m));
            }
            if r.rows() != stalk_dims[2 * m + 2] || r.cols() != p {
                return bad(format!("rho at point {} has wrong shape", m));
            }
        }
        Ok(ZigzagPresentation {
            ambient,
            critical_points,
            stalk_dims,
            lambda,
            rho,
            field,
        })
    }

    /// The direct sum of interval modules of the given bars.
    ///
    /// Every finite endpoint must be one of `critical_points`; degrees are
    /// ignored.
    pub fn from_bars(
        ambient: (f64, f64),
        critical_points: Vec<f64>,
        bars: &[Bar],
        field: FieldConfig,
    ) -> Result<Self, BarcodeError> {
        let k = critical_points.len();
        let n = 2 * k + 1;
        let find = |v: f64| {
            critical_points
                .iter()
                .position(|&s| s == v)
                .ok_or_else(|| {
                    BarcodeError::InvalidPresentation(format!("{} is not a critical point", v))
                })
        };
        let mut spans = Vec::with_capacity(bars.len());
        for bar in bars {
            let i = match bar.left() {
                Endpoint::NegInfinity => 0,
                Endpoint::Finite { value, closed } => {
                    let m = find(value)?;
                    if closed {
                        2 * m + 1
                    } else {
                        2 * m + 2
                    }
                }
                Endpoint::PosInfinity => unreachable!(),
            };
            let j = match bar.right() {
                Endpoint::PosInfinity => n - 1,
                Endpoint::Finite { value, closed } => {
                    let m = find(value)?;
                    if closed {
                        2 * m + 1
                    } else {
                        2 * m
                    }
                }
                Endpoint::NegInfinity => unreachable!(),
            };
            spans.push((i, j));
        }
        let mut dims = alloc::vec![0usize; n];
        // slot[s][node] = coordinate index of summand s at that node
        let mut slot = alloc::vec![alloc::vec![usize::MAX; n]; spans.len()];
        for (s, &(i, j)) in spans.iter().enumerate() {
            for node in i..=j {
                slot[s][node] = dims[node];
                dims[node] += 1;
            }
        }
        let mut lambda = Vec::with_capacity(k);
        let mut rho = Vec::with_capacity(k);
        for m in 0..k {
            let p = 2 * m + 1;
            let mut l = Matrix::zeros(dims[p - 1], dims[p]);
            let mut r = Matrix::zeros(dims[p + 1], dims[p]);
            for (s, &(i, j)) in spans.iter().enumerate() {
                if i <= p && p <= j {
                    if i < p {
                        l.set(slot[s][p - 1], slot[s][p], 1);
                    }
                    if p < j {
                        r.set(slot[s][p + 1], slot[s][p], 1);
                    }
                }
            }
            lambda.push(l);
            rho.push(r);
        }
        ZigzagPresentation::new(ambient, critical_points, dims, lambda, rho, field)
    }

    /// Presentation of a barcode, on the critical set given by its endpoints.
    pub fn from_barcode(bc: &Barcode) -> Result<Self, BarcodeError> {
        ZigzagPresentation::from_bars(bc.ambient(), bc.endpoints(), bc.bars(), bc.field())
    }

    pub fn ambient(&self) -> (f64, f64) {
        self.ambient
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn stalk_dims(&self) -> &[usize] {
        &self.stalk_dims
    }

    pub fn lambda(&self) -> &[Matrix] {
        &self.lambda
    }

    pub fn rho(&self) -> &[Matrix] {
        &self.rho
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn node_count(&self) -> usize {
        self.stalk_dims.len()
    }

    /// The map on the arrow between nodes `t` and `t + 1`, with `true` when it
    /// points rightward (`t -> t + 1`).
    fn arrow(&self, t: usize) -> (&Matrix, bool) {
        if t % 2 == 0 {
            // E_m <- P_{m+1}
            (&self.lambda[t / 2], false)
        } else {
            // P_m -> E_m
            (&self.rho[t / 2], true)
        }
    }

    /// Number of interval summands whose node span contains `[i, j]`.
    ///
    /// Sweeps a pair of subspaces `(U, N)` from node `i` to node `j`: `U` starts
    /// as the whole stalk and `N` as zero, forward arrows push both, backward
    /// arrows pull both back. Elements picked up from kernels of backward
    /// arrows land in `N`, so `dim(U + N) - dim N` counts what survives.
    pub fn rank_between(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.node_count());
        let f = &self.field;
        let mut u = Subspace::full(self.stalk_dims[i]);
        let mut nn = Subspace::zero(self.stalk_dims[i]);
        for t in i..j {
            let (m, forward) = self.arrow(t);
            if forward {
                u = u.image(m, f);
                nn = nn.image(m, f);
            } else {
                u = u.preimage(m, f);
                nn = nn.preimage(m, f);
            }
        }
        u.sum(&nn, f).dim() - nn.dim()
    }
}

/// All rank invariants `rank_between(i, j)`, keyed by node pair.
pub fn rank_invariants(pres: &ZigzagPresentation) -> BTreeMap<(usize, usize), usize> {
    let n = pres.node_count();
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            out.insert((i, j), pres.rank_between(i, j));
        }
    }
    out
}

fn node_left(pres: &ZigzagPresentation, i: usize) -> Endpoint {
    let s = &pres.critical_points;
    if i % 2 == 1 {
        Endpoint::closed(s[i / 2])
    } else if i == 0 {
        Endpoint::NegInfinity
    } else {
        Endpoint::open(s[i / 2 - 1])
    }
}

fn node_right(pres: &ZigzagPresentation, j: usize) -> Endpoint {
    let s = &pres.critical_points;
    if j % 2 == 1 {
        Endpoint::closed(s[j / 2])
    } else if j == pres.node_count() - 1 {
        Endpoint::PosInfinity
    } else {
        Endpoint::open(s[j / 2])
    }
}

/// Interval decomposition of a zigzag presentation into degree-0 bars.
pub fn decompose(pres: &ZigzagPresentation) -> Result<Barcode, BarcodeError> {
    let n = pres.node_count();
    let rk = rank_invariants(pres);
    let get = |i: isize, j: usize| -> isize {
        if i < 0 || j >= n {
            0
        } else {
            rk[&(i as usize, j)] as isize
        }
    };
    let mut bars = Vec::new();
    for i in 0..n {
        for j in i..n {
            let ii = i as isize;
            let mult = get(ii, j) - get(ii - 1, j) - get(ii, j + 1) + get(ii - 1, j + 1);
            debug_assert!(mult >= 0, "negative multiplicity");
            for _ in 0..mult.max(0) {
                bars.push(Bar::new(node_left(pres, i), node_right(pres, j), 0)?);
            }
        }
    }
    Barcode::new(pres.ambient, bars, pres.field)
}

/// Sign flags at each critical point: `+` when `lambda` is not bijective,
/// `-` when `rho` is not bijective.
pub fn microsupport_profile(
    pres: &ZigzagPresentation,
) -> Result<MicrosupportProfile1D, BarcodeError> {
    let f = &pres.field;
    let entries = pres
        .critical_points
        .iter()
        .enumerate()
        .map(|(m, &point)| ProfileEntry {
            point,
            plus: !pres.lambda[m].is_bijective(f),
            minus: !pres.rho[m].is_bijective(f),
        })
        .collect();
    Ok(MicrosupportProfile1D::new(entries))
}
