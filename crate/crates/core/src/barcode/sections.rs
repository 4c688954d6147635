//! Sections of a barcode over an open subinterval.

use alloc::collections::BTreeMap;

use super::{Bar, Barcode, Endpoint};

/// Dimension of `H^q` keyed by the cohomological degree `q`; zero entries are
/// omitted.
pub type GradedDims = BTreeMap<i32, usize>;

/// `RGamma((u0, u1); F)` for a barcode `F`.
///
/// For one bar `k_I[d]` put `J = I ∩ (u0, u1)` and count the open ends of `J`
/// lying strictly inside `(u0, u1)`. No such end gives `H^{-d} = 1`, two give
/// `H^{1-d} = 1`, exactly one gives nothing.
pub fn global_sections(bc: &Barcode, u0: f64, u1: f64) -> GradedDims {
    let mut out = GradedDims::new();
    for bar in bc.bars() {
        if let Some(q) = bar_sections(bar, u0, u1) {
            *out.entry(q).or_insert(0) += 1;
        }
    }
    out
}

fn bar_sections(bar: &Bar, u0: f64, u1: f64) -> Option<i32> {
    if !(u0 < u1) {
        return None;
    }
    // Open ends of J strictly inside U. `None` means J is empty.
    let left = match bar.left() {
        Endpoint::Finite { value, closed } if value > u0 => {
            if value >= u1 {
                return None;
            }
            !closed as u32
        }
        _ => 0,
    };
    let right = match bar.right() {
        Endpoint::Finite { value, closed } if value < u1 => {
            if value <= u0 {
                return None;
            }
            !closed as u32
        }
        _ => 0,
    };
    let d = bar.degree();
    match left + right {
        0 => Some(-d),
        2 => Some(1 - d),
        _ => None,
    }
}
