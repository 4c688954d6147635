//! Limits of microsupport profiles and one-dimensional convex hulls.

use alloc::vec::Vec;

use super::{BarcodeError, MicrosupportProfile1D, ProfileEntry};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

/// Set-limit of a finite sequence of profiles.
///
/// Only the tail (the last `ceil(N/2)` profiles) is used. For each sign,
/// flagged points of the tail are clustered by single linkage with gap at most
/// `tol`, and each cluster is represented by its member from the latest
/// profile (smallest value on ties).
pub fn limsup_microsupport(
    seq: &[MicrosupportProfile1D],
    tol: f64,
) -> Result<MicrosupportProfile1D, BarcodeError> {
    if seq.is_empty() {
        return Err(BarcodeError::EmptySequence);
    }
    let start = seq.len() / 2;
    let tail = &seq[start..];
    let mut out: Vec<ProfileEntry> = Vec::new();
    for sign in [true, false] {
        let mut pts: Vec<(f64, usize)> = tail
            .iter()
            .enumerate()
            .flat_map(|(idx, p)| {
                p.entries()
                    .iter()
                    .filter(move |e| if sign { e.plus } else { e.minus })
                    .map(move |e| (e.point, idx))
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut k = 0;
        while k < pts.len() {
            let mut end = k + 1;
            while end < pts.len() && pts[end].0 - pts[end - 1].0 <= tol {
                end += 1;
            }
            let rep = pts[k..end]
                .iter()
                .fold(pts[k], |best, &c| if c.1 > best.1 { c } else { best })
                .0;
            match out.iter_mut().find(|e| e.point == rep) {
                Some(e) if sign => e.plus = true,
                Some(e) => e.minus = true,
                None => out.push(ProfileEntry {
                    point: rep,
                    plus: sign,
                    minus: !sign,
                }),
            }
            k = end;
        }
    }
    Ok(MicrosupportProfile1D::new(out))
}

/// Convex hull of the nonzero codirections in one fiber of `T*R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvFiber {
    pub plus: bool,
    pub minus: bool,
    /// False when the hull is the whole line.
    pub proper: bool,
}

pub fn conv_fiber(plus: bool, minus: bool) -> ConvFiber {
    ConvFiber {
        plus,
        minus,
        proper: !(plus && minus),
    }
}
