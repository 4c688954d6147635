//! Constructible sheaves on an open interval of the real line.
//!
//! A sheaf is either given as zigzag data ([`ZigzagPresentation`]) or as a
//! multiset of shifted interval sheaves ([`Barcode`]). Coefficients live in a
//! prime field, so every rank computation is exact.

mod limits;
mod sections;
mod zigzag;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

pub use crate::gf::{FieldConfig, Matrix};
pub use limits::{conv_fiber, limsup_microsupport, ConvFiber, DEFAULT_CLUSTER_TOL};
pub use sections::{global_sections, GradedDims};
pub use zigzag::{decompose, microsupport_profile, rank_invariants, ZigzagPresentation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarcodeError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("bar {0} is neither left-closed/right-open nor a full-interval bar")]
    MixedDirectionBar(String),
    #[error("empty sequence of profiles")]
    EmptySequence,
    #[error("bar is empty: {0}")]
    EmptyBar(String),
    #[error("bar {0} is not contained in the ambient interval")]
    OutsideAmbient(String),
    #[error("ambient interval must satisfy a < b")]
    InvalidAmbient,
}

/// One end of an interval.
///
/// Infinite variants stand for the ends of the ambient interval, which is open,
/// so they carry no closedness flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    NegInfinity,
    Finite { value: f64, closed: bool },
    PosInfinity,
}

impl Endpoint {
    pub fn closed(value: f64) -> Self {
        Endpoint::Finite {
            value,
            closed: true,
        }
    }

    pub fn open(value: f64) -> Self {
        Endpoint::Finite {
            value,
            closed: false,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Endpoint::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Endpoint::Finite { .. })
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Endpoint::Finite { closed: true, .. })
    }

    fn numeric(&self) -> f64 {
        match *self {
            Endpoint::NegInfinity => f64::NEG_INFINITY,
            Endpoint::Finite { value, .. } => value,
            Endpoint::PosInfinity => f64::INFINITY,
        }
    }

    /// Order of left ends: `[v` sorts before `(v`.
    fn cmp_as_left(&self, other: &Self) -> Ordering {
        let rank = |e: &Endpoint| if e.is_closed() { 0 } else { 1 };
        self.numeric()
            .total_cmp(&other.numeric())
            .then(rank(self).cmp(&rank(other)))
    }

    /// Order of right ends: `v)` sorts before `v]`.
    fn cmp_as_right(&self, other: &Self) -> Ordering {
        let rank = |e: &Endpoint| if e.is_closed() { 1 } else { 0 };
        self.numeric()
            .total_cmp(&other.numeric())
            .then(rank(self).cmp(&rank(other)))
    }
}

/// Which of the ten interval shapes a bar has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BarShape {
    /// `[a,b)`
    ClosedOpen,
    /// `[a,b]` with `a < b`
    Closed,
    /// `(a,b)`
    Open,
    /// `(a,b]`
    OpenClosed,
    /// `{a}`
    Point,
    /// `[a, +inf)`
    ClosedRay,
    /// `(a, +inf)`
    OpenRay,
    /// `(-inf, b)`
    RayOpen,
    /// `(-inf, b]`
    RayClosed,
    /// the whole ambient interval
    Full,
}

impl BarShape {
    pub const ALL: [BarShape; 10] = [
        BarShape::ClosedOpen,
        BarShape::Closed,
        BarShape::Open,
        BarShape::OpenClosed,
        BarShape::Point,
        BarShape::ClosedRay,
        BarShape::OpenRay,
        BarShape::RayOpen,
        BarShape::RayClosed,
        BarShape::Full,
    ];
}

/// A shifted interval sheaf `k_I[degree]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    left: Endpoint,
    right: Endpoint,
    degree: i32,
}

impl Bar {
    pub fn new(left: Endpoint, right: Endpoint, degree: i32) -> Result<Self, BarcodeError> {
        let bar = Bar {
            left,
            right,
            degree,
        };
        let ok = match (left, right) {
            (Endpoint::PosInfinity, _) | (_, Endpoint::NegInfinity) => false,
            (Endpoint::Finite { value: a, closed: ca }, Endpoint::Finite { value: b, closed: cb }) => {
                a.is_finite() && b.is_finite() && (a < b || (a == b && ca && cb))
            }
            (Endpoint::Finite { value, .. }, _) | (_, Endpoint::Finite { value, .. }) => {
                value.is_finite()
            }
            _ => true,
        };
        if ok {
            Ok(bar)
        } else {
            Err(BarcodeError::EmptyBar(bar.describe()))
        }
    }

    /// `[a,b)` in the given degree.
    pub fn closed_open(a: f64, b: f64, degree: i32) -> Result<Self, BarcodeError> {
        Bar::new(Endpoint::closed(a), Endpoint::open(b), degree)
    }

    /// The constant sheaf on the whole ambient interval.
    pub fn full(degree: i32) -> Self {
        Bar {
            left: Endpoint::NegInfinity,
            right: Endpoint::PosInfinity,
            degree,
        }
    }

    pub fn left(&self) -> Endpoint {
        self.left
    }

    pub fn right(&self) -> Endpoint {
        self.right
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn with_degree(&self, degree: i32) -> Bar {
        Bar { degree, ..*self }
    }

    pub fn shape(&self) -> BarShape {
        use Endpoint::*;
        match (self.left, self.right) {
            (NegInfinity, PosInfinity) => BarShape::Full,
            (NegInfinity, Finite { closed, .. }) => {
                if closed {
                    BarShape::RayClosed
                } else {
                    BarShape::RayOpen
                }
            }
            (Finite { closed, .. }, PosInfinity) => {
                if closed {
                    BarShape::ClosedRay
                } else {
                    BarShape::OpenRay
                }
            }
            (Finite { value: a, closed: ca }, Finite { value: b, closed: cb }) => {
                match (ca, cb) {
                    (true, true) if a == b => BarShape::Point,
                    (true, true) => BarShape::Closed,
                    (true, false) => BarShape::ClosedOpen,
                    (false, true) => BarShape::OpenClosed,
                    (false, false) => BarShape::Open,
                }
            }
            _ => unreachable!("validated on construction"),
        }
    }

    pub fn is_full(&self) -> bool {
        self.shape() == BarShape::Full
    }

    /// Both ends finite.
    pub fn is_bounded(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    /// Microsupport in `{sigma >= 0}`: finite left ends closed, finite right ends open.
    pub fn is_plus(&self) -> bool {
        let l = !self.left.is_finite() || self.left.is_closed();
        let r = !self.right.is_finite() || !self.right.is_closed();
        l && r
    }

    /// Microsupport in `{sigma <= 0}`: finite left ends open, finite right ends closed.
    pub fn is_minus(&self) -> bool {
        let l = !self.left.is_finite() || !self.left.is_closed();
        let r = !self.right.is_finite() || self.right.is_closed();
        l && r
    }

    /// `[a,b]`, `{a}` or `(a,b)`: codirections of both signs.
    pub fn is_mixed(&self) -> bool {
        !self.is_plus() && !self.is_minus()
    }

    /// Whether `x` lies in the bar (ambient ends are treated as unbounded).
    pub fn contains(&self, x: f64) -> bool {
        let l = match self.left {
            Endpoint::NegInfinity => true,
            Endpoint::Finite { value, closed } => x > value || (closed && x == value),
            Endpoint::PosInfinity => false,
        };
        let r = match self.right {
            Endpoint::PosInfinity => true,
            Endpoint::Finite { value, closed } => x < value || (closed && x == value),
            Endpoint::NegInfinity => false,
        };
        l && r
    }

    /// Sign flags of the microsupport at each finite end, as `(point, plus, minus)`.
    pub fn endpoint_flags(&self) -> Vec<(f64, bool, bool)> {
        let mut out = Vec::new();
        if let Endpoint::Finite { value, closed } = self.left {
            out.push((value, closed, !closed));
        }
        if let Endpoint::Finite { value, closed } = self.right {
            out.push((value, !closed, closed));
        }
        out
    }

    /// Mirror image under `x -> -x`.
    pub fn mirrored(&self) -> Bar {
        let flip = |e: Endpoint| match e {
            Endpoint::NegInfinity => Endpoint::PosInfinity,
            Endpoint::PosInfinity => Endpoint::NegInfinity,
            Endpoint::Finite { value, closed } => Endpoint::Finite {
                value: -value,
                closed,
            },
        };
        Bar {
            left: flip(self.right),
            right: flip(self.left),
            degree: self.degree,
        }
    }

    /// Human-readable form such as `[0,1)@0`.
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        match self.left {
            Endpoint::NegInfinity => s.push_str("(-inf"),
            Endpoint::Finite { value, closed } => {
                let _ = write!(s, "{}{}", if closed { '[' } else { '(' }, value);
            }
            Endpoint::PosInfinity => s.push_str("(+inf"),
        }
        s.push(',');
        match self.right {
            Endpoint::PosInfinity => s.push_str("+inf)"),
            Endpoint::Finite { value, closed } => {
                let _ = write!(s, "{}{}", value, if closed { ']' } else { ')' });
            }
            Endpoint::NegInfinity => s.push_str("-inf)"),
        }
        let _ = write!(s, "@{}", self.degree);
        s
    }

    fn canonical_cmp(&self, other: &Bar) -> Ordering {
        self.left
            .cmp_as_left(&other.left)
            .then(self.right.cmp_as_right(&other.right))
            .then(self.degree.cmp(&other.degree))
    }
}

/// A multiset of bars on an open ambient interval `(a, b)`, `a` and `b`
/// possibly infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    ambient: (f64, f64),
    bars: Vec<Bar>,
    field: FieldConfig,
}

impl Barcode {
    /// Validates containment and sorts bars canonically.
    ///
    /// Open finite ends sitting exactly on an ambient end are rewritten as the
    /// corresponding infinite end.
    pub fn new(
        ambient: (f64, f64),
        bars: Vec<Bar>,
        field: FieldConfig,
    ) -> Result<Self, BarcodeError> {
        let (a, b) = ambient;
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(BarcodeError::InvalidAmbient);
        }
        let mut out = Vec::with_capacity(bars.len());
        for bar in bars {
            let mut bar = bar;
            if let Endpoint::Finite { value, closed } = bar.left {
                if value == a && !closed {
                    bar.left = Endpoint::NegInfinity;
                } else if value <= a || value >= b {
                    return Err(BarcodeError::OutsideAmbient(bar.describe()));
                }
            }
            if let Endpoint::Finite { value, closed } = bar.right {
                if value == b && !closed {
                    bar.right = Endpoint::PosInfinity;
                } else if value <= a || value >= b {
                    return Err(BarcodeError::OutsideAmbient(bar.describe()));
                }
            }
            out.push(bar);
        }
        out.sort_by(|x, y| x.canonical_cmp(y));
        Ok(Barcode {
            ambient,
            bars: out,
            field,
        })
    }

    /// Barcode on the whole real line over GF(2).
    pub fn on_line(bars: Vec<Bar>) -> Result<Self, BarcodeError> {
        Barcode::new(
            (f64::NEG_INFINITY, f64::INFINITY),
            bars,
            FieldConfig::default(),
        )
    }

    pub fn empty(ambient: (f64, f64), field: FieldConfig) -> Self {
        Barcode {
            ambient,
            bars: Vec::new(),
            field,
        }
    }

    pub fn ambient(&self) -> (f64, f64) {
        self.ambient
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn field(&self) -> FieldConfig {
        self.field
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Same ambient and field with a different bar multiset.
    pub fn with_bars(&self, bars: Vec<Bar>) -> Result<Self, BarcodeError> {
        Barcode::new(self.ambient, bars, self.field)
    }

    /// Sorted, deduplicated finite endpoint values.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .bars
            .iter()
            .flat_map(|b| [b.left.value(), b.right.value()])
            .flatten()
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Microsupport sign flags collected over all bars.
    pub fn profile(&self) -> MicrosupportProfile1D {
        let mut entries: Vec<ProfileEntry> = Vec::new();
        for bar in &self.bars {
            for (point, plus, minus) in bar.endpoint_flags() {
                match entries.iter_mut().find(|e| e.point == point) {
                    Some(e) => {
                        e.plus |= plus;
                        e.minus |= minus;
                    }
                    None => entries.push(ProfileEntry { point, plus, minus }),
                }
            }
        }
        MicrosupportProfile1D::new(entries)
    }

    /// Restriction to the open subinterval `(lo, hi)`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Barcode, BarcodeError> {
        let lo = lo.max(self.ambient.0);
        let hi = hi.min(self.ambient.1);
        if lo >= hi {
            return Err(BarcodeError::InvalidAmbient);
        }
        let mut bars = Vec::new();
        for bar in &self.bars {
            let left = match bar.left {
                Endpoint::Finite { value, .. } if value > lo => bar.left,
                _ => Endpoint::NegInfinity,
            };
            let right = match bar.right {
                Endpoint::Finite { value, .. } if value < hi => bar.right,
                _ => Endpoint::PosInfinity,
            };
            // drop bars that miss (lo, hi) entirely
            let misses = match bar.right {
                Endpoint::Finite { value, .. } => value <= lo,
                _ => false,
            } || match bar.left {
                Endpoint::Finite { value, .. } => value >= hi,
                _ => false,
            };
            if misses {
                continue;
            }
            bars.push(Bar::new(left, right, bar.degree)?);
        }
        Barcode::new((lo, hi), bars, self.field)
    }

    fn check_plus_class(&self) -> Result<(), BarcodeError> {
        match self.bars.iter().find(|b| !b.is_plus()) {
            Some(b) => Err(BarcodeError::MixedDirectionBar(b.describe())),
            None => Ok(()),
        }
    }
}

/// One flagged point of a microsupport profile on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry {
    pub point: f64,
    pub plus: bool,
    pub minus: bool,
}

/// Nonzero codirections of a sheaf on the line, point by point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MicrosupportProfile1D {
    entries: Vec<ProfileEntry>,
}

impl MicrosupportProfile1D {
    /// Drops entries with no flag and sorts by point.
    pub fn new(entries: Vec<ProfileEntry>) -> Self {
        let mut entries: Vec<ProfileEntry> =
            entries.into_iter().filter(|e| e.plus || e.minus).collect();
        entries.sort_by(|a, b| a.point.total_cmp(&b.point));
        MicrosupportProfile1D { entries }
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_minus(&self) -> bool {
        self.entries.iter().any(|e| e.minus)
    }

    pub fn has_plus(&self) -> bool {
        self.entries.iter().any(|e| e.plus)
    }

    /// Flagged points in increasing order.
    pub fn points(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.point).collect()
    }
}

/// Finite ends of bars that reach exactly one end of the ambient interval.
pub fn s_infty(bc: &Barcode) -> Result<Vec<f64>, BarcodeError> {
    bc.check_plus_class()?;
    let mut pts: Vec<f64> = bc
        .bars
        .iter()
        .filter(|b| !b.is_full() && !b.is_bounded())
        .filter_map(|b| b.left.value().or(b.right.value()))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

/// Bars with both ends finite, as `(left, right, degree)` with multiplicity.
pub fn bounded_bars(bc: &Barcode) -> Result<Vec<(f64, f64, i32)>, BarcodeError> {
    bc.check_plus_class()?;
    Ok(bc
        .bars
        .iter()
        .filter(|b| b.is_bounded())
        .map(|b| (b.left.value().unwrap(), b.right.value().unwrap(), b.degree))
        .collect())
}
