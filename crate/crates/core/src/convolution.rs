//! Cut-off functors on barcodes of the line and on indicators of convex
//! polyhedra.
//!
//! On the line the functors act bar by bar. The tables below were computed
//! with the cellular oracle of the `rigidity-oracle` crate; the integration
//! tests re-check them on random endpoints.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::barcode::{Bar, BarShape, Barcode, BarcodeError, Endpoint};
use crate::cones::{ConesError, PolyhedralCone, POLY_TOL};
use crate::math;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvolutionError {
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
    #[error(transparent)]
    Cones(#[from] ConesError),
    #[error("dimension mismatch: polyhedron in R^{polyhedron}, cone in R^{cone}")]
    DimensionMismatch { polyhedron: usize, cone: usize },
    #[error("empty polyhedron")]
    EmptyPolyhedron,
    #[error("malformed polyhedron: {0}")]
    Malformed(String),
}

/// A closed half-line cone in `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfLineCone1D {
    /// `(-inf, 0]`; the antipodal polar is `{sigma >= 0}`.
    Left,
    /// `[0, +inf)`; the antipodal polar is `{sigma <= 0}`.
    Right,
}

impl HalfLineCone1D {
    /// Polar under the Euclidean identification; each half-line is self-polar.
    pub fn polar(self) -> Self {
        self
    }

    pub fn antipode(self) -> Self {
        match self {
            HalfLineCone1D::Left => HalfLineCone1D::Right,
            HalfLineCone1D::Right => HalfLineCone1D::Left,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            HalfLineCone1D::Left => x <= 0.0,
            HalfLineCone1D::Right => x >= 0.0,
        }
    }
}

/// Output bar as `(left, right, degree shift)`.
type Piece = (Endpoint, Endpoint, i32);

fn cl(v: f64) -> Endpoint {
    Endpoint::closed(v)
}

fn op(v: f64) -> Endpoint {
    Endpoint::open(v)
}

const NEG: Endpoint = Endpoint::NegInfinity;
const POS: Endpoint = Endpoint::PosInfinity;

/// Which of the four outputs a table lookup produces.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Output {
    P,
    Q,
    ConeU,
    ConeV,
}

/// Output for one bar and `gamma = (-inf, 0]`; shifts add to the bar degree.
fn left_table(bar: &Bar, out: Output) -> Option<Piece> {
    use BarShape::*;
    use Output::*;
    let a = bar.left().value().unwrap_or(0.0);
    let b = bar.right().value().unwrap_or(0.0);
    let same = Some((bar.left(), bar.right(), 0));
    match (bar.shape(), out) {
        (ClosedOpen | ClosedRay | RayOpen | Full, P | Q) => same,
        (ClosedOpen | ClosedRay | RayOpen | Full, ConeU | ConeV) => None,

        (Closed, P) => Some((cl(a), POS, 0)),
        (Closed, Q) => Some((NEG, op(a), 1)),
        (Closed, ConeU) => Some((op(b), POS, 1)),
        (Closed, ConeV) => Some((NEG, cl(b), 1)),

        (Open, P) => Some((cl(b), POS, -1)),
        (Open, Q) => Some((NEG, op(b), 0)),
        (Open, ConeU) => Some((op(a), POS, 0)),
        (Open, ConeV) => Some((NEG, cl(a), 0)),

        (OpenClosed, P | Q) => None,
        (OpenClosed, ConeU) => Some((op(a), cl(b), 0)),
        (OpenClosed, ConeV) => Some((op(a), cl(b), 1)),

        (Point, P) => Some((cl(a), POS, 0)),
        (Point, Q) => Some((NEG, op(a), 1)),
        (Point, ConeU) => Some((op(a), POS, 1)),
        (Point, ConeV) => Some((NEG, cl(a), 1)),

        (OpenRay, P) => None,
        (OpenRay, Q) => Some((NEG, POS, 0)),
        (OpenRay, ConeU) => Some((op(a), POS, 0)),
        (OpenRay, ConeV) => Some((NEG, cl(a), 0)),

        (RayClosed, P) => Some((NEG, POS, 0)),
        (RayClosed, Q) => None,
        (RayClosed, ConeU) => Some((op(b), POS, 1)),
        (RayClosed, ConeV) => Some((NEG, cl(b), 1)),
    }
}

fn apply(bc: &Barcode, gamma: HalfLineCone1D, out: Output) -> Result<Barcode, ConvolutionError> {
    let mut bars = Vec::with_capacity(bc.len());
    for bar in bc.bars() {
        let (src, mirror) = match gamma {
            HalfLineCone1D::Left => (*bar, false),
            HalfLineCone1D::Right => (bar.mirrored(), true),
        };
        if let Some((l, r, shift)) = left_table(&src, out) {
            let mut b = Bar::new(l, r, src.degree() + shift)?;
            if mirror {
                b = b.mirrored();
            }
            bars.push(b);
        }
    }
    Ok(bc.with_bars(bars)?)
}

/// The projector whose output has microsupport on the antipodal polar side.
pub fn p_cutoff_bar(bc: &Barcode, gamma: HalfLineCone1D) -> Result<Barcode, ConvolutionError> {
    apply(bc, gamma, Output::P)
}

/// The co-projector, right adjoint counterpart of [`p_cutoff_bar`].
pub fn q_cutoff_bar(bc: &Barcode, gamma: HalfLineCone1D) -> Result<Barcode, ConvolutionError> {
    apply(bc, gamma, Output::Q)
}

/// Cone of the counit `P(F) -> F`.
pub fn cone_u_bar(bc: &Barcode, gamma: HalfLineCone1D) -> Result<Barcode, ConvolutionError> {
    apply(bc, gamma, Output::ConeU)
}

/// Cone of the unit `F -> Q(F)`.
pub fn cone_v_bar(bc: &Barcode, gamma: HalfLineCone1D) -> Result<Barcode, ConvolutionError> {
    apply(bc, gamma, Output::ConeV)
}

/// The indicator sheaf of `{x : A x <= b}`, placed in a given degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexIndicator {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    degree: i32,
}

impl ConvexIndicator {
    /// Rejects ragged rows and empty polyhedra.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, degree: i32) -> Result<Self, ConvolutionError> {
        if a.len() != b.len() {
            return Err(ConvolutionError::Malformed(format!(
                "{} rows but {} offsets",
                a.len(),
                b.len()
            )));
        }
        let dim = a.first().map(|r| r.len()).unwrap_or(0);
        if dim == 0 || a.iter().any(|r| r.len() != dim) {
            return Err(ConvolutionError::Malformed("rows must share a positive length".into()));
        }
        let out = Self { a, b, degree };
        if out.homogenized()?.generators().iter().all(|g| g[dim] <= POLY_TOL) {
            return Err(ConvolutionError::EmptyPolyhedron);
        }
        Ok(out)
    }

    /// The box `prod [lo_i, hi_i]`.
    pub fn from_box(lo: &[f64], hi: &[f64], degree: i32) -> Result<Self, ConvolutionError> {
        let n = lo.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            a.push(e.clone());
            b.push(hi[i]);
            e[i] = -1.0;
            a.push(e);
            b.push(-lo[i]);
        }
        Self::new(a, b, degree)
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(r, &b)| math::dot(r, x) <= b + 1e-9 * (1.0 + b.abs()))
    }

    /// Irredundant facets as `(unit outward normal, offset)`.
    pub fn facets(&self) -> Result<Vec<(Vec<f64>, f64)>, ConvolutionError> {
        let h = self.homogenized()?;
        Ok(dehomogenize(&PolyhedralCone::from_generators(
            self.dim() + 1,
            h.generators(),
        )?))
    }

    /// `{(x, t) : a . x <= b t, t >= 0}`.
    fn homogenized(&self) -> Result<PolyhedralCone, ConvolutionError> {
        let n = self.dim();
        let mut rows: Vec<Vec<f64>> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(r, &b)| {
                let mut v = r.clone();
                v.push(-b);
                v
            })
            .collect();
        let mut t = vec![0.0; n + 1];
        t[n] = -1.0;
        rows.push(t);
        Ok(PolyhedralCone::from_normals(n + 1, &rows)?)
    }
}

fn dehomogenize(cone: &PolyhedralCone) -> Vec<(Vec<f64>, f64)> {
    let n = cone.dim() - 1;
    let mut out = Vec::new();
    for nrm in cone.normals() {
        let a = &nrm[..n];
        let s = math::norm(a);
        if s <= POLY_TOL {
            continue;
        }
        out.push((a.iter().map(|v| v / s).collect(), -nrm[n] / s));
    }
    out
}

/// `B + gamma^a`, the support of the projector applied to `k_B`.
pub fn cutoff_convex(
    b: &ConvexIndicator,
    gamma: &PolyhedralCone,
) -> Result<ConvexIndicator, ConvolutionError> {
    let n = b.dim();
    if gamma.dim() != n {
        return Err(ConvolutionError::DimensionMismatch {
            polyhedron: n,
            cone: gamma.dim(),
        });
    }
    let mut gens: Vec<Vec<f64>> = b.homogenized()?.generators().to_vec();
    for g in gamma.generators() {
        let mut v: Vec<f64> = g.iter().map(|x| -x).collect();
        v.push(0.0);
        gens.push(v);
    }
    let sum = PolyhedralCone::from_generators(n + 1, &gens)?;
    let facets = dehomogenize(&sum);
    let (a, off): (Vec<Vec<f64>>, Vec<f64>) = facets.into_iter().unzip();
    if a.is_empty() {
        // the whole space
        return ConvexIndicator::new(vec![vec![0.0; n]], vec![1.0], b.degree());
    }
    ConvexIndicator::new(a, off, b.degree())
}

/// Input to [`cutoff_cone_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum CutoffTarget {
    Bars(Barcode, HalfLineCone1D),
    Convex(ConvexIndicator, PolyhedralCone),
}

/// Outcome of [`cutoff_cone_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffReport {
    /// Microsupport of the outputs lies over the antipodal polar cone.
    pub output_in_polar: bool,
    /// The cones of the comparison maps avoid the interior of that cone.
    pub cone_off_interior: bool,
    /// Offending items, for diagnostics.
    pub violations: Vec<String>,
}

impl CutoffReport {
    pub fn passed(&self) -> bool {
        self.output_in_polar && self.cone_off_interior
    }
}

/// Checks the microsupport bound of the outputs and that the comparison maps
/// are isomorphisms over the interior of the antipodal polar cone.
pub fn cutoff_cone_check(target: &CutoffTarget) -> Result<CutoffReport, ConvolutionError> {
    match target {
        CutoffTarget::Bars(bc, gamma) => check_bars(bc, *gamma),
        CutoffTarget::Convex(b, gamma) => check_convex(b, gamma),
    }
}

fn check_bars(bc: &Barcode, gamma: HalfLineCone1D) -> Result<CutoffReport, ConvolutionError> {
    // wrong side: codirections outside the antipodal polar; interior side: inside it
    let wrong = |e: &crate::barcode::ProfileEntry| match gamma {
        HalfLineCone1D::Left => e.minus,
        HalfLineCone1D::Right => e.plus,
    };
    let interior = |e: &crate::barcode::ProfileEntry| match gamma {
        HalfLineCone1D::Left => e.plus,
        HalfLineCone1D::Right => e.minus,
    };
    let mut violations = Vec::new();
    let mut output_in_polar = true;
    for (name, out) in [
        ("P", p_cutoff_bar(bc, gamma)?),
        ("Q", q_cutoff_bar(bc, gamma)?),
    ] {
        for e in out.profile().entries() {
            if wrong(e) {
                output_in_polar = false;
                violations.push(format!("{name} output has a wrong-side codirection at {}", e.point));
            }
        }
    }
    let mut cone_off_interior = true;
    for (name, out) in [
        ("cone(u)", cone_u_bar(bc, gamma)?),
        ("cone(v)", cone_v_bar(bc, gamma)?),
    ] {
        for e in out.profile().entries() {
            if interior(e) {
                cone_off_interior = false;
                violations.push(format!("{name} meets the interior at {}", e.point));
            }
        }
    }
    Ok(CutoffReport {
        output_in_polar,
        cone_off_interior,
        violations,
    })
}

fn check_convex(
    b: &ConvexIndicator,
    gamma: &PolyhedralCone,
) -> Result<CutoffReport, ConvolutionError> {
    let out = cutoff_convex(b, gamma)?;
    let mut violations = Vec::new();
    // inward normal -a in the antipodal polar  <=>  a . g >= 0 on generators
    let mut output_in_polar = true;
    for (a, off) in out.facets()? {
        if gamma.generators().iter().any(|g| math::dot(&a, g) < -POLY_TOL) {
            output_in_polar = false;
            violations.push(format!("output facet {a:?} <= {off} points outside"));
        }
    }
    // facets of B facing the open polar side must survive unchanged
    let mut cone_off_interior = true;
    let kept = out.facets()?;
    for (a, off) in b.facets()? {
        let strictly = gamma.interior_nonempty()
            && gamma.generators().iter().all(|g| math::dot(&a, g) > POLY_TOL);
        if !strictly {
            continue;
        }
        let found = kept.iter().any(|(k, ko)| {
            k.iter().zip(&a).all(|(x, y)| math::abs(x - y) <= 1e-7)
                && math::abs(ko - off) <= 1e-7 * (1.0 + off.abs())
        });
        if !found {
            cone_off_interior = false;
            violations.push(format!("facet {a:?} <= {off} lost"));
        }
    }
    Ok(CutoffReport {
        output_in_polar,
        cone_off_interior,
        violations,
    })
}

/// Plus, minus and constant sub-multisets of a barcode.
pub fn split_by_direction(
    bc: &Barcode,
) -> Result<(Barcode, Barcode, Barcode), ConvolutionError> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut constant = Vec::new();
    for bar in bc.bars() {
        if bar.is_full() {
            constant.push(*bar);
        } else if bar.is_mixed() {
            return Err(BarcodeError::MixedDirectionBar(bar.describe()).into());
        } else if bar.is_plus() {
            plus.push(*bar);
        } else {
            minus.push(*bar);
        }
    }
    Ok((bc.with_bars(plus)?, bc.with_bars(minus)?, bc.with_bars(constant)?))
}

/// Shortest mixed bar, or infinity when there is none.
pub fn min_mixed_bar_length(bc: &Barcode) -> f64 {
    bc.bars()
        .iter()
        .filter(|b| b.is_mixed())
        .map(|b| b.right().value().unwrap_or(f64::INFINITY) - b.left().value().unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(bars: Vec<Bar>) -> Barcode {
        Barcode::on_line(bars).unwrap()
    }

    fn bar(l: Endpoint, r: Endpoint, d: i32) -> Bar {
        Bar::new(l, r, d).unwrap()
    }

    #[test]
    fn spec_examples() {
        let f = bc(vec![Bar::closed_open(0.0, 1.0, 0).unwrap()]);
        assert_eq!(p_cutoff_bar(&f, HalfLineCone1D::Left).unwrap(), f);
        assert_eq!(q_cutoff_bar(&f, HalfLineCone1D::Left).unwrap(), f);
        let g = bc(vec![bar(op(0.0), cl(1.0), 0)]);
        assert!(p_cutoff_bar(&g, HalfLineCone1D::Left).unwrap().is_empty());
        let full = bc(vec![Bar::full(0)]);
        assert_eq!(q_cutoff_bar(&full, HalfLineCone1D::Right).unwrap(), full);
        let e = bc(vec![]);
        assert!(p_cutoff_bar(&e, HalfLineCone1D::Left).unwrap().is_empty());
    }

    #[test]
    fn open_bar_moves_to_right_end() {
        let f = bc(vec![bar(op(0.0), op(1.0), 0)]);
        let p = p_cutoff_bar(&f, HalfLineCone1D::Left).unwrap();
        assert_eq!(p.bars(), &[bar(cl(1.0), POS, -1)]);
        let p = p_cutoff_bar(&f, HalfLineCone1D::Right).unwrap();
        assert_eq!(p.bars(), &[bar(NEG, cl(0.0), -1)]);
    }

    #[test]
    fn cone_checks_on_bars() {
        for shape in [
            bar(cl(0.0), cl(1.0), 0),
            bar(op(0.0), op(1.0), 2),
            bar(op(0.0), cl(1.0), 0),
            bar(cl(0.5), cl(0.5), 0),
            bar(NEG, cl(1.0), 0),
            bar(op(0.0), POS, 0),
        ] {
            for g in [HalfLineCone1D::Left, HalfLineCone1D::Right] {
                let r = cutoff_cone_check(&CutoffTarget::Bars(bc(vec![shape]), g)).unwrap();
                assert!(r.passed(), "{} {:?}: {:?}", shape.describe(), g, r.violations);
            }
        }
    }

    #[test]
    fn minkowski_with_quadrant() {
        let sq = ConvexIndicator::from_box(&[0.0, 0.0], &[1.0, 1.0], 0).unwrap();
        let down = PolyhedralCone::from_generators(2, &[vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let out = cutoff_convex(&sq, &down).unwrap();
        assert_eq!(out.facets().unwrap().len(), 2);
        assert!(out.contains(&[5.0, 7.0]));
        assert!(!out.contains(&[-0.1, 7.0]));
        let r = cutoff_cone_check(&CutoffTarget::Convex(sq, down)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn minkowski_of_point_is_antipode() {
        let pt = ConvexIndicator::from_box(&[0.0, 0.0], &[0.0, 0.0], 0).unwrap();
        let g = PolyhedralCone::from_generators(2, &[vec![1.0, -2.0], vec![-1.0, -2.0]]).unwrap();
        let out = cutoff_convex(&pt, &g).unwrap();
        assert!(out.contains(&[0.0, 1.0]));
        assert!(out.contains(&[0.5, 1.0]));
        assert!(!out.contains(&[0.0, -1.0]));
        assert!(!out.contains(&[0.6, 1.0]));
    }

    #[test]
    fn segment_matches_bar_table() {
        let seg = ConvexIndicator::from_box(&[0.0], &[1.0], 0).unwrap();
        let left = PolyhedralCone::from_generators(1, &[vec![-1.0]]).unwrap();
        let out = cutoff_convex(&seg, &left).unwrap();
        assert!(out.contains(&[0.0]) && out.contains(&[100.0]) && !out.contains(&[-0.01]));
    }

    #[test]
    fn splitting() {
        let f = bc(vec![
            Bar::closed_open(0.0, 1.0, 0).unwrap(),
            bar(op(2.0), cl(3.0), 1),
            Bar::full(0),
        ]);
        let (p, m, c) = split_by_direction(&f).unwrap();
        assert_eq!((p.len(), m.len(), c.len()), (1, 1, 1));
        let g = bc(vec![bar(cl(0.0), cl(1.0), 0)]);
        assert!(matches!(
            split_by_direction(&g),
            Err(ConvolutionError::Barcode(BarcodeError::MixedDirectionBar(_)))
        ));
        let h = bc(vec![bar(cl(0.0), cl(1.0), 0), bar(op(0.0), op(0.2), 0)]);
        assert!((min_mixed_bar_length(&h) - 0.2).abs() < 1e-15);
        assert_eq!(min_mixed_bar_length(&f), f64::INFINITY);
    }
}
