//! Smooth curves with ordered marked points `p_1 = inf, p_2, ..., p_n`.
//!
//! Isomorphisms and automorphisms are the unit scalings
//! `t . (a, b, x_i, y_i) = (t^-4 a, t^-6 b, t^-2 x_i, t^-3 y_i)`.
//! Positions in errors and in [`MarkedCurve::forget`] are 1-based, matching
//! the `p_i` naming.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::curve::{Curve, CurveError, CurvePoint};
use crate::field::{Field, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkedError {
    #[error("curve is not smooth")]
    CurveNotSmooth,
    #[error("marked point p_{0} is not on the curve")]
    PointNotOnCurve(usize),
    #[error("marked points p_{0} and p_{1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("first marked point must be the point at infinity")]
    BasePointNotInfinity,
    #[error("operation needs at least {needed} marked points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("marked curve is not in U'_n")]
    NotInUPrime,
    #[error("marked curve is not in V'_n")]
    NotInVPrime,
    #[error("the base point p_1 cannot be forgotten")]
    CannotForgetBasePoint,
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("scalar does not fix the curve")]
    NotAnAutomorphism,
    #[error("operands come from different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<CurveError> for MarkedError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::CurveNotSmooth => MarkedError::CurveNotSmooth,
            CurveError::FieldMismatch => MarkedError::FieldMismatch,
            CurveError::Field(f) => MarkedError::Field(f),
            CurveError::ZeroScalar => MarkedError::NotAnAutomorphism,
            CurveError::PointNotOnCurve => MarkedError::PointNotOnCurve(0),
        }
    }
}

impl MarkedError {
    /// Stable error name used in machine-readable diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            MarkedError::CurveNotSmooth => "CurveNotSmooth",
            MarkedError::PointNotOnCurve(_) => "PointNotOnCurve",
            MarkedError::DuplicatePoints(..) => "DuplicatePoints",
            MarkedError::BasePointNotInfinity => "BasePointNotInfinity",
            MarkedError::TooFewPoints { .. } => "TooFewPoints",
            MarkedError::NotInUPrime => "NotInUPrime",
            MarkedError::NotInVPrime => "NotInVPrime",
            MarkedError::CannotForgetBasePoint => "CannotForgetBasePoint",
            MarkedError::IndexOutOfRange(_) => "IndexOutOfRange",
            MarkedError::NotAnAutomorphism => "NotAnAutomorphism",
            MarkedError::FieldMismatch => "FieldMismatch",
            MarkedError::Field(_) => "FieldError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedCurve {
    curve: Curve,
    points: Vec<CurvePoint>,
}

/// A cyclic automorphism group `mu_order`, generated by `generator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicAut {
    pub order: u32,
    pub generator: FieldElement,
}

impl MarkedCurve {
    /// Builds `(C_(a,b), inf, affine_points...)`.
    pub fn new(a: FieldElement, b: FieldElement, affine_points: Vec<CurvePoint>) -> Result<MarkedCurve, MarkedError> {
        let curve = Curve::new(a, b)?;
        let mut points = Vec::with_capacity(affine_points.len() + 1);
        points.push(CurvePoint::Infinity);
        points.extend(affine_points);
        MarkedCurve::from_parts(curve, points)
    }

    /// Validates a full point list, which must start with infinity.
    pub fn from_parts(curve: Curve, points: Vec<CurvePoint>) -> Result<MarkedCurve, MarkedError> {
        if !curve.is_smooth() {
            return Err(MarkedError::CurveNotSmooth);
        }
        if points.first() != Some(&CurvePoint::Infinity) {
            return Err(MarkedError::BasePointNotInfinity);
        }
        for (i, p) in points.iter().enumerate() {
            if !curve.contains(p) {
                return Err(MarkedError::PointNotOnCurve(i + 1));
            }
        }
        for j in 1..points.len() {
            if let Some(i) = points[..j].iter().position(|p| *p == points[j]) {
                return Err(MarkedError::DuplicatePoints(i + 1, j + 1));
            }
        }
        Ok(MarkedCurve { curve, points })
    }

    pub(crate) fn from_parts_unchecked(curve: Curve, points: Vec<CurvePoint>) -> MarkedCurve {
        debug_assert!(MarkedCurve::from_parts(curve.clone(), points.clone()).is_ok());
        MarkedCurve { curve, points }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// `p_i` for `1 <= i <= n`.
    pub fn point(&self, i: usize) -> &CurvePoint {
        &self.points[i - 1]
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn field(&self) -> Field {
        self.curve.field()
    }

    fn require(&self, needed: usize) -> Result<(), MarkedError> {
        if self.n() < needed {
            Err(MarkedError::TooFewPoints { needed, got: self.n() })
        } else {
            Ok(())
        }
    }

    fn is_fixed_by_inverse(&self, inv: &FieldElement) -> bool {
        self.curve.scale_by_inverse(inv) == self.curve && self.points.iter().all(|p| p.scale_by_inverse(inv) == *p)
    }

    /// The unit `t` acting on the whole marked curve.
    pub fn scale(&self, t: &FieldElement) -> Result<MarkedCurve, MarkedError> {
        let inv = t.inv().ok_or(MarkedError::NotAnAutomorphism)?;
        Ok(MarkedCurve {
            curve: self.curve.scale_by_inverse(&inv),
            points: self.points.iter().map(|p| p.scale_by_inverse(&inv)).collect(),
        })
    }

    /// Stabilizer of the marked curve in the unit group. Over `F_p` every
    /// unit is tried; over `Q` only `+1` and `-1` can occur.
    pub fn automorphisms(&self) -> CyclicAut {
        let field = self.field();
        let candidates = match field {
            Field::Prime(_) => field.units().expect("finite field"),
            Field::Rationals => vec![field.one(), field.from_i64(-1)],
        };
        let stabilizer: Vec<FieldElement> = candidates
            .into_iter()
            .filter(|t| self.is_fixed_by_inverse(&t.inv().expect("unit")))
            .collect();
        let order = stabilizer.len() as u32;
        let generator = stabilizer
            .into_iter()
            .find(|t| t.multiplicative_order() == Some(order as u64))
            .expect("stabilizer of a smooth marked curve is cyclic");
        CyclicAut { order, generator }
    }

    /// Some `t` with `t . self == other`, points matched in order.
    pub fn isomorphism_to(&self, other: &MarkedCurve) -> Option<FieldElement> {
        if self.field() != other.field() || self.n() != other.n() {
            return None;
        }
        let field = self.field();
        let candidates = match field {
            Field::Prime(_) => field.units().expect("finite field"),
            Field::Rationals => rational_scaling_candidates(&self.curve, &other.curve),
        };
        candidates
            .into_iter()
            .find(|t| self.scale(t).map(|m| m == *other).unwrap_or(false))
    }

    /// Whether the two marked curves become isomorphic over an algebraic
    /// closure of the base field.
    ///
    /// An isomorphism is a `t` solving `t^k = c` for each nonzero coordinate
    /// pair, with exponents `k` in `{4, 6, 2, 3}`. The closure's unit group is
    /// divisible, so the system is solvable iff with `g = gcd(k)` and
    /// `s = prod c^u` (where `sum u k = g`) every `c` equals `s^(k/g)`.
    pub fn is_geometrically_isomorphic(&self, other: &MarkedCurve) -> bool {
        if self.field() != other.field() || self.n() != other.n() {
            return false;
        }
        let mut system: Vec<(i64, FieldElement)> = Vec::new();
        let mut push = |k: i64, ours: &FieldElement, theirs: &FieldElement| -> bool {
            match (ours.is_zero(), theirs.is_zero()) {
                (true, true) => true,
                (false, false) => {
                    system.push((k, ours * &theirs.inv().expect("nonzero")));
                    true
                }
                _ => false,
            }
        };
        if !push(4, self.curve.a(), other.curve.a()) || !push(6, self.curve.b(), other.curve.b()) {
            return false;
        }
        for (p, q) in self.points.iter().zip(&other.points) {
            match (p, q) {
                (CurvePoint::Infinity, CurvePoint::Infinity) => {}
                (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                    if !push(2, x1, x2) || !push(3, y1, y2) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        power_system_solvable_in_closure(&system)
    }

    /// Order of the automorphism group over an algebraic closure: the gcd of
    /// the weights of the nonzero coordinates.
    pub fn geometric_automorphism_order(&self) -> u32 {
        let mut g = 0i64;
        if !self.curve.a().is_zero() {
            g = g.gcd(&4);
        }
        if !self.curve.b().is_zero() {
            g = g.gcd(&6);
        }
        for p in &self.points[1..] {
            if !p.x().expect("affine").is_zero() {
                g = g.gcd(&2);
            }
            if !p.y().expect("affine").is_zero() {
                g = g.gcd(&3);
            }
        }
        g as u32
    }

    /// `U_n`: `n = 2`, or `p_2 != iota(p_3)`.
    pub fn in_u(&self) -> Result<bool, MarkedError> {
        self.require(2)?;
        Ok(self.n() == 2 || *self.point(2) != self.point(3).involution())
    }

    /// `U'_n`: `p_2 != iota(p_i)` for every `i`, including `i = 2`.
    pub fn in_u_prime(&self) -> Result<bool, MarkedError> {
        self.require(2)?;
        let p2 = self.point(2);
        Ok(self.points.iter().all(|p| *p2 != p.involution()))
    }

    fn sum23(&self) -> CurvePoint {
        self.curve
            .add(self.point(2), self.point(3))
            .expect("marked points lie on a smooth curve")
    }

    /// `V_n`: `p_2 + p_3 != iota(p_4)`.
    pub fn in_v(&self) -> Result<bool, MarkedError> {
        self.require(4)?;
        Ok(self.sum23() != self.point(4).involution())
    }

    /// `V'_n`: `p_2 + p_3 != iota(p_i)` for every `i`.
    pub fn in_v_prime(&self) -> Result<bool, MarkedError> {
        self.require(3)?;
        let s = self.sum23();
        Ok(self.points.iter().all(|p| s != p.involution()))
    }

    /// Inserts `iota(p_2)` at position 3.
    pub fn sigma(&self) -> Result<MarkedCurve, MarkedError> {
        if !self.in_u_prime()? {
            return Err(MarkedError::NotInUPrime);
        }
        let mut points = self.points.clone();
        points.insert(2, self.point(2).involution());
        Ok(MarkedCurve::from_parts_unchecked(self.curve.clone(), points))
    }

    /// Inserts `iota(p_2 + p_3)` at position 4.
    pub fn tau(&self) -> Result<MarkedCurve, MarkedError> {
        if !self.in_v_prime()? {
            return Err(MarkedError::NotInVPrime);
        }
        let mut points = self.points.clone();
        points.insert(3, self.sum23().involution());
        Ok(MarkedCurve::from_parts_unchecked(self.curve.clone(), points))
    }

    /// Drops `p_i`.
    pub fn forget(&self, i: usize) -> Result<MarkedCurve, MarkedError> {
        if i == 1 {
            return Err(MarkedError::CannotForgetBasePoint);
        }
        if i == 0 || i > self.n() {
            return Err(MarkedError::IndexOutOfRange(i));
        }
        let mut points = self.points.clone();
        points.remove(i - 1);
        Ok(MarkedCurve {
            curve: self.curve.clone(),
            points,
        })
    }
}

impl fmt::Display for MarkedCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.curve)?;
        for p in &self.points {
            write!(f, ", {p}")?;
        }
        write!(f, ")")
    }
}

/// Points of `curve` fixed by the automorphism `t`; always includes infinity.
pub fn fixed_points(curve: &Curve, t: &FieldElement) -> Result<Vec<CurvePoint>, MarkedError> {
    if t.field() != curve.field() {
        return Err(MarkedError::FieldMismatch);
    }
    if curve.scale(t)? != *curve {
        return Err(MarkedError::NotAnAutomorphism);
    }
    let inv = t.inv().expect("unit");
    Ok(curve
        .points()?
        .into_iter()
        .filter(|p| p.scale_by_inverse(&inv) == *p)
        .collect())
}

/// Candidate `t` over `Q` with `t . c1 == c2` on the curve part, from
/// `t^4 = a1/a2` and `t^6 = b1/b2`.
fn rational_scaling_candidates(c1: &Curve, c2: &Curve) -> Vec<FieldElement> {
    use crate::field::rational_nth_root;
    let ratio = |x: &FieldElement, y: &FieldElement| match (x, y) {
        (FieldElement::Rational(x), FieldElement::Rational(y)) => x / y,
        _ => unreachable!("rational curve"),
    };
    let mut roots = Vec::new();
    for (ours, theirs, k) in [(c1.a(), c2.a(), 4u32), (c1.b(), c2.b(), 6u32)] {
        if ours.is_zero() != theirs.is_zero() {
            return Vec::new();
        }
        if !ours.is_zero() {
            match rational_nth_root(&ratio(ours, theirs), k) {
                Some(r) => roots.push(r),
                None => return Vec::new(),
            }
        }
    }
    let mut out: Vec<FieldElement> = roots
        .into_iter()
        .flat_map(|r| [FieldElement::Rational(r.clone()), FieldElement::Rational(-r)])
        .collect();
    out.sort();
    out.dedup();
    out
}

fn power_system_solvable_in_closure(system: &[(i64, FieldElement)]) -> bool {
    let Some((k0, c0)) = system.first() else {
        return true;
    };
    let mut g = *k0;
    let mut s = c0.clone();
    for (k, c) in &system[1..] {
        let e = g.extended_gcd(k);
        s = &s.pow(e.x) * &c.pow(e.y);
        g = e.gcd;
    }
    system.iter().all(|(k, c)| s.pow(k / g) == *c)
}
