//! Short Weierstrass curves `y^2 z = x^3 + a x z^2 + b z^3` with base point
//! `[0:1:0]`.
//!
//! The unit group acts on curves and points by
//! `t . (a, b) = (t^-4 a, t^-6 b)` and `t . (x, y) = (t^-2 x, t^-3 y)`.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("curve is not smooth")]
    CurveNotSmooth,
    #[error("scaling factor must be a unit")]
    ZeroScalar,
    #[error("operands come from different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveClass {
    Smooth,
    Nodal,
    Cuspidal,
}

impl CurveClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveClass::Smooth => "smooth",
            CurveClass::Nodal => "nodal",
            CurveClass::Cuspidal => "cuspidal",
        }
    }
}

/// `4a^3 + 27b^2`.
pub fn discriminant(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let f = a.field();
    let a3 = a.pow(3);
    let b2 = b.pow(2);
    &(&f.from_i64(4) * &a3) + &(&f.from_i64(27) * &b2)
}

/// Smooth iff the discriminant is nonzero; cuspidal iff `(a, b) = (0, 0)`;
/// nodal otherwise.
pub fn classify(a: &FieldElement, b: &FieldElement) -> CurveClass {
    if a.is_zero() && b.is_zero() {
        CurveClass::Cuspidal
    } else if discriminant(a, b).is_zero() {
        CurveClass::Nodal
    } else {
        CurveClass::Smooth
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Curve {
    a: FieldElement,
    b: FieldElement,
    disc: FieldElement,
}

/// A point in normalized projective coordinates: either `[0:1:0]` or `[x:y:1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl CurvePoint {
    pub fn affine(x: FieldElement, y: FieldElement) -> CurvePoint {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&FieldElement> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&FieldElement> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Infinity => None,
        }
    }

    /// `(x, y) -> (x, -y)`, fixing infinity.
    pub fn involution(&self) -> CurvePoint {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y },
        }
    }

    /// `(x, y) -> (t^-2 x, t^-3 y)`.
    pub fn scale(&self, t: &FieldElement) -> Result<CurvePoint, CurveError> {
        let inv = t.inv().ok_or(CurveError::ZeroScalar)?;
        Ok(self.scale_by_inverse(&inv))
    }

    pub(crate) fn scale_by_inverse(&self, inv: &FieldElement) -> CurvePoint {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let inv2 = inv * inv;
                let inv3 = &inv2 * inv;
                CurvePoint::Affine {
                    x: &inv2 * x,
                    y: &inv3 * y,
                }
            }
        }
    }

    /// Homogeneous coordinates `[x, y, z]`.
    pub fn homogeneous(&self, field: Field) -> [FieldElement; 3] {
        match self {
            CurvePoint::Infinity => [field.zero(), field.one(), field.zero()],
            CurvePoint::Affine { x, y } => [x.clone(), y.clone(), field.one()],
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "inf"),
            CurvePoint::Affine { x, y } => write!(f, "{x},{y}"),
        }
    }
}

impl Curve {
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Curve, CurveError> {
        if a.field() != b.field() {
            return Err(CurveError::FieldMismatch);
        }
        let disc = discriminant(&a, &b);
        Ok(Curve { a, b, disc })
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn discriminant(&self) -> &FieldElement {
        &self.disc
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn class(&self) -> CurveClass {
        classify(&self.a, &self.b)
    }

    pub fn is_smooth(&self) -> bool {
        !self.disc.is_zero()
    }

    /// `x^3 + a x + b`.
    pub fn rhs(&self, x: &FieldElement) -> FieldElement {
        &(&x.pow(3) + &(&self.a * x)) + &self.b
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                x.field() == self.field() && y.field() == self.field() && y.pow(2) == self.rhs(x)
            }
        }
    }

    fn require_on_curve(&self, points: &[&CurvePoint]) -> Result<(), CurveError> {
        if points.iter().all(|p| self.contains(p)) {
            Ok(())
        } else {
            Err(CurveError::PointNotOnCurve)
        }
    }

    /// Chord-tangent addition with identity at infinity.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint, CurveError> {
        if !self.is_smooth() {
            return Err(CurveError::CurveNotSmooth);
        }
        self.require_on_curve(&[p, q])?;
        let (xp, yp, xq, yq) = match (p, q) {
            (CurvePoint::Infinity, _) => return Ok(q.clone()),
            (_, CurvePoint::Infinity) => return Ok(p.clone()),
            (CurvePoint::Affine { x: xp, y: yp }, CurvePoint::Affine { x: xq, y: yq }) => (xp, yp, xq, yq),
        };
        if *q == p.involution() {
            return Ok(CurvePoint::Infinity);
        }
        let f = self.field();
        let slope = if xp == xq {
            // p == q here, and y_p != 0 because p != -p
            let num = &(&f.from_i64(3) * &xp.pow(2)) + &self.a;
            let den = &f.from_i64(2) * yp;
            &num * &den.inv().expect("tangent slope denominator is nonzero")
        } else {
            &(yq - yp) * &(xq - xp).inv().expect("distinct abscissae")
        };
        let xr = &(&slope.pow(2) - xp) - xq;
        let yr = &(&slope * &(xp - &xr)) - yp;
        Ok(CurvePoint::Affine { x: xr, y: yr })
    }

    /// `k * p` by double-and-add; negative `k` uses the involution.
    pub fn multiply(&self, k: i64, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
        let mut base = if k < 0 { p.involution() } else { p.clone() };
        let mut k = k.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        self.require_on_curve(&[p])?;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            base = self.add(&base, &base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Whether the three points lie on one projective line: the determinant
    /// of their homogeneous coordinates vanishes.
    pub fn is_collinear(&self, p: &CurvePoint, q: &CurvePoint, r: &CurvePoint) -> Result<bool, CurveError> {
        self.require_on_curve(&[p, q, r])?;
        let f = self.field();
        let [a0, a1, a2] = p.homogeneous(f);
        let [b0, b1, b2] = q.homogeneous(f);
        let [c0, c1, c2] = r.homogeneous(f);
        let det = &(&(&a0 * &(&(&b1 * &c2) - &(&b2 * &c1))) - &(&a1 * &(&(&b0 * &c2) - &(&b2 * &c0))))
            + &(&a2 * &(&(&b0 * &c1) - &(&b1 * &c0)));
        Ok(det.is_zero())
    }

    /// `(a, b) -> (t^-4 a, t^-6 b)`.
    pub fn scale(&self, t: &FieldElement) -> Result<Curve, CurveError> {
        if t.field() != self.field() {
            return Err(CurveError::FieldMismatch);
        }
        let inv = t.inv().ok_or(CurveError::ZeroScalar)?;
        Ok(self.scale_by_inverse(&inv))
    }

    pub(crate) fn scale_by_inverse(&self, inv: &FieldElement) -> Curve {
        let inv2 = inv * inv;
        let inv4 = &inv2 * &inv2;
        let inv6 = &inv4 * &inv2;
        let inv12 = &inv6 * &inv6;
        Curve {
            a: &inv4 * &self.a,
            b: &inv6 * &self.b,
            disc: &inv12 * &self.disc,
        }
    }

    /// Every point over `F_p`: infinity first, then affine points sorted
    /// by `(x, y)`.
    pub fn points(&self) -> Result<Vec<CurvePoint>, CurveError> {
        let field = self.field();
        let elements = field.elements()?;
        let mut roots: Vec<Vec<FieldElement>> = vec![Vec::new(); elements.len()];
        for y in &elements {
            if let FieldElement::Mod { value, .. } = y.pow(2) {
                roots[value as usize].push(y.clone());
            }
        }
        let mut out = vec![CurvePoint::Infinity];
        for x in &elements {
            if let FieldElement::Mod { value, .. } = self.rhs(x) {
                for y in &roots[value as usize] {
                    out.push(CurvePoint::affine(x.clone(), y.clone()));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({}, {})", self.a, self.b)
    }
}
