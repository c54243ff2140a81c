//! Exact arithmetic in `PSL(2, Z)` acting on the upper half-plane.
//!
//! Combinatorial questions (type of an element, whether two axes cross) are
//! decided over the integers. Only lengths and distances go through
//! [`rug::Float`] at the precision of a [`PrecisionContext`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// A 2x2 integer matrix of determinant one, kept with its sign.
///
/// Words evaluate to these; the sign of the trace is meaningful for the
/// chosen lift, the element of `PSL(2, Z)` is [`SignedMatrix::to_element`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedMatrix {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
    pub d: Integer,
}

impl SignedMatrix {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>, d: impl Into<Integer>) -> Result<Self> {
        let m = Self::new_unchecked(a.into(), b.into(), c.into(), d.into());
        let det = m.det();
        if det != 1 {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(m)
    }

    fn new_unchecked(a: Integer, b: Integer, c: Integer, d: Integer) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new_unchecked(1.into(), 0.into(), 0.into(), 1.into())
    }

    pub fn det(&self) -> Integer {
        Integer::from(&self.a * &self.d) - Integer::from(&self.b * &self.c)
    }

    pub fn trace(&self) -> Integer {
        Integer::from(&self.a + &self.d)
    }

    pub fn inverse(&self) -> Self {
        Self::new_unchecked(
            self.d.clone(),
            Integer::from(-&self.b),
            Integer::from(-&self.c),
            self.a.clone(),
        )
    }

    pub fn to_element(&self) -> GroupElement {
        GroupElement::normalized(self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone())
    }

    pub fn mul_ref(&self, rhs: &SignedMatrix) -> SignedMatrix {
        let (a, b, c, d) = mat_mul(
            (&self.a, &self.b, &self.c, &self.d),
            (&rhs.a, &rhs.b, &rhs.c, &rhs.d),
        );
        Self::new_unchecked(a, b, c, d)
    }
}

fn mat_mul(
    l: (&Integer, &Integer, &Integer, &Integer),
    r: (&Integer, &Integer, &Integer, &Integer),
) -> (Integer, Integer, Integer, Integer) {
    let a = Integer::from(l.0 * r.0) + Integer::from(l.1 * r.2);
    let b = Integer::from(l.0 * r.1) + Integer::from(l.1 * r.3);
    let c = Integer::from(l.2 * r.0) + Integer::from(l.3 * r.2);
    let d = Integer::from(l.2 * r.1) + Integer::from(l.3 * r.3);
    (a, b, c, d)
}

/// An element of `PSL(2, Z)`.
///
/// Entries are stored with the first nonzero entry (in the order a, b, c, d)
/// positive, so derived equality and hashing are equality in the quotient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    a: Integer,
    b: Integer,
    c: Integer,
    d: Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Identity,
    Parabolic,
    Hyperbolic,
    Elliptic,
}

impl GroupElement {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>, d: impl Into<Integer>) -> Result<Self> {
        let m = SignedMatrix::new(a, b, c, d)?;
        Ok(m.to_element())
    }

    fn normalized(a: Integer, b: Integer, c: Integer, d: Integer) -> Self {
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|e| **e != 0)
            .map(|e| e.cmp0())
            .unwrap_or(Ordering::Greater);
        if lead == Ordering::Less {
            Self { a: -a, b: -b, c: -c, d: -d }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        SignedMatrix::identity().to_element()
    }

    pub fn entries(&self) -> [&Integer; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Trace of the normalized representative; only `|trace|` is intrinsic.
    pub fn trace(&self) -> Integer {
        Integer::from(&self.a + &self.d)
    }

    pub fn abs_trace(&self) -> Integer {
        self.trace().abs()
    }

    pub fn inverse(&self) -> Self {
        Self::normalized(
            self.d.clone(),
            Integer::from(-&self.b),
            Integer::from(-&self.c),
            self.a.clone(),
        )
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }

    pub fn classify(&self) -> ElementKind {
        let t = self.abs_trace();
        match t.cmp(&Integer::from(2)) {
            Ordering::Greater => ElementKind::Hyperbolic,
            Ordering::Less => ElementKind::Elliptic,
            Ordering::Equal => {
                if self.b == 0 && self.c == 0 {
                    ElementKind::Identity
                } else {
                    ElementKind::Parabolic
                }
            }
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.classify() == ElementKind::Hyperbolic
    }

    fn require_hyperbolic(&self) -> Result<()> {
        if self.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::NotHyperbolic(self.abs_trace().to_string()))
        }
    }

    /// `2 arcosh(|tr| / 2)`.
    pub fn translation_length(&self, ctx: &PrecisionContext) -> Result<Float> {
        self.require_hyperbolic()?;
        Ok(length_from_abs_trace(&self.abs_trace(), ctx))
    }

    /// The invariant geodesic, as the quadratic `c z^2 + (d - a) z - b` whose
    /// roots are the fixed points on the boundary.
    pub fn axis(&self) -> Result<Axis> {
        self.require_hyperbolic()?;
        Ok(Axis::normalized(
            self.c.clone(),
            Integer::from(&self.d - &self.a),
            Integer::from(-&self.b),
        ))
    }

    /// Image of an axis under this element.
    ///
    /// Satisfies `g.push_axis(M.axis()) == (g M g^-1).axis()`.
    pub fn push_axis(&self, axis: &Axis) -> Axis {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (qa, qb, qc) = (&axis.a, &axis.b, &axis.c);
        let term = |q: &Integer, x: &Integer, y: &Integer| Integer::from(x * y) * q;
        let na = term(qa, d, d) - term(qb, d, c) + term(qc, c, c);
        let nb = term(qb, d, a) + term(qb, b, c) - term(qa, d, b) * 2u32 - term(qc, c, a) * 2u32;
        let nc = term(qa, b, b) - term(qb, b, a) + term(qc, a, a);
        Axis::normalized(na, nb, nc)
    }

    /// Möbius action on a boundary point, in floating point.
    pub fn act_on_boundary(&self, p: &Endpoint, ctx: &PrecisionContext) -> Endpoint {
        let a = ctx.float(&self.a);
        let b = ctx.float(&self.b);
        let c = ctx.float(&self.c);
        let d = ctx.float(&self.d);
        match p {
            Endpoint::Infinity => {
                if c.is_zero() {
                    Endpoint::Infinity
                } else {
                    Endpoint::Finite(a / c)
                }
            }
            Endpoint::Finite(x) => {
                let den = Float::with_val(ctx.bits, &c * x) + &d;
                if den.is_zero() {
                    Endpoint::Infinity
                } else {
                    Endpoint::Finite((Float::with_val(ctx.bits, &a * x) + &b) / den)
                }
            }
        }
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: &GroupElement) -> GroupElement {
        let (a, b, c, d) = mat_mul(
            (&self.a, &self.b, &self.c, &self.d),
            (&rhs.a, &rhs.b, &rhs.c, &rhs.d),
        );
        GroupElement::normalized(a, b, c, d)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn length_from_abs_trace(abs_trace: &Integer, ctx: &PrecisionContext) -> Float {
    let half = ctx.float(abs_trace) / 2u32;
    half.acosh() * 2u32
}

/// A boundary point of the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    Finite(Float),
    Infinity,
}

/// A geodesic of the upper half-plane given by the integer quadratic form
/// `a z^2 + b z + c` whose (projective) roots are its endpoints.
///
/// `a == 0` encodes a vertical line with one endpoint at infinity. The triple
/// is primitive with its first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Axis {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
}

impl Axis {
    fn normalized(a: Integer, b: Integer, c: Integer) -> Self {
        let g = Integer::from(a.gcd_ref(&b)).gcd(&c);
        let (mut a, mut b, mut c) = if g > 1 {
            (a / &g, b / &g, c / &g)
        } else {
            (a, b, c)
        };
        let lead = [&a, &b, &c]
            .into_iter()
            .find(|e| **e != 0)
            .map(|e| e.cmp0())
            .unwrap_or(Ordering::Greater);
        if lead == Ordering::Less {
            a = -a;
            b = -b;
            c = -c;
        }
        Self { a, b, c }
    }

    /// Geodesic from an integer quadratic form; requires two distinct real
    /// endpoints.
    pub fn from_quadratic(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Result<Self> {
        let axis = Self::normalized(a.into(), b.into(), c.into());
        if axis.discriminant() <= 0 {
            return Err(Error::InvalidInput(format!(
                "quadratic {} has no two distinct real roots",
                axis
            )));
        }
        Ok(axis)
    }

    /// Geodesic joining two rational boundary points (`None` is infinity).
    pub fn from_endpoints(p: &Rational, q: Option<&Rational>) -> Result<Self> {
        let (pn, pd) = (p.numer().clone(), p.denom().clone());
        match q {
            None => Self::from_quadratic(0, pd, -pn),
            Some(q) => {
                let (qn, qd) = (q.numer().clone(), q.denom().clone());
                let a = Integer::from(&pd * &qd);
                let b = -(Integer::from(&pd * &qn) + Integer::from(&pn * &qd));
                let c = Integer::from(&pn * &qn);
                Self::from_quadratic(a, b, c)
            }
        }
    }

    pub fn discriminant(&self) -> Integer {
        Integer::from(&self.b * &self.b) - Integer::from(4) * Integer::from(&self.a * &self.c)
    }

    pub fn is_vertical(&self) -> bool {
        self.a == 0
    }

    /// Endpoints in increasing order, infinity last.
    pub fn endpoints(&self, ctx: &PrecisionContext) -> (Endpoint, Endpoint) {
        if self.is_vertical() {
            let root = Float::with_val(ctx.bits, Integer::from(-&self.c)) / ctx.float(&self.b);
            return (Endpoint::Finite(root), Endpoint::Infinity);
        }
        let sqrt_disc = ctx.float(self.discriminant()).sqrt();
        let two_a = ctx.float(&self.a) * 2u32;
        let minus_b = ctx.float(Integer::from(-&self.b));
        let r1 = Float::with_val(ctx.bits, &minus_b - &sqrt_disc) / &two_a;
        let r2 = Float::with_val(ctx.bits, &minus_b + &sqrt_disc) / &two_a;
        if r1 <= r2 {
            (Endpoint::Finite(r1), Endpoint::Finite(r2))
        } else {
            (Endpoint::Finite(r2), Endpoint::Finite(r1))
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Resultant of two binary quadratic forms.
///
/// Equals `a_x^2 a_y^2 prod (r_i - s_j)` over the roots; its sign is
/// negative exactly when the root pairs alternate on the circle at infinity.
fn resultant(x: &Axis, y: &Axis) -> Integer {
    let ac = Integer::from(&x.a * &y.c) - Integer::from(&y.a * &x.c);
    let ab = Integer::from(&x.a * &y.b) - Integer::from(&y.a * &x.b);
    let bc = Integer::from(&x.b * &y.c) - Integer::from(&y.b * &x.c);
    Integer::from(&ac * &ac) - ab * bc
}

/// Whether two geodesics cross transversally, decided over the integers.
pub fn axes_cross(x: &Axis, y: &Axis) -> Result<bool> {
    match resultant(x, y).cmp0() {
        Ordering::Less => Ok(true),
        Ordering::Greater => Ok(false),
        Ordering::Equal => Err(Error::DegenerateAxes),
    }
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Float,
    pub y: Float,
}

impl Point {
    pub fn new(x: Float, y: Float) -> Result<Self> {
        if !(y > 0) {
            return Err(Error::InvalidPoint);
        }
        Ok(Self { x, y })
    }

    pub fn from_f64(x: f64, y: f64, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(ctx.float(x), ctx.float(y))
    }
}

/// Hyperbolic distance, `2 arsinh(|p - q| / (2 sqrt(Im p Im q)))`.
pub fn hyperbolic_distance(p: &Point, q: &Point, ctx: &PrecisionContext) -> Result<Float> {
    if !(p.y > 0) || !(q.y > 0) {
        return Err(Error::InvalidPoint);
    }
    let dx = Float::with_val(ctx.bits, &p.x - &q.x);
    let dy = Float::with_val(ctx.bits, &p.y - &q.y);
    let chord = (dx.square() + dy.square()).sqrt();
    let scale = (Float::with_val(ctx.bits, &p.y * &q.y)).sqrt() * 2u32;
    Ok((chord / scale).asinh() * 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn el(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(el(1, 2, 0, 1).classify(), ElementKind::Parabolic);
        assert_eq!(el(5, 2, 2, 1).classify(), ElementKind::Hyperbolic);
        assert_eq!(el(1, 0, 0, 1).classify(), ElementKind::Identity);
        assert_eq!(el(-1, 0, 0, -1).classify(), ElementKind::Identity);
        assert_eq!(el(0, -1, 1, 0).classify(), ElementKind::Elliptic);
    }

    #[test]
    fn product_of_generators() {
        let a = el(1, 2, 0, 1);
        let b = el(1, 0, 2, 1);
        assert_eq!(&a * &b, el(5, 2, 2, 1));
    }

    #[test]
    fn sign_normalization() {
        assert_eq!(el(-5, -2, -2, -1), el(5, 2, 2, 1));
        assert_eq!(el(0, -1, 1, 0), el(0, 1, -1, 0));
        let e = el(-3, 2, -2, 1);
        assert!(*e.entries()[0] > 0);
    }

    #[test]
    fn determinant_checked() {
        assert!(matches!(GroupElement::new(2, 0, 0, 1), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn translation_lengths() {
        let ctx = ctx();
        let l = el(5, 2, 2, 1).translation_length(&ctx).unwrap();
        assert!((l.to_f64() - 3.525494348078172).abs() < 1e-14);
        // b a^3 has trace 14
        let b = el(1, 0, 2, 1);
        let a = el(1, 2, 0, 1);
        let m = &b * &a.pow(3);
        assert_eq!(m.abs_trace(), 14);
        let l = m.translation_length(&ctx).unwrap();
        let expected = 2.0 * 7f64.acosh();
        assert!((l.to_f64() - expected).abs() < 1e-13);
        assert!(matches!(
            el(1, 2, 0, 1).translation_length(&ctx),
            Err(Error::NotHyperbolic(_))
        ));
    }

    #[test]
    fn axis_examples() {
        let axis = el(5, 2, 2, 1).axis().unwrap();
        assert_eq!(axis, Axis::from_quadratic(1, -2, -1).unwrap());
        let axis = el(2, 1, 1, 1).axis().unwrap();
        assert_eq!((axis.a.to_i64(), axis.b.to_i64(), axis.c.to_i64()), (Some(1), Some(-1), Some(-1)));
        assert!(el(1, 2, 0, 1).axis().is_err());
        let (lo, hi) = el(5, 2, 2, 1).axis().unwrap().endpoints(&ctx());
        match (lo, hi) {
            (Endpoint::Finite(lo), Endpoint::Finite(hi)) => {
                assert!((lo.to_f64() - (1.0 - 2f64.sqrt())).abs() < 1e-15);
                assert!((hi.to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
            }
            _ => panic!("finite endpoints expected"),
        }
    }

    fn axis_from_ints(p: i64, q: Option<i64>) -> Axis {
        let q = q.map(Rational::from);
        Axis::from_endpoints(&Rational::from(p), q.as_ref()).unwrap()
    }

    #[test]
    fn crossing_by_inspection() {
        let x = axis_from_ints(-1, Some(1));
        assert!(axes_cross(&x, &axis_from_ints(0, Some(3))).unwrap());
        assert!(!axes_cross(&x, &axis_from_ints(2, Some(3))).unwrap());
        // nested
        assert!(!axes_cross(&axis_from_ints(-3, Some(3)), &x).unwrap());
        // vertical branch
        assert!(axes_cross(&x, &axis_from_ints(0, None)).unwrap());
        assert!(!axes_cross(&x, &axis_from_ints(2, None)).unwrap());
        assert!(matches!(
            axes_cross(&x, &axis_from_ints(1, Some(5))),
            Err(Error::DegenerateAxes)
        ));
    }

    #[test]
    fn crossing_in_level_two() {
        let a = el(1, 2, 0, 1);
        let b = el(1, 0, 2, 1);
        let ab = &a * &b;
        let conj = &(&b * &ab) * &b.inverse();
        let x = ab.axis().unwrap();
        let y = conj.axis().unwrap();
        assert!(axes_cross(&x, &y).unwrap());
        assert_eq!(b.push_axis(&x), y);
    }

    #[test]
    fn distances() {
        let ctx = ctx();
        let i = Point::from_f64(0.0, 1.0, &ctx).unwrap();
        let two_i = Point::from_f64(0.0, 2.0, &ctx).unwrap();
        let d = hyperbolic_distance(&i, &two_i, &ctx).unwrap();
        assert!((d.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert!(hyperbolic_distance(&i, &i, &ctx).unwrap().is_zero());
        let p = Point::from_f64(1.0, 1.0, &ctx).unwrap();
        let d = hyperbolic_distance(&i, &p, &ctx).unwrap();
        assert!((d.to_f64() - 2.0 * 0.5f64.asinh()).abs() < 1e-15);
        assert!(Point::from_f64(0.0, 0.0, &ctx).is_err());
    }
}
