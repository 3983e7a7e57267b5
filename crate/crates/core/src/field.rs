//! Exact field arithmetic over prime fields `F_p` (`p >= 5`) and the rationals.
//!
//! Elements carry their field with them and are always stored in canonical
//! form: the least nonnegative residue for `F_p`, a reduced fraction with
//! positive denominator for `Q`. Equality and ordering are therefore
//! structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest modulus accepted by [`Field::prime`]; products of two residues
/// are formed in `u128`, so this is only a sanity bound on trial division.
pub const MAX_PRIME: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is not supported (must not be 2 or 3)")]
    BadCharacteristic(u64),
    #[error("the rationals are not enumerable")]
    InfiniteField,
    #[error("cannot parse {0:?} as a field element")]
    Parse(String),
    #[error("{0:?} has a denominator divisible by the characteristic")]
    NotInvertible(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Prime(u64),
    Rationals,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds `F_p`, rejecting composites and the characteristics 2 and 3.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 || p == 3 {
            return Err(FieldError::BadCharacteristic(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            Field::Rationals => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match *self {
            Field::Prime(p) => FieldElement::Mod {
                value: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
            Field::Rationals => FieldElement::Rational(BigRational::from_integer(BigInt::from(n))),
        }
    }

    /// Maps a rational number into this field. Fails for `F_p` when the
    /// denominator vanishes mod `p`.
    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement, FieldError> {
        match *self {
            Field::Rationals => Ok(FieldElement::Rational(q.clone())),
            Field::Prime(p) => {
                let modulus = BigInt::from(p);
                let num = q.numer().mod_floor(&modulus).to_u64().expect("residue fits in u64");
                let den = q.denom().mod_floor(&modulus).to_u64().expect("residue fits in u64");
                let num = FieldElement::Mod { value: num, modulus: p };
                let den = FieldElement::Mod { value: den, modulus: p };
                let inv = den.inv().ok_or_else(|| FieldError::NotInvertible(q.to_string()))?;
                Ok(&num * &inv)
            }
        }
    }

    /// Parses an integer or a fraction `n/d` and maps it into the field.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let q = BigRational::from_str(s.trim()).map_err(|_| FieldError::Parse(s.to_string()))?;
        self.from_rational(&q)
    }

    /// Every element of `F_p` in ascending order of representative.
    pub fn elements(&self) -> Result<Vec<FieldElement>, FieldError> {
        match *self {
            Field::Prime(p) => Ok((0..p).map(|value| FieldElement::Mod { value, modulus: p }).collect()),
            Field::Rationals => Err(FieldError::InfiniteField),
        }
    }

    /// Every nonzero element of `F_p` in ascending order.
    pub fn units(&self) -> Result<Vec<FieldElement>, FieldError> {
        Ok(self.elements()?.into_iter().skip(1).collect())
    }

    /// All nonzero `t` with `t^m = 1`, in ascending order.
    pub fn units_of_order_dividing(&self, m: u64) -> Vec<FieldElement> {
        assert!(m >= 1, "m must be positive");
        match *self {
            Field::Prime(_) => {
                let one = self.one();
                self.units()
                    .expect("prime field is finite")
                    .into_iter()
                    .filter(|t| t.pow(m as i64) == one)
                    .collect()
            }
            Field::Rationals => {
                if m.is_multiple_of(2) {
                    vec![self.from_i64(-1), self.one()]
                } else {
                    vec![self.one()]
                }
            }
        }
    }

    /// Whether the multiplicative group contains an element of order exactly `m`.
    pub fn has_root_of_unity(&self, m: u64) -> bool {
        match *self {
            Field::Prime(p) => (p - 1) % m == 0,
            Field::Rationals => m == 1 || m == 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Rationals => write!(f, "Q"),
        }
    }
}

/// An element of a [`Field`], in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Mod { value: u64, modulus: u64 },
    Rational(BigRational),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Mod { modulus, .. } => Field::Prime(*modulus),
            FieldElement::Rational(_) => Field::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Mod { value, .. } => *value == 0,
            FieldElement::Rational(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Mod { value, .. } => *value == 1,
            FieldElement::Rational(q) => q.is_one(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        match self {
            FieldElement::Mod { value, modulus } => {
                let (g, x, _) = ext_gcd(*value as i128, *modulus as i128);
                debug_assert_eq!(g, 1);
                Some(FieldElement::Mod {
                    value: x.rem_euclid(*modulus as i128) as u64,
                    modulus: *modulus,
                })
            }
            FieldElement::Rational(q) => Some(FieldElement::Rational(q.recip())),
        }
    }

    /// `self^e`; negative exponents invert first.
    ///
    /// Panics if `e < 0` and `self` is zero.
    pub fn pow(&self, e: i64) -> FieldElement {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut e = e as u64;
        match self {
            FieldElement::Mod { value, modulus } => {
                let m = *modulus as u128;
                let mut base = *value as u128;
                let mut acc = 1u128 % m;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                FieldElement::Mod {
                    value: acc as u64,
                    modulus: *modulus,
                }
            }
            FieldElement::Rational(q) => FieldElement::Rational(num_traits::pow(q.clone(), e as usize)),
        }
    }

    /// Multiplicative order of a unit. Panics on zero; `None` for a rational
    /// of infinite order.
    pub fn multiplicative_order(&self) -> Option<u64> {
        assert!(!self.is_zero(), "zero has no multiplicative order");
        match self {
            FieldElement::Mod { modulus, .. } => {
                let n = modulus - 1;
                let mut divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
                divisors.sort_unstable();
                divisors.into_iter().find(|&d| self.pow(d as i64).is_one())
            }
            FieldElement::Rational(q) => {
                if q.is_one() {
                    Some(1)
                } else if (-q).is_one() {
                    Some(2)
                } else {
                    None
                }
            }
        }
    }

    fn check_same_field(&self, other: &FieldElement) {
        assert_eq!(self.field(), other.field(), "operands from different fields");
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Mod { value, .. } => write!(f, "{value}"),
            FieldElement::Rational(q) => write!(f, "{q}"),
        }
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        match (self, rhs) {
            (FieldElement::Mod { value: x, modulus }, FieldElement::Mod { value: y, .. }) => FieldElement::Mod {
                value: ((*x as u128 + *y as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            (FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x + y),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.check_same_field(rhs);
        match (self, rhs) {
            (FieldElement::Mod { value: x, modulus }, FieldElement::Mod { value: y, .. }) => FieldElement::Mod {
                value: ((*x as u128 * *y as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            (FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x * y),
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Mod { value, modulus } => FieldElement::Mod {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            FieldElement::Rational(q) => FieldElement::Rational(-q),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// A rational `t` with `t^n = q`, if one exists. For even `n` the positive
/// root is returned.
pub fn rational_nth_root(q: &BigRational, n: u32) -> Option<BigRational> {
    assert!(n >= 1, "root index must be positive");
    if q.is_zero() {
        return Some(BigRational::zero());
    }
    if q.is_negative() {
        if n.is_multiple_of(2) {
            return None;
        }
        return rational_nth_root(&-q, n).map(|r| -r);
    }
    let num = exact_integer_root(q.numer(), n)?;
    let den = exact_integer_root(q.denom(), n)?;
    Some(BigRational::new(num, den))
}

fn exact_integer_root(x: &BigInt, n: u32) -> Option<BigInt> {
    let r = x.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) == *x {
        Some(r)
    } else {
        None
    }
}
