//! q-numbers over a two-level scalar tower.
//!
//! `[z] = (q^z - q^-z) / (q - q^-1)` is evaluated either exactly, as a
//! [`BigRational`], when `q` is rational and `z` is an integer, or as a
//! [`Complex64`] otherwise. The exact level exists so that the square-root
//! free identities behind the principal series can be checked with zero
//! residual instead of a tolerance.
//!
//! Exponents carry a flag telling whether they are exactly an integer
//! ([`QExponent`]). Everything that needs to know whether `[z]` vanishes
//! (zero/pole bookkeeping, illegal-shift detection) asks the flag instead of
//! comparing floats.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for floating comparisons of matrix entries.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Distance to the nearest integer below which a complex parameter is
/// treated as that integer.
pub const INTEGER_SNAP: f64 = 1e-9;

/// The argument `z` of a q-number `[z]`.
///
/// The value is `integer + offset`. It is *exact-integer* when the integer
/// part is present and the offset is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QExponent {
    integer: Option<i64>,
    offset: Complex64,
}

impl QExponent {
    pub fn integer(k: i64) -> Self {
        Self {
            integer: Some(k),
            offset: Complex64::zero(),
        }
    }

    /// A generic complex exponent; never flagged exact even if `z` happens to
    /// be integral.
    pub fn complex(z: Complex64) -> Self {
        Self {
            integer: None,
            offset: z,
        }
    }

    pub fn real(x: f64) -> Self {
        Self::complex(Complex64::new(x, 0.0))
    }

    /// Exact-integer if `z` lies within `tol` of an integer, generic otherwise.
    pub fn snapped(z: Complex64, tol: f64) -> Self {
        let k = z.re.round();
        if (z.re - k).abs() <= tol && z.im.abs() <= tol && k.abs() < 9.0e15 {
            Self::integer(k as i64)
        } else {
            Self::complex(z)
        }
    }

    pub fn value(&self) -> Complex64 {
        self.offset + self.integer.unwrap_or(0) as f64
    }

    pub fn is_exact_integer(&self) -> bool {
        self.integer.is_some() && self.offset.is_zero()
    }

    pub fn as_integer(&self) -> Option<i64> {
        if self.is_exact_integer() {
            self.integer
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            integer: self.integer,
            offset: self.offset.conj(),
        }
    }
}

impl From<i64> for QExponent {
    fn from(k: i64) -> Self {
        Self::integer(k)
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(k) => write!(f, "{k}"),
            None => {
                let z = self.value();
                write!(f, "{}{:+}i", z.re, z.im)
            }
        }
    }
}

fn merge_int(a: Option<i64>, b: Option<i64>, op: fn(i64, i64) -> i64) -> Option<i64> {
    match (a, b) {
        (None, None) => None,
        _ => Some(op(a.unwrap_or(0), b.unwrap_or(0))),
    }
}

impl Add for QExponent {
    type Output = QExponent;
    fn add(self, rhs: QExponent) -> QExponent {
        QExponent {
            integer: merge_int(self.integer, rhs.integer, |a, b| a + b),
            offset: self.offset + rhs.offset,
        }
    }
}

impl Sub for QExponent {
    type Output = QExponent;
    fn sub(self, rhs: QExponent) -> QExponent {
        QExponent {
            integer: merge_int(self.integer, rhs.integer, |a, b| a - b),
            offset: self.offset - rhs.offset,
        }
    }
}

impl Add<i64> for QExponent {
    type Output = QExponent;
    fn add(self, rhs: i64) -> QExponent {
        self + QExponent::integer(rhs)
    }
}

impl Sub<i64> for QExponent {
    type Output = QExponent;
    fn sub(self, rhs: i64) -> QExponent {
        self - QExponent::integer(rhs)
    }
}

impl Neg for QExponent {
    type Output = QExponent;
    fn neg(self) -> QExponent {
        QExponent {
            integer: self.integer.map(|k| -k),
            offset: -self.offset,
        }
    }
}

/// The deformation parameter `q > 0`, `q != 1`, with `h = ln q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QParam {
    q: f64,
    h: f64,
    exact: Option<BigRational>,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) || q == 1.0 {
            return Err(Error::InvalidParameter(format!(
                "q must be positive and different from 1, got {q}"
            )));
        }
        Ok(Self {
            q,
            h: q.ln(),
            exact: None,
        })
    }

    /// Rational `q = num/den`; enables exact evaluation at integer arguments.
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 || num == 0 || (num < 0) != (den < 0) || num == den {
            return Err(Error::InvalidParameter(format!(
                "q must be positive and different from 1, got {num}/{den}"
            )));
        }
        let exact = BigRational::new(BigInt::from(num), BigInt::from(den));
        let q = num as f64 / den as f64;
        Ok(Self {
            q,
            h: q.ln(),
            exact: Some(exact),
        })
    }

    pub fn value(&self) -> f64 {
        self.q
    }

    /// `h = ln q`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// `q - q^-1`, never zero.
    pub fn denominator(&self) -> f64 {
        self.q - 1.0 / self.q
    }

    /// `[x]` for real `x`.
    pub fn qn(&self, x: f64) -> f64 {
        ((self.h * x).exp() - (-self.h * x).exp()) / self.denominator()
    }

    /// `[z]` for complex `z`, principal branch `q^z = exp(z ln q)`.
    pub fn qn_complex(&self, z: Complex64) -> Complex64 {
        ((z * self.h).exp() - (-z * self.h).exp()) / self.denominator()
    }

    /// `[z]` with `[0]` returned as an exact zero when the exponent is flagged
    /// exact-integer zero.
    pub fn qn_exponent(&self, z: QExponent) -> Complex64 {
        match z.as_integer() {
            Some(0) => Complex64::zero(),
            Some(k) => Complex64::new(self.qn(k as f64), 0.0),
            None => self.qn_complex(z.value()),
        }
    }

    /// `q^x` for complex `x`.
    pub fn pow(&self, x: Complex64) -> Complex64 {
        (x * self.h).exp()
    }

    /// The shift `pi i / h` under which `[z]` changes sign.
    pub fn half_period(&self) -> f64 {
        PI / self.h
    }
}

/// A value of the scalar tower.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero_exact() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one_exact() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(k: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(z) => z.is_zero(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => Complex64::new(rational_to_f64(r), 0.0),
            Scalar::Float(z) => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts overflow f64: scale down by the common bit length.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_complex() $op rhs.to_complex()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_complex() / rhs.to_complex()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

fn exact_q_number(k: i64, q: &BigRational) -> BigRational {
    if k == 0 {
        return BigRational::zero();
    }
    let n = k.unsigned_abs();
    assert!(n <= i32::MAX as u64, "q-number exponent {k} out of range");
    // [n] = q^{1-n} + q^{3-n} + ... + q^{n-1}; avoids dividing by q - 1/q.
    let q2 = q * q;
    let mut term = q.pow(1 - n as i32);
    let mut sum = BigRational::zero();
    for _ in 0..n {
        sum += &term;
        term = &term * &q2;
    }
    if k < 0 {
        -sum
    } else {
        sum
    }
}

/// `[z]`. Exact when `z` is exact-integer and `q` was given as a rational.
pub fn q_number(z: QExponent, q: &QParam) -> Scalar {
    match (z.as_integer(), q.exact()) {
        (Some(k), Some(qr)) => Scalar::Exact(exact_q_number(k, qr)),
        _ => Scalar::Float(q.qn_exponent(z)),
    }
}

/// Multiplicity of the zero of `[z]` at `z`: 1 at an exact-integer zero,
/// 0 everywhere else. (`[z]` also vanishes at `k pi i / h`, but those points
/// never carry the exact-integer flag.)
pub fn zero_order(z: QExponent) -> u32 {
    u32::from(z.as_integer() == Some(0))
}

/// `d[z]/dz = ln q (q^z + q^-z) / (q - q^-1)`.
pub fn q_number_derivative(z: QExponent, q: &QParam) -> Scalar {
    let w = z.value();
    let v = q.h() * ((w * q.h()).exp() + (-w * q.h()).exp()) / q.denominator();
    Scalar::Float(v)
}

/// Absolute value of a rational, for sign checks in exact mode.
pub fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
