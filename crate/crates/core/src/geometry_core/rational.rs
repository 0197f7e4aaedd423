//! Exact rational scalar used for every coordinate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator. Values whose numerator and denominator fit in an
/// `i64` are stored inline and combined with 128-bit intermediates; larger
/// ones fall back to a big rational.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigEntry>),
}

/// A big value with its nearest `f64`, used by floating-point filters.
#[derive(Clone)]
struct BigEntry {
    value: BigRational,
    approx: f64,
}

impl PartialEq for BigEntry {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for BigEntry {}

impl std::hash::Hash for BigEntry {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // values are kept reduced, so the raw parts identify them
        self.value.numer().hash(state);
        self.value.denom().hash(state);
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let d: BigInt = denom.into();
        assert!(!d.is_zero(), "zero denominator");
        Rational::from_big(BigRational::new(numer.into(), d))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational::from_big(BigRational::from_integer(n.into()))
    }

    fn from_big(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => {
                let approx = b.to_f64().unwrap_or(f64::NAN);
                Rational(Repr::Big(Box::new(BigEntry { value: b, approx })))
            }
        }
    }

    fn big(&self) -> std::borrow::Cow<'_, BigRational> {
        match &self.0 {
            Repr::Small(n, d) => std::borrow::Cow::Owned(BigRational::new_raw(BigInt::from(*n), BigInt::from(*d))),
            Repr::Big(b) => std::borrow::Cow::Borrowed(&b.value),
        }
    }

    /// Nearest `f64` (within a few ulps), cached for big values.
    #[inline]
    pub fn approx(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.approx,
        }
    }

    /// From an unreduced fraction with nonzero denominator.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        if n == 0 {
            return Rational::zero();
        }
        let neg = (n < 0) != (d < 0);
        let (un, ud) = (n.unsigned_abs(), d.unsigned_abs());
        let g = gcd_u128(un, ud);
        let (un, ud) = (un / g, ud / g);
        if un <= i64::MAX as u128 && ud <= i64::MAX as u128 {
            let n = un as i64;
            return Rational(Repr::Small(if neg { -n } else { n }, ud as i64));
        }
        let bn = BigInt::from(un);
        let bn = if neg { -bn } else { bn };
        Rational::from_big(BigRational::new_raw(bn, BigInt::from(ud)))
    }

    fn to_big(&self) -> BigRational {
        self.big().into_owned()
    }

    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.value.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.value.denom().clone(),
        }
    }

    /// The value as an `i64` when it is an integer stored inline.
    #[inline]
    pub fn as_small_int(&self) -> Option<i64> {
        match self.0 {
            Repr::Small(n, 1) => Some(n),
            _ => None,
        }
    }

    /// Bit length of the larger of numerator and denominator.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => (64 - n.unsigned_abs().leading_zeros()).max(64 - d.leading_zeros()) as u64,
            Repr::Big(b) => b.value.numer().bits().max(b.value.denom().bits()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small(n, _) => n.cmp(&0),
            Repr::Big(b) => {
                if b.value.is_positive() {
                    Ordering::Greater
                } else if b.value.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        Rational::one() / self
    }

    /// `self / 2^k`, used by the halving schedules.
    pub fn halved(&self, k: u32) -> Self {
        match &self.0 {
            Repr::Small(n, d) if k <= 60 => Rational::from_i128(*n as i128, (*d as i128) << k),
            _ => Rational::from_big(self.big().as_ref() / BigRational::from_integer(BigInt::one() << k)),
        }
    }

    /// Nearest multiple of `2^-k` (ties toward positive infinity).
    pub fn round_dyadic(&self, k: u32) -> Self {
        let scale = BigInt::one() << k;
        let two_d = self.denom() * 2;
        let twice: BigInt = self.numer() * &scale * 2 + self.denom();
        let num = twice.div_floor(&two_d);
        Rational::new(num, scale)
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.approx,
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        self.to_big()
    }

    /// Decimal rendering rounded to `digits` significant digits (half away
    /// from zero). Presentation only.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.signum() == Ordering::Less;
        let num = self.numer().abs();
        let den = self.denom();
        let ten = BigInt::from(10);
        // find exponent e with 10^e <= |x| < 10^(e+1)
        let int_part = &num / &den;
        let mut exp: i64 = if !int_part.is_zero() {
            int_part.to_string().len() as i64 - 1
        } else {
            let mut e = 0i64;
            let mut n = num.clone();
            while &n < &den {
                n *= &ten;
                e -= 1;
            }
            e
        };
        let scaled = |exp: i64| -> BigInt {
            // round(|x| * 10^(digits-1-exp))
            let shift = digits as i64 - 1 - exp;
            let (n, d) = if shift >= 0 {
                (&num * ten.pow(shift as u32), den.clone())
            } else {
                (num.clone(), &den * ten.pow((-shift) as u32))
            };
            (n * 2 + &d) / (d * 2)
        };
        let mut mant = scaled(exp);
        if mant.to_string().len() > digits {
            exp += 1;
            mant = scaled(exp);
        }
        let mut s = mant.to_string();
        // s has exactly `digits` digits; place the decimal point
        let point = exp + 1; // digits before the point
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        if point <= 0 {
            out.push_str("0.");
            for _ in 0..(-point) {
                out.push('0');
            }
            out.push_str(s.trim_end_matches('0'));
        } else if point as usize >= s.len() {
            out.push_str(&s);
            for _ in 0..(point as usize - s.len()) {
                out.push('0');
            }
        } else {
            let frac = s.split_off(point as usize);
            out.push_str(&s);
            let frac = frac.trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
        out
    }
}

/// An unreduced fraction with a positive denominator. Sign tests and
/// multi-step constructions run on these so that only the final result
/// pays for a gcd.
#[derive(Clone, Debug)]
pub struct Frac {
    n: BigInt,
    d: BigInt,
}

impl Frac {
    pub fn of(r: &Rational) -> Frac {
        match &r.0 {
            Repr::Small(n, d) => Frac {
                n: BigInt::from(*n),
                d: BigInt::from(*d),
            },
            Repr::Big(b) => Frac {
                n: b.value.numer().clone(),
                d: b.value.denom().clone(),
            },
        }
    }

    pub fn add(&self, o: &Frac) -> Frac {
        if self.d == o.d {
            return Frac {
                n: &self.n + &o.n,
                d: self.d.clone(),
            };
        }
        Frac {
            n: &self.n * &o.d + &o.n * &self.d,
            d: &self.d * &o.d,
        }
    }

    pub fn sub(&self, o: &Frac) -> Frac {
        if self.d == o.d {
            return Frac {
                n: &self.n - &o.n,
                d: self.d.clone(),
            };
        }
        Frac {
            n: &self.n * &o.d - &o.n * &self.d,
            d: &self.d * &o.d,
        }
    }

    pub fn mul(&self, o: &Frac) -> Frac {
        Frac {
            n: &self.n * &o.n,
            d: &self.d * &o.d,
        }
    }

    /// `self / o`; `o` must be nonzero.
    pub fn div(&self, o: &Frac) -> Frac {
        let (mut n, mut d) = (&self.n * &o.d, &self.d * &o.n);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Frac { n, d }
    }

    pub fn signum(&self) -> Ordering {
        self.n.sign().cmp(&num_bigint::Sign::NoSign)
    }

    pub fn is_zero(&self) -> bool {
        self.n.is_zero()
    }

    pub fn cmp_to(&self, o: &Frac) -> Ordering {
        if self.d == o.d {
            return self.n.cmp(&o.n);
        }
        (&self.n * &o.d).cmp(&(&o.n * &self.d))
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_big(BigRational::new(self.n.clone(), self.d.clone()))
    }
}

/// Sign of `a * b - c * d`, filtered through floating point before falling
/// back to exact arithmetic.
pub fn diff_of_products_sign(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Ordering {
    let (x, y) = (a.approx() * b.approx(), c.approx() * d.approx());
    let det = x - y;
    let bound = 1e-13 * (x.abs() + y.abs());
    if det.is_finite() && bound.is_finite() && (x != 0.0 || y != 0.0) && bound > 1e-280 {
        if det > bound {
            return Ordering::Greater;
        }
        if det < -bound {
            return Ordering::Less;
        }
    }
    match (&a.0, &b.0, &c.0, &d.0) {
        (Repr::Small(an, 1), Repr::Small(bn, 1), Repr::Small(cn, 1), Repr::Small(dn, 1)) => {
            (*an as i128 * *bn as i128).cmp(&(*cn as i128 * *dn as i128))
        }
        _ => {
            let (a, b, c, d) = (Frac::of(a), Frac::of(b), Frac::of(c), Frac::of(d));
            a.mul(&b).cmp_to(&c.mul(&d))
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.value.denom().is_one() => write!(f, "{}", b.value.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.value.numer(), b.value.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::new(n, d))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(Repr::Small(v, 1))
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational(Repr::Small(v as i64, 1))
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational::from_big(v)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, 1), Repr::Small(b, 1)) => a.cmp(b),
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => {
                let (x, y) = (self.approx(), other.approx());
                let tol = 1e-12 * x.abs().max(y.abs());
                if x.is_finite() && y.is_finite() && (x - y).abs() > tol {
                    return x.partial_cmp(&y).expect("finite");
                }
                if self == other {
                    return Ordering::Equal;
                }
                Frac::of(self).cmp_to(&Frac::of(other))
            }
        }
    }
}

fn add_impl(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(a, 1), Repr::Small(c, 1)) => Rational::from_i128(*a as i128 + *c as i128, 1),
        (Repr::Small(a, b), Repr::Small(c, d)) if b == d => Rational::from_i128(*a as i128 + *c as i128, *b as i128),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            Rational::from_i128(a * d + c * b, b * d)
        }
        _ => Rational::from_big(x.big().as_ref() + y.big().as_ref()),
    }
}

fn neg_impl(x: &Rational) -> Rational {
    match &x.0 {
        Repr::Small(n, d) if *n != i64::MIN => Rational(Repr::Small(-n, *d)),
        _ => Rational::from_big(-x.big().as_ref()),
    }
}

fn sub_impl(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(a, 1), Repr::Small(c, 1)) => Rational::from_i128(*a as i128 - *c as i128, 1),
        (Repr::Small(a, b), Repr::Small(c, d)) if b == d => Rational::from_i128(*a as i128 - *c as i128, *b as i128),
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            Rational::from_i128(a * d - c * b, b * d)
        }
        _ => Rational::from_big(x.big().as_ref() - y.big().as_ref()),
    }
}

fn mul_impl(x: &Rational, y: &Rational) -> Rational {
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => Rational::from_big(x.big().as_ref() * y.big().as_ref()),
    }
}

fn div_impl(x: &Rational, y: &Rational) -> Rational {
    assert!(!y.is_zero(), "division by zero");
    match (&x.0, &y.0) {
        (Repr::Small(a, b), Repr::Small(c, d)) => {
            Rational::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
        }
        _ => Rational::from_big(x.big().as_ref() / y.big().as_ref()),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, rhs: &'a Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, rhs: &'a Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(self)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RatVisitor;
        impl<'de> Visitor<'de> for RatVisitor {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\", \"p\", or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }
        }
        d.deserialize_any(RatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.denom(), BigInt::from(2));
        assert_eq!("4/2".parse::<Rational>().unwrap(), Rational::from(2));
    }

    #[test]
    fn small_and_big_agree() {
        let big = Rational::new(BigInt::from(1u64) << 100, 3);
        let x = Rational::new(i64::MAX, 7);
        let y = Rational::new(-5, i64::MAX);
        for (a, b) in [(&big, &x), (&x, &y), (&y, &big), (&x, &x)] {
            let (ba, bb) = (a.to_big_rational(), b.to_big_rational());
            assert_eq!((a + b).to_big_rational(), &ba + &bb);
            assert_eq!((a - b).to_big_rational(), &ba - &bb);
            assert_eq!((a * b).to_big_rational(), &ba * &bb);
            assert_eq!((a / b).to_big_rational(), &ba / &bb);
            assert_eq!(a.cmp(b), ba.cmp(&bb));
        }
        let back = &(&big - &big) + &x;
        assert_eq!(back, x);
        assert_eq!(-Rational::from(i64::MIN), Rational::new(BigInt::from(1u64) << 63, 1));
        assert_eq!(Rational::new(3, 4).halved(2), Rational::new(3, 16));
        assert_eq!(Rational::new(7, 3).round_dyadic(1), Rational::new(5, 2));
        assert_eq!(Rational::new(-7, 3).round_dyadic(0), Rational::from(-2));
        assert_eq!(Rational::new(1, 2).round_dyadic(0), Rational::from(1));
    }

    #[test]
    fn rejects_garbage() {
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Rational::new(1, 3).to_decimal(5), "0.33333");
        assert_eq!(Rational::new(2, 3).to_decimal(3), "0.667");
        assert_eq!(Rational::from(1234).to_decimal(2), "1200");
        assert_eq!(Rational::new(-5, 2).to_decimal(20), "-2.5");
        assert_eq!(Rational::new(999, 1000).to_decimal(2), "1");
        assert_eq!(Rational::new(1, 1000).to_decimal(4), "0.001");
    }

    #[test]
    fn json_accepts_integers_and_strings() {
        let v: Vec<Rational> = serde_json::from_str(r#"[3, "-7/21", "5"]"#).unwrap();
        assert_eq!(v[0], Rational::from(3));
        assert_eq!(v[1], Rational::new(-1, 3));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["3","-1/3","5"]"#);
    }
}
