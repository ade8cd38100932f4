//! Exact rationals, rational-endpoint enclosures and outward-rounded `f64`
//! intervals.
//!
//! Coefficients are carried as [`Enclosure`]s: a closed interval with exact
//! rational endpoints. Rational inputs stay degenerate (`lo == hi`), so every
//! downstream comparison is exact; irrational inputs (square roots) enter
//! through [`sqrt_enclosure`] with a configurable number of bits and are then
//! propagated without any further rounding.
//!
//! Transcendental evaluation (cosines in density sums, quadrature) uses
//! [`Interval`], whose endpoints are pushed one ulp outwards after every
//! operation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Default precision (in bits) for square-root enclosures.
pub const DEFAULT_PRECISION_BITS: u32 = 53;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow(base: &Q, exp: u64) -> Q {
    let mut acc = Q::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.6"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::parse(s, "empty rational"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad numerator"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(Error::parse(s, "zero denominator"));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::parse(s, "bad decimal"));
        }
        let digits = format!("{int_digits}{frac}");
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| Error::parse(s, "bad decimal"))?
        };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| Error::parse(s, "not a rational"))?;
    Ok(Q::from_integer(n))
}

/// `"p/q"` (or `"p"` for integers), the exact rendering used in CSV output.
pub fn render_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering at 12 significant digits.
pub fn render_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.11e}")
}

/// Exact conversion of a finite `f64` into a rational.
pub fn from_f64_exact(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// Rigorous enclosure of `sqrt(x)` for `x >= 0` with `bits` fractional bits
/// relative to the denominator of `x`.
pub fn sqrt_enclosure(x: &Q, bits: u32) -> Enclosure {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return Enclosure::exact(Q::zero());
    }
    let (n, d) = (x.numer(), x.denom());
    // sqrt(n/d) = sqrt(n*d) / d
    let scale = BigInt::one() << bits;
    let radicand = n * d * &scale * &scale;
    let s = radicand.sqrt();
    let den = d * &scale;
    if &s * &s == radicand {
        Enclosure::exact(Q::new(s, den))
    } else {
        Enclosure::new(Q::new(s.clone(), den.clone()), Q::new(s + 1, den))
    }
}

/// Closed interval with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Q,
    hi: Q,
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", render_rational(&self.lo))
        } else {
            write!(f, "[{:e}, {:e}]", to_f64(&self.lo), to_f64(&self.hi))
        }
    }
}

/// Serialized as `{"lo", "hi", "approx"}` with rational strings.
impl serde::Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Enclosure", 3)?;
        st.serialize_field("lo", &render_rational(&self.lo))?;
        st.serialize_field("hi", &render_rational(&self.hi))?;
        st.serialize_field("approx", &self.mid_f64())?;
        st.end()
    }
}

impl From<Q> for Enclosure {
    fn from(x: Q) -> Self {
        Enclosure::exact(x)
    }
}

impl Enclosure {
    pub fn exact(x: Q) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "enclosure with lo > hi");
        Enclosure { lo, hi }
    }

    pub fn zero() -> Self {
        Self::exact(Q::zero())
    }

    pub fn one() -> Self {
        Self::exact(Q::one())
    }

    /// `[center - radius, center + radius]`.
    pub fn around(center: Q, radius: &Q) -> Self {
        let r = radius.abs();
        Enclosure::new(&center - &r, center + r)
    }

    pub fn lo(&self) -> &Q {
        &self.lo
    }

    pub fn hi(&self) -> &Q {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_exact(&self) -> Option<&Q> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.mid())
    }

    pub fn width_f64(&self) -> f64 {
        to_f64(&self.width())
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Largest absolute value over the enclosure.
    pub fn mag(&self) -> Q {
        std::cmp::max(self.lo.abs(), self.hi.abs())
    }

    /// Certified sign: `Some(Less)` if the whole enclosure is negative,
    /// `Some(Greater)` if positive, `Some(Equal)` for an exact zero and
    /// `None` when the enclosure straddles or touches zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison against a rational; `None` if undecided.
    pub fn cmp_q(&self, x: &Q) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn scale(&self, s: &Q) -> Enclosure {
        let a = &self.lo * s;
        let b = &self.hi * s;
        if a <= b {
            Enclosure::new(a, b)
        } else {
            Enclosure::new(b, a)
        }
    }

    pub fn abs(&self) -> Enclosure {
        match self.sign() {
            Some(Ordering::Less) => -self.clone(),
            Some(_) => self.clone(),
            None => Enclosure::new(Q::zero(), self.mag()),
        }
    }

    pub fn square(&self) -> Enclosure {
        self.abs() * self.abs()
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(
            std::cmp::min(&self.lo, &other.lo).clone(),
            std::cmp::max(&self.hi, &other.hi).clone(),
        )
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        &self + &rhs
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: Enclosure) -> Enclosure {
        &self - &rhs
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        if self.is_exact() {
            return rhs.scale(&self.lo);
        }
        if rhs.is_exact() {
            return self.scale(&rhs.lo);
        }
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure { lo, hi }
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        &self * &rhs
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl std::iter::Sum for Enclosure {
    fn sum<I: Iterator<Item = Enclosure>>(iter: I) -> Self {
        iter.fold(Enclosure::zero(), |acc, x| &acc + &x)
    }
}

/// Sign of a rational as `Ordering` relative to zero.
pub fn sign_of(x: &Q) -> Ordering {
    match x.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// `f64` interval whose endpoints move one ulp outward after each operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    /// A value known only up to `err` in absolute terms.
    pub fn with_error(x: f64, err: f64) -> Self {
        Interval {
            lo: (x - err).next_down(),
            hi: (x + err).next_up(),
        }
    }

    pub fn from_enclosure(e: &Enclosure) -> Self {
        Interval {
            lo: to_f64(e.lo()).next_down(),
            hi: to_f64(e.hi()).next_up(),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn widen(&self, r: f64) -> Self {
        Interval {
            lo: (self.lo - r).next_down(),
            hi: (self.hi + r).next_up(),
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: (self.lo + rhs.lo).next_down(),
            hi: (self.hi + rhs.hi).next_up(),
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }
}

/// Serde adapters that carry rationals as `"p/q"` strings.
pub mod serde_q {
    use super::{parse_rational, render_rational, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{parse_rational, render_rational, Q};
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&render_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|r| parse_rational(r).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
