//! Exact scalars: rationals and the 8th cyclotomic field `Q(ζ)`.
//!
//! Elements of `Q(ζ)` are stored as coordinates over `{1, ζ, ζ², ζ³}` with
//! `ζ⁴ = -1`. The imaginary unit is `ζ²`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = Ratio<i64>;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(narrow(n), narrow(d))
}

fn narrow(n: i128) -> i64 {
    i64::try_from(n).expect("rational overflow")
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(narrow(n))
}

/// Formats a rational as `"p/q"` (denominator always present).
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Rational::new(i64::try_from(n).ok()?, i64::try_from(d).ok()?))
            }
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

/// Floor of a rational.
pub fn floor(q: &Rational) -> i128 {
    q.floor().to_integer() as i128
}

/// An element of the cyclotomic field `Q(ζ)`, `ζ = exp(iπ/4)`.
///
/// Stored as integer numerators over one positive common denominator, kept
/// in lowest terms so that equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: [i64; 4],
    den: i64,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar { num: [0; 4], den: 1 }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
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

#[inline]
fn div_exact(a: i64, d: i64) -> i64 {
    a / d
}

#[inline]
fn mul_checked(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("cyclotomic scalar overflow")
}

#[inline]
fn add_checked(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("cyclotomic scalar overflow")
}

impl Scalar {
    fn normalize(&mut self) {
        if self.num.iter().all(|&x| x == 0) {
            self.den = 1;
            return;
        }
        if self.den == 1 {
            return;
        }
        let mut g = self.den.unsigned_abs();
        for &x in &self.num {
            if g == 1 {
                return;
            }
            if x != 0 {
                g = gcd_u64(g, x.unsigned_abs());
            }
        }
        if g > 1 {
            let g = g as i64;
            for x in self.num.iter_mut() {
                *x = div_exact(*x, g);
            }
            self.den = div_exact(self.den, g);
        }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar { num: [1, 0, 0, 0], den: 1 }
    }

    pub fn from_rational(q: Rational) -> Self {
        Scalar { num: [*q.numer(), 0, 0, 0], den: *q.denom() }
    }

    pub fn from_int(n: i128) -> Self {
        Scalar { num: [narrow(n), 0, 0, 0], den: 1 }
    }

    pub fn from_coords(c: [Rational; 4]) -> Self {
        let mut den: i64 = 1;
        for x in &c {
            let d = *x.denom();
            den = mul_checked(den / gcd_u64(den as u64, d as u64) as i64, d);
        }
        let mut num = [0i64; 4];
        for (n, x) in num.iter_mut().zip(&c) {
            *n = mul_checked(*x.numer(), den / x.denom());
        }
        let mut s = Scalar { num, den };
        s.normalize();
        s
    }

    /// Coordinates over `{1, ζ, ζ², ζ³}`.
    pub fn coords(&self) -> [Rational; 4] {
        self.num.map(|n| Rational::new(n, self.den))
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut s = Scalar::default();
        if k < 4 {
            s.num[k] = 1;
        } else {
            s.num[k - 4] = -1;
        }
        s
    }

    /// The imaginary unit `ζ²`.
    pub fn i() -> Self {
        Scalar::zeta_pow(2)
    }

    /// `(-1)^q = exp(iπq)` for `q` with `4q` integral.
    ///
    /// Returns `None` when `4q` is not an integer (no 8th root of unity).
    pub fn minus_one_pow(q: &Rational) -> Option<Self> {
        let four_q = q * int(4);
        if !four_q.is_integer() {
            return None;
        }
        let k = (four_q.to_integer().rem_euclid(8)) as i64;
        Some(Scalar::zeta_pow(k))
    }

    pub fn is_zero(&self) -> bool {
        self.num == [0; 4]
    }

    pub fn is_one(&self) -> bool {
        self.num == [1, 0, 0, 0] && self.den == 1
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(|&x| x == 0) {
            Some(Rational::new(self.num[0], self.den))
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() || self.is_zero() {
            return Scalar::zero();
        }
        let mut out = self.clone();
        for x in out.num.iter_mut() {
            *x = mul_checked(*x, *q.numer());
        }
        out.den = mul_checked(out.den, *q.denom());
        out.normalize();
        out
    }

    /// Image under the Galois automorphism `ζ ↦ ζ^k` (k odd).
    pub fn galois(&self, k: i64) -> Self {
        let mut out = Scalar::zero();
        for (i, &x) in self.num.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let z = Scalar::zeta_pow(i as i64 * k);
            for (j, &y) in z.num.iter().enumerate() {
                out.num[j] += x * y;
            }
        }
        out.den = self.den;
        out.normalize();
        out
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Scalar::from_rational(q.recip()));
        }
        let conj = &(&self.galois(3) * &self.galois(5)) * &self.galois(7);
        let norm = (self * &conj)
            .as_rational()
            .expect("field norm of Q(zeta_8) is rational");
        Some(conj.scale(&norm.recip()))
    }

    pub fn to_strings(&self) -> [String; 4] {
        self.coords().map(|q| rational_to_string(&q))
    }

    pub fn from_strings(s: &[String]) -> Option<Self> {
        if s.len() != 4 {
            return None;
        }
        let mut c: [Rational; 4] = Default::default();
        for (slot, x) in c.iter_mut().zip(s) {
            *slot = parse_rational(x)?;
        }
        Some(Scalar::from_coords(c))
    }

    fn add_signed(&mut self, rhs: &Scalar, sign: i64) {
        if rhs.is_zero() {
            return;
        }
        if self.den == rhs.den {
            for (a, &b) in self.num.iter_mut().zip(&rhs.num) {
                *a = add_checked(*a, sign * b);
            }
        } else {
            let g = gcd_u64(self.den as u64, rhs.den as u64) as i64;
            let fa = div_exact(rhs.den, g);
            let fb = div_exact(self.den, g);
            for (a, &b) in self.num.iter_mut().zip(&rhs.num) {
                *a = add_checked(mul_checked(*a, fa), sign * mul_checked(b, fb));
            }
            self.den = mul_checked(self.den, fa);
        }
        self.normalize();
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.add_signed(rhs, 1);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.add_signed(rhs, -1);
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(mut self) -> Scalar {
        for x in self.num.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar { num: [0; 4], den: mul_checked(self.den, rhs.den) };
        for (i, &a) in self.num.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.num.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let k = i + j;
                let p = mul_checked(a, b);
                if k < 4 {
                    out.num[k] = add_checked(out.num[k], p);
                } else {
                    out.num[k - 4] = add_checked(out.num[k - 4], -p);
                }
            }
        }
        out.normalize();
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["", "ζ", "ζ²", "ζ³"];
        let mut first = true;
        for (x, name) in self.coords().iter().zip(names) {
            if x.is_zero() {
                continue;
            }
            let neg = x.is_negative();
            let abs = x.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{abs}{name}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(deserializer)?;
        Scalar::from_strings(&v).ok_or_else(|| serde::de::Error::custom("malformed cyclotomic scalar"))
    }
}

/// Serde adapter for a single rational as a `"p/q"` string.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rational_to_string(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom("malformed rational"))
    }
}

/// Serde adapter for a list of rationals as `"p/q"` strings.
pub mod rational_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational_to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).ok_or_else(|| serde::de::Error::custom("malformed rational")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_to_the_fourth_is_minus_one() {
        let z = Scalar::zeta_pow(1);
        let z4 = &(&z * &z) * &(&z * &z);
        assert_eq!(z4, Scalar::from_int(-1));
        assert_eq!(Scalar::zeta_pow(8), Scalar::one());
        assert_eq!(Scalar::zeta_pow(-2), -Scalar::i());
    }

    #[test]
    fn i_squared() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::from_int(-1));
    }

    #[test]
    fn inverse_of_generic_element() {
        let a = Scalar::from_coords([rat(1, 2), int(3), rat(-2, 5), int(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Scalar::one());
        assert!(Scalar::zero().inverse().is_none());
    }

    #[test]
    fn minus_one_powers() {
        assert_eq!(Scalar::minus_one_pow(&int(1)).unwrap(), Scalar::from_int(-1));
        assert_eq!(Scalar::minus_one_pow(&rat(1, 2)).unwrap(), Scalar::i());
        assert_eq!(Scalar::minus_one_pow(&rat(-1, 4)).unwrap(), Scalar::zeta_pow(-1));
        assert!(Scalar::minus_one_pow(&rat(1, 3)).is_none());
    }

    #[test]
    fn string_round_trip() {
        let a = Scalar::from_coords([rat(-7, 3), int(0), int(2), rat(1, 8)]);
        let s = a.to_strings();
        assert_eq!(s[0], "-7/3");
        assert_eq!(s[2], "2/1");
        assert_eq!(Scalar::from_strings(&s).unwrap(), a);
        assert_eq!(parse_rational("5"), Some(int(5)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
