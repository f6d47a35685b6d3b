//! Scalar fields for the algebra layer.
//!
//! Every algebraic routine is generic over [`Scalar`] so that the same code
//! path runs in exact arithmetic (for certificates and regression fixtures)
//! and in `f64` (for the hypersurface numerics). The exact field is
//! `Q(√2)`: the orthonormal bases of the oscillator algebra and of `sl(2,R)`
//! with its Killing metric both need `1/√2`, and nothing in the catalog needs
//! any other irrationality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::GeoError;

/// Field operations shared by the exact and the floating-point paths.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when zero tests ignore the tolerance argument.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Exact fields test for equality with zero; floats compare `|x| <= tol`.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Sign in `{-1, 0, 1}`, with the same zero test as [`Scalar::is_zero_within`].
    fn signum_within(&self, tol: f64) -> i32;

    /// Non-negative square root, or `None` when it leaves the field
    /// (or the argument is negative).
    fn try_sqrt(&self) -> Option<Self>;

    fn abs_value(&self) -> Self;

    /// Canonical text form (`p/q` strings for exact values).
    fn render(&self) -> String;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn is_exact_zero(&self) -> bool {
        self.is_zero_within(0.0)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn signum_within(&self, tol: f64) -> i32 {
        if self.abs() <= tol {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }

    fn try_sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// An exact element `rational + surd·√2` of the real quadratic field `Q(√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exact {
    rational: BigRational,
    surd: BigRational,
}

impl Exact {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Self { rational, surd }
    }

    pub fn rational(value: BigRational) -> Self {
        Self { rational: value, surd: BigRational::zero() }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `√2`.
    pub fn sqrt2() -> Self {
        Self { rational: BigRational::zero(), surd: BigRational::one() }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// `a - b√2`.
    fn conjugate(&self) -> Self {
        Self { rational: self.rational.clone(), surd: -self.surd.clone() }
    }

    /// Field norm `a² - 2b²`; zero only for zero because √2 is irrational.
    fn norm(&self) -> BigRational {
        &self.rational * &self.rational - BigRational::from_integer(BigInt::from(2)) * &self.surd * &self.surd
    }

    pub fn signum(&self) -> i32 {
        let a = rational_sign(&self.rational);
        let b = rational_sign(&self.surd);
        if b == 0 {
            return a;
        }
        if a == 0 || a == b {
            return b;
        }
        // Opposite signs: compare a² with 2b².
        match self.norm().cmp(&BigRational::zero()) {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal => 0,
        }
    }
}

fn rational_sign(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

fn render_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).ok()?;
            let q = BigInt::from_str(q).ok()?;
            if q.is_zero() || q.is_negative() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return f.write_str(&render_rational(&self.rational));
        }
        if self.rational.is_zero() {
            return write!(f, "{}*sqrt2", render_rational(&self.surd));
        }
        let op = if self.surd.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}*sqrt2",
            render_rational(&self.rational),
            op,
            render_rational(&self.surd.abs())
        )
    }
}

impl FromStr for Exact {
    type Err = GeoError;

    /// Accepts `p/q`, `p`, `r/s*sqrt2` and `p/q±r/s*sqrt2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeoError::Parse(format!("invalid exact scalar {s:?}"));
        let t = s.trim();
        let Some(body) = t.strip_suffix("*sqrt2") else {
            return parse_rational(t).map(Exact::rational).ok_or_else(bad);
        };
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i);
        let (rational, surd) = match split {
            Some(i) => {
                let a = parse_rational(&body[..i]).ok_or_else(bad)?;
                let b = body[i..].strip_prefix('+').unwrap_or(&body[i..]);
                (a, parse_rational(b).ok_or_else(bad)?)
            }
            None => (BigRational::zero(), parse_rational(body).ok_or_else(bad)?),
        };
        Ok(Exact { rational, surd })
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact { rational: self.rational + rhs.rational, surd: self.surd + rhs.surd }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact { rational: self.rational - rhs.rational, surd: self.surd - rhs.surd }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        if self.is_zero() || rhs.is_zero() {
            return Exact::zero();
        }
        if self.surd.is_zero() && rhs.surd.is_zero() {
            return Exact::rational(self.rational * rhs.rational);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        Exact {
            rational: &self.rational * &rhs.rational + two * &self.surd * &rhs.surd,
            surd: &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        }
    }
}

impl Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        assert!(!rhs.is_zero(), "division by zero in Q(sqrt2)");
        if rhs.surd.is_zero() {
            return Exact { rational: self.rational / &rhs.rational, surd: self.surd / &rhs.rational };
        }
        let n = rhs.norm();
        let p = self * rhs.conjugate();
        Exact { rational: p.rational / &n, surd: p.surd / &n }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact { rational: -self.rational, surd: -self.surd }
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact { rational: BigRational::zero(), surd: BigRational::zero() }
    }

    fn one() -> Self {
        Exact::rational(BigRational::one())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Exact::ratio(num, den)
    }

    fn to_f64(&self) -> f64 {
        let a = self.rational.to_f64().unwrap_or(f64::NAN);
        let b = self.surd.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn signum_within(&self, _tol: f64) -> i32 {
        self.signum()
    }

    fn try_sqrt(&self) -> Option<Self> {
        match self.signum() {
            -1 => return None,
            0 => return Some(Exact::zero()),
            _ => {}
        }
        if self.surd.is_zero() {
            if let Some(r) = rational_sqrt(&self.rational) {
                return Some(Exact::rational(r));
            }
            let half = &self.rational / BigRational::from_integer(BigInt::from(2));
            return rational_sqrt(&half).map(|s| Exact { rational: BigRational::zero(), surd: s });
        }
        // (p + q√2)² = p² + 2q² + 2pq√2.
        let t = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        for p_sq in [(&self.rational + &t) / &two, (&self.rational - &t) / &two] {
            let Some(p) = rational_sqrt(&p_sq) else { continue };
            if p.is_zero() {
                continue;
            }
            let q = &self.surd / (&two * &p);
            let mut root = Exact { rational: p, surd: q };
            if root.signum() < 0 {
                root = -root;
            }
            if root.clone() * root.clone() == *self {
                return Some(root);
            }
        }
        None
    }

    fn abs_value(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn field_arithmetic() {
        let r2 = Exact::sqrt2();
        assert_eq!(r2.clone() * r2.clone(), Exact::from_i64(2));
        let x = ex("1/1+1/1*sqrt2");
        let inv = Exact::one() / x.clone();
        assert_eq!(inv, ex("-1/1+1/1*sqrt2"));
        assert_eq!(inv * x, Exact::one());
    }

    #[test]
    fn sign_of_mixed_terms() {
        assert_eq!(ex("3/2-1/1*sqrt2").signum(), 1);
        assert_eq!(ex("7/5-1/1*sqrt2").signum(), -1);
        assert_eq!(ex("-3/2+1/1*sqrt2").signum(), -1);
        assert_eq!(Exact::zero().signum(), 0);
        assert!(ex("1/2") < ex("1/2*sqrt2"));
    }

    #[test]
    fn square_roots_inside_the_field() {
        assert_eq!(Exact::from_i64(8).try_sqrt(), Some(ex("2/1*sqrt2")));
        assert_eq!(ex("1/2").try_sqrt(), Some(ex("1/2*sqrt2")));
        assert_eq!(ex("9/4").try_sqrt(), Some(ex("3/2")));
        assert_eq!(ex("3/1+2/1*sqrt2").try_sqrt(), Some(ex("1/1+1/1*sqrt2")));
        assert_eq!(Exact::from_i64(3).try_sqrt(), None);
        assert_eq!(Exact::from_i64(-1).try_sqrt(), None);
    }

    #[test]
    fn canonical_text() {
        for s in ["0/1", "-1/2", "1/2*sqrt2", "-3/4-1/2*sqrt2", "5/1+7/3*sqrt2", "-1/1*sqrt2"] {
            assert_eq!(ex(s).to_string(), s);
        }
        assert_eq!(ex("4/8").to_string(), "1/2");
        assert_eq!(ex("3").to_string(), "3/1");
        assert!("1/0".parse::<Exact>().is_err());
        assert!("1/-2".parse::<Exact>().is_err());
        assert!("x".parse::<Exact>().is_err());
    }

    #[test]
    fn float_conversion() {
        assert!((ex("1/2*sqrt2").to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
