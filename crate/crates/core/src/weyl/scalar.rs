//! Exact complex-rational scalars.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number used throughout the symbolic layer.
pub type Rational = BigRational;

/// `re + i·im` with both parts exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalComplex {
    pub re: Rational,
    pub im: Rational,
}

impl RationalComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn imag(im: Rational) -> Self {
        Self { re: Rational::zero(), im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rational::from_integer(BigInt::from(n)))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::imag(Rational::one())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    /// Exact division; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        let den = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        if den.is_zero() {
            return None;
        }
        // (a + bi)(c - di) / (c² + d²)
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &den;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &den;
        Some(Self { re, im })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl From<Rational> for RationalComplex {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl Add for &RationalComplex {
    type Output = RationalComplex;
    fn add(self, rhs: Self) -> RationalComplex {
        RationalComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Add for RationalComplex {
    type Output = RationalComplex;
    fn add(self, rhs: Self) -> RationalComplex {
        &self + &rhs
    }
}

impl AddAssign<&RationalComplex> for RationalComplex {
    fn add_assign(&mut self, rhs: &RationalComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &RationalComplex {
    type Output = RationalComplex;
    fn sub(self, rhs: Self) -> RationalComplex {
        RationalComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Sub for RationalComplex {
    type Output = RationalComplex;
    fn sub(self, rhs: Self) -> RationalComplex {
        &self - &rhs
    }
}

impl Mul for &RationalComplex {
    type Output = RationalComplex;
    fn mul(self, rhs: Self) -> RationalComplex {
        RationalComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Mul for RationalComplex {
    type Output = RationalComplex;
    fn mul(self, rhs: Self) -> RationalComplex {
        &self * &rhs
    }
}

impl Neg for RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        RationalComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &RationalComplex {
    type Output = RationalComplex;
    fn neg(self) -> RationalComplex {
        -self.clone()
    }
}

impl fmt::Display for RationalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{} {} {}i", self.re, sign, self.im.abs())
            }
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Error from [`parse_rational`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid exact rational literal {0:?}")]
pub struct RationalParseError(pub String);

/// Parses `"3"`, `"-0.125"`, `"1/3"` or `"1.5/7"` into an exact rational.
///
/// Decimals are read as exact decimal fractions (`0.1` is `1/10`). A leading
/// sign is accepted here; the operator grammar itself has no unary minus.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n = parse_decimal(num).ok_or_else(err)?;
        let d = parse_decimal(den).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(n / d)
    } else {
        parse_decimal(t).ok_or_else(err)
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, body) = match t.as_bytes().first()? {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], i32::from_str(&body[pos + 1..]).ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}
