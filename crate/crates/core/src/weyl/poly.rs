use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::scalar::{Rational, RationalComplex};
use super::AlgebraError;

/// Largest exponent allowed on either generator.
pub const MAX_EXPONENT: u32 = 16;

/// Exponent pair of the normal-ordered monomial `y^y · p^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub y: u32,
    pub p: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { y: 0, p: 0 };

    pub fn new(y: u32, p: u32) -> Self {
        Self { y, p }
    }

    pub fn degree(&self) -> u32 {
        self.y + self.p
    }

    fn checked(y: u32, p: u32) -> Result<Self, AlgebraError> {
        if y > MAX_EXPONENT {
            return Err(AlgebraError::ExponentCap { generator: 'y', exponent: y });
        }
        if p > MAX_EXPONENT {
            return Err(AlgebraError::ExponentCap { generator: 'p', exponent: p });
        }
        Ok(Self { y, p })
    }
}

/// Polynomial `Σ c_ab · y^a p^b` in normal order.
///
/// The term map never holds a zero coefficient, so structural equality is
/// equality of operators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorPoly {
    terms: BTreeMap<Monomial, RationalComplex>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(RationalComplex::one())
    }

    pub fn constant(c: RationalComplex) -> Self {
        Self::monomial(c, 0, 0).expect("constant term is within the exponent cap")
    }

    pub fn y() -> Self {
        Self::monomial(RationalComplex::one(), 1, 0).unwrap()
    }

    pub fn p() -> Self {
        Self::monomial(RationalComplex::one(), 0, 1).unwrap()
    }

    pub fn monomial(c: RationalComplex, y: u32, p: u32) -> Result<Self, AlgebraError> {
        let mut poly = Self::zero();
        poly.add_term(Monomial::checked(y, p)?, c);
        Ok(poly)
    }

    /// Builds a polynomial from `(y, p, coefficient)` triples, merging repeats.
    pub fn from_terms<I>(terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (u32, u32, RationalComplex)>,
    {
        let mut poly = Self::zero();
        for (y, p, c) in terms {
            poly.add_term(Monomial::checked(y, p)?, c);
        }
        Ok(poly)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalComplex)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, y: u32, p: u32) -> RationalComplex {
        self.terms.get(&Monomial { y, p }).cloned().unwrap_or_default()
    }

    /// Coefficient of the identity monomial.
    pub fn constant_term(&self) -> RationalComplex {
        self.coefficient(0, 0)
    }

    pub fn max_exponents(&self) -> (u32, u32) {
        self.terms
            .keys()
            .fold((0, 0), |(y, p), m| (y.max(m.y), p.max(m.p)))
    }

    /// True when the polynomial is a constant multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn scale(&self, c: &RationalComplex) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.add_term(*m, v * c);
        }
        out
    }

    pub fn scale_real(&self, r: &Rational) -> Self {
        self.scale(&RationalComplex::real(r.clone()))
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: RationalComplex) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Renders in the operator-expression syntax accepted by the parser.
    ///
    /// Output is deterministic: monomials by descending total degree, then
    /// descending power of `y`.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then(b.y.cmp(&a.y)));

        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (m, c) in ordered {
            let mono = monomial_factors(m);
            for (part, unit) in [(&c.re, None), (&c.im, Some("i"))] {
                if part.is_zero() {
                    continue;
                }
                let mut factors = Vec::new();
                let mag = part.abs();
                if !mag.is_one() || (unit.is_none() && mono.is_empty()) {
                    factors.push(rational_literal(&mag));
                }
                if let Some(u) = unit {
                    factors.push(u.to_string());
                }
                factors.extend(mono.iter().cloned());
                pieces.push((part.is_negative(), factors.join("*")));
            }
        }

        let mut out = String::new();
        for (idx, (neg, body)) in pieces.into_iter().enumerate() {
            match (idx, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push_str("0 - ");
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

fn monomial_factors(m: &Monomial) -> Vec<String> {
    let mut v = Vec::new();
    match m.y {
        0 => {}
        1 => v.push("y".to_string()),
        e => v.push(format!("y^{e}")),
    }
    match m.p {
        0 => {}
        1 => v.push("p".to_string()),
        e => v.push(format!("p^{e}")),
    }
    v
}

fn rational_literal(r: &Rational) -> String {
    if r.denom() == &BigInt::one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl Add for &OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: Self) -> OperatorPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Add for OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: Self) -> OperatorPoly {
        &self + &rhs
    }
}

impl Sub for &OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: Self) -> OperatorPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Sub for OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: Self) -> OperatorPoly {
        &self - &rhs
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        OperatorPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        -&self
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

pub(crate) fn checked_monomial(y: u32, p: u32) -> Result<Monomial, AlgebraError> {
    Monomial::checked(y, p)
}
