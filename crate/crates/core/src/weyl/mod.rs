//! Exact algebra of the canonical pair `(y, p)` with `[y, p] = iħ`.
//!
//! Every polynomial is kept in normal order (all `y` to the left of all `p`).
//! Products are reordered with the closed form
//!
//! ```text
//! p^b y^c = Σ_k  k! C(b,k) C(c,k) (−iħ)^k  y^(c−k) p^(b−k)
//! ```
//!
//! which is the rule `p y → y p − iħ` applied to completion.
//!
//! Conjugation by the Gaussian gauge `η = exp(iσy²/ħ)` is done by the
//! substitution `p → p − 2σy`, not by a truncated series: `[y², p] = 2iħy`
//! commutes with `y`, so the Baker–Campbell–Hausdorff expansion of
//! `η p η⁻¹` stops after the first commutator and the substitution is exact.
//! Because conjugation is an algebra automorphism, substituting into each
//! normal-ordered monomial and re-ordering gives `η A η⁻¹` for any `A`.

mod hamiltonian;
mod poly;
mod scalar;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use hamiltonian::{build_hamiltonian, eq7_target, HamiltonianForm, SymbolicParams};
pub use poly::{Monomial, OperatorPoly, MAX_EXPONENT};
pub use scalar::{parse_rational, rational_to_f64, Rational, RationalComplex, RationalParseError};

use poly::{binomial, checked_monomial, factorial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("exponent {exponent} of {generator} exceeds the cap of {}", MAX_EXPONENT)]
    ExponentCap { generator: char, exponent: u32 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0} must be non-negative")]
    Negative(&'static str),
}

/// The Weyl algebra at a fixed exact value of ħ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylAlgebra {
    hbar: Rational,
}

impl WeylAlgebra {
    pub fn new(hbar: Rational) -> Result<Self, AlgebraError> {
        if hbar <= Rational::zero() {
            return Err(AlgebraError::NonPositive("hbar"));
        }
        Ok(Self { hbar })
    }

    pub fn hbar(&self) -> &Rational {
        &self.hbar
    }

    /// `iħ` as a scalar.
    pub fn i_hbar(&self) -> RationalComplex {
        RationalComplex::imag(self.hbar.clone())
    }

    /// Normal-ordered product `a · b`.
    pub fn mul(&self, a: &OperatorPoly, b: &OperatorPoly) -> Result<OperatorPoly, AlgebraError> {
        let mut out = OperatorPoly::zero();
        if a.is_zero() || b.is_zero() {
            return Ok(out);
        }
        // (−iħ)^k for k up to the largest possible contraction count.
        let max_k = a.max_exponents().1.min(b.max_exponents().0);
        let minus_i_hbar = RationalComplex::imag(-self.hbar.clone());
        let mut powers = Vec::with_capacity(max_k as usize + 1);
        powers.push(RationalComplex::one());
        for k in 1..=max_k as usize {
            let next = &powers[k - 1] * &minus_i_hbar;
            powers.push(next);
        }

        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let coeff = ca * cb;
                // y^a p^b · y^c p^d
                for k in 0..=ma.p.min(mb.y) {
                    let combinatorial = factorial(k) * binomial(ma.p, k) * binomial(mb.y, k);
                    let weight = RationalComplex::real(Rational::from_integer(combinatorial));
                    let c = &(&coeff * &weight) * &powers[k as usize];
                    let m = checked_monomial(ma.y + mb.y - k, ma.p + mb.p - k)?;
                    out.add_term(m, c);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, a: &OperatorPoly, n: u32) -> Result<OperatorPoly, AlgebraError> {
        let mut acc = OperatorPoly::one();
        for _ in 0..n {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(
        &self,
        a: &OperatorPoly,
        b: &OperatorPoly,
    ) -> Result<OperatorPoly, AlgebraError> {
        Ok(&self.mul(a, b)? - &self.mul(b, a)?)
    }

    /// Hermitian adjoint: `(c y^a p^b)† = c̄ p^b y^a`, re-normal-ordered.
    pub fn adjoint(&self, a: &OperatorPoly) -> OperatorPoly {
        let mut out = OperatorPoly::zero();
        for (m, c) in a.terms() {
            let p_part = OperatorPoly::monomial(RationalComplex::one(), 0, m.p)
                .expect("exponent already within cap");
            let y_part = OperatorPoly::monomial(c.conj(), m.y, 0)
                .expect("exponent already within cap");
            // p^b y^a never raises an exponent above its input.
            let reordered = self
                .mul(&p_part, &y_part)
                .expect("reordering cannot raise exponents");
            out = &out + &reordered;
        }
        out
    }

    /// `η a η⁻¹` for `η = exp(iσy²/ħ)`.
    pub fn gauge_conjugate(
        &self,
        a: &OperatorPoly,
        sigma: &Rational,
    ) -> Result<OperatorPoly, AlgebraError> {
        let shifted_p = &OperatorPoly::p()
            - &OperatorPoly::y().scale_real(&(sigma * Rational::from_integer(BigInt::from(2))));
        let max_p = a.max_exponents().1;
        let mut powers = vec![OperatorPoly::one()];
        for k in 1..=max_p as usize {
            let next = self.mul(&powers[k - 1], &shifted_p)?;
            powers.push(next);
        }
        let mut out = OperatorPoly::zero();
        for (m, c) in a.terms() {
            let left = OperatorPoly::monomial(c.clone(), m.y, 0)?;
            out = &out + &self.mul(&left, &powers[m.p as usize])?;
        }
        Ok(out)
    }

    /// `((a + a†)/2, (a − a†)/2)`.
    pub fn split_hermitian(&self, a: &OperatorPoly) -> (OperatorPoly, OperatorPoly) {
        let adj = self.adjoint(a);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let herm = (a + &adj).scale_real(&half);
        let anti = (a - &adj).scale_real(&half);
        (herm, anti)
    }

    pub fn is_self_adjoint(&self, a: &OperatorPoly) -> bool {
        self.adjoint(a) == *a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn c(re: i64, im: i64) -> RationalComplex {
        RationalComplex::new(q(re, 1), q(im, 1))
    }

    fn alg(hbar: Rational) -> WeylAlgebra {
        WeylAlgebra::new(hbar).unwrap()
    }

    fn yp() -> OperatorPoly {
        OperatorPoly::monomial(RationalComplex::one(), 1, 1).unwrap()
    }

    #[test]
    fn p_times_y_reorders_with_minus_i_hbar() {
        let hbar = q(3, 7);
        let w = alg(hbar.clone());
        let got = w.mul(&OperatorPoly::p(), &OperatorPoly::y()).unwrap();
        let want = &yp() - &OperatorPoly::constant(RationalComplex::imag(hbar));
        assert_eq!(got, want);
    }

    #[test]
    fn y_times_y_is_y_squared() {
        let w = alg(q(1, 1));
        let got = w.mul(&OperatorPoly::y(), &OperatorPoly::y()).unwrap();
        assert_eq!(got, OperatorPoly::monomial(RationalComplex::one(), 2, 0).unwrap());
    }

    #[test]
    fn yp_squared() {
        // (yp)(yp) = y (y p − iħ) p = y²p² − iħ y p
        let hbar = q(5, 2);
        let w = alg(hbar.clone());
        let got = w.mul(&yp(), &yp()).unwrap();
        let want = OperatorPoly::from_terms([
            (2, 2, RationalComplex::one()),
            (1, 1, RationalComplex::imag(-hbar)),
        ])
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_commutator() {
        let hbar = q(2, 3);
        let w = alg(hbar.clone());
        let comm = w.commutator(&OperatorPoly::y(), &OperatorPoly::p()).unwrap();
        assert_eq!(comm, OperatorPoly::constant(RationalComplex::imag(hbar)));
    }

    #[test]
    fn adjoint_of_yp_picks_up_minus_i_hbar() {
        let hbar = q(1, 1);
        let w = alg(hbar.clone());
        let want = &yp() - &OperatorPoly::constant(RationalComplex::imag(hbar));
        assert_eq!(w.adjoint(&yp()), want);
    }

    #[test]
    fn adjoint_fixes_p_squared_and_conjugates_coefficients() {
        let w = alg(q(1, 1));
        let p2 = OperatorPoly::monomial(RationalComplex::one(), 0, 2).unwrap();
        assert_eq!(w.adjoint(&p2), p2);
        let iy = OperatorPoly::monomial(RationalComplex::i(), 1, 0).unwrap();
        let want = OperatorPoly::monomial(c(0, -1), 1, 0).unwrap();
        assert_eq!(w.adjoint(&iy), want);
    }

    #[test]
    fn gauge_removes_linear_vector_potential() {
        // σ = mλ/4 with m = 3/2, λ = 2/5.
        let (m, lambda) = (q(3, 2), q(2, 5));
        let sigma = &m * &lambda / Rational::from_integer(BigInt::from(4));
        let w = alg(q(7, 3));
        let a = &OperatorPoly::p() + &OperatorPoly::y().scale_real(&(&m * &lambda / q(2, 1)));
        assert_eq!(w.gauge_conjugate(&a, &sigma).unwrap(), OperatorPoly::p());
    }

    #[test]
    fn gauge_fixes_functions_of_y() {
        let w = alg(q(1, 1));
        let y2 = OperatorPoly::monomial(c(3, -2), 2, 0).unwrap();
        assert_eq!(w.gauge_conjugate(&y2, &q(-5, 9)).unwrap(), y2);
    }

    #[test]
    fn gauge_of_p_squared() {
        // (p − mλy/2)² = p² − mλ y p + iħmλ/2 + (m²λ²/4) y²
        let (m, lambda, hbar) = (q(2, 1), q(1, 3), q(5, 4));
        let ml = &m * &lambda;
        let w = alg(hbar.clone());
        let p2 = OperatorPoly::monomial(RationalComplex::one(), 0, 2).unwrap();
        let got = w.gauge_conjugate(&p2, &(&ml / q(4, 1))).unwrap();
        let want = OperatorPoly::from_terms([
            (0, 2, RationalComplex::one()),
            (1, 1, RationalComplex::real(-ml.clone())),
            (0, 0, RationalComplex::imag(&hbar * &ml / q(2, 1))),
            (2, 0, RationalComplex::real(&ml * &ml / q(4, 1))),
        ])
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn split_hermitian_of_p_squared_and_yp() {
        let hbar = q(3, 1);
        let w = alg(hbar.clone());
        let p2 = OperatorPoly::monomial(RationalComplex::one(), 0, 2).unwrap();
        assert_eq!(w.split_hermitian(&p2), (p2.clone(), OperatorPoly::zero()));

        let (h, a) = w.split_hermitian(&yp());
        let half_i_hbar = RationalComplex::imag(&hbar / q(2, 1));
        assert_eq!(h, &yp() - &OperatorPoly::constant(half_i_hbar.clone()));
        assert_eq!(a, OperatorPoly::constant(half_i_hbar));
        assert!(w.is_self_adjoint(&h));
    }

    #[test]
    fn exponent_cap_is_enforced() {
        let w = alg(q(1, 1));
        let y9 = OperatorPoly::monomial(RationalComplex::one(), 9, 0).unwrap();
        assert!(matches!(
            w.mul(&y9, &y9),
            Err(AlgebraError::ExponentCap { generator: 'y', exponent: 18 })
        ));
        assert!(OperatorPoly::monomial(RationalComplex::one(), 0, 17).is_err());
        let yp16 = OperatorPoly::monomial(RationalComplex::one(), 1, 16).unwrap();
        assert!(w.gauge_conjugate(&yp16, &q(1, 1)).is_err());
        assert!(w.gauge_conjugate(&yp16, &q(0, 1)).is_ok());
    }

    #[test]
    fn printed_form_is_stable() {
        let w = alg(q(1, 1));
        let a = w
            .mul(&(&OperatorPoly::p() + &OperatorPoly::y()), &OperatorPoly::p())
            .unwrap();
        assert_eq!(a.to_expr_string(), "y*p + p^2");
        let b = OperatorPoly::from_terms([(0, 0, RationalComplex::new(q(-1, 2), q(3, 4)))])
            .unwrap();
        assert_eq!(b.to_expr_string(), "0 - 1/2 + 3/4*i");
        assert_eq!(OperatorPoly::zero().to_expr_string(), "0");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
    }

    fn small_poly() -> impl Strategy<Value = OperatorPoly> {
        prop::collection::vec((0u32..=2, 0u32..=2, small_rational(), small_rational()), 0..4)
            .prop_map(|terms| {
                OperatorPoly::from_terms(
                    terms.into_iter().map(|(y, p, re, im)| (y, p, RationalComplex::new(re, im))),
                )
                .unwrap()
            })
    }

    fn hbar_strategy() -> impl Strategy<Value = Rational> {
        (1i64..=5, 1i64..=3).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_is_associative(a in small_poly(), b in small_poly(), c in small_poly(), h in hbar_strategy()) {
            let w = alg(h);
            let left = w.mul(&w.mul(&a, &b).unwrap(), &c).unwrap();
            let right = w.mul(&a, &w.mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn adjoint_is_an_anti_involution(a in small_poly(), b in small_poly(), h in hbar_strategy()) {
            let w = alg(h);
            prop_assert_eq!(w.adjoint(&w.adjoint(&a)), a.clone());
            let ab = w.mul(&a, &b).unwrap();
            prop_assert_eq!(w.adjoint(&ab), w.mul(&w.adjoint(&b), &w.adjoint(&a)).unwrap());
        }

        #[test]
        fn gauge_is_an_automorphism(a in small_poly(), b in small_poly(), s in small_rational(), h in hbar_strategy()) {
            let w = alg(h);
            let ab = w.mul(&a, &b).unwrap();
            let lhs = w.gauge_conjugate(&ab, &s).unwrap();
            let rhs = w.mul(&w.gauge_conjugate(&a, &s).unwrap(), &w.gauge_conjugate(&b, &s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let back = w.gauge_conjugate(&w.gauge_conjugate(&a, &s).unwrap(), &-s.clone()).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn split_reconstructs(a in small_poly(), h in hbar_strategy()) {
            let w = alg(h);
            let (herm, anti) = w.split_hermitian(&a);
            prop_assert_eq!(&herm + &anti, a);
            prop_assert_eq!(w.adjoint(&herm), herm.clone());
            prop_assert_eq!(w.adjoint(&anti), -&anti);
        }
    }
}
