use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{AlgebraError, OperatorPoly, Rational, RationalComplex, WeylAlgebra};

/// Exact physical parameters for the symbolic layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicParams {
    pub m: Rational,
    pub omega: Rational,
    pub lambda: Rational,
    pub hbar: Rational,
}

impl SymbolicParams {
    pub fn new(
        m: Rational,
        omega: Rational,
        lambda: Rational,
        hbar: Rational,
    ) -> Result<Self, AlgebraError> {
        let zero = Rational::zero();
        if m <= zero {
            return Err(AlgebraError::NonPositive("m"));
        }
        if omega <= zero {
            return Err(AlgebraError::NonPositive("omega"));
        }
        if lambda < zero {
            return Err(AlgebraError::Negative("lambda"));
        }
        if hbar <= zero {
            return Err(AlgebraError::NonPositive("hbar"));
        }
        Ok(Self { m, omega, lambda, hbar })
    }

    pub fn algebra(&self) -> WeylAlgebra {
        WeylAlgebra::new(self.hbar.clone()).expect("hbar validated positive")
    }

    /// Gauge strength `σ = mλ/4` of `η = exp(iσy²/ħ)`.
    pub fn gauge_sigma(&self) -> Rational {
        &self.m * &self.lambda / int(4)
    }

    /// `ω² − λ²/4`, the squared reduced frequency.
    pub fn reduced_omega_sq(&self) -> Rational {
        &self.omega * &self.omega - &self.lambda * &self.lambda / int(4)
    }

    /// The scalar `iħλ/4`.
    pub fn imaginary_offset(&self) -> RationalComplex {
        RationalComplex::imag(&self.hbar * &self.lambda / int(4))
    }
}

/// Which algebraic rendering of the damped-oscillator Hamiltonian to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HamiltonianForm {
    /// `p²/2m + mω²y²/2 + (λ/2)·y p`, ordering as written.
    Eq2,
    /// `p²/2m + mω²y²/2 + (λ/4)(y p + p y) + iħλ/4`.
    Eq4,
    /// `(p + mλy/2)²/2m + m(ω² − λ²/4)y²/2 + iħλ/4`.
    Eq5,
}

impl HamiltonianForm {
    pub const ALL: [HamiltonianForm; 3] = [Self::Eq2, Self::Eq4, Self::Eq5];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Eq2 => "EQ2",
            Self::Eq4 => "EQ4",
            Self::Eq5 => "EQ5",
        }
    }
}

impl fmt::Display for HamiltonianForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HamiltonianForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eq2" => Ok(Self::Eq2),
            "eq4" => Ok(Self::Eq4),
            "eq5" => Ok(Self::Eq5),
            other => Err(format!("unknown form {other:?} (expected eq2, eq4 or eq5)")),
        }
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn real(r: Rational) -> RationalComplex {
    RationalComplex::real(r)
}

fn mono(c: Rational, y: u32, p: u32) -> OperatorPoly {
    OperatorPoly::monomial(real(c), y, p).expect("degree two is within the cap")
}

/// Expands the requested form into normal order.
pub fn build_hamiltonian(
    params: &SymbolicParams,
    form: HamiltonianForm,
) -> Result<OperatorPoly, AlgebraError> {
    let w = params.algebra();
    let SymbolicParams { m, omega, lambda, .. } = params;
    let kinetic = mono(int(1) / (int(2) * m), 0, 2);
    let potential = mono(m * omega * omega / int(2), 2, 0);
    let y = OperatorPoly::y();
    let p = OperatorPoly::p();

    Ok(match form {
        HamiltonianForm::Eq2 => {
            let damping = w.mul(&y, &p)?.scale_real(&(lambda / int(2)));
            &(&kinetic + &potential) + &damping
        }
        HamiltonianForm::Eq4 => {
            let sym = &w.mul(&y, &p)? + &w.mul(&p, &y)?;
            let damping = sym.scale_real(&(lambda / int(4)));
            let offset = OperatorPoly::constant(params.imaginary_offset());
            &(&(&kinetic + &potential) + &damping) + &offset
        }
        HamiltonianForm::Eq5 => {
            let shifted = &p + &y.scale_real(&(m * lambda / int(2)));
            let square = w.pow(&shifted, 2)?.scale_real(&(int(1) / (int(2) * m)));
            let reduced = mono(m * params.reduced_omega_sq() / int(2), 2, 0);
            let offset = OperatorPoly::constant(params.imaginary_offset());
            &(&square + &reduced) + &offset
        }
    })
}

/// `p²/2m + m(ω² − λ²/4)y²/2 + iħλ/4`: an undamped oscillator of reduced
/// frequency shifted by a constant imaginary energy.
pub fn eq7_target(params: &SymbolicParams) -> OperatorPoly {
    let m = &params.m;
    let kinetic = mono(int(1) / (int(2) * m), 0, 2);
    let reduced = mono(m * params.reduced_omega_sq() / int(2), 2, 0);
    &(&kinetic + &reduced) + &OperatorPoly::constant(params.imaginary_offset())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn params(m: Rational, omega: Rational, lambda: Rational, hbar: Rational) -> SymbolicParams {
        SymbolicParams::new(m, omega, lambda, hbar).unwrap()
    }

    #[test]
    fn unit_parameters_eq2() {
        let sp = params(q(1, 1), q(1, 1), q(1, 1), q(1, 1));
        let h = build_hamiltonian(&sp, HamiltonianForm::Eq2).unwrap();
        let want = OperatorPoly::from_terms([
            (0, 2, real(q(1, 2))),
            (2, 0, real(q(1, 2))),
            (1, 1, real(q(1, 2))),
        ])
        .unwrap();
        assert_eq!(h, want);
    }

    #[test]
    fn undamped_forms_reduce_to_oscillator() {
        let sp = params(q(3, 2), q(5, 7), q(0, 1), q(2, 3));
        let want = OperatorPoly::from_terms([
            (0, 2, real(q(1, 3))),
            (2, 0, real(q(3, 2) * q(25, 49) / q(2, 1))),
        ])
        .unwrap();
        for form in HamiltonianForm::ALL {
            assert_eq!(build_hamiltonian(&sp, form).unwrap(), want, "{form}");
        }
    }

    #[test]
    fn three_forms_coincide() {
        let sp = params(q(7, 3), q(4, 5), q(9, 11), q(13, 17));
        let h2 = build_hamiltonian(&sp, HamiltonianForm::Eq2).unwrap();
        assert_eq!(h2, build_hamiltonian(&sp, HamiltonianForm::Eq4).unwrap());
        assert_eq!(h2, build_hamiltonian(&sp, HamiltonianForm::Eq5).unwrap());
    }

    #[test]
    fn antihermitian_part_is_the_imaginary_offset() {
        let sp = params(q(2, 1), q(3, 1), q(1, 2), q(5, 3));
        let h = build_hamiltonian(&sp, HamiltonianForm::Eq2).unwrap();
        let (_, anti) = sp.algebra().split_hermitian(&h);
        assert_eq!(anti, OperatorPoly::constant(RationalComplex::imag(q(5, 24))));
    }

    #[test]
    fn gauge_reduces_to_shifted_oscillator() {
        let sp = params(q(2, 3), q(6, 5), q(1, 4), q(3, 2));
        let h = build_hamiltonian(&sp, HamiltonianForm::Eq2).unwrap();
        let conj = sp.algebra().gauge_conjugate(&h, &sp.gauge_sigma()).unwrap();
        assert_eq!(conj, eq7_target(&sp));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(SymbolicParams::new(q(0, 1), q(1, 1), q(1, 1), q(1, 1)).is_err());
        assert!(SymbolicParams::new(q(1, 1), q(-1, 1), q(1, 1), q(1, 1)).is_err());
        assert!(SymbolicParams::new(q(1, 1), q(1, 1), q(-1, 1), q(1, 1)).is_err());
        assert!(SymbolicParams::new(q(1, 1), q(1, 1), q(1, 1), q(0, 1)).is_err());
    }

    #[test]
    fn form_names_parse() {
        assert_eq!("eq5".parse::<HamiltonianForm>().unwrap(), HamiltonianForm::Eq5);
        assert_eq!("EQ2".parse::<HamiltonianForm>().unwrap(), HamiltonianForm::Eq2);
        assert!("eq3".parse::<HamiltonianForm>().is_err());
    }
}
