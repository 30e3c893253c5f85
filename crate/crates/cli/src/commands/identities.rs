//! `verify-identities`: the exact operator identities of the damped
//! oscillator, checked in the Weyl algebra.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use dho_core::weyl::{
    build_hamiltonian, eq7_target, AlgebraError, HamiltonianForm, OperatorPoly, Rational,
    SymbolicParams,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{to_json, Outcome, Status};

pub const DEFAULT_RANDOM_SETS: usize = 20;
pub const DEFAULT_SEED: u64 = 0x05ee_dd40;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParameterSet {
    pub m: String,
    pub omega: String,
    pub lambda: String,
    pub hbar: String,
    pub checks: Vec<IdentityCheck>,
}

impl ParameterSet {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySuite {
    pub command: &'static str,
    pub status: Status,
    pub seed: u64,
    /// The configured parameters first, then the random sets.
    pub sets: Vec<ParameterSet>,
}

fn check(name: &'static str, lhs: OperatorPoly, rhs: OperatorPoly) -> IdentityCheck {
    IdentityCheck { name, holds: lhs == rhs, lhs: lhs.to_expr_string(), rhs: rhs.to_expr_string() }
}

/// Every identity at one parameter set.
pub fn check_identities(sp: &SymbolicParams) -> Result<ParameterSet, AlgebraError> {
    let alg = sp.algebra();
    let sigma = sp.gauge_sigma();
    let eq2 = build_hamiltonian(sp, HamiltonianForm::Eq2)?;
    let eq4 = build_hamiltonian(sp, HamiltonianForm::Eq4)?;
    let eq5 = build_hamiltonian(sp, HamiltonianForm::Eq5)?;
    let offset = OperatorPoly::constant(sp.imaginary_offset());

    let mut checks = vec![
        check("EQ2 = EQ4", eq2.clone(), eq4.clone()),
        check("EQ4 = EQ5", eq4, eq5),
        check("anti-Hermitian part = i*hbar*lambda/4", alg.split_hermitian(&eq2).1, offset),
        check("gauge(H) = reduced oscillator + i*hbar*lambda/4", alg.gauge_conjugate(&eq2, &sigma)?, eq7_target(sp)),
    ];
    let half_m_lambda = &sp.m * &sp.lambda * Rational::new(1.into(), 2.into());
    let shifted = OperatorPoly::p() + OperatorPoly::y().scale_real(&half_m_lambda);
    checks.push(check("gauge(p + m*lambda*y/2) = p", alg.gauge_conjugate(&shifted, &sigma)?, OperatorPoly::p()));
    let yp = alg.mul(&OperatorPoly::y(), &OperatorPoly::p())?;
    checks.push(check(
        "adjoint(y*p) = y*p - i*hbar",
        alg.adjoint(&yp),
        yp - OperatorPoly::constant(alg.i_hbar()),
    ));
    Ok(ParameterSet {
        m: sp.m.to_string(),
        omega: sp.omega.to_string(),
        lambda: sp.lambda.to_string(),
        hbar: sp.hbar.to_string(),
        checks,
    })
}

fn random_rational(rng: &mut StdRng, allow_zero: bool) -> Rational {
    let lo = if allow_zero { 0 } else { 1 };
    Rational::new(rng.gen_range(lo..=12i64).into(), rng.gen_range(1..=12i64).into())
}

/// Parameter sets with small positive rational entries (`λ` may be zero).
pub fn random_sets(count: usize, seed: u64) -> Vec<SymbolicParams> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = random_rational(&mut rng, false);
            let omega = random_rational(&mut rng, false);
            let lambda = random_rational(&mut rng, true);
            let hbar = random_rational(&mut rng, false);
            SymbolicParams::new(m, omega, lambda, hbar).expect("generated parameters are in range")
        })
        .collect()
}

pub fn run(cfg: &RunConfig, random: usize, seed: u64) -> Result<(IdentitySuite, Outcome), CliError> {
    let configured = cfg.symbolic().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut sets = Vec::with_capacity(random + 1);
    for sp in std::iter::once(configured).chain(random_sets(random, seed)) {
        sets.push(check_identities(&sp).map_err(|e| CliError::Numerical(e.to_string()))?);
    }
    let failures = sets.iter().filter(|s| !s.holds()).count();
    let status = Status::from_bool(failures == 0);
    let suite = IdentitySuite { command: "verify-identities", status, seed, sets };

    let first = &suite.sets[0];
    let mut details = vec![format!(
        "parameters m={} omega={} lambda={} hbar={}",
        first.m, first.omega, first.lambda, first.hbar
    )];
    for c in &first.checks {
        details.push(format!("  [{}] {}: {}  vs  {}", if c.holds { "ok" } else { "MISMATCH" }, c.name, c.lhs, c.rhs));
    }
    details.push(format!("random parameter sets: {random} (seed {seed})"));
    let checks_per_set = first.checks.len();
    let summary = format!(
        "{} of {} parameter sets satisfy all {} identities exactly (EQ2 = EQ4 = EQ5, anti-Hermitian part, gauge conjugation, adjoint)",
        suite.sets.len() - failures,
        suite.sets.len(),
        checks_per_set
    );
    let json = to_json(&suite);
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out {
        let path = dir.join("identities.json");
        crate::output::write_atomic(&path, json.as_bytes())?;
        artifacts.push(path);
    }
    Ok((suite, Outcome { status, summary, details, json, artifacts }))
}
