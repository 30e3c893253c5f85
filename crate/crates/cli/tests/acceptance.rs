//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the verdict lines always
//! reach the output; the process fails if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use dho_cli::commands::classical::{self, ClassicalOptions};
use dho_cli::commands::evolve::{self, InitialState};
use dho_cli::commands::gauge::{matrix_identity, residual_table};
use dho_cli::commands::identities::{check_identities, random_sets, DEFAULT_SEED};
use dho_cli::commands::spectrum::{self, compute_levels};
use dho_cli::config::RunConfig;
use dho_core::discretize::{boundary_commutator_defect, MatrixForm, Stencil};
use dho_core::weyl::{OperatorPoly, Rational, RationalComplex, SymbolicParams};

struct Verdicts {
    failed: usize,
}

impl Verdicts {
    fn record(&mut self, id: u32, title: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} criterion {id}: {title} — {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn info(text: String) {
    println!("INFO {text}");
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `p²/2m + m(ω² − λ²/4)y²/2 + iħλ/4`, written out term by term.
fn reduced_oscillator(sp: &SymbolicParams) -> OperatorPoly {
    let SymbolicParams { m, omega, lambda, hbar } = sp;
    let kinetic = q(1, 2) / m;
    let potential = m * (omega * omega - lambda * lambda / q(4, 1)) / q(2, 1);
    OperatorPoly::from_terms([
        (0, 2, RationalComplex::real(kinetic)),
        (2, 0, RationalComplex::real(potential)),
        (0, 0, RationalComplex::imag(hbar * lambda / q(4, 1))),
    ])
    .unwrap()
}

fn acceptance_config() -> RunConfig {
    // the defaults are the acceptance parameters
    RunConfig::default()
}

fn criterion_1(v: &mut Verdicts) {
    let start = Instant::now();
    let mut sets = random_sets(20, DEFAULT_SEED);
    sets.push(SymbolicParams::new(q(1, 1), q(1, 1), q(1, 2), q(1, 1)).unwrap());
    let mut failures = Vec::new();
    for sp in &sets {
        let result = check_identities(sp).unwrap();
        // independent oracles for the gauge target and the adjoint
        let alg = sp.algebra();
        let eq5 = dho_core::weyl::build_hamiltonian(sp, dho_core::weyl::HamiltonianForm::Eq5).unwrap();
        let target_ok = alg.gauge_conjugate(&eq5, &(&sp.m * &sp.lambda / q(4, 1))).unwrap() == reduced_oscillator(sp);
        let yp = OperatorPoly::monomial(RationalComplex::one(), 1, 1).unwrap();
        let adj_expected = OperatorPoly::from_terms([
            (1, 1, RationalComplex::one()),
            (0, 0, RationalComplex::imag(-sp.hbar.clone())),
        ])
        .unwrap();
        let adjoint_ok = alg.adjoint(&yp) == adj_expected;
        if !(result.holds() && target_ok && adjoint_ok) {
            failures.push(format!("m={} omega={} lambda={} hbar={}", sp.m, sp.omega, sp.lambda, sp.hbar));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    v.record(
        1,
        "symbolic identity suite",
        failures.is_empty() && elapsed < 1.0,
        format!(
            "{} random + 1 acceptance parameter sets, {} failing, {:.3} s (EQ2=EQ4=EQ5, anti-Hermitian part, both gauge identities, adjoint)",
            sets.len() - 1,
            failures.len(),
            elapsed
        ),
    );
    for f in failures {
        info(format!("identity failure at {f}"));
    }
}

fn main() -> ExitCode {
    let mut v = Verdicts { failed: 0 };
    let cfg = acceptance_config();
    let params = cfg.phys().unwrap();
    let grid = cfg.grid().unwrap();
    println!(
        "acceptance grid: L={} N={} h={:.6} stencil={} | m={} omega={} lambda={} hbar={}",
        grid.half_width(),
        grid.len(),
        grid.spacing(),
        cfg.stencil.as_str(),
        params.m,
        params.omega,
        params.lambda,
        params.hbar
    );

    criterion_1(&mut v);

    // the dense eigensolves dominate the run time; start them together
    let undamped = {
        let mut c = cfg.clone();
        c.lambda = q(0, 1);
        c
    };
    let started = Instant::now();
    let (eq5, eq2, control, second) = std::thread::scope(|s| {
        let eq5 = s.spawn(|| spectrum::solve(&cfg));
        let eq2 = s.spawn(|| compute_levels(&params, &grid, MatrixForm::Eq2, cfg.stencil, cfg.levels));
        let control = s.spawn(|| spectrum::solve(&undamped));
        let second = s.spawn(|| compute_levels(&params, &grid, MatrixForm::Eq5, Stencil::Second, cfg.levels));
        (eq5.join().unwrap(), eq2.join().unwrap(), control.join().unwrap(), second.join().unwrap())
    });
    info(format!("four dense eigensolves at N={} took {:.1} s", grid.len(), started.elapsed().as_secs_f64()));
    let (op5, run5) = eq5.expect("EQ5 spectrum");
    let (op2, rep2) = eq2.expect("EQ2 spectrum");
    let (_, control) = control.expect("undamped spectrum");

    // criterion 2: levels against an independently evaluated closed form
    let omega_r = (params.omega * params.omega - params.lambda * params.lambda / 4.0).sqrt();
    let mut max_err: f64 = 0.0;
    let mut max_im_dev: f64 = 0.0;
    for l in &run5.report.levels {
        let exact = Complex64::new((l.n as f64 + 0.5) * params.hbar * omega_r, params.hbar * params.lambda / 4.0);
        max_err = max_err.max((Complex64::new(l.numeric_re, l.numeric_im) - exact).norm());
        max_im_dev = max_im_dev.max((l.numeric_im - 0.125).abs());
    }
    v.record(
        2,
        "spectrum reproduction (EQ5, L=10, N=1200, lowest 8)",
        run5.report.levels.len() == 8 && max_err <= 2e-4 && max_im_dev <= 2e-4,
        format!("max |E_num - E_n| = {max_err:.3e}, max |Im E_num - 0.125| = {max_im_dev:.3e} (tolerance 2e-4)"),
    );

    // criterion 3: the reported offset and its verdict
    let o = &run5.offset;
    let json = dho_cli::output::to_json(&run5);
    let flagged = json.contains("\"complex_offset_confirmed\": true") && json.contains("\"real_spectrum_rejected\": true");
    v.record(
        3,
        "complex offset vs purely real spectrum",
        (o.measured_mean - 0.125).abs() <= 2e-4 && o.measured_mean.abs() > 2e-4 && flagged,
        format!(
            "mean Im E = {:.15} vs hbar*lambda/4 = 0.125 (|diff| {:.3e}); real-spectrum prediction 0 rejected; report flag {}",
            o.measured_mean,
            o.deviation,
            if flagged { "confirmed" } else { "MISSING" }
        ),
    );

    // criterion 4: form equivalence
    let (identity_dev, identity_tol) = matrix_identity(&op2, &op5);
    let form_diff = rep2
        .levels
        .iter()
        .zip(&run5.report.levels)
        .map(|(a, b)| (Complex64::new(a.numeric_re, a.numeric_im) - Complex64::new(b.numeric_re, b.numeric_im)).norm())
        .fold(0.0, f64::max);
    let bound = 1e-8 + params.lambda / 4.0 * boundary_commutator_defect(&grid, &params, cfg.stencil);
    v.record(
        4,
        "EQ2/EQ5 form equivalence",
        identity_dev <= identity_tol && form_diff <= bound,
        format!(
            "entrywise |EQ2 - EQ5 - (lambda/4)([Y,P] - i*hbar)| = {identity_dev:.3e} (<= {identity_tol:.3e}); trusted levels differ by {form_diff:.3e} (<= {bound:.4e})"
        ),
    );
    info(format!("measured EQ2/EQ5 level difference {form_diff:.3e} exceeds the 1e-8 floor alone; the matrices differ by an O(h^4) kinetic term"));

    // criterion 5: residuals, and their decay under refinement
    let fourth = residual_table(&params, &grid, Stencil::Fourth, 6).unwrap();
    let second_res = residual_table(&params, &grid, Stencil::Second, 6).unwrap();
    let max_r4 = fourth.iter().map(|r| r.residual).fold(0.0, f64::max);
    let min_ratio4 = fourth.iter().map(|r| r.refinement_ratio).fold(f64::INFINITY, f64::min);
    let max_r2 = second_res.iter().map(|r| r.residual).fold(0.0, f64::max);
    let ratios2: Vec<f64> = second_res.iter().map(|r| r.refinement_ratio).collect();
    let ratio2_ok = ratios2.iter().all(|r| (3.5..=4.5).contains(r));
    v.record(
        5,
        "eigenfunction residuals (n <= 5)",
        max_r4 <= 1e-3 && min_ratio4 >= 4.0 && max_r2 <= 1e-3 && ratio2_ok,
        format!(
            "acceptance grid max residual {max_r4:.3e} (<= 1e-3), refinement ratio >= {min_ratio4:.2}; second-order stencil max residual {max_r2:.3e}, ratios {:.3}..{:.3} (≈4)",
            ratios2.iter().copied().fold(f64::INFINITY, f64::min),
            ratios2.iter().copied().fold(0.0, f64::max)
        ),
    );

    // criterion 6: norm growth
    let started = Instant::now();
    let (damped, _) = evolve::simulate(&cfg, InitialState::Level(0)).unwrap();
    let (flat, _) = evolve::simulate(&undamped, InitialState::Level(0)).unwrap();
    let rel = (damped.slope - 0.25).abs() / 0.25;
    v.record(
        6,
        "norm growth rate",
        rel <= 1e-3 && flat.slope.abs() <= 1e-6,
        format!(
            "slope {:.12} vs lambda/2 = 0.25 (relative {rel:.3e}); lambda=0 slope {:.3e}; {:.1} s",
            damped.slope,
            flat.slope,
            started.elapsed().as_secs_f64()
        ),
    );

    // criterion 7: classical cross-check
    let started = Instant::now();
    let (cl, outcome) = classical::run(&cfg, ClassicalOptions::default()).unwrap();
    let wd = (1.0f64 - 0.25 * 0.25).sqrt();
    let spacing = cl.level_spacing.unwrap();
    let states_identity = outcome.summary.contains("lambda/2 = 2*Im(E_n)/hbar")
        && cl.dissipation_signature.starts_with("lambda/2 = 2*Im(E_n)/hbar");
    v.record(
        7,
        "classical cross-check",
        cl.max_position_error <= 1e-8
            && (spacing - wd).abs() <= 4.0 * f64::EPSILON
            && cl.damped_frequency == Some(wd)
            && states_identity
            && started.elapsed().as_secs_f64() < 1.0,
        format!(
            "RK4 vs closed form max |dq| = {:.3e} on [0, 20] (h = 1e-3); omega_d = {wd:.17} vs Re(E1-E0)/hbar = {spacing:.17}; report states lambda/2 = 2*Im(E_n)/hbar: {}",
            cl.max_position_error,
            if states_identity { "yes" } else { "NO" }
        ),
    );

    // criterion 8: Hermitian control
    let mut max_err0: f64 = 0.0;
    let mut max_im0: f64 = 0.0;
    for l in &control.report.levels {
        max_err0 = max_err0.max((l.numeric_re - (l.n as f64 + 0.5)).abs().hypot(l.numeric_im));
        max_im0 = max_im0.max(l.numeric_im.abs());
    }
    v.record(
        8,
        "Hermitian control (lambda = 0)",
        control.report.levels.len() == 8 && max_err0 <= 2e-4 && max_im0 <= 1e-10,
        format!("max |E_num - (n + 1/2)| = {max_err0:.3e} (<= 2e-4), max |Im E_num| = {max_im0:.3e} (<= 1e-10)"),
    );

    // convergence order from the same levels at twice the spacing
    let coarse = dho_core::Grid::new(grid.half_width(), grid.len().div_ceil(2)).unwrap();
    if let Ok((_, rep)) = compute_levels(&params, &coarse, MatrixForm::Eq5, cfg.stencil, cfg.levels) {
        let ratio = rep.max_abs_error() / run5.max_abs_error;
        info(format!(
            "N={} max level error {:.3e}; error ratio to N={} is {:.1} (observed order {:.2})",
            coarse.len(),
            rep.max_abs_error(),
            grid.len(),
            ratio,
            ratio.log2()
        ));
    }

    match second {
        Ok((_, rep)) => info(format!(
            "second-order stencil at the same grid: max level error {:.3e} (fourth order: {:.3e})",
            rep.max_abs_error(),
            run5.max_abs_error
        )),
        Err(e) => info(format!("second-order spectrum failed: {e}")),
    }

    if v.failed == 0 {
        println!("acceptance: all 8 criteria PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria FAIL", v.failed);
        ExitCode::FAILURE
    }
}
