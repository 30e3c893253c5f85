//! `classical`: RK4 against the closed form, and the link between the
//! classical motion and the complex quantum levels.

use serde::Serialize;

use dho_core::analytic::complex_eigenvalue;
use dho_core::dynamics::{damped_frequency, integrate_rk4, max_position_error, InitialCondition};
use dho_core::json::{sig17, sig17_opt};
use dho_core::{PhysParams, Regime};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{to_json, write_atomic, write_with, Outcome, Status};

pub const TRAJECTORY_TOLERANCE: f64 = 1e-8;
/// `ω_d` and `Re(E₁ − E₀)/ħ` come from the same formula; only rounding in
/// `(n + ½)ħΩ` separates them.
pub const FREQUENCY_ULPS: f64 = 4.0;

#[derive(Clone, Copy, Debug)]
pub struct ClassicalOptions {
    pub q0: f64,
    pub v0: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        Self { q0: 1.0, v0: 0.0, t_max: 20.0, step: 1e-3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReport {
    pub command: &'static str,
    pub status: Status,
    pub params: PhysParams,
    pub regime: Regime,
    #[serde(serialize_with = "sig17")]
    pub q0: f64,
    #[serde(serialize_with = "sig17")]
    pub v0: f64,
    #[serde(serialize_with = "sig17")]
    pub t_max: f64,
    #[serde(serialize_with = "sig17")]
    pub step: f64,
    #[serde(serialize_with = "sig17")]
    pub max_position_error: f64,
    #[serde(serialize_with = "sig17_opt")]
    pub damped_frequency: Option<f64>,
    /// `Re(E₁ − E₀)/ħ`.
    #[serde(serialize_with = "sig17_opt")]
    pub level_spacing: Option<f64>,
    /// `λ/2`, the classical amplitude decay rate.
    #[serde(serialize_with = "sig17")]
    pub decay_rate: f64,
    /// `2·Im(E_n)/ħ`.
    #[serde(serialize_with = "sig17_opt")]
    pub quantum_decay_rate: Option<f64>,
    pub dissipation_signature: String,
}

pub fn compare(cfg: &RunConfig, opts: ClassicalOptions) -> Result<(ClassicalReport, dho_core::dynamics::Trajectory), CliError> {
    let params = cfg.phys().map_err(|e| CliError::Usage(e.to_string()))?;
    let ic = InitialCondition { q0: opts.q0, v0: opts.v0 };
    let traj = integrate_rk4(&params, ic, opts.t_max, opts.step).map_err(|e| CliError::Usage(e.to_string()))?;
    let err = max_position_error(&params, ic, &traj);

    let regime = params.regime();
    let wd = damped_frequency(&params);
    let (spacing, quantum_rate) = match regime {
        Regime::Underdamped => {
            let e0 = complex_eigenvalue(0, &params).map_err(|e| CliError::Regime(e.to_string()))?;
            let e1 = complex_eigenvalue(1, &params).map_err(|e| CliError::Regime(e.to_string()))?;
            (Some((e1.re - e0.re) / params.hbar), Some(2.0 * e0.im / params.hbar))
        }
        _ => (None, None),
    };
    let decay_rate = params.lambda / 2.0;
    let freq_ok = match (wd, spacing) {
        (Some(w), Some(s)) => (w - s).abs() <= FREQUENCY_ULPS * f64::EPSILON * w.max(f64::MIN_POSITIVE),
        _ => true,
    };
    let rate_ok = quantum_rate.is_none_or(|q| (q - decay_rate).abs() <= FREQUENCY_ULPS * f64::EPSILON * decay_rate);
    let dissipation_signature = match quantum_rate {
        Some(q) => format!(
            "lambda/2 = 2*Im(E_n)/hbar: classical decay rate {decay_rate} equals twice the level-independent imaginary part over hbar ({q})"
        ),
        None => "no bound-state levels outside the underdamped regime; only the trajectory is checked".to_string(),
    };
    let report = ClassicalReport {
        command: "classical",
        status: Status::from_bool(err <= TRAJECTORY_TOLERANCE && freq_ok && rate_ok),
        params,
        regime,
        q0: opts.q0,
        v0: opts.v0,
        t_max: opts.t_max,
        step: opts.step,
        max_position_error: err,
        damped_frequency: wd,
        level_spacing: spacing,
        decay_rate,
        quantum_decay_rate: quantum_rate,
        dissipation_signature,
    };
    Ok((report, traj))
}

pub fn run(cfg: &RunConfig, opts: ClassicalOptions) -> Result<(ClassicalReport, Outcome), CliError> {
    let (report, traj) = compare(cfg, opts)?;
    let json = to_json(&report);
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.out {
        let path = dir.join("trajectory.csv");
        write_with(&path, |buf| traj.write_csv(buf))?;
        artifacts.push(path);
        let path = dir.join("classical.json");
        write_atomic(&path, json.as_bytes())?;
        artifacts.push(path);
    }
    let fmt_opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.17}"));
    let details = vec![
        format!("regime {}, q0 {}, v0 {}, h {}, t in [0, {}]", format!("{:?}", report.regime).to_lowercase(), opts.q0, opts.v0, opts.step, opts.t_max),
        format!("  classical omega_d        {}", fmt_opt(report.damped_frequency)),
        format!("  Re(E_1 - E_0)/hbar       {}", fmt_opt(report.level_spacing)),
        format!("  {}", report.dissipation_signature),
    ];
    let link = match (report.damped_frequency, report.level_spacing, report.quantum_decay_rate) {
        (Some(_), Some(_), Some(_)) => "omega_d = Re(E1-E0)/hbar and lambda/2 = 2*Im(E_n)/hbar hold",
        _ => "no quantum levels in this regime",
    };
    let summary = format!(
        "RK4 vs closed form max |dq| = {:.3e} (<= {:.0e}); {link}",
        report.max_position_error, TRAJECTORY_TOLERANCE
    );
    Ok((report.clone(), Outcome { status: report.status, summary, details, json, artifacts }))
}
