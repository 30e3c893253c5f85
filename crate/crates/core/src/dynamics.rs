//! The classical damped oscillator `q̈ + λq̇ + ω²q = 0`.

use std::io::{self, Write};

use thiserror::Error;

pub use crate::params::Regime;
use crate::params::PhysParams;

/// Within `|λ − 2ω| < NEAR_CRITICAL·ω` the closed form uses the critical
/// branch; the two exponentials of the other branches nearly cancel there.
pub const NEAR_CRITICAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("t_max must be finite and positive (got {0})")]
    Horizon(f64),
    #[error("step must satisfy 0 < h <= t_max (got h = {h}, t_max = {t_max})")]
    Step { h: f64, t_max: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialCondition {
    pub q0: f64,
    pub v0: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(v² + ω²q²)/2` at every sample.
    pub fn energies(&self, params: &PhysParams) -> Vec<f64> {
        self.positions
            .iter()
            .zip(&self.velocities)
            .map(|(q, v)| 0.5 * (v * v + params.omega * params.omega * q * q))
            .collect()
    }

    /// CSV with header `t,q,v`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,q,v")?;
        for k in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.times[k], self.positions[k], self.velocities[k]
            )?;
        }
        Ok(())
    }
}

pub fn regime(params: &PhysParams) -> Regime {
    params.regime()
}

/// Classical damped frequency `ω_d = √(ω² − λ²/4)`; `None` unless
/// underdamped.
pub fn damped_frequency(params: &PhysParams) -> Option<f64> {
    match params.regime() {
        Regime::Underdamped => Some(params.reduced_omega_sq().sqrt()),
        _ => None,
    }
}

/// Exact `(q(t), q̇(t))`.
pub fn closed_form(params: &PhysParams, ic: InitialCondition, t: f64) -> (f64, f64) {
    let gamma = params.lambda / 2.0;
    let InitialCondition { q0, v0 } = ic;
    let decay = (-gamma * t).exp();

    if (params.lambda - 2.0 * params.omega).abs() < NEAR_CRITICAL * params.omega {
        let b = v0 + gamma * q0;
        let q = decay * (q0 + b * t);
        let v = decay * (b - gamma * (q0 + b * t));
        return (q, v);
    }
    match params.regime() {
        Regime::Underdamped => {
            let wd = params.reduced_omega_sq().sqrt();
            let a = q0;
            let b = (v0 + gamma * q0) / wd;
            let (s, c) = (wd * t).sin_cos();
            let q = decay * (a * c + b * s);
            let v = decay * ((b * wd - gamma * a) * c - (a * wd + gamma * b) * s);
            (q, v)
        }
        // exact equality is handled by the near-critical branch above
        Regime::Critical | Regime::Overdamped => {
            let kappa = (gamma * gamma - params.omega * params.omega).sqrt();
            let (r_fast, r_slow) = (-gamma - kappa, -gamma + kappa);
            let c_slow = (v0 - r_fast * q0) / (r_slow - r_fast);
            let c_fast = q0 - c_slow;
            let (e_slow, e_fast) = ((r_slow * t).exp(), (r_fast * t).exp());
            (c_slow * e_slow + c_fast * e_fast, r_slow * c_slow * e_slow + r_fast * c_fast * e_fast)
        }
    }
}

/// Fixed-step classical RK4 for `q̇ = v, v̇ = −λv − ω²q` on `[0, t_max]`.
///
/// Sample times are `k·h`; when `h` does not divide `t_max` the final step is
/// shortened to land on `t_max`.
pub fn integrate_rk4(
    params: &PhysParams,
    ic: InitialCondition,
    t_max: f64,
    h: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(DynamicsError::Horizon(t_max));
    }
    if !(h.is_finite() && h > 0.0 && h <= t_max) {
        return Err(DynamicsError::Step { h, t_max });
    }
    let accel = |q: f64, v: f64| -params.lambda * v - params.omega * params.omega * q;
    let ratio = t_max / h;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio { ratio.round() } else { ratio.ceil() } as usize;

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        positions: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
    };
    let (mut q, mut v) = (ic.q0, ic.v0);
    traj.times.push(0.0);
    traj.positions.push(q);
    traj.velocities.push(v);
    for k in 0..steps {
        let t0 = k as f64 * h;
        let t1 = if k + 1 == steps { t_max } else { (k + 1) as f64 * h };
        let dt = t1 - t0;
        let (k1q, k1v) = (v, accel(q, v));
        let (k2q, k2v) = (v + 0.5 * dt * k1v, accel(q + 0.5 * dt * k1q, v + 0.5 * dt * k1v));
        let (k3q, k3v) = (v + 0.5 * dt * k2v, accel(q + 0.5 * dt * k2q, v + 0.5 * dt * k2v));
        let (k4q, k4v) = (v + dt * k3v, accel(q + dt * k3q, v + dt * k3v));
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        traj.times.push(t1);
        traj.positions.push(q);
        traj.velocities.push(v);
    }
    Ok(traj)
}

/// Largest `|q_rk4(t) − q_exact(t)|` along a trajectory.
pub fn max_position_error(params: &PhysParams, ic: InitialCondition, traj: &Trajectory) -> f64 {
    traj.times
        .iter()
        .zip(&traj.positions)
        .map(|(&t, &q)| (q - closed_form(params, ic, t).0).abs())
        .fold(0.0, f64::max)
}
