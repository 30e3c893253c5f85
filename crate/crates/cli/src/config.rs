//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Numeric parameters are read as
//! exact rationals (`0.1` is `1/10`, `1/3` is allowed). Every key has a
//! default, so an empty file is a valid configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dho_core::discretize::{MatrixForm, Stencil};
use dho_core::eigensolve::MAX_TRUSTED_LEVELS;
use dho_core::weyl::{parse_rational, rational_to_f64, Rational, SymbolicParams};
use dho_core::{Grid, PhysParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub m: Rational,
    pub omega: Rational,
    pub lambda: Rational,
    pub hbar: Rational,
    /// Half-width `L` of the box `[−L, L]`.
    pub half_width: Rational,
    /// Number of grid nodes `N`.
    pub points: usize,
    /// Trusted levels `k`.
    pub levels: usize,
    pub dt: Rational,
    pub steps: usize,
    pub form: MatrixForm,
    pub stencil: Stencil,
    pub out: Option<PathBuf>,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: int(1),
            omega: int(1),
            lambda: Rational::new(1.into(), 2.into()),
            hbar: int(1),
            half_width: int(10),
            points: 1200,
            levels: 8,
            dt: Rational::new(1.into(), 1000.into()),
            steps: 5000,
            form: MatrixForm::Eq5,
            stencil: Stencil::Fourth,
            out: None,
        }
    }
}

/// Command-line values that replace file values.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub lambda: Option<Rational>,
    pub omega: Option<Rational>,
    pub half_width: Option<Rational>,
    pub points: Option<usize>,
    pub levels: Option<usize>,
    pub dt: Option<Rational>,
    pub steps: Option<usize>,
    pub form: Option<MatrixForm>,
    pub stencil: Option<Stencil>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Parses and validates a configuration text.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<&'static str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fail = |message: String| ConfigError::Line { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| fail(format!("expected key = value, found {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let canonical = cfg.set(key, value).map_err(fail)?;
            if seen.contains(&canonical) {
                return Err(fail(format!("duplicate key {key:?}")));
            }
            seen.push(canonical);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<&'static str, String> {
        let rational = |v: &str| parse_rational(v).map_err(|e| format!("{key}: {e}"));
        let count = |v: &str| usize::from_str(v).map_err(|_| format!("{key}: expected a non-negative integer, found {v:?}"));
        Ok(match key {
            "m" => {
                self.m = rational(value)?;
                "m"
            }
            "omega" => {
                self.omega = rational(value)?;
                "omega"
            }
            "lambda" => {
                self.lambda = rational(value)?;
                "lambda"
            }
            "hbar" => {
                self.hbar = rational(value)?;
                "hbar"
            }
            "L" => {
                self.half_width = rational(value)?;
                "L"
            }
            "N" => {
                self.points = count(value)?;
                "N"
            }
            "k" => {
                self.levels = count(value)?;
                "k"
            }
            "dt" => {
                self.dt = rational(value)?;
                "dt"
            }
            "steps" => {
                self.steps = count(value)?;
                "steps"
            }
            "form" => {
                self.form = MatrixForm::from_str(value)?;
                "form"
            }
            "stencil" => {
                self.stencil = Stencil::from_str(value)?;
                "stencil"
            }
            "out" => {
                self.out = Some(PathBuf::from(value));
                "out"
            }
            other => return Err(format!("unknown key {other:?}")),
        })
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), ConfigError> {
        if let Some(v) = o.lambda {
            self.lambda = v;
        }
        if let Some(v) = o.omega {
            self.omega = v;
        }
        if let Some(v) = o.half_width {
            self.half_width = v;
        }
        if let Some(v) = o.points {
            self.points = v;
        }
        if let Some(v) = o.levels {
            self.levels = v;
        }
        if let Some(v) = o.dt {
            self.dt = v;
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.form {
            self.form = v;
        }
        if let Some(v) = o.stencil {
            self.stencil = v;
        }
        if o.out.is_some() {
            self.out = o.out;
        }
        self.validate()
    }

    /// Re-checks every constraint of the modules the values feed.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |s: String| ConfigError::Invalid(s);
        self.symbolic().map_err(|e| invalid(e.to_string()))?;
        self.phys().map_err(|e| invalid(e.to_string()))?;
        self.grid().map_err(|e| invalid(e.to_string()))?;
        if self.levels == 0 || self.levels > MAX_TRUSTED_LEVELS {
            return Err(invalid(format!("k must be between 1 and {MAX_TRUSTED_LEVELS} (got {})", self.levels)));
        }
        if self.levels >= self.points {
            return Err(invalid(format!("k = {} needs more than {} grid points", self.levels, self.points)));
        }
        if self.dt <= Rational::from_integer(0.into()) {
            return Err(invalid(format!("dt must be positive (got {})", self.dt)));
        }
        if self.steps == 0 {
            return Err(invalid("steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn symbolic(&self) -> Result<SymbolicParams, dho_core::weyl::AlgebraError> {
        SymbolicParams::new(self.m.clone(), self.omega.clone(), self.lambda.clone(), self.hbar.clone())
    }

    pub fn phys(&self) -> Result<PhysParams, dho_core::params::ParamError> {
        PhysParams::new(
            rational_to_f64(&self.m),
            rational_to_f64(&self.omega),
            rational_to_f64(&self.lambda),
            rational_to_f64(&self.hbar),
        )
    }

    pub fn grid(&self) -> Result<Grid, dho_core::grid::GridError> {
        Grid::new(rational_to_f64(&self.half_width), self.points)
    }

    pub fn dt_f64(&self) -> f64 {
        rational_to_f64(&self.dt)
    }
}
