//! `check-op`: exact equality of two operator expressions.

use serde::Serialize;

use dho_core::parser::parse_operator;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{to_json, Outcome, Status};

#[derive(Clone, Debug, Serialize)]
pub struct CheckOpReport {
    pub command: &'static str,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub lhs_normal_ordered: String,
    pub rhs_normal_ordered: String,
    pub difference: String,
}

/// Splits `args` (joined by spaces) at the single `==`.
pub fn split_equation(args: &[String]) -> Result<(String, String), CliError> {
    let joined = args.join(" ");
    let mut parts = joined.split("==");
    match (parts.next(), parts.next(), parts.next()) {
        (Some(l), Some(r), None) if !l.trim().is_empty() && !r.trim().is_empty() => {
            Ok((l.trim().to_string(), r.trim().to_string()))
        }
        _ => Err(CliError::Usage("expected `check-op <expr> == <expr>`".into())),
    }
}

pub fn run(cfg: &RunConfig, args: &[String]) -> Result<(CheckOpReport, Outcome), CliError> {
    let (lhs, rhs) = split_equation(args)?;
    let sp = cfg.symbolic().map_err(|e| CliError::Usage(e.to_string()))?;
    let a = parse_operator(&lhs, &sp)?;
    let b = parse_operator(&rhs, &sp)?;
    let difference = (a.clone() - b.clone()).to_expr_string();
    let status = Status::from_bool(a == b);
    let report = CheckOpReport {
        command: "check-op",
        status,
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        lhs_normal_ordered: a.to_expr_string(),
        rhs_normal_ordered: b.to_expr_string(),
        difference,
    };
    let details = vec![
        format!("lhs = {}", report.lhs_normal_ordered),
        format!("rhs = {}", report.rhs_normal_ordered),
    ];
    let summary = if a == b {
        format!("{lhs} == {rhs} holds exactly")
    } else {
        format!("{lhs} != {rhs}; lhs - rhs = {}", report.difference)
    };
    let json = to_json(&report);
    Ok((report, Outcome { status, summary, details, json, artifacts: Vec::new() }))
}
