//! Fixed-width float serialization: every `f64` is written with 17
//! significant digits so reports are byte-stable and round-trip exactly.

use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::Number;

/// `{:.16e}`; non-finite values have no JSON representation and become
/// `null`.
pub fn format_f64(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    match format_f64(*x).and_then(|t| Number::from_str(&t).ok()) {
        Some(n) => n.serialize(s),
        None => s.serialize_none(),
    }
}

pub fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig17(v, s),
        None => s.serialize_none(),
    }
}

pub fn sig17_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct W(#[serde(serialize_with = "sig17")] f64);
    s.collect_seq(xs.iter().map(|&x| W(x)))
}
