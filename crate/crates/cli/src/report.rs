//! Report plumbing: error envelope, exit codes, and number formatting.
//!
//! Every float that reaches a report is rounded to 12 significant digits
//! first, so runs are byte-identical and values survive a round trip
//! through text with enough precision for comparisons.

use serde_json::{json, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
        }
    }

    /// The machine-readable envelope printed on the error stream.
    pub fn to_json(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Config => "config",
            ErrorKind::Numerical => "numerical",
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "kind": kind, "message": self.message },
        })
        .to_string()
    }
}

/// Errors from the library split into bad configuration (the request could
/// never work) and numerical failure (the request was well-formed but the
/// computation could not deliver).
pub fn kind_of(e: &obayes::Error) -> ErrorKind {
    use obayes::Error::*;
    match e {
        QuadratureNonConvergent { .. }
        | NonFinite { .. }
        | ImproperPosterior { .. }
        | UndeterminedPosterior { .. }
        | IncompatibleSupports => ErrorKind::Numerical,
        _ => ErrorKind::Config,
    }
}

impl From<obayes::Error> for CliError {
    fn from(e: obayes::Error) -> Self {
        CliError {
            kind: kind_of(&e),
            message: e.to_string(),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// JSON number, rounded; non-finite values are spelled out as strings
/// because JSON has no literal for them.
pub fn num(x: f64) -> Value {
    let r = round_sig(x);
    if r.is_finite() {
        json!(r)
    } else {
        Value::String(format!("{r}"))
    }
}

pub fn num_opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// CSV cell for a float: rounded, shortest round-trip form.
pub fn csv_num(x: f64) -> String {
    format!("{}", round_sig(x))
}
