//! Report envelope: every command emits one JSON document with the command
//! name, a timestamp, the effective configuration and the result. Reports
//! from identical configurations are byte-identical apart from the
//! `timestamp_unix_s` field.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub timestamp_unix_s: u64,
    pub config: Value,
    pub result: Value,
}

pub fn emit(
    command: &str,
    config: Value,
    result: Value,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let report = Report {
        command: command.to_string(),
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config,
        result,
    };
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError { message: format!("report serialization: {e}"), exit_code: 3 })?;
    match out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| CliError {
            message: format!("writing {}: {e}", path.display()),
            exit_code: 3,
        })?,
        None => println!("{text}"),
    }
    Ok(())
}

pub fn config_value(
    tol_rank: f64,
    tol_res: f64,
    seed: u64,
    restarts: usize,
    extra: Value,
) -> Value {
    let mut base = json!({
        "tol_rank": tol_rank,
        "tol_res": tol_res,
        "seed": seed,
        "restarts": restarts,
    });
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        for (k, v) in e {
            b.insert(k, v);
        }
    }
    base
}
