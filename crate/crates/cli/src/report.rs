//! Report envelope, configuration hash and the published report schema.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::run::Outcome;
use crate::scenario::Scenario;

pub const SCHEMA_VERSION: u64 = 1;

/// SHA-256 of the canonical JSON of the resolved scenario, seed included.
pub fn config_hash(s: &Scenario) -> String {
    let canonical = serde_json::to_vec(s).expect("scenarios serialize");
    hex::encode(Sha256::digest(canonical))
}

/// The report object. Everything except `timestamp` is a function of the
/// scenario alone.
pub fn envelope(s: &Scenario, o: &Outcome, timestamp: bool) -> Value {
    let mut v = json!({
        "schema": SCHEMA_VERSION,
        "scenario": s.name,
        "kind": s.kind.name(),
        "config_hash": config_hash(s),
        "seed": s.seed,
        "domain": {
            "defining": s.domain.defining,
            "nvars": s.domain.nvars,
            "m": s.domain.m,
            // radii and distances scale with rho, which is used as given
            "rho_normalization": "raw",
        },
        "params": s.params,
        "pass": o.pass,
        "result": o.result,
    });
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        v["timestamp"] = json!(secs);
    }
    v
}

pub fn schema() -> Value {
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "lineal experiment report",
        "type": "object",
        "required": ["schema", "scenario", "kind", "config_hash", "seed", "domain", "params", "pass", "result"],
        "properties": {
            "schema": { "type": "integer", "const": SCHEMA_VERSION },
            "scenario": { "type": "string" },
            "kind": {
                "type": "string",
                "enum": ["contact", "slice", "support-verify", "tau-scan", "basis", "dist", "props", "holder"]
            },
            "config_hash": { "type": "string", "pattern": "^[0-9a-f]{64}$" },
            "seed": { "type": "integer", "minimum": 0 },
            "domain": {
                "type": "object",
                "required": ["defining", "m"],
                "properties": {
                    "defining": { "type": "string" },
                    "nvars": { "type": ["integer", "null"] },
                    "m": { "type": "integer" },
                    "rho_normalization": { "type": "string", "enum": ["raw"] }
                }
            },
            "params": { "type": "object" },
            "pass": { "type": "boolean" },
            "result": { "type": "object" },
            "timestamp": { "type": "integer", "description": "seconds since the epoch; excluded from config_hash" }
        }
    })
}
